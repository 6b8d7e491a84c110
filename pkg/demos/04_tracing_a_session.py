"""Model tracing and knowledge tracing on a raw observation stream.

Run: python demos/04_tracing_a_session.py
"""

from cubetutor import task_model
from cubetutor.solver import Stage
from cubetutor.task_model import KcId, canonical_macro, kc
from cubetutor.taskgen import generate_task
from cubetutor.tracing import (
    StateObservation, Tracer, TracingParams, skillometer,
)

params = TracingParams()
print(f"Grading: ratio of distance-decreasing transitions > t1={params.t1};")
print(f"mastery: last {params.window} attempts weighted by hints, "
      f"score > t2={params.t2}; weights {params.hint_weights}.\n")

tracer = Tracer(params, stage=Stage.WHITE_FLOWER)
task = generate_task(KcId.SIDE, 7)
tracer.set_focus(KcId.SIDE, task.piece)
tracer.reset_baseline(StateObservation(task.state, 0))
print("Task: insert the white edge from the equator (Side pattern).")

state, ts = task.state, 0
for move in canonical_macro(kc(KcId.SIDE), task.piece, task.state):
    state = state.apply(move)
    ts += 1200
    for event in tracer.observe(StateObservation(state, ts)):
        name = type(event).__name__
        if name == "MoveInferred":
            print(f"  t={event.ts:>5}ms inferred move {event.move.notation}")
        elif name == "BlockPlaced":
            print(f"  t={event.ts:>5}ms block placed "
                  f"({'/'.join(sorted(c.name.lower() for c in event.piece.colors))})")
        elif name == "AttemptClosed":
            a = event.attempt
            print(f"  t={event.ts:>5}ms attempt closed: kc={a.kc_id.value} "
                  f"ratio={a.ratio} success={a.success}")

print("\nSkillometer after one graded attempt:")
for row in skillometer(tracer.records):
    marker = "*" if row.attempts_seen else " "
    print(f" {marker} {row.kc_id.value:>13}: score={row.score:.1f} "
          f"mastered={row.mastered} attempts={row.attempts_seen}")
