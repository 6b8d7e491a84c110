"""The 11 knowledge components: patterns, templates, macros, generated tasks.

Run: python demos/03_task_model.py
"""

from cubetutor import task_model
from cubetutor.cube import serialize
from cubetutor.hints import make_hint
from cubetutor.task_model import CATALOG, canonical_macro, kc_pattern_positions, match_kc
from cubetutor.taskgen import generate_task

print("The task model, in skillometer order:")
for component in CATALOG:
    templates = kc_pattern_positions(component)
    print(f"  {component.title:>13}  stage={component.stage.name.lower():<13} "
          f"difficulty={'*' * component.difficulty:<4} templates={len(templates)}")

print("\nGenerating one practice task per component and solving it:")
for component in CATALOG:
    task = generate_task(component.id, rng_seed=5)
    macro = canonical_macro(component, task.piece, task.state)
    end = task.state.apply_all(macro)
    colors = "/".join(sorted(c.name.lower() for c in task.piece.colors))
    print(f"  {component.title:>13}: piece {colors:<24} "
          f"macro {' '.join(m.notation for m in macro):<22} "
          f"goal reached: {task_model.goal_met(component, task.piece, end)}")

print("\nA generated configuration matches its component:")
task = generate_task(task_model.KcId.BACK_HARDER, rng_seed=11)
print("  facelets:", serialize(task.state))
print("  matches: ", [(c.id.value, p.kind) for c, p in match_kc(task.state)][:4], "...")

print("\nThe three hint levels for that task:")
for level in (1, 2, 3):
    payload = make_hint(task.state, task_model.kc(task.kc_id), task.piece, level)
    print(f"  level {level}: highlight {len(payload.highlight)} stickers, "
          f"grayout {len(payload.grayout)}, steps "
          f"{[text for _, text in payload.steps] or '-'}")
