"""Scripted learners against the full tutoring loop, over the wire protocol.

Run: python demos/05_simulated_learners.py
"""

from cubetutor.sim import LearnerPolicy, run_sim

print("Each learner speaks the same JSON protocol a browser client would.\n")

for policy in (LearnerPolicy("perfect"),
               LearnerPolicy("noisy", p=0.7),
               LearnerPolicy("hintseeker", hint_level=2),
               LearnerPolicy("randomwalk")):
    result = run_sim(policy, seed=1, max_attempts=60)
    label = policy.kind + (f"(p={policy.p})" if policy.kind == "noisy" else "")
    print(f"{label:>14}: tasks={result.tasks_served:<3} "
          f"graded attempts={result.closed_attempts:<3} "
          f"mastered {result.mastered}/11 components")

print("\nThe perfect learner's trajectory, component by component:")
result = run_sim(LearnerPolicy("perfect"), seed=1, max_attempts=40)
for row in result.skill_rows:
    print(f"  {row['kc']:>13}: {row['attempts']} attempts -> score {row['score']:.1f}")

metrics = result.metrics.to_dict()
print(f"\nProcess measures: {metrics['distinct_kcs']} components exercised, "
      f"preparation cost {metrics['preparation_cost']:.3f}")
