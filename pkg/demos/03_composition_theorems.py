"""Composition: cascades, feedback loops, and theorem harnesses.

Two contracted systems compose in series when the first one's output
alphabet and guarantee fit inside the second one's input alphabet and
assumption; a single system closes into a feedback loop w = h(x) when its
output guarantee sits inside its own assumption set.  The harnesses below
do not prove the composition theorems — they hunt for counterexamples by
enumerating simulation branches and checking every implication whose
premises came out satisfied.

Run:  python3 demos/03_composition_theorems.py
"""

import json

from hybridcontracts import (
    AGContract,
    HybridSystemDesc,
    SimPolicy,
    cascade,
    cascade_contract,
    constant_input,
    empty,
    harness_cascade_theorem,
    harness_feedback_theorem,
    interval,
    product,
    simulate_cascade,
    split_cascade_arc,
    validate,
    whole,
)


def stable_plant(a, b, name):
    """Scalar xdot = a x + b w with a < 0; output is the state itself."""
    box = interval(-2, 2)
    return validate(HybridSystemDesc(
        dims=(1, 1, 1),
        W=box,
        X=box,
        Y=box,
        C=product(box, whole(1)),
        D=empty(2),
        F=(lambda x, w: (a * x[0] + b * w[0],),),
        G=(lambda x, w: (x[0],),),
        h=lambda x: (x[0],),
        X0=interval(-0.25, 0.25),
        assumption1=True,
        lipschitz=True,
        f_affine=(((0.0, {0: a, 1: b}),),),
        g_affine=(((0.0, {0: 1.0}),),),
        h_affine=((0.0, {0: 1.0}),),
        name=name,
    ))


first = stable_plant(-1.0, 0.3, "first")
second = stable_plant(-2.0, 0.2, "second")
unit = AGContract(interval(-1, 1), interval(-1, 1), interval(-1, 1), name="unit")
policy = SimPolicy(dt=0.01, max_time=1.0, max_jumps=3, max_branches=4)

# --- series composition ------------------------------------------------------

cs = cascade(first, second)
combined = cascade_contract(unit, unit)
print("cascade contract:", combined.name,
      "- assumption", "[-1, 1],", "state guarantee is the product box")

arc = simulate_cascade(cs, constant_input((0.5,), interval(-1, 1)),
                       (0.25, -0.25), policy)
a1, a2 = split_cascade_arc(cs, arc)
print(f"co-simulated composite to t = {arc.domain.sup_t}; component states at "
      f"the end: x1 = {a1.eval(1.0, 0)[1][0]:.4f}, x2 = {a2.eval(1.0, 0)[1][0]:.4f}")
print()

report = harness_cascade_theorem(first, unit, second, unit, policy)
print("cascade harness:")
print("  hypotheses:     ", report["hypotheses"])
print("  cases probed:   ", len(report["cases"]))
print("  counterexamples:", report["counterexamples"])
outcomes = {}
for case in report["cases"]:
    for thm, outcome in case["implications"].items():
        outcomes.setdefault(thm, set()).add(outcome)
for thm, seen in sorted(outcomes.items()):
    print(f"  {thm}: {sorted(seen)}")
print()

# --- feedback closure --------------------------------------------------------

report = harness_feedback_theorem(first, unit, policy)
print("feedback harness (premise probed by strong-checking open-loop branches):")
print(json.dumps({k: report[k] for k in
                  ("hypotheses", "premise_source", "premise_strong",
                   "applicable", "branch_count", "violations",
                   "counterexamples", "ok")}, indent=2))
print()
print("with a guarantee that overflows the assumption set, the hypothesis")
print("check fails and the harness reports the loop inapplicable:")
loose = AGContract(interval(-1, 1), interval(-1, 1), interval(-2, 2))
report = harness_feedback_theorem(first, loose, policy)
print("  hypotheses:", report["hypotheses"], "- applicable:", report["applicable"])
