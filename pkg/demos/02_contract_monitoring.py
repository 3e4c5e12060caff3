"""Weak and strong contract monitoring on hybrid arcs.

An assume-guarantee contract (A_W, G_X, G_Y) promises state and output
containment as long as the input respects its assumption set.  The weak
monitor checks the promise up to the last sample where the assumption
held; the strong monitor additionally requires the output promise to
survive for a positive stretch past that horizon (and across the next
jump, if one follows it).  This script monitors a hand-built arc whose
input steps outside the assumption mid-run: one guarantee holds strongly
with a measured continuation margin, a tighter one exhibits the
weak-but-not-strong gap.  It then widens a guarantee with the
weak-to-strong lift.

Run:  python3 demos/02_contract_monitoring.py
"""

import json
import warnings

from hybridcontracts import (
    AGContract,
    HybridTimeDomain,
    check_strong,
    check_weak,
    feedback_compat,
    interval,
    lift_weak_to_strong,
    sample_arc,
    verdict_report,
)

# --- an arc whose input leaves the assumption set at t = 1 ------------------

domain = HybridTimeDomain((0.0, 2.0))  # single flow interval, no jumps


def w_fn(t, j):
    return (0.0,) if t <= 1.0 else (1.0,)


def x_fn(t, j):
    return (max(0.0, t - 1.0),)


arc = sample_arc(domain, 0.05, w_fn, x_fn, x_fn, dims=(1, 1, 1))

contract = AGContract(
    a_w=interval(-0.5, 0.5),
    g_x=interval(-5, 5),
    g_y=interval(-0.25, 0.25),
    name="demo",
)

print("input w(t) = 0 until t = 1, then 1 (outside A_W = [-0.5, 0.5])")
print("output y(t) = max(0, t - 1), guarantee G_Y = [-0.25, 0.25]")
print()
print("weak verdict:  ", check_weak(arc, contract).status)
strong = check_strong(arc, contract)
print("strong verdict:", strong.status)
print()
print("strong monitor report:")
print(json.dumps(verdict_report(strong), indent=2))
print()

# Both checks pass: the guarantee binds only while the input history
# stays in A_W (up to the horizon at t = 1), and past the horizon the
# output keeps the promise for another 0.25s before crossing 0.25 --
# that continuation margin is the delta_witness above.

# --- a tighter guarantee is kept weakly but not strongly ---------------------

tight = AGContract(contract.a_w, contract.g_x, g_y=interval(0, 0))
print("tightening the output guarantee to G_Y = {0}:")
print("  weak verdict:  ", check_weak(arc, tight).status,
      " (y = 0 everywhere the assumption held)")
strong = check_strong(arc, tight)
print("  strong verdict:", strong.status)
print("  report:", json.dumps(verdict_report(strong)))
print("  the output leaves {0} immediately past the horizon, so no")
print("  positive continuation margin exists")
print()

# --- upgrading weak to strong by widening the output guarantee --------------

# If outputs move by at most beta across any jump, widening G_Y by
# eps > beta (intersected with the output space Y) turns every weak
# satisfaction into a strong one.
Y = interval(-5, 5)
lifted = lift_weak_to_strong(contract, beta=0.3, eps=0.5, Y=Y)
print(f"lifted guarantee: G_Y' = expand(G_Y, 0.5) n Y = "
      f"[{lifted.g_y.pieces[0].faces[0].lo}, {lifted.g_y.pieces[0].faces[0].hi}]")

with warnings.catch_warnings(record=True) as caught:
    warnings.simplefilter("always")
    lift_weak_to_strong(contract, beta=0.5, eps=0.5, Y=Y)
print(f"lift at eps == beta warns: {caught[0].message}")
print()

# --- is the widened guarantee still feedback compatible? ---------------------

ok, report = feedback_compat(lifted, eps=0.0, Y=Y)
print("feedback compatibility of the lifted contract "
      "(expand(G_Y', 0) n Y <= A_W):")
print(f"  inclusion = {ok}, G_Y closed = {report['g_y_closed']}")
print("  (fails here: the widened output range is no longer inside A_W,")
print("   so closing the loop w = y would exit the assumption set)")
