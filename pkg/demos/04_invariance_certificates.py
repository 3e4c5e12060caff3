"""Pre-invariance certificates for a contracted feedback loop.

Given a closed box K of states, the checker certifies that closed-loop
trajectories starting in K never leave it, by verifying three conditions:
(i) initial states, flow/jump sets, and the output image are situated
correctly; (ii) jumps from K land back in K for every assumed input; and
(iii) on each boundary cell of K the flow field points into the matching
sign cone.  With affine right-hand-side metadata the set-valued arithmetic
is exact on intervals; without it the checker falls back to grid sampling
and says so in the certificate.  Verification is complemented by
simulation: confirmation runs for certified problems, a counterexample
run from the falsifying witness otherwise.

Run:  python3 demos/04_invariance_certificates.py
"""

import json

from hybridcontracts import (
    AGContract,
    HybridSystemDesc,
    InvarianceProblem,
    SimPolicy,
    certificate,
    check_invariant_relative,
    interval,
    product,
    validate,
)

W = interval(-2, 2)
CONTRACT = AGContract(interval(-1, 1), interval(-1, 1), interval(-1, 1))
POLICY = SimPolicy(dt=0.01, max_time=2.0, max_jumps=4)


def plant(**overrides):
    """Contractive loop: xdot = -2x - 2w, jumps from x = 0 halve the state."""
    kw = dict(
        dims=(1, 1, 1),
        W=W,
        X=interval(-2, 2),
        Y=interval(-2, 2),
        C=product(interval(-1, 1), W),
        D=product(interval(0, 0), W),
        F=(lambda x, w: (-2.0 * x[0] - 2.0 * w[0],),),
        G=(lambda x, w: (0.5 * x[0],),),
        h=lambda x: (x[0],),
        X0=interval(-1, 1),
        assumption1=True,
        lipschitz=True,
        f_affine=(((0.0, {0: -2.0, 1: -2.0}),),),
        g_affine=(((0.0, {0: 0.5}),),),
        h_affine=((0.0, {0: 1.0}),),
        name="plant",
    )
    kw.update(overrides)
    return validate(HybridSystemDesc(**kw))


# --- a certified problem -----------------------------------------------------

problem = InvarianceProblem(system=plant(), contract=CONTRACT, K=interval(-1, 1))
verdict = check_invariant_relative(problem, POLICY)
cert = certificate(problem, verdict)

print(f"K = {cert['K']}, resolutions = {cert['resolutions']}")
for name in ("i", "ii", "iii"):
    cond = cert["conditions"][name]
    print(f"condition ({name}): {cond['status']}  [{cond['arithmetic']}]")
print("overall:", cert["overall"])
print("conclusions:", json.dumps(cert["conclusions"], indent=2))
print("confirmation runs:")
for c in verdict.confirmations:
    print(f"  x0 = {c['x0']}: stayed in G_X = {c['stayed_in_g_x']}")
print()

# --- a falsified one: jumps from x = 1 triple the state ----------------------

bad = plant(
    D=product(interval(1, 1), W),
    G=(lambda x, w: (3.0 * x[0],),),
    g_affine=(((0.0, {0: 3.0}),),),
    name="tripler",
)
problem = InvarianceProblem(system=bad, contract=CONTRACT, K=interval(-1, 1))
verdict = check_invariant_relative(problem, POLICY)

print("tripling the state at the jump breaks condition (ii):")
print("  status: ", verdict.cond_ii.status)
print("  witness:", verdict.cond_ii.witness)
print("  overall:", verdict.overall)
print("  counterexample simulation:", verdict.counterexample)
