"""Independent oracles for the worked examples.

Everything here is computed from closed-form solutions with the math module
only — no imports from the package under test — so the tests compare two
independently derived answers.  Derivations:

* Cube-root growth (closed loop ``xdot = x**(1/3)`` from 0+):
  substituting u = x**(2/3) gives du/dt = 2/3, so x(t) = (2 t / 3)**1.5 and
  x reaches 1 at t = 3/2.  (The originating text prints t1 = (3/2)**(2/3)
  for this crossing, which does not solve the ODE; the value below is the
  analytic one and the discrepancy is asserted in the acceptance tests.)

* Square-root relaxation (closed loop ``xdot = sqrt(x) - x``):
  u = sqrt(x) obeys du/dt = (1 - u)/2, hence
  u(t) = 1 - (1 - sqrt(x0)) * exp(-t/2) and x(t) = u(t)**2.
  The crossing time of level L >= x0 is t = 2 ln((1 - sqrt(x0))/(1 - sqrt(L))).

* Linear decay (closed loop ``xdot = -4 x``): x(t) = x0 * exp(-4 t).
"""

import math

# --- hybrid time domains from the worked merge example -----------------

E1_BREAKS = (0.0, 1.0, 1.5, 1.5, 2.0)          # sup (2, 3), length 5
E2_BREAKS = (0.0, 0.5, 2.0)                     # sup (2, 1), length 3
E12_BREAKS = (0.0, 0.5, 1.0, 1.5, 1.5, 2.0)     # merged, sup (2, 4)
E12_JUMP_TIMES = (0.5, 1.0, 1.5, 1.5)


# --- cube-root growth ---------------------------------------------------

def cbrt_growth(t: float) -> float:
    """x(t) = (2 t / 3)**1.5 for xdot = x**(1/3), x(0) = 0+."""
    return (2.0 * t / 3.0) ** 1.5


CBRT_CROSSING_T = 1.5           # time at which cbrt_growth reaches 1
# Plausible miscalculation of the crossing time (exponent applied inverted);
# the simulator must land near 1.5 and far from this decoy.
CBRT_CROSSING_DECOY = (1.5) ** (2.0 / 3.0)


# --- square-root relaxation ---------------------------------------------

def sqrt_relax(t: float, x0: float = 0.0) -> float:
    u = 1.0 - (1.0 - math.sqrt(x0)) * math.exp(-0.5 * t)
    return u * u


def sqrt_relax_crossing(level: float, x0: float = 0.0) -> float:
    """First t with sqrt_relax(t, x0) = level (requires x0 <= level < 1)."""
    return 2.0 * math.log((1.0 - math.sqrt(x0)) / (1.0 - math.sqrt(level)))


SQRT_CROSSING_FROM_0 = sqrt_relax_crossing(0.9)        # 5.93936...
SQRT_CROSSING_FROM_01 = sqrt_relax_crossing(0.9, 0.1)  # 5.17917...
EXAMPLE3_FIRST_JUMP_REF = 5.943   # external reference value, rounded
POST_JUMP_EXAMPLE3 = 0.09                              # 0.1 * 0.9


# --- linear decay --------------------------------------------------------

def linear_decay(t: float, x0: float = 1.0, rate: float = 4.0) -> float:
    return x0 * math.exp(-rate * t)


EXP_MINUS_2 = math.exp(-2.0)    # 0.1353352832366127 = x(0.5) from x0=1


# --- strong-monitor geometry for the declared probe arc -------------------

HORIZON_PROBE_HORIZON = (2.0, 2)   # last grid point with w inside [0, 0]
HORIZON_PROBE_DELTA = 0.5          # output stays at 0 until t = 2.5
