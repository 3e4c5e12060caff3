"""Assume-guarantee contracts for hybrid dynamical systems.

Simulation of hybrid arcs with nondeterministic flow/jump branching,
weak/strong contract monitors, cascade and feedback composition with
theorem harnesses, pre-invariance certificates, and a declarative TOML
scenario format with deterministic outputs.
"""

from .arcs import (
    ArcClassification,
    ArcKind,
    ArcSegment,
    HybridArc,
    arc_from_segments,
    classify,
    max_jump_variation,
    reparametrize,
    sample_arc,
    to_csv,
)
from .composition import (
    CascadeSystem,
    FeedbackSystem,
    cascade,
    cascade_contract,
    enumerate_cascade_branches,
    feedback,
    harness_cascade_theorem,
    harness_feedback_theorem,
    probe_inputs,
    simulate_cascade,
    split_cascade_arc,
)
from .contracts import (
    AGContract,
    LiftStrictnessWarning,
    SATISFIED,
    UNKNOWN,
    VIOLATED,
    Verdict,
    check_strong,
    check_weak,
    feedback_compat,
    lift_weak_to_strong,
    verdict_report,
)
from .expressions import (
    EvalDomainError,
    ExpressionError,
    affine_coefficients,
    compile_expression,
    eval_expression,
    parse_expression,
)
from .hybrid_time import (
    HybridTimeDomain,
    embed_map,
    make_domain,
    shared_domain,
    sup_and_length,
    to_triples,
    truncate,
)
from .invariance import (
    ConditionVerdict,
    InvarianceProblem,
    InvarianceVerdict,
    certificate,
    check_condition_i,
    check_condition_ii,
    check_condition_iii,
    check_invariant_relative,
)
from .scenario_io import (
    BUILTIN_SCENARIOS,
    Scenario,
    ScenarioError,
    exit_code,
    load_scenario,
    parse_scenario,
    render_scenario,
    run_scenario,
    write_outputs,
)
from .sets import (
    FACE_TOL,
    Box,
    BoxSet,
    Face,
    Membership,
    SignCone,
    SignConstraint,
    box,
    closure,
    contains,
    contract,
    distance,
    empty,
    expand,
    format_box_literal,
    in_cone,
    intersect,
    interval,
    membership,
    parse_box_literal,
    point,
    product,
    sample_boundary,
    subset,
    tangent_cone,
    union,
    whole,
)
from .systems import (
    HybridSystemDesc,
    InputSignal,
    SimPolicy,
    SimulationError,
    ValidationError,
    constant_input,
    enumerate_branches,
    enumerate_feedback_branches,
    replay_check,
    simulate,
    simulate_feedback,
    validate,
)

__version__ = "0.1.0"
