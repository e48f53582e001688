"""Scattering theory for quantum walks on graphs with semi-infinite tails.

The package builds unitary walk operators from a finite directed graph
with balanced degrees, attaches half-infinite incoming/outgoing tails,
and computes the tails-in to tails-out scattering matrix by two
independent analytic routes, plus closed forms for a family of builtin
models.  ``asymptotics`` quantifies what happens as the coupling eps
tends to zero: resonances detach from the unit circle, transmission
peaks sharpen, and the scattered wave's interior energy diverges.
"""

from .asymptotics import (
    NoCrossing,
    ResonanceOnCircle,
    ResonanceTrack,
    SimplicityViolated,
    TrackingAmbiguous,
    TunnelingReport,
    comfortability_growth,
    default_eps_grid,
    discrepancy_norm,
    fit_loglog_slope,
    nonresonant_point,
    peak_width,
    remainder_table,
    resonant_block_norm,
    track_resonances,
    tunneling_check,
)
from .coins import (
    EvalError,
    Expr,
    ExprSyntaxError,
    NotUnitary,
    const_expr,
    eval_coins,
    parse,
    parse_coin_family,
)
from .graph import (
    Arc,
    DanglingArc,
    DuplicateTailIndex,
    EmptyInterior,
    GraphError,
    NotBalanced,
    Tail,
    TailedGraph,
    build_graph,
    from_finite_graph,
)
from .line import (
    BarrierSpec,
    ZeroCorner,
    barrier_scattering,
    double_barrier,
    double_barrier_peaks,
    double_barrier_state_balance,
    graph_transmission,
    line_to_graph,
    near_reflective_coin,
    rotation_coin,
    transfer_matrix,
    triple_barrier,
)
from .modelfile import ModelFileError, family_from_file, load_model, save_model
from .models import (
    BUILTIN_FAMILIES,
    EpsOutOfRange,
    ModelFamily,
    closed_form_sigma_crossing,
    closed_form_sigma_cycle,
    closed_form_sigma_ms,
    crossing_family,
    crossing_model,
    cycle_family,
    cycle_model,
    matrix_schrodinger_family,
    matrix_schrodinger_model,
    partial_fraction_identity,
    random_walk,
)
from .scattering import (
    AtInteriorResonance,
    OrthogonalityViolated,
    PoleHit,
    SingularSystem,
    comfortability,
    generalized_eigenfunction,
    oracle_direct_solve,
    pole_block,
    scattering_matrix,
    transmission_reflection,
    zero_pole_block,
)
from .spectral import (
    ClusterAmbiguity,
    EigenSystem,
    IllConditionedChain,
    NotSimple,
    Resonance,
    ZeroCluster,
    boundary_data,
    eigen_decompose,
    resonance_set,
)
from .walk import (
    DimensionMismatch,
    FreeRouting,
    LabelMismatch,
    NoExit,
    NotDeterministic,
    WalkOperator,
    assemble,
    free_routing_check,
    free_scattering_matrix,
)

__version__ = "0.1.0"
