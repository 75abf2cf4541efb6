"""Triangle-free subgraphs of multigraphs: SDP rounding, exact 3-colouring and gadget reductions."""

from ._kernels import BACKEND
from .derand import (
    BinomialGrid,
    DerandBudgetError,
    DerandConfig,
    HalfSpaceSystem,
    HalfSpaceTerm,
    StepFunction,
    berry_esseen_eps,
    berry_esseen_N,
    derandomize,
    reduce_dimension,
    step_approximation,
)
from .graph import (
    Bipartition,
    CutAssignment,
    EdgeSelection,
    GraphParseError,
    Multigraph,
    bipartition,
    cut_selection,
    cut_weight,
    distances_from,
    is_triangle_free,
    parse_graph,
    read_graph,
    selection_weight,
    serialise_graph,
)
from .hardness import (
    E3LinSystem,
    Gadget,
    ReducedInstance,
    VerificationReport,
    bins_lower_bound,
    decode_solution,
    gadget9,
    gadget17,
    hardness_ratio,
    make_balanced,
    parse_e3lin,
    reduce_to_maxpcsp,
    verify_gadget,
)
from .oracles import (
    OracleSizeError,
    brute_all_max_triangle_free,
    brute_best_3colouring,
    brute_e3lin,
    brute_max_cut,
    brute_max_triangle_free,
)
from .params import (
    RoundingParams,
    bound_long,
    bound_middle,
    gw_constants,
    hybrid_params,
    optimize_tau,
    verify_constraints,
    x_of_tau,
)
from .rounding import (
    Hyperplane,
    RoundingOutcome,
    derandomised_round,
    inclusion_probability,
    round_gw,
    round_hybrid,
    round_hybrid_case_b,
    sample_hyperplane,
)
from .sdp import Embedding, SdpConvergenceError, SdpReport, sdp_objective, solve_maxcut_sdp
from .threecolor import (
    GaussianTriple,
    ThreeColouring,
    cheng_orthant,
    f_margin,
    p_alpha,
    round_three,
    solve_k2_k3,
)

__version__ = "0.1.0"
