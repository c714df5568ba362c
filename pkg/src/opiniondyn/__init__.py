"""Binary opinion games on weighted graphs: exact equilibrium structure,
best-response dynamics, and logit-dynamics mixing analysis."""

__version__ = "0.1.0"

from .bestresponse import (
    FixedSequence,
    GadgetSchedule,
    RoundRobin,
    Trace,
    TraceStep,
    UniformRandom,
    adversarial_schedule,
    best_response,
    certify_drop,
    run_best_response,
    validate_schedule,
)
from .bottleneck import BottleneckReport, bottleneck_lower_bound, bottleneck_set
from .errors import InvariantError, LimitExceededError, OpinionDynError, SchemaError
from .games import (
    EquilibriumReport,
    OpinionGame,
    ScaledUtilityGame,
    belief_levels,
    canonicalize_beliefs,
    enumerate_nash,
    greedy_nash,
    integer_version,
    opinion_game,
    optimum_profile,
    poa_pos,
    threshold_beliefs,
)
from .graphs import (
    CutwidthResult,
    GadgetChain,
    SocialGraph,
    cut_weight,
    cutwidth_exact,
    make_clique,
    make_complete_bipartite,
    make_gadget_chain,
    make_star,
)
from .logit import (
    LogitChain,
    SimulationResult,
    check_reversibility,
    contraction_check,
    coupled_update,
    coupling_joint,
    coupling_step,
    gibbs,
    mixing_time_exact,
    mixing_time_matrix_power,
    path_coupling_mixing_bound,
    simulate,
    transition_matrix,
    tv_distance,
    update_prob,
)
from .spectral import (
    RelaxationBounds,
    SpectralResult,
    canonical_path_margin,
    congestion_upper_bound,
    mixing_bounds_from_relaxation,
    relaxation_time,
)
