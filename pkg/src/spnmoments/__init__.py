"""Sum-product network inference, exact posterior edge moments, and online learners."""

from .graph import (
    DataFormatError,
    DirichletPrior,
    GraphBuilder,
    Instance,
    ModelFormatError,
    NodeKind,
    PriorFormatError,
    SpnGraph,
    StructureError,
    marginal_instance,
    parse_data,
    parse_instance,
    parse_model,
    parse_prior,
    serialize_model,
    serialize_prior,
    topological_order,
    validate,
)
from .inference import (
    CircuitTrace,
    count_induced_trees,
    differentiate,
    evaluate,
    log_likelihood,
)
from .moments import (
    EdgeMoment,
    MomentFunction,
    MomentReport,
    ZeroEvidenceError,
    compute_lambdas,
    compute_moments,
    digamma,
    mean_weights,
    prior_moment,
    single_edge_moment,
    weight_lambdas,
    z_x,
)
from .online import (
    ADF,
    BMM,
    CCCP,
    DirichletState,
    DomainError,
    TrainLog,
    adf_step,
    bmm_step,
    cccp_step,
    train,
)
from .oracle import (
    CapExceededError,
    GenerationError,
    InducedTree,
    enumerate_trees,
    generate_random_spn,
    oracle_lambda,
    oracle_moment,
    oracle_polynomial,
    sample_instances,
)

__version__ = "0.1.0"
