"""Hierarchical outranking decision aid.

Ranks alternatives evaluated on a tree of interacting criteria: valued
outranking with discrimination thresholds and veto, per-node concordance with
strengthening/weakening/antagonism effects, card-deck weight elicitation with
imprecise intervals, and Monte Carlo robustness reporting over all compatible
parameter vectors.
"""

__version__ = "0.1.0"

from .model import (  # noqa: F401
    CriterionNode,
    CriterionTree,
    Direction,
    InteractionDeclaration,
    InteractionKind,
    PerformanceTable,
    Problem,
    Scale,
    ThresholdBand,
    ThresholdSpec,
    ValidationError,
    elementary_descendants,
    validate_problem,
)
from .electre import (  # noqa: F401
    CredibilityMatrix,
    ParameterVector,
    advantage,
    concordance,
    credibility,
    credibility_matrix,
    partial_concordance,
    partial_discordance,
)
from .ranking import (  # noqa: F401
    CompletePreorder,
    PartialPreorder,
    Relation,
    discrimination_s,
    distill,
    intersect,
    relation_counts,
)
from .srf import (  # noqa: F401
    CardDeck,
    elementary_weights,
    local_weight_space,
    srf2_weights,
    srf_weights_from_z,
    z_of_e0,
)
from .smaa import (  # noqa: F401
    CoefficientCaps,
    IncompatibleElicitation,
    SamplingConfig,
    SmaaReport,
    barycenter,
    canonical_key,
    run_smaa,
    sample_parameters,
)
