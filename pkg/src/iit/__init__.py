"""Submodular information inequalities: fractional bounds, Jensen-type
generalisations, Loomis-Whitney-type projection bounds and edge bounds for
difference-pattern graphs, each with a brute-force check."""

from .setfun import (
    GroundSet,
    JointDistribution,
    SetFunction,
    check_structure,
    coverage_oracle,
    cut_oracle,
    entropy_oracle,
    eval_conditional,
    modular_oracle,
)
from .families import (
    SetFamily,
    WeightedFamily,
    classify_weights,
    complement_dual,
    han_family,
    min_weight_covering_lp,
    shearer_weights,
)
from .mt import covering_packing_bounds, mt_bounds, mt_gaps_duality

__version__ = "0.1.0"
