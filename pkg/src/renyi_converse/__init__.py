"""Renyi entropies, an entanglement-measure estimator, and strong-converse
fidelity bounds for state merging, entanglement concentration and Schumacher
compression, with protocol simulators and randomized inequality audits."""

from .converse import (
    ALPHA_INTERVALS,
    THEOREM_IDS,
    ConverseBoundResult,
    concentrate_bound,
    evaluate_bound,
    merge_cc_bound,
    merge_ent_bound,
    optimize_alpha,
    schumacher_bound,
    sweep_to_csv,
    sweep_to_json,
)
from .entanglement import (
    RreeConfig,
    RreeEstimate,
    SeparableDecomposition,
    pure_proximity_lower,
    rree_bounds_pure,
    rree_estimate,
    rree_lower,
    van_dam_hayden_gap,
)
from .entropy import (
    INF,
    coherent_information_renyi,
    conditional_entropy,
    mutual_information,
    quasi_relative,
    relative_entropy,
    renyi_entropy,
    renyi_relative,
    sibson_minimizer,
    spectrum_renyi_entropy,
    von_neumann_entropy,
)
from .errors import RenyiConverseError
from .propcheck import CHECKS, CheckReport, run_checks
from .protocols import (
    ConfrontReport,
    ProtocolRunResult,
    concentrate_simulate,
    confront_bounds,
    floor_pow2,
    schumacher_exact_small,
    schumacher_mass,
    type_classes,
)
from .qstate import (
    BipartiteSplit,
    DensityMatrix,
    PureState,
    QuantumChannel,
    QuantumInstrument,
    apply_channel,
    apply_instrument,
    dims,
    fidelity,
    maximally_entangled,
    maximally_mixed,
    partial_trace,
    pure,
    purify,
    random_channel,
    random_density,
    random_pure,
    schmidt,
    split,
    tensor,
    validate,
)

__version__ = "0.1.0"
