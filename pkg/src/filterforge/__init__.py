"""Transfer filter functions for open-loop bang-bang qubit control.

Builds pulse sequences and their toggling-frame control matrices,
computes fundamental and generalized filter functions exactly (moment
tables about zero frequency and closed-form values at any frequency),
determines filtering and cancellation orders, compares decoupling
families through truncated time-ordered exponentials, and evaluates
dephasing decay for Gaussian and classical noise.
"""

from .control import ControlMatrix, toggling_control_matrix
from .evaluate import FilterEvaluation, exp_kernel, fff_eval, fff_eval_quadrature
from .gff import (
    Composition,
    GffEvaluation,
    GffTable,
    compositions,
    effective_first_order_ff,
    gff_eval,
    gff_taylor,
)
from .magnus import (
    CompositeModel,
    MagnusTerms,
    ToyNoiseModel,
    error_action_norm,
    exact_propagator,
    figure1_scan,
    magnus_terms,
    tone_error_action_norm,
)
from .moments import IndexTuple, MomentTable, fff_taylor, index_tuple, moment
from .orders import (
    NoGoResult,
    OrderValue,
    ProtocolOrders,
    RelevantSet,
    fff_filtering_order,
    orders_report,
    protocol_co,
    protocol_fo,
    quasistatic_no_go,
    relevant_indices,
)
from .pauli import AXES, SIGMA, PauliAxis, pauli_product
from .sequences import (
    Pulse,
    PulseSequence,
    cdd_sequence,
    free_evolution,
    load_sequence,
    parse_sequence_json,
    save_sequence,
    sequence_to_json_str,
    udd_sequence,
)
from .spectra import (
    CumulantSeries,
    DivergentSpectrumError,
    NoiseSpectrum,
    SpectrumCumulant,
    ToneCumulant,
    chi_gaussian,
    classical_decay,
    switching_transform,
    tone_pair_cumulant,
)

__version__ = "0.1.0"
