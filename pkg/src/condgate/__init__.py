"""Conditional measurement operators for linear optical networks with photon-counted ancillas."""

from .errors import (
    CondGateError,
    CostGuardError,
    SingularParameterizationError,
    UnsupportedPatternError,
    ValidationError,
)
from .fockoracle import matrix_element, oracle_conditional_operator, permanent
from .fockspace import FockBasis, FockOperator, FockStateVector
from .gates import (
    AncillaPattern,
    DisentangledParams,
    GateResult,
    HistoryTerm,
    apply_gate,
    completeness_residual,
    conditional_operator,
    disentangled_form,
    fifty_fifty_network,
    histories_terms,
    outcome_distribution,
    reassemble_histories,
    two_mode_catalog,
)
from .netcompile import (
    CircuitSpec,
    HermitianGenerator,
    ModePartition,
    NetworkUnitary,
    beam_splitter,
    compile_circuit,
    compose,
    parse_and_compile,
    phase_shifter,
    unitary_from_hamiltonian,
)
from .qsymbol import (
    QPolynomial,
    expand_network_symbol,
    extract_conditional_symbol,
    symbol_to_operator,
)

__version__ = "0.1.0"
