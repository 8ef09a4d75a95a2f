"""Conditional measurement operators and what can be done with them.

``E(n|m) = <m|_anc U |n>_anc`` acts on the signal modes when the ancillas are
prepared in the number state ``n`` and ``m`` photons are counted at the
output. The first slot is always the preparation, the second the count.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import Iterable, Literal, Optional, Sequence

import numpy as np

from .errors import (
    DimensionMismatchError,
    PatternError,
    SingularParameterizationError,
    UnsupportedPatternError,
    ValidationError,
)
from .fockoracle import oracle_conditional_operator
from .fockspace import (
    FockBasis,
    FockOperator,
    FockStateVector,
    OccupationVector,
    annihilation,
    creation,
    iter_patterns,
    occupation,
)
from .netcompile import ModePartition, NetworkUnitary, beam_splitter
from .qsymbol import (
    QPolynomial,
    exp_quadratic,
    expand_network_symbol,
    extract_conditional_symbol,
    symbol_to_operator,
)

Method = Literal["qsymbol", "oracle"]
METHODS = ("qsymbol", "oracle")
PROBABILITY_FLOOR = 1e-12


@dataclass(frozen=True)
class AncillaPattern:
    """Ancilla preparation ``n`` and detected counts ``m``."""

    prepare: OccupationVector
    count: OccupationVector

    def __post_init__(self):
        object.__setattr__(self, "prepare", occupation(self.prepare))
        object.__setattr__(self, "count", occupation(self.count))
        if len(self.prepare) != len(self.count):
            raise PatternError(
                f"prepare {self.prepare} and count {self.count} have different lengths"
            )

    @property
    def sector_shift(self) -> int:
        return sum(self.prepare) - sum(self.count)

    def check(self, partition: ModePartition) -> None:
        if len(self.prepare) != partition.n_ancilla:
            raise PatternError(
                f"pattern has {len(self.prepare)} ancilla entries, partition has "
                f"{partition.n_ancilla} ancilla modes"
            )


def _pattern(pattern) -> AncillaPattern:
    if isinstance(pattern, AncillaPattern):
        return pattern
    prepare, count = pattern
    return AncillaPattern(tuple(prepare), tuple(count))


def _check_network(s: NetworkUnitary, partition: ModePartition) -> None:
    if s.dim != partition.modes:
        raise DimensionMismatchError(
            f"network has {s.dim} modes but the partition has {partition.modes}"
        )


def _check_method(method: str) -> None:
    if method not in METHODS:
        raise ValidationError(f"unknown method {method!r}; expected one of {METHODS}")


def conditional_operator(s: NetworkUnitary, partition: ModePartition, pattern,
                         n_max: int, method: Method = "qsymbol") -> FockOperator:
    """Conditional operator ``E(prepare|count)`` on signal states with ``<= n_max`` photons.

    Parameters
    ----------
    s, partition
        Network unitary and its signal/ancilla split.
    pattern : AncillaPattern or (prepare, count)
    n_max : int
        Truncation on the total signal photon number.
    method : {"qsymbol", "oracle"}
        Series expansion of the Q-symbol, or matrix elements from permanents.
    """
    pattern = _pattern(pattern)
    _check_network(s, partition)
    pattern.check(partition)
    _check_method(method)
    if n_max < 0:
        raise ValidationError(f"n_max must be >= 0, got {n_max}")
    if method == "oracle":
        return oracle_conditional_operator(s, partition, pattern.prepare, pattern.count, n_max)
    n_tot, m_tot = sum(pattern.prepare), sum(pattern.count)
    basis = FockBasis(partition.n_signal, n_max)
    u = expand_network_symbol(s, partition, 2 * (n_max + max(n_tot, m_tot)),
                              max_ancilla_star=m_tot, max_ancilla_plain=n_tot)
    sym = extract_conditional_symbol(u, pattern.prepare, pattern.count)
    return symbol_to_operator(sym, n_max, pattern.sector_shift, basis=basis)


class _OperatorFamily:
    """Operators ``E(prepare|m)`` for one preparation and many counts.

    The Q-symbol is expanded once. A monomial feeding an operator block from
    input sector ``T`` has total degree ``2 (T + sum(prepare))``, so a
    single expansion to ``2 (n_max + sum(prepare))`` is exact for every count.
    """

    def __init__(self, s, partition, prepare, n_max, method, max_count):
        self.s, self.partition, self.n_max, self.method = s, partition, n_max, method
        self.prepare = occupation(prepare, partition.n_ancilla)
        self.basis = FockBasis(partition.n_signal, n_max)
        self.u = None
        if method == "qsymbol":
            self.u = expand_network_symbol(
                s, partition, 2 * (n_max + sum(self.prepare)),
                max_ancilla_star=max_count, max_ancilla_plain=sum(self.prepare))

    def __call__(self, count) -> FockOperator:
        count = occupation(count, self.partition.n_ancilla)
        if self.method == "oracle":
            return oracle_conditional_operator(self.s, self.partition, self.prepare, count,
                                               self.n_max)
        sym = extract_conditional_symbol(self.u, self.prepare, count)
        return symbol_to_operator(sym, self.n_max, sum(self.prepare) - sum(count),
                                  basis=self.basis)


@dataclass(eq=False)
class GateResult:
    """Outcome of applying a conditional operator to a state.

    ``normalized`` is ``None`` when the event probability is at or below
    ``1e-12``; ``defined`` reports the same thing.
    """

    unnormalized: FockStateVector
    probability: float
    normalized: Optional[FockStateVector]

    @property
    def defined(self) -> bool:
        return self.normalized is not None


def apply_gate(e: FockOperator, psi: FockStateVector) -> GateResult:
    """Apply ``E`` to a normalised input, returning the heralded state and its probability."""
    if e.basis != psi.basis:
        raise DimensionMismatchError(f"operator basis {e.basis!r} vs state basis {psi.basis!r}")
    psi.validate_normalized()
    for t in range(psi.max_sector() + 1):
        lost = t + e.sector_shift > e.basis.max_total
        if lost and np.any(psi.amplitudes[psi.basis.sector_slice(t)] != 0):
            raise ValidationError(
                f"input has {t}-photon components whose image has {t + e.sector_shift} "
                f"photons, beyond the operator truncation n_max={e.basis.max_total}"
            )
    out = e.apply(psi)
    prob = float(np.vdot(out.amplitudes, out.amplitudes).real)
    normalized = None
    if prob > PROBABILITY_FLOOR:
        normalized = FockStateVector(out.basis, out.amplitudes / np.sqrt(prob))
    return GateResult(out, prob, normalized)


def _state_bound(psi: FockStateVector, prepare, n_max) -> int:
    top = psi.max_sector()
    if top < 0:
        raise ValidationError("input state is the zero vector")
    need = top + sum(prepare)
    if n_max is not None and need > n_max:
        raise ValidationError(
            f"state reaches {top} photons and {sum(prepare)} are prepared in the "
            f"ancillas; n_max must be at least {need}, got {n_max}"
        )
    return need


def outcome_distribution(s: NetworkUnitary, partition: ModePartition, prepare: Sequence[int],
                         psi: FockStateVector, n_max: int | None = None,
                         method: Method = "qsymbol") -> dict[OccupationVector, float]:
    """Probability of every ancilla count given the preparation and signal input.

    Counts range over every ``m`` with ``sum(m)`` at most the photons available
    (signal plus prepared). The map includes zero-probability counts.
    """
    _check_network(s, partition)
    _check_method(method)
    prepare = occupation(prepare, partition.n_ancilla)
    psi.validate_normalized()
    bound = _state_bound(psi, prepare, n_max)
    family = _OperatorFamily(s, partition, prepare, bound, method, max_count=bound)
    psi = psi.embed(family.basis)
    out = {}
    for m in iter_patterns(partition.n_ancilla, bound):
        phi = family(m).apply(psi).amplitudes
        out[m] = float(np.vdot(phi, phi).real)
    return out


def completeness_residual(s: NetworkUnitary, partition: ModePartition, prepare: Sequence[int],
                          n_max: int, method: Method = "qsymbol") -> float:
    """``max_T max |sum_m E^dagger E - I|`` over signal sectors ``T <= n_max``.

    The operators are built on a basis large enough that none of these
    sectors is truncated.
    """
    _check_network(s, partition)
    _check_method(method)
    prepare = occupation(prepare, partition.n_ancilla)
    bound = n_max + sum(prepare)
    family = _OperatorFamily(s, partition, prepare, bound, method, max_count=bound)
    sums = {t: np.zeros((len(sec), len(sec)), dtype=complex)
            for t, sec in enumerate(family.basis.sectors) if t <= n_max}
    for m in iter_patterns(partition.n_ancilla, bound):
        e = family(m)
        for t in sums:
            blk = e.blocks.get(t)
            if blk is not None:
                sums[t] += blk.conj().T @ blk
    return max(float(np.abs(acc - np.eye(len(acc))).max()) for acc in sums.values())


# ---------------------------------------------------------------------------
# Three-mode factored form


@dataclass(frozen=True)
class DisentangledParams:
    """Parameters of ``A = exp(l1 a1^dag a2) exp(mu1 n1 + mu2 n2) exp(l2 a2^dag a1)``."""

    lambda1: complex
    lambda2: complex
    mu1: complex
    mu2: complex
    exp_mu1: complex
    exp_mu2: complex


def _signal_block(s: NetworkUnitary) -> np.ndarray:
    if s.dim != 3:
        raise DimensionMismatchError(f"factored form needs a 3-mode network, got {s.dim}")
    return np.asarray(s.entries)[:2, :2]


def disentangled_form(s: NetworkUnitary) -> DisentangledParams:
    """Factor the two-signal-mode operator ``A`` of a 3-mode network with one ancilla."""
    blk = _signal_block(s)
    s11, s12, s21, s22 = blk[0, 0], blk[0, 1], blk[1, 0], blk[1, 1]
    if abs(s22) <= 1e-12:
        raise SingularParameterizationError(
            f"|s22| = {abs(s22):.3e}: the factored form does not exist"
        )
    e2 = complex(s22)
    e1 = complex(s11 - s12 * s21 / s22)
    if e1 == 0:
        raise SingularParameterizationError("s11 - s12 s21 / s22 vanishes; mu1 is undefined")
    return DisentangledParams(
        lambda1=complex(s12 / s22),
        lambda2=complex(s21 / s22),
        mu1=cmath.log(e1),
        mu2=cmath.log(e2),
        exp_mu1=e1,
        exp_mu2=e2,
    )


def factored_symbol(params: DisentangledParams, max_total_degree: int = 6) -> QPolynomial:
    """Q-symbol of the factored form, expanded from its closed-form exponent."""
    l1, l2, e1, e2 = params.lambda1, params.lambda2, params.exp_mu1, params.exp_mu2
    form = np.array([
        [e1 + l1 * l2 * e2 - 1.0, l1 * e2],
        [l2 * e2, e2 - 1.0],
    ])
    return exp_quadratic(form, max_total_degree)


def target_symbol(s: NetworkUnitary, max_total_degree: int = 6) -> QPolynomial:
    """``exp[-(1-s11)|a1|^2 - (1-s22)|a2|^2 + s12 a1* a2 + s21 a2* a1]`` expanded."""
    return exp_quadratic(_signal_block(s) - np.eye(2), max_total_degree)


def disentangled_residual(s: NetworkUnitary, params: DisentangledParams | None = None,
                          max_total_degree: int = 6) -> float:
    """Largest coefficient difference between the factored and the direct symbol."""
    params = disentangled_form(s) if params is None else params
    return factored_symbol(params, max_total_degree).max_abs_diff(
        target_symbol(s, max_total_degree))


# ---------------------------------------------------------------------------
# Sum over histories


@dataclass(frozen=True)
class HistoryTerm:
    """One term ``amplitude * a_j^dag A a_k`` (or ``amplitude * A`` when both are None)."""

    creation_mode: Optional[int]
    annihilation_mode: Optional[int]
    amplitude: complex
    label: str


def _single_photon_check(partition: ModePartition, prepare, count) -> None:
    if partition.n_ancilla != 1 or tuple(prepare) != (1,) or tuple(count) != (1,):
        raise UnsupportedPatternError(
            "history decomposition is defined only for one ancilla with one photon "
            f"prepared and one counted; got K={partition.n_ancilla}, "
            f"prepare={tuple(prepare)}, count={tuple(count)}"
        )


def histories_terms(s: NetworkUnitary, partition: ModePartition, prepare=(1,),
                    count=(1,)) -> list[HistoryTerm]:
    """Decompose ``E(1|1)`` into the pass-through term and ``N**2`` sandwich terms."""
    _check_network(s, partition)
    _single_photon_check(partition, prepare, count)
    a = partition.n_signal
    m = np.asarray(s.entries)
    terms = [HistoryTerm(None, None, complex(m[a, a]), f"s{a + 1}{a + 1} A")]
    for j in partition.signal_indices:
        for k in partition.signal_indices:
            terms.append(HistoryTerm(
                j, k, complex(m[j, a] * m[a, k]),
                f"a{j + 1}^dag s{j + 1}{a + 1} A s{a + 1}{k + 1} a{k + 1}",
            ))
    return terms


def reassemble_histories(terms: Iterable[HistoryTerm], a_op: FockOperator) -> FockOperator:
    """Sum the terms as operators, sandwiching the supplied ``A``."""
    basis = a_op.basis
    total = FockOperator(basis, 0)
    for term in terms:
        if term.creation_mode is None:
            total = total + term.amplitude * a_op
        else:
            total = total + term.amplitude * (
                creation(basis, term.creation_mode) @ a_op
                @ annihilation(basis, term.annihilation_mode))
    return total


# ---------------------------------------------------------------------------
# Two-mode beam splitter


def two_mode_catalog(theta: float, n_max: int,
                     method: Method = "qsymbol") -> dict[tuple[int, int], FockOperator]:
    """``{(n, m): E(n|m)}`` for one signal and one ancilla mode behind a beam splitter."""
    if n_max < 1:
        raise ValidationError(f"n_max must be >= 1, got {n_max}")
    s = beam_splitter(theta, 0, 1, 2)
    partition = ModePartition(1, 1)
    return {(n, m): conditional_operator(s, partition, ((n,), (m,)), n_max, method)
            for n in (0, 1) for m in (0, 1)}


def fifty_fifty_network() -> NetworkUnitary:
    """Three-mode network built from 50/50 beam splitters, ancilla on mode 3."""
    r = np.sqrt(2.0)
    return NetworkUnitary(np.array([
        [r + 1, r - 1, r],
        [r - 1, r + 1, -r],
        [r, -r, -2.0],
    ]) / (2 * r))
