"""Q-symbol engine.

The coherent-state diagonal element of the network operator is

    <alpha| U |alpha> = exp(alpha^dagger S alpha) exp(-alpha^dagger alpha).

For the conditional operator only the signal Gaussian is kept, so we expand
``exp(alpha^dagger M alpha)`` with ``M = S - I_signal`` (identity on the signal
block, zero on the ancilla block) as a truncated power series in the
variables ``alpha_i^*`` and ``alpha_i``. Bargmann derivatives with respect to
the ancilla variables at zero are coefficient look-ups, and a normally
ordered monomial ``prod (alpha_j^*)^p_j (alpha_k)^q_k`` maps to
``prod (a_j^dagger)^p_j (a_k)^q_k``.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from math import factorial, sqrt
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import CostGuardError, DimensionMismatchError, PatternError, ValidationError
from .fockspace import FockBasis, FockOperator
from .netcompile import ModePartition, NetworkUnitary

PURGE_TOL = 1e-15
MAX_FACTORIAL = 170
MAX_SERIES_TERMS = 2_000_000

_FACT = [float(factorial(k)) for k in range(MAX_FACTORIAL + 1)]
_SQRT_FACT = [sqrt(f) for f in _FACT]

Monomial = tuple  # (star_exponents, plain_exponents), each a tuple of ints


def _sqrt_fact(n: int) -> float:
    if n > MAX_FACTORIAL:
        raise ValidationError(f"photon number {n} exceeds the supported maximum of {MAX_FACTORIAL}")
    return _SQRT_FACT[n]


class QPolynomial:
    """Sparse polynomial in ``alpha_i^*, alpha_i`` with complex coefficients.

    ``terms`` maps ``(star_exponents, plain_exponents)`` to the coefficient.
    Zero coefficients are never stored and every monomial has total degree at
    most ``max_total_degree``.
    """

    __slots__ = ("modes", "max_total_degree", "terms", "_by_ancilla")

    def __init__(self, modes: int, terms: Mapping[Monomial, complex] | None = None,
                 max_total_degree: int | None = None):
        self.modes = int(modes)
        clean: dict[Monomial, complex] = {}
        top = 0
        for (star, plain), c in (terms or {}).items():
            star, plain = tuple(int(x) for x in star), tuple(int(x) for x in plain)
            if len(star) != self.modes or len(plain) != self.modes:
                raise DimensionMismatchError(
                    f"monomial {(star, plain)} does not have {self.modes} modes"
                )
            if c == 0:
                continue
            clean[(star, plain)] = complex(c)
            top = max(top, sum(star) + sum(plain))
        if max_total_degree is None:
            max_total_degree = top
        elif top > max_total_degree:
            raise ValidationError(
                f"monomial of degree {top} exceeds max_total_degree={max_total_degree}"
            )
        self.max_total_degree = int(max_total_degree)
        self.terms = clean
        self._by_ancilla = {}

    def __repr__(self):
        return (f"QPolynomial(modes={self.modes}, terms={len(self.terms)}, "
                f"max_total_degree={self.max_total_degree})")

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms.items())

    @classmethod
    def constant(cls, modes: int, value: complex = 1.0) -> "QPolynomial":
        zero = (0,) * modes
        return cls(modes, {(zero, zero): value}, 0)

    def coefficient(self, star: Sequence[int], plain: Sequence[int]) -> complex:
        return self.terms.get((tuple(star), tuple(plain)), 0j)

    def evaluate(self, alpha: Sequence[complex]) -> complex:
        alpha = np.asarray(alpha, dtype=complex)
        conj = alpha.conj()
        total = 0j
        for (star, plain), c in self.terms.items():
            total += c * np.prod(conj ** np.array(star)) * np.prod(alpha ** np.array(plain))
        return complex(total)

    def truncate(self, max_total_degree: int) -> "QPolynomial":
        return QPolynomial(
            self.modes,
            {m: c for m, c in self.terms.items() if sum(m[0]) + sum(m[1]) <= max_total_degree},
            max_total_degree,
        )

    def max_abs_diff(self, other: "QPolynomial") -> float:
        keys = set(self.terms) | set(other.terms)
        return max((abs(self.terms.get(k, 0j) - other.terms.get(k, 0j)) for k in keys),
                   default=0.0)

    def is_balanced(self) -> bool:
        return all(sum(s) == sum(p) for s, p in self.terms)

    def ancilla_index(self, n_signal: int) -> dict:
        """Group terms by their ancilla exponents.

        Returns ``{(anc_star, anc_plain): [(sig_star, sig_plain, coef), ...]}``.
        Cached per ``n_signal``; the polynomial itself is never mutated.
        """
        idx = self._by_ancilla.get(n_signal)
        if idx is None:
            idx = defaultdict(list)
            for (star, plain), c in self.terms.items():
                idx[(star[n_signal:], plain[n_signal:])].append(
                    (star[:n_signal], plain[:n_signal], c))
            idx = dict(idx)
            self._by_ancilla[n_signal] = idx
        return idx


# ---------------------------------------------------------------------------
# Series expansion


def exp_quadratic(matrix, max_total_degree: int, *, split: int | None = None,
                  max_upper_star: int | None = None,
                  max_upper_plain: int | None = None) -> QPolynomial:
    """Truncated Taylor series of ``exp(sum_ij M_ij alpha_i^* alpha_j)``.

    Every monomial is balanced and the coefficient of a monomial of degree
    ``2k`` comes only from the ``k``-th power, so all retained coefficients
    are exact.

    Parameters
    ----------
    matrix : (d, d) array_like
    max_total_degree : int
        Keep monomials of total degree ``<= max_total_degree``.
    split : int, optional
        Modes ``split..d-1`` form an upper group (the ancillas). When given,
        ``max_upper_star`` / ``max_upper_plain`` drop monomials whose summed
        star / plain exponent over that group exceeds the cap. Since
        multiplication never lowers an exponent, this pruning is exact for
        every monomial that is kept.
    """
    m = np.asarray(matrix, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatchError(f"quadratic form must be square, got {m.shape}")
    if max_total_degree < 0:
        raise ValidationError(f"max_total_degree must be >= 0, got {max_total_degree}")
    d = m.shape[0]
    split = d if split is None else split
    cap_s = max_upper_star if max_upper_star is not None else max_total_degree
    cap_p = max_upper_plain if max_upper_plain is not None else max_total_degree

    # Monomials are packed into ints: digit i (base B) holds the exponent of
    # alpha_i^*, digit d + j that of alpha_j.
    base = max_total_degree + 1
    steps = []
    for i in range(d):
        for j in range(d):
            c = complex(m[i, j])
            if c != 0:
                steps.append((base ** i + base ** (d + j), c, int(i >= split), int(j >= split)))

    result: dict[int, complex] = {0: 1.0 + 0j}
    current = {(0, 0): {0: 1.0 + 0j}}
    for k in range(1, max_total_degree // 2 + 1):
        nxt: dict[tuple[int, int], dict[int, complex]] = {}
        inv_k = 1.0 / k
        for (us, up), bucket in current.items():
            for inc, c, ds, dp in steps:
                ns, np_ = us + ds, up + dp
                if ns > cap_s or np_ > cap_p:
                    continue
                target = nxt.get((ns, np_))
                if target is None:
                    target = nxt[(ns, np_)] = {}
                cf = c * inv_k
                get = target.get
                for key, v in bucket.items():
                    key += inc
                    target[key] = get(key, 0j) + v * cf
        current = {}
        for grp, bucket in nxt.items():
            kept = {key: v for key, v in bucket.items() if abs(v) >= PURGE_TOL}
            if kept:
                current[grp] = kept
                result.update(kept)
        if len(result) > MAX_SERIES_TERMS:
            raise CostGuardError(
                f"series expansion exceeds {MAX_SERIES_TERMS} terms at degree {2 * k}",
                size=len(result), limit=MAX_SERIES_TERMS,
            )
        if not current:
            break

    terms = {}
    for key, c in result.items():
        digits = []
        for _ in range(2 * d):
            key, r = divmod(key, base)
            digits.append(r)
        terms[(tuple(digits[:d]), tuple(digits[d:]))] = c
    return QPolynomial(d, terms, max_total_degree)


def symbol_matrix(s: NetworkUnitary, partition: ModePartition) -> np.ndarray:
    """``M = S - I_signal``: the quadratic form whose exponential is expanded."""
    m = np.array(s.entries, dtype=complex)
    for i in partition.signal_indices:
        m[i, i] -= 1.0
    return m


def expand_network_symbol(s: NetworkUnitary, partition: ModePartition, max_total_degree: int,
                          *, max_ancilla_star: int | None = None,
                          max_ancilla_plain: int | None = None) -> QPolynomial:
    """Expand the network Q-symbol (signal Gaussian folded in) to a given total degree.

    The optional ancilla caps discard monomials that no pattern with
    ``sum(count) <= max_ancilla_star`` and ``sum(prepare) <= max_ancilla_plain``
    can use.
    """
    if s.dim != partition.modes:
        raise DimensionMismatchError(
            f"network has {s.dim} modes but the partition has {partition.modes}"
        )
    return exp_quadratic(symbol_matrix(s, partition), max_total_degree,
                         split=partition.n_signal,
                         max_upper_star=max_ancilla_star,
                         max_upper_plain=max_ancilla_plain)


def extract_conditional_symbol(u: QPolynomial, prepare: Sequence[int],
                               count: Sequence[int]) -> QPolynomial:
    """Q-symbol of the conditional operator for one ancilla pattern.

    Derivatives ``d^m/d(alpha*)^m d^n/d alpha^n`` at zero ancilla amplitude
    equal ``m! n!`` times the matching coefficient, so the result is
    ``sqrt(prod m! prod n!)`` times the coefficient polynomial of
    ``prod (alpha_anc^*)^m (alpha_anc)^n``.
    """
    prepare, count = tuple(prepare), tuple(count)
    if len(prepare) != len(count):
        raise PatternError(f"prepare {prepare} and count {count} have different lengths")
    k = len(prepare)
    n_signal = u.modes - k
    if n_signal < 1:
        raise PatternError(f"pattern of length {k} leaves no signal modes in {u.modes} modes")
    scale = 1.0
    for c in prepare + count:
        scale *= _sqrt_fact(c)
    rows = u.ancilla_index(n_signal).get((count, prepare), ())
    terms = {(star, plain): c * scale for star, plain, c in rows}
    degree = max(u.max_total_degree - sum(prepare) - sum(count), 0)
    return QPolynomial(n_signal, terms, degree)


def symbol_to_operator(e: QPolynomial, n_max: int, sector_shift: int | None = None,
                       basis: FockBasis | None = None) -> FockOperator:
    """Map a normally ordered symbol to its operator on the truncated Fock space.

    Uses ``<r| a^dagger^p a^q |t> = delta_{r-p, t-q} sqrt(t!/(t-q)!) sqrt(r!/(r-p)!)``
    per mode. All monomials must shift photon number by the same amount; for
    the zero polynomial the shift is taken from ``sector_shift`` (default 0).
    """
    shifts = {sum(s) - sum(p) for s, p in e.terms}
    if len(shifts) > 1:
        raise ValidationError(
            f"symbol mixes photon-number shifts {sorted(shifts)}; not representable "
            "as a single sector-shift operator"
        )
    if shifts:
        found = shifts.pop()
        if sector_shift is not None and found != sector_shift:
            raise ValidationError(f"symbol shifts photon number by {found}, expected {sector_shift}")
        sector_shift = found
    elif sector_shift is None:
        sector_shift = 0
    if basis is None:
        basis = FockBasis(e.modes, n_max)
    elif basis.modes != e.modes or basis.max_total != n_max:
        raise DimensionMismatchError(f"basis {basis!r} does not match symbol/n_max")
    op = FockOperator(basis, sector_shift)

    by_plain: dict[tuple, list] = defaultdict(list)
    for (star, plain), c in e.terms.items():
        if sum(plain) <= n_max and sum(star) <= n_max:
            by_plain[plain].append((star, c))

    for plain, stars in by_plain.items():
        q_tot = sum(plain)
        for t in range(q_tot, n_max + 1):
            if t not in op.blocks:
                continue
            blk = op.blocks[t]
            for col, state in enumerate(basis.sectors[t]):
                rest = tuple(a - b for a, b in zip(state, plain))
                if min(rest, default=0) < 0:
                    continue
                lower = 1.0
                for a, r in zip(state, rest):
                    lower *= _sqrt_fact(a) / _sqrt_fact(r)
                for star, c in stars:
                    out = tuple(r + p for r, p in zip(rest, star))
                    upper = 1.0
                    for o, r in zip(out, rest):
                        upper *= _sqrt_fact(o) / _sqrt_fact(r)
                    blk[basis.sector_index(out), col] += c * lower * upper
    return op


@dataclass(frozen=True)
class SymbolCheck:
    """Outcome of :func:`structural_violations`."""

    unbalanced: int
    wrong_shift: int


def structural_violations(u: QPolynomial, conditionals: Iterable[tuple[QPolynomial, int]] = ()) -> SymbolCheck:
    """Count unbalanced monomials in ``u`` and monomials with the wrong shift.

    ``conditionals`` yields ``(symbol, expected_shift)`` where the shift is
    ``sum(star) - sum(plain) = sum(prepare) - sum(count)``.
    """
    unbalanced = sum(1 for s, p in u.terms if sum(s) != sum(p))
    wrong = 0
    for sym, shift in conditionals:
        wrong += sum(1 for s, p in sym.terms if sum(s) - sum(p) != shift)
    return SymbolCheck(unbalanced, wrong)
