"""Truncated multimode Fock space: basis, sector-blocked operators, states.

The basis holds every occupation vector with total photon number at most
``max_total``, ordered by total and then lexicographically (ascending), e.g.
for two modes: ``(0,0), (0,1), (1,0), (0,2), (1,1), (2,0), ...``.

Operators produced by linear optics shift the total photon number by a fixed
amount, so :class:`FockOperator` stores one dense block per input sector.
Entries outside the allowed sector pairs cannot be represented at all.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from math import comb, factorial, sqrt
from typing import Iterator, Mapping, Sequence

import numpy as np

from .errors import CostGuardError, DimensionMismatchError, ValidationError

DEFAULT_MAX_BASIS = 20000
MAX_BASIS_ENV = "CONDGATE_MAX_BASIS"

OccupationVector = tuple


def max_basis_size() -> int:
    """Basis-size ceiling, read from ``CONDGATE_MAX_BASIS``."""
    raw = os.environ.get(MAX_BASIS_ENV)
    if raw is None or raw.strip() == "":
        return DEFAULT_MAX_BASIS
    try:
        value = int(raw)
    except ValueError:
        raise ValidationError(f"{MAX_BASIS_ENV} must be an integer, got {raw!r}") from None
    if value < 1:
        raise ValidationError(f"{MAX_BASIS_ENV} must be positive, got {value}")
    return value


def occupation(counts: Sequence[int], modes: int | None = None) -> OccupationVector:
    """Validate and normalise an occupation vector to a tuple of ints."""
    out = []
    for c in counts:
        if isinstance(c, bool) or not isinstance(c, (int, np.integer)) or c < 0:
            raise ValidationError(f"occupation counts must be non-negative integers, got {list(counts)!r}")
        out.append(int(c))
    if modes is not None and len(out) != modes:
        raise DimensionMismatchError(
            f"occupation vector {tuple(out)} has {len(out)} entries, expected {modes}"
        )
    return tuple(out)


def sector_states(total: int, modes: int) -> list[OccupationVector]:
    """All occupation vectors of ``modes`` modes with the given total, lex ascending."""
    if modes == 0:
        return [()] if total == 0 else []
    if modes == 1:
        return [(total,)]
    return [(head,) + tail for head in range(total + 1)
            for tail in sector_states(total - head, modes - 1)]


def sector_size(total: int, modes: int) -> int:
    if total < 0:
        return 0
    return comb(total + modes - 1, modes - 1)


def basis_size(modes: int, max_total: int) -> int:
    return comb(max_total + modes, modes)


class FockBasis:
    """Occupation-number basis with total photons ``<= max_total``."""

    def __init__(self, modes: int, max_total: int, limit: int | None = None):
        if modes < 1:
            raise ValidationError(f"basis needs at least one mode, got {modes}")
        if max_total < 0:
            raise ValidationError(f"max_total must be >= 0, got {max_total}")
        size = basis_size(modes, max_total)
        limit = max_basis_size() if limit is None else limit
        if size > limit:
            raise CostGuardError(
                f"Fock basis for {modes} modes up to {max_total} photons has {size} "
                f"states, above the limit of {limit} ({MAX_BASIS_ENV})",
                size=size,
                limit=limit,
            )
        self.modes = modes
        self.max_total = max_total
        self.sectors = [sector_states(t, modes) for t in range(max_total + 1)]
        self.offsets = [0]
        for sec in self.sectors:
            self.offsets.append(self.offsets[-1] + len(sec))
        self.states: list[OccupationVector] = [s for sec in self.sectors for s in sec]
        self._index = {s: k for k, s in enumerate(self.states)}

    def __len__(self) -> int:
        return len(self.states)

    def __iter__(self) -> Iterator[OccupationVector]:
        return iter(self.states)

    def __eq__(self, other) -> bool:
        return (isinstance(other, FockBasis) and self.modes == other.modes
                and self.max_total == other.max_total)

    def __hash__(self):
        return hash((self.modes, self.max_total))

    def __repr__(self):
        return f"FockBasis(modes={self.modes}, max_total={self.max_total})"

    def index(self, state: Sequence[int]) -> int:
        try:
            return self._index[tuple(state)]
        except KeyError:
            raise ValidationError(f"state {tuple(state)} is not in {self!r}") from None

    def sector_slice(self, total: int) -> slice:
        return slice(self.offsets[total], self.offsets[total + 1])

    def sector_index(self, state: Sequence[int]) -> int:
        """Position of ``state`` within its own sector."""
        return self.index(state) - self.offsets[sum(state)]


def _sector_pairs(max_total: int, shift: int) -> list[int]:
    """Input sectors ``T`` whose image ``T + shift`` lies in ``0..max_total``."""
    return [t for t in range(max_total + 1) if 0 <= t + shift <= max_total]


class FockOperator:
    """Linear operator on a truncated Fock space that shifts photon number.

    Parameters
    ----------
    basis : FockBasis
    sector_shift : int
        Every nonzero entry maps sector ``T`` to sector ``T + sector_shift``.
    blocks : mapping of int to ndarray, optional
        ``blocks[T]`` has shape ``(size(T + shift), size(T))``. Missing blocks
        are zero.
    """

    def __init__(self, basis: FockBasis, sector_shift: int = 0,
                 blocks: Mapping[int, np.ndarray] | None = None):
        self.basis = basis
        self.sector_shift = int(sector_shift)
        self.blocks: dict[int, np.ndarray] = {}
        for t in _sector_pairs(basis.max_total, self.sector_shift):
            shape = (len(basis.sectors[t + self.sector_shift]), len(basis.sectors[t]))
            self.blocks[t] = np.zeros(shape, dtype=complex)
        for t, blk in (blocks or {}).items():
            if t not in self.blocks:
                raise ValidationError(
                    f"sector {t} -> {t + self.sector_shift} is outside the basis"
                )
            blk = np.asarray(blk, dtype=complex)
            if blk.shape != self.blocks[t].shape:
                raise DimensionMismatchError(
                    f"block {t} has shape {blk.shape}, expected {self.blocks[t].shape}"
                )
            self.blocks[t] = blk.copy()

    def __repr__(self):
        return f"FockOperator({self.basis!r}, sector_shift={self.sector_shift})"

    def __getitem__(self, key) -> complex:
        """``op[out_state, in_state]`` matrix element."""
        out, in_ = (tuple(k) for k in key)
        t = sum(in_)
        if sum(out) != t + self.sector_shift or t not in self.blocks:
            return 0j
        blk = self.blocks[t]
        return complex(blk[self.basis.sector_index(out), self.basis.sector_index(in_)])

    def to_dense(self) -> np.ndarray:
        n = len(self.basis)
        out = np.zeros((n, n), dtype=complex)
        for t, blk in self.blocks.items():
            out[self.basis.sector_slice(t + self.sector_shift), self.basis.sector_slice(t)] = blk
        return out

    def entries(self, atol: float = 0.0) -> Iterator[tuple[int, int, complex]]:
        """Nonzero entries as ``(row, col, value)`` in row-major order."""
        found = []
        for t, blk in self.blocks.items():
            r0 = self.basis.offsets[t + self.sector_shift]
            c0 = self.basis.offsets[t]
            rows, cols = np.nonzero(np.abs(blk) > atol)
            found.extend((int(r) + r0, int(c) + c0, complex(blk[r, c]))
                         for r, c in zip(rows, cols))
        return iter(sorted(found, key=lambda e: (e[0], e[1])))

    @classmethod
    def from_dense(cls, basis: FockBasis, matrix, sector_shift: int = 0,
                   atol: float = 0.0) -> "FockOperator":
        """Build from a dense matrix, rejecting entries that break the sector structure."""
        matrix = np.asarray(matrix, dtype=complex)
        op = cls(basis, sector_shift)
        check = matrix.copy()
        for t in op.blocks:
            rs = basis.sector_slice(t + sector_shift)
            cs = basis.sector_slice(t)
            op.blocks[t] = matrix[rs, cs].copy()
            check[rs, cs] = 0
        if check.size and np.abs(check).max() > atol:
            raise ValidationError("matrix has entries outside the declared photon-number shift")
        return op

    @classmethod
    def identity(cls, basis: FockBasis) -> "FockOperator":
        return cls(basis, 0, {t: np.eye(len(sec)) for t, sec in enumerate(basis.sectors)})

    def _check_basis(self, other):
        if self.basis != other.basis:
            raise DimensionMismatchError(f"basis mismatch: {self.basis!r} vs {other.basis!r}")

    def __matmul__(self, other):
        if isinstance(other, FockStateVector):
            return self.apply(other)
        if not isinstance(other, FockOperator):
            return NotImplemented
        self._check_basis(other)
        shift = self.sector_shift + other.sector_shift
        blocks = {}
        for t, blk in other.blocks.items():
            mid = t + other.sector_shift
            if mid in self.blocks and 0 <= t + shift <= self.basis.max_total:
                blocks[t] = self.blocks[mid] @ blk
        return FockOperator(self.basis, shift, blocks)

    def __add__(self, other):
        if not isinstance(other, FockOperator):
            return NotImplemented
        self._check_basis(other)
        if self.sector_shift != other.sector_shift:
            raise ValidationError("cannot add operators with different sector shifts")
        return FockOperator(self.basis, self.sector_shift,
                            {t: self.blocks[t] + other.blocks[t] for t in self.blocks})

    def __sub__(self, other):
        return self + (-1.0) * other

    def __mul__(self, scalar):
        if not np.isscalar(scalar):
            return NotImplemented
        return FockOperator(self.basis, self.sector_shift,
                            {t: scalar * b for t, b in self.blocks.items()})

    __rmul__ = __mul__

    def dagger(self) -> "FockOperator":
        shift = -self.sector_shift
        return FockOperator(self.basis, shift,
                            {t + self.sector_shift: b.conj().T for t, b in self.blocks.items()})

    def apply(self, psi: "FockStateVector") -> "FockStateVector":
        self._check_basis(psi)
        out = np.zeros(len(self.basis), dtype=complex)
        for t, blk in self.blocks.items():
            out[self.basis.sector_slice(t + self.sector_shift)] += (
                blk @ psi.amplitudes[self.basis.sector_slice(t)]
            )
        return FockStateVector(self.basis, out)

    def max_abs_diff(self, other: "FockOperator") -> float:
        self._check_basis(other)
        if self.sector_shift != other.sector_shift:
            return max(self.max_abs(), other.max_abs())
        return max((float(np.abs(self.blocks[t] - other.blocks[t]).max(initial=0.0))
                    for t in self.blocks), default=0.0)

    def max_abs(self) -> float:
        return max((float(np.abs(b).max(initial=0.0)) for b in self.blocks.values()),
                   default=0.0)

    def sector_violations(self) -> int:
        """Count nonzero dense entries that break the sector shift (always zero)."""
        dense = self.to_dense()
        totals = np.array([sum(s) for s in self.basis.states])
        bad = (totals[:, None] != totals[None, :] + self.sector_shift) & (dense != 0)
        return int(bad.sum())


@dataclass(eq=False)
class FockStateVector:
    """Amplitudes over a :class:`FockBasis`."""

    basis: FockBasis
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.shape != (len(self.basis),):
            raise DimensionMismatchError(
                f"state has {self.amplitudes.shape} amplitudes, basis has {len(self.basis)}"
            )
        if not np.all(np.isfinite(self.amplitudes)):
            raise ValidationError("state has non-finite amplitudes")

    @classmethod
    def from_occupations(cls, basis: FockBasis, amplitudes: Mapping) -> "FockStateVector":
        vec = np.zeros(len(basis), dtype=complex)
        for occ, amp in amplitudes.items():
            vec[basis.index(occupation(occ, basis.modes))] += amp
        return cls(basis, vec)

    @classmethod
    def number_state(cls, basis: FockBasis, occ: Sequence[int]) -> "FockStateVector":
        return cls.from_occupations(basis, {tuple(occ): 1.0})

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def __getitem__(self, occ) -> complex:
        return complex(self.amplitudes[self.basis.index(tuple(occ))])

    def nonzero(self) -> list[tuple[OccupationVector, complex]]:
        return [(self.basis.states[k], complex(a))
                for k, a in enumerate(self.amplitudes) if a != 0]

    def max_sector(self) -> int:
        """Largest total photon number carrying nonzero amplitude (-1 for the zero vector)."""
        top = -1
        for t in range(self.basis.max_total + 1):
            if np.any(self.amplitudes[self.basis.sector_slice(t)] != 0):
                top = t
        return top

    def embed(self, basis: FockBasis) -> "FockStateVector":
        """Re-express in a larger basis with the same mode count."""
        if basis.modes != self.basis.modes or basis.max_total < self.max_sector():
            raise DimensionMismatchError(f"cannot embed state into {basis!r}")
        vec = np.zeros(len(basis), dtype=complex)
        for occ, amp in self.nonzero():
            vec[basis.index(occ)] = amp
        return FockStateVector(basis, vec)

    def validate_normalized(self, tol: float = 1e-10) -> None:
        n = self.norm()
        if abs(n - 1.0) > tol:
            raise ValidationError(f"input state must be normalised, norm is {n!r}")


def annihilation(basis: FockBasis, mode: int) -> FockOperator:
    """Truncated ``a_mode`` on ``basis``."""
    return _ladder(basis, mode, lower=True)


def creation(basis: FockBasis, mode: int) -> FockOperator:
    """Truncated ``a_mode^dagger`` on ``basis`` (top sector is mapped out)."""
    return _ladder(basis, mode, lower=False)


def _ladder(basis: FockBasis, mode: int, lower: bool) -> FockOperator:
    if not 0 <= mode < basis.modes:
        raise ValidationError(f"mode {mode} out of range for {basis.modes} modes")
    shift = -1 if lower else 1
    op = FockOperator(basis, shift)
    for t, blk in op.blocks.items():
        for col, state in enumerate(basis.sectors[t]):
            n = state[mode]
            if lower and n == 0:
                continue
            new = list(state)
            new[mode] += shift
            row = basis.sector_index(new)
            blk[row, col] = np.sqrt(n) if lower else np.sqrt(n + 1)
    return op


def iter_patterns(modes: int, max_total: int) -> Iterator[OccupationVector]:
    """All occupation vectors on ``modes`` modes with total ``<= max_total``."""
    for t in range(max_total + 1):
        yield from sector_states(t, modes)


def product_coherent_amplitudes(basis: FockBasis, alpha: Sequence[complex]) -> np.ndarray:
    """Amplitudes of the normalised product coherent state restricted to ``basis``."""
    alpha = np.asarray(alpha, dtype=complex)
    pref = np.exp(-0.5 * float(np.sum(np.abs(alpha) ** 2)))
    out = np.empty(len(basis), dtype=complex)
    for k, occ in enumerate(basis.states):
        amp = pref
        for a, n in zip(alpha, occ):
            amp *= a ** n / sqrt(factorial(n))
        out[k] = amp
    return out


__all__ = [
    "FockBasis",
    "FockOperator",
    "FockStateVector",
    "OccupationVector",
    "annihilation",
    "basis_size",
    "creation",
    "iter_patterns",
    "max_basis_size",
    "occupation",
    "product_coherent_amplitudes",
    "sector_size",
    "sector_states",
]
