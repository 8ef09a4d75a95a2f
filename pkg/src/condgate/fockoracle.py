"""Brute-force Fock-basis reference: matrix elements of the network via permanents.

With ``U^dagger a U = S a`` the creation operators transform as
``U a_j^dagger U^dagger = sum_k S[k, j] a_k^dagger``, hence

    <out| U |in> = Per(S[rows(out), cols(in)]) / sqrt(prod out! prod in!)

where ``rows(out)`` lists mode ``k`` exactly ``out[k]`` times and
``cols(in)`` lists mode ``j`` exactly ``in[j]`` times. This is the same
convention as the Q-symbol ``exp(alpha^dagger S alpha)`` and reproduces the
two-mode identity ``E(1|0) = -sin(theta) a^dagger E(0|0)``.
"""

from __future__ import annotations

from math import factorial, sqrt
from typing import Sequence

import numpy as np

from .errors import CostGuardError, DimensionMismatchError, PatternError, ValidationError
from .fockspace import FockBasis, FockOperator, occupation, sector_states
from .netcompile import ModePartition, NetworkUnitary

MAX_PERMANENT_DIM = 20


def permanent(m) -> complex:
    """Permanent by Ryser's inclusion-exclusion formula, ``O(2^n n)``.

    Subsets of the first ``min(n, 12)`` columns are evaluated together as one
    array; the remaining columns are walked in Gray-code order so each step
    adds or removes a single column from the running row sums.

    >>> permanent([[1, 2], [3, 4]])
    (10+0j)
    """
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValidationError(f"permanent needs a square matrix, got shape {a.shape}")
    n = a.shape[0]
    if n > MAX_PERMANENT_DIM:
        raise CostGuardError(
            f"permanent of a {n}x{n} matrix exceeds the limit of {MAX_PERMANENT_DIM}",
            size=n, limit=MAX_PERMANENT_DIM,
        )
    if n == 0:
        return 1 + 0j
    if n == 1:
        return complex(a[0, 0])
    if n == 2:
        return complex(a[0, 0] * a[1, 1] + a[0, 1] * a[1, 0])

    low, masks, parity = _low_subsets(min(n, _LOW_BITS))
    base = masks @ a[:, :low].T  # row sums for every subset of the low columns
    high_cols = a[:, low:].T
    shift = np.zeros(n, dtype=complex)
    in_set = [False] * (n - low)
    high_sign = 1.0
    total = high_sign * np.dot(parity, np.prod(base, axis=1))
    for k in range(1, 1 << (n - low)):
        j = (k & -k).bit_length() - 1  # bit flipped between gray(k-1) and gray(k)
        if in_set[j]:
            shift -= high_cols[j]
        else:
            shift += high_cols[j]
        in_set[j] = not in_set[j]
        high_sign = -high_sign
        total += high_sign * np.dot(parity, np.prod(base + shift, axis=1))
    return complex((-1) ** n * total)


_LOW_BITS = 12
_SUBSET_CACHE: dict[int, tuple] = {}


def _low_subsets(bits: int):
    """0/1 membership matrix and ``(-1)^|S|`` for all subsets of ``bits`` columns."""
    hit = _SUBSET_CACHE.get(bits)
    if hit is None:
        idx = np.arange(1 << bits)
        masks = ((idx[:, None] >> np.arange(bits)) & 1).astype(float)
        parity = 1.0 - 2.0 * (masks.sum(axis=1) % 2)
        hit = _SUBSET_CACHE[bits] = (bits, masks, parity)
    return hit


def matrix_element(s: NetworkUnitary, out: Sequence[int], in_: Sequence[int]) -> complex:
    """Amplitude ``<out| U |in>`` for full occupation vectors on all modes."""
    out = occupation(out)
    in_ = occupation(in_)
    if len(out) != s.dim or len(in_) != s.dim:
        raise DimensionMismatchError(
            f"occupation vectors {out}, {in_} do not match a {s.dim}-mode network"
        )
    n = sum(in_)
    if sum(out) != n:
        return 0j
    if n > MAX_PERMANENT_DIM:
        raise CostGuardError(
            f"{n} photons exceed the permanent limit of {MAX_PERMANENT_DIM}",
            size=n, limit=MAX_PERMANENT_DIM,
        )
    rows = [k for k, c in enumerate(out) for _ in range(c)]
    cols = [j for j, c in enumerate(in_) for _ in range(c)]
    sub = np.asarray(s.entries)[np.ix_(rows, cols)]
    norm = 1.0
    for c in out + in_:
        norm *= factorial(c)
    return permanent(sub) / sqrt(norm)


def oracle_conditional_operator(s: NetworkUnitary, partition: ModePartition,
                                prepare: Sequence[int], count: Sequence[int],
                                n_max: int) -> FockOperator:
    """Conditional operator built element by element from permanents.

    ``E[k, j] = <k + count| U |j + prepare>`` with signal states ``j, k`` of
    total photon number ``<= n_max`` and ``+`` meaning concatenation with the
    ancilla occupations.
    """
    if s.dim != partition.modes:
        raise DimensionMismatchError(
            f"network has {s.dim} modes but the partition has {partition.modes}"
        )
    try:
        prepare = occupation(prepare, partition.n_ancilla)
        count = occupation(count, partition.n_ancilla)
    except DimensionMismatchError as exc:
        raise PatternError(str(exc)) from None
    basis = FockBasis(partition.n_signal, n_max)
    op = FockOperator(basis, sum(prepare) - sum(count))
    for t, blk in op.blocks.items():
        outs = basis.sectors[t + op.sector_shift]
        for col, j in enumerate(basis.sectors[t]):
            for row, k in enumerate(outs):
                blk[row, col] = matrix_element(s, k + count, j + prepare)
    return op


def sector_unitary(s: NetworkUnitary, total: int) -> tuple[list, np.ndarray]:
    """Full-network matrix of ``U`` on the ``total``-photon sector of all modes."""
    states = sector_states(total, s.dim)
    mat = np.array([[matrix_element(s, o, i) for i in states] for o in states], dtype=complex)
    return states, mat
