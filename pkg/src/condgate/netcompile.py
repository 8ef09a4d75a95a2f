"""Network unitaries: construction, validation, composition and the circuit DSL.

A linear optical network on ``d`` modes is described by the ``d x d`` unitary
``S`` acting on the vector of mode annihilation operators,
``U^dagger a U = S a``. Signal modes occupy indices ``0..N-1`` and ancilla
modes ``N..N+K-1``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .errors import (
    CircuitSchemaError,
    CircuitSyntaxError,
    DimensionMismatchError,
    ModeIndexError,
    NotHermitianError,
    NotUnitaryError,
    UnknownElementError,
    ValidationError,
)

HERMITIAN_TOL = 1e-12
UNITARY_TOL = 1e-10


def _frozen(matrix) -> np.ndarray:
    arr = np.array(matrix, dtype=complex, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ModePartition:
    """Split of ``n_signal + n_ancilla`` modes into signal and ancilla blocks."""

    n_signal: int
    n_ancilla: int = 0

    def __post_init__(self):
        if int(self.n_signal) < 1:
            raise ValidationError(f"n_signal must be >= 1, got {self.n_signal}")
        if int(self.n_ancilla) < 0:
            raise ValidationError(f"n_ancilla must be >= 0, got {self.n_ancilla}")

    @property
    def modes(self) -> int:
        return self.n_signal + self.n_ancilla

    @property
    def signal_indices(self) -> range:
        return range(self.n_signal)

    @property
    def ancilla_indices(self) -> range:
        return range(self.n_signal, self.modes)


def _square(matrix, what: str) -> np.ndarray:
    arr = np.asarray(matrix, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise ValidationError(f"{what} must be a non-empty square matrix, got shape {arr.shape}")
    return arr


@dataclass(frozen=True, eq=False)
class HermitianGenerator:
    """Single-particle Hamiltonian ``H`` of ``U(H) = exp(-i a^dagger H a)``."""

    entries: np.ndarray

    def __post_init__(self):
        arr = _square(self.entries, "Hamiltonian")
        dev = np.abs(arr - arr.conj().T)
        worst = float(dev.max())
        if worst > HERMITIAN_TOL:
            i, j = np.unravel_index(int(np.argmax(dev)), dev.shape)
            raise NotHermitianError(
                f"matrix is not Hermitian: entries [{i}][{j}]={arr[i, j]!r} and "
                f"[{j}][{i}]={arr[j, i]!r} differ from conjugates by {worst:.3e}"
            )
        object.__setattr__(self, "entries", _frozen(arr))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


def unitarity_residual(matrix) -> float:
    """Return ``max |(S^dagger S - I)_ij|``."""
    arr = np.asarray(matrix, dtype=complex)
    return float(np.abs(arr.conj().T @ arr - np.eye(arr.shape[0])).max())


@dataclass(frozen=True, eq=False)
class NetworkUnitary:
    """Unitary ``S`` acting on mode amplitudes. Rejected unless ``S^dagger S = I``."""

    entries: np.ndarray

    def __post_init__(self):
        arr = _square(self.entries, "network matrix")
        if not np.all(np.isfinite(arr)):
            raise NotUnitaryError("network matrix has non-finite entries")
        res = unitarity_residual(arr)
        if res > UNITARY_TOL:
            raise NotUnitaryError(
                f"matrix is not unitary: max |S^dagger S - I| = {res:.3e} > {UNITARY_TOL:g}"
            )
        object.__setattr__(self, "entries", _frozen(arr))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def dagger(self) -> "NetworkUnitary":
        return NetworkUnitary(self.entries.conj().T)

    def __getitem__(self, idx):
        return self.entries[idx]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)

    @classmethod
    def identity(cls, dim: int) -> "NetworkUnitary":
        return cls(np.eye(dim))


def unitary_from_hamiltonian(h: Union[HermitianGenerator, np.ndarray]) -> NetworkUnitary:
    """Return ``S = exp(-iH)`` computed from the eigendecomposition of ``H``."""
    if not isinstance(h, HermitianGenerator):
        h = HermitianGenerator(h)
    w, v = np.linalg.eigh(h.entries)
    return NetworkUnitary((v * np.exp(-1j * w)) @ v.conj().T)


def _check_mode(i, dim: int, what: str = "mode") -> int:
    if isinstance(i, bool) or not isinstance(i, (int, np.integer)):
        raise ModeIndexError(f"{what} index must be an integer, got {i!r}")
    if not 0 <= i < dim:
        raise ModeIndexError(f"{what} index {i} out of range for {dim} modes")
    return int(i)


def beam_splitter(theta: float, i: int, j: int, dim: int) -> NetworkUnitary:
    """Real rotation by ``theta`` on modes ``(i, j)``, identity elsewhere.

    ``S[i,i] = S[j,j] = cos(theta)``, ``S[i,j] = -sin(theta)``,
    ``S[j,i] = sin(theta)``.
    """
    i = _check_mode(i, dim)
    j = _check_mode(j, dim)
    if i == j:
        raise ModeIndexError(f"beam splitter needs two distinct modes, got ({i}, {j})")
    c, s = np.cos(theta), np.sin(theta)
    m = np.eye(dim, dtype=complex)
    m[i, i] = m[j, j] = c
    m[i, j] = -s
    m[j, i] = s
    return NetworkUnitary(m)


def phase_shifter(phi: float, i: int, dim: int) -> NetworkUnitary:
    """Diagonal unitary with ``exp(-i phi)`` on mode ``i``."""
    i = _check_mode(i, dim)
    m = np.eye(dim, dtype=complex)
    m[i, i] = np.exp(-1j * phi)
    return NetworkUnitary(m)


def compose(elements: Sequence[NetworkUnitary]) -> NetworkUnitary:
    """Multiply elements so that the first one acts first on mode amplitudes.

    ``compose([A, B, C])`` returns ``C @ B @ A``.
    """
    elements = list(elements)
    if not elements:
        raise ValidationError("cannot compose an empty sequence of elements")
    dim = elements[0].dim
    out = np.eye(dim, dtype=complex)
    for k, el in enumerate(elements):
        if el.dim != dim:
            raise DimensionMismatchError(
                f"element {k} has dimension {el.dim}, expected {dim}"
            )
        out = np.asarray(el.entries) @ out
    return NetworkUnitary(out)


# ---------------------------------------------------------------------------
# Circuit description


@dataclass(frozen=True)
class BeamSplitter:
    theta: float
    modes: tuple[int, int]


@dataclass(frozen=True)
class PhaseShifter:
    phi: float
    mode: int


@dataclass(frozen=True, eq=False)
class RawUnitary:
    matrix: np.ndarray


Element = Union[BeamSplitter, PhaseShifter, RawUnitary]


@dataclass(frozen=True)
class CircuitSpec:
    modes: int
    elements: tuple = field(default_factory=tuple)
    signal_modes: int | None = None

    def partition(self) -> ModePartition:
        n_sig = self.modes if self.signal_modes is None else self.signal_modes
        if not 1 <= n_sig <= self.modes:
            raise ValidationError(
                f"signal_modes must be in 1..{self.modes}, got {n_sig}"
            )
        return ModePartition(n_sig, self.modes - n_sig)


def compile_circuit(spec: CircuitSpec) -> NetworkUnitary:
    """Compile a circuit description into its network unitary."""
    if spec.modes < 1:
        raise ValidationError(f"modes must be >= 1, got {spec.modes}")
    mats = [NetworkUnitary.identity(spec.modes)]
    for k, el in enumerate(spec.elements):
        if isinstance(el, BeamSplitter):
            mats.append(beam_splitter(el.theta, el.modes[0], el.modes[1], spec.modes))
        elif isinstance(el, PhaseShifter):
            mats.append(phase_shifter(el.phi, el.mode, spec.modes))
        elif isinstance(el, RawUnitary):
            arr = np.asarray(el.matrix, dtype=complex)
            if arr.shape != (spec.modes, spec.modes):
                raise DimensionMismatchError(
                    f"element {k}: unitary has shape {arr.shape}, expected "
                    f"({spec.modes}, {spec.modes})"
                )
            mats.append(NetworkUnitary(arr))
        else:
            raise UnknownElementError(f"element {k}: unsupported element {el!r}")
    return compose(mats)


def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise CircuitSchemaError(f"{where}: expected a number, got {value!r}")
    return float(value)


def _integer(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise CircuitSchemaError(f"{where}: expected an integer, got {value!r}")
    return value


def _parse_complex(value, where: str) -> complex:
    if not isinstance(value, dict) or set(value) - {"re", "im"} or "re" not in value:
        raise CircuitSchemaError(f"{where}: expected {{\"re\": x, \"im\": y}}, got {value!r}")
    return complex(_number(value["re"], where + ".re"), _number(value.get("im", 0.0), where + ".im"))


def _parse_element(raw, k: int, modes: int) -> Element:
    where = f"elements[{k}]"
    if not isinstance(raw, dict):
        raise CircuitSchemaError(f"{where}: expected an object, got {raw!r}")
    kind = raw.get("type")
    if kind == "bs":
        theta = _number(raw.get("theta"), where + ".theta")
        pair = raw.get("modes")
        if not isinstance(pair, list) or len(pair) != 2:
            raise CircuitSchemaError(f"{where}.modes: expected [i, j], got {pair!r}")
        i, j = (_integer(p, f"{where}.modes") for p in pair)
        _check_mode(i, modes)
        _check_mode(j, modes)
        if i == j:
            raise ModeIndexError(f"{where}: beam splitter modes must differ, got [{i}, {j}]")
        return BeamSplitter(theta, (i, j))
    if kind == "ps":
        phi = _number(raw.get("phi"), where + ".phi")
        mode = _check_mode(_integer(raw.get("mode"), where + ".mode"), modes)
        return PhaseShifter(phi, mode)
    if kind == "unitary":
        rows = raw.get("matrix")
        if not isinstance(rows, list) or any(not isinstance(r, list) for r in rows):
            raise CircuitSchemaError(f"{where}.matrix: expected a list of rows")
        mat = np.array(
            [[_parse_complex(v, f"{where}.matrix[{r}][{c}]") for c, v in enumerate(row)]
             for r, row in enumerate(rows)],
            dtype=complex,
        )
        if mat.shape != (modes, modes):
            raise DimensionMismatchError(
                f"{where}.matrix has shape {mat.shape}, expected ({modes}, {modes})"
            )
        res = unitarity_residual(mat)
        if res > UNITARY_TOL:
            raise NotUnitaryError(f"{where}: matrix is not unitary (residual {res:.3e})")
        return RawUnitary(mat)
    raise UnknownElementError(f"{where}: unknown element type {kind!r}")


def parse_circuit(text: str) -> CircuitSpec:
    """Parse a circuit JSON document into a :class:`CircuitSpec`."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CircuitSyntaxError(exc.msg, exc.lineno, exc.colno) from None
    if not isinstance(doc, dict):
        raise CircuitSchemaError("circuit document must be a JSON object")
    modes = _integer(doc.get("modes"), "modes")
    if modes < 1:
        raise CircuitSchemaError(f"modes must be >= 1, got {modes}")
    signal = _integer(doc.get("signal_modes", modes), "signal_modes")
    if not 1 <= signal <= modes:
        raise CircuitSchemaError(f"signal_modes must be in 1..{modes}, got {signal}")
    raw_elements = doc.get("elements", [])
    if not isinstance(raw_elements, list):
        raise CircuitSchemaError("elements must be a list")
    elements = tuple(_parse_element(raw, k, modes) for k, raw in enumerate(raw_elements))
    return CircuitSpec(modes=modes, elements=elements, signal_modes=signal)


def parse_and_compile(text: str) -> tuple[ModePartition, NetworkUnitary]:
    spec = parse_circuit(text)
    return spec.partition(), compile_circuit(spec)
