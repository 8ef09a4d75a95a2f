"""JSON documents for unitaries, operators and states.

Output is deterministic: keys are emitted in a fixed order and floats use
Python's shortest round-trip representation (at most 17 significant
digits), so identical inputs give byte-identical files.
"""

from __future__ import annotations

import json
from typing import Any

import numpy as np

from .errors import ValidationError
from .fockspace import FockBasis, FockOperator, FockStateVector, occupation
from .netcompile import ModePartition, NetworkUnitary


def _float(x: float) -> float:
    x = float(x)
    if not np.isfinite(x):
        raise ValidationError(f"cannot serialise non-finite value {x!r}")
    return 0.0 if x == 0 else x


def complex_pair(z: complex) -> dict:
    z = complex(z)
    return {"re": _float(z.real), "im": _float(z.imag)}


def dumps(doc: Any) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def loads(text: str, what: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(
            f"{what}: {exc.msg} (line {exc.lineno}, column {exc.colno})"
        ) from None


def unitary_document(partition: ModePartition, s: NetworkUnitary) -> dict:
    """Circuit document holding the compiled network as a single raw unitary."""
    return {
        "modes": partition.modes,
        "signal_modes": partition.n_signal,
        "elements": [{
            "type": "unitary",
            "matrix": [[complex_pair(v) for v in row] for row in np.asarray(s.entries)],
        }],
    }


def operator_document(op: FockOperator) -> dict:
    return {
        "basis": [list(s) for s in op.basis.states],
        "entries": [{"row": r, "col": c, "re": _float(v.real), "im": _float(v.imag)}
                    for r, c, v in op.entries()],
        "sector_shift": op.sector_shift,
    }


def _basis_from_listing(listing) -> FockBasis:
    if not isinstance(listing, list) or not listing:
        raise ValidationError("operator document needs a non-empty 'basis' list")
    states = [occupation(s) for s in listing]
    modes = len(states[0])
    basis = FockBasis(modes, max(sum(s) for s in states))
    if states != basis.states:
        raise ValidationError(
            "operator basis listing does not match the canonical ordering "
            f"for {modes} modes up to {basis.max_total} photons"
        )
    return basis


def operator_from_document(doc) -> FockOperator:
    if not isinstance(doc, dict):
        raise ValidationError("operator document must be a JSON object")
    basis = _basis_from_listing(doc.get("basis"))
    shift = doc.get("sector_shift", 0)
    if isinstance(shift, bool) or not isinstance(shift, int):
        raise ValidationError(f"sector_shift must be an integer, got {shift!r}")
    dense = np.zeros((len(basis), len(basis)), dtype=complex)
    for k, entry in enumerate(doc.get("entries", [])):
        try:
            r, c = int(entry["row"]), int(entry["col"])
            dense[r, c] = complex(float(entry.get("re", 0.0)), float(entry.get("im", 0.0)))
        except (KeyError, TypeError, ValueError, IndexError):
            raise ValidationError(f"operator entry {k} is malformed: {entry!r}") from None
    return FockOperator.from_dense(basis, dense, shift)


def state_document(psi: FockStateVector | None) -> dict | None:
    if psi is None:
        return None
    return {"amplitudes": [{"occ": list(occ), "re": _float(a.real), "im": _float(a.imag)}
                           for occ, a in psi.nonzero()]}


def state_from_document(doc, basis: FockBasis | None = None, modes: int | None = None) -> FockStateVector:
    """Parse a state document; without ``basis`` the smallest one holding the state is used."""
    if not isinstance(doc, dict) or not isinstance(doc.get("amplitudes"), list):
        raise ValidationError("state document must be an object with an 'amplitudes' list")
    amps: dict[tuple, complex] = {}
    for k, entry in enumerate(doc["amplitudes"]):
        if not isinstance(entry, dict) or "occ" not in entry:
            raise ValidationError(f"state amplitude {k} is malformed: {entry!r}")
        occ = occupation(entry["occ"], modes if basis is None else basis.modes)
        try:
            amps[occ] = amps.get(occ, 0j) + complex(float(entry.get("re", 0.0)),
                                                     float(entry.get("im", 0.0)))
        except (TypeError, ValueError):
            raise ValidationError(f"state amplitude {k} has non-numeric parts") from None
    if not amps:
        raise ValidationError("state document has no amplitudes")
    if basis is None:
        basis = FockBasis(len(next(iter(amps))), max(sum(o) for o in amps))
    top = max(sum(o) for o in amps)
    if top > basis.max_total:
        raise ValidationError(
            f"state reaches {top} photons but the basis stops at {basis.max_total}"
        )
    return FockStateVector.from_occupations(basis, amps)
