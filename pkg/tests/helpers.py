"""Shared generators for the test-suite."""

import numpy as np

from condgate.fockspace import iter_patterns
from condgate.netcompile import (
    BeamSplitter,
    CircuitSpec,
    ModePartition,
    PhaseShifter,
    compile_circuit,
)


def random_network(rng, max_modes=4, max_elements=6, min_ancilla=1, modes=None):
    """Random network of beam splitters and phase shifters with a random partition."""
    modes = int(rng.integers(2, max_modes + 1)) if modes is None else modes
    n_signal = int(rng.integers(1, modes - min_ancilla + 1))
    elements = []
    for _ in range(int(rng.integers(1, max_elements + 1))):
        if rng.random() < 0.6:
            i, j = rng.choice(modes, size=2, replace=False)
            elements.append(BeamSplitter(float(rng.uniform(-np.pi, np.pi)), (int(i), int(j))))
        else:
            elements.append(PhaseShifter(float(rng.uniform(-np.pi, np.pi)), int(rng.integers(modes))))
    spec = CircuitSpec(modes=modes, elements=tuple(elements), signal_modes=n_signal)
    return spec.partition(), compile_circuit(spec)


def random_unitary(rng, dim):
    """Haar-random unitary via QR of a complex Gaussian matrix."""
    z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def patterns(k, max_prepare=2, max_count=2):
    for n in iter_patterns(k, max_prepare):
        for m in iter_patterns(k, max_count):
            yield n, m
