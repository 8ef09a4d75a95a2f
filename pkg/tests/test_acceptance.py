"""The nine acceptance criteria, each at its stated tolerance.

Every test appends one ``PASS``/``FAIL`` line to the summary printed at the
end of the pytest run.
"""

import time
from itertools import permutations

import numpy as np
import pytest

import conftest
from condgate.fockoracle import permanent
from condgate.fockspace import FockStateVector, annihilation, creation, iter_patterns
from condgate.gates import (
    apply_gate,
    completeness_residual,
    conditional_operator,
    disentangled_form,
    disentangled_residual,
    fifty_fifty_network,
    histories_terms,
    reassemble_histories,
    two_mode_catalog,
)
from condgate.netcompile import ModePartition, NetworkUnitary
from condgate.qsymbol import expand_network_symbol, extract_conditional_symbol, structural_violations

from helpers import patterns, random_network, random_unitary

pytestmark = pytest.mark.acceptance

R2 = np.sqrt(2.0)
N_MAX = 4
N_NETWORKS = 50


def record(k, ok, detail):
    conftest.ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'} criterion {k}: {detail}")
    assert ok, detail


@pytest.fixture(scope="module")
def family():
    rng = np.random.default_rng(2024)
    return [random_network(rng, max_modes=4, max_elements=6) for _ in range(N_NETWORKS)]


@pytest.fixture(scope="module")
def operators(family):
    """Both methods for every network and pattern, with the elapsed wall time."""
    start = time.perf_counter()
    ops = []
    for part, s in family:
        for n, m in patterns(part.n_ancilla, 2, 2):
            q = conditional_operator(s, part, (n, m), N_MAX, "qsymbol")
            o = conditional_operator(s, part, (n, m), N_MAX, "oracle")
            ops.append((n, m, q, o))
    return ops, time.perf_counter() - start


def test_criterion_1_headline_probability():
    start = time.perf_counter()
    s, part = fifty_fifty_network(), ModePartition(2, 1)
    probs = {}
    for method in ("qsymbol", "oracle"):
        op = conditional_operator(s, part, ((1,), (1,)), 2, method)
        probs[method] = apply_gate(op, FockStateVector.number_state(op.basis, (1, 1))).probability
    elapsed = time.perf_counter() - start
    err = max(abs(p - 5 / 16) for p in probs.values())
    record(1, err <= 1e-12 and elapsed < 1.0,
           f"P(1|1) = 5/16 by both methods, max error {err:.1e}, {elapsed:.3f} s")


def test_criterion_2_headline_state():
    s, part = fifty_fifty_network(), ModePartition(2, 1)
    worst = 0.0
    for method in ("qsymbol", "oracle"):
        op = conditional_operator(s, part, ((1,), (1,)), 2, method)
        out = op.apply(FockStateVector.number_state(op.basis, (1, 1)))
        sign = np.sign(out[(2, 0)].real) * -1  # one global sign for all three
        expected = {(2, 0): -3 / 8, (0, 2): -3 / 8, (1, 1): -1 / (4 * R2)}
        worst = max(worst, max(abs(sign * out[k] - v) for k, v in expected.items()))
    record(2, worst <= 1e-12, f"E(1|1)|1,1> amplitudes -3/8, -3/8, -1/(4 sqrt 2), max error {worst:.1e}")


def test_criterion_3_two_mode_catalog():
    thetas = np.linspace(0.05, 2 * np.pi, 12, endpoint=False)
    diag_err = ident_err = 0.0
    for theta in thetas:
        c, s = np.cos(theta), np.sin(theta)
        e00 = two_mode_catalog(theta, 8)[0, 0]
        diag_err = max(diag_err, np.abs(e00.to_dense() - np.diag(c ** np.arange(9))).max())
        cat = two_mode_catalog(theta, 6)
        a, ad = annihilation(cat[0, 0].basis, 0), creation(cat[0, 0].basis, 0)
        e00 = cat[0, 0]
        ident_err = max(
            ident_err,
            cat[1, 0].max_abs_diff(-s * (ad @ e00)),
            cat[0, 1].max_abs_diff(s * (e00 @ a)),
            cat[1, 1].max_abs_diff(c * e00 - s * s * (ad @ e00 @ a)),
        )
    record(3, diag_err <= 1e-12 and ident_err <= 1e-10,
           f"E(0|0) = cos^k on 12 angles ({diag_err:.1e}), catalog identities ({ident_err:.1e})")


def test_criterion_4_oracle_equivalence(operators):
    ops, elapsed = operators
    worst = max(q.max_abs_diff(o) for _, _, q, o in ops)
    record(4, worst <= 1e-9 and elapsed < 60.0,
           f"{N_NETWORKS} networks, {len(ops)} operators, max |qsymbol - oracle| {worst:.1e}, "
           f"{elapsed:.1f} s")


def test_criterion_5_completeness(family):
    worst = 0.0
    for part, s in family:
        for n in iter_patterns(part.n_ancilla, 2):
            worst = max(worst, completeness_residual(s, part, n, N_MAX))
    record(5, worst <= 1e-9, f"sum_m E^dag E = I on untruncated sectors, residual {worst:.1e}")


def test_criterion_6_permanent():
    rng = np.random.default_rng(6)
    worst = 0.0
    for k in range(100):
        d = 1 + k % 6
        m = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        naive = sum(np.prod([m[i, p[i]] for i in range(d)]) for p in permutations(range(d)))
        worst = max(worst, abs(permanent(m) - naive))
    big = rng.normal(size=(12, 12)) + 1j * rng.normal(size=(12, 12))
    permanent(big)  # warm the subset cache
    start = time.perf_counter()
    permanent(big)
    elapsed = time.perf_counter() - start
    record(6, worst <= 1e-10 and elapsed < 0.1,
           f"Ryser vs naive on 100 matrices ({worst:.1e}), dim-12 permanent {elapsed * 1e3:.1f} ms")


def test_criterion_7_disentangled_form():
    s = fifty_fifty_network()
    p = disentangled_form(s)
    err = max(abs(p.lambda1 - (3 - 2 * R2)), abs(p.lambda2 - (3 - 2 * R2)),
              abs(p.exp_mu2 - (R2 + 1) / (2 * R2)))
    res = disentangled_residual(s, p, max_total_degree=6)
    record(7, err <= 1e-12 and res <= 1e-10,
           f"lambda1, lambda2, e^mu2 for the 50/50 network ({err:.1e}), factored symbol ({res:.1e})")


def test_criterion_8_histories():
    rng = np.random.default_rng(8)
    worst, counts_ok = 0.0, True
    for _ in range(20):
        s = NetworkUnitary(random_unitary(rng, 3))
        part = ModePartition(2, 1)
        terms = histories_terms(s, part)
        counts_ok &= len(terms) == 1 + part.n_signal ** 2
        a_op = conditional_operator(s, part, ((0,), (0,)), N_MAX)
        e11 = conditional_operator(s, part, ((1,), (1,)), N_MAX)
        worst = max(worst, reassemble_histories(terms, a_op).max_abs_diff(e11))
    record(8, counts_ok and worst <= 1e-10,
           f"20 networks, 1 + N^2 terms each, reassembly error {worst:.1e}")


def test_criterion_9_structure(family, operators):
    unbalanced = wrong_shift = sector = 0
    for part, s in family:
        u = expand_network_symbol(s, part, 2 * (N_MAX + 2))
        pairs = [(extract_conditional_symbol(u, n, m), sum(n) - sum(m))
                 for n, m in patterns(part.n_ancilla, 2, 2)]
        check = structural_violations(u, pairs)
        unbalanced += check.unbalanced
        wrong_shift += check.wrong_shift
    for _, _, q, o in operators[0]:
        sector += q.sector_violations() + o.sector_violations()
    record(9, unbalanced == wrong_shift == sector == 0,
           f"unbalanced monomials {unbalanced}, wrong-shift monomials {wrong_shift}, "
           f"off-sector entries {sector}")
