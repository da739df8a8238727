"""Release gate: ten end-to-end checks, one printed verdict line each.

Run with ``pytest -rA tests/test_acceptance.py`` to see every verdict; each
check prints ``acceptance NN <name>: PASS`` (or FAIL) before asserting.
"""

import itertools
import math
import time

import numpy as np

from cosetcq.channels import (
    EX2_SIGMA0,
    EX2_SIGMA1,
    InputDistribution,
    SplitInputDistribution,
    cq_mutual_information,
    example2_channel,
    example2_mix,
    sigma1,
)
from cosetcq.classical_sim import ClassicalIcInstance, simulate, simulate_independent
from cosetcq.field_codes import (
    NestedCosetCode,
    PrimeField,
    coset_sum,
    select_typical,
)
from cosetcq.linalg import random_density, von_neumann_entropy
from cosetcq.povm import build_ptp_povm, ptp_block_error, verify_pinching
from cosetcq.regions import (
    NccRateParams,
    conv,
    example_separation_witness,
    hb,
    theorem1_region,
    theorem2_bounds,
    theorem3_region,
    usb_region,
)

ORTHOGONAL_QUBITS = [np.diag([1.0, 0.0]), np.diag([0.0, 1.0])]


def _report(num, name, ok):
    print(f"acceptance {num:02d} {name}: {'PASS' if ok else 'FAIL'}")
    assert ok, f"criterion {num} ({name}) failed"


def test_01_entropy_identities():
    ok = abs(von_neumann_entropy(EX2_SIGMA0) - hb(1 / 3)) <= 1e-9
    ok = ok and abs(von_neumann_entropy(EX2_SIGMA1) - hb(1 / 3)) <= 1e-9
    # equal mixture of the pair: eigenvalues known in closed form
    lam = [0.5 + math.sqrt(2) / 12, 0.5 - math.sqrt(2) / 12]
    oracle = -sum(v * math.log2(v) for v in lam)
    ok = ok and abs(von_neumann_entropy(example2_mix(0.5)) - oracle) <= 1e-9
    _report(1, "entropy-identities", ok)


def test_02_mixing_channel_separation():
    start = time.perf_counter()
    ok = True
    s = lambda p: von_neumann_entropy(example2_mix(p))
    for delta1, delta in ((0.01, 0.1), (0.05, 0.2)):
        rep = example_separation_witness(2, delta1, delta)
        # with the canonical bias the effective receiver-1 flip equals delta
        ok = ok and abs(conv(rep.tau, delta1) - delta) <= 1e-12
        # sum-rate gap in raw and reduced form
        ok = ok and s(conv(rep.tau, delta1)) + s(0.5) > 2.0 * s(delta)
        ok = ok and s(0.5) > s(delta)
        ok = ok and rep.separation
        ok = ok and rep.ncc_point_in_theorem1  # every constraint within 1e-9
    ok = ok and (time.perf_counter() - start) < 1.0
    _report(2, "mixing-channel-separation", ok)


def test_03_parity_channel_separation():
    start = time.perf_counter()
    delta1, delta, tau = 0.01, 0.1, 0.0918
    lhs = hb(conv(tau, delta1)) - hb(delta1) + 2.0 * (1.0 - hb(delta))
    rhs = 1.0 - hb(delta1)
    ok = lhs > rhs and (lhs - rhs) > 0.4
    # the effective bias sender 1 presents to receiver 1 stays below the
    # side receivers' bias, so the interference remains decodable
    ok = ok and conv(tau, delta1) < delta
    # cross-check the hand formula against the witness machinery
    rep = example_separation_witness(1, delta1, delta, tau=tau)
    ok = ok and abs(rep.margin - (lhs - rhs)) <= 1e-12
    ok = ok and rep.separation
    ok = ok and (time.perf_counter() - start) < 1.0
    _report(3, "parity-channel-separation", ok)


def test_04_unstructured_baseline_recovery():
    chan = example2_channel(0.05, 0.2)
    rng = np.random.default_rng(2025)
    worst = 0.0
    for _ in range(20):
        p = np.zeros((2, 2, 2))
        p[0] = rng.dirichlet(np.ones(4)).reshape(2, 2)
        q = np.zeros((2, 2, 2))
        q[0] = rng.dirichlet(np.ones(4)).reshape(2, 2)
        dist = SplitInputDistribution(2, rng.dirichlet(np.ones(2)), p, q)
        t3 = theorem3_region(chan, dist)
        base = usb_region(
            chan,
            dist.p_x1,
            dist.p_u2v2x2.sum(axis=(0, 1)),
            dist.p_u3v3x3.sum(axis=(0, 1)),
        )
        for c in base.constraints:
            worst = max(worst, abs(t3.constraint(c.name).rhs - c.rhs))
    _report(4, "unstructured-baseline-recovery", worst <= 1e-9)


def test_05_povm_validity():
    start = time.perf_counter()
    rng = np.random.default_rng(2025)
    field = PrimeField(2)
    min_eig = np.inf
    worst_sum = 0.0
    for _ in range(50):
        n = int(rng.integers(1, 5))
        k = int(rng.integers(1, 3))
        l = int(rng.integers(1, 3))
        code = NestedCosetCode(
            field, n, k, l,
            rng.integers(0, 2, size=(k, n)),
            rng.integers(0, 2, size=(l, n)),
            rng.integers(0, 2, size=n),
        )
        states = [random_density(2, rng).matrix for _ in range(2)]
        enc = select_typical(code, np.array([0.5, 0.5]), 0.5, rng)
        povm = build_ptp_povm(code, enc, states, 0.3)
        total = np.zeros((povm.dim, povm.dim), dtype=complex)
        for el in povm.elements:
            min_eig = min(min_eig, float(np.linalg.eigvalsh(el).min()))
            total += el
        worst_sum = max(worst_sum, float(np.abs(total - np.eye(povm.dim)).max()))
    ok = min_eig >= -1e-9 and worst_sum <= 1e-8
    ok = ok and (time.perf_counter() - start) < 120.0
    _report(5, "povm-validity", ok)


def test_06_pinching_convergence():
    start = time.perf_counter()
    rows = verify_pinching(
        np.diag([0.5, 0.5]),
        [example2_mix(0.7), example2_mix(0.3)],
        [2, 4, 6, 8],
        0.2,
    )
    defs = [r.deficiency for r in rows]
    ok = all(a > b for a, b in zip(defs, defs[1:]))
    ok = ok and all(0.0 <= d <= 1.0 for d in defs)
    ok = ok and (time.perf_counter() - start) < 300.0
    _report(6, "pinching-convergence", ok)


_SWEEP_CODES = {
    2: ([[1, 1]], [[0, 1]], [0, 0]),
    4: ([[1, 1, 0, 0]], [[1, 0, 1, 0], [1, 0, 0, 1]], [1, 0, 0, 0]),
    6: (
        [[1, 1, 1, 0, 1, 0], [0, 1, 0, 1, 1, 0]],
        [[1, 0, 1, 1, 1, 1], [1, 1, 1, 0, 1, 1], [1, 1, 0, 0, 1, 1]],
        [0, 1, 0, 0, 1, 1],
    ),
}
_ABOVE_CHI_CODE = (
    [[1, 0, 0, 0, 0, 1], [1, 1, 0, 0, 0, 0]],
    [
        [1, 0, 0, 0, 1, 1],
        [0, 0, 0, 0, 1, 1],
        [0, 0, 1, 1, 0, 1],
        [1, 1, 1, 0, 0, 1],
        [1, 1, 1, 0, 1, 0],
    ],
    [0, 1, 1, 0, 0, 0],
)


def _exact_error(n, k, l, generators, delta=0.6):
    field = PrimeField(2)
    pmf = np.array([0.75, 0.25])
    gi, go, dither = generators
    code = NestedCosetCode(field, n, k, l, gi, go, dither)
    enc = select_typical(code, pmf, delta, np.random.default_rng(1))
    povm = build_ptp_povm(code, enc, ORTHOGONAL_QUBITS, delta)
    return ptp_block_error(povm, enc, ORTHOGONAL_QUBITS)


def test_07_decoder_error_trend():
    pmf = np.array([0.75, 0.25])
    # density/rate window membership for the swept layouts
    b4 = theorem2_bounds(NccRateParams(2, 4, 1, 2, pmf), ORTHOGONAL_QUBITS)
    b6 = theorem2_bounds(NccRateParams(2, 6, 2, 3, pmf), ORTHOGONAL_QUBITS)
    ok = b4.inner_density_ok and b4.total_rate_ok
    ok = ok and b6.inner_density_ok and b6.total_rate_ok
    high = theorem2_bounds(NccRateParams(2, 6, 2, 5, pmf), ORTHOGONAL_QUBITS)
    ok = ok and high.message_rate > high.holevo

    errs = {
        2: _exact_error(2, 1, 1, _SWEEP_CODES[2]),
        4: _exact_error(4, 1, 2, _SWEEP_CODES[4]),
        6: _exact_error(6, 2, 3, _SWEEP_CODES[6]),
    }
    ok = ok and errs[2] > errs[4] > errs[6]
    above = _exact_error(6, 2, 5, _ABOVE_CHI_CODE)
    ok = ok and above > errs[6]
    _report(7, "decoder-error-trend", ok)


def test_08_coset_closure():
    rng = np.random.default_rng(7)
    ok = True
    for q, n, k, l in itertools.product((2, 3), (1, 2, 3, 4), (1, 2), (1, 2)):
        field = PrimeField(q)
        for _ in range(2):
            gi = rng.integers(0, q, size=(k, n))
            go = rng.integers(0, q, size=(l, n))
            a = NestedCosetCode(field, n, k, l, gi, go, rng.integers(0, q, size=n))
            b = NestedCosetCode(field, n, k, l, gi, go, rng.integers(0, q, size=n))
            sums = {
                tuple((wa + wb) % q)
                for wa in a.range_words()
                for wb in b.range_words()
            }
            want = {tuple(w) for w in coset_sum(a, b).range_words()}
            ok = ok and sums == want
    _report(8, "coset-closure", ok)


def test_09_simulator_ordering():
    rng = np.random.default_rng(3)
    gi = rng.integers(0, 2, size=(2, 16))
    go = rng.integers(0, 2, size=(4, 16))
    b2 = rng.integers(0, 2, size=16)
    b3 = rng.integers(0, 2, size=16)
    field = PrimeField(2)
    book1 = []
    for i in range(8):
        w = np.zeros(16, dtype=np.int64)
        w[2 * i : 2 * i + 2] = 1
        book1.append(w)
    inst = ClassicalIcInstance(
        0.05, 0.1, 0.15, 16,
        NestedCosetCode(field, 16, 2, 4, gi, go, b2),
        NestedCosetCode(field, 16, 2, 4, gi, go, b3),
        tuple(book1),
    )
    structured = simulate(inst, 10_000, np.random.default_rng(11), decoder="ml")
    independent = simulate_independent(
        inst, 10_000, np.random.default_rng(11), decoder="ml"
    )
    s_lo, s_hi = structured.interval(1)
    i_lo, i_hi = independent.interval(1)
    ok = structured.rate(1) < independent.rate(1) and s_hi < i_lo
    _report(9, "simulator-ordering", ok)


def test_10_degenerate_reductions():
    chan = example2_channel(0.05, 0.2)
    dist = InputDistribution(
        2,
        p_x1=[0.6, 0.4],
        p_v2x2=np.array([[0.3, 0.7], [0.0, 0.0]]),
        p_v3x3=np.array([[1.0, 0.0], [0.0, 0.0]]),
    )
    region = theorem1_region(chan, dist)
    direct = cq_mutual_information(sigma1(chan, dist), ("x1",))
    r1 = region.constraint("r1").rhs
    ok = abs(r1 - direct) <= 1e-9
    # constant auxiliaries give no interference to strip, so the sum lines
    # collapse onto the private line
    ok = ok and abs(region.constraint("r1_plus_r2").rhs - r1) <= 1e-9
    ok = ok and abs(region.constraint("r1_plus_r3").rhs - r1) <= 1e-9
    ok = ok and abs(r1 - 0.0050881758257723675) <= 1e-9
    _report(10, "degenerate-reductions", ok)
