"""Acceptance suite: one test per criterion, each printing a single PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines inline; they
are also repeated in the terminal summary.
"""

import math

import numpy as np

from cmbox import chaninfo
from cmbox.adversary import calibrate, expected_E, simulate_detection
from cmbox.codec import DEFAULT_THREE_DRAWER, THREE_DRAWER_P, TWO_DRAWER_P, all_three_drawer_states, encode2
from cmbox.experiments import distribute, mc_drawer
from cmbox.protocol import ProtocolParams, alice_prepare, bob_measure, choose_R, majority_error
from cmbox.qubit import Basis, RngStream, born_probability
from cmbox.session import run_protocol

from oracles import eq6_state, majority_error_enumerated, prob


def test_criterion_1_closed_form_constants(report):
    born = born_probability(encode2((0, 0)), Basis.B1)
    i2 = chaninfo.binary_channel_information(TWO_DRAWER_P)
    i3 = chaninfo.binary_channel_information(THREE_DRAWER_P)
    root = chaninfo.solve_symmetric_point_3()
    errs = [
        abs(born - 0.85355339059),
        abs(i2 - 0.39912396329),
        abs(i3 - 0.2559924488),
    ]
    sym_err = abs(root - (0.5 + math.sqrt(12) / 12))
    ok = max(errs) <= 1e-9 and sym_err <= 1e-10
    report(1, "closed-form constants", ok, f"max err {max(errs):.2e} <= 1e-9, symmetric point err {sym_err:.2e} <= 1e-10")
    assert ok


def test_criterion_2_read_table(report):
    a, b = DEFAULT_THREE_DRAWER.a, DEFAULT_THREE_DRAWER.b
    p = a * a
    # q from the written-out Born sum, independent of the library formula
    q_direct = 0.5 + a * b / math.sqrt(2)
    q_err = abs(chaninfo.q_of_p(p) - q_direct)
    worst = 0.0
    for bits in all_three_drawer_states(DEFAULT_THREE_DRAWER):
        psi = eq6_state(*bits, a, b)
        for basis, target in (("B1", p), ("B2", q_direct), ("B3", q_direct)):
            k = {"B1": 0, "B2": 1, "B3": 2}[basis]
            worst = max(worst, abs(prob(psi, basis, bits[k]) - target))
    ok = worst <= 1e-12 and q_err <= 1e-12
    report(2, "three-drawer probability table, 24 entries", ok, f"max err {worst:.2e}, q err {q_err:.2e}, tol 1e-12")
    assert ok


def test_criterion_3_monte_carlo_reads(report):
    worst = 0.0
    for drawers, target in ((2, 0.853553), (3, 0.788675)):
        for r in mc_drawer(100_000, drawers, seed=2024):
            if r.metric.startswith("correct_read"):
                worst = max(worst, abs(r.value - target))
    ok = worst <= 0.005
    report(3, "Monte Carlo read frequencies", ok, f"max deviation {worst:.4f} <= 0.005")
    assert ok


def test_criterion_4_drawer_destruction(report):
    worst = 0.0
    for drawers in (2, 3):
        for r in mc_drawer(100_000, drawers, seed=77):
            if r.metric.startswith("correlation"):
                worst = max(worst, abs(r.value))
    ok = worst <= 0.01
    report(4, "drawer destruction", ok, f"max |correlation| {worst:.4f} <= 0.01")
    assert ok


def test_criterion_5_information_accounting(report):
    i2 = chaninfo.binary_channel_information(TWO_DRAWER_P)
    i3 = chaninfo.binary_channel_information(THREE_DRAWER_P)
    err2, err3 = abs(2 * i2 - 0.8), abs(3 * i3 - 0.76)
    holevo = all(chaninfo.information_report(p, d).within_holevo
                 for p in np.linspace(0.5, 1.0, 501) for d in (2, 3))
    ok = err2 <= 5e-3 and err3 <= 5e-3 and holevo
    report(5, "information accounting", ok,
           f"|2I-0.8|={err2:.5f}, |3I-0.76|={err3:.5f}, tol 5e-3, holevo grid {'ok' if holevo else 'violated'}")
    assert ok


def test_criterion_6_qkd_end_to_end(report):
    K, eps = 64, 1e-3
    R = choose_R(eps, K)
    runs, mismatches, aborted, alice_msgs = 1000, 0, 0, 0
    for s in range(runs):
        tr = run_protocol(ProtocolParams(T=2048, R=R, K=K, epsilon=eps, alice_seed=10_000 + s, bob_seed=10_000 + s))
        alice_msgs += len(tr.messages_from_alice())
        if tr.aborted:
            aborted += 1
        elif not tr.keys_agree:
            mismatches += 1
    rate = mismatches / runs
    ok = rate <= 0.005 and alice_msgs == 0
    report(6, "QKD end to end", ok,
           f"R={R}, mismatch {rate:.4f} <= 0.005, aborts {aborted}, Alice classical messages {alice_msgs}")
    assert ok


def test_criterion_7_eavesdropping_detection(report):
    separated = all(expected_E(R, False) > expected_E(R, True) for R in range(3, 22, 2))
    limit = abs(expected_E(21, False) - 0.853553)
    cal = calibrate(5, 0.05)
    runs = 200
    fp = sum(simulate_detection(cal.T0, 5, s, "acceptance/clean", False).eavesdropped for s in range(runs))
    fn = sum(not simulate_detection(cal.T0, 5, s, "acceptance/attacked", True).eavesdropped for s in range(runs))
    ok = separated and fp / runs <= 0.05 and fn / runs <= 0.05 and limit < 0.01
    report(7, "eavesdropping detection", ok,
           f"(a) separation {'ok' if separated else 'broken'}; (b) T0={cal.T0}, fp {fp / runs:.3f}, "
           f"fn {fn / runs:.3f} <= 0.05; (c) |E_clean(21)-p|={limit:.4f} < 0.01")
    assert ok


def test_criterion_8_majority_decode(report):
    n, parts, ok = 100_000, [], True
    for R in (3, 5, 9):
        exact = majority_error_enumerated(R, TWO_DRAWER_P)
        assert abs(exact - majority_error(R)) < 1e-15
        params = ProtocolParams(T=n, R=R, K=1, alice_seed=800 + R, bob_seed=800 + R)
        record, shipment = alice_prepare(params, RngStream(800 + R, "alice"))
        meas = bob_measure(shipment, params, RngStream(800 + R, "bob"))
        rate = float(np.mean(meas.B != record.pairs[np.arange(n), meas.control]))
        z = abs(rate - exact) / math.sqrt(exact * (1 - exact) / n)
        ok &= z <= 3
        parts.append(f"R={R} rate {rate:.5f} vs {exact:.5f} ({z:.2f} sigma)")
    report(8, "majority decode vs binomial tail", ok, "; ".join(parts))
    assert ok


def test_criterion_9_content_distribution(report):
    rng = np.random.default_rng(9)
    payloads = [rng.integers(0, 256, 4096, dtype=np.uint8).tobytes() for _ in range(2)]
    result = distribute(payloads, choose=1, R=9, seed=9)
    values = {r.metric: r.value for r in result.records}
    ber, unopened = values["chosen_bit_error_rate"], values["unopened_drawer2_bit_error_rate"]
    ok = ber <= 0.003 and abs(unopened - 0.5) <= 0.02
    report(9, "content distribution", ok,
           f"chosen BER {ber:.5f} <= 0.003 (exact e(9)={majority_error(9):.5f}), unopened {unopened:.4f} in 0.5 +- 0.02")
    assert ok
