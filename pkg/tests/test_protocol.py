import math

import numpy as np
import pytest

from cmbox.codec import TWO_DRAWER_P, encode2
from cmbox.errors import ConfigurationError, ParameterError, ProtocolError
from cmbox.protocol import (
    AliceRecord,
    BobMeasurement,
    ProtocolParams,
    PublicMessage,
    QuantumShipment,
    alice_prepare,
    alice_reconstruct,
    bob_measure,
    bob_select_key,
    choose_R,
    majority,
    majority_error,
    xor_with_key,
)
from cmbox.qubit import RngStream, same_ray
from cmbox.session import run_protocol

from oracles import majority_error_enumerated

# frozen from majority_error_enumerated (2**R pattern sums)
E3 = 0.05805826175840782
E5 = 0.02491263139028839
E9 = 0.0050597798677168735


def params(**kw):
    base = dict(T=16, R=9, K=8, alice_seed=1, bob_seed=2)
    base.update(kw)
    return ProtocolParams(**base)


def test_params_validation():
    with pytest.raises(ParameterError):
        params(K=17)
    with pytest.raises(ConfigurationError):
        params(R=4)
    with pytest.raises(ConfigurationError):
        params(R=1)
    with pytest.raises(ParameterError):
        params(epsilon=0.0)


def test_alice_prepare_single_block():
    p = params(T=1, R=3, K=1)
    # find a seed whose only pair is (0, 1)
    for seed in range(100):
        record, shipment = alice_prepare(p, RngStream(seed, "alice"))
        if tuple(record.pairs[0]) == (0, 1):
            break
    for j in range(3):
        assert shipment.qubit(0, j).amp0 == pytest.approx(0.9238795, abs=1e-7)
        assert shipment.qubit(0, j).amp1 == pytest.approx(-0.3826834, abs=1e-7)


def test_alice_prepare_shape_and_determinism():
    p = params(T=4, R=5, K=2)
    record, shipment = alice_prepare(p, RngStream(3, "alice"))
    assert shipment.amps.shape[:2] == (4, 5) and shipment.amps[..., 0].size == 20
    record2, shipment2 = alice_prepare(p, RngStream(3, "alice"))
    assert np.array_equal(record.pairs, record2.pairs)
    assert np.array_equal(shipment.amps, shipment2.amps)
    for i, pair in enumerate(record.pairs):
        for j in range(5):
            assert same_ray(shipment.qubit(i, j), encode2(tuple(pair)))


def test_majority_error_matches_enumeration():
    for R, frozen in ((3, E3), (5, E5), (9, E9)):
        assert majority_error(R) == pytest.approx(frozen, abs=1e-15)
        assert majority_error_enumerated(R, TWO_DRAWER_P) == pytest.approx(frozen, abs=1e-15)
    e = 1 - TWO_DRAWER_P
    assert majority_error(3) == pytest.approx(3 * TWO_DRAWER_P * e * e + e**3, abs=1e-15)
    assert 1 - majority_error(3) == pytest.approx(0.9419417382415922, abs=1e-12)


def test_majority_error_decreasing():
    values = [majority_error(R) for R in range(1, 41, 2)]
    assert all(b < a for a, b in zip(values, values[1:]))


def test_choose_R():
    for eps, K in ((1e-3, 64), (0.05, 8), (1e-6, 1)):
        R = choose_R(eps, K)
        assert R % 2 == 1
        assert (1 - majority_error(R)) ** K >= 1 - eps
        if R > 3:
            assert (1 - majority_error(R - 2)) ** K < 1 - eps
    assert choose_R(1e-3, 64) == 25


def test_majority_rule_and_even_r():
    M = np.array([[1, 1, 0], [0, 0, 1], [1, 1, 1]])
    assert majority(M).tolist() == [1, 0, 1]
    with pytest.raises(ConfigurationError):
        majority(np.zeros((2, 4)))
    shipment = QuantumShipment(np.tile(encode2((0, 0)).as_array(), (2, 4, 1)))
    with pytest.raises(ConfigurationError):
        bob_measure(shipment, params(T=2, R=3, K=1), RngStream(0, "bob"))


def test_bob_measure_is_deterministic_and_consistent():
    p = params()
    _, shipment = alice_prepare(p, RngStream(1, "alice"))
    m1 = bob_measure(shipment, p, RngStream(2, "bob"))
    m2 = bob_measure(shipment, p, RngStream(2, "bob"))
    assert np.array_equal(m1.M, m2.M) and np.array_equal(m1.control, m2.control)
    assert np.array_equal(m1.B, majority(m1.M))


def test_select_key_and_message_contents():
    p = params(T=16, K=16)
    record, shipment = alice_prepare(p, RngStream(1, "alice"))
    meas = bob_measure(shipment, p, RngStream(2, "bob"))
    key, msg = bob_select_key(meas, p, RngStream(3, "sel"))
    assert msg.selected_block_ids == tuple(range(1, 17))
    assert key.bits == tuple(int(b) for b in meas.B)
    assert set(msg.to_payload()) == {"block_ids", "control_bits"}
    assert msg.control_bits == tuple(int(c) for c in meas.control)

    p8 = params(K=8)
    a = bob_select_key(meas, p8, RngStream(4, "sel"))
    b = bob_select_key(meas, p8, RngStream(4, "sel"))
    assert a == b
    assert len(set(a[1].selected_block_ids)) == 8


def test_alice_reconstruct():
    record = AliceRecord(np.array([[0, 1]], dtype=np.int8))
    assert alice_reconstruct(record, PublicMessage((1,), (1,))).bits == (1,)
    assert alice_reconstruct(record, PublicMessage((1,), (0,))).bits == (0,)
    with pytest.raises(ProtocolError):
        alice_reconstruct(record, PublicMessage((2,), (0,)))
    with pytest.raises(ProtocolError):
        alice_reconstruct(record, PublicMessage((0,), (0,)))


def test_reconstruct_equals_bob_key_when_majorities_right():
    p = params(T=40, R=9, K=40)
    record, shipment = alice_prepare(p, RngStream(5, "alice"))
    meas = bob_measure(shipment, p, RngStream(5, "bob"))
    truth = record.pairs[np.arange(40), meas.control]
    meas = BobMeasurement(meas.control, meas.M, truth.astype(np.int8))
    key, msg = bob_select_key(meas, p, RngStream(5, "sel"))
    assert alice_reconstruct(record, msg) == key


def test_small_run_keys_agree():
    # 16 * e(9) bounds the chance of any wrong block
    assert 16 * E9 < 0.09
    tr = run_protocol(ProtocolParams(T=16, R=9, K=8, alice_seed=3, bob_seed=4))
    if not tr.aborted:
        assert tr.keys_agree


def test_run_protocol_one_way_and_deterministic():
    p = ProtocolParams(T=64, R=9, K=32, alice_seed=7, bob_seed=7)
    t1, t2 = run_protocol(p, plaintext=[1, 0, 1]), run_protocol(p, plaintext=[1, 0, 1])
    assert t1.messages == t2.messages
    assert t1.messages_from_alice() == []
    assert t1.keys_agree and t1.decrypted == (1, 0, 1)
    kinds = [(m.direction, m.kind) for m in t1.messages]
    assert kinds == [
        ("A→B(quantum)", "shipment"),
        ("B→A(classical)", "public_message"),
        ("B→A(classical)", "ciphertext"),
    ]


def test_xor_with_key_limits():
    from cmbox.protocol import KeyMaterial

    key = KeyMaterial((1, 0, 1))
    assert xor_with_key(xor_with_key([0, 0, 1], key), key) == [0, 0, 1]
    with pytest.raises(ParameterError):
        xor_with_key([0] * 4, key)


@pytest.mark.slow
def test_control_bits_uncorrelated_with_key():
    controls, keys = [], []
    for s in range(10_000):
        tr = run_protocol(ProtocolParams(T=8, R=3, K=1, alice_seed=s, bob_seed=s + 1))
        if tr.aborted:
            continue
        controls.append(tr.message.control_bits[0])
        keys.append(tr.bob_key.bits[0])
    assert len(keys) > 5000
    corr = np.corrcoef(controls, keys)[0, 1]
    assert abs(corr) < 0.03
    assert abs(np.mean(keys) - 0.5) < 3 / (2 * math.sqrt(len(keys)))


@pytest.mark.slow
@pytest.mark.parametrize("R, exact", [(3, E3), (5, E5), (9, E9)])
def test_majority_decode_rate(R, exact):
    n = 100_000
    p = ProtocolParams(T=n, R=R, K=1, alice_seed=R, bob_seed=R)
    record, shipment = alice_prepare(p, RngStream(R, "alice"))
    meas = bob_measure(shipment, p, RngStream(R, "bob"))
    rate = np.mean(meas.B != record.pairs[np.arange(n), meas.control])
    assert abs(rate - exact) <= 3 * math.sqrt(exact * (1 - exact) / n)
