"""Experiments behind the command-line subcommands. Each returns a list of result records."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import chaninfo
from .adversary import EveMode, EveStrategy, calibrate, quoted_expected_E
from .codec import (
    DEFAULT_THREE_DRAWER,
    DEFAULT_TWO_DRAWER,
    THREE_DRAWER_P,
    TWO_DRAWER_P,
    ChannelStats,
    all_three_drawer_states,
    encode2,
    state_table,
    read_probability_table,
)
from .defaults import QUOTED, tolerances
from .formats import ResultRecord, check, info
from .protocol import ProtocolParams, choose_R, majority, majority_error
from .qubit import Basis, RngStream, born_probability, measure_amplitudes
from .session import Transcript, run_protocol


def verify_constants(tol=None) -> list[ResultRecord]:
    tol = tolerances(tol)
    exp = "verify-constants"
    out = [
        check(exp, "read_probability_psi00_B1", born_probability(encode2((0, 0)), Basis.B1),
              QUOTED["read_probability_2"], tol["closed_form"]),
        check(exp, "read_probability_psi01_B2", 1.0 - born_probability(encode2((0, 1)), Basis.B2),
              QUOTED["read_probability_2"], tol["closed_form"]),
        check(exp, "info_per_drawer_2", chaninfo.binary_channel_information(TWO_DRAWER_P),
              QUOTED["info_2"], tol["closed_form"]),
        check(exp, "info_per_drawer_3", chaninfo.binary_channel_information(THREE_DRAWER_P),
              QUOTED["info_3"], tol["closed_form"]),
    ]
    p_star = chaninfo.solve_symmetric_point_3()
    out.append(check(exp, "symmetric_point_3", p_star, chaninfo.symmetric_point_closed_form(),
                     tol["symmetric_point"]))
    out.append(check(exp, "q_at_symmetric_point", chaninfo.q_of_p(p_star), p_star, tol["q_symmetry"]))
    out.append(check(exp, "equal_info_angle_2", chaninfo.solve_equal_info_angle_2(), math.pi / 8,
                     tol["equal_info_angle"]))

    p = DEFAULT_THREE_DRAWER.p
    expected = (p, chaninfo.q_of_p(p), chaninfo.q_of_p(p))
    table = read_probability_table(DEFAULT_THREE_DRAWER)
    for row, bits in enumerate(all_three_drawer_states(DEFAULT_THREE_DRAWER)):
        label = "".join(map(str, bits))
        for basis in Basis:
            out.append(check(exp, f"read_table[{label},{basis.name}]", float(table[row, basis]),
                             expected[basis], tol["read_table"]))
    return out


def _drawer_setup(drawers: int):
    if drawers == 2:
        return DEFAULT_TWO_DRAWER, [TWO_DRAWER_P] * 2
    if drawers == 3:
        stats = ChannelStats.for_params(DEFAULT_THREE_DRAWER)
        return DEFAULT_THREE_DRAWER, [stats.p, stats.q, stats.q]
    raise ValueError(f"drawers must be 2 or 3, got {drawers!r}")


def _encode_batch(bits: np.ndarray, drawers: int, params) -> np.ndarray:
    weights = 1 << np.arange(drawers - 1, -1, -1)
    return state_table(drawers, params)[bits @ weights]


def mc_drawer(trials: int, drawers: int, seed: int, tol=None) -> list[ResultRecord]:
    """Open each drawer of freshly encoded boxes, then try every other drawer on the leftovers."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    tol = tolerances(tol)
    exp = "mc-drawer"
    echo = {"trials": trials, "drawers": drawers, "seed": seed}
    params, expected = _drawer_setup(drawers)
    rng = RngStream(seed, f"mc-drawer/{drawers}")
    stored = rng.bits(trials * drawers).reshape(trials, drawers).astype(np.int64)
    amps = _encode_batch(stored, drawers, params)
    out = []
    for opened in range(drawers):
        read, collapsed = measure_amplitudes(amps, opened, rng.child(f"open{opened + 1}"))
        rate = float(np.mean(read == stored[:, opened]))
        out.append(check(exp, f"correct_read_drawer{opened + 1}", rate, expected[opened],
                         tol["mc_read"], echo))
        for other in range(drawers):
            if other == opened:
                continue
            later, _ = measure_amplitudes(collapsed, other, rng.child(f"open{opened + 1}/then{other + 1}"))
            corr = 2.0 * float(np.mean(later == stored[:, other])) - 1.0
            out.append(check(exp, f"correlation_drawer{other + 1}_after_drawer{opened + 1}", corr, 0.0,
                             tol["destruction_correlation"], echo))
    return out


def bytes_to_bits(data: bytes, n_bits: int | None = None) -> np.ndarray:
    """Most-significant bit first, zero-padded on the right to ``n_bits``."""
    bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8)).astype(np.int64)
    if n_bits is not None:
        bits = np.concatenate([bits, np.zeros(n_bits - len(bits), dtype=np.int64)])
    return bits


@dataclass
class Distribution:
    records: list[ResultRecord]
    recovered: bytes


def distribute(payloads, choose: int, R: int, seed: int, tol=None) -> Distribution:
    """Put one payload per drawer, open drawer ``choose`` and majority-decode it.

    Every payload bit position becomes ``R`` identical boxes. After the
    chosen drawer is read, the other drawers are decoded from the collapsed
    qubits to show they no longer carry the content.
    """
    tol = tolerances(tol)
    payloads = [bytes(p) for p in payloads]
    drawers = len(payloads)
    if drawers not in (2, 3) or not all(payloads):
        raise ValueError("need two or three non-empty payloads")
    if choose not in range(1, drawers + 1):
        raise ValueError(f"choose must be a drawer in 1..{drawers}, got {choose}")
    if R < 1 or R % 2 == 0:
        raise ValueError(f"R must be odd, got {R}")
    exp = "distribute"
    echo = {"drawers": drawers, "choose": choose, "R": R, "seed": seed,
            "payload_bytes": [len(p) for p in payloads]}
    params, expected = _drawer_setup(drawers)
    n = 8 * max(len(p) for p in payloads)
    stored = np.stack([bytes_to_bits(p, n) for p in payloads], axis=1)
    amps = np.repeat(_encode_batch(stored, drawers, params)[:, None, :], R, axis=1)
    rng = RngStream(seed, "distribute")

    opened = choose - 1
    reads, collapsed = measure_amplitudes(amps, opened, rng.child("receiver"))
    decoded = majority(reads)
    p_read = expected[opened]
    e_R = majority_error(R, p_read)
    chosen_len = 8 * len(payloads[opened])
    ber = float(np.mean(decoded[:chosen_len] != stored[:chosen_len, opened]))
    sigma = math.sqrt(e_R * (1 - e_R) / chosen_len)
    out = [
        check(exp, "single_read_correct_rate", float(np.mean(reads == stored[:, opened, None])),
              p_read, tol["mc_read"], echo),
        check(exp, "chosen_bit_error_rate", ber, e_R, max(tol["ber_sigmas"] * sigma, 1.0 / chosen_len),
              echo),
    ]
    for other in range(drawers):
        if other == opened:
            continue
        other_reads, _ = measure_amplitudes(collapsed, other, rng.child(f"unopened{other + 1}"))
        other_len = 8 * len(payloads[other])
        other_ber = float(np.mean(majority(other_reads)[:other_len] != stored[:other_len, other]))
        spread = tol["ber_sigmas"] * 0.5 / math.sqrt(other_len)
        out.append(check(exp, f"unopened_drawer{other + 1}_bit_error_rate", other_ber, 0.5,
                         max(tol["unopened_ber"], spread), echo))

    info_per_drawer = chaninfo.binary_channel_information(p_read)
    out += [
        info(exp, "shannon_qubits_per_content", chaninfo.qubit_cost(n, drawers).qubits_needed, echo),
        info(exp, "repetition_qubits_per_content", n * R, echo),
        info(exp, "shannon_overhead", 1.0 / (drawers * info_per_drawer) - 1.0, echo),
    ]
    recovered = np.packbits(decoded[:chosen_len].astype(np.uint8)).tobytes()
    return Distribution(out, recovered)


def qkd(
    K: int,
    seed: int,
    T: int | None = None,
    R: int | None = None,
    epsilon: float = 1e-3,
    eve: str | None = None,
    calibration=None,
    plaintext=None,
) -> tuple[Transcript, list[ResultRecord]]:
    """Run one key exchange.

    ``R`` defaults to :func:`choose_R` for ``(epsilon, K)``. ``T`` defaults
    to the calibrated ``T0`` when a calibration for the same ``R`` is given,
    else to ``K``.
    """
    R = R if R is not None else choose_R(epsilon, K)
    if T is None:
        if calibration is not None:
            if calibration.R != R:
                raise ValueError(f"calibration is for R={calibration.R}, run uses R={R}")
            T = max(calibration.T0, K)
        else:
            T = K
    params = ProtocolParams(T=T, R=R, K=K, epsilon=epsilon, alice_seed=seed, bob_seed=seed)
    strategy = None if eve in (None, "none") else EveStrategy(EveMode(eve), seed)
    transcript = run_protocol(params, strategy, plaintext)
    echo = {"T": T, "R": R, "K": K, "epsilon": epsilon, "seed": seed, "eve": eve or "none"}
    rep = transcript.detection
    exp = "qkd"
    out = [
        check(exp, "alice_classical_messages", len(transcript.messages_from_alice()), 0, 0, echo),
        ResultRecord(exp, "verdict", rep.verdict, "eavesdropped" if strategy else "clean", None,
                     rep.verdict == ("eavesdropped" if strategy else "clean"), echo),
        info(exp, "E", rep.E, echo),
        info(exp, "threshold", rep.threshold, echo),
        info(exp, "expected_E_clean", rep.p_clean, echo),
        info(exp, "expected_E_attacked", rep.p_e, echo),
        info(exp, "quoted_E_attacked", quoted_expected_E(R, attacked=True), echo),
        info(exp, "block_error_rate_exact", majority_error(R), echo),
    ]
    if not transcript.aborted:
        out.append(check(exp, "keys_agree", int(transcript.keys_agree), 1, 0, echo))
        if transcript.plaintext is not None:
            out.append(check(exp, "message_recovered", int(transcript.decrypted == transcript.plaintext),
                             1, 0, echo))
    return transcript, out


def calibrate_records(R: int, epsilon: float, mc_runs: int, seed: int):
    result = calibrate(R, epsilon, mc_runs=mc_runs, seed=seed)
    echo = {"R": R, "epsilon": epsilon, "mc_runs": mc_runs, "seed": seed}
    exp = "calibrate"
    records = [
        info(exp, "T0", result.T0, echo),
        check(exp, "false_positive_rate", result.false_positive, 0.0, epsilon, echo),
        check(exp, "false_negative_rate", result.false_negative, 0.0, epsilon, echo),
    ]
    return result, records
