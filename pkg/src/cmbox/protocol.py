"""Parties of the one-way key exchange built on two-drawer boxes.

Alice ships ``T`` blocks of ``R`` identical boxes and never speaks on the
classical channel. Bob reads every block in a drawer picked by his private
control bit, takes the majority per block, keeps ``K`` blocks as key and
publishes only their ids and control bits. Alice looks the key up in her
record.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .codec import DEFAULT_TWO_DRAWER, TWO_DRAWER_P, EncoderParams, state_table
from .errors import ConfigurationError, ParameterError, ProtocolError
from .qubit import Basis, QubitState, RngStream, measure_amplitudes

_MAX_R = 10_001


@dataclass(frozen=True)
class ProtocolParams:
    T: int
    R: int
    K: int
    epsilon: float = 1e-3
    alice_seed: int = 0
    bob_seed: int = 0

    def __post_init__(self):
        if not 1 <= self.K <= self.T:
            raise ParameterError(f"need T >= K >= 1, got T={self.T}, K={self.K}")
        if self.R < 3 or self.R % 2 == 0:
            raise ConfigurationError(f"R must be odd and at least 3, got {self.R}")
        if not 0.0 < self.epsilon < 1.0:
            raise ParameterError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        for name in ("alice_seed", "bob_seed"):
            if not 0 <= getattr(self, name) < 2**64:
                raise ParameterError(f"{name} must be a 64-bit unsigned integer")


@dataclass(frozen=True, eq=False)
class AliceRecord:
    pairs: np.ndarray  # (T, 2) int8, columns are the drawer-1 and drawer-2 bits

    @property
    def T(self) -> int:
        return len(self.pairs)


@dataclass(frozen=True, eq=False)
class QuantumShipment:
    amps: np.ndarray  # (T, R, 2) complex128

    @property
    def T(self) -> int:
        return self.amps.shape[0]

    @property
    def R(self) -> int:
        return self.amps.shape[1]

    def qubit(self, block: int, index: int) -> QubitState:
        """Zero-based access to one qubit."""
        return QubitState.from_array(self.amps[block, index])

    def copy(self) -> QuantumShipment:
        return QuantumShipment(self.amps.copy())


@dataclass(frozen=True, eq=False)
class BobMeasurement:
    control: np.ndarray  # (T,) drawer choice: 0 -> B1, 1 -> B2
    M: np.ndarray  # (T, R) outcome bits
    B: np.ndarray  # (T,) block majorities

    @property
    def R(self) -> int:
        return self.M.shape[1]


@dataclass(frozen=True)
class PublicMessage:
    """Everything Bob says in the clear. Block ids are one-based."""

    selected_block_ids: tuple[int, ...]
    control_bits: tuple[int, ...]

    def to_payload(self) -> dict:
        return {"block_ids": list(self.selected_block_ids), "control_bits": list(self.control_bits)}


@dataclass(frozen=True)
class KeyMaterial:
    bits: tuple[int, ...]

    def __len__(self):
        return len(self.bits)


def alice_prepare(
    params: ProtocolParams, rng: RngStream, encoder: EncoderParams = DEFAULT_TWO_DRAWER
) -> tuple[AliceRecord, QuantumShipment]:
    pairs = rng.bits(2 * params.T).reshape(params.T, 2)
    table = state_table(2, encoder)
    block_states = table[pairs[:, 0] * 2 + pairs[:, 1]]
    amps = np.repeat(block_states[:, None, :], params.R, axis=1)
    return AliceRecord(pairs), QuantumShipment(amps)


def majority(M: np.ndarray) -> np.ndarray:
    R = M.shape[-1]
    if R % 2 == 0:
        raise ConfigurationError(f"majority needs an odd block length, got {R}")
    return (2 * M.sum(axis=-1, dtype=np.int64) > R).astype(np.int8)


def bob_measure(shipment: QuantumShipment, params: ProtocolParams, rng: RngStream) -> BobMeasurement:
    """Read each block in the drawer chosen by a fresh control bit.

    Draw order: ``T`` control bits, then one uniform per qubit in block-major
    order.
    """
    if shipment.R % 2 == 0:
        raise ConfigurationError(f"R must be odd, shipment has R={shipment.R}")
    if (shipment.T, shipment.R) != (params.T, params.R):
        raise ProtocolError(
            f"shipment is {shipment.T}x{shipment.R}, parameters say {params.T}x{params.R}"
        )
    control = rng.bits(params.T)
    bases = np.where(control == 0, Basis.B1, Basis.B2)[:, None]
    M, _collapsed = measure_amplitudes(shipment.amps, bases, rng)
    return BobMeasurement(control=control, M=M, B=majority(M))


def bob_select_key(
    meas: BobMeasurement, params: ProtocolParams, rng: RngStream
) -> tuple[KeyMaterial, PublicMessage]:
    """Pick ``K`` blocks uniformly; only call once detection came back clean."""
    T = len(meas.B)
    if params.K > T:
        raise ParameterError(f"cannot select K={params.K} blocks out of T={T}")
    chosen = np.sort(rng.generator.choice(T, size=params.K, replace=False))
    key = KeyMaterial(tuple(int(b) for b in meas.B[chosen]))
    msg = PublicMessage(
        selected_block_ids=tuple(int(i) + 1 for i in chosen),
        control_bits=tuple(int(c) for c in meas.control[chosen]),
    )
    return key, msg


def alice_reconstruct(record: AliceRecord, msg: PublicMessage) -> KeyMaterial:
    ids, controls = msg.selected_block_ids, msg.control_bits
    if len(ids) != len(controls):
        raise ProtocolError("message carries a different number of block ids and control bits")
    if len(set(ids)) != len(ids):
        raise ProtocolError("message repeats a block id")
    bits = []
    for block_id, c in zip(ids, controls):
        if not 1 <= block_id <= record.T:
            raise ProtocolError(f"block id {block_id} outside [1, {record.T}]")
        if c not in (0, 1):
            raise ProtocolError(f"control bit must be 0 or 1, got {c!r}")
        bits.append(int(record.pairs[block_id - 1, c]))
    return KeyMaterial(tuple(bits))


def majority_error(R: int, p: float = TWO_DRAWER_P) -> float:
    """Exact probability that a majority over ``R`` reads, each right w.p. ``p``, is wrong."""
    if R < 1 or R % 2 == 0:
        raise ConfigurationError(f"R must be odd and positive, got {R}")
    return math.fsum(
        math.comb(R, k) * p**k * (1.0 - p) ** (R - k) for k in range((R - 1) // 2 + 1)
    )


def choose_R(epsilon: float, K: int, p: float = TWO_DRAWER_P) -> int:
    """Smallest odd block length with P(all ``K`` key bits right) >= 1 - epsilon.

    Never returns less than 3, the shortest block the protocol accepts.
    """
    if not 0.0 < epsilon < 1.0:
        raise ParameterError(f"epsilon must lie in (0, 1), got {epsilon}")
    if K < 1:
        raise ParameterError(f"K must be positive, got {K}")
    R = 1
    while (1.0 - majority_error(R, p)) ** K < 1.0 - epsilon:
        R += 2
        if R > _MAX_R:
            raise ParameterError(f"no R up to {_MAX_R} meets epsilon={epsilon}")
    return max(R, 3)


def xor_with_key(bits, key: KeyMaterial) -> list[int]:
    """One-time-pad a bit string with the shared key (also decrypts)."""
    bits = list(bits)
    if len(bits) > len(key):
        raise ParameterError(f"message of {len(bits)} bits exceeds key of {len(key)} bits")
    return [b ^ k for b, k in zip(bits, key.bits)]
