"""End-to-end key exchange run, with an optional eavesdropper on the quantum link."""

from __future__ import annotations

from dataclasses import dataclass

from .adversary import DetectionReport, EveNotes, EveStrategy, detect, eve_intercept
from .formats import CLASSICAL_B_TO_A, QUANTUM_A_TO_B, TranscriptRecord, shipment_digest
from .protocol import (
    AliceRecord,
    BobMeasurement,
    KeyMaterial,
    ProtocolParams,
    PublicMessage,
    QuantumShipment,
    alice_prepare,
    alice_reconstruct,
    bob_measure,
    bob_select_key,
    xor_with_key,
)
from .qubit import RngStream


@dataclass(frozen=True, eq=False)
class Transcript:
    params: ProtocolParams
    record: AliceRecord
    shipment_digest: str
    measurement: BobMeasurement
    detection: DetectionReport
    message: PublicMessage | None
    bob_key: KeyMaterial | None
    alice_key: KeyMaterial | None
    messages: tuple[TranscriptRecord, ...]
    eve_notes: EveNotes | None = None
    plaintext: tuple[int, ...] | None = None
    decrypted: tuple[int, ...] | None = None
    shipment: QuantumShipment | None = None  # as sent by Alice, before any interception

    @property
    def aborted(self) -> bool:
        return self.detection.eavesdropped

    @property
    def keys_agree(self) -> bool:
        return self.bob_key is not None and self.bob_key == self.alice_key

    def messages_from_alice(self) -> list[TranscriptRecord]:
        return [m for m in self.messages if m.classical and m.direction.startswith("A")]


def run_protocol(
    params: ProtocolParams, eve: EveStrategy | None = None, plaintext=None
) -> Transcript:
    """Prepare, ship, (optionally) intercept, measure, test, then agree on a key.

    Bob runs the eavesdropping test on all ``T`` blocks before choosing key
    blocks; if it fires he aborts and never speaks. ``plaintext`` (a bit
    sequence no longer than ``K``) is one-time-padded with Bob's key and
    sent as a second classical message.
    """
    alice_rng = RngStream(params.alice_seed, "alice")
    bob_rng = RngStream(params.bob_seed, "bob")
    record, shipment = alice_prepare(params, alice_rng)
    messages = [
        TranscriptRecord(
            1,
            QUANTUM_A_TO_B,
            "shipment",
            {"blocks": params.T, "qubits_per_block": params.R, "sha256": shipment_digest(shipment)},
        )
    ]
    digest = messages[0].payload["sha256"]

    sent = shipment
    notes = None
    if eve is not None:
        shipment, notes = eve_intercept(shipment, eve)

    meas = bob_measure(shipment, params, bob_rng)
    report = detect(meas, params.R)
    if report.eavesdropped:
        return Transcript(
            params, record, digest, meas, report, None, None, None, tuple(messages), notes, shipment=sent
        )

    bob_key, msg = bob_select_key(meas, params, bob_rng)
    messages.append(TranscriptRecord(2, CLASSICAL_B_TO_A, "public_message", msg.to_payload()))
    alice_key = alice_reconstruct(record, msg)

    decrypted = None
    if plaintext is not None:
        plaintext = tuple(int(b) for b in plaintext)
        cipher = xor_with_key(plaintext, bob_key)
        messages.append(
            TranscriptRecord(3, CLASSICAL_B_TO_A, "ciphertext", {"bits": "".join(map(str, cipher))})
        )
        decrypted = tuple(xor_with_key(cipher, alice_key))

    return Transcript(
        params,
        record,
        digest,
        meas,
        report,
        msg,
        bob_key,
        alice_key,
        tuple(messages),
        notes,
        plaintext,
        decrypted,
        sent,
    )
