import json

import numpy as np
import pytest

from cmbox.formats import (
    ResultRecord,
    TranscriptRecord,
    check,
    dump_shipment,
    dump_transcript,
    load_shipment,
    load_transcript,
    records_from_csv,
    records_from_jsonl,
    records_to_csv,
    records_to_jsonl,
    shipment_digest,
)
from cmbox.protocol import ProtocolParams, alice_prepare
from cmbox.qubit import RngStream
from cmbox.session import run_protocol


def test_shipment_round_trip_is_exact():
    p = ProtocolParams(T=6, R=3, K=1)
    _, shipment = alice_prepare(p, RngStream(0, "alice"))
    text = dump_shipment(shipment)
    lines = text.splitlines()
    assert lines[0] == "block,index,amp0.re,amp0.im,amp1.re,amp1.im"
    assert len(lines) == 1 + 18
    assert lines[1].startswith("1,1,")
    back = load_shipment(text)
    assert np.array_equal(back.amps, shipment.amps)
    assert dump_shipment(back) == text
    assert shipment_digest(back) == shipment_digest(shipment)


def test_shipment_uses_17_significant_digits():
    p = ProtocolParams(T=1, R=3, K=1)
    _, shipment = alice_prepare(p, RngStream(0, "alice"))
    first = dump_shipment(shipment).splitlines()[1].split(",")
    assert first[2].lstrip("-") in ("0.92387953251128674", "0.38268343236508978")


def test_shipment_rejects_malformed_text():
    with pytest.raises(ValueError):
        load_shipment("nope\n")
    with pytest.raises(ValueError):
        load_shipment("block,index,amp0.re,amp0.im,amp1.re,amp1.im\n1,2,1,0,0,0\n")


def test_transcript_golden_lines():
    tr = run_protocol(ProtocolParams(T=4, R=3, K=2, alice_seed=1, bob_seed=1))
    text = dump_transcript(tr.messages)
    first = json.loads(text.splitlines()[0])
    assert list(first) == ["step", "direction", "kind", "payload"]
    assert first["direction"] == "A→B(quantum)"
    assert load_transcript(text) == list(tr.messages)
    with pytest.raises(ValueError):
        TranscriptRecord(1, "A→B(classical)", "x", {})


def test_result_records_round_trip():
    records = [
        check("x", "m", 0.1 + 0.2, 0.3, 1e-12, {"seed": 3, "sizes": [1, 2]}),
        ResultRecord("x", "verdict", "clean", "clean", None, True, {}),
        ResultRecord("x", "T0", 81),
    ]
    assert records_from_jsonl(records_to_jsonl(records)) == records
    assert records_from_csv(records_to_csv(records)) == records
    assert records[0].passed
