"""Single-qubit "magic boxes" holding two or three classical bits, and a one-way key exchange built on them."""

from .codec import (
    DEFAULT_THREE_DRAWER,
    DEFAULT_TWO_DRAWER,
    EncoderParams,
    decode_drawer,
    encode2,
    encode3,
    read_probability_table,
)
from .protocol import ProtocolParams, choose_R
from .qubit import Basis, QubitState, RngStream, born_probability, measure
from .session import run_protocol

__version__ = "0.1.0"

__all__ = [
    "Basis",
    "DEFAULT_THREE_DRAWER",
    "DEFAULT_TWO_DRAWER",
    "EncoderParams",
    "ProtocolParams",
    "QubitState",
    "RngStream",
    "born_probability",
    "choose_R",
    "decode_drawer",
    "encode2",
    "encode3",
    "measure",
    "run_protocol",
    "read_probability_table",
]
