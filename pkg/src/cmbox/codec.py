"""Two- and three-drawer magic-box encoders and drawer decoding.

A two-drawer box stores ``(alpha, beta)`` in one qubit; alpha is read in B1
and beta in B2. The three-drawer box adds gamma, read in B3. Reading any
drawer collapses the qubit and leaves the other drawers unreadable.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ParameterError
from .qubit import Basis, QubitState, RngStream, born_probability, measure

_PARAM_TOLERANCE = 1e-12
_EIGHTH_TURN = cmath.exp(1j * math.pi / 4)
# relative phase on |1> selected by (beta, gamma)
_PHASE_SELECTORS = {
    (0, 0): _EIGHTH_TURN,
    (0, 1): -1j * _EIGHTH_TURN,
    (1, 0): 1j * _EIGHTH_TURN,
    (1, 1): -_EIGHTH_TURN,
}

TWO_DRAWER_P = math.cos(math.pi / 8) ** 2
THREE_DRAWER_P = 0.5 + math.sqrt(3.0) / 6.0


def _check_bit(name, value):
    if value not in (0, 1):
        raise ParameterError(f"{name} must be 0 or 1, got {value!r}")
    return int(value)


class TwoDrawerBits(NamedTuple):
    alpha: int
    beta: int

    def validated(self) -> TwoDrawerBits:
        return TwoDrawerBits(_check_bit("alpha", self.alpha), _check_bit("beta", self.beta))


class ThreeDrawerBits(NamedTuple):
    alpha: int
    beta: int
    gamma: int

    def validated(self) -> ThreeDrawerBits:
        return ThreeDrawerBits(
            _check_bit("alpha", self.alpha),
            _check_bit("beta", self.beta),
            _check_bit("gamma", self.gamma),
        )


@dataclass(frozen=True)
class EncoderParams:
    """Real amplitudes ``a > b > 0`` with ``a**2 + b**2 == 1``."""

    a: float
    b: float

    def __post_init__(self):
        a, b = float(self.a), float(self.b)
        if not (math.isfinite(a) and math.isfinite(b)):
            raise ParameterError("encoder amplitudes must be finite")
        if abs(a * a + b * b - 1.0) > _PARAM_TOLERANCE:
            raise ParameterError(f"a^2 + b^2 must equal 1, got {a * a + b * b!r}")
        if not a > b > 0:
            raise ParameterError(f"need a > b > 0, got a={a!r}, b={b!r}")

    @classmethod
    def from_p(cls, p: float) -> EncoderParams:
        """Parameters whose matched-basis read probability ``a**2`` equals ``p``."""
        if not 0.5 < p < 1.0:
            raise ParameterError(f"p must lie in (1/2, 1), got {p!r}")
        return cls(math.sqrt(p), math.sqrt(1.0 - p))

    @classmethod
    def from_angle(cls, theta: float) -> EncoderParams:
        return cls(math.cos(theta), math.sin(theta))

    @property
    def p(self) -> float:
        return self.a * self.a


DEFAULT_TWO_DRAWER = EncoderParams.from_angle(math.pi / 8)
DEFAULT_THREE_DRAWER = EncoderParams.from_p(THREE_DRAWER_P)


@dataclass(frozen=True)
class ChannelStats:
    """Matched-basis read probability ``p`` and the B2/B3 read probability ``q``."""

    p: float
    q: float

    @classmethod
    def for_params(cls, params: EncoderParams) -> ChannelStats:
        return cls(params.p, 0.5 + math.sqrt(0.5) * params.a * params.b)


def encode2(bits, params: EncoderParams = DEFAULT_TWO_DRAWER) -> QubitState:
    alpha, beta = TwoDrawerBits(*bits).validated()
    amp0, amp1 = (params.a, params.b) if alpha == 0 else (params.b, params.a)
    return QubitState(amp0, -amp1 if beta else amp1)


def encode3(bits, params: EncoderParams = DEFAULT_THREE_DRAWER) -> QubitState:
    alpha, beta, gamma = ThreeDrawerBits(*bits).validated()
    a, b = params.a, params.b
    amp0, amp1 = (a, b) if alpha == 0 else (b, a)
    return QubitState(amp0, _PHASE_SELECTORS[beta, gamma] * amp1)


def all_two_drawer_states(params: EncoderParams = DEFAULT_TWO_DRAWER) -> dict[TwoDrawerBits, QubitState]:
    return {TwoDrawerBits(a, b): encode2((a, b), params) for a in (0, 1) for b in (0, 1)}


def all_three_drawer_states(
    params: EncoderParams = DEFAULT_THREE_DRAWER,
) -> dict[ThreeDrawerBits, QubitState]:
    return {
        ThreeDrawerBits(a, b, c): encode3((a, b, c), params)
        for a in (0, 1)
        for b in (0, 1)
        for c in (0, 1)
    }


def state_table(drawers: int, params: EncoderParams | None = None) -> np.ndarray:
    """Amplitudes of every encoding, indexed by the stored bits read as a binary number.

    Row ``alpha*2 + beta`` (two drawers) or ``alpha*4 + beta*2 + gamma``
    (three drawers). Used to encode large batches by fancy indexing.
    """
    if drawers == 2:
        states = all_two_drawer_states(params or DEFAULT_TWO_DRAWER)
    elif drawers == 3:
        states = all_three_drawer_states(params or DEFAULT_THREE_DRAWER)
    else:
        raise ParameterError(f"drawers must be 2 or 3, got {drawers!r}")
    return np.array([s.as_array() for s in states.values()])


def decode_drawer(state: QubitState, drawer: int, rng: RngStream) -> tuple[int, QubitState]:
    """Open ``drawer`` (1, 2 or 3) by measuring in its basis.

    The qubit does not record how many drawers it was prepared with; asking
    for drawer 3 of a two-drawer box is allowed and simply measures in B3.
    """
    return measure(state, Basis.for_drawer(drawer), rng)


def read_probability_table(params: EncoderParams = DEFAULT_THREE_DRAWER) -> np.ndarray:
    """8x3 array of the probability of reading the stored bit, by Born rule.

    Row order matches :func:`all_three_drawer_states`; columns are B1, B2, B3.
    """
    out = np.empty((8, 3))
    for row, (bits, state) in enumerate(all_three_drawer_states(params).items()):
        for basis in Basis:
            p0 = born_probability(state, basis)
            out[row, basis] = p0 if bits[basis] == 0 else 1.0 - p0
    return out
