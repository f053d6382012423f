"""Single-qubit state vectors, the three Pauli eigenbases and projective measurement."""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .errors import InvalidStateError

NORM_TOLERANCE = 1e-9
_SQRT_HALF = 1.0 / math.sqrt(2.0)


@dataclass(frozen=True)
class QubitState:
    """Pure qubit state ``amp0|0> + amp1|1>``.

    Global phase is kept as given; compare states with :func:`same_ray`.
    """

    amp0: complex
    amp1: complex

    def __post_init__(self):
        amp0, amp1 = complex(self.amp0), complex(self.amp1)
        if not all(math.isfinite(x) for x in (amp0.real, amp0.imag, amp1.real, amp1.imag)):
            raise InvalidStateError(f"non-finite amplitude in ({amp0}, {amp1})")
        object.__setattr__(self, "amp0", amp0)
        object.__setattr__(self, "amp1", amp1)

    @property
    def norm_squared(self) -> float:
        return abs(self.amp0) ** 2 + abs(self.amp1) ** 2

    def as_array(self) -> np.ndarray:
        return np.array([self.amp0, self.amp1], dtype=np.complex128)

    @classmethod
    def from_array(cls, vec) -> QubitState:
        return cls(complex(vec[0]), complex(vec[1]))


class Basis(IntEnum):
    """Measurement bases. Value doubles as the row index into :data:`EIGENVECTORS`."""

    B1 = 0  # |0>, |1>
    B2 = 1  # |+>, |->
    B3 = 2  # |u>, |d>

    @classmethod
    def for_drawer(cls, drawer: int) -> Basis:
        if drawer not in (1, 2, 3):
            raise ValueError(f"drawer must be 1, 2 or 3, got {drawer!r}")
        return cls(drawer - 1)


# EIGENVECTORS[basis, bit] is the eigenstate read as ``bit`` in ``basis``.
EIGENVECTORS = np.array(
    [
        [[1.0, 0.0], [0.0, 1.0]],
        [[_SQRT_HALF, _SQRT_HALF], [_SQRT_HALF, -_SQRT_HALF]],
        [[_SQRT_HALF, 1j * _SQRT_HALF], [_SQRT_HALF, -1j * _SQRT_HALF]],
    ],
    dtype=np.complex128,
)
EIGENVECTORS.setflags(write=False)

ZERO = QubitState(1, 0)
ONE = QubitState(0, 1)
PLUS = QubitState(_SQRT_HALF, _SQRT_HALF)
MINUS = QubitState(_SQRT_HALF, -_SQRT_HALF)
UP = QubitState(_SQRT_HALF, 1j * _SQRT_HALF)
DOWN = QubitState(_SQRT_HALF, -1j * _SQRT_HALF)

_BASIS_STATES = {
    Basis.B1: (ZERO, ONE),
    Basis.B2: (PLUS, MINUS),
    Basis.B3: (UP, DOWN),
}


class RngStream:
    """Seeded random stream owned by one party.

    The generator is keyed by ``(seed, label)`` so that e.g. ``"alice"`` and
    ``"bob"`` streams built from the same seed are independent, while the same
    pair always replays the same draws.
    """

    def __init__(self, seed: int, label: str):
        seed = int(seed)
        if not 0 <= seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
        self.seed = seed
        self.label = label
        digest = hashlib.sha256(label.encode("utf-8")).digest()
        label_key = int.from_bytes(digest[:8], "little")
        self.generator = np.random.Generator(
            np.random.PCG64(np.random.SeedSequence([seed, label_key]))
        )

    def __repr__(self):
        return f"RngStream(seed={self.seed}, label={self.label!r})"

    def child(self, name: str) -> RngStream:
        return RngStream(self.seed, f"{self.label}/{name}")

    def random(self, size=None):
        return self.generator.random(size)

    def bits(self, n: int) -> np.ndarray:
        return self.generator.integers(0, 2, size=n, dtype=np.int8)


def basis_vectors(basis: Basis) -> tuple[QubitState, QubitState]:
    """Return the eigenstates read as 0 and as 1 in ``basis``."""
    return _BASIS_STATES[Basis(basis)]


def inner_product(u: QubitState, v: QubitState) -> complex:
    """``<u|v>``, conjugating ``u``."""
    return u.amp0.conjugate() * v.amp0 + u.amp1.conjugate() * v.amp1


def same_ray(u: QubitState, v: QubitState, tol: float = 1e-12) -> bool:
    """True when ``u`` and ``v`` differ at most by a global phase."""
    return abs(abs(inner_product(u, v)) - 1.0) <= tol


def _check_normalized(state: QubitState):
    deviation = abs(math.sqrt(state.norm_squared) - 1.0)
    if deviation > NORM_TOLERANCE:
        raise InvalidStateError(f"state is not normalized (|norm - 1| = {deviation:.3g})")


def born_probability(state: QubitState, basis: Basis) -> float:
    """Probability that measuring ``state`` in ``basis`` reads bit 0."""
    _check_normalized(state)
    e0, _ = basis_vectors(basis)
    return abs(inner_product(e0, state)) ** 2


def measure(state: QubitState, basis: Basis, rng: RngStream) -> tuple[int, QubitState]:
    """Projective measurement. Returns the bit read and the collapsed eigenstate.

    Consumes exactly one uniform draw; the outcome is 0 iff the draw falls
    below the Born probability of 0. :func:`measure_amplitudes` uses the same
    rule so scalar and batched paths replay identically.
    """
    p0 = born_probability(state, basis)
    bit = 0 if rng.random() < p0 else 1
    return bit, basis_vectors(basis)[bit]


def measure_amplitudes(amps: np.ndarray, bases, rng: RngStream) -> tuple[np.ndarray, np.ndarray]:
    """Batched :func:`measure` over an array of states.

    ``amps`` has shape ``(..., 2)``; ``bases`` holds basis indices
    broadcastable to ``amps.shape[:-1]``. Draws are taken in C order.
    """
    amps = np.asarray(amps, dtype=np.complex128)
    shape = amps.shape[:-1]
    norms = np.sum(np.abs(amps) ** 2, axis=-1)
    if amps.size and np.max(np.abs(np.sqrt(norms) - 1.0)) > NORM_TOLERANCE:
        raise InvalidStateError("batch contains a non-normalized state")
    bases = np.broadcast_to(np.asarray(bases, dtype=np.intp), shape)
    e0 = EIGENVECTORS[bases, 0]
    p0 = np.abs(np.sum(e0.conj() * amps, axis=-1)) ** 2
    draws = rng.random(shape)
    bits = (draws >= p0).astype(np.int8)
    return bits, EIGENVECTORS[bases, bits]

