"""Information content of a drawer seen as a binary symmetric channel."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

BISECTION_TOLERANCE = 1e-14

# Per-drawer information at the default operating points, as quoted to 11 digits.
QUOTED_INFO = {2: 0.39912396329, 3: 0.2559924488}


def _xlog2x(x: float) -> float:
    return 0.0 if x == 0.0 else x * math.log(x) / math.log(2.0)


def binary_channel_information(p: float) -> float:
    """Capacity, in bits, of a binary symmetric channel that reads correctly with probability ``p``."""
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"p must lie in [0, 1], got {p!r}")
    return 1.0 + _xlog2x(p) + _xlog2x(1.0 - p)


def q_of_p(p: float) -> float:
    """Correct-read probability in B2/B3 for a three-drawer box with ``a**2 == p``."""
    if not 0.5 <= p <= 1.0:
        raise DomainError(f"p must lie in [1/2, 1], got {p!r}")
    return 0.5 + math.sqrt(0.5) * math.sqrt(p * (1.0 - p))


def bisect(f, lo: float, hi: float, tol: float = BISECTION_TOLERANCE) -> float:
    flo = f(lo)
    if flo * f(hi) > 0:
        raise DomainError(f"root is not bracketed by [{lo}, {hi}]")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fmid = f(mid)
        if fmid == 0.0:
            return mid
        if (fmid < 0) == (flo < 0):
            lo, flo = mid, fmid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def symmetric_point_closed_form() -> float:
    return 0.5 + math.sqrt(12.0) / 12.0


def solve_symmetric_point_3() -> float:
    """The ``p`` at which all three drawers read equally well (``q(p) == p``)."""
    # q - p is positive at 1/2 and negative at 1.
    return bisect(lambda p: q_of_p(p) - p, 0.5, 1.0)


def two_drawer_read_probabilities(theta: float) -> tuple[float, float]:
    """Correct-read probabilities (drawer 1, drawer 2) for ``a = cos(theta)``."""
    c, s = math.cos(theta), math.sin(theta)
    return c * c, 0.5 + s * c


def solve_equal_info_angle_2() -> float:
    """Encoding angle at which both drawers of a two-drawer box read equally well."""

    def gap(theta):
        d1, d2 = two_drawer_read_probabilities(theta)
        return d1 - d2

    return bisect(gap, 0.0, math.pi / 4)


@dataclass(frozen=True)
class InformationReport:
    p: float
    drawers: int
    info_per_drawer: float
    total_stored: float
    retrievable: float

    @property
    def within_holevo(self) -> bool:
        return self.retrievable <= 1.0


def information_report(p: float, drawers: int) -> InformationReport:
    info = binary_channel_information(p)
    return InformationReport(
        p=p,
        drawers=drawers,
        info_per_drawer=info,
        total_stored=drawers * info,
        # only one drawer can ever be opened
        retrievable=info,
    )


@dataclass(frozen=True)
class QubitCost:
    payload_bits: int
    qubits_needed: int


def qubit_cost(n_bits: int, drawers: int) -> QubitCost:
    """Shannon-limit number of qubits to carry ``n_bits`` in every drawer.

    This is an asymptotic lower bound; a concrete code (e.g. the repetition
    blocks used by the key-exchange protocol) needs more.
    """
    if n_bits < 0:
        raise DomainError(f"payload size must be non-negative, got {n_bits}")
    if drawers not in QUOTED_INFO:
        raise DomainError(f"drawers must be 2 or 3, got {drawers!r}")
    return QubitCost(n_bits, math.ceil(n_bits / QUOTED_INFO[drawers]))
