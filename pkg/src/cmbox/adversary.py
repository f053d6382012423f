"""Eve's two-qubit-per-block attack and the block-agreement test that catches it.

Eve cannot know which drawer Bob will open, but every block holds ``R``
copies of the same box. She measures one copy in B1 and another in B2 and
forwards the collapsed qubits. Whichever drawer Bob opens, one of the two
touched copies now reads as a fair coin, which lowers how often Bob's reads
agree with his own block majority.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .codec import TWO_DRAWER_P
from .errors import ConfigurationError, ParameterError, StrategyError
from .protocol import (
    BobMeasurement,
    ProtocolParams,
    QuantumShipment,
    alice_prepare,
    bob_measure,
)
from .qubit import Basis, RngStream, measure_amplitudes


class EveMode(str, Enum):
    NONE = "none"
    TWO_QUBIT_FIXED = "two_qubit_fixed"
    TWO_QUBIT_RANDOM_POSITIONS = "two_qubit_random_positions"


@dataclass(frozen=True)
class EveStrategy:
    mode: EveMode = EveMode.TWO_QUBIT_FIXED
    eve_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "mode", EveMode(self.mode))

    def stream(self) -> RngStream:
        return RngStream(self.eve_seed, "eve")


@dataclass(frozen=True, eq=False)
class EveNotes:
    """Zero-based positions Eve measured, column 0 in B1 and column 1 in B2, and what she read."""

    positions: np.ndarray  # (T, 2)
    outcomes: np.ndarray  # (T, 2)


def eve_intercept(
    shipment: QuantumShipment, strategy: EveStrategy, rng: RngStream | None = None
) -> tuple[QuantumShipment, EveNotes | None]:
    """Measure two qubits of every block and forward the collapsed states.

    With mode ``none`` the shipment is returned untouched and no notes are
    produced.
    """
    if strategy.mode is EveMode.NONE:
        return shipment, None
    if shipment.R < 2:
        raise StrategyError(f"two-qubit attack needs R >= 2, got R={shipment.R}")
    rng = rng or strategy.stream()
    T = shipment.T
    rows = np.arange(T)
    if strategy.mode is EveMode.TWO_QUBIT_FIXED:
        positions = np.tile(np.array([0, 1]), (T, 1))
    else:
        positions = np.argsort(rng.random((T, shipment.R)), axis=1)[:, :2]
    amps = shipment.amps.copy()
    targets = amps[rows[:, None], positions]
    bases = np.array([Basis.B1, Basis.B2])
    outcomes, collapsed = measure_amplitudes(targets, bases, rng)
    amps[rows[:, None], positions] = collapsed
    return QuantumShipment(amps), EveNotes(positions=positions, outcomes=outcomes)


def detection_statistic(meas: BobMeasurement) -> float:
    """Fraction of individual reads that agree with their block's majority.

    This agreement fraction is one minus the mean squared deviation
    ``sum((M_ij - B_i)**2) / (R*T)``; the agreement form is the one whose
    clean expectation sits near the single-read success probability.
    """
    return float(np.mean(meas.M == meas.B[:, None]))


def _binomial_pmf(n: int, p: float) -> list[float]:
    return [math.comb(n, k) * p**k * (1.0 - p) ** (n - k) for k in range(n + 1)]


def expected_E(R: int, attacked: bool, p: float = TWO_DRAWER_P) -> float:
    """Exact expectation of :func:`detection_statistic` for one block.

    Clean: ``R`` independent reads, each right with probability ``p``.
    Attacked: whichever drawer Bob opens, Eve's copy measured in that basis
    still reads right with probability ``p`` and her other copy reads as a
    fair coin, so the block is ``R - 1`` reads at ``p`` and one at 1/2 for
    either control bit. Outcome patterns are grouped by how many reads are
    right; agreement with the majority is ``max(k, R - k) / R``.
    """
    if R < 3 or R % 2 == 0:
        raise ConfigurationError(f"R must be odd and at least 3, got {R}")
    if not attacked:
        return math.fsum(w * max(k, R - k) / R for k, w in enumerate(_binomial_pmf(R, p)))
    total = []
    for k, w in enumerate(_binomial_pmf(R - 1, p)):
        for coin in (0, 1):
            right = k + coin
            total.append(0.5 * w * max(right, R - right) / R)
    return math.fsum(total)


def quoted_expected_E(R: int, attacked: bool, p: float = TWO_DRAWER_P) -> float:
    """Closed-form estimates ``p`` (clean) and ``p - 0.5/R`` (attacked), kept for comparison only."""
    return p - 0.5 / R if attacked else p


@dataclass(frozen=True)
class DetectionReport:
    E: float
    p_clean: float
    p_e: float
    threshold: float
    verdict: str  # "clean" or "eavesdropped"

    @property
    def eavesdropped(self) -> bool:
        return self.verdict == "eavesdropped"

    def to_payload(self) -> dict:
        return {
            "E": self.E,
            "p_clean": self.p_clean,
            "p_e": self.p_e,
            "threshold": self.threshold,
            "verdict": self.verdict,
        }


def detect(meas: BobMeasurement, R: int | None = None) -> DetectionReport:
    """Flag eavesdropping when the agreement fraction falls below the clean/attacked midpoint.

    Works for any ``T``, including a single block, where the verdict is
    little better than a guess.
    """
    R = meas.R if R is None else R
    p_clean = expected_E(R, attacked=False)
    p_e = expected_E(R, attacked=True)
    threshold = 0.5 * (p_clean + p_e)
    E = detection_statistic(meas)
    return DetectionReport(E, p_clean, p_e, threshold, "eavesdropped" if E < threshold else "clean")


def simulate_detection(
    T: int, R: int, seed: int, label: str, attacked: bool, mode: EveMode = EveMode.TWO_QUBIT_FIXED
) -> DetectionReport:
    """One preparation, optional attack and Bob read, reduced to its detection report."""
    params = ProtocolParams(T=T, R=R, K=1, alice_seed=seed, bob_seed=seed)
    base = RngStream(seed, label)
    _record, shipment = alice_prepare(params, base.child("alice"))
    if attacked:
        shipment, _ = eve_intercept(shipment, EveStrategy(mode, seed), base.child("eve"))
    meas = bob_measure(shipment, params, base.child("bob"))
    return detect(meas, R)


def wilson_upper(failures: int, n: int, z: float = 1.6448536269514722) -> float:
    """One-sided upper confidence bound (95% by default) on a binomial rate."""
    if n == 0:
        return 1.0
    phat = failures / n
    denom = 1.0 + z * z / n
    centre = phat + z * z / (2 * n)
    spread = z * math.sqrt(phat * (1.0 - phat) / n + z * z / (4 * n * n))
    return min(1.0, (centre + spread) / denom)


@dataclass(frozen=True)
class CalibrationResult:
    R: int
    T0: int
    epsilon: float
    false_positive: float
    false_negative: float
    mc_runs: int
    seed: int

    @property
    def estimated_error_rates(self) -> tuple[float, float]:
        return self.false_positive, self.false_negative

    def to_payload(self) -> dict:
        return {
            "R": self.R,
            "T0": self.T0,
            "epsilon": self.epsilon,
            "false_positive": self.false_positive,
            "false_negative": self.false_negative,
            "mc_runs": self.mc_runs,
            "seed": self.seed,
        }

    @classmethod
    def from_payload(cls, payload: dict) -> CalibrationResult:
        return cls(**{k: payload[k] for k in cls.__dataclass_fields__})


def error_rates(T: int, R: int, mc_runs: int, seed: int, label: str = "calibrate") -> tuple[int, int]:
    """Count clean runs flagged and attacked runs passed over ``mc_runs`` runs each.

    Run ``i`` uses the same streams for every ``T`` (common random numbers),
    which keeps the search over ``T`` from chasing sampling noise.
    """
    false_pos = sum(
        simulate_detection(T, R, seed, f"{label}/clean/{i}", attacked=False).eavesdropped
        for i in range(mc_runs)
    )
    false_neg = sum(
        not simulate_detection(T, R, seed, f"{label}/attacked/{i}", attacked=True).eavesdropped
        for i in range(mc_runs)
    )
    return false_pos, false_neg


def calibrate(
    R: int,
    epsilon: float,
    mc_runs: int = 400,
    seed: int = 0,
    t_min: int = 16,
    t_max: int = 1 << 20,
) -> CalibrationResult:
    """Smallest block count ``T0`` at which both verdict error rates stay within ``epsilon``.

    A candidate ``T`` is accepted when the 95% upper confidence bound of each
    Monte Carlo error rate is at most ``epsilon``. Candidates double from
    ``t_min`` until one is accepted, then bisection narrows the last gap.
    """
    if R < 3 or R % 2 == 0:
        raise ConfigurationError(f"R must be odd and at least 3, got {R}")
    if not 0.0 < epsilon < 1.0:
        raise ParameterError(f"epsilon must lie in (0, 1), got {epsilon}")
    if mc_runs < 1:
        raise ParameterError("mc_runs must be positive")

    cache: dict[int, tuple[int, int]] = {}

    def accepted(T):
        if T not in cache:
            cache[T] = error_rates(T, R, mc_runs, seed)
        fp, fn = cache[T]
        return wilson_upper(fp, mc_runs) <= epsilon and wilson_upper(fn, mc_runs) <= epsilon

    lo, hi = None, t_min
    while not accepted(hi):
        lo, hi = hi, hi * 2
        if hi > t_max:
            raise ParameterError(f"no T up to {t_max} meets epsilon={epsilon} at R={R}")
    if lo is not None:
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if accepted(mid):
                hi = mid
            else:
                lo = mid
    fp, fn = cache[hi]
    return CalibrationResult(R, hi, epsilon, fp / mc_runs, fn / mc_runs, mc_runs, seed)
