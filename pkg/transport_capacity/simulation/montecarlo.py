"""
Monte Carlo validation of the SINR model.

Every attempt is simulated from the typical-receiver view: interferers form a Poisson field
on a disk of radius b around the receiver, all links see independent unit-mean exponential
(Rayleigh) power fades, and the attempt succeeds when

    SINR = rho chi_0 d^-alpha / (sum_i rho chi_i |X_i|^-alpha + eta) >= beta

A fresh field and fresh fades are drawn for every attempt, which is the per-attempt
independence the analysis assumes (how that independence is achieved physically, e.g. by
frequency hopping, is outside the model).

Truncating the field at radius b removes interference. b is chosen so the mean removed
interference 2 pi lambda rho b^(2-alpha) / (alpha - 2) is at most truncationEpsilon * eta
(or truncationEpsilon * rho d^-alpha when eta = 0). With farFieldCompensation on, that mean
is added back deterministically, which leaves only a second-order bias, and the radius may
then be clamped to keep lambda pi b^2 <= maxMeanInterferers.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from ..analysis.analytic import CapacityMethod
from ..analysis.finite import PER_M_COLUMNS, FiniteCapacityResult
from ..model.network_params import NetworkParams
from ..utils.errors import ParameterError
from .rng_streams import chunkRanges, trialGenerator

logger = logging.getLogger(__name__)

#Interferers closer than this are pushed out to it (path loss is singular at 0)
MIN_INTERFERER_DISTANCE = 1e-12


@dataclass(frozen=True)
class SimConfig:
    """
    Monte Carlo settings.

    trials - independent trials per experiment
    seed - root seed, every trial stream derives from (seed, experiment, trial index)
    truncationEpsilon - allowed relative truncated-interference bias
    regionRadius - disk radius around the receiver, derived from truncationEpsilon when None
    maxMeanInterferers - clamp on lambda pi b^2 (None disables the clamp)
    farFieldCompensation - add the mean interference from beyond b
    nJobs - joblib workers for trial chunks
    chunkSize - trials per chunk
    """

    trials: int
    seed: int = 2009
    truncationEpsilon: float = 1e-3
    regionRadius: Optional[float] = None
    maxMeanInterferers: Optional[float] = 1000.0
    farFieldCompensation: bool = True
    nJobs: int = 1
    chunkSize: int = 2000

    def __post_init__(self):
        if not (isinstance(self.trials, (int, np.integer)) and self.trials >= 1):
            raise ParameterError(f"trials >= 1 required, got {self.trials!r}")
        if not (isinstance(self.seed, (int, np.integer)) and 0 <= self.seed < 2**64):
            raise ParameterError(f"seed must be an integer in [0, 2^64), got {self.seed!r}")
        if not self.truncationEpsilon > 0:
            raise ParameterError(f"truncationEpsilon > 0 required, got {self.truncationEpsilon}")
        if self.regionRadius is not None and not self.regionRadius > 0:
            raise ParameterError(f"regionRadius > 0 required, got {self.regionRadius}")
        if self.maxMeanInterferers is not None and not self.maxMeanInterferers > 0:
            raise ParameterError(f"maxMeanInterferers > 0 required, got {self.maxMeanInterferers}")
        if not self.chunkSize >= 1:
            raise ParameterError(f"chunkSize >= 1 required, got {self.chunkSize}")

    def toDict(self) -> Dict[str, object]:
        return {
            "trials": int(self.trials),
            "seed": int(self.seed),
            "truncation_epsilon": self.truncationEpsilon,
            "region_radius": self.regionRadius,
            "max_mean_interferers": self.maxMeanInterferers,
            "far_field_compensation": self.farFieldCompensation,
            "n_jobs": self.nJobs,
            "chunk_size": self.chunkSize,
        }


@dataclass(frozen=True)
class SimEstimate:
    """Monte Carlo point estimate with its standard error and provenance"""

    mean: float
    stdError: float
    trials: int
    seed: int

    @classmethod
    def fromSamples(cls, samples: np.ndarray, seed: int) -> "SimEstimate":
        """std error = sample std (ddof=1) / sqrt(trials)"""
        samples = np.asarray(samples, dtype=float)
        n = samples.size
        stdError = float(samples.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
        return cls(mean=float(samples.mean()), stdError=stdError, trials=int(n), seed=int(seed))

    @classmethod
    def ratio(cls, numerator: np.ndarray, denominator: np.ndarray, seed: int) -> "SimEstimate":
        """
        Ratio of means mean(X) / mean(Y) with its delta-method standard error

            se = std(X - r Y) / (sqrt(n) mean(Y))
        """
        x = np.asarray(numerator, dtype=float)
        y = np.asarray(denominator, dtype=float)
        n = x.size
        r = float(x.mean() / y.mean())
        stdError = float((x - r * y).std(ddof=1) / (math.sqrt(n) * y.mean())) if n > 1 else 0.0
        return cls(mean=r, stdError=stdError, trials=int(n), seed=int(seed))


@dataclass(frozen=True)
class PacketOutcome:
    """delivered with attemptsUsed <= a, or outage (attemptsUsed = a)"""

    delivered: bool
    attemptsUsed: int
    hopsCompleted: int


@dataclass(frozen=True)
class PerMSimEstimate:
    """Empirical P(T <= A), E[T ^ A], their ratio and the per-hop success for one hop count"""

    m: int
    pSuccess: float
    probDelivery: SimEstimate
    expectedAttemptsCapped: SimEstimate
    objective: SimEstimate


def pathLoss(squaredDistances: np.ndarray, alpha: float) -> np.ndarray:
    """
    |X|^-alpha from squared distances.

    alpha = 3 and 4 avoid the general power, which dominates the cost of a draw.
    """
    if alpha == 4.0:
        return 1.0 / (squaredDistances * squaredDistances)
    if alpha == 3.0:
        return 1.0 / (squaredDistances * np.sqrt(squaredDistances))
    return squaredDistances ** (-0.5 * alpha)


class InterferenceField:
    """
    Samples SINR for one scenario. Region radii are computed once per hop distance.
    """

    def __init__(self, params: NetworkParams, config: SimConfig):
        self.params = params
        self.config = config
        self.floorHits = 0
        self._radii: Dict[float, float] = {}

    def regionRadius(self, hopDistance: float) -> float:
        """
        Disk radius b around the receiver.

        Solves 2 pi lambda rho b^(2-alpha) / (alpha - 2) = eps * eta, or eps * rho d^-alpha when
        eta = 0, then applies the interferer clamp.
        """
        if hopDistance in self._radii:
            return self._radii[hopDistance]

        params, config = self.params, self.config
        if config.regionRadius is not None:
            radius = config.regionRadius
        elif params.lam == 0:
            radius = 0.0
        else:
            alpha = params.alpha
            if params.eta > 0:
                budget = config.truncationEpsilon * params.eta
            else:
                budget = config.truncationEpsilon * params.rho * hopDistance ** (-alpha)
            radius = (2.0 * math.pi * params.lam * params.rho / ((alpha - 2.0) * budget)) ** (1.0 / (alpha - 2.0))

            if config.maxMeanInterferers is not None:
                cap = math.sqrt(config.maxMeanInterferers / (math.pi * params.lam))
                if radius > cap:
                    logger.info(
                        "region radius %.6g clamped to %.6g (mean interferers capped at %g)",
                        radius,
                        cap,
                        config.maxMeanInterferers,
                    )
                    if not config.farFieldCompensation:
                        logger.warning("clamped region without far-field compensation biases p_s upward")
                    radius = cap

        self._radii[hopDistance] = radius
        return radius

    def farFieldMean(self, radius: float) -> float:
        """Mean interference from beyond the disk, 2 pi lambda rho b^(2-alpha) / (alpha - 2)"""
        params = self.params
        if not self.config.farFieldCompensation or params.lam == 0 or radius <= 0:
            return 0.0
        alpha = params.alpha
        return 2.0 * math.pi * params.lam * params.rho * radius ** (2.0 - alpha) / (alpha - 2.0)

    def drawInterferers(self, radius: float, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
        """
        Squared distances and fades of the Poisson field inside a disk of the given radius.

        Draws the count, then the positions, then the fades.
        """
        count = rng.poisson(self.params.lam * math.pi * radius**2)
        if not count:
            return np.empty(0), np.empty(0)

        #uniform on the disk: squared distance radius^2 * U
        squared = radius**2 * rng.random(count)
        floor = MIN_INTERFERER_DISTANCE**2
        if squared.min() < floor:
            self.floorHits += 1
            logger.debug("interferer inside the distance floor, pushed to %g", MIN_INTERFERER_DISTANCE)
            squared = np.maximum(squared, floor)
        fades = rng.exponential(1.0, count)
        return squared, fades

    def interferenceFrom(self, squaredDistances: np.ndarray, fades: np.ndarray) -> float:
        """sum_i rho chi_i |X_i|^-alpha over the given interferers"""
        if squaredDistances.size == 0:
            return 0.0
        return self.params.rho * float(np.dot(fades, pathLoss(squaredDistances, self.params.alpha)))

    def sample(self, hopDistance: float, rng: np.random.Generator) -> float:
        """
        One SINR draw for a link of length hopDistance.

        Draw order is fixed (signal fade, interferer count, positions, interferer fades) so a
        trial stream always reproduces the same value.
        """
        params = self.params
        radius = self.regionRadius(hopDistance)

        signalFade = rng.exponential(1.0)
        interference = self.farFieldMean(radius)

        if params.lam > 0 and radius > 0:
            interference += self.interferenceFrom(*self.drawInterferers(radius, rng))

        denominator = interference + params.eta
        signal = params.rho * signalFade * hopDistance ** (-params.alpha)

        #Edge Case: no noise, no interferers
        if denominator == 0.0:
            return math.inf
        return signal / denominator


def sampleSinr(
    params: NetworkParams,
    hopDistance: float,
    rng: np.random.Generator,
    config: Optional[SimConfig] = None,
) -> float:
    """One SINR draw at the receiver of a hop of length hopDistance"""
    if not hopDistance > 0:
        raise ParameterError(f"hopDistance > 0 required, got {hopDistance}")
    field = InterferenceField(params, config or SimConfig(trials=1))
    return field.sample(hopDistance, rng)


def simulatePacket(
    params: NetworkParams,
    m: int,
    a: int,
    rng: np.random.Generator,
    field: Optional[InterferenceField] = None,
) -> PacketOutcome:
    """
    Push one packet across m equal hops with at most a attempts in total.

    Each attempt draws a fresh field and fresh fades. Outage packets report attemptsUsed = a
    (T ^ A = A when T > A).
    """
    if m < 1 or a < 1:
        raise ParameterError(f"m >= 1 and a >= 1 required, got m={m}, a={a}")

    #Edge Case: at least m attempts are needed, a < m can never deliver
    if m > a:
        return PacketOutcome(delivered=False, attemptsUsed=a, hopsCompleted=0)

    field = field or InterferenceField(params, SimConfig(trials=1))
    hopDistance = params.R / m
    beta = params.beta
    used = 0

    for hop in range(m):
        while True:
            if used == a:
                return PacketOutcome(delivered=False, attemptsUsed=a, hopsCompleted=hop)
            used += 1
            if field.sample(hopDistance, rng) >= beta:
                break

    return PacketOutcome(delivered=True, attemptsUsed=used, hopsCompleted=m)


def _packetChunk(
    params: NetworkParams, config: SimConfig, m: int, a: int, start: int, stop: int
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Simulate trials start..stop-1 of the m-hop experiment; arrays in trial-index order"""
    field = InterferenceField(params, config)
    size = stop - start
    delivered = np.zeros(size, dtype=bool)
    attempts = np.zeros(size, dtype=np.int64)
    hops = np.zeros(size, dtype=np.int64)

    for offset, trial in enumerate(range(start, stop)):
        rng = trialGenerator(config.seed, m, trial)
        outcome = simulatePacket(params, m, a, rng, field)
        delivered[offset] = outcome.delivered
        attempts[offset] = outcome.attemptsUsed
        hops[offset] = outcome.hopsCompleted

    if field.floorHits:
        logger.debug("%d draws hit the interferer distance floor", field.floorHits)
    return delivered, attempts, hops


def _runPackets(params: NetworkParams, config: SimConfig, m: int, a: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """All trials of one experiment, chunked across joblib workers and reassembled in order"""
    chunks = list(chunkRanges(int(config.trials), int(config.chunkSize)))
    results = Parallel(n_jobs=config.nJobs)(
        delayed(_packetChunk)(params, config, m, a, start, stop) for start, stop in chunks
    )
    delivered = np.concatenate([r[0] for r in results])
    attempts = np.concatenate([r[1] for r in results])
    hops = np.concatenate([r[2] for r in results])
    return delivered, attempts, hops


def estimateSingleHopPs(params: NetworkParams, config: SimConfig) -> SimEstimate:
    """
    Fraction of trials whose SINR over the full distance R reaches beta.

    Uses the 1-hop packet streams with a one-attempt budget, so it is bit-identical to the
    M = 1 row of a budget-1 capacity estimate.
    """
    delivered, _, _ = _runPackets(params, config, 1, 1)
    return SimEstimate.fromSamples(delivered, config.seed)


def estimateCapacityFinite(
    params: NetworkParams, a: int, config: SimConfig
) -> Tuple[List[PerMSimEstimate], FiniteCapacityResult]:
    """
    Empirical P(T <= A), E[T ^ A] and their ratio for every M in 1..A, plus the empirical
    maximiser (ties to the smaller M, as in the exact computation).
    """
    if not (isinstance(a, (int, np.integer)) and a >= 1):
        raise ParameterError(f"attempt budget A >= 1 required, got {a!r}")

    rate = params.rateFactor()
    estimates: List[PerMSimEstimate] = []
    rows = []

    for m in range(1, int(a) + 1):
        delivered, attempts, hops = _runPackets(params, config, m, int(a))
        totalAttempts = int(attempts.sum())
        pSuccess = float(hops.sum() / totalAttempts) if totalAttempts else math.nan

        estimate = PerMSimEstimate(
            m=m,
            pSuccess=pSuccess,
            probDelivery=SimEstimate.fromSamples(delivered, config.seed),
            expectedAttemptsCapped=SimEstimate.fromSamples(attempts, config.seed),
            objective=SimEstimate.ratio(delivered, attempts, config.seed),
        )
        estimates.append(estimate)
        rows.append(
            {
                "M": m,
                "p_s": pSuccess,
                "prob_delivery": estimate.probDelivery.mean,
                "expected_attempts_capped": estimate.expectedAttemptsCapped.mean,
                "objective": estimate.objective.mean,
                "capacity": rate * estimate.objective.mean,
            }
        )
        logger.info("simulated M=%d: objective %.6g +- %.2g", m, estimate.objective.mean, estimate.objective.stdError)

    table = pd.DataFrame(rows, columns=PER_M_COLUMNS)
    best = int(table["objective"].idxmax())
    bestRow = table.iloc[best]

    result = FiniteCapacityResult(
        capacity=float(bestRow["capacity"]),
        mStar=int(bestRow["M"]),
        a=int(a),
        pOut=1.0 - float(bestRow["prob_delivery"]),
        perMTable=table,
        method=CapacityMethod.SIMULATED,
    )
    return estimates, result


def simEstimatesToFrame(estimates: List[PerMSimEstimate]) -> pd.DataFrame:
    """Flatten per-M estimates into one row per M with mean / std error columns"""
    rows = []
    for e in estimates:
        rows.append(
            {
                "M": e.m,
                "sim_p_s": e.pSuccess,
                "sim_prob_delivery": e.probDelivery.mean,
                "sim_prob_delivery_se": e.probDelivery.stdError,
                "sim_expected_attempts_capped": e.expectedAttemptsCapped.mean,
                "sim_expected_attempts_capped_se": e.expectedAttemptsCapped.stdError,
                "sim_objective": e.objective.mean,
                "sim_objective_se": e.objective.stdError,
                "trials": e.probDelivery.trials,
            }
        )
    return pd.DataFrame(rows)
