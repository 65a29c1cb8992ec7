"""
Exact finite-budget capacity C(A).

A packet crosses M equal hops; each attempt on a hop succeeds independently with p = p_s(M),
so the attempts on one hop are geometric and the total T(M) is Pascal(M, p). With at most A
attempts per packet:

    C(A) = lambda log(1+beta) R max_{M in 1..A} P(T(M) <= A) / E[T(M) ^ A]

The gap f(M) = p E[T ^ A] - M P(T <= A) >= 0 is what makes 1/E[T(M)] = p/M an upper
bound for the ratio; lemma1Gap / lemma1Delta expose it (and its increment M P(S_A = M)) as
executable checks.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict

import numpy as np
import pandas as pd

from ..model.network_params import NetworkParams
from ..utils.errors import ParameterError
from .analytic import CapacityMethod, perHopSuccess
from .binomial_utils import BinomialUtils, PascalUtils

logger = logging.getLogger(__name__)

PER_M_COLUMNS = ["M", "p_s", "prob_delivery", "expected_attempts_capped", "objective", "capacity"]


@dataclass(frozen=True)
class PascalModel:
    """
    (M, p, A): M hops, per-hop success p, attempt budget A.

    m = 0 (the empty route) is accepted because the gap recursion starts from it.
    """

    m: int
    p: float
    a: int

    def __post_init__(self):
        if not (isinstance(self.m, (int, np.integer)) and self.m >= 0):
            raise ParameterError(f"m must be a non-negative integer, got {self.m!r}")
        if not (isinstance(self.a, (int, np.integer)) and self.a >= 1):
            raise ParameterError(f"a must be a positive integer, got {self.a!r}")
        if not (0.0 <= self.p <= 1.0):
            raise ParameterError(f"p must lie in [0, 1], got {self.p!r}")


@dataclass(frozen=True)
class FiniteCapacityResult:
    """
    C(A) with its maximising M, the per-M table and the end-to-end outage at the maximiser.

    perMTable columns: M, p_s, prob_delivery, expected_attempts_capped, objective, capacity
    """

    capacity: float
    mStar: int
    a: int
    pOut: float
    perMTable: pd.DataFrame
    method: CapacityMethod = CapacityMethod.EXACT_FINITE


def pascalPmf(model: PascalModel, n: int) -> float:
    """P(T(M) = n) = C(n-1, M-1) p^M (1-p)^(n-M); 0 for n < M"""
    if n < model.m:
        return 0.0
    return float(PascalUtils.pmfTerms(model.m, model.p, [n])[0])


def probDelivery(model: PascalModel) -> float:
    """P(T(M) <= A) = P(S_A >= M); 0 when A < M"""
    if model.a < model.m:
        return 0.0
    return BinomialUtils.binomSf(model.a, model.p, model.m)


def probOutage(model: PascalModel) -> float:
    """P(T(M) > A) = P(S_A <= M - 1)"""
    if model.a < model.m:
        return 1.0
    return BinomialUtils.binomCdf(model.a, model.p, model.m - 1)


def expectedAttemptsCapped(model: PascalModel) -> float:
    """
    E[T(M) ^ A] by the direct sum

        sum_{n=M}^{A} n P(T = n) + A P(T > A)

    which lies in [min(M, A), A].
    """
    m, p, a = model.m, model.p, model.a

    #Edge Case: empty route needs no attempts
    if m == 0:
        return 0.0
    #Edge Case: never succeeds, or M >= A so T ^ A is exactly A
    if p <= 0.0 or a <= m:
        return float(a)

    ns = np.arange(m, a + 1)
    head = math.fsum((ns * PascalUtils.pmfTerms(m, p, ns)).tolist())
    return head + a * probOutage(model)


def expectedAttemptsCappedRearranged(model: PascalModel) -> float:
    """
    E[T(M) ^ A] through the binomial rearrangement

        p E[T ^ A] = M P(T <= A) + (pA + M) P(S_A <= M-1) - M P(S_(A+1) <= M)

    Only meaningful for p > 0; used as a cross-check on the direct sum.
    """
    m, p, a = model.m, model.p, model.a
    if m == 0:
        return 0.0
    if p <= 0.0 or a <= m:
        return float(a)

    gap = (p * a + m) * BinomialUtils.binomCdf(a, p, m - 1) - m * BinomialUtils.binomCdf(a + 1, p, m)
    return (m * probDelivery(model) + gap) / p


def lemma1Gap(model: PascalModel) -> float:
    """
    f(M) = p E[T_M ^ A] - M P(T_M <= A), defined for 0 <= M <= A.

    Always >= 0, which is what makes p/M an upper bound on P(T <= A) / E[T ^ A]. f(0) = 0.
    """
    if model.m > model.a:
        raise ParameterError(f"lemma1Gap needs M <= A, got M={model.m}, A={model.a}")
    if model.m == 0:
        return 0.0
    return model.p * expectedAttemptsCapped(model) - model.m * probDelivery(model)


def lemma1Delta(model: PascalModel) -> float:
    """Delta(M) = f(M+1) - f(M), defined for 0 <= M <= A-1; equals M P(S_A = M)"""
    if model.m > model.a - 1:
        raise ParameterError(f"lemma1Delta needs M <= A-1, got M={model.m}, A={model.a}")
    following = PascalModel(m=model.m + 1, p=model.p, a=model.a)
    return lemma1Gap(following) - lemma1Gap(model)


def lemma1DeltaClosedForm(model: PascalModel) -> float:
    """M P(S_A = M)"""
    return model.m * BinomialUtils.binomPmf(model.a, model.p, model.m)


def bruteForceMoments(model: PascalModel) -> Dict[str, float]:
    """
    P(T <= A) and E[T ^ A] by enumerating all 2^A success/failure patterns.

    Exponential in A; an oracle for small budgets only.
    """
    m, p, a = model.m, model.p, model.a
    if a > 20:
        raise ParameterError(f"brute force enumeration is limited to A <= 20, got {a}")

    #row i is one pattern, column j says whether attempt j+1 succeeded
    bits = (np.arange(2**a)[:, None] >> np.arange(a)) & 1
    successes = bits.sum(axis=1)
    weights = p**successes * (1.0 - p) ** (a - successes)

    if m == 0:
        return {"probDelivery": 1.0, "expectedAttemptsCapped": 0.0}

    reached = np.cumsum(bits, axis=1) >= m
    delivered = reached[:, -1]
    finish = np.where(delivered, reached.argmax(axis=1) + 1, a)

    return {
        "probDelivery": math.fsum(weights[delivered].tolist()),
        "expectedAttemptsCapped": math.fsum((weights * finish).tolist()),
    }


def cappedMoments(model: PascalModel) -> Dict[str, float]:
    """
    Moments of X = 1{T <= A} and Y = T ^ A:
    probDelivery E[X], mean E[Y], secondMoment E[Y^2], crossMoment E[XY]
    """
    m, p, a = model.m, model.p, model.a
    outage = probOutage(model)

    #Edge Case: M = A leaves Y constant at A
    if m == a and m > 0:
        pDel = probDelivery(model)
        return {"probDelivery": pDel, "mean": float(a), "secondMoment": float(a * a), "crossMoment": a * pDel}

    if m == 0 or p <= 0.0 or a < m:
        head = np.zeros(0)
        ns = np.zeros(0)
    else:
        ns = np.arange(m, a + 1)
        head = PascalUtils.pmfTerms(m, p, ns)

    cross = math.fsum((ns * head).tolist())
    return {
        "probDelivery": probDelivery(model),
        "mean": expectedAttemptsCapped(model),
        "secondMoment": math.fsum((ns * ns * head).tolist()) + a * a * outage,
        "crossMoment": cross,
    }


def modelStdErrors(model: PascalModel, trials: int) -> Dict[str, float]:
    """
    Standard errors a trials-sample Monte Carlo estimate should show under the Pascal model,
    for P(T <= A), E[T ^ A] and their ratio (delta method).
    """
    moments = cappedMoments(model)
    pDel, mean = moments["probDelivery"], moments["mean"]
    varX = pDel * (1.0 - pDel)
    varY = max(0.0, moments["secondMoment"] - mean * mean)
    cov = moments["crossMoment"] - pDel * mean

    ratio = pDel / mean if mean > 0 else 0.0
    varRatio = max(0.0, varX + ratio * ratio * varY - 2.0 * ratio * cov)

    return {
        "probDelivery": math.sqrt(varX / trials),
        "expectedAttemptsCapped": math.sqrt(varY / trials),
        "objective": math.sqrt(varRatio / trials) / mean if mean > 0 else 0.0,
    }


def capacityFinite(params: NetworkParams, a: int) -> FiniteCapacityResult:
    """
    C(A): evaluate P(T(M) <= A) / E[T(M) ^ A] for every M in 1..A with p = p_s(M) and keep the
    best (ties to the smaller M).
    """
    if not (isinstance(a, (int, np.integer)) and a >= 1):
        raise ParameterError(f"attempt budget A >= 1 required, got {a!r}")

    rate = params.rateFactor()
    rows = []
    for m in range(1, a + 1):
        model = PascalModel(m=m, p=perHopSuccess(params, m), a=int(a))
        delivered = probDelivery(model)
        attempts = expectedAttemptsCapped(model)
        objective = delivered / attempts
        rows.append(
            {
                "M": m,
                "p_s": model.p,
                "prob_delivery": delivered,
                "expected_attempts_capped": attempts,
                "objective": objective,
                "capacity": rate * objective,
            }
        )

    table = pd.DataFrame(rows, columns=PER_M_COLUMNS)

    #idxmax returns the first maximum, i.e. the smallest M on ties
    best = int(table["objective"].idxmax())
    bestRow = table.iloc[best]
    logger.debug("C(A=%d) maximised at M=%d", a, int(bestRow["M"]))

    return FiniteCapacityResult(
        capacity=float(bestRow["capacity"]),
        mStar=int(bestRow["M"]),
        a=int(a),
        pOut=probOutage(PascalModel(m=int(bestRow["M"]), p=float(bestRow["p_s"]), a=int(a))),
        perMTable=table,
    )


def cubFinite(params: NetworkParams, a: int) -> float:
    """C^ub(A) = lambda log(1+beta) R max_{M in 1..A} p_s(M) / M"""
    rate = params.rateFactor()
    return max(rate * perHopSuccess(params, m) / m for m in range(1, a + 1))


def cubFiniteArgmax(params: NetworkParams, a: int) -> int:
    """Maximising M of p_s(M)/M over 1..A, ties to the smaller M"""
    values = [perHopSuccess(params, m) / m for m in range(1, a + 1)]
    return int(np.argmax(values)) + 1
