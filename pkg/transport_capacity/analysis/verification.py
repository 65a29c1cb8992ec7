"""
Exhaustive self-checks behind the verify command.

Finite grid (A <= 30, M <= A, p = 0.05 .. 0.95):
    gap f(M) >= 0, its increment Delta(M) = M P(S_A = M), the three binomial
    identities the proof relies on, agreement of the two E[T ^ A] routes, the brute-force
    oracle for A <= 12 and monotonicity of P(T <= A).

Analytic grid (lambda, SNR, beta, alpha, R):
    hop-count equation residual, closed form vs numeric root, both optimal-success forms,
    the first-order condition, Vieta relations for alpha = 3, the alpha = 3 regime predictor,
    proportionality of M* in R and the large-lambda scaling.

Every check keeps a count, its worst residual and the offending tuple.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional

import numpy as np
import pandas as pd

from ..model.network_params import NetworkParams, derive
from ..utils.errors import CapacityError, VerificationError
from .analytic import (
    RootMethod,
    SolveMode,
    alpha3RegimeFromDensity,
    alpha3Roots,
    asymptoticHopSlope,
    cubOptimal,
    optimalSuccessCheck,
    scalingConstant,
    solveMStar,
)
from .binomial_utils import BinomialUtils
from .finite import (
    PascalModel,
    bruteForceMoments,
    expectedAttemptsCapped,
    expectedAttemptsCappedRearranged,
    lemma1DeltaClosedForm,
    lemma1Gap,
    probDelivery,
)
from .root_utils import HopEquationUtils

logger = logging.getLogger(__name__)

IDENTITY_TOLERANCE = 1e-12
ROOT_TOLERANCE = 1e-9
FORMS_TOLERANCE = 1e-10

MAX_GRID_BUDGET = 30
BRUTE_FORCE_MAX_BUDGET = 12
GRID_PROBABILITIES = tuple(round(0.05 * i, 2) for i in range(1, 20))

GRID_DENSITIES = tuple(float(x) for x in np.logspace(-3, 3, 7))
GRID_SNRS = (1.0, 10.0, 100.0, math.inf)
GRID_BETAS = (1.0, 3.0, 10.0)
GRID_ALPHAS = (2.5, 3.0, 3.5, 4.0, 5.0, 6.0)
GRID_DISTANCES = (0.5, 1.0, 2.0)


@dataclass
class CheckResult:
    """
    One named check over a grid.

    residual semantics: the amount by which a point misses its target (0 when exact); a point
    fails when it exceeds tolerance.
    """

    name: str
    tolerance: float
    count: int = 0
    failures: int = 0
    worstResidual: float = 0.0
    offender: Optional[Dict[str, Any]] = None

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def record(self, residual: float, context: Dict[str, Any]) -> None:
        self.count += 1
        if math.isnan(residual):
            residual = math.inf

        failed = residual > self.tolerance
        if failed:
            self.failures += 1

        #Keep the worst point; a failing point always outranks a passing one
        if residual > self.worstResidual or (failed and self.offender is None):
            self.worstResidual = residual
            self.offender = dict(context)


@dataclass
class VerificationReport:
    checks: List[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def toFrame(self) -> pd.DataFrame:
        rows = [
            {
                "check": c.name,
                "count": c.count,
                "failures": c.failures,
                "worst_residual": c.worstResidual,
                "tolerance": c.tolerance,
                "passed": c.passed,
                "offender": "" if c.offender is None else _describe(c.offender),
            }
            for c in self.checks
        ]
        return pd.DataFrame(
            rows, columns=["check", "count", "failures", "worst_residual", "tolerance", "passed", "offender"]
        )

    def raiseOnFailure(self) -> None:
        failed = [c for c in self.checks if not c.passed]
        if not failed:
            return
        for c in failed:
            logger.error(
                "check %s failed at %d of %d points, worst residual %.3g at %s",
                c.name,
                c.failures,
                c.count,
                c.worstResidual,
                _describe(c.offender or {}),
            )
        summary = "; ".join(f"{c.name} at {_describe(c.offender or {})}" for c in failed)
        raise VerificationError(f"{len(failed)} check(s) failed: {summary}")


def _describe(context: Dict[str, Any]) -> str:
    return ", ".join(f"{k}={v:.6g}" if isinstance(v, float) else f"{k}={v}" for k, v in context.items())


def _relative(value: float, reference: float) -> float:
    return abs(value - reference) / max(1.0, abs(reference))


def verifyFiniteGrid(
    maxBudget: int = MAX_GRID_BUDGET,
    probabilities: Iterable[float] = GRID_PROBABILITIES,
    bruteForceMaxBudget: int = BRUTE_FORCE_MAX_BUDGET,
    perturbation: float = 0.0,
) -> List[CheckResult]:
    """
    Gap and binomial identity grid.

    perturbation shifts p on the reference side of every identity (a negative control: any
    non-zero value must make the grid fail).
    """
    probabilities = tuple(probabilities)

    gap = CheckResult("lemma1_gap_nonnegative", IDENTITY_TOLERANCE)
    delta = CheckResult("lemma1_delta_identity", IDENTITY_TOLERANCE)
    partialSum = CheckResult("binomial_partial_sum_identity", IDENTITY_TOLERANCE)
    recursion = CheckResult("binomial_recursion_identity", IDENTITY_TOLERANCE)
    ratio = CheckResult("binomial_ratio_identity", IDENTITY_TOLERANCE)
    routes = CheckResult("expected_attempts_route_agreement", IDENTITY_TOLERANCE)
    brute = CheckResult("brute_force_oracle", IDENTITY_TOLERANCE)
    monotone = CheckResult("delivery_monotonicity", IDENTITY_TOLERANCE)

    #delivery[(a, p)][m-1] = P(T_m <= a), for the monotonicity sweeps
    delivery: Dict[tuple, np.ndarray] = {}

    for a in range(1, maxBudget + 1):
        for p in probabilities:
            q = min(1.0, max(0.0, p + perturbation))
            gaps = [lemma1Gap(PascalModel(m=m, p=p, a=a)) for m in range(0, a + 1)]

            for m in range(0, a + 1):
                ctx = {"A": a, "M": m, "p": p}
                model = PascalModel(m=m, p=p, a=a)

                gap.record(max(0.0, -gaps[m]), ctx)

                if m <= a - 1:
                    closed = lemma1DeltaClosedForm(PascalModel(m=m, p=q, a=a))
                    delta.record(abs((gaps[m + 1] - gaps[m]) - closed), ctx)

                #p sum_{n=M}^{A} P(S_n = M) = P(S_(A+1) >= M+1)
                lhs = p * math.fsum(BinomialUtils.binomPmf(n, p, m) for n in range(m, a + 1))
                partialSum.record(abs(lhs - BinomialUtils.binomSf(a + 1, q, m + 1)), ctx)

                #P(S_A <= M-1) = (1-p) P(S_(A-1) <= M-1) + p P(S_(A-1) <= M-2)
                rhs = (1.0 - q) * BinomialUtils.binomCdf(a - 1, q, m - 1) + q * BinomialUtils.binomCdf(a - 1, q, m - 2)
                recursion.record(abs(BinomialUtils.binomCdf(a, p, m - 1) - rhs), ctx)

                #(1-p)(M+1) P(S_A = M+1) = p (A-M) P(S_A = M)
                lhs = (1.0 - p) * (m + 1) * BinomialUtils.binomPmf(a, p, m + 1)
                rhs = q * (a - m) * BinomialUtils.binomPmf(a, q, m)
                ratio.record(abs(lhs - rhs), ctx)

                if m >= 1:
                    direct = expectedAttemptsCapped(model)
                    rearranged = expectedAttemptsCappedRearranged(PascalModel(m=m, p=q, a=a))
                    routes.record(_relative(rearranged, direct), ctx)

                    if a <= bruteForceMaxBudget:
                        oracle = bruteForceMoments(PascalModel(m=m, p=q, a=a))
                        brute.record(
                            max(
                                abs(oracle["probDelivery"] - probDelivery(model)),
                                _relative(oracle["expectedAttemptsCapped"], direct),
                            ),
                            ctx,
                        )

            delivery[(a, p)] = np.array([probDelivery(PascalModel(m=m, p=p, a=a)) for m in range(1, a + 1)])

    #P(T <= A) nonincreasing in M, nondecreasing in A and in p
    for (a, p), values in delivery.items():
        for m in range(1, a):
            monotone.record(max(0.0, values[m] - values[m - 1]), {"A": a, "M": m + 1, "p": p, "axis": "M"})
        if a > 1:
            previous = delivery[(a - 1, p)]
            for m in range(1, a):
                monotone.record(max(0.0, previous[m - 1] - values[m - 1]), {"A": a, "M": m, "p": p, "axis": "A"})

    ordered = sorted(probabilities)
    for a in range(1, maxBudget + 1):
        for lower, upper in zip(ordered, ordered[1:]):
            for m in range(1, a + 1):
                drop = delivery[(a, lower)][m - 1] - delivery[(a, upper)][m - 1]
                monotone.record(max(0.0, drop), {"A": a, "M": m, "p": upper, "axis": "p"})

    return [gap, delta, partialSum, recursion, ratio, routes, brute, monotone]


def _analyticGrid() -> Iterable[NetworkParams]:
    for lam in GRID_DENSITIES:
        for snr in GRID_SNRS:
            for beta in GRID_BETAS:
                for alpha in GRID_ALPHAS:
                    for R in GRID_DISTANCES:
                        yield NetworkParams.fromSnr(lam=lam, alpha=alpha, beta=beta, R=R, snr=snr)


def _paramsContext(params: NetworkParams) -> Dict[str, Any]:
    return {
        "lambda": params.lam,
        "alpha": params.alpha,
        "beta": params.beta,
        "R": params.R,
        "snr": params.snr,
    }


def verifyAnalyticGrid(params: Optional[Iterable[NetworkParams]] = None) -> List[CheckResult]:
    """Property grid for the hop-count equation and the optimal-success forms"""
    residual = CheckResult("root_residual", ROOT_TOLERANCE)
    closedForm = CheckResult("closed_form_agreement", ROOT_TOLERANCE)
    forms = CheckResult("optimal_success_forms", FORMS_TOLERANCE)
    focCheck = CheckResult("first_order_condition", ROOT_TOLERANCE)
    vieta = CheckResult("alpha3_vieta", ROOT_TOLERANCE)
    regime = CheckResult("alpha3_regime_prediction", 0.0)
    proportional = CheckResult("hop_count_proportionality", ROOT_TOLERANCE)

    for p in params if params is not None else _analyticGrid():
        ctx = _paramsContext(p)
        k = derive(p)
        alpha = p.alpha

        numeric = solveMStar(p, SolveMode.FORCE_NUMERIC)
        mStar = numeric.mStarContinuous

        g = HopEquationUtils.residual(mStar, alpha, k.k1, k.k2)
        residual.record(abs(g) / max(mStar**alpha, 1.0), ctx)
        focCheck.record(abs(HopEquationUtils.firstOrderCondition(mStar, alpha, k.k1, k.k2)), ctx)
        forms.record(optimalSuccessCheck(p, mStar).worstResidual, ctx)

        doubled = solveMStar(p.replaced(R=2.0 * p.R), SolveMode.FORCE_NUMERIC).mStarContinuous
        proportional.record(abs(doubled - 2.0 * mStar) / (2.0 * mStar), ctx)

        if alpha in (3.0, 4.0):
            try:
                closed = solveMStar(p).mStarContinuous
                closedForm.record(abs(closed - mStar) / mStar, ctx)
            except CapacityError:
                closedForm.record(math.inf, ctx)

        if alpha == 3.0:
            actual = RootMethod.CARDANO if numeric.discriminant >= 0 else RootMethod.TRIG
            regime.record(0.0 if alpha3RegimeFromDensity(p) == actual else 1.0, ctx)

            if numeric.discriminant < 0:
                roots = alpha3Roots(p)
                product = roots[0] * roots[1] * roots[2]
                pairwise = roots[0] * roots[1] + roots[0] * roots[2] + roots[1] * roots[2]
                scale = max(abs(r) for r in roots)
                positives = sum(1 for r in roots if r > ROOT_TOLERANCE * scale)
                vieta.record(
                    max(
                        abs(product - 3.0 * k.k1) / max(1.0, scale**3),
                        abs(pairwise + 2.0 * k.k2) / max(1.0, scale**2),
                        0.0 if positives == 1 else 1.0,
                    ),
                    ctx,
                )

    return [residual, closedForm, forms, focCheck, vieta, regime, proportional]


def verifyScaling(lam: float = 1e3, snr: float = 10.0, beta: float = 3.0, R: float = 1.0) -> List[CheckResult]:
    """
    Large-density behaviour at alpha = 3 and 4: M*/sqrt(lambda) within 1% of its slope,
    p_s(M*) within 1% of e^(-1/2), C^ub/sqrt(lambda) within 2% of the scaling constant.
    """
    slope = CheckResult("hop_count_scaling", 0.01)
    success = CheckResult("optimal_success_limit", 0.01)
    capacity = CheckResult("capacity_scaling", 0.02)

    for alpha in (3.0, 4.0):
        p = NetworkParams.fromSnr(lam=lam, alpha=alpha, beta=beta, R=R, snr=snr)
        ctx = _paramsContext(p)
        result = cubOptimal(p)
        root = math.sqrt(lam)

        expectedSlope = asymptoticHopSlope(p)
        slope.record(abs(result.mStar / root - expectedSlope) / expectedSlope, ctx)
        success.record(abs(result.pSuccess - math.exp(-0.5)) / math.exp(-0.5), ctx)

        constant = scalingConstant(alpha, beta, p.rateLogBase)
        capacity.record(abs(result.capacity / root - constant) / constant, ctx)

    return [slope, success, capacity]


def runVerification(perturbation: float = 0.0, maxBudget: int = MAX_GRID_BUDGET) -> VerificationReport:
    """Run every grid and collect the results in one report"""
    report = VerificationReport()
    report.checks.extend(verifyFiniteGrid(maxBudget=maxBudget, perturbation=perturbation))
    report.checks.extend(verifyAnalyticGrid())
    report.checks.extend(verifyScaling())

    for c in report.checks:
        logger.info("%s: %d points, worst residual %.3g", c.name, c.count, c.worstResidual)
    return report
