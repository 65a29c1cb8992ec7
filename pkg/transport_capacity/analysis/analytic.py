"""
Closed-form capacity mathematics for equidistant multihop routes.

    p_s(M) = exp(-k1 M^-alpha - k2 M^-2)                      per-hop success, M equal hops
    C^ub   = lambda log(1 + beta) R max_M p_s(M) / M          upper bound (attempt budget relaxed)
    M*     = largest positive root of M^alpha - 2 k2 M^(alpha-2) - alpha k1 = 0

plus the optimal per-hop success probability, the alpha = 4 high-SNR limit and the
sqrt(lambda) scaling constant.

Why the hop count matters:
    Few long hops -> each hop is unreliable (low p_s), lots of retransmissions
    Many short hops -> each hop is reliable but every hop costs a transmission
    p_s(M) / M is unimodal in M, and M* is where the two effects balance.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional, Tuple

import numpy as np

from ..model.network_params import DerivedConstants, NetworkParams, derive, kappaAlpha
from ..model.network_params import RateLogBase
from ..utils.errors import ConsistencyError, DegenerateParametersError, DomainError
from .root_utils import CubicUtils, HopEquationUtils, QuarticUtils

logger = logging.getLogger(__name__)

#Closed forms and the bracketed numeric root must agree to this relative tolerance
ROOT_AGREEMENT_RTOL = 1e-9

#The two forms of the optimal success probability must agree to this
OPTIMAL_FORMS_TOLERANCE = 1e-10


class SolveMode(str, Enum):
    AUTO = "auto"
    FORCE_NUMERIC = "force_numeric"


class RootMethod(str, Enum):
    CARDANO = "closed_form_alpha3_cardano"
    TRIG = "closed_form_alpha3_trig"
    ALPHA4 = "closed_form_alpha4"
    NUMERIC = "numeric"


class CapacityMethod(str, Enum):
    UPPER_BOUND = "upper-bound"
    EXACT_FINITE = "exact-finite-A"
    SIMULATED = "simulated"


@dataclass(frozen=True)
class HopPlan:
    """A hop count with its hop distance, per-hop success and expected attempts per hop"""

    m: float
    hopDistance: float
    pSuccess: float
    expectedAttemptsPerHop: float


@dataclass(frozen=True)
class MStarSolution:
    """
    Optimal hop count.

    mStarContinuous is the positive root of the hop-count equation, mStarInteger the integer
    maximiser of p_s(M)/M. discriminant is only set for alpha = 3.
    """

    mStarContinuous: float
    mStarInteger: int
    method: RootMethod
    discriminant: Optional[float] = None
    numericRoot: Optional[float] = None


@dataclass(frozen=True)
class CapacityResult:
    """A capacity value with its method tag, the maximising M and supporting quantities"""

    capacity: float
    method: CapacityMethod
    mStar: float
    mStarInteger: int
    integerCapacity: float
    pSuccess: float
    supporting: Dict[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class OptimalSuccessCheck:
    """Interference and noise forms of p_s(M*), the substitution form and the direct evaluation"""

    interferenceForm: float
    noiseForm: float
    substitutionForm: float
    direct: float

    @property
    def worstResidual(self) -> float:
        forms = (self.interferenceForm, self.noiseForm, self.substitutionForm)
        return max(abs(f - self.direct) for f in forms)


def _successExponent(k: DerivedConstants, alpha: float, m: float) -> float:
    """-k1 m^-alpha - k2 m^-2, valid for any m > 0"""
    return -k.k1 * m ** (-alpha) - k.k2 * m ** (-2.0)


def _objective(k: DerivedConstants, alpha: float, m: float) -> float:
    """p_s(m) / m"""
    return math.exp(_successExponent(k, alpha, m)) / m


def _requireHopCount(m: float) -> None:
    if not m >= 1:
        raise DomainError(f"hop count m >= 1 required, got {m}")


def singleHopSuccess(params: NetworkParams) -> float:
    """
    Probability that a single transmission over the full distance R succeeds.

    exp(-beta eta / (rho R^-alpha) - lambda beta^(2/alpha) K_alpha R^2) = exp(-k1 - k2)
    """
    k = derive(params)
    return math.exp(-k.k1 - k.k2)


def perHopSuccess(params: NetworkParams, m: float) -> float:
    """
    Per-hop success probability when R is split into m equal hops.

    exp(-k1 m^-alpha - k2 m^-2); strictly increasing in m and tends to 1.
    """
    _requireHopCount(m)
    return math.exp(_successExponent(derive(params), params.alpha, m))


def hopPlan(params: NetworkParams, m: float) -> HopPlan:
    """HopPlan for m equal hops (m may be fractional in continuous mode)"""
    pSuccess = perHopSuccess(params, m)
    return HopPlan(
        m=m,
        hopDistance=params.R / m,
        pSuccess=pSuccess,
        expectedAttemptsPerHop=1.0 / pSuccess,
    )


def singleHopCapacity(params: NetworkParams) -> float:
    """Density of successful transmissions times rate times distance: p_s lambda log(1+beta) R"""
    return singleHopSuccess(params) * params.rateFactor()


def cubAt(params: NetworkParams, m: float) -> float:
    """Upper-bound capacity at a fixed hop count: lambda log(1+beta) R p_s(m) / m"""
    _requireHopCount(m)
    return params.rateFactor() * _objective(derive(params), params.alpha, m)


def _closedFormRoot(alpha: float, k: DerivedConstants) -> Tuple[Optional[float], RootMethod, Optional[float]]:
    """Closed-form root for alpha in {3, 4}, else (None, NUMERIC, None)"""
    if alpha == 3.0:
        d = CubicUtils.discriminant(k.k1, k.k2)
        if d >= 0:
            return CubicUtils.cardanoRoot(k.k1, k.k2), RootMethod.CARDANO, d
        return CubicUtils.trigRoots(k.k1, k.k2)[0], RootMethod.TRIG, d

    if alpha == 4.0:
        return QuarticUtils.positiveRoot(k.k1, k.k2), RootMethod.ALPHA4, None

    return None, RootMethod.NUMERIC, None


def _integerMaximiser(k: DerivedConstants, alpha: float, mStar: float, aCap: Optional[int]) -> int:
    """
    Integer argmax of p_s(M)/M over {1, ..., aCap} (unbounded when aCap is None).

    Unimodality means only 1, floor(M*) and ceil(M*) can win, and a cap below floor(M*)
    wins outright. Ties go to the smaller M.
    """
    candidates = {1, max(1, math.floor(mStar)), max(1, math.ceil(mStar))}
    if aCap is not None:
        candidates = {min(c, aCap) for c in candidates}

    best, bestValue = None, -math.inf
    for m in sorted(candidates):
        value = _objective(k, alpha, m)
        if value > bestValue:
            best, bestValue = m, value
    return best


def solveMStar(params: NetworkParams, mode: SolveMode = SolveMode.AUTO) -> MStarSolution:
    """
    Optimal continuous and integer hop counts.

    In auto mode alpha = 3 uses the Cardano form when the discriminant D >= 0 and the
    trigonometric form (largest of three real roots) when D < 0, alpha = 4 solves a quadratic
    in M^2, and every other alpha uses the bracketed numeric root. The numeric root is always
    computed too and the closed form must agree with it to ROOT_AGREEMENT_RTOL.
    """
    k = derive(params)
    alpha = params.alpha

    #Edge Case: nothing to balance, p_s(M)/M = 1/M peaks at M = 1
    if k.k1 == 0.0 and k.k2 == 0.0:
        raise DegenerateParametersError("k1 = k2 = 0: p_s(M)/M = 1/M is maximised at M = 1, no interior root")

    numeric = HopEquationUtils.numericRoot(alpha, k.k1, k.k2)
    discriminant = CubicUtils.discriminant(k.k1, k.k2) if alpha == 3.0 else None

    if SolveMode(mode) == SolveMode.FORCE_NUMERIC:
        root, method = numeric, RootMethod.NUMERIC
    else:
        closed, method, _ = _closedFormRoot(alpha, k)
        root = numeric if closed is None else closed

        if closed is not None and abs(closed - numeric) > ROOT_AGREEMENT_RTOL * numeric:
            raise ConsistencyError(
                f"{method.value} root {closed!r} disagrees with numeric root {numeric!r}"
            )

    logger.debug("M* = %.12g via %s (numeric %.12g)", root, method.value, numeric)

    return MStarSolution(
        mStarContinuous=root,
        mStarInteger=_integerMaximiser(k, alpha, root, None),
        method=method,
        discriminant=discriminant,
        numericRoot=numeric,
    )


def mStarInteger(params: NetworkParams, aCap: Optional[int] = None) -> int:
    """Integer M in {1, ..., aCap} (unbounded if None) maximising p_s(M)/M, ties to smaller M"""
    if aCap is not None and aCap < 1:
        raise DomainError(f"aCap >= 1 required, got {aCap}")
    solution = solveMStar(params)
    return _integerMaximiser(derive(params), params.alpha, solution.mStarContinuous, aCap)


def optimalSuccessCheck(params: NetworkParams, mStar: float) -> OptimalSuccessCheck:
    """
    All routes to p_s(M*).

    interferenceForm = exp{(2/alpha - 1) k2 M*^-2 - 1/alpha}    (noise term eliminated)
    noiseForm        = exp{(alpha/2 - 1) k1 M*^-alpha - 1/2}    (interference term eliminated)
    substitutionForm = p_s with k1 M^-alpha replaced by (1 - 2 k2 M^-2) / alpha
    direct           = exp(-k1 M*^-alpha - k2 M*^-2)
    """
    k = derive(params)
    alpha = params.alpha
    interferenceShare = k.k2 * mStar ** (-2.0)
    noiseShare = k.k1 * mStar ** (-alpha)

    interferenceForm = math.exp((2.0 / alpha - 1.0) * interferenceShare - 1.0 / alpha)
    noiseForm = math.exp((alpha / 2.0 - 1.0) * noiseShare - 0.5)
    substitutionForm = math.exp(-(1.0 - 2.0 * interferenceShare) / alpha - interferenceShare)
    direct = math.exp(_successExponent(k, alpha, mStar))

    return OptimalSuccessCheck(
        interferenceForm=interferenceForm,
        noiseForm=noiseForm,
        substitutionForm=substitutionForm,
        direct=direct,
    )


def optimalSuccessProbability(params: NetworkParams, mStar: float) -> Tuple[float, float]:
    """
    The optimal per-hop success probability in its interference form and its noise form.

    Both equal p_s(M*) when mStar solves the hop-count equation. Raises ConsistencyError when
    they differ by more than 1e-10, which means mStar is not a root.
    """
    check = optimalSuccessCheck(params, mStar)

    if abs(check.interferenceForm - check.noiseForm) > OPTIMAL_FORMS_TOLERANCE:
        raise ConsistencyError(
            f"optimal success forms disagree ({check.interferenceForm!r} vs {check.noiseForm!r}); "
            f"M* = {mStar!r} does not solve the hop-count equation"
        )

    if abs(check.interferenceForm - check.substitutionForm) > OPTIMAL_FORMS_TOLERANCE:
        #Substitution route is authoritative
        logger.info(
            "interference form %.12g differs from the substitution form %.12g",
            check.interferenceForm,
            check.substitutionForm,
        )
        return check.substitutionForm, check.noiseForm

    return check.interferenceForm, check.noiseForm


def cubOptimal(params: NetworkParams) -> CapacityResult:
    """
    Hop-optimised upper bound lambda log(1+beta) R p_s(M*) / M*.

    capacity uses the continuous M*, integerCapacity the integer one (never larger).
    """
    solution = solveMStar(params)
    k = derive(params)
    rate = params.rateFactor()
    mStar = solution.mStarContinuous
    pSuccess = math.exp(_successExponent(k, params.alpha, mStar))

    integerM = solution.mStarInteger
    integerP = math.exp(_successExponent(k, params.alpha, integerM))

    return CapacityResult(
        capacity=rate * pSuccess / mStar,
        method=CapacityMethod.UPPER_BOUND,
        mStar=mStar,
        mStarInteger=integerM,
        integerCapacity=rate * integerP / integerM,
        pSuccess=pSuccess,
        supporting={
            "k1": k.k1,
            "k2": k.k2,
            "expectedAttemptsPerHop": 1.0 / pSuccess,
            "expectedTotalAttempts": mStar / pSuccess,
            "integerPSuccess": integerP,
        },
    )


def highSnrLimitAlpha4(params: NetworkParams) -> float:
    """
    alpha = 4 closed form at high SNR:

        sqrt(lambda) log(1+beta) / (pi beta^(1/4)) * exp(-eta / (rho pi^4 lambda^2) - 1/2)

    This is p_s / M evaluated at the high-SNR hop count M = beta^(1/4) R pi sqrt(lambda).
    """
    if params.alpha != 4.0:
        raise DomainError(f"alpha = 4 required for the high-SNR limit, got {params.alpha}")

    #Edge Case: no transmitters, no capacity
    if params.lam == 0:
        return 0.0

    lam = params.lam
    prefactor = math.sqrt(lam) * params.logOnePlusBeta() / (math.pi * params.beta**0.25)
    return prefactor * math.exp(-params.eta / (params.rho * math.pi**4 * lam**2) - 0.5)


def scalingConstant(alpha: float, beta: float, rateLogBase: RateLogBase = RateLogBase.NATURAL) -> float:
    """
    lim_{lambda -> inf} C^ub / sqrt(lambda) = e^(-1/2) log(1+beta) / (sqrt(2 K_alpha) beta^(1/alpha))
    """
    if not beta > 0:
        raise DomainError(f"beta > 0 required, got {beta}")

    logTerm = math.log2(1.0 + beta) if RateLogBase(rateLogBase) == RateLogBase.BASE2 else math.log1p(beta)
    return math.exp(-0.5) * logTerm / (math.sqrt(2.0 * kappaAlpha(alpha)) * beta ** (1.0 / alpha))


def asymptoticHopSlope(params: NetworkParams) -> float:
    """M* / sqrt(lambda) as lambda -> inf: sqrt(2 K_alpha) beta^(1/alpha) R"""
    return math.sqrt(2.0 * kappaAlpha(params.alpha)) * params.beta ** (1.0 / params.alpha) * params.R


# --- alpha = 3 bookkeeping: shortcut forms, regime predictor, Vieta roots ---


def alpha3Roots(params: NetworkParams) -> Tuple[float, float, float]:
    """All three real roots of M^3 - 2 k2 M - 3 k1 (only defined when D < 0), largest first"""
    if params.alpha != 3.0:
        raise DomainError(f"alpha = 3 required, got {params.alpha}")
    k = derive(params)
    roots = CubicUtils.trigRoots(k.k1, k.k2)

    #Pairwise sum follows the linear coefficient -2 k2, not zero
    pairwise = roots[0] * roots[1] + roots[0] * roots[2] + roots[1] * roots[2]
    logger.debug("alpha=3 roots %s, pairwise sum %.12g vs -2 k2 = %.12g", roots, pairwise, -2.0 * k.k2)
    return roots


def alpha3RegimeFromDensity(params: NetworkParams) -> RootMethod:
    """
    Predict the alpha = 3 branch from the density threshold

        lambda <= (eta / rho)^(2/3) (3/2)^(5/3) / K_3   <=>   D >= 0

    (beta and R cancel out of the discriminant's sign).
    """
    if params.alpha != 3.0:
        raise DomainError(f"alpha = 3 required, got {params.alpha}")

    threshold = (params.eta / params.rho) ** (2.0 / 3.0) * 1.5 ** (5.0 / 3.0) / kappaAlpha(3.0)
    return RootMethod.CARDANO if params.lam <= threshold else RootMethod.TRIG


def alpha3ShortcutRoot(params: NetworkParams, corrected: bool = False) -> float:
    """
    alpha = 3 root from the parameter-level shortcut expressions (lambda, eta, rho instead of k1, k2).

    D >= 0: beta^(1/3) R [cbrt(3 eta/(2 rho) + f) + cbrt(3 eta/(2 rho) - f)],
            f = sqrt((3 eta / (2 rho))^2 - 8 K_3^3 lambda^3 / 27)
    D <  0: (2 sqrt(2 lambda K_3) / 3^(1/6)) beta^(1/3) R cos(arccos[3 sqrt(3) eta / (4 sqrt(2 rho) (lambda K_3)^(3/2))] / 3)

    corrected=True swaps the trigonometric prefactor divisor to sqrt(3) and the arccos argument
    to 9 sqrt(3) eta / (4 sqrt(2) rho (lambda K_3)^(3/2)), which is what the depressed-cubic
    derivation gives. Returns nan when the uncorrected arccos argument leaves [-1, 1].
    """
    if params.alpha != 3.0:
        raise DomainError(f"alpha = 3 required, got {params.alpha}")

    k3 = kappaAlpha(3.0)
    lam, eta, rho = params.lam, params.eta, params.rho
    scale = params.beta ** (1.0 / 3.0) * params.R
    k = derive(params)

    if CubicUtils.discriminant(k.k1, k.k2) >= 0:
        half = 1.5 * eta / rho
        f = math.sqrt(max(half**2 - 8.0 * k3**3 * lam**3 / 27.0, 0.0))
        return scale * float(np.cbrt(half + f) + np.cbrt(half - f))

    if corrected:
        prefactor = 2.0 * math.sqrt(2.0 * lam * k3) / math.sqrt(3.0)
        argument = 9.0 * math.sqrt(3.0) * eta / (4.0 * math.sqrt(2.0) * rho * (lam * k3) ** 1.5)
    else:
        prefactor = 2.0 * math.sqrt(2.0 * lam * k3) / 3.0 ** (1.0 / 6.0)
        argument = 3.0 * math.sqrt(3.0) * eta / (4.0 * math.sqrt(2.0 * rho) * (lam * k3) ** 1.5)

    if abs(argument) > 1.0:
        return math.nan
    return prefactor * scale * math.cos(math.acos(argument) / 3.0)


def compareAlpha3ShortcutForms(params: NetworkParams) -> Dict[str, object]:
    """
    Check the alpha = 3 shortcut expressions against the numeric root.

    Returns the numeric root, the shortcut and corrected values, their relative errors and which
    of them match to ROOT_AGREEMENT_RTOL.
    """
    solution = solveMStar(params, SolveMode.FORCE_NUMERIC)
    numeric = solution.mStarContinuous
    shortcut = alpha3ShortcutRoot(params, corrected=False)
    corrected = alpha3ShortcutRoot(params, corrected=True)

    def relErr(value: float) -> float:
        return abs(value - numeric) / numeric if math.isfinite(value) else math.inf

    result = {
        "regime": "cardano" if solution.discriminant >= 0 else "trig",
        "numericRoot": numeric,
        "shortcutRoot": shortcut,
        "correctedRoot": corrected,
        "shortcutRelError": relErr(shortcut),
        "correctedRelError": relErr(corrected),
        "shortcutMatches": relErr(shortcut) <= ROOT_AGREEMENT_RTOL,
        "correctedMatches": relErr(corrected) <= ROOT_AGREEMENT_RTOL,
    }

    if not result["shortcutMatches"]:
        logger.info(
            "shortcut alpha=3 %s form gives %.12g, numeric root is %.12g (corrected form %.12g)",
            result["regime"],
            shortcut,
            numeric,
            corrected,
        )
    return result
