import math

import numpy as np
import pytest

from transport_capacity.analysis.analytic import (
    CapacityMethod,
    RootMethod,
    SolveMode,
    alpha3RegimeFromDensity,
    alpha3Roots,
    asymptoticHopSlope,
    compareAlpha3ShortcutForms,
    cubAt,
    cubOptimal,
    highSnrLimitAlpha4,
    hopPlan,
    mStarInteger,
    optimalSuccessCheck,
    optimalSuccessProbability,
    perHopSuccess,
    scalingConstant,
    singleHopCapacity,
    singleHopSuccess,
    solveMStar,
)
from transport_capacity.analysis.root_utils import HopEquationUtils
from transport_capacity.model.network_params import NetworkParams, RateLogBase, derive
from transport_capacity.utils.errors import ConsistencyError, DegenerateParametersError, DomainError

DENSITIES = [float(x) for x in np.logspace(-3, 3, 7)]
SNRS = [1.0, 10.0, 100.0, math.inf]
BETAS = [1.0, 3.0, 10.0]
DISTANCES = [0.5, 1.0, 2.0]


def grid(alphas):
    for lam in DENSITIES:
        for snr in SNRS:
            for beta in BETAS:
                for R in DISTANCES:
                    for alpha in alphas:
                        yield NetworkParams.fromSnr(lam=lam, alpha=alpha, beta=beta, R=R, snr=snr)


def test_single_hop_success_alpha4(alpha4Params):
    k2 = 0.1 * math.sqrt(3.0) * math.pi**2 / 2.0
    assert singleHopSuccess(alpha4Params) == pytest.approx(math.exp(-0.3 - k2), rel=1e-12)
    assert singleHopSuccess(alpha4Params) == pytest.approx(0.3151, abs=1e-4)


def test_single_hop_without_interferers():
    params = NetworkParams.fromSnr(lam=0.0, alpha=3.0, beta=3.0, R=1.0, snr=10.0)
    assert singleHopSuccess(params) == pytest.approx(math.exp(-0.3))


def test_single_hop_capacity(alpha4Params):
    expected = singleHopSuccess(alpha4Params) * 0.1 * math.log(4.0)
    assert singleHopCapacity(alpha4Params) == pytest.approx(expected)


def test_per_hop_success_example(alpha4Params):
    assert perHopSuccess(alpha4Params, 2) == pytest.approx(0.7926, abs=1e-4)
    assert perHopSuccess(alpha4Params, 1) == pytest.approx(singleHopSuccess(alpha4Params))


def test_per_hop_success_increasing(defaultParams):
    values = [perHopSuccess(defaultParams, m) for m in range(1, 40)]
    assert all(b > a for a, b in zip(values, values[1:]))
    assert values[-1] < 1.0


def test_per_hop_success_domain(defaultParams):
    with pytest.raises(DomainError):
        perHopSuccess(defaultParams, 0.5)
    with pytest.raises(DomainError):
        cubAt(defaultParams, 0)


def test_hop_plan(defaultParams):
    plan = hopPlan(defaultParams, 4)
    assert plan.hopDistance == pytest.approx(0.25)
    assert plan.expectedAttemptsPerHop == pytest.approx(1.0 / plan.pSuccess)


def test_mstar_default_profile(defaultParams):
    solution = solveMStar(defaultParams)
    assert solution.mStarContinuous == pytest.approx(1.906, abs=1e-3)
    assert solution.method == RootMethod.TRIG
    assert solution.discriminant < 0
    assert solution.mStarInteger == 2


def test_mstar_alpha4_closed_form(alpha4Params):
    solution = solveMStar(alpha4Params)
    k = derive(alpha4Params)
    assert solution.method == RootMethod.ALPHA4
    assert solution.mStarContinuous == pytest.approx(math.sqrt(k.k2 + math.sqrt(k.k2**2 + 4 * k.k1)), rel=1e-12)


def test_mstar_other_alpha_is_numeric():
    params = NetworkParams.fromSnr(lam=0.1, alpha=3.5, beta=3.0, R=1.0, snr=10.0)
    assert solveMStar(params).method == RootMethod.NUMERIC


def test_mstar_degenerate():
    params = NetworkParams(lam=0.0, alpha=3.0, beta=3.0, R=1.0, eta=0.0, allowDegenerate=True)
    with pytest.raises(DegenerateParametersError):
        solveMStar(params)


def test_closed_form_matches_numeric_in_both_regimes():
    methods = set()
    for params in grid([3.0, 4.0]):
        closed = solveMStar(params)
        numeric = solveMStar(params, SolveMode.FORCE_NUMERIC)
        methods.add(closed.method)
        assert closed.mStarContinuous == pytest.approx(numeric.mStarContinuous, rel=1e-9)

        if params.alpha == 3.0:
            predicted = alpha3RegimeFromDensity(params)
            assert predicted == closed.method
    assert {RootMethod.CARDANO, RootMethod.TRIG, RootMethod.ALPHA4} <= methods


@pytest.mark.parametrize("alpha", [2.5, 3.0, 3.5, 4.0, 5.0, 6.0])
def test_root_residual_and_first_order_condition(alpha):
    for params in grid([alpha]):
        k = derive(params)
        m = solveMStar(params).mStarContinuous
        assert abs(HopEquationUtils.residual(m, alpha, k.k1, k.k2)) <= 1e-9 * max(m**alpha, 1.0)
        assert abs(HopEquationUtils.firstOrderCondition(m, alpha, k.k1, k.k2)) <= 1e-9


def test_optimal_success_forms_agree_on_grid():
    for params in grid([3.0, 4.0]):
        m = solveMStar(params).mStarContinuous
        check = optimalSuccessCheck(params, m)
        assert check.worstResidual <= 1e-10
        interferenceForm, noiseForm = optimalSuccessProbability(params, m)
        assert interferenceForm == pytest.approx(noiseForm, abs=1e-10)


def test_optimal_success_rejects_non_root(defaultParams):
    with pytest.raises(ConsistencyError):
        optimalSuccessProbability(defaultParams, 5.0)


def test_mstar_proportional_to_distance(defaultParams):
    base = solveMStar(defaultParams).mStarContinuous
    scaled = solveMStar(defaultParams.replaced(R=3.0)).mStarContinuous
    assert scaled == pytest.approx(3.0 * base, rel=1e-9)


def test_integer_mstar_is_argmax(defaultParams):
    best = mStarInteger(defaultParams)
    values = {m: cubAt(defaultParams, m) for m in range(1, 30)}
    assert best == max(values, key=values.get)
    assert mStarInteger(defaultParams, aCap=1) == 1


def test_cub_optimal_dominates_integer(defaultParams):
    result = cubOptimal(defaultParams)
    assert result.method == CapacityMethod.UPPER_BOUND
    assert result.integerCapacity <= result.capacity
    assert result.supporting["expectedTotalAttempts"] == pytest.approx(result.mStar / result.pSuccess)


@pytest.mark.parametrize("alpha", [3.0, 4.0])
def test_large_density_limits(alpha):
    lam = 1e3
    params = NetworkParams.fromSnr(lam=lam, alpha=alpha, beta=3.0, R=1.0, snr=10.0)
    result = cubOptimal(params)
    assert result.pSuccess == pytest.approx(math.exp(-0.5), rel=0.01)
    assert result.capacity / math.sqrt(lam) == pytest.approx(scalingConstant(alpha, 3.0), rel=0.02)
    assert result.mStar / math.sqrt(lam) == pytest.approx(asymptoticHopSlope(params), rel=0.01)


def test_scaling_constant_values():
    assert scalingConstant(4.0, 3.0) == pytest.approx(0.20337, abs=1e-5)
    assert scalingConstant(3.0, 3.0) < scalingConstant(4.0, 3.0)
    base2 = scalingConstant(4.0, 3.0, RateLogBase.BASE2)
    assert base2 == pytest.approx(scalingConstant(4.0, 3.0) / math.log(2.0))


def test_high_snr_limit_alpha4():
    params = NetworkParams.fromSnr(lam=10.0, alpha=4.0, beta=3.0, R=1.0, snr=1e6)
    expected = math.sqrt(10.0) * math.log(4.0) / (math.pi * 3.0**0.25) * math.exp(-params.eta / (math.pi**4 * 100.0) - 0.5)
    assert highSnrLimitAlpha4(params) == pytest.approx(expected)
    assert highSnrLimitAlpha4(params) == pytest.approx(cubOptimal(params).capacity, rel=1e-3)


def test_high_snr_limit_domain(defaultParams):
    with pytest.raises(DomainError):
        highSnrLimitAlpha4(defaultParams)


def test_alpha3_vieta(defaultParams):
    k = derive(defaultParams)
    y1, y2, y3 = alpha3Roots(defaultParams)
    assert y1 * y2 * y3 == pytest.approx(3 * k.k1, rel=1e-9)
    assert y1 * y2 + y1 * y3 + y2 * y3 == pytest.approx(-2 * k.k2, rel=1e-9)
    assert sum(1 for y in (y1, y2, y3) if y > 0) == 1
    assert y1 == pytest.approx(solveMStar(defaultParams).mStarContinuous, rel=1e-12)


def test_regime_threshold_density():
    threshold = (0.1) ** (2.0 / 3.0) * 1.5 ** (5.0 / 3.0) / (4.0 * math.sqrt(3.0) * math.pi**2 / 9.0)
    below = NetworkParams(lam=0.9 * threshold, alpha=3.0, beta=7.0, R=2.0, rho=1.0, eta=0.1)
    above = NetworkParams(lam=1.1 * threshold, alpha=3.0, beta=7.0, R=2.0, rho=1.0, eta=0.1)
    assert alpha3RegimeFromDensity(below) == RootMethod.CARDANO == solveMStar(below).method
    assert alpha3RegimeFromDensity(above) == RootMethod.TRIG == solveMStar(above).method


def test_shortcut_alpha3_forms_in_trig_regime(defaultParams):
    comparison = compareAlpha3ShortcutForms(defaultParams)
    assert comparison["regime"] == "trig"
    assert comparison["correctedMatches"]
    assert not comparison["shortcutMatches"]


def test_shortcut_alpha3_forms_in_cardano_regime():
    params = NetworkParams.fromSnr(lam=0.01, alpha=3.0, beta=3.0, R=1.0, snr=10.0)
    comparison = compareAlpha3ShortcutForms(params)
    assert comparison["regime"] == "cardano"
    assert comparison["shortcutMatches"]
