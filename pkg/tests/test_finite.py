import math

import pytest

from transport_capacity.analysis.analytic import CapacityMethod, perHopSuccess, singleHopCapacity
from transport_capacity.analysis.finite import (
    PER_M_COLUMNS,
    PascalModel,
    bruteForceMoments,
    cappedMoments,
    capacityFinite,
    cubFinite,
    cubFiniteArgmax,
    expectedAttemptsCapped,
    expectedAttemptsCappedRearranged,
    lemma1Delta,
    lemma1DeltaClosedForm,
    lemma1Gap,
    modelStdErrors,
    pascalPmf,
    probDelivery,
    probOutage,
)
from transport_capacity.utils.errors import ParameterError

GRID_PROBABILITIES = [round(0.05 * i, 2) for i in range(1, 20)]


def test_pascal_model_validation():
    with pytest.raises(ParameterError):
        PascalModel(m=-1, p=0.5, a=3)
    with pytest.raises(ParameterError):
        PascalModel(m=1, p=1.5, a=3)
    with pytest.raises(ParameterError):
        PascalModel(m=1, p=0.5, a=0)


def test_pascal_pmf_examples():
    assert pascalPmf(PascalModel(m=2, p=0.5, a=5), 3) == pytest.approx(0.25)
    assert pascalPmf(PascalModel(m=1, p=0.3, a=5), 4) == pytest.approx(0.7**3 * 0.3)
    assert pascalPmf(PascalModel(m=3, p=0.3, a=5), 2) == 0.0


def test_prob_delivery_examples():
    assert probDelivery(PascalModel(m=2, p=0.5, a=3)) == pytest.approx(0.5)
    assert probDelivery(PascalModel(m=4, p=0.7, a=4)) == pytest.approx(0.7**4)
    assert probDelivery(PascalModel(m=3, p=1.0, a=5)) == 1.0
    assert probDelivery(PascalModel(m=6, p=0.9, a=5)) == 0.0
    model = PascalModel(m=3, p=0.4, a=8)
    assert probDelivery(model) + probOutage(model) == pytest.approx(1.0, abs=1e-15)


def test_expected_attempts_examples():
    assert expectedAttemptsCapped(PascalModel(m=3, p=1.0, a=5)) == pytest.approx(3.0)
    assert expectedAttemptsCapped(PascalModel(m=2, p=0.5, a=2)) == pytest.approx(2.0)
    for a in (1, 4, 20):
        p = 0.35
        expected = (1 - (1 - p) ** a) / p
        assert expectedAttemptsCapped(PascalModel(m=1, p=p, a=a)) == pytest.approx(expected, rel=1e-13)


def test_expected_attempts_bounds():
    for a in range(1, 15):
        for m in range(1, a + 1):
            value = expectedAttemptsCapped(PascalModel(m=m, p=0.3, a=a))
            assert min(m, a) - 1e-12 <= value <= a + 1e-12


@pytest.mark.parametrize("p", GRID_PROBABILITIES)
def test_expected_attempts_routes_agree(p):
    for a in range(1, 31):
        for m in range(1, a + 1):
            model = PascalModel(m=m, p=p, a=a)
            direct = expectedAttemptsCapped(model)
            assert expectedAttemptsCappedRearranged(model) == pytest.approx(direct, abs=1e-12 * max(1.0, direct))


def test_lemma1_gap_examples():
    assert lemma1Gap(PascalModel(m=0, p=0.3, a=5)) == 0.0
    for a, p in [(1, 0.2), (7, 0.5), (30, 0.95)]:
        assert lemma1Gap(PascalModel(m=1, p=p, a=a)) == pytest.approx(0.0, abs=1e-13)
    #E[T ^ 3] = 2(1/4) + 3(1/4) + 3(1/2) = 2.75
    assert lemma1Gap(PascalModel(m=2, p=0.5, a=3)) == pytest.approx(0.5 * 2.75 - 2 * 0.5)
    with pytest.raises(ParameterError):
        lemma1Gap(PascalModel(m=4, p=0.5, a=3))


@pytest.mark.parametrize("p", GRID_PROBABILITIES)
def test_lemma1_exhaustive(p):
    for a in range(1, 31):
        gaps = [lemma1Gap(PascalModel(m=m, p=p, a=a)) for m in range(0, a + 1)]
        assert min(gaps) >= -1e-12
        for m in range(0, a):
            delta = gaps[m + 1] - gaps[m]
            assert delta == pytest.approx(lemma1DeltaClosedForm(PascalModel(m=m, p=p, a=a)), abs=1e-12)


def test_lemma1_delta_examples():
    assert lemma1Delta(PascalModel(m=2, p=0.5, a=4)) == pytest.approx(0.75, abs=1e-12)
    assert lemma1Delta(PascalModel(m=0, p=0.5, a=4)) == pytest.approx(0.0, abs=1e-15)
    assert lemma1DeltaClosedForm(PascalModel(m=2, p=0.999999, a=4)) < 1e-10
    with pytest.raises(ParameterError):
        lemma1Delta(PascalModel(m=4, p=0.5, a=4))


@pytest.mark.parametrize("a", range(1, 13))
def test_brute_force_oracle(a):
    for p in GRID_PROBABILITIES:
        for m in range(1, a + 1):
            model = PascalModel(m=m, p=p, a=a)
            oracle = bruteForceMoments(model)
            assert oracle["probDelivery"] == pytest.approx(probDelivery(model), abs=1e-12)
            assert oracle["expectedAttemptsCapped"] == pytest.approx(expectedAttemptsCapped(model), abs=1e-12)


def test_brute_force_limit():
    with pytest.raises(ParameterError):
        bruteForceMoments(PascalModel(m=1, p=0.5, a=21))


def test_capped_moments_consistent():
    model = PascalModel(m=2, p=0.5, a=3)
    moments = cappedMoments(model)
    assert moments["probDelivery"] == pytest.approx(0.5)
    assert moments["mean"] == pytest.approx(2.75)
    #T ^ 3 is 2 (1/4) or 3 (3/4)
    assert moments["secondMoment"] == pytest.approx(4 * 0.25 + 9 * 0.75)
    assert moments["crossMoment"] == pytest.approx(2 * 0.25 + 3 * 0.25)


def test_model_std_errors_shrink_with_trials():
    model = PascalModel(m=3, p=0.6, a=6)
    small = modelStdErrors(model, 100)
    large = modelStdErrors(model, 10000)
    for key in ("probDelivery", "expectedAttemptsCapped", "objective"):
        assert large[key] == pytest.approx(small[key] / 10.0)
        assert large[key] > 0


def test_route_as_long_as_budget_uses_every_attempt(defaultParams):
    model = PascalModel(m=6, p=perHopSuccess(defaultParams, 6), a=6)
    assert expectedAttemptsCapped(model) == 6.0
    assert expectedAttemptsCappedRearranged(model) == 6.0

    moments = cappedMoments(model)
    assert moments["secondMoment"] == 36.0
    assert moments["crossMoment"] == pytest.approx(6 * probDelivery(model))

    errors = modelStdErrors(model, 10)
    assert errors["expectedAttemptsCapped"] == 0.0
    assert errors["probDelivery"] > 0
    assert errors["objective"] > 0


def test_capacity_finite_single_attempt(defaultParams):
    result = capacityFinite(defaultParams, 1)
    assert result.method == CapacityMethod.EXACT_FINITE
    assert len(result.perMTable) == 1
    assert result.mStar == 1
    assert result.capacity == pytest.approx(singleHopCapacity(defaultParams))


def test_capacity_finite_table(defaultParams):
    result = capacityFinite(defaultParams, 6)
    table = result.perMTable
    assert list(table.columns) == PER_M_COLUMNS
    assert list(table["M"]) == [1, 2, 3, 4, 5, 6]
    assert table["p_s"].tolist() == pytest.approx([perHopSuccess(defaultParams, m) for m in range(1, 7)])
    best = table.loc[table["M"] == result.mStar].iloc[0]
    assert result.capacity == pytest.approx(best["capacity"])
    assert result.pOut == pytest.approx(1.0 - best["prob_delivery"])


def test_capacity_finite_validation(defaultParams):
    with pytest.raises(ParameterError):
        capacityFinite(defaultParams, 0)


def test_upper_bound_ordering_and_tightness(defaultParams):
    gaps = {}
    for a in range(1, 51):
        exact = capacityFinite(defaultParams, a).capacity
        bound = cubFinite(defaultParams, a)
        assert exact <= bound * (1 + 1e-12)
        gaps[a] = (bound - exact) / bound
    assert gaps[50] < max(gaps[a] for a in range(2, 21))


def test_hop_counts_within_one(defaultParams):
    for a in range(2, 31):
        assert abs(capacityFinite(defaultParams, a).mStar - cubFiniteArgmax(defaultParams, a)) <= 1


def test_large_budget_approaches_bound(defaultParams):
    a = 500
    exact = capacityFinite(defaultParams, a).capacity
    assert exact == pytest.approx(cubFinite(defaultParams, a), rel=1e-6)


def test_monotone_delivery():
    for a in range(1, 15):
        values = [probDelivery(PascalModel(m=m, p=0.4, a=a)) for m in range(1, a + 1)]
        assert all(later <= earlier + 1e-15 for earlier, later in zip(values, values[1:]))
    assert probDelivery(PascalModel(m=3, p=0.4, a=8)) <= probDelivery(PascalModel(m=3, p=0.4, a=9))
    assert probDelivery(PascalModel(m=3, p=0.4, a=8)) <= probDelivery(PascalModel(m=3, p=0.5, a=8))
    assert not math.isnan(probDelivery(PascalModel(m=3, p=0.0, a=8)))
