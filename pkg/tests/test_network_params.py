import math

import pytest

from transport_capacity.model.network_params import NetworkParams, RateLogBase, derive, kappaAlpha
from transport_capacity.utils.errors import DomainError, ParameterError


def test_kappa_alpha_known_values():
    assert kappaAlpha(4.0) == pytest.approx(math.pi**2 / 2.0, abs=1e-14)
    assert kappaAlpha(3.0) == pytest.approx(4.0 * math.sqrt(3.0) * math.pi**2 / 9.0, rel=1e-14)
    assert kappaAlpha(3.0) == pytest.approx(7.598, abs=0.05)


def test_kappa_alpha_diverges_near_two():
    assert kappaAlpha(2.0001) > 1e4
    with pytest.raises(DomainError):
        kappaAlpha(2.0)


def test_kappa_alpha_decreasing():
    alphas = [2.1 + 0.1 * i for i in range(60)]
    values = [kappaAlpha(a) for a in alphas]
    assert all(b < a for a, b in zip(values, values[1:]))


def test_derive_alpha4_example(alpha4Params):
    k = derive(alpha4Params)
    assert k.k1 == pytest.approx(0.3, rel=1e-14)
    assert k.k2 == pytest.approx(0.1 * math.sqrt(3.0) * math.pi**2 / 2.0, rel=1e-12)
    assert k.k2 == pytest.approx(0.8547328, abs=1e-6)
    assert k.snr == pytest.approx(10.0)


def test_derive_recomputes_from_fields(defaultParams):
    k = derive(defaultParams)
    p = defaultParams
    assert k.k1 == pytest.approx(p.beta * p.eta * p.R**p.alpha / p.rho, rel=1e-14)
    assert k.k2 == pytest.approx(p.lam * p.beta ** (2.0 / p.alpha) * kappaAlpha(p.alpha) * p.R**2, rel=1e-14)


def test_snr_from_noise():
    params = NetworkParams(lam=0.1, alpha=4.0, beta=3.0, R=1.0, rho=1.0, eta=0.01)
    assert params.snr == pytest.approx(100.0)
    assert params.snrDb == pytest.approx(20.0)


def test_zero_density_gives_zero_k2():
    params = NetworkParams(lam=0.0, alpha=3.0, beta=3.0, R=1.0, eta=0.1)
    assert derive(params).k2 == 0.0


def test_zero_noise_is_infinite_snr():
    params = NetworkParams.fromSnr(lam=0.1, alpha=3.0, beta=3.0, R=1.0, snr=math.inf)
    assert params.eta == 0.0
    assert math.isinf(params.snr)
    assert derive(params).k1 == 0.0


@pytest.mark.parametrize(
    "changes, message",
    [
        ({"alpha": 2.0}, "alpha > 2"),
        ({"lam": -1.0}, "lambda >= 0"),
        ({"beta": 0.0}, "beta > 0"),
        ({"R": 0.0}, "R > 0"),
        ({"rho": 0.0}, "rho > 0"),
        ({"eta": -0.1}, "eta >= 0"),
        ({"lam": 0.0, "eta": 0.0}, "eta = 0 and lambda = 0"),
    ],
)
def test_invalid_params_name_the_invariant(changes, message):
    fields = {"lam": 0.1, "alpha": 3.0, "beta": 3.0, "R": 1.0, "rho": 1.0, "eta": 0.1}
    fields.update(changes)
    with pytest.raises(ParameterError, match=message):
        NetworkParams(**fields)


def test_degenerate_allowed_for_simulation():
    params = NetworkParams(lam=0.0, alpha=3.0, beta=3.0, R=1.0, eta=0.0, allowDegenerate=True)
    assert params.eta == 0.0


def test_dict_round_trip_uses_external_names(defaultParams):
    data = defaultParams.toDict()
    assert list(data) == ["lambda", "alpha", "beta", "R", "rho", "eta", "rate_log_base"]
    assert NetworkParams.fromDict(data) == defaultParams


def test_from_dict_accepts_snr():
    params = NetworkParams.fromDict({"lambda": 0.1, "alpha": 4, "beta": 3, "R": 2, "snr": 10})
    assert params.snr == pytest.approx(10.0)
    assert params.eta == pytest.approx(2.0**-4 / 10.0)


def test_from_dict_missing_field():
    with pytest.raises(ParameterError, match="missing"):
        NetworkParams.fromDict({"lambda": 0.1, "alpha": 3})


def test_rate_factor_log_base(defaultParams):
    assert defaultParams.rateFactor() == pytest.approx(0.1 * math.log(4.0))
    base2 = defaultParams.replaced(rateLogBase=RateLogBase.BASE2)
    assert base2.rateFactor() == pytest.approx(0.1 * 2.0)


def test_rate_log_base_from_string():
    params = NetworkParams(lam=0.1, alpha=3.0, beta=3.0, R=1.0, rateLogBase="base2")
    assert params.rateLogBase is RateLogBase.BASE2
    with pytest.raises(ParameterError, match="rate_log_base"):
        NetworkParams(lam=0.1, alpha=3.0, beta=3.0, R=1.0, rateLogBase="base10")


def test_with_snr_keeps_rho(defaultParams):
    params = defaultParams.replaced(rho=2.0).withSnr(100.0)
    assert params.rho == 2.0
    assert params.snr == pytest.approx(100.0)


def test_mean_interferers_in_circle(defaultParams):
    assert defaultParams.meanInterferersInCircle() == pytest.approx(0.1 * math.pi / 4.0)
