import math

import pytest

from transport_capacity.analysis.root_utils import CubicUtils, HopEquationUtils, QuarticUtils


@pytest.mark.parametrize("alpha", [2.5, 3.0, 4.0, 6.0])
@pytest.mark.parametrize("k1, k2", [(0.3, 0.85), (3.0, 1e-4), (1e-4, 500.0), (10.0, 0.0)])
def test_numeric_root_solves_hop_equation(alpha, k1, k2):
    root = HopEquationUtils.numericRoot(alpha, k1, k2)
    assert root > 0
    assert abs(HopEquationUtils.residual(root, alpha, k1, k2)) <= 1e-9 * max(root**alpha, 1.0)


def test_bracket_high_is_positive_side():
    for alpha, k1, k2 in [(3.0, 0.3, 1.58), (4.0, 1e3, 1e-3), (5.0, 0.0, 1e4)]:
        high = HopEquationUtils.bracketHigh(alpha, k1, k2)
        assert HopEquationUtils.residual(high, alpha, k1, k2) > 0


def test_pure_interference_root():
    assert HopEquationUtils.numericRoot(3.0, 0.0, 8.0) == pytest.approx(4.0)


def test_first_order_condition_vanishes_at_root():
    root = HopEquationUtils.numericRoot(3.0, 0.3, 1.58)
    assert HopEquationUtils.firstOrderCondition(root, 3.0, 0.3, 1.58) == pytest.approx(0.0, abs=1e-9)


def test_cardano_root_single_real_regime():
    k1, k2 = 3.0, 0.1
    assert CubicUtils.discriminant(k1, k2) > 0
    root = CubicUtils.cardanoRoot(k1, k2)
    assert root**3 - 2 * k2 * root - 3 * k1 == pytest.approx(0.0, abs=1e-12)


def test_cardano_root_without_interference():
    assert CubicUtils.cardanoRoot(1.0, 0.0) == pytest.approx(3.0 ** (1.0 / 3.0))


def test_trig_roots_three_real_regime():
    k1, k2 = 0.3, 1.58
    assert CubicUtils.discriminant(k1, k2) < 0
    roots = CubicUtils.trigRoots(k1, k2)
    assert roots[0] > 0 >= roots[1] >= roots[2]
    for y in roots:
        assert y**3 - 2 * k2 * y - 3 * k1 == pytest.approx(0.0, abs=1e-12)


def test_trig_roots_reject_wrong_regime():
    with pytest.raises(ValueError):
        CubicUtils.trigRoots(3.0, 0.1)
    with pytest.raises(ValueError):
        CubicUtils.cardanoRoot(0.3, 1.58)


def test_quartic_positive_root():
    k1, k2 = 0.3, 0.1 * math.sqrt(3.0) * math.pi**2 / 2.0
    m = QuarticUtils.positiveRoot(k1, k2)
    assert m**4 - 2 * k2 * m**2 - 4 * k1 == pytest.approx(0.0, abs=1e-12)
    assert m == pytest.approx(math.sqrt(k2 + math.sqrt(k2**2 + 4 * k1)))
