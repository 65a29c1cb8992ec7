import math

import pytest

from transport_capacity.analysis.analytic import scalingConstant
from transport_capacity.reports.figure_builder import FIGURE_IDS, FigureDatasetBuilder
from transport_capacity.utils.errors import ParameterError


@pytest.fixture
def builder(defaultParams):
    return FigureDatasetBuilder(defaultParams)


def test_budget_sweep_bound_holds(builder):
    table = builder.buildFigure(1).table
    assert list(table["A"]) == list(range(1, 51))
    assert (table["C_A"] <= table["cub_A"] * (1 + 1e-12)).all()


@pytest.mark.parametrize("figureId, a", [(2, 6), (3, 12)])
def test_hop_profiles(builder, figureId, a):
    table = builder.buildFigure(figureId).table
    assert list(table["M"]) == list(range(1, a + 1))
    assert (table["capacity_exact"] <= table["capacity_ub"] * (1 + 1e-12)).all()


def test_hop_counts_within_one_hop(builder):
    table = builder.buildFigure(4).table
    assert (table["difference"].abs() <= 1).all()


def test_hop_scaling_rows(builder):
    table = builder.buildFigure(5).table
    assert len(table) == 60 * 2 * 3
    assert set(table["alpha"]) == {3.0, 4.0}
    right = table[table["lambda"] == table["lambda"].max()]
    ratio = right["m_star_over_sqrt_lambda"] / right["asymptotic_slope"]
    assert (ratio - 1).abs().max() < 0.01


def test_upper_bound_profile(builder):
    table = builder.buildFigure(6).table
    assert len(table) == 40
    assert set(zip(table["lambda"], table["snr_db"])) == {(0.1, 10.0), (1.0, 30.0)}


def test_capacity_scaling_right_edge(builder):
    table = builder.buildFigure(7).table
    right = table[table["lambda"] == table["lambda"].max()]
    assert right["lambda"].iloc[0] == pytest.approx(1e3)
    for _, row in right.iterrows():
        assert row["cub_over_sqrt_lambda"] == pytest.approx(scalingConstant(row["alpha"], 3.0), rel=0.02)
        assert row["scaling_constant"] == pytest.approx(scalingConstant(row["alpha"], 3.0))


def test_profile_recorded(builder):
    dataset = builder.buildFigure(5)
    assert dataset.profile["figure"] == 5
    assert "density_sweep" in dataset.profile["profile"]
    assert dataset.profile["base"]["beta"] == 3.0


def test_unknown_figure(builder):
    assert FIGURE_IDS == (1, 2, 3, 4, 5, 6, 7)
    with pytest.raises(ParameterError):
        builder.buildFigure(8)
    assert not math.isnan(builder.buildFigure(1).table["relative_gap"].iloc[0])
