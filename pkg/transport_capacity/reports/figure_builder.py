"""
Datasets behind the seven capacity figures (datasets only, no plotting).

Density and SNR are not fixed by the figure definitions, so every figure draws them from
FIGURE_PROFILE; the profile used is returned with the table and ends up in the CSV header.
"""

import logging
import math
from dataclasses import dataclass
from typing import Any, Callable, Dict

import numpy as np
import pandas as pd

from ..analysis.analytic import asymptoticHopSlope, cubAt, cubOptimal, perHopSuccess, scalingConstant
from ..analysis.finite import capacityFinite, cubFinite, cubFiniteArgmax
from ..model.network_params import NetworkParams
from ..utils.errors import ParameterError

logger = logging.getLogger(__name__)

FIGURE_IDS = tuple(range(1, 8))

FIGURE_PROFILE: Dict[str, Any] = {
    "budget_figures": {"lambda": 0.1, "snr": 10.0, "A_max": 50, "A_per_M": {"2": 6, "3": 12}},
    "density_sweep": {"lambda": {"lo": 1e-2, "hi": 1e3, "n": 60}, "alpha": [3.0, 4.0], "snr_db": [0.0, 10.0, 30.0]},
    "hop_sweep": {"settings": [{"lambda": 0.1, "snr_db": 10.0}, {"lambda": 1.0, "snr_db": 30.0}], "M_max": 20},
}


@dataclass(frozen=True)
class FigureDataset:
    figureId: int
    table: pd.DataFrame
    profile: Dict[str, Any]


class FigureDatasetBuilder:
    """
    Builds figure datasets around a base scenario.

    The base supplies beta, R, rho, alpha (figures 1-4 and 6) and the rate log base; density
    and SNR come from FIGURE_PROFILE.
    """

    def __init__(self, baseParams: NetworkParams):
        self.baseParams = baseParams
        self._builders: Dict[int, Callable[[], pd.DataFrame]] = {
            1: self.buildBudgetSweep,
            2: lambda: self.buildHopProfile(FIGURE_PROFILE["budget_figures"]["A_per_M"]["2"]),
            3: lambda: self.buildHopProfile(FIGURE_PROFILE["budget_figures"]["A_per_M"]["3"]),
            4: self.buildHopCountSweep,
            5: self.buildHopScaling,
            6: self.buildUpperBoundProfile,
            7: self.buildCapacityScaling,
        }

    def _budgetParams(self) -> NetworkParams:
        profile = FIGURE_PROFILE["budget_figures"]
        return self.baseParams.replaced(lam=profile["lambda"]).withSnr(profile["snr"])

    def _densities(self) -> np.ndarray:
        spec = FIGURE_PROFILE["density_sweep"]["lambda"]
        return np.logspace(math.log10(spec["lo"]), math.log10(spec["hi"]), spec["n"])

    def buildFigure(self, figureId: int) -> FigureDataset:
        if figureId not in self._builders:
            raise ParameterError(f"figure id must be one of {list(FIGURE_IDS)}, got {figureId!r}")

        table = self._builders[figureId]()
        logger.info(f"Built figure {figureId} dataset with {len(table)} rows")
        return FigureDataset(figureId=figureId, table=table, profile=self.profileFor(figureId))

    def profileFor(self, figureId: int) -> Dict[str, Any]:
        """Base scenario plus the profile section the figure draws from"""
        section = {1: "budget_figures", 2: "budget_figures", 3: "budget_figures", 4: "budget_figures",
                   5: "density_sweep", 6: "hop_sweep", 7: "density_sweep"}[figureId]
        return {"figure": figureId, "base": self.baseParams.toDict(), "profile": {section: FIGURE_PROFILE[section]}}

    def buildBudgetSweep(self) -> pd.DataFrame:
        """C(A) and C^ub(A) for A = 1..A_max"""
        params = self._budgetParams()
        rows = []
        for a in range(1, FIGURE_PROFILE["budget_figures"]["A_max"] + 1):
            exact = capacityFinite(params, a)
            bound = cubFinite(params, a)
            rows.append(
                {
                    "A": a,
                    "C_A": exact.capacity,
                    "cub_A": bound,
                    "relative_gap": (bound - exact.capacity) / bound,
                    "m_star_exact": exact.mStar,
                    "m_star_ub": cubFiniteArgmax(params, a),
                }
            )
        return pd.DataFrame(rows)

    def buildHopProfile(self, a: int) -> pd.DataFrame:
        """Exact capacity and the bound as functions of M at a fixed budget"""
        params = self._budgetParams()
        table = capacityFinite(params, a).perMTable
        rate = params.rateFactor()
        return pd.DataFrame(
            {
                "A": a,
                "M": table["M"],
                "capacity_exact": table["capacity"],
                "capacity_ub": [rate * perHopSuccess(params, m) / m for m in table["M"]],
            }
        )

    def buildHopCountSweep(self) -> pd.DataFrame:
        """Maximising M of the exact objective and of the bound, for A = 1..A_max"""
        params = self._budgetParams()
        rows = []
        for a in range(1, FIGURE_PROFILE["budget_figures"]["A_max"] + 1):
            exactM = capacityFinite(params, a).mStar
            boundM = cubFiniteArgmax(params, a)
            rows.append({"A": a, "m_star_exact": exactM, "m_star_ub": boundM, "difference": exactM - boundM})
        return pd.DataFrame(rows)

    def _densitySweep(self, rowFor: Callable[[NetworkParams], Dict[str, float]]) -> pd.DataFrame:
        spec = FIGURE_PROFILE["density_sweep"]
        rows = []
        for alpha in spec["alpha"]:
            for snrDb in spec["snr_db"]:
                for lam in self._densities():
                    params = self.baseParams.replaced(alpha=alpha, lam=float(lam)).withSnr(10.0 ** (snrDb / 10.0))
                    rows.append({"alpha": alpha, "snr_db": snrDb, "lambda": float(lam), **rowFor(params)})
        return pd.DataFrame(rows)

    def buildHopScaling(self) -> pd.DataFrame:
        """M* / sqrt(lambda) against lambda, with the large-lambda slope for reference"""

        def row(params: NetworkParams) -> Dict[str, float]:
            mStar = cubOptimal(params).mStar
            return {
                "m_star": mStar,
                "m_star_over_sqrt_lambda": mStar / math.sqrt(params.lam),
                "asymptotic_slope": asymptoticHopSlope(params),
            }

        return self._densitySweep(row)

    def buildUpperBoundProfile(self) -> pd.DataFrame:
        """C^ub as a function of M for the two hop-sweep settings"""
        spec = FIGURE_PROFILE["hop_sweep"]
        rows = []
        for setting in spec["settings"]:
            params = self.baseParams.replaced(lam=setting["lambda"]).withSnr(10.0 ** (setting["snr_db"] / 10.0))
            for m in range(1, spec["M_max"] + 1):
                rows.append(
                    {
                        "lambda": setting["lambda"],
                        "snr_db": setting["snr_db"],
                        "M": m,
                        "p_s": perHopSuccess(params, m),
                        "cub_at_M": cubAt(params, m),
                    }
                )
        return pd.DataFrame(rows)

    def buildCapacityScaling(self) -> pd.DataFrame:
        """C^ub / sqrt(lambda) against lambda, with the limiting constant for reference"""

        def row(params: NetworkParams) -> Dict[str, float]:
            capacity = cubOptimal(params).capacity
            return {
                "cub": capacity,
                "cub_over_sqrt_lambda": capacity / math.sqrt(params.lam),
                "scaling_constant": scalingConstant(params.alpha, params.beta, params.rateLogBase),
            }

        return self._densitySweep(row)
