"""
Builds the tables the CLI prints: one row per sweep point (or per hop count) with a fixed
column order per command, written as CSV with a '#' metadata line or as JSON.
"""

import json
import logging
import math
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from ..analysis.analytic import (
    alpha3RegimeFromDensity,
    compareAlpha3ShortcutForms,
    cubOptimal,
    highSnrLimitAlpha4,
    optimalSuccessProbability,
    perHopSuccess,
    scalingConstant,
    solveMStar,
)
from ..analysis.finite import PER_M_COLUMNS, PascalModel, capacityFinite, cubFinite, cubFiniteArgmax, modelStdErrors
from ..model.network_params import NetworkParams, derive
from ..simulation.montecarlo import SimConfig, estimateCapacityFinite, simEstimatesToFrame
from ..utils.errors import ParameterError
from ..utils.helpers import CSV_FLOAT_FORMAT, jsonSafe

logger = logging.getLogger(__name__)

SWEEP_VARIABLES = ("lambda", "alpha", "beta", "R", "rho", "eta", "snr", "snrDb", "A")

#Simulated and exact values must agree within this many standard errors
AGREEMENT_SIGMAS = 3.0

#Absolute slack so zero-variance rows (M = A) cannot fail on rounding
AGREEMENT_ATOL = 1e-9

PARAM_COLUMNS = ["lambda", "alpha", "beta", "R", "rho", "eta", "snr", "snr_db"]

ANALYTIC_COLUMNS = PARAM_COLUMNS + [
    "k_alpha",
    "k1",
    "k2",
    "m_star",
    "m_star_integer",
    "m_star_method",
    "discriminant",
    "p_s_opt_interference_form",
    "p_s_opt_noise_form",
    "cub",
    "cub_integer",
    "expected_attempts_per_hop",
    "expected_total_attempts",
    "mean_interferers",
    "scaling_constant",
    "high_snr_limit",
    "alpha3_regime_predicted",
    "alpha3_shortcut_root",
    "alpha3_corrected_root",
]

EXACT_SUMMARY_COLUMNS = ["A", "C_A", "m_star", "p_out", "cub_A", "m_star_ub"]

SIMULATE_COLUMNS = [
    "M",
    "p_s",
    "sim_p_s",
    "prob_delivery",
    "sim_prob_delivery",
    "sim_prob_delivery_se",
    "model_prob_delivery_se",
    "expected_attempts_capped",
    "sim_expected_attempts_capped",
    "sim_expected_attempts_capped_se",
    "model_expected_attempts_capped_se",
    "objective",
    "sim_objective",
    "sim_objective_se",
    "model_objective_se",
    "agree",
    "trials",
    "seed",
]


class Command(str, Enum):
    ANALYTIC = "analytic"
    EXACT = "exact"
    SIMULATE = "simulate"
    FIGURE = "figure"
    VERIFY = "verify"


class OutputFormat(str, Enum):
    CSV = "csv"
    JSON = "json"


@dataclass(frozen=True)
class SweepAxis:
    """A swept variable, its values in sweep order and the descriptor they came from"""

    variable: str
    values: Tuple[float, ...]
    descriptor: str

    def toDict(self) -> Dict[str, Any]:
        return {"variable": self.variable, "descriptor": self.descriptor, "count": len(self.values)}


@dataclass(frozen=True)
class RunSpec:
    """
    Everything one CLI invocation computes from.

    holdSnr - when alpha, R or rho are swept, keep the end-to-end SNR fixed (True) or the
    noise power eta fixed (False). True whenever SNR was how the scenario was given.
    """

    command: Command
    params: NetworkParams
    sweep: Optional[SweepAxis] = None
    outputPath: Optional[str] = None
    outputFormat: OutputFormat = OutputFormat.CSV
    sim: Optional[SimConfig] = None
    a: Optional[int] = None
    m: Optional[int] = None
    figure: Optional[int] = None
    holdSnr: bool = True
    extra: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.sweep is not None and self.sweep.variable not in SWEEP_VARIABLES:
            raise ParameterError(f"sweep variable must be one of {list(SWEEP_VARIABLES)}, got {self.sweep.variable!r}")

    def toDict(self) -> Dict[str, Any]:
        data = {
            "command": self.command.value,
            "params": self.params.toDict(),
            "snr": self.params.snr,
            "hold_snr": self.holdSnr,
            "sweep": None if self.sweep is None else self.sweep.toDict(),
            "output_format": self.outputFormat.value,
            "sim": None if self.sim is None else self.sim.toDict(),
            "A": self.a,
            "M": self.m,
            "figure": self.figure,
        }
        data.update(self.extra)
        return data


# --- sweep grammar ---

_SWEEP_PATTERN = re.compile(r"^\s*([A-Za-z]+)\s*=\s*(.+?)\s*$")
_CALL_PATTERN = re.compile(r"^(logrange|linrange|range)\((.*)\)$")


def _parseNumbers(text: str, descriptor: str) -> List[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip() != ""]
    except ValueError as e:
        raise ParameterError(f"sweep values in {descriptor!r} must be numbers") from e


def parseSweep(descriptor: str) -> SweepAxis:
    """
    Parse <var>=<spec> where spec is logrange(lo,hi,n), linrange(lo,hi,n),
    range(lo,hi[,step]) (inclusive integers) or a comma-separated list.
    """
    match = _SWEEP_PATTERN.match(descriptor or "")
    if not match:
        raise ParameterError(f"sweep must look like <var>=<spec>, got {descriptor!r}")

    variable, spec = match.group(1), match.group(2).replace(" ", "")
    if variable not in SWEEP_VARIABLES:
        raise ParameterError(f"sweep variable must be one of {list(SWEEP_VARIABLES)}, got {variable!r}")

    call = _CALL_PATTERN.match(spec)
    if call is None:
        values = _parseNumbers(spec, descriptor)
    else:
        kind, args = call.group(1), _parseNumbers(call.group(2), descriptor)

        if kind == "range":
            if len(args) not in (2, 3) or any(v != int(v) for v in args):
                raise ParameterError(f"range needs 2 or 3 integer arguments, got {descriptor!r}")
            lo, hi = int(args[0]), int(args[1])
            step = int(args[2]) if len(args) == 3 else 1
            if step < 1 or hi < lo:
                raise ParameterError(f"range needs lo <= hi and step >= 1, got {descriptor!r}")
            values = [float(v) for v in range(lo, hi + 1, step)]
        else:
            if len(args) != 3 or args[2] != int(args[2]) or args[2] < 1:
                raise ParameterError(f"{kind} needs (lo, hi, n) with integer n >= 1, got {descriptor!r}")
            lo, hi, n = args[0], args[1], int(args[2])
            if kind == "logrange":
                if not (lo > 0 and hi > 0):
                    raise ParameterError(f"logrange bounds must be positive, got {descriptor!r}")
                values = np.logspace(math.log10(lo), math.log10(hi), n).tolist()
            else:
                values = np.linspace(lo, hi, n).tolist()

    if not values:
        raise ParameterError(f"sweep {descriptor!r} has no values")
    if variable == "A" and any(v != int(v) or v < 1 for v in values):
        raise ParameterError(f"A sweep values must be positive integers, got {descriptor!r}")

    return SweepAxis(variable=variable, values=tuple(values), descriptor=descriptor)


def applySweepValue(
    params: NetworkParams, a: Optional[int], variable: str, value: float, holdSnr: bool = True
) -> Tuple[NetworkParams, Optional[int]]:
    """Scenario and attempt budget at one sweep point"""
    if variable == "A":
        return params, int(value)
    if variable == "lambda":
        return params.replaced(lam=value), a
    if variable == "eta":
        return params.replaced(eta=value), a
    if variable == "snr":
        return params.withSnr(value), a
    if variable == "snrDb":
        return params.withSnr(10.0 ** (value / 10.0)), a

    fieldName = {"alpha": "alpha", "beta": "beta", "R": "R", "rho": "rho"}[variable]
    updated = params.replaced(**{fieldName: value})
    if holdSnr and fieldName != "beta":
        updated = updated.withSnr(params.snr)
    return updated, a


def _paramColumns(params: NetworkParams) -> Dict[str, Any]:
    return {
        "lambda": params.lam,
        "alpha": params.alpha,
        "beta": params.beta,
        "R": params.R,
        "rho": params.rho,
        "eta": params.eta,
        "snr": params.snr,
        "snr_db": params.snrDb,
    }


class ReportBuilder:
    """
    Builds the output table for one RunSpec.
    """

    def __init__(self, spec: RunSpec):
        self.spec = spec

    def _points(self) -> List[Tuple[Optional[float], NetworkParams, Optional[int]]]:
        spec = self.spec
        if spec.sweep is None:
            return [(None, spec.params, spec.a)]
        return [
            (value, *applySweepValue(spec.params, spec.a, spec.sweep.variable, value, spec.holdSnr))
            for value in spec.sweep.values
        ]

    def analyticRow(self, params: NetworkParams) -> Dict[str, Any]:
        """K_alpha, k1, k2, M*, both optimal-success forms, C^ub, scaling constant, alpha = 4 limit"""
        k = derive(params)
        solution = solveMStar(params)
        result = cubOptimal(params)
        interferenceForm, noiseForm = optimalSuccessProbability(params, solution.mStarContinuous)

        row = _paramColumns(params)
        row.update(
            {
                "k_alpha": k.kAlpha,
                "k1": k.k1,
                "k2": k.k2,
                "m_star": solution.mStarContinuous,
                "m_star_integer": solution.mStarInteger,
                "m_star_method": solution.method.value,
                "discriminant": math.nan if solution.discriminant is None else solution.discriminant,
                "p_s_opt_interference_form": interferenceForm,
                "p_s_opt_noise_form": noiseForm,
                "cub": result.capacity,
                "cub_integer": result.integerCapacity,
                "expected_attempts_per_hop": result.supporting["expectedAttemptsPerHop"],
                "expected_total_attempts": result.supporting["expectedTotalAttempts"],
                "mean_interferers": params.meanInterferersInCircle(),
                "scaling_constant": scalingConstant(params.alpha, params.beta, params.rateLogBase),
                "high_snr_limit": highSnrLimitAlpha4(params) if params.alpha == 4.0 else math.nan,
                "alpha3_regime_predicted": "",
                "alpha3_shortcut_root": math.nan,
                "alpha3_corrected_root": math.nan,
            }
        )

        if params.alpha == 3.0:
            comparison = compareAlpha3ShortcutForms(params)
            row["alpha3_regime_predicted"] = alpha3RegimeFromDensity(params).value
            row["alpha3_shortcut_root"] = comparison["shortcutRoot"]
            row["alpha3_corrected_root"] = comparison["correctedRoot"]
            logger.debug("alpha=3 shortcut-form comparison: %s", comparison)

        return row

    def buildAnalytic(self) -> pd.DataFrame:
        rows = []
        for value, params, _ in self._points():
            row = self.analyticRow(params)
            if value is not None:
                row = {"sweep_value": value, **row}
            rows.append(row)

        columns = (["sweep_value"] if self.spec.sweep is not None else []) + ANALYTIC_COLUMNS
        logger.info(f"Built analytic report with {len(rows)} rows")
        return pd.DataFrame(rows, columns=columns)

    def exactSummary(self, params: NetworkParams, a: int) -> Dict[str, Any]:
        result = capacityFinite(params, a)
        return {
            "A": a,
            "C_A": result.capacity,
            "m_star": result.mStar,
            "p_out": result.pOut,
            "cub_A": cubFinite(params, a),
            "m_star_ub": cubFiniteArgmax(params, a),
        }

    def buildExact(self) -> pd.DataFrame:
        """
        Without a sweep: the per-M table with the summary columns repeated on every row.
        With a sweep: one summary row per sweep point.
        """
        spec = self.spec

        if spec.sweep is None:
            a = self._requireBudget(spec.a)
            result = capacityFinite(spec.params, a)
            table = result.perMTable.copy()
            table["cub_at_M"] = [spec.params.rateFactor() * perHopSuccess(spec.params, m) / m for m in table["M"]]
            summary = self.exactSummary(spec.params, a)
            for column in EXACT_SUMMARY_COLUMNS:
                table[column] = summary[column]
            logger.info(f"Built exact per-M table for A={a}")
            return table[PER_M_COLUMNS + ["cub_at_M"] + EXACT_SUMMARY_COLUMNS]

        rows = []
        for value, params, a in self._points():
            a = self._requireBudget(a)
            rows.append({"sweep_value": value, **_paramColumns(params), **self.exactSummary(params, a)})

        logger.info(f"Built exact sweep with {len(rows)} rows")
        return pd.DataFrame(rows, columns=["sweep_value"] + PARAM_COLUMNS + EXACT_SUMMARY_COLUMNS)

    def simulateRows(self, params: NetworkParams, a: int, sim: SimConfig) -> pd.DataFrame:
        """
        Empirical per-M table next to the exact columns.

        A row agrees when P(T <= A), E[T ^ A] and the objective are each within
        AGREEMENT_SIGMAS * max(empirical SE, model SE) + AGREEMENT_ATOL of the exact value.
        """
        exact = capacityFinite(params, a).perMTable
        estimates, _ = estimateCapacityFinite(params, a, sim)
        empirical = simEstimatesToFrame(estimates)

        rows = []
        for (_, ex), (_, em) in zip(exact.iterrows(), empirical.iterrows()):
            m = int(ex["M"])
            modelSe = modelStdErrors(PascalModel(m=m, p=float(ex["p_s"]), a=a), int(sim.trials))

            agree = True
            for column, key in (
                ("prob_delivery", "probDelivery"),
                ("expected_attempts_capped", "expectedAttemptsCapped"),
                ("objective", "objective"),
            ):
                sigma = max(float(em[f"sim_{column}_se"]), modelSe[key])
                if abs(float(em[f"sim_{column}"]) - float(ex[column])) > AGREEMENT_SIGMAS * sigma + AGREEMENT_ATOL:
                    agree = False

            rows.append(
                {
                    "M": m,
                    "p_s": ex["p_s"],
                    "sim_p_s": em["sim_p_s"],
                    "prob_delivery": ex["prob_delivery"],
                    "sim_prob_delivery": em["sim_prob_delivery"],
                    "sim_prob_delivery_se": em["sim_prob_delivery_se"],
                    "model_prob_delivery_se": modelSe["probDelivery"],
                    "expected_attempts_capped": ex["expected_attempts_capped"],
                    "sim_expected_attempts_capped": em["sim_expected_attempts_capped"],
                    "sim_expected_attempts_capped_se": em["sim_expected_attempts_capped_se"],
                    "model_expected_attempts_capped_se": modelSe["expectedAttemptsCapped"],
                    "objective": ex["objective"],
                    "sim_objective": em["sim_objective"],
                    "sim_objective_se": em["sim_objective_se"],
                    "model_objective_se": modelSe["objective"],
                    "agree": agree,
                    "trials": int(sim.trials),
                    "seed": int(sim.seed),
                }
            )
            if not agree:
                logger.warning(f"simulation disagrees with the exact model at M={m}, A={a}")

        return pd.DataFrame(rows, columns=SIMULATE_COLUMNS)

    def buildSimulate(self) -> pd.DataFrame:
        spec = self.spec
        sim = spec.sim or SimConfig(trials=10000)

        frames = []
        for value, params, a in self._points():
            a = self._requireBudget(a)
            frame = self.simulateRows(params, a, sim)
            if value is not None:
                frame.insert(0, "A", a)
                frame.insert(0, "sweep_value", value)
            frames.append(frame)

        logger.info(f"Built simulation report over {len(frames)} sweep point(s)")
        return pd.concat(frames, ignore_index=True)

    @staticmethod
    def _requireBudget(a: Optional[int]) -> int:
        if a is None or a < 1:
            raise ParameterError(f"attempt budget A >= 1 required, got {a!r}")
        return int(a)


def renderTable(df: pd.DataFrame, spec: RunSpec) -> str:
    """
    CSV: one '#' line with the JSON RunSpec, then the header row and data rows, floats with 12
    significant digits. JSON: {"run": ..., "rows": [...]} with full-precision numbers.
    """
    run = jsonSafe(spec.toDict())

    if spec.outputFormat == OutputFormat.JSON:
        records = jsonSafe(df.to_dict(orient="records"))
        return json.dumps({"run": run, "rows": records}, indent=2, sort_keys=False) + "\n"

    metadata = "# " + json.dumps(run, sort_keys=True)
    body = df.to_csv(index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")
    return metadata + "\n" + body
