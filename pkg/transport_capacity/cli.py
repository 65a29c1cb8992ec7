"""
Command-line front end.

    python -m transport_capacity analytic  [params] [--M m] [--sweep var=spec]
    python -m transport_capacity exact     [params] --A a [--M m] [--sweep var=spec]
    python -m transport_capacity simulate  [params] --A a [--trials n] [--seed s] [--n-jobs j]
    python -m transport_capacity figure    [params] --figure 1..7
    python -m transport_capacity verify    [--perturb-p dp]

Exit codes: 0 success, 2 usage or parameter error, 3 verification / agreement failure.
"""

import logging
import math
from contextlib import contextmanager
from dataclasses import replace
from typing import Any, Dict, Optional, Tuple

import click
import pandas as pd

from .analysis.analytic import hopPlan
from .analysis.verification import MAX_GRID_BUDGET, runVerification
from .model.network_params import NetworkParams
from .reports.figure_builder import FigureDatasetBuilder
from .reports.report_builder import (
    Command,
    OutputFormat,
    ReportBuilder,
    RunSpec,
    applySweepValue,
    parseSweep,
    renderTable,
)
from .simulation.montecarlo import SimConfig
from .utils.errors import CapacityError, DegenerateParametersError, ParameterError, VerificationError
from .utils.helpers import configureLogging, getOutputDirectory, loadParamsConfig

logger = logging.getLogger(__name__)

#Scenario used for anything not given by flags or a config file
DEFAULT_PROFILE: Dict[str, Any] = {
    "lambda": 0.1,
    "alpha": 3.0,
    "beta": 3.0,
    "R": 1.0,
    "rho": 1.0,
    "snr": 10.0,
    "rate_log_base": "natural",
}


class UsageFailure(click.ClickException):
    exit_code = 2


class CheckFailure(click.ClickException):
    exit_code = 3


@contextmanager
def _exitCodes():
    """Map toolkit errors onto the CLI exit codes"""
    try:
        yield
    except (ParameterError, DegenerateParametersError, FileNotFoundError) as e:
        raise UsageFailure(str(e)) from e
    except VerificationError as e:
        raise CheckFailure(str(e)) from e
    except CapacityError as e:
        raise CheckFailure(str(e)) from e


def resolveParams(
    configPath: Optional[str],
    flags: Dict[str, Optional[float]],
    eta: Optional[float],
    snr: Optional[float],
    snrDb: Optional[float],
    logBase: Optional[str],
) -> Tuple[NetworkParams, bool]:
    """
    Scenario from defaults, then the config file, then flags.

    Returns the params and whether SNR (rather than eta) describes the noise, which decides
    what a sweep over alpha, R or rho holds fixed.
    """
    given = [name for name, value in (("--eta", eta), ("--snr", snr), ("--snr-db", snrDb)) if value is not None]
    if len(given) > 1:
        raise ParameterError(f"{', '.join(given)} are mutually exclusive")

    fileData = loadParamsConfig(configPath) if configPath else {}
    merged: Dict[str, Any] = {k: v for k, v in DEFAULT_PROFILE.items() if k != "snr"}
    merged.update({k: v for k, v in fileData.items() if k not in ("eta", "snr")})
    merged.update({k: v for k, v in flags.items() if v is not None})
    if logBase is not None:
        merged["rate_log_base"] = logBase

    if given:
        if eta is not None:
            merged["eta"] = eta
        else:
            merged["snr"] = snr if snr is not None else 10.0 ** (snrDb / 10.0)
    elif "eta" in fileData:
        merged["eta"] = fileData["eta"]
    else:
        merged["snr"] = fileData.get("snr", DEFAULT_PROFILE["snr"])

    holdSnr = "eta" not in merged
    return NetworkParams.fromDict(merged), holdSnr


def _paramOptions(f):
    options = [
        click.option("--lambda", "lam", type=float, default=None, help="Interferer density (per unit area)."),
        click.option("--alpha", type=float, default=None, help="Path loss exponent, > 2."),
        click.option("--beta", type=float, default=None, help="SINR threshold (linear)."),
        click.option("--R", "distance", type=float, default=None, help="Source to destination distance."),
        click.option("--rho", type=float, default=None, help="Transmit power."),
        click.option("--eta", type=float, default=None, help="Noise power (exclusive with --snr / --snr-db)."),
        click.option("--snr", type=float, default=None, help="End-to-end SNR, linear."),
        click.option("--snr-db", "snrDb", type=float, default=None, help="End-to-end SNR in dB."),
        click.option("--log-base", "logBase", type=click.Choice(["natural", "base2"]), default=None),
        click.option("--config", "configPath", type=str, default=None, help="NetworkParams JSON file."),
        click.option("--sweep", "sweepText", type=str, default=None, help="<var>=<spec>, e.g. lambda=logrange(1e-2,1e3,50)."),
        click.option("--out", "outPath", type=str, default=None, help="Output file (stdout when omitted)."),
        click.option("--format", "outputFormat", type=click.Choice(["csv", "json"]), default="csv"),
    ]
    for option in reversed(options):
        f = option(f)
    return f


def _buildSpec(command: Command, options: Dict[str, Any], **fields) -> RunSpec:
    params, holdSnr = resolveParams(
        options["configPath"],
        {"lambda": options["lam"], "alpha": options["alpha"], "beta": options["beta"],
         "R": options["distance"], "rho": options["rho"]},
        options["eta"],
        options["snr"],
        options["snrDb"],
        options["logBase"],
    )
    sweep = parseSweep(options["sweepText"]) if options.get("sweepText") else None
    return RunSpec(
        command=command,
        params=params,
        sweep=sweep,
        outputPath=options["outPath"],
        outputFormat=OutputFormat(options["outputFormat"]),
        holdSnr=holdSnr,
        **fields,
    )


def _emit(df: pd.DataFrame, spec: RunSpec) -> None:
    text = renderTable(df, spec)
    if spec.outputPath:
        getOutputDirectory(spec.outputPath)
        with open(spec.outputPath, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        logger.info(f"Wrote {len(df)} rows to {spec.outputPath}")
    else:
        click.echo(text, nl=False)


@click.group()
@click.option("--log-level", "logLevel", type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False), default="WARNING")
@click.option("--log-json", "logJson", is_flag=True, default=False, help="Emit logs as JSON lines.")
def main(logLevel: str, logJson: bool) -> None:
    """Random access transport capacity of multihop routes under Poisson interference."""
    configureLogging(logLevel, logJson)


@main.command()
@_paramOptions
@click.option("--M", "hops", type=int, default=None, help="Also report the hop plan at this hop count.")
def analytic(hops: Optional[int], **options) -> None:
    """Closed-form optimum: K_alpha, k1, k2, M*, p_s(M*), C^ub and the limits."""
    with _exitCodes():
        spec = _buildSpec(Command.ANALYTIC, options, m=hops)
        df = ReportBuilder(spec).buildAnalytic()

        if hops is not None:
            points = spec.sweep.values if spec.sweep else [None]
            plans = []
            for value in points:
                params = spec.params
                if value is not None:
                    params, _ = applySweepValue(params, None, spec.sweep.variable, value, spec.holdSnr)
                plan = hopPlan(params, hops)
                plans.append((plan.m, plan.hopDistance, plan.pSuccess, plan.expectedAttemptsPerHop))
            df["M"] = [p[0] for p in plans]
            df["hop_distance"] = [p[1] for p in plans]
            df["p_s_at_M"] = [p[2] for p in plans]
            df["expected_attempts_per_hop_at_M"] = [p[3] for p in plans]

        _emit(df, spec)


@main.command()
@_paramOptions
@click.option("--A", "budget", type=int, default=None, help="Attempt budget per packet.")
@click.option("--M", "hops", type=int, default=None, help="Only report this hop count.")
def exact(budget: Optional[int], hops: Optional[int], **options) -> None:
    """Exact finite-budget capacity C(A) with its per-M table and the bound C^ub(A)."""
    with _exitCodes():
        spec = _buildSpec(Command.EXACT, options, a=budget, m=hops)
        df = ReportBuilder(spec).buildExact()
        if hops is not None and spec.sweep is None:
            if not 1 <= hops <= len(df):
                raise ParameterError(f"M must lie in 1..A, got M={hops}, A={budget}")
            df = df[df["M"] == hops].reset_index(drop=True)
        _emit(df, spec)


@main.command()
@_paramOptions
@click.option("--A", "budget", type=int, default=6, show_default=True, help="Attempt budget per packet.")
@click.option("--M", "hops", type=int, default=None, help="Only report this hop count.")
@click.option("--trials", type=int, default=10000, show_default=True)
@click.option("--seed", type=int, default=2009, show_default=True)
@click.option("--n-jobs", "nJobs", type=int, default=1, show_default=True)
@click.option("--chunk-size", "chunkSize", type=int, default=2000, show_default=True)
@click.option("--truncation-epsilon", "truncationEpsilon", type=float, default=1e-3, show_default=True)
@click.option("--region-radius", "regionRadius", type=float, default=None)
@click.option("--max-mean-interferers", "maxMeanInterferers", type=float, default=1000.0, show_default=True)
@click.option("--far-field/--no-far-field", "farField", default=True, show_default=True)
def simulate(
    budget: int,
    hops: Optional[int],
    trials: int,
    seed: int,
    nJobs: int,
    chunkSize: int,
    truncationEpsilon: float,
    regionRadius: Optional[float],
    maxMeanInterferers: float,
    farField: bool,
    **options,
) -> None:
    """Monte Carlo estimates next to the exact values, with a 3-sigma agreement flag per row."""
    with _exitCodes():
        sim = SimConfig(
            trials=trials,
            seed=seed,
            truncationEpsilon=truncationEpsilon,
            regionRadius=regionRadius,
            maxMeanInterferers=maxMeanInterferers if maxMeanInterferers > 0 else None,
            farFieldCompensation=farField,
            nJobs=nJobs,
            chunkSize=chunkSize,
        )
        spec = _buildSpec(Command.SIMULATE, options, a=budget, m=hops, sim=sim)
        df = ReportBuilder(spec).buildSimulate()
        if hops is not None:
            df = df[df["M"] == hops].reset_index(drop=True)
        _emit(df, spec)

        failed = df[~df["agree"].astype(bool)]
        if len(failed):
            raise CheckFailure(f"simulation disagrees with the exact model at M = {sorted(set(failed['M'].tolist()))}")


@main.command()
@_paramOptions
@click.option("--figure", "figureId", type=int, required=True, help="Figure id, 1..7.")
def figure(figureId: int, **options) -> None:
    """Dataset behind one of the seven capacity figures."""
    with _exitCodes():
        options["sweepText"] = None
        spec = _buildSpec(Command.FIGURE, options, figure=figureId)
        dataset = FigureDatasetBuilder(spec.params).buildFigure(figureId)
        spec = replace(spec, extra={"figure_profile": dataset.profile})
        _emit(dataset.table, spec)


@main.command()
@click.option("--perturb-p", "perturbation", type=float, default=0.0, hidden=True, help="Shift p on the reference side (negative control).")
@click.option("--max-A", "maxBudget", type=int, default=MAX_GRID_BUDGET, show_default=True)
@click.option("--out", "outPath", type=str, default=None)
@click.option("--format", "outputFormat", type=click.Choice(["csv", "json"]), default="csv")
def verify(perturbation: float, maxBudget: int, outPath: Optional[str], outputFormat: str) -> None:
    """Run the gap / binomial identity grid and the analytic property grid."""
    with _exitCodes():
        if maxBudget < 1:
            raise ParameterError(f"--max-A >= 1 required, got {maxBudget}")
        if not math.isfinite(perturbation):
            raise ParameterError(f"--perturb-p must be finite, got {perturbation}")

        report = runVerification(perturbation=perturbation, maxBudget=maxBudget)
        params = NetworkParams.fromDict(DEFAULT_PROFILE)
        spec = RunSpec(
            command=Command.VERIFY,
            params=params,
            outputPath=outPath,
            outputFormat=OutputFormat(outputFormat),
            extra={"perturbation": perturbation, "max_A": maxBudget},
        )
        _emit(report.toFrame(), spec)
        report.raiseOnFailure()


if __name__ == "__main__":
    main()
