"""
Network scenario parameters and the constants derived from them.

Every other module consumes these types:
    NetworkParams - the physical scenario (lambda, alpha, beta, R, rho, eta)
    DerivedConstants - K_alpha, SNR, k1 and k2

Why k1 and k2:
    The per-hop success probability of an M-hop equidistant route is
        p_s(M) = exp(-k1 * M^-alpha - k2 * M^-2)
    where k1 = beta / SNR is the noise share and k2 = lambda * beta^(2/alpha) * K_alpha * R^2
    is the interference share. Everything downstream is a function of (alpha, k1, k2) plus
    the rate factor lambda * log(1 + beta) * R.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Dict, Optional

from ..utils.errors import DomainError, ParameterError

logger = logging.getLogger(__name__)


class RateLogBase(str, Enum):
    """Base of the spectral efficiency term log(1 + beta)"""

    NATURAL = "natural"
    BASE2 = "base2"


def kappaAlpha(alpha: float) -> float:
    """
    The interference constant K_alpha = 2 pi^2 / (alpha sin(2 pi / alpha)).

    Strictly positive and finite for alpha > 2; it diverges as alpha -> 2 from above
    (the aggregate interference of a planar Poisson field is infinite for alpha <= 2).

    Examples:
        kappaAlpha(4) = pi^2 / 2
        kappaAlpha(3) = 4 sqrt(3) pi^2 / 9 (about 7.598)
    """
    if not alpha > 2:
        raise DomainError(f"alpha > 2 required for K_alpha, got {alpha}")
    return 2.0 * math.pi**2 / (alpha * math.sin(2.0 * math.pi / alpha))


@dataclass(frozen=True)
class DerivedConstants:
    """K_alpha, end-to-end SNR, k1 = beta/SNR and k2 = lambda beta^(2/alpha) K_alpha R^2"""

    kAlpha: float
    snr: float
    k1: float
    k2: float


@dataclass(frozen=True)
class NetworkParams:
    """
    The physical scenario.

    Fields (SI units):
        lam - interferer density, transmitters per unit area (>= 0)
        alpha - path loss exponent (> 2)
        beta - per-hop SINR threshold, linear (> 0)
        R - source to destination distance (> 0)
        rho - transmit power, average radiated power at 1 m (> 0)
        eta - noise power (>= 0, 0 means interference limited)
        rateLogBase - base of log(1 + beta)

    lam = 0 and eta = 0 together leave nothing to optimise (success is certain on any hop)
    and are rejected unless allowDegenerate is set. Only the simulator uses that escape hatch.
    """

    lam: float
    alpha: float
    beta: float
    R: float
    rho: float = 1.0
    eta: float = 0.1
    rateLogBase: RateLogBase = RateLogBase.NATURAL
    allowDegenerate: bool = field(default=False, compare=False, repr=False)

    def __post_init__(self):
        #Coerce the enum so "base2" strings from configs work too
        if not isinstance(self.rateLogBase, RateLogBase):
            try:
                object.__setattr__(self, "rateLogBase", RateLogBase(self.rateLogBase))
            except ValueError as e:
                raise ParameterError(
                    f"rate_log_base must be 'natural' or 'base2', got {self.rateLogBase!r}"
                ) from e

        for name in ("lam", "alpha", "beta", "R", "rho", "eta"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or math.isnan(value):
                raise ParameterError(f"{name} must be a number, got {value!r}")

        if not self.alpha > 2:
            raise ParameterError(f"alpha > 2 required, got {self.alpha}")
        if not self.lam >= 0:
            raise ParameterError(f"lambda >= 0 required, got {self.lam}")
        if not self.beta > 0:
            raise ParameterError(f"beta > 0 required, got {self.beta}")
        if not (self.R > 0 and math.isfinite(self.R)):
            raise ParameterError(f"R > 0 required, got {self.R}")
        if not (self.rho > 0 and math.isfinite(self.rho)):
            raise ParameterError(f"rho > 0 required, got {self.rho}")
        if not (self.eta >= 0 and math.isfinite(self.eta)):
            raise ParameterError(f"eta >= 0 required, got {self.eta}")
        if math.isinf(self.lam) or math.isinf(self.beta) or math.isinf(self.alpha):
            raise ParameterError("lambda, alpha and beta must be finite")
        if self.eta == 0 and self.lam == 0 and not self.allowDegenerate:
            raise ParameterError("eta = 0 and lambda = 0 together are not allowed (M* undefined)")

    @classmethod
    def fromSnr(
        cls,
        lam: float,
        alpha: float,
        beta: float,
        R: float,
        snr: float,
        rho: float = 1.0,
        rateLogBase: RateLogBase = RateLogBase.NATURAL,
    ) -> "NetworkParams":
        """
        Build params from the end-to-end SNR instead of the noise power.

        Stored internally as (rho, eta) with eta = rho R^-alpha / SNR; SNR = inf gives eta = 0.
        """
        if not snr > 0:
            raise ParameterError(f"snr > 0 required, got {snr}")
        eta = 0.0 if math.isinf(snr) else rho * R ** (-alpha) / snr
        return cls(lam=lam, alpha=alpha, beta=beta, R=R, rho=rho, eta=eta, rateLogBase=rateLogBase)

    @classmethod
    def fromDict(cls, data: Dict[str, Any], defaults: Optional["NetworkParams"] = None) -> "NetworkParams":
        """
        Build params from the JSON field names (lambda, alpha, beta, R, rho, eta, rate_log_base).

        An "snr" key may replace "eta". Missing keys are taken from defaults when given.
        """
        base = defaults.toDict() if defaults is not None else {}
        merged = {**base, **{k: v for k, v in data.items() if v is not None}}
        if "snr" in data and data["snr"] is not None:
            merged.pop("eta", None)

        missing = [k for k in ("lambda", "alpha", "beta", "R") if k not in merged]
        if missing:
            raise ParameterError(f"missing params field(s): {missing}")

        rateLogBase = merged.get("rate_log_base", RateLogBase.NATURAL.value)
        rho = float(merged.get("rho", 1.0))
        if "eta" not in merged and "snr" in merged:
            return cls.fromSnr(
                lam=float(merged["lambda"]),
                alpha=float(merged["alpha"]),
                beta=float(merged["beta"]),
                R=float(merged["R"]),
                snr=float(merged["snr"]),
                rho=rho,
                rateLogBase=rateLogBase,
            )

        return cls(
            lam=float(merged["lambda"]),
            alpha=float(merged["alpha"]),
            beta=float(merged["beta"]),
            R=float(merged["R"]),
            rho=rho,
            eta=float(merged.get("eta", 0.1)),
            rateLogBase=rateLogBase,
        )

    def toDict(self) -> Dict[str, Any]:
        """JSON form with the exact external field names"""
        return {
            "lambda": self.lam,
            "alpha": self.alpha,
            "beta": self.beta,
            "R": self.R,
            "rho": self.rho,
            "eta": self.eta,
            "rate_log_base": self.rateLogBase.value,
        }

    def replaced(self, **changes) -> "NetworkParams":
        """Copy with some fields changed (re-validated)"""
        return replace(self, **changes)

    def withSnr(self, snr: float) -> "NetworkParams":
        """Copy with eta set so the end-to-end SNR equals snr (rho held fixed)"""
        if not snr > 0:
            raise ParameterError(f"snr > 0 required, got {snr}")
        eta = 0.0 if math.isinf(snr) else self.rho * self.R ** (-self.alpha) / snr
        return replace(self, eta=eta)

    @property
    def snr(self) -> float:
        """End-to-end SNR rho R^-alpha / eta (inf when eta = 0)"""
        if self.eta == 0:
            return math.inf
        return self.rho * self.R ** (-self.alpha) / self.eta

    @property
    def snrDb(self) -> float:
        return 10.0 * math.log10(self.snr) if math.isfinite(self.snr) else math.inf

    def logOnePlusBeta(self) -> float:
        """Spectral efficiency log(1 + beta) in the configured base"""
        if self.rateLogBase == RateLogBase.BASE2:
            return math.log2(1.0 + self.beta)
        return math.log1p(self.beta)

    def rateFactor(self) -> float:
        """lambda * log(1 + beta) * R, the prefactor shared by every capacity expression"""
        return self.lam * self.logOnePlusBeta() * self.R

    def meanInterferersInCircle(self) -> float:
        """Average interferer count lambda pi (R/2)^2 in the circle with S and D on opposite sides"""
        return self.lam * math.pi * (self.R / 2.0) ** 2


def derive(params: NetworkParams) -> DerivedConstants:
    """
    Derive K_alpha, SNR, k1 and k2 from the scenario.

    k1 = beta eta R^alpha / rho (= beta / SNR, and exactly 0 when eta = 0)
    k2 = lambda beta^(2/alpha) K_alpha R^2
    """
    kAlpha = kappaAlpha(params.alpha)
    k1 = params.beta * params.eta * params.R**params.alpha / params.rho
    k2 = params.lam * params.beta ** (2.0 / params.alpha) * kAlpha * params.R**2
    return DerivedConstants(kAlpha=kAlpha, snr=params.snr, k1=k1, k2=k2)
