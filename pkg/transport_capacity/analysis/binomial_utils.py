"""
Utility Functions for binomial and Pascal (negative binomial) probabilities

Tails up to LOG_SUM_MAX_BUDGET trials are accumulated in the log domain with log-gamma binomial
coefficients; longer ones go through the regularised incomplete beta (scipy.special.bdtr /
bdtrc), where summing thousands of rounded terms would drift. p = 0 and p = 1 are
short-circuited exactly.

Why binomial tails show up at all:
    The M-th success of a Bernoulli(p) sequence arrives by trial A exactly when A trials
    contain at least M successes, so P(T_M <= A) = P(S_A >= M) with S_A ~ Bin(A, p).
"""

import math

import numpy as np
from scipy.special import bdtr, bdtrc, gammaln, logsumexp

#Largest a summed term by term; the identity grids stay well inside it
LOG_SUM_MAX_BUDGET = 1000


class BinomialUtils:
    """
    Utility Functions for S_a ~ Bin(a, p)
    """

    @staticmethod
    def logChoose(n: int, k: np.ndarray) -> np.ndarray:
        """log C(n, k) through log-gamma"""
        k = np.asarray(k, dtype=float)
        return gammaln(n + 1.0) - gammaln(k + 1.0) - gammaln(n - k + 1.0)

    @staticmethod
    def logPmfTerms(a: int, p: float, ks: np.ndarray) -> np.ndarray:
        """
        log P(S_a = k) for every k in ks (0 <= k <= a, 0 < p < 1)

        log C(a, k) + k log p + (a - k) log(1 - p)
        """
        ks = np.asarray(ks, dtype=float)
        return BinomialUtils.logChoose(a, ks) + ks * math.log(p) + (a - ks) * math.log1p(-p)

    @staticmethod
    def binomPmf(a: int, p: float, k: int) -> float:
        """P(S_a = k); 0 outside 0..a"""
        #Edge Case: outside the support
        if k < 0 or k > a:
            return 0.0

        #Edge Case: degenerate p puts all the mass on one end
        if p <= 0.0:
            return 1.0 if k == 0 else 0.0
        if p >= 1.0:
            return 1.0 if k == a else 0.0

        return float(np.exp(BinomialUtils.logPmfTerms(a, p, [k])[0]))

    @staticmethod
    def binomCdf(a: int, p: float, k: int) -> float:
        """
        P(S_a <= k).

        Clamps: k < 0 gives 0, k >= a gives 1.
        """
        if k < 0:
            return 0.0
        if k >= a:
            return 1.0
        if p <= 0.0:
            return 1.0
        if p >= 1.0:
            return 0.0
        if a > LOG_SUM_MAX_BUDGET:
            return float(bdtr(k, a, p))

        terms = BinomialUtils.logPmfTerms(a, p, np.arange(0, k + 1))
        return float(min(1.0, np.exp(logsumexp(terms))))

    @staticmethod
    def binomSf(a: int, p: float, k: int) -> float:
        """
        P(S_a >= k), summed over the upper tail directly (no 1 - cdf cancellation).

        Clamps: k <= 0 gives 1, k > a gives 0.
        """
        if k <= 0:
            return 1.0
        if k > a:
            return 0.0
        if p <= 0.0:
            return 0.0
        if p >= 1.0:
            return 1.0
        if a > LOG_SUM_MAX_BUDGET:
            return float(bdtrc(k - 1, a, p))

        terms = BinomialUtils.logPmfTerms(a, p, np.arange(k, a + 1))
        return float(min(1.0, np.exp(logsumexp(terms))))


class PascalUtils:
    """
    Utility Functions for T_m ~ Pascal(m, p), the trial index of the m-th success
    """

    @staticmethod
    def pmfTerms(m: int, p: float, ns: np.ndarray) -> np.ndarray:
        """
        P(T_m = n) for every n in ns.

        C(n-1, m-1) p^m (1-p)^(n-m), i.e. p * P(S_(n-1) = m-1); zero for n < m.
        """
        ns = np.asarray(ns, dtype=np.int64)
        out = np.zeros(ns.shape, dtype=float)
        valid = ns >= m

        #Edge Case: m = 0 is the empty route, done before the first trial
        if m == 0:
            out[ns == 0] = 1.0
            return out

        if p <= 0.0 or not np.any(valid):
            return out
        if p >= 1.0:
            out[ns == m] = 1.0
            return out

        n = ns[valid].astype(float)
        logTerms = (
            gammaln(n) - gammaln(float(m)) - gammaln(n - m + 1.0)
            + m * math.log(p)
            + (n - m) * math.log1p(-p)
        )
        out[valid] = np.exp(logTerms)
        return out
