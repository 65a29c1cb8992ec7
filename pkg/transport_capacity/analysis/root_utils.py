"""
Utility Functions for the optimal hop count equation

Setting the derivative of p_s(M)/M to zero gives, for k1, k2 >= 0 and alpha > 2,

    g(M) = M^alpha - 2 k2 M^(alpha-2) - alpha k1 = 0

These helpers solve it:
1) Bracketed numeric root for any alpha > 2
2) Closed forms for alpha = 3 (Cardano / trigonometric, split on the discriminant) and
   alpha = 4 (quadratic in M^2)
"""

import math
from typing import Tuple

import numpy as np
from scipy.optimize import brentq

#Lower end of the numeric bracket; g < 0 there whenever k1 + k2 > 0
BRACKET_LOW = 1e-6


class HopEquationUtils:
    """
    Utility Functions for g(M) = M^alpha - 2 k2 M^(alpha-2) - alpha k1
    """

    @staticmethod
    def residual(m: float, alpha: float, k1: float, k2: float) -> float:
        """g(M), zero at the optimal continuous hop count"""
        return m**alpha - 2.0 * k2 * m ** (alpha - 2.0) - alpha * k1

    @staticmethod
    def firstOrderCondition(m: float, alpha: float, k1: float, k2: float) -> float:
        """
        1 - k1 alpha M^-alpha - 2 k2 M^-2, the bracketed factor of the derivative of p_s(M)/M.

        Strictly increasing in M, so p_s(M)/M increases while this is negative and decreases
        once it turns positive (unimodality).
        """
        return 1.0 - k1 * alpha * m ** (-alpha) - 2.0 * k2 * m ** (-2.0)

    @staticmethod
    def bracketHigh(alpha: float, k1: float, k2: float) -> float:
        """
        Upper end of the numeric bracket.

        max(2 sqrt(2 k2), 2 (alpha k1)^(1/alpha), 1) * 10. At M >= 2 sqrt(2 k2) the first two
        terms of g are at least (3/4) M^alpha, and at M >= 2 (alpha k1)^(1/alpha) that exceeds
        alpha k1, so g(high) > 0.
        """
        return max(2.0 * math.sqrt(2.0 * k2), 2.0 * (alpha * k1) ** (1.0 / alpha), 1.0) * 10.0

    @staticmethod
    def numericRoot(alpha: float, k1: float, k2: float) -> float:
        """
        Largest positive root of g by Brent's method on [BRACKET_LOW, bracketHigh].

        g(M) = M^(alpha-2) (M^2 - 2 k2) - alpha k1: the first part is zero at the origin, dips
        and then grows without bound, so there is exactly one sign change on (0, inf) and it is
        the largest positive root.
        """
        high = HopEquationUtils.bracketHigh(alpha, k1, k2)

        #Edge Case: pure interference (k1 = 0) has the exact root sqrt(2 k2)
        if k1 == 0.0:
            return math.sqrt(2.0 * k2)

        low = BRACKET_LOW
        #Tighten the bracket from the right: g < 0 below max(sqrt(2 k2), small)
        if k2 > 0.0:
            low = max(low, math.sqrt(2.0 * k2))

        return brentq(
            HopEquationUtils.residual,
            low,
            high,
            args=(alpha, k1, k2),
            xtol=1e-300,
            rtol=4.0 * np.finfo(float).eps,
            maxiter=500,
        )


class CubicUtils:
    """
    alpha = 3: M^3 - 2 k2 M - 3 k1 = 0, a depressed cubic t^3 + p t + q with p = -2 k2, q = -3 k1
    """

    @staticmethod
    def discriminant(k1: float, k2: float) -> float:
        """D = 9 k1^2 / 4 - 8 k2^3 / 27 = (q/2)^2 + (p/3)^3. D >= 0: one real root, D < 0: three"""
        return 9.0 * k1**2 / 4.0 - 8.0 * k2**3 / 27.0

    @staticmethod
    def cardanoRoot(k1: float, k2: float) -> float:
        """
        The single real root when D >= 0.

        M = u + v with u = cbrt(3 k1/2 + sqrt(D)) and u v = 2 k2 / 3. Taking v = (2 k2/3) / u
        instead of cbrt(3 k1/2 - sqrt(D)) avoids cancellation when k2 is small.
        """
        d = CubicUtils.discriminant(k1, k2)
        if d < 0:
            raise ValueError("cardanoRoot needs D >= 0")

        u = float(np.cbrt(1.5 * k1 + math.sqrt(d)))
        if u == 0.0:
            return 0.0
        return u + (2.0 * k2 / 3.0) / u

    @staticmethod
    def trigRoots(k1: float, k2: float) -> Tuple[float, float, float]:
        """
        The three real roots when D < 0, largest first.

        y_j = 2 sqrt(2 k2 / 3) cos(phi/3 - 2 pi j / 3), cos(phi) = 9 sqrt(3) k1 / (4 k2 sqrt(2 k2))
        """
        if CubicUtils.discriminant(k1, k2) >= 0:
            raise ValueError("trigRoots needs D < 0")

        amplitude = 2.0 * math.sqrt(2.0 * k2 / 3.0)
        x = CubicUtils.trigArgument(k1, k2)
        phi = math.acos(min(1.0, max(-1.0, x)))
        return tuple(
            amplitude * math.cos(phi / 3.0 - 2.0 * math.pi * j / 3.0) for j in range(3)
        )

    @staticmethod
    def trigArgument(k1: float, k2: float) -> float:
        """arccos argument 9 sqrt(3) k1 / (4 k2 sqrt(2 k2)) of the trigonometric form"""
        return 9.0 * math.sqrt(3.0) * k1 / (4.0 * k2 * math.sqrt(2.0 * k2))


class QuarticUtils:
    """alpha = 4: M^4 - 2 k2 M^2 - 4 k1 = 0, a quadratic in M^2"""

    @staticmethod
    def positiveRoot(k1: float, k2: float) -> float:
        """M = sqrt(k2 + sqrt(k2^2 + 4 k1)), the only positive real solution"""
        return math.sqrt(k2 + math.sqrt(k2**2 + 4.0 * k1))
