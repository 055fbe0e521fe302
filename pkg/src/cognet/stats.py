"""Small statistical helpers shared by the analyses."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import stats as sps


@dataclass(frozen=True)
class TwoProportionResult:
    p1: float
    p2: float
    n1: int
    n2: int
    chi2: float
    p_value: float

    def as_dict(self) -> dict:
        return {"p1": self.p1, "p2": self.p2, "n1": self.n1, "n2": self.n2,
                "chi2": self.chi2, "p_value": self.p_value}


def chi2_two_proportions(k1: int, n1: int, k2: int, n2: int,
                         continuity: bool = False) -> TwoProportionResult:
    """Pearson chi-square test (1 dof) comparing k1/n1 with k2/n2.

    For a 2x2 table this equals the squared two-proportion z statistic
    (p1 - p2)^2 / (p (1 - p) (1/n1 + 1/n2)) with pooled p. ``continuity``
    applies Yates' correction.
    """
    if n1 < 1 or n2 < 1:
        raise ValueError("sample sizes must be >= 1")
    if not (0 <= k1 <= n1 and 0 <= k2 <= n2):
        raise ValueError("counts must satisfy 0 <= k <= n")
    pooled = (k1 + k2) / (n1 + n2)
    if pooled in (0.0, 1.0):
        raise ValueError("test undefined: pooled proportion is 0 or 1")
    p1, p2 = k1 / n1, k2 / n2
    if continuity:
        n = n1 + n2
        diff = abs(k1 * (n2 - k2) - k2 * (n1 - k1))
        diff = max(0.0, diff - n / 2)
        chi2 = n * diff ** 2 / (n1 * n2 * (k1 + k2) * (n - k1 - k2))
    else:
        chi2 = (p1 - p2) ** 2 / (pooled * (1 - pooled) * (1 / n1 + 1 / n2))
    p_value = float(sps.chi2.sf(chi2, df=1))
    return TwoProportionResult(p1, p2, n1, n2, float(chi2), min(1.0, p_value))


def empirical_p(observed: float, null_samples: Sequence[float], side: str = "two") -> float:
    """Add-one empirical p-value: (#{at least as extreme} + 1) / (n + 1)."""
    samples = np.asarray(null_samples, dtype=float)
    n = len(samples)
    if n == 0:
        raise ValueError("null_samples is empty")
    p_less = (np.count_nonzero(samples <= observed) + 1) / (n + 1)
    p_greater = (np.count_nonzero(samples >= observed) + 1) / (n + 1)
    if side == "less":
        return float(p_less)
    if side == "greater":
        return float(p_greater)
    if side == "two":
        return float(min(1.0, 2 * min(p_less, p_greater)))
    raise ValueError(f"side must be 'less', 'greater' or 'two', not {side!r}")


def nearest_rank(samples: Sequence[float], percent: float) -> float:
    s = np.sort(np.asarray(samples, dtype=float))
    rank = max(1, math.ceil(percent / 100 * len(s)))
    return float(s[rank - 1])


def centile_bounds(samples: Sequence[float], low: float = 1, high: float = 99) -> tuple[float, float]:
    if len(samples) == 0:
        raise ValueError("samples is empty")
    if not 0 <= low < high <= 100:
        raise ValueError("need 0 <= low < high <= 100")
    return nearest_rank(samples, low), nearest_rank(samples, high)


def mean_sd(values: Sequence[float]) -> tuple[float, float]:
    v = np.asarray(values, dtype=float)
    return float(v.mean()), float(v.std(ddof=1)) if len(v) > 1 else 0.0
