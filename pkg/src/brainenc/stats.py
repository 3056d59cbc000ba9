"""One-way ANOVA across tasks with Bonferroni-corrected pairwise comparisons.

The F-distribution tail is evaluated from a regularized incomplete beta
function (modified Lentz continued fraction, relative tolerance 1e-12), so
the p-values carry no dependency on an external stats library; library
implementations appear only as oracles in the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np

from .errors import (
    DegenerateGroups,
    LengthMismatch,
    OutOfRangeP,
    ValidationError,
    ZeroWithinVariance,
)

_CF_TOL = 1e-12
_CF_TINY = 1e-300
_CF_MAXIT = 500


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta (modified Lentz)."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _CF_TINY:
        d = _CF_TINY
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAXIT + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_TOL:
            return h
    raise ValidationError(f"incomplete beta continued fraction failed to converge (a={a}, b={b}, x={x})")


def reg_inc_beta(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b) for a, b > 0, x in [0, 1]."""
    if a <= 0 or b <= 0:
        raise ValidationError(f"incomplete beta needs a, b > 0, got a={a}, b={b}")
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    # the continued fraction converges fast only on its own side of the
    # mean; use the symmetry I_x(a,b) = 1 - I_{1-x}(b,a) for the other side
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def f_sf(f_stat: float, df_between: int, df_within: int) -> float:
    """Survival function P(F >= f) of the F(df_between, df_within) distribution."""
    if f_stat < 0:
        raise ValidationError(f"F statistic must be >= 0, got {f_stat}")
    if df_between < 1 or df_within < 1:
        raise ValidationError(f"degrees of freedom must be >= 1, got ({df_between}, {df_within})")
    if f_stat == 0.0:
        return 1.0
    x = df_within / (df_within + df_between * f_stat)
    return reg_inc_beta(df_within / 2.0, df_between / 2.0, x)


@dataclass(frozen=True)
class AnovaResult:
    f_stat: float
    df_between: int
    df_within: int
    p_value: float


def one_way_anova(groups: Sequence[Sequence[float]]) -> AnovaResult:
    """Standard one-way ANOVA over >= 2 groups of >= 2 observations each."""
    arrays = [np.asarray(g, dtype=np.float64).ravel() for g in groups]
    if len(arrays) < 2:
        raise DegenerateGroups(f"need at least 2 groups, got {len(arrays)}")
    for i, g in enumerate(arrays):
        if g.size < 2:
            raise DegenerateGroups(f"group {i} has {g.size} observation(s), need >= 2")
    all_values = np.concatenate(arrays)
    grand = all_values.mean()
    ssb = sum(g.size * (g.mean() - grand) ** 2 for g in arrays)
    ssw = sum(((g - g.mean()) ** 2).sum() for g in arrays)
    df_between = len(arrays) - 1
    df_within = all_values.size - len(arrays)
    if ssw == 0.0:
        raise ZeroWithinVariance("all groups are internally constant; F is undefined")
    f_stat = (ssb / df_between) / (ssw / df_within)
    return AnovaResult(
        f_stat=float(f_stat),
        df_between=df_between,
        df_within=df_within,
        p_value=f_sf(float(f_stat), df_between, df_within),
    )


def bonferroni(p_raw: float, m: int) -> float:
    """min(1, m * p_raw) for a declared family of m tests."""
    if not (0.0 <= p_raw <= 1.0):
        raise OutOfRangeP(f"p-value must lie in [0, 1], got {p_raw}")
    if m < 1:
        raise ValidationError(f"family size must be >= 1, got {m}")
    return min(1.0, m * p_raw)


@dataclass(frozen=True)
class PairwiseRow:
    task_a: str
    task_b: str
    p_raw: float
    p_corrected: float


@dataclass(frozen=True)
class PairwiseTable:
    rows: tuple[PairwiseRow, ...]
    family_m: int


def pairwise_posthoc(
    task_values: Mapping[str, Sequence[float]],
    family_m: Optional[int] = None,
) -> PairwiseTable:
    """Two-group one-way ANOVA (F = t^2) for every unordered task pair.

    ``task_values`` maps task code to one metric value per subject; pairs are
    emitted in the mapping's iteration order. The Bonferroni family defaults
    to the number of pairs tested.
    """
    codes = list(task_values)
    vectors = {c: np.asarray(task_values[c], dtype=np.float64).ravel() for c in codes}
    lengths = {c: v.size for c, v in vectors.items()}
    if len(set(lengths.values())) > 1:
        raise LengthMismatch(f"per-subject vectors differ in length: {lengths}")
    pairs = [(a, b) for i, a in enumerate(codes) for b in codes[i + 1 :]]
    m = family_m if family_m is not None else len(pairs)
    rows = []
    for a, b in pairs:
        if np.array_equal(vectors[a], vectors[b]):
            p_raw = 1.0  # F = 0 exactly; skip the solve to keep it exact
        else:
            p_raw = one_way_anova([vectors[a], vectors[b]]).p_value
        rows.append(PairwiseRow(task_a=a, task_b=b, p_raw=p_raw, p_corrected=bonferroni(p_raw, m)))
    return PairwiseTable(rows=tuple(rows), family_m=m)


def pairwise_csv_rows(table: PairwiseTable) -> list[str]:
    """Pairwise-comparison CSV lines: T1, T2, raw and corrected p-values."""
    lines = ["T1,T2,p_raw,p_corrected"]
    for row in table.rows:
        lines.append(f"{row.task_a},{row.task_b},{row.p_raw!r},{row.p_corrected!r}")
    return lines


def anova_csv_rows(results: Mapping[str, AnovaResult]) -> list[str]:
    """Main-effect CSV lines: one row of F, df and p per ROI."""
    lines = ["roi,f_stat,df_between,df_within,p_value"]
    for roi_name, res in results.items():
        lines.append(
            f"{roi_name},{res.f_stat!r},{res.df_between},{res.df_within},{res.p_value!r}"
        )
    return lines
