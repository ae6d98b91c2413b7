"""Statistical backend: design matrices over categorical factors, ordinary
least squares, per-factor one-way ANOVA with F-test p-values, and
eta-squared effect sizes.

The F upper-tail probability is computed from the regularized incomplete
beta function, evaluated by a modified Lentz continued fraction (absolute
tolerance 1e-12), which stays robust for extreme F values where a series
expansion would converge slowly.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from math import fsum
from typing import IO, Sequence

import numpy as np

from .errors import RankDeficient, SingleLevelFactor, ZeroVariance

FACTOR_NAMES = ("medium", "channel", "status", "category", "audience",
                "conflict", "speaker_gender")

ETA_SQUARED_SMALL = 0.01
DEFAULT_ALPHA = 0.05


@dataclass(frozen=True)
class AnalysisRow:
    """One utterance of the statistical population: the response (mean
    female name probability, in [0, 1]) and seven categorical factors."""

    y: float
    medium: str
    channel: str
    status: str
    category: str
    audience: str
    conflict: str
    speaker_gender: str

    def __post_init__(self):
        if not 0.0 <= self.y <= 1.0:
            raise ValueError(f"response out of [0, 1]: {self.y}")

    def level(self, factor: str) -> str:
        if factor not in FACTOR_NAMES:
            raise KeyError(f"unknown factor {factor!r}")
        return getattr(self, factor)


ROWS_CSV_HEADER = ["y", *FACTOR_NAMES]


def rows_to_csv(rows: Sequence[AnalysisRow], stream: IO[str]) -> None:
    """Fixed column order (y then the 7 factors) for cross-validation
    against external statistics packages."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(ROWS_CSV_HEADER)
    for row in rows:
        writer.writerow([repr(row.y), *(row.level(f) for f in FACTOR_NAMES)])


def rows_from_csv(stream: IO[str]) -> list[AnalysisRow]:
    reader = csv.reader(stream)
    header = next(reader, None)
    if header != ROWS_CSV_HEADER:
        raise ValueError(f"expected header {ROWS_CSV_HEADER}, got {header}")
    out = []
    for record in reader:
        if not record:
            continue
        y, *levels = record
        out.append(AnalysisRow(float(y), *levels))
    return out


def _levels(rows: Sequence[AnalysisRow], factor: str) -> list[str]:
    return sorted({row.level(factor) for row in rows})


def build_design(rows: Sequence[AnalysisRow], factor: str) -> tuple[np.ndarray, np.ndarray, list[str]]:
    """Treatment-coded design for one factor: an intercept column plus one
    indicator per non-reference level. The reference level is the
    lexicographically smallest, so the construction guarantees full column
    rank. Returns (design, response, levels)."""
    levels = _levels(rows, factor)
    if len(levels) < 2:
        raise SingleLevelFactor(f"factor {factor!r} has levels {levels}")
    index = {level: i for i, level in enumerate(levels)}
    design = np.zeros((len(rows), len(levels)), dtype=float)
    design[:, 0] = 1.0
    response = np.empty(len(rows), dtype=float)
    for i, row in enumerate(rows):
        j = index[row.level(factor)]
        if j > 0:
            design[i, j] = 1.0
        response[i] = row.y
    return design, response, levels


def build_joint_design(rows: Sequence[AnalysisRow],
                       factors: Sequence[str] = FACTOR_NAMES) -> tuple[np.ndarray, np.ndarray, list[str], list[str]]:
    """Additive treatment-coded design over several factors: intercept plus
    (L-1) indicators per factor.

    Nested factors (a channel implies its medium and status) make the naive
    design singular, so columns that are linear combinations of earlier ones
    are dropped and reported as aliased, the way statistical packages mark
    aliased coefficients. Returns (design, response, kept names, aliased
    names).
    """
    candidates: list[tuple[str, np.ndarray]] = [("intercept", np.ones(len(rows)))]
    for factor in factors:
        levels = _levels(rows, factor)
        if len(levels) < 2:
            raise SingleLevelFactor(f"factor {factor!r} has levels {levels}")
        for level in levels[1:]:
            indicator = np.array([1.0 if row.level(factor) == level else 0.0
                                  for row in rows])
            candidates.append((f"{factor}={level}", indicator))

    kept: list[np.ndarray] = []
    names: list[str] = []
    aliased: list[str] = []
    basis: list[np.ndarray] = []  # orthonormal, spans the kept columns
    for name, column in candidates:
        residual = column.astype(float)
        for q in basis:
            residual = residual - (q @ residual) * q
        norm = float(np.linalg.norm(residual))
        if norm > 1e-9 * max(1.0, float(np.linalg.norm(column))):
            basis.append(residual / norm)
            kept.append(column)
            names.append(name)
        else:
            aliased.append(name)
    design = np.column_stack(kept)
    response = np.array([row.y for row in rows], dtype=float)
    return design, response, names, aliased


@dataclass(frozen=True)
class OlsFit:
    coefficients: np.ndarray
    rss: float

    def predict(self, design: np.ndarray) -> np.ndarray:
        return design @ self.coefficients


def ols_fit(design: np.ndarray, response: np.ndarray) -> OlsFit:
    """Least squares via an orthogonal (SVD) decomposition, never the normal
    equations, so conditioning is governed by the design itself."""
    n, k = design.shape
    if n < k:
        raise RankDeficient(f"{n} rows < {k} columns")
    coefficients, _, rank, _ = np.linalg.lstsq(design, response, rcond=None)
    if rank < k:
        raise RankDeficient(f"design rank {rank} < {k} columns")
    residuals = response - design @ coefficients
    return OlsFit(coefficients=coefficients, rss=float(residuals @ residuals))


@dataclass(frozen=True)
class AnovaResult:
    factor: str
    ss_effect: float
    ss_residual: float
    ss_total: float
    df_effect: int
    df_residual: int
    f_stat: float
    p_value: float
    eta_squared: float


def one_way_anova(rows: Sequence[AnalysisRow], factor: str) -> AnovaResult:
    """Single-pass one-way decomposition with compensated summation:
    ss_effect = sum over levels of n_level * (mean_level - grand_mean)^2,
    F = (ss_effect/df_effect) / (ss_residual/df_residual), eta squared =
    ss_effect / ss_total."""
    groups: dict[str, list[float]] = {}
    for row in rows:
        groups.setdefault(row.level(factor), []).append(row.y)
    if len(groups) < 2:
        raise SingleLevelFactor(f"factor {factor!r} has levels {sorted(groups)}")
    n = len(rows)
    if n <= len(groups):
        raise ValueError(f"need more rows ({n}) than levels ({len(groups)})")

    grand = fsum(fsum(ys) for ys in groups.values()) / n
    means = {level: fsum(ys) / len(ys) for level, ys in groups.items()}
    ss_effect = fsum(len(ys) * (means[level] - grand) ** 2
                     for level, ys in groups.items())
    ss_residual = fsum(fsum((y - means[level]) ** 2 for y in ys)
                       for level, ys in groups.items())
    ss_total = fsum(fsum((y - grand) ** 2 for y in ys) for ys in groups.values())
    if ss_total <= 0.0:
        raise ZeroVariance(f"factor {factor!r}: zero total variance, F undefined")

    df_effect = len(groups) - 1
    df_residual = n - len(groups)
    if ss_residual == 0.0:
        f_stat = math.inf
        p_value = 0.0
    else:
        f_stat = (ss_effect / df_effect) / (ss_residual / df_residual)
        p_value = f_sf(f_stat, df_effect, df_residual)
    return AnovaResult(factor=factor, ss_effect=ss_effect, ss_residual=ss_residual,
                       ss_total=ss_total, df_effect=df_effect, df_residual=df_residual,
                       f_stat=f_stat, p_value=p_value, eta_squared=ss_effect / ss_total)


# --- regularized incomplete beta and the F tail ---

_BETA_TOL = 1e-14
_BETA_MAX_ITER = 500


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta (modified Lentz)."""
    tiny = 1e-300
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, _BETA_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _BETA_TOL:
            return h
    raise ArithmeticError(f"incomplete beta continued fraction did not converge "
                          f"(a={a}, b={b}, x={x})")


def betainc_regularized(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b), a, b > 0, x in [0, 1].

    Satisfies I_x(a, b) = 1 - I_{1-x}(b, a); the continued fraction is
    evaluated on whichever side converges fast.
    """
    if a <= 0 or b <= 0:
        raise ValueError(f"a and b must be positive, got a={a}, b={b}")
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x out of [0, 1]: {x}")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    ln_front = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
                + a * math.log(x) + b * math.log1p(-x))
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def f_sf(f: float, df1: int, df2: int) -> float:
    """Upper tail P(F > f) of the F distribution with (df1, df2) degrees of
    freedom; monotone decreasing in f."""
    if f <= 0.0:
        return 1.0
    if math.isinf(f):
        return 0.0
    x = df2 / (df2 + df1 * f)
    return betainc_regularized(df2 / 2.0, df1 / 2.0, x)


# --- per-factor report ---

@dataclass(frozen=True)
class FactorEffect:
    anova: AnovaResult
    significant: bool
    tier: str  # "none" below the small-effect threshold, else "small"


@dataclass(frozen=True)
class JointOlsSummary:
    column_names: list[str]
    aliased: list[str]  # columns dropped as linear combinations of others
    coefficients: np.ndarray
    rss: float
    r_squared: float


@dataclass(frozen=True)
class EffectReport:
    effects: list[FactorEffect]
    joint: JointOlsSummary

    def by_factor(self, factor: str) -> FactorEffect:
        for effect in self.effects:
            if effect.anova.factor == factor:
                return effect
        raise KeyError(factor)


def effect_report(rows: Sequence[AnalysisRow],
                  factors: Sequence[str] = FACTOR_NAMES,
                  alpha: float = DEFAULT_ALPHA,
                  eta_small: float = ETA_SQUARED_SMALL) -> EffectReport:
    """One-way ANOVA per factor (the per-factor p-values and eta squared)
    plus a joint additive OLS fit over all factors for inspection."""
    effects = []
    for factor in factors:
        result = one_way_anova(rows, factor)
        effects.append(FactorEffect(
            anova=result,
            significant=result.p_value < alpha,
            tier="small" if result.eta_squared >= eta_small else "none",
        ))
    design, response, names, aliased = build_joint_design(rows, factors)
    fit = ols_fit(design, response)
    grand = fsum(row.y for row in rows) / len(rows)
    ss_total = fsum((row.y - grand) ** 2 for row in rows)
    r_squared = 0.0 if ss_total == 0 else 1.0 - fit.rss / ss_total
    joint = JointOlsSummary(column_names=names, aliased=aliased,
                            coefficients=fit.coefficients,
                            rss=fit.rss, r_squared=r_squared)
    return EffectReport(effects=effects, joint=joint)


def group_means(rows: Sequence[AnalysisRow], factor: str) -> dict[str, float]:
    sums: dict[str, list[float]] = {}
    for row in rows:
        sums.setdefault(row.level(factor), []).append(row.y)
    return {level: fsum(ys) / len(ys) for level, ys in sorted(sums.items())}
