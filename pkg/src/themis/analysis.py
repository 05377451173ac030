"""Statistical layer: standardization, PCA, signed influence, trend extrapolation."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence, Tuple

import numpy as np

from .errors import ThemisError
from .model import AdjacencyMatrix, ParameterSeries

SIGN_SELF = "self"
SIGN_PLUS = "plus"
SIGN_MINUS = "minus"
SIGN_NONE = "none"


class AnalysisError(ThemisError):
    pass


@dataclass(frozen=True)
class StandardizedPanel:
    variables: tuple
    years: tuple
    values: np.ndarray  # (year x variable) z-scores
    means: tuple
    stds: tuple
    constant: tuple  # per-variable bool

    def column(self, var: str) -> np.ndarray:
        return self.values[:, self.variables.index(var)]


@dataclass(frozen=True)
class PcaResult:
    eigenvalues: tuple  # descending, >= 0
    components: np.ndarray  # (component x variable), orthonormal rows
    explained_variance_ratio: tuple


@dataclass(frozen=True)
class KeyVariableSet:
    selected: tuple
    selection_trace: tuple  # (variable, component_index, loading)


@dataclass(frozen=True)
class SignMatrix:
    variables: tuple
    entries: tuple  # square, values in {self, plus, minus, none}
    evidence: tuple  # square, per-cell (r, n_pairs) or None

    def entry(self, src: str, dst: str) -> str:
        return self.entries[self.variables.index(src)][self.variables.index(dst)]


@dataclass(frozen=True)
class TrendModel:
    parameter_id: str
    slope: float
    intercept: float
    residual_std: float
    fit_window: Tuple[int, int]
    n_obs: int
    year_mean: float
    year_ss: float  # sum of squared year deviations


# ---------------------------------------------------------------------------

def standardize(series: Sequence[ParameterSeries],
                year_range: Optional[Tuple[int, int]] = None) -> StandardizedPanel:
    """Z-score each series over the intersection of observed years.

    Sample statistics (ddof=1). Constant columns are flagged and zeroed.
    """
    if not series:
        raise AnalysisError("no series to standardize")
    common = None
    for s in series:
        ys = set(s.years())
        if year_range is not None:
            ys = {y for y in ys if year_range[0] <= y <= year_range[1]}
        common = ys if common is None else (common & ys)
    if not common:
        raise AnalysisError("empty year intersection across series")
    years = tuple(sorted(common))
    if len(years) < 2:
        raise AnalysisError("fewer than 2 common years")

    variables = tuple(s.parameter_id for s in series)
    raw = np.empty((len(years), len(series)), dtype=float)
    for j, s in enumerate(series):
        lookup = dict(s.observations)
        raw[:, j] = [lookup[y] for y in years]

    means = raw.mean(axis=0)
    stds = raw.std(axis=0, ddof=1)
    constant = stds <= 0.0
    z = np.zeros_like(raw)
    nz = ~constant
    z[:, nz] = (raw[:, nz] - means[nz]) / stds[nz]
    return StandardizedPanel(
        variables=variables, years=years, values=z,
        means=tuple(means), stds=tuple(stds), constant=tuple(bool(c) for c in constant))


# ---------------------------------------------------------------------------
# PCA via cyclic Jacobi rotations

def jacobi_eigh(a: np.ndarray, tol: float = 1e-12, max_sweeps: int = 100):
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Returns (eigenvalues, eigenvectors) with eigenvectors in columns,
    sorted by descending eigenvalue.
    """
    a = np.array(a, dtype=float, copy=True)
    n = a.shape[0]
    if a.ndim != 2 or a.shape[1] != n:
        raise AnalysisError("jacobi_eigh needs a square matrix")
    if not np.allclose(a, a.T, atol=1e-10):
        raise AnalysisError("jacobi_eigh needs a symmetric matrix")
    v = np.eye(n)
    for _ in range(max_sweeps):
        # norm of the off-diagonal part, computed without cancellation
        off = math.sqrt(float(((a - np.diag(np.diag(a))) ** 2).sum()))
        if off < tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) < tol / max(1, n * n):
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                rot = np.eye(n)
                rot[p, p] = c
                rot[q, q] = c
                rot[p, q] = s
                rot[q, p] = -s
                a = rot.T @ a @ rot
                v = v @ rot
    eigenvalues = np.diag(a).copy()
    order = np.argsort(-eigenvalues)
    return eigenvalues[order], v[:, order]


def pca(panel: StandardizedPanel) -> PcaResult:
    n_years, n_vars = panel.values.shape
    if n_vars < 2 or n_years < 2:
        raise AnalysisError("panel needs >= 2 variables and >= 2 years")
    if all(panel.constant):
        raise AnalysisError("degenerate panel: all columns constant")
    cov = (panel.values.T @ panel.values) / (n_years - 1)
    eigenvalues, vectors = jacobi_eigh(cov)
    eigenvalues = np.clip(eigenvalues, 0.0, None)
    components = vectors.T.copy()
    # deterministic sign: largest-|loading| entry positive
    for k in range(components.shape[0]):
        j = int(np.argmax(np.abs(components[k])))
        if components[k, j] < 0:
            components[k] = -components[k]
    total = float(eigenvalues.sum())
    if total <= 0:
        raise AnalysisError("covariance has zero trace")
    return PcaResult(
        eigenvalues=tuple(float(x) for x in eigenvalues),
        components=components,
        explained_variance_ratio=tuple(float(x / total) for x in eigenvalues))


def select_key_variables(pca_result: PcaResult, panel: StandardizedPanel,
                         variance_threshold: float = 0.90,
                         max_vars: int = 7) -> KeyVariableSet:
    """Nominate the max-|loading| variable of each retained component.

    Retains the smallest prefix of components whose cumulative explained
    variance reaches the threshold; deduplicates in nomination order.
    """
    if not 0.0 < variance_threshold <= 1.0:
        raise AnalysisError("variance_threshold must be in (0, 1]")
    if max_vars < 1:
        raise AnalysisError("max_vars must be >= 1")
    cumulative = 0.0
    retained = 0
    for ratio in pca_result.explained_variance_ratio:
        retained += 1
        cumulative += ratio
        if cumulative >= variance_threshold - 1e-12:
            break
    selected = []
    trace = []
    for k in range(retained):
        loadings = pca_result.components[k]
        j = int(np.argmax(np.abs(loadings)))  # ties: lowest variable index
        var = panel.variables[j]
        trace.append((var, k, float(loadings[j])))
        if var not in selected:
            selected.append(var)
    selected = selected[:max_vars]
    return KeyVariableSet(selected=tuple(selected), selection_trace=tuple(trace))


# ---------------------------------------------------------------------------
# signed influence

def _pearson(x: np.ndarray, y: np.ndarray) -> float:
    x = x - x.mean()
    y = y - y.mean()
    denom = math.sqrt(float((x * x).sum()) * float((y * y).sum()))
    if denom == 0.0:
        return 0.0
    return float((x * y).sum()) / denom


def estimate_signs(panel: StandardizedPanel, keys: KeyVariableSet,
                   adjacency: Optional[AdjacencyMatrix] = None,
                   r_threshold: float = 0.3) -> SignMatrix:
    """Directional signs from one-year-lagged first-difference correlations.

    entry(i -> j) reads: a change in i is followed one year later by a
    same-direction (plus) or opposite-direction (minus) change in j.
    """
    if not 0.0 < r_threshold < 1.0:
        raise AnalysisError("r_threshold must be in (0, 1)")
    for k in keys.selected:
        if k not in panel.variables:
            raise AnalysisError(f"key variable {k!r} not in panel")
    variables = keys.selected
    diffs = {v: np.diff(panel.column(v)) for v in variables}
    entries = []
    evidence = []
    for i, vi in enumerate(variables):
        row = []
        row_ev = []
        for j, vj in enumerate(variables):
            if i == j:
                row.append(SIGN_SELF)
                row_ev.append(None)
                continue
            if adjacency is not None and not adjacency.allows(vi, vj):
                row.append(SIGN_NONE)
                row_ev.append(None)
                continue
            di = diffs[vi][:-1]
            dj = diffs[vj][1:]
            n_pairs = len(di)
            if n_pairs < 3:
                row.append(SIGN_NONE)
                row_ev.append(("insufficient", n_pairs))
                continue
            r = _pearson(di, dj)
            if r >= r_threshold:
                row.append(SIGN_PLUS)
            elif r <= -r_threshold:
                row.append(SIGN_MINUS)
            else:
                row.append(SIGN_NONE)
            row_ev.append((r, n_pairs))
        entries.append(tuple(row))
        evidence.append(tuple(row_ev))
    return SignMatrix(variables=variables, entries=tuple(entries), evidence=tuple(evidence))


SIGN_GLYPHS = {SIGN_SELF: "1", SIGN_PLUS: "+", SIGN_MINUS: "-", SIGN_NONE: "x"}


def sign_matrix_table(signs: SignMatrix) -> str:
    """Render the sign matrix with the +/-/x/1 glyph convention."""
    width = max(len(v) for v in signs.variables) + 2
    header = " " * width + "".join(v.ljust(width) for v in signs.variables)
    lines = [header]
    for i, v in enumerate(signs.variables):
        cells = "".join(SIGN_GLYPHS[e].ljust(width) for e in signs.entries[i])
        lines.append(v.ljust(width) + cells)
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# trends

def fit_trend(series: ParameterSeries) -> TrendModel:
    """Ordinary least squares of value on year."""
    obs = series.observations
    years = np.array([y for y, _ in obs], dtype=float)
    values = np.array([v for _, v in obs], dtype=float)
    if len(set(years)) < 2:
        raise AnalysisError(
            f"series {series.parameter_id!r} needs >= 2 distinct years for a trend")
    n = len(years)
    ym = years.mean()
    vm = values.mean()
    ss = float(((years - ym) ** 2).sum())
    slope = float(((years - ym) * (values - vm)).sum()) / ss
    intercept = vm - slope * ym
    residuals = values - (slope * years + intercept)
    sse = float((residuals ** 2).sum())
    residual_std = math.sqrt(sse / (n - 2)) if n > 2 else 0.0
    return TrendModel(
        parameter_id=series.parameter_id, slope=slope, intercept=intercept,
        residual_std=residual_std, fit_window=(int(years[0]), int(years[-1])),
        n_obs=n, year_mean=ym, year_ss=ss)


def extrapolate(trend: TrendModel, target_year: int) -> Tuple[float, float]:
    """Point prediction and prediction-interval std at a future year."""
    if target_year < trend.fit_window[1]:
        raise AnalysisError(
            f"target year {target_year} precedes fit window end {trend.fit_window[1]}")
    mean = trend.slope * target_year + trend.intercept
    if trend.residual_std == 0.0:
        return mean, 0.0
    widen = 1.0 + 1.0 / trend.n_obs + (target_year - trend.year_mean) ** 2 / trend.year_ss
    return mean, trend.residual_std * math.sqrt(widen)
