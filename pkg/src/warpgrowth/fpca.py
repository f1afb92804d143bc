"""Functional principal component analysis of a warping-function sample.

The sample covariance uses divisor n (not n - 1), all inner products use
trapezoid quadrature on the shared normalized grid, and the covariance
operator is diagonalized through the weighted symmetric eigenproblem of
``W^{1/2} G W^{1/2}``. Eigenfunction signs follow a deterministic rule:
flip so the quadrature integral of each eigenfunction is nonnegative,
breaking exact ties by the sign at the right endpoint.

Mean and covariance sums run in name-sorted series order, so refitting a
permuted sample reproduces the model bit for bit.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    DegenerateRegressorError,
    EmptySampleError,
    GridError,
    NumericalError,
    SampleSizeError,
)
from .quadrature import trapezoid_weights
from .timeseries import TimeGrid
from .warping import WarpSet

#: Cumulative variance-explained threshold used when no explicit component
#: count is requested.
DEFAULT_VAR_THRESHOLD = 0.999

DEFAULT_GAMMAS = (-2.0, -1.0, 0.0, 1.0, 2.0)


@dataclass(frozen=True)
class FpcaModel:
    """Fitted FPCA model.

    ``eigenvalues`` holds the full spectrum in nonincreasing order with
    tiny negatives floored at zero; ``eigenfunctions`` and
    ``var_explained`` cover the retained components only. ``scores`` are
    the quadrature projections of the centered warps onto each retained
    eigenfunction, one row per input series in input order;
    ``out_of_sample`` flags series that were excluded from estimation and
    only projected afterwards.
    """

    grid: TimeGrid
    mean: np.ndarray
    eigenvalues: np.ndarray
    eigenfunctions: np.ndarray
    var_explained: np.ndarray
    n_retained: int
    scores: np.ndarray
    score_names: tuple[str, ...]
    out_of_sample: np.ndarray
    n_sample: int

    @property
    def weights(self) -> np.ndarray:
        return trapezoid_weights(self.grid.n_points)

    @property
    def total_variance(self) -> float:
        return float(self.eigenvalues.sum())


@dataclass(frozen=True)
class ModesOfVariation:
    """Mean perturbed along one eigenfunction: mu + gamma * sqrt(lambda) * phi."""

    component: int
    gammas: tuple[float, ...]
    curves: np.ndarray  # (len(gammas), n_points)


@dataclass(frozen=True)
class RegressionLine:
    """Simple least squares line of score on growth rate, with correlation."""

    slope: float
    intercept: float
    correlation: float


def _sorted_matrix(warps: WarpSet) -> np.ndarray:
    order = sorted(range(warps.n_series), key=lambda i: warps.warps[i].series_name)
    return np.vstack([warps.warps[i].values for i in order])


def mean_function(warps: WarpSet) -> np.ndarray:
    """Pointwise sample mean of the warps."""
    if warps.n_series == 0:
        raise EmptySampleError("cannot average an empty warp sample")
    return _sorted_matrix(warps).mean(axis=0)


def covariance_function(warps: WarpSet) -> np.ndarray:
    """Sample covariance surface G(s, t) with divisor n, symmetrized.

    ``G(s, t) = (1/n) sum_i h_i(s) h_i(t) - mu(s) mu(t)``.
    """
    n = warps.n_series
    if n < 2:
        raise SampleSizeError(f"covariance needs at least 2 series, got {n}")
    h = _sorted_matrix(warps)
    mu = h.mean(axis=0)
    g = (h.T @ h) / n - np.outer(mu, mu)
    return (g + g.T) / 2.0


def eigendecompose(g: np.ndarray, grid: TimeGrid) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and orthonormal eigenfunctions of the covariance operator.

    Solves the symmetric eigenproblem of ``W^{1/2} G W^{1/2}`` with
    trapezoid weights ``W`` and maps eigenvectors back to functions
    ``phi_k = W^{-1/2} v_k``, normalized so the quadrature norm is 1.
    Returns the full spectrum in nonincreasing order (one function per
    grid point); negatives within rounding of zero are floored at 0.

    Raises
    ------
    NumericalError
        If ``g`` is asymmetric beyond tolerance.
    """
    g = np.asarray(g, dtype=float)
    m = grid.n_points
    if g.shape != (m, m):
        raise GridError(f"covariance is {g.shape}, grid has {m} points")
    scale = max(1.0, float(np.abs(g).max()))
    if float(np.abs(g - g.T).max()) > 1e-8 * scale:
        raise NumericalError("covariance surface is asymmetric beyond tolerance")
    g = (g + g.T) / 2.0

    w = trapezoid_weights(m)
    sqrt_w = np.sqrt(w)
    b = g * np.outer(sqrt_w, sqrt_w)
    vals, vecs = scipy.linalg.eigh(b)
    vals = vals[::-1]
    vecs = vecs[:, ::-1]

    floor = 1e-10 * max(float(vals[0]), 0.0)
    vals = np.where((vals < 0.0) & (vals >= -floor), 0.0, vals)

    phi = vecs.T / sqrt_w
    norms = np.sqrt((phi**2 @ w))
    phi = phi / norms[:, None]
    integrals = phi @ w
    for k in range(m):
        s = integrals[k]
        if s < -1e-12 or (abs(s) <= 1e-12 and phi[k, -1] < 0.0):
            phi[k] = -phi[k]
    return vals, phi


def project_scores(warps: WarpSet, model: FpcaModel) -> np.ndarray:
    """Project warps onto the model: ``s_ik = <h_i - mu, phi_k>``.

    Works for in-sample and held-out series alike; each row depends only on
    its own warp. Rows follow the warp-set order.

    Raises
    ------
    GridError
        If the warps are not on the model grid.
    """
    if warps.grid.n_points != model.grid.n_points or not warps.grid.normalized:
        raise GridError("warps are not on the model's normalized grid")
    h = warps.matrix()
    weighted_phi = model.eigenfunctions * model.weights
    return (h - model.mean) @ weighted_phi.T


def fit_fpca(
    warps: WarpSet,
    exclude: tuple[str, ...] | list[str] = (),
    k: int | None = None,
    var_threshold: float = DEFAULT_VAR_THRESHOLD,
) -> FpcaModel:
    """Fit the FPCA model, optionally holding named series out of estimation.

    Excluded series do not enter the mean or covariance; their scores are
    projections onto the fitted components, flagged out-of-sample. The
    number of retained components is ``k`` when given, otherwise the
    smallest count whose cumulative variance fraction reaches
    ``var_threshold`` (at least one).

    Raises
    ------
    SampleSizeError
        If fewer than 2 series remain after exclusion.
    """
    exclude = tuple(exclude)
    unknown = [name for name in exclude if name not in warps.names]
    if unknown:
        raise KeyError(f"excluded names not in the sample: {unknown}")
    included = WarpSet(warps.grid, tuple(w for w in warps.warps if w.series_name not in exclude))
    if included.n_series < 2:
        raise SampleSizeError(f"need at least 2 series after exclusion, got {included.n_series}")

    mu = mean_function(included)
    g = covariance_function(included)
    vals, phi = eigendecompose(g, warps.grid)

    total = float(vals.sum())
    fractions = vals / total if total > 0.0 else np.zeros_like(vals)
    if k is not None:
        if not 1 <= k <= vals.shape[0]:
            raise IndexError(f"k must be in [1, {vals.shape[0]}], got {k}")
        n_retained = int(k)
    else:
        cumulative = np.cumsum(fractions)
        reached = np.nonzero(cumulative >= var_threshold - 1e-15)[0]
        n_retained = int(reached[0]) + 1 if reached.size else vals.shape[0]

    weights = trapezoid_weights(warps.grid.n_points)
    scores = (warps.matrix() - mu) @ (phi[:n_retained] * weights).T
    return FpcaModel(
        grid=warps.grid,
        mean=mu,
        eigenvalues=vals,
        eigenfunctions=phi[:n_retained],
        var_explained=fractions[:n_retained],
        n_retained=n_retained,
        scores=scores,
        score_names=warps.names,
        out_of_sample=np.array([w.series_name in exclude for w in warps.warps]),
        n_sample=included.n_series,
    )


def modes_of_variation(model: FpcaModel, k: int, gammas=DEFAULT_GAMMAS) -> ModesOfVariation:
    """Curves ``mu + gamma * sqrt(lambda_k) * phi_k`` for each gamma.

    ``k`` is 1-based and must refer to a retained component.
    """
    if not 1 <= k <= model.n_retained:
        raise IndexError(f"component {k} outside retained range [1, {model.n_retained}]")
    lam = max(float(model.eigenvalues[k - 1]), 0.0)
    phi = model.eigenfunctions[k - 1]
    gammas = tuple(float(g) for g in gammas)
    curves = np.vstack([model.mean + g * np.sqrt(lam) * phi for g in gammas])
    return ModesOfVariation(k, gammas, curves)


def score_rate_regression(scores: np.ndarray, alphas: np.ndarray) -> list[RegressionLine]:
    """Per-component least squares of score on growth rate.

    Returns slope, intercept and Pearson correlation for each score column.
    A constant score column gets slope 0 and correlation 0.

    Raises
    ------
    SampleSizeError
        If fewer than 3 observations are supplied.
    DegenerateRegressorError
        If the rates have zero variance.
    """
    scores = np.atleast_2d(np.asarray(scores, dtype=float))
    alphas = np.asarray(alphas, dtype=float)
    if scores.shape[0] == 1 and alphas.shape[0] != 1:
        scores = scores.T
    if scores.shape[0] != alphas.shape[0]:
        raise ValueError(f"{scores.shape[0]} score rows vs {alphas.shape[0]} rates")
    if alphas.shape[0] < 3:
        raise SampleSizeError(f"regression needs at least 3 points, got {alphas.shape[0]}")
    xc = alphas - alphas.mean()
    sxx = float(np.sum(xc**2))
    if sxx == 0.0:
        raise DegenerateRegressorError("growth rates have zero variance")
    lines = []
    for col in scores.T:
        yc = col - col.mean()
        sxy = float(np.dot(xc, yc))
        syy = float(np.sum(yc**2))
        slope = sxy / sxx
        intercept = float(col.mean() - slope * alphas.mean())
        corr = sxy / np.sqrt(sxx * syy) if syy > 0.0 else 0.0
        lines.append(RegressionLine(slope, intercept, float(corr)))
    return lines


def model_to_json_dict(model: FpcaModel) -> dict:
    """JSON-ready summary: spectrum, variance fractions and score table."""
    return {
        "n_sample": model.n_sample,
        "n_retained": model.n_retained,
        "eigenvalues": [float(v) for v in model.eigenvalues],
        "var_explained": [float(v) for v in model.var_explained],
        "total_variance": model.total_variance,
        "scores": [
            {
                "name": name,
                "out_of_sample": bool(model.out_of_sample[i]),
                "scores": [float(s) for s in model.scores[i]],
            }
            for i, name in enumerate(model.score_names)
        ],
    }


def eigenfunctions_to_csv(model: FpcaModel) -> str:
    """Mean and eigenfunctions as CSV, raw and scaled by sqrt(lambda_k).

    Layout matches the warp export: one ``t_normalized`` column followed by
    value columns, floats at 17 significant digits.
    """
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    ks = range(1, model.n_retained + 1)
    writer.writerow(
        ["t_normalized", "mean", *(f"phi_{k}" for k in ks), *(f"phi_scaled_{k}" for k in ks)]
    )
    t = model.grid.points
    roots = np.sqrt(np.maximum(model.eigenvalues[: model.n_retained], 0.0))
    scaled = model.eigenfunctions * roots[:, None]
    for i in range(model.grid.n_points):
        row = [f"{t[i]:.17g}", f"{model.mean[i]:.17g}"]
        row += [f"{v:.17g}" for v in model.eigenfunctions[:, i]]
        row += [f"{v:.17g}" for v in scaled[:, i]]
        writer.writerow(row)
    return out.getvalue()


def modes_to_csv(modes: ModesOfVariation, grid: TimeGrid) -> str:
    """Modes-of-variation plot data: ``t,gamma_-2,...,gamma_2``."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["t", *(f"gamma_{g:g}" for g in modes.gammas)])
    t = grid.points
    for i in range(grid.n_points):
        writer.writerow([f"{t[i]:.17g}", *(f"{c[i]:.17g}" for c in modes.curves)])
    return out.getvalue()
