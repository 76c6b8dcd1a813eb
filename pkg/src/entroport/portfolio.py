"""Portfolio weights: cluster-entropy allocation, max-Sharpe baseline, diagnostics."""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DataError, NoTangencyError

logger = logging.getLogger(__name__)

SIMPLEX_TOL = 1e-9


class RiskProfile(Enum):
    HIGH_RISK = "high"
    LOW_RISK = "low"


@dataclass(frozen=True)
class WeightVector:
    """Long-only allocation over labeled assets; non-negative, unit sum."""

    weights: np.ndarray
    labels: tuple[str, ...]

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "labels", tuple(self.labels))
        if len(w) != len(self.labels):
            raise DataError("weights and labels must have equal length")
        if np.any(w < -SIMPLEX_TOL):
            raise DataError(f"negative weight in {w}")
        if abs(w.sum() - 1.0) > SIMPLEX_TOL:
            raise DataError(f"weights sum to {w.sum()}, not 1")

    def __len__(self) -> int:
        return len(self.weights)


@dataclass(frozen=True)
class MomentEstimates:
    """Per-asset expected returns and return covariance (same period units)."""

    mu: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        mu = np.asarray(self.mu, dtype=float)
        sigma = np.asarray(self.sigma, dtype=float)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma", sigma)
        if sigma.shape != (len(mu), len(mu)):
            raise DataError(f"covariance shape {sigma.shape} does not match {len(mu)} assets")
        if not np.allclose(sigma, sigma.T, rtol=1e-8, atol=1e-12):
            raise DataError("covariance matrix must be symmetric")


def portfolio_mean(w: WeightVector, mu: np.ndarray) -> float:
    mu = np.asarray(mu, dtype=float)
    if len(mu) != len(w):
        raise DataError(f"{len(w)} weights vs {len(mu)} expected returns")
    return float(w.weights @ mu)


def portfolio_variance(w: WeightVector, sigma: np.ndarray) -> float:
    sigma = np.asarray(sigma, dtype=float)
    if sigma.shape != (len(w), len(w)):
        raise DataError(f"covariance shape {sigma.shape} does not match {len(w)} weights")
    if not np.allclose(sigma, sigma.T, rtol=1e-8, atol=1e-12):
        raise DataError("covariance matrix must be symmetric")
    var = float(w.weights @ sigma @ w.weights)
    if var < -1e-12:
        raise DataError(f"covariance is not positive semi-definite (w'Sw = {var})")
    return max(var, 0.0)


def sharpe_ratio(w: WeightVector, mu: np.ndarray, sigma: np.ndarray) -> float:
    """Mean over standard deviation; no risk-free rate term."""
    var = portfolio_variance(w, sigma)
    if var <= 0:
        raise DataError("portfolio variance is zero; Sharpe ratio undefined")
    return portfolio_mean(w, mu) / np.sqrt(var)


# --- max-Sharpe optimizer ----------------------------------------------------

def _project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the probability simplex."""
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    rho = np.nonzero(u * np.arange(1, len(v) + 1) > css)[0][-1]
    theta = css[rho] / (rho + 1.0)
    return np.maximum(v - theta, 0.0)


def _sharpe(w: np.ndarray, mu: np.ndarray, sigma: np.ndarray) -> float:
    var = float(w @ sigma @ w)
    if var <= 0:
        return -np.inf
    return float(w @ mu) / np.sqrt(var)


def _ascend(w0: np.ndarray, mu: np.ndarray, sigma: np.ndarray,
            max_iter: int = 500) -> np.ndarray:
    """Projected-gradient ascent on the Sharpe ratio with backtracking."""
    w = w0.copy()
    f = _sharpe(w, mu, sigma)
    step = 1.0
    for _ in range(max_iter):
        var = float(w @ sigma @ w)
        if var <= 0:
            break
        sp = np.sqrt(var)
        grad = mu / sp - (float(w @ mu) / (sp * var)) * (sigma @ w)
        improved = False
        t = step
        for _ in range(40):
            cand = _project_simplex(w + t * grad)
            fc = _sharpe(cand, mu, sigma)
            if fc > f + 1e-15:
                w, f = cand, fc
                step = min(t * 2.0, 1e6)
                improved = True
                break
            t *= 0.5
        if not improved:
            break
    return w


def simplex_grid(n_assets: int, divisions: int):
    """All weight vectors with components k/divisions summing to 1."""
    for comp in itertools.combinations_with_replacement(range(n_assets), divisions):
        counts = np.bincount(comp, minlength=n_assets)
        yield counts / divisions


def max_sharpe_weights(moments: MomentEstimates,
                       labels: tuple[str, ...] | None = None,
                       grid_divisions: int = 10) -> WeightVector:
    """Long-only weights maximizing the Sharpe ratio.

    Runs projected-gradient ascent from several starts (uniform, best vertex,
    clipped unconstrained tangency, best coarse-grid point) and returns the
    best; singular covariances get an automatic ridge of 1e-10 * trace / N.
    """
    mu = moments.mu
    sigma = moments.sigma.copy()
    n = len(mu)
    if labels is None:
        labels = tuple(f"asset_{i}" for i in range(n))
    if n == 1:
        return WeightVector(np.ones(1), labels)
    if np.all(mu <= 0):
        raise NoTangencyError("all expected returns are non-positive")

    eigmin = float(np.linalg.eigvalsh(sigma).min())
    if eigmin < 1e-14 * max(np.trace(sigma), 1e-300):
        eps = 1e-10 * np.trace(sigma) / n
        logger.warning("covariance near-singular (min eig %.3e); adding ridge %.3e",
                       eigmin, eps)
        sigma = sigma + eps * np.eye(n)

    starts = [np.full(n, 1.0 / n)]
    vertex_scores = [
        _sharpe(np.eye(n)[i], mu, sigma) for i in range(n)
    ]
    starts.append(np.eye(n)[int(np.argmax(vertex_scores))])
    try:
        tangency = np.linalg.solve(sigma, mu)
        tangency = np.maximum(tangency, 0.0)
        if tangency.sum() > 0:
            starts.append(tangency / tangency.sum())
    except np.linalg.LinAlgError:
        pass
    if n <= 6:
        grid = list(simplex_grid(n, grid_divisions))
        scores = [_sharpe(g, mu, sigma) for g in grid]
        starts.append(grid[int(np.argmax(scores))])

    best, best_f = None, -np.inf
    for w0 in starts:
        w = _ascend(w0, mu, sigma)
        f = _sharpe(w, mu, sigma)
        if f > best_f:
            best, best_f = w, f

    # guaranteed no worse than every vertex and the uniform portfolio
    refs = [np.eye(n)[i] for i in range(n)] + [np.full(n, 1.0 / n)]
    for r in refs:
        if _sharpe(r, mu, sigma) > best_f:
            best, best_f = r, _sharpe(r, mu, sigma)

    best = np.maximum(best, 0.0)
    best = best / best.sum()
    return WeightVector(best, labels)


# --- entropy-based weights and diagnostics -----------------------------------

def cluster_entropy_weights(indices, labels: tuple[str, ...],
                            profile: RiskProfile = RiskProfile.HIGH_RISK) -> WeightVector:
    """Normalize aggregate cluster-entropy indices into allocation weights.

    High-risk: w_i proportional to I_i. Low-risk: proportional to 1/I_i
    (monotone-reversing extension; not prescribed by the high-risk rule).
    """
    ivals = np.asarray(indices, dtype=float)
    if len(ivals) < 2:
        raise DataError("need at least 2 assets")
    if np.any(ivals <= 0):
        raise DataError(f"all indices must be positive, got {ivals}")
    if profile is RiskProfile.HIGH_RISK:
        w = ivals / ivals.sum()
    else:
        inv = 1.0 / ivals
        w = inv / inv.sum()
    return WeightVector(w, labels)


def naive_weights(labels: tuple[str, ...]) -> WeightVector:
    """Equal 1/N allocation."""
    n = len(labels)
    return WeightVector(np.full(n, 1.0 / n), labels)


def weight_entropy(w: WeightVector) -> float:
    """Shannon entropy of the weight distribution, with 0 ln 0 = 0."""
    wv = w.weights[w.weights > 0]
    return float(-(wv * np.log(wv)).sum())


def kl_cross_entropy(w: WeightVector, u: WeightVector) -> float:
    """-sum w_i ln(w_i / u_i): negative of the conventional KL divergence.

    Zero iff w equals u on common support, negative otherwise.
    """
    if len(w) != len(u):
        raise DataError("weight vectors must have equal length")
    mask = w.weights > 0
    if np.any(u.weights[mask] <= 0):
        raise DataError("reference weights must be positive wherever w is positive")
    wv = w.weights[mask]
    uv = u.weights[mask]
    return float(-(wv * np.log(wv / uv)).sum())
