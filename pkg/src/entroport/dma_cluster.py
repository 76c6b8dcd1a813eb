"""Moving-average cluster machinery.

A cluster is the stretch of a series between two consecutive intersections
with its trailing moving average. Durations are counted in sampling units,
binned into an empirical distribution, turned into a per-bin entropy curve
(surprisal by default) and summed into a scalar index per moving-average
window, split at a threshold between the power-law and linear regimes.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError, EmptyInputError, InsufficientClustersError
from .series import SampledSeries

logger = logging.getLogger(__name__)

#: clusters required before a duration distribution counts as statistically valid
MIN_CLUSTERS = 50


@dataclass(frozen=True)
class MovingAverageGrid:
    """Strictly ascending moving-average window lengths, in samples (each >= 2)."""

    n_values: tuple[int, ...]

    def __post_init__(self):
        vals = tuple(int(n) for n in self.n_values)
        object.__setattr__(self, "n_values", vals)
        if not vals:
            raise DataError("grid must contain at least one window length")
        if any(n < 2 for n in vals):
            raise DataError("all window lengths must be >= 2")
        if any(b <= a for a, b in zip(vals, vals[1:])):
            raise DataError("window lengths must be strictly ascending")

    @classmethod
    def from_range(cls, n_min: int, n_max: int, step: int) -> "MovingAverageGrid":
        return cls(tuple(range(n_min, n_max + 1, step)))


@dataclass(frozen=True)
class ClusterDistribution:
    """Histogram of cluster durations for one window length n.

    counts maps duration (samples) to its cluster count; probabilities is the
    normalized version. Counts may be fractional when a model distribution is
    supplied directly (diagnostics and tests).
    """

    n: int
    counts: dict[int, float]
    total: float = field(init=False)
    probabilities: dict[int, float] = field(init=False)

    def __post_init__(self):
        if not self.counts:
            raise EmptyInputError("distribution needs at least one duration bin")
        if any(tau < 1 for tau in self.counts):
            raise DataError("durations must be >= 1 sample")
        total = float(sum(self.counts.values()))
        if total <= 0:
            raise DataError("total cluster count must be positive")
        probs = {tau: c / total for tau, c in sorted(self.counts.items())}
        object.__setattr__(self, "total", total)
        object.__setattr__(self, "probabilities", probs)

    def taus(self) -> np.ndarray:
        return np.array(sorted(self.counts), dtype=float)


@dataclass(frozen=True)
class EntropyCurve:
    """Per-duration entropy values S(tau, n) in nats, observed bins only."""

    n: int
    points: dict[int, float]

    def __post_init__(self):
        if any(s < -1e-12 for s in self.points.values()):
            raise DataError("entropy values must be non-negative")


@dataclass(frozen=True)
class EntropyIndex:
    """Scalar index for one window length, split at threshold m."""

    n: int
    threshold: int
    value: float
    power_law_part: float
    linear_part: float


@dataclass(frozen=True)
class ClusterModelFit:
    """Power-law + exponential-cutoff fit diagnostics.

    D is the fitted fractal dimension (Hurst exponent = 2 - D); S0 the fitted
    intercept of the surprisal curve; linear_slope the fitted slope of the
    large-duration linear regime (nan when too few bins).
    """

    D: float
    S0: float
    linear_slope: float
    tau_range: tuple[float, float]


def moving_average(y: SampledSeries, n: int) -> SampledSeries:
    """Trailing (causal) mean of the n most recent samples; len out = len - n + 1."""
    v = y.values
    if not 2 <= n <= len(v):
        raise DataError(f"window n={n} out of range for series of length {len(v)}")
    out = np.convolve(v, np.full(n, 1.0 / n), mode="valid")
    return y.with_values(out, start_time=y.start_time + (n - 1) * y.delta)


def crossing_times(y: SampledSeries, n: int) -> np.ndarray:
    """Sample indices where y - moving_average strictly changes sign.

    Exact zeros are not crossings; runs of zeros are absorbed into the
    preceding cluster. Indices are absolute positions in y (the overlap
    region starts at n - 1).
    """
    ma = moving_average(y, n).values
    diff = y.values[n - 1:] - ma
    sign = np.sign(diff)
    nz = np.flatnonzero(sign)
    if len(nz) < 2:
        return np.empty(0, dtype=np.int64)
    sv = sign[nz]
    change = sv[1:] != sv[:-1]
    return (nz[1:][change] + (n - 1)).astype(np.int64)


def extract_clusters(y: SampledSeries, n: int) -> np.ndarray:
    """Cluster durations (samples) between consecutive crossings.

    Partial segments before the first and after the last crossing are
    discarded. Fewer than two crossings yields an empty result.
    """
    t = crossing_times(y, n)
    if len(t) < 2:
        return np.empty(0, dtype=np.int64)
    return np.diff(t)


def cluster_distribution(durations, n: int,
                         min_clusters: int = MIN_CLUSTERS) -> ClusterDistribution:
    """Histogram of integer durations; errors below min_clusters observations."""
    durations = np.asarray(durations)
    if len(durations) < min_clusters:
        raise InsufficientClustersError(
            f"{len(durations)} clusters at n={n}, need >= {min_clusters}"
        )
    taus, counts = np.unique(durations.astype(np.int64), return_counts=True)
    return ClusterDistribution(n=n, counts={int(t): int(c)
                                            for t, c in zip(taus, counts)})


def entropy_curve(dist: ClusterDistribution,
                  estimator: str = "surprisal") -> EntropyCurve:
    """Entropy per observed duration bin.

    estimator='surprisal' (default): S = -ln P(tau, n), which grows
    logarithmically in the power-law regime and linearly past the cutoff.
    estimator='shannon_term': the per-bin summand -P ln P, kept switchable
    for sensitivity studies.
    """
    if estimator not in ("surprisal", "shannon_term"):
        raise ValueError(f"unknown estimator {estimator!r}")
    points = {}
    for tau, p in dist.probabilities.items():
        if estimator == "surprisal":
            s = -np.log(p)
        else:
            s = -p * np.log(p)
        points[tau] = max(float(s), 0.0)
    return EntropyCurve(n=dist.n, points=points)


def entropy_index(curve: EntropyCurve, m: int) -> EntropyIndex:
    """Sum the entropy curve, split at threshold m.

    Bins with tau <= m feed the power-law part, tau > m the linear part;
    the shared endpoint tau = m is counted once, in the power-law part.
    """
    if m < 1:
        raise DataError(f"threshold m must be >= 1, got {m}")
    if not curve.points:
        raise EmptyInputError("entropy curve has no points")
    power = sum(s for tau, s in curve.points.items() if tau <= m)
    linear = sum(s for tau, s in curve.points.items() if tau > m)
    return EntropyIndex(n=curve.n, threshold=m, value=power + linear,
                        power_law_part=power, linear_part=linear)


def aggregate_index(indices: list[EntropyIndex], how: str = "sum") -> float:
    """Combine per-window indices over the grid; sum by default.

    Switching to the arithmetic mean rescales every asset's aggregate by the
    same factor, so normalized portfolio weights are unchanged.
    """
    if not indices:
        raise EmptyInputError("no entropy indices to aggregate")
    if how not in ("sum", "mean"):
        raise ValueError(f"unknown aggregation {how!r}")
    total = float(sum(ix.value for ix in indices))
    return total / len(indices) if how == "mean" else total


def compute_entropy_index(y: SampledSeries, n: int, *, threshold_m: int | None = None,
                          estimator: str = "surprisal",
                          min_clusters: int = MIN_CLUSTERS) -> EntropyIndex:
    """Convenience path: series -> clusters -> distribution -> curve -> index.

    threshold_m defaults to n, the expected power-law / exponential crossover.
    """
    durations = extract_clusters(y, n)
    dist = cluster_distribution(durations, n, min_clusters=min_clusters)
    curve = entropy_curve(dist, estimator=estimator)
    return entropy_index(curve, n if threshold_m is None else threshold_m)


def fit_cluster_model(dist: ClusterDistribution,
                      fit_range: tuple[float, float]) -> ClusterModelFit:
    """Least-squares power-law fit ln P = -D ln tau + const over fit_range.

    Also fits the linear regime slope of the surprisal curve on
    tau in (n, 5n] when at least 3 bins fall there (nan otherwise).
    """
    lo, hi = fit_range
    taus = dist.taus()
    probs = np.array([dist.probabilities[int(t)] for t in taus])
    in_range = (taus >= lo) & (taus <= hi)
    if in_range.sum() < 3:
        raise DataError(
            f"need >= 3 bins in fit range [{lo}, {hi}], got {int(in_range.sum())}"
        )
    slope, intercept = np.polyfit(np.log(taus[in_range]),
                                  np.log(probs[in_range]), 1)
    d_fit = -float(slope)
    s0 = -float(intercept)

    lin_mask = (taus > dist.n) & (taus <= 5 * dist.n)
    if lin_mask.sum() >= 3:
        surprisal = -np.log(probs[lin_mask])
        lin_slope = float(np.polyfit(taus[lin_mask], surprisal, 1)[0])
    else:
        lin_slope = float("nan")
    return ClusterModelFit(D=d_fit, S0=s0, linear_slope=lin_slope,
                           tau_range=(float(lo), float(hi)))
