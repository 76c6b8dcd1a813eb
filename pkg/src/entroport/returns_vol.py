"""Return series and rolling expected-return / volatility windows.

The volatility window T is a physical duration; it must be an integer
multiple of the sampling interval (no rounding) so runs are reproducible
across configurations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import DataError
from .series import NS_PER_S, SampledSeries


@dataclass(frozen=True)
class VolatilityWindow:
    """Rolling window: physical span in seconds plus the derived sample count."""

    physical_s: float
    samples: int

    @classmethod
    def from_physical(cls, physical_s: float, delta_ns: int) -> "VolatilityWindow":
        span_ns = physical_s * NS_PER_S
        if span_ns % delta_ns != 0:
            raise DataError(
                f"window {physical_s}s is not an integer multiple of "
                f"delta {delta_ns}ns"
            )
        samples = int(span_ns // delta_ns)
        if samples < 2:
            raise DataError(f"window must span >= 2 samples, got {samples}")
        return cls(physical_s=physical_s, samples=samples)

    @classmethod
    def from_samples(cls, samples: int, delta_ns: int) -> "VolatilityWindow":
        if samples < 2:
            raise DataError(f"window must span >= 2 samples, got {samples}")
        return cls(physical_s=samples * delta_ns / NS_PER_S, samples=samples)


def linear_returns(prices: SampledSeries) -> SampledSeries:
    """Simple returns r_t = (y_t - y_{t-1}) / y_{t-1}; length shrinks by one."""
    y = prices.values
    if len(y) < 2:
        raise DataError("need at least 2 prices to compute returns")
    if np.any(y <= 0):
        raise DataError("prices must be strictly positive")
    r = np.diff(y) / y[:-1]
    return SampledSeries(values=r, start_time=prices.start_time + prices.delta,
                         delta=prices.delta, kind="return")


def log_returns(prices: SampledSeries) -> SampledSeries:
    """Log returns; config alternative to linear_returns."""
    y = prices.values
    if len(y) < 2:
        raise DataError("need at least 2 prices to compute returns")
    if np.any(y <= 0):
        raise DataError("prices must be strictly positive")
    r = np.diff(np.log(y))
    return SampledSeries(values=r, start_time=prices.start_time + prices.delta,
                         delta=prices.delta, kind="return")


def rolling_mean(returns: SampledSeries, window: VolatilityWindow | int) -> SampledSeries:
    """Windowed mean over every fully contained window; len out = len in - w + 1."""
    w = window.samples if isinstance(window, VolatilityWindow) else int(window)
    r = returns.values
    if w < 1:
        raise DataError("window must span at least one sample")
    if w > len(r):
        raise DataError(f"window ({w}) longer than series ({len(r)})")
    out = sliding_window_view(r, w).mean(axis=-1)
    return returns.with_values(out, kind="return")


def rolling_volatility(returns: SampledSeries, window: VolatilityWindow) -> SampledSeries:
    """Windowed sample standard deviation (ddof=1) over fully contained windows."""
    w = window.samples
    r = returns.values
    if w < 2:
        raise DataError("volatility window must span >= 2 samples")
    if w > len(r):
        raise DataError(f"window ({w}) longer than series ({len(r)})")
    windows = sliding_window_view(r, w)
    out = windows.std(axis=-1, ddof=1)
    # a constant window must give exactly 0, not mean-roundoff noise
    constant = windows.max(axis=-1) == windows.min(axis=-1)
    if constant.any():
        out = np.where(constant, 0.0, out)
    return returns.with_values(out, kind="volatility")
