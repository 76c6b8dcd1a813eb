"""Seeded synthetic series generators: FBM, ARFIMA(0,d,0), GARCH(1,1).

Every generator draws from its own named random stream, so adding a
generator never perturbs the draws of another, and identical specs yield
bit-identical series.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve

from .errors import DataError
from .series import SampledSeries

#: MA(infinity) truncation for fractional differencing. The neglected weight
#: mass is O(K^(d-1)) ~ 1e-4 .. 1e-2 of psi_K for |d| < 0.5, negligible next
#: to Monte Carlo noise at the series lengths used here.
ARFIMA_TRUNCATION = 10_000

_STREAM_IDS = {"fbm": 1, "arfima": 2, "garch": 3}


def _rng(stream: str, seed: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([_STREAM_IDS[stream], seed]))


@dataclass(frozen=True)
class GeneratorSpec:
    """Declarative description of a synthetic asset series."""

    kind: str                       # 'fbm' | 'arfima' | 'garch'
    length: int
    seed: int
    hurst: float | None = None      # fbm
    d: float | None = None          # arfima
    omega: float | None = None      # garch
    alpha: float | None = None
    beta: float | None = None

    def generate(self, delta: int = 1, start_time: int = 0) -> SampledSeries:
        if self.kind == "fbm":
            return fbm_series(self.hurst, self.length, self.seed,
                              delta=delta, start_time=start_time)
        if self.kind == "arfima":
            return arfima_series(self.d, self.length, self.seed,
                                 delta=delta, start_time=start_time)
        if self.kind == "garch":
            return garch_series(self.omega, self.alpha, self.beta,
                                self.length, self.seed,
                                delta=delta, start_time=start_time)
        raise DataError(f"unknown generator kind {self.kind!r}")


def fbm_series(hurst: float, length: int, seed: int, *,
               delta: int = 1, start_time: int = 0) -> SampledSeries:
    """Fractional Brownian motion path with exact covariance.

    Uses circulant embedding of the fractional Gaussian noise covariance
    (Davies-Harte), so length must be a power of two. Increments are
    stationary with Var[B(t+k) - B(t)] = k^(2H).
    """
    if not 0.0 < hurst < 1.0:
        raise DataError(f"Hurst exponent must be in (0, 1), got {hurst}")
    if length < 2 or length & (length - 1):
        raise DataError(f"length must be a power of two >= 2, got {length}")
    fgn = _fgn_davies_harte(hurst, length, _rng("fbm", seed))
    return SampledSeries(values=np.cumsum(fgn), start_time=start_time,
                         delta=delta, kind="price")


def _fgn_davies_harte(hurst: float, n: int, rng: np.random.Generator) -> np.ndarray:
    k = np.arange(n + 1, dtype=float)
    two_h = 2.0 * hurst
    cov = 0.5 * ((k + 1) ** two_h - 2.0 * k ** two_h + np.abs(k - 1) ** two_h)
    row = np.concatenate([cov, cov[-2:0:-1]])          # length 2n
    lam = np.fft.fft(row).real
    if lam.min() < -1e-8:
        raise DataError(f"circulant embedding not non-negative definite (min {lam.min()})")
    lam = np.maximum(lam, 0.0)

    m = 2 * n
    a = rng.standard_normal(m)
    b = rng.standard_normal(m)
    w = np.zeros(m, dtype=complex)
    w[0] = np.sqrt(lam[0] / m) * a[0]
    w[n] = np.sqrt(lam[n] / m) * a[n]
    idx = np.arange(1, n)
    half = np.sqrt(lam[idx] / (2 * m))
    w[idx] = half * (a[idx] + 1j * b[idx])
    w[m - idx] = np.conj(w[idx])
    return np.fft.fft(w).real[:n]


def fractional_weights(d: float, count: int) -> np.ndarray:
    """MA(infinity) weights of (1-B)^(-d): psi_k = Gamma(k+d) / (Gamma(d) k!)."""
    psi = np.empty(count)
    psi[0] = 1.0
    k = np.arange(1, count)
    psi[1:] = np.cumprod((k - 1 + d) / k)
    return psi


def arfima_series(d: float, length: int, seed: int, *,
                  delta: int = 1, start_time: int = 0,
                  truncation: int = ARFIMA_TRUNCATION) -> SampledSeries:
    """ARFIMA(0, d, 0) noise via truncated fractional-differencing weights."""
    if not abs(d) < 0.5:
        raise DataError(f"fractional order must satisfy |d| < 0.5, got {d}")
    if length < 1:
        raise DataError("length must be >= 1")
    rng = _rng("arfima", seed)
    psi = fractional_weights(d, truncation + 1)
    eps = rng.standard_normal(length + truncation)
    x = fftconvolve(eps, psi, mode="valid")
    return SampledSeries(values=x[:length], start_time=start_time,
                         delta=delta, kind="return")


def arfima_theoretical_acf(d: float, max_lag: int) -> np.ndarray:
    """Exact ACF of ARFIMA(0,d,0): rho_k = Gamma(1-d)Gamma(k+d) / (Gamma(d)Gamma(k+1-d))."""
    rho = np.empty(max_lag + 1)
    rho[0] = 1.0
    for k in range(1, max_lag + 1):
        rho[k] = rho[k - 1] * (k - 1 + d) / (k - d)
    return rho


def garch_series(omega: float, alpha: float, beta: float, length: int, seed: int, *,
                 delta: int = 1, start_time: int = 0) -> SampledSeries:
    """GARCH(1,1) return path with unconditional variance omega / (1 - alpha - beta)."""
    if omega <= 0:
        raise DataError(f"omega must be positive, got {omega}")
    if alpha < 0 or beta < 0:
        raise DataError("alpha and beta must be non-negative")
    if alpha + beta >= 1:
        raise DataError(f"stationarity requires alpha + beta < 1, got {alpha + beta}")
    if length < 1:
        raise DataError("length must be >= 1")
    rng = _rng("garch", seed)
    z = rng.standard_normal(length)
    r = np.empty(length)
    var = omega / (1.0 - alpha - beta)
    for t in range(length):
        r[t] = np.sqrt(var) * z[t]
        var = omega + alpha * r[t] * r[t] + beta * var
    return SampledSeries(values=r, start_time=start_time, delta=delta, kind="return")


def to_price_series(series: SampledSeries, *, scale: float = 1.0,
                    base_price: float = 100.0) -> SampledSeries:
    """Map a synthetic path onto a positive price series.

    Level paths ('price' kind, e.g. FBM) become base * exp(scale * x);
    return-like paths compound as base * prod(1 + scale * r), floored away
    from zero.
    """
    x = series.values
    if series.kind == "price":
        values = base_price * np.exp(scale * x)
    else:
        growth = np.maximum(1.0 + scale * x, 1e-8)
        values = base_price * np.cumprod(growth)
    return series.with_values(values, kind="price")
