"""Discrete Zak transform, time-frequency FFT, and twisted delay-Doppler shifts.

Conventions (pinned here once, used everywhere):

* primitive roots of unity carry a positive sign, xi_m = exp(+2j*pi/m);
* the DZT of a length-MN sequence x is the M x N array
      X[k, l] = (1/sqrt(N)) * sum_n x[k + n*M] * xi_N^(-l*n)
  and is quasi-periodic: X[k + M, l] = xi_N^l * X[k, l], X[k, l + N] = X[k, l];
* the time-frequency map interleaves with stride N instead of stride M:
      Z[k, l] = (1/sqrt(M)) * sum_n z[l + n*N] * xi_M^(-k*n).

All transforms here run on FFTs; the tests keep direct double-loop sums as
independent oracles. Batched variants accept a leading batch axis so the
harness can amortize per-call overhead when timing.
"""

from __future__ import annotations

import numpy as np

from .errors import LengthMismatch, ShapeMismatch
from .grid import GridConfig

# Transform invocation counters; detectors are checked against these in tests.
op_counts = {"dzt": 0, "idzt": 0, "td_to_tf": 0}


def reset_op_counts() -> None:
    for key in op_counts:
        op_counts[key] = 0


def _check_td(x: np.ndarray, cfg: GridConfig) -> np.ndarray:
    x = np.asarray(x, dtype=np.complex128)
    if x.shape[-1] != cfg.mn:
        raise LengthMismatch(f"expected length {cfg.mn}, got {x.shape[-1]}")
    return x


def _check_dd(X: np.ndarray, cfg: GridConfig) -> np.ndarray:
    X = np.asarray(X, dtype=np.complex128)
    if X.shape[-2:] != (cfg.M, cfg.N):
        raise ShapeMismatch(f"expected {(cfg.M, cfg.N)} array, got {X.shape[-2:]}")
    return X


def dzt(x: np.ndarray, cfg: GridConfig) -> np.ndarray:
    """Discrete Zak transform of a length-MN sequence (batchable on axis 0).

    Returns the fundamental period, an (..., M, N) array indexed [k, l].
    """
    x = _check_td(x, cfg)
    op_counts["dzt"] += 1
    grid = x.reshape(*x.shape[:-1], cfg.N, cfg.M)  # [n, k]
    out = np.fft.fft(grid, axis=-2) / np.sqrt(cfg.N)  # [l, k]
    return np.swapaxes(out, -1, -2)


def idzt(X: np.ndarray, cfg: GridConfig) -> np.ndarray:
    """Inverse DZT; idzt(dzt(x)) == x."""
    X = _check_dd(X, cfg)
    op_counts["idzt"] += 1
    grid = np.fft.ifft(X, axis=-1) * np.sqrt(cfg.N)  # [k, n]
    return np.swapaxes(grid, -1, -2).reshape(*X.shape[:-2], cfg.mn)


def td_to_tf(z: np.ndarray, cfg: GridConfig) -> np.ndarray:
    """Time-frequency map: M-point FFT along the delay axis of the (M, N)
    time-delay matrix z[l + n*N]; returns an (..., M, N) array indexed [k, l]."""
    z = _check_td(z, cfg)
    op_counts["td_to_tf"] += 1
    grid = z.reshape(*z.shape[:-1], cfg.M, cfg.N)  # [n, l]
    return np.fft.fft(grid, axis=-2) / np.sqrt(cfg.M)  # [k, l]


def dd_inner_product(X: np.ndarray, Y: np.ndarray) -> complex:
    """sum_{k,l} X[k,l] * conj(Y[k,l]); equals the TD inner product for DZT pairs."""
    X = np.asarray(X)
    Y = np.asarray(Y)
    if X.shape != Y.shape:
        raise ShapeMismatch(f"{X.shape} vs {Y.shape}")
    return complex(np.sum(X * np.conj(Y)))


def dd_extended(X: np.ndarray, k: np.ndarray, l: np.ndarray, cfg: GridConfig) -> np.ndarray:
    """Evaluate the quasi-periodic extension of a DD array at integer index
    grids k (delay) and l (Doppler); k and l broadcast against each other."""
    X = _check_dd(X, cfg)
    k = np.asarray(k)
    l = np.asarray(l)
    q, k_r = np.divmod(k, cfg.M)
    l_r = np.mod(l, cfg.N)
    phase = np.exp(2j * np.pi * q * l_r / cfg.N)
    return X[..., k_r, l_r] * phase


def twisted_shift(X: np.ndarray, k0: int, l0: int, cfg: GridConfig) -> np.ndarray:
    """Delay-Doppler translate of a DD array by (k0, l0) grid steps.

    Y[k, l] = X_ext[k - k0, l - l0] * exp(2j*pi * l0 * (k - k0) / (MN)),
    which matches the DZT of the time-domain delay-then-modulate
    x[(n - k0) mod MN] * exp(2j*pi * l0 * (n - k0) / (MN)).
    """
    X = _check_dd(X, cfg)
    k_shift = np.arange(cfg.M) - k0  # [M]
    l_shift = np.arange(cfg.N) - l0  # [N]
    q, k_r = np.divmod(k_shift, cfg.M)
    l_r = np.mod(l_shift, cfg.N)
    ext_phase = np.exp(2j * np.pi * np.outer(q, l_r) / cfg.N)
    mod_phase = np.exp(2j * np.pi * l0 * k_shift / cfg.mn)
    return X[..., k_r[:, None], l_r[None, :]] * ext_phase * mod_phase[:, None]
