"""Doubly-selective multipath channel simulation.

Each path delays the transmitted block (band-limited RRC interpolation for
fractional delays, exact cyclic shift for integer ones), applies its Doppler
as a complex exponential at the sample instants, and scales by a complex gain.
Path gains are normalized to unit total energy, so the received signal keeps
unit average power in expectation and SNR is defined per complex sample.

The MN-sample block is treated as one period of a cyclic signal when
delaying, consistent with reading shift indices modulo MN.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidRollOff, LengthMismatch
from .grid import GridConfig

# ITU Vehicular-A power-delay profile.
VEH_A_DELAYS_US = (0.0, 0.31, 0.71, 1.09, 1.73, 2.51)
VEH_A_POWERS_DB = (0.0, -1.0, -9.0, -10.0, -15.0, -20.0)


@dataclass(frozen=True)
class ChannelProfile:
    """Power-delay profile: per-path delays (s) and relative powers (dB)."""

    delays_s: tuple[float, ...]
    powers_db: tuple[float, ...]
    name: str = "custom"

    @classmethod
    def veh_a(cls) -> "ChannelProfile":
        return cls(tuple(d * 1e-6 for d in VEH_A_DELAYS_US), VEH_A_POWERS_DB, "veh-a")

    @property
    def max_delay_s(self) -> float:
        return max(self.delays_s)


def load_profile(path) -> tuple[ChannelProfile, float]:
    """Read a JSON channel profile.

    Layout: {"paths": [[delay_us, power_db], ...], "nu_max_hz": float}.
    Returns the profile and the worst-case Doppler.
    """
    with open(path) as fh:
        doc = json.load(fh)
    paths = doc["paths"]
    delays = tuple(float(p[0]) * 1e-6 for p in paths)
    powers = tuple(float(p[1]) for p in paths)
    return ChannelProfile(delays, powers, doc.get("name", "custom")), float(doc["nu_max_hz"])


@dataclass(frozen=True)
class ChannelRealization:
    """One draw of a multipath channel: complex gains, delays (s), Dopplers (Hz)."""

    gains: np.ndarray
    delays_s: np.ndarray
    dopplers_hz: np.ndarray


@dataclass(frozen=True)
class ShapingConfig:
    """RRC roll-offs and interpolation kernel half-width.

    beta_nu is kept for parity with the two-dimensional shaping filter
    w(tau, nu); the time-domain simulation path applies delay-axis shaping
    only, and dd_doppler_shaping is a reserved flag (default off).
    """

    beta_tau: float = 0.6
    beta_nu: float = 0.6
    kernel_halfwidth: int = 16
    dd_doppler_shaping: bool = False

    def __post_init__(self) -> None:
        for beta in (self.beta_tau, self.beta_nu):
            if not 0.0 <= beta <= 1.0:
                raise InvalidRollOff(f"roll-off {beta} outside [0, 1]")
        if self.kernel_halfwidth < 1:
            raise InvalidRollOff(f"kernel_halfwidth must be >= 1")


def rrc_kernel(x, beta: float):
    """Root-raised-cosine kernel
    [sin(pi*x*(1-beta)) + 4*beta*x*cos(pi*x*(1+beta))] / [pi*x*(1-(4*beta*x)^2)]
    with the removable singularities at x=0 and |x|=1/(4*beta) patched.
    """
    if not 0.0 <= beta <= 1.0:
        raise InvalidRollOff(f"roll-off {beta} outside [0, 1]")
    x = np.asarray(x, dtype=np.float64)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    out = np.empty_like(x)

    at_zero = np.abs(x) < 1e-12
    if beta > 0:
        at_pole = np.abs(np.abs(x) - 1.0 / (4.0 * beta)) < 1e-12
    else:
        at_pole = np.zeros_like(at_zero)
    regular = ~(at_zero | at_pole)

    xr = x[regular]
    num = np.sin(np.pi * xr * (1 - beta)) + 4 * beta * xr * np.cos(np.pi * xr * (1 + beta))
    den = np.pi * xr * (1 - (4 * beta * xr) ** 2)
    out[regular] = num / den
    out[at_zero] = 1.0 - beta + 4.0 * beta / np.pi
    if beta > 0:
        out[at_pole] = (beta / np.sqrt(2.0)) * (
            (1 + 2 / np.pi) * np.sin(np.pi / (4 * beta))
            + (1 - 2 / np.pi) * np.cos(np.pi / (4 * beta)))
    return out[0] if scalar else out


def sample_channel(rng: np.random.Generator, profile: ChannelProfile,
                   nu_max_hz: float) -> ChannelRealization:
    """Draw one channel realization from a power-delay profile.

    Gain magnitudes follow the dB profile (then unit-energy normalization),
    phases are uniform, and per-path Dopplers are nu_max * cos(theta) with
    theta uniform on [-pi, pi).
    """
    powers = 10.0 ** (np.asarray(profile.powers_db) / 10.0)
    mags = np.sqrt(powers / powers.sum())
    phases = rng.uniform(0.0, 2.0 * np.pi, size=len(mags))
    gains = mags * np.exp(1j * phases)
    theta = rng.uniform(-np.pi, np.pi, size=len(mags))
    dopplers = nu_max_hz * np.cos(theta)
    return ChannelRealization(gains, np.asarray(profile.delays_s, dtype=float), dopplers)


def sample_veh_a(rng: np.random.Generator, nu_max_hz: float) -> ChannelRealization:
    """Veh-A realization (six paths, Table-style power-delay profile)."""
    return sample_channel(rng, ChannelProfile.veh_a(), nu_max_hz)


def apply_channel(x: np.ndarray, ch: ChannelRealization, shp: ShapingConfig,
                  cfg: GridConfig) -> np.ndarray:
    """Pass a length-MN block through a multipath channel.

    y[n] = sum_i h_i * x_interp(n/B - tau_i) * exp(2j*pi*nu_i*(n/B - tau_i)).

    Fractional delays use RRC taps rrc(f - m), m = -L..L, normalized to unit
    L2 norm so the interpolation stage preserves expected energy; an integer
    delay collapses to an exact cyclic shift.
    """
    x = np.asarray(x, dtype=np.complex128)
    mn = cfg.mn
    if x.shape != (mn,):
        raise LengthMismatch(f"expected shape ({mn},), got {x.shape}")
    bw = cfg.bandwidth_hz
    half = shp.kernel_halfwidth
    n_over_b = np.arange(mn) / bw
    y = np.zeros(mn, dtype=np.complex128)
    for h, tau, nu in zip(ch.gains, ch.delays_s, ch.dopplers_hz):
        delay_bins = tau * bw
        d = int(np.floor(delay_bins))
        frac = delay_bins - d
        if frac < 1e-9 or frac > 1 - 1e-9:
            shifted = np.roll(x, int(round(delay_bins)))
        else:
            m = np.arange(-half, half + 1)
            taps = rrc_kernel(frac - m, shp.beta_tau)
            taps = taps / np.linalg.norm(taps)
            idx = (np.arange(mn)[:, None] - d + m[None, :]) % mn
            shifted = x[idx] @ taps
        y += h * shifted * np.exp(2j * np.pi * nu * (n_over_b - tau))
    return y


def add_awgn(x: np.ndarray, snr_db: float, rng: np.random.Generator) -> np.ndarray:
    """Add circularly-symmetric complex Gaussian noise of variance
    10^(-snr_db/10) per sample; snr_db = inf returns the input unchanged."""
    x = np.asarray(x, dtype=np.complex128)
    if np.isinf(snr_db):
        return x.copy()
    sigma2 = 10.0 ** (-snr_db / 10.0)
    noise = rng.standard_normal((*x.shape, 2)) @ np.array([1.0, 1.0j])
    return x + np.sqrt(sigma2 / 2.0) * noise


def superpose(users: list[np.ndarray]) -> np.ndarray:
    """Elementwise sum of per-user received blocks."""
    if not users:
        raise LengthMismatch("need at least one signal")
    length = len(users[0])
    for sig in users[1:]:
        if len(sig) != length:
            raise LengthMismatch(f"lengths differ: {length} vs {len(sig)}")
    return np.sum(np.asarray(users, dtype=np.complex128), axis=0)
