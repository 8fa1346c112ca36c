"""Zadoff-Chu sequences and the conjugate self-product used for chirp detection.

A root-u ZC sequence of composite length MN has quadratic phase
x_u[n] = xi_MN^(-u*n*(n+1)/2). Multiplying it pointwise with the conjugate of
its cyclic shift by a cancels the quadratic term and leaves a pure tone at
frequency u*a mod MN, so a frequency counter recovers u*a.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

import numpy as np

from .errors import InvalidRoot, InvalidShift
from .grid import GridConfig, RootSet, validate_shift
from .transforms import dzt


def zc_sequence(u: int, cfg: GridConfig) -> np.ndarray:
    """Root-u Zadoff-Chu sequence of length MN.

    The triangular-number exponent is reduced mod MN in exact integer
    arithmetic; accumulating the phase in floats loses accuracy by MN ~ 1e3.
    """
    mn = cfg.mn
    if not 0 < u < mn or gcd(u, mn) != 1:
        raise InvalidRoot(f"root {u} must lie in (0, {mn}) and be coprime to {mn}")
    n = np.arange(mn, dtype=np.int64)
    tri = (n * (n + 1) // 2) % mn
    return np.exp(-2j * np.pi * ((u * tri) % mn) / mn)


def self_product(y: np.ndarray, a: int, cfg: GridConfig) -> np.ndarray:
    """z[n] = y[n] * conj(y[(n + a) mod MN]); batchable on a leading axis."""
    if not validate_shift(a, cfg):
        raise InvalidShift(f"shift {a} not coprime to M={cfg.M} and N={cfg.N}")
    y = np.asarray(y, dtype=np.complex128)
    return y * np.conj(np.roll(y, -a, axis=-1))


def tone_frequency_of(u: int, a: int, cfg: GridConfig) -> int:
    """FFT peak location of self_product(zc_sequence(u), a): u*a mod MN."""
    return (u * a) % cfg.mn


@dataclass(frozen=True)
class Preamble:
    """A ZC preamble: root, time-domain samples, and DD-domain array."""

    root: int
    td: np.ndarray
    dd: np.ndarray


class PreambleBank:
    """Preambles for every root in a RootSet, computed once and reused.

    Generation cost is excluded from detector timing; build the bank up front.
    """

    def __init__(self, roots: RootSet):
        self.roots = roots
        self.cfg = roots.cfg
        self._cache = {}
        for u in roots:
            td = zc_sequence(u, self.cfg)
            self._cache[u] = Preamble(u, td, dzt(td, self.cfg))

    def __getitem__(self, u: int) -> Preamble:
        return self._cache[u]

    def __len__(self) -> int:
        return len(self._cache)
