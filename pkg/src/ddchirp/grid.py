"""Zak-OTFS grid configuration and the modular arithmetic behind line intersection.

The detectors locate a root u from its residues modulo N (delay-Doppler domain)
and modulo M (time-frequency domain). With gcd(M, N) = 1 those two residues
identify u uniquely in [0, MN) via the Chinese remainder theorem.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from math import gcd

import numpy as np

from .errors import InvalidGrid, NotInvertible, OutOfRange, TooManyRoots


@dataclass(frozen=True)
class GridConfig:
    """Zak-OTFS grid: M delay bins, N Doppler bins, Doppler period nu_p.

    Derived quantities: delay period tau_p = 1/nu_p, bandwidth B = M*nu_p,
    duration T = N*tau_p. tau_max_s / nu_max_hz are the worst-case channel
    spreads and must satisfy the crystallization condition
    tau_max < tau_p and 2*nu_max < nu_p.
    """

    M: int
    N: int
    nu_p_hz: float = 30e3
    tau_max_s: float = 0.0
    nu_max_hz: float = 0.0

    def __post_init__(self) -> None:
        if self.M < 1 or self.N < 1:
            raise InvalidGrid(f"M and N must be positive, got M={self.M}, N={self.N}")
        if gcd(self.M, self.N) != 1:
            raise InvalidGrid(f"gcd(M, N) must be 1, got gcd({self.M}, {self.N}) = "
                              f"{gcd(self.M, self.N)}")
        if self.nu_p_hz <= 0:
            raise InvalidGrid(f"nu_p_hz must be positive, got {self.nu_p_hz}")
        if self.tau_max_s < 0 or self.nu_max_hz < 0:
            raise InvalidGrid("channel spreads must be non-negative")
        if self.tau_max_s >= self.tau_p_s:
            raise InvalidGrid(f"crystallization violated: tau_max={self.tau_max_s} >= "
                              f"tau_p={self.tau_p_s}")
        if 2 * self.nu_max_hz >= self.nu_p_hz:
            raise InvalidGrid(f"crystallization violated: 2*nu_max={2 * self.nu_max_hz}"
                              f" >= nu_p={self.nu_p_hz}")

    @property
    def mn(self) -> int:
        return self.M * self.N

    @property
    def tau_p_s(self) -> float:
        return 1.0 / self.nu_p_hz

    @property
    def bandwidth_hz(self) -> float:
        return self.M * self.nu_p_hz

    @property
    def duration_s(self) -> float:
        return self.N * self.tau_p_s


@dataclass(frozen=True)
class RootSet:
    """Ordered set of sequence roots, each coprime to both M and N."""

    roots: tuple[int, ...]
    cfg: GridConfig

    def __post_init__(self) -> None:
        mn = self.cfg.mn
        prev = 0
        for u in self.roots:
            if not 0 < u < mn:
                raise OutOfRange(f"root {u} outside (0, {mn})")
            if gcd(u, mn) != 1:
                raise InvalidGrid(f"root {u} not coprime to MN={mn}")
            if u <= prev:
                raise InvalidGrid("roots must be strictly increasing")
            prev = u

    def __len__(self) -> int:
        return len(self.roots)

    def __contains__(self, u: int) -> bool:
        return u in self._root_lookup

    def __iter__(self):
        return iter(self.roots)

    @cached_property
    def _root_lookup(self) -> frozenset:
        return frozenset(self.roots)

    @cached_property
    def as_array(self) -> np.ndarray:
        return np.asarray(self.roots, dtype=np.int64)

    @cached_property
    def by_residue_mod_n(self) -> dict[int, tuple[int, ...]]:
        """Roots grouped by u mod N (delay-Doppler line lookup)."""
        return _group_by_residue(self.roots, self.cfg.N)

    @cached_property
    def by_residue_mod_m(self) -> dict[int, tuple[int, ...]]:
        """Roots grouped by u mod M (time-frequency line lookup)."""
        return _group_by_residue(self.roots, self.cfg.M)


def _group_by_residue(roots: tuple[int, ...], modulus: int) -> dict[int, tuple[int, ...]]:
    groups: dict[int, list[int]] = {}
    for u in roots:
        groups.setdefault(u % modulus, []).append(u)
    return {r: tuple(us) for r, us in groups.items()}


def mod_inverse(a: int, m: int) -> int:
    """Inverse of a modulo m; raises NotInvertible when gcd(a, m) != 1."""
    if m <= 1:
        raise OutOfRange(f"modulus must exceed 1, got {m}")
    a = a % m
    if gcd(a, m) != 1:
        raise NotInvertible(f"{a} has no inverse mod {m}")
    return pow(a, -1, m)


def crt_combine(r_n: int, r_m: int, cfg: GridConfig) -> int:
    """Unique u in [0, MN) with u = r_n (mod N) and u = r_m (mod M)."""
    m_fac, n_fac = cfg.M, cfg.N
    if gcd(m_fac, n_fac) != 1:
        raise InvalidGrid(f"gcd({m_fac}, {n_fac}) != 1")
    r_n %= n_fac
    r_m %= m_fac
    # u = r_m * N * (N^-1 mod M) + r_n * M * (M^-1 mod N)  (mod MN)
    return (r_m * n_fac * mod_inverse(n_fac, m_fac)
            + r_n * m_fac * mod_inverse(m_fac, n_fac)) % cfg.mn


def valid_root_count(cfg: GridConfig) -> int:
    """Number of u in (0, MN) coprime to both M and N (Euler phi of MN)."""
    return sum(1 for u in range(1, cfg.mn) if gcd(u, cfg.mn) == 1)


def build_root_set(cfg: GridConfig, count: int) -> RootSet:
    """The `count` smallest valid roots, ascending."""
    roots = []
    for u in range(1, cfg.mn):
        if gcd(u, cfg.mn) == 1:
            roots.append(u)
            if len(roots) == count:
                return RootSet(tuple(roots), cfg)
    raise TooManyRoots(f"requested {count} roots, only {len(roots)} exist "
                       f"for M={cfg.M}, N={cfg.N}")


def validate_shift(a: int, cfg: GridConfig) -> bool:
    """True iff a is usable as a self-product shift (coprime to M and to N)."""
    if not 0 < a < cfg.mn:
        raise OutOfRange(f"shift {a} outside (0, {cfg.mn})")
    return gcd(a, cfg.M) == 1 and gcd(a, cfg.N) == 1
