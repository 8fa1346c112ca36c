"""Block-structured delay-Doppler sensing matrix and One-Step Thresholding.

Each root contributes one contiguous block of columns: its DD-domain preamble
translated over a small grid of integer delay and Doppler shifts, each column
normalized to unit norm. OST correlates the received DD vector with every
column and ranks roots by the energy captured in their block.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from functools import cached_property
from math import ceil

import numpy as np

from .errors import (EmptyCandidateSet, InvalidGrid, KTooLarge, MatrixTooLarge,
                     UnknownRoot)
from .grid import GridConfig, RootSet
from .sequences import zc_sequence
from .transforms import dzt, twisted_shift

_CACHE_MAGIC = b"DDSM0001"


@dataclass(frozen=True)
class SensingConfig:
    """Integer delay/Doppler translate grid; block size S = |delay| * |doppler|."""

    delay_shifts: tuple[int, ...]
    doppler_shifts: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.delay_shifts or not self.doppler_shifts:
            raise InvalidGrid("shift lists must be non-empty")
        if any(d < 0 for d in self.delay_shifts):
            raise InvalidGrid("delay shifts must be non-negative")

    @property
    def block_size(self) -> int:
        return len(self.delay_shifts) * len(self.doppler_shifts)

    @classmethod
    def from_grid(cls, cfg: GridConfig) -> "SensingConfig":
        """Default translate grid covering the configured channel spreads.

        Delay shifts span ceil(tau_max * B) bins; the Doppler half-width is
        nu_max * T rounded to the nearest bin (one Doppler bin per N/T Hz).
        """
        x = max(1, ceil(cfg.tau_max_s * cfg.bandwidth_hz))
        y = max(1, round(cfg.nu_max_hz * cfg.duration_s))
        return cls(tuple(range(x)), tuple(range(-y, y + 1)))


@dataclass(frozen=True)
class SensingMatrix:
    """MN x (G*S) matrix of unit-norm DD-translated ZC preamble columns.

    Columns are ordered by root ascending, then delay shift ascending, then
    Doppler shift ascending; `labels` carries the (root, k0, l0) of each.
    """

    matrix: np.ndarray
    roots: tuple[int, ...]
    scfg: SensingConfig
    cfg: GridConfig

    @property
    def block_size(self) -> int:
        return self.scfg.block_size

    @cached_property
    def labels(self) -> tuple[tuple[int, int, int], ...]:
        return tuple((u, k0, l0)
                     for u in self.roots
                     for k0 in self.scfg.delay_shifts
                     for l0 in self.scfg.doppler_shifts)

    def block_of(self, root: int) -> slice:
        try:
            i = self.roots.index(root)
        except ValueError:
            raise UnknownRoot(f"root {root} not in matrix") from None
        return slice(i * self.block_size, (i + 1) * self.block_size)


def build_sensing_matrix(roots: RootSet, cfg: GridConfig,
                         scfg: SensingConfig | None = None,
                         dtype=np.complex128,
                         max_entries: int = 1 << 28) -> SensingMatrix:
    """Build the sensing matrix for a root set; built once and reused."""
    if scfg is None:
        scfg = SensingConfig.from_grid(cfg)
    s = scfg.block_size
    n_entries = len(roots) * s * cfg.mn
    if n_entries > max_entries:
        raise MatrixTooLarge(
            f"{n_entries} entries exceed cap {max_entries}; shrink the root set "
            f"or shift grid, or raise max_entries")
    cols = np.empty((cfg.mn, len(roots) * s), dtype=dtype)
    scale = 1.0 / np.sqrt(cfg.mn)  # unit-modulus sequences have energy MN
    j = 0
    for u in roots:
        base = dzt(zc_sequence(u, cfg), cfg)
        for k0 in scfg.delay_shifts:
            for l0 in scfg.doppler_shifts:
                cols[:, j] = twisted_shift(base, k0, l0, cfg).ravel() * scale
                j += 1
    return SensingMatrix(cols, tuple(roots.roots), scfg, cfg)


def restrict_columns(A: SensingMatrix, roots_subset) -> SensingMatrix:
    """Sensing matrix keeping only the blocks of `roots_subset`, order preserved."""
    subset = set(roots_subset)
    if not subset:
        raise EmptyCandidateSet("empty root subset")
    unknown = subset - set(A.roots)
    if unknown:
        raise UnknownRoot(f"roots {sorted(unknown)} not in matrix")
    kept = tuple(u for u in A.roots if u in subset)
    if len(kept) == len(A.roots):
        return A
    idx = np.concatenate([np.arange(A.block_of(u).start, A.block_of(u).stop)
                          for u in kept])
    return SensingMatrix(A.matrix[:, idx], kept, A.scfg, A.cfg)


def block_energies(A: SensingMatrix, y_dd: np.ndarray) -> np.ndarray:
    """Per-root energies of f = A^H y, one entry per block (batchable)."""
    y_dd = np.asarray(y_dd, dtype=A.matrix.dtype)
    # A^H y == conj(conj(y) @ A); conjugating the vector side avoids copying A
    f = np.conj(y_dd) @ A.matrix  # (..., G*S), conjugate of A^H y
    mags = np.abs(f) ** 2
    return mags.reshape(*mags.shape[:-1], len(A.roots), A.block_size).sum(axis=-1)


def ost_detect(A: SensingMatrix, y_dd: np.ndarray, k: int) -> list[tuple[int, float]]:
    """One-Step Thresholding: the k roots with the largest block energy,
    descending; ties break toward the smaller root."""
    if k > len(A.roots):
        raise KTooLarge(f"k={k} exceeds {len(A.roots)} blocks")
    energies = block_energies(A, y_dd)
    order = np.argsort(-energies, kind="stable")[:k]
    return [(A.roots[i], float(energies[i])) for i in order]


def save_matrix(A: SensingMatrix, path) -> None:
    """Cache a sensing matrix on disk.

    Layout: magic "DDSM0001", uint32 little-endian JSON header length, JSON
    header (M, N, nu_p_hz, tau_max_s, nu_max_hz, roots, delay_shifts,
    doppler_shifts), then column-major complex64 data.
    """
    header = json.dumps({
        "M": A.cfg.M, "N": A.cfg.N, "nu_p_hz": A.cfg.nu_p_hz,
        "tau_max_s": A.cfg.tau_max_s, "nu_max_hz": A.cfg.nu_max_hz,
        "roots": list(A.roots),
        "delay_shifts": list(A.scfg.delay_shifts),
        "doppler_shifts": list(A.scfg.doppler_shifts),
    }).encode()
    with open(path, "wb") as fh:
        fh.write(_CACHE_MAGIC)
        fh.write(struct.pack("<I", len(header)))
        fh.write(header)
        fh.write(np.asfortranarray(A.matrix.astype(np.complex64)).tobytes(order="F"))


def load_matrix(path) -> SensingMatrix:
    """Load a cached sensing matrix; data is upcast back to complex128."""
    with open(path, "rb") as fh:
        if fh.read(len(_CACHE_MAGIC)) != _CACHE_MAGIC:
            raise InvalidGrid(f"{path} is not a sensing-matrix cache")
        (hlen,) = struct.unpack("<I", fh.read(4))
        header = json.loads(fh.read(hlen))
        raw = fh.read()
    cfg = GridConfig(header["M"], header["N"], header["nu_p_hz"],
                     header["tau_max_s"], header["nu_max_hz"])
    scfg = SensingConfig(tuple(header["delay_shifts"]), tuple(header["doppler_shifts"]))
    n_cols = len(header["roots"]) * scfg.block_size
    mat = np.frombuffer(raw, dtype=np.complex64).reshape(
        (cfg.mn, n_cols), order="F").astype(np.complex128)
    return SensingMatrix(mat, tuple(header["roots"]), scfg, cfg)
