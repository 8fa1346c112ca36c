"""Chirp detectors: single-user line intersection and multi-user pruning + OST.

Single user: the conjugate self-product of the received block is (up to
channel cross terms) a tone at u*a. Its DZT concentrates on the column
l = u*a mod N and its time-frequency map on the row k = u*a mod M; absolute
sums along each axis locate the two lines, and the Chinese remainder theorem
intersects them to recover u.

K users: for each of I shifts, keep the top-K candidate lines in both
domains, intersect the per-shift candidate sets across domain pairs, then
refine the surviving roots with One-Step Thresholding on the corresponding
sensing-matrix blocks.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidShift
from .grid import GridConfig, RootSet, mod_inverse, crt_combine, validate_shift
from .sensing import SensingMatrix, ost_detect, restrict_columns
from .sequences import self_product
from .transforms import dzt, td_to_tf


@dataclass(frozen=True)
class CandidateSet:
    """Candidate roots plus which (shift, domain, line index) produced each."""

    roots: frozenset[int]
    provenance: tuple[tuple[int, str, int], ...] = ()


@dataclass
class DetectionReport:
    """Detection outcome with diagnostics.

    detected is empty when the line intersection misses the root set
    (single user) or candidate pruning empties out (multi user); callers
    score that as a misdetection.
    """

    detected: list[int]
    dd_line_index: int | None = None
    tf_line_index: int | None = None
    dd_row_sums: np.ndarray | None = None
    tf_col_sums: np.ndarray | None = None
    block_energies: dict[int, float] = field(default_factory=dict)
    candidates: list[CandidateSet] = field(default_factory=list)


def dd_row_sums(z: np.ndarray, cfg: GridConfig) -> np.ndarray:
    """Length-N vector of absolute sums over delay: s[l] = sum_k |Z_dd[k, l]|."""
    return np.abs(dzt(z, cfg)).sum(axis=-2)


def tf_col_sums(z: np.ndarray, cfg: GridConfig) -> np.ndarray:
    """Length-M vector of absolute sums over Doppler: s[k] = sum_l |Z_tf[k, l]|."""
    return np.abs(td_to_tf(z, cfg)).sum(axis=-1)


def _check_shift(a: int, cfg: GridConfig) -> None:
    if not validate_shift(a, cfg):
        raise InvalidShift(f"shift {a} not coprime to M={cfg.M} and N={cfg.N}")


def line_candidates_dd(l_indices, a: int, roots: RootSet) -> CandidateSet:
    """Roots consistent with DD-domain lines l in l_indices: u = l * a^-1 (mod N)."""
    cfg = roots.cfg
    _check_shift(a, cfg)
    a_inv = mod_inverse(a, cfg.N)
    found: set[int] = set()
    provenance = []
    for l in l_indices:
        for u in roots.by_residue_mod_n.get((l * a_inv) % cfg.N, ()):
            found.add(u)
            provenance.append((a, "dd", int(l)))
    return CandidateSet(frozenset(found), tuple(provenance))


def line_candidates_tf(k_indices, a: int, roots: RootSet) -> CandidateSet:
    """Roots consistent with TF-domain lines k in k_indices: u = k * a^-1 (mod M)."""
    cfg = roots.cfg
    _check_shift(a, cfg)
    a_inv = mod_inverse(a, cfg.M)
    found: set[int] = set()
    provenance = []
    for k in k_indices:
        for u in roots.by_residue_mod_m.get((k * a_inv) % cfg.M, ()):
            found.add(u)
            provenance.append((a, "tf", int(k)))
    return CandidateSet(frozenset(found), tuple(provenance))


def _top_k(values: np.ndarray, k: int) -> np.ndarray:
    """Indices of the k largest entries; ties break toward the smaller index."""
    return np.argsort(-values, kind="stable")[:k]


def detect_single(y: np.ndarray, a: int, roots: RootSet,
                  with_candidates: bool = False) -> DetectionReport:
    """Single-user detection: self-product, DD/TF line argmax, CRT intersect.

    The intersection of the two candidate lines is computed directly as one
    CRT combine of l' * a^-1 (mod N) and k' * a^-1 (mod M); a result outside
    the root set yields an empty detection (scored as a miss, never a crash).
    """
    cfg = roots.cfg
    _check_shift(a, cfg)
    z = self_product(y, a, cfg)
    s_dd = dd_row_sums(z, cfg)
    l_best = int(np.argmax(s_dd))
    s_tf = tf_col_sums(z, cfg)
    k_best = int(np.argmax(s_tf))
    u = crt_combine((l_best * mod_inverse(a, cfg.N)) % cfg.N,
                    (k_best * mod_inverse(a, cfg.M)) % cfg.M, cfg)
    report = DetectionReport(
        detected=[u] if u in roots else [],
        dd_line_index=l_best, tf_line_index=k_best,
        dd_row_sums=s_dd, tf_col_sums=s_tf)
    if with_candidates:
        report.candidates = [line_candidates_dd([l_best], a, roots),
                             line_candidates_tf([k_best], a, roots)]
    return report


def detect_multi(y: np.ndarray, shifts, k_users: int, A: SensingMatrix,
                 roots: RootSet, y_dd: np.ndarray | None = None) -> DetectionReport:
    """K-user detection: per-shift top-K line candidates in both domains,
    cross-domain intersection, then OST refinement over the survivors."""
    cfg = roots.cfg
    shifts = list(shifts)
    if len(set(shifts)) != len(shifts):
        raise InvalidShift(f"shifts must be distinct, got {shifts}")
    for a in shifts:
        _check_shift(a, cfg)
    if k_users < 1:
        raise InvalidShift(f"need k_users >= 1, got {k_users}")

    dd_sets = []
    tf_sets = []
    candidates = []
    for a in shifts:
        z = self_product(y, a, cfg)
        top_l = _top_k(dd_row_sums(z, cfg), k_users)
        cand_dd = line_candidates_dd(top_l, a, roots)
        top_c = _top_k(tf_col_sums(z, cfg), k_users)
        cand_tf = line_candidates_tf(top_c, a, roots)
        dd_sets.append(cand_dd.roots)
        tf_sets.append(cand_tf.roots)
        candidates.extend([cand_dd, cand_tf])

    pruned: set[int] = set()
    for dd in dd_sets:
        for tf in tf_sets:
            pruned |= dd & tf
    if not pruned:
        return DetectionReport(detected=[], candidates=candidates)

    if y_dd is None:
        y_dd = dzt(y, cfg).ravel()
    restricted = restrict_columns(A, pruned)
    ranked = ost_detect(restricted, y_dd, min(k_users, len(pruned)))
    return DetectionReport(
        detected=[u for u, _ in ranked],
        block_energies={u: e for u, e in ranked},
        candidates=candidates)


def detect_single_batch(Y: np.ndarray, a: int, roots: RootSet) -> np.ndarray:
    """Vectorized single-user detection over a (B, MN) batch.

    Returns detected roots per row, -1 where the CRT point falls outside the
    root set. Used by the complexity bench, where per-call interpreter
    overhead would otherwise swamp the O(MN) work at small grids.
    """
    cfg = roots.cfg
    _check_shift(a, cfg)
    Y = np.asarray(Y, dtype=np.complex128)
    Z = Y * np.conj(np.roll(Y, -a, axis=-1))
    l_best = np.argmax(np.abs(dzt(Z, cfg)).sum(axis=-2), axis=-1)
    k_best = np.argmax(np.abs(td_to_tf(Z, cfg)).sum(axis=-1), axis=-1)
    r_n = (l_best * mod_inverse(a, cfg.N)) % cfg.N
    r_m = (k_best * mod_inverse(a, cfg.M)) % cfg.M
    u = (r_m * cfg.N * mod_inverse(cfg.N, cfg.M)
         + r_n * cfg.M * mod_inverse(cfg.M, cfg.N)) % cfg.mn
    return np.where(np.isin(u, roots.as_array), u, -1)
