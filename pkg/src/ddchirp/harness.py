"""Monte-Carlo experiment driver: configs, misdetection sweeps, complexity bench.

Determinism contract: every trial owns an RNG seeded by
SeedSequence([master_seed, snr_index, trial_index]), so results are
bit-identical regardless of worker count or scheduling order. Wall-clock
columns are the one exception; set measure_time = false in the config to get
a fully deterministic CSV.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, asdict, field, replace
from math import gcd

import numpy as np

from . import channel as ch
from .detectors import detect_single, detect_single_batch, detect_multi
from .errors import ConfigError, DDChirpError
from .grid import GridConfig, RootSet, build_root_set, valid_root_count, validate_shift
from .sensing import (SensingConfig, SensingMatrix, block_energies,
                      build_sensing_matrix, ost_detect)
from .sequences import PreambleBank
from .transforms import dzt

DETECTOR_CHOICES = ("alg1", "alg2", "ost", "both")
DEFAULT_SHIFTS = (7, 12, 18, 23)
DEFAULT_SNR_GRID = (0.0, 4.0, 8.0, 12.0, 16.0, 20.0)

CSV_COLUMNS = ("detector", "snr_db", "trials", "misses", "p_md",
               "stderr_p_md", "mean_ms_per_trial")


@dataclass(frozen=True)
class ExperimentConfig:
    """Fully-resolved sweep configuration (defaults already filled)."""

    M: int
    N: int
    nu_p_hz: float = 30e3
    nu_max_hz: float = 815.0
    tau_max_s: float | None = None  # None: maximum delay of the channel profile
    num_roots: int = 1024
    users: int = 1
    shifts: tuple[int, ...] = DEFAULT_SHIFTS
    snr_grid_db: tuple[float, ...] = DEFAULT_SNR_GRID
    trials: int = 100
    detector: str = "both"
    channel_profile: str = "veh-a"
    beta_tau: float = 0.6
    beta_nu: float = 0.6
    kernel_halfwidth: int = 16
    seed: int = 0
    out: str = "sweep.csv"
    measure_time: bool = True


def _require(doc: dict, key: str, path: str):
    if key not in doc:
        raise ConfigError(f"{path}: required field missing")
    return doc[key]


def _typed(value, kind, path: str):
    try:
        return kind(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{path}: expected {kind.__name__}, got {value!r}") from None


def parse_config(source) -> ExperimentConfig:
    """Build an ExperimentConfig from a JSON file path or an already-parsed dict.

    Unknown keys are rejected; schema errors name the offending field path.
    """
    if isinstance(source, dict):
        doc = source
    else:
        with open(source) as fh:
            doc = json.load(fh)

    known = {"grid", "num_roots", "users", "shifts", "snr_grid_db", "trials",
             "detector", "channel_profile", "shaping", "seed", "out",
             "measure_time"}
    for key in doc:
        if key not in known:
            raise ConfigError(f"{key}: unknown field")

    grid = _require(doc, "grid", "grid")
    if not isinstance(grid, dict):
        raise ConfigError("grid: expected an object")
    m = _typed(_require(grid, "M", "grid.M"), int, "grid.M")
    n = _typed(_require(grid, "N", "grid.N"), int, "grid.N")
    nu_p = _typed(grid.get("nu_p_hz", 30e3), float, "grid.nu_p_hz")
    nu_max = _typed(grid.get("nu_max_hz", 815.0), float, "grid.nu_max_hz")
    tau_max = grid.get("tau_max_s")
    if tau_max is not None:
        tau_max = _typed(tau_max, float, "grid.tau_max_s")

    shaping = doc.get("shaping", {})
    if not isinstance(shaping, dict):
        raise ConfigError("shaping: expected an object")

    cfg = ExperimentConfig(
        M=m, N=n, nu_p_hz=nu_p, nu_max_hz=nu_max, tau_max_s=tau_max,
        num_roots=_typed(doc.get("num_roots", 1024), int, "num_roots"),
        users=_typed(doc.get("users", 1), int, "users"),
        shifts=tuple(_typed(a, int, "shifts") for a in doc.get("shifts", DEFAULT_SHIFTS)),
        snr_grid_db=tuple(_typed(s, float, "snr_grid_db")
                          for s in doc.get("snr_grid_db", DEFAULT_SNR_GRID)),
        trials=_typed(doc.get("trials", 100), int, "trials"),
        detector=doc.get("detector", "both"),
        channel_profile=doc.get("channel_profile", "veh-a"),
        beta_tau=_typed(shaping.get("beta_tau", 0.6), float, "shaping.beta_tau"),
        beta_nu=_typed(shaping.get("beta_nu", 0.6), float, "shaping.beta_nu"),
        kernel_halfwidth=_typed(shaping.get("kernel_halfwidth", 16), int,
                                "shaping.kernel_halfwidth"),
        seed=_typed(doc.get("seed", 0), int, "seed"),
        out=doc.get("out", "sweep.csv"),
        measure_time=bool(doc.get("measure_time", True)),
    )
    if cfg.trials < 1:
        raise ConfigError("trials: must be >= 1")
    if not cfg.snr_grid_db:
        raise ConfigError("snr_grid_db: must be non-empty")
    if cfg.users < 1:
        raise ConfigError("users: must be >= 1")
    if cfg.detector not in DETECTOR_CHOICES:
        raise ConfigError(f"detector: must be one of {DETECTOR_CHOICES}")
    if not cfg.shifts:
        raise ConfigError("shifts: must be non-empty")
    return cfg


def serialize_config(cfg: ExperimentConfig) -> dict:
    """Inverse of parse_config; parse(serialize(parse(x))) is a fixed point."""
    return {
        "grid": {"M": cfg.M, "N": cfg.N, "nu_p_hz": cfg.nu_p_hz,
                 "nu_max_hz": cfg.nu_max_hz, "tau_max_s": cfg.tau_max_s},
        "num_roots": cfg.num_roots,
        "users": cfg.users,
        "shifts": list(cfg.shifts),
        "snr_grid_db": list(cfg.snr_grid_db),
        "trials": cfg.trials,
        "detector": cfg.detector,
        "channel_profile": cfg.channel_profile,
        "shaping": {"beta_tau": cfg.beta_tau, "beta_nu": cfg.beta_nu,
                    "kernel_halfwidth": cfg.kernel_halfwidth},
        "seed": cfg.seed,
        "out": cfg.out,
        "measure_time": cfg.measure_time,
    }


class ExperimentContext:
    """Immutable per-experiment state shared across trials.

    Holds the grid, root set, preamble bank, channel profile, and (when a
    detector needs it) the sensing matrix. Safe to share between workers.
    """

    def __init__(self, cfg: ExperimentConfig):
        self.cfg = cfg
        if cfg.channel_profile == "veh-a":
            self.profile = ch.ChannelProfile.veh_a()
            nu_max = cfg.nu_max_hz
        else:
            self.profile, nu_max = ch.load_profile(cfg.channel_profile)
        tau_max = cfg.tau_max_s if cfg.tau_max_s is not None else self.profile.max_delay_s
        self.grid = GridConfig(cfg.M, cfg.N, cfg.nu_p_hz, tau_max, nu_max)
        for a in cfg.shifts:
            if not validate_shift(a, self.grid):
                raise ConfigError(f"shifts: {a} not coprime to M and N")
        self.shifts = cfg.shifts
        self.roots = build_root_set(self.grid, cfg.num_roots)
        self.bank = PreambleBank(self.roots)
        self.shaping = ch.ShapingConfig(cfg.beta_tau, cfg.beta_nu, cfg.kernel_halfwidth)
        self.detectors = self._detector_list()
        self.sensing = None
        if any(d in ("alg2", "ost") for d in self.detectors):
            self.sensing = build_sensing_matrix(self.roots, self.grid)

    def _detector_list(self) -> tuple[str, ...]:
        if self.cfg.detector == "both":
            primary = "alg1" if self.cfg.users == 1 else "alg2"
            return (primary, "ost")
        return (self.cfg.detector,)


def synthesize_trial(ctx: ExperimentContext, snr_db: float, trial_seed):
    """Draw one trial's transmitted roots and received block.

    K distinct roots are drawn uniformly; each preamble passes through its
    own channel realization before superposition and noise.
    """
    rng = np.random.default_rng(np.random.SeedSequence(trial_seed))
    chosen = rng.choice(len(ctx.roots), size=ctx.cfg.users, replace=False)
    tx_roots = [ctx.roots.roots[i] for i in chosen]
    received = []
    for u in tx_roots:
        realization = ch.sample_channel(rng, ctx.profile, ctx.grid.nu_max_hz)
        received.append(ch.apply_channel(ctx.bank[u].td, realization,
                                         ctx.shaping, ctx.grid))
    y = ch.add_awgn(ch.superpose(received), snr_db, rng)
    return tx_roots, y


def run_trial(ctx: ExperimentContext, snr_db: float, trial_seed,
              detectors=None) -> dict:
    """One Monte-Carlo trial; returns per-detector hit flags and timings.

    All configured detectors see the same received block. Detector
    exceptions count as misses, never abort a sweep.
    """
    cfg = ctx.cfg
    if detectors is None:
        detectors = ctx.detectors
    tx_roots, y = synthesize_trial(ctx, snr_db, trial_seed)

    y_dd = None
    if any(d in ("alg2", "ost") for d in detectors):
        y_dd = dzt(y, ctx.grid).ravel()

    hits = {}
    timings = {}
    for det in detectors:
        t0 = time.perf_counter()
        try:
            if det == "alg1":
                detected = detect_single(y, ctx.shifts[0], ctx.roots).detected
            elif det == "alg2":
                detected = detect_multi(y, ctx.shifts, cfg.users, ctx.sensing,
                                        ctx.roots, y_dd=y_dd).detected
            else:
                detected = [u for u, _ in ost_detect(ctx.sensing, y_dd, cfg.users)]
        except DDChirpError:
            detected = []
        timings[det] = time.perf_counter() - t0
        hits[det] = [u in detected for u in tx_roots]
    return {"hits": hits, "timings": timings, "tx_roots": tx_roots, "y": y}


@dataclass(frozen=True)
class SweepRow:
    detector: str
    snr_db: float
    trials: int
    misses: int
    p_md: float
    stderr_p_md: float
    mean_ms_per_trial: float | None


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]

    def for_detector(self, detector: str) -> list[SweepRow]:
        return [r for r in self.rows if r.detector == detector]


def _ost_batch_hits(ctx: ExperimentContext, outcomes: list) -> tuple[list, float]:
    """Score plain OST for a whole SNR point with one GEMM.

    Equivalent to running ost_detect per trial (same energies, same stable
    tie-break) but far faster; the full-matrix correlation dominates OST cost
    and BLAS does much better on a stacked batch. Returns per-trial hit flags
    and the mean per-trial seconds.
    """
    k = ctx.cfg.users
    t0 = time.perf_counter()
    y_batch = np.stack([o["y"] for o in outcomes])
    y_dd = dzt(y_batch, ctx.grid).reshape(len(outcomes), ctx.grid.mn)
    energies = block_energies(ctx.sensing, y_dd)
    top = np.argsort(-energies, axis=1, kind="stable")[:, :k]
    per_trial = (time.perf_counter() - t0) / len(outcomes)
    roots_arr = np.asarray(ctx.sensing.roots)
    hits = []
    for row, o in zip(top, outcomes):
        detected = set(roots_arr[row].tolist())
        hits.append([u in detected for u in o["tx_roots"]])
    return hits, per_trial


def run_sweep(cfg: ExperimentConfig, threads: int = 1,
              ctx: ExperimentContext | None = None) -> SweepResult:
    """Run the full SNR sweep; trials are scheduled across `threads` workers
    and merged by trial index, so the result is independent of thread count."""
    if ctx is None:
        ctx = ExperimentContext(cfg)
    per_trial_dets = tuple(d for d in ctx.detectors if d != "ost")
    rows = []
    for snr_idx, snr_db in enumerate(cfg.snr_grid_db):
        seeds = [[cfg.seed, snr_idx, t] for t in range(cfg.trials)]
        work = lambda s: run_trial(ctx, snr_db, s, detectors=per_trial_dets)
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                outcomes = list(pool.map(work, seeds))
        else:
            outcomes = [work(s) for s in seeds]
        if "ost" in ctx.detectors:
            ost_hits, ost_secs = _ost_batch_hits(ctx, outcomes)
            for o, h in zip(outcomes, ost_hits):
                o["hits"]["ost"] = h
                o["timings"]["ost"] = ost_secs
        for det in ctx.detectors:
            misses = sum(flags.count(False)
                         for flags in (o["hits"][det] for o in outcomes))
            total = cfg.trials * cfg.users
            p_md = misses / total
            stderr = float(np.sqrt(p_md * (1 - p_md) / total))
            mean_ms = None
            if cfg.measure_time:
                mean_ms = 1e3 * float(np.mean([o["timings"][det] for o in outcomes]))
            rows.append(SweepRow(det, snr_db, cfg.trials, misses, p_md, stderr, mean_ms))
    return SweepResult(tuple(rows))


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def emit_csv(result: SweepResult, path) -> None:
    """One row per detector x SNR point; deterministic formatting."""
    with open(path, "w") as fh:
        fh.write(",".join(CSV_COLUMNS) + "\n")
        for row in result.rows:
            fh.write(",".join(_fmt(getattr(row, col)) for col in CSV_COLUMNS) + "\n")


# ---------------------------------------------------------------------------
# Complexity bench
# ---------------------------------------------------------------------------

BENCH_GRIDS = ((7, 9), (15, 17), (31, 37), (63, 65))
BENCH_SENSING = SensingConfig((0, 1, 2), (-1, 0, 1))


@dataclass(frozen=True)
class BenchRow:
    detector: str
    M: int
    N: int
    mn: int
    num_roots: int
    per_detection_ms: float


@dataclass(frozen=True)
class BenchResult:
    rows: tuple[BenchRow, ...]
    slopes: dict[str, float]


def _median_time(fn, min_elapsed: float = 0.05, repeats: int = 5) -> float:
    """Median seconds per call, looping until each sample exceeds min_elapsed."""
    fn()  # warm-up
    samples = []
    for _ in range(repeats):
        calls = 0
        t0 = time.perf_counter()
        elapsed = 0.0
        while elapsed < min_elapsed:
            fn()
            calls += 1
            elapsed = time.perf_counter() - t0
        samples.append(elapsed / calls)
    return float(np.median(samples))


def run_bench(grids=BENCH_GRIDS, detectors=("alg1", "ost"), root_ratio: float = 0.4,
              batch: int = 512, seed: int = 0) -> BenchResult:
    """Empirical per-detection runtime versus grid size MN.

    Detections are timed in vectorized batches of `batch` independent inputs
    so per-call interpreter overhead does not mask the algorithmic scaling;
    the reported figure is wall time per detection. Preamble and
    sensing-matrix construction are excluded. Root count grows as a fixed
    fraction of MN so the OST stage exercises its G*S*MN matvec.
    """
    rng = np.random.default_rng(seed)
    rows = []
    times: dict[str, list[tuple[int, float]]] = {d: [] for d in detectors}
    for m, n in grids:
        cfg = GridConfig(m, n, nu_p_hz=30e3)
        g = min(round(root_ratio * cfg.mn), valid_root_count(cfg))
        roots = build_root_set(cfg, g)
        a = next(x for x in range(2, cfg.mn)
                 if gcd(x, m) == 1 and gcd(x, n) == 1)
        signals = (rng.standard_normal((batch, cfg.mn))
                   + 1j * rng.standard_normal((batch, cfg.mn)))
        for det in detectors:
            if det == "alg1":
                per_call = _median_time(lambda: detect_single_batch(signals, a, roots))
            elif det == "ost":
                A = build_sensing_matrix(roots, cfg, BENCH_SENSING,
                                         dtype=np.complex64, max_entries=1 << 30)
                y_dd = dzt(signals, cfg).reshape(batch, cfg.mn)
                def ost_stage():
                    np.argmax(block_energies(A, y_dd), axis=-1)
                per_call = _median_time(ost_stage)
            else:
                raise ConfigError(f"bench detector {det!r} not supported")
            per_det = per_call / batch
            rows.append(BenchRow(det, m, n, cfg.mn, g, per_det * 1e3))
            times[det].append((cfg.mn, per_det))
    slopes = {}
    for det, pairs in times.items():
        mns = np.log([p[0] for p in pairs])
        ts = np.log([p[1] for p in pairs])
        slopes[det] = float(np.polyfit(mns, ts, 1)[0])
    return BenchResult(tuple(rows), slopes)


def emit_bench_csv(result: BenchResult, path) -> None:
    cols = ("detector", "M", "N", "mn", "num_roots", "per_detection_ms")
    with open(path, "w") as fh:
        fh.write(",".join(cols) + "\n")
        for row in result.rows:
            fh.write(",".join(_fmt(getattr(row, col)) for col in cols) + "\n")
        for det, slope in sorted(result.slopes.items()):
            fh.write(f"# loglog_slope,{det},{slope:.4f}\n")
