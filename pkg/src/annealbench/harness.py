"""Experiment orchestration: sweeps, basin maps, histograms, and timings.

Every experiment is driven by a master seed; task k uses the derived child
seed derive_seed(master, k), so results are independent of thread count and
reproduce bit-for-bit from a manifest.  Wall times are measured, not
derived, and are the one record field excluded from reproducibility checks.
"""

import csv
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, asdict

import numpy as np

from ._kernels import derive_seed
from . import dwe, potentials, sqa, thermal
from .descent import CgParams, NmParams, conjugate_gd, nelder_mead
from .ising import (GridSpec, build_2d_grid, magnetisation, normalized_energy,
                    random_spin_state)

__all__ = [
    "RunRecord", "SweepResult", "TaConfig", "QaConfig", "BenchConfig",
    "ising_thermal_sweep", "ising_lambda_sweep", "basin_map",
    "distance_histograms", "lambda_scaling_study", "grid_size_study",
    "timing_table", "success_threshold", "success_fraction",
    "write_run_records", "read_run_records", "write_sweep_result",
    "read_sweep_result", "write_manifest", "read_manifest",
    "thread_count", "PAPER_TIMINGS_US", "CLASSICAL_LAMBDA", "QUANTUM_LAMBDA",
    "TA_SCHEDULE",
]

METHODS = ("nm", "gd", "ta", "qa")

# Scales and schedules used by the published benchmark runs.
CLASSICAL_LAMBDA = {"u1": 0.5, "u2": 0.5, "u3": 1.7}
QUANTUM_LAMBDA = {"u1": 0.7, "u2": 10.0, "u3": 1.7}
TA_SCHEDULE = {"u1": "u1-paper", "u2": "u1-paper", "u3": "u3-paper"}

# Reference per-run timings (microseconds) reported for the four methods on
# the multi-well landscape; shown beside measured values, never asserted.
PAPER_TIMINGS_US = {"nm": 4900.0, "gd": 2900.0, "ta": 5.0e5, "qa": 115.0}

RUN_RECORD_FIELDS = ("method", "potential", "phi_start", "psi_start",
                     "phi_out", "psi_out", "delta", "energy", "valid",
                     "seed", "wall_time_us")


def thread_count(requested=None):
    if requested is not None:
        return max(1, int(requested))
    env = os.environ.get("ANNEALBENCH_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _run_tasks(fn, n_tasks, threads):
    """Run fn(task_index) over all indices, results in index order."""
    workers = thread_count(threads)
    if workers <= 1 or n_tasks <= 1:
        return [fn(k) for k in range(n_tasks)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(n_tasks)))


@dataclass(frozen=True)
class RunRecord:
    """One optimisation run: where it started, where it ended, how far off."""

    method: str
    potential: str
    phi_start: float
    psi_start: float
    phi_out: float
    psi_out: float
    delta: float
    energy: float
    valid: bool
    seed: int
    wall_time_us: int

    def to_row(self):
        return [self.method, self.potential, repr(self.phi_start),
                repr(self.psi_start), repr(self.phi_out), repr(self.psi_out),
                repr(self.delta), repr(self.energy), int(self.valid),
                self.seed, self.wall_time_us]

    @classmethod
    def from_row(cls, row):
        return cls(method=row[0], potential=row[1], phi_start=float(row[2]),
                   psi_start=float(row[3]), phi_out=float(row[4]),
                   psi_out=float(row[5]), delta=float(row[6]),
                   energy=float(row[7]), valid=bool(int(row[8])),
                   seed=int(row[9]), wall_time_us=int(row[10]))


def write_run_records(path, records):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(RUN_RECORD_FIELDS)
        for r in records:
            w.writerow(r.to_row())


def read_run_records(path):
    out = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != RUN_RECORD_FIELDS:
            raise ValueError(f"{path}: unexpected header {header}")
        for row in reader:
            if row:
                out.append(RunRecord.from_row(row))
    return out


@dataclass(frozen=True)
class SweepResult:
    """Per-axis-value mean/std of the bond energy density and magnetisation."""

    axis: str
    values: tuple
    eta_mean: tuple
    eta_std: tuple
    m_mean: tuple
    m_std: tuple
    count: int


SWEEP_FIELDS = ("axis_value", "eta_mean", "eta_std", "m_mean", "m_std", "count")


def write_sweep_result(path, result):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(SWEEP_FIELDS)
        for k, v in enumerate(result.values):
            w.writerow([repr(v), repr(result.eta_mean[k]), repr(result.eta_std[k]),
                        repr(result.m_mean[k]), repr(result.m_std[k]), result.count])


def read_sweep_result(path, axis="axis"):
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        for row in reader:
            if row:
                rows.append(row)
    return SweepResult(
        axis=axis,
        values=tuple(float(r[0]) for r in rows),
        eta_mean=tuple(float(r[1]) for r in rows),
        eta_std=tuple(float(r[2]) for r in rows),
        m_mean=tuple(float(r[3]) for r in rows),
        m_std=tuple(float(r[4]) for r in rows),
        count=int(rows[0][5]) if rows else 0,
    )


def write_manifest(path, command, config, master_seed):
    payload = {"command": command, "config": config, "master_seed": master_seed,
               "format": 1}
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_manifest(path):
    with open(path) as fh:
        return json.load(fh)


# -- Ising phase-transition sweeps -------------------------------------------


def ising_thermal_sweep(n, lam, t_values, protocol=(400, 100, 10), seed=1,
                        threads=None, anneal_in=True):
    """Magnetisation and bond energy density of the N x N grid versus T.

    protocol = (equilibration sweeps, measurement sweeps, repetitions).  All
    runs start from one shared random state drawn from the master seed.  With
    anneal_in (default) the equilibration window ramps the temperature
    linearly from well above the transition down to the target, which
    reaches the equilibrium ordered phase at low T; a fixed-T equilibration
    window (anneal_in=False) quenches instead and can freeze into striped
    metastable states.
    """
    equil, measure, reps = protocol
    problem = build_2d_grid(GridSpec(n, lam))
    n_spins = n * n
    n_bonds = problem.n_couplings
    init = random_spin_state(n_spins, np.random.default_rng(derive_seed(seed, 0)))
    t_values = [float(t) for t in t_values]

    def one(task):
        ti, rep = divmod(task, reps)
        t_target = t_values[ti]
        if anneal_in and equil > 0:
            t_start = max(2.5 * lam, 2.0 * t_target)
            ramp = np.linspace(t_start, t_target, equil)
            segments = tuple((1, float(t)) for t in ramp) + ((measure, t_target),)
        else:
            segments = ((max(equil, 1), t_target), (measure, t_target))
        sched = thermal.ThermalSchedule(segments)
        res = thermal.run_thermal(problem, sched, init, derive_seed(seed, 1 + task))
        window = slice(sched.total_iterations - measure, None)
        eta = res.energy_trace[window] / (lam * n_bonds)
        m = np.abs(res.magnet_trace[window]) / n_spins
        return eta, m

    results = _run_tasks(one, len(t_values) * reps, threads)
    eta_mean, eta_std, m_mean, m_std = [], [], [], []
    for ti in range(len(t_values)):
        etas = np.concatenate([results[ti * reps + r][0] for r in range(reps)])
        ms = np.concatenate([results[ti * reps + r][1] for r in range(reps)])
        eta_mean.append(float(etas.mean()))
        eta_std.append(float(etas.std()))
        m_mean.append(float(ms.mean()))
        m_std.append(float(ms.std()))
    return SweepResult(axis="temperature", values=tuple(t_values),
                       eta_mean=tuple(eta_mean), eta_std=tuple(eta_std),
                       m_mean=tuple(m_mean), m_std=tuple(m_std),
                       count=reps * measure)


def ising_lambda_sweep(n, s_hold, lambda_values, hold_us=100.0, reads=24,
                       sqa_config=None, seed=1, threads=None, ordered_init=True):
    """Readout magnetisation of the grid under the emulator versus coupling scale.

    Each coupling value runs a reverse anneal (1 -> s_hold -> 1) and
    aggregates eta and M over the reads.  The default ordered start probes
    how far down in lambda the ordered phase persists; it avoids the domain
    coarsening that local updates cannot heal at large couplings within any
    affordable sweep budget (a random start is available for comparison).
    """
    base = sqa_config or sqa.SqaConfig()
    lambda_values = [float(v) for v in lambda_values]
    n_spins = n * n
    if ordered_init:
        init = np.ones(n_spins, dtype=np.int8)
    else:
        init = random_spin_state(n_spins, np.random.default_rng(derive_seed(seed, 0)))
    schedule = sqa.QuantumSchedule.reverse_anneal(s_hold, hold_us=hold_us)

    def one(task):
        lam = lambda_values[task]
        problem = build_2d_grid(GridSpec(n, lam))
        cfg = sqa.SqaConfig(trotter_slices=base.trotter_slices, t_eff=base.t_eff,
                            sweeps_per_us=base.sweeps_per_us, num_reads=reads,
                            seed=derive_seed(seed, 1 + task))
        rs = sqa.sqa_run(problem, schedule, cfg, init)
        eta = np.array([normalized_energy(problem, s, lam) for s in rs.states])
        m = np.array([magnetisation(s) for s in rs.states])
        return eta, m

    results = _run_tasks(one, len(lambda_values), threads)
    return SweepResult(
        axis="lambda", values=tuple(lambda_values),
        eta_mean=tuple(float(e.mean()) for e, _ in results),
        eta_std=tuple(float(e.std()) for e, _ in results),
        m_mean=tuple(float(m.mean()) for _, m in results),
        m_std=tuple(float(m.std()) for _, m in results),
        count=reads)


# -- Continuous-potential benchmarks ------------------------------------------


@dataclass(frozen=True)
class TaConfig:
    """Thermal-annealing side of the benchmark: encoding size and schedule."""

    n: int = 50
    schedule: str = ""  # preset name or CSV path; "" = per-potential default
    mode: str = "h"


@dataclass(frozen=True)
class QaConfig:
    """Emulator side: encoding size and reverse-anneal shape."""

    n: int = 20
    s_hold: float = 0.3
    hold_us: float = 40.0
    ramp_down_us: float = 2.0
    ramp_up_us: float = 15.0
    num_reads: int = 100
    trotter_slices: int = 32
    t_eff: float = 0.05
    sweeps_per_us: float = 10.0
    mode: str = "h"

    def schedule(self):
        return sqa.QuantumSchedule.reverse_anneal(
            self.s_hold, hold_us=self.hold_us,
            ramp_down_us=self.ramp_down_us, ramp_up_us=self.ramp_up_us)

    def sqa_config(self, seed, num_reads=None):
        return sqa.SqaConfig(trotter_slices=self.trotter_slices, t_eff=self.t_eff,
                             sweeps_per_us=self.sweeps_per_us,
                             num_reads=num_reads or self.num_reads, seed=seed)


@dataclass(frozen=True)
class BenchConfig:
    """Everything basin maps and histograms need besides the potential."""

    seed: int = 1
    threads: int = None
    ta: TaConfig = TaConfig()
    qa: QaConfig = QaConfig()
    nm: NmParams = NmParams()


def _ta_schedule_for(potential, cfg):
    name = cfg.ta.schedule or TA_SCHEDULE.get(potential.id, "u1-paper")
    if os.path.exists(name):
        return thermal.schedule_from_csv(name)
    return thermal.preset_schedule(name)


def start_grid(potential, side):
    """side x side uniform lattice of start points spanning the domain."""
    lo_p, hi_p, lo_q, hi_q = potential.bounds
    phis = np.linspace(lo_p, hi_p, side)
    psis = np.linspace(lo_q, hi_q, side)
    return [(float(a), float(b)) for a in phis for b in psis]


def success_threshold(potential, n=20):
    """Distance counted as finding the minimum: twice the decoder cell."""
    lo_p, hi_p, lo_q, hi_q = potential.bounds
    return 2.0 * max((hi_p - lo_p) / (n - 2), (hi_q - lo_q) / (n - 2))


def success_fraction(records, threshold):
    """Fraction of runs that landed within threshold; invalid runs count as misses."""
    if not records:
        return 0.0
    good = sum(1 for r in records if r.valid and r.delta < threshold)
    return good / len(records)


def _record(method, potential, start, point, valid, seed, t0_ns):
    wall_us = (time.perf_counter_ns() - t0_ns) // 1000
    if valid:
        delta = potentials.distance_to_truth(potential, point)
        e = potential.eval(*point)
    else:
        point = (math.nan, math.nan)
        delta = math.nan
        e = math.nan
    return RunRecord(method=method, potential=potential.id,
                     phi_start=start[0], psi_start=start[1],
                     phi_out=point[0], psi_out=point[1], delta=delta,
                     energy=e, valid=valid, seed=seed, wall_time_us=int(wall_us))


def basin_map(method, potential, starts, cfg=BenchConfig()):
    """One RunRecord per start point for the chosen method.

    ``starts`` is either a grid side length or an explicit point list.  The
    continuous methods run on the potential itself; the annealers run on its
    domain-wall encoding, starting from the faithful state nearest the start
    point.  The emulator's point estimate is the densest cell of its reads.
    """
    method = method.lower()
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}, got {method!r}")
    if isinstance(starts, int):
        starts = start_grid(potential, starts)
    potentials.true_minimum(potential)  # cache before threading

    if method in ("ta", "qa"):
        n_enc = cfg.ta.n if method == "ta" else cfg.qa.n
        mode = cfg.ta.mode if method == "ta" else cfg.qa.mode
        problem, layout, _ = dwe.encode(potential, n_enc, mode=mode)
        problem.csr()  # build adjacency before threading
    if method == "ta":
        schedule = _ta_schedule_for(potential, cfg)
    if method == "qa":
        schedule = cfg.qa.schedule()

    def one(task):
        start = starts[task]
        seed = derive_seed(cfg.seed, task)
        t0 = time.perf_counter_ns()
        if method == "nm":
            res = nelder_mead(potential, start, cfg.nm)
            return _record(method, potential, start, res.point, True, seed, t0)
        if method == "gd":
            params = CgParams(bounds=potential.bounds)
            res = conjugate_gd(potential, None, start, params)
            return _record(method, potential, start, res.point, True, seed, t0)
        k = (layout.phi_index(start[0]), layout.psi_index(start[1]))
        init = dwe.plant_state(layout, *k)
        if method == "ta":
            res = thermal.run_thermal(problem, schedule, init, seed)
            sample = dwe.decode(res.final, layout)
            return _record(method, potential, start, (sample.phi, sample.psi),
                           sample.valid, seed, t0)
        rs = sqa.sqa_run(problem, schedule, cfg.qa.sqa_config(seed), init,
                         layout=layout)
        try:
            best = sqa.mode_of_reads(rs, layout)
        except sqa.NoValidReadsError:
            return _record(method, potential, start, None, False, seed, t0)
        return _record(method, potential, start, (best.phi, best.psi), True,
                       seed, t0)

    return _run_tasks(one, len(starts), cfg.threads)


def distance_histograms(method, potential, starts, reps=100, cfg=BenchConfig()):
    """Distance distributions for a handful of distinct start points.

    Returns {start: array of distances}.  The deterministic methods simply
    repeat to the same value; thermal annealing reruns with fresh seeds; the
    emulator's distribution is over its individual reads (invalid reads are
    filtered out).
    """
    method = method.lower()
    out = {}
    for si, start in enumerate(starts):
        if method == "qa":
            sub = BenchConfig(seed=derive_seed(cfg.seed, si), threads=cfg.threads,
                              ta=cfg.ta, qa=cfg.qa, nm=cfg.nm)
            problem, layout, _ = dwe.encode(potential, cfg.qa.n, mode=cfg.qa.mode)
            init = dwe.plant_state(layout, layout.phi_index(start[0]),
                                   layout.psi_index(start[1]))
            rs = sqa.sqa_run(problem, cfg.qa.schedule(),
                             cfg.qa.sqa_config(sub.seed, num_reads=reps), init,
                             layout=layout)
            deltas = [potentials.distance_to_truth(potential, (d.phi, d.psi))
                      for d in rs.samples if d.valid]
            out[start] = np.array(deltas)
            continue
        sub = BenchConfig(seed=derive_seed(cfg.seed, si), threads=cfg.threads,
                          ta=cfg.ta, qa=cfg.qa, nm=cfg.nm)
        records = basin_map(method, potential, [start] * reps, sub)
        out[start] = np.array([r.delta for r in records if r.valid])
    return out


def histogram_rows(distances, bin_width=0.1):
    """Bin a distance array into (bin_lo, bin_hi, count) rows."""
    if len(distances) == 0:
        return []
    top = float(np.max(distances))
    n_bins = max(1, int(math.floor(top / bin_width)) + 1)
    counts, edges = np.histogram(distances, bins=n_bins,
                                 range=(0.0, n_bins * bin_width))
    return [(float(edges[k]), float(edges[k + 1]), int(c))
            for k, c in enumerate(counts) if c > 0]


def lambda_scaling_study(lambdas=(0.5, 5.0, 10.0), starts=36, reps=None,
                         cfg=BenchConfig(), literal_sign=False):
    """Emulator success on the multi-well landscape as its depth scales.

    Returns {lambda: (records, success fraction)} with the success cell fixed
    by the emulator's decoder pitch.
    """
    out = {}
    for k, lam in enumerate(lambdas):
        pot = potentials.u2(lam=lam, literal_sign=literal_sign)
        sub = BenchConfig(seed=derive_seed(cfg.seed, 1000 + k), threads=cfg.threads,
                          ta=cfg.ta, qa=cfg.qa, nm=cfg.nm)
        records = basin_map("qa", pot, starts, sub)
        out[lam] = (records, success_fraction(
            records, success_threshold(pot, cfg.qa.n)))
    return out


def grid_size_study(n_values, method, potential, starts=36, cfg=BenchConfig()):
    """Success fraction of one method as the encoding resolution changes."""
    out = {}
    for k, n in enumerate(n_values):
        if method == "ta":
            sub_ta, sub_qa = TaConfig(n=n, schedule=cfg.ta.schedule, mode=cfg.ta.mode), cfg.qa
        else:
            sub_ta = cfg.ta
            sub_qa = QaConfig(**{**asdict(cfg.qa), "n": n})
        sub = BenchConfig(seed=derive_seed(cfg.seed, 2000 + k), threads=cfg.threads,
                          ta=sub_ta, qa=sub_qa, nm=cfg.nm)
        records = basin_map(method, potential, starts, sub)
        out[n] = success_fraction(records, success_threshold(potential, n))
    return out


def timing_table(methods, potential, reps=25, cfg=BenchConfig()):
    """Measured mean wall time per run beside the published reference values.

    Each method is warmed up once (JIT compilation, oracle caching) before
    timing; rows are (method, mean_us, std_us, reps, reference_us).
    """
    rng = np.random.default_rng(derive_seed(cfg.seed, 7))
    lo_p, hi_p, lo_q, hi_q = potential.bounds
    starts = [(float(rng.uniform(lo_p, hi_p)), float(rng.uniform(lo_q, hi_q)))
              for _ in range(reps)]
    rows = []
    serial = BenchConfig(seed=cfg.seed, threads=1, ta=cfg.ta, qa=cfg.qa, nm=cfg.nm)
    for method in methods:
        basin_map(method, potential, starts[:1], serial)  # warm-up, untimed
        records = basin_map(method, potential, starts, serial)
        times = np.array([r.wall_time_us for r in records], dtype=np.float64)
        rows.append((method, float(times.mean()), float(times.std()), reps,
                     PAPER_TIMINGS_US[method.lower()]))
    return rows
