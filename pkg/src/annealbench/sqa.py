"""Simulated quantum annealing: a path-integral Monte Carlo stand-in.

The transverse-field Hamiltonian is Trotterized into P coupled replicas of
the classical problem.  At anneal parameter s the in-slice couplings carry
weight B(s)/P while adjacent replicas (periodic in the slice index) are tied
by a ferromagnetic coupling

    J_perp = -(T_eff / 2) * ln tanh(A(s) / (P * T_eff)),

which diverges as the transverse amplitude A vanishes, locking the replicas
together into a single classical state.  Schedules are piecewise-linear
s(t) paths starting from s = 1, mirroring reverse annealing; each ramp must
respect the (1 - s) microsecond minimum ramp time.
"""

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .dwe import decode
from .ising import as_spin_state, energy

__all__ = [
    "QuantumSchedule",
    "TransverseCurves",
    "SqaConfig",
    "ReadSet",
    "NoValidReadsError",
    "slice_coupling",
    "effective_energy",
    "readout",
    "sqa_run",
    "mode_of_reads",
]


class NoValidReadsError(RuntimeError):
    """Raised when every read of a run fails to decode faithfully."""


@dataclass(frozen=True)
class QuantumSchedule:
    """Piecewise-linear s(t): segments of (duration_us, s_target) from s = 1."""

    segments: tuple

    def __post_init__(self):
        segs = tuple((float(d), float(s)) for d, s in self.segments)
        if not segs:
            raise ValueError("schedule needs at least one segment")
        prev = 1.0
        for dur, s_target in segs:
            if dur <= 0:
                raise ValueError(f"segment durations must be positive, got {dur}")
            if not 0.0 <= s_target <= 1.0:
                raise ValueError(f"s must stay in [0, 1], got {s_target}")
            if s_target != prev:
                min_ramp = 1.0 - min(prev, s_target)
                if dur < min_ramp - 1e-12:
                    raise ValueError(
                        f"ramp {prev} -> {s_target} lasts {dur} us; "
                        f"minimum ramp time is {min_ramp} us")
            prev = s_target
        object.__setattr__(self, "segments", segs)

    @property
    def total_us(self):
        return sum(d for d, _ in self.segments)

    def s_of_time(self, t_us):
        """Interpolated s at time t_us (clamped to the schedule's span)."""
        if t_us <= 0:
            return 1.0
        prev_s, elapsed = 1.0, 0.0
        for dur, s_target in self.segments:
            if t_us <= elapsed + dur:
                frac = (t_us - elapsed) / dur
                return prev_s + frac * (s_target - prev_s)
            prev_s, elapsed = s_target, elapsed + dur
        return prev_s

    @classmethod
    def reverse_anneal(cls, s_hold, hold_us, ramp_down_us=None, ramp_up_us=None):
        """1 -> s_hold -> hold -> 1, ramps defaulting to the hardware minimum."""
        min_ramp = 1.0 - s_hold
        down = max(ramp_down_us if ramp_down_us is not None else min_ramp, 1e-9)
        up = max(ramp_up_us if ramp_up_us is not None else min_ramp, 1e-9)
        return cls(((down, s_hold), (hold_us, s_hold), (up, 1.0)))

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["duration_us", "s_target"])
            for dur, s in self.segments:
                w.writerow([repr(dur), repr(s)])

    @classmethod
    def from_csv(cls, path):
        segs = []
        with open(path, newline="") as fh:
            for row in csv.reader(fh):
                if not row or row[0].strip().lower() == "duration_us":
                    continue
                segs.append((float(row[0]), float(row[1])))
        return cls(tuple(segs))


@dataclass(frozen=True)
class TransverseCurves:
    """Sampled A(s), B(s) amplitude curves, linearly interpolated."""

    s_grid: tuple = (0.0, 1.0)
    a_values: tuple = (1.0, 0.0)
    b_values: tuple = (0.0, 1.0)

    def __post_init__(self):
        s = np.asarray(self.s_grid, dtype=np.float64)
        a = np.asarray(self.a_values, dtype=np.float64)
        b = np.asarray(self.b_values, dtype=np.float64)
        if not (s.shape == a.shape == b.shape) or s.size < 2:
            raise ValueError("curves need matching s/A/B samples, at least two")
        if np.any(np.diff(s) <= 0):
            raise ValueError("s samples must be strictly increasing")
        if np.any(a < 0) or np.any(b < 0):
            raise ValueError("amplitudes must be nonnegative")
        if abs(float(np.interp(1.0, s, a))) > 1e-9:
            raise ValueError("transverse amplitude A must vanish at s = 1")
        if np.any(np.diff(b) < 0):
            raise ValueError("B must be non-decreasing in s")

    def a(self, s):
        return float(np.interp(s, self.s_grid, self.a_values))

    def b(self, s):
        return float(np.interp(s, self.s_grid, self.b_values))

    @classmethod
    def from_csv(cls, path):
        rows = []
        with open(path, newline="") as fh:
            for row in csv.reader(fh):
                if not row or row[0].strip().lower() == "s":
                    continue
                rows.append((float(row[0]), float(row[1]), float(row[2])))
        rows.sort()
        return cls(tuple(r[0] for r in rows), tuple(r[1] for r in rows),
                   tuple(r[2] for r in rows))


@dataclass(frozen=True)
class SqaConfig:
    """Emulator knobs: replica count, effective temperature, sweep density."""

    trotter_slices: int = 32
    t_eff: float = 0.05
    sweeps_per_us: float = 10.0
    num_reads: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.trotter_slices < 2:
            raise ValueError("need at least 2 Trotter slices")
        if not self.t_eff > 0:
            raise ValueError("effective temperature must be positive")
        if not self.sweeps_per_us >= 1:
            raise ValueError("need at least one sweep per microsecond")
        if self.num_reads < 1:
            raise ValueError("need at least one read")


@dataclass
class ReadSet:
    """One classical readout per read, with energies and optional decodes."""

    states: list
    energies: np.ndarray
    samples: list = None  # DecodedSample per read when a layout is attached
    seed: int = 0

    def __len__(self):
        return len(self.states)


def slice_coupling(a, p, t_eff):
    """Inter-slice ferromagnetic coupling for transverse amplitude ``a``.

    Positive and strictly decreasing in ``a``; returns +inf at a = 0, where
    replicas are locked (no inter-slice flip is ever accepted).
    """
    if t_eff <= 0:
        raise ValueError("effective temperature must be positive")
    if p < 2:
        raise ValueError("need at least 2 Trotter slices")
    if a < 0:
        raise ValueError("transverse amplitude must be >= 0")
    if a == 0.0:
        return math.inf
    # underflows to exactly 0.0 once tanh rounds to 1 (a/(p*t_eff) > ~19)
    return max(0.0, -(t_eff / 2.0) * math.log(math.tanh(a / (p * t_eff))))


def effective_energy(problem, slices, s, curves, config):
    """Trotterized energy of a full replica stack at anneal parameter s.

    (B(s)/P) * sum_k E_classical(slice_k) - J_perp * sum_k sum_i s_i^k s_i^{k+1}
    with the slice index periodic.  Infinite J_perp (s = 1) yields +-inf.
    """
    arr = np.asarray(slices)
    if arr.ndim != 2 or arr.shape[0] != config.trotter_slices \
            or arr.shape[1] != problem.n_spins:
        raise ValueError(
            f"slices must have shape ({config.trotter_slices}, {problem.n_spins}),"
            f" got {arr.shape}")
    p = config.trotter_slices
    b = curves.b(s)
    jperp = slice_coupling(curves.a(s), p, config.t_eff)
    classical = sum(energy(problem, arr[k]) for k in range(p))
    inter = float(np.sum(arr.astype(np.float64) * np.roll(arr, -1, axis=0)))
    if math.isinf(jperp) and inter == 0.0:
        return (b / p) * classical
    return (b / p) * classical - jperp * inter


def readout(slices, seed):
    """Classical state by per-spin majority vote across slices.

    Exact ties (even slice counts) are resolved by fair coins drawn from the
    seed's stream, one per tied spin in index order.
    """
    arr = np.asarray(slices)
    if arr.ndim != 2 or arr.shape[0] < 2:
        raise ValueError("need a (P, n) stack with P >= 2")
    sums = arr.sum(axis=0, dtype=np.int64)
    out = np.where(sums > 0, 1, -1).astype(np.int8)
    state = int(seed)
    for i in np.nonzero(sums == 0)[0]:
        state, bits = _kernels.py_next(state)
        out[i] = 1 if (bits >> 11) * (1.0 / 9007199254740992.0) < 0.5 else -1
    return out


def _sweep_tables(problem, schedule, curves, config):
    """Per-sweep (B/P, J_perp) arrays from the discretized schedule."""
    n_sweeps = max(1, round(schedule.total_us * config.sweeps_per_us))
    dt = schedule.total_us / n_sweeps
    p = config.trotter_slices
    bcoef = np.empty(n_sweeps)
    jperp = np.empty(n_sweeps)
    for m in range(n_sweeps):
        s = schedule.s_of_time((m + 0.5) * dt)
        bcoef[m] = curves.b(s) / p
        jp = slice_coupling(curves.a(s), p, config.t_eff)
        jperp[m] = min(jp, _kernels.LOCKED_COUPLING)
    return bcoef, jperp


def sqa_run(problem, schedule, config, init, curves=None, layout=None):
    """Anneal ``config.num_reads`` independent reads from a classical start.

    Every read seeds all P replicas with ``init`` (the s = 1 classical
    state), Metropolis-updates each (slice, spin) site per sweep while s
    follows the schedule, and reads out by majority vote at the end.  On
    sweeps where the transverse amplitude vanishes the replicas are locked
    and whole columns are flipped instead, which is classical Metropolis at
    t_eff: a greedy-stable start therefore survives an s = 1 hold untouched.
    Read r uses the child seed derive_seed(config.seed, r), so any single
    read is reproducible in isolation.  When a layout is given, each read is
    decoded and flagged.
    """
    curves = curves or TransverseCurves()
    init = as_spin_state(init, problem.n_spins)
    bcoef, jperp = _sweep_tables(problem, schedule, curves, config)
    indptr, nbr, jval = problem.csr()
    states = []
    energies = np.empty(config.num_reads)
    samples = [] if layout is not None else None
    for r in range(config.num_reads):
        seed_r = _kernels.derive_seed(config.seed, r)
        slices = np.repeat(init[None, :], config.trotter_slices, axis=0)
        end_state = _kernels.sqa_sweeps(problem.h, indptr, nbr, jval, slices,
                                        bcoef, jperp, config.t_eff,
                                        np.uint64(seed_r))
        state = readout(slices, int(end_state))
        states.append(state)
        energies[r] = energy(problem, state)
        if samples is not None:
            samples.append(decode(state, layout))
    return ReadSet(states=states, energies=energies, samples=samples,
                   seed=config.seed)


def mode_of_reads(reads, layout):
    """Densest lattice cell among the valid decoded reads.

    Reads are binned by their wall positions; the most-populated cell wins,
    with ties resolved toward the cell holding the lowest-energy read.
    Raises NoValidReadsError if nothing decodes faithfully.
    """
    if reads.samples is not None:
        samples = reads.samples
    else:
        samples = [decode(s, layout) for s in reads.states]
    cells = {}
    for sample, e in zip(samples, reads.energies):
        if not sample.valid:
            continue
        key = (layout.phi_index(sample.phi), layout.psi_index(sample.psi))
        count, best_e, best = cells.get(key, (0, math.inf, None))
        if e < best_e:
            best_e, best = e, sample
        cells[key] = (count + 1, best_e, best)
    if not cells:
        raise NoValidReadsError("no read decoded to a faithful configuration")
    winner = max(cells.values(), key=lambda item: (item[0], -item[1]))
    return winner[2]
