"""Metropolis simulated annealing under a piecewise temperature schedule.

One iteration is a full sweep: every spin proposed once in a freshly
shuffled order.  Uphill moves of size dE are accepted with exp(-dE/T)
(never at T = 0); Boltzmann's constant is 1 throughout.  Runs are
bit-reproducible from their 64-bit seed.
"""

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .ising import as_spin_state

__all__ = [
    "ThermalSchedule",
    "ThermalResult",
    "preset_schedule",
    "schedule_from_csv",
    "metropolis_sweep",
    "run_thermal",
    "acceptance_probability",
    "PRESET_NAMES",
]

PRESET_NAMES = ("constant", "sharp", "medium", "slow", "u1-paper", "u3-paper")


@dataclass(frozen=True)
class ThermalSchedule:
    """Ordered (iterations, temperature) segments."""

    segments: tuple
    name: str = ""

    def __post_init__(self):
        if not self.segments:
            raise ValueError("schedule needs at least one segment")
        for iters, temp in self.segments:
            if iters < 1:
                raise ValueError(f"segment iterations must be >= 1, got {iters}")
            if not (math.isfinite(temp) and temp >= 0):
                raise ValueError(f"temperatures must be finite and >= 0, got {temp}")
        object.__setattr__(self, "segments", tuple((int(i), float(t)) for i, t in self.segments))

    @property
    def total_iterations(self):
        return sum(i for i, _ in self.segments)

    def temperatures(self):
        """Per-iteration temperature array."""
        return np.concatenate([np.full(i, t) for i, t in self.segments])

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["iterations", "temperature"])
            for iters, temp in self.segments:
                w.writerow([iters, repr(temp)])


def schedule_from_csv(path):
    """Load `iterations,temperature` rows (header optional)."""
    segments = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].strip().lower() == "iterations":
                continue
            segments.append((int(row[0]), float(row[1])))
    return ThermalSchedule(tuple(segments), name=str(path))


def preset_schedule(name, start_temp=1.1, block=500, total=4000, decay_factor=0.05):
    """Named schedules from the benchmark protocol.

    u1-paper: start_temp for one block, halved for the next, then multiplied
    by decay_factor each subsequent block.  u3-paper: the same but with two
    blocks before the decay begins.  constant/sharp/medium/slow: stepped
    exponential profiles T_b = start_temp * r^b with r = 1.0, 0.05, 0.3, 0.7.
    """
    ratios = {"constant": 1.0, "sharp": 0.05, "medium": 0.3, "slow": 0.7}
    if name in ratios:
        r = ratios[name]
        n_blocks = total // block
        segs = [(block, start_temp * r ** b) for b in range(n_blocks)]
        return ThermalSchedule(tuple(segs), name=name)
    if name in ("u1-paper", "u3-paper"):
        hold = block if name == "u1-paper" else 2 * block
        segs = [(hold, start_temp), (block, start_temp / 2)]
        used = hold + block
        temp = start_temp / 2
        while used < total:
            temp *= decay_factor
            segs.append((block, temp))
            used += block
        return ThermalSchedule(tuple(segs), name=name)
    raise ValueError(f"unknown schedule preset {name!r}; known: {PRESET_NAMES}")


@dataclass
class ThermalResult:
    """Final state plus per-sweep traces of one annealing run."""

    final: np.ndarray
    energy_trace: np.ndarray
    acceptance_trace: np.ndarray  # accepted fraction per sweep
    magnet_trace: np.ndarray      # signed sum of spins per sweep
    seed: int
    schedule: ThermalSchedule = field(repr=False, default=None)


def acceptance_probability(delta_e, temperature):
    """Metropolis acceptance probability min(1, exp(-dE/T)); 0 uphill at T=0."""
    if delta_e <= 0:
        return 1.0
    if temperature <= 0:
        return 0.0
    return math.exp(-delta_e / temperature)


def metropolis_sweep(problem, state, temperature, seed):
    """One full sweep; returns (new state, accepted count).

    Every spin is proposed exactly once, in an order shuffled from the seed's
    stream; the input state is not modified.
    """
    if temperature < 0:
        raise ValueError("temperature must be >= 0")
    s = as_spin_state(state, problem.n_spins).copy()
    indptr, nbr, jval = problem.csr()
    temps = np.array([float(temperature)])
    et = np.empty(1)
    mt = np.empty(1, np.int64)
    at = np.empty(1, np.int64)
    _kernels.thermal_sweeps(problem.h, problem.offset, indptr, nbr, jval,
                            s, temps, np.uint64(seed), et, mt, at)
    return s, int(at[0])


def run_thermal(problem, schedule, init, seed):
    """Anneal through the schedule from ``init``; deterministic given seed.

    Energy, acceptance fraction, and net magnetisation are recorded after
    every sweep, so any measurement window can be sliced off the traces.
    """
    s = as_spin_state(init, problem.n_spins).copy()
    temps = schedule.temperatures()
    n_sweeps = temps.shape[0]
    indptr, nbr, jval = problem.csr()
    et = np.empty(n_sweeps)
    mt = np.empty(n_sweeps, np.int64)
    at = np.empty(n_sweeps, np.int64)
    _kernels.thermal_sweeps(problem.h, problem.offset, indptr, nbr, jval,
                            s, temps, np.uint64(seed), et, mt, at)
    return ThermalResult(
        final=s,
        energy_trace=et,
        acceptance_trace=at / problem.n_spins,
        magnet_trace=mt,
        seed=int(seed),
        schedule=schedule,
    )
