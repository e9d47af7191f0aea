"""Numba-compiled inner loops shared by the thermal annealer and the SQA emulator.

All kernels consume a plain uint64 seed and run a splitmix64 stream internally,
so a (problem, schedule, seed) triple reproduces bit-for-bit on any platform.
Couplings are passed in CSR form (both directions stored) for O(degree) flips.
"""

import numpy as np
from numba import njit, uint64

# splitmix64 constants (Steele, Lea, Flood 2014)
_GOLDEN = uint64(0x9E3779B97F4A7C15)
_MIX1 = uint64(0xBF58476D1CE4E5B9)
_MIX2 = uint64(0x94D049BB133111EB)

# Stands in for an infinite inter-slice coupling: large enough that
# exp(-2*J/T) underflows to 0 for any sane T, small enough to never overflow.
LOCKED_COUPLING = 1e100


_MASK = (1 << 64) - 1


def py_mix64(z):
    """Pure-python splitmix64 finalizer, bit-identical to the jitted one."""
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def py_next(state):
    """Advance a python-side splitmix64 stream: returns (new_state, uint64)."""
    state = (state + 0x9E3779B97F4A7C15) & _MASK
    return state, py_mix64(state)


def derive_seed(master, *indices):
    """Deterministic child seed from a master seed and task indices."""
    z = master & _MASK
    for idx in indices:
        z = py_mix64(z ^ py_mix64((idx + 1) & _MASK))
    return z


@njit(nogil=True, cache=True, inline="always")
def _mix64(z):
    z = (z ^ (z >> uint64(30))) * _MIX1
    z = (z ^ (z >> uint64(27))) * _MIX2
    return z ^ (z >> uint64(31))


@njit(nogil=True, cache=True, inline="always")
def _next_u64(state):
    state[0] = state[0] + _GOLDEN
    return _mix64(state[0])


@njit(nogil=True, cache=True, inline="always")
def _next_f64(state):
    # 53 random bits -> [0, 1)
    return (_next_u64(state) >> uint64(11)) * (1.0 / 9007199254740992.0)


@njit(nogil=True, cache=True, inline="always")
def _shuffle(order, state):
    for i in range(order.shape[0] - 1, 0, -1):
        j = int(_next_u64(state) % uint64(i + 1))
        tmp = order[i]
        order[i] = order[j]
        order[j] = tmp


@njit(nogil=True, cache=True)
def classical_energy(h, offset, indptr, nbr, jval, spins):
    """Full energy offset + sum_i h_i s_i + sum_{i<j} J_ij s_i s_j."""
    e = offset
    n = spins.shape[0]
    for i in range(n):
        e += h[i] * spins[i]
        acc = 0.0
        for k in range(indptr[i], indptr[i + 1]):
            acc += jval[k] * spins[nbr[k]]
        e += 0.5 * acc * spins[i]  # each pair visited from both ends
    return e


@njit(nogil=True, cache=True)
def thermal_sweeps(h, offset, indptr, nbr, jval, spins, temps, seed,
                   energy_trace, msum_trace, accept_trace):
    """Metropolis sweeps, one per entry of temps; spins updated in place.

    Each sweep proposes every spin once in a freshly shuffled order and
    accepts with min(1, exp(-dE/T)); at T = 0 only dE <= 0 moves pass.
    Traces (energy, net magnetisation, accepted count) are written per sweep.
    Returns the final rng state so callers can continue the stream.
    """
    n = spins.shape[0]
    state = np.empty(1, np.uint64)
    state[0] = uint64(seed)
    order = np.arange(n)
    e = classical_energy(h, offset, indptr, nbr, jval, spins)
    msum = 0
    for i in range(n):
        msum += spins[i]
    for t in range(temps.shape[0]):
        temp = temps[t]
        _shuffle(order, state)
        accepted = 0
        for oi in range(n):
            i = order[oi]
            s = spins[i]
            loc = h[i]
            for k in range(indptr[i], indptr[i + 1]):
                loc += jval[k] * spins[nbr[k]]
            de = -2.0 * s * loc
            if de <= 0.0:
                take = True
            elif temp <= 0.0:
                take = False
            else:
                take = _next_f64(state) < np.exp(-de / temp)
            if take:
                spins[i] = -s
                e += de
                msum -= 2 * s
                accepted += 1
        energy_trace[t] = e
        msum_trace[t] = msum
        accept_trace[t] = accepted
    return state[0]


@njit(nogil=True, cache=True)
def sqa_sweeps(h, indptr, nbr, jval, slices, bcoef, jperp, t_eff, seed):
    """Path-integral Monte Carlo sweeps over all (slice, spin) sites.

    bcoef[m] = B(s_m)/P scales the in-slice classical field at sweep m and
    jperp[m] is the inter-slice coupling (capped at LOCKED_COUPLING when the
    transverse term vanishes).  Slice index is periodic.  Returns the final
    rng state for readout tie-breaking.
    """
    n_slices, n = slices.shape
    state = np.empty(1, np.uint64)
    state[0] = uint64(seed)
    order = np.arange(n)
    for m in range(bcoef.shape[0]):
        bc = bcoef[m]
        jp = jperp[m]
        if jp >= LOCKED_COUPLING:
            # vanished transverse term: replicas act as one classical spin
            # per site, so propose whole-column flips (the inter-slice sum is
            # invariant under them) -- classical Metropolis at t_eff
            _shuffle(order, state)
            for oi in range(n):
                i = order[oi]
                de = 0.0
                for k in range(n_slices):
                    loc = h[i]
                    for e_ in range(indptr[i], indptr[i + 1]):
                        loc += jval[e_] * slices[k, nbr[e_]]
                    de += -2.0 * slices[k, i] * bc * loc
                if de <= 0.0 or _next_f64(state) < np.exp(-de / t_eff):
                    for k in range(n_slices):
                        slices[k, i] = -slices[k, i]
            continue
        for k in range(n_slices):
            km = k - 1 if k > 0 else n_slices - 1
            kp = k + 1 if k < n_slices - 1 else 0
            _shuffle(order, state)
            for oi in range(n):
                i = order[oi]
                s = slices[k, i]
                loc = h[i]
                for e_ in range(indptr[i], indptr[i + 1]):
                    loc += jval[e_] * slices[k, nbr[e_]]
                inter = slices[km, i] + slices[kp, i]
                de = -2.0 * s * bc * loc + 2.0 * jp * s * inter
                if de <= 0.0 or _next_f64(state) < np.exp(-de / t_eff):
                    slices[k, i] = -s
    return state[0]
