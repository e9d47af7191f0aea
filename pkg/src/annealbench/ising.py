"""Ising problem container, energy evaluation, and the ferromagnetic 2D grid.

A problem is ``offset + sum_i h_i s_i + sum_{i<j} J_ij s_i s_j`` over spins
s_i in {-1, +1}.  Couplings are stored once per unordered pair with i < j;
querying (j, i) returns the same value.  Spin states are plain numpy arrays
of dtype int8 with entries exactly -1 or +1.
"""

import json
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "IsingProblem",
    "GridSpec",
    "build_2d_grid",
    "energy",
    "delta_energy",
    "normalized_energy",
    "magnetisation",
    "random_spin_state",
    "as_spin_state",
]


class IsingProblem:
    """Sparse symmetric couplings J, linear fields h, and a constant offset.

    Build incrementally with :meth:`add_coupling` / :meth:`add_field`, then
    treat as immutable; instances are safe to share across threads once no
    writer remains.
    """

    def __init__(self, n_spins, h=None, j=None, offset=0.0, label=""):
        if n_spins <= 0:
            raise ValueError(f"n_spins must be positive, got {n_spins}")
        self.n_spins = int(n_spins)
        self.h = np.zeros(self.n_spins, dtype=np.float64)
        if h is not None:
            h = np.asarray(h, dtype=np.float64)
            if h.shape != (self.n_spins,):
                raise ValueError(f"h has shape {h.shape}, expected ({self.n_spins},)")
            if not np.all(np.isfinite(h)):
                raise ValueError("h contains non-finite values")
            self.h[:] = h
        if not math.isfinite(offset):
            raise ValueError("offset must be finite")
        self.offset = float(offset)
        self.label = label
        self._j = {}
        self._cache = None
        if j is not None:
            items = j.items() if isinstance(j, dict) else j
            for key_or_triple in items:
                if isinstance(j, dict):
                    (i, k), v = key_or_triple
                else:
                    i, k, v = key_or_triple
                self.add_coupling(i, k, v)

    def _check_index(self, i):
        if not 0 <= i < self.n_spins:
            raise IndexError(f"spin index {i} out of range for {self.n_spins} spins")

    def add_coupling(self, i, j, value):
        """Accumulate ``value`` onto the canonical (min, max) pair coupling."""
        i, j = int(i), int(j)
        self._check_index(i)
        self._check_index(j)
        if i == j:
            raise ValueError(f"self-coupling ({i},{i}) is not allowed")
        if not math.isfinite(value):
            raise ValueError(f"coupling ({i},{j}) is not finite")
        key = (i, j) if i < j else (j, i)
        self._j[key] = self._j.get(key, 0.0) + float(value)
        self._cache = None

    def add_field(self, i, value):
        self._check_index(int(i))
        if not math.isfinite(value):
            raise ValueError(f"field on spin {i} is not finite")
        self.h[int(i)] += value
        self._cache = None

    def add_offset(self, value):
        if not math.isfinite(value):
            raise ValueError("offset increment is not finite")
        self.offset += value

    def coupling(self, i, j):
        """Coupling on the unordered pair; order of (i, j) does not matter."""
        key = (i, j) if i < j else (j, i)
        return self._j.get(key, 0.0)

    @property
    def n_couplings(self):
        return len(self._j)

    def couplings(self):
        """Dict view of {(i, j): value} with i < j."""
        return dict(self._j)

    def _build_cache(self):
        n = self.n_spins
        m = len(self._j)
        ii = np.empty(m, dtype=np.int64)
        jj = np.empty(m, dtype=np.int64)
        vv = np.empty(m, dtype=np.float64)
        for idx, ((i, j), v) in enumerate(sorted(self._j.items())):
            ii[idx], jj[idx], vv[idx] = i, j, v
        counts = np.zeros(n, dtype=np.int64)
        for i, j in zip(ii, jj):
            counts[i] += 1
            counts[j] += 1
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        nbr = np.empty(2 * m, dtype=np.int64)
        jval = np.empty(2 * m, dtype=np.float64)
        fill = indptr[:-1].copy()
        for i, j, v in zip(ii, jj, vv):
            nbr[fill[i]] = j
            jval[fill[i]] = v
            fill[i] += 1
            nbr[fill[j]] = i
            jval[fill[j]] = v
            fill[j] += 1
        self._cache = (ii, jj, vv, indptr, nbr, jval)

    def pair_arrays(self):
        """(ii, jj, vv) arrays of the canonical couplings, sorted by pair."""
        if self._cache is None:
            self._build_cache()
        return self._cache[:3]

    def csr(self):
        """(indptr, neighbours, values) adjacency with each pair stored twice."""
        if self._cache is None:
            self._build_cache()
        return self._cache[3:]

    def copy(self):
        p = IsingProblem(self.n_spins, h=self.h, offset=self.offset, label=self.label)
        p._j = dict(self._j)
        return p

    # -- JSON interchange ---------------------------------------------------

    def to_json_dict(self):
        ii, jj, vv = self.pair_arrays()
        return {
            "n_spins": self.n_spins,
            "h": [float(x) for x in self.h],
            "j": [[int(i), int(j), float(v)] for i, j, v in zip(ii, jj, vv)],
            "offset": self.offset,
            "label": self.label,
        }

    def to_json(self, **dumps_kwargs):
        return json.dumps(self.to_json_dict(), **dumps_kwargs)

    @classmethod
    def from_json_dict(cls, d):
        return cls(
            d["n_spins"],
            h=d["h"],
            j=[(int(i), int(j), float(v)) for i, j, v in d["j"]],
            offset=d.get("offset", 0.0),
            label=d.get("label", ""),
        )

    @classmethod
    def from_json(cls, text):
        return cls.from_json_dict(json.loads(text))

    def __repr__(self):
        return (
            f"IsingProblem(n_spins={self.n_spins}, n_couplings={self.n_couplings},"
            f" offset={self.offset!r}, label={self.label!r})"
        )


@dataclass(frozen=True)
class GridSpec:
    """Side length and overall coupling scale of the ferromagnetic 2D grid."""

    n: int
    lam: float = 1.0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"grid side must be >= 2, got {self.n}")
        if not (self.lam > 0 and math.isfinite(self.lam)):
            raise ValueError(f"coupling scale must be positive, got {self.lam}")


def build_2d_grid(spec):
    """Open-boundary N x N grid with coupling -lam on every adjacent pair.

    Spins are indexed row-major, i = row*N + col; the grid has 2N(N-1) edges
    and no fields.
    """
    n = spec.n
    p = IsingProblem(n * n, label=f"grid-{n}x{n}")
    for r in range(n):
        for c in range(n):
            i = r * n + c
            if c + 1 < n:
                p.add_coupling(i, i + 1, -spec.lam)
            if r + 1 < n:
                p.add_coupling(i, i + n, -spec.lam)
    return p


def as_spin_state(values, n_spins=None):
    """Validate and convert to the canonical int8 +-1 state array."""
    s = np.asarray(values)
    if s.ndim != 1:
        raise ValueError("spin state must be one-dimensional")
    if n_spins is not None and s.shape[0] != n_spins:
        raise ValueError(f"state has {s.shape[0]} spins, expected {n_spins}")
    out = s.astype(np.int8)
    if not np.all(np.abs(out) == 1) or not np.array_equal(out, s):
        raise ValueError("spin values must be exactly -1 or +1")
    return out


def random_spin_state(n_spins, rng):
    """Uniform random +-1 state from a numpy Generator."""
    return (2 * rng.integers(0, 2, size=n_spins) - 1).astype(np.int8)


def energy(problem, state):
    """offset + sum_i h_i s_i + sum_{i<j} J_ij s_i s_j (each pair once)."""
    s = as_spin_state(state, problem.n_spins)
    ii, jj, vv = problem.pair_arrays()
    sf = s.astype(np.float64)
    return float(problem.offset + problem.h @ sf + vv @ (sf[ii] * sf[jj]))


def delta_energy(problem, state, i):
    """Energy change from flipping spin i; O(degree), exact in float64."""
    s = as_spin_state(state, problem.n_spins)
    if not 0 <= i < problem.n_spins:
        raise IndexError(f"spin index {i} out of range")
    indptr, nbr, jval = problem.csr()
    lo, hi = indptr[i], indptr[i + 1]
    local = problem.h[i] + jval[lo:hi] @ s[nbr[lo:hi]].astype(np.float64)
    return float(-2.0 * s[i] * local)


def normalized_energy(problem, state, lam):
    """Coupling energy per bond per unit scale: -1 when every bond is satisfied."""
    if lam == 0:
        raise ValueError("normalisation scale lam must be nonzero")
    if problem.n_couplings == 0:
        raise ValueError("problem has no couplings to normalise over")
    s = as_spin_state(state, problem.n_spins)
    ii, jj, vv = problem.pair_arrays()
    sf = s.astype(np.float64)
    # scale each bond before averaging so aligned grids give exactly -1
    return float(np.mean((vv / lam) * (sf[ii] * sf[jj])))


def magnetisation(state):
    """|sum s_i| / n, in [0, 1]."""
    s = as_spin_state(state)
    return float(abs(int(s.sum())) / s.shape[0])
