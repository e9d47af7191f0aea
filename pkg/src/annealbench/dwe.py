"""Domain-wall encoding of a tabulated 2D landscape into an Ising problem.

Each scalar is carried by a block of N spins pinned to -1 at its first site
and +1 at its last; the value is the position of the single sign change
(the wall).  With k minus spins the decoded value is origin + k*step, for
k in 1..N-1.  The encoders below use exact lattice differences, so for every
faithful configuration

    energy(encoded, state) - chain_baseline(layout) == table[k_phi][k_psi]

holds to float64 round-off, with no tolerance tuning.
"""

import json
import math
from dataclasses import dataclass

import numpy as np

from .ising import IsingProblem, as_spin_state

__all__ = [
    "DwLayout",
    "PotentialTable",
    "DecodedSample",
    "build_chain",
    "chain_baseline",
    "decode",
    "plant_state",
    "encode_1d_into_h",
    "encode_1d_into_j",
    "encode_cross",
    "encode_potential",
    "auto_penalties",
    "sample_table",
    "layout_for",
]


@dataclass(frozen=True)
class DwLayout:
    """Block geometry and chain penalties for a two-variable encoding.

    n spins per block; phi block occupies indices [0, n), psi block [n, 2n).
    xi/zeta are the lattice steps, wall_penalty the ferromagnetic chain
    coupling strength, pin_field the boundary pinning field strength.
    """

    n: int
    phi0: float
    psi0: float
    xi: float
    zeta: float
    wall_penalty: float
    pin_field: float

    def __post_init__(self):
        if self.n < 3:
            raise ValueError(f"need at least 3 spins per block, got {self.n}")
        if not (self.xi > 0 and self.zeta > 0):
            raise ValueError("lattice steps must be positive")
        if not (self.wall_penalty > 0 and self.pin_field > 0):
            raise ValueError("chain penalties must be positive")

    @property
    def n_spins(self):
        return 2 * self.n

    def phi_value(self, k):
        return self.phi0 + k * self.xi

    def psi_value(self, k):
        return self.psi0 + k * self.zeta

    def phi_index(self, phi):
        """Nearest representable wall count for a phi value, clamped to 1..n-1."""
        k = round((phi - self.phi0) / self.xi)
        return min(max(int(k), 1), self.n - 1)

    def psi_index(self, psi):
        k = round((psi - self.psi0) / self.zeta)
        return min(max(int(k), 1), self.n - 1)

    def to_json_dict(self):
        return {
            "N": self.n,
            "phi0": self.phi0,
            "psi0": self.psi0,
            "xi": self.xi,
            "zeta": self.zeta,
            "Lambda": self.wall_penalty,
            "LambdaPrime": self.pin_field,
        }

    @classmethod
    def from_json_dict(cls, d):
        return cls(n=int(d["N"]), phi0=float(d["phi0"]), psi0=float(d["psi0"]),
                   xi=float(d["xi"]), zeta=float(d["zeta"]),
                   wall_penalty=float(d["Lambda"]), pin_field=float(d["LambdaPrime"]))


def layout_for(n, bounds, wall_penalty, pin_field):
    """Layout whose n-1 representable values per axis span [lo, hi] inclusive.

    Step = (hi - lo)/(n - 2) and origin = lo - step, so wall count k = 1 maps
    to lo and k = n - 1 maps to hi.
    """
    lo_p, hi_p, lo_q, hi_q = bounds
    xi = (hi_p - lo_p) / (n - 2)
    zeta = (hi_q - lo_q) / (n - 2)
    return DwLayout(n=n, phi0=lo_p - xi, psi0=lo_q - zeta, xi=xi, zeta=zeta,
                    wall_penalty=wall_penalty, pin_field=pin_field)


@dataclass(frozen=True)
class PotentialTable:
    """Square matrix of landscape samples on the layout grid, plus its bounds.

    values[i][j] is the landscape at (phi0 + i*xi, psi0 + j*zeta); row and
    column 0 sit one step below the nominal bounds and are the fiducial
    slices used by the encoder.
    """

    values: np.ndarray
    bounds: tuple

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ValueError(f"table must be square, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("table contains non-finite entries")
        object.__setattr__(self, "values", v)

    @property
    def n(self):
        return self.values.shape[0]


def sample_table(potential, n):
    """Sample a potential on the encoder grid for an n-spin-per-block layout."""
    if n < 3:
        raise ValueError("need n >= 3")
    layout = layout_for(n, potential.bounds, 1.0, 1.0)
    phi = layout.phi0 + layout.xi * np.arange(n)
    psi = layout.psi0 + layout.zeta * np.arange(n)
    values = potential.eval_grid(phi[:, None], psi[None, :])
    return PotentialTable(values=values, bounds=potential.bounds)


@dataclass(frozen=True)
class DecodedSample:
    """Result of reading a spin state back as two scalars."""

    phi: float
    psi: float
    valid: bool
    walls_phi: int
    walls_psi: int


def build_chain(layout):
    """Chain-only problem: pinning fields plus ferromagnetic block couplings.

    Fields are +pin on each block's first spin and -pin on its last; every
    intra-block adjacent pair carries coupling -wall_penalty (the two
    symmetric half-strength entries folded into one canonical coupling).
    """
    n = layout.n
    p = IsingProblem(2 * n, label=f"dwe-chain-n{n}")
    for base in (0, n):
        p.add_field(base, layout.pin_field)
        p.add_field(base + n - 1, -layout.pin_field)
        for i in range(base, base + n - 1):
            p.add_coupling(i, i + 1, -layout.wall_penalty)
    return p


def chain_baseline(layout):
    """Chain energy common to every faithful state (one wall per block)."""
    per_block = -layout.wall_penalty * (layout.n - 3) - 2.0 * layout.pin_field
    return 2.0 * per_block


def decode(state, layout):
    """Read (phi, psi) off a state by counting minus spins per block.

    Invalid states (wall count != 1 or wrong pinned boundaries) are flagged,
    not rejected; the decoded values are still reported.
    """
    s = as_spin_state(state, layout.n_spins)
    n = layout.n
    phi_blk = s[:n]
    psi_blk = s[n:]
    k_phi = int(np.sum(phi_blk == -1))
    k_psi = int(np.sum(psi_blk == -1))
    walls_phi = int(np.sum(phi_blk[1:] != phi_blk[:-1]))
    walls_psi = int(np.sum(psi_blk[1:] != psi_blk[:-1]))
    valid = (walls_phi == 1 and walls_psi == 1
             and phi_blk[0] == -1 and phi_blk[-1] == 1
             and psi_blk[0] == -1 and psi_blk[-1] == 1)
    return DecodedSample(
        phi=layout.phi0 + layout.xi * 0.5 * float(np.sum(1 - phi_blk, dtype=np.int64)),
        psi=layout.psi0 + layout.zeta * 0.5 * float(np.sum(1 - psi_blk, dtype=np.int64)),
        valid=bool(valid),
        walls_phi=walls_phi,
        walls_psi=walls_psi,
    )


def plant_state(layout, k_phi, k_psi):
    """Faithful state with k minus spins in each block (k in 1..n-1)."""
    n = layout.n
    if not (1 <= k_phi <= n - 1 and 1 <= k_psi <= n - 1):
        raise ValueError(f"wall positions must be in 1..{n - 1}")
    s = np.ones(2 * n, dtype=np.int8)
    s[:k_phi] = -1
    s[n:n + k_psi] = -1
    return s


def _axis_base(layout, axis):
    if axis == "phi":
        return 0
    if axis == "psi":
        return layout.n
    raise ValueError(f"axis must be 'phi' or 'psi', got {axis!r}")


def encode_1d_into_h(layout, axis, values):
    """Single-variable term as linear fields: h_j = -(V[j+1] - V[j]) / 2.

    Returns (field array over 2n spins, offset) such that a faithful state
    with wall count k picks up exactly V[k].  The last block site carries no
    field; the offset absorbs the telescoping constant.
    """
    v = np.asarray(values, dtype=np.float64)
    if v.shape != (layout.n,):
        raise ValueError(f"expected {layout.n} slice values, got {v.shape}")
    base = _axis_base(layout, axis)
    h = np.zeros(layout.n_spins)
    h[base:base + layout.n - 1] = -0.5 * np.diff(v)
    offset = 0.5 * (v[0] + v[-1])
    return h, offset


def encode_1d_into_j(layout, axis, values):
    """Single-variable term as adjacent couplings: J_{j,j+1} = -V[j+1] / 2.

    Returns (couplings dict, offset); on faithful states the added energy is
    exactly V[k], the same landscape as the field encoding.
    """
    v = np.asarray(values, dtype=np.float64)
    if v.shape != (layout.n,):
        raise ValueError(f"expected {layout.n} slice values, got {v.shape}")
    base = _axis_base(layout, axis)
    couplings = {}
    for j in range(layout.n - 1):
        couplings[(base + j, base + j + 1)] = -0.5 * v[j + 1]
    offset = 0.5 * float(np.sum(v[1:]))
    return couplings, offset


def _residual(values):
    """Remove the separable part: R = V - V[:,0] - V[0,:] + V[0,0]."""
    return values - values[:, :1] - values[:1, :] + values[0, 0]


def encode_cross(layout, table):
    """Mixed term as inter-block couplings from the residual's four-point stencil.

    The residual R of the table (zero along its fiducial row and column) is
    what cross couplings can represent; separable tables therefore produce no
    couplings at all.  Writing the wall indicators as (1 - s)/2 expands

        R(k1, k2) = sum_{a,b} g(a,b) (1 - s_a)(1 - t_b) / 4,
        g(a,b) = R[a+1,b+1] - R[a+1,b] - R[a,b+1] + R[a,b],

    so each pair (a, n+b) with a, b < n-1 gets g(a,b)/4, and the single-spin
    and constant parts of the expansion come back as compensating fields and
    an offset.  Returns (couplings dict, field array, offset); their combined
    energy on a faithful state is exactly R[k1, k2].
    """
    v = np.asarray(table.values, dtype=np.float64)
    n = layout.n
    if v.shape != (n, n):
        raise ValueError(f"table shape {v.shape} does not match layout n={n}")
    r = _residual(v)
    g = r[1:, 1:] - r[1:, :-1] - r[:-1, 1:] + r[:-1, :-1]
    couplings = {}
    for a in range(n - 1):
        for b in range(n - 1):
            if g[a, b] != 0.0:
                couplings[(a, n + b)] = 0.25 * g[a, b]
    h = np.zeros(2 * n)
    h[:n - 1] = -0.25 * (r[1:, n - 1] - r[:-1, n - 1])
    h[n:2 * n - 1] = -0.25 * (r[n - 1, 1:] - r[n - 1, :-1])
    offset = 0.25 * r[n - 1, n - 1]
    return couplings, h, offset


def encode_potential(layout, table, mode="h"):
    """Compile a table into a full Ising problem over the chain.

    The table splits exactly into its phi fiducial column, psi fiducial row,
    and non-separable residual; the slices go in via the chosen 1D mode
    ("h" for linear fields, "j" for adjacent couplings), the residual via
    cross couplings.  For every faithful state,

        energy(problem, state) == chain_baseline(layout) + table[k1][k2].
    """
    v = np.asarray(table.values, dtype=np.float64)
    n = layout.n
    if v.shape != (n, n):
        raise ValueError(f"table shape {v.shape} does not match layout n={n}")
    if mode not in ("h", "j"):
        raise ValueError(f"mode must be 'h' or 'j', got {mode!r}")
    p = build_chain(layout)
    if mode == "h":
        h1, off1 = encode_1d_into_h(layout, "phi", v[:, 0])
        h2, off2 = encode_1d_into_h(layout, "psi", v[0, :])
        p.h += h1 + h2
    else:
        j1, off1 = encode_1d_into_j(layout, "phi", v[:, 0])
        j2, off2 = encode_1d_into_j(layout, "psi", v[0, :])
        for (i, j), val in {**j1, **j2}.items():
            p.add_coupling(i, j, val)
    cj, ch, coff = encode_cross(layout, table)
    for (i, j), val in cj.items():
        p.add_coupling(i, j, val)
    p.h += ch
    p.add_offset(off1 + off2 + coff - v[0, 0])
    p.label = json.dumps({"kind": "dwe", "mode": mode, "layout": layout.to_json_dict()})
    p._cache = None
    return p


def auto_penalties(table):
    """Chain penalties from the table's value range, with floors.

    The wall penalty is 2 x (max - min), floor 1.  The boundary pinning
    strength must exceed the wall penalty: a block with no wall saves one
    wall (-2 * wall_penalty) while paying the pin cost (+2 * pin_field), so
    equal strengths would leave zero-wall blocks degenerate with faithful
    states and free to sample fiducial values.  Doubling the pin leaves a
    margin of twice the table spread above any such gain.
    """
    v = np.asarray(table.values, dtype=np.float64)
    spread = float(v.max() - v.min())
    wall = max(2.0 * spread, 1.0)
    return wall, 2.0 * wall


def encode(potential, n, mode="h", penalties=None):
    """Sample, choose penalties, and compile in one step.

    Returns (problem, layout, table).
    """
    table = sample_table(potential, n)
    if penalties is None:
        penalties = auto_penalties(table)
    layout = layout_for(n, potential.bounds, penalties[0], penalties[1])
    return encode_potential(layout, table, mode=mode), layout, table


def layout_from_label(label):
    """Recover the layout embedded in an encoded problem's label, or None."""
    try:
        d = json.loads(label)
    except (json.JSONDecodeError, TypeError):
        return None
    if isinstance(d, dict) and d.get("kind") == "dwe":
        return DwLayout.from_json_dict(d["layout"])
    return None
