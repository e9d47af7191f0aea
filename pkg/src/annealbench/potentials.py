"""The three benchmark potentials, their gradients, sampling, and truth oracle.

Each potential is a callable landscape over (phi, psi) with a rectangular
reference domain and an overall positive scale ``lam`` multiplying the whole
expression.  ``eval`` is scalar (math-module arithmetic, cheap inside
optimizer loops); ``eval_grid`` is the vectorized numpy path used for table
sampling and the brute-force minimum scan.
"""

import csv
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Potential",
    "CorrugatedPotential",
    "MultiWellPotential",
    "CraterPotential",
    "TablePotential",
    "u1",
    "u2",
    "u3",
    "load_potential_csv",
    "TruthRecord",
    "true_minimum",
    "distance_to_truth",
    "MULTIWELL_WIDTH",
    "MULTIWELL_DEPTHS",
    "MULTIWELL_CENTRES",
]

# Multi-well landscape constants: plateau depth p0 followed by the seven hole
# depths, hole centres, and the common width of all dips.
MULTIWELL_WIDTH = 0.3
MULTIWELL_DEPTHS = (3.0, 0.9, 0.3, 1.2, 1.8, 1.5, 1.8, 2.4)
MULTIWELL_CENTRES = (
    (-1.2, -1.35),
    (-1.95, 0.9),
    (0.9, 1.95),
    (1.5, -1.65),
    (1.8, 0.6),
    (-0.6, 1.8),
    (1.65, -0.9),
)


class Potential:
    """Base landscape: subclasses fill in _value/_gradient and metadata."""

    id = "custom"

    def __init__(self, lam, bounds):
        if not (lam > 0 and math.isfinite(lam)):
            raise ValueError(f"scale lam must be positive, got {lam}")
        lo_p, hi_p, lo_q, hi_q = bounds
        if not (lo_p < hi_p and lo_q < hi_q):
            raise ValueError(f"empty bounds {bounds}")
        self.lam = float(lam)
        self.bounds = (float(lo_p), float(hi_p), float(lo_q), float(hi_q))
        self._truth = None

    def eval(self, phi, psi):
        return self.lam * self._value(phi, psi)

    def grad(self, phi, psi):
        gp, gq = self._gradient(phi, psi)
        return (self.lam * gp, self.lam * gq)

    def eval_grid(self, phi, psi):
        """Vectorized evaluation with numpy broadcasting."""
        return self.lam * self._value_np(np.asarray(phi, dtype=np.float64),
                                         np.asarray(psi, dtype=np.float64))

    def _value_np(self, phi, psi):  # overridable; default falls back to scalar
        out = np.empty(np.broadcast(phi, psi).shape)
        flat = out.reshape(-1)
        for k, (a, b) in enumerate(zip(np.broadcast_to(phi, out.shape).reshape(-1),
                                       np.broadcast_to(psi, out.shape).reshape(-1))):
            flat[k] = self._value(a, b)
        return out

    def __call__(self, phi, psi):
        return self.eval(phi, psi)


class CorrugatedPotential(Potential):
    """Two inverted quadratics plus a strong trigonometric corrugation."""

    id = "u1"

    def __init__(self, lam=0.5, bounds=(-3.0, 3.0, -3.0, 3.0)):
        super().__init__(lam, bounds)

    def _value(self, phi, psi):
        return -(phi * (1.0 - phi) + psi * (1.0 - psi)
                 + 12.0 * math.cos(phi * psi) * math.sin(psi + 2.0 * phi))

    def _value_np(self, phi, psi):
        return -(phi * (1.0 - phi) + psi * (1.0 - psi)
                 + 12.0 * np.cos(phi * psi) * np.sin(psi + 2.0 * phi))

    def _gradient(self, phi, psi):
        c = math.cos(phi * psi)
        s = math.sin(phi * psi)
        sin_l = math.sin(psi + 2.0 * phi)
        cos_l = math.cos(psi + 2.0 * phi)
        gp = -(1.0 - 2.0 * phi + 12.0 * (-psi * s * sin_l + 2.0 * c * cos_l))
        gq = -(1.0 - 2.0 * psi + 12.0 * (-phi * s * sin_l + c * cos_l))
        return gp, gq


def _sech2(x):
    c = math.cosh(x)
    return 1.0 / (c * c)


class MultiWellPotential(Potential):
    """Flat plateau with a central well and seven off-centre holes.

    The printed form of this landscape adds the hole terms; that produces
    bumps rather than traps, so the holes are subtracted by default.  Pass
    literal_sign=True to restore the additive variant.
    """

    id = "u2"

    def __init__(self, lam=0.5, bounds=(-3.0, 3.0, -3.0, 3.0), literal_sign=False):
        super().__init__(lam, bounds)
        self.literal_sign = bool(literal_sign)
        self._hole_sign = 1.0 if literal_sign else -1.0

    def _value(self, phi, psi):
        w = MULTIWELL_WIDTH
        p0 = MULTIWELL_DEPTHS[0]
        t = math.tanh(math.hypot(phi, psi) / w)
        total = p0 * t * t
        for depth, (cp, cq) in zip(MULTIWELL_DEPTHS[1:], MULTIWELL_CENTRES):
            d = math.hypot(phi - cp, psi - cq)
            total += self._hole_sign * depth * _sech2(d / w)
        return total

    def _value_np(self, phi, psi):
        w = MULTIWELL_WIDTH
        p0 = MULTIWELL_DEPTHS[0]
        total = p0 * np.tanh(np.hypot(phi, psi) / w) ** 2
        for depth, (cp, cq) in zip(MULTIWELL_DEPTHS[1:], MULTIWELL_CENTRES):
            d = np.hypot(phi - cp, psi - cq)
            total = total + self._hole_sign * depth / np.cosh(d / w) ** 2
        return total

    def _gradient(self, phi, psi):
        w = MULTIWELL_WIDTH
        p0 = MULTIWELL_DEPTHS[0]
        r = math.hypot(phi, psi)
        if r > 0.0:
            t = math.tanh(r / w)
            coef = 2.0 * p0 * t * _sech2(r / w) / (w * r)
            gp, gq = coef * phi, coef * psi
        else:
            gp = gq = 0.0
        for depth, (cp, cq) in zip(MULTIWELL_DEPTHS[1:], MULTIWELL_CENTRES):
            dp, dq = phi - cp, psi - cq
            d = math.hypot(dp, dq)
            if d == 0.0:
                continue
            x = d / w
            coef = self._hole_sign * depth * (-2.0) * _sech2(x) * math.tanh(x) / (w * d)
            gp += coef * dp
            gq += coef * dq
        return gp, gq


class CraterPotential(Potential):
    """Repulsive plateau with one very narrow well at the origin."""

    id = "u3"

    def __init__(self, lam=1.7, bounds=(-2.0, 2.0, -2.0, 2.0)):
        super().__init__(lam, bounds)

    def _value(self, phi, psi):
        outer = 2.0 * math.exp(-(phi ** 4 + psi ** 4) / 2.0)
        crater = 10.0 * math.exp(-20.0 * (phi * phi + psi * psi))
        return outer - crater * math.cos(psi) ** 2 * math.cos(phi) ** 2

    def _value_np(self, phi, psi):
        outer = 2.0 * np.exp(-(phi ** 4 + psi ** 4) / 2.0)
        crater = 10.0 * np.exp(-20.0 * (phi * phi + psi * psi))
        return outer - crater * np.cos(psi) ** 2 * np.cos(phi) ** 2

    def _gradient(self, phi, psi):
        e1 = math.exp(-(phi ** 4 + psi ** 4) / 2.0)
        e2 = math.exp(-20.0 * (phi * phi + psi * psi))
        cp, sp = math.cos(phi), math.sin(phi)
        cq, sq = math.cos(psi), math.sin(psi)
        gp = (-4.0 * phi ** 3 * e1
              + 10.0 * e2 * cq * cq * (40.0 * phi * cp * cp + 2.0 * cp * sp))
        gq = (-4.0 * psi ** 3 * e1
              + 10.0 * e2 * cp * cp * (40.0 * psi * cq * cq + 2.0 * cq * sq))
        return gp, gq


class TablePotential(Potential):
    """Bilinear interpolation of a tabulated landscape (custom CSV input).

    The table spans the bounds on a uniform grid; evaluation outside the
    bounds clamps to the nearest edge.  Gradients are central differences of
    the interpolant.
    """

    id = "custom"

    def __init__(self, values, bounds, lam=1.0):
        super().__init__(lam, bounds)
        self.values = np.asarray(values, dtype=np.float64)
        if self.values.ndim != 2 or self.values.shape[0] != self.values.shape[1]:
            raise ValueError("table must be a square matrix")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("table contains non-finite entries")

    def _lookup(self, phi, psi):
        lo_p, hi_p, lo_q, hi_q = self.bounds
        n = self.values.shape[0]
        x = (phi - lo_p) / (hi_p - lo_p) * (n - 1)
        y = (psi - lo_q) / (hi_q - lo_q) * (n - 1)
        x = min(max(x, 0.0), n - 1.0)
        y = min(max(y, 0.0), n - 1.0)
        i0 = min(int(x), n - 2)
        j0 = min(int(y), n - 2)
        fx, fy = x - i0, y - j0
        v = self.values
        return ((1 - fx) * (1 - fy) * v[i0, j0] + fx * (1 - fy) * v[i0 + 1, j0]
                + (1 - fx) * fy * v[i0, j0 + 1] + fx * fy * v[i0 + 1, j0 + 1])

    def _value(self, phi, psi):
        return self._lookup(phi, psi)

    def _gradient(self, phi, psi):
        lo_p, hi_p, _, _ = self.bounds
        step = (hi_p - lo_p) / (self.values.shape[0] - 1) * 0.5
        gp = (self._lookup(phi + step, psi) - self._lookup(phi - step, psi)) / (2 * step)
        gq = (self._lookup(phi, psi + step) - self._lookup(phi, psi - step)) / (2 * step)
        return gp, gq


def u1(lam=0.5, bounds=(-3.0, 3.0, -3.0, 3.0)):
    return CorrugatedPotential(lam, bounds)


def u2(lam=0.5, bounds=(-3.0, 3.0, -3.0, 3.0), literal_sign=False):
    return MultiWellPotential(lam, bounds, literal_sign)


def u3(lam=1.7, bounds=(-2.0, 2.0, -2.0, 2.0)):
    return CraterPotential(lam, bounds)


def by_id(name, lam=None, literal_sign=False):
    """Construct a potential by its short id with its default domain."""
    name = name.lower()
    if name == "u1":
        return u1(0.5 if lam is None else lam)
    if name == "u2":
        return u2(0.5 if lam is None else lam, literal_sign=literal_sign)
    if name == "u3":
        return u3(1.7 if lam is None else lam)
    raise ValueError(f"unknown potential id {name!r}")


def load_potential_csv(path, lam=1.0):
    """Load a custom table: header phi_lo,phi_hi,psi_lo,psi_hi then N rows."""
    with open(path, newline="") as fh:
        rows = [row for row in csv.reader(fh) if row]
    if not rows:
        raise ValueError(f"{path}: empty potential file")
    bounds = tuple(float(x) for x in rows[0][:4])
    values = np.array([[float(x) for x in row] for row in rows[1:]], dtype=np.float64)
    if values.shape[0] != values.shape[1]:
        raise ValueError(f"{path}: table must be square, got {values.shape}")
    return TablePotential(values, bounds, lam=lam)


@dataclass(frozen=True)
class TruthRecord:
    """Reference global minimum used as the origin for distance reporting."""

    phi: float
    psi: float
    value: float
    resolution: int


def true_minimum(potential, coarse_n=1001):
    """Deterministic global-minimum oracle: dense scan plus local refinement.

    Scans a coarse_n x coarse_n grid over the domain, then polishes with
    coordinate descent whose step shrinks from one grid cell to 1e-10.
    The result is cached on the potential instance.
    """
    if potential._truth is not None and potential._truth.resolution == coarse_n:
        return potential._truth
    lo_p, hi_p, lo_q, hi_q = potential.bounds
    phi_ax = np.linspace(lo_p, hi_p, coarse_n)
    psi_ax = np.linspace(lo_q, hi_q, coarse_n)
    best_v = math.inf
    best = (lo_p, lo_q)
    # scan in row blocks to bound memory
    block = max(1, int(4e6 // coarse_n))
    for start in range(0, coarse_n, block):
        rows = phi_ax[start:start + block, None]
        vals = potential.eval_grid(rows, psi_ax[None, :])
        k = int(np.argmin(vals))
        r, c = divmod(k, coarse_n)
        if vals[r, c] < best_v:
            best_v = float(vals[r, c])
            best = (float(rows[r, 0]), float(psi_ax[c]))
    phi, psi = best
    step = max((hi_p - lo_p), (hi_q - lo_q)) / (coarse_n - 1)
    f = potential.eval
    cur = f(phi, psi)
    while step > 1e-10:
        moved = False
        for dp, dq in ((step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)):
            np_, nq = phi + dp, psi + dq
            np_ = min(max(np_, lo_p), hi_p)
            nq = min(max(nq, lo_q), hi_q)
            v = f(np_, nq)
            if v < cur:
                phi, psi, cur = np_, nq, v
                moved = True
        if not moved:
            step *= 0.5
    record = TruthRecord(phi=phi, psi=psi, value=cur, resolution=coarse_n)
    potential._truth = record
    return record


def distance_to_truth(potential, point, coarse_n=1001):
    """Euclidean distance from point to the oracle global minimum."""
    t = true_minimum(potential, coarse_n)
    return math.hypot(point[0] - t.phi, point[1] - t.psi)
