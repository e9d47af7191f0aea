"""Nelder-Mead simplex search and Polak-Ribiere conjugate gradient descent.

Both methods run on the continuous landscape, are fully deterministic given
their start point, and accept either a Potential instance or plain callables.
Coordinates are handled as tuples of floats to keep per-iteration overhead
small.
"""

import math
from dataclasses import dataclass

__all__ = ["NmParams", "CgParams", "OptResult", "nelder_mead", "conjugate_gd"]


@dataclass(frozen=True)
class NmParams:
    """Simplex update coefficients and stopping rules."""

    alpha: float = 1.0        # reflection
    gamma: float = 2.0        # expansion
    beta: float = 0.5         # contraction
    sigma: float = 0.5        # shrink
    stddev_tol: float = 1e-8
    max_iters: int = 500
    initial_edge: float = 0.5

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("reflection coefficient must be > 0")
        if not self.gamma > 1:
            raise ValueError("expansion coefficient must be > 1")
        if not 0 < self.beta <= 0.5:
            raise ValueError("contraction coefficient must be in (0, 0.5]")
        if not (self.sigma > 0 and self.stddev_tol > 0 and self.max_iters >= 1
                and self.initial_edge > 0):
            raise ValueError("invalid Nelder-Mead parameters")


@dataclass(frozen=True)
class CgParams:
    """Line-search constants, restart period, and optional domain clamp."""

    max_iters: int = 500
    grad_tol: float = 1e-8
    restart_every: int = 2
    armijo_c: float = 1e-4
    backtrack: float = 0.5
    initial_step: float = 1.0
    step_cap: float = 1.0  # max trial displacement; keeps descent basin-local
    bounds: tuple = None   # (phi_lo, phi_hi, psi_lo, psi_hi) or None

    def __post_init__(self):
        if not (self.grad_tol > 0 and self.max_iters >= 1 and self.initial_step > 0
                and self.step_cap > 0):
            raise ValueError("invalid conjugate-gradient parameters")
        if not (0 < self.backtrack < 1 and 0 < self.armijo_c < 1):
            raise ValueError("line-search constants must lie in (0, 1)")


@dataclass(frozen=True)
class OptResult:
    point: tuple
    value: float
    iterations: int


def _as_value_fn(f):
    return f.eval if hasattr(f, "eval") else f


def nelder_mead(f, start, params=NmParams()):
    """Minimise f from start with the four-rule simplex method.

    The initial simplex is right-angled at the start point with edges of
    initial_edge along each axis.  Stops when the standard deviation of the
    vertex values drops below stddev_tol or after max_iters iterations, and
    returns the best vertex.  Ties for the worst vertex go to the lowest
    vertex index.
    """
    fn = _as_value_fn(f)
    start = tuple(float(x) for x in start)
    dim = len(start)
    verts = [start]
    for d in range(dim):
        v = list(start)
        v[d] += params.initial_edge
        verts.append(tuple(v))
    vals = []
    for v in verts:
        fv = fn(*v)
        if not math.isfinite(fv):
            raise ValueError(f"non-finite value {fv} at {v}")
        vals.append(fv)

    def evaluate(v):
        fv = fn(*v)
        if not math.isfinite(fv):
            raise ValueError(f"non-finite value {fv} at {v}")
        return fv

    n_verts = dim + 1
    iterations = 0
    for iterations in range(1, params.max_iters + 1):
        # ties: lowest index ranks worst
        order = sorted(range(n_verts), key=lambda k: (vals[k], -k))
        verts = [verts[k] for k in order]
        vals = [vals[k] for k in order]
        mean = sum(vals) / n_verts
        std = math.sqrt(sum((v - mean) ** 2 for v in vals) / n_verts)
        if std < params.stddev_tol:
            break
        centroid = tuple(sum(verts[k][d] for k in range(dim)) / dim for d in range(dim))
        worst = verts[-1]
        reflected = tuple(c + params.alpha * (c - w) for c, w in zip(centroid, worst))
        f_r = evaluate(reflected)
        if f_r < vals[0]:
            expanded = tuple(c + params.gamma * (r - c) for c, r in zip(centroid, reflected))
            f_e = evaluate(expanded)
            if f_e < f_r:
                verts[-1], vals[-1] = expanded, f_e
            else:
                verts[-1], vals[-1] = reflected, f_r
        elif f_r < vals[-2]:
            verts[-1], vals[-1] = reflected, f_r
        else:
            contracted = tuple(c + params.beta * (w - c) for c, w in zip(centroid, worst))
            f_c = evaluate(contracted)
            if f_c < vals[-1]:
                verts[-1], vals[-1] = contracted, f_c
            else:
                best = verts[0]
                for k in range(1, n_verts):
                    verts[k] = tuple(b + params.sigma * (v - b)
                                     for b, v in zip(best, verts[k]))
                    vals[k] = evaluate(verts[k])
    best = min(range(n_verts), key=lambda k: vals[k])
    return OptResult(point=verts[best], value=vals[best], iterations=iterations)


def _clamp(point, bounds):
    if bounds is None:
        return point
    lo_p, hi_p, lo_q, hi_q = bounds
    return (min(max(point[0], lo_p), hi_p), min(max(point[1], lo_q), hi_q))


def conjugate_gd(f, grad, start, params=CgParams()):
    """Conjugate gradient descent with Armijo backtracking line search.

    Directions follow d_i = -g_i + beta_i d_{i-1} with the Polak-Ribiere
    coefficient clamped to be nonnegative and a periodic steepest-descent
    restart.  Iterates are clamped to the domain bounds; the run stops on
    a small gradient, a vanishing step, or max_iters.
    """
    if hasattr(f, "grad") and grad is None:
        grad = f.grad
    fn = _as_value_fn(f)
    x = _clamp(tuple(float(v) for v in start), params.bounds)
    fx = fn(*x)
    g = grad(*x)
    if not all(math.isfinite(v) for v in g):
        raise ValueError(f"non-finite gradient {g} at {x}")
    d = tuple(-v for v in g)
    iterations = 0
    for iterations in range(1, params.max_iters + 1):
        gnorm = math.sqrt(sum(v * v for v in g))
        if gnorm < params.grad_tol:
            iterations -= 1
            break
        gd = sum(gv * dv for gv, dv in zip(g, d))
        if gd >= 0:  # not a descent direction; fall back to steepest descent
            d = tuple(-v for v in g)
            gd = -gnorm * gnorm
        dnorm = math.sqrt(sum(v * v for v in d))
        step = min(params.initial_step, params.step_cap / dnorm)
        moved = None
        while step > 1e-20:
            cand = _clamp(tuple(xv + step * dv for xv, dv in zip(x, d)), params.bounds)
            f_c = fn(*cand)
            if f_c <= fx + params.armijo_c * step * gd:
                moved = (cand, f_c)
                break
            step *= params.backtrack
        if moved is None:
            break
        cand, f_c = moved
        if max(abs(a - b) for a, b in zip(cand, x)) < 1e-15:
            x, fx = cand, f_c  # pinned against the boundary clamp
            break
        g_new = grad(*cand)
        if not all(math.isfinite(v) for v in g_new):
            raise ValueError(f"non-finite gradient {g_new} at {cand}")
        if iterations % params.restart_every == 0:
            beta = 0.0
        else:
            denom = sum(v * v for v in g)
            beta = max(0.0, sum(gn * (gn - go) for gn, go in zip(g_new, g)) / denom)
        d = tuple(-gn + beta * dv for gn, dv in zip(g_new, d))
        x, fx, g = cand, f_c, g_new
    return OptResult(point=x, value=fx, iterations=iterations)
