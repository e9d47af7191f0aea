"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s`.  The heavy basin maps
(criterion 7) dominate the runtime; everything is seeded and deterministic
on a given platform.  Expect roughly 15-25 minutes on two cores.
"""

import itertools
import math
import os

import numpy as np
import pytest

from annealbench import cli, dwe, harness as H, potentials as P
from annealbench.ising import GridSpec, build_2d_grid, energy
from annealbench.thermal import acceptance_probability
from test_thermal import boltzmann_occupancy_check, three_spin_problem

MASTER_SEED = 42
THREADS = None  # all available


def report(num, name, ok, detail=""):
    tag = "PASS" if ok else "FAIL"
    print(f"\nACCEPTANCE {num:2d} {name}: {tag}  {detail}")
    assert ok, f"criterion {num} ({name}): {detail}"


def batch_energies(problem, states):
    ii, jj, vv = problem.pair_arrays()
    sf = states.astype(np.float64)
    return problem.offset + sf @ problem.h + (sf[:, ii] * sf[:, jj]) @ vv


def faithful_states(n):
    out = np.empty(((n - 1) * (n - 1), 2 * n), np.int8)
    k = 0
    for k1 in range(1, n):
        for k2 in range(1, n):
            row = np.ones(2 * n, np.int8)
            row[:k1] = -1
            row[n:n + k2] = -1
            out[k] = row
            k += 1
    return out


# -- 1. encoder exactness ------------------------------------------------------


def test_criterion_01_encoder_exactness():
    rng = np.random.default_rng(MASTER_SEED)
    worst = 0.0
    checked = 0
    for n, n_random in ((6, 17), (8, 17), (12, 16)):
        tables = [rng.normal(0.0, 3.0, (n, n)) for _ in range(n_random)]
        tables += [dwe.sample_table(pot, n).values
                   for pot in (P.u1(0.5), P.u2(10.0), P.u3(1.7))]
        states = faithful_states(n)
        for values in tables:
            table = dwe.PotentialTable(values=values, bounds=(0.0, 1.0, 0.0, 1.0))
            wall, pin = dwe.auto_penalties(table)
            layout = dwe.DwLayout(n=n, phi0=0.0, psi0=0.0, xi=1.0, zeta=1.0,
                                  wall_penalty=wall, pin_field=pin)
            problem = dwe.encode_potential(layout, table)
            base = dwe.chain_baseline(layout)
            want = np.array([values[k1, k2] for k1 in range(1, n)
                             for k2 in range(1, n)])
            got = batch_energies(problem, states)
            err = float(np.max(np.abs(got - base - want)))
            worst = max(worst, err)
            checked += len(want)
    report(1, "encoder exactness", worst < 1e-9,
           f"max |err| = {worst:.2e} over {checked} faithful states")


# -- 2. penalty dominance ------------------------------------------------------


def test_criterion_02_penalty_dominance():
    n = 8
    states = np.array(list(itertools.product([-1, 1], repeat=2 * n)), np.int8)
    phi_blk = states[:, :n]
    psi_blk = states[:, n:]
    walls_phi = np.sum(phi_blk[:, 1:] != phi_blk[:, :-1], axis=1)
    walls_psi = np.sum(psi_blk[:, 1:] != psi_blk[:, :-1], axis=1)
    faithful = ((walls_phi == 1) & (walls_psi == 1)
                & (phi_blk[:, 0] == -1) & (phi_blk[:, -1] == 1)
                & (psi_blk[:, 0] == -1) & (psi_blk[:, -1] == 1))
    min_margin = math.inf
    for pot in (P.u1(0.5), P.u2(10.0), P.u3(1.7)):
        table = dwe.sample_table(pot, n)
        wall, pin = dwe.auto_penalties(table)
        layout = dwe.layout_for(n, pot.bounds, wall, pin)
        problem = dwe.encode_potential(layout, table)
        e = batch_energies(problem, states)
        margin = float(e[~faithful].min() - e[faithful].max())
        min_margin = min(min_margin, margin)
    report(2, "penalty dominance", min_margin > 0.0,
           f"2^16 states x 3 landscapes; worst margin = {min_margin:.3f}")


# -- 3. thermal ising physics --------------------------------------------------


def test_criterion_03_thermal_transition():
    t_values = [0.5, 1.0, 1.4, 1.8, 2.0, 2.2, 2.4, 2.6, 2.8, 3.2, 3.6, 4.0]
    res = H.ising_thermal_sweep(16, 1.0, t_values, protocol=(1200, 200, 10),
                                seed=MASTER_SEED, threads=THREADS)
    m = dict(zip(res.values, res.m_mean))
    drops = [(res.m_mean[k] - res.m_mean[k + 1], res.values[k], res.values[k + 1])
             for k in range(len(t_values) - 1)]
    steepest = max(drops)
    onsager = 2.0 / math.log(1.0 + math.sqrt(2.0))
    ok = (m[0.5] > 0.9 and m[4.0] < 0.2
          and 1.8 <= steepest[1] and steepest[2] <= 2.8)
    report(3, "thermal ferromagnetic transition", ok,
           f"M(0.5)={m[0.5]:.3f}, M(4.0)={m[4.0]:.3f}, steepest drop in "
           f"[{steepest[1]}, {steepest[2]}] bracketing Tc~{onsager:.3f}")


# -- 4. quantum-analog transition ----------------------------------------------


def test_criterion_04_quantum_transition():
    lambdas = [0.05, 0.08, 0.14, 0.24, 0.4, 0.7, 1.2, 2.0, 3.0, 4.0]
    res = H.ising_lambda_sweep(16, 0.3, lambdas, hold_us=100.0, reads=24,
                               seed=MASTER_SEED, threads=THREADS)
    m = np.array(res.m_mean)
    sd = np.array(res.m_std) / math.sqrt(res.count)  # standard error per point
    band = np.maximum(np.array(res.m_std), 1e-3)
    monotone_within_1sigma = all(
        m[k + 1] >= m[k] - max(band[k], band[k + 1]) for k in range(len(m) - 1))
    ok = m[0] < 0.3 and m[-1] > 0.9 and monotone_within_1sigma
    report(4, "coupling-driven quantum transition", ok,
           f"M({lambdas[0]})={m[0]:.3f} -> M({lambdas[-1]})={m[-1]:.3f}, "
           f"monotone within 1 sigma: {monotone_within_1sigma}")
    del sd


# -- 5. boltzmann correctness ----------------------------------------------------


def test_criterion_05_boltzmann_frequencies():
    worst_all = 0.0
    for temperature in (0.5, 1.0, 2.0):
        worst, bound = boltzmann_occupancy_check(
            three_spin_problem(), temperature, sweeps=10 ** 6,
            seed=MASTER_SEED + int(10 * temperature), n_sigma=3.0)
        worst_all = max(worst_all, worst)
    report(5, "3-spin Boltzmann frequencies", worst_all < 3.0,
           f"worst occupancy pull = {worst_all:.2f} sigma (3 sigma bound)")


# -- 6. gradient fidelity --------------------------------------------------------


def test_criterion_06_gradient_fidelity():
    rng = np.random.default_rng(MASTER_SEED)
    h = 1e-5
    worst = 0.0
    for pot in (P.u1(0.5), P.u2(10.0), P.u3(1.7)):
        lo_p, hi_p, lo_q, hi_q = pot.bounds
        for _ in range(100):
            a = rng.uniform(lo_p, hi_p)
            b = rng.uniform(lo_q, hi_q)
            gp, gq = pot.grad(a, b)
            fd_p = (pot.eval(a + h, b) - pot.eval(a - h, b)) / (2 * h)
            fd_q = (pot.eval(a, b + h) - pot.eval(a, b - h)) / (2 * h)
            scale = max(1.0, abs(gp), abs(gq))
            worst = max(worst, abs(gp - fd_p) / scale, abs(gq - fd_q) / scale)
    report(6, "analytic gradients vs finite differences", worst < 1e-5,
           f"worst relative error = {worst:.2e} (300 points)")


# -- 7 & 9. optimizer orderings ---------------------------------------------------


@pytest.fixture(scope="module")
def basin_maps():
    """100-start maps for every (potential, method) at the benchmark configs."""
    maps = {}
    for pid in ("u1", "u2", "u3"):
        classical = P.by_id(pid, H.CLASSICAL_LAMBDA[pid])
        quantum = P.by_id(pid, H.QUANTUM_LAMBDA[pid])
        cfg = H.BenchConfig(seed=MASTER_SEED, threads=THREADS)
        for method in ("nm", "gd", "ta"):
            maps[(pid, method)] = H.basin_map(method, classical, 10, cfg)
        maps[(pid, "qa")] = H.basin_map("qa", quantum, 10, cfg)
    return maps


def test_criterion_07_optimizer_ordering(basin_maps):
    details = []
    ok = True
    for pid in ("u1", "u2", "u3"):
        pot = P.by_id(pid, H.CLASSICAL_LAMBDA[pid])
        thr = H.success_threshold(pot, 20)
        frac = {m: H.success_fraction(basin_maps[(pid, m)], thr)
                for m in ("nm", "gd", "ta", "qa")}
        ordering = frac["qa"] > frac["ta"] > max(frac["nm"], frac["gd"])
        ok = ok and ordering
        if pid == "u1":
            gap = frac["qa"] - frac["ta"]
            ok = ok and gap >= 0.10
            details.append(f"u1 qa-ta gap {gap * 100:.0f}pp")
        details.append(f"{pid}: " + " ".join(f"{m}={frac[m]:.2f}"
                                             for m in ("qa", "ta", "nm", "gd")))
    report(7, "qa > ta > max(nm, gd) on all three landscapes", ok,
           "; ".join(details))


def test_criterion_09_crater_classical_failure(basin_maps):
    def near_origin_fraction(records):
        hits = [1.0 if (r.valid and math.hypot(r.phi_out, r.psi_out) < 0.2)
                else 0.0 for r in records]
        return float(np.mean(hits))

    frac = {m: near_origin_fraction(basin_maps[("u3", m)])
            for m in ("nm", "gd", "ta", "qa")}
    ok = (frac["nm"] < 0.10 and frac["gd"] < 0.10
          and frac["ta"] > 0.30 and frac["qa"] > 0.60)
    report(9, "crater: descent methods fail, annealers do not", ok,
           " ".join(f"{m}={frac[m]:.2f}" for m in ("nm", "gd", "ta", "qa")))


# -- 8. lambda scaling -------------------------------------------------------------


def test_criterion_08_lambda_scaling():
    qa = H.QaConfig(num_reads=50)
    cfg = H.BenchConfig(seed=2024, threads=THREADS, qa=qa)
    out = H.lambda_scaling_study(lambdas=(0.5, 5.0, 10.0), starts=36, cfg=cfg)
    fracs = [out[lam][1] for lam in (0.5, 5.0, 10.0)]
    non_decreasing = fracs[0] <= fracs[1] <= fracs[2]

    exact = all(acceptance_probability(c * de, c * t) == acceptance_probability(de, t)
                for de in (0.25, 1.5, 7.0) for t in (0.5, 1.1, 3.0)
                for c in (0.5, 2.0, 8.0))
    ok = non_decreasing and exact
    report(8, "deeper wells help the emulator; thermal acceptance scale-free", ok,
           f"success fractions {[round(f, 3) for f in fracs]}, "
           f"acceptance invariance exact: {exact}")


# -- 10. determinism ---------------------------------------------------------------


def _strip_walltime(records):
    return [(r.method, r.potential, r.phi_start, r.psi_start, r.phi_out,
             r.psi_out, r.delta, r.energy, r.valid, r.seed) for r in records]


def test_criterion_10_manifest_determinism(tmp_path):
    out1, out2 = str(tmp_path / "a"), str(tmp_path / "b")
    argv = ["basin-map", "--method", "qa", "--potential", "u3", "--grid", "3",
            "--n", "10", "--reads", "20", "--hold-us", "10",
            "--ramp-up-us", "5", "--seed", "77", "--out", out1]
    assert cli.main(argv) == 0
    manifest = os.path.join(out1, "basin_qa_u3_manifest.json")
    assert cli.main(["rerun", manifest, "--out", out2]) == 0
    a = H.read_run_records(os.path.join(out1, "basin_qa_u3.csv"))
    b = H.read_run_records(os.path.join(out2, "basin_qa_u3.csv"))
    same = _strip_walltime(a) == _strip_walltime(b) and len(a) == 9
    report(10, "manifest rerun reproduces records", same,
           f"{len(a)} records identical up to wall time")


# -- 11. timing table ---------------------------------------------------------------


def test_criterion_11_timing_order():
    pot = P.u2(0.5)
    cfg = H.BenchConfig(seed=MASTER_SEED, ta=H.TaConfig(n=20),
                        qa=H.QaConfig(n=20, hold_us=40.0, num_reads=100))
    rows = H.timing_table(("nm", "gd", "ta"), pot, reps=25, cfg=cfg)
    by_method = {r[0]: r for r in rows}
    ta_mean = by_method["ta"][1]
    ok = ta_mean > by_method["nm"][1] and ta_mean > by_method["gd"][1]
    lines = [f"{m}: measured {by_method[m][1]:.0f}us (reference {by_method[m][4]:.0f}us)"
             for m in ("nm", "gd", "ta")]
    report(11, "thermal annealing slowest of the classical trio", ok,
           " | ".join(lines))
