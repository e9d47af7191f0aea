"""Command-line front end: build/export problems, run optimizers, sweep, map.

Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error,
3 no valid result (an emulator run whose reads all failed to decode).
Every command writes a manifest JSON beside its outputs with the resolved
configuration and master seed; `annealbench rerun <manifest>` reproduces the
run record-for-record (wall-clock fields aside).
"""

import argparse
import csv
import json
import math
import os
import sys

import numpy as np

from . import dwe, harness, potentials, sqa, thermal
from .svgplot import svg_heatmap, svg_line_chart

__all__ = ["main"]


class ConfigError(Exception):
    pass


def parse_range(text):
    """'lo:hi:count' -> inclusive linspace; a bare number -> [number]."""
    parts = str(text).split(":")
    if len(parts) == 1:
        return [float(parts[0])]
    if len(parts) != 3:
        raise ConfigError(f"range must be lo:hi:count, got {text!r}")
    lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    if count < 1:
        raise ConfigError("range count must be >= 1")
    return [float(v) for v in np.linspace(lo, hi, count)]


def parse_start(text):
    parts = str(text).split(",")
    if len(parts) != 2:
        raise ConfigError(f"start must be 'phi,psi', got {text!r}")
    return (float(parts[0]), float(parts[1]))


def _resolve_potential(name, lam, method=None, literal_sign=False):
    name = name.lower()
    if name.startswith("custom:"):
        return potentials.load_potential_csv(name[len("custom:"):],
                                             lam=1.0 if lam is None else lam)
    if name not in ("u1", "u2", "u3"):
        raise ConfigError(f"unknown potential {name!r}")
    if lam is None:
        table = (harness.QUANTUM_LAMBDA if method == "qa"
                 else harness.CLASSICAL_LAMBDA)
        lam = table[name]
    return potentials.by_id(name, lam, literal_sign=literal_sign)


def _outdir(cfg):
    path = cfg.get("out", "out")
    os.makedirs(path, exist_ok=True)
    return path


def _write_manifest(out, name, command, cfg):
    harness.write_manifest(os.path.join(out, name), command, cfg, cfg.get("seed", 1))


# -- ising-sweep ---------------------------------------------------------------


def cmd_ising_sweep(cfg):
    out = _outdir(cfg)
    mode = cfg["mode"]
    if mode == "thermal":
        result = harness.ising_thermal_sweep(
            cfg["n"], cfg["lambda"], cfg["t_values"],
            protocol=(cfg["equil"], cfg["measure"], cfg["reps"]),
            seed=cfg["seed"], threads=cfg.get("threads"))
    elif mode == "quantum":
        base = sqa.SqaConfig(trotter_slices=cfg["p_slices"], t_eff=cfg["t_eff"],
                             sweeps_per_us=cfg["sweeps_per_us"])
        result = harness.ising_lambda_sweep(
            cfg["n"], cfg["s"], cfg["lambda_values"], hold_us=cfg["hold_us"],
            reads=cfg["reads"], sqa_config=base, seed=cfg["seed"],
            threads=cfg.get("threads"))
    else:
        raise ConfigError(f"mode must be thermal or quantum, got {mode!r}")
    path = os.path.join(out, f"sweep_{mode}.csv")
    harness.write_sweep_result(path, result)
    _write_manifest(out, f"sweep_{mode}_manifest.json", "ising-sweep", cfg)
    if cfg.get("svg"):
        svg_line_chart(os.path.join(out, f"sweep_{mode}.svg"), result.values,
                       {"M": result.m_mean, "eta": result.eta_mean},
                       title=f"{mode} sweep N={cfg['n']}",
                       xlabel=result.axis, ylabel="M / eta")
    print(path)
    return 0


def _add_sweep_parser(sub):
    p = sub.add_parser("ising-sweep", help="grid phase-transition sweeps")
    p.add_argument("--mode", required=True, choices=["thermal", "quantum"])
    p.add_argument("--n", required=True, type=int)
    p.add_argument("--lambda", dest="lam", default=None,
                   help="coupling scale (thermal: scalar; quantum: lo:hi:count)")
    p.add_argument("--t", default=None, help="temperature range lo:hi:count")
    p.add_argument("--s", type=float, default=0.3, help="hold anneal parameter")
    p.add_argument("--equil", type=int, default=400)
    p.add_argument("--measure", type=int, default=100)
    p.add_argument("--reps", type=int, default=10)
    p.add_argument("--reads", type=int, default=24)
    p.add_argument("--hold-us", type=float, default=100.0)
    p.add_argument("--p-slices", type=int, default=32)
    p.add_argument("--t-eff", type=float, default=0.05)
    p.add_argument("--sweeps-per-us", type=float, default=10.0)


def _sweep_config(args):
    cfg = {"mode": args.mode, "n": args.n, "seed": args.seed, "out": args.out,
           "threads": args.threads, "svg": args.svg}
    if args.mode == "thermal":
        if args.t is None:
            raise ConfigError("thermal mode needs --t lo:hi:count")
        cfg["t_values"] = parse_range(args.t)
        cfg["lambda"] = float(args.lam) if args.lam is not None else 1.0
        cfg["equil"], cfg["measure"], cfg["reps"] = args.equil, args.measure, args.reps
    else:
        if args.lam is None:
            raise ConfigError("quantum mode needs --lambda lo:hi:count")
        cfg["lambda_values"] = parse_range(args.lam)
        cfg.update(s=args.s, reads=args.reads, hold_us=args.hold_us,
                   p_slices=args.p_slices, t_eff=args.t_eff,
                   sweeps_per_us=args.sweeps_per_us)
    return cfg


# -- solve ----------------------------------------------------------------------


def _bench_config(cfg):
    ta = harness.TaConfig(n=cfg.get("ta_n", 50), schedule=cfg.get("schedule", ""),
                          mode=cfg.get("mode_enc", "h"))
    qa = harness.QaConfig(n=cfg.get("qa_n", 20), s_hold=cfg.get("s_hold", 0.3),
                          hold_us=cfg.get("hold_us", 40.0),
                          ramp_down_us=cfg.get("ramp_down_us", 2.0),
                          ramp_up_us=cfg.get("ramp_up_us", 15.0),
                          num_reads=cfg.get("reads", 100),
                          trotter_slices=cfg.get("p_slices", 32),
                          t_eff=cfg.get("t_eff", 0.05),
                          sweeps_per_us=cfg.get("sweeps_per_us", 10.0),
                          mode=cfg.get("mode_enc", "h"))
    return harness.BenchConfig(seed=cfg["seed"], threads=cfg.get("threads"),
                               ta=ta, qa=qa)


def cmd_solve(cfg):
    out = _outdir(cfg)
    method = cfg["method"]
    pot = _resolve_potential(cfg["potential"], cfg.get("lambda"), method,
                             cfg.get("u2_literal_sign", False))
    bench = _bench_config(cfg)
    start = tuple(cfg["start"])
    if method == "qa":
        problem, layout, _ = dwe.encode(pot, bench.qa.n, mode=bench.qa.mode)
        init = dwe.plant_state(layout, layout.phi_index(start[0]),
                               layout.psi_index(start[1]))
        reads = sqa.sqa_run(problem, bench.qa.schedule(),
                            bench.qa.sqa_config(cfg["seed"]), init, layout=layout)
        reads_path = os.path.join(out, "reads.csv")
        with open(reads_path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["read_index", "valid", "phi", "psi", "energy"])
            for k, (sample, e) in enumerate(zip(reads.samples, reads.energies)):
                w.writerow([k, int(sample.valid), repr(sample.phi),
                            repr(sample.psi), repr(float(e))])
        best = sqa.mode_of_reads(reads, layout)  # NoValidReadsError -> exit 3
        record = harness.RunRecord(
            method=method, potential=pot.id, phi_start=start[0],
            psi_start=start[1], phi_out=best.phi, psi_out=best.psi,
            delta=potentials.distance_to_truth(pot, (best.phi, best.psi)),
            energy=pot.eval(best.phi, best.psi), valid=True,
            seed=cfg["seed"], wall_time_us=0)
    else:
        records = harness.basin_map(method, pot, [start], bench)
        record = records[0]
    _write_manifest(out, "solve_manifest.json", "solve", cfg)
    print(json.dumps(record.__dict__))
    return 0


def _add_solve_parser(sub):
    p = sub.add_parser("solve", help="one optimisation run, any method")
    p.add_argument("--method", required=True, choices=list(harness.METHODS))
    p.add_argument("--potential", required=True,
                   help="u1 | u2 | u3 | custom:path.csv")
    p.add_argument("--start", required=True, help="phi,psi")
    p.add_argument("--lambda", dest="lam", type=float, default=None)
    p.add_argument("--n", type=int, default=None, help="encoding size (ta/qa)")
    p.add_argument("--schedule", default="", help="thermal preset name or CSV path")
    p.add_argument("--reads", type=int, default=100)
    p.add_argument("--s-hold", type=float, default=0.3)
    p.add_argument("--hold-us", type=float, default=40.0)
    p.add_argument("--ramp-down-us", type=float, default=2.0)
    p.add_argument("--ramp-up-us", type=float, default=15.0)
    p.add_argument("--u2-literal-sign", action="store_true")


def _solve_config(args):
    cfg = {"method": args.method, "potential": args.potential,
           "start": list(parse_start(args.start)), "seed": args.seed,
           "out": args.out, "threads": args.threads,
           "schedule": args.schedule, "reads": args.reads,
           "s_hold": args.s_hold, "hold_us": args.hold_us,
           "ramp_down_us": args.ramp_down_us, "ramp_up_us": args.ramp_up_us,
           "u2_literal_sign": args.u2_literal_sign}
    if args.lam is not None:
        cfg["lambda"] = args.lam
    if args.n is not None:
        cfg["ta_n" if args.method == "ta" else "qa_n"] = args.n
    return cfg


# -- basin-map -------------------------------------------------------------------


def cmd_basin_map(cfg):
    out = _outdir(cfg)
    method = cfg["method"]
    pot = _resolve_potential(cfg["potential"], cfg.get("lambda"), method,
                             cfg.get("u2_literal_sign", False))
    bench = _bench_config(cfg)
    side = cfg["grid"]
    records = harness.basin_map(method, pot, side, bench)
    path = os.path.join(out, f"basin_{method}_{pot.id}.csv")
    harness.write_run_records(path, records)
    _write_manifest(out, f"basin_{method}_{pot.id}_manifest.json", "basin-map", cfg)
    if cfg.get("svg"):
        grid = [[math.nan] * side for _ in range(side)]
        for k, r in enumerate(records):
            i, j = divmod(k, side)
            grid[i][j] = r.delta if r.valid else math.nan
        svg_heatmap(os.path.join(out, f"basin_{method}_{pot.id}.svg"), grid,
                    pot.bounds, title=f"distance to minimum: {method} on {pot.id}")
    print(path)
    return 0


def _add_basin_parser(sub):
    p = sub.add_parser("basin-map", help="distance-to-minimum map over a start grid")
    p.add_argument("--method", required=True, choices=list(harness.METHODS))
    p.add_argument("--potential", required=True)
    p.add_argument("--grid", type=int, default=None,
                   help="start lattice side (default 50 classical, 10 qa)")
    p.add_argument("--lambda", dest="lam", type=float, default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--reads", type=int, default=100)
    p.add_argument("--s-hold", type=float, default=0.3)
    p.add_argument("--hold-us", type=float, default=40.0)
    p.add_argument("--ramp-down-us", type=float, default=2.0)
    p.add_argument("--ramp-up-us", type=float, default=15.0)
    p.add_argument("--schedule", default="")
    p.add_argument("--u2-literal-sign", action="store_true")


def _basin_config(args):
    cfg = {"method": args.method, "potential": args.potential,
           "grid": args.grid if args.grid else (10 if args.method == "qa" else 50),
           "seed": args.seed, "out": args.out, "threads": args.threads,
           "svg": args.svg, "schedule": args.schedule, "reads": args.reads,
           "s_hold": args.s_hold, "hold_us": args.hold_us,
           "ramp_down_us": args.ramp_down_us, "ramp_up_us": args.ramp_up_us,
           "u2_literal_sign": args.u2_literal_sign}
    if args.lam is not None:
        cfg["lambda"] = args.lam
    if args.n is not None:
        cfg["ta_n" if args.method == "ta" else "qa_n"] = args.n
    return cfg


# -- hist ------------------------------------------------------------------------


def _hist_starts(pot, count, seed):
    lo_p, hi_p, lo_q, hi_q = pot.bounds
    wp, wq = hi_p - lo_p, hi_q - lo_q
    corners = [(lo_p + 0.25 * wp, lo_q + 0.25 * wq),
               (lo_p + 0.25 * wp, hi_q - 0.25 * wq),
               (hi_p - 0.25 * wp, lo_q + 0.25 * wq),
               (hi_p - 0.25 * wp, hi_q - 0.25 * wq)]
    if count <= 4:
        return corners[:count]
    rng = np.random.default_rng(seed)
    extra = [(float(rng.uniform(lo_p, hi_p)), float(rng.uniform(lo_q, hi_q)))
             for _ in range(count - 4)]
    return corners + extra


def cmd_hist(cfg):
    out = _outdir(cfg)
    paths = []
    for method in cfg["methods"]:
        pot = _resolve_potential(cfg["potential"], cfg.get("lambda"), method,
                                 cfg.get("u2_literal_sign", False))
        bench = _bench_config(cfg)
        starts = _hist_starts(pot, cfg["starts"], cfg["seed"])
        result = harness.distance_histograms(method, pot, starts,
                                             reps=cfg["reps"], cfg=bench)
        path = os.path.join(out, f"hist_{method}_{pot.id}.csv")
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["phi_start", "psi_start", "bin_lo", "bin_hi", "count"])
            for start, deltas in result.items():
                for lo, hi, c in harness.histogram_rows(deltas, cfg["bin_width"]):
                    w.writerow([repr(start[0]), repr(start[1]), repr(lo), repr(hi), c])
        paths.append(path)
    _write_manifest(out, f"hist_{cfg['potential']}_manifest.json", "hist", cfg)
    print("\n".join(paths))
    return 0


def _add_hist_parser(sub):
    p = sub.add_parser("hist", help="per-start distance distributions")
    p.add_argument("--potential", required=True)
    p.add_argument("--methods", default="nm,gd,ta,qa")
    p.add_argument("--starts", type=int, default=4)
    p.add_argument("--reps", type=int, default=100)
    p.add_argument("--bin-width", type=float, default=0.1)
    p.add_argument("--lambda", dest="lam", type=float, default=None)
    p.add_argument("--reads", type=int, default=100)
    p.add_argument("--s-hold", type=float, default=0.3)
    p.add_argument("--hold-us", type=float, default=40.0)
    p.add_argument("--ramp-down-us", type=float, default=2.0)
    p.add_argument("--ramp-up-us", type=float, default=15.0)
    p.add_argument("--schedule", default="")
    p.add_argument("--u2-literal-sign", action="store_true")


def _hist_config(args):
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    for m in methods:
        if m not in harness.METHODS:
            raise ConfigError(f"unknown method {m!r}")
    cfg = {"potential": args.potential, "methods": methods, "starts": args.starts,
           "reps": args.reps, "bin_width": args.bin_width, "seed": args.seed,
           "out": args.out, "threads": args.threads, "schedule": args.schedule,
           "reads": args.reads, "s_hold": args.s_hold, "hold_us": args.hold_us,
           "ramp_down_us": args.ramp_down_us, "ramp_up_us": args.ramp_up_us,
           "u2_literal_sign": args.u2_literal_sign}
    if args.lam is not None:
        cfg["lambda"] = args.lam
    return cfg


# -- export ----------------------------------------------------------------------


def cmd_export(cfg):
    pot = _resolve_potential(cfg["potential"], cfg.get("lambda"), None,
                             cfg.get("u2_literal_sign", False))
    problem, _, _ = dwe.encode(pot, cfg["n"], mode=cfg.get("mode_enc", "h"))
    path = cfg["output"]
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w") as fh:
        fh.write(problem.to_json(indent=2))
        fh.write("\n")
    harness.write_manifest(path + ".manifest.json", "export", cfg, cfg.get("seed", 1))
    print(path)
    return 0


def _add_export_parser(sub):
    p = sub.add_parser("export", help="write an encoded problem as JSON")
    p.add_argument("--potential", required=True)
    p.add_argument("--n", type=int, default=20)
    p.add_argument("--lambda", dest="lam", type=float, default=None)
    p.add_argument("--mode", dest="mode_enc", default="h", choices=["h", "j"])
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--u2-literal-sign", action="store_true")


def _export_config(args):
    cfg = {"potential": args.potential, "n": args.n, "mode_enc": args.mode_enc,
           "output": args.output, "seed": args.seed,
           "u2_literal_sign": args.u2_literal_sign}
    if args.lam is not None:
        cfg["lambda"] = args.lam
    return cfg


# -- rerun -----------------------------------------------------------------------

_DISPATCH = {"ising-sweep": cmd_ising_sweep, "solve": cmd_solve,
             "basin-map": cmd_basin_map, "hist": cmd_hist, "export": cmd_export}


def cmd_rerun(manifest_path, out=None):
    manifest = harness.read_manifest(manifest_path)
    command = manifest["command"]
    if command not in _DISPATCH:
        raise ConfigError(f"manifest command {command!r} is not rerunnable")
    cfg = manifest["config"]
    if out is not None:
        cfg = {**cfg, "out": out}
    return _DISPATCH[command](cfg)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="annealbench",
        description="Ising encodings and four-way optimizer benchmarks")
    sub = parser.add_subparsers(dest="command", required=True)
    for add in (_add_sweep_parser, _add_solve_parser, _add_basin_parser,
                _add_hist_parser, _add_export_parser):
        add(sub)
    for name, p in sub.choices.items():
        p.add_argument("--seed", type=int, default=1)
        p.add_argument("--threads", type=int, default=None)
        p.add_argument("--out", "-O", default="out")
        p.add_argument("--svg", action="store_true")
    rerun = sub.add_parser("rerun", help="re-execute a manifest")
    rerun.add_argument("manifest")
    rerun.add_argument("--out", "-O", default=None,
                       help="redirect outputs (default: manifest's directory)")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "ising-sweep":
            cfg = _sweep_config(args)
        elif args.command == "solve":
            cfg = _solve_config(args)
        elif args.command == "basin-map":
            cfg = _basin_config(args)
        elif args.command == "hist":
            cfg = _hist_config(args)
        elif args.command == "export":
            cfg = _export_config(args)
        elif args.command == "rerun":
            return cmd_rerun(args.manifest, out=args.out)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        return _DISPATCH[args.command](cfg)
    except sqa.NoValidReadsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # runtime failure
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
