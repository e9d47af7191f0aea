"""Race the four optimizers on one landscape from a shared grid of starts.

Produces a distance-to-minimum map per method (CSV + SVG heatmap) and a
success-fraction table, a desk-scale version of the benchmark comparison.
Pass a potential id (u1, u2, u3) as the first argument; default u1.
"""

import math
import os
import sys

from annealbench import harness as H
from annealbench import potentials as P
from annealbench.svgplot import svg_heatmap

OUT = os.path.join(os.path.dirname(__file__), "out")
SIDE = 8          # SIDE x SIDE starts per method
QA_READS = 50


def main(pid="u1"):
    os.makedirs(OUT, exist_ok=True)
    classical = P.by_id(pid, H.CLASSICAL_LAMBDA[pid])
    quantum = P.by_id(pid, H.QUANTUM_LAMBDA[pid])
    threshold = H.success_threshold(classical, 20)
    truth = P.true_minimum(classical)
    print(f"{pid}: true minimum at ({truth.phi:+.4f}, {truth.psi:+.4f}), "
          f"success threshold {threshold:.3f}")

    cfg = H.BenchConfig(seed=11, qa=H.QaConfig(num_reads=QA_READS))
    for method in ("nm", "gd", "ta", "qa"):
        pot = quantum if method == "qa" else classical
        records = H.basin_map(method, pot, SIDE, cfg)
        H.write_run_records(os.path.join(OUT, f"race_{method}_{pid}.csv"),
                            records)
        grid = [[math.nan] * SIDE for _ in range(SIDE)]
        for k, r in enumerate(records):
            i, j = divmod(k, SIDE)
            grid[i][j] = r.delta if r.valid else math.nan
        svg_heatmap(os.path.join(OUT, f"race_{method}_{pid}.svg"), grid,
                    pot.bounds, title=f"{method} distance map on {pid}")
        frac = H.success_fraction(records, threshold)
        mean_t = sum(r.wall_time_us for r in records) / len(records)
        print(f"  {method}: success {frac:5.1%}   mean {mean_t:8.0f} us/run")
    print(f"maps written under {OUT}")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "u1")
