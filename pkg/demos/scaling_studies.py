"""Depth scaling and grid-size robustness of the emulated annealer.

Part one rescales the multi-well landscape (deeper wells at fixed shape) and
shows the emulator's success rising with depth, while thermal acceptance
probabilities are exactly invariant under a joint (dE, T) rescale.  Part two
repeats a thermal map at two lattice resolutions to show the fraction found
barely moves.
"""

from annealbench import harness as H
from annealbench import potentials as P
from annealbench.thermal import acceptance_probability


def main():
    cfg = H.BenchConfig(seed=31, qa=H.QaConfig(num_reads=50))
    print("emulator success on the multi-well landscape vs depth scale:")
    out = H.lambda_scaling_study(lambdas=(0.5, 5.0, 10.0), starts=25, cfg=cfg)
    for lam in (0.5, 5.0, 10.0):
        print(f"  lambda={lam:5.1f}: success {out[lam][1]:5.1%}")

    print("thermal acceptance under (dE, T) -> (c dE, c T):")
    for c in (0.5, 2.0, 8.0):
        same = all(acceptance_probability(c * de, c * t)
                   == acceptance_probability(de, t)
                   for de in (0.3, 1.0, 4.0) for t in (0.5, 1.1, 2.0))
        print(f"  c={c:4.1f}: identical = {same}")

    print("thermal-annealer success vs encoding size (multi-well):")
    sizes = H.grid_size_study((20, 50), "ta", P.u2(0.5), starts=49,
                              cfg=H.BenchConfig(seed=31))
    for n, frac in sizes.items():
        print(f"  n={n}: success {frac:5.1%}")


if __name__ == "__main__":
    main()
