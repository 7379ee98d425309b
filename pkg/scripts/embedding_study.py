#!/usr/bin/env python3
"""Simulate the Brownian embedding of an example family and report the
statistical checks: empirical distances per time, pathwise stopping-time
monotonicity, and the binned supermartingale test for each time pair.

Usage:
    python3 scripts/embedding_study.py [--family prop42] [--paths 10000]
                                       [--dt 1e-3] [--horizon 10000] [--seed 1]
"""
import argparse

from wdsembed.mc_sim import (
    PathConfig,
    check_monotone_t,
    check_supermartingale,
    embed_family,
    empirical_distance,
)
from wdsembed.transforms import EXAMPLE_FAMILIES, example_family


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--family", default="prop42", choices=sorted(EXAMPLE_FAMILIES))
    ap.add_argument("--paths", type=int, default=10_000)
    ap.add_argument("--dt", type=float, default=1e-3)
    ap.add_argument("--horizon", type=float, default=10_000.0)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--allow-non-wds", action="store_true")
    args = ap.parse_args()

    fam = example_family(args.family)
    cfg = PathConfig(dt=args.dt, horizon=args.horizon, n_paths=args.paths,
                     seed=args.seed)
    res = embed_family(fam, cfg, allow_non_wds=args.allow_non_wds)

    print(f"family={args.family}  paths={args.paths}  dt={args.dt}  "
          f"censored={res.censor_fraction():.3%}")
    for i, (t, m) in enumerate(fam.entries):
        emp = res.empirical_measure(i)
        ks = empirical_distance(emp, m, "ks")
        w1 = empirical_distance(emp, m, "w1")
        keep = ~res.censored[i]
        print(f"  t={t:<6g} mean(BT)={res.BT[i, keep].mean():+.4f} "
              f"target={m.mean():+.4f}  ks={ks:.4f}  w1={w1:.4f}")

    mono = check_monotone_t(res)
    print(f"stopping-time monotonicity: {mono.n_violations} violations "
          f"over {mono.n_checked} uncensored paths")

    times = fam.times
    n_bins = max(2, min(10, args.paths // 200))
    for s, t in zip(times[:-1], times[1:]):
        rep = check_supermartingale(res, s, t, n_bins=n_bins)
        worst = max((b.mean_diff - 3.0 * b.stderr) for b in rep.bins)
        print(f"supermartingale {s} -> {t}: "
              f"{'ok' if rep.ok else 'VIOLATED'} "
              f"(worst bin mean-drift excess {worst:+.4f})")


if __name__ == "__main__":
    main()
