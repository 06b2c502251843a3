"""Facet counts of generic one-hidden-layer witness nets against [C(d,m) - 1, G(d,m)].

Writes one CSV row per (d, m, seed).
"""

import argparse
import csv
import sys
from dataclasses import dataclass

from pwlboundary.arrangement import theorem5_experiment


@dataclass(frozen=True)
class SweepConfig:
    dims: tuple[int, ...] = (2, 3)
    max_m: int = 7
    seeds: int = 10


def sweep(cfg: SweepConfig):
    for d in cfg.dims:
        for m in range(d + 1, cfg.max_m + 1):
            for seed in range(cfg.seeds):
                yield theorem5_experiment(d, m, seed)


def main() -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--dims", type=int, nargs="+", default=[2, 3])
    p.add_argument("--max-m", type=int, default=7)
    p.add_argument("--seeds", type=int, default=10)
    a = p.parse_args()
    cfg = SweepConfig(tuple(a.dims), a.max_m, a.seeds)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["d", "m", "seed", "facets", "lower", "upper", "pass"])
    failed = 0
    for r in sweep(cfg):
        w.writerow([r.d, r.m, r.seed, r.facets, r.lower, r.upper, str(r.passed).lower()])
        failed += not r.passed
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
