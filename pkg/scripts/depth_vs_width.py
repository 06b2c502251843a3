"""Units needed by one-hidden-layer nets versus the deep norm network.

For each (d, epsilon) prints the shallow lower bound N_s, the deep size N_d,
their ratio and the closed-form ratio approximation.
"""

import argparse
import csv
import sys
from dataclasses import dataclass

from pwlboundary.bounds import deep_net_size, efficiency_ratio, shl_units_lower


@dataclass(frozen=True)
class RatioConfig:
    dims: tuple[int, ...] = (2, 5, 10, 50, 100, 1000)
    epsilons: tuple[float, ...] = (0.1, 0.01, 0.001)
    C: float = 1.0


def main() -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--dims", type=int, nargs="+", default=list(RatioConfig.dims))
    p.add_argument("--epsilons", type=float, nargs="+", default=list(RatioConfig.epsilons))
    p.add_argument("--constant", type=float, default=1.0)
    a = p.parse_args()
    cfg = RatioConfig(tuple(a.dims), tuple(a.epsilons), a.constant)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["d", "epsilon", "N_s", "N_d", "N_s/N_d", "approx_ratio"])
    for d in cfg.dims:
        for eps in cfg.epsilons:
            n_s, _ = shl_units_lower(d, eps, cfg.C)
            n_d = deep_net_size(d, eps).units
            w.writerow([d, eps, f"{n_s:.6g}", n_d, f"{n_s / n_d:.4g}", f"{efficiency_ratio(d, eps, cfg.C):.4g}"])
    return 0


if __name__ == "__main__":
    sys.exit(main())
