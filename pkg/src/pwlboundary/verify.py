"""Numerical experiments that check the norm network against its bounds.

Random draws come from numpy's PCG64 bit generator.  A run with ``seed`` is
split into fixed-size batches and batch ``i`` draws from the ``i``-th child of
``SeedSequence(seed)``, so results depend only on the seed and sample count,
never on how batches are scheduled across threads.
"""

from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields
from typing import Callable, Optional

import numpy as np

from .bounds import deep_net_size
from .errors import NumericalError
from .netbuilder import LayeredNetwork, build_norm_nd, eval_scalar, relu_pattern, theta

RNG_NAME = "numpy PCG64, SeedSequence(seed).spawn per batch"
BATCH = 1 << 16
Z95 = 1.959963984540054


def _streams(seed: int, n: int, batch: int = BATCH) -> list[tuple[np.random.SeedSequence, int]]:
    sizes = [batch] * (n // batch) + ([n % batch] if n % batch else [])
    return list(zip(np.random.SeedSequence(seed).spawn(len(sizes)), sizes))


def _map_batches(fn: Callable, seed: int, n: int, threads: Optional[int]) -> list:
    jobs = _streams(seed, n)
    threads = threads or os.cpu_count() or 1
    if threads <= 1 or len(jobs) == 1:
        return [fn(np.random.Generator(np.random.PCG64(ss)), size) for ss, size in jobs]
    with ThreadPoolExecutor(threads) as pool:
        return list(pool.map(lambda job: fn(np.random.Generator(np.random.PCG64(job[0])), job[1]), jobs))


def _nonzero_normal(rng: np.random.Generator, n: int, d: int) -> np.ndarray:
    X = rng.standard_normal((n, d))
    zero = ~np.any(X, axis=1)
    while zero.any():
        X[zero] = rng.standard_normal((int(zero.sum()), d))
        zero = ~np.any(X, axis=1)
    return X


@dataclass(frozen=True)
class SandwichResult:
    d: int
    k: int
    samples: int
    seed: int
    min_ratio: float
    max_ratio: float
    lower: float
    argmin: tuple[float, ...]

    @property
    def passed(self) -> bool:
        return self.min_ratio >= self.lower - 1e-9 and self.max_ratio <= 1.0 + 1e-9


def sandwich_sweep(d: int, k: int, n_samples: int, seed: int, threads: Optional[int] = None) -> SandwichResult:
    """Range of ``g(x) / ||x||`` over Gaussian draws, against ``[cos^(d-1)(theta_k), 1]``."""
    if n_samples < 1:
        raise ValueError("need at least one sample")
    net = build_norm_nd(d, k, 0.0)

    def run(rng, size):
        X = _nonzero_normal(rng, size, d)
        r = eval_scalar(net, X) / np.linalg.norm(X, axis=1)
        i = int(np.argmin(r))
        return float(r[i]), float(r.max()), X[i]

    parts = _map_batches(run, seed, n_samples, threads)
    lo = min(parts, key=lambda p: p[0])
    return SandwichResult(
        d,
        k,
        n_samples,
        seed,
        lo[0],
        max(p[1] for p in parts),
        math.cos(theta(k)) ** (d - 1),
        tuple(float(v) for v in lo[2]),
    )


@dataclass(frozen=True)
class McVolumeResult:
    """Monte Carlo estimate of ``|P \\ B| / |B|`` for the ball ``B`` of the net's radius."""

    estimate: float
    ci95: float
    samples: int
    seed: int
    R: float
    hits: int
    outside_R: int = 0


def _sample_ball(rng: np.random.Generator, n: int, d: int, R: float) -> np.ndarray:
    X = _nonzero_normal(rng, n, d)
    X /= np.linalg.norm(X, axis=1, keepdims=True)
    return X * (R * rng.random(n) ** (1.0 / d))[:, None]


def mc_volume_excess(
    net: LayeredNetwork,
    d: int,
    k: int,
    n_samples: int,
    seed: int,
    threads: Optional[int] = None,
) -> McVolumeResult:
    """Uniform samples in the circumscribed ball ``B(radius / cos^(d-1) theta_k)``.

    The excess is the fraction of samples inside the net's polytope but outside
    ``B(radius)``, scaled by the volume ratio ``(R / radius)^d``.
    """
    if net.radius is None or net.radius <= 0:
        raise ValueError("volume excess needs a network built with a positive radius")
    if net.dim != d:
        raise ValueError(f"network dimension {net.dim} does not match d={d}")
    if n_samples < 10_000:
        raise ValueError("need at least 10^4 samples")
    r0 = net.radius
    R = 1.0 / math.cos(theta(k)) ** (d - 1)

    def run(rng, size):
        X = _sample_ball(rng, size, d, R * r0)
        inside = eval_scalar(net, X) <= 0.0
        norm = np.linalg.norm(X, axis=1)
        return int(np.count_nonzero(inside & (norm > r0))), int(np.count_nonzero(inside & (norm > R * r0)))

    parts = _map_batches(run, seed, n_samples, threads)
    hits = sum(p[0] for p in parts)
    beyond = sum(p[1] for p in parts)
    if beyond:
        raise NumericalError(f"{beyond} samples lie inside the polytope but outside the circumscribed ball")
    p = hits / n_samples
    scale = R**d
    ci = Z95 * math.sqrt(p * (1.0 - p) / n_samples) * scale
    return McVolumeResult(p * scale, ci, n_samples, seed, R, hits, beyond)


def polygon_excess(k: int) -> float:
    """Exact excess of the regular ``2^k``-gon circumscribing the unit circle."""
    n = 2**k
    return n * math.tan(math.pi / n) / math.pi - 1.0


def boundary_radii(net: LayeredNetwork, angles: np.ndarray, hi: float = 4.0, iters: int = 60) -> np.ndarray:
    """Bisection for the zero of the net output along each ray from the origin."""
    U = np.stack([np.cos(angles), np.sin(angles)], axis=1)
    lo_r = np.zeros(len(angles))
    hi_r = np.full(len(angles), hi)
    if np.any(eval_scalar(net, U * hi) <= 0) or np.any(eval_scalar(net, U * 0.0) >= 0):
        raise NumericalError("boundary not bracketed in (0, 4]")
    for _ in range(iters):
        mid = 0.5 * (lo_r + hi_r)
        pos = eval_scalar(net, U * mid[:, None]) > 0
        hi_r = np.where(pos, mid, hi_r)
        lo_r = np.where(pos, lo_r, mid)
    return 0.5 * (lo_r + hi_r)


def count_segments_2d(net: LayeredNetwork, probes_per_segment: int = 64) -> int:
    """Number of straight pieces of the 2-D net boundary.

    Probes ``2^(k+6)`` directions (offset half a step so none lands on a
    breakpoint), locates the boundary along each and counts maximal cyclic runs
    of constant relu activation pattern.
    """
    if net.dim != 2 or net.k is None or not net.radius:
        raise ValueError("need a 2-D network built with a positive radius")
    n = probes_per_segment * 2**net.k
    t = 2 * math.pi * (np.arange(n) + 0.5) / n
    r = boundary_radii(net, t)
    pts = np.stack([r * np.cos(t), r * np.sin(t)], axis=1)
    pat = relu_pattern(net, pts)
    change = np.any(pat != np.roll(pat, 1, axis=0), axis=1)
    starts = np.flatnonzero(change)
    if len(starts) == 0:
        return 1
    runs = np.diff(np.append(starts, starts[0] + n))
    if runs.min() < 2:
        raise NumericalError("sweep resolution too coarse: a run has fewer than 2 probes")
    return len(starts)


@dataclass(frozen=True)
class Theorem11Result:
    d: int
    epsilon: float
    k_used: int
    units: int
    layers: int
    excess_estimate: float
    ci95: float
    bound: float
    samples: int
    seed: int

    @property
    def passed(self) -> bool:
        return self.excess_estimate - self.ci95 <= self.epsilon


def reproduce_theorem11(
    d: int, epsilon: float, n_samples: int, seed: int, threads: Optional[int] = None
) -> Theorem11Result:
    """Size the deep net for ``epsilon``, build it and measure its volume excess."""
    if not 2 <= d <= 6:
        raise ValueError("volume experiments support 2 <= d <= 6")
    size = deep_net_size(d, epsilon)
    net = build_norm_nd(d, size.k_ceil, 1.0)
    mc = mc_volume_excess(net, d, size.k_ceil, n_samples, seed, threads)
    return Theorem11Result(
        d, epsilon, size.k_ceil, net.unit_count, net.layer_count, mc.estimate, mc.ci95, size.bound, n_samples, seed
    )


@dataclass(frozen=True)
class ExperimentRow:
    experiment: str
    d: Optional[int] = None
    k: Optional[int] = None
    epsilon: Optional[float] = None
    samples: Optional[int] = None
    seed: Optional[int] = None
    estimate: Optional[float] = None
    ci95: Optional[float] = None
    bound: Optional[float] = None
    passed: bool = False
    rng: str = RNG_NAME

    def as_dict(self) -> dict:
        return asdict(self)


ROW_COLUMNS = ["experiment", "d", "k", "epsilon", "samples", "seed", "estimate", "ci95", "bound", "pass", "rng"]


def _cell(v, digits):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, f".{digits}g")
    return str(v)


def rows_csv(rows: list[ExperimentRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(ROW_COLUMNS)
    names = [f.name for f in fields(ExperimentRow)]
    for r in rows:
        w.writerow([_cell(getattr(r, n), 17) for n in names])
    return buf.getvalue()


def row_text(r: ExperimentRow) -> str:
    parts = [f"{n}={_cell(getattr(r, n), 6)}" for n in ("d", "k", "epsilon", "samples", "seed", "estimate", "ci95", "bound")]
    parts = [p for p in parts if not p.endswith("=")]
    status = "PASS" if r.passed else "FAIL"
    return f"{r.experiment}: {' '.join(parts)} -> {status}"
