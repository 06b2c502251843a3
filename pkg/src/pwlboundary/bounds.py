"""Closed-form counts and size bounds.

Integer quantities (region counts, binomials) use Python's arbitrary-precision
``int``; real-valued bounds use double precision.  Logarithms in the deep-net
sizing are base 2.  The universal constant ``C`` of the facet bound is not
known numerically and is a parameter defaulting to 1.
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import asdict, dataclass, fields
from fractions import Fraction
from typing import Optional


def _check_eps(epsilon: float) -> None:
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")


def _check_dim(d: int, lo: int = 2) -> None:
    if int(d) != d or d < lo:
        raise ValueError(f"dimension must be an integer >= {lo}, got {d}")


def regions_max(d: int, m: int) -> int:
    """Maximum number of regions cut from R^d by m hyperplanes: sum_{k<=d} C(m, k)."""
    if d < 1 or m < 0:
        raise ValueError("need d >= 1 and m >= 0")
    return sum(math.comb(m, k) for k in range(d + 1))


def bounded_regions(d: int, m: int) -> int:
    """Bounded regions of a generic arrangement: C(m - 1, d)."""
    return math.comb(m - 1, d)


def cone_like_count(d: int, m: int) -> int:
    """Unbounded regions of a generic arrangement: 2 sum_{k<d} C(m - 1, k)."""
    if d < 1 or m < 1:
        raise ValueError("need d >= 1 and m >= 1")
    c = 2 * sum(math.comb(m - 1, k) for k in range(d))
    assert c + bounded_regions(d, m) == regions_max(d, m)
    return c


@dataclass(frozen=True)
class Lemma6Check:
    d: int
    m: int
    G: int
    holds_2m: Optional[bool]
    holds_polynomial: Optional[bool]

    @property
    def holds(self) -> bool:
        return self.holds_2m is not False and self.holds_polynomial is not False


def lemma6_check(d: int, m: int) -> Lemma6Check:
    """G(d, m) = 2^m when m <= d and G(d, m) <= m^d / (d - 1)! when m >= d (exact)."""
    _check_dim(d)
    if m < 1:
        raise ValueError("need m >= 1")
    G = regions_max(d, m)
    eq = G == 2**m if m <= d else None
    poly = Fraction(G) <= Fraction(m**d, math.factorial(d - 1)) if m >= d else None
    return Lemma6Check(d, m, G, eq, poly)


def facets_required(d: int, epsilon: float, C: float = 1.0) -> float:
    """Facets needed for relative volume error epsilon: (C d / epsilon)^((d - 1) / 2)."""
    _check_dim(d)
    _check_eps(epsilon)
    if C <= 0:
        raise ValueError("C must be positive")
    try:
        return (C * d / epsilon) ** ((d - 1) / 2)
    except OverflowError:
        warnings.warn(f"facet count overflows double precision at d={d}", RuntimeWarning, stacklevel=2)
        return math.inf


def shl_units_lower(d: int, epsilon: float, C: float = 1.0) -> tuple[float, float]:
    """(N_s, N_sp): units and parameters a one-hidden-layer net needs."""
    _check_dim(d)
    _check_eps(epsilon)
    if C <= 0:
        raise ValueError("C must be positive")
    n_s = math.sqrt(C * d / epsilon) * (d - 1) / math.e
    return n_s, (d + 1) * n_s


def error_bound(d: int, k: int) -> float:
    """Relative volume excess of the depth-k norm network polytope over the unit ball.

    ``d (d - 1) pi^2 / 2^(2k + 1)``; at d = 2 this is ``pi^2 / 2^(2k)``.
    """
    _check_dim(d)
    if k < 2:
        raise ValueError("k must be >= 2")
    if d == 2:
        return math.pi**2 / 2.0 ** (2 * k)
    return d * (d - 1) * math.pi**2 / 2.0 ** (2 * k + 1)


@dataclass(frozen=True)
class DeepNetSize:
    k_star: float
    k_ceil: int
    units: int
    depth: int
    bound: float


def deep_net_size(d: int, epsilon: float) -> DeepNetSize:
    """Depth parameter and size of the deep norm network reaching error epsilon."""
    _check_dim(d)
    _check_eps(epsilon)
    k_star = math.log2(d) + 0.5 * math.log2(1.0 / epsilon) - 0.5 + math.log2(math.pi)
    k = max(2, math.ceil(k_star))
    bound = error_bound(d, k)
    assert bound <= epsilon, (d, epsilon, k, bound)
    return DeepNetSize(k_star, k, (d - 1) * (3 * k - 1), k * (d - 1), bound)


def efficiency_ratio(d: int, epsilon: float, C: float = 1.0) -> float:
    """Approximate N_s / N_d: sqrt(C d / eps) / (e (3 log d + 1.5 log(1/eps)))."""
    _check_dim(d)
    _check_eps(epsilon)
    denom = math.e * (3 * math.log2(d) + 1.5 * math.log2(1.0 / epsilon))
    return math.sqrt(C * d / epsilon) / denom


def stirling_lower(d: int) -> float:
    """sqrt(2 pi) d^(d + 1/2) e^(-d), a lower bound on d!."""
    return math.sqrt(2 * math.pi) * d ** (d + 0.5) * math.exp(-d)


@dataclass(frozen=True)
class BoundsReport:
    d: int
    m: Optional[int]
    epsilon: Optional[float]
    constant_C: float
    G: Optional[int] = None
    C: Optional[int] = None
    bounded_cells: Optional[int] = None
    facets_required: Optional[float] = None
    N_s: Optional[float] = None
    N_sp: Optional[float] = None
    k_star: Optional[float] = None
    k_ceil: Optional[int] = None
    N_d: Optional[int] = None
    depth: Optional[int] = None
    error_bound: Optional[float] = None
    ratio: Optional[float] = None

    def as_dict(self) -> dict:
        return asdict(self)


def bounds_report(d: int, epsilon: Optional[float] = None, m: Optional[int] = None, C: float = 1.0) -> BoundsReport:
    """Every closed-form quantity that applies to the given (d, m, epsilon)."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    vals: dict = {}
    if m is not None:
        vals.update(G=regions_max(d, m), C=cone_like_count(d, m), bounded_cells=bounded_regions(d, m))
    if epsilon is not None:
        _check_dim(d)
        size = deep_net_size(d, epsilon)
        n_s, n_sp = shl_units_lower(d, epsilon, C)
        vals.update(
            facets_required=facets_required(d, epsilon, C),
            N_s=n_s,
            N_sp=n_sp,
            k_star=size.k_star,
            k_ceil=size.k_ceil,
            N_d=size.units,
            depth=size.depth,
            error_bound=size.bound,
            ratio=efficiency_ratio(d, epsilon, C),
        )
    return BoundsReport(d, m, epsilon, C, **vals)


REPORT_COLUMNS = [f.name for f in fields(BoundsReport)]


def _fmt(v, digits: int) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return format(v, f".{digits}g")
    return str(v)


def format_table(reports: list[BoundsReport]) -> str:
    """Aligned text table, one row per report, 6 significant digits."""
    rows = [REPORT_COLUMNS] + [[_fmt(getattr(r, c), 6) for c in REPORT_COLUMNS] for r in reports]
    keep = [i for i, c in enumerate(REPORT_COLUMNS) if any(row[i] for row in rows[1:])]
    widths = [max(len(row[i]) for row in rows) for i in keep]
    return "\n".join("  ".join(row[i].rjust(w) for i, w in zip(keep, widths)) for row in rows)


def format_csv(reports: list[BoundsReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(REPORT_COLUMNS)
    for r in reports:
        w.writerow([_fmt(getattr(r, c), 17) for c in REPORT_COLUMNS])
    return buf.getvalue()
