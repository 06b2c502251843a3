"""Hyperplane arrangements and the boundaries of one-hidden-layer rectifier nets.

Cells are enumerated incrementally: hyperplanes are inserted one at a time and
every existing cell that a new hyperplane crosses is split in two.  Crossing is
decided by a max-margin LP, so each cell carries an interior witness point.
"""

from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import lp
from .bounds import cone_like_count, regions_max
from .errors import DegenerateBoundaryError, NumericalError
from .geometry import DEFAULT_TOL, AffineUnit, as_units, stack_units

MAX_DIM = 6
MAX_PLANES = 20
BOX = 1e4
PLANE_MATCH_TOL = 1e-7


@dataclass(frozen=True, eq=False)
class Cell:
    """One full-dimensional region: signs of every hyperplane plus an interior point."""

    signs: tuple[int, ...]
    witness: np.ndarray
    margin: float
    bounded: Optional[bool] = None

    def __repr__(self):
        return f"Cell(signs={self.signs}, bounded={self.bounded}, margin={self.margin:.3g})"


def _normalized(units: Sequence[AffineUnit]) -> tuple[np.ndarray, np.ndarray]:
    W, b = stack_units(units)
    norms = np.linalg.norm(W, axis=1)
    if np.any(norms == 0):
        bad = int(np.flatnonzero(norms == 0)[0])
        raise ValueError(f"hyperplane {bad} has an all-zero normal")
    return W / norms[:, None], b / norms


def _check_scale(d: int, m: int) -> None:
    if not 1 <= d <= MAX_DIM:
        raise ValueError(f"dimension {d} outside supported range 1..{MAX_DIM}")
    if not 1 <= m <= MAX_PLANES:
        raise ValueError(f"{m} hyperplanes outside supported range 1..{MAX_PLANES}")


def _cell_witness(signs, Wn, bn, box):
    s = np.asarray(signs, dtype=float)
    return lp.max_margin_point(s[:, None] * Wn, s * bn, box=box)


def _is_bounded(signs, Wn, full_rank: bool, tol: float) -> bool:
    # a recession direction r has s_i w_i.r >= 0 for all i; with full-rank
    # normals any nonzero r makes the sum of those terms strictly positive
    if not full_rank:
        return False
    A = np.asarray(signs, dtype=float)[:, None] * Wn
    d = Wn.shape[1]
    res = lp.maximize(A.sum(axis=0), -A, np.zeros(len(A)), bounds=[(-1.0, 1.0)] * d)
    if not res.optimal:
        raise NumericalError(f"recession-cone LP returned {res.status}")
    return res.value <= tol


def enumerate_cells(
    hyperplanes,
    tol: float = DEFAULT_TOL,
    box: float = BOX,
    classify: bool = True,
) -> list[Cell]:
    """All nonempty open cells of the arrangement, each exactly once.

    Witnesses are deep interior points (max-margin within ``|x_j| <= box``).
    With ``classify`` each cell's ``bounded`` flag is filled in.
    """
    units = as_units(hyperplanes)
    if not units:
        raise ValueError("need at least one hyperplane")
    d, m = units[0].dim, len(units)
    _check_scale(d, m)
    if any(u.dim != d for u in units):
        raise ValueError("hyperplanes have mismatched dimensions")
    Wn, bn = _normalized(units)

    cells: list[tuple[tuple[int, ...], np.ndarray]] = [((), np.zeros(d))]
    for i in range(m):
        split = []
        for signs, wit in cells:
            h = float(Wn[i] @ wit + bn[i])
            sides = []
            for s in (1, -1):
                if s * h > tol:
                    sides.append((s, wit))
                    continue
                res = _cell_witness(signs + (s,), Wn[: i + 1], bn[: i + 1], box)
                if res.optimal and res.value > tol:
                    sides.append((s, res.x))
            if not sides:
                raise NumericalError(f"cell {signs} vanished when inserting hyperplane {i}")
            split.extend((signs + (s,), w) for s, w in sides)
        cells = split

    full_rank = np.linalg.matrix_rank(Wn) == d
    out = []
    for signs, _ in cells:
        res = _cell_witness(signs, Wn, bn, box)
        if not res.optimal:
            raise NumericalError(f"witness LP for cell {signs} returned {res.status}")
        bounded = _is_bounded(signs, Wn, full_rank, tol) if classify else None
        out.append(Cell(signs, res.x, res.value, bounded))
    return out


def classify_cells(cells: Sequence[Cell], hyperplanes, tol: float = DEFAULT_TOL) -> tuple[int, int]:
    """``(bounded_count, unbounded_count)`` for cells of the given arrangement."""
    units = as_units(hyperplanes)
    Wn, _ = _normalized(units)
    full_rank = np.linalg.matrix_rank(Wn) == Wn.shape[1]
    bounded = 0
    for c in cells:
        flag = c.bounded
        if flag is None:
            flag = _is_bounded(c.signs, Wn, full_rank, tol)
        bounded += bool(flag)
    return bounded, len(cells) - bounded


def is_general_position(hyperplanes, tol: float = DEFAULT_TOL) -> bool:
    """Any ``k <= d`` normals independent and no ``d + 1`` hyperplanes share a point."""
    units = as_units(hyperplanes)
    d, m = units[0].dim, len(units)
    try:
        Wn, bn = _normalized(units)
    except ValueError:
        return False

    def full_rank(M):
        return np.linalg.svd(M, compute_uv=False).min() > tol

    if m <= d:
        return bool(full_rank(Wn))
    # independence of every d-subset implies it for smaller subsets
    for S in itertools.combinations(range(m), d):
        if not full_rank(Wn[list(S)]):
            return False
    aug = np.hstack([Wn, bn[:, None]])
    for S in itertools.combinations(range(m), d + 1):
        if not full_rank(aug[list(S)]):
            return False
    return True


def vertices(hyperplanes) -> np.ndarray:
    """Intersection points of every ``d`` hyperplanes with independent normals."""
    units = as_units(hyperplanes)
    W, b = stack_units(units)
    d = W.shape[1]
    pts = []
    for S in itertools.combinations(range(len(units)), d):
        S = list(S)
        try:
            pts.append(np.linalg.solve(W[S], -b[S]))
        except np.linalg.LinAlgError:
            continue
    return np.array(pts).reshape(-1, d)


def random_hyperplanes(d: int, m: int, rng: np.random.Generator) -> list[AffineUnit]:
    """Unit normals uniform on the sphere, offsets uniform in [-1, 1]."""
    W = rng.standard_normal((m, d))
    W /= np.linalg.norm(W, axis=1, keepdims=True)
    b = rng.uniform(-1.0, 1.0, m)
    return [AffineUnit(w, bi) for w, bi in zip(W, b)]


def sample_generic_hyperplanes(d: int, m: int, rng, max_tries: int = 100, tol: float = DEFAULT_TOL):
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    for _ in range(max_tries):
        H = random_hyperplanes(d, m, rng)
        if is_general_position(H, tol):
            return H
    raise NumericalError(f"no generic arrangement of {m} hyperplanes in R^{d} after {max_tries} draws")


@dataclass(frozen=True, eq=False)
class ShlNetwork:
    """``f(x) = a . max(0, W x + b) + c`` with one hidden rectifier layer."""

    units: tuple[AffineUnit, ...]
    a: np.ndarray
    c: float = 0.0

    def __post_init__(self):
        units = tuple(as_units(self.units))
        a = np.array(self.a, dtype=float).reshape(-1)
        if not units:
            raise ValueError("network needs at least one hidden unit")
        if len(a) != len(units):
            raise ValueError(f"{len(units)} hidden units but {len(a)} output weights")
        if len({u.dim for u in units}) != 1:
            raise ValueError("hidden units have mismatched dimensions")
        if not (np.all(np.isfinite(a)) and math.isfinite(self.c)):
            raise ValueError("output weights must be finite")
        a.flags.writeable = False
        object.__setattr__(self, "units", units)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "c", float(self.c))

    @property
    def dim(self) -> int:
        return self.units[0].dim

    @property
    def m(self) -> int:
        return len(self.units)

    def __call__(self, x):
        W, b = stack_units(self.units)
        x = np.asarray(x, dtype=float)
        return np.maximum(0.0, x @ W.T + b) @ self.a + self.c


def _canonical(v: np.ndarray, tol: float = 1e-12) -> tuple[np.ndarray, int]:
    """Flip sign so the first non-negligible normal entry is positive."""
    nz = np.flatnonzero(np.abs(v[:-1]) > tol)
    s = 1 if v[nz[0]] > 0 else -1
    return s * v, s


@dataclass
class _Piece:
    plane: np.ndarray  # canonical (g, h) of the zero hyperplane
    on: frozenset  # arrangement planes the piece lies in
    signs: dict = field(default_factory=dict)  # strict signs of the remaining planes
    box: float = BOX


@dataclass(frozen=True)
class Facet:
    plane: np.ndarray
    pieces: int


def boundary_facets(net: ShlNetwork, tol: float = DEFAULT_TOL, box: float = BOX) -> list[Facet]:
    """Maximal flat pieces of ``{x : f(x) = 0}``.

    Inside each cell of the hidden-layer arrangement ``f`` is affine; its zero
    set gives at most one piece per cell.  Coplanar pieces of adjacent cells
    that meet in a codimension-2 interface are merged into one facet.
    """
    d = net.dim
    # distinct geometric hyperplanes; units on the same plane share a cell sign
    planes: list[np.ndarray] = []
    plane_of, orient = [], []
    const = net.c
    for i, u in enumerate(net.units):
        if u.degenerate:
            const += net.a[i] * max(0.0, u.b)
            plane_of.append(None)
            orient.append(0)
            continue
        w, b = u.normalized()
        v, s = _canonical(np.append(w, b))
        for j, p in enumerate(planes):
            if np.max(np.abs(p - v)) <= tol:
                plane_of.append(j)
                break
        else:
            planes.append(v)
            plane_of.append(len(planes) - 1)
        orient.append(s)

    W, bb = stack_units(net.units)
    if not planes:
        if abs(const) <= tol:
            raise DegenerateBoundaryError("degenerate boundary: f vanishes identically")
        return []
    P = np.array(planes)
    Pw, Pb = P[:, :-1], P[:, -1]
    cells = enumerate_cells([AffineUnit(p[:-1], p[-1]) for p in planes], tol, box, classify=False)

    pieces: dict = {}
    for cell in cells:
        active = np.array(
            [pj is not None and orient[i] * cell.signs[pj] > 0 for i, pj in enumerate(plane_of)]
        )
        g = net.a[active] @ W[active] if active.any() else np.zeros(d)
        h = const + (net.a[active] @ bb[active] if active.any() else 0.0)
        gn = float(np.linalg.norm(g))
        if gn <= tol:
            if abs(h) <= tol:
                raise DegenerateBoundaryError(
                    f"degenerate boundary: f vanishes on the cell with signs {cell.signs}"
                )
            continue
        zero, _ = _canonical(np.append(g, h) / gn)
        signs = dict(enumerate(cell.signs))
        wall = next(
            (j for j in range(len(planes)) if np.max(np.abs(P[j] - zero)) <= PLANE_MATCH_TOL),
            None,
        )
        if wall is not None:
            # zero set coincides with an arrangement plane: the piece is a wall
            del signs[wall]
            key = ("wall", wall, tuple(sorted(signs.items())))
            piece = _Piece(zero, frozenset([wall]), signs)
        else:
            key = ("cell", cell.signs)
            piece = _Piece(zero, frozenset(), signs)
        if key in pieces:
            continue
        piece.box = max(box, 2.0 * _reach(zero, Pw, Pb) + 1.0)
        if _piece_margin(piece, Pw, Pb, piece.box) > tol:
            pieces[key] = piece

    items = list(pieces.values())
    parent = list(range(len(items)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    if d >= 2:
        for i, j in itertools.combinations(range(len(items)), 2):
            p, q = items[i], items[j]
            if p.on != q.on or np.max(np.abs(p.plane - q.plane)) > PLANE_MATCH_TOL:
                continue
            diff = [k for k in p.signs if p.signs[k] != q.signs.get(k)]
            if len(diff) != 1:
                continue
            k = diff[0]
            iface = _Piece(p.plane, p.on | {k}, {j2: s for j2, s in p.signs.items() if j2 != k}, max(p.box, q.box))
            if _piece_margin(iface, Pw, Pb, iface.box) > tol:
                parent[find(i)] = find(j)

    groups: dict[int, list[int]] = {}
    for i in range(len(items)):
        groups.setdefault(find(i), []).append(i)
    return [Facet(items[g[0]].plane, len(g)) for g in groups.values()]


def _reach(zero: np.ndarray, Pw: np.ndarray, Pb: np.ndarray) -> float:
    """Radius holding a point of every face of the zero plane cut by the arrangement.

    Each minimal face of a piece is the zero plane intersected with some of the
    arrangement planes; its least-norm point is one of the points tried here.
    """
    d = Pw.shape[1]
    best = 0.0
    for r in range(d):
        for S in itertools.combinations(range(len(Pw)), r):
            A = np.vstack([zero[:-1], Pw[list(S)]])
            rhs = -np.append(zero[-1], Pb[list(S)])
            x, *_ = np.linalg.lstsq(A, rhs, rcond=None)
            if np.allclose(A @ x, rhs, atol=1e-9):
                best = max(best, float(np.abs(x).max()))
    return best


def _piece_margin(piece: _Piece, Pw, Pb, box) -> float:
    eq_rows = [piece.plane[:-1]] + [Pw[j] for j in sorted(piece.on)]
    eq_rhs = [-piece.plane[-1]] + [-Pb[j] for j in sorted(piece.on)]
    idx = sorted(piece.signs)
    s = np.array([piece.signs[j] for j in idx], dtype=float)
    A = s[:, None] * Pw[idx] if idx else np.zeros((0, Pw.shape[1]))
    b = s * Pb[idx] if idx else np.zeros(0)
    if not idx:
        # unconstrained besides the equalities: any point will do
        return math.inf if lp.maximize(np.zeros(Pw.shape[1]), A_eq=eq_rows, b_eq=eq_rhs).optimal else -math.inf
    res = lp.max_margin_point(A, b, A_eq=np.array(eq_rows), b_eq=np.array(eq_rhs), box=box)
    return res.value if res.optimal else -math.inf


def count_boundary_facets(net: ShlNetwork, tol: float = DEFAULT_TOL) -> int:
    return len(boundary_facets(net, tol))


@dataclass(frozen=True)
class Theorem5Report:
    d: int
    m: int
    seed: int
    facets: int
    lower: int
    upper: int

    @property
    def passed(self) -> bool:
        return self.lower <= self.facets <= self.upper


def theorem5_witness(hyperplanes) -> ShlNetwork:
    """Positive output weights and an offset making ``f`` negative on every bounded cell."""
    units = as_units(hyperplanes)
    W, b = stack_units(units)
    a = np.ones(len(units))
    V = vertices(units)
    top = float((np.maximum(0.0, V @ W.T + b) @ a).max()) if len(V) else 0.0
    return ShlNetwork(tuple(units), a, -top - 1.0)


def theorem5_experiment(d: int, m: int, seed: int, tol: float = DEFAULT_TOL) -> Theorem5Report:
    """Facet count of the generic witness net against ``[C(d,m) - 1, G(d,m)]``."""
    _check_scale(d, m)
    H = sample_generic_hyperplanes(d, m, np.random.default_rng(seed), tol=tol)
    net = theorem5_witness(H)
    return Theorem5Report(
        d, m, seed, count_boundary_facets(net, tol), cone_like_count(d, m) - 1, regions_max(d, m)
    )


def write_cells_csv(cells: Sequence[Cell], path_or_file) -> None:
    """Cells as CSV: sign columns ``s1..sm``, witness columns ``x1..xd``, ``bounded``."""
    if not cells:
        raise ValueError("no cells to write")
    m, d = len(cells[0].signs), len(cells[0].witness)
    header = [f"s{i + 1}" for i in range(m)] + [f"x{j + 1}" for j in range(d)] + ["bounded"]

    def emit(fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for c in cells:
            flag = "" if c.bounded is None else int(c.bounded)
            w.writerow(list(c.signs) + [format(v, ".17g") for v in c.witness] + [flag])

    if hasattr(path_or_file, "write"):
        emit(path_or_file)
    else:
        with open(Path(path_or_file), "w", encoding="utf-8", newline="") as fh:
            emit(fh)


def read_cells_csv(path) -> list[Cell]:
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    m = sum(h.startswith("s") for h in header)
    out = []
    for r in body:
        signs = tuple(int(v) for v in r[:m])
        x = np.array([float(v) for v in r[m:-1]])
        bounded = None if r[-1] == "" else bool(int(r[-1]))
        out.append(Cell(signs, x, float("nan"), bounded))
    return out
