"""Affine units, maxout classifiers and redundancy removal.

A convex piecewise-linear classifier is written as ``f(x) = max_i w_i.x + b_i``;
its negative set ``{x : f(x) <= 0}`` is the polytope cut out by the halfspaces
``w_i.x + b_i <= 0``.
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Literal, Sequence

import numpy as np

from . import lp
from .errors import EmptyPolytopeWarning, NearDuplicateWarning

Side = Literal["negative", "boundary", "positive"]

DEFAULT_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class AffineUnit:
    """One linear unit ``x -> w.x + b``; its zero set is a hyperplane."""

    w: np.ndarray
    b: float = 0.0

    def __post_init__(self):
        w = np.array(self.w, dtype=float).reshape(-1)
        if w.size < 1:
            raise ValueError("weight vector must have at least one entry")
        b = float(self.b)
        if not (np.all(np.isfinite(w)) and math.isfinite(b)):
            raise ValueError("affine unit entries must be finite")
        w.flags.writeable = False
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "b", b)

    @property
    def dim(self) -> int:
        return self.w.size

    @property
    def degenerate(self) -> bool:
        return not np.any(self.w)

    def __call__(self, x) -> float:
        return float(self.w @ np.asarray(x, dtype=float) + self.b)

    def normalized(self) -> tuple[np.ndarray, float]:
        """``(w, b) / ||w||``; raises for a degenerate unit."""
        n = float(np.linalg.norm(self.w))
        if n == 0.0:
            raise ValueError("degenerate unit (w = 0) has no normal direction")
        return self.w / n, self.b / n

    def __repr__(self):
        return f"AffineUnit(w={self.w.tolist()}, b={self.b!r})"


def stack_units(units: Sequence[AffineUnit]) -> tuple[np.ndarray, np.ndarray]:
    W = np.array([u.w for u in units], dtype=float)
    b = np.array([u.b for u in units], dtype=float)
    return W, b


def as_units(rows: Iterable) -> list[AffineUnit]:
    """Accept AffineUnits or raw ``(w_1, ..., w_d, b)`` rows."""
    out = []
    for r in rows:
        if isinstance(r, AffineUnit):
            out.append(r)
        else:
            r = np.asarray(r, dtype=float).reshape(-1)
            out.append(AffineUnit(r[:-1], r[-1]))
    return out


class MaxoutClassifier:
    """``f(x) = max_i (w_i.x + b_i)`` over an ordered list of units."""

    def __init__(self, units: Sequence[AffineUnit]):
        units = tuple(as_units(units))
        if not units:
            raise ValueError("a maxout classifier needs at least one unit")
        dims = {u.dim for u in units}
        if len(dims) != 1:
            raise ValueError(f"units have mismatched dimensions {sorted(dims)}")
        self._units = units
        self._W, self._b = stack_units(units)
        self._W.flags.writeable = False
        self._b.flags.writeable = False

    @property
    def units(self) -> tuple[AffineUnit, ...]:
        return self._units

    @property
    def dim(self) -> int:
        return self._W.shape[1]

    @property
    def m(self) -> int:
        return len(self._units)

    @property
    def W(self) -> np.ndarray:
        return self._W

    @property
    def b(self) -> np.ndarray:
        return self._b

    def __len__(self):
        return self.m

    def without(self, indices: Iterable[int]) -> "MaxoutClassifier":
        drop = set(indices)
        return MaxoutClassifier([u for i, u in enumerate(self._units) if i not in drop])

    def __call__(self, x):
        return eval_maxout(self, x)

    def __repr__(self):
        return f"MaxoutClassifier(m={self.m}, dim={self.dim})"


def _check_point(clf: MaxoutClassifier, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != clf.dim:
        raise ValueError(f"expected points of dimension {clf.dim}, got {x.shape[-1]}")
    if not np.all(np.isfinite(x)):
        raise ValueError("input contains non-finite values")
    return x


def eval_maxout(clf: MaxoutClassifier, x, return_index: bool = False):
    """Evaluate the classifier at ``x`` (a point or an ``(n, d)`` batch).

    With ``return_index`` also returns the index of the achieving unit; ties
    go to the lowest index.
    """
    x = _check_point(clf, x)
    z = x @ clf.W.T + clf.b
    k = np.argmax(z, axis=-1)
    val = np.take_along_axis(z, np.expand_dims(k, -1), -1)[..., 0]
    if x.ndim == 1:
        val, k = float(val), int(k)
    if return_index:
        return val, k
    return val


def boundary_sign_probe(clf: MaxoutClassifier, x, tol: float = DEFAULT_TOL) -> Side:
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    v = eval_maxout(clf, x)
    if v > tol:
        return "positive"
    if v < -tol:
        return "negative"
    return "boundary"


def _warn_near_duplicates(clf: MaxoutClassifier, tol: float) -> None:
    rows = []
    for i, u in enumerate(clf.units):
        if not u.degenerate:
            w, b = u.normalized()
            rows.append((i, np.append(w, b), u))
    for a in range(len(rows)):
        for c in range(a + 1, len(rows)):
            i, ri, ui = rows[a]
            j, rj, uj = rows[c]
            if np.max(np.abs(ri - rj)) <= tol and not (
                np.array_equal(ui.w, uj.w) and ui.b == uj.b
            ):
                warnings.warn(
                    f"units {i} and {j} are near-duplicates; treating them as equal",
                    NearDuplicateWarning,
                    stacklevel=3,
                )


def _is_redundant(units: list[AffineUnit], k: int, others: list[int], tol: float) -> bool:
    uk = units[k]
    live = [units[j] for j in others if not units[j].degenerate]
    # a constant-positive unit among the others makes the set empty
    if any(units[j].degenerate and units[j].b > 0 for j in others):
        return True
    if uk.degenerate:
        objective, offset = np.zeros(uk.dim), uk.b
    else:
        objective, offset = uk.normalized()
    if not live:
        # unconstrained: bounded above only for a constant unit
        return bool(uk.degenerate and offset <= tol)
    rows = [u.normalized() for u in live]
    A = np.array([r[0] for r in rows])
    bb = np.array([-r[1] for r in rows])
    res = lp.maximize(objective, A, bb)
    if res.status == "unbounded":
        return False
    if res.status == "infeasible":
        return True
    return res.value + offset <= tol


def redundant_units(clf: MaxoutClassifier, tol: float = DEFAULT_TOL) -> set[int]:
    """Indices of units whose removal leaves ``{x : f(x) <= 0}`` unchanged.

    A unit is redundant when the intersection of the remaining halfspaces
    already lies inside its own halfspace.  Units are examined from the last
    index down and removed as they are found, so of a group of duplicates the
    lowest index survives and the reported set can be removed all at once.
    """
    if clf.m < 2:
        raise ValueError("redundancy needs at least two units")
    _warn_near_duplicates(clf, tol)
    units = list(clf.units)
    if any(u.degenerate and u.b > 0 for u in units):
        warnings.warn(
            "a constant positive unit makes f > 0 everywhere; the negative set is empty",
            EmptyPolytopeWarning,
            stacklevel=2,
        )
    alive = list(range(clf.m))
    removed: set[int] = set()
    for k in reversed(range(clf.m)):
        others = [j for j in alive if j != k]
        if _is_redundant(units, k, others, tol):
            removed.add(k)
            alive.remove(k)
    return removed


def irreducible(clf: MaxoutClassifier, tol: float = DEFAULT_TOL) -> MaxoutClassifier:
    if clf.m < 2:
        return clf
    return clf.without(redundant_units(clf, tol))


def _parse_rows(text: str, source: str = "<csv>") -> list[list[float]]:
    rows = []
    width = None
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not row or not "".join(row).strip() or row[0].lstrip().startswith("#"):
            continue
        try:
            vals = [float(v) for v in row]
        except ValueError as exc:
            raise ValueError(f"{source}: row {lineno}: {exc}") from None
        if width is None:
            width = len(vals)
        elif len(vals) != width:
            raise ValueError(f"{source}: row {lineno}: expected {width} columns, got {len(vals)}")
        if len(vals) < 2:
            raise ValueError(f"{source}: row {lineno}: need at least one weight and a bias")
        if not all(math.isfinite(v) for v in vals):
            raise ValueError(f"{source}: row {lineno}: non-finite value")
        rows.append(vals)
    return rows


def load_units_csv(path) -> list[AffineUnit]:
    """Read units from CSV: ``w_1, ..., w_d, b`` per row, ``#`` lines ignored."""
    path = Path(path)
    rows = _parse_rows(path.read_text(encoding="utf-8"), str(path))
    if not rows:
        raise ValueError(f"{path}: no units found")
    return as_units(rows)


def save_units_csv(units: Sequence[AffineUnit], path) -> None:
    units = as_units(units)
    d = units[0].dim
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("# " + ",".join([f"w{i + 1}" for i in range(d)] + ["b"]) + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        for u in units:
            writer.writerow([format(v, ".17g") for v in u.w] + [format(u.b, ".17g")])
