"""Small dense linear programs.

Thin wrapper over HiGHS (via :func:`scipy.optimize.linprog`) that reduces the
solver outcome to one of three statuses and raises on anything else.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Optional, Sequence

import numpy as np
from scipy.optimize import linprog

from .errors import NumericalError

Status = Literal["optimal", "unbounded", "infeasible"]

_STATUS = {0: "optimal", 2: "infeasible", 3: "unbounded"}


@dataclass(frozen=True, eq=False)
class LPResult:
    status: Status
    x: Optional[np.ndarray] = None
    value: float = float("nan")

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


def maximize(
    c,
    A_ub=None,
    b_ub=None,
    A_eq=None,
    b_eq=None,
    bounds: Sequence[tuple[Optional[float], Optional[float]]] | None = None,
) -> LPResult:
    """Maximize ``c @ x`` subject to ``A_ub x <= b_ub`` and ``A_eq x = b_eq``.

    Variables are free unless ``bounds`` says otherwise.
    """
    c = np.asarray(c, dtype=float)
    n = c.size
    if bounds is None:
        bounds = [(None, None)] * n
    kwargs = {}
    if A_ub is not None and len(A_ub):
        kwargs["A_ub"] = np.asarray(A_ub, dtype=float).reshape(-1, n)
        kwargs["b_ub"] = np.asarray(b_ub, dtype=float).reshape(-1)
    if A_eq is not None and len(A_eq):
        kwargs["A_eq"] = np.asarray(A_eq, dtype=float).reshape(-1, n)
        kwargs["b_eq"] = np.asarray(b_eq, dtype=float).reshape(-1)
    res = linprog(-c, bounds=list(bounds), method="highs", **kwargs)
    status = _STATUS.get(res.status)
    if status is None:
        raise NumericalError(f"LP solver failed: {res.message}")
    if status != "optimal":
        return LPResult(status)
    return LPResult("optimal", np.asarray(res.x, dtype=float), float(-res.fun))


def max_margin_point(
    A,
    b,
    *,
    A_eq=None,
    b_eq=None,
    box: float = 1e4,
    cap: float = 1.0,
) -> LPResult:
    """Deepest point of ``{x : A x + b >= t}`` inside the box ``|x_j| <= box``.

    Rows of ``A`` should be unit-norm so that ``t`` is a Euclidean margin.
    Solves over ``(x, t)`` with ``t <= cap``; the returned ``value`` is the
    margin and ``x`` the point (without ``t``).  With no rows, returns the
    origin with margin ``cap``.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float).reshape(-1)
    d = A.shape[1]
    # -A x + t <= b
    A_ub = np.hstack([-A, np.ones((A.shape[0], 1))])
    eq = None
    if A_eq is not None and len(A_eq):
        A_eq = np.asarray(A_eq, dtype=float).reshape(-1, d)
        eq = np.hstack([A_eq, np.zeros((A_eq.shape[0], 1))])
    c = np.zeros(d + 1)
    c[-1] = 1.0
    bounds = [(-box, box)] * d + [(None, cap)]
    res = maximize(c, A_ub, b, eq, b_eq, bounds)
    if not res.optimal:
        return res
    return LPResult("optimal", res.x[:d], res.value)
