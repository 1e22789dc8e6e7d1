"""Deterministic polynomial-time solvers for the underlying problems.

These are the single-cost-vector solvers the aggregation-based
approximation and the branch-and-bound both build on: pick the q cheapest
elements (selection), minimum-cost perfect matching (assignment, Hungarian
method), or scan an explicit feasible list.  All of them accept a partial
fixing so branch-and-bound can reuse them unchanged at every node.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .model import Assignment, Explicit, FeasibilityError, ProblemKind, Selection, Solution

__all__ = [
    "PartialFixing",
    "NO_FIXING",
    "solve_selection",
    "solve_assignment",
    "solve_explicit",
    "solve_with_costs",
    "BaseSolver",
    "EXACT_BASE",
]


@dataclass(frozen=True)
class PartialFixing:
    """Elements forced into / out of the solution (disjoint index sets)."""

    forced_in: frozenset[int] = field(default_factory=frozenset)
    forced_out: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "forced_in", frozenset(self.forced_in))
        object.__setattr__(self, "forced_out", frozenset(self.forced_out))
        if self.forced_in & self.forced_out:
            raise ValueError("forced_in and forced_out must be disjoint")


NO_FIXING = PartialFixing()


def solve_selection(costs, q: int, fix: PartialFixing = NO_FIXING) -> tuple[Solution, float]:
    """q elements of minimum total cost; ties broken by ascending index."""
    c = np.asarray(costs, dtype=float)
    n = c.size
    if not 1 <= q <= n:
        raise FeasibilityError(f"selection size q={q} outside 1..{n}")
    if len(fix.forced_in) > q:
        raise FeasibilityError("more elements forced in than the selection size")
    free = [i for i in range(n) if i not in fix.forced_in and i not in fix.forced_out]
    need = q - len(fix.forced_in)
    if len(free) < need:
        raise FeasibilityError("not enough free elements to complete the selection")
    free.sort(key=lambda i: (c[i], i))
    chosen = sorted(fix.forced_in) + free[:need]
    sol = Solution(chosen)
    return sol, float(c[list(sol.chosen)].sum())


def _hungarian(cost: np.ndarray) -> list[int]:
    # O(m^3) shortest-augmenting-path form with row/column potentials.
    # Columns are scanned in ascending order with strict improvement, so
    # ties resolve to the lexicographically first matching by row.
    m = cost.shape[0]
    INF = float("inf")
    u = [0.0] * (m + 1)
    v = [0.0] * (m + 1)
    match = [0] * (m + 1)  # 1-based: match[j] = row assigned to column j
    way = [0] * (m + 1)
    for i in range(1, m + 1):
        match[0] = i
        j0 = 0
        minv = [INF] * (m + 1)
        used = [False] * (m + 1)
        while True:
            used[j0] = True
            i0 = match[j0]
            delta = INF
            j1 = -1
            row = cost[i0 - 1]
            for j in range(1, m + 1):
                if not used[j]:
                    cur = row[j - 1] - u[i0] - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                    if minv[j] < delta:
                        delta = minv[j]
                        j1 = j
            for j in range(m + 1):
                if used[j]:
                    u[match[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if match[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            match[j0] = match[j1]
            j0 = j1
    row_to_col = [0] * m
    for j in range(1, m + 1):
        row_to_col[match[j] - 1] = j - 1
    return row_to_col


def solve_assignment(cost_matrix, fix: PartialFixing = NO_FIXING) -> tuple[Solution, float]:
    """Minimum-cost perfect matching on an m-by-m matrix, Hungarian method.

    Fixed edges are handled by matrix reduction: forced-in rows/columns are
    removed, forced-out entries are replaced by a sentinel larger than any
    matching can cost.  Edge (row, col) is flat element row * m + col.
    """
    c = np.asarray(cost_matrix, dtype=float)
    if c.ndim != 2 or c.shape[0] != c.shape[1]:
        raise ValueError(f"cost matrix must be square, got shape {c.shape}")
    m = c.shape[0]

    if any(not 0 <= e < m * m for e in fix.forced_in | fix.forced_out):
        raise ValueError(f"fixed edge index outside 0..{m * m - 1}")
    in_pairs = sorted(divmod(e, m) for e in fix.forced_in)
    rows_used = {r for r, _ in in_pairs}
    cols_used = {col for _, col in in_pairs}
    if len(rows_used) != len(in_pairs) or len(cols_used) != len(in_pairs):
        raise FeasibilityError("forced-in edges are not a partial matching")

    free_rows = [r for r in range(m) if r not in rows_used]
    free_cols = [col for col in range(m) if col not in cols_used]
    row_pos = {r: i for i, r in enumerate(free_rows)}
    col_pos = {col: i for i, col in enumerate(free_cols)}
    chosen = list(fix.forced_in)
    if free_rows:
        sub = c[np.ix_(free_rows, free_cols)].copy()
        sentinel = sub.shape[0] * max(1.0, float(np.abs(c).max())) + 1.0
        blocked = np.zeros_like(sub, dtype=bool)
        for e in fix.forced_out:
            r, col = divmod(e, m)
            if r in row_pos and col in col_pos:
                blocked[row_pos[r], col_pos[col]] = True
        sub[blocked] = sentinel
        row_to_col = _hungarian(sub)
        for rr, cc in enumerate(row_to_col):
            if blocked[rr, cc]:
                raise FeasibilityError("fixing does not extend to a perfect matching")
            chosen.append(free_rows[rr] * m + free_cols[cc])
    sol = Solution(chosen)
    total = float(sum(c[divmod(e, m)] for e in sol.chosen))
    return sol, total


def solve_explicit(solutions, costs, fix: PartialFixing = NO_FIXING) -> tuple[Solution, float]:
    """Cheapest member of an explicit feasible list compatible with the fixing."""
    c = np.asarray(costs, dtype=float)
    best: Optional[tuple[float, tuple[int, ...]]] = None
    for sol in solutions:
        s = frozenset(sol)
        if not fix.forced_in <= s or fix.forced_out & s:
            continue
        total = float(c[list(sol)].sum()) if sol else 0.0
        if best is None or total < best[0]:
            best = (total, tuple(sorted(sol)))
    if best is None:
        raise FeasibilityError("no explicit solution is compatible with the fixing")
    return Solution(best[1]), best[0]


def solve_with_costs(kind: ProblemKind, costs, fix: PartialFixing = NO_FIXING) -> tuple[Solution, float]:
    """Dispatch on the problem kind; costs is always a flat n-vector."""
    c = np.asarray(costs, dtype=float)
    if isinstance(kind, Selection):
        return solve_selection(c, kind.q, fix)
    if isinstance(kind, Assignment):
        return solve_assignment(c.reshape(kind.m, kind.m), fix)
    if isinstance(kind, Explicit):
        return solve_explicit(kind.solutions, c, fix)
    raise ValueError(f"no base solver for problem kind {kind!r}")


@dataclass(frozen=True)
class BaseSolver:
    """A deterministic-problem solver together with its guarantee factor.

    gamma = 1 means the solver is exact; a gamma-approximate solver widens
    the a-priori WOWA ratio to gamma * v1 * K.
    """

    solve: Callable[..., tuple[Solution, float]]
    gamma: float = 1.0


EXACT_BASE = BaseSolver(solve=solve_with_costs, gamma=1.0)
