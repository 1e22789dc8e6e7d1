"""Scenario instances, feasible solutions, and their WOWA evaluation.

An instance is a set of n elements, a K-by-n matrix of nonnegative element
costs (one row per scenario), scenario probabilities, importance weights,
and a problem kind describing the feasible set.  Solutions are immutable
sets of chosen element indices (0-based everywhere, including on disk).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .aggregation import ProbabilityVector, SUM_TOL, WeightVector, rank_weights, wowa_batch

__all__ = [
    "FORMAT_VERSION",
    "FeasibilityError",
    "InstanceFormatError",
    "Selection",
    "Assignment",
    "Explicit",
    "ProblemKind",
    "Solution",
    "ScenarioInstance",
    "check_feasible",
    "is_feasible",
    "scenario_cost",
    "scenario_costs",
    "wowa_value",
    "solution_rank_weights",
    "validate",
    "remove_zero_scenarios",
    "read_instance",
    "write_instance",
    "read_solution",
    "write_solution",
]

FORMAT_VERSION = 1


class FeasibilityError(ValueError):
    """A solution (or partial fixing) violates the feasible-set structure."""


class InstanceFormatError(ValueError):
    """An instance or solution document cannot be parsed."""


@dataclass(frozen=True)
class Selection:
    """Choose exactly q of the n elements."""

    q: int


@dataclass(frozen=True)
class Assignment:
    """Perfect matchings in a complete m-by-m bipartite graph.

    Edge (row, col) maps to flat element index row * m + col.
    """

    m: int


@dataclass(frozen=True)
class Explicit:
    """Feasible set given as an explicit list of element subsets."""

    solutions: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        normalized = tuple(tuple(sorted(int(i) for i in s)) for s in self.solutions)
        object.__setattr__(self, "solutions", normalized)


ProblemKind = Union[Selection, Assignment, Explicit]


@dataclass(frozen=True, init=False)
class Solution:
    """A feasible solution: the sorted set of chosen element indices."""

    chosen: tuple[int, ...]

    def __init__(self, chosen: Sequence[int]):
        idx = tuple(sorted(int(i) for i in chosen))
        if len(set(idx)) != len(idx):
            raise ValueError("duplicate element indices in solution")
        object.__setattr__(self, "chosen", idx)

    def __len__(self) -> int:
        return len(self.chosen)

    def as_pairs(self, m: int) -> tuple[tuple[int, int], ...]:
        """Decode chosen flat indices as (row, col) assignment edges."""
        return tuple(divmod(i, m) for i in self.chosen)


class ScenarioInstance:
    """Immutable problem instance.

    Construction validates every structural invariant and raises unless
    ``checked=False``, in which case the raw data is stored as given and
    :func:`validate` collects the violations as a report.  The ``p`` and
    ``v`` vector objects are built lazily (and will raise on invalid data).
    """

    def __init__(self, costs, p, v, kind: ProblemKind, checked: bool = True):
        costs = np.array(costs, dtype=float)
        if costs.ndim != 2:
            raise InstanceFormatError("costs must be a K-by-n matrix")
        self.costs = costs
        self.costs.flags.writeable = False
        self.K, self.n = costs.shape
        self.p_raw = tuple(p.values) if isinstance(p, ProbabilityVector) else tuple(
            float(x) for x in p
        )
        self.v_raw = tuple(v.values) if isinstance(v, WeightVector) else tuple(
            float(x) for x in v
        )
        self.kind = kind
        self._p: ProbabilityVector | None = p if isinstance(p, ProbabilityVector) else None
        self._v: WeightVector | None = v if isinstance(v, WeightVector) else None
        if checked:
            problems = validate(self)
            if problems:
                raise InstanceFormatError("; ".join(problems))
            self._p = self._p or ProbabilityVector(self.p_raw)
            self._v = self._v or WeightVector(self.v_raw)
            # raw mirrors the normalized values so equality and round-trips
            # are exact for valid instances
            self.p_raw = tuple(self._p.values)
            self.v_raw = tuple(self._v.values)

    @property
    def p(self) -> ProbabilityVector:
        if self._p is None:
            self._p = ProbabilityVector(self.p_raw)
        return self._p

    @property
    def v(self) -> WeightVector:
        if self._v is None:
            self._v = WeightVector(self.v_raw)
        return self._v

    def __eq__(self, other) -> bool:
        if not isinstance(other, ScenarioInstance):
            return NotImplemented
        return (
            self.kind == other.kind
            and self.p_raw == other.p_raw
            and self.v_raw == other.v_raw
            and self.costs.shape == other.costs.shape
            and bool(np.all(self.costs == other.costs))
        )

    def __repr__(self) -> str:
        return f"ScenarioInstance(n={self.n}, K={self.K}, kind={self.kind!r})"


def validate(inst: ScenarioInstance) -> list[str]:
    """Collect invariant violations; empty list means the instance is sound."""
    problems: list[str] = []
    if inst.n < 1:
        problems.append("n: need at least one element")
    if inst.K < 1:
        problems.append("K: need at least one scenario")
    if np.any(inst.costs < 0.0):
        problems.append("costs: negative entries are not allowed")
    if not np.all(np.isfinite(inst.costs)):
        problems.append("costs: non-finite entries")
    if len(inst.p_raw) != inst.K:
        problems.append(f"p: has {len(inst.p_raw)} entries, expected K={inst.K}")
    if any(x <= 0.0 for x in inst.p_raw):
        problems.append("p: probabilities must be strictly positive")
    elif abs(sum(inst.p_raw) - 1.0) > SUM_TOL:
        problems.append(f"p: must sum to 1, got {sum(inst.p_raw)!r}")
    if len(inst.v_raw) != inst.K:
        problems.append(f"v: has {len(inst.v_raw)} entries, expected K={inst.K}")
    if any(not 0.0 <= x <= 1.0 + SUM_TOL for x in inst.v_raw):
        problems.append("v: components must lie in [0, 1]")
    elif abs(sum(inst.v_raw) - 1.0) > SUM_TOL:
        problems.append(f"v: must sum to 1, got {sum(inst.v_raw)!r}")
    kind = inst.kind
    if isinstance(kind, Selection):
        if not 1 <= kind.q <= inst.n:
            problems.append(f"kind: selection size q={kind.q} outside 1..{inst.n}")
    elif isinstance(kind, Assignment):
        if kind.m < 1 or kind.m * kind.m != inst.n:
            problems.append(f"kind: assignment needs n = m^2, got n={inst.n}, m={kind.m}")
    elif isinstance(kind, Explicit):
        if not kind.solutions:
            problems.append("kind: explicit feasible set is empty")
        for s, sol in enumerate(kind.solutions):
            if any(not 0 <= i < inst.n for i in sol):
                problems.append(f"kind: explicit solution {s} has out-of-range elements")
    else:
        problems.append(f"kind: unknown problem kind {kind!r}")
    return problems


def check_feasible(inst: ScenarioInstance, sol: Solution) -> None:
    """Raise FeasibilityError unless sol is feasible for inst.kind."""
    if sol.chosen and (sol.chosen[0] < 0 or sol.chosen[-1] >= inst.n):
        raise FeasibilityError(f"element indices outside 0..{inst.n - 1}")
    kind = inst.kind
    if isinstance(kind, Selection):
        if len(sol) != kind.q:
            raise FeasibilityError(f"selection needs exactly q={kind.q} elements, got {len(sol)}")
    elif isinstance(kind, Assignment):
        pairs = sol.as_pairs(kind.m)
        rows = {r for r, _ in pairs}
        cols = {c for _, c in pairs}
        if len(pairs) != kind.m or len(rows) != kind.m or len(cols) != kind.m:
            raise FeasibilityError("assignment solution is not a perfect matching")
    elif isinstance(kind, Explicit):
        if sol.chosen not in kind.solutions:
            raise FeasibilityError("solution is not in the explicit feasible set")
    else:
        raise FeasibilityError(f"unknown problem kind {kind!r}")


def is_feasible(inst: ScenarioInstance, sol: Solution) -> bool:
    try:
        check_feasible(inst, sol)
    except FeasibilityError:
        return False
    return True


def scenario_costs(inst: ScenarioInstance, sol: Solution, check: bool = True) -> np.ndarray:
    """All K per-scenario costs of sol as a vector."""
    if check:
        check_feasible(inst, sol)
    if not sol.chosen:
        return np.zeros(inst.K)
    return inst.costs[:, list(sol.chosen)].sum(axis=1)


def scenario_cost(inst: ScenarioInstance, sol: Solution, j: int, check: bool = True) -> float:
    """Cost of sol under scenario j (0-based)."""
    if not 0 <= j < inst.K:
        raise ValueError(f"scenario index {j} outside 0..{inst.K - 1}")
    return float(scenario_costs(inst, sol, check=check)[j])


def wowa_value(inst: ScenarioInstance, sol: Solution, check: bool = True) -> float:
    """WOWA of the K-vector of scenario costs of sol."""
    a = scenario_costs(inst, sol, check=check)
    return float(wowa_batch(a.reshape(-1, 1), inst.v, inst.p)[0])


def solution_rank_weights(inst: ScenarioInstance, sol: Solution, check: bool = True):
    """Rank weights induced by sol: scenarios sorted by its costs, nonincreasing."""
    a = scenario_costs(inst, sol, check=check)
    sigma = tuple(np.argsort(-a, kind="stable").tolist())
    return rank_weights(inst.v, inst.p, sigma)


def remove_zero_scenarios(p, costs):
    """Drop zero-probability scenarios from raw data and renormalize.

    Operates on raw arrays, before importance weights are attached: the
    weights are rank-indexed, so they must be chosen for the reduced
    scenario count.  Returns (p', costs') with the zero rows removed.
    """
    p = np.asarray(p, dtype=float)
    costs = np.asarray(costs, dtype=float)
    if p.ndim != 1 or costs.ndim != 2 or costs.shape[0] != p.size:
        raise ValueError("need a K-vector p and a K-by-n cost matrix")
    if np.any(p < 0.0):
        raise ValueError("probabilities must be nonnegative")
    keep = p > 0.0
    if not np.any(keep):
        raise ValueError("all scenarios have zero probability")
    p = p[keep]
    return p / p.sum(), costs[keep]


# ---------------------------------------------------------------------------
# On-disk formats (format version 1)
#
# Instance: JSON object with fields format, n, K, kind, p, v, costs, where
# kind is {"selection": {"q": int}}, {"assignment": {"m": int}} or
# {"explicit": {"solutions": [[int, ...], ...]}}.
# Solution: JSON object {"format": 1, "chosen": [int, ...]} with 0-based
# element indices.
# ---------------------------------------------------------------------------


def _require(doc: dict, field: str, where: str = "instance"):
    if field not in doc:
        raise InstanceFormatError(f"{where} document is missing field '{field}'")
    return doc[field]


def _parse_kind(obj) -> ProblemKind:
    if not isinstance(obj, dict) or len(obj) != 1:
        raise InstanceFormatError("kind must be an object with exactly one of "
                                  "'selection', 'assignment', 'explicit'")
    tag, body = next(iter(obj.items()))
    if tag == "selection":
        return Selection(q=int(_require(body, "q", "kind.selection")))
    if tag == "assignment":
        return Assignment(m=int(_require(body, "m", "kind.assignment")))
    if tag == "explicit":
        sols = _require(body, "solutions", "kind.explicit")
        return Explicit(solutions=tuple(tuple(int(i) for i in s) for s in sols))
    raise InstanceFormatError(f"unknown problem kind '{tag}'")


def _kind_to_json(kind: ProblemKind):
    if isinstance(kind, Selection):
        return {"selection": {"q": kind.q}}
    if isinstance(kind, Assignment):
        return {"assignment": {"m": kind.m}}
    if isinstance(kind, Explicit):
        return {"explicit": {"solutions": [list(s) for s in kind.solutions]}}
    raise ValueError(f"unknown problem kind {kind!r}")


def _load_json(text: str, what: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(
            f"{what} is not valid JSON (line {exc.lineno}, column {exc.colno}): {exc.msg}"
        ) from None
    if not isinstance(doc, dict):
        raise InstanceFormatError(f"{what} must be a JSON object")
    return doc


def read_instance(text: str) -> ScenarioInstance:
    """Parse an instance document; errors name the offending field."""
    doc = _load_json(text, "instance")
    fmt = _require(doc, "format")
    if fmt != FORMAT_VERSION:
        raise InstanceFormatError(f"unsupported format version {fmt!r}")
    n = int(_require(doc, "n"))
    k = int(_require(doc, "K"))
    kind = _parse_kind(_require(doc, "kind"))
    p = _require(doc, "p")
    v = _require(doc, "v")
    costs = _require(doc, "costs")
    arr = np.asarray(costs, dtype=float)
    if arr.ndim != 2 or arr.shape != (k, n):
        raise InstanceFormatError(f"costs: expected a {k}x{n} matrix, got shape {arr.shape}")
    try:
        return ScenarioInstance(arr, p, v, kind)
    except ValueError as exc:
        raise InstanceFormatError(str(exc)) from None


def write_instance(inst: ScenarioInstance) -> str:
    """Serialize an instance; read_instance(write_instance(x)) == x."""
    doc = {
        "format": FORMAT_VERSION,
        "n": inst.n,
        "K": inst.K,
        "kind": _kind_to_json(inst.kind),
        "p": list(inst.p.values),
        "v": list(inst.v.values),
        "costs": [list(row) for row in inst.costs.tolist()],
    }
    return json.dumps(doc, indent=2) + "\n"


def read_solution(text: str) -> Solution:
    doc = _load_json(text, "solution")
    fmt = _require(doc, "format", "solution")
    if fmt != FORMAT_VERSION:
        raise InstanceFormatError(f"unsupported format version {fmt!r}")
    chosen = _require(doc, "chosen", "solution")
    if not isinstance(chosen, list):
        raise InstanceFormatError("solution field 'chosen' must be a list of indices")
    return Solution(chosen)


def write_solution(sol: Solution) -> str:
    return json.dumps({"format": FORMAT_VERSION, "chosen": list(sol.chosen)}, indent=2) + "\n"
