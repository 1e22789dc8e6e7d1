"""Instance generation and the benchmark harness.

Reproducibility contract
------------------------
All randomness flows through a fixed 64-bit generator so that identical
configurations produce identical instances on any platform (and in any
implementation language):

* stream state advance: splitmix64 (state += 0x9E3779B97F4A7C15, output
  mixed with the 0xBF58476D1CE4B5B9 / 0x94D049BB133111EB constants);
* uniform integers in [lo, hi] are lo + next() mod (hi - lo + 1);
* the per-instance stream seed is the benchmark seed XOR the FNV-1a 64
  hash of the UTF-8 key "kind:size:K:alpha:index", where alpha is the
  shortest decimal repr of the float (or the word "uniform").

An instance draws, in order: one integer in [1, 100] per scenario (the
probability numerators), then the costs scenario by scenario, element by
element, each an integer in [0, 100].
"""

from __future__ import annotations

import csv
import io
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional, Sequence

from .aggregation import WeightVector, generate_weights
from .approx import approx_solve
from .exact import brute_force, exact_bb
from .mip import build_mip, export_lp
from .model import Assignment, ScenarioInstance, Selection

__all__ = [
    "SplitMix64",
    "instance_seed",
    "gen_instance",
    "default_q",
    "ExperimentConfig",
    "BenchmarkRecord",
    "RECORD_HEADER",
    "SUMMARY_HEADER",
    "CellSummary",
    "run_benchmark",
    "summarize",
    "records_to_csv",
    "summaries_to_csv",
]

_MASK64 = (1 << 64) - 1


class SplitMix64:
    """Fixed 64-bit generator; see the module docstring for the contract."""

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4B5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi] (closed), by modular reduction."""
        if hi < lo:
            raise ValueError("empty range")
        return lo + self.next_u64() % (hi - lo + 1)


def _fnv1a64(data: bytes) -> int:
    h = 0xCBF29CE484222325
    for byte in data:
        h ^= byte
        h = (h * 0x100000001B3) & _MASK64
    return h


def _alpha_token(alpha: Optional[float]) -> str:
    return "uniform" if alpha is None else repr(float(alpha))


def instance_seed(seed: int, kind: str, size: int, k: int, alpha: Optional[float], index: int) -> int:
    """Derived stream seed for one benchmark instance."""
    key = f"{kind}:{size}:{k}:{_alpha_token(alpha)}:{index}".encode("utf-8")
    return (seed ^ _fnv1a64(key)) & _MASK64


def default_q(n: int) -> int:
    """Selection size when not given explicitly: 25% of n, rounded half up."""
    return int(n * 0.25 + 0.5)


def gen_instance(
    kind: str,
    size: int,
    k: int,
    alpha: Optional[float],
    seed: int,
    q: Optional[int] = None,
) -> ScenarioInstance:
    """Random instance: p from uniform integer numerators, integer costs.

    ``kind`` is "selection" (size = n, chooses q elements) or "assignment"
    (size = m, n = m*m elements).  ``alpha`` parameterizes the weight
    generator; None means uniform importance weights.
    """
    if kind == "selection":
        n = size
        problem = Selection(q=q if q is not None else default_q(n))
    elif kind == "assignment":
        n = size * size
        problem = Assignment(m=size)
    else:
        raise ValueError(f"unknown kind {kind!r}")
    if k < 1:
        raise ValueError(f"K must be positive, got {k}")
    rng = SplitMix64(seed)
    numerators = [rng.randint(1, 100) for _ in range(k)]
    total = sum(numerators)
    p = [a / total for a in numerators]
    costs = [[float(rng.randint(0, 100)) for _ in range(n)] for _ in range(k)]
    v = WeightVector.uniform(k) if alpha is None else generate_weights(alpha, k)
    return ScenarioInstance(costs, p, v, problem)


@dataclass(frozen=True)
class ExperimentConfig:
    """One benchmark grid: a single problem kind swept over K and alpha."""

    kind: str  # "selection" or "assignment"
    size: int  # n for selection, m for assignment
    k_values: tuple[int, ...] = (2, 5, 10)
    alphas: tuple[Optional[float], ...] = (1e-2, 1e-4)
    instances: int = 10
    seed: int = 0
    time_limit: float = 3600.0
    method: str = "bb"  # "bb", "brute" or "lp-only"
    q_fraction: float = 0.25
    lp_dir: Optional[str] = None

    def __post_init__(self):
        if self.kind not in ("selection", "assignment"):
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.method not in ("bb", "brute", "lp-only"):
            raise ValueError(f"unknown exact method {self.method!r}")
        if self.instances < 1 or self.size < 1:
            raise ValueError("instances and size must be positive")
        if not 0.0 < self.q_fraction < 1.0:
            raise ValueError("q_fraction must be in (0, 1)")

    def q_for(self, n: int) -> Optional[int]:
        if self.kind != "selection":
            return None
        return max(1, int(n * self.q_fraction + 0.5))

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        known = {
            "kind": doc.get("kind"),
            "size": doc.get("size", doc.get("n", doc.get("m"))),
        }
        if known["size"] is None:
            raise ValueError("config needs 'size' (or 'n'/'m')")
        for key, name in (
            ("K", "k_values"),
            ("alpha", "alphas"),
            ("instances", "instances"),
            ("seed", "seed"),
            ("time_limit", "time_limit"),
            ("method", "method"),
            ("q_fraction", "q_fraction"),
            ("lp_dir", "lp_dir"),
        ):
            if key in doc:
                known[name] = doc[key]
        if "k_values" in known:
            known["k_values"] = tuple(int(k) for k in known["k_values"])
        if "alphas" in known:
            known["alphas"] = tuple(
                None if a in (None, "uniform") else float(a) for a in known["alphas"]
            )
        return cls(**known)


RECORD_HEADER = (
    "kind,size,K,alpha,instance,seed,exact_value,exact_status,"
    "approx_value,deviation_pct,exact_ms,approx_ms"
)

SUMMARY_HEADER = (
    "kind,size,K,alpha,instances,solved,unsolved,"
    "mean_deviation_pct,max_deviation_pct,mean_exact_ms,mean_approx_ms"
)


@dataclass(frozen=True)
class BenchmarkRecord:
    kind: str
    size: int
    k: int
    alpha: Optional[float]
    instance: int
    seed: int
    exact_value: Optional[float]
    exact_status: str  # "optimal", "time_limit" or "exported"
    approx_value: float
    deviation_pct: Optional[float]
    exact_ms: Optional[float]
    approx_ms: float

    def csv_row(self) -> list[str]:
        return [
            self.kind,
            str(self.size),
            str(self.k),
            _alpha_token(self.alpha),
            str(self.instance),
            str(self.seed),
            "unsolved" if self.exact_value is None else repr(self.exact_value),
            self.exact_status,
            repr(self.approx_value),
            "" if self.deviation_pct is None else repr(self.deviation_pct),
            "" if self.exact_ms is None else f"{self.exact_ms:.3f}",
            f"{self.approx_ms:.3f}",
        ]


@dataclass(frozen=True)
class CellSummary:
    kind: str
    size: int
    k: int
    alpha: Optional[float]
    instances: int
    solved: int
    unsolved: int
    mean_deviation_pct: Optional[float]
    max_deviation_pct: Optional[float]
    mean_exact_ms: Optional[float]
    mean_approx_ms: float

    def csv_row(self) -> list[str]:
        def opt(x):
            return "" if x is None else repr(x)

        return [
            self.kind,
            str(self.size),
            str(self.k),
            _alpha_token(self.alpha),
            str(self.instances),
            str(self.solved),
            str(self.unsolved),
            opt(self.mean_deviation_pct),
            opt(self.max_deviation_pct),
            "" if self.mean_exact_ms is None else f"{self.mean_exact_ms:.3f}",
            f"{self.mean_approx_ms:.3f}",
        ]


def _deviation_pct(approx: float, exact: float) -> float:
    if exact == 0.0:
        # The guarantee forces approx == 0 whenever the optimum is 0.
        return 0.0
    return 100.0 * (approx - exact) / exact


def _run_one(cfg: ExperimentConfig, k: int, alpha: Optional[float], index: int) -> BenchmarkRecord:
    seed = instance_seed(cfg.seed, cfg.kind, cfg.size, k, alpha, index)
    n = cfg.size if cfg.kind == "selection" else cfg.size * cfg.size
    inst = gen_instance(cfg.kind, cfg.size, k, alpha, seed, q=cfg.q_for(n))

    t0 = time.perf_counter()
    approx = approx_solve(inst)
    approx_ms = 1e3 * (time.perf_counter() - t0)

    exact_value: Optional[float] = None
    exact_ms: Optional[float] = None
    deviation: Optional[float] = None
    if cfg.method == "lp-only":
        status = "exported"
        if cfg.lp_dir is not None:
            path = Path(cfg.lp_dir)
            path.mkdir(parents=True, exist_ok=True)
            name = f"{cfg.kind}_{cfg.size}_{k}_{_alpha_token(alpha)}_{index}.lp"
            (path / name).write_text(export_lp(build_mip(inst)))
    else:
        t0 = time.perf_counter()
        if cfg.method == "bb":
            res = exact_bb(inst, time_limit=cfg.time_limit)
        else:
            res = brute_force(inst)
        exact_ms = 1e3 * (time.perf_counter() - t0)
        exact_value = res.objective
        status = res.proof_status
        deviation = _deviation_pct(approx.wowa_objective, res.objective)

    return BenchmarkRecord(
        kind=cfg.kind,
        size=cfg.size,
        k=k,
        alpha=alpha,
        instance=index,
        seed=seed,
        exact_value=exact_value,
        exact_status=status,
        approx_value=approx.wowa_objective,
        deviation_pct=deviation,
        exact_ms=exact_ms,
        approx_ms=approx_ms,
    )


def run_benchmark(
    cfg: ExperimentConfig,
    jobs: int = 1,
    progress: Optional[Callable[[str], None]] = None,
) -> list[BenchmarkRecord]:
    """All cells of the grid; objective columns are scheduling independent.

    Per-instance failures are recorded (status "error") without aborting
    the batch.  Records come back sorted by (K, alpha, instance).
    """
    tasks = [
        (k, alpha, index)
        for k in cfg.k_values
        for alpha in cfg.alphas
        for index in range(cfg.instances)
    ]
    records: dict[tuple, BenchmarkRecord] = {}

    def note_cell_done(k, alpha):
        if progress is not None:
            done = sum(1 for (kk, aa, _) in records if kk == k and aa == alpha)
            if done == cfg.instances:
                progress(
                    f"cell kind={cfg.kind} size={cfg.size} K={k} "
                    f"alpha={_alpha_token(alpha)}: {cfg.instances} instances done"
                )

    def failure_record(k, alpha, index, exc) -> BenchmarkRecord:
        return BenchmarkRecord(
            kind=cfg.kind,
            size=cfg.size,
            k=k,
            alpha=alpha,
            instance=index,
            seed=instance_seed(cfg.seed, cfg.kind, cfg.size, k, alpha, index),
            exact_value=None,
            exact_status=f"error: {exc}",
            approx_value=float("nan"),
            deviation_pct=None,
            exact_ms=None,
            approx_ms=0.0,
        )

    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = {
                pool.submit(_run_one, cfg, k, alpha, index): (k, alpha, index)
                for (k, alpha, index) in tasks
            }
            for future, (k, alpha, index) in futures.items():
                try:
                    records[(k, alpha, index)] = future.result()
                except Exception as exc:  # noqa: BLE001 - recorded, not raised
                    records[(k, alpha, index)] = failure_record(k, alpha, index, exc)
                note_cell_done(k, alpha)
    else:
        for k, alpha, index in tasks:
            try:
                records[(k, alpha, index)] = _run_one(cfg, k, alpha, index)
            except Exception as exc:  # noqa: BLE001
                records[(k, alpha, index)] = failure_record(k, alpha, index, exc)
            note_cell_done(k, alpha)

    order = {(k, alpha, i): pos for pos, (k, alpha, i) in enumerate(tasks)}
    return [records[key] for key in sorted(records, key=order.__getitem__)]


def summarize(records: Sequence[BenchmarkRecord]) -> list[CellSummary]:
    """Per-cell aggregates; non-optimal records are excluded from deviation
    statistics and counted as unsolved instead."""
    if not records:
        raise ValueError("no records to summarize")
    cells: dict[tuple, list[BenchmarkRecord]] = {}
    for rec in records:
        cells.setdefault((rec.kind, rec.size, rec.k, rec.alpha), []).append(rec)

    out = []
    for (kind, size, k, alpha), recs in cells.items():
        solved = [r for r in recs if r.exact_status == "optimal"]
        deviations = [r.deviation_pct for r in solved if r.deviation_pct is not None]
        exact_times = [r.exact_ms for r in solved if r.exact_ms is not None]
        out.append(
            CellSummary(
                kind=kind,
                size=size,
                k=k,
                alpha=alpha,
                instances=len(recs),
                solved=len(solved),
                unsolved=len(recs) - len(solved),
                mean_deviation_pct=sum(deviations) / len(deviations) if deviations else None,
                max_deviation_pct=max(deviations) if deviations else None,
                mean_exact_ms=sum(exact_times) / len(exact_times) if exact_times else None,
                mean_approx_ms=sum(r.approx_ms for r in recs) / len(recs),
            )
        )
    out.sort(key=lambda s: (s.kind, s.size, s.k, _alpha_token(s.alpha)))
    return out


def _csv_text(header: str, rows: list[list[str]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header.split(","))
    writer.writerows(rows)
    return buf.getvalue()


def records_to_csv(records: Sequence[BenchmarkRecord]) -> str:
    return _csv_text(RECORD_HEADER, [r.csv_row() for r in records])


def summaries_to_csv(summaries: Sequence[CellSummary]) -> str:
    return _csv_text(SUMMARY_HEADER, [s.csv_row() for s in summaries])
