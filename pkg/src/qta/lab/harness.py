"""Seeded operator x initial-condition ensembles and their summaries."""
from __future__ import annotations

import os
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from ..complexity import coarse_complexity, reversal_operator
from ..qca import AnnihilatedState, LocalRule, build_global_operator, evolve
from ..qlin import RngSeed, StateVector, haar_unitary, random_state
from ..serialize import write_csv
from ..thermo import AnalysisConfig, equilibration_time, l2_convergence, shannon_entropy

THREADS_ENV = "QTA_THREADS"


@dataclass(frozen=True)
class ExperimentConfig:
    n_qubits: int = 3
    num_operators: int = 50
    num_initial_conditions: int = 100
    master_seed: int = 2019
    analysis: AnalysisConfig = field(default_factory=AnalysisConfig)
    outputs: tuple = ("rows", "summary", "fits", "figures")

    def __post_init__(self):
        if self.num_operators < 1 or self.num_initial_conditions < 1:
            raise ValueError("operator and initial-condition counts must be >= 1")
        if not 2 <= self.n_qubits <= 12:
            raise ValueError("nQubits must be in [2, 12]")

    @property
    def horizon(self) -> int:
        return self.analysis.horizon

    def operator_seed(self, o: int) -> RngSeed:
        return RngSeed(self.master_seed, o)

    def initial_condition_seed(self, o: int, i: int) -> RngSeed:
        return RngSeed(
            self.master_seed, self.num_operators + o * self.num_initial_conditions + i
        )

    def to_dict(self) -> dict:
        return {
            "nQubits": self.n_qubits,
            "numOperators": self.num_operators,
            "numInitialConditions": self.num_initial_conditions,
            "masterSeed": self.master_seed,
            "analysis": asdict(self.analysis),
            "horizon": self.horizon,
            "outputs": list(self.outputs),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = {"nQubits", "numOperators", "numInitialConditions", "masterSeed",
                 "analysis", "horizon", "outputs"}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        analysis = dict(d.get("analysis", {}))
        if "horizon" in d:
            analysis["horizon"] = d["horizon"]
        base = cls()
        return cls(
            n_qubits=int(d.get("nQubits", base.n_qubits)),
            num_operators=int(d.get("numOperators", base.num_operators)),
            num_initial_conditions=int(d.get("numInitialConditions", base.num_initial_conditions)),
            master_seed=int(d.get("masterSeed", base.master_seed)),
            analysis=AnalysisConfig(**analysis),
            outputs=tuple(d.get("outputs", base.outputs)),
        )


@dataclass(frozen=True)
class SweepRow:
    operator_index: int
    ic_index: int
    t_eq: int | None
    censored: bool
    annihilated: bool
    complexity: float
    entropy: float

    @property
    def usable(self) -> bool:
        return not (self.censored or self.annihilated)


ROW_HEADER = ["operatorIndex", "icIndex", "tEq", "censored", "annihilated",
              "complexityAtEq", "entropyAtEq"]


@dataclass(eq=False)
class SweepResult:
    config: ExperimentConfig
    rows: list
    # per operator: mean over its initial conditions of the L2 distance to equilibrium
    l2_by_operator: np.ndarray

    def row_tuples(self):
        for r in self.rows:
            yield [r.operator_index, r.ic_index, r.t_eq, r.censored, r.annihilated,
                   r.complexity, r.entropy]

    def write_rows(self, path) -> None:
        write_csv(path, ROW_HEADER, self.row_tuples())


def operator_rule(cfg: ExperimentConfig, o: int) -> LocalRule:
    return LocalRule([haar_unitary(4, cfg.operator_seed(o))])


def initial_state(cfg: ExperimentConfig, o: int, i: int) -> StateVector:
    return random_state(cfg.n_qubits, cfg.initial_condition_seed(o, i))


def _run_operator(cfg: ExperimentConfig, o: int, rule=None, states=None):
    rule = rule if rule is not None else operator_rule(cfg, o)
    g = build_global_operator(rule, cfg.n_qubits)
    a = cfg.analysis
    # Evolve past the horizon so a quiet window starting at the horizon is visible.
    steps = a.horizon + a.window
    rows, l2 = [], []
    for i in range(cfg.num_initial_conditions):
        psi0 = (states or {}).get(i) or initial_state(cfg, o, i)
        try:
            traj = evolve(psi0, g, steps)
        except AnnihilatedState:
            rows.append(SweepRow(o, i, None, False, True, float("nan"), float("nan")))
            continue
        rep = equilibration_time(traj, a)
        t_at = rep.t_eq if rep.equilibrated else a.horizon
        c = coarse_complexity(reversal_operator(traj.amplitudes[0], traj.amplitudes[t_at]))
        rows.append(SweepRow(o, i, rep.t_eq, not rep.equilibrated, False, c.value,
                             shannon_entropy(rep.equilibrium_probabilities)))
        l2.append(l2_convergence(traj, a.window))
    l2_mean = np.mean(l2, axis=0) if l2 else np.full(steps + 1, np.nan)
    return o, rows, l2_mean


def _workers(threads: int | None) -> int:
    if threads is None:
        env = os.environ.get(THREADS_ENV)
        threads = int(env) if env else 1
    return max(1, threads)


def run_sweep(cfg: ExperimentConfig, *, threads: int | None = None,
              rule_override: dict | None = None,
              state_override: dict | None = None) -> SweepResult:
    """Evaluate every (operator, initial condition) cell of the ensemble.

    Operator ``o`` is a single Haar 4x4 gate; ``rule_override`` maps operator
    indices to replacement rules and ``state_override`` maps ``(o, i)`` to
    replacement initial states. Rows come back in canonical order whatever
    the parallelism.
    """
    rule_override = rule_override or {}
    state_override = state_override or {}
    jobs = []
    for o in range(cfg.num_operators):
        states = {i: s for (oo, i), s in state_override.items() if oo == o}
        jobs.append((cfg, o, rule_override.get(o), states))
    workers = _workers(threads)
    if workers == 1:
        results = [_run_operator(*j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_run_operator, *zip(*jobs)))
    results.sort(key=lambda r: r[0])
    rows = [row for _, rs, _ in results for row in rs]
    return SweepResult(cfg, rows, np.vstack([l2 for _, _, l2 in results]))


@dataclass(frozen=True)
class GroupSummary:
    key: int
    count: int
    excluded: int
    mean_t_eq: float
    std_t_eq: float
    mean_complexity: float
    std_complexity: float
    mean_entropy: float
    std_entropy: float


SUMMARY_HEADER = ["group", "count", "excluded", "meanTEq", "stdTEq", "meanComplexity",
                  "stdComplexity", "meanEntropy", "stdEntropy"]


def _mean_std(values):
    if not values:
        return float("nan"), float("nan")
    # fmean/pstdev are exactly rounded, hence independent of row order.
    return statistics.fmean(values), statistics.pstdev(values)


def summarize(rows, group_by: str = "operator") -> list[GroupSummary]:
    """Per-group mean and population std; censored and annihilated rows are
    excluded from the statistics and counted in ``excluded``.

    A group whose rows are all excluded reports NaN statistics.
    """
    if not rows:
        raise ValueError("no rows to summarize")
    if group_by == "operator":
        key = lambda r: r.operator_index  # noqa: E731
    elif group_by in ("initialCondition", "ic"):
        key = lambda r: r.ic_index  # noqa: E731
    else:
        raise ValueError(f"unknown grouping {group_by!r}")
    groups: dict[int, list] = {}
    for r in rows:
        groups.setdefault(key(r), []).append(r)
    out = []
    for k in sorted(groups):
        members = groups[k]
        ok = [r for r in members if r.usable]
        stats = []
        for attr in ("t_eq", "complexity", "entropy"):
            stats.extend(_mean_std([float(getattr(r, attr)) for r in ok]))
        out.append(GroupSummary(k, len(ok), len(members) - len(ok), *stats))
    return out


def summary_rows(summaries):
    for s in summaries:
        yield [s.key, s.count, s.excluded, s.mean_t_eq, s.std_t_eq, s.mean_complexity,
               s.std_complexity, s.mean_entropy, s.std_entropy]


def ensemble_findings(rows) -> dict:
    """The operator-vs-initial-condition sensitivity statistics of an ensemble.

    For each quantity: the median over operators of its spread across
    initial conditions, against the spread over operators of its
    per-operator mean.
    """
    by_op = [s for s in summarize(rows, "operator") if s.count > 0]
    usable = sum(r.usable for r in rows)
    non_annihilated = sum(not r.annihilated for r in rows)
    out = {
        "cells": len(rows),
        "annihilated": len(rows) - non_annihilated,
        "censored": non_annihilated - usable,
        "equilibratedFraction": usable / non_annihilated if non_annihilated else float("nan"),
    }
    for name, mean_attr, std_attr in (("tEq", "mean_t_eq", "std_t_eq"),
                                      ("complexity", "mean_complexity", "std_complexity"),
                                      ("entropy", "mean_entropy", "std_entropy")):
        if not by_op:
            out[name] = {"medianStdAcrossICs": None, "stdOfOperatorMeans": None,
                         "operatorDominated": None}
            continue
        within = float(np.median([getattr(s, std_attr) for s in by_op]))
        across = statistics.pstdev([getattr(s, mean_attr) for s in by_op])
        out[name] = {
            "medianStdAcrossICs": within,
            "stdOfOperatorMeans": across,
            "operatorDominated": within < across,
        }
    return out
