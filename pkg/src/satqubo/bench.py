"""Experiment pipelines: generate -> transform -> (scale) -> sample -> decode -> count.

Seeds for instance ``i`` of an experiment with root ``seed``:

* formula:     ``child_seed(seed, INSTANCE, i)`` (satisfiable instances only)
* multipliers: ``child_seed(seed, MULTIPLIER, i)`` (modified Chancellor only)
* sampler:     ``child_seed(seed, SAMPLER, i)``, shared by every transform

so every arm of an experiment sees the same formulas and the same sampler
streams, and reports are pure functions of the config.  Reports carry no
timing data, which keeps the JSON byte-for-byte reproducible.
"""

from __future__ import annotations

import csv
import io
import json
import os
import statistics
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping, Optional, Sequence

import numpy as np

from . import seeding
from .cnf import CnfFormula, generate_corpus, is_satisfied, write_dimacs
from .errors import InvalidParameterError, ParseError, SatQuboError
from .qubo import Qubo, apply_dwave_scaling, dumps_qubo, multiply, structure_metrics
from .sampler import AnnealSchedule, default_schedule_for, simulated_annealing
from .transforms import METHODS, TransformOutput, build, decode, dumps_sidecar

DEFAULT_METHODS = ("chancellorJ1", "chancellorJ5", "nuesslein", "choi")
EXPERIMENT2_FACTOR = 1500.0
EXPERIMENT3_MULTIPLIERS = (1.0, 500.0, 1001.0)
SUMMARY_METRICS = ("num_distinct_quadratic", "quadratic_range_size",
                   "num_distinct_linear", "linear_range_size", "scale_factor")

CSV_COLUMNS = (
    "record", "experiment", "transform", "instance", "status", "min_energy", "correct_reads",
    "num_reads", "solved", "dimension", "num_distinct_quadratic", "num_distinct_linear",
    "quadratic_range_size", "linear_range_size", "scale_factor", "density",
    "num_instances", "solved_instances", "correct_solutions", "solved_pct", "correct_pct",
)


@dataclass(frozen=True)
class TransformSpec:
    method: str
    params: Mapping[str, Any] = field(default_factory=dict)
    label: Optional[str] = None

    def __post_init__(self):
        if self.method not in METHODS:
            raise InvalidParameterError(
                f"unknown method {self.method!r}; choose from {sorted(METHODS)}")

    @property
    def name(self) -> str:
        return self.label or self.method

    def to_dict(self) -> dict:
        out: dict = {"method": self.method, "params": dict(self.params)}
        if self.label:
            out["label"] = self.label
        return out

    @classmethod
    def from_obj(cls, obj) -> "TransformSpec":
        if isinstance(obj, str):
            return cls(obj)
        return cls(obj["method"], dict(obj.get("params", {})), obj.get("label"))


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a run depends on.  ``beta_start``/``beta_end`` of ``None``
    select :func:`~satqubo.sampler.default_schedule_for` per sampled QUBO."""

    num_instances: int = 100
    n: int = 11
    m: int = 46
    seed: int = 0
    transforms: tuple = tuple(TransformSpec(k) for k in DEFAULT_METHODS)
    reads_per_instance: int = 200
    num_sweeps: int = 1000
    beta_start: Optional[float] = None
    beta_end: Optional[float] = None
    apply_scaling: bool = True
    output_dir: Optional[str] = None
    jobs: int = 1

    def __post_init__(self):
        specs = tuple(t if isinstance(t, TransformSpec) else TransformSpec.from_obj(t)
                      for t in self.transforms)
        object.__setattr__(self, "transforms", specs)
        if self.num_instances < 1:
            raise InvalidParameterError(f"num_instances must be >= 1, got {self.num_instances}")
        if self.reads_per_instance < 1:
            raise InvalidParameterError(
                f"reads_per_instance must be >= 1, got {self.reads_per_instance}")
        if not specs:
            raise InvalidParameterError("transform list must be nonempty")
        names = [t.name for t in specs]
        if len(set(names)) != len(names):
            raise InvalidParameterError(f"transform labels must be unique, got {names}")
        if (self.beta_start is None) != (self.beta_end is None):
            raise InvalidParameterError("give both beta_start and beta_end or neither")
        if self.jobs < 1:
            raise InvalidParameterError(f"jobs must be >= 1, got {self.jobs}")
        self.fixed_schedule()  # validates explicit betas and num_sweeps

    def fixed_schedule(self) -> Optional[AnnealSchedule]:
        if self.beta_start is None:
            AnnealSchedule(self.num_sweeps)
            return None
        return AnnealSchedule(self.num_sweeps, float(self.beta_start), float(self.beta_end))

    def schedule_for(self, q: Qubo) -> AnnealSchedule:
        return self.fixed_schedule() or default_schedule_for(q, self.num_sweeps)

    def to_dict(self) -> dict:
        """Fields that determine results; ``output_dir`` and ``jobs`` are excluded."""
        return {
            "num_instances": self.num_instances, "n": self.n, "m": self.m, "seed": self.seed,
            "transforms": [t.to_dict() for t in self.transforms],
            "reads_per_instance": self.reads_per_instance,
            "schedule": {"num_sweeps": self.num_sweeps, "beta_start": self.beta_start,
                         "beta_end": self.beta_end},
            "apply_scaling": self.apply_scaling,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "ExperimentConfig":
        data = dict(data)
        sched = data.pop("schedule", {}) or {}
        for key in ("num_sweeps", "beta_start", "beta_end"):
            if key in sched:
                data[key] = sched[key]
        if "transforms" in data:
            data["transforms"] = tuple(TransformSpec.from_obj(t) for t in data["transforms"])
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ParseError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    def replace(self, **changes) -> "ExperimentConfig":
        current = {k: getattr(self, k) for k in self.__dataclass_fields__}
        current.update(changes)
        return ExperimentConfig(**current)


def load_config(path) -> ExperimentConfig:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ParseError(f"{path}: config must be a JSON object")
    return ExperimentConfig.from_dict(data)


@dataclass
class InstanceRow:
    instance: int
    transform: str
    status: str = "ok"
    min_energy: Optional[float] = None
    correct_reads: int = 0
    num_reads: int = 0
    metrics: dict = field(default_factory=dict)
    error: Optional[str] = None

    @property
    def solved(self) -> bool:
        return self.correct_reads > 0


@dataclass
class ArmSummary:
    transform: str
    num_instances: int
    reads_per_instance: int
    solved_instances: int
    correct_solutions: int
    failed_instances: int = 0

    @property
    def solved_pct(self) -> float:
        return 100.0 * self.solved_instances / self.num_instances

    @property
    def correct_pct(self) -> float:
        return 100.0 * self.correct_solutions / (self.num_instances * self.reads_per_instance)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["solved_pct"] = self.solved_pct
        out["correct_pct"] = self.correct_pct
        return out


@dataclass
class BenchmarkReport:
    experiment: str
    config: dict
    backend: str
    arms: list[ArmSummary]
    rows: list[InstanceRow]
    comparison: Optional[dict] = None

    @property
    def failures(self) -> int:
        return sum(r.status != "ok" for r in self.rows)

    def arm(self, name: str) -> ArmSummary:
        for a in self.arms:
            if a.transform == name:
                return a
        raise KeyError(name)

    def to_dict(self) -> dict:
        out = {
            "experiment": self.experiment,
            "backend": self.backend,
            "config": self.config,
            "summary": [a.to_dict() for a in self.arms],
            "instances": [asdict(r) for r in self.rows],
        }
        if self.comparison is not None:
            out["comparison"] = self.comparison
        return out

    @classmethod
    def from_dict(cls, data: Mapping) -> "BenchmarkReport":
        try:
            arms = [ArmSummary(**{k: v for k, v in a.items() if k not in ("solved_pct", "correct_pct")})
                    for a in data["summary"]]
            rows = [InstanceRow(**r) for r in data["instances"]]
            return cls(data["experiment"], data["config"], data["backend"], arms, rows,
                       data.get("comparison"))
        except (KeyError, TypeError) as exc:
            raise ParseError(f"malformed report JSON: {exc}") from None

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for r in self.rows:
            rec = {"record": "instance", "experiment": self.experiment, "transform": r.transform,
                   "instance": r.instance, "status": r.status, "min_energy": r.min_energy,
                   "correct_reads": r.correct_reads, "num_reads": r.num_reads,
                   "solved": int(r.solved)}
            rec.update({k: v for k, v in r.metrics.items() if k in CSV_COLUMNS})
            writer.writerow(rec)
        for a in self.arms:
            writer.writerow({"record": "summary", "experiment": self.experiment,
                             "transform": a.transform, "num_instances": a.num_instances,
                             "num_reads": a.reads_per_instance,
                             "solved_instances": a.solved_instances,
                             "correct_solutions": a.correct_solutions,
                             "solved_pct": a.solved_pct, "correct_pct": a.correct_pct})
        return buf.getvalue()


# ---------------------------------------------------------------------------
# pipeline


def corpus(cfg: ExperimentConfig) -> list[CnfFormula]:
    return generate_corpus(cfg.n, cfg.m, cfg.num_instances, cfg.seed, require_satisfiable=True)


def transform_instance(spec: TransformSpec, formula: CnfFormula, root_seed: int,
                       index: int) -> TransformOutput:
    return build(spec.method, formula, seed=seeding.child_seed(root_seed, seeding.MULTIPLIER, index),
                 **spec.params)


def sampler_input(out: TransformOutput, factor: float = 1.0, scale: bool = True) -> Qubo:
    """The QUBO actually handed to the sampler."""
    q = out.qubo if factor == 1.0 else multiply(out.qubo, factor)
    return apply_dwave_scaling(q) if scale else q


def count_correct(out: TransformOutput, formula: CnfFormula, sampleset) -> int:
    correct = 0
    for bits, _, count in sampleset.records:
        assignment = decode(out, bits)
        if assignment is not None and is_satisfied(formula, assignment):
            correct += count
    return correct


def _run_unit(cfg: ExperimentConfig, spec: TransformSpec, formula: CnfFormula, index: int,
              factor: float, scale: bool) -> InstanceRow:
    row = InstanceRow(index, spec.name)
    try:
        out = transform_instance(spec, formula, cfg.seed, index)
        row.metrics = structure_metrics(out.qubo).as_dict()
        q = sampler_input(out, factor, scale)
        ss = simulated_annealing(q, cfg.reads_per_instance, cfg.schedule_for(q),
                                 seed=seeding.child_seed(cfg.seed, seeding.SAMPLER, index))
        row.min_energy = ss.lowest_energy
        row.num_reads = ss.num_reads
        row.correct_reads = count_correct(out, formula, ss)
    except SatQuboError as exc:
        row.status = "error"
        row.error = f"{type(exc).__name__}: {exc}"
    return row


def _summarize(cfg: ExperimentConfig, rows: Sequence[InstanceRow]) -> list[ArmSummary]:
    arms = []
    for spec in cfg.transforms:
        mine = [r for r in rows if r.transform == spec.name]
        arms.append(ArmSummary(
            transform=spec.name,
            num_instances=cfg.num_instances,
            reads_per_instance=cfg.reads_per_instance,
            solved_instances=sum(r.solved for r in mine),
            correct_solutions=sum(r.correct_reads for r in mine),
            failed_instances=sum(r.status != "ok" for r in mine),
        ))
    return arms


def _run(name: str, cfg: ExperimentConfig, factor: float, scale: bool) -> BenchmarkReport:
    formulas = corpus(cfg)
    units = [(spec, i) for i in range(cfg.num_instances) for spec in cfg.transforms]

    def work(unit):
        spec, i = unit
        return _run_unit(cfg, spec, formulas[i], i, factor, scale)

    if cfg.jobs > 1:
        with ThreadPoolExecutor(cfg.jobs) as pool:
            rows = list(pool.map(work, units))
    else:
        rows = [work(u) for u in units]
    config = cfg.to_dict()
    if factor != 1.0:
        config["factor"] = factor
    return BenchmarkReport(name, config, "simulated_annealing", _summarize(cfg, rows), rows)


def run_experiment1(cfg: ExperimentConfig) -> BenchmarkReport:
    """Every configured transform on the same satisfiable corpus."""
    return _run("experiment1", cfg, 1.0, cfg.apply_scaling)


def run_experiment2(cfg: ExperimentConfig, factor: float = EXPERIMENT2_FACTOR) -> BenchmarkReport:
    """ChancellorJ1 QUBOs multiplied by ``factor``, then range-scaled (always)."""
    cfg = cfg.replace(transforms=(TransformSpec("chancellorJ1"),), apply_scaling=True)
    return _run("experiment2", cfg, float(factor), True)


def run_experiment3(cfg: ExperimentConfig,
                    multipliers: Iterable[float] = EXPERIMENT3_MULTIPLIERS) -> BenchmarkReport:
    """Modified ChancellorJ1 plus a structure comparison against the unmodified QUBOs."""
    multipliers = sorted({float(k) for k in multipliers})
    spec = TransformSpec("modchancellor", {"J": 1.0, "multipliers": multipliers})
    cfg = cfg.replace(transforms=(spec,))
    report = _run("experiment3", cfg, 1.0, cfg.apply_scaling)
    formulas = corpus(cfg)
    before = analyze_corpus(formulas, "chancellorJ1", cfg.seed)
    after = analyze_corpus(formulas, "modchancellor", cfg.seed, J=1.0, multipliers=multipliers)
    report.comparison = {
        "baseline": "chancellorJ1",
        "modified": "modchancellor",
        "before": before["summary"],
        "after": after["summary"],
    }
    return report


def sweep_clauses(cfg: ExperimentConfig, m_values: Iterable[int],
                  target_solved: float = 0.5) -> list[BenchmarkReport]:
    """Run experiment 1 for each ``m`` in order; stop after the first ``m`` at
    which every transform solves at least ``target_solved`` of the instances."""
    reports = []
    for m in m_values:
        report = run_experiment1(cfg.replace(m=int(m)))
        reports.append(report)
        if all(a.solved_instances >= target_solved * a.num_instances for a in report.arms):
            break
    return reports


# ---------------------------------------------------------------------------
# structure analysis


def summarize_values(values: Sequence[float]) -> dict:
    arr = np.asarray(values, dtype=float)
    q1, med, q3 = np.quantile(arr, [0.25, 0.5, 0.75])
    return {"min": float(arr.min()), "q1": float(q1), "median": float(med), "q3": float(q3),
            "max": float(arr.max()), "mean": float(statistics.fmean(arr.tolist()))}


def analyze_corpus(formulas: Sequence[CnfFormula], method: str, seed: int = 0, **params) -> dict:
    """Per-instance structure metrics of the unscaled transform QUBOs plus
    min/quartile/median/max/mean summaries of the headline metrics."""
    if not formulas:
        raise InvalidParameterError("analyze_corpus needs at least one formula")
    spec = TransformSpec(method, params)
    rows = []
    for i, f in enumerate(formulas):
        metrics = structure_metrics(transform_instance(spec, f, seed, i).qubo).as_dict()
        rows.append({"instance": i, "transform": method, **metrics})
    summary = {k: summarize_values([r[k] for r in rows]) for k in SUMMARY_METRICS}
    return {"transform": method, "rows": rows, "summary": summary}


def analysis_csv(analyses: Sequence[Mapping]) -> str:
    """One row per (transform, instance): the scatter/box-plot input."""
    buf = io.StringIO()
    fields = ["transform", "instance", "dimension", *SUMMARY_METRICS, "density"]
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n", extrasaction="ignore")
    writer.writeheader()
    for a in analyses:
        writer.writerows(a["rows"])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# output


def atomic_write(path, text: str) -> Path:
    """Write ``text`` via a temp file in the same directory and rename it into place."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def emit_report(report: BenchmarkReport, directory, formats: Sequence[str] = ("json", "csv"),
                stem: str = "report") -> list[Path]:
    written = []
    for fmt in formats:
        if fmt == "json":
            written.append(atomic_write(Path(directory) / f"{stem}.json", report.to_json()))
        elif fmt == "csv":
            written.append(atomic_write(Path(directory) / f"{stem}.csv", report.to_csv()))
        else:
            raise InvalidParameterError(f"unknown report format {fmt!r}")
    return written


def read_report(path) -> BenchmarkReport:
    try:
        return BenchmarkReport.from_dict(json.loads(Path(path).read_text()))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON: {exc}") from None


def emit_artifacts(cfg: ExperimentConfig, directory) -> list[Path]:
    """Per-instance DIMACS plus QUBO JSON and variable-map sidecar for each transform."""
    directory = Path(directory)
    written = []
    width = len(str(cfg.num_instances - 1))
    for i, f in enumerate(corpus(cfg)):
        stem = f"instance_{i:0{width}d}"
        written.append(atomic_write(directory / f"{stem}.cnf",
                                    write_dimacs(f, [f"seed {cfg.seed} instance {i}"])))
        for spec in cfg.transforms:
            out = transform_instance(spec, f, cfg.seed, i)
            written.append(atomic_write(directory / f"{stem}.{spec.name}.qubo.json",
                                        dumps_qubo(out.qubo) + "\n"))
            written.append(atomic_write(directory / f"{stem}.{spec.name}.map.json",
                                        dumps_sidecar(out) + "\n"))
    return written
