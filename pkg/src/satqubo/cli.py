"""``satqubo`` command line: generate, transform, solve, analyze, bench.

Exit codes: 0 success, 1 other package error or failed benchmark units,
2 usage, 3 invalid parameter, 4 unsupported input, 5 parse error, 6 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import bench, cnf, sampler
from .errors import InvalidParameterError, ParseError, SatQuboError, UnsupportedError
from .qubo import apply_dwave_scaling, dumps_qubo, loads_qubo, structure_metrics
from .transforms import METHODS, build, decode, dumps_sidecar, output_from_json

OUTPUT_DIR_ENV = "SATQUBO_OUTPUT_DIR"

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_INVALID = 3
EXIT_UNSUPPORTED = 4
EXIT_PARSE = 5
EXIT_IO = 6


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _add_globals(p: argparse.ArgumentParser, suppress: bool) -> None:
    default = argparse.SUPPRESS if suppress else None
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS if suppress else 0,
                   help="root seed (default 0)")
    p.add_argument("--output-dir", default=default,
                   help=f"where artifacts go (default ${OUTPUT_DIR_ENV} or the current directory)")


def _method_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--J", type=float, default=None, help="Chancellor coupling (J1/J5 presets otherwise)")
    p.add_argument("--vertex-weight", type=float, default=None, help="Choi diagonal weight")
    p.add_argument("--edge-weight", type=float, default=None, help="Choi edge weight")
    p.add_argument("--multipliers", type=_floats, default=None,
                   help="modified-Chancellor clause multipliers, e.g. 1,500,1001")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="satqubo", description=__doc__.splitlines()[0])
    _add_globals(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="random 3SAT instances as DIMACS files")
    _add_globals(g, suppress=True)
    g.add_argument("--n", type=int, default=11)
    g.add_argument("--m", type=int, default=46)
    g.add_argument("--count", type=int, default=1)
    g.add_argument("--satisfiable", action=argparse.BooleanOptionalAction, default=True,
                   help="redraw until satisfiable (default on)")

    t = sub.add_parser("transform", help="CNF -> QUBO JSON plus variable-map sidecar")
    _add_globals(t, suppress=True)
    t.add_argument("--input", required=True, help="DIMACS CNF file")
    t.add_argument("--method", required=True, choices=sorted(METHODS))
    t.add_argument("--scale", action="store_true", help="also apply hardware-range scaling")
    _method_flags(t)

    s = sub.add_parser("solve", help="sample a QUBO JSON file")
    _add_globals(s, suppress=True)
    s.add_argument("--qubo", required=True)
    s.add_argument("--map", default=None, help="sidecar (default: <qubo stem>.map.json if present)")
    s.add_argument("--cnf", default=None, help="formula used to check decoded assignments")
    s.add_argument("--backend", choices=("brute", "sa"), default="sa")
    s.add_argument("--reads", type=int, default=1000)
    s.add_argument("--sweeps", type=int, default=sampler.DEFAULT_NUM_SWEEPS)
    s.add_argument("--beta-start", type=float, default=None)
    s.add_argument("--beta-end", type=float, default=None)
    s.add_argument("--max-dimension", type=int, default=sampler.BRUTE_FORCE_MAX_DIMENSION)
    s.add_argument("--scale", action="store_true", help="apply hardware-range scaling first")

    a = sub.add_parser("analyze", help="structure metrics of QUBOs or transformed corpora")
    _add_globals(a, suppress=True)
    src = a.add_mutually_exclusive_group()
    src.add_argument("--qubo", nargs="+", default=None, help="QUBO JSON files, one row each")
    src.add_argument("--cnf", nargs="+", default=None, help="DIMACS files to transform")
    a.add_argument("--methods", nargs="+", choices=sorted(METHODS), default=None)
    a.add_argument("--n", type=int, default=11)
    a.add_argument("--m", type=int, default=46)
    a.add_argument("--count", type=int, default=100,
                   help="generated corpus size when neither --qubo nor --cnf is given")
    _method_flags(a)

    b = sub.add_parser("bench", help="run experiment 1, 2 or 3")
    _add_globals(b, suppress=True)
    b.add_argument("--experiment", type=int, choices=(1, 2, 3), default=1)
    b.add_argument("--config", default=None, help="ExperimentConfig JSON; flags override it")
    b.add_argument("--instances", type=int, default=None)
    b.add_argument("--n", type=int, default=None)
    b.add_argument("--m", type=int, default=None)
    b.add_argument("--reads", type=int, default=None, help="reads per instance (default 1000)")
    b.add_argument("--methods", nargs="+", choices=sorted(METHODS), default=None)
    b.add_argument("--sweeps", type=int, default=None)
    b.add_argument("--beta-start", type=float, default=None)
    b.add_argument("--beta-end", type=float, default=None)
    b.add_argument("--scaling", action=argparse.BooleanOptionalAction, default=None)
    b.add_argument("--factor", type=float, default=bench.EXPERIMENT2_FACTOR,
                   help="experiment 2 multiplier")
    b.add_argument("--multipliers", type=_floats, default=list(bench.EXPERIMENT3_MULTIPLIERS),
                   help="experiment 3 clause multipliers")
    b.add_argument("--sweep-m", type=_ints, default=None,
                   help="run experiment 1 over these m values until every method solves >= 50%%")
    b.add_argument("--jobs", type=int, default=None)
    b.add_argument("--artifacts", action="store_true",
                   help="also write per-instance DIMACS and QUBO files")
    return parser


def _output_dir(args) -> Path:
    return Path(args.output_dir or os.environ.get(OUTPUT_DIR_ENV) or ".")


def _print_config(args, **extra) -> None:
    resolved = {k: v for k, v in vars(args).items() if k != "explicit"}
    resolved["output_dir"] = str(_output_dir(args))
    resolved.update(extra)
    print("config " + json.dumps(resolved, sort_keys=True, default=str))


def _method_params(args, method: str) -> dict:
    params = {}
    if method.startswith("chancellor") or method == "modchancellor":
        if args.J is not None:
            params["J"] = args.J
    if method == "choi":
        if args.vertex_weight is not None:
            params["vertex_weight"] = args.vertex_weight
        if args.edge_weight is not None:
            params["edge_weight"] = args.edge_weight
    if method == "modchancellor" and args.multipliers is not None:
        params["multipliers"] = args.multipliers
    return params


def cmd_generate(args) -> int:
    _print_config(args)
    formulas = cnf.generate_corpus(args.n, args.m, args.count, args.seed,
                                   require_satisfiable=args.satisfiable)
    out = _output_dir(args)
    width = len(str(max(args.count - 1, 0)))
    for i, f in enumerate(formulas):
        path = out / f"3sat_n{args.n}_m{args.m}_seed{args.seed}_{i:0{width}d}.cnf"
        bench.atomic_write(path, cnf.write_dimacs(f, [f"seed {args.seed} instance {i}"]))
        print(path)
    return EXIT_OK


def cmd_transform(args) -> int:
    params = _method_params(args, args.method)
    _print_config(args, params=params)
    formula = cnf.read_dimacs(args.input)
    result = build(args.method, formula, seed=args.seed, **params)
    q = apply_dwave_scaling(result.qubo) if args.scale else result.qubo
    stem = _output_dir(args) / f"{Path(args.input).stem}.{args.method}"
    qpath = bench.atomic_write(Path(f"{stem}.qubo.json"), dumps_qubo(q) + "\n")
    mpath = bench.atomic_write(Path(f"{stem}.map.json"), dumps_sidecar(result) + "\n")
    print(f"dimension {q.dimension}")
    print(qpath)
    print(mpath)
    return EXIT_OK


def _sidecar_path(args) -> Optional[Path]:
    if args.map:
        return Path(args.map)
    name = Path(args.qubo).name
    if name.endswith(".qubo.json"):
        guess = Path(args.qubo).with_name(name[: -len(".qubo.json")] + ".map.json")
        if guess.exists():
            return guess
    return None


def cmd_solve(args) -> int:
    _print_config(args)
    qpath = Path(args.qubo)
    q = loads_qubo(qpath.read_text())
    if args.scale:
        q = apply_dwave_scaling(q)
    if args.backend == "brute":
        ss = sampler.exact_sampleset(q, args.max_dimension)
    else:
        if (args.beta_start is None) != (args.beta_end is None):
            raise InvalidParameterError("give both --beta-start and --beta-end or neither")
        if args.beta_start is None:
            schedule = sampler.default_schedule_for(q, args.sweeps)
        else:
            schedule = sampler.AnnealSchedule(args.sweeps, args.beta_start, args.beta_end)
        ss = sampler.simulated_annealing(q, args.reads, schedule, seed=args.seed)

    stem = qpath.name[: -len(".qubo.json")] if qpath.name.endswith(".qubo.json") else qpath.stem
    out = bench.atomic_write(_output_dir(args) / f"{stem}.{args.backend}.samples.json",
                             json.dumps(ss.to_dict(include_timing=False), indent=1,
                                        sort_keys=True) + "\n")
    print(f"reads {ss.num_reads} distinct {len(ss.records)} lowest_energy {ss.lowest_energy!r}")

    sidecar = _sidecar_path(args)
    if sidecar is not None:
        result = output_from_json(json.loads(qpath.read_text()), json.loads(sidecar.read_text()))
        formula = cnf.read_dimacs(args.cnf) if args.cnf else None
        best = ss.records[0][0]
        assignment = decode(result, best)
        print(f"decoded {''.join(map(str, assignment)) if assignment is not None else 'invalid'}")
        if formula is not None:
            correct = bench.count_correct(result, formula, ss)
            verdict = assignment is not None and cnf.is_satisfied(formula, assignment)
            print(f"lowest_read_satisfies {str(verdict).lower()} correct_reads {correct}")
    print(out)
    return EXIT_OK


def cmd_analyze(args) -> int:
    out = _output_dir(args)
    if args.qubo:
        _print_config(args)
        rows = []
        for path in args.qubo:
            metrics = structure_metrics(loads_qubo(Path(path).read_text())).as_dict()
            rows.append({"file": str(path), **metrics})
            print(json.dumps(rows[-1], sort_keys=True))
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        bench.atomic_write(out / "analysis.csv", buf.getvalue())
        bench.atomic_write(out / "analysis.json", json.dumps({"rows": rows}, indent=2, sort_keys=True) + "\n")
        return EXIT_OK

    methods = args.methods or ["chancellorJ1", "nuesslein", "chancellorJ5"]
    if args.cnf:
        formulas = [cnf.read_dimacs(p) for p in args.cnf]
    else:
        formulas = cnf.generate_corpus(args.n, args.m, args.count, args.seed, require_satisfiable=True)
    _print_config(args, methods=methods)
    analyses = [bench.analyze_corpus(formulas, mth, args.seed, **_method_params(args, mth))
                for mth in methods]
    for a in analyses:
        s = a["summary"]
        print(f"{a['transform']:>14}  median distinct quadratic {s['num_distinct_quadratic']['median']:g}"
              f"  median quadratic range {s['quadratic_range_size']['median']:g}")
    bench.atomic_write(out / "analysis.csv", bench.analysis_csv(analyses))
    bench.atomic_write(out / "analysis.json",
                       json.dumps({a["transform"]: a for a in analyses}, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def _bench_config(args) -> bench.ExperimentConfig:
    cfg = bench.load_config(args.config) if args.config else bench.ExperimentConfig(reads_per_instance=1000)
    changes = {}
    if args.config is None or "seed" in args.explicit:
        changes["seed"] = args.seed
    for flag, key in (("instances", "num_instances"), ("n", "n"), ("m", "m"),
                      ("reads", "reads_per_instance"), ("sweeps", "num_sweeps"),
                      ("beta_start", "beta_start"), ("beta_end", "beta_end"),
                      ("scaling", "apply_scaling"), ("jobs", "jobs")):
        value = getattr(args, flag)
        if value is not None:
            changes[key] = value
    if args.methods:
        changes["transforms"] = tuple(bench.TransformSpec(mth) for mth in args.methods)
    return cfg.replace(**changes)


def cmd_bench(args) -> int:
    cfg = _bench_config(args)
    _print_config(args, resolved=cfg.to_dict())
    out = _output_dir(args)
    if args.sweep_m:
        reports = bench.sweep_clauses(cfg, args.sweep_m)
        named = [(f"sweep_m{r.config['m']}", r) for r in reports]
    elif args.experiment == 1:
        named = [("experiment1", bench.run_experiment1(cfg))]
    elif args.experiment == 2:
        named = [("experiment2", bench.run_experiment2(cfg, args.factor))]
    else:
        named = [("experiment3", bench.run_experiment3(cfg, args.multipliers))]

    failures = 0
    for name, report in named:
        print(f"{name}: {report.backend}, {cfg.num_instances} instances x "
              f"{cfg.reads_per_instance} reads")
        print(f"  {'transform':<14} {'solved':>8} {'solved%':>8} {'correct':>9} {'correct%':>9}")
        for a in report.arms:
            print(f"  {a.transform:<14} {a.solved_instances:>8} {a.solved_pct:>8.2f} "
                  f"{a.correct_solutions:>9} {a.correct_pct:>9.2f}")
        for path in bench.emit_report(report, out / name):
            print(path)
        failures += report.failures
    if args.artifacts:
        bench.emit_artifacts(cfg, out / "artifacts")
    if failures:
        print(f"{failures} instance/transform units failed; see 'error' fields", file=sys.stderr)
        return EXIT_FAILURE
    return EXIT_OK


HANDLERS = {"generate": cmd_generate, "transform": cmd_transform, "solve": cmd_solve,
            "analyze": cmd_analyze, "bench": cmd_bench}


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    args.explicit = {a.lstrip("-").split("=")[0].replace("-", "_") for a in argv if a.startswith("--")}
    try:
        return HANDLERS[args.command](args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except InvalidParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except UnsupportedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except SatQuboError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
