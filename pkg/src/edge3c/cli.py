"""Command line front end.

Commands: solve one instance, sweep a parameter axis, dump a convergence
trace, generate a synthetic request matrix, validate an instance file.
Exit codes: 0 on success, 1 on any input problem, 2 when a solve (or any
sweep cell) fails to converge.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys

from .model import ConvergenceError, InputError, load_instance, validate_instance
from .matrix import RandomRows, Uniform, Zipf, build_matrix, save_matrix
from . import baselines, harness, solver

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NO_CONVERGENCE = 2


def _write_text(out: str, text: str) -> None:
    if out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _load_valid_instance(path: str):
    inst = load_instance(path)
    problems = validate_instance(inst)
    if problems:
        for p in problems:
            print(f"error: {path}: {p}", file=sys.stderr)
        raise InputError(f"{path}: {len(problems)} validation problem(s)")
    return inst


def _cmd_solve(args) -> int:
    inst = _load_valid_instance(args.instance)
    scheme = baselines.parse_scheme(args.scheme, zipf_gamma=args.gamma, random_seed=args.seed)
    res = baselines.run_any(inst, scheme)
    doc = {
        "scheme": args.scheme,
        "converged": bool(res.converged),
        "iterations": int(res.iterations),
        "max_cost": float(res.max_cost),
        "per_user_costs": [float(x) for x in res.per_user_costs],
        "bandwidth": [float(x) for x in res.policy.bandwidth],
        "cache": res.policy.cache.tolist(),
        "compute": res.policy.compute.tolist(),
        "trace": [float(x) for x in res.trace],
    }
    _write_text(args.out, json.dumps(doc, indent=2) + "\n")
    return EXIT_OK if res.converged else EXIT_NO_CONVERGENCE


def _cmd_validate(args) -> int:
    inst = load_instance(args.instance)
    problems = validate_instance(inst)
    if problems:
        for p in problems:
            print(f"{args.instance}: {p}", file=sys.stderr)
        return EXIT_INPUT
    print("ok")
    return EXIT_OK


def _cmd_trace(args) -> int:
    inst = _load_valid_instance(args.instance)
    res = solver.solve_joint(inst)
    rows = [
        {"seed": int(inst.seed), "iteration": k, "delta_cost": abs(float(d))}
        for k, d in enumerate(res.trace, start=1)
    ]
    if args.out == "-":
        harness.write_trace_csv(rows, sys.stdout)
    else:
        harness.write_trace_csv(rows, args.out)
    return EXIT_OK if res.converged else EXIT_NO_CONVERGENCE


def _cmd_gen_matrix(args) -> int:
    source = {
        "uniform": Uniform(),
        "zipf": Zipf(args.gamma),
        "random": RandomRows(args.seed),
    }[args.kind]
    m = build_matrix(source, args.rows, args.cols)
    if args.out == "-":
        save_matrix(m, sys.stdout)
    else:
        save_matrix(m, args.out)
    return EXIT_OK


_PARAM_ALIASES = {
    "edge_cps": ("edge_cps", 1.0),
    "edge_gcps": ("edge_cps", 1e9),
    "cache_capacity": ("cache_capacity", 1.0),
    "users": ("users", 1.0),
    "bandwidth_hz": ("bandwidth_hz", 1.0),
    "bandwidth_mhz": ("bandwidth_hz", 1e6),
}

_DEFAULT_ALIASES = {
    "users": ("users", 1.0),
    "contents": ("contents", 1.0),
    "cache_capacity": ("cache_capacity", 1.0),
    "bandwidth_hz": ("bandwidth_hz", 1.0),
    "bandwidth_mhz": ("bandwidth_hz", 1e6),
    "edge_cps": ("edge_cps", 1.0),
    "edge_gcps": ("edge_cps", 1e9),
    "plain_size_bits": ("plain_size_bits", 1.0),
    "plain_size_mbits": ("plain_size_bits", 1e6),
    "gain_db": ("gain_db", 1.0),
    "energy_weight": ("energy_weight", 1.0),
    "time_weight": ("time_weight", 1.0),
}

_INT_DEFAULT_FIELDS = ("users", "contents", "cache_capacity")


def _sweep_spec_from_dict(doc) -> harness.SweepSpec:
    if not isinstance(doc, dict):
        raise InputError("config: expected a JSON object")
    known = {"parameter", "values", "seeds", "schemes", "record", "zipf_gamma", "defaults"}
    extra = set(doc) - known
    if extra:
        raise InputError(f"config: unknown keys {sorted(extra)}")
    for key in ("parameter", "values", "seeds", "schemes"):
        if key not in doc:
            raise InputError(f"config: missing required key {key!r}")
    alias = _PARAM_ALIASES.get(doc["parameter"])
    if alias is None:
        raise InputError(
            f"config: unknown parameter {doc['parameter']!r}; choose from {sorted(_PARAM_ALIASES)}"
        )
    parameter, scale = alias
    values = [v * scale for v in doc["values"]]
    if parameter in ("cache_capacity", "users"):
        values = [int(v) for v in values]
    defaults = harness.SimDefaults()
    overrides = doc.get("defaults", {})
    if not isinstance(overrides, dict):
        raise InputError("config: defaults must be an object")
    fields = {}
    for key, value in overrides.items():
        found = _DEFAULT_ALIASES.get(key)
        if found is None:
            raise InputError(f"config: unknown defaults key {key!r}")
        name, fscale = found
        fields[name] = int(value) if name in _INT_DEFAULT_FIELDS else float(value) * fscale
    if fields:
        defaults = dataclasses.replace(defaults, **fields)
    kwargs = {}
    if "record" in doc:
        kwargs["record"] = tuple(doc["record"])
    if "zipf_gamma" in doc:
        kwargs["zipf_gamma"] = float(doc["zipf_gamma"])
    return harness.SweepSpec(
        parameter=parameter,
        values=tuple(values),
        seeds=tuple(doc["seeds"]),
        schemes=tuple(doc["schemes"]),
        defaults=defaults,
        **kwargs,
    )


def _cmd_sweep(args) -> int:
    try:
        with open(args.config) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as e:
        raise InputError(f"{args.config}: invalid JSON: {e}") from None
    spec = _sweep_spec_from_dict(doc)
    rows = harness.run_sweep(spec, jobs=args.jobs)
    os.makedirs(args.out, exist_ok=True)
    harness.write_results_csv(rows, os.path.join(args.out, "results.csv"))
    harness.write_summary_csv(rows, os.path.join(args.out, "summary.csv"))
    bad = sum(1 for r in rows if not r["converged"])
    print(f"wrote {len(rows)} rows to {os.path.join(args.out, 'results.csv')}")
    if bad:
        print(f"warning: {bad} of {len(rows)} cells failed or did not converge", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="edge3c",
        description="Joint caching, computing and bandwidth allocation for edge VR delivery.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve one instance and print the result as JSON")
    p.add_argument("--instance", required=True, help="instance JSON file")
    p.add_argument("--scheme", default="proposed", choices=baselines.SCHEME_CHOICES)
    p.add_argument("--gamma", type=float, default=1.0, help="zipf-cache exponent")
    p.add_argument("--seed", type=int, default=0, help="random-cache surrogate seed")
    p.add_argument("--out", default="-", help="output path, - for stdout")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("sweep", help="run a parameter sweep from a JSON config")
    p.add_argument("--config", required=True, help="sweep config JSON file")
    p.add_argument("--out", required=True, help="output directory for results.csv and summary.csv")
    p.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("trace", help="emit the convergence trace of one instance as CSV")
    p.add_argument("--instance", required=True, help="instance JSON file")
    p.add_argument("--out", default="-", help="output path, - for stdout")
    p.set_defaults(func=_cmd_trace)

    p = sub.add_parser("gen-matrix", help="generate a synthetic request matrix CSV")
    p.add_argument("--kind", required=True, choices=("uniform", "zipf", "random"))
    p.add_argument("--gamma", type=float, default=1.0, help="zipf exponent")
    p.add_argument("--rows", type=int, required=True, help="number of users")
    p.add_argument("--cols", type=int, required=True, help="number of contents")
    p.add_argument("--seed", type=int, default=0, help="seed for --kind random")
    p.add_argument("--out", default="-", help="output path, - for stdout")
    p.set_defaults(func=_cmd_gen_matrix)

    p = sub.add_parser("validate", help="check an instance file against the model invariants")
    p.add_argument("--instance", required=True, help="instance JSON file")
    p.set_defaults(func=_cmd_validate)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if not e.code else EXIT_INPUT
    try:
        return args.func(args)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except ConvergenceError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE


if __name__ == "__main__":
    sys.exit(main())
