"""Command line interface: ``fringestat {gen,params,constants,simulate,verify}``.

Exit codes: 0 success, 1 computation or gate failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import constants as const
from . import montecarlo as mc
from . import oracle, params, rng
from . import verify as verify_mod
from .fringe import property_a
from .generate import generate
from .tree import TreeError, tree_from_json, tree_to_dict, tree_to_dot, tree_to_json

WORKERS_ENV = "FRINGESTAT_WORKERS"


class UsageError(Exception):
    pass


def _dump(obj) -> str:
    # json uses repr() for floats, i.e. the shortest round-trip decimal
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def _emit(text: str, out_dir: str | None, filename: str) -> None:
    if out_dir is None:
        sys.stdout.write(text)
        return
    path = Path(out_dir)
    path.mkdir(parents=True, exist_ok=True)
    (path / filename).write_text(text)


def _u64(text: str) -> int:
    try:
        return rng.check_seed(int(text, 0))
    except (TypeError, ValueError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive(text: str) -> int:
    value = int(float(text)) if "e" in text.lower() else int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return value


def _int_list(text: str) -> list[int]:
    try:
        return [_positive(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers: {exc}") from None


# -- subcommands -------------------------------------------------------------------

def cmd_gen(args) -> int:
    if args.format == "csv":
        raise UsageError("gen writes json or dot")
    sample = generate(args.model, args.n, args.seed, args.replica)
    if args.format == "dot":
        text, ext = tree_to_dot(sample.tree), "dot"
    else:
        text, ext = tree_to_json(sample.tree), "json"
    _emit(text, args.out, f"tree_{args.model}_n{args.n}_s{args.seed}_r{args.replica}.{ext}")
    return 0


def _load_tree(args):
    if args.tree is not None:
        if args.model is not None or args.n is not None:
            raise UsageError("--tree conflicts with --model/--n")
        try:
            text = Path(args.tree).read_text()
        except OSError as exc:
            raise UsageError(f"cannot read tree file: {exc}") from None
        try:
            return tree_from_json(text)
        except TreeError as exc:
            raise UsageError(f"tree file {args.tree}: {exc}") from None
    if args.model is None or args.n is None:
        raise UsageError("give --tree FILE or --model and --n")
    return generate(args.model, args.n, args.seed, args.replica).tree


def cmd_params(args) -> int:
    tree = _load_tree(args)
    try:
        report = params.full_report(tree, args.k)
    except params.ModelConstraintError as exc:
        raise UsageError(str(exc)) from None
    out = report.to_dict()
    if args.flags:
        dom = params.domination(tree)
        toll = dom.ri_contains_root.copy()
        toll[0] = property_a(tree, dom.rd, dom.ri_contains_root)
        out["flags"] = {
            "independence": params.independence(tree).in_set.astype(int).tolist(),
            "root_dependent": dom.rd.astype(int).tolist(),
            "root_independent_contains_root": dom.ri_contains_root.astype(int).tolist(),
            "domination_toll": toll.astype(int).tolist(),
        }
    if args.format == "csv":
        rows = ["key,value"]
        for key, value in report.to_dict().items():
            if key == "Dk":
                rows.extend(f"D{k},{v}" for k, v in value.items())
            else:
                rows.append(f"{key},{'' if value is None else value}")
        text = "\n".join(rows) + "\n"
    elif args.format == "json":
        text = _dump(out)
    else:
        raise UsageError("params writes json or csv")
    _emit(text, args.out, f"params.{args.format}")
    return 0


def cmd_constants(args) -> int:
    if args.format != "json":
        raise UsageError("constants writes json")
    if args.tolerance <= 0:
        raise UsageError("--tolerance must be positive")
    report = const.constants_report(args.truncation, args.tolerance)
    _emit(_dump(report.to_dict()), args.out, "constants.json")
    for err in report.errors:
        print(f"error: {err}", file=sys.stderr)
    return 0 if report.ok else 1


def _workers(args) -> int:
    if args.workers is not None:
        return args.workers
    env = os.environ.get(WORKERS_ENV)
    if env:
        try:
            return _positive(env)
        except (ValueError, argparse.ArgumentTypeError):
            raise UsageError(f"{WORKERS_ENV} must be a positive integer, got {env!r}") from None
    return 1


def cmd_simulate(args) -> int:
    if args.format != "csv":
        raise UsageError("simulate writes csv rows plus json summaries")
    try:
        spec = mc.ExperimentSpec(
            model=args.model,
            parameter=mc.Parameter.parse(args.param),
            sizes=tuple(args.sizes),
            replicas=args.replicas,
            master_seed=args.seed,
            workers=_workers(args),
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    try:
        result = mc.run_experiment(spec)
    except mc.ExperimentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    stem = f"{spec.model.value}_{spec.parameter}"
    (out / f"{stem}.csv").write_text(result.csv())
    for s in result.summaries:
        (out / f"{stem}_n{s.n}_summary.json").write_text(_dump(s.to_dict()))
    status = 0
    if args.gates:
        gates = mc.evaluate_gates(result)
        (out / f"{stem}_gates.json").write_text(_dump([g.__dict__ for g in gates]))
        for g in gates:
            print(f"{'PASS' if g.passed else 'FAIL'}  {g.name:<28} {g.detail}")
        if not gates:
            print("no gate applies to these sizes/replica counts")
        status = 0 if all(g.passed for g in gates) else 1
    return status


def cmd_verify(args) -> int:
    if args.max_n > oracle.MAX_N_SUBSETS:
        raise UsageError(f"--max-n {args.max_n} exceeds the oracle budget of {oracle.MAX_N_SUBSETS}")
    tallies = verify_mod.verify(args.trees, args.max_n, args.seed)
    print(f"{'check':<24} {'trees':>6}  result")
    for t in tallies:
        print(f"{t.name:<24} {t.checked:>6}  {'pass' if t.passed else 'FAIL'}")
    failed = [t for t in tallies if not t.passed]
    for t in failed:
        tree, got, want = t.failures[0]
        print(f"counterexample for {t.name}: fast={got} oracle={want}")
        print(json.dumps(tree_to_dict(tree), separators=(",", ":")))
    return 1 if failed else 0


# -- parser ------------------------------------------------------------------------

def _shared(p: argparse.ArgumentParser, fmt: str) -> None:
    p.add_argument("--seed", type=_u64, default=0, help="unsigned 64-bit master seed")
    p.add_argument("--out", default=None, help="output directory (default: stdout)")
    p.add_argument("--format", choices=("json", "csv", "dot"), default=fmt)
    p.add_argument("--config", default=None, help="key=value file with default flag values")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fringestat", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a random tree")
    p.add_argument("--model", choices=("bst", "rrt"), required=True)
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--replica", type=int, default=0)
    _shared(p, "json")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("params", help="graph parameters of one tree")
    p.add_argument("--tree", default=None, help="tree JSON file")
    p.add_argument("--model", choices=("bst", "rrt"), default=None)
    p.add_argument("--n", type=_positive, default=None)
    p.add_argument("--replica", type=int, default=0)
    p.add_argument("--k", type=_int_list, default=[2, 3], help="k-domination orders, e.g. 2,3")
    p.add_argument("--flags", action="store_true", help="include per-node flags")
    _shared(p, "json")
    p.set_defaults(func=cmd_params)

    p = sub.add_parser("constants", help="mean-growth constants by series and quadrature")
    p.add_argument("--truncation", type=_positive, default=const.DEFAULT_TRUNCATION)
    p.add_argument("--tolerance", type=float, default=const.DEFAULT_TOLERANCE)
    _shared(p, "json")
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("simulate", help="Monte Carlo experiment")
    p.add_argument("--model", choices=("bst", "rrt"), required=True)
    p.add_argument("--param", required=True, help="I, D, M, VC, EC, CC or D<k>")
    p.add_argument("--sizes", type=_int_list, required=True, help="e.g. 1e3,1e4,1e5")
    p.add_argument("--replicas", type=_positive, default=400)
    p.add_argument("--workers", type=_positive, default=None, help=f"default ${WORKERS_ENV} or 1")
    p.add_argument("--gates", action="store_true", help="evaluate pre-registered gates")
    _shared(p, "csv")
    p.set_defaults(func=cmd_simulate, out="runs")

    p = sub.add_parser("verify", help="compare fast algorithms with brute force")
    p.add_argument("--trees", type=_positive, default=500)
    p.add_argument("--max-n", type=_positive, default=14)
    _shared(p, "json")
    p.set_defaults(func=cmd_verify, seed=7)
    return parser


def _read_config(path: str) -> dict[str, str]:
    values = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config: {exc}") from None
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"config {path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        values[key.replace("-", "_")] = value
    return values


def _prescan(argv: list[str]) -> tuple[str | None, str | None]:
    command = config = None
    it = iter(argv)
    for tok in it:
        if tok == "--config":
            config = next(it, None)
        elif tok.startswith("--config="):
            config = tok.split("=", 1)[1]
        elif command is None and not tok.startswith("-"):
            command = tok
    return command, config


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> argparse.Namespace:
    command, config = _prescan(argv)
    choices = parser._subparsers._group_actions[0].choices
    if config and command in choices:
        subparser = choices[command]
        actions = {a.dest: a for a in subparser._actions}
        for key, raw in _read_config(config).items():
            action = actions.get(key)
            if action is None or key in ("config", "help"):
                raise UsageError(f"config key {key!r} is not an option of {command}")
            if action.nargs == 0:
                value = raw.lower() in ("1", "true", "yes", "on")
            else:
                try:
                    value = action.type(raw) if action.type else raw
                except (argparse.ArgumentTypeError, ValueError) as exc:
                    raise UsageError(f"config key {key!r}: {exc}") from None
                if action.choices is not None and value not in action.choices:
                    raise UsageError(f"config key {key!r}: {value!r} not in {list(action.choices)}")
            subparser.set_defaults(**{key: value})
            action.required = False
    # explicit flags still win: config only changed the defaults
    return parser.parse_args(argv)


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"fringestat: error: {exc}", file=sys.stderr)
        return 2
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"fringestat {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, oracle.BudgetExceeded) as exc:
        print(f"fringestat {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
