"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 input error, 3 budget exceeded.
"""
from __future__ import annotations

import argparse
import json
import sys
import time

from . import cluster as cl
from . import fixtures
from .errors import CostOverflow, PixelArrayError
from .render import render_ascii, render_json, render_pbm
from .solver import DEFAULT_BUDGET, compare, compile, oracle_solve, solve
from .sysfile import parse_system

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--budget", type=int, default=DEFAULT_BUDGET,
                        help="max link entries per contraction step (default 1e9)")
    common.add_argument("--threads", type=int, default=None,
                        help="worker threads for plotting (default: $PIXELARRAY_THREADS or 1)")
    common.add_argument("--seed", type=int, default=0, help="seed for randomised commands")

    p = _Parser(prog="pixelarray", description="Pixel array solver for nonlinear systems.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    s = sub.add_parser("solve", parents=[common], help="solve a system file")
    s.add_argument("file")
    s.add_argument("--plan", default="auto",
                   help="auto, none, exhaustive, greedy, or a JSON plan file")
    s.add_argument("--out", help="X.pbm, X.json or - (stdout)")
    s.add_argument("--provenance", help="write plan, costs and timings as JSON here")

    s = sub.add_parser("plan", parents=[common], help="print a cluster tree and its costs")
    s.add_argument("file")
    s.add_argument("--strategy", default="auto",
                   choices=["auto", "exhaustive", "greedy", "none"])
    s.add_argument("--json", action="store_true", help="print the plan as JSON")

    s = sub.add_parser("oracle", parents=[common], help="brute-force walk over link entries")
    s.add_argument("file")
    s.add_argument("--subsamples", type=int, default=1)
    s.add_argument("--out")

    s = sub.add_parser("bench", parents=[common], help="timing report, or the clustering study")
    s.add_argument("file", nargs="?")
    s.add_argument("--repeat", type=int, default=3)
    s.add_argument("--study", action="store_true", help="run the random-diagram clustering study")
    s.add_argument("--trials", type=int, default=1000)
    s.add_argument("--max-packs", type=int, default=9)

    s = sub.add_parser("demo", parents=[common], help="run a built-in example")
    s.add_argument("name", choices=sorted(fixtures.DEMOS))
    s.add_argument("--out", default="-", help="X.pbm, X.json or - (default: stdout)")
    return p


def _load(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as err:
        raise PixelArrayError(f"cannot read {path}: {err.strerror}") from None
    return compile(parse_system(text))


def _write(array, out, stdout):
    if out is None:
        stdout.write(render_ascii(array))
        return
    if out == "-":
        data = render_pbm(array).decode() if len(array.pack) == 2 else render_json(array) + "\n"
        stdout.write(data)
        return
    if out.endswith(".pbm"):
        with open(out, "wb") as fh:
            fh.write(render_pbm(array))
    elif out.endswith(".json"):
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(render_json(array) + "\n")
    else:
        raise UsageError(f"--out must end in .pbm or .json, or be '-': {out}")


def _read_plan(wd, value):
    if value in ("auto", "none", "exhaustive", "greedy"):
        return value
    try:
        with open(value, encoding="utf-8") as fh:
            tree = cl.tree_from_json(json.load(fh))
    except OSError as err:
        raise PixelArrayError(f"cannot read plan {value}: {err.strerror}") from None
    except json.JSONDecodeError as err:
        raise PixelArrayError(f"plan {value} is not valid JSON: {err}") from None
    cl.validate_tree(wd, tree)
    return tree


def _summary(sol, stdout):
    arr = sol.array
    stdout.write(
        f"# {arr.count_on()} of {arr.pack.entry_count} pixels on over "
        f"({', '.join(arr.pack.names)}); plan {cl.tree_text(sol.plan, sol.problem.relation_ids)}; "
        f"{sol.timings['total']:.3f} s\n"
    )


def cmd_solve(args, stdout):
    problem = _load(args.file)
    sol = solve(problem, _read_plan(problem.diagram, args.plan), args.budget, args.threads)
    if args.out != "-":
        _summary(sol, stdout)
    _write(sol.array, args.out, stdout)
    if args.provenance:
        with open(args.provenance, "w", encoding="utf-8") as fh:
            json.dump(sol.provenance(), fh, indent=2)
    return EXIT_OK


def _print_tree(wd, tree, names, stdout, indent=0, root=True):
    pad = "  " * indent
    if isinstance(tree, cl.Leaf):
        stdout.write(f"{pad}{names[tree.index]}\n")
        return
    node = tree if isinstance(tree, cl.Node) else cl.Node((tree,))
    step = cl.step_diagram(wd, node, root)
    stdout.write(
        f"{pad}node [{', '.join(step.link_names)}] cost {cl.naive_cost(step)}"
        f" ({cl.naive_cost_exact(step)})\n"
    )
    for c in node.children:
        _print_tree(wd, c, names, stdout, indent + 1, False)


def cmd_plan(args, stdout):
    problem = _load(args.file)
    wd = problem.diagram
    tree = cl.plan(wd, args.strategy)
    names = problem.relation_ids
    if args.json:
        stdout.write(json.dumps(cl.tree_to_json(wd, tree, names), indent=2) + "\n")
        return EXIT_OK
    cost = cl.tree_cost(wd, tree)
    root = tree if isinstance(tree, cl.Node) else cl.Node((tree,))
    _print_tree(wd, root, names, stdout)
    stdout.write(f"tree: {cl.tree_text(tree, names)}\n")
    stdout.write(f"naive cost: {cl.naive_cost(wd)} ({cl.naive_cost_exact(wd)})\n")
    stdout.write(f"serial cost: {cost.serial} ({cost.serial_exact})\n")
    stdout.write(f"parallel cost: {cost.parallel} ({cost.parallel_exact})\n")
    return EXIT_OK


def cmd_oracle(args, stdout):
    problem = _load(args.file)
    start = time.perf_counter()
    arr = oracle_solve(problem, args.subsamples, budget=args.budget)
    if args.out != "-":
        stdout.write(
            f"# oracle: {arr.count_on()} of {arr.pack.entry_count} pixels on; "
            f"{time.perf_counter() - start:.3f} s\n"
        )
    _write(arr, args.out, stdout)
    return EXIT_OK


def _best_of(fn, repeat):
    best, result = float("inf"), None
    for _ in range(max(1, repeat)):
        start = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - start)
    return best, result


def cmd_bench(args, stdout):
    if args.study:
        start = time.perf_counter()
        rows = cl.clustering_study(args.trials, args.max_packs, args.seed)
        stdout.write("packs  trials  mean_ratio     median_ratio\n")
        for r in rows:
            stdout.write(f"{r.packs:5d}  {r.trials:6d}  {r.mean_ratio:.6e}  {r.median_ratio:.6e}\n")
        stdout.write(f"# {time.perf_counter() - start:.2f} s\n")
        return EXIT_OK
    if args.file is None:
        raise UsageError("bench needs a FILE or --study")
    problem = _load(args.file)
    t_plan, planned = _best_of(lambda: solve(problem, "auto", args.budget, args.threads), args.repeat)
    stdout.write(f"solve (planned):     {t_plan:.4f} s  {planned.array.count_on()} on\n")
    try:
        t_flat, flat = _best_of(lambda: solve(problem, "none", args.budget, args.threads), args.repeat)
        stdout.write(f"solve (unclustered): {t_flat:.4f} s  speedup x{t_flat / t_plan:.1f}\n")
    except CostOverflow as err:
        stdout.write(f"solve (unclustered): skipped ({err})\n")
    try:
        t_orc, orc = _best_of(lambda: oracle_solve(problem, 1, budget=args.budget), 1)
        rep = compare(planned.array, orc)
        stdout.write(
            f"oracle:              {t_orc:.4f} s  disagreements "
            f"{rep.only_in_a + rep.only_in_b}\n"
        )
    except CostOverflow as err:
        stdout.write(f"oracle:              skipped ({err})\n")
    return EXIT_OK


def cmd_demo(args, stdout):
    problem = compile(fixtures.load(args.name))
    sol = solve(problem, "auto", args.budget, args.threads)
    if args.out != "-":
        _summary(sol, stdout)
    _write(sol.array, args.out, stdout)
    return EXIT_OK


COMMANDS = {
    "solve": cmd_solve,
    "plan": cmd_plan,
    "oracle": cmd_oracle,
    "bench": cmd_bench,
    "demo": cmd_demo,
}


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("pixelarray: a command is required: " + ", ".join(COMMANDS))
        return COMMANDS[args.command](args, stdout)
    except UsageError as err:
        stderr.write(f"{err}\n")
        parser.print_usage(stderr)
        return EXIT_USAGE
    except CostOverflow as err:
        stderr.write(f"budget exceeded: {err}\n")
        return EXIT_BUDGET
    except PixelArrayError as err:
        stderr.write(f"error: {err}\n")
        return EXIT_INPUT


run = main


if __name__ == "__main__":
    sys.exit(main())
