"""Command-line entry point.  Every report is JSON on stdout and embeds the run configuration.

Exit codes: 0 when all checks pass, 1 when a verification fails, 2 on usage errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass, field
from typing import Any, Sequence

from . import crosswired, groups, mealy, normal_form, representation, tree_action

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    group: str
    levels: int | None = None
    depth: int | None = None
    samples: int | None = None
    seed: int = 0
    out: str | None = None
    extra: dict[str, Any] = field(default_factory=dict)


def _positive(name: str, value: int | None) -> None:
    if value is not None and value < 0:
        raise UsageError(f"--{name} must be nonnegative")


def _word(G, text: str | None):
    if not text:
        raise UsageError("--word is required")
    try:
        return tree_action.parse_word(G, text)
    except (ValueError, groups.GroupError) as exc:
        raise UsageError(str(exc)) from None


# ------------------------------------------------------------------ commands

def cmd_info(G, args) -> dict:
    report = groups.structural_report(G)
    if report["nilpotency_class"] == 2:
        report["central_squares_subgroup"] = [G.names[i] for i in sorted(groups.central_squares_subgroup(G))]
    report["passed"] = True
    return report


def _machine(G, args):
    M = mealy.cayley_machine(G) if args.kind == "cayley" else mealy.reset_automaton(G)
    return mealy.invert(M) if args.inverse else M


def cmd_machine(G, args) -> dict | str:
    M = _machine(G, args)
    if args.dot:
        return mealy.export_dot(M, f"{args.kind}_{G.label}")
    return {"kind": args.kind, "inverse": args.inverse, "machine": M.to_json(), "passed": True}


def cmd_act(G, args) -> dict:
    letters = args.input.split() if args.input else []
    try:
        w = [G.index(s) for s in letters]
    except groups.GroupError as exc:
        raise UsageError(str(exc)) from None
    if args.word:
        e = _word(G, args.word)
        img = tree_action.evaluate(G, e, w)
        return {"element": args.word, "input": letters, "output": [G.names[i] for i in img], "passed": True}
    if args.state is None:
        raise UsageError("act needs --state or --word")
    M = _machine(G, args)
    img = mealy.act_word(M, G.index(args.state), w)
    return {"state": args.state, "input": letters, "output": [G.names[i] for i in img], "passed": True}


def cmd_nf(G, args) -> dict:
    e = _word(G, args.word)
    p = normal_form.reduce(G, e)
    d = args.depth or 8
    sound = tree_action.equal_at_depth(G, e, normal_form.expand(p), d)
    dep = tree_action.depth(G, e, d) if p.is_torsion else None
    return {
        "word": args.word,
        "normal_form": p.to_json(G),
        "expanded": tree_action.format_word(G, normal_form.expand(p)),
        "depth": None if dep is None else (dep if isinstance(dep, int) else "exceeds_bound"),
        "checked_depth": d,
        "passed": sound,
    }


def cmd_order(G, args) -> dict:
    p = normal_form.reduce(G, _word(G, args.word))
    o = normal_form.torsion_order(G, p)
    return {"word": args.word, "normal_form": p.to_json(G), "order": o if isinstance(o, int) else "infinite", "passed": True}


def cmd_verify_presentation(G, args) -> dict:
    return tree_action.verify_presentation(G, args.levels if args.levels is not None else 3, args.depth or 10)


def _rep(G):
    try:
        return representation.representation_for(G)
    except groups.GroupError as exc:
        raise UsageError(str(exc)) from None


def cmd_rep(G, args) -> dict | str:
    rep = _rep(G)
    try:
        if args.word:
            M = rep.of_nf(normal_form.reduce(G, _word(G, args.word)))
        else:
            M = representation.alpha(rep, args.item or "a")
    except (representation.ParityError, groups.GroupError) as exc:
        raise UsageError(str(exc)) from None
    if args.pretty:
        return M.pretty() + "\n"
    return {"dim": M.dim, "item": args.word or args.item or "a", "matrix": M.to_json(), "passed": True}


def cmd_verify_rep(G, args) -> dict:
    rep = _rep(G)
    w = args.window
    return representation.verify_representation(
        rep,
        level_bound=args.levels if args.levels is not None else 3,
        window=tuple(range(-w, w + 1)),
        samples=args.samples or 0,
        seed=args.seed,
    )


def cmd_crosswired(G, args) -> dict:
    d = args.depth or 3
    return crosswired.certificate(
        G,
        index_depths=tuple(range(2, d + 1)) or (d,),
        exhaustive_levels=2,
        level_bound=args.levels if args.levels is not None else 3,
        samples=args.samples if args.samples is not None else 1000,
        seed=args.seed,
    )


def cmd_free_semigroup(G, args) -> dict:
    length = args.levels or 3
    d = args.depth or 5
    coll = tree_action.free_semigroup_collisions(G, length, d) if G.size > 1 else []
    fmt = lambda sw: " ".join(f"s:{G.names[g]}" for g in sw)
    return {
        "max_length": length,
        "depth": d,
        "words": len(tree_action.positive_state_words(G.size, length)),
        "collisions": [[fmt(a), fmt(b)] for a, b in coll[:10]],
        "passed": not coll,
    }


COMMANDS = {
    "info": cmd_info,
    "machine": cmd_machine,
    "act": cmd_act,
    "nf": cmd_nf,
    "order": cmd_order,
    "verify-presentation": cmd_verify_presentation,
    "rep": cmd_rep,
    "verify-rep": cmd_verify_rep,
    "crosswired": cmd_crosswired,
    "free-semigroup": cmd_free_semigroup,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cayley-machines", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--group", default="q8", help="q8, d8, cN, mN or a JSON file")
    common.add_argument("--levels", type=int)
    common.add_argument("--depth", type=int)
    common.add_argument("--samples", type=int)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--pretty", action="store_true")
    common.add_argument("--out")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name in ("machine", "act"):
            p.add_argument("--kind", choices=["cayley", "reset"], default="cayley")
            p.add_argument("--inverse", action="store_true")
        if name == "machine":
            p.add_argument("--dot", action="store_true")
        if name == "act":
            p.add_argument("--state")
            p.add_argument("--input", default="", help="space-separated letters")
        if name in ("act", "nf", "order", "rep"):
            p.add_argument("--word", help='e.g. "g:b x g:a x^-1"')
        if name == "rep":
            p.add_argument("--item", help='generator descriptor such as "xax^-1" or "x^2"')
        if name == "verify-rep":
            p.add_argument("--window", type=int, default=1, help="faithfulness over levels -W..W")
    return parser


def _render(report: Any, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(report, dict):
        lines = []
        for k, v in report.items():
            if isinstance(v, (dict, list)) and v and not all(isinstance(x, (int, str)) for x in v):
                lines.append(f"{pad}{k}:")
                lines.append(_render(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {json.dumps(v)}")
        return "\n".join(lines)
    if isinstance(report, list):
        return "\n".join(f"{pad}- {json.dumps(v)}" for v in report)
    return pad + json.dumps(report)


def run(argv: Sequence[str] | None = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    config = RunConfig(args.command, args.group, args.levels, args.depth, args.samples, args.seed, args.out)
    config.extra = {k: v for k, v in vars(args).items() if k not in asdict(config) and k != "command"}
    try:
        for name in ("levels", "depth", "samples"):
            _positive(name, getattr(args, name))
        G = groups.build_group(args.group)
        result = COMMANDS[args.command](G, args)
    except (UsageError, groups.GroupError) as exc:
        diag = {"error": type(exc).__name__, "message": str(exc), "config": asdict(config)}
        print(json.dumps(diag), file=sys.stderr)
        return EXIT_USAGE
    if isinstance(result, str):
        text, passed = result, True
    else:
        report = {"config": asdict(config), **result}
        passed = bool(report.get("passed", True))
        text = (_render(report) if args.pretty else json.dumps(report, sort_keys=False)) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return EXIT_OK if passed else EXIT_FAIL


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
