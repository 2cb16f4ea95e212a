"""Command-line front end.

Exit codes: 0 non-contextual (or success), 10 weakly contextual, 11 logically
contextual, 12 strongly contextual, 13 no Kochen-Specker coloring, 2 invalid
input.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence

from . import io
from .bundle import bundle_graph, to_dot
from .errors import ContextualityError
from .hidden import check_hidden_distribution
from .pba import pba_valuations, validate_pba
from .possibilistic import Level, classify
from .quantum import realization_to_model
from .sampling import UNDEFINED, SamplingConfig, sample, weights_from_json
from .scenario import context_key, format_fraction, result_key
from .vectors import ks_colorable

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_CODES = {
    Level.NONCONTEXTUAL: 0,
    Level.WEAK: 10,
    Level.LOGICAL: 11,
    Level.STRONG: 12,
}
EXIT_UNCOLORABLE = 13


class _Output:
    def __init__(self, args: argparse.Namespace) -> None:
        self.path = getattr(args, "output", None)
        self.quiet = getattr(args, "quiet", False)

    def emit(self, text: str) -> None:
        if self.path:
            Path(self.path).write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)

    def note(self, text: str) -> None:
        if not self.quiet:
            print(text, file=sys.stderr)


def cmd_classify(args, out: _Output) -> int:
    result = classify(io.load_model(args.file))
    out.emit(io.dumps(result.to_json()))
    out.note(f"level: {result.level.value}; signalling: {str(result.signalling).lower()}")
    return EXIT_CODES[result.level]


def cmd_hidden(args, out: _Output) -> int:
    cert = check_hidden_distribution(io.load_model(args.file))
    out.emit(io.dumps(cert.to_json()))
    if not cert.feasible:
        out.note(f"no hidden distribution: value {cert.value} > classical bound {cert.classical_bound}")
    return EXIT_OK if cert.feasible else EXIT_CODES[Level.WEAK]


def cmd_bundle(args, out: _Output) -> int:
    out.emit(to_dot(bundle_graph(io.load_model(args.file))))
    return EXIT_OK


def cmd_sample(args, out: _Output) -> int:
    model = io.load_model(args.file)
    weights = weights_from_json(model, io.read_json(args.weights)) if args.weights else {}
    run = sample(model, SamplingConfig(args.rounds, args.seed, weights))
    doc = io.scenario_to_json(model.scenario)
    empirical, deviation = run.empirical(), run.deviation()
    doc["tables"] = {}
    doc["deviation"] = {}
    for ctx in model.scenario.contexts:
        key = context_key(ctx)
        if empirical[ctx] is None:
            doc["tables"][key] = UNDEFINED
            doc["deviation"][key] = UNDEFINED
        else:
            doc["tables"][key] = {result_key(r): format_fraction(p) for r, p in empirical[ctx].items()}
            doc["deviation"][key] = {result_key(r): format_fraction(d) for r, d in deviation[ctx].items()}
    doc["counts"] = {context_key(ctx): run.tally(ctx) for ctx in model.scenario.contexts}
    doc["rounds"] = args.rounds
    doc["seed"] = args.seed
    out.emit(io.dumps(doc))
    worst = max((float(d) for row in deviation.values() if row for d in row.values()), default=None)
    tv = {k: v for k, v in run.total_variation().items() if v is not None}
    out.note(
        f"rounds: {args.rounds}; seed: {args.seed}; undefined rows: {sum(v is None for v in empirical.values())}"
        + ("" if worst is None else f"; max cell deviation: {worst:.6f}; max TV: {float(max(tv.values())):.6f}")
    )
    return EXIT_OK


def cmd_quantum(args, out: _Output) -> int:
    model = realization_to_model(io.realization_from_json(io.read_json(args.file)))
    out.emit(io.dumps(io.model_to_json(model)))
    return EXIT_OK


def cmd_ks(args, out: _Output) -> int:
    vc = io.configuration_from_json(io.read_json(args.file))
    result = ks_colorable(vc)
    out.emit(io.dumps(result.to_json()))
    out.note(f"{len(vc)} vectors, {len(vc.contexts)} contexts: {'colorable' if result.colorable else 'uncolorable'}")
    return EXIT_OK if result.colorable else EXIT_UNCOLORABLE


def cmd_pba(args, out: _Output) -> int:
    p = io.pba_from_json(io.read_json(args.file))
    problems = validate_pba(p)
    if problems:
        for v in problems:
            print(f"error: {v}", file=sys.stderr)
        return EXIT_INVALID
    vals = pba_valuations(p)
    out.emit(io.dumps({"valuations": [{x: v.values[x] for x in p.elements} for v in vals]}))
    out.note(f"{len(p.elements)} elements, {len(p.maximal_cliques)} maximal cliques, {len(vals)} valuations")
    return EXIT_OK if vals else EXIT_UNCOLORABLE


def _non_negative(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", "-o", default=argparse.SUPPRESS, help="write the result here instead of stdout")
    common.add_argument("--quiet", "-q", action="store_true", default=argparse.SUPPRESS, help="no summary on stderr")

    parser = argparse.ArgumentParser(prog="contextuality", description=__doc__.splitlines()[0], parents=[common])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", parents=[common], help="place a model in the contextuality hierarchy")
    p.add_argument("file")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("hidden", parents=[common], help="hidden distribution or violated Bell functional")
    p.add_argument("file")
    p.set_defaults(func=cmd_hidden)

    p = sub.add_parser("bundle", parents=[common], help="bundle diagram as DOT text")
    p.add_argument("file")
    p.add_argument("--format", choices=["dot"], default="dot")
    p.set_defaults(func=cmd_bundle)

    p = sub.add_parser("sample", parents=[common], help="simulate measurement rounds")
    p.add_argument("file")
    p.add_argument("--rounds", type=_non_negative, required=True)
    p.add_argument("--seed", type=_non_negative, required=True)
    p.add_argument("--weights", help="JSON object of context weights (default uniform)")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("quantum", parents=[common], help="compile a quantum realization into a model")
    p.add_argument("file")
    p.set_defaults(func=cmd_quantum)

    p = sub.add_parser("ks", parents=[common], help="Kochen-Specker coloring search")
    p.add_argument("file")
    p.set_defaults(func=cmd_ks)

    p = sub.add_parser("pba", parents=[common], help="validate a partial Boolean algebra and list its valuations")
    p.add_argument("file")
    p.set_defaults(func=cmd_pba)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    out = _Output(args)
    try:
        return args.func(args, out)
    except ContextualityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
