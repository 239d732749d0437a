"""Command-line driver.

Every command prints one JSON document on stdout; diagnostics go to
stderr.  Exit status is 0 on success, 2 when a phrase has no derivation
and 1 on malformed input or a failed computation.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

import numpy as np

from . import __version__
from .ambiguity import enumerate_readings, permutation_route
from .dot import readings_to_dot
from .errors import LambekError
from .fit import Sample, fit_metric
from .lexicon import LexiconFormatError, load_judgments, load_lexicon_file
from .logic import Mode, parse, parse_type
from .tensor import cosine_similarity
from .terms import extract_term, format_term

log = logging.getLogger("lambek_dm")

EXIT_OK, EXIT_ERROR, EXIT_NO_PARSE = 0, 1, 2


class NoParse(Exception):
    pass


def _emit(data):
    sys.stdout.write(json.dumps(data, indent=2) + "\n")


def _phrase_args(p):
    p.add_argument("lexicon", help="lexicon JSON file")
    p.add_argument("phrase", help="words separated by spaces")
    p.add_argument("goal", help="goal type, e.g. 'n' or 's'")
    p.add_argument("--mode", choices=[m.value for m in Mode], default="NL")
    p.add_argument("--intro-budget", type=int, default=2)


def _readings(args):
    lf = load_lexicon_file(args.lexicon)
    lex = lf.to_lexicon()
    words = args.phrase.split()
    readings = enumerate_readings(words, lex, parse_type(args.goal), args.mode, args.intro_budget)
    if not readings:
        raise NoParse(args.phrase)
    return lex, readings


def _reading_json(index, reading):
    return {
        "index": index,
        "term": format_term(reading.term),
        "subsystems": {
            name: list(reading.subsystems[name])
            for name in reading.variables
        },
        "words": reading.words,
        "value": reading.value.to_json(),
    }


def cmd_parse(args):
    lf = load_lexicon_file(args.lexicon)
    types = {e["word"]: parse_type(e["type"]) for e in lf.entries}
    derivations = parse(types, args.phrase.split(), parse_type(args.goal), args.mode, args.intro_budget)
    terms = [format_term(extract_term(d)) for d in derivations]
    _emit({"derivations": terms, "count": len(terms)})
    return EXIT_OK if terms else EXIT_NO_PARSE


def cmd_interpret(args):
    lex, readings = _readings(args)
    if args.reading == "all":
        chosen = list(enumerate(readings))
    else:
        i = int(args.reading)
        if not 0 <= i < len(readings):
            raise LexiconFormatError(f"reading {i} out of range (have {len(readings)})")
        chosen = [(i, readings[i])]
    if args.emit_dot:
        with open(args.emit_dot, "w") as fh:
            fh.write(readings_to_dot([r for _, r in chosen], lex))
        log.info("wrote %s", args.emit_dot)
    _emit({"count": len(readings), "readings": [_reading_json(i, r) for i, r in chosen]})
    return EXIT_OK


def cmd_similarity(args):
    lf = load_lexicon_file(args.lexicon)
    metric = lf.metric_for(args.metric)
    v, w = lf.vector(args.word_a), lf.vector(args.word_b)
    sim = cosine_similarity(metric, v, w)
    _emit({"a": args.word_a, "b": args.word_b, "metric": args.metric, "similarity": sim})
    return EXIT_OK


def cmd_fit_metric(args):
    lf = load_lexicon_file(args.lexicon)
    rows = load_judgments(args.judgments)
    if args.atom not in lf.atoms:
        raise LexiconFormatError(f"unknown atom {args.atom!r}")
    dim = lf.atoms[args.atom]
    samples = [Sample(lf.vector(a), lf.vector(b), sim) for a, b, sim in rows]
    init = None
    seed = os.environ.get("LAMBEK_DM_SEED")
    if seed is not None:
        rng = np.random.default_rng(int(seed))
        noise = rng.normal(scale=1e-3, size=(dim, dim))
        init = np.eye(dim) + (noise + noise.T) / 2
    result = fit_metric(samples, args.reg, dim=dim, init=init)
    metric_json = result.metric.to_json()
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(metric_json, fh, indent=2)
            fh.write("\n")
        log.info("wrote %s", args.out)
    _emit(
        {
            "objective": result.objective,
            "iterations": result.iterations,
            "converged": result.converged,
            "metric": metric_json,
        }
    )
    return EXIT_OK


def cmd_route(args):
    lex, readings = _readings(args)
    n = len(readings)
    if not (0 <= args.from_ < n and 0 <= args.to < n):
        raise LexiconFormatError(f"reading indices must be in [0, {n})")
    route = permutation_route(readings[args.from_], readings[args.to].derivation, lex)
    _emit(
        {
            "from": args.from_,
            "to": args.to,
            "sequence": route.sequence,
            "traced": sorted(route.traced),
            "value": route.value.to_json(),
        }
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lambek-dm", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="list the derivations of a phrase")
    _phrase_args(p)
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("interpret", help="evaluate the readings of a phrase")
    _phrase_args(p)
    p.add_argument("--reading", default="all", help="reading index or 'all'")
    p.add_argument("--emit-dot", metavar="PATH", help="write a contraction diagram")
    p.set_defaults(func=cmd_interpret)

    p = sub.add_parser("similarity", help="cosine similarity of two vector entries")
    p.add_argument("lexicon")
    p.add_argument("word_a")
    p.add_argument("word_b")
    p.add_argument("--metric", required=True, metavar="ATOM", help="atom or space whose metric to use")
    p.set_defaults(func=cmd_similarity)

    p = sub.add_parser("fit-metric", help="fit a metric to similarity judgments")
    p.add_argument("lexicon")
    p.add_argument("judgments")
    p.add_argument("--atom", required=True)
    p.add_argument("--reg", type=float, default=0.0)
    p.add_argument("--out", metavar="PATH")
    p.set_defaults(func=cmd_fit_metric)

    p = sub.add_parser("route", help="permutation route between two readings")
    _phrase_args(p)
    p.add_argument("--from", dest="from_", type=int, default=0)
    p.add_argument("--to", type=int, default=1)
    p.set_defaults(func=cmd_route)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except NoParse as exc:
        print(f"no derivation for {exc}", file=sys.stderr)
        _emit({"derivations": [], "count": 0, "readings": []})
        return EXIT_NO_PARSE
    except (LambekError, LexiconFormatError, OSError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
