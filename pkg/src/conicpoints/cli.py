"""Command line entry point: ``conicpoints <subcommand> ...``."""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from fractions import Fraction
from pathlib import Path

from .harness import (
    COUNT_COLUMNS, SPEC_VERSION, SWEEP_COLUMNS, CorpusForm, CorpusSpec, generate_corpus,
    rows_to_csv, run_sweep, verify_identities,
)
from .norms import IsometricNorm
from .quadform import SpecialConic, TernaryQuadraticForm

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _load_json(arg: str):
    """Inline JSON (starting with '{' or '[') or a path to a JSON file."""
    text = arg.strip()
    if not text.startswith(("{", "[")):
        try:
            text = Path(arg).read_text()
        except OSError as exc:
            raise UsageError(f"cannot read {arg}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"invalid JSON in {arg}: {exc}") from exc


def _form(arg: str) -> TernaryQuadraticForm:
    obj = _load_json(arg)
    if "form" in obj and isinstance(obj["form"], dict):
        obj = obj["form"]
    return TernaryQuadraticForm.from_json(obj)


def _special(arg: str) -> SpecialConic:
    return SpecialConic.from_json(_load_json(arg))


def _norm(arg: str | None) -> IsometricNorm:
    return IsometricNorm.from_json(_load_json(arg)) if arg else IsometricNorm.sup()


def _number(text: str):
    v = Fraction(text)
    return int(v) if v.denominator == 1 else v


def _number_list(text: str) -> list:
    return [_number(t) for t in text.split(",") if t.strip()]


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return str(obj)
    raise TypeError(f"not serialisable: {type(obj)}")


def _dump(obj) -> str:
    if isinstance(obj, dict):
        obj = {"spec_version": SPEC_VERSION, **obj}
    return json.dumps(obj, indent=2, default=_jsonable) + "\n"


# --- subcommands ----------------------------------------------------------------

def cmd_corpus(args):
    spec = CorpusSpec(args.count, args.height, args.shape, args.seed)
    forms = generate_corpus(spec)
    return EXIT_OK, _dump({"corpus_spec": asdict(spec), "forms": [f.to_json() for f in forms]})


def _corpus_from_args(args) -> list:
    if args.corpus:
        obj = _load_json(args.corpus)
        items = obj["forms"] if isinstance(obj, dict) else obj
        return [CorpusForm.from_json(x) if "form" in x else TernaryQuadraticForm.from_json(x) for x in items]
    if args.form:
        return [_form(args.form)]
    return generate_corpus(CorpusSpec(args.count, args.height, args.shape, args.seed))


def cmd_verify(args):
    corpus = _corpus_from_args(args)
    rep = verify_identities(corpus, args.B_max, threads=args.threads, seed=args.seed)
    return (EXIT_OK if rep.passed else EXIT_FAIL), _dump(rep.to_json())


def cmd_sweep(args):
    rows = run_sweep(_form(args.form), _norm(args.norm), _number_list(args.B), form_id=args.form_id,
                     tol=args.tol)
    return EXIT_OK, rows_to_csv(rows, SWEEP_COLUMNS)


def cmd_count(args):
    from .counting import count_N
    Q, N = _form(args.form), _norm(args.norm)
    Bs = _number_list(args.B)
    if not Bs:
        raise UsageError("--B needs at least one value")
    reports = [count_N(Q, N, B, args.method) for B in Bs]
    if args.format == "csv":
        rows = [{
            "B": r.B, "n_brute": r.n_brute, "n_param": r.n_param, "script_n": r.script_n,
            "elapsed_ms_brute": r.timings.get("brute"), "elapsed_ms_param": r.timings.get("total"),
        } for r in reports]
        return EXIT_OK, rows_to_csv(rows, COUNT_COLUMNS)
    if len(reports) == 1:
        return EXIT_OK, _dump(reports[0].to_json())
    return EXIT_OK, _dump({"reports": [r.to_json() for r in reports]})


def cmd_constant(args):
    from .densities import constants
    rep = constants(_form(args.form), _norm(args.norm), args.tol, compare_cprime=args.compare_cprime)
    return EXIT_OK, _dump(rep.to_json())


def cmd_zeros(args):
    from .zeros import find_primitive_zero
    z = find_primitive_zero(_form(args.form), args.cap)
    return EXIT_OK, _dump(z.to_json())


def cmd_complete(args):
    from .unimodular import complete_to_sl3
    try:
        vec = [int(v) for v in args.vector.split(",")]
    except ValueError as exc:
        raise UsageError(f"bad vector {args.vector!r}") from exc
    return EXIT_OK, _dump({"vector": vec, "M": complete_to_sl3(vec).to_json()})


def cmd_rho(args):
    from .parametrization import rho_star
    S = _special(args.form)
    return EXIT_OK, _dump({"form": S.to_json(), "n": args.n, "rho_star": rho_star(S, args.n)})


def cmd_param(args):
    from .parametrization import build_param_system, point_from_parameter
    S = _special(args.form)
    P = build_param_system(S)
    pp = point_from_parameter(P, args.s, args.t)
    return EXIT_OK, _dump({
        "form": S.to_json(), "Pi": [list(r) for r in P.Pi], "delta": P.delta,
        "s": pp.s, "t": pp.t, "q": list(P.q(args.s, args.t)), "lambda": pp.lam,
        "point": list(pp.point), "exceptional": pp.exceptional,
    })


# --- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="conicpoints", description="Count points of bounded height on conics.")
    p.add_argument("--config", help="JSON file with default option values")
    p.add_argument("--out", help="write output here instead of stdout")
    p.add_argument("--threads", type=int, default=1, help="worker processes (results do not depend on it)")
    sub = p.add_subparsers(dest="command", required=True)

    def corpus_opts(q, count=20):
        q.add_argument("--count", type=int, default=count)
        q.add_argument("--height", type=int, default=30)
        q.add_argument("--shape", choices=["special", "general"], default="special")
        q.add_argument("--seed", type=int, default=0)

    q = sub.add_parser("corpus", help="generate a reproducible corpus of isotropic forms")
    corpus_opts(q)
    q.set_defaults(func=cmd_corpus)

    q = sub.add_parser("verify", help="run the identity batteries")
    q.add_argument("--corpus", help="corpus JSON (as written by `corpus`)")
    q.add_argument("--form", help="a single form instead of a corpus")
    q.add_argument("--B-max", dest="B_max", type=int, default=50)
    corpus_opts(q, count=5)
    q.set_defaults(func=cmd_verify)

    q = sub.add_parser("sweep", help="N(Q,B) against c_Q B over a list of B")
    q.add_argument("--form", required=True)
    q.add_argument("--norm")
    q.add_argument("--B", required=True, help="comma separated list")
    q.add_argument("--form-id", dest="form_id", default="Q")
    q.add_argument("--tol", type=float, default=1e-3)
    q.set_defaults(func=cmd_sweep)

    q = sub.add_parser("count", help="count primitive zeros of height <= B")
    q.add_argument("--form", required=True)
    q.add_argument("--norm")
    q.add_argument("--B", required=True, help="a bound, or a comma separated list")
    q.add_argument("--method", choices=["brute", "param", "both"], default="param")
    q.add_argument("--format", choices=["json", "csv"], default="json")
    q.set_defaults(func=cmd_count)

    q = sub.add_parser("constant", help="local densities and leading constants")
    q.add_argument("--form", required=True)
    q.add_argument("--norm")
    q.add_argument("--tol", type=float, default=1e-3)
    q.add_argument("--compare-cprime", dest="compare_cprime", action="store_true")
    q.set_defaults(func=cmd_constant)

    q = sub.add_parser("zeros", help="smallest primitive zero")
    q.add_argument("--form", required=True)
    q.add_argument("--cap", type=int)
    q.set_defaults(func=cmd_zeros)

    q = sub.add_parser("complete", help="complete a primitive vector to SL3(Z)")
    q.add_argument("--vector", required=True)
    q.set_defaults(func=cmd_complete)

    q = sub.add_parser("rho", help="rho*(n) for a special conic")
    q.add_argument("--form", required=True)
    q.add_argument("--n", type=int, required=True)
    q.set_defaults(func=cmd_rho)

    q = sub.add_parser("param", help="point of the conic for parameter (s, t)")
    q.add_argument("--form", required=True)
    q.add_argument("--s", type=int, required=True)
    q.add_argument("--t", type=int, required=True)
    q.set_defaults(func=cmd_param)
    return p


def _apply_config(parser, argv):
    """Values in --config become defaults; explicit flags still win."""
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    cfg = _load_json(known.config)
    if not isinstance(cfg, dict):
        raise UsageError("config must be a JSON object")
    top = {k: v for k, v in cfg.items() if not isinstance(v, dict)}
    parser.set_defaults(**top)
    for action in parser._subparsers._group_actions:
        for name, sp in action.choices.items():
            vals = {**top, **cfg.get(name, {})}
            sp.set_defaults(**vals)
            for a in sp._actions:
                if a.dest in vals:
                    a.required = False


def main(argv=None) -> int:
    from .zeros import ZeroNotFound
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        _apply_config(parser, argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    if args.threads < 1:
        print("error: --threads must be positive", file=sys.stderr)
        return EXIT_USAGE
    try:
        code, text = args.func(args)
    except (UsageError, ValueError, KeyError, TypeError, ZeroNotFound, OverflowError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
