"""Command-line entry point.

Exit codes: 0 success, 1 verdict violated (or check failed), 2 malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from .analyzer import AnalysisConfig, classify, extract
from .approx import tensor_approximate
from .codec import SpecError, dec_function, dec_model, dec_neighborhood, dec_space, dumps, enc_tensor, to_jsonable
from .harness.instances import MAP_KINDS, InstanceSpec, generate, random_instance
from .harness.oracle import OracleGuardError, compare_extraction, oracle_extract
from .ksfunc import FUNCTIONAL_KINDS, check_ks_conclusion, check_ks_hypothesis, grid_family, make_functional
from .lcs import DEFAULT_TOL

EXIT_OK, EXIT_VIOLATED, EXIT_MALFORMED = 0, 1, 2


class MalformedInput(Exception):
    pass


def _read_json(path: str | None) -> Any:
    where = "stdin" if path is None or path == "-" else path
    try:
        if path is None or path == "-":
            text = sys.stdin.read()
        else:
            text = Path(path).read_text(encoding="utf-8")
        return json.loads(text)
    except (OSError, UnicodeDecodeError) as exc:
        raise MalformedInput(f"cannot read {where}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"invalid JSON in {where}: {exc}") from exc


def _write(obj: Any, path: str | None) -> None:
    text = dumps(obj)
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _load_instance(args: argparse.Namespace) -> InstanceSpec:
    try:
        spec = InstanceSpec.from_json(_read_json(args.instance))
    except (SpecError, ValueError, KeyError, TypeError) as exc:
        raise MalformedInput(str(exc)) from exc
    return spec


def _config(args: argparse.Namespace, spec_seed: int, spec_tol: float) -> AnalysisConfig:
    cfg = AnalysisConfig(
        seed=spec_seed if args.seed is None else args.seed,
        tol=spec_tol if args.tol is None else args.tol,
        workers=args.workers,
    )
    if args.pairs is not None:
        cfg.pairs = args.pairs
    return cfg


def cmd_verify(args: argparse.Namespace) -> int:
    spec = _load_instance(args)
    T = generate(spec)
    report = classify(T, _config(args, spec.seed, spec.tol))
    out = report.to_json()
    out["instance"] = {"kind": spec.kind, "schema": 1}
    _write(out, args.report)
    return EXIT_OK if report.consistent else EXIT_VIOLATED


def cmd_extract(args: argparse.Namespace) -> int:
    spec = _load_instance(args)
    res = extract(generate(spec), _config(args, spec.seed, spec.tol))
    _write(res.to_json(), args.report)
    return EXIT_OK if res.symbol is not None else EXIT_VIOLATED


def cmd_oracle(args: argparse.Namespace) -> int:
    spec = _load_instance(args)
    cfg = _config(args, spec.seed, spec.tol)
    T = generate(spec)
    try:
        orc = oracle_extract(T, seed=cfg.seed, tol=cfg.tol, integer=cfg.integer)
    except OracleGuardError as exc:
        raise MalformedInput(str(exc)) from exc
    res = extract(T, cfg)
    diff = compare_extraction(orc, res.resolved, T)
    _write({"oracle": orc.to_json(T), "analyzer": res.to_json(), **diff}, args.report)
    return EXIT_OK if diff["agree"] else EXIT_VIOLATED


def cmd_ks_check(args: argparse.Namespace) -> int:
    obj = _read_json(args.instance)
    try:
        if not isinstance(obj, dict) or obj.get("schema") != 1:
            raise SpecError("ks-check input needs \"schema\": 1")
        space = dec_space(obj["space"])
        fobj = obj["functional"]
        if fobj.get("kind") not in FUNCTIONAL_KINDS:
            raise SpecError(f"unknown functional kind {fobj.get('kind')!r}")
        delta = make_functional(space, fobj["kind"], {k: v for k, v in fobj.items() if k != "kind"})
        seed = obj.get("seed", 0) if args.seed is None else args.seed
        tol = obj.get("tol", DEFAULT_TOL) if args.tol is None else args.tol
        exhaustive = bool(obj.get("exhaustive", False))
    except (SpecError, KeyError, TypeError, ValueError, AttributeError) as exc:
        raise MalformedInput(str(exc)) from exc
    pairs = None
    samples = None
    if exhaustive:
        fam = grid_family(space)
        pairs = [(a, b) for a in fam for b in fam]
        samples = fam
    hyp = check_ks_hypothesis(delta, pairs, tol, seed)
    con = check_ks_conclusion(delta, samples, tol, seed)
    report = {
        "verdict": "ks-consistent" if hyp.passed else "violated",
        "hypothesis": to_jsonable(
            {"passed": hyp.passed, "checked": hyp.checked, "max_distance": hyp.max_distance, "witness": hyp.witness}
        ),
        "conclusion": to_jsonable(
            {
                "linearity": con.linearity,
                "multiplicativity": con.multiplicativity,
                "unitality": con.unitality,
                "zero_functional": con.zero_functional,
                "point": con.point,
                "witness": con.witness,
            }
        ),
        "config": {"seed": seed, "tol": tol, "exhaustive": exhaustive},
        "tool": {"name": "rangemaps", "version": __version__},
    }
    _write(report, args.report)
    return EXIT_OK if hyp.passed else EXIT_VIOLATED


def cmd_approx(args: argparse.Namespace) -> int:
    obj = _read_json(args.instance)
    try:
        if not isinstance(obj, dict) or obj.get("schema") != 1:
            raise SpecError("approx input needs \"schema\": 1")
        space = dec_space(obj["space"])
        model = dec_model(obj.get("model", 1))
        F = dec_function(obj["function"], space, model)
        B = dec_neighborhood(obj["neighborhood"], model)
        radius = obj.get("radius")
    except (SpecError, KeyError, TypeError, ValueError) as exc:
        raise MalformedInput(str(exc)) from exc
    if args.tol is not None:
        tol = args.tol
    else:
        tol = 0.0 if args.strategy == "assignment" else DEFAULT_TOL
    try:
        G, cert = tensor_approximate(F, B, args.strategy, radius, tol)
    except ValueError as exc:
        raise MalformedInput(str(exc)) from exc
    _write({"tensor": enc_tensor(G), "certificate": cert.to_json(), "strategy": args.strategy}, args.report)
    return EXIT_OK if cert.in_V else EXIT_VIOLATED


def cmd_gen(args: argparse.Namespace) -> int:
    try:
        spec = random_instance(
            args.kind,
            0 if args.seed is None else args.seed,
            nx=args.x_size,
            ny=args.y_size,
            dim=args.dim,
            integer=not args.float_values,
            tol=DEFAULT_TOL if args.tol is None else args.tol,
        )
    except SpecError as exc:
        raise MalformedInput(str(exc)) from exc
    _write(spec.to_json(), args.report)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rangemaps",
        description="Verify and extract range-preserving maps between vector-valued function spaces.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--instance", metavar="PATH", help="input JSON ('-' or omitted: stdin)")
    common.add_argument("--report", metavar="PATH", help="output JSON (default: stdout)")
    common.add_argument("--seed", type=int)
    common.add_argument("--tol", type=float)
    common.add_argument("--pairs", type=int, help="range-preservation pair budget")
    common.add_argument("--workers", type=int, default=1, help="threads for pair evaluation")
    common.add_argument("--strategy", choices=("assignment", "hat"), default="assignment")

    for name, fn, help_ in (
        ("verify", cmd_verify, "full analysis; exit 0 iff composition-consistent"),
        ("extract", cmd_extract, "offset and symbol only"),
        ("ks-check", cmd_ks_check, "test a scalar functional"),
        ("approx", cmd_approx, "tensor approximation with certificate"),
        ("oracle", cmd_oracle, "brute-force extraction diffed against the analyzer"),
    ):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=fn)

    p = sub.add_parser("gen", parents=[common], help="emit a seeded instance spec")
    p.add_argument("--kind", choices=[k for k in MAP_KINDS if k != "external"], default="composition")
    p.add_argument("--x-size", type=int)
    p.add_argument("--y-size", type=int)
    p.add_argument("--dim", type=int)
    p.add_argument("--float-values", action="store_true", help="continuous instead of integer values")
    p.set_defaults(func=cmd_gen)
    return parser


def cli_main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_MALFORMED
    try:
        return args.func(args)
    except MalformedInput as exc:
        print(f"rangemaps {args.command}: malformed input: {exc}", file=sys.stderr)
        return EXIT_MALFORMED


def main() -> None:
    raise SystemExit(cli_main())


if __name__ == "__main__":
    main()
