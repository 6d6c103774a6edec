"""Command-line front end.

Exit status: 0 on any answer (including "does not embed"), 2 on usage or
parse errors, 3 when an internal verification fails.
"""

from __future__ import annotations

import argparse
import json
import os
import shlex
import sys
from concurrent.futures import ThreadPoolExecutor

from .embed import (
    DEFAULT_WITNESS_PRECISION,
    Family,
    RetryBudgetExhausted,
    TargetSpace,
    VerificationFailed,
    decide,
    hensel_constants,
    isotropic_basis,
    isotropic_bound,
    max_isotropic_dim,
    min_dimension,
    witness,
)
from .forms import (
    DiagonalForm,
    FormSyntaxError,
    GramForm,
    canonical,
    diagonalize,
    equivalent,
    invariants,
    parse_form,
)
from .padic import DEFAULT_PRECISION, PrimeContext

__all__ = ["main", "run", "build_parser", "UsageError"]

ENV_PRECISION = "PADIC_DEFAULT_PRECISION"


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--prime", type=int)
    common.add_argument("--form", action="append", default=[], help='e.g. "diag(1,l,p,0^2)"')
    common.add_argument("--gram", action="append", default=[], help='JSON file {"n": N, "m": [[...]]}')
    common.add_argument("--target", help="euclid:N, lorentz:N, euclid or lorentz")
    common.add_argument("--precision", type=int)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--witness", action="store_true", help="attach a verified witness basis")
    common.add_argument("--output", choices=("json", "text"), default="json")

    parser = _Parser(prog="padicforms", description="Quadratic forms over Q_p and their embeddings.")
    parser.add_argument("--batch", help="file with one request per line")
    sub = parser.add_subparsers(dest="command")
    for name in ("classify", "invariants", "equivalent", "embed", "min-dim", "witness", "isotropic-max", "constants"):
        sub.add_parser(name, parents=[common])
    return parser


def _default_precision() -> int:
    raw = os.environ.get(ENV_PRECISION)
    if not raw:
        return DEFAULT_PRECISION
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{ENV_PRECISION} must be an integer, got {raw!r}") from None


def _context(args) -> PrimeContext:
    if args.prime is None:
        raise UsageError("--prime is required")
    try:
        return PrimeContext(args.prime, _default_precision())
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _forms(args, ctx) -> list[DiagonalForm]:
    out = [parse_form(text, ctx) for text in args.form]
    for path in args.gram:
        try:
            with open(path) as fh:
                out.append(diagonalize(GramForm.from_json(json.load(fh), ctx)))
        except (OSError, json.JSONDecodeError, KeyError) as exc:
            raise UsageError(f"cannot read Gram file {path}: {exc}") from None
    return out


def _one_form(args, ctx) -> DiagonalForm:
    forms = _forms(args, ctx)
    if len(forms) != 1:
        raise UsageError("exactly one --form or --gram is required")
    return forms[0]


def _target(args, need_n: bool) -> TargetSpace | Family:
    if not args.target:
        raise UsageError("--target is required")
    fam, sep, n = args.target.partition(":")
    try:
        family = Family(fam)
        if not sep:
            if need_n:
                raise UsageError("--target needs a dimension, e.g. euclid:5")
            return family
        return TargetSpace(family, int(n))
    except ValueError as exc:
        raise UsageError(f"bad target {args.target!r}: {exc}") from None


def _witness_json(f, t, args):
    prec = args.precision or DEFAULT_WITNESS_PRECISION
    return witness(f, t, precision=prec, seed=args.seed).to_json(), prec


def _classify(args):
    ctx = _context(args)
    f = _one_form(args, ctx)
    out = {"form": f.to_dsl(), "zero_count": f.zero_count, "classes": [c.value for c in f.classes]}
    if f.dim == 1 and f.rank == 1:
        out["class"] = f.classes[0].value
    return out


def _invariants(args):
    ctx = _context(args)
    f = _one_form(args, ctx)
    out = {"form": f.to_dsl(), "canonical": canonical(f).to_dsl()}
    out.update(invariants(f).to_json())
    return out


def _equivalent(args):
    ctx = _context(args)
    forms = _forms(args, ctx)
    if len(forms) != 2:
        raise UsageError("equivalent takes exactly two forms")
    return {"forms": [f.to_dsl() for f in forms], "equivalent": equivalent(*forms)}


def _embed(args, force_witness=False):
    ctx = _context(args)
    f = _one_form(args, ctx)
    t = _target(args, need_n=True)
    d = decide(f, t)
    out = {
        "embeds": d.embeds,
        "min_n": min_dimension(f, t.family),
        "reason": d.reason.value,
        "reduced": d.to_json()["reduced"],
        "witness": None,
        "precision": args.precision or DEFAULT_WITNESS_PRECISION,
    }
    if d.embeds and (args.witness or force_witness):
        out["witness"], out["precision"] = _witness_json(f, t, args)
    return out


def _min_dim(args):
    ctx = _context(args)
    f = _one_form(args, ctx)
    t = _target(args, need_n=False)
    family = t.family if isinstance(t, TargetSpace) else t
    return {"form": f.to_dsl(), "family": family.value, "min_n": min_dimension(f, family)}


def _isotropic_max(args):
    ctx = _context(args)
    t = _target(args, need_n=True)
    out = {"target": str(t), "max_isotropic_dim": max_isotropic_dim(t, ctx), "closed_form": isotropic_bound(t, ctx)}
    if args.witness:
        prec = args.precision or DEFAULT_WITNESS_PRECISION
        out["witness"] = [[x.compact() for x in row] for row in isotropic_basis(t, ctx, prec)]
        out["precision"] = prec
    return out


def _constants(args):
    ctx = _context(args)
    prec = args.precision or ctx.default_precision
    k = hensel_constants(ctx, prec)
    return {
        "prime": ctx.p,
        "lambda": ctx.lam,
        "precision": prec,
        "values": {name: v.compact() for name, v in k.values.items()},
        "identities": k.check(prec),
    }


_HANDLERS = {
    "classify": _classify,
    "invariants": _invariants,
    "equivalent": _equivalent,
    "embed": _embed,
    "min-dim": _min_dim,
    "witness": lambda a: _embed(a, force_witness=True),
    "isotropic-max": _isotropic_max,
    "constants": _constants,
}


def _render(result: dict, mode: str) -> str:
    if mode == "json":
        return json.dumps(result, separators=(",", ":"))
    lines = []
    for key, value in result.items():
        if isinstance(value, (dict, list)):
            value = json.dumps(value, separators=(",", ":"))
        lines.append(f"{key}: {value}")
    return "\n".join(lines)


def run(argv: list[str]) -> tuple[int, str]:
    """Execute one request; returns (exit status, text for stdout or stderr)."""
    try:
        args = build_parser().parse_args(argv)
        if args.batch:
            return _run_batch(args.batch)
        if args.command is None:
            raise UsageError("a command is required")
        result = _HANDLERS[args.command](args)
        return 0, _render(result, args.output)
    except (UsageError, FormSyntaxError) as exc:
        return 2, f"error: {exc}"
    except (VerificationFailed, RetryBudgetExhausted) as exc:
        return 3, f"internal error: {exc}"


def _run_batch(path: str) -> tuple[int, str]:
    try:
        with open(path) as fh:
            requests = [shlex.split(line) for line in fh if line.strip() and not line.startswith("#")]
    except OSError as exc:
        raise UsageError(f"cannot read batch file: {exc}") from None
    with ThreadPoolExecutor() as pool:
        results = list(pool.map(run, requests))
    status = max((code for code, _ in results), default=0)
    return status, "\n".join(text for _, text in results)


def main(argv: list[str] | None = None) -> int:
    code, text = run(sys.argv[1:] if argv is None else argv)
    print(text, file=sys.stdout if code == 0 else sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
