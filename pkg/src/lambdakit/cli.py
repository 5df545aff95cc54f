"""Single-shot command line interface.

One session per invocation: a field, ambient variables, caps and a seed; all
randomness is seeded so reports are bit-exact reproducible.  `--json` emits a
machine-readable report (schema-versioned); the default is a short human
summary.  `batch` reads one command line per stdin line and emits reports in
input order (optionally computed in parallel).

Exit codes: 0 success, 1 domain error, 2 parse/config error, 3 resource limit.
"""

from __future__ import annotations

import argparse
import json
import re
import shlex
import sys
import time
from concurrent.futures import ThreadPoolExecutor

from .closure import (is_separable, is_separated, lambda_closure_of_subfield,
                      lambda_fbc, local_lambda_closure)
from .errors import (DenominatorVanishes, DivisionByZero, LambdakitError,
                     NoConvergence, NonUnitJacobian, NotInSpan,
                     NotPIndependent, NotSeparableBase, ParseError,
                     ResourceLimit, SpecMismatch, UnknownVariable)
from .exprparse import (SessionConfig, parse_element, parse_field_literal,
                        parse_tuple)
from .geometry import (GenericPoint, NewtonSystem, hensel_newton,
                       interior_scan, local_surjectivity_check, locus)
from .gf import FieldSpec
from .lambdafun import (impdeg, lambda_eval, p_basis, p_ind_prefix_with_flags,
                        p_independent, term_to_sexpr)
from .poly import DEFAULT_SPAIR_CAP, render_poly
from .ratfunc import RatFunc
from .series import TruncSeries, embed_ratfunc
from .subfield import (SubfieldPresentation, member, prime_subfield,
                       whole_ambient)

SCHEMA = "lambdakit/1"

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_PARSE = 2
EXIT_RESOURCE = 3

_DOMAIN_ERRORS = (DivisionByZero, NotPIndependent, NotInSpan, NotSeparableBase,
                  NonUnitJacobian, NoConvergence, DenominatorVanishes,
                  SpecMismatch, ValueError, ZeroDivisionError)
_PARSE_ERRORS = (ParseError, UnknownVariable)


def _classify(exc: Exception) -> int:
    if isinstance(exc, _PARSE_ERRORS):
        return EXIT_PARSE
    if isinstance(exc, ResourceLimit):
        return EXIT_RESOURCE
    if isinstance(exc, _DOMAIN_ERRORS):
        return EXIT_DOMAIN
    raise exc


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="lambdakit",
        description="Exact lambda-closure and separability kernel over "
                    "rational function fields GF(q)(t1..tn).")
    sub = top.add_subparsers(dest="command", required=True)

    def common(p, field=True):
        if field:
            p.add_argument("--field", default="GF(2)",
                           help="field literal GF(p) or GF(p^m) (default GF(2))")
            p.add_argument("--vars", default="t",
                           help="comma-separated ambient variables (default t)")
        p.add_argument("--json", action="store_true", help="emit a JSON report")
        p.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
        p.add_argument("--spair-cap", type=int, default=DEFAULT_SPAIR_CAP,
                       help="Groebner S-pair cap")
        p.add_argument("--timing", action="store_true",
                       help="include wall time in the report")

    p = sub.add_parser("lambda", help="evaluate the lambda coordinates of an element")
    common(p)
    p.add_argument("--a", required=True, help="the element")
    p.add_argument("--b", required=True, help="p-independent tuple (comma separated)")

    p = sub.add_parser("pind", help="left-greedy p-independent prefix of a tuple")
    common(p)
    p.add_argument("--b", required=True, help="tuple to scan")
    p.add_argument("--base", default="", help="generators of the base subfield C")

    p = sub.add_parser("closure", help="Lambda closure of GF(q)(gens) in the ambient")
    common(p)
    p.add_argument("--gens", required=True, help="generators (comma separated)")
    p.add_argument("--trace", action="store_true", help="emit the full stage trace")
    p.add_argument("--prune", action="store_true",
                   help="drop zeros/members from appended lambda blocks")
    p.add_argument("--max-stages", type=int, default=64)

    p = sub.add_parser("fbc", help="finite truncation of the local lambda closure")
    common(p)
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--all-orderings", action="store_true",
                   help="maximize the stage over all orderings of a (|a| <= 4)")

    p = sub.add_parser("separable", help="is E/D separable?")
    common(p)
    p.add_argument("--d", required=True, help="generators of D")
    p.add_argument("--e", default=None,
                   help="generators of E (default: the whole ambient field)")

    p = sub.add_parser("separated", help="is E/D separated?")
    common(p)
    p.add_argument("--d", required=True)
    p.add_argument("--e", default=None)

    p = sub.add_parser("impdeg", help="imperfection degree of GF(q)(gens)")
    common(p)
    p.add_argument("--gens", required=True,
                   help="generators; empty string means the whole ambient field")

    p = sub.add_parser("member", help="membership in a finitely generated subfield")
    common(p)
    p.add_argument("--x", required=True)
    p.add_argument("--gens", required=True)

    p = sub.add_parser("locus", help="vanishing ideal of a coordinate tuple")
    common(p)
    p.add_argument("--coords", required=True)
    p.add_argument("--base", default="", help="generators of the base subfield C")

    p = sub.add_parser("hensel", help="Newton-lift a polynomial system over series")
    common(p)
    p.add_argument("--system", required=True,
                   help="semicolon-separated polynomials in x,x2,../y,y2,..")
    p.add_argument("--x", required=True, help="x-block values (ambient elements)")
    p.add_argument("--y0", required=True, help="initial y-block values")
    p.add_argument("--prec", type=int, required=True)
    p.add_argument("--center", type=int, default=None,
                   help="series expansion center (default: first that works)")

    p = sub.add_parser("surjectivity", help="sample local surjectivity of a projection")
    common(p)
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--base", default="", help="generators of the base subfield C")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--prec", type=int, default=32)
    p.add_argument("--center", type=int, default=None)

    p = sub.add_parser("interior-scan", help="coset scan of the image of x^p + t x^(2p)")
    common(p, field=False)
    p.add_argument("--p", type=int, default=2)
    p.add_argument("--prec", type=int, required=True)
    p.add_argument("--ybound", type=int, required=True)
    p.add_argument("--max-coset-level", type=int, default=None)

    p = sub.add_parser("batch", help="read command lines from stdin")
    p.add_argument("--parallel", type=int, default=1,
                   help="worker threads (outputs stay in input order)")

    return top


def _session(args) -> SessionConfig:
    spec = parse_field_literal(args.field)
    names = tuple(v.strip() for v in args.vars.split(",") if v.strip())
    if not names:
        raise ParseError("at least one ambient variable is required", 0)
    return SessionConfig(spec, names, args.spair_cap, args.seed)


def _presentation(src: str, cfg: SessionConfig) -> SubfieldPresentation:
    return SubfieldPresentation(cfg.ambient, parse_tuple(src, cfg))


def _index_key(idx) -> str:
    return "(" + ",".join(str(i) for i in idx) + ")"


def _cmd_lambda(args):
    cfg = _session(args)
    a = parse_element(args.a, cfg)
    b = parse_tuple(args.b, cfg)
    lam = lambda_eval(a, b)
    entries = [{"index": list(idx), "value": str(val)}
               for idx, val in sorted(lam.items())]
    result = {"a": str(a), "b": [str(x) for x in b], "map": entries}
    text = [f"lambda coordinates of {a} over ({', '.join(map(str, b))}):"]
    text += [f"  {_index_key(e['index'])} -> {e['value']}" for e in entries]
    return result, text


def _cmd_pind(args):
    cfg = _session(args)
    b = parse_tuple(args.b, cfg)
    C = _presentation(args.base, cfg)
    kept, flags = p_ind_prefix_with_flags(b, C)
    independent = p_independent(b, C)
    result = {"prefix": [str(x) for x in kept],
              "kept_flags": flags,
              "independent": independent}
    text = [f"p-independent prefix: ({', '.join(map(str, kept))})",
            f"input tuple p-independent over C: {independent}"]
    return result, text


def _trace_json(trace):
    stages = [{"a": [str(x) for x in st.a], "b": [str(x) for x in st.b]}
              for st in trace.stages]
    return {
        "stages": stages,
        "a_terms": [term_to_sexpr(t) for t in trace.a_terms],
        "b_terms": [term_to_sexpr(t) for t in trace.b_terms],
        "env": {k: str(v) for k, v in sorted(trace.env.items())},
        "termination": list(trace.termination),
        "growth_steps": trace.growth_steps,
    }


def _cmd_closure(args):
    cfg = _session(args)
    gens = parse_tuple(args.gens, cfg)
    if not gens:
        raise ParseError("closure needs at least one generator", 0)
    pres, trace = lambda_closure_of_subfield(gens, cfg.ambient,
                                             spair_cap=cfg.spair_cap,
                                             max_stages=args.max_stages)
    result = {"closure_gens": [str(g) for g in pres.gens],
              "steps": trace.growth_steps,
              "stages": len(trace.stages),
              "termination": list(trace.termination)}
    if args.trace:
        result["trace"] = _trace_json(trace)
    text = [f"closure generators: {', '.join(str(g) for g in pres.gens)}",
            f"nontrivial adjunction steps: {trace.growth_steps} "
            f"(fixpoint at stage {trace.termination[1]})"]
    return result, text


def _cmd_fbc(args):
    cfg = _session(args)
    a = parse_tuple(args.a, cfg)
    b = parse_tuple(args.b, cfg)
    C = prime_subfield(cfg.ambient)
    r = lambda_fbc(a, b, C, (), all_orderings=args.all_orderings,
                   spair_cap=cfg.spair_cap)
    result = {"tuple": [str(x) for x in r.values],
              "sigma": list(r.sigma),
              "stage": r.stage}
    if r.ordering_stages is not None:
        result["ordering_stages"] = {"".join(map(str, k)): v
                                     for k, v in sorted(r.ordering_stages.items())}
    text = [f"truncation tuple: ({', '.join(map(str, r.values))})",
            f"sigma indices: {list(r.sigma)}; stage: {r.stage}"]
    return result, text


def _cmd_separable(args, separated=False):
    cfg = _session(args)
    D = _presentation(args.d, cfg)
    E = whole_ambient(cfg.ambient) if args.e is None else _presentation(args.e, cfg)
    if separated:
        verdict = is_separated(D, E, cfg.spair_cap)
        key = "separated"
    else:
        verdict = is_separable(D, E, cfg.spair_cap)
        key = "separable"
    return {key: verdict}, [f"{key}: {verdict}"]


def _cmd_impdeg(args):
    cfg = _session(args)
    gens = parse_tuple(args.gens, cfg)
    D = (SubfieldPresentation(cfg.ambient, gens) if gens
         else whole_ambient(cfg.ambient))
    basis = p_basis(D, cfg.spair_cap)
    result = {"impdeg": len(basis), "p_basis": [str(x) for x in basis]}
    return result, [f"imperfection degree: {len(basis)}",
                    f"p-basis: ({', '.join(map(str, basis))})"]


def _cmd_member(args):
    cfg = _session(args)
    x = parse_element(args.x, cfg)
    D = _presentation(args.gens, cfg)
    w = member(x, D, cfg.spair_cap)
    result = {"member": w is not None,
              "witness": str(w) if w is not None else None}
    text = [f"member: {w is not None}"]
    if w is not None:
        text.append(f"witness: {w}")
    return result, text


def _cmd_locus(args):
    cfg = _session(args)
    coords = parse_tuple(args.coords, cfg)
    C = _presentation(args.base, cfg)
    aff = locus(GenericPoint(coords, C), cfg.spair_cap)
    gens = [render_poly(g) for g in aff.generators]
    result = {"generators": gens,
              "vars": list(aff.ideal.ring.names),
              "dimension": aff.dimension()}
    text = [f"locus ideal: <{', '.join(gens) if gens else '0'}>",
            f"dimension: {aff.dimension()}"]
    return result, text


_X_NAME = re.compile(r"x(\d*)$")
_Y_NAME = re.compile(r"y(\d*)$")


def _system_vars(srcs):
    names = set()
    for src in srcs:
        names.update(re.findall(r"[A-Za-z][A-Za-z0-9_]*", src))
    xs, ys = [], []
    for name in names:
        if _X_NAME.match(name):
            xs.append(name)
        elif _Y_NAME.match(name):
            ys.append(name)
        else:
            raise UnknownVariable(
                f"system variables must be x,x2,.. or y,y2,..; got {name!r}")
    def keynum(n):
        suffix = n[1:]
        return int(suffix) if suffix else 1
    return sorted(xs, key=keynum), sorted(ys, key=keynum)


def _cmd_hensel(args):
    cfg = _session(args)
    srcs = [s for s in (part.strip() for part in args.system.split(";")) if s]
    xs, ys = _system_vars(srcs)
    sys_cfg = SessionConfig(cfg.field, tuple(xs + ys), cfg.spair_cap, cfg.seed)
    polys = []
    for src in srcs:
        f = parse_element(src, sys_cfg)
        if f.den != sys_cfg.ambient.ring.one:
            raise ParseError("system polynomials must be denominator-free", 0)
        polys.append(f.num)
    system = NewtonSystem(sys_cfg.ambient.ring, polys, len(xs), len(ys))
    x_vals = parse_tuple(args.x, cfg)
    y_vals = parse_tuple(args.y0, cfg)
    if len(x_vals) != len(xs) or len(y_vals) != len(ys):
        raise ParseError(
            f"system has {len(xs)} x-vars and {len(ys)} y-vars; "
            f"got {len(x_vals)} x values and {len(y_vals)} y values", 0)
    spec = cfg.field
    centers = [args.center] if args.center is not None else list(range(spec.q))
    last = None
    for cval in centers:
        gamma = spec.elem(cval)
        try:
            x0 = [embed_ratfunc(v, gamma, args.prec) for v in x_vals]
            y0 = [embed_ratfunc(v, gamma, args.prec) for v in y_vals]
            break
        except DenominatorVanishes as e:
            last = e
    else:
        raise DenominatorVanishes(str(last))
    roots, steps = hensel_newton(system, x0, y0, args.prec)
    result = {"roots": [str(r) for r in roots], "steps": steps,
              "precision": args.prec, "center": cval}
    text = [f"root: {roots[0] if len(roots) == 1 else [str(r) for r in roots]}",
            f"steps: {steps} (precision {args.prec}, center {cval})"]
    return result, text


def _cmd_surjectivity(args):
    cfg = _session(args)
    a = parse_tuple(args.a, cfg)
    b = parse_tuple(args.b, cfg)
    C = _presentation(args.base, cfg)
    rep = local_surjectivity_check(a, b, C, samples=args.samples,
                                   prec=args.prec, seed=cfg.seed,
                                   center=args.center,
                                   spair_cap=cfg.spair_cap)
    result = rep.to_dict()
    text = [f"mode: {rep.mode} (stage {rep.stage})",
            f"lifted {rep.lifted}/{rep.samples} samples at precision {rep.precision}"]
    if rep.failures:
        text.append(f"failures: {len(rep.failures)}")
    return result, text


def _cmd_interior_scan(args):
    rep = interior_scan(args.p, args.prec, args.ybound,
                        max_coset_level=args.max_coset_level)
    result = rep.to_dict()
    m_max = args.max_coset_level if args.max_coset_level is not None else args.prec - 1
    result["no_full_coset"] = rep.no_full_coset_up_to(m_max)
    text = [f"image size: {rep.image_size}",
            f"full cosets found: {sum(rep.coset_hits.values())} "
            f"(levels 0..{m_max})"]
    return result, text


_HANDLERS = {
    "lambda": _cmd_lambda,
    "pind": _cmd_pind,
    "closure": _cmd_closure,
    "fbc": _cmd_fbc,
    "separable": lambda a: _cmd_separable(a, separated=False),
    "separated": lambda a: _cmd_separable(a, separated=True),
    "impdeg": _cmd_impdeg,
    "member": _cmd_member,
    "locus": _cmd_locus,
    "hensel": _cmd_hensel,
    "surjectivity": _cmd_surjectivity,
    "interior-scan": _cmd_interior_scan,
}


def _run_one(argv, out) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_PARSE if e.code else EXIT_OK
    if args.command == "batch":
        return _run_batch(args, out)
    handler = _HANDLERS[args.command]
    started = time.monotonic()
    try:
        result, text = handler(args)
    except Exception as exc:  # noqa: BLE001 - classified below
        code = _classify(exc)
        report = {"schema": SCHEMA, "command": args.command, "ok": False,
                  "error": {"type": type(exc).__name__, "message": str(exc)}}
        if getattr(args, "json", False):
            print(json.dumps(report), file=out)
        else:
            print(f"error ({type(exc).__name__}): {exc}", file=out)
        return code
    report = {"schema": SCHEMA, "command": args.command, "ok": True,
              "result": result}
    if getattr(args, "timing", False):
        report["elapsed_ms"] = round(1000 * (time.monotonic() - started), 3)
    if getattr(args, "json", False):
        print(json.dumps(report), file=out)
    else:
        for line in text:
            print(line, file=out)
    return EXIT_OK


class _Capture:
    def __init__(self):
        self.lines = []

    def write(self, s):
        self.lines.append(s)

    def flush(self):
        pass


def _run_batch(args, out) -> int:
    lines = [ln.strip() for ln in sys.stdin.read().splitlines()]
    jobs = [(i, shlex.split(ln)) for i, ln in enumerate(lines) if ln]

    def work(job):
        _i, argv = job
        cap = _Capture()
        code = _run_one(argv, cap)
        return code, "".join(cap.lines)

    if args.parallel > 1:
        with ThreadPoolExecutor(max_workers=args.parallel) as pool:
            results = list(pool.map(work, jobs))
    else:
        results = [work(j) for j in jobs]
    worst = EXIT_OK
    for code, text in results:
        out.write(text)
        worst = max(worst, code)
    out.flush()
    return worst


def main(argv=None) -> int:
    return _run_one(sys.argv[1:] if argv is None else argv, sys.stdout)


if __name__ == "__main__":
    sys.exit(main())
