"""Command-line entry point.

Every subcommand writes JSON to standard output.  Exit status is 0 when
all emitted checks pass, 2 when at least one check fails and 1 on a usage
or input error.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from dataclasses import dataclass, field
from fractions import Fraction

from . import bounds, enumeration, series, verify
from .reduction import EPSILON, minkowski_reduce, siegel_reduce
from .symmat import HalfSpacePoint, SymMat, min_eigenvalue

CONFIG_ENV = "SIEGELCERT_CONFIG"
RESIDUAL_TOL = 1e-10


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    precision: int = 64
    tolerance: float = 1e-8
    caps: dict = field(default_factory=lambda: {"enumerate": enumeration.OUTPUT_CAP})
    epsilonN: dict = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        if int(self.precision) != self.precision or self.precision < 53:
            raise UsageError("precision must be an integer >= 53")
        if not self.tolerance > 0:
            raise UsageError("tolerance must be positive")
        self.epsilonN = {int(k): float(v) for k, v in self.epsilonN.items()}
        self.caps = {**{"enumerate": enumeration.OUTPUT_CAP}, **self.caps}

    @classmethod
    def load(cls, path: str | None) -> "RunConfig":
        path = path or os.environ.get(CONFIG_ENV)
        if not path:
            return cls()
        with open(path) as fh:
            data = json.load(fh)
        unknown = set(data) - {"precision", "tolerance", "caps", "epsilonN", "seed"}
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    def eps(self, n: int):
        if n in self.epsilonN:
            return self.epsilonN[n]
        if n in EPSILON:
            return EPSILON[n]
        raise UsageError(f"no epsilon_n configured for n = {n}")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _frac(s: str) -> Fraction:
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {s!r}") from exc


def _load_json(arg: str):
    """JSON from a literal, a file path, or ``-`` for standard input."""
    if arg == "-":
        return json.load(sys.stdin)
    if os.path.exists(arg):
        with open(arg) as fh:
            return json.load(fh)
    return json.loads(arg)


def _checks(d: dict) -> list[dict]:
    return [{"check": k, "pass": bool(v)} for k, v in d.items()]


def _cplx(z: complex) -> list[float]:
    return [z.real, z.imag]


# ---------------------------------------------------------------------------
# subcommands; each returns (payload, list of check records)


def cmd_reduce(args, cfg):
    data = _load_json(args.input)
    if args.kind == "minkowski":
        T = SymMat.from_json(data)
        cert = minkowski_reduce(T)
        payload = {
            "kind": "minkowski",
            "input": T.to_json(),
            "transform": [list(r) for r in cert.transform],
            "reduced": cert.reduced.to_json(),
            "floor_constant": cert.floor_constant,
        }
    else:
        Z = HalfSpacePoint.from_json(data)
        cert = siegel_reduce(Z, eps=cfg.eps(Z.n), prec=cfg.precision, tol=cfg.tolerance)
        payload = {
            "kind": "siegel",
            "transform": cert.transform.to_json(),
            "reduced": cert.reduced.to_json(),
            "floor_constant": cert.floor_constant,
            "min_eigenvalue": float(min_eigenvalue(cert.reduced.imag)),
        }
    return payload, _checks(cert.checks)


def cmd_enumerate(args, cfg, out):
    cap = int(cfg.caps["enumerate"])
    if args.trace is not None:
        mats = enumeration.by_trace(enumeration.EnumSpec(args.n, args.M, args.trace), cap)
        bound = enumeration.count_bound(args.n, args.M, args.trace)
        ok = len(mats) <= bound
        summary = {"count": len(mats), "bound": str(bound), "cutoff": {"trace": str(args.trace)}}
    else:
        if args.n > 1 and not args.reduced:
            raise UsageError("--det needs --reduced for n >= 2 (orbits are infinite)")
        mats = enumeration.reduced_by_det(args.n, args.M, args.det, cap)
        ok = all(T.det() <= args.det for T in mats)
        summary = {"count": len(mats), "bound": None, "cutoff": {"det": str(args.det)}}
    for T in mats:
        out.write(json.dumps(T.to_json()) + "\n")
    summary["pass"] = ok
    return {"summary": summary}, [{"check": "enumerate", "pass": ok}]


def _series_cutoff(n: int, arg):
    if arg is not None:
        return arg
    return verify.SERIES_CUTOFF.get(n, Fraction(3))


def cmd_bounds(args, cfg):
    mu = cfg.eps(args.n) if args.mu is None else args.mu
    p = bounds.BoundParams(args.ell, args.n, mu, args.M, R=None if args.R is None else float(args.R),
                           eps=args.eps)
    checks = []
    if args.which == "S":
        rep = bounds.s_bound(p)
        if args.verify:
            X = _series_cutoff(args.n, args.cutoff)
            y = SymMat.diag(*([Fraction(mu)] * args.n))
            checks.append(verify._record("S_partial_le_bound", {"cutoff": str(X)},
                                         bounds.s_partial(p.ell, p.M, y, X), rep.value))
    elif args.which == "T":
        if args.R is None:
            raise UsageError("--which T needs --R")
        rep = bounds.tail_bound(p)
        if args.verify:
            X = _series_cutoff(args.n, args.cutoff)
            y = SymMat.diag(*([Fraction(mu)] * args.n))
            checks.append(verify._record("T_partial_le_tail_bound", {"cutoff": str(X)},
                                         bounds.tail_partial(p.ell, p.M, y, X, args.R), rep.value))
    elif args.which == "sturm":
        rep = bounds.sturm_report(p.ell, p.n, p.M, cfg.eps(p.n))
        if args.verify:
            checks.append(verify._record("sturm_half_equation", {}, rep.extra["residual"], RESIDUAL_TOL))
    else:
        if args.eps is None:
            raise UsageError("--which sup needs --eps")
        rep = bounds.sup_bound_from_coeffs(p)
        if args.verify:
            twice = bounds.sup_bound_from_coeffs(bounds.BoundParams(p.ell, p.n, p.mu, p.M, eps=2 * args.eps))
            checks.append(verify._record("sup_linear_in_eps", {}, abs(twice.value - 2 * rep.value), 0.0))
    return {"report": rep.to_json()}, checks


def cmd_sturm(args, cfg):
    rep = bounds.sturm_report(args.ell, args.n, args.M, cfg.eps(args.n))
    rec = verify._record("sturm_half_equation", {"n": args.n, "ell": str(args.ell), "M": args.M},
                         rep.extra["residual"], RESIDUAL_TOL)
    return {"R": rep.value, "residual": rep.extra["residual"], "report": rep.to_json()}, [rec]


def cmd_evaluate(args, cfg):
    table = series.read_table(args.table)
    Z = HalfSpacePoint.from_json(_load_json(args.z))
    payload = {"n": table.n, "ell": str(table.ell), "terms": len(table)}
    if args.R is None:
        payload["value"] = _cplx(series.eval_partial(table, Z, args.trace_cutoff))
        payload["error"] = None
    else:
        mu = float(args.mu) if args.mu is not None else min(cfg.eps(Z.n), 0.999)
        value, err = series.eval_certified(table, Z, args.supbeta, args.R, mu, args.trace_cutoff)
        payload.update({"value": _cplx(value), "error": err, "R": str(args.R), "mu": str(mu),
                        "supbeta": args.supbeta})
    return payload, []


def _unimodular_samples(n: int, count: int, seed: int) -> list[list[list[int]]]:
    """Signed permutations and elementary shears, then random products of them."""
    gens = []
    for i in range(n):
        g = [[int(r == c) for c in range(n)] for r in range(n)]
        g[i][i] = -1
        gens.append(g)
    for i in range(n):
        for j in range(n):
            if i != j:
                g = [[int(r == c) for c in range(n)] for r in range(n)]
                g[i][j] = 1
                gens.append(g)
                s = [[int(r == c) for c in range(n)] for r in range(n)]
                s[i][i] = s[j][j] = 0
                s[i][j] = s[j][i] = 1
                if i < j:
                    gens.append(s)
    rng = random.Random(seed)
    out = list(gens)
    for _ in range(count):
        g = [[int(r == c) for c in range(n)] for r in range(n)]
        for _ in range(4):
            h = rng.choice(gens)
            g = [[sum(g[r][k] * h[k][c] for k in range(n)) for c in range(n)] for r in range(n)]
        out.append(g)
    return out


def cmd_check(args, cfg):
    try:
        table = series.read_table(args.table)
    except series.NonCanonicalKey:
        table = series.read_table(args.table, canonical=False)
    payload = {"n": table.n, "ell": str(table.ell), "canonical": table.canonical, "which": args.which}
    if args.which == "psym":
        samples = _unimodular_samples(table.n, args.samples, cfg.seed)
        viol = series.check_p_symmetry(table, samples, tol=cfg.tolerance)
        payload.update({"samples": len(samples), "violations": [v.to_json() for v in viol]})
        return payload, [{"check": "p_symmetry", "pass": not viol}]
    if args.which == "fj":
        if table.n < 2:
            raise UsageError("Fourier-Jacobi slices need n >= 2")
        if not table.canonical:
            raise UsageError("Fourier-Jacobi slices need a canonical table")
        t = args.t if args.t is not None else min(T[0, 0] for T in table.entries)
        sl = series.fj_slice(table, t, args.trace_cutoff)
        rows = [{"Tp": Tp.to_json(), "xi": [str(x) for x in xi], "a": _cplx(a)} for (Tp, xi), a in sl.items()]
        ok = all(series.slice_is_positive(t, Tp, xi) for Tp, xi in sl)
        payload.update({"t": str(t), "slice": rows})
        return payload, [{"check": "slice_positive", "pass": ok}]
    sched = series.GrowthSchedule(args.delta, args.D0, args.Q, args.E)
    cert = series.growth_certify(table, sched)
    payload["certificate"] = cert.to_json()
    return payload, [{"check": "growth", "pass": cert.passed}]


def cmd_verify_lemmas(args, cfg):
    recs = verify.verify_lemmas(args.grid, cfg.seed)
    return {"grid": args.grid, "seed": cfg.seed, "records": recs}, recs


def _margin_table(recs) -> str:
    lines = [f"{'check':<26}{'lhs':>14}{'rhs':>14}{'margin':>14}  pass"]
    for r in recs:
        lines.append(f"{r['check']:<26}{r['lhs']:>14.6g}{r['rhs']:>14.6g}{r['margin']:>14.6g}  {r['pass']}")
    return "\n".join(lines)


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="siegelcert", description="Certified numerics for Siegel modular forms.")
    p.add_argument("--human", action="store_true", help="pretty-print the JSON output")
    p.add_argument("--config", help=f"JSON run configuration (default: ${CONFIG_ENV})")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    r = sub.add_parser("reduce", help="Minkowski or Siegel-set reduction")
    r.add_argument("--kind", choices=("minkowski", "siegel"), required=True)
    r.add_argument("input", help="JSON literal, file path, or - for stdin")

    e = sub.add_parser("enumerate", help="list lattice members under a trace or det cutoff")
    e.add_argument("--n", type=int, required=True)
    e.add_argument("--M", type=int, default=1)
    g = e.add_mutually_exclusive_group(required=True)
    g.add_argument("--trace", type=_frac)
    g.add_argument("--det", type=_frac)
    e.add_argument("--reduced", action="store_true", help="one canonical member per orbit (with --det)")

    b = sub.add_parser("bounds", help="series, tail, Sturm and sup bounds")
    b.add_argument("--which", choices=("S", "T", "sturm", "sup"), required=True)
    b.add_argument("--ell", type=_frac, required=True)
    b.add_argument("--n", type=int, required=True)
    b.add_argument("--mu", type=_frac)
    b.add_argument("--M", type=int, default=1)
    b.add_argument("--R", type=_frac)
    b.add_argument("--eps", type=float)
    b.add_argument("--cutoff", type=_frac, help="trace cutoff of the --verify oracle sum")
    b.add_argument("--verify", action="store_true")

    s = sub.add_parser("sturm", help="Sturm-type determinant cutoff")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--ell", type=_frac, required=True)
    s.add_argument("--M", type=int, default=1)

    v = sub.add_parser("evaluate", help="evaluate a coefficient table at a point")
    v.add_argument("--table", required=True)
    v.add_argument("--z", required=True, help="point JSON {re, im}: literal or file path")
    v.add_argument("--R", type=_frac)
    v.add_argument("--supbeta", type=float, default=0.0)
    v.add_argument("--mu", type=_frac)
    v.add_argument("--trace-cutoff", type=_frac)

    c = sub.add_parser("check", help="symmetry and growth checks on a coefficient table")
    c.add_argument("--table", required=True)
    c.add_argument("--which", choices=("psym", "fj", "growth"), required=True)
    c.add_argument("--samples", type=int, default=20)
    c.add_argument("--t", type=_frac)
    c.add_argument("--trace-cutoff", type=_frac)
    c.add_argument("--delta", type=float, default=1.5)
    c.add_argument("--D0", type=float, default=2.0)
    c.add_argument("--Q", type=float, default=1.0)
    c.add_argument("--E", type=float, default=1.0)

    L = sub.add_parser("verify-lemmas", help="run the lemma verification grid")
    L.add_argument("--grid", choices=tuple(verify.GRIDS), default="small")
    return p


def _dump(obj, human: bool) -> str:
    if human:
        return json.dumps(obj, sort_keys=True, indent=2)
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def run(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = RunConfig.load(args.config)
        if args.cmd == "enumerate":
            payload, checks = cmd_enumerate(args, cfg, out)
        else:
            handler = {
                "reduce": cmd_reduce,
                "bounds": cmd_bounds,
                "sturm": cmd_sturm,
                "evaluate": cmd_evaluate,
                "check": cmd_check,
                "verify-lemmas": cmd_verify_lemmas,
            }[args.cmd]
            payload, checks = handler(args, cfg)
    except SystemExit as exc:  # --help
        return 0 if not exc.code else 1
    except (UsageError, ValueError, KeyError, TypeError, OSError, ArithmeticError, RuntimeError) as exc:
        print(f"siegelcert: error: {exc}", file=sys.stderr)
        return 1
    ok = all(c["pass"] for c in checks)
    if args.cmd == "verify-lemmas" and args.human:
        out.write(_margin_table(checks) + "\n")
    elif args.cmd == "enumerate":
        out.write(_dump(payload["summary"], args.human) + "\n")
    else:
        if args.cmd != "verify-lemmas":
            payload["checks"] = checks
        payload["pass"] = ok
        out.write(_dump(payload, args.human) + "\n")
    return 0 if ok else 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
