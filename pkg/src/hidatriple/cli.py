"""Command line front end.

    hidatriple classical {eisenstein,delta,stabilize} ...
    hidatriple family {build,specialize} ...
    hidatriple ordproj --p 11 --weight 24 --prec-p 4
    hidatriple triple-l {compute,verify} --config run.json --out dir

Exit status is 0 iff every check performed by the command passed.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .classical import (
    delta_qexp,
    eisenstein_series,
    level1_basis,
    ordinary_eigenforms,
    p_stabilize,
)
from .errors import HidaTripleError, HypothesisViolation
from .families import build_family_from_grid, eisenstein_stabilized
from .io import RunConfig, load_family, max_q_needed, write_csv, write_json
from .iwasawa import ArithPoint, weight_point

log = logging.getLogger("hidatriple")


def _emit_qexp(coeffs, out: str | None, mod: int | None, p: int | None, prec: int | None) -> None:
    rows = [[n, int(a)] for n, a in enumerate(coeffs)]
    header = ["n", "a_n"] if mod is None else ["n", f"a_n mod {p}^{prec}"]
    if out:
        write_csv(out, header, rows)
    else:
        w = sys.stdout
        w.write(",".join(header) + "\n")
        for r in rows:
            w.write(f"{r[0]},{r[1]}\n")


# ---------------------------------------------------------------------------
# classical


def cmd_classical(args) -> int:
    if args.what == "eisenstein":
        mod = args.p**args.prec_p if args.p else None
        f = eisenstein_series(args.weight, args.prec_q, mod)
        _emit_qexp(f.coeffs, args.out, mod, args.p, args.prec_p)
        return 0
    if args.what == "delta":
        f = delta_qexp(args.prec_q)
        _emit_qexp(f.qexp.coeffs, args.out, None, None, None)
        return 0
    # stabilize
    if args.form != "delta":
        forms = ordinary_eigenforms(args.weight, args.p, args.prec_p, args.prec_q)
        if not forms:
            log.error("no ordinary eigenforms of weight %s", args.weight)
            return 1
        f = forms[0]
    else:
        f = delta_qexp(args.prec_q)
    fs = p_stabilize(f, args.p, args.prec_p, args.root)
    alpha = fs.eigenvalues[args.p]
    print(f"U_p eigenvalue: {alpha} mod {args.p}^{args.prec_p} (residue {alpha % args.p} mod {args.p})")
    _emit_qexp(fs.qexp.coeffs, args.out, args.p**args.prec_p, args.p, args.prec_p)
    return 0


# ---------------------------------------------------------------------------
# family


def cmd_family(args) -> int:
    p = args.p
    if args.what == "build":
        if not args.weights:
            raise SystemExit("family build: empty grid")
        specs = []
        for k in args.weights:
            if args.source == "eisenstein":
                q = eisenstein_stabilized(k, p, args.prec_q, args.prec_p)
            else:
                forms = ordinary_eigenforms(k, p, args.prec_p, max(args.prec_q, 2 * p))
                if len(forms) != 1:
                    log.error("weight %s has %s ordinary eigenforms", k, len(forms))
                    return 1
                q = p_stabilize(forms[0], p, args.prec_p).qexp
            specs.append((ArithPoint(k), q))
        fam = build_family_from_grid(specs, p, args.prec_p, args.prec_q, label=args.source)
        d = fam.to_json()
        d["precision"] = {"p": p, "Np": fam.Np}
        write_json(args.out or "family.json", d)
        print(f"family with {len(args.weights)} nodes, precision {p}^{fam.Np}")
        return 0
    # specialize
    from .families import LambdaAdicForm

    fam = LambdaAdicForm.from_json(json.loads(Path(args.family).read_text()))
    x = weight_point(args.weight, fam.p, fam.Np)
    f, prec = fam.specialize_at(x, args.prec_q)
    ok = True
    if args.check:
        mod = fam.p**prec
        if fam.label == "eisenstein":
            ref = eisenstein_stabilized(args.weight, fam.p, f.B, fam.Np)
        else:
            forms = ordinary_eigenforms(args.weight, fam.p, fam.Np, max(f.B, 2 * fam.p))
            ref = p_stabilize(forms[0], fam.p, fam.Np).qexp
        ok = all((int(a) - int(b)) % mod == 0 for a, b in zip(f.coeffs[1:], ref.coeffs[1:]))
        print(f"check against the direct stabilisation mod {fam.p}^{prec}: {'pass' if ok else 'FAIL'}")
    _emit_qexp(f.coeffs, args.out, fam.p**prec, fam.p, prec)
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# ordproj


def cmd_ordproj(args) -> int:
    from .ordproj import (
        fredholm,
        newton_polygon,
        ordinary_projector,
        projector_checks,
        slope_multiplicity,
    )

    p, k, N = args.p, args.weight, args.prec_p
    op = ordinary_projector(p, k, N)
    mod = p**N
    checks = projector_checks(op.e, op.up.A, mod)
    P = fredholm(op.up, mod)
    mult0 = slope_multiplicity(P, p, N, 0)
    checks["slope0_equals_rank"] = mult0 == op.rank
    checks["classical_rank"] = op.rank == _ordinary_classical_rank(p, k, N)
    report = {
        "p": p,
        "k": k,
        "precision": {"p": p, "Np": N},
        "basis_dim": op.basis.dim,
        "rank_e": op.rank,
        "newton_polygon": [[str(s), m] for s, m in newton_polygon(P, p, N)],
        "checks": checks,
    }
    if args.out:
        write_json(args.out, report)
    print(json.dumps(report, indent=1))
    return 0 if all(checks.values()) else 1


def _ordinary_classical_rank(p: int, k: int, N: int) -> int:
    from .classical import _rank_mod_p, dim_cusp_level1, hecke_matrix
    from .linalg import mat_pow

    # T_p on a basis with d leading indices needs coefficients up to p (d + 1)
    sp = level1_basis(k, p * (dim_cusp_level1(k) + 2))
    if sp.dim == 0:
        return 0
    T = hecke_matrix(sp, p, p)
    return _rank_mod_p(mat_pow(T, sp.dim, p), p)


# ---------------------------------------------------------------------------
# triple-l


def _apply_overrides(cfg: RunConfig, args) -> RunConfig:
    if args.p is not None:
        cfg.p = args.p
    if args.prec_p is not None:
        cfg.prec.Np = args.prec_p
    if args.prec_q is not None:
        cfg.prec.B = args.prec_q
    xs = [args.prec_x1, args.prec_x2, args.prec_x3]
    if any(x is not None for x in xs):
        M = list(cfg.prec.M or [len(g) for g in cfg.grid])
        for i, x in enumerate(xs):
            if x is not None:
                M[i] = x
        cfg.prec.M = tuple(M)
    if cfg.prec.M is not None:
        grid = []
        for g, m in zip(cfg.grid, cfg.prec.M):
            if m > len(g):
                raise SystemExit(f"truncation degree {m} exceeds the {len(g)} grid weights on its axis")
            grid.append(g[:m])
        cfg.grid = tuple(grid)
    if args.out:
        cfg.out = args.out
    return cfg


def build_context(cfg: RunConfig):
    from .characters import DirichletChar
    from .triple import TripleContext

    Bq = max_q_needed(cfg)
    F = load_family(cfg.F, cfg.p, max(cfg.p, cfg.prec.B))
    G2 = load_family(cfg.G2, cfg.p, Bq)
    G3 = G2 if cfg.G3 == cfg.G2 else load_family(cfg.G3, cfg.p, Bq)
    psi = tuple(f.nebentypus or DirichletChar.trivial(1) for f in (F, G2, G3))
    return TripleContext(
        cfg.p,
        F,
        G2,
        G3,
        grid=cfg.grid,
        levels=cfg.levels,
        psi=psi,
        a=cfg.a,
        Np=cfg.prec.Np,
        B=cfg.prec.B,
        asserted=cfg.asserted,
    )


def _pipeline(cfg: RunConfig):
    from .triple import L_raw, fudge_unit, normalize_L, run_grid, validate_hypotheses

    ctx = build_context(cfg)
    hyp = validate_hypotheses(ctx)
    ctx.a = hyp.a
    run = run_grid(ctx, workers=cfg.workers)
    L = L_raw(ctx, run)
    fudge = []
    for l in _primes(ctx.N):
        fudge.extend(b.value for b in fudge_unit(l, ctx))
    from .characters import char_decompose

    psi1_p_minus1 = char_decompose(ctx.psi[0], ctx.p)[0].parity()
    Ln = normalize_L(L, fudge, psi1_p_minus1, allow_extension=cfg.allow_extension)
    return ctx, hyp, run, L, Ln, fudge, psi1_p_minus1


def _primes(n: int) -> list[int]:
    from .triple import _prime_factors

    return _prime_factors(n)


def _points(cfg: RunConfig):
    pts = [(a, b, c) for a in cfg.grid[0] for b in cfg.grid[1] for c in cfg.grid[2]]
    return pts + [Q for Q in cfg.held_out if Q not in pts]


def cmd_triple(args) -> int:
    from .errors import DataError
    from .triple import (
        arch_Lfactor,
        check_normalization,
        euler_factors_at,
        verify_two_path,
    )

    cfg = _apply_overrides(RunConfig.load(args.config), args)
    out = Path(cfg.out)
    try:
        ctx, hyp, run, L, Ln, fudge, s = _pipeline(cfg)
    except HypothesisViolation as exc:
        print(f"aborted: Hypothesis ({exc.name}) failed: {exc}", file=sys.stderr)
        return 2
    p = cfg.p
    ledger = {
        "p": p,
        "Np_input": cfg.prec.Np,
        "per_point": {str(Q): {"precision": r.prec, "t": r.t, "binomial_loss": r.binom_loss} for Q, r in run.results.items()},
        "L_raw_precision": L.value.Np,
    }
    base = {"hypotheses": hyp.status, "a": hyp.a, "a_solutions": list(hyp.a_solutions), "ledger": ledger}
    if args.action == "compute":
        write_json(out / "L_raw.json", {**L.to_json(), "precision": {"p": p, "Np": L.value.Np}})
        write_json(out / "L_normalized.json", {**Ln.to_json(), "precision": {"p": p, "Np": Ln.value.Np}})
        rows = []
        for Q in _points(cfg):
            v = L.specialize(Q)
            w = Ln.specialize(Q)
            try:
                eu = euler_factors_at(ctx, Q, hyp.a)
                e_adj = f"{eu.adjoint.unit}*{p}^{eu.adjoint.val}"
                e_tri = f"{eu.triple.unit}*{p}^{eu.triple.val}"
                eprec = eu.triple.relprec
            except DataError:
                e_adj = e_tri = "needs epsilon"
                eprec = ""
            ar = arch_Lfactor(*Q)
            rows.append(
                [
                    *Q,
                    Q not in run.results,
                    v.residue,
                    w.residue,
                    Ln.sqrt_ext,
                    v.N,
                    e_adj,
                    e_tri,
                    eprec,
                    f"{ar.rational}*2^({ar.pow2})*pi^({ar.powpi})",
                ]
            )
        write_csv(
            out / "specializations.csv",
            ["k1", "k2", "k3", "held_out", "L_raw", "L_norm_over_sqrt_ext", "sqrt_ext", "precision_Np", "euler_adjoint", "euler_triple", "euler_relprec", "arch_L"],
            rows,
        )
        write_json(out / "report.json", base)
        print(f"wrote {out}/L_raw.json, L_normalized.json, specializations.csv (precision {p}^{L.value.Np})")
        return 0
    # verify
    checks = {}
    tp = verify_two_path(ctx, cfg.held_out, run, min_prec=1)
    checks["two_path"] = tp.ok
    checks["normalization_squared"] = check_normalization(L, Ln, fudge, s)
    theta = run.theta
    checks["theta_squared"] = all(theta(z) * theta(z) == theta.squared_closed_form(z) for z in (2, 3, 7))
    euler = {}
    for Q in _points(cfg):
        try:
            eu = euler_factors_at(ctx, Q, hyp.a)
            euler[str(Q)] = eu.ok
        except DataError:
            euler[str(Q)] = "skipped (ramified twist; epsilon not supplied)"
    checks["euler_two_path"] = all(v is True for v in euler.values() if not isinstance(v, str))
    rep = {**base, "checks": checks, "two_path": [{**r, "point": list(r["point"])} for r in tp.rows], "euler": euler}
    write_json(out / "verify.json", rep)
    for r in tp.rows:
        tag = "held-out" if r["held_out"] else "grid"
        print(f"{'PASS' if r['pass'] else 'FAIL'} two-path {r['point']} ({tag}) mod {p}^{r['precision']}")
    for k, v in checks.items():
        print(f"{'PASS' if v else 'FAIL'} {k}")
    return 0 if all(checks.values()) else 1


# ---------------------------------------------------------------------------


def _add_common(sp: argparse.ArgumentParser, p_default: int | None = 11) -> None:
    sp.add_argument("--p", type=int, default=p_default)
    sp.add_argument("--prec-p", type=int, default=8, help="p-adic precision Np")
    sp.add_argument("--prec-q", "--B", dest="prec_q", type=int, default=20, help="q-expansion bound B")
    sp.add_argument("--out", default=None)


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hidatriple")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="cmd", required=True)

    c = sub.add_parser("classical")
    c.add_argument("what", choices=["eisenstein", "delta", "stabilize"])
    _add_common(c, None)
    c.add_argument("--weight", type=int, default=12)
    c.add_argument("--form", default="delta")
    c.add_argument("--root", choices=["unit", "nonunit"], default="unit")
    c.set_defaults(func=cmd_classical)

    f = sub.add_parser("family")
    f.add_argument("what", choices=["build", "specialize"])
    _add_common(f)
    f.add_argument("--source", choices=["eisenstein", "delta-hida"], default="eisenstein")
    f.add_argument("--weights", type=int, nargs="*", default=[])
    f.add_argument("--family", help="family JSON for specialize")
    f.add_argument("--weight", type=int)
    f.add_argument("--check", action="store_true")
    f.set_defaults(func=cmd_family)

    o = sub.add_parser("ordproj")
    _add_common(o)
    o.add_argument("--weight", type=int, default=24)
    o.set_defaults(func=cmd_ordproj)

    t = sub.add_parser("triple-l")
    t.add_argument("action", choices=["compute", "verify"])
    t.add_argument("--config", required=True)
    t.add_argument("--p", type=int, default=None)
    t.add_argument("--prec-p", type=int, default=None)
    t.add_argument("--prec-q", type=int, default=None)
    t.add_argument("--prec-x1", type=int, default=None)
    t.add_argument("--prec-x2", type=int, default=None)
    t.add_argument("--prec-x3", type=int, default=None)
    t.add_argument("--out", default=None)
    t.set_defaults(func=cmd_triple)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = make_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except HidaTripleError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
