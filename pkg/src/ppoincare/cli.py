"""Command line interface: every verification as a subcommand.

JSON on stdout by default (floats capped at 12 significant digits so runs
diff cleanly); --csv for the tabular subcommands.  Exit status: 0 on success,
1 when a verification fails, 2 on usage errors.
"""

import argparse
import json
import sys

import numpy as np

from . import eig2d, geom, pwl, ptrig, wirtinger1d
from .errors import DomainError

__all__ = ["main", "entry"]


def _round12(obj):
    if isinstance(obj, float):
        return float(f"{obj:.12g}")
    if isinstance(obj, dict):
        return {k: _round12(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round12(v) for v in obj]
    if isinstance(obj, (np.floating,)):
        return float(f"{float(obj):.12g}")
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [_round12(v) for v in obj.tolist()]
    return obj


def _emit(out, payload):
    json.dump(_round12(payload), out, indent=2)
    out.write("\n")


def _parse_weight(spec: str, length):
    if spec.startswith("exp:"):
        if length is None:
            raise DomainError("--L is required for exponential weights")
        return wirtinger1d.Weight1D.exponential(float(spec[4:]), length)
    if spec.startswith("spline:"):
        return wirtinger1d.Weight1D.from_csv(spec[7:])
    raise DomainError(f"weight must look like exp:<kappa> or spline:<file>, got {spec!r}")


def _cmd_pip(args, out):
    closed = ptrig.pi_p(args.p)
    quad = ptrig.pi_p_quad(args.p, args.tol)
    diff = abs(closed - quad)
    _emit(out, {"p": args.p, "pi_p": closed, "pi_p_quad": quad, "abs_diff": diff})
    return 0 if diff < 1e-9 else 1


def _cmd_wirtinger(args, out):
    w = _parse_weight(args.weight, args.L)
    rn = wirtinger1d.neumann_first_nontrivial(w, args.p, args.tol)
    rd = wirtinger1d.dirichlet_first(w, args.p, args.tol)
    gap = abs(rn.lam - rd.lam) / rd.lam
    sharp = ptrig.sharp_constant_1d(args.p, w.length)
    ok = rn.lam >= sharp * (1.0 - 1e-3) and gap <= 10.0 * args.tol
    if args.eigenfunction_out:
        rn.eigenfunction.to_csv(args.eigenfunction_out)
    _emit(
        out,
        {
            "weight": args.weight,
            "p": args.p,
            "L": w.length,
            "lambda_neumann": rn.lam,
            "lambda_dirichlet": rd.lam,
            "gap": gap,
            "sharp_1d": sharp,
            "interior_zero": rn.interior_zero,
            "satisfies_lower_bound": bool(rn.lam >= sharp * (1.0 - 1e-3)),
        },
    )
    return 0 if ok else 1


def _cmd_rearrange(args, out):
    u = pwl.PiecewiseLinear.from_csv(args.input)
    star = pwl.rearrange(u)
    if args.output:
        star.to_csv(args.output)
    kappas = np.arange(args.kappa_min, args.kappa_max + args.kappa_step / 2.0, args.kappa_step)
    report = pwl.verify_prop21(u, args.p, kappas)
    _emit(
        out,
        {
            "input": args.input,
            "p": args.p,
            "sharp": report.sharp,
            "kappa_grid": [float(kappas[0]), float(kappas[-1]), args.kappa_step],
            "min_margin": float(np.min(report.margins)),
            "violations": report.violations,
            "rearranged_breakpoints": star.x,
            "rearranged_values": star.v,
        },
    )
    return 0 if report.ok else 1


def _cmd_counterexample(args, out):
    rec = pwl.remark21_counterexample(args.p, args.eps)
    _emit(
        out,
        {
            "p": rec.p,
            "eps": rec.eps,
            "lhs": rec.lhs,
            "rhs_rearranged": rec.rhs_rearranged,
            "sharp": rec.sharp,
            "inequality_2_2_holds": not rec.rearranged_drift_is_larger,
            "prop_2_1_holds": rec.sharp_bound_holds,
        },
    )
    return 0 if rec.sharp_bound_holds else 1


def _cmd_slice(args, out):
    poly = geom.ConvexPolygon.from_file(args.polygon)
    field = geom.ScalarField.from_expression(args.field)
    shift = geom.balance_shift(poly, field, args.p, args.tol)
    balanced = field.shifted(shift)
    pieces = geom.decompose(poly, balanced, args.p, args.eps, tol=args.tol)
    total = sum(geom.area(s.polygon) for s in pieces)
    ok = (
        abs(total - geom.area(poly)) <= 1e-9 * geom.area(poly)
        and all(s.width <= args.eps for s in pieces)
    )
    _emit(
        out,
        {
            "polygon": args.polygon,
            "field": args.field,
            "p": args.p,
            "eps": args.eps,
            "balance_shift": shift,
            "piece_count": len(pieces),
            "area_total": total,
            "area_domain": geom.area(poly),
            "pieces": [
                {
                    "vertices": s.polygon.vertices,
                    "width": s.width,
                    "d_i": s.length,
                    "axis_theta": s.axis_theta,
                    "moment_residual": s.p_moment_residual,
                }
                for s in pieces
            ],
        },
    )
    return 0 if ok else 1


def _cmd_eigen2d(args, out):
    poly = geom.ConvexPolygon.from_file(args.polygon)
    msh = eig2d.mesh(poly, args.h)
    res = eig2d.rayleigh_min_2d(msh, args.p, args.tol, args.max_iters)
    d = geom.diameter(poly)
    bound = ptrig.sharp_constant_1d(args.p, d)
    ratio = res.mu / bound
    _emit(
        out,
        {
            "polygon": args.polygon,
            "p": args.p,
            "h": args.h,
            "mu": res.mu,
            "t": res.shift_t,
            "d": d,
            "bound": bound,
            "ratio": ratio,
            "iterations": res.iterations,
        },
    )
    if args.check_bound and ratio < 1.0 - 5.0 * args.h:
        return 1
    return 0


def _cmd_sharpness(args, out):
    deltas = [float(s) for s in args.deltas.split(",") if s.strip()]
    rows = eig2d.thin_slab_sharpness(args.d, deltas, args.p)
    if args.csv:
        out.write("delta,h,mu_est,bound,ratio\n")
        for r in rows:
            out.write(
                f"{r.delta:.12g},{r.h:.12g},{r.mu_est:.12g},{r.bound:.12g},{r.ratio:.12g}\n"
            )
    else:
        _emit(
            out,
            {
                "d": args.d,
                "p": args.p,
                "rows": [
                    {
                        "delta": r.delta,
                        "h": r.h,
                        "mu_est": r.mu_est,
                        "bound": r.bound,
                        "ratio": r.ratio,
                    }
                    for r in rows
                ],
            },
        )
    ratios = [r.ratio for r in rows]
    monotone = all(b <= a + 1e-6 for a, b in zip(ratios, ratios[1:]))
    final_ok = ratios[-1] <= 1.0 + max(0.05, 10.0 * rows[-1].h)
    return 0 if monotone and final_ok else 1


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="ppoincare",
        description="Sharp p-Laplacian Poincare constants on convex domains: "
        "verification subcommands with JSON/CSV output.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p_pip = sub.add_parser("pip", help="pi_p closed form with quadrature cross-check")
    p_pip.add_argument("--p", type=float, required=True)
    p_pip.add_argument("--tol", type=float, default=1e-10)

    p_w = sub.add_parser("wirtinger", help="1D weighted eigenvalues (Neumann and Dirichlet)")
    p_w.add_argument("--weight", required=True, help="exp:<kappa> or spline:<csv file>")
    p_w.add_argument("--p", type=float, required=True)
    p_w.add_argument("--L", type=float, default=None, help="domain length (exponential weights)")
    p_w.add_argument("--tol", type=float, default=1e-4)
    p_w.add_argument("--eigenfunction-out", default=None, help="CSV path for x,u samples")

    p_r = sub.add_parser("rearrange", help="rearrange a CSV function and check the drift bound")
    p_r.add_argument("--input", required=True, help='CSV rows "x,value"')
    p_r.add_argument("--output", default=None, help="CSV path for the rearranged function")
    p_r.add_argument("--p", type=float, default=2.0)
    p_r.add_argument("--kappa-min", type=float, default=-5.0)
    p_r.add_argument("--kappa-max", type=float, default=5.0)
    p_r.add_argument("--kappa-step", type=float, default=0.1)

    p_c = sub.add_parser("counterexample", help="two-slope wedge where rearrangement raises drift")
    p_c.add_argument("--p", type=float, required=True)
    p_c.add_argument("--eps", type=float, required=True)

    p_s = sub.add_parser("slice", help="zero-moment equal-area decomposition of a polygon")
    p_s.add_argument("--polygon", required=True, help='text file, one "x y" vertex per line')
    p_s.add_argument("--field", required=True, help="expression in x and y")
    p_s.add_argument("--eps", type=float, required=True)
    p_s.add_argument("--p", type=float, default=2.0)
    p_s.add_argument("--tol", type=float, default=1e-10)

    p_e = sub.add_parser("eigen2d", help="2D Neumann eigenvalue by Rayleigh minimization")
    p_e.add_argument("--polygon", required=True)
    p_e.add_argument("--p", type=float, required=True)
    p_e.add_argument("--h", type=float, required=True)
    p_e.add_argument("--tol", type=float, default=1e-7)
    p_e.add_argument("--max-iters", type=int, default=2000)
    p_e.add_argument("--check-bound", action="store_true")

    p_sh = sub.add_parser("sharpness", help="thin-slab sweep toward the interval constant")
    p_sh.add_argument("--d", type=float, required=True)
    p_sh.add_argument("--deltas", required=True, help="comma separated, decreasing")
    p_sh.add_argument("--p", type=float, required=True)
    p_sh.add_argument("--csv", action="store_true")

    return ap


_HANDLERS = {
    "pip": _cmd_pip,
    "wirtinger": _cmd_wirtinger,
    "rearrange": _cmd_rearrange,
    "counterexample": _cmd_counterexample,
    "slice": _cmd_slice,
    "eigen2d": _cmd_eigen2d,
    "sharpness": _cmd_sharpness,
}


def main(argv=None, out=None) -> int:
    out = out if out is not None else sys.stdout
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _HANDLERS[args.command](args, out)
    except (DomainError, OSError, ValueError) as exc:
        print(f"ppoincare: error: {exc}", file=sys.stderr)
        return 2


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
