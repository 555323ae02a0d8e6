"""Command-line front end.

Every report embeds the full run configuration.  Exit status: 0 on success, 1 on
invalid input, 2 when an iterative solver does not reach its tolerance.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import math
import os
import sys
from dataclasses import asdict, dataclass, field

import numpy as np

from . import center as cen
from . import families as fam
from . import geometry as geo
from . import guessing as gs
from . import infomeasures as im
from . import jsonio
from .jsonio import InputError
from .probkit import LogBase, OrderParam, sort_to_list

log = logging.getLogger("guesslab")

EXIT_OK, EXIT_INPUT, EXIT_SOLVER = 0, 1, 2
SEED_MAX = 2**64 - 1


@dataclass
class RunConfig:
    command: str
    subcommand: str | None = None
    alpha: float | None = None
    rho: float | None = None
    log_base: str = "2"
    tol: float | None = None
    seed: int = 0
    inputs: dict = field(default_factory=dict)
    output: str | None = None
    format: str = "json"
    jobs: int | None = None
    max_iter: int | None = None

    def __post_init__(self):
        if self.alpha is not None and self.rho is not None:
            raise InputError("give either --alpha or --rho, not both")
        if self.tol is not None and not self.tol > 0:
            raise InputError("--tol must be positive")
        if self.max_iter is not None and self.max_iter < 1:
            raise InputError("--max-iter must be at least 1")
        if not 0 <= self.seed <= SEED_MAX:
            raise InputError("--seed must be a 64-bit unsigned integer")

    @property
    def base(self) -> LogBase:
        return LogBase.coerce(self.log_base)

    def order(self) -> OrderParam:
        if self.alpha is None and self.rho is None:
            raise InputError("this command needs --alpha or --rho")
        try:
            return OrderParam(self.alpha) if self.alpha is not None else OrderParam.from_rho(self.rho)
        except ValueError as exc:
            raise InputError(str(exc)) from None

    def to_doc(self) -> dict:
        doc = asdict(self)
        if self.alpha is not None or self.rho is not None:
            op = self.order()
            doc["alpha"], doc["rho"] = op.alpha, op.rho
        return doc


class SolverFailure(RuntimeError):
    def __init__(self, message: str, report: dict):
        super().__init__(message)
        self.report = report


# ---------------------------------------------------------------- command bodies


def _in(cfg: RunConfig, name: str, kind: str):
    return jsonio.read(cfg.inputs[name], kind)


def cmd_entropy(cfg: RunConfig) -> dict:
    p, op, b = _in(cfg, "pmf", "pmf"), cfg.order(), cfg.base
    return {
        "H_alpha": im.renyi_entropy(p, op, b),
        "h": im.h_value(p, op),
        "side_weights": im.side_weights(p, op),
    }


def cmd_divergence(cfg: RunConfig) -> dict:
    p, q, op, b = _in(cfg, "p", "pmf"), _in(cfg, "q", "pmf"), cfg.order(), cfg.base
    if p.alphabet != q.alphabet:
        raise InputError("P and Q live on different alphabets")
    report = {"L_alpha": im.l_alpha(p, q, op, b), "I": im.i_value(p, q, op)}
    if p.ny == 1:
        report["renyi_tilted"] = im.renyi_divergence(im.tilt(p, op).row(0), im.tilt(q, op).row(0), 1 / op.alpha, b)
    return report


def _rho(cfg: RunConfig) -> float:
    return cfg.order().rho


def cmd_guess(cfg: RunConfig) -> dict:
    p, rho, b = _in(cfg, "pmf", "pmf"), _rho(cfg), cfg.base
    if cfg.subcommand == "sandwich":
        r = gs.arikan_sandwich(p, rho, b)
        return {"moment": r.moment, "exponent": r.exponent, "lower": r.lower, "upper": r.upper, "holds": r.holds}
    g = _in(cfg, "list", "list") if "list" in cfg.inputs else sort_to_list(p)
    if g.alphabet != p.alphabet:
        raise InputError("PMF and list live on different alphabets")
    if cfg.subcommand == "moment":
        return {"moment": gs.guessing_moment(p, g, rho), "exponent": gs.guessing_exponent(p, g, rho, b)}
    qg = gs.converse_pmf(g, rho)
    nz = math.log1p(math.log(p.nx)) / math.log(b.value)
    return {
        "redundancy": gs.redundancy(p, g, rho, b),
        "L_alpha_converse": im.l_alpha(p, qg, OrderParam.from_rho(rho), b),
        "nuisance": nz,
    }


def cmd_code(cfg: RunConfig) -> dict:
    p, rho = _in(cfg, "pmf", "pmf"), _rho(cfg)
    best, lopt = gs.optimal_campbell(p, rho)
    report = {"units": "bits", "optimal_exponent": best, "optimal_lengths": jsonio.lengths_to_doc(lopt),
              "H_alpha": im.renyi_entropy(p, OrderParam.from_rho(rho), LogBase.BITS)}
    l = None
    if "lengths" in cfg.inputs:
        l = _in(cfg, "lengths", "lengths")
    elif "q" in cfg.inputs:
        l = gs.campbell_length(_in(cfg, "q", "pmf"), rho)
    if l is not None:
        if l.alphabet != p.alphabet:
            raise InputError("lengths and PMF live on different alphabets")
        if not l.in_kraft_window():
            raise InputError("length function violates the Kraft window 1/2 < sum 2^-l <= 1")
        report.update(
            lengths=jsonio.lengths_to_doc(l),
            exponent=gs.campbell_exponent(p, l, rho),
            redundancy=gs.campbell_redundancy(p, l, rho),
            penalty=gs.campbell_penalty(p, l, rho),
        )
    return report


def _center_doc(fam_spec: cen.FamilySpec, res: cen.CenterResult) -> dict:
    return {
        "mu_star": res.mu_star,
        "q_star": jsonio.pmf_to_doc(res.q_star),
        "radius_C": res.radius_C,
        "k_plus": res.k_plus,
        "k_minus": res.k_minus,
        "gap": res.gap,
        "normalizer_d": res.normalizer_d,
        "nasc_residuals": res.nasc_residuals,
        "iterations": res.iterations,
        "table": [
            {"member": i, "mu": float(res.mu_star[i]), "nasc_residual": float(res.nasc_residuals[i])}
            for i in range(fam_spec.size)
        ],
    }


def _solve(fam_spec, op, cfg) -> cen.CenterResult:
    tol = cfg.tol or cen.DEFAULT_TOL
    try:
        return cen.solve_center(fam_spec, op, tol, cfg.base, max_iter=cfg.max_iter or cen.MAX_ITER)
    except cen.CenterNotConverged as exc:
        raise SolverFailure(str(exc), _center_doc(fam_spec, exc.best)) from None


def cmd_center(cfg: RunConfig) -> dict:
    fam_spec, op = _in(cfg, "family", "family"), cfg.order()
    res = _solve(fam_spec, op, cfg)
    report = _center_doc(fam_spec, res)
    if cfg.subcommand == "check":
        divs = cen.member_divergences(fam_spec, res.q_star, op, cfg.base)
        report["max_divergence_minus_C"] = float(np.max(divs)) - res.radius_C
        report["hull_residual"] = geo.center_in_hull_check(fam_spec, res, op)
        lo, hi = cen.minsup_bounds(fam_spec, res)
        report["minsup_redundancy_bounds"] = [lo, hi]
        for row, d in zip(report["table"], divs):
            row["L_alpha_to_center"] = float(d)
        if op.rho > 0:
            g = sort_to_list(res.q_star)
            red = [gs.redundancy(p, g, op.rho, cfg.base) for p in fam_spec.members]
            report["sup_redundancy"] = max(red)
            for row, r in zip(report["table"], red):
                row["redundancy"] = r
    return report


def cmd_dms(cfg: RunConfig, args) -> dict:
    if cfg.subcommand == "radius-bound":
        rb = fam.dms_radius_bound(args.m, args.n, cfg.base)
        return {"m": rb.m, "n": rb.n, "bound": rb.value, "epsilon_omitted": rb.epsilon_omitted, "note": rb.note}
    spec = fam.DmsSpec(tuple(args.letters), args.n, tuple(args.p) if args.p else None)
    g = fam.empirical_entropy_list(spec)
    report = {"list": jsonio.list_to_doc(g), "order": [g.alphabet.x[i] for i in g.order()]}
    if spec.p is not None:
        rho = _rho(cfg)
        pn = fam.iid_pmf(spec.letters, spec.p, spec.n)
        report["redundancy"] = gs.redundancy(pn, g, rho, cfg.base)
    return report


def cmd_avs(cfg: RunConfig, args) -> dict:
    spec, op, b = _in(cfg, "avs", "avs"), cfg.order(), cfg.base
    if cfg.subcommand == "rate":
        u = np.asarray(args.u, float) if args.u else np.asarray(spec.counts, float) / spec.n
        try:
            return {"U": u, "rate": fam.avs_rate(spec.channel, u, op, b)}
        except ValueError as exc:
            raise InputError(str(exc)) from None
    try:
        if cfg.subcommand == "center":
            cr = fam.avs_center_radius(spec, op, b)
            members = fam.avs_type_members(spec)
            divs = cen.member_divergences(members, cr.q_star, op, b)
            return {
                "q_star": jsonio.pmf_to_doc(cr.q_star),
                "radius": cr.radius_C,
                "members": members.size,
                "member_divergence_spread": float(np.max(divs) - np.min(divs)),
                "table": [{"member": i, "L_alpha_to_center": float(d)} for i, d in enumerate(divs)],
            }
        stitched, types = fam.avs_stitched_list(spec, op)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    return {
        "N": stitched.N,
        "types": [list(t) for t in types],
        "list": jsonio.list_to_doc(stitched.merged),
        "bound_holds": stitched.bound_holds(),
    }


def cmd_geom(cfg: RunConfig) -> dict:
    op, b = cfg.order(), cfg.base
    if cfg.subcommand == "pythagoras":
        p, q, r = _in(cfg, "p", "pmf"), _in(cfg, "q", "pmf"), _in(cfg, "r", "pmf")
        try:
            return {"residual": geo.pythagorean_residual(p, q, r, op, b)}
        except ValueError as exc:
            raise InputError(str(exc)) from None
    r, hull = _in(cfg, "r", "pmf"), _in(cfg, "hull", "hull")
    try:
        pr = geo.project(r, hull, op, cfg.tol or geo.BISECTION_TOL, b)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    return {
        "q": jsonio.pmf_to_doc(pr.q),
        "value": pr.value,
        "weights": pr.weights,
        "certificate": pr.certificate,
        "table": [{"vertex": j, "weight": float(w), "pythagorean_slack": float(s)}
                  for j, (w, s) in enumerate(zip(pr.weights, pr.certificate))],
    }


# ---------------------------------------------------------------- parser


def _order_flags(p: argparse.ArgumentParser, required: bool = True):
    grp = p.add_mutually_exclusive_group(required=required)
    grp.add_argument("--alpha", type=float, help="order alpha > 0, alpha != 1")
    grp.add_argument("--rho", type=float, help="moment rho > -1, rho != 0 (alpha = 1/(1+rho))")


def _common(p: argparse.ArgumentParser):
    p.add_argument("--log-base", default="2", choices=["2", "e"], help="units: 2 = bits, e = nats")
    p.add_argument("--tol", type=float, help="solver tolerance")
    p.add_argument("--seed", type=int, default=0, help="seed recorded in the report (64-bit unsigned)")
    p.add_argument("--format", default="json", choices=["json", "csv"], help="report format")
    p.add_argument("--output", "-o", help="write the report here instead of stdout")
    p.add_argument("--jobs", type=int, help="worker count (default: available CPUs; recorded, runs are serial)")


class _Parser(argparse.ArgumentParser):
    """Usage errors are input errors (exit 1); exit 2 is reserved for solver failures."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="guesslab", description="Guessing, coding and L_alpha geometry toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("entropy", help="conditional Renyi entropy of a PMF")
    p.add_argument("--pmf", required=True, help="PMF JSON")
    _order_flags(p)
    _common(p)

    p = sub.add_parser("divergence", help="L_alpha(P, Q) and related quantities")
    p.add_argument("--p", required=True, help="PMF JSON for P")
    p.add_argument("--q", required=True, help="PMF JSON for Q")
    _order_flags(p)
    _common(p)

    guess = sub.add_parser("guess", help="guessing moments and redundancy").add_subparsers(dest="subcommand", required=True)
    for name, helptext in [("moment", "E[G^rho] for a list"), ("redundancy", "R(P, G)"), ("sandwich", "matched-list bounds")]:
        p = guess.add_parser(name, help=helptext)
        p.add_argument("--pmf", required=True, help="PMF JSON")
        if name != "sandwich":
            p.add_argument("--list", help="guessing list JSON (default: sorted by P)")
        _order_flags(p)
        _common(p)

    code = sub.add_parser("code", help="exponential-cost source coding").add_subparsers(dest="subcommand", required=True)
    p = code.add_parser("campbell", help="optimal and mismatched Campbell exponents (bits)")
    p.add_argument("--pmf", required=True, help="PMF JSON")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--lengths", help="length function JSON")
    src.add_argument("--q", help="PMF JSON whose Campbell lengths are evaluated")
    _order_flags(p)
    _common(p)

    center = sub.add_parser("center", help="L_alpha-center of a finite family").add_subparsers(dest="subcommand", required=True)
    for name, helptext in [("solve", "center, radius and certificate"), ("check", "solve plus independent checks")]:
        p = center.add_parser(name, help=helptext)
        p.add_argument("--family", required=True, help='family JSON {"members": [pmf, ...]}')
        p.add_argument("--max-iter", type=int, help=f"solver iteration cap (default {cen.MAX_ITER})")
        _order_flags(p)
        _common(p)

    dms = sub.add_parser("dms", help="discrete memoryless sources").add_subparsers(dest="subcommand", required=True)
    p = dms.add_parser("universal", help="empirical-entropy guessing list")
    p.add_argument("--letters", nargs="+", default=["0", "1"], help="letter alphabet")
    p.add_argument("--n", type=int, required=True, help="string length")
    p.add_argument("--p", type=float, nargs="+", help="source PMF on the letters (reports redundancy)")
    _order_flags(p, required=False)
    _common(p)
    p = dms.add_parser("radius-bound", help="asymptotic radius bound (vanishing term omitted)")
    p.add_argument("--m", type=int, required=True, help="alphabet size")
    p.add_argument("--n", type=int, required=True, help="string length")
    _common(p)

    avs = sub.add_parser("avs", help="arbitrarily varying sources").add_subparsers(dest="subcommand", required=True)
    for name, helptext in [("center", "closed-form center of a type class"), ("stitch", "stitched list over all types"),
                           ("rate", "asymptotic radius rate")]:
        p = avs.add_parser(name, help=helptext)
        p.add_argument("--avs", required=True, help="AVS JSON {states, letters, channel, n, counts}")
        if name == "rate":
            p.add_argument("--u", type=float, nargs="+", help="state PMF (default: counts / n)")
        _order_flags(p)
        _common(p)

    geom = sub.add_parser("geom", help="projections and Pythagorean checks").add_subparsers(dest="subcommand", required=True)
    p = geom.add_parser("project", help="L_alpha-projection of R onto a hull")
    p.add_argument("--r", required=True, help="PMF JSON for R")
    p.add_argument("--hull", required=True, help='hull JSON {"vertices": [pmf, ...]}')
    _order_flags(p)
    _common(p)
    p = geom.add_parser("pythagoras", help="L(P,R) - L(P,Q) - L(Q,R)")
    for name in ("p", "q", "r"):
        p.add_argument(f"--{name}", required=True, help=f"PMF JSON for {name.upper()}")
    _order_flags(p)
    _common(p)
    return parser


INPUT_FLAGS = ("pmf", "p", "q", "r", "list", "lengths", "family", "hull", "avs")


def _config(args) -> RunConfig:
    inputs = {}
    for k in INPUT_FLAGS:
        v = getattr(args, k, None)
        if isinstance(v, str):
            inputs[k] = v
    return RunConfig(
        command=args.command,
        subcommand=getattr(args, "subcommand", None),
        alpha=getattr(args, "alpha", None),
        rho=getattr(args, "rho", None),
        log_base=args.log_base,
        tol=args.tol,
        seed=args.seed,
        inputs=inputs,
        output=args.output,
        format=args.format,
        jobs=args.jobs or os.cpu_count(),
        max_iter=getattr(args, "max_iter", None),
    )


def _dispatch(cfg: RunConfig, args) -> dict:
    if cfg.command == "dms":
        return cmd_dms(cfg, args)
    if cfg.command == "avs":
        return cmd_avs(cfg, args)
    table = {
        "entropy": cmd_entropy,
        "divergence": cmd_divergence,
        "guess": cmd_guess,
        "code": cmd_code,
        "center": cmd_center,
        "geom": cmd_geom,
    }
    return table[cfg.command](cfg)


def _csv(report: dict) -> str:
    buf = io.StringIO()
    rows = report.get("table")
    if rows:
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        for row in rows:
            w.writerow({k: jsonio.format_float(v) if isinstance(v, float) else v for k, v in row.items()})
        return buf.getvalue()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["key", "value"])
    for k, v in report.items():
        if isinstance(v, (float, np.floating)):
            w.writerow([k, jsonio.format_float(float(v))])
        elif isinstance(v, (int, str, bool, np.integer)):
            w.writerow([k, v])
    return buf.getvalue()


def _emit(cfg: RunConfig, report: dict):
    if cfg.format == "csv":
        text = _csv(report)
    else:
        text = jsonio.dumps({"config": cfg.to_doc(), **report})
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    logging.basicConfig(level=os.environ.get("GUESSLAB_LOG", "WARNING").upper(), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        cfg = _config(args)
        log.info("running %s %s", cfg.command, cfg.subcommand or "")
        report = _dispatch(cfg, args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SolverFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        _emit(cfg, {"status": "not_converged", **exc.report})
        return EXIT_SOLVER
    _emit(cfg, {"status": "ok", **report})
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
