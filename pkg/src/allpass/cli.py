"""Command-line interface.

Subcommands: simulate, fit, order-select, are-table, diagnose, deconv,
mc-study. Exit status is 0 on success, 1 on usage errors and 2 on numeric or
estimation failures; failures also print one JSON line on stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field

import numpy as np

from allpass import __version__, io
from allpass.asymptotics import are, efficiency_report, scalar_multiple_R
from allpass.errors import AllPassError, DomainError
from allpass.estimation import FitOptions, fit
from allpass.noise import make_noise
from allpass.order import select_order
from allpass.pipeline import deconv_identify, diagnose, prefit_ar
from allpass.residuals import AllPassParams
from allpass.simulate import simulate_allpass, simulate_ar
from allpass.study import estimation_study, order_study
from allpass.weights import get_weight

DEFAULT_NOISES = ("laplace", "logistic", "t3", "t6", "t9", "t12", "t15", "t20", "t30")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class RunConfig:
    subcommand: str
    options: dict = field(default_factory=dict)

    def resolved(self) -> dict:
        return {"subcommand": self.subcommand, **self.options}


def _add_noise(p):
    p.add_argument("--noise", default="laplace", help="laplace, logistic, t, tNU, gaussian, mixture")
    p.add_argument("--var", type=float, default=None, help="noise variance (default 1)")
    p.add_argument("--df", type=float, default=None, help="degrees of freedom for --noise t")


def _add_weight(p, multiple=False):
    if multiple:
        p.add_argument("--weights", nargs="+", default=["wilcoxon"])
    else:
        p.add_argument("--weights", default="wilcoxon", help="wilcoxon, arctan (lad-like) or vdw")
    p.add_argument("--m", type=float, default=500.0, help="arctan weight steepness")


def _add_fit_opts(p):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--starts", type=int, default=1000)
    p.add_argument("--refine", type=int, default=12)
    p.add_argument("--kernel", default="gaussian", help="gaussian or tNU")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="allpass", description="Rank-based estimation for all-pass models")
    parser.add_argument("--version", action="version", version=f"allpass {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="subcommand", parser_class=_Parser, required=True)

    sp = sub.add_parser("simulate", help="simulate an all-pass or AR series")
    sp.add_argument("--phi", type=float, nargs="+", required=True)
    _add_noise(sp)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--burnin", type=int, default=None)
    sp.add_argument("--model", choices=("allpass", "ar"), default="allpass")
    sp.add_argument("-o", "--output", default="-")

    sp = sub.add_parser("fit", help="R-estimate an all-pass model of order p")
    sp.add_argument("-i", "--input", required=True)
    sp.add_argument("--p", type=int, required=True)
    _add_weight(sp)
    _add_fit_opts(sp)
    sp.add_argument("-o", "--output", default="-")

    sp = sub.add_parser("order-select", help="select the all-pass order")
    sp.add_argument("-i", "--input", required=True)
    sp.add_argument("--P", type=int, default=5)
    _add_weight(sp)
    _add_fit_opts(sp)
    sp.add_argument("-o", "--output", default="-")

    sp = sub.add_parser("are-table", help="asymptotic relative efficiencies")
    _add_weight(sp)
    sp.add_argument("--noise", nargs="+", default=list(DEFAULT_NOISES))
    sp.add_argument("--reference", default="vdw", help="second R weight for the R-to-R column ('none' to skip)")
    sp.add_argument("-o", "--output", default="-")

    sp = sub.add_parser("diagnose", help="ACFs of w, w^2 and |w|")
    sp.add_argument("-i", "--input", required=True)
    sp.add_argument("--max-lag", type=int, default=20)
    sp.add_argument("-o", "--output", default="-")

    sp = sub.add_parser("deconv", help="identify the all-pass order of prefit residuals")
    sp.add_argument("-i", "--input", required=True)
    sp.add_argument("--prefit-ar", type=int, default=0,
                    help="treat input as a raw series and prefit a causal AR of this order")
    sp.add_argument("--P", type=int, default=5)
    _add_weight(sp)
    _add_fit_opts(sp)
    sp.add_argument("--max-lag", type=int, default=20)
    sp.add_argument("-o", "--output", default="-")
    sp.add_argument("--diagnostics", default=None, help="CSV path for the final residual ACFs")

    sp = sub.add_parser("mc-study", help="Monte Carlo accuracy/coverage or order-selection study")
    sp.add_argument("--phi", type=float, nargs="+", required=True)
    _add_noise(sp)
    sp.add_argument("--n", type=int, nargs="+", required=True)
    sp.add_argument("--replicates", type=int, default=200)
    _add_weight(sp, multiple=True)
    _add_fit_opts(sp)
    sp.add_argument("--order-select", type=int, default=None, metavar="P",
                    help="tabulate selected orders with this P instead of estimates")
    sp.add_argument("--workers", type=int, default=None)
    sp.add_argument("-o", "--output", default="-")

    for action in sub.choices.values():
        action.add_argument("--config", default=None, help="JSON file of option defaults")
    return parser


def _apply_config(parser, argv):
    """Parse ``argv``, letting a ``--config`` JSON file supply defaults for known options."""
    args = parser.parse_args(argv)
    if not getattr(args, "config", None):
        return args
    try:
        with open(args.config, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read config {args.config}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise UsageError("config file must hold a JSON object")
    subparser = parser._subparsers._group_actions[0].choices[args.subcommand]
    known = {a.dest for a in subparser._actions} - {"help", "config"}
    unknown = sorted(set(k.replace("-", "_") for k in cfg) - known)
    if unknown:
        raise UsageError(f"unknown config keys for {args.subcommand}: {unknown}")
    subparser.set_defaults(**{k.replace("-", "_"): v for k, v in cfg.items()})
    return parser.parse_args(argv)


def _weight(args, name=None):
    return get_weight(name or args.weights, args.m)


def _fit_options(args):
    if args.starts < 1 or args.refine < 1:
        raise DomainError("--starts and --refine must be positive")
    return FitOptions(n_starts=args.starts, n_refine=min(args.refine, args.starts),
                      seed=args.seed, kernel=args.kernel)


def _cmd_simulate(args, cfg):
    noise = make_noise(args.noise, args.var, args.df)
    params = AllPassParams(args.phi)
    gen = simulate_allpass if args.model == "allpass" else simulate_ar
    sim = gen(params, noise, args.n, seed=args.seed, burnin=args.burnin)
    io.write_columns(args.output, {"x": sim.x}, cfg)


def _fit_report(res):
    return res.as_dict()


def _cmd_fit(args, cfg):
    x = io.read_series(args.input)
    w = _weight(args)
    opts = _fit_options(args)
    res = fit(x, args.p, w, opts)
    io.write_report(args.output, _fit_report(res), cfg)


def _order_fields(rep):
    out = {
        "P": rep.P,
        "n": rep.n,
        "tau_hat": rep.tau_hat,
        "threshold": rep.threshold,
        "selected_r": rep.selected_r if rep.selected_r is not None else "undetermined",
        "at_boundary": rep.at_boundary,
    }
    for rec in rep.records:
        out[f"order_{rec.p}"] = (
            f"coefficient={io.fmt(rec.coefficient)} significant={io.fmt(rec.significant)}"
            + (f" error={rec.error}" if rec.error else "")
        )
    if rep.note:
        out["note"] = rep.note
    return out


def _cmd_order(args, cfg):
    x = io.read_series(args.input)
    rep = select_order(x, args.P, _weight(args), _fit_options(args))
    io.write_report(args.output, _order_fields(rep), cfg)
    return 0 if rep.selected_r is not None else 2


def _cmd_are(args, cfg):
    w = _weight(args)
    ref = None if args.reference.lower() == "none" else get_weight(args.reference, args.m)
    rows = []
    for name in args.noise:
        noise = make_noise(name)
        rep = efficiency_report(w, noise)
        row = {
            "noise": noise.name,
            "weight": w.name,
            "multiple_R": rep.multiple_R,
            "multiple_LAD": rep.multiple_LAD,
            "multiple_ML": rep.multiple_ML,
            "ARE_R_to_LAD": f"{rep.are_R_LAD:.3f}",
            "ARE_R_to_ML": f"{rep.are_R_ML:.3f}",
        }
        if ref is not None:
            row[f"ARE_R_to_R_{ref.name}"] = f"{are(scalar_multiple_R(ref, noise), rep.multiple_R):.3f}"
        rows.append(row)
    io.write_rows(args.output, rows, cfg)


def _cmd_diagnose(args, cfg):
    w = io.read_series(args.input)
    diag = diagnose(w, args.max_lag)
    _write_diag(args.output, diag, cfg)


def _write_diag(path, diag, cfg):
    cols = list(zip(*diag.rows()))
    io.write_columns(path, dict(zip(("lag", "acf_w", "acf_w2", "acf_absw", "bound"), cols)), cfg)


def _cmd_deconv(args, cfg):
    series = io.read_series(args.input)
    prefit = None
    if args.prefit_ar:
        prefit, w = prefit_ar(series, args.prefit_ar)
    else:
        w = series
    res = deconv_identify(w, args.P, _weight(args), _fit_options(args), args.max_lag)
    fields = _order_fields(res.order)
    if prefit is not None:
        fields["prefit_ar_phi"] = prefit.tolist()
    fields["input_exceedances"] = json.dumps(res.input_diagnostics.exceedances)
    if res.fit is not None:
        for k, v in res.fit.as_dict().items():
            fields[f"fit_{k}"] = v
    fields["final_exceedances"] = json.dumps(res.diagnostics.exceedances)
    io.write_report(args.output, fields, cfg)
    if args.diagnostics:
        _write_diag(args.diagnostics, res.diagnostics, cfg)
    return 0 if res.order.selected_r is not None else 2


def _cmd_mc(args, cfg):
    noise = make_noise(args.noise, args.var, args.df)
    opts = _fit_options(args)
    weights = [_weight(args, name) for name in args.weights]
    rows = []
    for n in args.n:
        for w in weights:
            if args.order_select:
                st = order_study(args.phi, noise, w, n, P=args.order_select,
                                 replicates=args.replicates, seed=args.seed, opts=opts,
                                 workers=args.workers)
                row = {"n": n, "phi0": " ".join(io.fmt(v) for v in st.phi0), "weight": w.name,
                       "noise": noise.name}
                row.update({(k if isinstance(k, str) else f"r{k}"): v for k, v in st.frequencies.items()})
                rows.append(row)
            else:
                st = estimation_study(args.phi, noise, w, n, replicates=args.replicates,
                                      seed=args.seed, opts=opts, workers=args.workers)
                rows.extend(st.rows())
    io.write_rows(args.output, rows, cfg)


COMMANDS = {
    "simulate": _cmd_simulate,
    "fit": _cmd_fit,
    "order-select": _cmd_order,
    "are-table": _cmd_are,
    "diagnose": _cmd_diagnose,
    "deconv": _cmd_deconv,
    "mc-study": _cmd_mc,
}


def _fail(kind, message, code):
    print(json.dumps({"status": "error", "kind": kind, "message": str(message)}), file=sys.stderr)
    return code


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
    except UsageError as exc:
        return _fail("usage", exc, 1)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    opts = {k: v for k, v in vars(args).items() if k not in ("subcommand", "verbose", "config")}
    cfg = RunConfig(args.subcommand, opts).resolved()
    try:
        code = COMMANDS[args.subcommand](args, cfg)
    except (DomainError, OSError) as exc:
        return _fail("usage", exc, 1)
    except (AllPassError, ArithmeticError, np.linalg.LinAlgError) as exc:
        return _fail("numeric", exc, 2)
    return code or 0


def main():  # pragma: no cover
    sys.exit(run())


if __name__ == "__main__":  # pragma: no cover
    sys.exit(run())
