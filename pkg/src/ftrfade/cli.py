"""Command-line front end: curve tables, simulation and self-validation.

Exit codes: 0 success, 1 validation failure, 2 invalid arguments,
3 numeric failure.
"""
import argparse
import itertools
import math
import sys

import numpy as np

from . import __version__
from ._backend import BACKEND
from .channel import (
    FtrParams,
    InvalidParameter,
    RsParams,
    ftr_cdf,
    ftr_pdf,
    log_ftr_gmgf,
    rs_cdf,
    rs_pdf,
)
from .composite import (
    CompositeParams,
    OutageQuery,
    amplitude_cdf,
    amplitude_pdf,
    composite_cdf,
    composite_pdf,
    outage_asymptotic,
)
from .mcsim import DEFAULT_SEED, SimConfig, ks_distance, sample_composite, sample_ftr_power, tabulated_cdf
from .specfun import NumericFailure
from .tables import CurveTable
from .validation import run_checks

EXIT_OK, EXIT_VALIDATION, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3

PRESETS = {
    "fig1": {"command": "pdf", "m": [1.5, 3.0], "k": [4.0], "delta": [0.2], "grid": "0:6:0.05"},
    "fig2": {
        "command": "composite",
        "m": [2.0], "k": [4.0], "delta": [0.2],
        "lam": [2.0, 5.0, 50.0], "z_bar": [1.0, 5.0],
        "domain": "amplitude", "grid": "0:6:0.05",
    },
    "fig3": {
        "command": "outage",
        "m": [2.0, 10.0], "k": [4.0, 15.0], "delta": [0.3], "lam": [2.0],
        "log_grid": "-5:0:10",
    },
}

DEFAULTS = {
    "gamma_bar": [1.0], "m": [2.0], "k": [4.0], "delta": [0.2], "lam": [2.0], "z_bar": [1.0],
    "grid": "0:6:0.05", "log_grid": "-5:0:10", "domain": "power", "model": "ftr",
    "n": [0.0, 1.0, 2.0, 3.0], "s": [0.0, -0.1, -1.0, -10.0],
}


class UsageError(Exception):
    pass


def _floats(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def parse_grid(text):
    """``lo:hi:step`` -> inclusive linear grid."""
    try:
        lo, hi, step = (float(v) for v in text.split(":"))
    except ValueError:
        raise UsageError(f"--grid expects lo:hi:step, got {text!r}")
    if not (step > 0 and hi >= lo):
        raise UsageError("--grid needs step > 0 and hi >= lo")
    n = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return lo + step * np.arange(n)


def parse_log_grid(text):
    """``lo:hi:ppd`` in decades -> log-spaced grid with ``ppd`` points per decade."""
    try:
        lo, hi, ppd = text.split(":")
        lo, hi, ppd = float(lo), float(hi), int(ppd)
    except ValueError:
        raise UsageError(f"--log-grid expects lo:hi:ppd, got {text!r}")
    if not (ppd > 0 and hi >= lo):
        raise UsageError("--log-grid needs ppd > 0 and hi >= lo")
    return 10.0 ** np.linspace(lo, hi, int(round((hi - lo) * ppd)) + 1)


def _resolve(args):
    """Fill unset options from the preset, then from global defaults."""
    preset = PRESETS.get(args.preset, {}) if args.preset else {}
    if args.preset and args.preset not in PRESETS:
        raise UsageError(f"unknown preset {args.preset!r}; choose from {', '.join(PRESETS)}")
    if preset and preset["command"] != args.command:
        raise UsageError(f"preset {args.preset} belongs to the {preset['command']!r} subcommand")
    for key, value in DEFAULTS.items():
        if getattr(args, key, None) is None:
            setattr(args, key, preset.get(key, value))
    return args


def _label(base, combo, varying):
    parts = [f"{k}={v:g}" for k, v in combo.items() if k in varying]
    return f"{base}[{';'.join(parts)}]" if parts else base


def _combos(args, keys):
    names = {"gamma_bar": "gamma_bar", "m": "m", "k": "K", "delta": "delta", "lam": "lambda", "z_bar": "z_bar"}
    lists = [getattr(args, k) for k in keys]
    varying = {names[k] for k, v in zip(keys, lists) if len(v) > 1}
    combos = [dict(zip([names[k] for k in keys], vals)) for vals in itertools.product(*lists)]
    return combos, varying


RELEVANT = {
    "pdf": ("model", "gamma_bar", "m", "k", "delta", "grid"),
    "cdf": ("model", "gamma_bar", "m", "k", "delta", "grid"),
    "gmgf": ("gamma_bar", "m", "k", "delta", "n", "s"),
    "composite": ("domain", "m", "k", "delta", "lam", "z_bar", "grid"),
    "outage": ("m", "k", "delta", "lam", "log_grid"),
    "simulate": ("model", "gamma_bar", "m", "k", "delta", "lam", "z_bar", "grid"),
    "validate": (),
}


def _metadata(args, **extra):
    meta = {"command": args.command, "version": __version__, "backend": BACKEND}
    if args.preset:
        meta["preset"] = args.preset
    for key in RELEVANT[args.command]:
        value = getattr(args, key, None)
        if value is not None:
            meta[key] = ",".join("%.17g" % v for v in value) if isinstance(value, list) else value
    meta.update(extra)
    return meta


def cmd_pdf(args, cdf=False):
    x = parse_grid(args.grid)
    combos, varying = _combos(args, ["gamma_bar", "m", "k", "delta"])
    columns, data = ["x"], [x]
    for combo in combos:
        if args.model == "rs":
            p = RsParams(combo["gamma_bar"], combo["m"], combo["K"])
            y = rs_cdf(x, p) if cdf else rs_pdf(x, p)
        elif args.model == "ftr":
            p = FtrParams(combo["gamma_bar"], combo["m"], combo["K"], combo["delta"])
            y = ftr_cdf(x, p) if cdf else ftr_pdf(x, p)
        else:
            raise UsageError(f"unknown model {args.model!r}")
        columns.append(_label("cdf" if cdf else "pdf", combo, varying))
        data.append(np.asarray(y, dtype=float))
    return CurveTable(columns, np.column_stack(data).tolist(), _metadata(args))


def cmd_cdf(args):
    return cmd_pdf(args, cdf=True)


def cmd_gmgf(args):
    combos, varying = _combos(args, ["gamma_bar", "m", "k", "delta"])
    if len(combos) != 1:
        raise UsageError("gmgf takes a single parameter set")
    c = combos[0]
    p = FtrParams(c["gamma_bar"], c["m"], c["K"], c["delta"])
    rows = []
    for n in args.n:
        for s in args.s:
            if s > 0:
                raise InvalidParameter("GMGF argument s must be <= 0")
            quad = math.exp(log_ftr_gmgf(n, s, p, "quadrature"))
            if float(n).is_integer():
                closed = math.exp(log_ftr_gmgf(n, s, p, "closed"))
                rows.append([n, s, closed, "closed", closed, quad, abs(closed - quad) / quad])
            else:
                rows.append([n, s, quad, "quadrature", math.nan, quad, math.nan])
    columns = ["n", "s", "gmgf", "path", "closed_form", "phase_quadrature", "rel_diff"]
    return CurveTable(columns, rows, _metadata(args))


def _composite_limits_at_zero(c, domain):
    # f_Z(0+) = lam f_V(0) / ((lam - 1) Z_bar); the amplitude density vanishes at r = 0
    if domain == "amplitude":
        return 0.0, 0.0
    lam = c.shadow.lam
    return lam * ftr_pdf(0.0, c.fading) / ((lam - 1.0) * c.mean_power), 0.0


def cmd_composite(args):
    x = parse_grid(args.grid)
    if args.domain not in ("power", "amplitude"):
        raise UsageError("--domain must be power or amplitude")
    combos, varying = _combos(args, ["m", "k", "delta", "lam", "z_bar"])
    columns, data = ["r" if args.domain == "amplitude" else "z"], [x]
    pos = x > 0
    for combo in combos:
        c = CompositeParams.from_values(combo["z_bar"], combo["m"], combo["K"], combo["delta"], combo["lambda"])
        pdf = np.empty_like(x)
        cdf = np.empty_like(x)
        pdf[~pos], cdf[~pos] = _composite_limits_at_zero(c, args.domain)
        if args.domain == "amplitude":
            pdf[pos] = amplitude_pdf(x[pos], c)
            cdf[pos] = amplitude_cdf(x[pos], c)
        else:
            pdf[pos] = composite_pdf(x[pos], c)
            cdf[pos] = composite_cdf(x[pos], c)
        # the grid is sorted; absorb last-ulp wobble of sums that have reached 1
        columns += [_label("pdf", combo, varying), _label("cdf", combo, varying)]
        data += [pdf, np.maximum.accumulate(cdf)]
    return CurveTable(columns, np.column_stack(data).tolist(), _metadata(args))


def cmd_outage(args):
    ratio = parse_log_grid(args.log_grid)
    combos, varying = _combos(args, ["m", "k", "delta", "lam"])
    columns, data = ["ratio"], [ratio]
    for combo in combos:
        c = CompositeParams.from_values(1.0, combo["m"], combo["K"], combo["delta"], combo["lambda"])
        exact = composite_cdf(ratio * c.mean_power, c)
        asym = np.array([outage_asymptotic(OutageQuery(r, 1.0), c) for r in ratio])
        columns += [_label("exact", combo, varying), _label("asymptotic", combo, varying)]
        data += [np.asarray(exact, dtype=float), asym]
    return CurveTable(columns, np.column_stack(data).tolist(), _metadata(args))


def cmd_simulate(args):
    x = parse_grid(args.grid)
    cfg = SimConfig(args.samples, args.seed)
    c0 = {k: getattr(args, k)[0] for k in ("gamma_bar", "m", "k", "delta", "lam", "z_bar")}
    if args.model == "ftr":
        p = FtrParams(c0["gamma_bar"], c0["m"], c0["k"], c0["delta"])
        emp = sample_ftr_power(p, cfg)
        analytic = tabulated_cdf(lambda t: ftr_cdf(t, p), p.mean_power)
    elif args.model == "composite":
        c = CompositeParams.from_values(c0["z_bar"], c0["m"], c0["k"], c0["delta"], c0["lam"])
        emp = sample_composite(c, cfg)
        analytic = tabulated_cdf(lambda t: composite_cdf(t, c), c.mean_power)
    else:
        raise UsageError("simulate supports --model ftr or composite")
    ks = ks_distance(emp, analytic)
    rows = np.column_stack([x, emp.ecdf(x), analytic(x)]).tolist()
    meta = _metadata(args, samples=args.samples, seed=args.seed, streams=cfg.stream_count,
                     ks_distance="%.17g" % ks, sample_mean="%.17g" % emp.mean())
    return CurveTable(["x", "ecdf", "cdf"], rows, meta)


def cmd_validate(args):
    cfg = SimConfig(args.samples, args.seed)
    checks = run_checks(cfg, fault=args.inject_fault)
    rows = [[ch.name, ch.measured, ch.threshold, ch.status] for ch in checks]
    meta = _metadata(args, samples=args.samples, seed=args.seed, inject_fault=args.inject_fault)
    return CurveTable(["check", "measured", "threshold", "status"], rows, meta)


COMMANDS = {
    "pdf": cmd_pdf,
    "cdf": cmd_cdf,
    "gmgf": cmd_gmgf,
    "composite": cmd_composite,
    "outage": cmd_outage,
    "simulate": cmd_simulate,
    "validate": cmd_validate,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="ftrfade", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__} ({BACKEND})")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--gamma-bar", dest="gamma_bar", type=_floats)
        p.add_argument("--m", type=_floats)
        p.add_argument("--k", type=_floats)
        p.add_argument("--delta", type=_floats)
        p.add_argument("--lambda", dest="lam", type=_floats)
        p.add_argument("--z-bar", dest="z_bar", type=_floats)
        p.add_argument("--grid", help="lo:hi:step")
        p.add_argument("--log-grid", dest="log_grid", help="lo:hi:points-per-decade, in decades")
        p.add_argument("--model", help="ftr | rs (pdf, cdf) or ftr | composite (simulate)")
        p.add_argument("--domain", help="power | amplitude (composite)")
        p.add_argument("--n", type=_floats, help="GMGF orders (gmgf)")
        p.add_argument("--s", type=_floats, help="GMGF arguments, all <= 0 (gmgf)")
        p.add_argument("--samples", type=int, default=200_000)
        p.add_argument("--seed", type=lambda v: int(v, 0), default=DEFAULT_SEED)
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--out", help="output path (default: stdout)")
        p.add_argument("--preset", help="fig1 | fig2 | fig3")
        if name == "validate":
            p.add_argument("--inject-fault", dest="inject_fault", type=float, default=0.0,
                           help="relative perturbation of one closed-form GMGF coefficient")
    return parser


def run(argv=None):
    """Parse ``argv``, run the subcommand, return (table, exit code)."""
    args = _resolve(build_parser().parse_args(argv))
    table = COMMANDS[args.command](args)
    code = EXIT_OK
    if args.command == "validate" and any(row[3] != "PASS" for row in table.rows):
        code = EXIT_VALIDATION
    text = table.render(args.format)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return table, code


def main(argv=None):
    try:
        _, code = run(argv)
    except (UsageError, InvalidParameter, ValueError) as exc:
        print(f"ftrfade: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericFailure as exc:
        print(f"ftrfade: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return code


if __name__ == "__main__":
    sys.exit(main())
