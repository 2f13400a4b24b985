"""Command-line interface.

Every subcommand prints its records to stdout as CSV or JSON.  ``figure1``
and ``dmax --scan`` also write the data file and SVG charts into ``--out``;
other commands write their data file there only when ``--out`` is given.

Exit codes: 0 success, 2 domain or argument error, 3 numerical
non-convergence, 4 I/O error.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from . import __version__
from .config import ENV_VAR, load_config, parse_gammas
from .correlation import (
    TSIRELSON_ANGLES,
    bell_original_check,
    chsh_value,
    estimate_correlation_mc,
    expectation_quadrature,
    model_E,
    quantum_E,
)
from .distance import ScanError, distance_d, distance_gamma0_antidiagonal, dmax_scan, find_dmax
from .distance import solve_gamma0_maximum, stationarity_residual
from .errors import ConvergenceError, DomainError
from .model import solve_coefficients, verify_constraints
from .reports import (
    FigureSeries,
    figure1_records,
    figure1_series,
    plot_series,
    render,
    write_text,
)

EXIT_OK, EXIT_DOMAIN, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4

# Options whose values may start with "-" but are not plain numbers.
_RANGE_OPTIONS = ("--scan", "--gammas")


def _global_options(parser, suppress):
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--out", default=default, help="output directory")
    parser.add_argument("--format", choices=("csv", "json"), default=default)
    parser.add_argument("--config", default=default, help=f"key = value file (else ${ENV_VAR})")
    parser.add_argument("--seed", type=int, default=default)
    parser.add_argument("--tol", type=float, default=default, help="relative quadrature tolerance")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bell-mdl",
        description="Measurement-dependent local models of the singlet state.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    _global_options(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text)
        _global_options(p, suppress=True)
        return p

    p = add("coeffs", "solve c1, c2 for one (phi, gamma)")
    p.add_argument("--phi", type=float, required=True)
    p.add_argument("--gamma", type=float, default=0.0)

    p = add("figure1", "c1 and c2 against phi for a grid of gamma")
    p.add_argument("--gammas", help="lo:hi:step or comma list")
    p.add_argument("--phi-steps", type=int)

    p = add("correlate", "model correlation by quadrature or Monte Carlo")
    p.add_argument("--phi", type=float, required=True)
    p.add_argument("--gamma", type=float, default=0.0)
    p.add_argument("--method", choices=("quad", "mc"), default="quad")
    p.add_argument("--n", type=int)

    p = add("bell", "original Bell inequality and CHSH for quantum and model correlations")
    p.add_argument("--phi-xy", type=float, default=math.pi / 2)
    p.add_argument("--phi-xz", type=float, default=math.pi / 4)
    p.add_argument("--phi-yz", type=float, default=math.pi / 4)
    p.add_argument("--gamma", type=float, action="append",
                   help="model member to check as well (repeatable; default 0)")

    p = add("chsh", "CHSH combination |E(ab)-E(ab')| + |E(a'b)+E(a'b')|")
    p.add_argument("--angles", type=float, nargs=4, default=list(TSIRELSON_ANGLES),
                   metavar=("AB", "AB2", "A2B", "A2B2"))
    p.add_argument("--gamma", type=float, action="append")

    p = add("distance", "distance between the densities of two settings")
    p.add_argument("--phi-a", type=float, required=True)
    p.add_argument("--phi-b", type=float, required=True)
    p.add_argument("--gamma", type=float, default=0.0)

    p = add("dmax", "maximum distance over the restricted region")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--gamma", type=float)
    group.add_argument("--scan", help="lo:hi:step or comma list of gamma")
    p.add_argument("--grid-n", type=int)
    p.add_argument("--refine-tol", type=float)
    p.add_argument("--phi-min", type=float)
    p.add_argument("--workers", type=int, default=1)

    add("gamma0-analytic", "closed-form maximum for gamma = 0")
    return parser


def _join_range_values(argv):
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in _RANGE_OPTIONS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


# ---------------------------------------------------------------------------
# Commands.  Each returns (records, extra files to announce).
# ---------------------------------------------------------------------------


def cmd_coeffs(args, cfg):
    c = solve_coefficients(args.phi, args.gamma, cfg.quadrature)
    norm_res, corr_res = verify_constraints(c, cfg.quadrature)
    return [{"phi": c.phi, "gamma": c.gamma, "c1": c.c1, "c2": c.c2,
             "norm_residual": norm_res, "corr_residual": corr_res}]


def cmd_figure1(args, cfg):
    out = Path(cfg.out)
    rows = figure1_records(cfg.gammas, cfg.phi_steps, cfg.quadrature)
    data = write_text(out / f"figure1.{cfg.format}", render("figure1", rows, cfg.format))
    files = [(data, len(rows))]
    for col in ("c1", "c2"):
        path = plot_series(figure1_series(rows, col), out / f"figure1_{col}.svg",
                           "phi_xy (rad)", col, f"{col} against phi_xy")
        files.append((path, None))
    return [{"artifact": str(p), "rows": n} for p, n in files]


def cmd_correlate(args, cfg):
    target = quantum_E(args.phi)
    if args.method == "quad":
        e = expectation_quadrature(args.phi, args.gamma, cfg.quadrature)
        return [{"method": "quad", "phi": float(args.phi), "gamma": float(args.gamma), "E": e,
                 "target": target, "residual": abs(e - target), "std_err": None,
                 "n_accepted": None, "n_proposed": None, "seed": None}]
    est = estimate_correlation_mc(args.phi, args.gamma, cfg.n, cfg.seed, spec=cfg.quadrature)
    return [{"method": "mc", "phi": float(args.phi), "gamma": float(args.gamma), "E": est.mean,
             "target": target, "residual": abs(est.mean - target), "std_err": est.std_err,
             "n_accepted": est.n_accepted, "n_proposed": est.n_proposed, "seed": est.seed}]


def _sources(gammas, cfg):
    yield "quantum", None, quantum_E
    for g in gammas:
        yield "model", float(g), model_E(g, cfg.quadrature)


def cmd_bell(args, cfg):
    rows = []
    for source, gamma, E in _sources(args.gamma or [0.0], cfg):
        res = bell_original_check(args.phi_xy, args.phi_xz, args.phi_yz, E)
        rows.append({"test": "bell", "source": source, "gamma": gamma,
                     "lhs": res.lhs, "rhs": res.rhs, "violated": res.violated})
        s = chsh_value(*TSIRELSON_ANGLES, E=E)
        rows.append({"test": "chsh", "source": source, "gamma": gamma,
                     "lhs": s, "rhs": 2.0, "violated": s > 2.0})
    return rows


def cmd_chsh(args, cfg):
    rows = []
    for source, gamma, E in _sources(args.gamma or [], cfg):
        s = chsh_value(*args.angles, E=E)
        rows.append({"source": source, "gamma": gamma, "chsh": s, "local_bound": 2.0,
                     "violated": s > 2.0})
    return rows


def cmd_distance(args, cfg):
    d = distance_d(args.phi_a, args.phi_b, args.gamma, cfg.quadrature)
    return [{"phi_a": float(args.phi_a), "phi_b": float(args.phi_b),
             "gamma": float(args.gamma), "d": d}]


def _dmax_row(r):
    return {"gamma": r.gamma, "phi_a": r.argmax.phi_a, "phi_b": r.argmax.phi_b,
            "d_max": r.d_max, "grid_n": r.grid_n, "refine_tol": r.refine_tol,
            "phi_min": r.phi_min, "at_lower_edge": r.at_lower_edge}


def cmd_dmax(args, cfg):
    if args.scan is None:
        gamma = 0.0 if args.gamma is None else args.gamma
        r = find_dmax(gamma, cfg.grid_n, cfg.refine_tol, cfg.phi_min, cfg.quadrature)
        return [_dmax_row(r)]
    results = dmax_scan(parse_gammas(args.scan), cfg.grid_n, cfg.refine_tol, cfg.phi_min,
                        cfg.quadrature, workers=args.workers)
    rows = [_dmax_row(r) for r in results]
    out = Path(cfg.out)
    write_text(out / f"dmax.{cfg.format}", render("dmax", rows, cfg.format))
    if len(rows) > 1:
        series = FigureSeries("d_max", [r["gamma"] for r in rows], [r["d_max"] for r in rows])
        plot_series([series], out / "dmax.svg", "gamma", "d_max", "maximum distance against gamma",
                    colors=("black",), marker="o")
    return rows


def cmd_gamma0_analytic(args, cfg):
    phi_star, d_star = solve_gamma0_maximum()
    quarter = distance_gamma0_antidiagonal(math.pi / 4)
    return [
        {"quantity": "phi_star", "value": phi_star},
        {"quantity": "d_max", "value": d_star},
        {"quantity": "stationarity_residual_at_phi_star", "value": stationarity_residual(phi_star)},
        {"quantity": "d_at_pi_over_4", "value": quarter},
        {"quantity": "stationarity_residual_at_pi_over_4", "value": stationarity_residual(math.pi / 4)},
        {"quantity": "d_max_minus_d_at_pi_over_4", "value": d_star - quarter},
        # open interval for d_max of any other singlet model: [0.276142, 0.276434)
        {"quantity": "open_interval_lower", "value": 0.276142},
        {"quantity": "open_interval_upper", "value": 0.276434},
    ]


COMMANDS = {
    "coeffs": cmd_coeffs,
    "figure1": cmd_figure1,
    "correlate": cmd_correlate,
    "bell": cmd_bell,
    "chsh": cmd_chsh,
    "distance": cmd_distance,
    "dmax": cmd_dmax,
    "gamma0-analytic": cmd_gamma0_analytic,
}

_WRITES_OWN_FILES = {"figure1"}


def main(argv=None) -> int:
    argv = _join_range_values(sys.argv[1:] if argv is None else list(argv))
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(
            args.config,
            out=args.out,
            format=args.format,
            seed=args.seed,
            rel_tol=args.tol,
            n=getattr(args, "n", None),
            gammas=parse_gammas(args.gammas) if getattr(args, "gammas", None) else None,
            phi_steps=getattr(args, "phi_steps", None),
            grid_n=getattr(args, "grid_n", None),
            refine_tol=getattr(args, "refine_tol", None),
            phi_min=getattr(args, "phi_min", None),
        )
        records = COMMANDS[args.command](args, cfg)
        text = render(args.command, records, cfg.format)
        if args.out is not None and args.command not in _WRITES_OWN_FILES and not (
                args.command == "dmax" and args.scan is not None):
            write_text(Path(cfg.out) / f"{args.command}.{cfg.format}", text)
        sys.stdout.write(text)
    except ScanError as exc:
        print(f"error: {exc}", file=sys.stderr)
        numeric = any(isinstance(e, ConvergenceError) for _, e in exc.failures)
        return EXIT_NUMERIC if numeric else EXIT_DOMAIN
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
