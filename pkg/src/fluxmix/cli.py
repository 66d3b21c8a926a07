"""Command-line entry point: ``fluxmix <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path

from . import lindblad
from .circuit import BasisSpec
from .config import RunConfig, load_config
from .figures import FIGURES, reproduce_figure
from .plotting import emit_plot
from .response import (
    chi2_diff,
    chi2_shg,
    chi2_sum,
    mixing_moduli,
    resonant_diff_drive,
    resonant_sum_drive,
)
from .spectral import analyze, convergence_report
from .sweep import find_harmonic_flux, find_r_max, sweep, tunability_report
from .tables import write_table

log = logging.getLogger("fluxmix")


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", metavar="PATH", help="JSON run configuration")
    p.add_argument("--alpha", type=float)
    p.add_argument("--ej-over-h", type=float, help="E_J/h in GHz")
    p.add_argument("--ej-over-ec", type=float)
    p.add_argument("--ec-convention", choices=["e2/2C", "e2/C"])
    p.add_argument("--n-max", type=int)
    p.add_argument("--m-max", type=int)
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(
        prog="fluxmix", description="Flux-qutrit spectra, second-order susceptibilities, sweeps and figures.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", parents=[common], help="lowest levels and current elements at one flux")
    p.add_argument("--f", type=float)
    p.add_argument("--k", type=int, default=3)

    p = sub.add_parser("sweep", parents=[common], help="tabulate the pipeline over a flux grid")
    p.add_argument("--f-min", type=float)
    p.add_argument("--f-max", type=float)
    p.add_argument("--steps", type=int)
    p.add_argument("--columns", help="comma-separated extras: chi_sum,chi_diff,chi_shg")
    p.add_argument("--out", required=True, help="output file (.csv or .json)")
    p.add_argument("--format", choices=["csv", "json"])
    p.add_argument("--plot", metavar="SVG", help="also write an SVG of --plot-columns")
    p.add_argument("--plot-columns", default="R")

    p = sub.add_parser("chi2", parents=[common], help="closed-form second-order susceptibility")
    p.add_argument("--f", type=float, required=True)
    p.add_argument("--kind", choices=["sum", "diff", "shg"], default="sum")
    p.add_argument("--nu1", type=float, help="GHz; default resonant")
    p.add_argument("--nu2", type=float, help="GHz; default resonant")

    p = sub.add_parser("shg-point", parents=[common], help="flux where nu31 = 2 nu21")
    p.add_argument("--bracket", type=float, nargs=2, action="append", metavar=("LO", "HI"))
    p.add_argument("--tol", type=float, default=1e-6, help="|delta| tolerance in GHz")

    p = sub.add_parser("r-max", parents=[common], help="flux maximising R(f)")
    p.add_argument("--bracket", type=float, nargs=2, action="append", metavar=("LO", "HI"))
    p.add_argument("--tol", type=float, default=1e-5)

    p = sub.add_parser("tunability", parents=[common], help="maximum frequency excursions")
    p.add_argument("--f-min", type=float, default=0.5)
    p.add_argument("--f-max", type=float, default=0.53)
    p.add_argument("--steps", type=int, default=301)

    p = sub.add_parser("oracle-check", parents=[common], help="integrated dynamics vs closed form")
    p.add_argument("--f", type=float, required=True)
    p.add_argument("--resonant", choices=["sum", "diff"], default="sum")
    p.add_argument("--detune", type=float, default=0.0, help="GHz added to nu1")
    p.add_argument("--strength", type=float, default=0.1, help="Rabi rate as a fraction of the weak-drive bound")

    p = sub.add_parser("convergence", parents=[common], help="lowest levels versus truncation")
    p.add_argument("--f", type=float)
    p.add_argument("--sizes", default="8,12,16")

    p = sub.add_parser("reproduce-figure", parents=[common], help="data file and SVG for one figure")
    p.add_argument("figure", choices=sorted(FIGURES))
    p.add_argument("--out-dir")
    p.add_argument("--format", choices=["csv", "json"])
    p.add_argument("--png", action="store_true", help="also render a matplotlib PNG")
    return parser


def _config(args) -> RunConfig:
    cfg = load_config(args.config)
    circuit = {k: getattr(args, k) for k in ("alpha", "ej_over_h", "ej_over_ec", "ec_convention")
               if getattr(args, k) is not None}
    if circuit:
        cfg = replace(cfg, circuit=replace(cfg.circuit, **circuit))
    if args.n_max is not None or args.m_max is not None:
        cfg = replace(cfg, basis=BasisSpec(args.n_max or cfg.basis.n_max, args.m_max or cfg.basis.m_max))
    return cfg


def _cplx(z: complex) -> str:
    return f"{z.real:.10e}{z.imag:+.10e}j"


def cmd_spectrum(args, cfg):
    f = cfg.circuit.f if args.f is None else args.f
    spec, td = analyze(cfg.circuit.with_flux(f), cfg.basis, k=max(3, args.k))
    print(f"f = {f:.10g}  status = {spec.status}")
    for i, e in enumerate(spec.energies, 1):
        print(f"E{i} = {e:.10f} GHz")
    print(f"nu21 = {td.omega21:.10f} GHz  nu31 = {td.omega31:.10f} GHz  nu32 = {td.omega32:.10f} GHz")
    for name in ("i12", "i23", "i13"):
        z = getattr(td, name)
        print(f"{name} = {_cplx(z)}  |{name}| = {abs(z):.10e}")
    r, r1, r2 = mixing_moduli(td)
    print(f"R = {r:.10e}  R1 = {r1:.10e}  R2 = {r2:.10e}")


def cmd_sweep(args, cfg):
    g = cfg.sweep
    columns = tuple(c for c in args.columns.split(",") if c) if args.columns else g.columns
    table = sweep(cfg.circuit, g.f_min if args.f_min is None else args.f_min,
                  g.f_max if args.f_max is None else args.f_max,
                  g.steps if args.steps is None else args.steps,
                  columns=columns, basis=cfg.basis, rates=cfg.rates)
    path = write_table(table, args.out, args.format)
    print(f"wrote {len(table)} rows to {path}")
    if args.plot:
        emit_plot(table, args.plot_columns.split(","), args.plot)
        print(f"wrote {args.plot}")


def cmd_chi2(args, cfg):
    _, td = analyze(cfg.circuit.with_flux(args.f), cfg.basis)
    if args.kind == "shg":
        delta, chi = chi2_shg(td, cfg.rates)
        print(f"delta = {delta:.10e} GHz")
    else:
        fn, default = (chi2_sum, resonant_sum_drive) if args.kind == "sum" else (chi2_diff, resonant_diff_drive)
        nu1, nu2 = default(td)
        chi = fn(td, cfg.rates, args.nu1 or nu1, args.nu2 or nu2)
        print(f"nu1 = {chi.frequencies[0]:.10f} GHz  nu2 = {chi.frequencies[1]:.10f} GHz  "
              f"output = {chi.frequencies[2]:.10f} GHz")
    print(f"chi2 = {_cplx(chi.value)}")
    print(f"|chi2| = {chi.modulus:.10e}")
    if chi.note:
        print(f"note: {chi.note}")


def _brackets(args, defaults):
    return [tuple(b) for b in args.bracket] if args.bracket else defaults


def cmd_shg_point(args, cfg):
    for lo, hi in _brackets(args, [(0.48, 0.495), (0.505, 0.52)]):
        res = find_harmonic_flux(cfg.circuit, (lo, hi), args.tol, cfg.basis)
        print(f"bracket [{lo}, {hi}]: f* = {res.f_star:.8f}  delta = {res.objective:.3e} GHz  "
              f"width = {res.bracket_width:.3e}  iterations = {res.iterations}")


def cmd_r_max(args, cfg):
    for lo, hi in _brackets(args, [(0.4985, 0.5), (0.5, 0.5015)]):
        res = find_r_max(cfg.circuit, (lo, hi), args.tol, cfg.basis)
        print(f"bracket [{lo}, {hi}]: f* = {res.f_star:.8f}  R = {res.objective:.6e}  "
              f"width = {res.bracket_width:.3e}  iterations = {res.iterations}")


def cmd_tunability(args, cfg):
    d31, d21, d32 = tunability_report(cfg.circuit, args.f_min, args.f_max, args.steps, cfg.basis)
    print(f"interval [{args.f_min}, {args.f_max}]")
    print(f"delta31_max = {d31:.6f} GHz")
    print(f"delta21_max = {d21:.6f} GHz")
    print(f"delta32_max = {d32:.6f} GHz")


def cmd_oracle_check(args, cfg):
    _, td = analyze(cfg.circuit.with_flux(args.f), cfg.basis)
    kind = "sum" if args.resonant == "sum" else "difference"
    nu1, nu2 = resonant_sum_drive(td) if kind == "sum" else resonant_diff_drive(td)
    drive = lindblad.weak_drive(td, cfg.rates, kind, nu1 + args.detune, nu2, args.strength, cfg.circuit.ej_over_h)
    cmp = lindblad.oracle_check(td, cfg.rates, drive)
    print(f"f = {args.f}  kind = {kind}  nu1 = {drive.nu1:.8f} GHz  nu2 = {drive.nu2:.8f} GHz")
    print(f"numeric     = {_cplx(cmp.numeric.value)}  status = {cmp.numeric.status}")
    print(f"closed form = {_cplx(cmp.closed_form.value)}")
    print(f"relative error = {cmp.relative_error:.3e}")


def cmd_convergence(args, cfg):
    f = cfg.circuit.f if args.f is None else args.f
    sizes = [int(s) for s in args.sizes.split(",")]
    rep = convergence_report(cfg.circuit.with_flux(f), [BasisSpec(s, s) for s in sizes])
    for b, row in zip(rep.bases, rep.energies):
        print(f"({b.n_max},{b.m_max}): " + "  ".join(f"{e:.10f}" for e in row))
    for (a, b), d in zip(zip(rep.bases, rep.bases[1:]), rep.drifts):
        print(f"drift ({a.n_max})->({b.n_max}) = {d:.3e}")


def cmd_reproduce_figure(args, cfg):
    out_dir = args.out_dir or os.environ.get("FLUXMIX_OUT") or cfg.output.directory
    for path in reproduce_figure(args.figure, cfg, Path(out_dir), args.format, args.png or None):
        print(f"wrote {path}")


COMMANDS = {
    "spectrum": cmd_spectrum,
    "sweep": cmd_sweep,
    "chi2": cmd_chi2,
    "shg-point": cmd_shg_point,
    "r-max": cmd_r_max,
    "tunability": cmd_tunability,
    "oracle-check": cmd_oracle_check,
    "convergence": cmd_convergence,
    "reproduce-figure": cmd_reproduce_figure,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _config(args)
        COMMANDS[args.command](args, cfg)
    except Exception as exc:  # every module error becomes a machine-readable record
        record = {"error": type(exc).__name__, "message": str(exc), "command": args.command}
        print(json.dumps(record), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
