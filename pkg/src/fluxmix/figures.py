"""Data behind the flux-dependence figures, plus their files."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np

from .config import RunConfig
from .plotting import emit_plot, render_png
from .spectral import analyze
from .sweep import CHI_COLUMNS, SweepTable, sweep
from .tables import write_table


@dataclass(frozen=True)
class FigureSpec:
    columns: tuple[str, ...]
    title: str
    ylabel: str


FIGURES = {
    "2a": FigureSpec(("abs_i12", "abs_i23", "abs_i13"), "Transition elements |I_ij|/I_0", "|i_ij|"),
    "2b": FigureSpec(("R",), "R(f) = |i12 i23 i31|", "R (I_0^3)"),
    "2c": FigureSpec(("d21", "d31", "d32"), "Detuning from the optimal point", "nu_ij(f) - nu_ij(0.5) (GHz)"),
    "3a": FigureSpec(("nu21", "nu31", "nu32"), "Transition frequencies", "nu_ij (GHz)"),
    "3b": FigureSpec(("chi_shg",), "Second-harmonic susceptibility", "|chi2(2 nu_bar)| (I_0^3 ns^2)"),
    "4a": FigureSpec(("R1",), "R1(f) = |i21 i32|", "R1 (I_0^2)"),
    "4b": FigureSpec(("R2",), "R2(f) = |i13 i32|", "R2 (I_0^2)"),
}


@lru_cache(maxsize=8)
def _full_sweep(cfg: RunConfig) -> SweepTable:
    g = cfg.sweep
    return sweep(cfg.circuit, g.f_min, g.f_max, g.steps, columns=CHI_COLUMNS, basis=cfg.basis, rates=cfg.rates)


def figure_table(fig_id: str, cfg: RunConfig | None = None) -> SweepTable:
    if fig_id not in FIGURES:
        raise KeyError(f"unknown figure {fig_id!r}; choose from {sorted(FIGURES)}")
    cfg = cfg or RunConfig()
    full = _full_sweep(cfg)
    spec = FIGURES[fig_id]
    cols = [full.column("f")]
    if fig_id == "2c":
        ref = analyze(cfg.circuit.with_flux(0.5), cfg.basis)[1]
        offsets = {"d21": ("nu21", ref.omega21), "d31": ("nu31", ref.omega31), "d32": ("nu32", ref.omega32)}
        cols += [full.column(src) - off for src, off in (offsets[c] for c in spec.columns)]
    else:
        cols += [full.column(c) for c in spec.columns]
    return SweepTable(("f", *spec.columns), np.column_stack(cols), full.status)


def reproduce_figure(fig_id: str, cfg: RunConfig | None = None, out_dir=None,
                     fmt: str | None = None, png: bool | None = None) -> list[Path]:
    cfg = cfg or RunConfig()
    out_dir = Path(out_dir if out_dir is not None else cfg.output.directory)
    fmt = fmt or cfg.output.format
    png = cfg.output.png if png is None else png
    table = figure_table(fig_id, cfg)
    spec = FIGURES[fig_id]
    paths = [write_table(table, out_dir / f"fig{fig_id}.{fmt}", fmt)]
    svg = out_dir / f"fig{fig_id}.svg"
    emit_plot(table, spec.columns, svg, title=spec.title, ylabel=spec.ylabel)
    paths.append(svg)
    if png:
        paths.append(render_png(table, spec.columns, out_dir / f"fig{fig_id}.png",
                                title=spec.title, ylabel=spec.ylabel))
    return paths
