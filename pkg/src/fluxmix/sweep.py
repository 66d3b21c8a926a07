"""Flux sweeps and operating-point searches."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .circuit import BasisSpec, CircuitParams
from .response import (
    DecoherenceRates,
    RateModel,
    anharmonicity,
    chi2_diff,
    chi2_shg,
    chi2_sum,
    mixing_moduli,
    resonant_diff_drive,
    resonant_sum_drive,
    tunability,
)
from .spectral import TransitionData, analyze

BASE_COLUMNS = (
    "f", "E1", "E2", "E3", "nu21", "nu31", "nu32",
    "abs_i12", "abs_i23", "abs_i13", "R", "R1", "R2", "delta",
)
CHI_COLUMNS = ("chi_sum", "chi_diff", "chi_shg")

INV_PHI = (math.sqrt(5) - 1) / 2


class BoundaryMaximumError(ValueError):
    pass


class BracketError(ValueError):
    pass


def thread_count() -> int:
    env = os.environ.get("FLUXMIX_THREADS")
    if env:
        return max(1, int(env))
    return min(4, os.cpu_count() or 1)


@dataclass(frozen=True, eq=False)
class SweepTable:
    columns: tuple[str, ...]
    data: np.ndarray  # shape (rows, len(columns))
    status: tuple[str, ...]

    def __post_init__(self):
        self.data.setflags(write=False)

    def __len__(self) -> int:
        return self.data.shape[0]

    def column(self, name: str) -> np.ndarray:
        return self.data[:, self.columns.index(name)]

    def records(self) -> list[dict]:
        out = []
        for row, st in zip(self.data, self.status):
            rec = {c: float(v) for c, v in zip(self.columns, row)}
            rec["status"] = st
            out.append(rec)
        return out


def evaluate_point(
    params: CircuitParams,
    f: float,
    basis: BasisSpec | None = None,
    rates: DecoherenceRates | None = None,
    extra: tuple[str, ...] = (),
) -> tuple[list[float], str]:
    spec, td = analyze(params.with_flux(f), basis)
    r, r1, r2 = mixing_moduli(td)
    row = [
        f, *spec.energies[:3], td.omega21, td.omega31, td.omega32,
        abs(td.i12), abs(td.i23), abs(td.i13), r, r1, r2, anharmonicity(td),
    ]
    if extra:
        rates = rates or DecoherenceRates()
        values = {
            "chi_sum": lambda: chi2_sum(td, rates, *resonant_sum_drive(td)).modulus,
            "chi_diff": lambda: chi2_diff(td, rates, *resonant_diff_drive(td)).modulus,
            "chi_shg": lambda: chi2_shg(td, rates)[1].modulus,
        }
        row += [values[c]() for c in extra]
    return row, spec.status


def sweep(
    params: CircuitParams,
    f_min: float = 0.47,
    f_max: float = 0.53,
    steps: int = 601,
    columns=(),
    basis: BasisSpec | None = None,
    rates: DecoherenceRates | None = None,
    rate_model: RateModel | None = None,
    threads: int | None = None,
) -> SweepTable:
    """Evaluate the full pipeline on an evenly spaced flux grid.

    `columns` selects optional susceptibility columns from CHI_COLUMNS.
    `rate_model`, when given, supplies flux-dependent rates per point.
    """
    if not f_min < f_max:
        raise ValueError(f"need f_min < f_max, got [{f_min}, {f_max}]")
    if steps < 2:
        raise ValueError("need at least two sweep points")
    extra = tuple(columns)
    unknown = set(extra) - set(CHI_COLUMNS)
    if unknown:
        raise ValueError(f"unknown sweep columns {sorted(unknown)}")
    fs = np.linspace(f_min, f_max, steps)

    def job(f):
        r = rate_model(float(f)) if rate_model is not None else rates
        return evaluate_point(params, float(f), basis, r, extra)

    n = threads or thread_count()
    if n > 1:
        with ThreadPoolExecutor(max_workers=n) as pool:
            results = list(pool.map(job, fs))
    else:
        results = [job(f) for f in fs]
    data = np.array([row for row, _ in results], dtype=float)
    return SweepTable(BASE_COLUMNS + extra, data, tuple(st for _, st in results))


@dataclass(frozen=True)
class SearchResult:
    f_star: float
    objective: float
    bracket_width: float
    iterations: int


def golden_section_max(fn, lo: float, hi: float, tol: float) -> tuple[float, float, float, int]:
    """Shrink [lo, hi] around a maximum of a unimodal fn to width <= tol."""
    a, b = min(lo, hi), max(lo, hi)
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = fn(c), fn(d)
    it = 0
    while b - a > tol:
        it += 1
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = fn(d)
    x, fx = (c, fc) if fc > fd else (d, fd)
    return x, fx, b - a, it


def find_r_max(params: CircuitParams, bracket=(0.4985, 0.5), tol: float = 1e-5,
               basis: BasisSpec | None = None) -> SearchResult:
    """Golden-section maximisation of R(f) inside the bracket."""
    lo, hi = sorted(bracket)

    def r_of(f):
        return mixing_moduli(analyze(params.with_flux(f), basis)[1])[0]

    x, fx, width, it = golden_section_max(r_of, lo, hi, tol)
    if x - lo <= tol or hi - x <= tol:
        raise BoundaryMaximumError(f"R(f) has no interior maximum in [{lo}, {hi}]; best at f={x:.6f}")
    return SearchResult(x, fx, width, it)


def find_harmonic_flux(params: CircuitParams, bracket=(0.48, 0.495), tol: float = 1e-6,
                       basis: BasisSpec | None = None, max_iter: int = 200) -> SearchResult:
    """Bisection on delta(f) = nu31/2 - nu21 until |delta| < tol (GHz)."""
    lo, hi = sorted(bracket)

    def delta(f):
        return anharmonicity(analyze(params.with_flux(f), basis)[1])

    d_lo, d_hi = delta(lo), delta(hi)
    if d_lo == 0:
        return SearchResult(lo, d_lo, 0.0, 0)
    if d_hi == 0:
        return SearchResult(hi, d_hi, 0.0, 0)
    if np.sign(d_lo) == np.sign(d_hi):
        raise BracketError(f"delta(f) does not change sign on [{lo}, {hi}] ({d_lo:.4g}, {d_hi:.4g} GHz)")
    for it in range(1, max_iter + 1):
        mid = 0.5 * (lo + hi)
        d_mid = delta(mid)
        if abs(d_mid) < tol:
            return SearchResult(mid, d_mid, hi - lo, it)
        if np.sign(d_mid) == np.sign(d_lo):
            lo, d_lo = mid, d_mid
        else:
            hi = mid
    raise BracketError(f"bisection stalled after {max_iter} iterations at |delta|={abs(d_mid):.3g} GHz")


def tunability_report(params: CircuitParams, f_min: float = 0.5, f_max: float = 0.53, steps: int = 301,
                      basis: BasisSpec | None = None) -> tuple[float, float, float]:
    """(delta31, delta21, delta32) max excursions in GHz relative to f = 0.5."""
    if not 0 <= f_min <= f_max <= 1:
        raise ValueError(f"interval [{f_min}, {f_max}] must lie within [0, 1]")
    reference = analyze(params.with_flux(0.5), basis)[1]
    fs = np.linspace(f_min, f_max, steps) if f_max > f_min else np.array([f_min])
    points: list[TransitionData] = [analyze(params.with_flux(float(f)), basis)[1] for f in fs]
    return tunability(points, reference)
