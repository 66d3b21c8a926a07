"""Closed-form second-order response of the three-level flux circuit.

Public inputs are ordinary frequencies nu (GHz); every formula works with
angular frequencies omega = 2 pi nu and angular linewidths 2 pi Gamma, so a
susceptibility value carries units of I_0^3 / (2 pi GHz)^2 = I_0^3 ns^2.
The printed forms are used as-is, without hbar factors. To turn one into the
physical polarisation per unit drive, multiply by -(I_0 Phi_0 / hbar)^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace
from typing import Callable, Sequence

import numpy as np

from .spectral import TransitionData

TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class DecoherenceRates:
    """Relaxation (gamma_ij) and pure-dephasing (gamma_ii) rates, GHz."""

    gamma12: float = 0.050
    gamma13: float = 0.010
    gamma23: float = 0.010
    gamma22: float = 0.0
    gamma33: float = 0.010

    def __post_init__(self):
        for fld in fields(self):
            if getattr(self, fld.name) < 0:
                raise ValueError(f"{fld.name} must be non-negative")

    @property
    def Gamma21(self) -> float:
        return self.gamma12

    @property
    def Gamma31(self) -> float:
        return self.gamma13 + self.gamma23 + self.gamma33

    @property
    def Gamma32(self) -> float:
        return self.gamma12 + self.gamma13 + self.gamma23 + self.gamma22 + self.gamma33

    # Gamma_ij = Gamma_ji
    Gamma12 = Gamma21
    Gamma13 = Gamma31
    Gamma23 = Gamma32

    @property
    def completely_positive(self) -> bool:
        """Whether the relaxation equations built from these rates preserve positivity.

        Gamma12 carries no dephasing of level 2 while Gamma23 carries
        gamma22, which no Lindblad dephasing channel can reproduce unless
        gamma22 vanishes.
        """
        return self.gamma22 == 0

    def Gamma(self, i: int, j: int) -> float:
        key = (min(i, j), max(i, j))
        return {(1, 2): self.Gamma21, (1, 3): self.Gamma31, (2, 3): self.Gamma32}[key]

    def scaled(self, factor: float) -> "DecoherenceRates":
        return replace(self, **{f.name: getattr(self, f.name) * factor for f in fields(self)})


# Hook for flux-dependent rates; None means the rates are flux independent.
RateModel = Callable[[float], DecoherenceRates]


@dataclass(frozen=True)
class Susceptibility:
    value: complex
    kind: str  # "sum" | "difference" | "second-harmonic"
    frequencies: tuple[float, ...] = ()
    note: str = ""
    status: str = "ok"

    @property
    def modulus(self) -> float:
        return abs(self.value)


def chi2_sum(td: TransitionData, rates: DecoherenceRates, nu1: float, nu2: float) -> Susceptibility:
    """Sum-frequency susceptibility; nu1 drives 1<->2, nu2 drives 2<->3."""
    if nu1 <= 0 or nu2 <= 0:
        raise ValueError("drive frequencies must be positive")
    nu_plus = nu1 + nu2
    d1 = 1j * TWO_PI * (nu1 - td.omega21) + TWO_PI * rates.Gamma21
    d2 = 1j * TWO_PI * (nu_plus - td.omega31) + TWO_PI * rates.Gamma31
    return Susceptibility(td.i12 * td.i23 * td.i31 / (d1 * d2), "sum", (nu1, nu2, nu_plus))


def chi2_diff(td: TransitionData, rates: DecoherenceRates, nu1: float, nu2: float) -> Susceptibility:
    """Difference-frequency susceptibility; nu1 drives 1<->3, nu2 drives 2<->3.

    The generated tone is nu_minus = nu1 - nu2, which is resonant with the
    1<->2 transition when nu1 = nu31 and nu2 = nu32.
    """
    if not nu1 >= nu2 > 0:
        raise ValueError("difference generation needs nu1 >= nu2 > 0")
    nu_minus = nu1 - nu2
    d1 = 1j * TWO_PI * (nu_minus - td.omega21) + TWO_PI * rates.Gamma21
    d2 = 1j * TWO_PI * (nu1 - td.omega31) + TWO_PI * rates.Gamma31
    note = "zero-frequency limit (nu1 == nu2), outside the modelled mixing processes" if nu_minus == 0 else ""
    return Susceptibility(td.i13 * td.i21 * td.i32 / (d1 * d2), "difference", (nu1, nu2, nu_minus), note)


def anharmonicity(td: TransitionData) -> float:
    """nu31/2 - nu21 in GHz; zero on a harmonic ladder."""
    return td.omega31 / 2 - td.omega21


def chi2_shg(td: TransitionData, rates: DecoherenceRates) -> tuple[float, Susceptibility]:
    """Anharmonicity and second-harmonic susceptibility modulus at nu_bar = nu31/2."""
    delta = anharmonicity(td)
    r, _, _ = mixing_moduli(td)
    mag = r / (TWO_PI * rates.Gamma13 * math.hypot(TWO_PI * delta, TWO_PI * rates.Gamma12))
    nu_bar = td.omega31 / 2
    return delta, Susceptibility(complex(mag), "second-harmonic", (nu_bar, nu_bar, 2 * nu_bar))


def mixing_moduli(td: TransitionData) -> tuple[float, float, float]:
    r = abs(td.i12 * td.i23 * td.i31)
    r1 = abs(td.i21 * td.i32)
    r2 = abs(td.i13 * td.i32)
    return r, r1, r2


def drive_scale(ej_over_h: float) -> float:
    """I_0 Phi_0 / hbar in rad/ns: converts i_ij * Phi/Phi_0 to an angular coupling."""
    return TWO_PI * (TWO_PI * ej_over_h)


def output_field_sum(
    td: TransitionData,
    rates: DecoherenceRates,
    gamma13: float,
    phi1: float,
    phi2: float,
    nu1: float,
    nu2: float,
    ej_over_h: float = 192.0,
) -> complex:
    """Sum-frequency output amplitude <c_out> (vacuum input), sqrt(rad/ns) units.

    amplitude = -sqrt(2 pi gamma13) * i21 * i32 * phi1 * phi2 * K**2
                / [(i w21 - i w1 + 2 pi G21) (i w31 - i w+ + 2 pi G31)]

    with K = 2 pi (2 pi E_J/h) = I_0 Phi_0 / hbar and phi in units of Phi_0.
    The bracket equals rho_31 at frequency w+; the prefactor is the
    coupling of the 1<->3 channel to the line.
    """
    if phi1 < 0 or phi2 < 0:
        raise ValueError("drive amplitudes must be non-negative")
    k = drive_scale(ej_over_h)
    w1, wp = TWO_PI * nu1, TWO_PI * (nu1 + nu2)
    d1 = 1j * (TWO_PI * td.omega21 - w1) + TWO_PI * rates.Gamma21
    d2 = 1j * (TWO_PI * td.omega31 - wp) + TWO_PI * rates.Gamma31
    return -math.sqrt(TWO_PI * gamma13) * td.i21 * td.i32 * phi1 * phi2 * k**2 / (d1 * d2)


def resonant_sum_drive(td: TransitionData) -> tuple[float, float]:
    return td.omega21, td.omega32


def resonant_diff_drive(td: TransitionData) -> tuple[float, float]:
    return td.omega31, td.omega32


def tunability(points: Sequence[TransitionData], reference: TransitionData | None = None) -> tuple[float, float, float]:
    """Largest excursions (delta31, delta21, delta32) in GHz from the reference point.

    Excursions are taken in absolute value: nu32 decreases away from the
    optimal point while nu21 and nu31 increase. The reference defaults to
    the point closest to f = 0.5.
    """
    if not points:
        raise ValueError("empty sweep")
    if reference is None:
        reference = min(points, key=lambda p: abs((p.f if p.f is not None else 0.5) - 0.5))
    nu = np.array([[p.omega31, p.omega21, p.omega32] for p in points])
    ref = np.array([reference.omega31, reference.omega21, reference.omega32])
    d31, d21, d32 = np.max(np.abs(nu - ref), axis=0)
    return float(d31), float(d21), float(d32)
