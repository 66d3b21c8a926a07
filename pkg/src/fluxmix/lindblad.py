"""Direct integration of the three-level relaxation equations under RWA drives.

The equations of motion, in ns with all rates in GHz, are

    d rho_ij/dt = -2 pi i [H, rho]_ij - (2 pi Gamma_ij / 2)(rho_ij - rhobar_ij)     i != j
    d rho_11/dt = -2 pi i [H, rho]_11 + 2 pi (gamma12 r22 + gamma13 r33)
    d rho_22/dt = -2 pi i [H, rho]_22 + 2 pi (-gamma12 r22 + gamma23 r33)
    d rho_33/dt = -2 pi i [H, rho]_33 - 2 pi (gamma13 + gamma23) r33

with r_ii = rho_ii - rhobar_ii and rhobar = |1><1|. H (GHz) holds the
three levels and the rotating-wave drive terms
c_ij exp(2 pi i nu t) sigma_ij + h.c., with c_ij = i_ij * phi * 2 pi E_J/h.

Coherences relax at Gamma/2 here, whereas the closed-form susceptibilities
carry Gamma. The second-order solution of these equations therefore equals
the closed form evaluated with every rate halved; see matched_closed_form.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .response import (
    DecoherenceRates,
    Susceptibility,
    chi2_diff,
    chi2_sum,
    drive_scale,
    output_field_sum,
)
from .spectral import TransitionData

log = logging.getLogger(__name__)

TWO_PI = 2 * math.pi

HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-9
POSITIVITY_TOL = 1e-9
# weak-drive bound: each Rabi rate at most Gamma_min / WEAK_RATIO
WEAK_RATIO = 20.0
BILINEAR_TOL = 0.01
STEADY_FRACTION = 0.2
RABI_STEP = 2e-3


class IntegrationError(RuntimeError):
    pass


def ground_state() -> np.ndarray:
    rho = np.zeros((3, 3), dtype=complex)
    rho[0, 0] = 1.0
    return rho


def check_density_matrix(rho: np.ndarray) -> None:
    """Raise ValueError unless rho is a valid 3x3 density matrix."""
    rho = np.asarray(rho)
    if rho.shape != (3, 3):
        raise ValueError(f"expected 3x3 density matrix, got shape {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > HERMITICITY_TOL:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > TRACE_TOL:
        raise ValueError(f"density matrix trace {np.trace(rho).real} != 1")
    if np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min() < -POSITIVITY_TOL:
        raise ValueError("density matrix has negative eigenvalues")


@dataclass(frozen=True)
class DriveSpec:
    """Two RWA tones. kind="sum": nu1 on 1<->2, nu2 on 2<->3.
    kind="difference": nu1 on 1<->3, nu2 on 2<->3. Amplitudes in Phi_0."""

    kind: str
    phi1: float
    phi2: float
    nu1: float
    nu2: float
    ej_over_h: float = 192.0

    def __post_init__(self):
        if self.kind not in ("sum", "difference"):
            raise ValueError(f"unknown drive kind {self.kind!r}")
        if self.phi1 < 0 or self.phi2 < 0:
            raise ValueError("drive amplitudes must be non-negative")
        if self.nu1 <= 0 or self.nu2 <= 0:
            raise ValueError("drive frequencies must be positive")

    @property
    def pairs(self) -> tuple[tuple[int, int], tuple[int, int]]:
        first = (1, 2) if self.kind == "sum" else (1, 3)
        return first, (2, 3)

    @property
    def frame(self) -> np.ndarray:
        """Level frequencies (GHz) of the frame in which the drives are static."""
        if self.kind == "sum":
            return np.array([0.0, self.nu1, self.nu1 + self.nu2])
        return np.array([0.0, self.nu1 - self.nu2, self.nu1])

    @property
    def output(self) -> tuple[tuple[int, int], float]:
        """Mixed coherence carrying the generated tone, and its frequency."""
        if self.kind == "sum":
            return (3, 1), self.nu1 + self.nu2
        return (2, 1), self.nu1 - self.nu2

    def couplings(self, td: TransitionData) -> list[tuple[int, int, complex, float]]:
        """(i, j, c_ij in GHz, nu) for each drive term c exp(2 pi i nu t) sigma_ij."""
        scale = TWO_PI * self.ej_over_h
        (a, b), (c, d) = self.pairs
        return [
            (a - 1, b - 1, td.element(a, b) * self.phi1 * scale, self.nu1),
            (c - 1, d - 1, td.element(c, d) * self.phi2 * scale, self.nu2),
        ]

    def rabi_rates(self, td: TransitionData) -> tuple[float, float]:
        return tuple(abs(c) for _, _, c, _ in self.couplings(td))

    def scaled(self, s1: float = 1.0, s2: float = 1.0) -> "DriveSpec":
        return DriveSpec(self.kind, self.phi1 * s1, self.phi2 * s2, self.nu1, self.nu2, self.ej_over_h)


def _gamma_matrix(rates: DecoherenceRates) -> np.ndarray:
    g = np.zeros((3, 3))
    g[0, 1] = g[1, 0] = rates.Gamma21
    g[0, 2] = g[2, 0] = rates.Gamma31
    g[1, 2] = g[2, 1] = rates.Gamma32
    return g


def _dissipator(rho: np.ndarray, gmat: np.ndarray, rates: DecoherenceRates) -> np.ndarray:
    out = -math.pi * gmat * rho  # rhobar is diagonal, so off-diagonal r_ij = rho_ij
    r22 = rho[1, 1]
    r33 = rho[2, 2]
    out[0, 0] = TWO_PI * (rates.gamma12 * r22 + rates.gamma13 * r33)
    out[1, 1] = TWO_PI * (-rates.gamma12 * r22 + rates.gamma23 * r33)
    out[2, 2] = -TWO_PI * (rates.gamma13 + rates.gamma23) * r33
    return out


def lab_hamiltonian(t: float, td: TransitionData, drive: DriveSpec | None) -> np.ndarray:
    h = np.diag(td.levels).astype(complex)
    if drive is not None:
        for i, j, c, nu in drive.couplings(td):
            v = c * np.exp(1j * TWO_PI * nu * t)
            h[i, j] += v
            h[j, i] += np.conj(v)
    return h


def rotating_hamiltonian(td: TransitionData, drive: DriveSpec) -> np.ndarray:
    """Time-independent H in the frame rotating at drive.frame."""
    h = np.diag(td.levels - drive.frame).astype(complex)
    for i, j, c, _ in drive.couplings(td):
        h[i, j] += c
        h[j, i] += np.conj(c)
    return h


def _liouvillian(rho, h, gmat, rates):
    return -1j * TWO_PI * (h @ rho - rho @ h) + _dissipator(rho, gmat, rates)


def rhs(rho, t: float, td: TransitionData, rates: DecoherenceRates, drive: DriveSpec | None = None) -> np.ndarray:
    """d rho/dt (1/ns) in the lab frame."""
    rho = np.asarray(rho, dtype=complex)
    return _liouvillian(rho, lab_hamiltonian(t, td, drive), _gamma_matrix(rates), rates)


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # lab frame, shape (len(times), 3, 3)
    dt: float

    def element(self, i: int, j: int) -> np.ndarray:
        return self.states[:, i - 1, j - 1]


def _max_frequency(td, drive, frame) -> float:
    if frame == "rotating":
        h = rotating_hamiltonian(td, drive)
        return float(np.max(np.abs(h)))
    nus = [td.omega31]
    if drive is not None:
        nus += [drive.nu1, drive.nu2, *drive.rabi_rates(td)]
    return float(max(nus))


def evolve(
    rho0,
    td: TransitionData,
    rates: DecoherenceRates,
    drive: DriveSpec | None,
    t_final: float,
    dt: float,
    *,
    frame: str = "lab",
    store_every: int = 1,
) -> Trajectory:
    """Fixed-step RK4 integration from rho0 over [0, t_final] (ns).

    frame="rotating" integrates the same equations in the frame where the
    RWA drives are static (exact change of variables; larger steps
    allowed). Stored states are always mapped back to the lab frame.
    """
    rho = np.array(rho0, dtype=complex)
    check_density_matrix(rho)
    if frame not in ("lab", "rotating"):
        raise ValueError(f"unknown frame {frame!r}")
    if frame == "rotating" and drive is None:
        frame = "lab"
    nu_max = _max_frequency(td, drive, frame)
    if nu_max > 0 and dt > 1 / (20 * nu_max) * (1 + 1e-12):
        raise ValueError(f"dt={dt} ns does not resolve {nu_max:.4g} GHz; need dt <= {1 / (20 * nu_max):.4g}")
    n_steps = int(round(t_final / dt))
    gmat = _gamma_matrix(rates)

    if frame == "rotating":
        h_rot = rotating_hamiltonian(td, drive)
        theta = drive.frame

        def deriv(r, _t):
            return _liouvillian(r, h_rot, gmat, rates)

        # rho_rot = U rho_lab U^dagger, U = diag(exp(2 pi i theta t)); U = 1 at t = 0
    else:
        theta = None

        def deriv(r, t):
            return _liouvillian(r, lab_hamiltonian(t, td, drive), gmat, rates)

    n_store = n_steps // store_every + 1
    times = np.empty(n_store)
    states = np.empty((n_store, 3, 3), dtype=complex)
    times[0], states[0] = 0.0, rho
    t = 0.0
    for step in range(1, n_steps + 1):
        k1 = deriv(rho, t)
        k2 = deriv(rho + 0.5 * dt * k1, t + 0.5 * dt)
        k3 = deriv(rho + 0.5 * dt * k2, t + 0.5 * dt)
        k4 = deriv(rho + dt * k3, t + dt)
        rho = rho + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        t = step * dt
        if step % store_every == 0:
            times[step // store_every] = t
            states[step // store_every] = rho

    if theta is not None:
        diff = np.subtract.outer(theta, theta)
        states = states * np.exp(-1j * TWO_PI * diff[None, :, :] * times[:, None, None])
    positivity = rates.completely_positive
    if not positivity:
        warnings.warn("gamma22 > 0: the relaxation equations are not completely positive; "
                      "positivity of rho is not checked", stacklevel=2)
    _validate_trajectory(times, states, dt, positivity)
    return Trajectory(times, states, dt)


def step_doubling_error(rho0, td, rates, drive, t_final, dt, *, frame="lab") -> float:
    """Largest elementwise gap between runs at dt and dt/2 on the shared time grid."""
    coarse = evolve(rho0, td, rates, drive, t_final, dt, frame=frame)
    fine = evolve(rho0, td, rates, drive, t_final, dt / 2, frame=frame, store_every=2)
    n = min(len(coarse.times), len(fine.times))
    return float(np.max(np.abs(coarse.states[:n] - fine.states[:n])))


def _validate_trajectory(times, states, dt, positivity=True) -> None:
    herm = np.max(np.abs(states - np.conj(np.swapaxes(states, 1, 2))), axis=(1, 2))
    trace = np.abs(np.trace(states, axis1=1, axis2=2) - 1)
    lam = np.linalg.eigvalsh(0.5 * (states + np.conj(np.swapaxes(states, 1, 2))))[:, 0]
    bad = (herm > HERMITICITY_TOL) | (trace > TRACE_TOL) | ~np.isfinite(trace)
    if positivity:
        bad |= lam < -POSITIVITY_TOL
    if np.any(bad):
        k = int(np.flatnonzero(bad)[0])
        raise IntegrationError(
            f"density-matrix invariants violated at t={times[k]:.6g} ns "
            f"(hermiticity {herm[k]:.2e}, trace error {trace[k]:.2e}, min eigenvalue {lam[k]:.2e}); "
            f"reduce the step size dt={dt}"
        )


def extract_component(traj: Trajectory, element: tuple[int, int], nu: float, window: float = STEADY_FRACTION) -> complex:
    """Amplitude A of rho_ij(t) ~ A exp(-2 pi i nu t) over the steady window.

    The window is the last `window` fraction of the run, trimmed to a whole
    number of periods of nu.
    """
    i, j = element
    t, y = traj.times, traj.element(i, j)
    span = window * (t[-1] - t[0])
    if nu > 0:
        periods = math.floor(span * nu * (1 + 1e-12))
        if periods < 1:
            raise ValueError(f"steady window {span:.4g} ns shorter than one period of {nu} GHz")
        span = periods / nu
    mask = t >= t[-1] - span * (1 + 1e-12)
    ts, ys = t[mask], y[mask]
    if len(ts) < 2:
        raise ValueError("steady window holds fewer than two samples")
    integrand = ys * np.exp(1j * TWO_PI * nu * ts)
    return complex(np.trapezoid(integrand, ts) / (ts[-1] - ts[0]))


def _gamma_min(rates: DecoherenceRates) -> float:
    return min(rates.Gamma21, rates.Gamma31, rates.Gamma32)


def weak_drive(
    td: TransitionData,
    rates: DecoherenceRates,
    kind: str,
    nu1: float,
    nu2: float,
    strength: float = 0.1,
    ej_over_h: float = 192.0,
) -> DriveSpec:
    """Drive whose Rabi rates sit at `strength` times the weak-drive bound."""
    probe = DriveSpec(kind, 1.0, 1.0, nu1, nu2, ej_over_h)
    r1, r2 = probe.rabi_rates(td)
    target = strength * _gamma_min(rates) / WEAK_RATIO
    return probe.scaled(target / r1 if r1 else 0.0, target / r2 if r2 else 0.0)


def default_schedule(rates: DecoherenceRates, drive: DriveSpec, td: TransitionData) -> tuple[float, float]:
    """(t_final, dt) for a rotating-frame run: discard max(10/Gamma_min, 50 periods)."""
    settle = max(10 / _gamma_min(rates), 50 / min(drive.nu1, drive.nu2))
    t_final = settle / (1 - STEADY_FRACTION)
    nu_max = _max_frequency(td, drive, "rotating")
    dt = min(0.05, 1 / (20 * nu_max)) if nu_max > 0 else 0.05
    # RK4 from the pure ground state dips below the positivity tolerance unless dt * Rabi stays small
    rabi = max(drive.rabi_rates(td))
    if rabi > 0:
        dt = min(dt, RABI_STEP / rabi)
    n = math.ceil(t_final / dt)
    return n * dt, dt


def mixed_coherence(td, rates, drive, *, t_final=None, dt=None, frame="rotating") -> complex:
    """Steady amplitude of the coherence oscillating at the generated tone."""
    if t_final is None or dt is None:
        t_auto, dt_auto = default_schedule(rates, drive, td)
        t_final = t_final or t_auto
        dt = dt or dt_auto
    store = 1 if frame == "rotating" else 10
    traj = evolve(ground_state(), td, rates, drive, t_final, dt, frame=frame, store_every=store)
    element, nu = drive.output
    return extract_component(traj, element, nu)


def _to_susceptibility(coh: complex, td: TransitionData, drive: DriveSpec) -> complex:
    # P(2) restricted to the resonant coherence, e^{+i w t} component, in printed units
    (i, j), _ = drive.output
    k = drive_scale(drive.ej_over_h)
    p = np.conj(coh * td.element(j, i))
    return complex(-p / (k**2 * drive.phi1 * drive.phi2))


def chi2_numeric(
    td: TransitionData,
    rates: DecoherenceRates,
    drive: DriveSpec,
    *,
    check_bilinear: bool = True,
    frame: str = "rotating",
    t_final: float | None = None,
    dt: float | None = None,
) -> Susceptibility:
    """Second-order susceptibility extracted from the integrated dynamics."""
    if drive.phi1 == 0 or drive.phi2 == 0:
        raise ValueError("both drive amplitudes must be non-zero")
    bound = _gamma_min(rates) / WEAK_RATIO
    rabi = drive.rabi_rates(td)
    notes = []
    status = "ok"
    if max(rabi) > bound:
        msg = f"Rabi rates {rabi[0]:.3g}, {rabi[1]:.3g} GHz exceed weak-drive bound {bound:.3g} GHz"
        warnings.warn(msg, stacklevel=2)
        notes.append(msg)
    kw = dict(frame=frame, t_final=t_final, dt=dt)
    coh = mixed_coherence(td, rates, drive, **kw)
    if check_bilinear:
        coh2 = mixed_coherence(td, rates, drive.scaled(s1=2.0), **kw)
        ratio = abs(coh2 / coh) if coh else 0.0
        if coh and abs(ratio - 2) > 2 * BILINEAR_TOL:
            status = "nonlinear"
            notes.append(f"regime violation: doubling phi1 scaled the mixed amplitude by {ratio:.4f}")
            log.warning(notes[-1])
    _, nu_out = drive.output
    return Susceptibility(
        _to_susceptibility(coh, td, drive),
        drive.kind,
        (drive.nu1, drive.nu2, nu_out),
        "; ".join(notes),
        status,
    )


def matched_closed_form(td: TransitionData, rates: DecoherenceRates, drive: DriveSpec) -> Susceptibility:
    """Closed form whose linewidths are the coherence decay rates (Gamma/2) of the integrated equations."""
    half = rates.scaled(0.5)
    fn = chi2_sum if drive.kind == "sum" else chi2_diff
    return fn(td, half, drive.nu1, drive.nu2)


def matched_output_field(td: TransitionData, rates: DecoherenceRates, drive: DriveSpec) -> complex:
    if drive.kind != "sum":
        raise ValueError("output-field formula covers sum-frequency generation only")
    return output_field_sum(
        td, rates.scaled(0.5), rates.gamma13, drive.phi1, drive.phi2, drive.nu1, drive.nu2, drive.ej_over_h
    )


@dataclass(frozen=True)
class OracleComparison:
    numeric: Susceptibility
    closed_form: Susceptibility

    @property
    def relative_error(self) -> float:
        return abs(self.numeric.value - self.closed_form.value) / abs(self.closed_form.value)


def oracle_check(td, rates, drive, **kwargs) -> OracleComparison:
    return OracleComparison(chi2_numeric(td, rates, drive, **kwargs), matched_closed_form(td, rates, drive))
