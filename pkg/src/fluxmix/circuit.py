"""Three-junction flux circuit in a truncated charge (plane-wave) basis.

Energies are E/h in GHz. The basis state (n, m) has wavefunction
exp(-i (n phi_p + m phi_m)) and only pairs with n = m (mod 2) are kept;
that sector is the one compatible with 2*pi periodicity in the junction
phases and it is closed under every coupling below.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

# Charging energy E_c = e^2 / (2 C_J). With the alternate e^2 / C_J
# convention the kinetic coefficients double; select it via ec_convention.
EC_CONVENTIONS = {"e2/2C": 1.0, "e2/C": 2.0}


class TruncationError(ValueError):
    """Basis too small for the coupling stencil."""


@dataclass(frozen=True)
class CircuitParams:
    ej_over_h: float = 192.0
    alpha: float = 0.8
    ej_over_ec: float = 48.0
    f: float = 0.5
    ec_convention: str = "e2/2C"

    def __post_init__(self):
        if not self.ej_over_h > 0:
            raise ValueError(f"ej_over_h must be positive, got {self.ej_over_h}")
        if not self.ej_over_ec > 0:
            raise ValueError(f"ej_over_ec must be positive, got {self.ej_over_ec}")
        if self.ec_convention not in EC_CONVENTIONS:
            raise ValueError(f"unknown ec_convention {self.ec_convention!r}")
        if not 0.0 <= self.f <= 1.0:
            raise ValueError(f"reduced flux f must lie in [0, 1], got {self.f}")
        if not 0.5 < self.alpha < 1.0:
            warnings.warn(
                f"alpha={self.alpha} outside the flux-qubit range 0.5<α<1",
                stacklevel=3,
            )

    @property
    def ec_over_h(self) -> float:
        return self.ej_over_h / self.ej_over_ec * EC_CONVENTIONS[self.ec_convention]

    def with_flux(self, f: float) -> "CircuitParams":
        return CircuitParams(self.ej_over_h, self.alpha, self.ej_over_ec, f, self.ec_convention)


@dataclass(frozen=True)
class BasisSpec:
    n_max: int = 12
    m_max: int = 12

    def __post_init__(self):
        if self.n_max < 4 or self.m_max < 4:
            raise TruncationError(
                f"basis ({self.n_max}, {self.m_max}) too small for the coupling stencil; need >= 4"
            )

    @property
    def states(self) -> np.ndarray:
        return _states(self.n_max, self.m_max)

    @property
    def dim(self) -> int:
        return len(self.states)


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    entries: np.ndarray
    basis: BasisSpec = field(default_factory=BasisSpec)

    def __post_init__(self):
        self.entries.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def hermiticity_error(self) -> float:
        """Relative Frobenius norm of M - M^dagger."""
        m = self.entries
        scale = np.linalg.norm(m)
        return float(np.linalg.norm(m - m.conj().T) / scale) if scale else 0.0


@lru_cache(maxsize=None)
def _states(n_max: int, m_max: int) -> np.ndarray:
    n, m = np.meshgrid(np.arange(-n_max, n_max + 1), np.arange(-m_max, m_max + 1), indexing="ij")
    keep = (n - m) % 2 == 0
    states = np.stack([n[keep], m[keep]], axis=1)
    states.setflags(write=False)
    return states


@lru_cache(maxsize=None)
def _stencil(n_max: int, m_max: int, dn: int, dm: int) -> tuple[np.ndarray, np.ndarray]:
    """Index pairs (src, dst) with dst = src + (dn, dm), both inside the basis."""
    states = _states(n_max, m_max)
    index = {(int(a), int(b)): k for k, (a, b) in enumerate(states)}
    src, dst = [], []
    for k, (a, b) in enumerate(states):
        j = index.get((int(a) + dn, int(b) + dm))
        if j is not None:
            src.append(k)
            dst.append(j)
    return np.array(src, dtype=int), np.array(dst, dtype=int)


def _add(mat: np.ndarray, basis: BasisSpec, dn: int, dm: int, value: complex) -> None:
    src, dst = _stencil(basis.n_max, basis.m_max, dn, dm)
    mat[dst, src] += value


def build_hamiltonian(params: CircuitParams, basis: BasisSpec | None = None) -> OperatorMatrix:
    """Static circuit Hamiltonian H/h (GHz) in the charge basis."""
    basis = basis or BasisSpec()
    ej, a, ec = params.ej_over_h, params.alpha, params.ec_over_h
    states = basis.states
    n, m = states[:, 0], states[:, 1]
    h = np.zeros((len(states), len(states)), dtype=complex)
    h[np.diag_indices_from(h)] = 2 * ec * n**2 + 2 * ec / (1 + 2 * a) * m**2 + 2 * ej + a * ej
    # -2 E_J cos(phi_p) cos(phi_m)
    for dn in (1, -1):
        for dm in (1, -1):
            _add(h, basis, dn, dm, -ej / 2)
    # -alpha E_J cos(2 pi f + 2 phi_m)
    phase = np.exp(2j * np.pi * params.f)
    _add(h, basis, 0, -2, -a * ej / 2 * phase)
    _add(h, basis, 0, 2, -a * ej / 2 * np.conj(phase))
    return OperatorMatrix(h, basis)


def build_current_operator(params: CircuitParams, basis: BasisSpec | None = None) -> OperatorMatrix:
    """Loop supercurrent in units of I_0 = 2 pi E_J / Phi_0."""
    basis = basis or BasisSpec()
    a = params.alpha
    pref = a / (2 * a + 1)
    cur = np.zeros((basis.dim, basis.dim), dtype=complex)
    # sin(2 pi f + 2 phi_m)
    phase = np.exp(2j * np.pi * params.f)
    _add(cur, basis, 0, -2, -0.5j * phase * pref)
    _add(cur, basis, 0, 2, 0.5j * np.conj(phase) * pref)
    # -2 sin(phi_m) cos(phi_p)
    for dn in (1, -1):
        _add(cur, basis, dn, -1, 0.5j * pref)
        _add(cur, basis, dn, 1, -0.5j * pref)
    return OperatorMatrix(cur, basis)


def eval_potential(params: CircuitParams, phi_p, phi_m):
    """U(phi_p, phi_m, f)/h in GHz; broadcasts over array arguments."""
    ej, a = params.ej_over_h, params.alpha
    phi_p = np.asarray(phi_p, dtype=float)
    phi_m = np.asarray(phi_m, dtype=float)
    return 2 * ej * (1 - np.cos(phi_p) * np.cos(phi_m)) + a * ej * (
        1 - np.cos(2 * np.pi * params.f + 2 * phi_m)
    )


def eval_current(params: CircuitParams, phi_p, phi_m):
    """Supercurrent as a function of the phases, in units of I_0."""
    a = params.alpha
    return a / (2 * a + 1) * (
        np.sin(2 * np.pi * params.f + 2 * np.asarray(phi_m))
        - 2 * np.sin(phi_m) * np.cos(phi_p)
    )


def parity_permutation(basis: BasisSpec, flip_n: bool = True) -> np.ndarray:
    """Index map (n, m) -> (-n, -m), or (n, -m) with flip_n=False."""
    states = basis.states
    index = {(int(a), int(b)): k for k, (a, b) in enumerate(states)}
    sign_n = -1 if flip_n else 1
    return np.array([index[(sign_n * int(a), -int(b))] for a, b in states])
