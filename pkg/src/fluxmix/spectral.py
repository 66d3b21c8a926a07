"""Lowest levels, gauge-fixed eigenvectors and three-level transition data."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

from .circuit import BasisSpec, CircuitParams, OperatorMatrix, build_current_operator, build_hamiltonian

DEGENERACY_GHZ = 1e-6
# components within this relative margin of the largest modulus count as ties
_GAUGE_TIE = 1e-8


class BasisMismatchError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Spectrum:
    energies: np.ndarray
    vectors: np.ndarray
    basis: BasisSpec
    params: CircuitParams | None = None
    status: str = "ok"

    @property
    def degenerate(self) -> bool:
        return self.status != "ok"


@dataclass(frozen=True)
class TransitionData:
    """Three-level reduction. Frequencies in GHz, elements in units of I_0."""

    omega21: float
    omega31: float
    omega32: float
    i12: complex
    i23: complex
    i13: complex
    f: float | None = None
    status: str = "ok"

    @property
    def i21(self) -> complex:
        return self.i12.conjugate()

    @property
    def i32(self) -> complex:
        return self.i23.conjugate()

    @property
    def i31(self) -> complex:
        return self.i13.conjugate()

    def element(self, i: int, j: int) -> complex:
        """<i|I|j>/I_0 with 1-based level labels (off-diagonal only)."""
        table = {(1, 2): self.i12, (2, 3): self.i23, (1, 3): self.i13}
        if (i, j) in table:
            return table[(i, j)]
        if (j, i) in table:
            return table[(j, i)].conjugate()
        raise KeyError((i, j))

    @property
    def levels(self) -> np.ndarray:
        """Level energies relative to the ground state (GHz)."""
        return np.array([0.0, self.omega21, self.omega31])


def fix_gauge(vectors: np.ndarray) -> np.ndarray:
    """Rotate each column so its largest-modulus component is real positive."""
    out = np.array(vectors, dtype=complex, copy=True)
    for k in range(out.shape[1]):
        mod = np.abs(out[:, k])
        pivot = int(np.flatnonzero(mod >= mod.max() * (1 - _GAUGE_TIE))[0])
        out[:, k] *= np.conj(out[pivot, k]) / mod[pivot]
    return out


def solve_spectrum(h: OperatorMatrix, k: int = 3, params: CircuitParams | None = None) -> Spectrum:
    if k < 3:
        raise ValueError(f"need at least 3 levels, got k={k}")
    energies, vectors = la.eigh(h.entries, subset_by_index=[0, k - 1])
    gaps = np.diff(energies[:3])
    status = "degenerate" if np.any(gaps < DEGENERACY_GHZ) else "ok"
    return Spectrum(energies, fix_gauge(vectors), h.basis, params, status)


def matrix_elements(spec: Spectrum, op: OperatorMatrix) -> np.ndarray:
    if spec.basis != op.basis:
        raise BasisMismatchError(f"spectrum basis {spec.basis} != operator basis {op.basis}")
    v = spec.vectors
    return v.conj().T @ op.entries @ v


def transition_data(spec: Spectrum, i_op: OperatorMatrix) -> TransitionData:
    """Transition frequencies and normalised current elements of the lowest three levels.

    Diagonal elements are not part of the three-level reduction; use
    :func:`matrix_elements` to inspect them.
    """
    el = matrix_elements(spec, i_op)
    e = spec.energies
    return TransitionData(
        omega21=float(e[1] - e[0]),
        omega31=float(e[2] - e[0]),
        omega32=float(e[2] - e[1]),
        i12=complex(el[0, 1]),
        i23=complex(el[1, 2]),
        i13=complex(el[0, 2]),
        f=spec.params.f if spec.params is not None else None,
        status=spec.status,
    )


def analyze(params: CircuitParams, basis: BasisSpec | None = None, k: int = 3) -> tuple[Spectrum, TransitionData]:
    """Build, diagonalise and reduce in one call."""
    basis = basis or BasisSpec()
    spec = solve_spectrum(build_hamiltonian(params, basis), k, params)
    return spec, transition_data(spec, build_current_operator(params, basis))


@dataclass(frozen=True)
class ConvergenceReport:
    bases: tuple[BasisSpec, ...]
    energies: np.ndarray  # shape (len(bases), 3)
    drifts: np.ndarray  # max relative change between successive rows

    @property
    def max_drift(self) -> float:
        return float(self.drifts.max())


def convergence_report(params: CircuitParams, basis_list) -> ConvergenceReport:
    bases = tuple(basis_list)
    if len(bases) < 2:
        raise ValueError("convergence_report needs at least two basis specs")
    rows = np.array([solve_spectrum(build_hamiltonian(params, b)).energies[:3] for b in bases])
    drifts = np.max(np.abs(np.diff(rows, axis=0)) / np.abs(rows[1:]), axis=1)
    return ConvergenceReport(bases, rows, drifts)
