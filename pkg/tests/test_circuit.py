import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fluxmix.circuit import (
    BasisSpec,
    CircuitParams,
    TruncationError,
    build_current_operator,
    build_hamiltonian,
    eval_current,
    eval_potential,
    parity_permutation,
)


def test_basis_parity_constraint():
    b = BasisSpec(6, 6)
    s = b.states
    assert np.all((s[:, 0] - s[:, 1]) % 2 == 0)
    assert b.dim == len(s) == 85


def test_basis_too_small():
    with pytest.raises(TruncationError):
        BasisSpec(3, 12)


def test_parameter_validation():
    with pytest.raises(ValueError):
        CircuitParams(ej_over_h=-1)
    with pytest.raises(ValueError):
        CircuitParams(ec_convention="e2/4C")
    with pytest.warns(UserWarning, match="0.5<α<1"):
        CircuitParams(alpha=1.5)


def test_ec_convention_doubles_charging_energy():
    a = CircuitParams()
    b = CircuitParams(ec_convention="e2/C")
    assert b.ec_over_h == pytest.approx(2 * a.ec_over_h)
    assert a.ec_over_h == pytest.approx(4.0)


@given(st.floats(0.4, 0.6))
@settings(max_examples=20, deadline=None)
def test_operators_hermitian(f):
    p = CircuitParams(f=f)
    b = BasisSpec(6, 6)
    assert build_hamiltonian(p, b).hermiticity_error() < 1e-12
    assert build_current_operator(p, b).hermiticity_error() < 1e-12


def test_matrices_read_only():
    h = build_hamiltonian(CircuitParams(), BasisSpec(4, 4))
    with pytest.raises(ValueError):
        h.entries[0, 0] = 1.0


def test_flux_reflection_is_complex_conjugation():
    b = BasisSpec(6, 6)
    h1 = build_hamiltonian(CircuitParams(f=0.47), b).entries
    h2 = build_hamiltonian(CircuitParams(f=0.53), b).entries
    np.testing.assert_allclose(h2, h1.conj(), atol=1e-12)


def test_current_anticommutes_with_parity_at_half_flux():
    b = BasisSpec(6, 6)
    i_op = build_current_operator(CircuitParams(f=0.5), b).entries
    perm = parity_permutation(b)
    p = np.eye(b.dim)[perm]
    np.testing.assert_allclose(p @ i_op @ p.T, -i_op, atol=1e-12)


def test_potential_minimum_and_current_symmetry():
    p = CircuitParams(f=0.5)
    assert eval_potential(p, 0.0, 0.0) == pytest.approx(p.alpha * p.ej_over_h * 2)
    phi = np.linspace(-1, 1, 7)
    np.testing.assert_allclose(eval_current(p, phi, 0.3), -eval_current(p, -phi, -0.3), atol=1e-12)
