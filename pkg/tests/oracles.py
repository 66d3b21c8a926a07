"""Reference computations that share no code with the package.

grid_levels discretises the circuit on a periodic phase grid and
diagonalises with a Fourier collocation kinetic term. steady_coherence
solves the rotating-frame relaxation equations as a linear system instead
of integrating them.
"""

import numpy as np
from scipy import linalg


def grid_levels(ej, ratio, alpha, f, n=32, k=3, ec_scale=1.0):
    """Lowest k energies (GHz) and the k x k loop-current matrix (units of I0)."""
    ec = ec_scale * ej / ratio
    x = 2 * np.pi * np.arange(n) / n
    q = np.fft.fftfreq(n, 1.0 / n)
    q1, q2 = np.meshgrid(q, q, indexing="ij")
    kinetic = (2 * ec * (q1 + q2) ** 2 + 2 * ec / (1 + 2 * alpha) * (q2 - q1) ** 2).ravel()
    f1 = np.fft.fft(np.eye(n), axis=0) / np.sqrt(n)
    four = np.kron(f1, f1)
    h = four.conj().T @ (kinetic[:, None] * four)
    p1, p2 = np.meshgrid(x, x, indexing="ij")
    pot = 2 * ej - ej * (np.cos(p1) + np.cos(p2)) + alpha * ej * (1 - np.cos(2 * np.pi * f + p2 - p1))
    h[np.diag_indices_from(h)] += pot.ravel()
    w, v = linalg.eigh(h, subset_by_index=[0, k - 1])
    cur = alpha / (2 * alpha + 1) * (np.sin(2 * np.pi * f + p2 - p1) - np.sin(p2) + np.sin(p1))
    return w, v.conj().T @ (cur.ravel()[:, None] * v)


def steady_coherence(levels, elements, rates, kind, phi1, phi2, nu1, nu2, ej):
    """Steady mixed coherence (lab-frame amplitude) from the null space of the static generator.

    levels: (0, nu21, nu31); elements: dict {(i, j): i_ij} with 1-based keys;
    rates: (g12, g13, g23, g22, g33) in GHz.
    """
    g12, g13, g23, g22, g33 = rates
    gam = {(1, 2): g12, (1, 3): g13 + g23 + g33, (2, 3): g12 + g13 + g23 + g22 + g33}
    if kind == "sum":
        drives = [((1, 2), phi1), ((2, 3), phi2)]
        frame = np.array([0.0, nu1, nu1 + nu2])
        out = (3, 1)
    else:
        drives = [((1, 3), phi1), ((2, 3), phi2)]
        frame = np.array([0.0, nu1 - nu2, nu1])
        out = (2, 1)
    h = np.diag(np.asarray(levels, float) - frame).astype(complex)
    for (i, j), phi in drives:
        c = elements[(i, j)] * phi * 2 * np.pi * ej
        h[i - 1, j - 1] += c
        h[j - 1, i - 1] += np.conj(c)

    def generator(rho):
        d = -2j * np.pi * (h @ rho - rho @ h)
        for (i, j), g in gam.items():
            d[i - 1, j - 1] -= np.pi * g * rho[i - 1, j - 1]
            d[j - 1, i - 1] -= np.pi * g * rho[j - 1, i - 1]
        r2, r3 = rho[1, 1], rho[2, 2]
        d[0, 0] += 2 * np.pi * (g12 * r2 + g13 * r3)
        d[1, 1] += 2 * np.pi * (-g12 * r2 + g23 * r3)
        d[2, 2] += -2 * np.pi * (g13 + g23) * r3
        return d

    basis = np.eye(9).reshape(9, 3, 3)
    sup = np.column_stack([generator(b.astype(complex)).ravel() for b in basis])
    a = np.vstack([sup, np.eye(3).ravel()[None, :]])
    rhs = np.zeros(10, complex)
    rhs[-1] = 1.0
    sol, *_ = np.linalg.lstsq(a, rhs, rcond=None)
    i, j = out
    return sol.reshape(3, 3)[i - 1, j - 1]
