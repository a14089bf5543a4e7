"""Reference implementations written independently of the package.

Nothing here imports ``bqa``: spin matrices come from ladder-operator
formulas, many-body operators from explicit index loops, energies from
nested Python loops and time evolution from piecewise matrix exponentials.
"""
import itertools
import math

import numpy as np
from scipy.linalg import expm


def spin_matrices(s):
    """(Sx, Sy, Sz) for spin ``s`` in descending-m order, from S+ matrix elements."""
    ms = [s - k for k in range(int(round(2 * s)) + 1)]
    d = len(ms)
    sp = np.zeros((d, d), dtype=complex)
    for a in range(d):
        for b in range(d):
            if abs(ms[a] - ms[b] - 1) < 1e-12:
                sp[a, b] = math.sqrt(s * (s + 1) - ms[b] * (ms[b] + 1))
    sm = sp.conj().T
    return (sp + sm) / 2, (sp - sm) / 2j, np.diag(ms).astype(complex)


def embed(local_ops, n, d):
    """Many-body operator from {site: local} by explicit matrix elements."""
    dim = d**n
    out = np.zeros((dim, dim), dtype=complex)
    digits = list(itertools.product(range(d), repeat=n))
    for r, row in enumerate(digits):
        for c, col in enumerate(digits):
            value = 1.0 + 0j
            for site in range(n):
                op = local_ops.get(site)
                if op is None:
                    if row[site] != col[site]:
                        value = 0
                        break
                else:
                    value *= op[row[site], col[site]]
                if value == 0:
                    break
            out[r, c] = value
    return out


def ground_states_by_loops(n, bonds, fields, tol=1e-9):
    """Second enumerator: (energy, sorted configurations) via plain loops."""
    best = math.inf
    found = []
    for config in itertools.product((1, -1), repeat=n):
        e = 0.0
        for i, j, coupling in bonds:
            e -= coupling * config[i] * config[j]
        for i in range(n):
            e -= fields[i] * config[i]
        if e < best - tol:
            best, found = e, [config]
        elif abs(e - best) <= tol:
            found.append(config)
    best = min(
        sum(-c * cfg[i] * cfg[j] for i, j, c in bonds) - sum(h * s for h, s in zip(fields, cfg)) for cfg in found
    )
    return best, sorted(found)


def bqa_matrix(n, bonds, fields, A, B):
    """Dense qutrit Hamiltonian assembled from ladder-operator spin matrices."""
    sx, _, sz = spin_matrices(1)
    H = np.zeros((3**n, 3**n), dtype=complex)
    for i in range(n):
        H -= A * embed({i: sx}, n, 3) + B * embed({i: sz @ sz}, n, 3)
        H -= fields[i] * embed({i: sz}, n, 3)
    for i, j, c in bonds:
        H -= c * embed({i: sz, j: sz}, n, 3)
    return H


def propagate_midpoint(hamiltonian_at, psi0, t_final, steps):
    """Exponential-midpoint propagator, second order in the step size."""
    psi = np.array(psi0, dtype=complex)
    dt = t_final / steps
    for k in range(steps):
        psi = expm(-1j * dt * hamiltonian_at((k + 0.5) * dt)) @ psi
    return psi


def meanfield_first_order_b(Jz):
    """A = 0 boundary from equating the energies of m = 0 and m = 1."""
    # e(0) = 0, e(1) = -B - Jz + Jz/2
    return -Jz / 2
