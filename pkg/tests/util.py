"""Shared test helpers: independent brute-force oracles kept deliberately
separate from the library code paths they validate."""

import numpy as np

from tprslab.linalg import DensityOperator, PureState

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)

KET0 = np.array([1, 0], dtype=complex)
KET1 = np.array([0, 1], dtype=complex)
PLUS = np.array([1, 1], dtype=complex) / np.sqrt(2)
MINUS = np.array([1, -1], dtype=complex) / np.sqrt(2)
TKET = np.array([1, np.exp(1j * np.pi / 4)], dtype=complex) / np.sqrt(2)


def kron_all(*mats):
    out = np.array([[1.0 + 0j]]) if mats[0].ndim == 2 else np.array([1.0 + 0j])
    for m in mats:
        out = np.kron(out, m)
    return out


def pure(amps) -> PureState:
    amps = np.asarray(amps, dtype=complex)
    n = int(np.log2(len(amps)))
    return PureState(n, amps)


def dm(mat, n=None) -> DensityOperator:
    mat = np.asarray(mat, dtype=complex)
    if n is None:
        n = int(np.log2(mat.shape[0]))
    return DensityOperator(n, mat)


def random_pure(n, rng) -> PureState:
    z = rng.standard_normal(2**n) + 1j * rng.standard_normal(2**n)
    return PureState(n, z / np.linalg.norm(z))


def random_density(n, rng, rank=None) -> DensityOperator:
    """Ginibre-style random mixed state."""
    d = 2**n
    rank = rank or d
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    mat = g @ g.conj().T
    mat /= np.trace(mat).real
    return DensityOperator(n, mat)


def loop_partial_trace(mat, n_a, n_b, keep):
    """Index-loop partial trace, independent of the reshape/einsum route."""
    da, db = 2**n_a, 2**n_b
    if keep == "A":
        out = np.zeros((da, da), dtype=complex)
        for i in range(da):
            for j in range(da):
                for b in range(db):
                    out[i, j] += mat[i * db + b, j * db + b]
    else:
        out = np.zeros((db, db), dtype=complex)
        for i in range(db):
            for j in range(db):
                for a in range(da):
                    out[i, j] += mat[a * db + i, a * db + j]
    return out


def pure_trace_distance(a, b) -> float:
    """sqrt(1 - |<a|b>|^2) for pure states."""
    ov = abs(np.vdot(np.asarray(a), np.asarray(b))) ** 2
    return float(np.sqrt(max(1.0 - ov, 0.0)))


def pauli_strings(n):
    """Independent Pauli enumeration (ordering differs from the library's)."""
    singles = [I2, X, Y, Z]
    mats = [np.array([[1.0 + 0j]])]
    for _ in range(n):
        mats = [np.kron(p, m) for p in singles for m in mats]
    return mats


def pauli_power_sum(amps, n, alpha):
    """sum_P <psi|P|psi>^{2 alpha} by direct enumeration."""
    total = 0.0
    for p in pauli_strings(n):
        ev = np.vdot(amps, p @ amps).real
        total += ev ** (2 * alpha)
    return total


def entropy_bits(probs):
    p = np.asarray(probs, dtype=float)
    p = p[p > 1e-12]
    return float(-(p * np.log2(p)).sum())
