"""Dense complex linear algebra over qubit Hilbert spaces.

States and density operators are immutable value objects; all operations are
pure functions, so everything here is safe to call from concurrent tasks.
Storage is dense on purpose: the exact verification targets are tiny and
clarity beats sparsity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import permutations, product

import numpy as np

from .config import EIG_FLOOR, HERM_TOL, NORM_TOL, PROP_TOL, PSD_TOL, TRACE_TOL, dim_cap
from .errors import (
    DimensionCapExceeded,
    DimensionMismatch,
    PartitionMismatch,
    ValidationError,
)

__all__ = [
    "PureState",
    "DensityOperator",
    "PartitionSpec",
    "tensor_power",
    "partial_trace",
    "von_neumann_entropy",
    "collision_entropy",
    "trace_distance",
    "symmetric_projector",
    "symmetric_dimension",
]


def _readonly(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=np.complex128, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class PureState:
    """Unit-norm amplitude vector of an n-qubit pure state.

    Basis ordering is big-endian: index x encodes the bit string of x with
    qubit 0 as the most significant bit, matching np.kron composition.
    Equality is identity; compare amplitudes explicitly when needed.
    """

    n: int
    amps: np.ndarray

    def __post_init__(self):
        if self.n < 1:
            raise ValidationError("qubit count must be >= 1")
        amps = _readonly(np.asarray(self.amps).reshape(-1))
        if amps.shape[0] != 2**self.n:
            raise ValidationError(
                f"amplitude vector has length {amps.shape[0]}, expected 2^{self.n}"
            )
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > NORM_TOL:
            raise ValidationError(f"state norm {norm} deviates from 1 beyond {NORM_TOL}")
        object.__setattr__(self, "amps", amps)

    @property
    def dim(self) -> int:
        return 2**self.n

    def density(self) -> "DensityOperator":
        return DensityOperator(self.n, np.outer(self.amps, self.amps.conj()), validate=False)

    def overlap(self, other: "PureState") -> complex:
        if other.n != self.n:
            raise DimensionMismatch("states live on different qubit counts")
        return complex(np.vdot(other.amps, self.amps))


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Hermitian, unit-trace, positive-semidefinite matrix on n qubits.

    ``validate=False`` skips the eigenvalue check for operators produced by
    invariant-preserving internal operations (tensor products, partial traces,
    convex averages of validated operators); ``validate_full`` re-asserts the
    complete invariant set on demand. Equality is identity.
    """

    n: int
    mat: np.ndarray
    validate: bool = field(default=True, compare=False)

    def __post_init__(self):
        if self.n < 1:
            raise ValidationError("qubit count must be >= 1")
        mat = _readonly(np.asarray(self.mat))
        d = 2**self.n
        if mat.shape != (d, d):
            raise ValidationError(f"matrix shape {mat.shape}, expected ({d}, {d})")
        herm = float(np.max(np.abs(mat - mat.conj().T)))
        if herm > HERM_TOL:
            raise ValidationError(f"Hermiticity violation {herm} beyond {HERM_TOL}")
        tr = complex(np.trace(mat))
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValidationError(f"trace {tr} deviates from 1 beyond {TRACE_TOL}")
        object.__setattr__(self, "mat", mat)
        if self.validate:
            lo = float(np.linalg.eigvalsh(mat)[0])
            if lo < -PSD_TOL:
                raise ValidationError(f"minimum eigenvalue {lo} below -{PSD_TOL}")

    @property
    def dim(self) -> int:
        return 2**self.n

    def validate_full(self) -> "DensityOperator":
        """Re-run the complete invariant set; returns self for chaining."""
        DensityOperator(self.n, self.mat, validate=True)
        return self

    def purity(self) -> float:
        # Tr(rho^2) equals the squared Frobenius norm for Hermitian rho.
        return float(np.vdot(self.mat, self.mat).real)

    def diagonal(self) -> np.ndarray:
        return np.real(np.diag(self.mat)).copy()

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.mat)


@dataclass(frozen=True)
class PartitionSpec:
    """Bipartition of n = n_a + n_b qubits, with the reporting convention n_a <= n_b."""

    n_a: int
    n_b: int

    def __post_init__(self):
        if self.n_a < 1 or self.n_b < 1:
            raise ValidationError("both subsystems need at least one qubit")
        if self.n_a > self.n_b:
            raise ValidationError("convention requires n_a <= n_b")

    @property
    def n(self) -> int:
        return self.n_a + self.n_b

    def check(self, n: int) -> None:
        if self.n != n:
            raise PartitionMismatch(f"partition {self.n_a}:{self.n_b} does not cover {n} qubits")


def tensor_power(rho: DensityOperator, t: int, cap: int | None = None) -> DensityOperator:
    """t-fold tensor product of a density operator with itself."""
    if t < 1:
        raise ValidationError("t must be >= 1")
    limit = dim_cap(cap)
    if rho.dim**t > limit:
        raise DimensionCapExceeded(f"2^({rho.n}*{t}) exceeds dimension cap {limit}")
    out = rho.mat
    for _ in range(t - 1):
        out = np.kron(out, rho.mat)
    return DensityOperator(rho.n * t, out, validate=False)


def partial_trace(rho: DensityOperator, part: PartitionSpec, keep: str) -> DensityOperator:
    """Reduce onto subsystem ``keep`` ("A" first n_a qubits, "B" the rest)."""
    part.check(rho.n)
    if keep not in ("A", "B"):
        raise ValidationError("keep must be 'A' or 'B'")
    da, db = 2**part.n_a, 2**part.n_b
    blocks = rho.mat.reshape(da, db, da, db)
    if keep == "A":
        red = np.einsum("ibjb->ij", blocks)
        nk = part.n_a
    else:
        red = np.einsum("aiaj->ij", blocks)
        nk = part.n_b
    return DensityOperator(nk, red, validate=False)


def _entropy_of_probs(p: np.ndarray) -> float:
    p = np.real(p)
    p = p[p > EIG_FLOOR]
    if p.size == 0:
        return 0.0
    return float(-np.sum(p * np.log2(p)))


def von_neumann_entropy(rho: DensityOperator) -> float:
    """H(rho) = -Tr(rho log2 rho) in bits; eigenvalues below 1e-12 contribute 0."""
    return _entropy_of_probs(rho.eigenvalues())


def collision_entropy(rho: DensityOperator) -> float:
    """Renyi-2 entropy -log2 Tr(rho^2) in bits."""
    return float(-np.log2(rho.purity()))


def trace_distance(rho: DensityOperator, sigma: DensityOperator) -> float:
    """Half the absolute eigenvalue sum of rho - sigma."""
    if rho.dim != sigma.dim:
        raise DimensionMismatch(f"dimensions {rho.dim} and {sigma.dim} differ")
    w = np.linalg.eigvalsh(rho.mat - sigma.mat)
    return float(0.5 * np.sum(np.abs(w)))


def symmetric_dimension(n: int, t: int) -> int:
    """Dimension of the symmetric subspace of t copies of n qubits."""
    return math.comb(2**n + t - 1, t)


def symmetric_projector(n: int, t: int, cap: int | None = None) -> np.ndarray:
    """Orthogonal projector onto the symmetric subspace of (C^{2^n})^{x t}.

    Returned as a raw ndarray: it is idempotent with trace binom(2^n+t-1, t),
    not a unit-trace operator.
    """
    if n < 1 or t < 1:
        raise ValidationError("n and t must be >= 1")
    d = 2**n
    limit = dim_cap(cap)
    if d**t > limit:
        raise DimensionCapExceeded(f"2^({n}*{t}) exceeds dimension cap {limit}")
    dim = d**t
    idx = np.array(list(product(range(d), repeat=t)), dtype=np.int64)
    weights = d ** np.arange(t - 1, -1, -1, dtype=np.int64)
    proj = np.zeros((dim, dim))
    cols = np.arange(dim)
    for perm in permutations(range(t)):
        rows = idx[:, list(perm)] @ weights
        proj[rows, cols] += 1.0
    proj /= math.factorial(t)
    return proj


def copy_transposition_operator(n: int, t: int, i: int, j: int) -> np.ndarray:
    """Permutation operator swapping copy factors i and j of t copies of n qubits."""
    if not (0 <= i < t and 0 <= j < t):
        raise ValidationError("copy indices out of range")
    d = 2**n
    dim = d**t
    idx = np.array(list(product(range(d), repeat=t)), dtype=np.int64)
    swapped = idx.copy()
    swapped[:, [i, j]] = swapped[:, [j, i]]
    weights = d ** np.arange(t - 1, -1, -1, dtype=np.int64)
    op = np.zeros((dim, dim))
    op[swapped @ weights, np.arange(dim)] = 1.0
    return op


def assert_close_operator(a: np.ndarray, b: np.ndarray, tol: float = PROP_TOL) -> None:
    """Entrywise closeness assertion used by property checks."""
    dev = float(np.max(np.abs(np.asarray(a) - np.asarray(b))))
    if dev > tol:
        raise AssertionError(f"operators deviate by {dev} beyond {tol}")
