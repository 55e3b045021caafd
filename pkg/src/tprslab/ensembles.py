"""State ensembles, their exact and Monte-Carlo copy-moment operators, and
parameter advisors for the runtime-bounded constructions.

Subset states superpose computational basis strings from a subset S; the
phase variants attach (-1)^{f(x)} signs. The keyed kinds draw a fresh
permutation / phase key per sample; the true-random kinds sample S (and
signs) uniformly, which is the measure the exact enumerations average over.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from itertools import combinations

import numpy as np

from .config import DEFAULT_ENUM_BUDGET, dim_cap
from .errors import (
    BadSubsetExponent,
    DimensionCapExceeded,
    EmptySubset,
    EnumerationBudgetExceeded,
    UnsupportedGrowthClass,
    ValidationError,
)
from .growth import GrowthClass
from .linalg import DensityOperator, PureState, symmetric_dimension, symmetric_projector
from .randprims import KeyedPermutation, PhaseFunction, RngSeed, sample_haar_block
from .sampling import DEFAULT_CHUNK, chunk_layout, run_ordered

__all__ = [
    "SubsetSpec",
    "EnsembleSpec",
    "ENSEMBLE_KINDS",
    "build_subset_state",
    "build_subset_phase_state",
    "build_permuted_subset_phase_state",
    "stabilizer_orbit",
    "sample_state",
    "sample_block",
    "haar_moment",
    "exact_subset_moment",
    "exact_subset_phase_moment",
    "mc_ensemble_moment",
    "MomentEstimate",
    "advise_subset_size",
    "advise_copies",
    "SubsetAdvice",
    "operator_to_json",
    "operator_from_json",
]

KIND_SUBSET_PHASE_KEYED = "subset-phase-keyed"
KIND_SUBSET_PHASE_TRUE = "subset-phase-true-random"
KIND_SUBSET_KEYED = "subset-keyed"
KIND_SUBSET_TRUE = "subset-true-random"
KIND_HAAR = "haar"
KIND_STABILIZER = "stabilizer-orbit"

ENSEMBLE_KINDS = (
    KIND_SUBSET_PHASE_KEYED,
    KIND_SUBSET_PHASE_TRUE,
    KIND_SUBSET_KEYED,
    KIND_SUBSET_TRUE,
    KIND_HAAR,
    KIND_STABILIZER,
)
_SUBSET_KINDS = (KIND_SUBSET_PHASE_KEYED, KIND_SUBSET_PHASE_TRUE, KIND_SUBSET_KEYED, KIND_SUBSET_TRUE)
_PHASE_KINDS = (KIND_SUBSET_PHASE_KEYED, KIND_SUBSET_PHASE_TRUE)


@dataclass(frozen=True)
class SubsetSpec:
    """A sorted set of distinct n-bit strings (stored as integers)."""

    n: int
    members: tuple[int, ...]

    def __post_init__(self):
        if self.n < 1:
            raise ValidationError("qubit count must be >= 1")
        if len(self.members) == 0:
            raise EmptySubset("subset needs at least one member")
        members = tuple(int(x) for x in self.members)
        if len(set(members)) != len(members):
            raise ValidationError("subset members must be distinct")
        if any(not (0 <= x < 2**self.n) for x in members):
            raise ValidationError("subset member outside {0,1}^n")
        object.__setattr__(self, "members", tuple(sorted(members)))

    @property
    def m(self) -> int:
        return len(self.members)

    @classmethod
    def from_bitstrings(cls, strings) -> "SubsetSpec":
        strings = list(strings)
        if not strings:
            raise EmptySubset("subset needs at least one member")
        widths = {len(s) for s in strings}
        if len(widths) != 1:
            raise ValidationError("all member strings must share one width")
        n = widths.pop()
        return cls(n, tuple(int(s, 2) for s in strings))


@dataclass(frozen=True)
class EnsembleSpec:
    """Samplable description of one state ensemble."""

    kind: str
    n: int
    m: int | None = None
    t: int = 1
    seed: RngSeed = field(default_factory=lambda: RngSeed(0))

    def __post_init__(self):
        if self.kind not in ENSEMBLE_KINDS:
            raise ValidationError(f"unknown ensemble kind {self.kind!r}")
        if self.n < 1:
            raise ValidationError("qubit count must be >= 1")
        if self.t < 1:
            raise ValidationError("copy count must be >= 1")
        if self.kind in _SUBSET_KINDS:
            if self.m is None or not (1 <= self.m <= 2**self.n):
                raise ValidationError("subset kinds require 1 <= m <= 2^n")
            if self.kind in _PHASE_KINDS and self.m & (self.m - 1):
                raise BadSubsetExponent("phase construction requires a power-of-two subset size")
        elif self.m is not None:
            raise ValidationError(f"kind {self.kind} takes no subset size")
        if isinstance(self.seed, int):
            object.__setattr__(self, "seed", RngSeed(self.seed))

    @property
    def dim(self) -> int:
        return 2**self.n

    @property
    def m_exp(self) -> int:
        if self.kind not in _PHASE_KINDS:
            raise ValidationError("m_exp only defined for phase kinds")
        return self.m.bit_length() - 1

    def to_config(self) -> dict:
        out = {"kind": self.kind, "n": self.n, "t": self.t, "seed": self.seed.seed}
        if self.m is not None:
            out["m"] = self.m
        return out

    @classmethod
    def from_config(cls, data: dict) -> "EnsembleSpec":
        return cls(
            kind=data["kind"],
            n=int(data["n"]),
            m=int(data["m"]) if "m" in data and data["m"] is not None else None,
            t=int(data.get("t", 1)),
            seed=RngSeed(int(data.get("seed", 0))),
        )

    def with_seed(self, seed: int) -> "EnsembleSpec":
        return replace(self, seed=RngSeed(seed))


# ---------------------------------------------------------------------------
# State builders


def build_subset_state(spec: SubsetSpec) -> PureState:
    """|S> = sum_{x in S} |x> / sqrt(|S|)."""
    amps = np.zeros(2**spec.n, dtype=np.complex128)
    amps[list(spec.members)] = 1.0 / math.sqrt(spec.m)
    return PureState(spec.n, amps)


def build_subset_phase_state(spec: SubsetSpec, f: PhaseFunction) -> PureState:
    """sum_{x in S} (-1)^{f(x)} |x> / sqrt(|S|)."""
    if f.n != spec.n:
        raise ValidationError("phase function domain width must match the subset")
    amps = np.zeros(2**spec.n, dtype=np.complex128)
    signs = 1.0 - 2.0 * f.eval_many(spec.members).astype(float)
    amps[list(spec.members)] = signs / math.sqrt(spec.m)
    return PureState(spec.n, amps)


def _as_perm_fn(sigma, n: int):
    if isinstance(sigma, KeyedPermutation):
        if sigma.n != n:
            raise ValidationError("permutation width must match n")
        return sigma.apply
    table = np.asarray(sigma, dtype=np.int64)
    if table.shape != (2**n,):
        raise ValidationError("permutation table must have 2^n entries")
    return lambda x: int(table[x])


def build_permuted_subset_phase_state(n: int, m_exp: int, sigma, f: PhaseFunction) -> PureState:
    """Phase state on the sigma-image of the 2^{m_exp} zero-padded prefixes.

    sigma permutes whole n-bit strings; prefix x occupies the most significant
    bits, so the preimage set is {x << (n - m_exp)}.
    """
    if not (0 <= m_exp <= n):
        raise BadSubsetExponent(f"m_exp {m_exp} outside 0..{n}")
    if f.n != n:
        raise ValidationError("phase function domain width must match n")
    perm = _as_perm_fn(sigma, n)
    shift = n - m_exp
    amps = np.zeros(2**n, dtype=np.complex128)
    scale = 1.0 / math.sqrt(2**m_exp)
    for x in range(2**m_exp):
        y = perm(x << shift)
        amps[y] += scale * (1.0 - 2.0 * f.eval(y))
    return PureState(n, amps)


_CLIFFORD_KEY_DECIMALS = 8


@lru_cache(maxsize=8)
def stabilizer_orbit(n: int) -> tuple[np.ndarray, ...]:
    """All n-qubit stabilizer states: the orbit of |0..0> under H, S, CNOT.

    Breadth-first closure with global phase quotiented out; yields 6 states at
    n=1 and 60 at n=2.
    """
    if n < 1 or n > 3:
        raise ValidationError("stabilizer orbit supported for 1 <= n <= 3")
    eye = np.eye(2, dtype=np.complex128)
    had = np.array([[1, 1], [1, -1]], dtype=np.complex128) / math.sqrt(2)
    phs = np.array([[1, 0], [0, 1j]], dtype=np.complex128)

    def embed(gate: np.ndarray, pos: int) -> np.ndarray:
        out = np.array([[1.0 + 0j]])
        for q in range(n):
            out = np.kron(out, gate if q == pos else eye)
        return out

    gates = [embed(g, q) for q in range(n) for g in (had, phs)]
    d = 2**n
    for ctl in range(n):
        for tgt in range(n):
            if ctl == tgt:
                continue
            cnot = np.zeros((d, d), dtype=np.complex128)
            for x in range(d):
                bit = (x >> (n - 1 - ctl)) & 1
                y = x ^ (bit << (n - 1 - tgt))
                cnot[y, x] = 1.0
            gates.append(cnot)

    def canon_key(v: np.ndarray):
        k = int(np.argmax(np.abs(v) > 1e-8))
        w = v / (v[k] / abs(v[k]))
        return tuple(np.round(w.view(float), _CLIFFORD_KEY_DECIMALS))

    start = np.zeros(d, dtype=np.complex128)
    start[0] = 1.0
    start.setflags(write=False)
    seen = {canon_key(start): start}
    frontier = [start]
    while frontier:
        nxt = []
        for v in frontier:
            for g in gates:
                w = g @ v
                key = canon_key(w)
                if key not in seen:
                    w = w / np.linalg.norm(w)
                    w.setflags(write=False)
                    seen[key] = w
                    nxt.append(w)
        frontier = nxt
    return tuple(seen.values())


# ---------------------------------------------------------------------------
# Sampling


def sample_state(spec: EnsembleSpec, rng: np.random.Generator) -> np.ndarray:
    """One amplitude vector drawn from the ensemble using ``rng``."""
    d = spec.dim
    if spec.kind == KIND_HAAR:
        z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        return z / np.linalg.norm(z)
    if spec.kind == KIND_STABILIZER:
        orbit = stabilizer_orbit(spec.n)
        return orbit[int(rng.integers(len(orbit)))]
    if spec.kind == KIND_SUBSET_TRUE:
        members = rng.choice(d, size=spec.m, replace=False)
        amps = np.zeros(d, dtype=np.complex128)
        amps[members] = 1.0 / math.sqrt(spec.m)
        return amps
    if spec.kind == KIND_SUBSET_PHASE_TRUE:
        members = rng.choice(d, size=spec.m, replace=False)
        signs = 1.0 - 2.0 * rng.integers(0, 2, size=spec.m)
        amps = np.zeros(d, dtype=np.complex128)
        amps[members] = signs / math.sqrt(spec.m)
        return amps
    if spec.kind == KIND_SUBSET_KEYED:
        perm = KeyedPermutation.from_rng(spec.n, rng)
        members = [perm.apply(x) for x in range(spec.m)]
        amps = np.zeros(d, dtype=np.complex128)
        amps[members] = 1.0 / math.sqrt(spec.m)
        return amps
    if spec.kind == KIND_SUBSET_PHASE_KEYED:
        perm = KeyedPermutation.from_rng(spec.n, rng)
        phase = PhaseFunction.keyed_from_rng(spec.n, rng)
        return build_permuted_subset_phase_state(spec.n, spec.m_exp, perm, phase).amps
    raise ValidationError(f"unknown ensemble kind {spec.kind!r}")


def sample_block(spec: EnsembleSpec, count: int, rng: np.random.Generator) -> np.ndarray:
    """(count, 2^n) block of samples; vectorized for the Haar kind."""
    if spec.kind == KIND_HAAR:
        return sample_haar_block(spec.n, count, rng)
    return np.stack([sample_state(spec, rng) for _ in range(count)])


# ---------------------------------------------------------------------------
# Moment operators


def haar_moment(n: int, t: int, cap: int | None = None) -> DensityOperator:
    """Average t-copy projector of the Haar ensemble: P_sym / binom(2^n+t-1, t)."""
    proj = symmetric_projector(n, t, cap=cap)
    return DensityOperator(n * t, proj / symmetric_dimension(n, t), validate=False)


def _tfold_rows(block: np.ndarray, t: int) -> np.ndarray:
    """Row-wise t-fold tensor power of a (B, d) block -> (B, d^t)."""
    out = block
    for _ in range(t - 1):
        out = np.einsum("si,sj->sij", out, block).reshape(block.shape[0], -1)
    return out


def _check_moment_dims(n: int, t: int, cap: int | None) -> int:
    limit = dim_cap(cap)
    if (2**n) ** t > limit:
        raise DimensionCapExceeded(f"2^({n}*{t}) exceeds dimension cap {limit}")
    return (2**n) ** t


def exact_subset_moment(
    n: int, m: int, t: int, budget: int = DEFAULT_ENUM_BUDGET, cap: int | None = None
) -> DensityOperator:
    """Exact average of |S><S|^{x t} over all size-m subsets."""
    if not (1 <= m <= 2**n):
        raise ValidationError("need 1 <= m <= 2^n")
    count = math.comb(2**n, m)
    if count > budget:
        raise EnumerationBudgetExceeded(f"{count} subsets exceed budget {budget}")
    dim = _check_moment_dims(n, t, cap)
    d = 2**n
    acc = np.zeros((dim, dim), dtype=np.complex128)
    batch: list[np.ndarray] = []

    def flush():
        nonlocal acc
        if batch:
            block = np.stack(batch)
            rows = _tfold_rows(block, t)
            acc += np.einsum("si,sj->ij", rows, rows.conj())
            batch.clear()

    scale = 1.0 / math.sqrt(m)
    for subset in combinations(range(d), m):
        v = np.zeros(d, dtype=np.complex128)
        v[list(subset)] = scale
        batch.append(v)
        if len(batch) >= 256:
            flush()
    flush()
    acc /= count
    return DensityOperator(n * t, (acc + acc.conj().T) / 2, validate=False)


def exact_subset_phase_moment(
    n: int, m: int, t: int, budget: int = DEFAULT_ENUM_BUDGET, cap: int | None = None
) -> DensityOperator:
    """Exact average over all size-m subsets and all 2^m sign patterns."""
    if not (1 <= m <= 2**n):
        raise ValidationError("need 1 <= m <= 2^n")
    count = math.comb(2**n, m) * (2**m)
    if count > budget:
        raise EnumerationBudgetExceeded(f"{count} subset/phase terms exceed budget {budget}")
    dim = _check_moment_dims(n, t, cap)
    d = 2**n
    patterns = np.arange(2**m, dtype=np.int64)
    signs = 1.0 - 2.0 * ((patterns[:, None] >> np.arange(m)) & 1)
    signs = signs / math.sqrt(m)
    acc = np.zeros((dim, dim), dtype=np.complex128)
    for subset in combinations(range(d), m):
        block = np.zeros((2**m, d), dtype=np.complex128)
        block[:, list(subset)] = signs
        rows = _tfold_rows(block, t)
        acc += np.einsum("si,sj->ij", rows, rows.conj())
    acc /= count
    return DensityOperator(n * t, (acc + acc.conj().T) / 2, validate=False)


@dataclass(frozen=True)
class MomentEstimate:
    operator: DensityOperator
    stderr: float
    samples: int


def mc_ensemble_moment(
    spec: EnsembleSpec,
    samples: int,
    threads: int = 1,
    cap: int | None = None,
) -> MomentEstimate:
    """Monte-Carlo mean of the t-copy projector with a max-entry standard error.

    Chunks are seeded by (spec.seed, chunk index) and merged in chunk order,
    so the estimate is reproducible for any thread count.
    """
    dim = _check_moment_dims(spec.n, spec.t, cap)
    block_cap = max(1, min(DEFAULT_CHUNK, (1 << 22) // max(dim, 1)))
    layout = chunk_layout(samples, block_cap)

    def worker(i: int):
        idx, _, size = layout[i]
        rng = spec.seed.generator(idx)
        block = sample_block(spec, size, rng)
        rows = _tfold_rows(block, spec.t)
        s1 = np.einsum("si,sj->ij", rows, rows.conj())
        s2 = np.einsum("si,sj->ij", np.abs(rows) ** 2, np.abs(rows.conj()) ** 2)
        return s1, s2

    sum1 = np.zeros((dim, dim), dtype=np.complex128)
    sum2 = np.zeros((dim, dim))
    for s1, s2 in run_ordered(worker, len(layout), threads):
        sum1 += s1
        sum2 += s2
    mean = sum1 / samples
    var = np.maximum(sum2 / samples - np.abs(mean) ** 2, 0.0)
    stderr = float(np.sqrt(var.max() / samples))
    op = DensityOperator(spec.n * spec.t, (mean + mean.conj().T) / 2, validate=False)
    return MomentEstimate(op, stderr, samples)


# ---------------------------------------------------------------------------
# Parameter advisors


@dataclass(frozen=True)
class SubsetAdvice:
    m: int
    m_exp: int


def advise_subset_size(T: GrowthClass, n: int) -> SubsetAdvice:
    """Concrete subset size inside the validity window for runtime class T.

    m is the smallest power of two at or above f(n) * ceil(log2 n), where f is
    T's base function; the slowly growing log factor realizes the required
    strict dominance of f while keeping desk-scale sizes enumerable. The cap
    m <= 2^{n-1} keeps m well below the full domain.
    """
    if n < 2:
        raise ValidationError("advisors require n >= 2")
    if T.form == "exp":
        raise UnsupportedGrowthClass("no valid subset-size window for exponential runtime")
    target = max(T.base_class().eval(n) * math.ceil(math.log2(n)), 1.0)
    m = min(2 ** (n - 1), 1 << max(0, math.ceil(math.log2(target))))
    return SubsetAdvice(m=m, m_exp=m.bit_length() - 1)


def advise_copies(T: GrowthClass, n: int, cap: int | None = None) -> int:
    """Copy count: the two-copy minimum for plain classes, ceil(f(n)) for
    poly-of-f classes, clipped so 2^{n t} fits the dimension cap."""
    if n < 2:
        raise ValidationError("advisors require n >= 2")
    if T.form == "exp":
        raise UnsupportedGrowthClass("no valid copy count for exponential runtime")
    if T.is_family:
        raw = max(2, math.ceil(T.base_class().eval(n)))
    else:
        raw = 2
    bits = int(math.log2(dim_cap(cap)))
    return max(1, min(raw, bits // n))


# ---------------------------------------------------------------------------
# JSON export


def operator_to_json(op) -> list:
    """Nested [re, im] pairs for cross-checking in other tools."""
    mat = op.mat if isinstance(op, DensityOperator) else np.asarray(op)
    return [[[float(e.real), float(e.imag)] for e in row] for row in mat]


def operator_from_json(data: list) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    return arr[..., 0] + 1j * arr[..., 1]
