"""Truncated multi-mode oscillator Hilbert space.

Operators live in the number basis of ``J`` modes, each cut at ``N`` levels,
so the total dimension is ``N**J``.  Mode ``0`` is the slowest-varying index
of the tensor product (``np.kron`` order).
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, ContractError

DEFAULT_MAX_DIM = 20_000


@dataclass(frozen=True)
class TruncationSpec:
    """Number of modes, levels kept per mode and the tail tolerance."""

    modes: int
    levels_per_mode: int
    tail_tolerance: float = 1e-10
    max_dim: int = DEFAULT_MAX_DIM

    def __post_init__(self):
        if int(self.modes) != self.modes or self.modes < 1:
            raise ConfigurationError(f"modes must be a positive integer, got {self.modes!r}")
        if int(self.levels_per_mode) != self.levels_per_mode or self.levels_per_mode < 1:
            raise ConfigurationError(
                f"levels_per_mode must be a positive integer, got {self.levels_per_mode!r}"
            )
        if not self.tail_tolerance > 0:
            raise ConfigurationError("tail_tolerance must be positive")
        if self.dim > self.max_dim:
            raise ConfigurationError(
                f"dimension {self.levels_per_mode}**{self.modes} = {self.dim} "
                f"exceeds the configured maximum {self.max_dim}"
            )

    @property
    def dim(self) -> int:
        return int(self.levels_per_mode) ** int(self.modes)


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """Dense square complex matrix with declared Hermiticity / unitarity.

    The flags are checked on construction, so a flagged instance always
    satisfies its invariant.
    """

    entries: np.ndarray
    hermitian: bool = False
    unitary: bool = False
    label: str = field(default="", compare=False)

    def __post_init__(self):
        a = np.asarray(self.entries, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ContractError(f"operator must be square, got shape {a.shape}")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)
        if self.hermitian:
            scale = max(np.max(np.abs(a)), 1.0) if a.size else 1.0
            if np.max(np.abs(a - a.conj().T), initial=0.0) > 1e-12 * scale:
                raise ContractError(f"operator {self.label!r} flagged hermitian but is not")
        if self.unitary:
            resid = np.linalg.norm(a.conj().T @ a - np.eye(a.shape[0]))
            if resid > 1e-10 * a.shape[0]:
                raise ContractError(f"operator {self.label!r} flagged unitary, residual {resid:.3e}")

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.entries
        return self.entries.astype(dtype)

    def __matmul__(self, other):
        return self.entries @ as_array(other)

    def __rmatmul__(self, other):
        return as_array(other) @ self.entries

    @property
    def H(self) -> "OperatorMatrix":
        return OperatorMatrix(self.entries.conj().T, self.hermitian, self.unitary, self.label)


def as_array(op) -> np.ndarray:
    """Plain ndarray view of an ``OperatorMatrix``, projector or array."""
    if isinstance(op, OperatorMatrix):
        return op.entries
    matrix = getattr(op, "matrix", None)
    if isinstance(matrix, OperatorMatrix):
        return matrix.entries
    return np.asarray(op)


def is_hermitian(a, rtol=1e-12) -> bool:
    a = as_array(a)
    scale = max(np.max(np.abs(a), initial=0.0), 1.0)
    return bool(np.max(np.abs(a - a.conj().T), initial=0.0) <= rtol * scale)


@dataclass(frozen=True, eq=False)
class ModeOperators:
    Q: OperatorMatrix
    P: OperatorMatrix
    a: OperatorMatrix
    adag: OperatorMatrix
    number: OperatorMatrix


def annihilation(levels: int) -> np.ndarray:
    """Single-mode lowering operator, ``a|n> = sqrt(n)|n-1>``."""
    return np.diag(np.sqrt(np.arange(1, levels, dtype=float)), k=1).astype(complex)


def embed(single: np.ndarray, mode: int, modes: int) -> np.ndarray:
    """Tensor-extend a single-mode matrix to act on ``mode`` of ``modes``."""
    n = single.shape[0]
    out = np.ones((1, 1), dtype=complex)
    for j in range(modes):
        out = np.kron(out, single if j == mode else np.eye(n))
    return out


@functools.lru_cache(maxsize=32)
def build_canonical_ops(spec: TruncationSpec) -> dict[int, ModeOperators]:
    """Q, P, a, a-dagger and number operators for every mode.

    ``Q = (a + a†)/√2`` and ``P = (a − a†)/(i√2)``, so ``[Q, P] = i`` holds
    exactly away from the top level of each mode.
    """
    n = spec.levels_per_mode
    a1 = annihilation(n)
    n1 = np.diag(np.arange(n, dtype=complex))  # exact integers, not a†a round-off
    ops = {}
    for j in range(spec.modes):
        a = embed(a1, j, spec.modes)
        ad = a.conj().T
        ops[j] = ModeOperators(
            Q=OperatorMatrix((a + ad) / np.sqrt(2), hermitian=True, label=f"Q{j}"),
            P=OperatorMatrix((a - ad) / (1j * np.sqrt(2)), hermitian=True, label=f"P{j}"),
            a=OperatorMatrix(a, label=f"a{j}"),
            adag=OperatorMatrix(ad, label=f"adag{j}"),
            number=OperatorMatrix(embed(n1, j, spec.modes), hermitian=True, label=f"n{j}"),
        )
    return ops


def below_edge_mask(spec: TruncationSpec) -> np.ndarray:
    """Boolean mask of basis states with no mode at its top level."""
    n = spec.levels_per_mode
    occ = np.indices((n,) * spec.modes).reshape(spec.modes, -1)
    return np.all(occ < n - 1, axis=0)


def occupations(spec: TruncationSpec) -> np.ndarray:
    """Array of shape ``(modes, dim)`` with the occupation of each mode."""
    n = spec.levels_per_mode
    return np.indices((n,) * spec.modes).reshape(spec.modes, -1)


def hermitian_eig(A, check: bool = True):
    """Ascending eigenvalues and unitary eigenvectors of a Hermitian matrix.

    Raises ``ContractError`` for non-Hermitian input.  With ``check`` the
    reconstruction residual ``‖AV − VΛ‖_F ≤ 1e-10 ‖A‖_F`` is asserted.
    The decomposition of an ``OperatorMatrix`` is cached on the (immutable)
    instance.
    """
    if isinstance(A, OperatorMatrix):
        cached = A.__dict__.get("_eig")
        if cached is not None:
            return cached
        if not A.hermitian and not is_hermitian(A.entries):
            raise ContractError("hermitian_eig needs a hermitian operator")
        out = _eig_array(A.entries, check)
        object.__setattr__(A, "_eig", out)
        return out
    a = np.asarray(A, dtype=complex)
    if not is_hermitian(a):
        raise ContractError("hermitian_eig needs a hermitian operator")
    return _eig_array(a, check)


def _eig_array(a, check):
    # symmetrize so LAPACK sees an exactly hermitian matrix
    a = 0.5 * (a + a.conj().T)
    w, v = np.linalg.eigh(a)
    if check:
        scale = max(np.linalg.norm(a), 1.0)
        resid = np.linalg.norm(a @ v - v * w)
        if resid > 1e-10 * scale:
            raise ContractError(f"eigen-reconstruction residual {resid:.3e} too large")
    w.setflags(write=False)
    return w, OperatorMatrix(v, unitary=True)


def matrix_exp_skewh(A, t: float) -> OperatorMatrix:
    """``exp(-i t A)`` for Hermitian ``A``, through the eigendecomposition."""
    w, v = hermitian_eig(A)
    return OperatorMatrix(propagate_eig(w, v.entries, t), unitary=True)


def propagate_eig(w, v, t):
    """``V exp(-i t Λ) V†`` from a precomputed decomposition."""
    return (v * np.exp(-1j * t * w)) @ v.conj().T


def commutator(a, b) -> np.ndarray:
    a, b = as_array(a), as_array(b)
    return a @ b - b @ a


def ground_state(spec: TruncationSpec) -> np.ndarray:
    v = np.zeros(spec.dim, dtype=complex)
    v[0] = 1.0
    return v


def normal_ordered_power(spec: TruncationSpec, mode: int, kind: str, n: int) -> OperatorMatrix:
    """Normal-ordered power ``:Q^n:`` or ``:P^n:`` of one mode.

    Creation operators stand to the left, so the coherent-state diagonal
    expectation of ``:Q^n:`` is exactly ``q**n``.  The truncated matrix is
    the exact compression of the infinite-dimensional operator.
    """
    from math import comb

    if not 0 <= mode < spec.modes:
        raise ValueError(f"mode {mode} outside 0..{spec.modes - 1}")
    a = annihilation(spec.levels_per_mode)
    ad = a.conj().T
    if kind == "Q":
        pref, sign = 2 ** (-n / 2), 1.0
    elif kind == "P":
        pref, sign = (1j * np.sqrt(2)) ** (-n), -1.0
    else:
        raise ValueError("kind must be 'Q' or 'P'")
    # single-mode sum, then tensor-embed: the operator touches one mode only
    single = np.zeros_like(a)
    for k in range(n + 1):
        single += comb(n, k) * sign**k * np.linalg.matrix_power(ad, k) @ np.linalg.matrix_power(a, n - k)
    out = embed(pref * single, mode, spec.modes)
    return OperatorMatrix(out, hermitian=True, label=f":{kind}{mode}^{n}:")
