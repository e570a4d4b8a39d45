"""Reproducing kernels: Gram matrices, span inner products, reductions.

A kernel is an evaluation rule on pairs of real coordinate vectors.  For
phase-space kernels of ``J`` modes the coordinates are ordered
``(p_1..p_J, q_1..q_J)``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .coherent import CoherentLabel, PhaseConvention, fock_amplitudes
from .errors import ContractError, DomainError, ExtrapolationError, NumericWarning
from .fock import as_array
from .quadrature import gauss_legendre


@dataclass(frozen=True, eq=False)
class Kernel:
    """Two-label complex function with a record of how it was produced.

    ``matrix(X2, X1)`` evaluates all pairs of rows at once and is what the
    rest of the module uses; scalar calls go through it too.
    """

    matrix_fn: Callable[[np.ndarray, np.ndarray], np.ndarray]
    arity: int
    provenance: tuple = field(default=())

    @classmethod
    def from_scalar(cls, fn, arity, provenance=()):
        def matrix_fn(x2, x1):
            return np.array([[fn(a, b) for b in x1] for a in x2], dtype=complex)

        return cls(matrix_fn, arity, tuple(provenance))

    def matrix(self, x2, x1) -> np.ndarray:
        x2 = np.atleast_2d(np.asarray(x2, dtype=float))
        x1 = np.atleast_2d(np.asarray(x1, dtype=float))
        if x2.shape[1] != self.arity or x1.shape[1] != self.arity:
            raise ContractError(f"kernel expects labels with {self.arity} coordinates")
        return np.asarray(self.matrix_fn(x2, x1), dtype=complex)

    def __call__(self, x2, x1) -> complex:
        return complex(self.matrix(x2, x1)[0, 0])

    def derived(self, matrix_fn, arity=None, step=""):
        return Kernel(matrix_fn, self.arity if arity is None else arity, self.provenance + (step,))


def coherent_kernel(modes: int = 1) -> Kernel:
    """Ground-state coherent overlap (``α = 0``) as a kernel."""

    def fn(x2, x1):
        p2, q2 = x2[:, None, :modes], x2[:, None, modes:]
        p1, q1 = x1[None, :, :modes], x1[None, :, modes:]
        expo = 0.5j * (p2 + p1) * (q2 - q1) - 0.25 * ((p2 - p1) ** 2 + (q2 - q1) ** 2)
        return np.exp(expo.sum(axis=-1))

    return Kernel(fn, 2 * modes, ("coherent overlap",))


def _amplitude_rows(x, modes, levels, convention):
    # vectorized form of fock_amplitudes over the rows of x
    p, q = x[:, :modes], x[:, modes:]
    z = (q + 1j * p) / np.sqrt(2)
    rows = np.ones((x.shape[0], 1), dtype=complex)
    for j in range(modes):
        c = np.empty((x.shape[0], levels), dtype=complex)
        c[:, 0] = np.exp(-0.5 * np.abs(z[:, j]) ** 2)
        for n in range(1, levels):
            c[:, n] = c[:, n - 1] * z[:, j] / np.sqrt(n)
        rows = (rows[:, :, None] * c[:, None, :]).reshape(x.shape[0], -1)
    pq = np.sum(p * q, axis=1)
    alpha = np.array([convention.phase(a, b) for a, b in zip(p, q)]) if x.shape[0] else pq
    return np.exp(1j * (alpha - 0.5 * pq))[:, None] * rows


def operator_kernel(op, modes: int, levels: int,
                    convention: PhaseConvention = PhaseConvention.ALPHA_ZERO,
                    name: str = "operator") -> Kernel:
    """``<p'',q''| A |p',q'>`` with closed-form coherent amplitudes.

    ``op`` is a matrix in the ``levels**modes`` number basis; with a
    projector this is the projected reproducing kernel.
    """
    a = as_array(op)
    if a.shape != (levels**modes, levels**modes):
        raise ContractError("operator shape does not match the truncation")

    def fn(x2, x1):
        v2 = _amplitude_rows(x2, modes, levels, convention)
        v1 = _amplitude_rows(x1, modes, levels, convention)
        return v2.conj() @ a @ v1.T

    return Kernel(fn, 2 * modes, (f"<.|{name}|.>",))


def gram(kernel: Kernel, labels) -> np.ndarray:
    """``G[k, l] = K(x_k, x_l)``."""
    x = np.atleast_2d(np.asarray(labels, dtype=float))
    return kernel.matrix(x, x)


def psd_margin(G) -> float:
    """Smallest eigenvalue of the Hermitian part of ``G`` divided by ``‖G‖₂``.

    Certification passes when the margin is ``≥ -1e-10``.
    """
    G = np.asarray(G)
    w = np.linalg.eigvalsh(0.5 * (G + G.conj().T))
    scale = max(np.max(np.abs(w)), np.finfo(float).tiny)
    return float(w[0] / scale)


def is_psd(G, tol: float = 1e-10) -> bool:
    return psd_margin(G) >= -tol


def hermitian_symmetry_error(kernel: Kernel, labels) -> float:
    G = gram(kernel, labels)
    return float(np.max(np.abs(G - G.conj().T)))


@dataclass(frozen=True)
class SpanVector:
    """Finite combination ``Σ_k α_k K(·, x_k)``."""

    coefficients: tuple
    labels: tuple

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coefficients, dtype=complex))
        x = np.atleast_2d(np.asarray(self.labels, dtype=float))
        if c.size == 0 or c.size != x.shape[0]:
            raise ContractError("span needs one label per coefficient and K >= 1")
        object.__setattr__(self, "coefficients", c)
        object.__setattr__(self, "labels", x)


def span_inner(kernel: Kernel, phi: SpanVector, psi: SpanVector) -> complex:
    """``(φ, ψ) = Σ_l Σ_k β_l* α_k K(x̄_l, x_k)``."""
    if phi.labels.shape[1] != psi.labels.shape[1]:
        raise ContractError("spans use labels of different arity")
    G = kernel.matrix(phi.labels, psi.labels)
    return complex(phi.coefficients.conj() @ G @ psi.coefficients)


def reproduce_integral(kernel: Kernel, measure, pair, panels=None) -> complex:
    """``∫ K(x'', x) K(x, x') dµ(x)`` with the measure's tensor rule."""
    x2, x1 = (np.asarray(x, dtype=float) for x in pair)
    nodes, weights = measure.nodes(panels)
    left = kernel.matrix(x2[None, :], nodes)[0]
    right = kernel.matrix(nodes, x1[None, :])[:, 0]
    return complex(np.sum(left * weights * right))


def reproduce_check(kernel: Kernel, measure, pair, tol: float = 1e-7) -> float:
    """Residual ``|K(x'',x') − ∫ K(x'',x) K(x,x') dµ(x)|``.

    The quadrature is repeated with doubled panels; if the two values differ
    by more than ``tol`` a ``NumericWarning`` reports both.
    """
    coarse = reproduce_integral(kernel, measure, pair)
    fine = reproduce_integral(kernel, measure, pair, panels=2 * measure.panels)
    if abs(fine - coarse) > tol:
        warnings.warn(
            f"reproducing integral not converged: {coarse!r} vs {fine!r}",
            NumericWarning,
            stacklevel=2,
        )
    return abs(kernel(pair[0], pair[1]) - fine)


def reduce_rescale(kernel: Kernel, omega: float) -> Kernel:
    """``K₁(p'',q''; p',q') = K(p''/Ω, Ω q''; p'/Ω, Ω q')``."""
    if not omega > 0 or not np.isfinite(omega):
        raise DomainError("omega must be a positive finite number")
    modes = kernel.arity // 2
    scale = np.concatenate([np.full(modes, 1 / omega), np.full(modes, omega)])
    return kernel.derived(lambda x2, x1: kernel.matrix(x2 * scale, x1 * scale),
                          step=f"rescale(omega={omega:g})")


def reduce_restrict(kernel: Kernel, fixed: dict) -> Kernel:
    """Fix the same coordinates on both arguments and drop them.

    ``fixed`` maps coordinate index to value, e.g. ``{0: 0.0}`` sets
    ``p'' = p' = 0`` for a one-mode phase-space kernel.
    """
    if not fixed:
        return kernel
    keep = [i for i in range(kernel.arity) if i not in fixed]

    def expand(x):
        full = np.empty((x.shape[0], kernel.arity))
        full[:, keep] = x
        for i, val in fixed.items():
            full[:, i] = val
        return full

    return kernel.derived(lambda x2, x1: kernel.matrix(expand(x2), expand(x1)),
                          arity=len(keep), step=f"restrict({dict(fixed)})")


def reduce_weight(kernel: Kernel, weight: Callable, axis: int, bound: tuple,
                  tol: float = 1e-9, panels: int = 4, order: int = 20) -> Kernel:
    """Integrate one coordinate out of both arguments against ``w*`` and ``w``.

    ``K₃(y'',y') = ∬ w(u'')* w(u') K(u'',y''; u',y') du'' du'`` where ``u``
    is coordinate ``axis``.  ``bound = (lo, hi)`` is the interval outside
    which ``|w|`` is negligible; the panel count doubles until the value
    changes by less than ``tol``.
    """
    keep = [i for i in range(kernel.arity) if i != axis]
    lo, hi = bound

    def at(n_panels, x2, x1):
        u, wu = gauss_legendre(lo, hi, n_panels, order)
        wv = np.asarray(weight(u), dtype=complex) * wu

        def expand(x):
            full = np.empty((x.shape[0] * u.size, kernel.arity))
            full[:, keep] = np.repeat(x, u.size, axis=0)
            full[:, axis] = np.tile(u, x.shape[0])
            return full

        K = kernel.matrix(expand(x2), expand(x1))
        K = K.reshape(x2.shape[0], u.size, x1.shape[0], u.size)
        return np.einsum("i,aibj,j->ab", wv.conj(), K, wv)

    def fn(x2, x1):
        n = panels
        prev = at(n, x2, x1)
        for _ in range(6):
            n *= 2
            cur = at(n, x2, x1)
            if np.max(np.abs(cur - prev)) < tol:
                return cur
            prev = cur
        warnings.warn("weighted reduction quadrature did not converge", NumericWarning, stacklevel=3)
        return cur

    return kernel.derived(fn, arity=len(keep), step=f"weight(axis={axis})")


@dataclass(frozen=True, eq=False)
class LimitResult:
    """Outcome of a delta -> 0 reduction.

    ``sigma`` is the leading power used for the scaling (the fit snapped to
    the nearest half integer); ``sigma_fit`` and ``fit_residual`` are the
    raw log-log regression results.
    """

    sigma: float
    sigma_fit: float
    fit_residual: float
    correction_power: float
    kernel: Kernel

    def __iter__(self):
        # allows ``sigma, kernel = reduce_limit_delta(...)``
        return iter((self.sigma, self.kernel))


def _richardson(values, ratio, power):
    """Richardson tableau for ``A(h/ratio^i)`` with error ``Σ c_j h^{j·power}``."""
    table = [np.asarray(v) for v in values]
    j = 1
    while len(table) > 1:
        f = ratio ** (j * power)
        table = [(f * table[i + 1] - table[i]) / (f - 1) for i in range(len(table) - 1)]
        j += 1
    return table[0]


def reduce_limit_delta(family: Callable[[float], Kernel], delta0: float, reference,
                       exponent="auto", prefactor: float = 1.0,
                       max_fit_residual: float = 0.05) -> LimitResult:
    """Limit ``prefactor · lim δ^{-σ} K_δ`` from four geometric deltas.

    ``family(δ)`` returns the kernel at ``δ``; ``reference`` is the label whose
    diagonal value fixes the power ``σ`` (log-log fit over
    ``δ₀, δ₀/2, δ₀/4, δ₀/8``).  The scaled values are extrapolated to ``δ = 0``
    with a Richardson tableau whose correction power is read off the same
    diagonal values.
    """
    deltas = delta0 / 2.0 ** np.arange(4)
    kernels = [family(d) for d in deltas]
    ref = np.atleast_2d(np.asarray(reference, dtype=float))
    diag = np.array([abs(k.matrix(ref, ref)[0, 0]) for k in kernels])
    if exponent == "auto":
        if np.any(diag <= 0):
            raise ExtrapolationError("reference diagonal vanishes; cannot fit a power")
        slope, icpt = np.polyfit(np.log(deltas), np.log(diag), 1)
        resid = float(np.max(np.abs(np.log(diag) - (slope * np.log(deltas) + icpt))))
        if resid > max_fit_residual:
            raise ExtrapolationError(f"delta dependence is not a power law (fit residual {resid:.3f})")
        sigma = round(slope * 2) / 2
        if abs(sigma - slope) > max_fit_residual:
            raise ExtrapolationError(f"fitted power {slope:.4f} is not near a half integer")
        sigma_fit = float(slope)
    else:
        sigma = sigma_fit = float(exponent)
        resid = 0.0

    scaled_diag = diag * deltas ** (-sigma)
    d1, d2 = scaled_diag[1] - scaled_diag[2], scaled_diag[2] - scaled_diag[3]
    if abs(d2) < 1e-14 * max(abs(scaled_diag[-1]), 1e-300) or abs(d1) < 1e-300:
        power = 2.0
    else:
        power = max(1.0, float(round(np.log2(abs(d1 / d2)))))

    def fn(x2, x1):
        vals = [prefactor * d ** (-sigma) * k.matrix(x2, x1) for d, k in zip(deltas, kernels)]
        return _richardson(vals, 2.0, power)

    limit = Kernel(fn, kernels[0].arity,
                   kernels[0].provenance + (f"limit delta->0 (sigma={sigma:g})",))
    return LimitResult(sigma, sigma_fit, resid, power, limit)
