"""Constraint projection operators.

Four constructions are provided, all returning a certified ``Projector``:

* ``spectral_interval``: indicator of ``Σ Φ_a² < δ²``;
* ``sinc_integral``: the ``sin(δξ)/(πξ)`` average of ``e^{-iξΦ}``;
* ``group_average_u1``: the one-period average of ``e^{iλΦ}``;
* ``rank1_min_uncertainty``: the outer product of a single coherent vector.

``momentum_window_projector`` is a helper that is *not* a projector: it is
the compression to the truncated space of the exact spectral projector of
the momentum operator onto an interval.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import integrate, special

from .coherent import CoherentLabel, coherent_vector
from .errors import ContractError, IllConditionedIntervalError, NumericWarning
from .fock import (
    DEFAULT_MAX_DIM,
    OperatorMatrix,
    TruncationSpec,
    as_array,
    build_canonical_ops,
    hermitian_eig,
    is_hermitian,
    propagate_eig,
)
from .quadrature import gauss_legendre, periodic_trapezoid

INTERVAL_MARGIN = 1e-6


class Route(enum.Enum):
    SPECTRAL_INTERVAL = "spectral_interval"
    GROUP_AVG_U1 = "group_avg_u1"
    SINC_INTEGRAL = "sinc_integral"
    RANK1_MIN_UNCERTAINTY = "rank1_min_uncertainty"


@dataclass(frozen=True, eq=False)
class Projector:
    """Orthogonal projector with the route that produced it.

    Construction checks ``‖E²−E‖_F ≤ 1e-10·dim``, ``‖E−E†‖_F ≤ 1e-12·dim``
    and ``|Tr E − rank| ≤ 1e-8``.
    """

    matrix: OperatorMatrix
    rank: int
    route: Route
    delta: float = 0.0
    diagnostics: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        e = self.matrix.entries
        dim = max(e.shape[0], 1)
        if int(self.rank) != self.rank or self.rank < 0:
            raise ContractError(f"rank must be a nonnegative integer, got {self.rank!r}")
        if self.delta < 0:
            raise ContractError("delta must be nonnegative")
        herm = np.linalg.norm(e - e.conj().T)
        if herm > 1e-12 * dim:
            raise ContractError(f"projector not hermitian: ‖E−E†‖ = {herm:.3e}")
        idem = np.linalg.norm(e @ e - e)
        if idem > 1e-10 * dim:
            raise ContractError(f"projector not idempotent: ‖E²−E‖ = {idem:.3e}")
        tr = np.trace(e).real
        if abs(tr - self.rank) > 1e-8:
            raise ContractError(f"trace {tr:.10f} does not match rank {self.rank}")

    @property
    def dim(self) -> int:
        return self.matrix.dim

    def residuals(self) -> dict:
        """Idempotency, Hermiticity and trace residuals (Frobenius)."""
        e = self.matrix.entries
        return {
            "idempotency": float(np.linalg.norm(e @ e - e)),
            "hermiticity": float(np.linalg.norm(e - e.conj().T)),
            "trace": float(abs(np.trace(e).real - self.rank)),
        }


def _from_eigvecs(v: np.ndarray, keep: np.ndarray, route: Route, delta: float, label: str,
                  diagnostics=None) -> Projector:
    cols = v[:, keep]
    e = cols @ cols.conj().T
    e = 0.5 * (e + e.conj().T)
    return Projector(OperatorMatrix(e, hermitian=True, label=label), int(np.count_nonzero(keep)),
                     route, float(delta), dict(diagnostics or {}))


@dataclass(frozen=True, eq=False)
class ConstraintSpec:
    """Hermitian constraint operators ``Φ_a`` and the interval half-width ``δ``."""

    operators: tuple
    delta: float

    def __post_init__(self):
        ops = tuple(
            op if isinstance(op, OperatorMatrix) else OperatorMatrix(op, hermitian=True)
            for op in (self.operators if isinstance(self.operators, (list, tuple)) else (self.operators,))
        )
        if not ops:
            raise ContractError("at least one constraint operator is required")
        if len({op.dim for op in ops}) != 1:
            raise ContractError("constraint operators have different dimensions")
        for op in ops:
            if not (op.hermitian or is_hermitian(op.entries)):
                raise ContractError(f"constraint {op.label!r} is not hermitian")
        if not self.delta > 0:
            raise ContractError("delta must be positive")
        object.__setattr__(self, "operators", ops)
        object.__setattr__(self, "delta", float(self.delta))

    @property
    def dim(self) -> int:
        return self.operators[0].dim

    def square_sum(self) -> np.ndarray:
        return sum(op.entries @ op.entries for op in self.operators)


def _radii(phi: ConstraintSpec):
    """``|λ|`` for one constraint, ``√(eig ΣΦ²)`` for several, with eigenvectors."""
    if len(phi.operators) == 1:
        w, v = hermitian_eig(phi.operators[0])
        return np.abs(w), v.entries
    w, v = hermitian_eig(phi.square_sum())
    return np.sqrt(np.clip(w, 0.0, None)), v.entries


def default_delta(radii, upper: float) -> float:
    """Midpoint of the widest gap among ``radii`` (and 0) below ``upper``."""
    r = np.unique(np.concatenate([[0.0], np.asarray(radii, float), [upper]]))
    r = r[r <= upper]
    if r.size < 2:
        return float(upper)
    gaps = np.diff(r)
    k = int(np.argmax(gaps))
    return float(0.5 * (r[k] + r[k + 1]))


def spectral_interval(phi: ConstraintSpec, margin: float = INTERVAL_MARGIN) -> Projector:
    """Projector onto the eigenvectors of ``Σ Φ_a²`` with eigenvalue below ``δ²``.

    Every vector ``ψ`` in the range obeys ``<ψ|ΣΦ²|ψ> ≤ δ²<ψ|ψ>``.

    Raises
    ------
    IllConditionedIntervalError
        If an eigenvalue radius lies within ``margin`` of ``δ``; the error
        carries the gap-midpoint value as ``suggested_delta``.
    """
    r, v = _radii(phi)
    close = np.abs(r - phi.delta) < margin
    if np.any(close):
        hi = max(phi.delta * 2, float(np.max(r)) + 1.0)
        raise IllConditionedIntervalError(
            f"delta={phi.delta!r} is within {margin:g} of the eigenvalue radius "
            f"{float(r[close][0])!r}",
            suggested_delta=_nearby_gap_midpoint(r, phi.delta, hi),
        )
    return _from_eigvecs(v, r < phi.delta, Route.SPECTRAL_INTERVAL, phi.delta, "E_interval")


def _nearby_gap_midpoint(r, delta, hi):
    s = np.unique(np.concatenate([[0.0], r, [hi]]))
    mids = 0.5 * (s[:-1] + s[1:])
    return float(mids[np.argmin(np.abs(mids - delta))])


@dataclass(frozen=True)
class SincQuadrature:
    """How the improper ``ξ`` integral of the sinc average is evaluated.

    ``mode="truncated"`` integrates over ``[-Ξ, Ξ]`` (exactly, through the
    sine integral) and doubles ``Ξ`` from ``xi0`` until the Frobenius change
    drops below ``tol``.  ``mode="fourier"`` integrates the half line with
    QUADPACK's Fourier-integral routine.
    """

    mode: str = "truncated"
    xi0: float = 16.0
    tol: float = 1e-7
    max_doublings: int = 48

    def __post_init__(self):
        if self.mode not in ("truncated", "fourier"):
            raise ContractError("mode must be 'truncated' or 'fourier'")


def sinc_weight_truncated(lam, delta: float, xi: float):
    """``∫_{-Ξ}^{Ξ} e^{-iξλ} sin(δξ)/(πξ) dξ`` per eigenvalue ``λ``."""
    lam = np.asarray(lam, float)
    si_a, _ = special.sici((delta + lam) * xi)
    si_b, _ = special.sici((delta - lam) * xi)
    return (si_a + si_b) / np.pi


def _half_line_sin_over_x(omega: float) -> float:
    """``∫_0^∞ sin(ωξ)/ξ dξ`` by a regular part plus a QAWF tail."""
    if omega == 0.0:
        return 0.0
    sign, w = np.sign(omega), abs(omega)
    head, _ = integrate.quad(lambda x: np.sinc(w * x / np.pi) * w, 0.0, 1.0, epsabs=1e-14)
    tail, _ = integrate.quad(lambda x: 1.0 / x, 1.0, np.inf, weight="sin", wvar=w, epsabs=1e-12, limlst=200)
    return float(sign * (head + tail))


def sinc_weight_fourier(lam, delta: float):
    """``(1/π)∫_0^∞ [sin((δ+λ)ξ) + sin((δ−λ)ξ)]/ξ dξ`` per eigenvalue."""
    lam = np.atleast_1d(np.asarray(lam, float))
    return np.array([(_half_line_sin_over_x(delta + x) + _half_line_sin_over_x(delta - x)) / np.pi
                     for x in lam])


def sinc_weights(w, delta: float, quad: SincQuadrature | None = None):
    """Scalar sinc-integral weight for each eigenvalue in ``w``.

    Returns ``(weights, change)`` where ``change`` is the Frobenius change of
    the last ``Ξ`` doubling (zero for the half-line mode).
    """
    quad = quad or SincQuadrature()
    if not delta > 0:
        raise ContractError("delta must be positive")
    if quad.mode == "fourier":
        return sinc_weight_fourier(w, delta), 0.0
    xi = quad.xi0
    prev = sinc_weight_truncated(w, delta, xi)
    change = np.inf
    for _ in range(quad.max_doublings):
        xi *= 2
        weights = sinc_weight_truncated(w, delta, xi)
        change = float(np.linalg.norm(weights - prev))
        if change < quad.tol:
            return weights, change
        prev = weights
    warnings.warn(
        f"sinc integral: Frobenius change {change:.2e} after Ξ={xi:g} exceeds {quad.tol:g}",
        NumericWarning,
        stacklevel=3,
    )
    return weights, change


def sinc_average_matrix(phi_single, delta: float, quad: SincQuadrature | None = None) -> OperatorMatrix:
    """The sinc integral itself, without snapping weights to 0 or 1."""
    w, v = hermitian_eig(phi_single)
    weights, _ = sinc_weights(w, delta, quad)
    raw = (v.entries * weights) @ v.entries.conj().T
    return OperatorMatrix(0.5 * (raw + raw.conj().T), hermitian=True, label="E_sinc_raw")


def sinc_integral(phi_single, delta: float, quad: SincQuadrature | None = None) -> Projector:
    """``∫ e^{-iξΦ} sin(δξ)/(πξ) dξ`` for a single Hermitian constraint.

    The integral acts diagonally in the eigenbasis of ``Φ``, so each
    eigenvalue receives a scalar weight.  Weights are snapped to 0 or 1 once
    converged; a weight that stays away from both (an eigenvalue on the
    interval edge) triggers a ``NumericWarning``.  The distance between the
    snapped projector and the raw integral is kept in
    ``diagnostics["raw_residual"]``.
    """
    w, v = hermitian_eig(phi_single)
    v = v.entries
    weights, change = sinc_weights(w, delta, quad)
    keep = weights > 0.5
    edge = np.abs(weights - keep) > 1e-3
    if np.any(edge):
        warnings.warn(
            f"sinc weights {weights[edge]} are not near 0 or 1; an eigenvalue sits on ±delta",
            NumericWarning,
            stacklevel=2,
        )
    raw = (v * weights) @ v.conj().T
    snapped = v[:, keep] @ v[:, keep].conj().T
    diag = {"raw_residual": float(np.linalg.norm(raw - snapped)), "xi_change": change}
    return _from_eigvecs(v, keep, Route.SINC_INTEGRAL, delta, "E_sinc", diag)


def sinc_total_weight(delta: float) -> float:
    """``∫ sin(δx)/(πx) dx`` over the real line (equals 1 for every ``δ > 0``)."""
    return 2.0 * _half_line_sin_over_x(delta) / np.pi


def _check_uniform(w, period):
    step = 2 * np.pi / period
    ratios = (w - w[0]) / step
    if np.max(np.abs(ratios - np.round(ratios)), initial=0.0) > 1e-8:
        raise ContractError(
            f"spectrum is not a lattice of spacing 2π/period = {step:g}; group average undefined"
        )


def group_average_u1(phi, period: float, level: float = 0.0) -> Projector:
    """``(1/T)∫_0^T e^{iλ(Φ − level)} dλ`` for a constraint with a uniformly spaced spectrum.

    Evaluated in the eigenbasis, where the phase average is the indicator of
    eigenvalue ``level`` (zero by default).  If the spectral lattice misses
    ``level`` (a shift that is not a multiple of the spacing) the result is
    the zero projector.  ``level`` lets one decomposition of ``Φ`` serve
    every eigenspace.
    """
    if not period > 0:
        raise ContractError("period must be positive")
    w, v = hermitian_eig(phi)
    _check_uniform(w, period)
    return _from_eigvecs(v.entries, np.abs(w - level) < 1e-8, Route.GROUP_AVG_U1, 0.0, "E_group")


def group_average_quadrature(phi, period: float, points: int = 256) -> OperatorMatrix:
    """Trapezoid approximation of the same average; exact for integer phases."""
    w, v = hermitian_eig(phi)
    nodes, weights = periodic_trapezoid(points, period)
    avg = np.exp(1j * np.outer(w, nodes)) @ weights / period
    return OperatorMatrix((v.entries * avg) @ v.entries.conj().T, label="E_group_quad")


def rank1_min_uncertainty(target: CoherentLabel, spec: TruncationSpec | None = None) -> Projector:
    """``|p₀,q₀><p₀,q₀|`` for a ground-state coherent vector."""
    v = coherent_vector(target, spec)
    v = v / np.linalg.norm(v)
    e = np.outer(v, v.conj())
    return Projector(OperatorMatrix(0.5 * (e + e.conj().T), hermitian=True, label="E_rank1"), 1,
                     Route.RANK1_MIN_UNCERTAINTY, 0.0)


def weyl_weight_normalization(half_width: float = 12.0, panels: int = 8, order: int = 16) -> float:
    """``∫ e^{-(λ²+ξ²)/4} dλ dξ / 2π`` over the square (tends to 2)."""
    x, w = gauss_legendre(-half_width, half_width, panels, order)
    g = np.sum(w * np.exp(-x**2 / 4))
    return float(g * g / (2 * np.pi))


def weyl_integral_projector(target: CoherentLabel, levels: int, half_width: float = 12.0,
                            work_levels: int | None = None, panels: int = 12,
                            order: int = 16) -> OperatorMatrix:
    """Gaussian-weighted Weyl-operator integral for a one-mode rank-1 projector.

    ``∫ e^{-iλ(P−p₀) − iξ(Q−q₀)} e^{-(λ²+ξ²)/4} dλ dξ / 2π`` over a square
    of half-width ``half_width``.  The Weyl operators are formed in a larger
    truncation ``work_levels`` and the leading ``levels`` block is returned.
    Using ``e^{-i(λP+ξQ)} = e^{-iλP} e^{-iξQ} e^{-iλξ/2}`` both exponentials
    are diagonal in fixed eigenbases, so the double sum collapses to two
    matrix products.
    """
    if target.modes != 1:
        raise ContractError("the Weyl representation is implemented for one mode")
    m = work_levels or max(2 * levels + 40, 160)
    ops = build_canonical_ops(TruncationSpec(1, m, max_dim=max(m, DEFAULT_MAX_DIM)))[0]
    wp, vp = hermitian_eig(ops.P)
    wq, vq = hermitian_eig(ops.Q)
    vp, vq = vp.entries, vq.entries
    p0, q0 = target.p[0], target.q[0]
    x, w = gauss_legendre(-half_width, half_width, panels, order)
    lam, xi = np.meshgrid(x, x, indexing="ij")
    c = (np.outer(w, w) / (2 * np.pi)) * np.exp(
        -(lam**2 + xi**2) / 4 + 1j * lam * p0 + 1j * xi * q0 - 0.5j * lam * xi
    )
    a = np.exp(-1j * np.outer(wp, x))          # (eig_p, λ)
    b = np.exp(-1j * np.outer(x, wq))          # (ξ, eig_q)
    middle = (vp.conj().T @ vq) * (a @ c @ b)
    full = vp @ middle @ vq.conj().T
    return OperatorMatrix(full[:levels, :levels], label="E_weyl")


def _hermite_functions(n: int, x: np.ndarray) -> np.ndarray:
    """Rows ``ψ_0..ψ_{n-1}`` of normalized Hermite functions at ``x``."""
    out = np.empty((n, x.size))
    out[0] = np.pi ** -0.25 * np.exp(-x**2 / 2)
    if n > 1:
        out[1] = np.sqrt(2.0) * x * out[0]
    for k in range(2, n):
        out[k] = np.sqrt(2.0 / k) * x * out[k - 1] - np.sqrt((k - 1) / k) * out[k - 2]
    return out


def momentum_window_projector(levels: int, lo: float, hi: float, panels: int = 8,
                              order: int = 24) -> OperatorMatrix:
    """Compression of the exact momentum spectral projector onto ``[lo, hi]``.

    Entries ``∫_lo^hi conj(φ̃_m(k)) φ̃_n(k) dk`` with momentum wavefunctions
    ``φ̃_n(k) = (−i)^n ψ_n(k)``.  The truncated ``P`` has a discrete
    spectrum (Hermite roots), so its own spectral projectors cannot resolve
    narrow windows; this matrix is the exact sandwich for vectors supported
    in the first ``levels`` number states.  It is Hermitian but not
    idempotent.
    """
    k, w = gauss_legendre(lo, hi, panels, order)
    psi = _hermite_functions(levels, k) * ((-1j) ** np.arange(levels))[:, None]
    m = (psi.conj() * w) @ psi.T
    return OperatorMatrix(0.5 * (m + m.conj().T), hermitian=True, label=f"E_P[{lo:g},{hi:g}]")


def compat_check(E, H, T: float) -> float:
    """``‖e^{-iTH}E − E e^{-iTH}E‖_F``; zero when ``H`` preserves the range of ``E``."""
    e = as_array(E)
    w, v = hermitian_eig(H)
    u = propagate_eig(w, v.entries, T)
    ue = u @ e
    return float(np.linalg.norm(ue - e @ ue))


def commutes_with_phases(E: Projector, phi, taus: Sequence[float]) -> float:
    """Largest ``‖e^{-iτΦ}E − E‖_F`` over the given ``τ`` values."""
    w, v = hermitian_eig(phi)
    e = E.matrix.entries
    return max(float(np.linalg.norm(propagate_eig(w, v.entries, t) @ e - e)) for t in taus)
