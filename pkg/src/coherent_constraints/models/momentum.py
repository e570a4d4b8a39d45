"""A single momentum constraint ``P ≈ 0`` on one degree of freedom.

The projected coherent-state kernel has a one-dimensional integral form;
as ``δ → 0`` and after rescaling by ``δ`` it reduces to a kernel that no
longer depends on ``q``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import integrate

from ..coherent import CoherentLabel, PhaseConvention, auto_levels, coherent_vector
from ..errors import ContractError
from ..fock import OperatorMatrix, TruncationSpec, build_canonical_ops
from ..projector import ConstraintSpec, Projector, default_delta, momentum_window_projector, spectral_interval
from ..quadrature import gauss_legendre
from ..rkhs import Kernel


def _pq(item):
    if isinstance(item, CoherentLabel):
        if item.modes != 1:
            raise ContractError("the momentum example has one degree of freedom")
        if item.convention is not PhaseConvention.ALPHA_ZERO:
            raise ContractError("the momentum kernel oracle uses the alpha = 0 convention")
        return item.p[0], item.q[0]
    p, q = np.asarray(item, dtype=float).ravel()
    return float(p), float(q)


def _integrand(p2, q2, p1, q1):
    return lambda k: np.exp(-0.5 * (k - p2) ** 2 + 1j * k * (q2 - q1) - 0.5 * (k - p1) ** 2) / np.sqrt(np.pi)


def leading_projected_P_kernel(pair, delta: float) -> complex:
    """``2 sin[δ(q''−q')]/(√π(q''−q')) · e^{−(p''²+p'²)/2}``."""
    (p2, q2), (p1, q1) = _pq(pair[0]), _pq(pair[1])
    dq = q2 - q1
    x = delta * dq
    # sin(x)/x with its series near zero
    s = 1 - x * x / 6 + x**4 / 120 if abs(x) < 1e-4 else np.sin(x) / x
    return complex(2 * delta * s / np.sqrt(np.pi) * np.exp(-0.5 * (p2**2 + p1**2)))


def oracle_projected_P_kernel(pair, delta: float):
    """Projected kernel ``<p'',q''|E(−δ<P<δ)|p',q'>`` by adaptive quadrature.

    Returns ``(exact, leading)``: the integral over ``k ∈ (−δ, δ)`` and the
    leading small-``δ`` form.
    """
    if not delta > 0:
        raise ContractError("delta must be positive")
    (p2, q2), (p1, q1) = _pq(pair[0]), _pq(pair[1])
    val, _ = integrate.quad(_integrand(p2, q2, p1, q1), -delta, delta, complex_func=True,
                            epsabs=1e-14, epsrel=1e-12, limit=200)
    return complex(val), leading_projected_P_kernel(pair, delta)


def projected_P_kernel(delta: float, order: int = 48) -> Kernel:
    """The same integral as a vectorized ``Kernel`` on ``(p, q)`` rows.

    A single Gauss-Legendre rule suffices: the integrand is entire and the
    interval short.
    """
    k, w = gauss_legendre(-delta, delta, 1, order)

    def fn(x2, x1):
        p2, q2 = x2[:, 0, None, None], x2[:, 1, None, None]
        p1, q1 = x1[None, :, 0, None], x1[None, :, 1, None]
        f = np.exp(-0.5 * (k - p2) ** 2 + 1j * k * (q2 - q1) - 0.5 * (k - p1) ** 2)
        return (f * w).sum(axis=-1) / np.sqrt(np.pi)

    return Kernel(fn, 2, (f"<.|E(|P|<{delta:g})|.>",))


def oracle_limit_kernel(pair) -> complex:
    """``exp{−(p''² + p'²)/2}``, the reduced kernel after ``δ → 0``."""
    (p2, _), (p1, _) = _pq(pair[0]), _pq(pair[1])
    return complex(np.exp(-0.5 * (p2**2 + p1**2)))


def fock_spectral_sandwich(pair, delta: float, levels: int | None = None) -> complex:
    """``<v''|E|v'>`` with number-basis coherent vectors and the momentum window.

    The window matrix is the compression of the exact spectral projector of
    ``P`` onto ``(−δ, δ)``, so for well-resolved vectors the sandwich equals
    the integral form up to the truncation tail.
    """
    labs = [CoherentLabel(*(_pq(x)), PhaseConvention.ALPHA_ZERO) for x in pair]
    levels = levels or auto_levels(labs, tol=1e-14)
    spec = TruncationSpec(1, levels)
    v2, v1 = (coherent_vector(lab, spec) for lab in labs)
    win = momentum_window_projector(levels, -delta, delta).entries
    return complex(np.vdot(v2, win @ v1))


@dataclass(frozen=True, eq=False)
class MomentumToy:
    """``H = P²/2`` with the constraint ``P`` in a one-mode truncation."""

    spec: TruncationSpec
    H: OperatorMatrix
    phis: ConstraintSpec
    E: Projector


def momentum_toy(levels: int = 60, delta: float | None = None) -> MomentumToy:
    """Truncated momentum-constraint system.

    Without ``delta`` the interval half-width is placed mid-gap in the
    truncated ``P`` spectrum below 0.5.
    """
    spec = TruncationSpec(1, levels)
    P = build_canonical_ops(spec)[0].P
    if delta is None:
        delta = default_delta(np.abs(np.linalg.eigvalsh(P.entries)), 0.5)
    H = OperatorMatrix(0.5 * P.entries @ P.entries, hermitian=True, label="P^2/2")
    phis = ConstraintSpec((P,), delta)
    return MomentumToy(spec, H, phis, spectral_interval(phis))
