"""Configuration constraint ``q² = 1`` in Schrödinger representation.

Coherent states use ``<x|p,q> = e^{ip·x} η(x − q)``.  Projecting onto the
shell ``|x² − 1| < δ`` gives the projected kernel; restricting it to
``q² = 1`` with a surface-constant fiducial gives an E(2) kernel; replacing
the shell by a fixed radial profile ``ζ`` gives the second-class kernel.

Reproducing checks integrate the momentum variables exactly (the
``p``-integral of ``e^{ip·(x−y)}`` is a delta function) and the remaining
position or angle variables numerically.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import special

from ..errors import ConfigurationError, ContractError, NumericWarning
from ..quadrature import gauss_legendre, periodic_trapezoid
from ..rkhs import Kernel


@dataclass(frozen=True)
class GaussianFiducial:
    """Isotropic normalized Gaussian ``(πσ²)^{-J/4} e^{−|x|²/(2σ²)}``."""

    sigma: float = 1.0

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        J = x.shape[-1]
        return (np.pi * self.sigma**2) ** (-J / 4) * np.exp(-np.sum(x * x, axis=-1) / (2 * self.sigma**2))


@dataclass(frozen=True)
class PolarRule:
    """Radial Gauss-Legendre panels times an equispaced angular rule."""

    radial_order: int = 16
    radial_panels: int = 2
    angular: int = 128

    def refined(self) -> "PolarRule":
        return PolarRule(self.radial_order, 2 * self.radial_panels, 2 * self.angular)


def _directions(J: int, n: int):
    """Unit vectors and solid-angle weights on ``S^{J−1}`` (``J`` = 2 or 3)."""
    if J == 2:
        phi, w = periodic_trapezoid(n)
        return np.stack([np.cos(phi), np.sin(phi)], axis=1), w
    if J == 3:
        ct, wt = gauss_legendre(-1.0, 1.0, max(1, n // 32), 32)
        phi, wp = periodic_trapezoid(n)
        st = np.sqrt(1 - ct**2)
        dirs = np.stack([np.outer(st, np.cos(phi)).ravel(), np.outer(st, np.sin(phi)).ravel(),
                         np.repeat(ct, n)], axis=1)
        return dirs, np.outer(wt, wp).ravel()
    raise ContractError("direction quadrature is implemented for J = 2 and J = 3")


@dataclass(frozen=True)
class SphereKernelParams:
    """Shell half-width ``δ`` (in ``x²``), dimension ``J``, fiducial and rule."""

    J: int = 2
    delta: float = 0.2
    eta: Callable = field(default_factory=GaussianFiducial)
    quadrature: PolarRule = field(default_factory=PolarRule)

    def __post_init__(self):
        if int(self.J) != self.J or self.J < 2:
            raise ConfigurationError("J must be an integer >= 2")
        if not 0 < self.delta < 1:
            raise ConfigurationError("delta must lie in (0, 1) so the shell is nonempty")

    @property
    def radii(self):
        return np.sqrt(1 - self.delta), np.sqrt(1 + self.delta)


def shell_nodes(params: SphereKernelParams, rule: PolarRule | None = None):
    """Cartesian nodes and weights of ``∫_{|x²−1|<δ} d^Jx``."""
    rule = rule or params.quadrature
    lo, hi = params.radii
    r, wr = gauss_legendre(lo, hi, rule.radial_panels, rule.radial_order)
    dirs, wd = _directions(params.J, rule.angular)
    pts = (r[:, None, None] * dirs[None, :, :]).reshape(-1, params.J)
    wts = (wr * r ** (params.J - 1))[:, None] * wd[None, :]
    return pts, wts.ravel()


def _split(x, J):
    return x[:, :J], x[:, J:]


def sphere_kernel(params: SphereKernelParams) -> Kernel:
    """``<p'',q''|E|p',q'> = ∫_shell η*(x−q'') e^{−i(p''−p')·x} η(x−q') d^Jx`` as a ``Kernel``.

    Coordinates are ordered ``(p_1..p_J, q_1..q_J)``.
    """
    J = params.J

    def fn(x2, x1):
        pts, wts = shell_nodes(params)
        p2, q2 = _split(x2, J)
        p1, q1 = _split(x1, J)
        left = np.conj(params.eta(pts[None, :, :] - q2[:, None, :])) * np.exp(-1j * p2 @ pts.T)
        right = params.eta(pts[None, :, :] - q1[:, None, :]) * np.exp(1j * p1 @ pts.T)
        return (left * wts) @ right.T

    return Kernel(fn, 2 * J, (f"shell |x^2-1|<{params.delta:g}",))


def sphere_projected_kernel(pair, params: SphereKernelParams, tol: float = 1e-10) -> complex:
    """Scalar projected kernel with a refinement check.

    Issues ``NumericWarning`` if doubling the rule changes the value by
    more than ``tol``.
    """
    x2, x1 = (np.atleast_2d(np.asarray(x, dtype=float)) for x in pair)
    coarse = sphere_kernel(params).matrix(x2, x1)[0, 0]
    finer = SphereKernelParams(params.J, params.delta, params.eta, params.quadrature.refined())
    fine = sphere_kernel(finer).matrix(x2, x1)[0, 0]
    if abs(fine - coarse) > tol:
        warnings.warn(f"shell quadrature not converged: {coarse!r} vs {fine!r}", NumericWarning,
                      stacklevel=2)
    return complex(fine)


def position_marginal(eta, x, half_width: float = 8.0, panels: int = 4, order: int = 20) -> np.ndarray:
    """``∫ |η(x − q)|² d^Jq`` over a box, for each row of ``x`` (equals 1 in the limit)."""
    x = np.atleast_2d(x)
    J = x.shape[1]
    g, w = gauss_legendre(-half_width, half_width, panels, order)
    grids = np.meshgrid(*([g] * J), indexing="ij")
    q = np.stack([gr.ravel() for gr in grids], axis=1)
    wq = np.prod(np.stack(np.meshgrid(*([w] * J), indexing="ij")).reshape(J, -1), axis=0)
    out = np.empty(x.shape[0])
    for i, xi in enumerate(x):
        out[i] = np.sum(wq * np.abs(eta(xi[None, :] - q)) ** 2)
    return out


def sphere_reproduce_residual(params: SphereKernelParams, pair, half_width: float = 8.0) -> float:
    """``|K(x'',x') − ∫ K(x'',x) K(x,x') d^Jp d^Jq/(2π)^J|``.

    The momentum integral turns the product of shell integrals into a
    single shell integral weighted by ``∫|η(y − q)|² d^Jq``, which is then
    evaluated by quadrature over a ``q`` box.
    """
    J = params.J
    x2, x1 = (np.atleast_2d(np.asarray(x, dtype=float)) for x in pair)
    pts, wts = shell_nodes(params)
    marg = position_marginal(params.eta, pts, half_width)
    p2, q2 = _split(x2, J)
    p1, q1 = _split(x1, J)
    f = (np.conj(params.eta(pts - q2)) * np.exp(-1j * pts @ (p2[0] - p1[0])) * params.eta(pts - q1))
    reproduced = np.sum(wts * f * marg)
    direct = sphere_kernel(params).matrix(x2, x1)[0, 0]
    return float(abs(direct - reproduced))


@dataclass(frozen=True)
class SurfaceConstantFiducial:
    """``η(r, φ) = ξ(r, φ) / √(∫_0^{2π} |ξ(r, θ)|² dθ)`` for a Gaussian seed ``ξ``.

    The seed is ``exp(−|x − x₀|²/(2s²))`` with ``x₀ = (offset, 0)``; its
    angular norm has the closed form ``2π e^{−(r²+offset²)/s²} I₀(2 r offset/s²)``,
    so the normalization does not depend on any angular quadrature.
    """

    width: float = 0.5
    offset: float = 1.0

    def __post_init__(self):
        if not (self.width > 0 and self.offset >= 0):
            raise ConfigurationError("seed width must be positive and offset nonnegative")

    def seed(self, r, phi):
        x, y = r * np.cos(phi), r * np.sin(phi)
        return np.exp(-((x - self.offset) ** 2 + y**2) / (2 * self.width**2))

    def log_angular_norm(self, r):
        s2 = self.width**2
        z = 2 * r * self.offset / s2
        # log(2π e^{−(r²+o²)/s²} I₀(z)) with the scaled Bessel function
        return np.log(2 * np.pi) - (r**2 + self.offset**2) / s2 + np.log(special.ive(0, z)) + z

    def __call__(self, r, phi):
        r = np.asarray(r, dtype=float)
        if np.any(r <= 0):
            raise ContractError("surface-constant fiducial needs r > 0")
        lognorm = self.log_angular_norm(r)
        if not np.all(np.isfinite(lognorm)):
            raise ContractError("seed has vanishing angular norm on part of the annulus")
        return self.seed(r, phi) * np.exp(-0.5 * lognorm)


def surface_constant_profile(eta: SurfaceConstantFiducial, radii, order: int = 64, panels: int = 4) -> np.ndarray:
    """``∫_0^{2π} |η(r, c)|² dc`` at each radius, by Gauss-Legendre in ``c``."""
    c, w = gauss_legendre(0.0, 2 * np.pi, panels, order)
    radii = np.atleast_1d(np.asarray(radii, dtype=float))
    return np.array([np.sum(w * np.abs(eta(np.full_like(c, r), c)) ** 2) for r in radii])


def _polar_grid(delta, rule):
    lo, hi = np.sqrt(1 - delta), np.sqrt(1 + delta)
    r, wr = gauss_legendre(lo, hi, rule.radial_panels, rule.radial_order)
    phi, wp = periodic_trapezoid(rule.angular)
    return r, wr, phi, wp


def e2_kernel(delta: float, eta: SurfaceConstantFiducial | None = None,
              rule: PolarRule | None = None) -> Kernel:
    """Reduced kernel on ``(a, b, c)``: the shell kernel at ``q = (cos c, sin c)``.

    ``∫_{|r²−1|<δ} η*(r, φ−c'') e^{−i(a''−a')r cos φ − i(b''−b')r sin φ} η(r, φ−c') r dr dφ``.
    """
    eta = eta or SurfaceConstantFiducial()
    rule = rule or PolarRule()
    if not 0 < delta < 1:
        raise ConfigurationError("delta must lie in (0, 1)")

    def fn(x2, x1):
        r, wr, phi, wp = _polar_grid(delta, rule)
        R, PHI = np.meshgrid(r, phi, indexing="ij")
        R, PHI = R.ravel(), PHI.ravel()
        W = np.outer(wr * r, wp).ravel()
        cx, cy = R * np.cos(PHI), R * np.sin(PHI)

        def side(x, sign):
            a, b, c = x[:, 0:1], x[:, 1:2], x[:, 2:3]
            return eta(R[None, :], PHI[None, :] - c) * np.exp(sign * 1j * (a * cx + b * cy))

        left = np.conj(side(x2, 1.0))
        right = side(x1, 1.0)
        return (left * W) @ right.T

    return Kernel(fn, 3, (f"E(2) reduction, delta={delta:g}",))


def e2_reduced_kernel(pair, params: SphereKernelParams | None = None) -> complex:
    """Scalar E(2) kernel on ``(a, b, c)`` triples.

    ``params.eta`` is used when it is a ``SurfaceConstantFiducial``;
    otherwise the default surface-constant fiducial is built.
    """
    params = params or SphereKernelParams()
    eta = params.eta if isinstance(params.eta, SurfaceConstantFiducial) else SurfaceConstantFiducial()
    return e2_kernel(params.delta, eta, params.quadrature)(*pair)


def e2_reproduce_residual(delta: float, pair, eta: SurfaceConstantFiducial | None = None,
                          rule: PolarRule | None = None, c_order: int = 64) -> float:
    """``|K(y'',y') − M ∫ K(y'',y) K(y,y') da db dc|`` with ``M = 1/(2π)²``.

    The ``a, b`` integrals give ``(2π)² δ²(x − x̃)``; the remaining ``c``
    integral of ``|η(r, φ − c)|²`` is done by Gauss-Legendre at every node.
    """
    eta = eta or SurfaceConstantFiducial()
    rule = rule or PolarRule()
    M = 1.0 / (2 * np.pi) ** 2
    y2, y1 = (np.atleast_2d(np.asarray(x, dtype=float)) for x in pair)
    r, wr, phi, wp = _polar_grid(delta, rule)
    c, wc = gauss_legendre(0.0, 2 * np.pi, 4, c_order)
    total = 0j
    for ri, wri in zip(r, wr):
        ang = np.array([np.sum(wc * np.abs(eta(np.full_like(c, ri), p - c)) ** 2) for p in phi])
        a2, b2, c2 = y2[0]
        a1, b1, c1 = y1[0]
        f = (np.conj(eta(np.full_like(phi, ri), phi - c2))
             * np.exp(-1j * ((a2 - a1) * ri * np.cos(phi) + (b2 - b1) * ri * np.sin(phi)))
             * eta(np.full_like(phi, ri), phi - c1))
        total += wri * ri * np.sum(wp * f * ang)
    reproduced = (2 * np.pi) ** 2 * M * total
    direct = e2_kernel(delta, eta, rule).matrix(y2, y1)[0, 0]
    return float(abs(direct - reproduced))


@dataclass(frozen=True)
class GaussianBump:
    """``ζ(r) ∝ exp(−(r−1)²/(2w²))`` normalized so that ``∫|ζ|² r^{J−1} dr = 1``."""

    width: float
    J: int = 2

    def _support(self):
        return max(1e-9, 1 - 10 * self.width), 1 + 10 * self.width

    def _raw(self, r):
        return np.exp(-((r - 1) ** 2) / (2 * self.width**2))

    def norm2(self, panels: int = 8, order: int = 32) -> float:
        lo, hi = self._support()
        r, w = gauss_legendre(lo, hi, panels, order)
        return float(np.sum(w * self._raw(r) ** 2 * r ** (self.J - 1)))

    def __call__(self, r):
        return self._raw(np.asarray(r, dtype=float)) / np.sqrt(self.norm2())

    def support(self):
        return self._support()


def radial_normalization(zeta, J: int, support=(1e-9, 3.0), panels: int = 16, order: int = 32) -> float:
    r, w = gauss_legendre(*support, panels, order)
    return float(np.sum(w * np.abs(zeta(r)) ** 2 * r ** (J - 1)))


def hypersphere_kernel(zeta, J: int = 2, eta=None, support=None,
                       radial_order: int = 48, angular: int = 128) -> Kernel:
    """Second-class kernel ``∫ dΩ(γ) conj(F''(γ)) F'(γ)``.

    ``F(γ) = ∫_0^∞ ζ*(s) e^{is p·γ} η(sγ − q) s^{J−1} ds``; this is the
    ``2δ(1−γ²)`` surface measure written as a solid-angle integral.

    Raises
    ------
    ContractError
        If ``∫|ζ|² r^{J−1} dr`` differs from 1 by more than 1e-8.
    """
    eta = eta or GaussianFiducial()
    support = support or (zeta.support() if hasattr(zeta, "support") else (1e-9, 3.0))
    nrm = radial_normalization(zeta, J, support)
    if abs(nrm - 1) > 1e-8:
        raise ContractError(f"radial profile has norm {nrm:.10f}, expected 1")
    r, wr = gauss_legendre(*support, 4, max(4, radial_order // 4))
    dirs, wd = _directions(J, angular)
    zr = np.conj(zeta(r)) * wr * r ** (J - 1)

    def F(x):
        p, q = x[:, :J], x[:, J:]
        # shape (labels, directions, radii)
        pts = r[None, None, :, None] * dirs[None, :, None, :]
        ph = np.exp(1j * r[None, None, :] * (p @ dirs.T)[:, :, None])
        et = eta(pts - q[:, None, None, :])
        return np.sum(zr[None, None, :] * ph * et, axis=-1)

    def fn(x2, x1):
        return (np.conj(F(x2)) * wd) @ F(x1).T

    return Kernel(fn, 2 * J, ("second-class radial profile",))


def hypersphere_reproduce_residual(kernel_zeta, pair, J: int = 2, eta=None, half_width: float = 8.0,
                                   radial_order: int = 48, angular: int = 128) -> float:
    """Reproducing residual of the second-class kernel.

    The momentum integral collapses the product to
    ``∫ dΩ conj(F''(γ)) F'(γ) · ∫|ζ(r)|² N(rγ) r^{J−1} dr`` with
    ``N(x) = ∫|η(x − q)|² d^Jq`` computed over a ``q`` box.
    """
    zeta = kernel_zeta
    eta = eta or GaussianFiducial()
    support = zeta.support() if hasattr(zeta, "support") else (1e-9, 3.0)
    K = hypersphere_kernel(zeta, J, eta, support, radial_order, angular)
    x2, x1 = (np.atleast_2d(np.asarray(x, dtype=float)) for x in pair)
    r, wr = gauss_legendre(*support, 4, max(4, radial_order // 4))
    dirs, wd = _directions(J, angular)
    zr = np.conj(zeta(r)) * wr * r ** (J - 1)
    pts = r[None, :, None] * dirs[:, None, :]

    def F(x):
        p, q = x[0, :J], x[0, J:]
        ph = np.exp(1j * r[None, :] * (dirs @ p)[:, None])
        return np.sum(zr[None, :] * ph * eta(pts - q), axis=-1)

    # radial weight per direction: ∫|ζ|² N(rγ) r^{J−1} dr
    marg = position_marginal(eta, pts.reshape(-1, J), half_width).reshape(pts.shape[:2])
    radial = np.sum(np.abs(zeta(r)) ** 2 * wr * r ** (J - 1) * marg, axis=1)
    reproduced = np.sum(wd * np.conj(F(x2)) * F(x1) * radial)
    return float(abs(K.matrix(x2, x1)[0, 0] - reproduced))


def hypersphere_second_class_kernel(pair, zeta=None, J: int = 2, delta: float = 0.1) -> complex:
    """Scalar second-class kernel; ``ζ`` defaults to a bump of width ``δ/2``."""
    zeta = zeta or GaussianBump(delta / 2, J)
    return hypersphere_kernel(zeta, J)(*pair)
