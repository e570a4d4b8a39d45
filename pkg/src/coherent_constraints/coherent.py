"""Canonical coherent states in a truncated Fock space.

States are built literally as ``e^{iα} e^{-i q·P} e^{i p·Q} |η>`` with the
truncated ``Q`` and ``P``; closed-form amplitudes and overlaps serve as the
independent check.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass

import numpy as np

from .errors import ContractError, TruncationError
from .fock import (
    DEFAULT_MAX_DIM,
    TruncationSpec,
    as_array,
    build_canonical_ops,
    hermitian_eig,
    matrix_exp_skewh,
    propagate_eig,
)
from .quadrature import gauss_legendre, refine_until


class PhaseConvention(enum.Enum):
    ALPHA_ZERO = "alpha_zero"        # α = 0
    ALPHA_PQ = "alpha_pq"            # α = p·q, gives <x|p,q> = e^{ipx} η(x-q)
    ALPHA_PQ_HALF = "alpha_pq_half"  # α = p·q/2, the standard |z> states

    def phase(self, p, q) -> float:
        pq = float(np.dot(p, q))
        if self is PhaseConvention.ALPHA_ZERO:
            return 0.0
        if self is PhaseConvention.ALPHA_PQ:
            return pq
        return 0.5 * pq


@dataclass(frozen=True)
class CoherentLabel:
    """Phase-space point ``(p, q)`` with one entry per mode."""

    p: tuple
    q: tuple
    convention: PhaseConvention = PhaseConvention.ALPHA_ZERO

    def __post_init__(self):
        p = tuple(float(x) for x in np.atleast_1d(self.p))
        q = tuple(float(x) for x in np.atleast_1d(self.q))
        if len(p) != len(q):
            raise ContractError("p and q must have the same length")
        if not all(math.isfinite(x) for x in p + q):
            raise ContractError("coherent label entries must be finite")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    @classmethod
    def from_z(cls, z, convention=PhaseConvention.ALPHA_PQ_HALF) -> "CoherentLabel":
        """Label with ``z_j = (q_j + i p_j)/√2``."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        return cls(tuple(np.sqrt(2) * z.imag), tuple(np.sqrt(2) * z.real), convention)

    @property
    def modes(self) -> int:
        return len(self.p)

    @property
    def z(self) -> np.ndarray:
        return (np.asarray(self.q) + 1j * np.asarray(self.p)) / np.sqrt(2)

    @property
    def alpha(self) -> float:
        return self.convention.phase(self.p, self.q)

    def with_convention(self, convention) -> "CoherentLabel":
        return CoherentLabel(self.p, self.q, convention)


def label(p, q, convention=PhaseConvention.ALPHA_ZERO) -> CoherentLabel:
    return CoherentLabel(p, q, convention)


@functools.lru_cache(maxsize=64)
def _single_mode_eig(levels: int):
    spec = TruncationSpec(1, levels, max_dim=max(levels, DEFAULT_MAX_DIM))
    ops = build_canonical_ops(spec)[0]
    wq, vq = hermitian_eig(ops.Q)
    wp, vp = hermitian_eig(ops.P)
    return wq, vq.entries, wp, vp.entries


def _single_mode_vector(p: float, q: float, levels: int) -> np.ndarray:
    wq, vq, wp, vp = _single_mode_eig(levels)
    v = np.zeros(levels, dtype=complex)
    v[0] = 1.0
    v = propagate_eig(wq, vq, -p) @ v      # e^{ipQ}
    return propagate_eig(wp, vp, q) @ v    # e^{-iqP}


def fock_amplitudes(lab: CoherentLabel, levels: int) -> np.ndarray:
    """Closed-form number-basis amplitudes of a ground-state coherent vector.

    Uses ``|p,q> = e^{iα - i p·q/2} |z>`` and ``<n|z> = e^{-|z|²/2} z^n/√n!``.
    Returns the tensor-product vector of length ``levels**J``.
    """
    out = np.ones(1, dtype=complex)
    for zj in lab.z:
        c = np.empty(levels, dtype=complex)
        c[0] = np.exp(-0.5 * abs(zj) ** 2)
        for n in range(1, levels):
            c[n] = c[n - 1] * zj / np.sqrt(n)
        out = np.kron(out, c)
    phase = lab.alpha - 0.5 * float(np.dot(lab.p, lab.q))
    return np.exp(1j * phase) * out


def poisson_tail(z_abs: float, levels: int) -> float:
    """Probability that a coherent state of amplitude ``|z|`` has ``n ≥ levels``."""
    from scipy.stats import poisson

    return float(poisson.sf(levels - 1, z_abs**2))


@functools.lru_cache(maxsize=256)
def _auto_levels_for(z_key: float, tol: float, cap: int) -> int:
    z_abs = z_key
    n = max(16, int(math.ceil(z_abs**2 + 8 * z_abs + 12)))
    r = np.sqrt(2) * z_abs
    probes = [CoherentLabel(r, 0.0), CoherentLabel(0.0, r), CoherentLabel(z_abs, z_abs)]
    origin = CoherentLabel(0.0, 0.0)
    while n <= cap:
        vac = _single_mode_vector(0.0, 0.0, n)
        ok = poisson_tail(z_abs, n) <= tol
        for probe in probes:
            v = _single_mode_vector(probe.p[0], probe.q[0], n)
            amp_err = np.max(np.abs(v - fock_amplitudes(probe, n)))
            ov_err = abs(np.vdot(v, vac) - overlap_closed(probe, origin))
            ok = ok and amp_err <= tol and ov_err <= tol
        if ok:
            return n
        n += 8
    raise TruncationError(
        f"no truncation up to {cap} levels reaches {tol:.1e} for |z| = {z_abs:.3g}",
        suggested_levels=n,
    )


def auto_levels(labels, tol: float = 1e-10, cap: int = 400) -> int:
    """Per-mode level count at which coherent vectors are accurate to ``tol``.

    The largest ``|z_j|`` over all labels and modes is probed; ``N`` grows in
    steps of 8 until the truncated vector matches its closed-form amplitudes
    and the overlap with the vacuum matches the closed-form overlap.
    """
    zmax = max(float(np.max(np.abs(lab.z))) for lab in labels)
    # bucket so nearby requests share the cached answer
    key = math.ceil(zmax * 4) / 4
    return _auto_levels_for(key, tol, cap)


def coherent_vector(lab: CoherentLabel, spec: TruncationSpec | None = None, fiducial=None) -> np.ndarray:
    """Number-basis vector of ``|p, q>`` for the label's phase convention.

    With the default ground-state fiducial the displacement factorizes over
    modes, and each mode uses ``exp(-iqP) exp(ipQ)`` of the truncated
    operators.  A custom ``fiducial`` (a normalized vector of length
    ``spec.dim``) is displaced with the full multi-mode operators.
    """
    if spec is None:
        spec = TruncationSpec(lab.modes, auto_levels([lab]))
    if spec.modes != lab.modes:
        raise ContractError(f"label has {lab.modes} modes, truncation has {spec.modes}")
    n = spec.levels_per_mode
    if fiducial is None:
        v = np.ones(1, dtype=complex)
        for pj, qj in zip(lab.p, lab.q):
            v = np.kron(v, _single_mode_vector(pj, qj, n))
    else:
        eta = np.asarray(fiducial, dtype=complex)
        if eta.shape != (spec.dim,) or abs(np.linalg.norm(eta) - 1) > 1e-10:
            raise ContractError("fiducial must be a normalized vector of length spec.dim")
        ops = build_canonical_ops(spec)
        pq = sum(pj * ops[j].Q.entries for j, pj in enumerate(lab.p))
        qp = sum(qj * ops[j].P.entries for j, qj in enumerate(lab.q))
        v = matrix_exp_skewh(qp, 1.0).entries @ (matrix_exp_skewh(pq, -1.0).entries @ eta)
    v = np.exp(1j * lab.alpha) * v
    tail = _edge_weight(v, spec)
    if tail > spec.tail_tolerance:
        z_abs = float(np.max(np.abs(lab.z)))
        raise TruncationError(
            f"edge weight {tail:.2e} exceeds tail tolerance {spec.tail_tolerance:.1e}",
            suggested_levels=_auto_levels_for(math.ceil(z_abs * 4) / 4, spec.tail_tolerance, 400),
        )
    return v


def _edge_weight(v, spec: TruncationSpec) -> float:
    """Probability carried by the top two levels of any mode."""
    n = spec.levels_per_mode
    if n < 4:
        return 0.0
    probs = np.abs(v.reshape((n,) * spec.modes)) ** 2
    total = 0.0
    for j in range(spec.modes):
        marginal = probs.sum(axis=tuple(k for k in range(spec.modes) if k != j))
        total += marginal[-2:].sum()
    return float(total)


def overlap_closed(l2: CoherentLabel, l1: CoherentLabel) -> complex:
    """Closed-form ``<p'',q''|p',q'>`` for ground-state fiducial, ``α = 0``.

    Product over modes of
    ``exp{i(p''+p')(q''-q')/2 - [(p''-p')² + (q''-q')²]/4}``.
    """
    for lab in (l2, l1):
        if lab.convention is not PhaseConvention.ALPHA_ZERO:
            raise ContractError("overlap_closed holds only for the alpha = 0 convention")
    if l2.modes != l1.modes:
        raise ContractError("labels have different numbers of modes")
    p2, q2, p1, q1 = map(np.asarray, (l2.p, l2.q, l1.p, l1.q))
    expo = 0.5j * np.sum((p2 + p1) * (q2 - q1)) - 0.25 * np.sum((p2 - p1) ** 2 + (q2 - q1) ** 2)
    return complex(np.exp(expo))


def expectation(vec, op) -> complex:
    vec = np.asarray(vec)
    return complex(np.vdot(vec, as_array(op) @ vec))


def one_form_check(lab: CoherentLabel, step: float, spec: TruncationSpec | None = None) -> np.ndarray:
    """Central-difference estimate of ``i<p,q| ∂/∂q^j |p,q>`` for each mode.

    For the ``α = 0`` convention this approaches ``p_j`` with ``O(h²)`` error.
    """
    if not 0 < step <= 0.1:
        raise ContractError("step must lie in (0, 0.1]")
    if spec is None:
        shifted = CoherentLabel(lab.p, tuple(np.asarray(lab.q) + step), lab.convention)
        spec = TruncationSpec(lab.modes, auto_levels([lab, shifted]))
    v0 = coherent_vector(lab, spec)
    out = np.empty(lab.modes)
    for j in range(lab.modes):
        q_plus = np.array(lab.q)
        q_minus = np.array(lab.q)
        q_plus[j] += step
        q_minus[j] -= step
        vp = coherent_vector(CoherentLabel(lab.p, tuple(q_plus), lab.convention), spec)
        vm = coherent_vector(CoherentLabel(lab.p, tuple(q_minus), lab.convention), spec)
        out[j] = (1j * np.vdot(v0, (vp - vm) / (2 * step))).real
    return out


def resolution_of_unity(half_width: float, levels: int, tol: float = 1e-7, panels: int = 4,
                        order: int = 16, center=(0.0, 0.0)):
    """Quadrature of ``∫ |p,q><p,q| dp dq / 2π`` over a square, one mode.

    Returns the ``levels × levels`` block in the number basis.  The panel
    count doubles until successive blocks differ by less than ``tol``.
    """

    def block(n_panels):
        pn, pw = gauss_legendre(center[0] - half_width, center[0] + half_width, n_panels, order)
        qn, qw = gauss_legendre(center[1] - half_width, center[1] + half_width, n_panels, order)
        pp, qq = np.meshgrid(pn, qn, indexing="ij")
        ww = np.outer(pw, qw).ravel() / (2 * np.pi)
        z = (qq.ravel() + 1j * pp.ravel()) / np.sqrt(2)
        # |p,q><p,q| = |z><z|, the convention phase cancels
        amps = np.empty((z.size, levels), dtype=complex)
        amps[:, 0] = np.exp(-0.5 * np.abs(z) ** 2)
        for n in range(1, levels):
            amps[:, n] = amps[:, n - 1] * z / np.sqrt(n)
        return (amps.T * ww) @ amps.conj()

    value, _, _ = refine_until(block, panels, tol, what="resolution of unity")
    return value
