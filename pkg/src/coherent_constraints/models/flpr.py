"""Three degrees of freedom with a rotation-plus-translation constraint.

Two oscillators (standard ``|z>`` states) carry the angular momentum
``L₃ = Q₁P₂ − Q₂P₁``; a free particle carries ``P₃``.  The constraint is
``Φ = g L₃ + P₃`` and ``H = H₀ + P₃²/2`` with ``H₀ = ω(n₁ + n₂)``.  Since
``L₃`` has integer spectrum the projector factorizes into a sum over ``m`` of
``E(L₃ = m) ⊗ E(−δ − gm < P₃ < δ − gm)``.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from ..bessel import bessel_i_all
from ..coherent import CoherentLabel, PhaseConvention, auto_levels, coherent_vector, poisson_tail
from ..errors import ConfigurationError, ContractError, TruncationError
from ..fock import OperatorMatrix, TruncationSpec, build_canonical_ops, hermitian_eig, occupations
from ..projector import group_average_u1
from ..propagator import LambdaSchedule
from ..quadrature import gauss_legendre


@dataclass(frozen=True)
class FLPRParams:
    """Coupling ``g``, oscillator frequency ``ω``, window ``δ`` and the ``m`` range."""

    g: float = 1.0
    omega: float = 1.0
    delta: float = 0.05
    m_cutoff: int = 12

    def __post_init__(self):
        if not (self.g > 0 and self.omega > 0 and self.delta > 0):
            raise ConfigurationError("g, omega and delta must be positive")
        if not self.delta < self.g / 10:
            raise ConfigurationError(f"delta={self.delta} must be below g/10={self.g / 10}")
        if int(self.m_cutoff) != self.m_cutoff or self.m_cutoff < 1:
            raise ConfigurationError("m_cutoff must be a positive integer")


@dataclass(frozen=True)
class FLPRLabel:
    """``(z₁, z₂)`` for the oscillators and ``(p₃, q₃)`` for the free particle."""

    z1: complex
    z2: complex
    p3: float
    q3: float

    @property
    def oscillators(self) -> CoherentLabel:
        return CoherentLabel.from_z([self.z1, self.z2], PhaseConvention.ALPHA_PQ_HALF)

    @property
    def w_plus(self) -> complex:
        return (self.z1 - 1j * self.z2) / np.sqrt(2)

    @property
    def w_minus(self) -> complex:
        return (self.z1 + 1j * self.z2) / np.sqrt(2)


def _m_range(params: FLPRParams):
    return np.arange(-params.m_cutoff, params.m_cutoff + 1)


def _window_gauss_bound(m, params, l2, l1):
    # max over the k-window of π^{-1/2} exp[−½(k−p'')² − ½(k−p')²], times its width
    lo, hi = -params.delta - params.g * m, params.delta - params.g * m
    kstar = np.clip(0.5 * (l2.p3 + l1.p3), lo, hi)
    expo = -0.5 * (kstar - l2.p3) ** 2 - 0.5 * (kstar - l1.p3) ** 2
    return 2 * params.delta / np.sqrt(np.pi) * np.exp(expo)


def dropped_m_bound(params: FLPRParams, l2: FLPRLabel, l1: FLPRLabel) -> float:
    """Upper bound on the terms with ``|m| > m_cutoff``.

    The oscillator factor is at most 1 in modulus, so the Gaussian window
    weights bound each dropped term.
    """
    ms = np.arange(params.m_cutoff + 1, params.m_cutoff + 400)
    return float(sum(_window_gauss_bound(s * ms, params, l2, l1).sum() for s in (1, -1)))


def _check_cutoff(params, l2, l1):
    bound = dropped_m_bound(params, l2, l1)
    if bound > 1e-12:
        raise TruncationError(f"m_cutoff={params.m_cutoff} drops terms up to {bound:.2e}")
    return bound


def oscillator_factors(l2: FLPRLabel, l1: FLPRLabel, ms, omega: float, T: float) -> np.ndarray:
    """``<z''|e^{-iH₀T} E(L₃=m)|z'>`` in closed form for each ``m``.

    With ``A = w̄₊''w₊' e^{-iωT}`` and ``B = w̄₋''w₋' e^{-iωT}`` the sector sum is
    ``(A/B)^{m/2} I_m(2√(AB))``, evaluated as ``A^m I_m(2s)/s^m`` (``m ≥ 0``)
    or ``B^{|m|} I_{|m|}(2s)/s^{|m|}`` (``m < 0``) with ``s = √(AB)``; both
    are even in ``s``, so the branch of the root is irrelevant.
    """
    phase = np.exp(-1j * omega * T)
    A = np.conj(l2.w_plus) * l1.w_plus * phase
    B = np.conj(l2.w_minus) * l1.w_minus * phase
    norm = np.exp(-0.5 * (abs(l2.z1) ** 2 + abs(l2.z2) ** 2 + abs(l1.z1) ** 2 + abs(l1.z2) ** 2))
    ms = np.asarray(ms)
    mmax = int(np.max(np.abs(ms)))
    s = np.sqrt(A * B)
    out = np.empty(ms.size, dtype=complex)
    if abs(s) < 1e-3:
        # short series Σ_n (AB)^n / (n!(n+|m|)!) avoids 0/0 in I_m(2s)/s^m
        for i, m in enumerate(ms):
            c = A ** m if m >= 0 else B ** (-m)
            am = abs(int(m))
            out[i] = c * sum((A * B) ** n / (math.factorial(n) * math.factorial(n + am)) for n in range(8))
    else:
        iv = bessel_i_all(mmax, 2 * s)
        for i, m in enumerate(ms):
            am = abs(int(m))
            c = A ** am if m >= 0 else B ** am
            out[i] = c * iv[am] / s ** am
    return norm * out


def _third_factor_exact(l2, l1, lo, hi, T):
    """``π^{-1/2}∫_lo^hi exp[−½(k−p'')² − ½(k−p')² + ik(q''−q') − ik²T/2] dk`` via erf."""
    a = 1 + 0.5j * T
    b = l2.p3 + l1.p3 + 1j * (l2.q3 - l1.q3)
    c = -0.5 * (l2.p3**2 + l1.p3**2)
    ra = np.sqrt(a)
    centre = b / (2 * a)
    pref = 0.5 / ra * np.exp(b * b / (4 * a) + c)
    return pref * (special.erf(ra * (hi - centre)) - special.erf(ra * (lo - centre)))


def _third_factor_leading(l2, l1, m, params, T):
    dq = l2.q3 - l1.q3
    x = params.delta * dq
    sinc = 1 - x * x / 6 if abs(x) < 1e-4 else np.sin(x) / x
    gm = params.g * m
    return (np.exp(-0.5 * (gm + l2.p3) ** 2 - 0.5 * (gm + l1.p3) ** 2 - 0.5j * gm**2 * T - 1j * gm * dq)
            * 2 * params.delta * sinc / np.sqrt(np.pi))


def flpr_closed(l2: FLPRLabel, l1: FLPRLabel, params: FLPRParams, T: float, leading: bool = False) -> complex:
    """Closed-form projected propagator as a sum over ``L₃ = m``.

    The oscillator factor is the Bessel expression.  The free-particle
    factor is the Gaussian window integral in closed form (complex erf); with
    ``leading=True`` it is replaced by its small-``δ`` form
    ``e^{−½(gm+p₃'')² − ½(gm+p₃')² − ig²m²T/2 − igm(q₃''−q₃')} · 2 sin[δ(q₃''−q₃')]/(√π(q₃''−q₃'))``.
    """
    _check_cutoff(params, l2, l1)
    ms = _m_range(params)
    osc = oscillator_factors(l2, l1, ms, params.omega, T)
    if leading:
        third = np.array([_third_factor_leading(l2, l1, m, params, T) for m in ms])
    else:
        third = np.array([_third_factor_exact(l2, l1, -params.delta - params.g * m,
                                              params.delta - params.g * m, T) for m in ms])
    return complex(np.sum(osc * third))


@dataclass(frozen=True, eq=False)
class SectorSpace:
    """Two-mode number states with ``n₁ + n₂ < N``.

    Both ``L₃`` and ``n₁ + n₂`` preserve total excitation, so restricting to
    complete sectors keeps their matrices exact: ``L₃`` has integer spectrum
    there, unlike on the square ``N × N`` grid.
    """

    spec: TruncationSpec
    index: np.ndarray
    L3: OperatorMatrix
    number: OperatorMatrix

    @property
    def dim(self) -> int:
        return self.index.size


@functools.lru_cache(maxsize=8)
def sector_space(levels: int) -> SectorSpace:
    spec = TruncationSpec(2, levels)
    occ = occupations(spec)
    idx = np.flatnonzero(occ.sum(axis=0) < levels)
    ops = build_canonical_ops(spec)
    a1, a2 = ops[0].a.entries, ops[1].a.entries
    hop = a1.conj().T @ a2
    L3 = -1j * (hop - hop.conj().T)
    sub = np.ix_(idx, idx)
    return SectorSpace(spec, idx,
                       OperatorMatrix(L3[sub], hermitian=True, label="L3"),
                       OperatorMatrix(np.diag(occ.sum(axis=0)[idx]).astype(complex), hermitian=True,
                                      label="n1+n2"))


def _auto_sector_levels(labels) -> int:
    total = max(abs(l.z1) ** 2 + abs(l.z2) ** 2 for l in labels)
    n = auto_levels([l.oscillators for l in labels], tol=1e-12)
    while poisson_tail(math.sqrt(total), n) > 1e-14:
        n += 4
    return n


def _sector_vector(lab: FLPRLabel, space: SectorSpace) -> np.ndarray:
    full = coherent_vector(lab.oscillators, space.spec)
    v = full[space.index]
    lost = 1 - np.vdot(v, v).real
    if lost > 1e-12:
        raise TruncationError(f"sector truncation loses weight {lost:.2e}",
                              suggested_levels=space.spec.levels_per_mode + 8)
    return v


def sector_projectors(space: SectorSpace, ms) -> dict:
    """``E(L₃ = m)`` on the sector space, by group averaging over ``2π``."""
    return {int(m): group_average_u1(space.L3, 2 * np.pi, level=float(m)) for m in ms}


def _third_factor_quadrature(l2, l1, lo, hi, T, order=40):
    k, w = gauss_legendre(lo, hi, 1, order)
    f = np.exp(-0.5 * (k - l2.p3) ** 2 - 0.5 * (k - l1.p3) ** 2 + 1j * k * (l2.q3 - l1.q3)
               - 0.5j * k * k * T)
    return np.sum(w * f) / np.sqrt(np.pi)


def _mom_amplitude(lab, k):
    # <k|p,q> for the α = 0 ground-state coherent state
    return np.pi ** -0.25 * np.exp(-1j * k * lab.q3 - 0.5 * (k - lab.p3) ** 2)


def flpr_numeric(l2: FLPRLabel, l1: FLPRLabel, params: FLPRParams, T: float, route: str = "exact",
                 schedule: LambdaSchedule | None = None, levels: int | None = None,
                 order: int = 40) -> complex:
    """Factorized numeric propagator.

    ``route="exact"`` sums ``<z''|e^{-iH₀T}E(L₃=m)|z'>`` (Fock matrices) times
    a Gauss-Legendre ``k`` integral over each window.  ``route="scheduled"``
    instead runs the lattice ``Π_l e^{-iεH} e^{-iελ_l Φ}`` on the projected
    initial state, slice by slice, with ``schedule`` (zero if omitted).
    """
    if route not in ("exact", "scheduled"):
        raise ContractError("route must be 'exact' or 'scheduled'")
    _check_cutoff(params, l2, l1)
    levels = levels or _auto_sector_levels([l2, l1])
    space = sector_space(levels)
    v2, v1 = _sector_vector(l2, space), _sector_vector(l1, space)
    ms = [m for m in _m_range(params) if abs(m) < levels]
    projs = sector_projectors(space, ms)
    H0 = OperatorMatrix(params.omega * space.number.entries, hermitian=True, label="H0")
    if route == "exact":
        wh, vh = hermitian_eig(H0)
        u = (vh.entries * np.exp(-1j * T * wh)) @ vh.entries.conj().T
        total = 0j
        for m in ms:
            osc = np.vdot(v2, u @ (projs[m].matrix.entries @ v1))
            total += osc * _third_factor_quadrature(l2, l1, -params.delta - params.g * m,
                                                    params.delta - params.g * m, T, order)
        return complex(total)
    states = _scheduled_states(v1, l1, space, projs, H0, params, T, schedule, order)
    total = 0j
    for m, (x, k, wk, y) in states.items():
        total += np.vdot(v2, x) * np.sum(wk * np.conj(_mom_amplitude(l2, k)) * y)
    return complex(total)


def _scheduled_states(v1, l1, space, projs, H0, params, T, schedule, order):
    """Evolve each ``E(L₃=m)⊗window`` component of ``E|v'>`` through the lattice."""
    if schedule is None:
        schedule = LambdaSchedule.zeros(64)
    if schedule.values.shape[1] != 1:
        raise ContractError("the constraint is a single operator")
    eps = schedule.convention.epsilon(T, schedule.slices)
    wh, vh = hermitian_eig(H0)
    wl, vl = hermitian_eig(space.L3)
    vh, vl = vh.entries, vl.entries
    out = {}
    for m, proj in projs.items():
        x = proj.matrix.entries @ v1
        lo, hi = -params.delta - params.g * m, params.delta - params.g * m
        k, wk = gauss_legendre(lo, hi, 1, order)
        y = _mom_amplitude(l1, k)
        for (lam,) in schedule.values:
            x = vl @ (np.exp(-1j * eps * lam * params.g * wl) * (vl.conj().T @ x))
            x = vh @ (np.exp(-1j * eps * wh) * (vh.conj().T @ x))
            y = y * np.exp(-1j * eps * lam * k - 0.5j * eps * k * k)
        out[m] = (x, k, wk, y)
    return out


def flpr_gauge_leakage(l2: FLPRLabel, l1: FLPRLabel, params: FLPRParams, T: float,
                       schedules, levels: int | None = None, order: int = 40) -> dict:
    """Schedule dependence of the lattice propagator.

    Returns the largest state-level deviation
    ``‖(Π_a − Π_b) E|v'>‖ / ‖E|v'>‖`` between pairs of schedules and the
    largest matrix-element deviation ``|<v''|(Π_a − Π_b)E|v'>|`` divided by
    the modulus of the projected propagator.
    """
    levels = levels or _auto_sector_levels([l2, l1])
    space = sector_space(levels)
    v2, v1 = _sector_vector(l2, space), _sector_vector(l1, space)
    ms = [m for m in _m_range(params) if abs(m) < levels]
    projs = sector_projectors(space, ms)
    H0 = OperatorMatrix(params.omega * space.number.entries, hermitian=True, label="H0")
    runs = [_scheduled_states(v1, l1, space, projs, H0, params, T, s, order) for s in schedules]

    def element(states):
        return sum(np.vdot(v2, x) * np.sum(wk * np.conj(_mom_amplitude(l2, k)) * y)
                   for x, k, wk, y in states.values())

    def norm2(states_a, states_b=None):
        tot = 0.0
        for m, (x, k, wk, y) in states_a.items():
            if states_b is None:
                tot += np.vdot(x, x).real * np.sum(wk * np.abs(y) ** 2)
            else:
                xb, _, _, yb = states_b[m]
                # |x⊗y − xb⊗yb|² = |x|²|y|² + |xb|²|yb|² − 2 Re(<x|xb><y|yb>)
                tot += (np.vdot(x, x).real * np.sum(wk * abs(y) ** 2)
                        + np.vdot(xb, xb).real * np.sum(wk * abs(yb) ** 2)
                        - 2 * (np.vdot(x, xb) * np.sum(wk * np.conj(y) * yb)).real)
        return max(tot, 0.0)

    ref_norm = math.sqrt(norm2(runs[0]))
    values = [element(r) for r in runs]
    scale = max(abs(v) for v in values)
    state_dev = max(math.sqrt(norm2(a, b)) for i, a in enumerate(runs) for b in runs[i + 1:])
    elem_dev = max(abs(a - b) for i, a in enumerate(values) for b in values[i + 1:])
    return {"state": state_dev / ref_norm, "element": elem_dev / scale, "values": values}
