"""Constrained propagators by operator formulas and time lattices.

All routes evaluate a matrix element ``<v''| ... |v'>`` between two vectors
of the truncated space.  Vectors may be given as ``CoherentLabel`` objects
(built in the truncation implied by the Hamiltonian's dimension) or as
plain arrays.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .coherent import CoherentLabel, _edge_weight, coherent_vector
from .errors import ContractError, StatisticalError
from .fock import DEFAULT_MAX_DIM, OperatorMatrix, TruncationSpec, as_array, hermitian_eig, propagate_eig
from .projector import ConstraintSpec, SincQuadrature, sinc_weight_truncated, sinc_weights, weyl_integral_projector


class LatticeConvention(enum.Enum):
    EPS_T_OVER_N = "eps_T_over_N"                # N factors, ε = T/N
    EPS_T_OVER_N_PLUS_1 = "eps_T_over_N_plus_1"  # N+1 factors, ε = T/(N+1)

    def factors(self, slices: int) -> int:
        return slices if self is LatticeConvention.EPS_T_OVER_N else slices + 1

    def epsilon(self, T: float, slices: int) -> float:
        return T / self.factors(slices)


class PropagatorRoute(enum.Enum):
    EXACT_PROJECTED = "exact_projected"
    REDUCED_EVOLUTION = "reduced_evolution"
    TROTTER_INTERLEAVED = "trotter_interleaved"
    LAMBDA_SCHEDULED = "lambda_scheduled"
    LAMBDA_AVERAGED = "lambda_averaged"


@dataclass(frozen=True, eq=False)
class LambdaSchedule:
    """Piecewise-constant Lagrange multipliers on a time lattice.

    ``values`` has one row per lattice factor and one column per constraint:
    ``N`` rows for ``ε = T/N`` and ``N + 1`` rows for ``ε = T/(N+1)``.
    """

    slices: int
    values: np.ndarray
    seed: int = 0
    convention: LatticeConvention = LatticeConvention.EPS_T_OVER_N

    def __post_init__(self):
        if int(self.slices) != self.slices or self.slices < 1:
            raise ContractError("slices must be a positive integer")
        v = np.atleast_2d(np.asarray(self.values, dtype=float))
        if v.shape[0] != self.convention.factors(self.slices):
            raise ContractError(
                f"schedule needs {self.convention.factors(self.slices)} rows for "
                f"{self.convention.name}, got {v.shape[0]}"
            )
        if not np.all(np.isfinite(v)):
            raise ContractError("schedule entries must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def zeros(cls, slices: int, constraints: int = 1,
              convention: LatticeConvention = LatticeConvention.EPS_T_OVER_N) -> "LambdaSchedule":
        return cls(slices, np.zeros((convention.factors(slices), constraints)), 0, convention)

    @classmethod
    def random(cls, slices: int, constraints: int, seed: int, scale: float = 1.0,
               convention: LatticeConvention = LatticeConvention.EPS_T_OVER_N,
               smooth: bool = False) -> "LambdaSchedule":
        """Seeded schedule with entries of size ``scale``.

        With ``smooth`` the values follow a few random Fourier modes in time
        instead of being independent per slice.
        """
        rng = np.random.default_rng(seed)
        rows = convention.factors(slices)
        if smooth:
            t = (np.arange(rows) + 0.5) / rows
            coef = rng.normal(size=(3, constraints))
            basis = np.stack([np.ones_like(t), np.cos(np.pi * t), np.sin(2 * np.pi * t)], axis=1)
            vals = scale * basis @ coef
        else:
            vals = scale * rng.uniform(-1.0, 1.0, size=(rows, constraints))
        return cls(slices, vals, seed, convention)


@dataclass(frozen=True)
class PropagatorResult:
    """Complex matrix element with the route and an error budget.

    ``residual_budget`` bounds the truncation and round-off contribution (or
    the Monte Carlo standard error for sampled averages).
    """

    value: complex
    route: PropagatorRoute
    truncation: TruncationSpec | None
    residual_budget: float
    details: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not self.residual_budget >= 0:
            raise ContractError("residual_budget must be nonnegative")

    def __complex__(self):
        return complex(self.value)


def _vector(item, dim: int):
    if isinstance(item, CoherentLabel):
        levels = round(dim ** (1.0 / item.modes))
        if levels**item.modes != dim:
            raise ContractError(f"dimension {dim} is not a {item.modes}-mode tensor power")
        spec = TruncationSpec(item.modes, levels, max_dim=max(dim, DEFAULT_MAX_DIM))
        v = coherent_vector(item, spec)
        return v, spec, _edge_weight(v, spec)
    v = np.asarray(item, dtype=complex)
    if v.shape != (dim,):
        raise ContractError(f"state vector must have shape ({dim},), got {v.shape}")
    return v, None, 0.0


def _states(labels, dim):
    if len(labels) != 2:
        raise ContractError("labels must be a pair (final, initial)")
    v2, spec2, t2 = _vector(labels[0], dim)
    v1, spec1, t1 = _vector(labels[1], dim)
    budget = math.sqrt(t2) + math.sqrt(t1) + 1e-13 * dim
    return v2, v1, spec2 or spec1, budget


class _Evolver:
    """Applies ``e^{-iεH}`` to vectors in the eigenbasis of ``H``."""

    def __init__(self, H, eps: float):
        w, v = hermitian_eig(H)
        self.v = v.entries
        self.vh = self.v.conj().T
        self.phase = np.exp(-1j * eps * w)

    def __call__(self, x):
        return self.v @ (self.phase * (self.vh @ x))


def _check_dims(H, E):
    if as_array(H).shape != as_array(E).shape:
        raise ContractError("Hamiltonian and projector dimensions differ")
    return as_array(H).shape[0]


def exact_projected(labels, H, E, T: float) -> PropagatorResult:
    """``<v''| e^{-iTH} E |v'>`` through the eigendecomposition of ``H``."""
    dim = _check_dims(H, E)
    v2, v1, spec, budget = _states(labels, dim)
    val = np.vdot(v2, _Evolver(H, T)(as_array(E) @ v1))
    return PropagatorResult(complex(val), PropagatorRoute.EXACT_PROJECTED, spec, budget)


def reduced_evolution(labels, H, E, T: float) -> PropagatorResult:
    """``<v''| E e^{-iT·EHE} E |v'>``: evolution generated inside the range of ``E``."""
    dim = _check_dims(H, E)
    v2, v1, spec, budget = _states(labels, dim)
    e, h = as_array(E), as_array(H)
    ehe = e @ h @ e
    val = np.vdot(e @ v2, _Evolver(0.5 * (ehe + ehe.conj().T), T)(e @ v1))
    return PropagatorResult(complex(val), PropagatorRoute.REDUCED_EVOLUTION, spec, budget)


def trotter_interleaved(labels, H, E, T: float, N: int,
                        convention: LatticeConvention = LatticeConvention.EPS_T_OVER_N) -> PropagatorResult:
    """``<v''| E (e^{-iεH} E)^K |v'>`` with ``K`` lattice factors of length ``ε``."""
    if int(N) != N or N < 1:
        raise ContractError("N must be a positive integer")
    dim = _check_dims(H, E)
    v2, v1, spec, budget = _states(labels, dim)
    k = convention.factors(N)
    eps = convention.epsilon(T, N)
    u = _Evolver(H, eps)
    e = as_array(E)
    x = e @ v1
    for _ in range(k):
        x = e @ u(x)
    return PropagatorResult(complex(np.vdot(v2, x)), PropagatorRoute.TROTTER_INTERLEAVED, spec,
                            budget * (1 + 1e-3 * k), {"factors": k, "epsilon": eps,
                                                      "convention": convention.value})


class _ConstraintExp:
    """``e^{-iε Σ λ_a Φ_a}`` for a slice; a single constraint reuses one eigenbasis."""

    def __init__(self, phis: ConstraintSpec):
        self.ops = [op.entries for op in phis.operators]
        self.single = None
        if len(self.ops) == 1:
            w, v = hermitian_eig(phis.operators[0])
            self.single = (w, v.entries, v.entries.conj().T)

    def apply(self, lam, eps, x):
        if self.single is not None:
            w, v, vh = self.single
            return v @ (np.exp(-1j * eps * lam[0] * w) * (vh @ x))
        gen = sum(l * op for l, op in zip(lam, self.ops))
        w, v = hermitian_eig(gen)
        return propagate_eig(w, v.entries, eps) @ x


def lambda_scheduled(labels, H, phis: ConstraintSpec, sched: LambdaSchedule, E, T: float,
                     placement: str = "initial") -> PropagatorResult:
    """Time-ordered lattice with Lagrange-multiplier factors.

    ``placement="initial"`` evaluates
    ``<v''| Π_l e^{-iεH} e^{-iελ_l·Φ} · E |v'>`` (later slices to the left);
    ``placement="final"`` moves the ``E`` to the left end instead.
    """
    if placement not in ("initial", "final"):
        raise ContractError("placement must be 'initial' or 'final'")
    dim = _check_dims(H, E)
    if phis.dim != dim:
        raise ContractError("constraint and Hamiltonian dimensions differ")
    if sched.values.shape[1] != len(phis.operators):
        raise ContractError("schedule has a different number of constraints")
    v2, v1, spec, budget = _states(labels, dim)
    eps = sched.convention.epsilon(T, sched.slices)
    u = _Evolver(H, eps)
    cexp = _ConstraintExp(phis)
    e = as_array(E)
    x = e @ v1 if placement == "initial" else v1
    for lam in sched.values:
        x = u(cexp.apply(lam, eps, x))
    if placement == "final":
        x = e @ x
    return PropagatorResult(complex(np.vdot(v2, x)), PropagatorRoute.LAMBDA_SCHEDULED, spec,
                            budget * (1 + 1e-3 * sched.values.shape[0]),
                            {"placement": placement, "seed": sched.seed,
                             "convention": sched.convention.value})


@dataclass(frozen=True)
class SincWeight:
    """Per-slice weight ``f(ελ) = sin(δελ)/(πελ)`` for one constraint."""

    delta: float
    quad: SincQuadrature = SincQuadrature()

    def averaged(self, phis: ConstraintSpec) -> np.ndarray:
        if len(phis.operators) != 1:
            raise ContractError("the sinc weight applies to a single constraint")
        w, v = hermitian_eig(phis.operators[0])
        weights, _ = sinc_weights(w, self.delta, self.quad)
        return (v.entries * weights) @ v.entries.conj().T

    def total_weight(self) -> float:
        from .projector import sinc_total_weight

        return sinc_total_weight(self.delta)


@dataclass(frozen=True)
class WeylGaussianWeight:
    """Gaussian weight ``e^{-(λ²+ξ²)/4}/2π`` on the two multipliers of ``P − p₀``, ``Q − q₀``.

    The averaged slice factor is the rank-one projector onto ``|p₀,q₀>``.
    """

    target: CoherentLabel
    half_width: float = 12.0

    def averaged(self, phis: ConstraintSpec) -> np.ndarray:
        return weyl_integral_projector(self.target, phis.dim, self.half_width).entries


@dataclass(frozen=True)
class LambdaMeasure:
    """Menu of multiplier measures for the averaged lattice.

    ``kind`` is ``"single_slice"`` (weight on slice ``slice_index`` only,
    point mass at zero elsewhere), ``"every_slice"`` (weight on every slice,
    with the boundary projector on the final end) or ``"monte_carlo"``
    (uniform sampling of the single-slice sinc weight on ``[-Ξ, Ξ]``).
    """

    kind: str
    weight: object
    slice_index: int = 0
    samples: int = 200_000
    seed: int = 0
    xi_max: float = 64.0
    max_stderr: float = 0.05

    def __post_init__(self):
        if self.kind not in ("single_slice", "every_slice", "monte_carlo"):
            raise ContractError(f"unknown measure kind {self.kind!r}")
        if self.kind == "monte_carlo" and not isinstance(self.weight, SincWeight):
            raise ContractError("Monte Carlo sampling is implemented for the sinc weight")


def _mc_single_slice(v2, v1, H, phis, measure: LambdaMeasure, T, N, convention):
    # ⟨v''| e^{-i(T-t_l)H} e^{-ixΦ} e^{-i t_l H} |v'⟩ for the chosen slice
    k = convention.factors(N)
    eps = convention.epsilon(T, N)
    if not 0 <= measure.slice_index < k:
        raise ContractError("slice_index outside the lattice")
    wh, vh = hermitian_eig(H)
    after = eps * (k - measure.slice_index)
    before = eps * measure.slice_index
    wp, vp = hermitian_eig(phis.operators[0])
    vp = vp.entries
    a = vp.conj().T @ (propagate_eig(wh, vh.entries, before) @ v1)
    b = vp.conj().T @ (propagate_eig(wh, vh.entries, -after) @ v2)
    coef = b.conj() * a
    rng = np.random.default_rng(measure.seed)
    xmax, delta = measure.xi_max, measure.weight.delta
    x = rng.uniform(-xmax, xmax, size=measure.samples)
    f = (delta / np.pi) * np.sinc(delta * x / np.pi)
    vals = np.empty(measure.samples, dtype=complex)
    chunk = 8192
    for s in range(0, measure.samples, chunk):
        xs = x[s:s + chunk]
        vals[s:s + chunk] = 2 * xmax * f[s:s + chunk] * (np.exp(-1j * np.outer(xs, wp)) @ coef)
    # fixed-order summation keeps reruns bit-identical
    mean = complex(np.sum(vals) / vals.size)
    stderr = float(np.std(vals, ddof=1) / math.sqrt(vals.size))
    target = complex(coef @ sinc_weight_truncated(wp, delta, xmax))
    return mean, stderr, target


def lambda_averaged(labels, H, phis: ConstraintSpec, measure: LambdaMeasure, T: float, N: int,
                    convention: LatticeConvention = LatticeConvention.EPS_T_OVER_N) -> PropagatorResult:
    """Lattice propagator averaged over the multipliers with ``measure``.

    Each slice factor is linear in ``e^{-iελΦ}``, so averaging a slice
    replaces that factor with the averaged operator.  The single-slice
    measure at slice 0 reproduces ``e^{-iTH}E`` exactly; the every-slice
    measure reproduces the interleaved lattice.
    """
    dim = as_array(H).shape[0]
    if phis.dim != dim:
        raise ContractError("constraint and Hamiltonian dimensions differ")
    v2, v1, spec, budget = _states(labels, dim)
    if measure.kind == "monte_carlo":
        mean, stderr, target = _mc_single_slice(v2, v1, H, phis, measure, T, N, convention)
        if stderr > measure.max_stderr:
            raise StatisticalError(
                f"Monte Carlo standard error {stderr:.3e} exceeds {measure.max_stderr:.1e}", stderr
            )
        return PropagatorResult(mean, PropagatorRoute.LAMBDA_AVERAGED, spec, stderr,
                                {"kind": measure.kind, "stderr": stderr,
                                 "truncated_domain_value": target, "seed": measure.seed})
    k = convention.factors(N)
    eps = convention.epsilon(T, N)
    u = _Evolver(H, eps)
    avg = measure.weight.averaged(phis)
    x = v1
    if measure.kind == "single_slice":
        if not 0 <= measure.slice_index < k:
            raise ContractError("slice_index outside the lattice")
        for l in range(k):
            if l == measure.slice_index:
                x = avg @ x
            x = u(x)
    else:
        for _ in range(k):
            x = u(avg @ x)
        x = avg @ x
    return PropagatorResult(complex(np.vdot(v2, x)), PropagatorRoute.LAMBDA_AVERAGED, spec,
                            budget * (1 + 1e-3 * k), {"kind": measure.kind, "factors": k})
