"""Acceptance suite: twelve criteria, each a list of residual rows.

Every row carries a residual and a tolerance; a row passes when
``residual <= tolerance``.  Range checks (fitted slopes, ratios) are
expressed as the distance from the target value with the half-width of
the range as tolerance; integer checks use tolerance 0.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .coherent import CoherentLabel, PhaseConvention, auto_levels, coherent_vector, label, overlap_closed
from .fock import OperatorMatrix, TruncationSpec, build_canonical_ops
from .projector import (
    ConstraintSpec,
    group_average_u1,
    rank1_min_uncertainty,
    sinc_average_matrix,
    sinc_integral,
    spectral_interval,
    weyl_weight_normalization,
)
from .propagator import (
    LambdaMeasure,
    LambdaSchedule,
    SincWeight,
    exact_projected,
    lambda_averaged,
    lambda_scheduled,
    reduced_evolution,
    trotter_interleaved,
)
from .quadrature import phase_space_measure
from .rkhs import coherent_kernel, gram, hermitian_symmetry_error, operator_kernel, psd_margin, reduce_limit_delta, reproduce_check

FAST, FULL = "fast", "full"


@dataclass(frozen=True)
class Row:
    quantity: str
    value: complex
    tolerance: float
    residual: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.residual) and self.residual <= self.tolerance)


@dataclass
class CriterionResult:
    number: int
    title: str
    rows: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return bool(self.rows) and all(r.passed for r in self.rows)

    def summary(self) -> str:
        worst = max(self.rows, key=lambda r: r.residual / r.tolerance if r.tolerance > 0 else
                    (math.inf if r.residual > 0 else 0.0))
        status = "PASS" if self.passed else "FAIL"
        return (f"[{status}] {self.number:2d}. {self.title}: {len(self.rows)} rows, "
                f"worst {worst.quantity} residual={worst.residual:.3e} tol={worst.tolerance:.1e} "
                f"({self.seconds:.1f} s)")


def _slope(xs, ys) -> float:
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])


def _range_row(name, value, target, half_width):
    return Row(name, complex(value), half_width, abs(value - target))


# 1 ------------------------------------------------------------------------

def criterion_overlap(suite=FAST):
    grid = np.linspace(-2.0, 2.0, 5)
    pts = [(p, q) for p in grid for q in grid]
    labs = [label(p, q) for p, q in pts]
    spec = TruncationSpec(1, auto_levels(labs, tol=1e-14))
    vecs = np.array([coherent_vector(lab, spec) for lab in labs])
    numeric = vecs.conj() @ vecs.T
    closed = np.array([[overlap_closed(a, b) for b in labs] for a in labs])
    err = np.abs(numeric - closed)
    k = np.unravel_index(np.argmax(err), err.shape)
    return [Row(f"max |numeric − closed overlap|, 25×25 pairs (N={spec.levels_per_mode})",
                complex(numeric[k]), 1e-10, float(err.max()))]


# 2 ------------------------------------------------------------------------

def criterion_projectors(suite=FAST):
    from .models.second_class import second_class_system
    from .models.su2 import su2_projector

    spec = TruncationSpec(1, 40)
    P = build_canonical_ops(spec)[0].P
    delta = 0.5
    built = {
        "spectral_interval(P, 0.5)": spectral_interval(ConstraintSpec(P, delta)),
        "sinc_integral(P, 0.5)": sinc_integral(P, delta),
        "group_average_u1(su2, s=1)": su2_projector(TruncationSpec(2, 12), 1.0),
        "rank1_min_uncertainty(1,2)": second_class_system(40).E,
    }
    rows = []
    for name, E in built.items():
        res = E.residuals()
        rows.append(Row(f"{name} ‖E²−E‖_F", complex(res["idempotency"]), 1e-10 * E.dim, res["idempotency"]))
        rows.append(Row(f"{name} ‖E−E†‖_F", complex(res["hermiticity"]), 1e-12 * E.dim, res["hermiticity"]))
    diff = np.linalg.norm(built["spectral_interval(P, 0.5)"].matrix.entries - sinc_average_matrix(P, delta).entries)
    rows.append(Row("‖E_sinc(raw integral) − E_spectral‖_F", complex(diff), 1e-6, float(diff)))
    return rows


# 3 ------------------------------------------------------------------------

P_PAIRS = [((0.3, 0.5), (-0.2, -0.4)), ((0.0, 0.0), (0.0, 0.0)), ((1.0, -0.7), (0.4, 0.9))]


def criterion_projected_p(suite=FAST):
    from .models.momentum import fock_spectral_sandwich, oracle_projected_P_kernel

    rows = []
    for pair in P_PAIRS:
        exact, _ = oracle_projected_P_kernel(pair, 0.1)
        sand = fock_spectral_sandwich(pair, 0.1)
        rows.append(Row(f"sandwich vs integral {pair}, δ=0.1", sand, 1e-7, abs(sand - exact)))
    deltas = [0.2, 0.1, 0.05]
    pair = P_PAIRS[0]
    rel, ab = [], []
    for d in deltas:
        exact, lead = oracle_projected_P_kernel(pair, d)
        ab.append(abs(exact - lead))
        rel.append(abs(exact - lead) / abs(exact))
    rows.append(_range_row("relative gap |exact−leading|/|exact| slope", _slope(deltas, rel), 2.0, 0.2))
    rows.append(_range_row("absolute gap |exact−leading| slope", _slope(deltas, ab), 3.0, 0.2))
    return rows


# 4 ------------------------------------------------------------------------

def criterion_limit(suite=FAST):
    from .models.momentum import oracle_limit_kernel, projected_P_kernel

    res = reduce_limit_delta(projected_P_kernel, 0.2, (0.0, 0.0), prefactor=math.sqrt(math.pi) / 2)
    ps = np.linspace(-1.0, 1.0, 5)
    x2 = np.array([[p, 0.3] for p in ps])
    x1 = np.array([[p, -0.8] for p in ps])
    got = res.kernel.matrix(x2, x1)
    want = np.array([[oracle_limit_kernel((a, b)) for b in x1] for a in x2])
    err = np.abs(got - want)
    shifted = res.kernel.matrix(x2 + [0, 1.7], x1 + [0, -0.9])
    qdep = np.abs(shifted - got)
    return [
        Row("limit kernel vs exp(−(p''²+p'²)/2), 5×5 p-grid", complex(got.flat[np.argmax(err)]), 1e-6,
            float(err.max())),
        _range_row("fitted σ", res.sigma_fit, 1.0, 0.05),
        Row("q-independence of limit kernel", complex(qdep.max()), 1e-6, float(qdep.max())),
    ]


# 5 ------------------------------------------------------------------------

SU2_PAIRS = [
    (((0.3, -0.2), (0.5, 0.1)), ((0.1, 0.4), (-0.3, 0.6))),
    (((0.0, 0.0), (0.0, 0.0)), ((0.7, -0.1), (0.2, 0.3))),
    (((1.0, 0.5), (-0.4, 0.2)), ((0.6, -0.6), (0.3, 0.9))),
    (((-0.5, 0.8), (0.2, -0.3)), ((-0.5, 0.8), (0.2, -0.3))),
    (((0.2, 0.2), (1.1, -0.7)), ((-0.9, 0.4), (0.0, 0.5))),
]


def _su2_labels(pair):
    return tuple(CoherentLabel(p, q, PhaseConvention.ALPHA_PQ_HALF) for p, q in pair)


def criterion_su2(suite=FAST):
    from .models.su2 import su2_projected_kernel, su2_projector

    rows = []
    all_labels = [lab for pair in SU2_PAIRS for lab in _su2_labels(pair)]
    spec = TruncationSpec(2, auto_levels(all_labels, tol=1e-12))
    vecs = {lab: coherent_vector(lab, spec) for lab in all_labels}
    for s in (0.5, 1.0, 1.5):
        E = su2_projector(spec, s)
        tr = np.trace(E.matrix.entries).real
        rows.append(Row(f"Tr E, s={s:g}", complex(tr), 1e-8, abs(tr - (2 * s + 1))))
        rows.append(Row(f"rank E, s={s:g}", complex(E.rank), 0.0, float(abs(E.rank - (2 * s + 1)))))
        err = 0.0
        for pair in SU2_PAIRS:
            l2, l1 = _su2_labels(pair)
            err = max(err, abs(np.vdot(vecs[l2], E.matrix.entries @ vecs[l1]) - su2_projected_kernel((l2, l1), s)))
        rows.append(Row(f"kernel vs closed form, s={s:g}, 5 pairs", complex(err), 1e-8, err))
    E = su2_projector(spec, 0.35)
    rows.append(Row("rank E, 2s=0.7", complex(E.rank), 0.0, float(E.rank)))
    return rows


# 6 ------------------------------------------------------------------------

def criterion_gauge(suite=FAST, seeds: int = 10):
    from .models.su2 import su2_constraint, su2_hamiltonian, su2_projector

    rows = []
    l2, l1 = _su2_labels(SU2_PAIRS[0])
    spec = TruncationSpec(2, auto_levels([l2, l1], tol=1e-12))
    E = su2_projector(spec, 1.0)
    H = su2_hamiltonian(spec)
    phis = ConstraintSpec((su2_constraint(spec, 1.0),), 1.0)
    base = exact_projected((l2, l1), H, E, 1.0).value
    for slices in ((16, 32) if suite == FULL else (16,)):
        for placement in ("initial", "final"):
            dev = 0.0
            for seed in range(seeds):
                sched = LambdaSchedule.random(slices, 1, seed, scale=3.0)
                val = lambda_scheduled((l2, l1), H, phis, sched, E, 1.0, placement).value
                dev = max(dev, abs(val - base))
            rows.append(Row(f"max |value − exact|, {seeds} seeds, N={slices}, E {placement}",
                            complex(base), 1e-6, dev))
    return rows


# 7 ------------------------------------------------------------------------

def flpr_label_sets():
    from .models.flpr import FLPRLabel

    return [
        (FLPRLabel(0.5 + 0.2j, -0.3 + 0.4j, 0.1, 0.2), FLPRLabel(0.3 - 0.1j, 0.2 + 0.5j, -0.2, 0.5)),
        (FLPRLabel(0.8, 0.3j, 0.0, 0.0), FLPRLabel(0.6j, -0.4, 0.3, -0.4)),
        (FLPRLabel(-0.2 + 0.7j, 0.5, -0.6, 1.0), FLPRLabel(0.4 + 0.4j, -0.3 - 0.2j, 0.4, 0.3)),
    ]


def criterion_flpr(suite=FULL):
    from .models.flpr import FLPRParams, flpr_closed, flpr_gauge_leakage, flpr_numeric

    rows = []
    params = FLPRParams(1.0, 1.0, 0.05, 12)
    sets = flpr_label_sets()
    for i, (l2, l1) in enumerate(sets):
        for T in (0.0, 0.5):
            c = flpr_closed(l2, l1, params, T)
            n = flpr_numeric(l2, l1, params, T)
            rows.append(Row(f"closed vs numeric, set {i}, T={T:g}", c, 1e-5, abs(c - n)))
    # the printed leading-order third factor drops an O(δ²) relative term
    deltas = [0.2, 0.1, 0.05]
    rel = []
    l2, l1 = sets[0]
    for d in deltas:
        p = FLPRParams(2.5, 1.0, d, 12)
        c = flpr_closed(l2, l1, p, 0.5)
        rel.append(abs(c - flpr_closed(l2, l1, p, 0.5, leading=True)) / abs(c))
    rows.append(_range_row("leading sinc factor: relative gap slope", _slope(deltas, rel), 2.0, 0.2))
    leak = []
    scheds = [LambdaSchedule.random(32, 1, seed, scale=3.0) for seed in range(3)]
    for d in deltas:
        leak.append(flpr_gauge_leakage(l2, l1, FLPRParams(2.5, 1.0, d, 12), 0.5, scheds)["state"])
    rows.append(_range_row("schedule dependence slope in δ", _slope(deltas, leak), 1.0, 0.2))
    return rows


# 8 ------------------------------------------------------------------------

SECOND_CLASS_PAIRS = [((0.5, 1.5), (1.2, 2.3)), ((1.0, 2.0), (1.0, 2.0)), ((-0.4, 0.7), (2.0, 1.1))]


def criterion_second_class(suite=FAST):
    from .models.second_class import (
        expected_action,
        path_action,
        random_path,
        second_class_full,
        second_class_system,
        weyl_projector_error,
        wrapped_difference,
    )

    system = second_class_system(40)
    rows = []
    for pair in SECOND_CLASS_PAIRS:
        labs = tuple(label(*x) for x in pair)
        for T in (0.0, 1.0):
            got = reduced_evolution(labs, system.H, system.E, T).value
            want = second_class_full(labs, T)
            rows.append(Row(f"reduced_evolution vs closed {pair}, T={T:g}", got, 1e-8, abs(got - want)))
    err = weyl_projector_error(40)
    rows.append(Row("Weyl integral vs |1,2><1,2|", complex(err), 1e-6, err))
    norm = weyl_weight_normalization()
    rows.append(Row("∫e^{−(λ²+ξ²)/4}dλdξ/2π", complex(norm), 1e-6, abs(norm - 2.0)))
    rng = np.random.default_rng(2024)
    pair = SECOND_CLASS_PAIRS[0]
    acts = [path_action(random_path(pair, 8, rng), 1.0, system) for _ in range(5)]
    spread = max(wrapped_difference(a, b) for a in acts for b in acts)
    dev = max(wrapped_difference(a, expected_action(pair, 1.0)) for a in acts)
    rows.append(Row("action spread over 5 random paths", complex(acts[0]), 1e-10, spread))
    rows.append(Row("action vs endpoint formula", complex(expected_action(pair, 1.0)), 1e-10, dev))
    return rows


# 9 ------------------------------------------------------------------------

def criterion_trotter(suite=FAST):
    from .models.second_class import second_class_system

    system = second_class_system(40)
    labs = tuple(label(*x) for x in SECOND_CLASS_PAIRS[0])
    ref = reduced_evolution(labs, system.H, system.E, 1.0).value
    ns = (128, 256, 512) if suite == FULL else (128, 256)
    errs = [abs(trotter_interleaved(labs, system.H, system.E, 1.0, n).value - ref) for n in ns]
    return [_range_row(f"error ratio N={a}→{b}", e1 / e2, 2.0, 0.3)
            for a, b, e1, e2 in zip(ns, ns[1:], errs, errs[1:])]


# 10 -----------------------------------------------------------------------

def criterion_three_routes(suite=FAST):
    from .models.momentum import momentum_toy

    toy = momentum_toy(60, 0.5)
    labs = (label(0.2, 0.3), label(-0.1, -0.4))
    a = exact_projected(labs, toy.H, toy.E, 1.0).value
    b = trotter_interleaved(labs, toy.H, toy.E, 1.0, 512).value
    c = lambda_averaged(labs, toy.H, toy.phis, LambdaMeasure("single_slice", SincWeight(0.5)), 1.0, 512).value
    return [
        Row("exact vs interleaved(512)", a, 1e-5, abs(a - b)),
        Row("exact vs λ-averaged single-slice(512)", a, 1e-5, abs(a - c)),
        Row("interleaved vs λ-averaged", b, 1e-5, abs(b - c)),
    ]


# 11 -----------------------------------------------------------------------

def _kernel_props(name, kernel, labels):
    G = gram(kernel, labels)
    margin = psd_margin(G)
    herm = hermitian_symmetry_error(kernel, labels)
    return [
        Row(f"{name}: Gram min eig / ‖G‖", complex(margin), 1e-10, max(0.0, -margin)),
        Row(f"{name}: Hermitian symmetry", complex(herm), 1e-12, herm),
    ]


def criterion_rkhs(suite=FAST):
    from .models.momentum import projected_P_kernel
    from .models.second_class import second_class_system
    from .models.sphere import (
        GaussianBump,
        SphereKernelParams,
        e2_kernel,
        e2_reproduce_residual,
        hypersphere_kernel,
        hypersphere_reproduce_residual,
        sphere_kernel,
        sphere_reproduce_residual,
    )

    rng = np.random.default_rng(7)
    rows = []
    x1d = rng.uniform(-2, 2, (8, 2))
    x2d = rng.uniform(-2, 2, (8, 4))
    xe2 = np.column_stack([rng.uniform(-2, 2, (8, 2)), rng.uniform(0, 2 * np.pi, 8)])

    levels = 40
    # number-state projector |1><1| and the minimum-uncertainty rank-1 projector
    fock1 = np.zeros((levels, levels))
    fock1[1, 1] = 1.0
    sc = second_class_system(levels)
    sphere_params = SphereKernelParams()
    zeta = GaussianBump(0.05)
    kernels = {
        "coherent overlap": coherent_kernel(1),
        "projected |1><1|": operator_kernel(fock1, 1, levels, name="|1><1|"),
        "projected |1,2><1,2|": operator_kernel(sc.E.matrix, 1, levels, name="|1,2><1,2|"),
        "projected P window δ=0.1": projected_P_kernel(0.1),
    }
    for name, k in kernels.items():
        rows += _kernel_props(name, k, x1d)
    rows += _kernel_props("sphere shell δ=0.2", sphere_kernel(sphere_params), x2d)
    rows += _kernel_props("E(2) reduced δ=0.2", e2_kernel(0.2), xe2)
    rows += _kernel_props("second-class hypersphere", hypersphere_kernel(zeta), x2d)

    pair = (np.array([0.4, -0.3]), np.array([-0.6, 0.5]))
    for name in ("coherent overlap", "projected |1><1|"):
        meas = phase_space_measure(9.0, panels=6, order=16)
        r = reproduce_check(kernels[name], meas, pair, tol=1e-6)
        rows.append(Row(f"{name}: reproduce residual", complex(r), 1e-6, r))
    meas = phase_space_measure(9.0, panels=6, order=16, center=(1.0, 2.0))
    r = reproduce_check(kernels["projected |1,2><1,2|"], meas, (np.array([1.2, 2.3]), np.array([0.5, 1.5])),
                        tol=1e-6)
    rows.append(Row("projected |1,2><1,2|: reproduce residual", complex(r), 1e-6, r))
    p4 = (np.array([0.3, -0.2, 0.5, 0.4]), np.array([-0.1, 0.4, -0.3, 0.6]))
    r = sphere_reproduce_residual(sphere_params, p4)
    rows.append(Row("sphere shell: reproduce residual", complex(r), 1e-4, r))
    r = e2_reproduce_residual(0.2, (np.array([0.4, -0.3, 0.2]), np.array([-0.2, 0.5, 1.1])))
    rows.append(Row("E(2) reduced: reproduce residual", complex(r), 1e-3, r))
    r = hypersphere_reproduce_residual(zeta, p4)
    rows.append(Row("second-class hypersphere: reproduce residual", complex(r), 1e-3, r))
    return rows


# 12 -----------------------------------------------------------------------

def criterion_surface_constant(suite=FAST):
    from .models.sphere import SurfaceConstantFiducial, surface_constant_profile

    eta = SurfaceConstantFiducial()
    radii = np.sqrt(np.linspace(0.8, 1.2, 5))
    prof = surface_constant_profile(eta, radii)
    return [
        Row("max−min of ∫|η(r,c)|²dc over 5 radii", complex(prof.mean()), 1e-8, float(prof.max() - prof.min())),
        Row("|∫|η(r,c)|²dc − 1|", complex(prof.mean()), 1e-8, float(np.max(np.abs(prof - 1)))),
    ]


CRITERIA = {
    1: ("Overlap oracle", criterion_overlap),
    2: ("Projector axioms", criterion_projectors),
    3: ("Projected-P kernel", criterion_projected_p),
    4: ("delta -> 0 reduction", criterion_limit),
    5: ("SU(2) subspace", criterion_su2),
    6: ("Gauge independence", criterion_gauge),
    7: ("FLPR", criterion_flpr),
    8: ("Second-class example", criterion_second_class),
    9: ("Trotter order", criterion_trotter),
    10: ("Three-route equality", criterion_three_routes),
    11: ("RKHS properties", criterion_rkhs),
    12: ("E(2) surface constant", criterion_surface_constant),
}

FULL_ONLY = {7}


def run_criterion(number: int, suite: str = FULL, tol_scale: float = 1.0) -> CriterionResult:
    """Evaluate one criterion; ``tol_scale`` multiplies every tolerance."""
    title, fn = CRITERIA[number]
    t0 = time.perf_counter()
    rows = fn(suite)
    rows = [Row(r.quantity, r.value, r.tolerance * tol_scale, r.residual) for r in rows]
    return CriterionResult(number, title, rows, time.perf_counter() - t0)


def run_suite(suite: str = FAST, tol_scale: float = 1.0, numbers=None) -> list:
    """Run the suite in criterion order; the fast suite skips the FLPR criterion."""
    if suite not in (FAST, FULL):
        raise ValueError(f"unknown suite {suite!r}")
    numbers = numbers or [n for n in CRITERIA if suite == FULL or n not in FULL_ONLY]
    return [run_criterion(n, suite, tol_scale) for n in numbers]
