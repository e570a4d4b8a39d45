"""Registry of named experiments.

Each experiment takes a parameter map (defaults merged with overrides) and
a seed, and returns acceptance ``Row`` objects.  The ``anchor`` of an
experiment is the dotted path of the operation it exercises; ``resolve``
imports it, which is how the catalogue is kept honest.
"""

from __future__ import annotations

import importlib
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .acceptance import Row, _range_row, _slope
from .coherent import CoherentLabel, PhaseConvention, auto_levels, coherent_vector, label, overlap_closed
from .errors import ConfigurationError
from .fock import TruncationSpec, build_canonical_ops
from .projector import ConstraintSpec, sinc_average_matrix, sinc_integral, spectral_interval


@dataclass(frozen=True)
class Experiment:
    name: str
    description: str
    anchor: str
    defaults: dict
    runner: Callable = field(repr=False)

    def run(self, params: dict, seed: int = 0) -> list:
        unknown = sorted(set(params) - set(self.defaults))
        if unknown:
            raise ConfigurationError(f"unknown parameter(s) for {self.name}: {', '.join(unknown)}")
        merged = dict(self.defaults)
        for k, v in params.items():
            kind = type(self.defaults[k])
            try:
                merged[k] = _as_bool(v) if kind is bool else kind(v)
            except ValueError as exc:
                raise ConfigurationError(f"{k}={v!r} is not a valid {kind.__name__}") from exc
        return self.runner(merged, seed)


def _as_bool(v) -> bool:
    if isinstance(v, bool):
        return v
    s = str(v).strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ConfigurationError(f"not a boolean: {v!r}")


def resolve(anchor: str):
    module, _, attr = anchor.rpartition(".")
    return getattr(importlib.import_module(module), attr)


REGISTRY: dict[str, Experiment] = {}


def experiment(name, description, anchor, **defaults):
    def deco(fn):
        if name in REGISTRY:
            raise ValueError(f"duplicate experiment {name}")
        REGISTRY[name] = Experiment(name, description, anchor, defaults, fn)
        return fn

    return deco


PKG = "coherent_constraints"


@experiment("overlap-oracle", "Fock-space overlaps against the closed form on a p,q grid",
            f"{PKG}.coherent.overlap_closed", half_width=2.0, points=5, tol=1e-10)
def _overlap(pr, seed):
    g = np.linspace(-pr["half_width"], pr["half_width"], pr["points"])
    labs = [label(p, q) for p in g for q in g]
    spec = TruncationSpec(1, auto_levels(labs, tol=1e-14))
    vecs = np.array([coherent_vector(lab, spec) for lab in labs])
    num = vecs.conj() @ vecs.T
    closed = np.array([[overlap_closed(a, b) for b in labs] for a in labs])
    err = float(np.abs(num - closed).max())
    return [Row("max |numeric − closed overlap|", complex(err), pr["tol"], err)]


@experiment("sinc-vs-spectral", "Sinc-integral projector of P against the spectral interval",
            f"{PKG}.projector.sinc_integral", delta=0.5, levels=40, tol=1e-6)
def _sinc(pr, seed):
    P = build_canonical_ops(TruncationSpec(1, pr["levels"]))[0].P
    Es = spectral_interval(ConstraintSpec(P, pr["delta"]))
    raw = sinc_average_matrix(P, pr["delta"]).entries
    snapped = sinc_integral(P, pr["delta"])
    d = float(np.linalg.norm(Es.matrix.entries - raw))
    return [
        Row("rank", complex(Es.rank), 0.0, float(abs(Es.rank - snapped.rank))),
        Row("‖E_sinc − E_spectral‖_F", complex(d), pr["tol"], d),
    ]


@experiment("projected-p-kernel", "Momentum-window projected kernel: Fock sandwich vs integral form",
            f"{PKG}.models.momentum.oracle_projected_P_kernel",
            delta=0.1, p2=0.3, q2=0.5, p1=-0.2, q1=-0.4, tol=1e-7)
def _pkernel(pr, seed):
    from .models.momentum import fock_spectral_sandwich, oracle_projected_P_kernel

    pair = ((pr["p2"], pr["q2"]), (pr["p1"], pr["q1"]))
    exact, _ = oracle_projected_P_kernel(pair, pr["delta"])
    sand = fock_spectral_sandwich(pair, pr["delta"])
    return [Row("sandwich vs integral form", exact, pr["tol"], abs(sand - exact))]


@experiment("leading-gap-scaling", "Gap between exact and leading small-delta kernel vs delta",
            f"{PKG}.models.momentum.leading_projected_P_kernel", delta0=0.2, slope_tol=0.2)
def _gap(pr, seed):
    from .models.momentum import oracle_projected_P_kernel

    deltas = [pr["delta0"], pr["delta0"] / 2, pr["delta0"] / 4]
    pair = ((0.3, 0.5), (-0.2, -0.4))
    rel, ab = [], []
    for d in deltas:
        e, l = oracle_projected_P_kernel(pair, d)
        rel.append(abs(e - l) / abs(e))
        ab.append(abs(e - l))
    return [_range_row("relative gap slope", _slope(deltas, rel), 2.0, pr["slope_tol"]),
            _range_row("absolute gap slope", _slope(deltas, ab), 3.0, pr["slope_tol"])]


@experiment("limit-delta", "Rescaled delta -> 0 limit of the projected momentum kernel",
            f"{PKG}.rkhs.reduce_limit_delta", delta0=0.2, tol=1e-6)
def _limit(pr, seed):
    from .models.momentum import oracle_limit_kernel, projected_P_kernel
    from .rkhs import reduce_limit_delta

    res = reduce_limit_delta(projected_P_kernel, pr["delta0"], (0.0, 0.0), prefactor=math.sqrt(math.pi) / 2)
    ps = np.linspace(-1, 1, 5)
    x2 = np.column_stack([ps, np.full(5, 0.3)])
    x1 = np.column_stack([ps, np.full(5, -0.8)])
    got = res.kernel.matrix(x2, x1)
    want = np.array([[oracle_limit_kernel((a, b)) for b in x1] for a in x2])
    err = float(np.abs(got - want).max())
    return [Row("limit kernel error", complex(err), pr["tol"], err),
            _range_row("fitted sigma", res.sigma_fit, 1.0, 0.05)]


@experiment("su2-kernel", "Spin-s subspace of two oscillators: rank and projected kernel",
            f"{PKG}.models.su2.su2_projected_kernel", s=1.0, tol=1e-8)
def _su2(pr, seed):
    from .models.su2 import su2_projected_kernel, su2_projector

    s = pr["s"]
    l2 = CoherentLabel((0.3, -0.2), (0.5, 0.1), PhaseConvention.ALPHA_PQ_HALF)
    l1 = CoherentLabel((0.1, 0.4), (-0.3, 0.6), PhaseConvention.ALPHA_PQ_HALF)
    spec = TruncationSpec(2, auto_levels([l2, l1], tol=1e-12))
    E = su2_projector(spec, s)
    two_s = 2 * s
    integral = abs(two_s - round(two_s)) < 1e-12
    expected_rank = int(round(two_s)) + 1 if integral else 0
    rows = [Row("rank", complex(E.rank), 0.0, float(abs(E.rank - expected_rank)))]
    if integral:
        got = np.vdot(coherent_vector(l2, spec), E.matrix.entries @ coherent_vector(l1, spec))
        rows.append(Row("kernel vs closed form", got, pr["tol"], abs(got - su2_projected_kernel((l2, l1), s))))
    return rows


@experiment("noncompact-analogue", "Relative-number constraint: rank grows with the truncation",
            f"{PKG}.models.su2.noncompact_u1_analogue_projector", k=3, levels=10)
def _noncompact(pr, seed):
    from .models.su2 import noncompact_u1_analogue_projector

    E = noncompact_u1_analogue_projector(pr["k"], TruncationSpec(2, pr["levels"]))
    want = max(pr["levels"] - abs(pr["k"]), 0)
    return [Row("rank", complex(E.rank), 0.0, float(abs(E.rank - want)))]


@experiment("gauge-independence", "Spin-1 propagator under seeded Lagrange-multiplier schedules",
            f"{PKG}.propagator.lambda_scheduled", seeds=10, slices=16, scale=3.0, T=1.0, tol=1e-6)
def _gauge(pr, seed):
    from .models.su2 import su2_constraint, su2_hamiltonian, su2_projector
    from .propagator import LambdaSchedule, exact_projected, lambda_scheduled

    l2 = CoherentLabel((0.3, -0.2), (0.5, 0.1), PhaseConvention.ALPHA_PQ_HALF)
    l1 = CoherentLabel((0.1, 0.4), (-0.3, 0.6), PhaseConvention.ALPHA_PQ_HALF)
    spec = TruncationSpec(2, auto_levels([l2, l1], tol=1e-12))
    E, H = su2_projector(spec, 1.0), su2_hamiltonian(spec)
    phis = ConstraintSpec((su2_constraint(spec, 1.0),), 1.0)
    base = exact_projected((l2, l1), H, E, pr["T"]).value
    dev = 0.0
    for k in range(pr["seeds"]):
        sched = LambdaSchedule.random(pr["slices"], 1, seed + k, scale=pr["scale"])
        for placement in ("initial", "final"):
            dev = max(dev, abs(lambda_scheduled((l2, l1), H, phis, sched, E, pr["T"], placement).value - base))
    return [Row("max deviation", base, pr["tol"], dev)]


@experiment("flpr-closed", "Coupled oscillator/particle model: closed form vs factorized numeric route",
            f"{PKG}.models.flpr.flpr_closed", g=1.0, omega=1.0, delta=0.05, T=0.5, tol=1e-5)
def _flpr(pr, seed):
    from .acceptance import flpr_label_sets
    from .models.flpr import FLPRParams, flpr_closed, flpr_numeric

    params = FLPRParams(pr["g"], pr["omega"], pr["delta"], 12)
    rows = []
    for i, (l2, l1) in enumerate(flpr_label_sets()):
        c = flpr_closed(l2, l1, params, pr["T"])
        rows.append(Row(f"set {i}", c, pr["tol"], abs(c - flpr_numeric(l2, l1, params, pr["T"]))))
    return rows


@experiment("flpr-leakage", "Schedule dependence of the coupled model scales linearly in delta",
            f"{PKG}.models.flpr.flpr_gauge_leakage", g=2.5, T=0.5, slices=32, schedules=3, scale=3.0)
def _leak(pr, seed):
    from .acceptance import flpr_label_sets
    from .models.flpr import FLPRParams, flpr_gauge_leakage
    from .propagator import LambdaSchedule

    l2, l1 = flpr_label_sets()[0]
    deltas = [0.2, 0.1, 0.05]
    scheds = [LambdaSchedule.random(pr["slices"], 1, seed + k, scale=pr["scale"]) for k in range(pr["schedules"])]
    leak = [flpr_gauge_leakage(l2, l1, FLPRParams(pr["g"], 1.0, d, 12), pr["T"], scheds)["state"] for d in deltas]
    return [_range_row("leakage slope", _slope(deltas, leak), 1.0, 0.2)]


@experiment("second-class", "Rank-one projector: reduced evolution vs overlap formula",
            f"{PKG}.models.second_class.second_class_full", T=1.0, levels=40, tol=1e-8)
def _second(pr, seed):
    from .models.second_class import second_class_full, second_class_system, weyl_projector_error
    from .propagator import reduced_evolution

    system = second_class_system(pr["levels"])
    labs = (label(0.5, 1.5), label(1.2, 2.3))
    got = reduced_evolution(labs, system.H, system.E, pr["T"]).value
    w = weyl_projector_error(pr["levels"])
    return [Row("reduced evolution", got, pr["tol"], abs(got - second_class_full(labs, pr["T"]))),
            Row("Weyl integral vs outer product", complex(w), 1e-6, w)]


@experiment("second-class-paths", "Projected path action depends only on the endpoints",
            f"{PKG}.models.second_class.path_action", paths=5, links=8, spread=3.0, T=1.0, tol=1e-10)
def _paths(pr, seed):
    from .models.second_class import expected_action, path_action, random_path, second_class_system, wrapped_difference

    system = second_class_system(40)
    rng = np.random.default_rng(seed)
    pair = ((0.5, 1.5), (1.2, 2.3))
    acts = [path_action(random_path(pair, pr["links"], rng, pr["spread"]), pr["T"], system)
            for _ in range(pr["paths"])]
    want = expected_action(pair, pr["T"])
    dev = max(wrapped_difference(a, want) for a in acts)
    return [Row("max |action − endpoint formula| (mod 2π)", complex(want), pr["tol"], dev)]


@experiment("trotter-order", "Interleaved lattice error halves as N doubles",
            f"{PKG}.propagator.trotter_interleaved", n0=128, doublings=2)
def _trotter(pr, seed):
    from .models.second_class import second_class_system
    from .propagator import reduced_evolution, trotter_interleaved

    system = second_class_system(40)
    labs = (label(0.5, 1.5), label(1.2, 2.3))
    ref = reduced_evolution(labs, system.H, system.E, 1.0).value
    ns = [pr["n0"] * 2**k for k in range(pr["doublings"] + 1)]
    errs = [abs(trotter_interleaved(labs, system.H, system.E, 1.0, n).value - ref) for n in ns]
    return [_range_row(f"ratio {a}->{b}", e1 / e2, 2.0, 0.3) for a, b, e1, e2 in zip(ns, ns[1:], errs, errs[1:])]


@experiment("three-routes", "Exact, interleaved and multiplier-averaged propagators on the momentum toy",
            f"{PKG}.propagator.lambda_averaged", delta=0.5, levels=60, slices=512, T=1.0, tol=1e-5)
def _three(pr, seed):
    from .models.momentum import momentum_toy
    from .propagator import LambdaMeasure, SincWeight, exact_projected, lambda_averaged, trotter_interleaved

    toy = momentum_toy(pr["levels"], pr["delta"])
    labs = (label(0.2, 0.3), label(-0.1, -0.4))
    a = exact_projected(labs, toy.H, toy.E, pr["T"]).value
    b = trotter_interleaved(labs, toy.H, toy.E, pr["T"], pr["slices"]).value
    m = LambdaMeasure("single_slice", SincWeight(pr["delta"]))
    c = lambda_averaged(labs, toy.H, toy.phis, m, pr["T"], pr["slices"]).value
    return [Row("exact vs interleaved", a, pr["tol"], abs(a - b)),
            Row("exact vs averaged", a, pr["tol"], abs(a - c))]


@experiment("monte-carlo-average", "Sampled single-slice multiplier average on the momentum toy",
            f"{PKG}.propagator.LambdaMeasure", delta=0.5, samples=200000, slices=8, sigmas=4.0)
def _mc(pr, seed):
    from .models.momentum import momentum_toy
    from .propagator import LambdaMeasure, SincWeight, lambda_averaged

    toy = momentum_toy(60, pr["delta"])
    labs = (label(0.2, 0.3), label(-0.1, -0.4))
    m = LambdaMeasure("monte_carlo", SincWeight(pr["delta"]), samples=pr["samples"], seed=seed)
    res = lambda_averaged(labs, toy.H, toy.phis, m, 1.0, pr["slices"])
    target = res.details["truncated_domain_value"]
    return [Row("deviation from truncated-domain value", res.value, pr["sigmas"] * res.residual_budget,
                abs(res.value - target))]


@experiment("sphere-kernel", "Shell-projected kernel in two dimensions: reproducing residual",
            f"{PKG}.models.sphere.sphere_projected_kernel", delta=0.2, tol=1e-4)
def _sphere(pr, seed):
    from .models.sphere import SphereKernelParams, sphere_projected_kernel, sphere_reproduce_residual

    params = SphereKernelParams(2, pr["delta"])
    pair = (np.array([0.3, -0.2, 0.5, 0.4]), np.array([-0.1, 0.4, -0.3, 0.6]))
    k = sphere_projected_kernel(pair, params)
    r = sphere_reproduce_residual(params, pair)
    return [Row("reproduce residual", k, pr["tol"], r)]


@experiment("e2-kernel", "E(2) reduced kernel with a surface-constant fiducial",
            f"{PKG}.models.sphere.e2_reduced_kernel", delta=0.2, tol=1e-3)
def _e2(pr, seed):
    from .models.sphere import e2_kernel, e2_reproduce_residual

    pair = (np.array([0.4, -0.3, 0.2]), np.array([-0.2, 0.5, 1.1]))
    return [Row("reproduce residual", e2_kernel(pr["delta"])(*pair), pr["tol"],
                e2_reproduce_residual(pr["delta"], pair))]


@experiment("hypersphere-kernel", "Second-class kernel for the radial profile in two dimensions",
            f"{PKG}.models.sphere.hypersphere_second_class_kernel", delta=0.1, tol=1e-3)
def _hyper(pr, seed):
    from .models.sphere import GaussianBump, hypersphere_kernel, hypersphere_reproduce_residual

    zeta = GaussianBump(pr["delta"] / 2)
    pair = (np.array([0.3, -0.2, 0.5, 0.4]), np.array([-0.1, 0.4, -0.3, 0.6]))
    return [Row("reproduce residual", hypersphere_kernel(zeta)(*pair), pr["tol"],
                hypersphere_reproduce_residual(zeta, pair))]


@experiment("surface-constant", "Angular norm of the E(2) fiducial is independent of the radius",
            f"{PKG}.models.sphere.surface_constant_profile", delta=0.2, radii=5, tol=1e-8)
def _surface(pr, seed):
    from .models.sphere import SurfaceConstantFiducial, surface_constant_profile

    radii = np.sqrt(np.linspace(1 - pr["delta"], 1 + pr["delta"], pr["radii"]))
    prof = surface_constant_profile(SurfaceConstantFiducial(), radii)
    spread = float(prof.max() - prof.min())
    return [Row("max − min", complex(prof.mean()), pr["tol"], spread)]


def catalogue() -> list:
    """Experiments in registration order."""
    return list(REGISTRY.values())
