"""
Lagrange multipliers that do and do not matter
==============================================

With a discrete constraint spectrum the projector is exact and any
multiplier schedule gives the same propagator.  For the coupled
oscillator/particle model the constraint spectrum is continuous, the
projector only approximate, and schedules leak into the answer at order δ.
"""

import numpy as np

from coherent_constraints.acceptance import flpr_label_sets
from coherent_constraints.coherent import CoherentLabel, PhaseConvention
from coherent_constraints.fock import TruncationSpec
from coherent_constraints.models.flpr import FLPRParams, flpr_gauge_leakage
from coherent_constraints.models.su2 import su2_constraint, su2_hamiltonian, su2_projector
from coherent_constraints.projector import ConstraintSpec
from coherent_constraints.propagator import LambdaSchedule, exact_projected, lambda_scheduled

spec = TruncationSpec(2, 10)
half = PhaseConvention.ALPHA_PQ_HALF
a = CoherentLabel((0.3, -0.2), (0.4, 0.1), half)
b = CoherentLabel((-0.1, 0.25), (0.2, -0.3), half)
H, E = su2_hamiltonian(spec), su2_projector(spec, 1.0)
phis = ConstraintSpec(su2_constraint(spec, 1.0), 0.5)
base = exact_projected((a, b), H, E.matrix, 1.0).value
devs = [abs(lambda_scheduled((a, b), H, phis, LambdaSchedule.random(16, 1, seed, 3.0), E.matrix, 1.0).value - base)
        for seed in range(5)]
print(f"spin-1 subspace: largest deviation over 5 schedules {max(devs):.2e}")

l2, l1 = flpr_label_sets()[0]
scheds = [LambdaSchedule.random(16, 1, seed, scale=3.0) for seed in range(3)]
deltas = [0.2, 0.1, 0.05]
leak = [flpr_gauge_leakage(l2, l1, FLPRParams(2.5, 1.0, d, 12), 0.5, scheds)["state"] for d in deltas]
for d, x in zip(deltas, leak):
    print(f"coupled model, delta={d:<5} schedule dependence {x:.3e}")
print(f"log-log slope {np.polyfit(np.log(deltas), np.log(leak), 1)[0]:.3f}")
