"""
A finite-dimensional subspace from two oscillators
==================================================

The constraint ``:P₁²+P₂²+Q₁²+Q₂²: − 4s`` has spectrum ``2(n₁+n₂) − 4s``,
so averaging ``e^{iλΦ}`` over one period keeps exactly the states with
``n₁ + n₂ = 2s``.  That is ``2s + 1`` states when ``2s`` is an integer and
nothing otherwise.
"""

import numpy as np

from coherent_constraints.coherent import CoherentLabel, PhaseConvention, coherent_vector
from coherent_constraints.fock import TruncationSpec
from coherent_constraints.models.su2 import (
    noncompact_u1_analogue_projector,
    su2_projected_kernel,
    su2_projector,
)

spec = TruncationSpec(2, 12)

for s in (0.0, 0.5, 1.0, 1.5, 0.35):
    E = su2_projector(spec, s)
    print(f"s={s:<4}  rank={E.rank}")

# The projected overlap has a closed form in the complex labels z = (q + ip)/√2.
half = PhaseConvention.ALPHA_PQ_HALF
a = CoherentLabel((0.3, -0.5), (0.6, 0.2), half)
b = CoherentLabel((-0.4, 0.1), (0.2, 0.7), half)
E = su2_projector(spec, 1.0).matrix.entries
numeric = np.vdot(coherent_vector(a, spec), E @ coherent_vector(b, spec))
print(f"\n<a|E|b> numeric {numeric:.12f}\n        closed  {su2_projected_kernel((a, b), 1.0):.12f}")

# Fixing n₁ − n₂ instead gives a subspace that grows with the truncation.
for n in (6, 12, 24):
    print(f"N={n:<3} rank of n1 - n2 = 0 projector: {noncompact_u1_analogue_projector(0, TruncationSpec(2, n)).rank}")
