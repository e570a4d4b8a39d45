"""
Projecting onto P ≈ 0 and shrinking the window
===============================================

One degree of freedom, one constraint ``P``.  The projector onto
``|P| < δ`` turns the coherent-state overlap into a narrow momentum
integral; dividing by ``δ`` and letting ``δ → 0`` leaves a kernel that has
forgotten ``q`` altogether.
"""

import numpy as np

from coherent_constraints.models.momentum import (
    fock_spectral_sandwich,
    oracle_limit_kernel,
    oracle_projected_P_kernel,
    projected_P_kernel,
)
from coherent_constraints.rkhs import reduce_limit_delta

pair = ((0.4, 1.0), (-0.3, 0.2))

# The integral form and a sandwich with truncated Fock vectors agree.
for delta in (0.2, 0.1, 0.05):
    exact, leading = oracle_projected_P_kernel(pair, delta)
    fock = fock_spectral_sandwich(pair, delta)
    print(f"delta={delta:<5} integral={exact:.10f}  fock={fock:.10f}  leading-order gap={abs(exact - leading):.2e}")

# Fit the power of δ from the diagonal and extrapolate.
res = reduce_limit_delta(projected_P_kernel, 0.2, (0.0, 0.0), prefactor=np.sqrt(np.pi) / 2)
print(f"\nfitted power {res.sigma_fit:.4f} -> sigma = {res.sigma}")

# q no longer matters: only exp(-(p''^2 + p'^2)/2) survives
for q2, q1 in [(0.0, 0.0), (3.0, -1.0), (-2.0, 5.0)]:
    a, b = (0.5, q2), (-0.2, q1)
    print(f"q''={q2:+.1f} q'={q1:+.1f}: limit {res.kernel(a, b).real:.8f}  oracle {oracle_limit_kernel((a, b)).real:.8f}")
