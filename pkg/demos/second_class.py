"""
Second-class constraints P = 1, Q = 2
=====================================

No state satisfies both constraints exactly; the best one can do is the
single minimum-uncertainty state ``|1,2>``.  The projected propagator is then
two overlaps and one phase, ``e^{−iH(1,2)T}`` with ``H(1,2) = 4.5`` for
``H = :½P² + ¼Q⁴:``.
"""

import numpy as np

from coherent_constraints.coherent import label
from coherent_constraints.models.second_class import (
    expected_action,
    path_action,
    random_path,
    second_class_full,
    second_class_system,
)
from coherent_constraints.propagator import exact_projected, reduced_evolution

system = second_class_system(40)
pair = ((0.5, 1.5), (1.2, 2.3))
labs = tuple(label(*x) for x in pair)

for T in (0.0, 0.5, 1.0):
    red = reduced_evolution(labs, system.H, system.E, T).value
    full = exact_projected(labs, system.H, system.E, T).value
    print(f"T={T}: reduced {red:.10f}  closed {second_class_full(pair, T):.10f}  unreduced {full:.6f}")

# The lattice action along any path depends only on its endpoints (mod 2π).
def wrap(a):
    return float(np.angle(np.exp(1j * a)))


rng = np.random.default_rng(3)
print(f"\nendpoint formula: {wrap(expected_action(pair, 0.8)):+.12f}")
for _ in range(4):
    path = random_path(pair, 7, rng)
    print(f"random path      {wrap(path_action(path, 0.8, system)):+.12f}")
