"""
Kernels for a particle held near the unit circle
================================================

Three kernels built from ``<x|p,q> = e^{ip·x} η(x − q)`` in the plane: the
shell projection ``|x² − 1| < δ``, its E(2) reduction to ``q`` on the circle,
and a second-class version with a fixed radial profile.  Each reproduces
itself under the natural measure.
"""

import numpy as np

from coherent_constraints.models.sphere import (
    GaussianBump,
    SphereKernelParams,
    SurfaceConstantFiducial,
    e2_reproduce_residual,
    hypersphere_reproduce_residual,
    sphere_reproduce_residual,
    surface_constant_profile,
)

pair4 = ([0.4, -0.3, 0.5, 0.2], [0.0, 0.6, -0.4, 0.7])
print(f"shell kernel reproducing residual   {sphere_reproduce_residual(SphereKernelParams(), pair4):.2e}")

eta = SurfaceConstantFiducial()
radii = np.linspace(np.sqrt(0.8), np.sqrt(1.2), 5)
print("angular norm of the E(2) fiducial:", np.array2string(surface_constant_profile(eta, radii), precision=14))
print(f"E(2) kernel reproducing residual    {e2_reproduce_residual(0.2, ([0.3, -0.2, 0.4], [-0.1, 0.5, 2.0])):.2e}")

print(f"radial-profile kernel residual      {hypersphere_reproduce_residual(GaussianBump(0.05), pair4):.2e}")
