"""Two oscillators constrained to fixed total (or relative) excitation.

``Φ = :P₁²+P₂²+Q₁²+Q₂²: − 4s`` has spectrum ``2(n₁+n₂) − 4s``; its kernel
carries the spin-``s`` representation of SU(2).  The relative-number
constraint gives an infinite-dimensional analogue.
"""

from __future__ import annotations

import math

import numpy as np

from ..coherent import CoherentLabel
from ..errors import ContractError, DomainError
from ..fock import OperatorMatrix, TruncationSpec, build_canonical_ops, normal_ordered_power
from ..projector import Projector, group_average_u1

PERIOD = np.pi


def _two_mode(spec: TruncationSpec):
    if spec.modes != 2:
        raise ContractError("this example needs exactly two modes")


def su2_constraint(spec: TruncationSpec, s: float) -> OperatorMatrix:
    """``:P₁² + P₂² + Q₁² + Q₂²: − 4s`` in the truncation."""
    _two_mode(spec)
    total = sum(normal_ordered_power(spec, j, kind, 2).entries for j in (0, 1) for kind in ("P", "Q"))
    return OperatorMatrix(total - 4 * s * np.eye(spec.dim), hermitian=True, label=f"Phi_su2(s={s:g})")


def su2_projector(spec: TruncationSpec, s: float) -> Projector:
    """Group average of ``e^{iλΦ}`` over one period ``π``."""
    return group_average_u1(su2_constraint(spec, s), PERIOD)


def su2_generators(spec: TruncationSpec) -> dict:
    """Two-mode bilinear quantization of the rotation generators.

    ``S_x = (a₁†a₂ + a₂†a₁)/2``, ``S_y = (a₁†a₂ − a₂†a₁)/(2i)``,
    ``S_z = (a₁†a₁ − a₂†a₂)/2``.  Each preserves ``n₁ + n₂`` and so
    commutes with the constraint exactly, even in the truncation.
    """
    _two_mode(spec)
    ops = build_canonical_ops(spec)
    a1, a2 = ops[0].a.entries, ops[1].a.entries
    hop = a1.conj().T @ a2
    return {
        "Sx": OperatorMatrix(0.5 * (hop + hop.conj().T), hermitian=True, label="Sx"),
        "Sy": OperatorMatrix((hop - hop.conj().T) / 2j, hermitian=True, label="Sy"),
        "Sz": OperatorMatrix(0.5 * (ops[0].number.entries - ops[1].number.entries), hermitian=True,
                             label="Sz"),
    }


def su2_symbols(p, q) -> dict:
    """Classical generator functions on the two-oscillator phase space."""
    p1, p2 = p
    q1, q2 = q
    return {
        "Sx": 0.5 * (p1 * p2 + q1 * q2),
        "Sy": 0.5 * (q1 * p2 - p1 * q2),
        "Sz": 0.25 * (p1**2 + q1**2 - p2**2 - q2**2),
    }


def su2_hamiltonian(spec: TruncationSpec, coeffs=(0.3, 0.0, 1.0)) -> OperatorMatrix:
    """``c_x S_x + c_y S_y + c_z S_z``; compatible with the constraint."""
    g = su2_generators(spec)
    h = sum(c * g[k].entries for c, k in zip(coeffs, ("Sx", "Sy", "Sz")))
    return OperatorMatrix(h, hermitian=True, label="H_su2")


def _z_of(item):
    if isinstance(item, CoherentLabel):
        return item.z
    return np.asarray(item, dtype=complex).ravel()


def su2_projected_kernel(pair, s: float) -> complex:
    """``exp[−½Σ(|z''_j|²+|z'_j|²)] (z''*·z')^{2s}/(2s)!`` for standard ``|z>`` states."""
    two_s = 2 * s
    if two_s < 0 or abs(two_s - round(two_s)) > 1e-12:
        raise DomainError(f"2s must be a nonnegative integer, got {two_s!r}; the kernel vanishes")
    n = int(round(two_s))
    z2, z1 = _z_of(pair[0]), _z_of(pair[1])
    inner = np.vdot(z2, z1)
    norm = np.exp(-0.5 * (np.vdot(z2, z2).real + np.vdot(z1, z1).real))
    return complex(norm * inner**n / math.factorial(n))


def noncompact_u1_analogue_projector(k: int, spec: TruncationSpec) -> Projector:
    """Projector onto ``n₁ − n₂ = k`` via the constraint ``n₁ − n₂ − k``.

    The spectrum of the relative number is integer, so the period-``2π``
    group average applies.  In a truncation of ``N`` levels the rank is
    ``N − |k|`` and grows without bound as ``N`` does.
    """
    _two_mode(spec)
    if int(k) != k:
        raise DomainError("k must be an integer")
    ops = build_canonical_ops(spec)
    phi = ops[0].number.entries - ops[1].number.entries - k * np.eye(spec.dim)
    return group_average_u1(OperatorMatrix(phi, hermitian=True, label=f"n1-n2-{k}"), 2 * np.pi)
