"""One degree of freedom with the second-class pair ``p = 1``, ``q = 2``.

The constraint subspace is spanned by the single minimum-uncertainty state
``|1,2>``, so the projected propagator collapses to overlaps with that
state times the phase ``e^{−iH(1,2)T}``.  With ``H = :½P² + ¼Q⁴:`` the
diagonal coherent expectation is the classical symbol, so
``H(1,2) = ½ + 4 = 4.5``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..coherent import CoherentLabel, coherent_vector, label, overlap_closed
from ..errors import ContractError
from ..fock import OperatorMatrix, TruncationSpec, hermitian_eig, normal_ordered_power
from ..projector import Projector, rank1_min_uncertainty, weyl_integral_projector

TARGET = (1.0, 2.0)


def hamiltonian_symbol(p: float, q: float) -> float:
    """Classical ``½p² + ¼q⁴``."""
    return 0.5 * p**2 + 0.25 * q**4


def second_class_hamiltonian(spec: TruncationSpec) -> OperatorMatrix:
    """``:½P² + ¼Q⁴:`` in a one-mode truncation."""
    h = 0.5 * normal_ordered_power(spec, 0, "P", 2).entries + 0.25 * normal_ordered_power(spec, 0, "Q", 4).entries
    return OperatorMatrix(0.5 * (h + h.conj().T), hermitian=True, label="H_second_class")


@dataclass(frozen=True)
class SecondClassSystem:
    spec: TruncationSpec
    target: CoherentLabel
    H: OperatorMatrix
    E: Projector


def second_class_system(levels: int = 40) -> SecondClassSystem:
    """Truncation, target state, Hamiltonian and rank-1 projector."""
    spec = TruncationSpec(1, levels)
    target = label(*TARGET)
    return SecondClassSystem(spec, target, second_class_hamiltonian(spec), rank1_min_uncertainty(target, spec))


def _as_label(item) -> CoherentLabel:
    if isinstance(item, CoherentLabel):
        return item
    p, q = item
    return label(p, q)


def second_class_full(pair, T: float) -> complex:
    """``<p'',q''|1,2><1,2|p',q'> e^{−iH(1,2)T}`` from closed-form overlaps."""
    l2, l1 = (_as_label(x) for x in pair)
    t = label(*TARGET)
    return complex(overlap_closed(l2, t) * overlap_closed(t, l1) * np.exp(-1j * hamiltonian_symbol(*TARGET) * T))


def random_path(pair, links: int, rng: np.random.Generator, spread: float = 3.0) -> np.ndarray:
    """``(links+1) × 2`` array of ``(p, q)`` with fixed endpoints and random interior points."""
    if links < 1:
        raise ContractError("a path needs at least one link")
    l2, l1 = (_as_label(x) for x in pair)
    pts = rng.uniform(-spread, spread, size=(links + 1, 2))
    pts[0] = (l1.p[0], l1.q[0])
    pts[-1] = (l2.p[0], l2.q[0])
    return pts


def path_action(path, T: float, system: SecondClassSystem | None = None) -> float:
    """Lattice action of the projected path integral along ``path``.

    The kinetic part is ``Σ_l arg <l+1|E|l>``; the dynamical part is
    ``ε Σ_l <l|EHE|l>/<l|E|l>`` with ``ε = T/links``.  Both are evaluated
    with truncated Fock vectors projected onto the range of ``E``.  For a
    rank-1 ``E`` the interior phases cancel in pairs, leaving a value that
    depends only on the endpoints.
    """
    system = system or second_class_system()
    path = np.asarray(path, dtype=float)
    links = len(path) - 1
    eps = T / links
    # work in an orthonormal basis of the range of E: far-off path points have
    # tiny overlaps, and coordinates in the range keep full relative accuracy
    w, v = hermitian_eig(system.E.matrix)
    u = v.entries[:, w > 0.5]
    h_range = u.conj().T @ system.H.entries @ u
    coords = [u.conj().T @ coherent_vector(label(p, q), system.spec) for p, q in path]
    kinetic = sum(np.angle(np.vdot(coords[l + 1], coords[l])) for l in range(links))
    energy = sum((np.vdot(c, h_range @ c) / np.vdot(c, c)).real for c in coords[:links])
    return float(kinetic - eps * energy)


def expected_action(pair, T: float) -> float:
    """``arg<p'',q''|1,2> + arg<1,2|p',q'> − H(1,2)T``."""
    l2, l1 = (_as_label(x) for x in pair)
    t = label(*TARGET)
    return float(np.angle(overlap_closed(l2, t)) + np.angle(overlap_closed(t, l1))
                 - hamiltonian_symbol(*TARGET) * T)


def wrapped_difference(a: float, b: float) -> float:
    """``|a − b|`` modulo ``2π``."""
    d = (a - b + np.pi) % (2 * np.pi) - np.pi
    return float(abs(d))


def path_integral_value(path, T: float, system: SecondClassSystem | None = None) -> complex:
    """``|<p'',q''|1,2>| |<1,2|p',q'>| e^{i·action}`` along one path."""
    system = system or second_class_system()
    t = coherent_vector(system.target, system.spec)
    v2 = coherent_vector(label(*path[-1]), system.spec)
    v1 = coherent_vector(label(*path[0]), system.spec)
    mod = abs(np.vdot(v2, t)) * abs(np.vdot(t, v1))
    return complex(mod * np.exp(1j * path_action(path, T, system)))


def weyl_projector_error(levels: int = 40, half_width: float = 12.0) -> float:
    """Max entry difference between the Weyl-integral ``E`` and ``|1,2><1,2|``."""
    system = second_class_system(levels)
    w = weyl_integral_projector(system.target, levels, half_width)
    return float(np.max(np.abs(w.entries - system.E.matrix.entries)))
