"""Composite Gauss-Legendre rules and refinement loops."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import NumericWarning


def gauss_legendre(a: float, b: float, panels: int = 1, order: int = 16):
    """Nodes and weights of a composite Gauss-Legendre rule on ``[a, b]``."""
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def periodic_trapezoid(n: int, period: float = 2 * np.pi, start: float = 0.0):
    """Equispaced rule, spectrally accurate for smooth periodic integrands."""
    nodes = start + period * np.arange(n) / n
    return nodes, np.full(n, period / n)


@dataclass(frozen=True)
class BoxMeasure:
    """Tensor Gauss-Legendre rule over a box with a constant density.

    ``lows``/``highs`` give the box per coordinate; ``density`` multiplies
    every weight (``1/(2π)^J`` for the coherent-state measure).
    """

    lows: tuple
    highs: tuple
    density: float = 1.0
    panels: int = 4
    order: int = 16

    def nodes(self, panels=None):
        panels = panels or self.panels
        axes = [gauss_legendre(lo, hi, panels, self.order) for lo, hi in zip(self.lows, self.highs)]
        grids = np.meshgrid(*[ax[0] for ax in axes], indexing="ij")
        wgrids = np.meshgrid(*[ax[1] for ax in axes], indexing="ij")
        pts = np.stack([g.ravel() for g in grids], axis=1)
        wts = np.prod(np.stack([g.ravel() for g in wgrids], axis=1), axis=1) * self.density
        return pts, wts

    def refined(self, factor: int = 2) -> "BoxMeasure":
        return BoxMeasure(self.lows, self.highs, self.density, self.panels * factor, self.order)


def phase_space_measure(half_width: float, modes: int = 1, panels: int = 4, order: int = 16,
                        center=None) -> BoxMeasure:
    """Box approximation of ``d^Jp d^Jq / (2π)^J``; coordinates ordered ``(p, q)``."""
    center = np.zeros(2 * modes) if center is None else np.asarray(center, float)
    lows = tuple(center - half_width)
    highs = tuple(center + half_width)
    return BoxMeasure(lows, highs, (2 * np.pi) ** (-modes), panels, order)


def refine_until(evaluate, start: int, tol: float, max_doublings: int = 6, what: str = "quadrature"):
    """Double a resolution parameter until two successive results agree.

    ``evaluate(n)`` returns an array-like.  Returns ``(value, change, n)``;
    issues ``NumericWarning`` with the last two values when it gives up.
    """
    n = start
    prev = np.asarray(evaluate(n))
    change = np.inf
    for _ in range(max_doublings):
        n *= 2
        cur = np.asarray(evaluate(n))
        change = float(np.max(np.abs(cur - prev))) if cur.size else 0.0
        if change < tol:
            return cur, change, n
        prev = cur
    warnings.warn(
        f"{what} did not converge: last change {change:.3e} > {tol:.1e} "
        f"(last two values {np.ravel(prev)[:1]} / {np.ravel(cur)[:1]})",
        NumericWarning,
        stacklevel=2,
    )
    return cur, change, n
