"""Modified Bessel functions of integer order for complex argument.

Backward (Miller) recurrence, normalized with ``e^z = I_0(z) + 2 Σ_k I_k(z)``.
scipy's ``iv`` is used only in the tests, as an independent reference.
"""

from __future__ import annotations

import math

import numpy as np


def _start_order(m: int, z_abs: float) -> int:
    # enough headroom that the recurrence seed error is far below 1e-16
    return int(max(m, z_abs) + 30 + 2 * math.sqrt(max(m, z_abs) * 40 + 1))


def _series(m_max: int, z: complex) -> np.ndarray:
    # I_m(z) = Σ_k (z/2)^{2k+m} / (k! (k+m)!); for |z| < 1 twenty terms reach round-off
    h = z / 2
    out = np.zeros(m_max + 1, dtype=complex)
    lead = 1.0 + 0j  # (z/2)^m / m!
    for m in range(m_max + 1):
        if lead == 0:
            break
        term, total = lead, lead
        for k in range(1, 20):
            term = term * h * h / (k * (k + m))
            total += term
        out[m] = total
        lead = lead * h / (m + 1)
    return out


def bessel_i_all(m_max: int, z: complex) -> np.ndarray:
    """``[I_0(z), ..., I_{m_max}(z)]`` for complex ``z``.

    For ``Re z < 0`` the reflection ``I_m(z) = (−1)^m I_m(−z)`` is applied so
    the normalization sum never suffers cancellation.
    """
    if m_max < 0:
        raise ValueError("m_max must be nonnegative")
    z = complex(z)
    if z == 0:
        out = np.zeros(m_max + 1, dtype=complex)
        out[0] = 1.0
        return out
    if abs(z) < 1.0:
        return _series(m_max, z)
    if z.real < 0:
        out = bessel_i_all(m_max, -z)
        return out * (-1.0) ** np.arange(m_max + 1)
    top = _start_order(m_max, abs(z))
    vals = np.zeros(top + 2, dtype=complex)
    vals[top] = 1e-30
    total = 0j
    for k in range(top, 0, -1):
        vals[k - 1] = vals[k + 1] + (2.0 * k / z) * vals[k]
        # rescale to avoid overflow for large top / small |z|
        if abs(vals[k - 1]) > 1e250:
            vals[k - 1:] *= 1e-250
            total *= 1e-250
        total += 2 * vals[k]
    total += vals[0]
    # e^z = I_0 + 2 Σ I_k
    scale = np.exp(z) / total
    return vals[: m_max + 1] * scale


def bessel_i(m: int, z: complex) -> complex:
    """``I_m(z)`` for integer ``m`` (negative orders use ``I_{-m} = I_m``)."""
    return complex(bessel_i_all(abs(int(m)), z)[abs(int(m))])
