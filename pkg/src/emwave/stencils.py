"""Centered finite-difference stencils shared by evolution and diagnostics.

Fields carry ghost zones on every axis; stencils are applied by slicing,
writing only where the full stencil fits.  One stencil order is chosen
per run (2 or 4); Kreiss-Oliger dissipation is two orders higher than
the derivative stencils.
"""

import numpy as np
from scipy.ndimage import correlate1d

# centered first/second derivative coefficients, offset -> weight
D1_COEFFS = {
    2: ((-1, -0.5), (1, 0.5)),
    4: ((-2, 1 / 12), (-1, -8 / 12), (1, 8 / 12), (2, -1 / 12)),
}
D2_COEFFS = {
    2: ((-1, 1.0), (0, -2.0), (1, 1.0)),
    4: ((-2, -1 / 12), (-1, 16 / 12), (0, -30 / 12),
        (1, 16 / 12), (2, -1 / 12)),
}
# undivided difference delta^{2r} for dissipation of order 2r
KO_COEFFS = {
    4: ((-2, 1.0), (-1, -4.0), (0, 6.0), (1, -4.0), (2, 1.0)),
    6: ((-3, 1.0), (-2, -6.0), (-1, 15.0), (0, -20.0),
        (1, 15.0), (2, -6.0), (3, 1.0)),
}


def stencil_radius(order):
    return order // 2


def ko_radius(order):
    return order // 2 + 1


def _weights(coeffs, radius):
    w = np.zeros(2 * radius + 1)
    for off, coef in coeffs:
        w[radius + off] = coef
    return w


_WEIGHT_CACHE = {}


def _apply(u, axis, dx_pow, coeffs, radius):
    """Correlate u with the stencil along axis; output valid wherever the
    stencil fits inside the array (the outer `radius` layers are edge
    artifacts and must not be read)."""
    key = (id(coeffs), radius)
    w = _WEIGHT_CACHE.get(key)
    if w is None:
        w = _weights(coeffs, radius)
        _WEIGHT_CACHE[key] = w
    out = correlate1d(u, w, axis=axis, mode="nearest")
    if dx_pow != 1.0:
        out /= dx_pow
    return out


def diff1(u, dx, axis, order=4):
    """First derivative along axis; valid in the stencil-radius core."""
    return _apply(u, axis, dx, D1_COEFFS[order], stencil_radius(order))


def diff2(u, dx, axis, order=4):
    """Second derivative along a single axis."""
    return _apply(u, axis, dx * dx, D2_COEFFS[order], stencil_radius(order))


def ko_dissipation(u, dx, sigma, order=4, axes=(-3, -2, -1)):
    """Kreiss-Oliger dissipation of order `order` + 2, summed over axes.

    Sign chosen so the term damps: for 4th-order stencils this is
    +sigma/64 * delta^6 u / dx per axis.
    """
    diss_order = order + 2
    r = diss_order // 2
    coeffs = KO_COEFFS[diss_order]
    scale = sigma * (-1.0) ** (r + 1) / (2.0 ** diss_order * dx)
    out = np.zeros_like(u)
    for ax in axes:
        out += _apply(u, ax, 1.0, coeffs, r)
    return scale * out
