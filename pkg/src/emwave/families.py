"""Analytic initial-data families evaluated pointwise on the grid.

Every family is a closed-form field configuration, so the produced data
are resolution independent: refining the grid samples the same smooth
functions instead of re-deriving them with stencils.  All profiles use
the compactly supported polynomial bump

    phi(x) = (1 - r^2 / R^2)^p   for r < R,   0 otherwise,

which is C^{p-1} across the support boundary.

Families:
  flat            -- vanishing perturbation everywhere.
  conformal       -- conformally flat 3-metric gbar = (1 + eps phi) delta.
  maxwell_packet  -- divergence-free vector potential and electric field
                     (curls of bump profiles), flat 3-metric.
  tt_pulse        -- transverse-traceless 3-metric perturbation chi built
                     as a double curl of the symmetrized curl of
                     phi e1 (x) e1, which is exactly symmetric,
                     trace-free and divergence-free; optional traveling
                     version with K = (1/2) d_3 chi.

Amplitudes are normalized so the sup of the perturbation equals eps,
using a fixed reference lattice that does not depend on the target grid.
"""

import numpy as np

from .errors import ConfigError, DataError
from .initialdata import DELTA3, DataSet, S3_PAIRS


def bump(x, y, z, radius, power):
    """Compactly supported radial bump (1 - r^2/R^2)^p."""
    u = (x * x + y * y + z * z) / radius ** 2
    inside = u < 1.0
    out = np.zeros(np.broadcast(x, y, z).shape)
    out[inside] = (1.0 - u[inside]) ** power
    return out


def bump_gradient(x, y, z, radius, power):
    """Analytic gradient of the bump, shape (3,) + broadcast shape."""
    u = (x * x + y * y + z * z) / radius ** 2
    inside = u < 1.0
    shape = np.broadcast(x, y, z).shape
    fac = np.zeros(shape)
    fac[inside] = -2.0 * power / radius ** 2 * (1.0 - u[inside]) ** (power - 1)
    out = np.empty((3,) + shape)
    out[0] = fac * x
    out[1] = fac * y
    out[2] = fac * z
    return out


def bump_hessian(x, y, z, radius, power):
    """Analytic second derivatives of the bump, (3, 3) + broadcast shape."""
    u = (x * x + y * y + z * z) / radius ** 2
    inside = u < 1.0
    shape = np.broadcast(x, y, z).shape
    f1 = np.zeros(shape)
    f2 = np.zeros(shape)
    f1[inside] = -2.0 * power / radius ** 2 * (1.0 - u[inside]) ** (power - 1)
    f2[inside] = (4.0 * power * (power - 1) / radius ** 4
                  * (1.0 - u[inside]) ** (power - 2))
    xs = (x, y, z)
    out = np.empty((3, 3) + shape)
    for i in range(3):
        for j in range(3):
            out[i, j] = f2 * xs[i] * xs[j]
            if i == j:
                out[i, j] += f1
    return out


def flat_data(grid):
    z = np.zeros(grid.shape)
    g = np.zeros((6,) + grid.shape)
    g[:] = DELTA3.reshape(6, 1, 1, 1)
    return DataSet(gbar=g, K=np.zeros((6,) + grid.shape),
                   Aspace=np.zeros((3,) + grid.shape), A0=z.copy(),
                   E=np.zeros((3,) + grid.shape), N=np.ones(grid.shape))


def conformal_data(grid, eps, radius=2.0, power=8):
    """gbar = (1 + eps phi) delta, K = 0, vacuum Maxwell, unit lapse."""
    d = flat_data(grid)
    phi = bump(grid.X, grid.Y, grid.Z, radius, power)
    conf = 1.0 + eps * phi
    if np.min(conf) <= 0.0:
        raise DataError(f"conformal factor nonpositive: eps = {eps:g}")
    gphi = bump_gradient(grid.X, grid.Y, grid.Z, radius, power)
    d.dgbar = np.zeros((3, 6) + grid.shape)
    for k, (i, j) in enumerate(S3_PAIRS):
        if i == j:
            d.gbar[k] = conf
            d.dgbar[:, k] = eps * gphi
    return d


def maxwell_packet_data(grid, eps, radius=2.0, power=8):
    """Divergence-free potential and electric field in a flat 3-metric.

    Abar = eps * (grad phi x zhat) / s_A and Ebar likewise from a second
    bump; both are exactly divergence free.  The constraints are then
    violated only at second order in eps (the Hamiltonian picks up the
    field energy density).
    """
    d = flat_data(grid)
    gphi = bump_gradient(grid.X, grid.Y, grid.Z, radius, power)
    gpsi = bump_gradient(grid.X, grid.Y, grid.Z, radius, power + 1)
    sa = _curl_scale(radius, power)
    se = _curl_scale(radius, power + 1)
    # grad x zhat = (d_y, -d_x, 0)
    d.Aspace[0] = eps * gphi[1] / sa
    d.Aspace[1] = -eps * gphi[0] / sa
    d.E[0] = eps * gpsi[1] / se
    d.E[1] = -eps * gpsi[0] / se
    hphi = bump_hessian(grid.X, grid.Y, grid.Z, radius, power)
    d.dAspace = np.zeros((3, 3) + grid.shape)
    for i in range(3):
        d.dAspace[i, 0] = eps * hphi[i, 1] / sa
        d.dAspace[i, 1] = -eps * hphi[i, 0] / sa
    return d


_SCALE_CACHE = {}


def _reference_lattice(radius, m=81):
    c = np.linspace(-radius, radius, m)
    return np.meshgrid(c, c, c, indexing="ij")


def _curl_scale(radius, power):
    key = ("curl", radius, power)
    if key not in _SCALE_CACHE:
        X, Y, Z = _reference_lattice(radius)
        g = bump_gradient(X, Y, Z, radius, power)
        mag = np.sqrt(g[0] ** 2 + g[1] ** 2)
        _SCALE_CACHE[key] = float(mag.max())
    return _SCALE_CACHE[key]


def _tt_functions(radius, power):
    """Lambdified components of the unit-amplitude TT tensor chi_ij.

    chi_ij = eps3_iab eps3_jcd d_a d_c S_bd with
    S_bd = sym(eps3_bkl d_k T_ld), T = phi e1 (x) e1.  Each component is
    a polynomial in x times the bump factor; exact symmetry, trace
    freedom and transversality follow from the curl structure.
    """
    key = ("tt", radius, power)
    if key in _SCALE_CACHE:
        return _SCALE_CACHE[key]
    import sympy as sp
    xs = sp.symbols("x1 x2 x3")
    r2 = sum(c ** 2 for c in xs)
    phi = (1 - r2 / sp.Rational(radius) ** 2) ** power
    T = sp.zeros(3, 3)
    T[0, 0] = phi
    lc = sp.LeviCivita
    S = sp.zeros(3, 3)
    for b in range(3):
        for dd in range(3):
            acc = 0
            for k in range(3):
                for l in range(3):
                    acc += (lc(b + 1, k + 1, l + 1) * sp.diff(T[l, dd], xs[k])
                            + lc(dd + 1, k + 1, l + 1)
                            * sp.diff(T[l, b], xs[k]))
            S[b, dd] = sp.Rational(1, 2) * acc
    # cache the second derivatives of S; expressions stay factored, which
    # keeps differentiation and lambdification cheap
    d2S = {}
    for b in range(3):
        for dd in range(3):
            if S[b, dd] == 0:
                continue
            dS = [sp.diff(S[b, dd], xs[a]) for a in range(3)]
            for a in range(3):
                for c in range(3):
                    d2S[(b, dd, a, c)] = sp.diff(dS[a], xs[c])
    funcs = []
    gradfuncs = []
    for (i, j) in S3_PAIRS:
        comp = 0
        for a in range(3):
            for b in range(3):
                for c in range(3):
                    for dd in range(3):
                        w = lc(i + 1, a + 1, b + 1) * lc(j + 1, c + 1, dd + 1)
                        if w != 0 and (b, dd, a, c) in d2S:
                            comp += w * d2S[(b, dd, a, c)]
        funcs.append(sp.lambdify(xs, comp, "numpy", cse=True))
        gradfuncs.append([sp.lambdify(xs, sp.diff(comp, xv), "numpy",
                                      cse=True) for xv in xs])
    # normalization from a fixed reference lattice
    X, Y, Z = _reference_lattice(radius)
    inside = X * X + Y * Y + Z * Z < radius ** 2
    peak = 0.0
    for f in funcs:
        vals = np.asarray(f(X, Y, Z), dtype=float)
        peak = max(peak, float(np.abs(np.where(inside, vals, 0.0)).max()))
    if peak == 0.0:
        raise DataError("transverse-traceless profile vanished identically")
    _SCALE_CACHE[key] = (funcs, gradfuncs, peak)
    return _SCALE_CACHE[key]


def tt_pulse_data(grid, eps, radius=2.0, power=12, moving=False):
    """Transverse-traceless metric pulse gbar = delta + eps chi.

    With moving=True the pulse carries the extrinsic curvature of a
    profile traveling in the +z direction, K = (1/2) d_3 chi; otherwise
    it is momentarily static (K = 0).  Either choice satisfies the
    constraints to first order in eps.
    """
    funcs, gradfuncs, peak = _tt_functions(radius, power)
    d = flat_data(grid)
    inside = grid.X ** 2 + grid.Y ** 2 + grid.Z ** 2 < radius ** 2
    amp = eps / peak
    d.dgbar = np.zeros((3, 6) + grid.shape)
    for k in range(6):
        vals = np.asarray(funcs[k](grid.X, grid.Y, grid.Z), dtype=float)
        d.gbar[k] += amp * np.where(inside, vals, 0.0)
        for ax in range(3):
            dv = np.asarray(gradfuncs[k][ax](grid.X, grid.Y, grid.Z),
                            dtype=float)
            d.dgbar[ax, k] = amp * np.where(inside, dv, 0.0)
        if moving:
            d.K[k] = 0.5 * d.dgbar[2, k]
    return d


FAMILIES = {
    "flat": flat_data,
    "conformal": conformal_data,
    "maxwell_packet": maxwell_packet_data,
    "tt_pulse": tt_pulse_data,
}


def make_data(family, grid, **params):
    """Build the named family on the grid; unknown names raise ConfigError."""
    try:
        builder = FAMILIES[family]
    except KeyError:
        raise ConfigError(
            f"unknown family {family!r}; known: {sorted(FAMILIES)}") from None
    try:
        return builder(grid, **params)
    except TypeError as exc:
        raise ConfigError(f"bad parameters for family {family!r}: {exc}")
