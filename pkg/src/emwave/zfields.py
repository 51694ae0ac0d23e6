"""Commuting vector fields of the flat wave operator and their grid action.

The 11-member family consists of the four translations d_alpha, the six
rotations/boosts Omega_ab = -x_a d_b + x_b d_a (indices lowered with the
Minkowski metric, so x_0 = -t and Omega_0i = t d_i + x_i d_t), and the
scaling S = t d_t + r d_r.  All have polynomial coefficients of degree at
most one, so repeated application is carried out exactly in an operator
algebra: an operator is a map from an unordered derivative multi-index
to a polynomial in (t, x, y, z), and left-composition with a first-order
field uses the product rule on the coefficients.

Grid evaluation substitutes a jet of the evolved fields: spatial
derivatives come from stencils, the first time derivative is the stored
v, and higher time derivatives are produced by substituting the
evolution equation (and, at third order, its directional derivative
along the flow).
"""

import itertools
from dataclasses import dataclass

import numpy as np

from . import stencils
from .errors import ConfigError, StateError
from .evolution import (fill_ghosts, laplacian, second_time_derivative,
                        spatial_gradient, spatial_hessian)

# ---------------------------------------------------------------------------
# exact polynomials in (t, x, y, z)


class Poly(dict):
    """Polynomial with float coefficients, keyed by exponent 4-tuples."""

    @classmethod
    def const(cls, c):
        return cls({(0, 0, 0, 0): float(c)}) if c else cls()

    @classmethod
    def var(cls, axis, coef=1.0):
        e = [0, 0, 0, 0]
        e[axis] = 1
        return cls({tuple(e): float(coef)})

    def __add__(self, other):
        out = Poly(self)
        for e, c in other.items():
            out[e] = out.get(e, 0.0) + c
            if out[e] == 0.0:
                del out[e]
        return out

    def scaled(self, s):
        return Poly({e: c * s for e, c in self.items()}) if s else Poly()

    def mul(self, other):
        out = Poly()
        for e1, c1 in self.items():
            for e2, c2 in other.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0.0) + c1 * c2
        return Poly({e: c for e, c in out.items() if c != 0.0})

    def diff(self, axis):
        out = Poly()
        for e, c in self.items():
            if e[axis]:
                ne = list(e)
                ne[axis] -= 1
                out[tuple(ne)] = out.get(tuple(ne), 0.0) + c * e[axis]
        return out

    def evaluate(self, t, X, Y, Z):
        vals = 0.0
        for (pt, px, py, pz), c in self.items():
            term = c
            if pt:
                term = term * t ** pt
            if px:
                term = term * X ** px
            if py:
                term = term * Y ** py
            if pz:
                term = term * Z ** pz
            vals = vals + term
        return vals


# ---------------------------------------------------------------------------
# differential operators with polynomial coefficients


class DiffOp(dict):
    """Map from sorted derivative tuples (axes in 0..3) to Poly."""

    def order(self):
        return max((len(k) for k in self), default=0)

    def __add__(self, other):
        out = DiffOp(self)
        for k, p in other.items():
            out[k] = out[k] + p if k in out else p
        return DiffOp({k: p for k, p in out.items() if p})


def first_order(coeffs):
    """Build a first-order operator from {axis: Poly}."""
    return DiffOp({(a,): p for a, p in coeffs.items() if p})


def left_compose(z, op):
    """z o op for a purely first-order z: sum_d p_d d_d (q_b d^b)."""
    out = DiffOp()
    for (d,), p in z.items():
        for key, q in op.items():
            dq = q.diff(d)
            if dq:
                out[key] = out[key] + p.mul(dq) if key in out else p.mul(dq)
            nk = tuple(sorted(key + (d,)))
            pq = p.mul(q)
            out[nk] = out[nk] + pq if nk in out else pq
    return DiffOp({k: p for k, p in out.items() if p})


def _build_fields():
    one = Poly.const(1.0)
    t = Poly.var(0)
    xs = [Poly.var(i) for i in (1, 2, 3)]
    fields = {}
    order = []
    for a in range(4):
        name = f"d{a}"
        fields[name] = first_order({a: one})
        order.append(name)
    # boosts Omega_0i = t d_i + x_i d_t
    for i in range(3):
        name = f"b{i + 1}"
        fields[name] = first_order({i + 1: t, 0: xs[i]})
        order.append(name)
    # rotations Omega_ij = -x_i d_j + x_j d_i, i < j spatial
    for i in range(3):
        for j in range(i + 1, 3):
            name = f"r{i + 1}{j + 1}"
            fields[name] = first_order({j + 1: xs[i].scaled(-1.0),
                                        i + 1: xs[j]})
            order.append(name)
    # scaling S = t d_t + x^i d_i
    fields["s"] = first_order({0: t, 1: xs[0], 2: xs[1], 3: xs[2]})
    order.append("s")
    return fields, tuple(order)


Z_FIELDS, Z_ORDER = _build_fields()

# commutator constants: [box, Z] = c_Z box
COMMUTATOR_WEIGHT = {name: (2.0 if name == "s" else 0.0) for name in Z_ORDER}

IDENTITY = DiffOp({(): Poly.const(1.0)})


def compose_word(word):
    """Operator for the ordered word Z^{i1} ... Z^{ik} (applied rightmost
    first)."""
    op = IDENTITY
    for name in reversed(word):
        if name not in Z_FIELDS:
            raise ConfigError(f"unknown vector field {name!r}")
        op = left_compose(Z_FIELDS[name], op)
    return op


def words_up_to(n):
    """All ordered words of length <= n over the 11 fields."""
    out = [()]
    for k in range(1, n + 1):
        out.extend(itertools.product(Z_ORDER, repeat=k))
    return out


# ---------------------------------------------------------------------------
# jets of the evolved fields


def build_jet(state, grid, params, physics, depth, fd_step=1e-5):
    """Derivatives of u up to total order `depth` (max 3), ghost-filled.

    Returns {sorted axis tuple: (14,) + grid.shape}.  Time derivatives
    beyond the stored v substitute the evolution equation; the third
    time derivative uses a centered directional difference of the
    equation along the flow (u, v) -> (v, d_t v), step fd_step relative
    to the field scale.
    """
    if depth < 1 or depth > 3:
        raise ConfigError(f"jet depth {depth} unsupported (1..3)")
    u = state.u.copy()
    v = state.v.copy()
    fill_ghosts(u, grid, params.boundary)
    fill_ghosts(v, grid, params.boundary)
    order = params.order
    jet = {(): u, (0,): v}
    grad_u = spatial_gradient(u, grid, order)
    for i in range(3):
        jet[(i + 1,)] = grad_u[i]
    if depth == 1:
        return jet

    grad_v = spatial_gradient(v, grid, order)
    hess_u = spatial_hessian(u, grid, order, grad=grad_u)
    from .evolution import HESS_INDEX
    for i in range(3):
        jet[(0, i + 1)] = grad_v[i]
        for j in range(i, 3):
            jet[tuple(sorted((i + 1, j + 1)))] = hess_u[HESS_INDEX[(i, j)]]
    dtt = _equation_dtt(u, v, grad_u, grad_v, hess_u, grid, params, physics)
    jet[(0, 0)] = dtt
    if depth == 2:
        return jet

    # third order
    grad_dtt = spatial_gradient(dtt, grid, order)
    hess_v = spatial_hessian(v, grid, order, grad=grad_v)
    for i in range(3):
        jet[(0, 0, i + 1)] = grad_dtt[i]
        for j in range(i, 3):
            jet[tuple(sorted((0, i + 1, j + 1)))] = hess_v[HESS_INDEX[(i, j)]]
            for k in range(j, 3):
                jet[tuple(sorted((i + 1, j + 1, k + 1)))] = stencils.diff1(
                    hess_u[HESS_INDEX[(j, k)]], grid.dx, (-3, -2, -1)[i],
                    order)
    if physics is not None and not physics.linearize and np.any(u):
        scale = max(float(np.abs(u).max() + np.abs(v).max()), 1.0)
        s = fd_step * scale
        jet[(0, 0, 0)] = (_equation_dtt_at(u + s * v, v + s * dtt,
                                           grid, params, physics)
                          - _equation_dtt_at(u - s * v, v - s * dtt,
                                             grid, params, physics)) / (2 * s)
    else:
        # flat wave equation: d_t^3 u = Laplacian v
        lap_v = hess_v[0] + hess_v[3] + hess_v[5]
        if physics is not None and physics.freeze_h:
            from .evolution import H_SLICE
            lap_v[H_SLICE] = 0.0
        jet[(0, 0, 0)] = lap_v
    return jet


def _equation_dtt(u, v, grad_u, grad_v, hess_u, grid, params, physics):
    from .evolution import PhysicsOptions
    phys = physics if physics is not None else PhysicsOptions()
    return second_time_derivative(u, v, grad_u, grad_v, hess_u, phys,
                                  params.g00_guard)


def _equation_dtt_at(u, v, grid, params, physics):
    order = params.order
    grad_u = spatial_gradient(u, grid, order)
    grad_v = spatial_gradient(v, grid, order)
    hess_u = spatial_hessian(u, grid, order, grad=grad_u)
    return _equation_dtt(u, v, grad_u, grad_v, hess_u, grid, params, physics)


def apply_op(op, jet, grid, t):
    """Evaluate a DiffOp on a jet, returning a (14,) + grid.shape field."""
    need = op.order()
    have = max((len(k) for k in jet), default=0)
    if need > have:
        raise StateError(f"operator order {need} exceeds jet depth {have}")
    out = None
    for key, poly in op.items():
        coef = poly.evaluate(t, grid.X, grid.Y, grid.Z)
        term = coef * jet[key]
        out = term if out is None else out + term
    return out if out is not None else np.zeros_like(jet[()])


# ---------------------------------------------------------------------------
# commutator defect of the flat wave operator, by 4-d stencil sampling


def commutator_defect(name, func, grid, t0, order=4):
    """Sup-norm of box(Z u) - Z(box u) - c_Z box u for an analytic field.

    func(t, X, Y, Z) -> array over the grid; the field is sampled on a
    stack of time levels spaced by dx and differentiated with the same
    centered stencils in all four directions.  The defect is evaluated
    at the center time level over the physical region.
    """
    if name not in Z_FIELDS:
        raise ConfigError(f"unknown vector field {name!r}")
    r = stencils.stencil_radius(order)
    nt = 4 * r + 1                        # two nested time stencils
    dt = grid.dx
    times = t0 + dt * (np.arange(nt) - 2 * r)
    u4 = np.stack([np.asarray(func(tv, grid.X, grid.Y, grid.Z), dtype=float)
                   for tv in times])

    def box(f4):
        out = -stencils.diff2(f4, dt, 0, order)
        for ax in (-3, -2, -1):
            out += stencils.diff2(f4, grid.dx, ax, order)
        return out

    def zapply(f4):
        op = Z_FIELDS[name]
        out = np.zeros_like(f4)
        for (d,), poly in op.items():
            if d == 0:
                df = stencils.diff1(f4, dt, 0, order)
            else:
                df = stencils.diff1(f4, grid.dx, (-4, -3, -2, -1)[d], order)
            coef = np.stack([poly.evaluate(tv, grid.X, grid.Y, grid.Z)
                             * np.ones(grid.shape) for tv in times])
            out += coef * df
        return out

    c = COMMUTATOR_WEIGHT[name]
    defect = box(zapply(u4)) - zapply(box(u4)) - c * box(u4)
    mid = 2 * r
    core = defect[mid]
    # spatial margin: two nested stencil radii inside the array edge
    m = 2 * r
    sl = (slice(m, -m),) * 3
    return float(np.abs(core[sl]).max())
