import itertools

import numpy as np
import pytest
import sympy as sp

from emwave import zfields
from emwave.errors import ConfigError, StateError
from emwave.evolution import (Grid, PhysicsOptions, SchemeParams, new_state)
from emwave.zfields import (COMMUTATOR_WEIGHT, IDENTITY, Poly, Z_FIELDS,
                            Z_ORDER, apply_op, build_jet, commutator_defect,
                            compose_word, left_compose, words_up_to)

T, X, Y, Z = sp.symbols("t x y z")
SYMS = (T, X, Y, Z)

# the same eleven first-order fields, written directly in sympy
Z_SYM = {
    "d0": lambda f: sp.diff(f, T),
    "d1": lambda f: sp.diff(f, X),
    "d2": lambda f: sp.diff(f, Y),
    "d3": lambda f: sp.diff(f, Z),
    "b1": lambda f: T * sp.diff(f, X) + X * sp.diff(f, T),
    "b2": lambda f: T * sp.diff(f, Y) + Y * sp.diff(f, T),
    "b3": lambda f: T * sp.diff(f, Z) + Z * sp.diff(f, T),
    "r12": lambda f: -X * sp.diff(f, Y) + Y * sp.diff(f, X),
    "r13": lambda f: -X * sp.diff(f, Z) + Z * sp.diff(f, X),
    "r23": lambda f: -Y * sp.diff(f, Z) + Z * sp.diff(f, Y),
    "s": lambda f: sum(v * sp.diff(f, v) for v in SYMS),
}


class PointCloud:
    """Minimal grid stand-in for operator evaluation on scattered points."""

    def __init__(self, rng, npts):
        self.X, self.Y, self.Z = rng.standard_normal((3, npts)) * 1.5
        self.shape = (npts,)


def analytic_jet(expr, t0, cloud, depth=3):
    """All derivatives of expr up to total order depth, evaluated."""
    jet = {}
    for k in range(depth + 1):
        for key in itertools.combinations_with_replacement(range(4), k):
            d = expr
            for ax in key:
                d = sp.diff(d, SYMS[ax])
            f = sp.lambdify(SYMS, d, "numpy")
            jet[key] = np.asarray(f(t0, cloud.X, cloud.Y, cloud.Z),
                                  dtype=float) * np.ones(cloud.shape)
    return jet


def test_poly_arithmetic():
    p = Poly.var(1, 2.0) + Poly.const(3.0)          # 2x + 3
    q = Poly.var(0)                                  # t
    pq = p.mul(q)
    assert pq == {(1, 1, 0, 0): 2.0, (1, 0, 0, 0): 3.0}
    assert pq.diff(0) == {(0, 1, 0, 0): 2.0, (0, 0, 0, 0): 3.0}
    assert pq.diff(2) == {}
    x = np.array([0.5, -1.0])
    np.testing.assert_allclose(pq.evaluate(2.0, x, 0, 0), 2.0 * (2 * x + 3))
    assert Poly.const(0.0) == {}
    assert (p + p.scaled(-1.0)) == {}


def test_field_inventory():
    assert len(Z_ORDER) == 11
    assert set(Z_ORDER) == set(Z_SYM)
    for name in Z_ORDER:
        assert Z_FIELDS[name].order() == 1
    assert COMMUTATOR_WEIGHT["s"] == 2.0
    assert all(COMMUTATOR_WEIGHT[n] == 0.0 for n in Z_ORDER if n != "s")


def test_words_up_to_counts():
    assert len(words_up_to(0)) == 1
    assert len(words_up_to(1)) == 12
    assert len(words_up_to(2)) == 133


def test_compose_word_unknown_field():
    with pytest.raises(ConfigError):
        compose_word(("d0", "nope"))


@pytest.mark.parametrize("word", [
    ("s",),
    ("b1", "d2"),
    ("r12", "s"),
    ("d0", "b3", "r23"),
    ("s", "s"),
    ("b2", "r13", "d1"),
])
def test_composed_words_match_symbolic_application(word, rng):
    """The polynomial-coefficient composition agrees with applying the
    fields one at a time to a symbolic function."""
    cloud = PointCloud(rng, 30)
    t0 = 0.7
    expr = (1 + X * T / 4) * sp.sin(X + 2 * Y - Z + T / 2)
    jet = analytic_jet(expr, t0, cloud)
    got = apply_op(compose_word(word), jet, cloud, t0)
    ref_expr = expr
    for name in reversed(word):
        ref_expr = Z_SYM[name](ref_expr)
    ref = sp.lambdify(SYMS, ref_expr, "numpy")(t0, cloud.X, cloud.Y, cloud.Z)
    scale = max(np.abs(ref).max(), 1.0)
    assert np.abs(got - ref).max() / scale < 1e-12


def test_left_compose_product_rule(rng):
    """z(q f) = (z q) f + q (z f) for a first-order z and scalar q."""
    cloud = PointCloud(rng, 20)
    t0 = -0.3
    expr = sp.cos(X - T) * sp.exp(-(Y ** 2 + Z ** 2) / 8)
    jet = analytic_jet(expr, t0, cloud, depth=2)
    # op = x * d_y, z = b1 = t d_x + x d_t
    op = zfields.DiffOp({(2,): Poly.var(1)})
    composed = left_compose(Z_FIELDS["b1"], op)
    got = apply_op(composed, jet, cloud, t0)
    ref_expr = Z_SYM["b1"](X * sp.diff(expr, Y))
    ref = sp.lambdify(SYMS, ref_expr, "numpy")(t0, cloud.X, cloud.Y, cloud.Z)
    assert np.abs(got - ref).max() < 1e-12 * max(np.abs(ref).max(), 1.0)


def test_identity_and_empty(rng):
    cloud = PointCloud(rng, 8)
    jet = {(): np.arange(8.0)}
    assert np.array_equal(apply_op(IDENTITY, jet, cloud, 0.0), jet[()])
    assert np.abs(apply_op(zfields.DiffOp(), jet, cloud, 0.0)).max() == 0.0


def test_apply_op_depth_guard(rng):
    cloud = PointCloud(rng, 8)
    jet = {(): np.zeros(8), (0,): np.zeros(8)}
    with pytest.raises(StateError):
        apply_op(compose_word(("s", "s")), jet, cloud, 0.0)


def test_build_jet_depth_guard():
    g = Grid(2.0, 16)
    s = new_state(g)
    with pytest.raises(ConfigError):
        build_jet(s, g, SchemeParams(), None, 0)
    with pytest.raises(ConfigError):
        build_jet(s, g, SchemeParams(), None, 4)


def _standing_state(g, amp=1.0):
    s = new_state(g)
    phase = np.sin(2 * g.X) * np.sin(2 * g.Y) * np.sin(2 * g.Z)
    s.u[0] = amp * phase
    return s, phase


def test_build_jet_linear_standing_wave():
    """Jet entries of a static standing wave against the analytic
    derivatives of the linear flow."""
    g = Grid(np.pi, 48)
    s, phase = _standing_state(g)
    params = SchemeParams(boundary="periodic")
    jet = build_jet(s, g, params, PhysicsOptions(linearize=True), 3)
    core = g.physical
    tol = 5e-3
    # spatial gradient
    dx_ref = 2 * np.cos(2 * g.X) * np.sin(2 * g.Y) * np.sin(2 * g.Z)
    assert np.abs(core(jet[(1,)][0] - dx_ref)).max() < tol
    # mixed second derivative
    dxy_ref = 4 * np.cos(2 * g.X) * np.cos(2 * g.Y) * np.sin(2 * g.Z)
    assert np.abs(core(jet[(1, 2)][0] - dxy_ref)).max() < tol
    # equation substitution: d_t^2 u = Laplacian u = -12 u
    assert np.abs(core(jet[(0, 0)][0] + 12.0 * phase)).max() < tol
    # v = 0 everywhere: entries with exactly one time derivative vanish
    assert np.abs(jet[(0,)]).max() == 0.0
    assert np.abs(jet[(0, 1)]).max() == 0.0
    assert np.abs(jet[(0, 0, 0)]).max() == 0.0      # Laplacian of v
    # nested-stencil entries are valid only two stencil radii inside the
    # array edge, so compare them on a deeper core
    deep = (slice(g.gw + 4, -(g.gw + 4)),) * 3
    dz_ref = 2 * np.sin(2 * g.X) * np.sin(2 * g.Y) * np.cos(2 * g.Z)
    assert np.abs((jet[(0, 0, 3)][0] + 12.0 * dz_ref)[deep]).max() < 15 * tol
    # pure third spatial derivative d_x^2 d_z
    dxxz_ref = -8 * np.sin(2 * g.X) * np.sin(2 * g.Y) * np.cos(2 * g.Z)
    assert np.abs((jet[(1, 1, 3)][0] - dxxz_ref)[deep]).max() < 15 * tol
    # all fields except the first component stay identically zero
    for key, arr in jet.items():
        assert np.abs(arr[1:]).max() == 0.0


def test_build_jet_nonlinear_third_time_derivative_limit():
    """For small amplitudes the nonlinear third time derivative
    approaches the linear one (difference O(amplitude^2))."""
    g = Grid(np.pi, 24)
    params = SchemeParams(boundary="periodic")
    amp = 1e-4
    s, phase = _standing_state(g, amp)
    s.v[0] = amp * phase
    lin = build_jet(s, g, params, PhysicsOptions(linearize=True), 3)
    non = build_jet(s, g, params, PhysicsOptions(), 3)
    d = np.abs(non[(0, 0, 0)] - lin[(0, 0, 0)]).max()
    scale = np.abs(lin[(0, 0, 0)]).max()
    assert scale > 0.0
    assert d < 1e-3 * scale


def _poly_field(t, X, Y, Z):
    return X ** 3 * Z + t ** 2 * X * Y + Y ** 2 * Z ** 2 + t * Z ** 3


def test_commutator_defect_roundoff_on_polynomials():
    """Degree-4 polynomials are differentiated exactly by the stencils,
    so every commutator defect is pure round-off."""
    g = Grid(2.0, 20)
    for name in Z_ORDER:
        d = commutator_defect(name, _poly_field, g, t0=0.5)
        assert d < 1e-8, (name, d)


def test_commutator_defect_detects_wrong_weight(monkeypatch):
    """Zeroing the scaling weight leaves the full source term behind."""
    g = Grid(2.0, 20)
    ok = commutator_defect("s", _poly_field, g, t0=0.5)
    monkeypatch.setitem(COMMUTATOR_WEIGHT, "s", 0.0)
    bad = commutator_defect("s", _poly_field, g, t0=0.5)
    assert bad > 1.0
    assert bad > 1e6 * max(ok, 1e-12)


def test_commutator_defect_unknown_field():
    g = Grid(2.0, 20)
    with pytest.raises(ConfigError):
        commutator_defect("zz", _poly_field, g, t0=0.0)
