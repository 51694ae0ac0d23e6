import numpy as np
import pytest

from emwave import families, initialdata
from emwave.errors import ConfigError, DataError
from emwave.evolution import Grid
from emwave.initialdata import (DELTA3, DataSet, S3_INDEX, S3_PAIRS,
                                build_cauchy, divE_residual, faraday3,
                                full_to_s3, gauge_residual_initial,
                                hamiltonian_residual, momentum_residual,
                                s3_inverse, s3_to_full)
from conftest import fit_order


def small_grid(n=24, L=4.0):
    return Grid(L, n)


def test_s3_roundtrip(rng):
    s = rng.standard_normal((6, 4))
    full = s3_to_full(s)
    assert np.array_equal(full, np.swapaxes(full, 0, 1))
    assert np.array_equal(full_to_s3(full), s)


def test_s3_inverse_matches_lapack(rng):
    s = 0.3 * rng.standard_normal((6, 50))
    s[0] += 2.0
    s[3] += 2.0
    s[5] += 2.0
    inv, det = s3_inverse(s)
    mats = np.moveaxis(s3_to_full(s), (0, 1), (-2, -1))
    ref = np.linalg.inv(mats)
    assert np.abs(np.moveaxis(s3_to_full(inv), (0, 1), (-2, -1))
                  - ref).max() < 1e-12
    assert np.allclose(det, np.linalg.det(mats))


def test_s3_inverse_rejects_indefinite():
    s = np.array([-1.0, 0, 0, 1.0, 0, 1.0]).reshape(6, 1)
    with pytest.raises(DataError):
        s3_inverse(s)


def test_validate_rejects_bad_lapse():
    g = small_grid(12, 2.0)
    d = families.flat_data(g)
    d.N[...] = 0.0
    with pytest.raises(DataError):
        d.validate()


def test_flat_data_gives_zero_state():
    g = small_grid()
    c = build_cauchy(families.flat_data(g), g)
    s = c.to_state()
    assert np.abs(s.u).max() == 0.0
    assert np.abs(s.v).max() == 0.0
    assert s.t == 0.0


def test_conformal_slice_metric_and_velocity():
    """For gbar = (1 + eps phi) delta with unit lapse and K = 0:
    h_ii = eps phi, all time derivatives vanish except
    d_t g_0l = -(1/2) d_l(eps phi) / (1 + eps phi)."""
    g = small_grid(32)
    eps = 1e-2
    d = families.conformal_data(g, eps)
    c = build_cauchy(d, g)
    phi = families.bump(g.X, g.Y, g.Z, 2.0, 8)
    for slot, (i, j) in zip((4, 7, 9), ((0, 0), (1, 1), (2, 2))):
        assert np.abs(c.h[slot] - eps * phi).max() < 1e-14
    assert np.abs(c.h[0]).max() == 0.0       # unit lapse
    for slot in (1, 2, 3, 5, 6, 8):
        assert np.abs(c.h[slot]).max() == 0.0
    gphi = families.bump_gradient(g.X, g.Y, g.Z, 2.0, 8)
    conf = 1.0 + eps * phi
    for l in range(3):
        ref = -0.5 * eps * gphi[l] / conf
        assert np.abs(c.ht[1 + l] - ref).max() < 1e-13
    assert np.abs(c.ht[0]).max() == 0.0
    assert np.abs(c.ht[4:]).max() == 0.0


def test_lapse_gradient_term():
    """With flat gbar and a varying lapse, d_t g_0l = -N d_l N."""
    g = small_grid(24)
    d = families.flat_data(g)
    phi = families.bump(g.X, g.Y, g.Z, 2.0, 6)
    d.N = 1.0 + 0.1 * phi
    d.dN = 0.1 * families.bump_gradient(g.X, g.Y, g.Z, 2.0, 6)
    c = build_cauchy(d, g)
    for l in range(3):
        ref = -d.N * d.dN[l]
        assert np.abs(c.ht[1 + l] - ref).max() < 1e-14
    # and h_00 reflects the squared lapse
    assert np.allclose(c.h[0], 1.0 - d.N ** 2)
    assert np.allclose(c.ht[0], 0.0)


def test_velocities_linear_in_K_and_E(rng):
    """At fixed geometry the Cauchy velocities are linear in (K, E):
    superposition holds to round-off."""
    g = small_grid(16, 2.0)
    base = families.conformal_data(g, 5e-3)

    def with_sources(K, E):
        d = DataSet(gbar=base.gbar.copy(), K=K, Aspace=base.Aspace.copy(),
                    A0=base.A0.copy(), E=E, N=base.N.copy(),
                    dgbar=base.dgbar)
        return build_cauchy(d, g)

    K1 = 1e-3 * rng.standard_normal((6,) + g.shape)
    K2 = 1e-3 * rng.standard_normal((6,) + g.shape)
    E1 = 1e-3 * rng.standard_normal((3,) + g.shape)
    E2 = 1e-3 * rng.standard_normal((3,) + g.shape)
    c1 = with_sources(K1, E1)
    c2 = with_sources(K2, E2)
    c12 = with_sources(K1 + K2, E1 + E2)
    zero = with_sources(np.zeros_like(K1), np.zeros_like(E1))
    assert np.abs(c12.ht - (c1.ht + c2.ht - zero.ht)).max() < 1e-14
    assert np.abs(c12.At - (c1.At + c2.At - zero.At)).max() < 1e-14


def test_hamiltonian_uniform_E_oracle():
    """Flat metric, K = 0, A = 0, constant E: residual is exactly
    -3 |E|^2 everywhere."""
    g = small_grid(16, 2.0)
    d = families.flat_data(g)
    d.E[0] = 0.3
    d.E[2] = -0.4
    res = hamiltonian_residual(d, g)
    assert np.abs(res + 3.0 * 0.25).max() < 1e-12


def test_constraints_vanish_for_flat():
    g = small_grid(16, 2.0)
    d = families.flat_data(g)
    assert np.abs(hamiltonian_residual(d, g)).max() < 1e-13
    assert np.abs(momentum_residual(d, g)).max() < 1e-13
    assert np.abs(divE_residual(d, g)).max() < 1e-13


def test_maxwell_packet_divergence_free():
    g = small_grid(32)
    d = families.maxwell_packet_data(g, 1e-2)
    # the analytic curl field is exactly divergence free, so the residual
    # is pure stencil truncation and must converge at fourth order
    dxs, sups = [], []
    for n in (32, 48, 64):
        gn = Grid(4.0, n)
        dn = families.maxwell_packet_data(gn, 1e-2)
        res = divE_residual(dn, gn)
        sups.append(np.abs(gn.physical(res)).max())
        dxs.append(gn.dx)
    assert fit_order(dxs, sups) >= 3.5


def test_faraday3_antisymmetric():
    g = small_grid(16, 2.0)
    d = families.maxwell_packet_data(g, 1e-2)
    F = faraday3(d.Aspace, g)
    assert np.array_equal(F, -np.swapaxes(F, 0, 1))


def test_tt_pulse_is_traceless_and_transverse():
    g = small_grid(32)
    eps = 1e-3
    d = families.tt_pulse_data(g, eps)
    chi = d.gbar.copy()
    for k, dk in enumerate(DELTA3):
        chi[k] -= dk
    trace = chi[0] + chi[3] + chi[5]
    assert np.abs(trace).max() < 1e-8 * eps
    # the stored analytic gradient is divergence free pointwise up to
    # round-off of the closed-form component expressions
    div = np.zeros((3,) + g.shape)
    for i in range(3):
        for j in range(3):
            div[i] += d.dgbar[j, S3_INDEX[i, j]]
    assert np.abs(div).max() < 1e-8 * max(np.abs(d.dgbar).max(), 1.0)
    peak = np.abs(g.physical(chi)).max()
    assert eps / 2 < peak < eps * (1.0 + 1e-9)


def test_tt_pulse_moving_extrinsic_curvature():
    g = small_grid(24)
    d = families.tt_pulse_data(g, 1e-3, moving=True)
    assert np.allclose(d.K, 0.5 * d.dgbar[2])


def test_tt_constraint_scaling():
    """Constraint residuals of the TT family are O(eps^2): quartering
    eps divides the Hamiltonian residual by ~16."""
    g = Grid(4.0, 48)
    r1 = np.abs(hamiltonian_residual(
        families.tt_pulse_data(g, 4e-3), g)).max()
    r2 = np.abs(hamiltonian_residual(
        families.tt_pulse_data(g, 1e-3), g)).max()
    assert r1 / r2 == pytest.approx(16.0, rel=0.25)


def test_initial_gauge_residual_small_and_detects_errors():
    g = Grid(4.0, 32)
    d = families.conformal_data(g, 1e-3)
    c = build_cauchy(d, g)
    res = gauge_residual_initial(c, g)
    assert res.wave_sup < 5e-5
    assert res.lorenz_sup < 1e-12      # no electromagnetic field
    # negative control: an inconsistency in the supplied gradients
    # produces an O(eps) residual, far above the stencil error
    d_bad = families.conformal_data(g, 1e-3)
    d_bad.dgbar = 1.5 * d_bad.dgbar
    res_bad = gauge_residual_initial(build_cauchy(d_bad, g), g)
    assert res_bad.wave_sup > 10.0 * res.wave_sup


def test_initial_gauge_residual_convergence_order():
    dxs, sups = [], []
    for n in (24, 32, 48):
        g = Grid(4.0, n)
        c = build_cauchy(families.conformal_data(g, 1e-3), g)
        sups.append(gauge_residual_initial(c, g).wave_sup)
        dxs.append(g.dx)
    assert fit_order(dxs, sups) >= 3.0


def test_make_data_dispatch():
    g = small_grid(16, 2.0)
    with pytest.raises(ConfigError):
        families.make_data("nope", g)
    with pytest.raises(ConfigError):
        families.make_data("conformal", g, eps=1e-3, bogus=1)
    d = families.make_data("flat", g)
    assert isinstance(d, DataSet)


def test_conformal_rejects_nonpositive_factor():
    g = small_grid(16, 2.0)
    with pytest.raises(DataError):
        families.conformal_data(g, -1.5)
