"""End-to-end acceptance checks, one test per criterion.

Each test prints a single ``[PASS] criterion N`` / ``[FAIL] criterion N``
line (also echoed past pytest's capture so the summary is visible in the
terminal).  The heavy evolution-based criteria are marked ``slow``.
"""

import sys
import time

import numpy as np
import pytest

import oracles
from conftest import fit_order, random_dA, random_dh, rel_err
from emwave import diagnostics, families, rhs, tensors, zfields
from emwave.diagnostics import decay_fit, energy, gauge_monitors
from emwave.evolution import (A_SLICE, Grid, H_SLICE, PhysicsOptions,
                              SchemeParams, StepController, evolve,
                              new_state, step)
from emwave.initialdata import build_cauchy, gauge_residual_initial
from emwave.nullframe import FramePoint, frame_norm, tangential_derivative
from emwave.tensors import MINK, sym_to_full


class criterion:
    """Context manager that prints one PASS/FAIL line per criterion."""

    def __init__(self, num, desc):
        self.num = num
        self.desc = desc

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        verdict = "PASS" if exc_type is None else "FAIL"
        msg = f"[{verdict}] criterion {self.num}: {self.desc}"
        print(msg)
        if sys.stdout is not sys.__stdout__:       # visible under capture
            print(msg, file=sys.__stdout__, flush=True)
        return False


# ---------------------------------------------------------------------------


@pytest.mark.slow
def test_criterion_1_flat_preservation():
    with criterion(1, "flat preservation, 48^3, 200 steps, <= 1 min"):
        g = Grid(12.0, 48)
        s = new_state(g)
        params = SchemeParams()
        t0 = time.monotonic()
        evolve(s, g, params, PhysicsOptions(), n_steps=200)
        elapsed = time.monotonic() - t0
        assert np.abs(s.u).max() <= 1e-12
        assert np.abs(s.v).max() <= 1e-12
        rec = energy(s, g, params, PhysicsOptions(), N=2)
        assert rec.total <= 1e-12 and rec.flux <= 1e-12
        gres = gauge_monitors(s, g)
        assert gres.wave_sup <= 1e-12 and gres.lorenz_sup <= 1e-12
        fmon = diagnostics.frame_monitors(s, g)
        assert max(fmon.dH_TU, fmon.H_LT, fmon.ZH_LL) <= 1e-12
        assert elapsed <= 60.0, f"elapsed {elapsed:.1f} s > 60 s"


def test_criterion_2_rhs_oracles():
    with criterion(2, "batched right-hand sides match direct oracles"):
        rng = np.random.default_rng(42)
        npts = 10_000
        h = rng.uniform(-0.1, 0.1, (10, npts))
        assert np.abs(h).max() <= 0.1
        dh = random_dh(rng, npts)
        dA = random_dA(rng, npts)
        ginv = tensors.invert_metric(h).g
        dh_full = np.stack([sym_to_full(dh[m]) for m in range(4)])
        F = sym_to_full(rhs.assemble_F(h, dh, dA))
        J = rhs.assemble_J(h, dh, dA)
        assert rel_err(F, oracles.f_ref(h, dh_full, dA, ginv)) < 1e-12
        assert rel_err(J, oracles.j_ref(dh_full, dA, ginv)) < 1e-12


def test_criterion_3_null_form():
    with criterion(3, "null form vanishes on 100 plane waves"):
        rng = np.random.default_rng(7)
        _, dh = oracles.null_plane_wave(rng, 100)
        q = rhs.q_term(dh)
        scale = max(np.abs(dh).max() ** 2, 1.0)
        assert np.abs(q).max() / scale < 1e-13


def test_criterion_4_neumann_orders():
    with criterion(4, "Neumann truncation error slopes >= k + 0.8"):
        rng = np.random.default_rng(11)
        base = rng.standard_normal((10, 50))
        amps = np.geomspace(1e-3, 1e-2, 6)
        for k in (1, 2, 3):
            errs = []
            for a in amps:
                h = a * base
                exact = tensors.invert_metric(h).deviation
                errs.append(np.abs(tensors.neumann_H(h, order=k)
                                   - exact).max())
            slope = fit_order(amps, np.array(errs))
            assert slope >= k + 0.8, f"order {k}: slope {slope:.3f}"


def _initial_residual(family, n, eps=1e-3, L=4.0):
    g = Grid(L, n)
    data = families.make_data(family, g, eps=eps)
    return g, gauge_residual_initial(build_cauchy(data, g), g)


@pytest.mark.slow
def test_criterion_5_gauge_compatibility_and_propagation():
    with criterion(5, "initial gauge residual order >= 3.5; at t = 10 "
                      "within 10x and order >= 3"):
        eps = 1e-3
        initial = {}
        for family in ("conformal", "tt_pulse"):
            dxs, sups = [], []
            for n in (32, 48, 64, 96):
                g, res = _initial_residual(family, n, eps)
                assert res.lorenz_sup <= 1e-13      # no EM field: exact zero
                dxs.append(g.dx)
                sups.append(res.wave_sup)
                initial[(family, n)] = res.wave_sup
            order0 = fit_order(dxs, sups)
            assert order0 >= 3.5, f"{family}: initial order {order0:.2f}"

        # Outgoing boundaries: the conformal family carries an O(eps)
        # gauge wave that must be allowed to radiate away; in a periodic
        # box it would circulate forever at its initial amplitude.
        params = SchemeParams()
        for family in ("conformal", "tt_pulse"):
            late = {}
            for n in (32, 48):
                g = Grid(4.0, n)
                data = families.make_data(family, g, eps=eps)
                s = build_cauchy(data, g).to_state()
                evolve(s, g, params, PhysicsOptions(), t_end=10.0)
                r10 = gauge_monitors(s, g).wave_sup
                late[n] = r10
                assert r10 <= 10.0 * initial[(family, n)], (
                    f"{family} n={n}: t=10 residual {r10:.3e} vs initial "
                    f"{initial[(family, n)]:.3e}")
            dx32, dx48 = 8.0 / 31, 8.0 / 47
            order10 = np.log(late[32] / late[48]) / np.log(dx32 / dx48)
            assert order10 >= 3.0, f"{family}: t=10 order {order10:.2f}"


@pytest.mark.slow
def test_criterion_6_linear_decay_rate():
    with criterion(6, "frozen-metric Maxwell pulse sup|A| decay exponent "
                      "in [-1.2, -0.8]"):
        t0 = time.monotonic()
        g = Grid(24.0, 96)
        # Widest profile the radius-2 support admits: at dx ~ 0.5 the
        # steeper defaults are dispersion-dominated over a 20-crossing run.
        data = families.make_data("maxwell_packet", g, eps=1e-2, radius=2.0,
                                  power=2)
        s = build_cauchy(data, g).to_state()
        params = SchemeParams()
        physics = PhysicsOptions(freeze_h=True)
        times, sups = [], []

        def track(state):
            times.append(state.t)
            sups.append(float(np.abs(g.physical(state.u[A_SLICE])).max()))

        evolve(s, g, params, physics, t_end=20.0, callback=track)
        elapsed = time.monotonic() - t0
        times = np.asarray(times)
        sups = np.asarray(sups)
        sel = times >= 5.0
        p, perr = decay_fit(times[sel], sups[sel])
        assert -1.2 <= p <= -0.8, f"fitted exponent {p:.3f} +- {perr:.3f}"
        assert elapsed <= 1800.0, f"elapsed {elapsed:.0f} s > 30 min"


def _tt_run(eps, g, params, nsteps, dt, sample_every=10):
    data = families.make_data("tt_pulse", g, eps=eps)
    s = build_cauchy(data, g).to_state()
    physics = PhysicsOptions()
    controller = StepController(g, params, physics)
    energies = [(0.0, energy(s, g, params, physics, N=1).total)]
    for k in range(1, nsteps + 1):
        step(s, g, params, physics, dt=dt, controller=controller)
        if k % sample_every == 0 or k == nsteps:
            energies.append((s.t, energy(s, g, params, physics, N=1).total))
    return s, energies


@pytest.mark.slow
def test_criterion_7_energy_boundedness_and_scaling():
    with criterion(7, "E_1 bounded by 4x initial; linear halving; "
                      "quadratic nonlinear deviation"):
        eps = 1e-3
        g = Grid(12.0, 48)
        params = SchemeParams()
        dt = params.cfl * g.dx
        nsteps = int(np.ceil(20.0 / dt))
        dt = 20.0 / nsteps
        s_full, e_full = _tt_run(eps, g, params, nsteps, dt)
        s_half, e_half = _tt_run(eps / 2, g, params, nsteps, dt)
        s_quarter, _ = _tt_run(eps / 4, g, params, nsteps, dt)

        ef = np.array([e for _, e in e_full])
        eh = np.array([e for _, e in e_half])
        assert (ef / ef[0]).max() <= 4.0, (
            f"max E1(t)/E1(0) = {(ef / ef[0]).max():.3f}")
        # degree-1 homogeneity of the linear regime
        assert np.abs(2.0 * eh / ef - 1.0).max() <= 0.10
        # Richardson pair: linear parts cancel, quadratic parts quarter
        d1 = np.abs(g.physical(s_full.u - 2.0 * s_half.u)).max()
        d2 = np.abs(g.physical(s_half.u - 2.0 * s_quarter.u)).max()
        ratio = d1 / d2
        assert 3.0 <= ratio <= 5.0, f"deviation ratio {ratio:.2f}"


def test_criterion_8_frame_machinery():
    with criterion(8, "tangential decomposition identity and Minkowski "
                      "frame norms"):
        rng = np.random.default_rng(3)
        x = rng.standard_normal((3, 200)) * 3.0
        x += np.sign(x) * 0.5
        pt = FramePoint(rng.standard_normal(200), x)
        grad = rng.standard_normal((4, 200))
        out = tangential_derivative(grad, pt)
        lhs = (out ** 2).sum(axis=0)
        om = pt.omega
        helper = np.zeros_like(om)
        helper[np.argmin(np.abs(om), axis=0), np.arange(om.shape[1])] = 1.0
        s1 = np.cross(om.T, helper.T).T
        s1 /= np.sqrt((s1 ** 2).sum(axis=0))
        s2 = np.cross(om.T, s1.T).T
        Lp = grad[0] + (om * grad[1:]).sum(axis=0)
        for theta in (0.0, 0.9, 2.2):      # different tangent frames
            a = np.cos(theta) * s1 + np.sin(theta) * s2
            b = -np.sin(theta) * s1 + np.cos(theta) * s2
            rhs_sq = (Lp ** 2 + ((a * grad[1:]).sum(axis=0)) ** 2
                      + ((b * grad[1:]).sum(axis=0)) ** 2)
            assert np.abs(lhs - rhs_sq).max() <= 1e-12 * max(lhs.max(), 1.0)
        m = MINK[:, :, None]
        one = FramePoint(0.5, np.array([[1.0], [2.0], [2.0]]))
        assert abs(float(frame_norm(m, ("L", "U"), one)[0])
                   - np.sqrt(2.0)) <= 1e-12
        assert float(frame_norm(m, ("L", "L"), one)[0]) <= 1e-12


def _standing_wave_error(n, t_end=0.3):
    g = Grid(np.pi, n)
    k = 2.0
    om = np.sqrt(3.0) * k
    phase = np.sin(k * g.X) * np.sin(k * g.Y) * np.sin(k * g.Z)
    s = new_state(g)
    s.u[0] = phase
    params = SchemeParams(cfl=0.2, sigma=0.0, boundary="periodic")
    phys = PhysicsOptions(linearize=True)
    controller = StepController(g, params, phys)
    dt = controller.dt(s)
    nsteps = int(np.ceil(t_end / dt))
    dt = t_end / nsteps
    for _ in range(nsteps):
        step(s, g, params, phys, dt=dt, controller=controller)
    exact = np.cos(om * t_end) * phase
    return g.dx, np.abs(g.physical(s.u[0] - exact)).max()


@pytest.mark.slow
def test_criterion_9_evolution_convergence():
    with criterion(9, "manufactured-solution error order >= 3.7 over "
                      "n in {32, 48, 64, 96}"):
        dxs, errs = zip(*(_standing_wave_error(n) for n in (32, 48, 64, 96)))
        order = fit_order(dxs, errs)
        assert order >= 3.7, f"fitted order {order:.2f}"


def _smooth_field(t, X, Y, Z):
    return (np.sin(1.3 * t + X - 0.7 * Y + 0.4 * Z)
            * np.exp(-(X ** 2 + Y ** 2 + Z ** 2) / 3.0))


@pytest.mark.slow
def test_criterion_10_commutator_table():
    with criterion(10, "commutator defects converge at order >= 3.7; "
                       "scaling weight 2 detected, others 0"):
        resolutions = (24, 32, 48, 64)
        for name in zfields.Z_ORDER:
            dxs, errs = [], []
            for n in resolutions:
                g = Grid(2.0, n)
                errs.append(zfields.commutator_defect(
                    name, _smooth_field, g, t0=0.4))
                dxs.append(g.dx)
            if max(errs) < 1e-10:
                # the discrete operators commute to round-off for this
                # field; the defect has no truncation tail to fit
                continue
            order = fit_order(dxs, errs)
            assert order >= 3.7, f"{name}: defect order {order:.2f}"

        # weight detection: the candidate weight with the smaller defect
        # at a single resolution must be the true one, by a wide margin
        g = Grid(2.0, 48)
        saved = dict(zfields.COMMUTATOR_WEIGHT)
        try:
            for name in zfields.Z_ORDER:
                defects = {}
                for cand in (0.0, 2.0):
                    zfields.COMMUTATOR_WEIGHT[name] = cand
                    defects[cand] = zfields.commutator_defect(
                        name, _smooth_field, g, t0=0.4)
                zfields.COMMUTATOR_WEIGHT[name] = saved[name]
                detected = min(defects, key=defects.get)
                expected = 2.0 if name == "s" else 0.0
                assert detected == expected, (name, defects)
                assert max(defects.values()) > 100.0 * min(defects.values())
        finally:
            zfields.COMMUTATOR_WEIGHT.update(saved)
