import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from emwave import tensors
from emwave.errors import ConvergenceError, DegenerateMetricError

from conftest import fit_order, random_sym10


def test_sym_pairs_layout():
    assert len(tensors.SYM_PAIRS) == 10
    for k, (m, n) in enumerate(tensors.SYM_PAIRS):
        assert tensors.SYM_INDEX[m, n] == k
        assert tensors.SYM_INDEX[n, m] == k


def test_sym_roundtrip(rng):
    s = rng.standard_normal((10, 5))
    full = tensors.sym_to_full(s)
    assert np.array_equal(full, np.swapaxes(full, 0, 1))
    back = tensors.full_to_sym(full, check=True)
    assert np.array_equal(back, s)


def test_full_to_sym_check_raises(rng):
    a = rng.standard_normal((4, 4, 3))
    with pytest.raises(ValueError):
        tensors.full_to_sym(a, check=True)
    sym_part = tensors.sym_to_full(tensors.full_to_sym(a))
    assert np.allclose(sym_part, 0.5 * (a + np.swapaxes(a, 0, 1)))


def test_mink_raise_signs(rng):
    v = rng.standard_normal((4, 7))
    up = tensors.mink_raise(v, 0)
    assert np.array_equal(up[0], -v[0])
    assert np.array_equal(up[1:], v[1:])
    # raising the same slot twice is the identity
    assert np.array_equal(tensors.mink_raise(up, 0), v)


def test_sym_raise_matches_full(rng):
    s = rng.standard_normal((10, 6))
    full_up = tensors.mink_raise(tensors.mink_raise(
        tensors.sym_to_full(s), 0), 1)
    assert np.allclose(tensors.sym_to_full(tensors.sym_raise(s)), full_up)


def test_invert_metric_matches_lapack(rng):
    h = random_sym10(rng, 200, amp=0.08)
    inv = tensors.invert_metric(h)
    g = tensors.MINK[:, :, None] + tensors.sym_to_full(h)
    ref = np.linalg.inv(np.moveaxis(g, (0, 1), (-2, -1)))
    assert np.abs(np.moveaxis(inv.g, (0, 1), (-2, -1)) - ref).max() < 1e-13
    assert np.allclose(inv.deviation, inv.g - tensors.MINK_INV[:, :, None])


def test_invert_metric_flat():
    inv = tensors.invert_metric(np.zeros((10, 3)))
    assert np.abs(inv.deviation).max() == 0.0
    assert np.allclose(inv.g[:, :, 0], tensors.MINK_INV)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.floats(1e-6, 0.1))
def test_inverse_identity_property(seed, amp):
    r = np.random.default_rng(seed)
    h = amp * r.standard_normal((10, 16))
    inv = tensors.invert_metric(h)
    g = tensors.MINK[:, :, None] + tensors.sym_to_full(h)
    prod = np.einsum('ab...,bc...->ac...', inv.g, g)
    assert np.abs(prod - np.eye(4)[:, :, None]).max() < 1e-11


def test_invert_metric_guard_g00():
    h = np.zeros((10, 1))
    h[0] = 0.9
    with pytest.raises(DegenerateMetricError):
        tensors.invert_metric(h, g00_limit=0.5)


def test_invert_metric_guard_condition():
    h = np.zeros((10, 1))
    h[4] = -0.999999   # g_xx nearly zero
    with pytest.raises(DegenerateMetricError):
        tensors.invert_metric(h, cond_limit=1e5)


def test_neumann_order1(rng):
    h = random_sym10(rng, 20, amp=0.05)
    approx = tensors.neumann_H(h, order=1)
    exact_first = -tensors.sym_to_full(tensors.sym_raise(h))
    assert np.abs(approx - exact_first).max() < 1e-15


def test_neumann_error_slopes(rng):
    """Order-k truncation error scales like |h|^{k+1}: fitted slope
    >= k + 0.8 for k = 1, 2, 3."""
    base = random_sym10(rng, 50, amp=1.0)
    amps = np.geomspace(1e-3, 1e-2, 6)
    for k in (1, 2, 3):
        errs = []
        for a in amps:
            h = a * base
            exact = tensors.invert_metric(h).deviation
            approx = tensors.neumann_H(h, order=k)
            errs.append(np.abs(approx - exact).max())
        slope = fit_order(amps, np.array(errs))
        assert slope >= k + 0.8, f"order {k}: slope {slope:.3f}"


def test_neumann_divergence():
    h = np.zeros((10, 1))
    h[0] = -3.0          # |hat h| > 1: series diverges
    with pytest.raises(ConvergenceError):
        tensors.neumann_H(h, order=8)
