import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nuclear_recoil import special
from nuclear_recoil.special import (cosine_integral_ci, gauss_legendre, kernel_f, kernel_ftilde, phi1, phi2, sici,
                                    sine_integral_si)

mp.mp.dps = 40


def si_ref(x):
    return float(mp.si(x) - mp.pi / 2)


def ci_ref(x):
    return float(mp.ci(x))


def f_ref(w, r):
    x = mp.mpf(abs(w)) * r
    return complex((1 - mp.exp(1j * x) * (1 - 1j * x)) / x ** 2)


def ftilde_ref(y, r):
    x = mp.mpf(y) * r
    return float((mp.exp(-x) * (1 + x) - 1) / x ** 2)


def phi1_ref(x, sign, below):
    x = mp.mpf(x)
    si = mp.si(x) - mp.pi / 2
    val = (mp.ci(x) * mp.sin(x) - si * mp.cos(x) + sign * mp.pi / 2) / x
    if below:
        val -= mp.pi * mp.exp(1j * x) / x
    return complex(val)


def phi2_ref(x, sign, below):
    x = mp.mpf(x)
    si, ci = mp.si(x) - mp.pi / 2, mp.ci(x)
    s, c = mp.sin(x), mp.cos(x)
    braces = -si * c - mp.pi / 2 + x + ci * (s - x * c) - x * si * s
    val = -sign * braces / x ** 2 - mp.pi / 4
    if below:
        val -= mp.pi * (1 - mp.exp(1j * x) * (1 - 1j * x)) / x ** 2
    return complex(val)


# --- quadrature -------------------------------------------------------------------

def test_gauss_legendre_low_orders():
    r1 = gauss_legendre(1)
    assert list(r1.nodes) == [0.0] and list(r1.weights) == [2.0]
    r2 = gauss_legendre(2)
    np.testing.assert_allclose(r2.nodes, [-1 / math.sqrt(3), 1 / math.sqrt(3)], rtol=0, atol=1e-15)
    np.testing.assert_allclose(r2.weights, [1.0, 1.0], rtol=0, atol=1e-15)


def test_gauss_legendre_x6_with_four_points():
    r = gauss_legendre(4)
    assert abs(np.sum(r.weights * r.nodes ** 6) - 2 / 7) < 1e-14


def test_gauss_legendre_rejects_zero_order():
    with pytest.raises(ValueError):
        gauss_legendre(0)


@pytest.mark.parametrize("order", [3, 8, 12, 17, 40])
def test_gauss_legendre_matches_numpy(order):
    x, w = np.polynomial.legendre.leggauss(order)
    r = gauss_legendre(order)
    np.testing.assert_allclose(r.nodes, x, rtol=0, atol=1e-14)
    # numpy's own weights drift by ~1e-14 at high order
    np.testing.assert_allclose(r.weights, w, rtol=0, atol=1e-13)


@given(order=st.integers(1, 30))
def test_quadrature_rule_invariants(order):
    r = gauss_legendre(order)
    assert abs(r.weights.sum() - 2.0) < 1e-14
    assert np.all(np.diff(r.nodes) > 0)
    np.testing.assert_array_equal(r.nodes, -r.nodes[::-1])
    assert np.all(r.weights > 0)


@settings(max_examples=40)
@given(order=st.integers(1, 20), data=st.data())
def test_quadrature_exact_for_polynomials(order, data):
    deg = data.draw(st.integers(0, 2 * order - 1))
    coef = np.array(data.draw(st.lists(st.floats(-1, 1), min_size=deg + 1, max_size=deg + 1)))
    r = gauss_legendre(order)
    approx = np.sum(r.weights * np.polynomial.polynomial.polyval(r.nodes, coef))
    integ = np.polynomial.polynomial.polyint(coef)
    exact = np.polynomial.polynomial.polyval(1.0, integ) - np.polynomial.polynomial.polyval(-1.0, integ)
    assert abs(approx - exact) <= 1e-13 * max(1.0, np.abs(coef).sum())


def test_mapped_rule_integrates_on_interval():
    x, w = gauss_legendre(6).mapped(2.0, 5.0)
    assert abs(np.sum(w * x ** 3) - (5 ** 4 - 2 ** 4) / 4) < 1e-11


# --- sine and cosine integrals ----------------------------------------------------------

def test_si_ci_reference_values():
    si, ci = sici(1.0)
    assert abs(si - (-0.6247132564)) < 1e-10
    assert abs(ci - 0.3374039229) < 1e-10


def test_si_ci_decay():
    si, ci = sici(np.array([1e4, 1e6]))
    assert np.all(np.abs(si) < 2e-4) and np.all(np.abs(ci) < 2e-4)


def test_si_ci_against_mpmath_log_grid():
    xs = np.logspace(-3, 3, 241)
    si, ci = sici(xs)
    assert max(abs(a - si_ref(x)) for a, x in zip(si, xs)) < 1e-12
    assert max(abs(a - ci_ref(x)) for a, x in zip(ci, xs)) < 1e-12


@settings(max_examples=60)
@given(x=st.floats(1e-3, 1e4))
def test_si_ci_random_points(x):
    si, ci = sici(x)
    assert abs(si - si_ref(x)) < 1e-12
    assert abs(ci - ci_ref(x)) < 1e-12


def test_si_ci_continuous_across_branch_switch():
    lo = np.nextafter(special.SICI_TAYLOR_MAX, 0)
    hi = np.nextafter(special.SICI_TAYLOR_MAX, 10)
    a, b = sici(np.array([lo, hi]))
    assert abs(a[0] - a[1]) < 1e-13 and abs(b[0] - b[1]) < 1e-13


def test_domain_errors():
    with pytest.raises(ValueError):
        cosine_integral_ci(0.0)
    with pytest.raises(ValueError):
        sine_integral_si(-1.0)
    assert sine_integral_si(0.0) == -math.pi / 2


# --- photon kernels ------------------------------------------------------------------------

def test_kernel_limits():
    assert abs(kernel_f(1e-13, 1.0) - (-0.5)) < 1e-12
    assert abs(kernel_ftilde(1e-13, 1.0) - (-0.5)) < 1e-12
    assert abs(kernel_ftilde(1.0, 1.0) - (2 / math.e - 1)) < 1e-12
    assert abs(kernel_ftilde(1.0, 1.0) - (-0.2642411177)) < 1e-10


def test_kernel_f_depends_on_abs_omega():
    assert kernel_f(-3.0, 0.7) == kernel_f(3.0, 0.7)


def test_kernels_reject_bad_radius():
    with pytest.raises(ValueError):
        kernel_f(1.0, 0.0)
    with pytest.raises(ValueError):
        kernel_ftilde(1.0, -1.0)


@settings(max_examples=60)
@given(x=st.floats(1e-6, 50.0))
def test_kernels_against_mpmath(x):
    assert abs(kernel_f(x, 1.0) - f_ref(x, 1)) < 1e-12
    assert abs(kernel_ftilde(x, 1.0) - ftilde_ref(x, 1)) < 1e-12


def _both_branches(fn, x, monkeypatch):
    """Value from the series branch and from the direct branch at the same argument."""
    monkeypatch.setattr(special, "SERIES_SWITCH", 10 * x)
    series = fn()
    monkeypatch.setattr(special, "SERIES_SWITCH", 0.1 * x)
    direct = fn()
    monkeypatch.setattr(special, "SERIES_SWITCH", 0.1)
    return series, direct


@pytest.mark.parametrize("x", [0.1 * (1 - 1e-12), 0.1])
def test_series_and_direct_agree_at_switch(monkeypatch, x):
    for fn in (lambda: kernel_f(x, 1.0), lambda: kernel_ftilde(x, 1.0),
               lambda: phi1(x, 1.0, 1.0), lambda: phi1(x, 1.0, -1.0),
               lambda: phi1(x, 1.0, 1.0, True), lambda: phi2(x, 1.0, 1.0),
               lambda: phi2(x, 1.0, -1.0), lambda: phi2(x, 1.0, 1.0, True)):
        s, d = _both_branches(fn, x, monkeypatch)
        assert abs(s - d) < 1e-12


# --- Phi kernels ------------------------------------------------------------------------------

def test_phi1_at_unit_argument():
    val = phi1(1.0, 1.0, 1.0)
    assert abs(val - phi1_ref(1, 1, False)) < 1e-12
    assert abs(val.real - 2.19225) < 1e-5


def test_phi1_decays():
    assert abs(phi1(1e6, 1.0, -1.0)) < 1e-5


def test_phi2_small_argument_limit_matches_direct():
    series = phi2(1e-3, 1.0, 1.0)
    assert abs(series - phi2_ref(1e-3, 1, False)) < 1e-12


def test_phi_rejects_nonpositive_gap():
    with pytest.raises(ValueError):
        phi1(0.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        phi2(-1.0, 1.0, 1.0)


@settings(max_examples=80)
@given(x=st.floats(1e-5, 1e3), sign=st.sampled_from([-1.0, 1.0]), below=st.booleans())
def test_phi_kernels_against_mpmath(x, sign, below):
    # the open-channel branch only occurs for states below the reference (sign = +1)
    below = below and sign > 0
    assert abs(phi1(x, 1.0, sign, below) - phi1_ref(x, sign, below)) < 1e-11 * max(1.0, 1 / x)
    assert abs(phi2(x, 1.0, sign, below) - phi2_ref(x, sign, below)) < 1e-11


@settings(max_examples=40)
@given(x=st.floats(1e-6, 1e4), sign=st.sampled_from([-1.0, 1.0]))
def test_phi_kernels_real_without_pole(x, sign):
    assert abs(phi1(x, 1.0, sign).imag) <= 1e-14
    assert abs(phi2(x, 1.0, sign).imag) <= 1e-14


def test_phi_kernels_broadcast():
    d = np.array([0.01, 1.0, 30.0])[None, :]
    r = np.array([0.5, 2.0])[:, None]
    out = phi1(d, r, np.ones_like(d))
    assert out.shape == (2, 3)
    assert abs(out[1, 2] - phi1(30.0, 2.0, 1.0)) < 1e-15
