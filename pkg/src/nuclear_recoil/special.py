"""Quadrature rules and the scalar special functions used by the radial kernels.

The photon kernels ``f``, ``f~`` and the closed forms ``Phi1``/``Phi2`` have
removable singularities at the origin of their combined argument ``x = Delta*r``.
Below ``SERIES_SWITCH`` they are evaluated from truncated power series that are
assembled once, at import time, from the Taylor series of Si, Cin, sin and cos.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import polynomial as npoly

EULER_GAMMA = 0.57721566490153286061
SERIES_SWITCH = 0.1
SICI_TAYLOR_MAX = 6.0

_NEWTON_TOL = 1e-15
_NEWTON_MAXITER = 100


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Legendre rule on [-1, 1]."""

    order: int
    nodes: np.ndarray
    weights: np.ndarray

    def mapped(self, a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
        """Nodes and weights transplanted to the interval [a, b]."""
        half = 0.5 * (b - a)
        return half * self.nodes + 0.5 * (a + b), half * self.weights


def _legendre_and_derivative(n: int, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    p0 = np.ones_like(x)
    p1 = x.copy()
    for k in range(2, n + 1):
        p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
    dp = n * (x * p1 - p0) / (x * x - 1.0)
    return p1, dp


@lru_cache(maxsize=None)
def gauss_legendre(order: int) -> QuadratureRule:
    """Gauss-Legendre nodes and weights by Newton iteration on P_n."""
    if order < 1:
        raise ValueError(f"quadrature order must be >= 1, got {order}")
    if order == 1:
        return QuadratureRule(1, np.array([0.0]), np.array([2.0]))
    m = (order + 1) // 2
    i = np.arange(1, m + 1)
    x = np.cos(np.pi * (i - 0.25) / (order + 0.5))
    for _ in range(_NEWTON_MAXITER):
        p, dp = _legendre_and_derivative(order, x)
        dx = p / dp
        x = x - dx
        if np.max(np.abs(dx)) < _NEWTON_TOL:
            break
    p, dp = _legendre_and_derivative(order, x)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    nodes = np.concatenate([-x, x[::-1][order % 2:]])
    weights = np.concatenate([w, w[::-1][order % 2:]])
    if order % 2:
        nodes[m - 1] = 0.0
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureRule(order, nodes, weights)


# --- sine and cosine integrals ---------------------------------------------

def _si_cin_taylor(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Si(x) and Cin(x) = gamma + ln x - Ci(x) by their Taylor series."""
    x2 = x * x
    term_s = x.copy()
    term_c = np.ones_like(x)
    si = x.copy()
    cin = np.zeros_like(x)
    for k in range(1, 40):
        term_s = -term_s * x2 / ((2 * k) * (2 * k + 1))
        term_c = -term_c * x2 / ((2 * k - 1) * (2 * k))
        si += term_s / (2 * k + 1)
        cin -= term_c / (2 * k)
    return si, cin


def _si_ci_cfrac(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """si(x) = Si(x) - pi/2 and ci(x) from the continued fraction of E1(ix)."""
    tiny = 1e-300
    b = 1.0 + 1j * x
    c = np.full(x.shape, 1.0 / tiny, dtype=complex)
    d = 1.0 / b
    h = d.copy()
    active = np.ones(x.shape, dtype=bool)
    for i in range(2, 200):
        a = -float((i - 1) * (i - 1))
        b = b + 2.0
        d = 1.0 / (a * d + b)
        c = b + a / c
        delta = c * d
        h = np.where(active, h * delta, h)
        active &= np.abs(delta.real - 1.0) + np.abs(delta.imag) >= 1e-16
        if not active.any():
            break
    h = (np.cos(x) - 1j * np.sin(x)) * h
    return h.imag, -h.real


def sici(x) -> tuple[np.ndarray, np.ndarray]:
    """Return (si(x), ci(x)) with si(x) = Si(x) - pi/2.

    ``x`` must be positive; ci has a logarithmic singularity at the origin.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0.0):
        raise ValueError("sici requires x > 0 (ci diverges at the origin)")
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    si = np.empty_like(x)
    ci = np.empty_like(x)
    small = x <= SICI_TAYLOR_MAX
    if small.any():
        xs = x[small]
        s, cin = _si_cin_taylor(xs)
        si[small] = s - 0.5 * np.pi
        ci[small] = EULER_GAMMA + np.log(xs) - cin
    if (~small).any():
        si[~small], ci[~small] = _si_ci_cfrac(x[~small])
    if scalar:
        return si[0], ci[0]
    return si, ci


def sine_integral_si(x):
    """si(x) = Si(x) - pi/2, defined for x >= 0 (si(0) = -pi/2)."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0.0):
        raise ValueError("si requires x >= 0")
    safe = np.where(x > 0.0, x, 1.0)
    out = np.where(x > 0.0, sici(safe)[0], -0.5 * np.pi)
    return out[()] if out.ndim == 0 else out


def cosine_integral_ci(x):
    if np.any(np.asarray(x) <= 0.0):
        raise ValueError("ci(x) is singular at x = 0")
    return sici(x)[1]


# --- truncated power series for the small-argument branches ----------------

_DEG = 32


def _series(coeff_of_k) -> np.ndarray:
    return np.array([coeff_of_k(k) for k in range(_DEG + 1)], dtype=float)


_SIN = _series(lambda k: 0.0 if k % 2 == 0 else (-1) ** (k // 2) / math.factorial(k))
_COS = _series(lambda k: 0.0 if k % 2 else (-1) ** (k // 2) / math.factorial(k))
_SI = _series(lambda k: 0.0 if k % 2 == 0 else (-1) ** (k // 2) / (k * math.factorial(k)))
_CIN = _series(lambda k: 0.0 if k % 2 or k == 0 else -((-1) ** (k // 2)) / (k * math.factorial(k)))
_X = np.array([0.0, 1.0])


def _trunc(c: np.ndarray) -> np.ndarray:
    return np.asarray(c[: _DEG + 1], dtype=float)


def _shift_down(c: np.ndarray, n: int) -> np.ndarray:
    # division by x**n; the dropped coefficients vanish analytically
    return c[n:]


# Phi1 real part: [ci sin - si cos + s*pi/2] / x
#   = (gamma + ln x) sin/x + (-Cin sin - Si cos)/x + (pi/2)(cos + s)/x
_PHI1_LOG = _shift_down(_SIN, 1)
_PHI1_POLY = _shift_down(_trunc(npoly.polysub(-npoly.polymul(_CIN, _SIN), npoly.polymul(_SI, _COS))), 1)
_COSM1_OVER_X = _shift_down(_trunc(npoly.polysub(_COS, [1.0])), 1)

# Phi2 braces A(x) = A_poly + (gamma + ln x) A_log, both divided by x^2
_A_LOG = _trunc(npoly.polysub(_SIN, npoly.polymul(_X, _COS)))
_A_POLY = _trunc(
    npoly.polysub(
        npoly.polyadd(
            npoly.polyadd(-npoly.polymul(_SI, _COS), -npoly.polymul(_X, npoly.polymul(_SI, _SIN))),
            npoly.polyadd(_X, 0.5 * np.pi * npoly.polysub(npoly.polyadd(_COS, npoly.polymul(_X, _SIN)), [1.0])),
        ),
        npoly.polymul(_CIN, _A_LOG),
    )
)
_A_LOG_OVER_X2 = _shift_down(_A_LOG, 2)
_A_POLY_OVER_X2 = _shift_down(_A_POLY, 2)

# f(omega, r) = sum_{k>=2} (k-1) i^k x^(k-2)/k!  and  f~(y, r) = sum_{k>=2} (-1)^k (1-k) x^(k-2)/k!
_F_SERIES = np.array([(k - 1) * (1j ** k) / math.factorial(k) for k in range(2, 20)])
_FT_SERIES = np.array([(-1) ** k * (1 - k) / math.factorial(k) for k in range(2, 20)])


def _polyval(c: np.ndarray, x: np.ndarray) -> np.ndarray:
    return npoly.polyval(x, c)


# --- photon kernels ---------------------------------------------------------

def kernel_f(omega, r):
    """f(omega, r) = (1 - exp(i|omega|r)(1 - i|omega|r)) / (omega r)^2."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0.0):
        raise ValueError("kernel_f requires r > 0")
    x = np.abs(np.asarray(omega, dtype=float)) * r
    small = x < SERIES_SWITCH
    xs = np.where(small, x, 0.0)
    xl = np.where(small, 1.0, x)
    direct = (1.0 - np.exp(1j * xl) * (1.0 - 1j * xl)) / (xl * xl)
    series = _polyval(_F_SERIES, xs)
    out = np.where(small, series, direct)
    return out[()] if out.ndim == 0 else out


def kernel_ftilde(y, r):
    """f~(y, r) = (exp(-yr)(1 + yr) - 1) / (yr)^2."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0.0):
        raise ValueError("kernel_ftilde requires r > 0")
    x = np.asarray(y, dtype=float) * r
    small = x < SERIES_SWITCH
    xs = np.where(small, x, 0.0)
    xl = np.where(small, 1.0, x)
    direct = (np.exp(-xl) * (1.0 + xl) - 1.0) / (xl * xl)
    series = _polyval(_FT_SERIES, xs)
    out = np.where(small, series, direct)
    return out[()] if out.ndim == 0 else out


def _check_delta(delta, r):
    delta = np.asarray(delta, dtype=float)
    r = np.asarray(r, dtype=float)
    if np.any(delta <= 0.0):
        raise ValueError("Phi kernels need a positive energy gap delta")
    if np.any(r <= 0.0):
        raise ValueError("Phi kernels need r > 0")
    return delta, r


def phi1(delta, r, sign, below=False):
    """Kernel multiplying i*alpha in the united one-transverse-photon term.

    ``sign`` is sign(eps_a - eps_n); ``below`` flags |eps_n| < eps_a, which adds
    the complex pole term. Arrays broadcast.
    """
    delta, r = _check_delta(delta, r)
    sign = np.asarray(sign, dtype=float)
    below = np.asarray(below, dtype=bool)
    x = delta * r
    small = x < SERIES_SWITCH
    xs = np.where(small, x, 1.0)
    logx = EULER_GAMMA + np.log(xs)
    sin_over_x = _polyval(_PHI1_LOG, xs)
    cosm1_over_x = _polyval(_COSM1_OVER_X, xs)
    regular = logx * sin_over_x + _polyval(_PHI1_POLY, xs)
    # with the pole the 1/x pieces cancel: (pi/2)(cos+s)/x - pi e^{ix}/x
    series_open = regular + 0.5 * np.pi * (cosm1_over_x + (1.0 + sign) / xs)
    series_pole = (regular + 0.5 * np.pi * (-cosm1_over_x + (sign - 1.0) / xs)
                   - 1j * np.pi * sin_over_x)
    series = np.where(below, series_pole, series_open)
    xl = np.where(small, 1.0, x)
    si, ci = sici(xl)
    direct = (ci * np.sin(xl) - si * np.cos(xl) + sign * 0.5 * np.pi) / xl
    direct = direct - np.where(below, np.pi * np.exp(1j * xl) / xl, 0.0)
    out = np.where(small, series, direct).astype(complex)
    return out[()] if out.ndim == 0 else out


def phi2(delta, r, sign, below=False):
    """Kernel multiplying the unit vector n in the united one-transverse term."""
    delta, r = _check_delta(delta, r)
    sign = np.asarray(sign, dtype=float)
    x = delta * r
    small = x < SERIES_SWITCH
    xs = np.where(small, x, 1.0)
    logx = EULER_GAMMA + np.log(xs)
    a_over_x2_series = _polyval(_A_POLY_OVER_X2, xs) + logx * _polyval(_A_LOG_OVER_X2, xs)
    xl = np.where(small, 1.0, x)
    si, ci = sici(xl)
    s, c = np.sin(xl), np.cos(xl)
    braces = -si * c - 0.5 * np.pi + xl + ci * (s - xl * c) - xl * si * s
    a_over_x2 = np.where(small, a_over_x2_series, braces / (xl * xl))
    out = (-sign * a_over_x2 - 0.25 * np.pi).astype(complex)
    below = np.asarray(below, dtype=bool)
    if below.any():
        out = out - np.where(below, np.pi * kernel_f(delta, r), 0.0)
    return out[()] if out.ndim == 0 else out
