"""Angular-momentum algebra for rank-1 one-electron operators.

Every half-integer quantum number is carried as a doubled integer (``two_j``)
so triangle and parity checks are exact integer arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

_LOGFACT = np.array([math.lgamma(n + 1.0) for n in range(512)])


def _lf(n2: int) -> float:
    # log((n2/2)!) for an even doubled argument
    return _LOGFACT[n2 // 2]


def _phase(n2: int) -> int:
    """(-1)**(n2/2) for an even doubled exponent."""
    return -1 if (n2 // 2) % 2 else 1


@dataclass(frozen=True)
class KappaChannel:
    """Relativistic angular channel: kappa with derived j, l and l' = 2j - l."""

    kappa: int
    two_j: int
    l: int
    l_prime: int

    @classmethod
    def from_kappa(cls, kappa: int) -> "KappaChannel":
        if kappa == 0 or int(kappa) != kappa:
            raise ValueError(f"kappa must be a nonzero integer, got {kappa}")
        kappa = int(kappa)
        two_j = 2 * abs(kappa) - 1
        l = kappa if kappa > 0 else -kappa - 1
        return cls(kappa, two_j, l, two_j - l)

    @property
    def j(self) -> float:
        return self.two_j / 2


def _triangle(a2: int, b2: int, c2: int) -> bool:
    return abs(a2 - b2) <= c2 <= a2 + b2 and (a2 + b2 + c2) % 2 == 0


def _log_delta(a2: int, b2: int, c2: int) -> float:
    return (_lf(a2 + b2 - c2) + _lf(a2 - b2 + c2) + _lf(-a2 + b2 + c2)
            - _lf(a2 + b2 + c2 + 2))


@lru_cache(maxsize=65536)
def wigner_3j(two_j1: int, two_j2: int, two_j3: int,
              two_m1: int, two_m2: int, two_m3: int) -> float:
    """Wigner 3j symbol from the Racah sum; all arguments doubled."""
    for tj, tm in ((two_j1, two_m1), (two_j2, two_m2), (two_j3, two_m3)):
        if tj < 0 or (tj - tm) % 2:
            raise ValueError("inconsistent doubled angular momenta")
    if two_m1 + two_m2 + two_m3 != 0:
        return 0.0
    if not _triangle(two_j1, two_j2, two_j3):
        return 0.0
    if abs(two_m1) > two_j1 or abs(two_m2) > two_j2 or abs(two_m3) > two_j3:
        return 0.0
    pre = 0.5 * (_log_delta(two_j1, two_j2, two_j3)
                 + _lf(two_j1 + two_m1) + _lf(two_j1 - two_m1)
                 + _lf(two_j2 + two_m2) + _lf(two_j2 - two_m2)
                 + _lf(two_j3 + two_m3) + _lf(two_j3 - two_m3))
    # doubled summation bounds
    kmin = max(0, two_j2 - two_j3 - two_m1, two_j1 - two_j3 + two_m2)
    kmax = min(two_j1 + two_j2 - two_j3, two_j1 - two_m1, two_j2 + two_m2)
    total = 0.0
    for k in range(kmin, kmax + 1, 2):
        den = (_lf(k) + _lf(two_j3 - two_j2 + k + two_m1) + _lf(two_j3 - two_j1 + k - two_m2)
               + _lf(two_j1 + two_j2 - two_j3 - k) + _lf(two_j1 - k - two_m1)
               + _lf(two_j2 - k + two_m2))
        total += _phase(k) * math.exp(pre - den)
    return _phase(two_j1 - two_j2 - two_m3) * total


@lru_cache(maxsize=65536)
def wigner_6j(two_j1: int, two_j2: int, two_j3: int,
              two_j4: int, two_j5: int, two_j6: int) -> float:
    """Wigner 6j symbol {j1 j2 j3; j4 j5 j6}; all arguments doubled."""
    triads = ((two_j1, two_j2, two_j3), (two_j1, two_j5, two_j6),
              (two_j4, two_j2, two_j6), (two_j4, two_j5, two_j3))
    if any(t < 0 for t in (two_j1, two_j2, two_j3, two_j4, two_j5, two_j6)):
        raise ValueError("negative angular momentum")
    if not all(_triangle(*t) for t in triads):
        return 0.0
    pre = 0.5 * sum(_log_delta(*t) for t in triads)
    a = [sum(t) for t in triads]
    b = (two_j1 + two_j2 + two_j4 + two_j5,
         two_j2 + two_j3 + two_j5 + two_j6,
         two_j3 + two_j1 + two_j6 + two_j4)
    total = 0.0
    for t in range(max(a), min(b) + 1, 2):
        log_term = (_lf(t + 2) - sum(_lf(t - ai) for ai in a) - sum(_lf(bi - t) for bi in b))
        total += _phase(t) * math.exp(pre + log_term)
    return total


def z_coefficient(l1: int, two_j1: int, l2: int, two_j2: int) -> float:
    """Angular factor of the unit-vector operator between (l1 j1) and (l2 j2)."""
    root = math.sqrt((2 * l1 + 1) * (2 * l2 + 1) * (two_j1 + 1) * (two_j2 + 1))
    return (root * wigner_3j(2 * l1, 2, 2 * l2, 0, 0, 0)
            * wigner_6j(two_j1, 2, two_j2, 2 * l2, 1, 2 * l1))


def alpha_angular_factors(ch1: KappaChannel, ch2: KappaChannel) -> tuple[complex, complex]:
    """Coefficients of the g1*f2 and f1*g2 radial integrals in (1||alpha phi||2)."""
    pre = (_phase(ch1.two_j - 1) * 1j * math.sqrt(6.0)
           * math.sqrt((ch1.two_j + 1) * (ch2.two_j + 1)))
    c_gf = 0.0
    c_fg = 0.0
    if ch1.l == ch2.l_prime:
        c_gf = (-1) ** ch1.l * wigner_6j(ch1.two_j, ch2.two_j, 2, 1, 1, 2 * ch1.l)
    if ch1.l_prime == ch2.l:
        c_fg = -((-1) ** ch1.l_prime) * wigner_6j(ch1.two_j, ch2.two_j, 2, 1, 1, 2 * ch1.l_prime)
    return pre * c_gf, pre * c_fg


def n_angular_factors(ch1: KappaChannel, ch2: KappaChannel) -> tuple[float, float]:
    """Coefficients of the g1*g2 and f1*f2 radial integrals in (1||n phi||2)."""
    sign = _phase(ch2.two_j - 1)
    return (sign * z_coefficient(ch1.l, ch1.two_j, ch2.l, ch2.two_j),
            sign * z_coefficient(ch1.l_prime, ch1.two_j, ch2.l_prime, ch2.two_j))


def msum_weight(two_j1: int, two_j2: int) -> float:
    """Weight turning a product of reduced elements into the sum over m2.

    sum_m2 <1|A|2><2|B|1> = msum_weight * (1||A||2)(2||B||1); the phase
    (-1)**(-2 m1) is -1 for every half-integer m1.
    """
    return -_phase(two_j1 + two_j2) / (two_j1 + 1)


def allowed_intermediate_kappas(kappa_a: int) -> set[int]:
    """Channels reachable from kappa_a by an odd-parity rank-1 operator."""
    ch = KappaChannel.from_kappa(kappa_a)
    out = set()
    for kappa in range(-(abs(kappa_a) + 1), abs(kappa_a) + 2):
        if kappa == 0:
            continue
        other = KappaChannel.from_kappa(kappa)
        if abs(other.two_j - ch.two_j) <= 2 and (other.l + ch.l) % 2 == 1:
            out.add(kappa)
    return out
