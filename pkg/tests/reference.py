"""Published reference values used by the regression and acceptance tests.

Entries are strings "value(band)"; a missing band means half a unit in the
last quoted digit.
"""

from __future__ import annotations

import re


def parse(text: str) -> tuple[float, float]:
    m = re.fullmatch(r"(-?\d+\.(\d+))(?:\((\d+)\))?", text)
    if not m:
        raise ValueError(text)
    value, decimals, band = float(m.group(1)), len(m.group(2)), m.group(3)
    unit = 10.0 ** -decimals
    return value, (int(band) * unit if band else 0.5 * unit)


def tolerance(band: float, value: float) -> float:
    return max(3 * band, 0.003 * abs(value))


# Z: (P_c, P_tr1, P_tr2, P)
TABLE_1S = {
    1: ("-1.3111(2)", "12.568(2)", "-5.8267(3)", "5.430(2)"),
    5: ("-1.2345(1)", "8.5854(3)", "-3.0476(2)", "4.3033(4)"),
    10: ("-1.1586", "6.9974(1)", "-2.0438", "3.7950(1)"),
    30: ("-0.9946", "4.8744(1)", "-0.8362", "3.0437(1)"),
    92: ("-1.861(5)", "6.51(1)", "0.123(1)", "4.77(1)"),
}
TABLE_2S = {
    1: ("-1.3112(2)", "13.177(1)", "-5.7103(3)", "6.155(1)"),
    10: ("-1.1612", "7.6075(1)", "-1.9080", "4.5383(1)"),
    92: ("-2.630(7)", "9.84(1)", "0.872(1)", "8.08(2)"),
}
TABLE_2P = {
    1: ("-0.0000", "-0.1440", "-0.1571", "-0.3011"),
    10: ("-0.0024", "-0.1526", "-0.0727", "-0.2277"),
    90: ("-0.3972(6)", "0.515(1)", "1.3632(1)", "1.481(1)"),
    92: ("-0.451(1)", "0.626(1)", "1.468(2)", "1.643(3)"),
}
SALPETER = {("1s", 1): 5.4461, ("1s", 5): 4.3731, ("2s", 10): 4.6359, ("2s", 92): 3.1565,
            ("2p1/2", 1): -0.3088, ("2p1/2", 92): -0.3088}

# Z: (Q_c, Q_tr1, Q_tr2, Q, Q_L)
TABLE_Q = {
    5: (1.00168, -0.00233, 0.00000, 0.99935, 0.99935),
    50: (1.19560, -0.27853, 0.01607, 0.93313, 0.93525),
    92: (2.07014, -1.65003, 0.32196, 0.74206, 0.78078),
}

# closed-form leading column of the two-electron table
TABLE_QL = {5: 0.99935, 10: 0.99741, 15: 0.99417, 20: 0.98964, 25: 0.98381, 30: 0.97669, 35: 0.96827,
            40: 0.95856, 45: 0.94755, 50: 0.93525, 55: 0.92165, 60: 0.90676, 65: 0.89057, 70: 0.87309,
            75: 0.85431, 80: 0.83424, 85: 0.81287, 90: 0.79021, 92: 0.78078, 95: 0.76625, 100: 0.74099}
