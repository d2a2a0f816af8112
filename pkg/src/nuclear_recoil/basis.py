"""B-spline finite basis for the radial Dirac equation with a point Coulomb nucleus.

Units are natural (hbar = c = m_e = 1); energies include the rest mass.
Large and small radial components G = r g and F = r f are expanded in the same
B-spline set with the first and last splines removed (zero boundary values at
r = 0 and r = R).  For kappa > 0 this produces one spurious eigenvalue at the
energy of the lowest kappa < 0 level; it is kept in the spectrum (it belongs to
the variational space) but never receives a physical label.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.linalg
from scipy.interpolate import BSpline

from .special import gauss_legendre

ALPHA = 1 / 137.0359895

_LABEL_TOL = 1e-3


@dataclass(frozen=True)
class GridSpec:
    Z: int
    box_radius: float
    knot_count: int
    alpha: float
    gamma0: float
    knots: np.ndarray = field(repr=False)


def build_grid(Z: int, box_radius: float, knot_count: int,
               alpha: float = ALPHA, spline_order: int = 9) -> GridSpec:
    """Knots r_i = rho_i**4 * gamma0 / Z with rho_i uniform and r_last = R."""
    if knot_count < spline_order + 2:
        raise ValueError(f"need at least {spline_order + 2} knots, got {knot_count}")
    if box_radius <= 0 or Z <= 0:
        raise ValueError("Z and the box radius must be positive")
    gamma0 = math.sqrt(1.0 - (alpha * Z) ** 2)
    rho_max = (box_radius * Z / gamma0) ** 0.25
    rho = np.linspace(0.0, rho_max, knot_count)
    knots = rho ** 4 * gamma0 / Z
    knots[0] = 0.0
    knots[-1] = box_radius
    knots.setflags(write=False)
    return GridSpec(Z, box_radius, knot_count, alpha, gamma0, knots)


@dataclass(frozen=True)
class SplineBasis:
    """B-splines of order k on a grid, tabulated at per-interval Gauss-Legendre nodes."""

    grid: GridSpec
    order: int
    quad_order: int
    r: np.ndarray = field(repr=False)
    w: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    derivs: np.ndarray = field(repr=False)

    @property
    def n_splines(self) -> int:
        return self.values.shape[1] + 2

    @property
    def size(self) -> int:
        return self.values.shape[1]


def make_basis(grid: GridSpec, order: int = 9, quad_order: int = 12) -> SplineBasis:
    k = order
    p = k - 1
    r_k = grid.knots
    t = np.concatenate([np.zeros(p), r_k, np.full(p, r_k[-1])])
    rule = gauss_legendre(quad_order)
    a, b = r_k[:-1], r_k[1:]
    half = 0.5 * (b - a)
    r = (half[:, None] * (rule.nodes + 1.0) + a[:, None]).ravel()
    w = (half[:, None] * rule.weights).ravel()
    values = BSpline.design_matrix(r, t, p).toarray()
    lower = BSpline.design_matrix(r, t, p - 1).toarray()
    n = values.shape[1]
    left = t[p:p + n] - t[:n]
    right = t[p + 1:p + 1 + n] - t[1:n + 1]
    with np.errstate(divide="ignore", invalid="ignore"):
        cl = np.where(left > 0, p / left, 0.0)
        cr = np.where(right > 0, p / right, 0.0)
    derivs = lower[:, :n] * cl - lower[:, 1:n + 1] * cr
    for arr in (r, w):
        arr.setflags(write=False)
    # zero boundary conditions: drop the first and last spline
    return SplineBasis(grid, order, quad_order, r, w, values[:, 1:-1], derivs[:, 1:-1])


def default_box_radius(Z: int, n: int = 1, alpha: float = ALPHA, factor: float = 40.0) -> float:
    """factor * n Bohr radii of the hydrogenic ion, in natural units."""
    return factor * n / (alpha * Z)


def basis_for(Z: int, n_splines: int = 65, order: int = 9, quad_order: int = 12,
              box_radius: float | None = None, alpha: float = ALPHA, n_max: int = 1) -> SplineBasis:
    """Convenience constructor: ``n_splines`` counts the full set before the two boundary splines go."""
    if box_radius is None:
        box_radius = default_box_radius(Z, n_max, alpha)
    grid = build_grid(Z, box_radius, n_splines - order + 2, alpha, order)
    return make_basis(grid, order, quad_order)


# --- analytic point-nucleus levels ------------------------------------------

@dataclass(frozen=True)
class AnalyticState:
    n: int
    kappa: int
    n_r: int
    gamma: float
    N: float
    energy: float


def analytic_state(Z: int, n: int, kappa: int, alpha: float = ALPHA) -> AnalyticState:
    if kappa == 0 or abs(kappa) > n:
        raise ValueError(f"need 0 < |kappa| <= n, got n={n}, kappa={kappa}")
    n_r = n - abs(kappa)
    if kappa > 0 and n_r == 0:
        raise ValueError(f"no bound state with n={n}, kappa={kappa}")
    az = alpha * Z
    if az >= abs(kappa):
        raise ValueError(f"alpha*Z = {az:.4f} >= |kappa|: gamma is not real")
    gamma = math.sqrt(kappa * kappa - az * az)
    N = math.sqrt(n * n - 2 * n_r * (abs(kappa) - gamma))
    return AnalyticState(n, kappa, n_r, gamma, N, (gamma + n_r) / N)


def analytic_energy(Z: int, n: int, kappa: int, alpha: float = ALPHA) -> float:
    return analytic_state(Z, n, kappa, alpha).energy


# --- the finite-basis spectrum ------------------------------------------------

@dataclass(frozen=True, eq=False)
class DiracSpectrum:
    """All 2*size eigenpairs of one kappa channel, with G, F tabulated at the nodes."""

    kappa: int
    Z: int
    alpha: float
    basis: SplineBasis = field(repr=False)
    energies: np.ndarray = field(repr=False)
    coeffs: np.ndarray = field(repr=False)
    G: np.ndarray = field(repr=False)
    F: np.ndarray = field(repr=False)
    dG: np.ndarray = field(repr=False)
    dF: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return len(self.energies)

    @property
    def first_positive(self) -> int:
        return int(np.searchsorted(self.energies, 0.0))

    def bound_index(self, n: int) -> int:
        """Index of the eigenvector labelled (n, kappa) by nearest analytic energy."""
        target = analytic_energy(self.Z, n, self.kappa, self.alpha)
        i = int(np.argmin(np.abs(self.energies - target)))
        if abs(self.energies[i] - target) > _LABEL_TOL * (1.0 - target):
            raise LookupError(f"no basis state matches (n={n}, kappa={self.kappa})")
        return i

    def spurious_indices(self) -> list[int]:
        """Eigenvectors with no physical counterpart.

        With equal G and F spline sets a kappa > 0 channel carries one extra
        state at the energy of the lowest kappa' = -kappa level.
        """
        if self.kappa < 0:
            return []
        target = analytic_energy(self.Z, self.kappa, -self.kappa, self.alpha)
        i = int(np.argmin(np.abs(self.energies - target)))
        if abs(self.energies[i] - target) > _LABEL_TOL * (1.0 - target):
            return []
        return [i]

    def norms(self) -> np.ndarray:
        """<i|i> under the overlap metric (should be 1)."""
        return np.sum(self.basis.w[:, None] * (self.G ** 2 + self.F ** 2), axis=0)

    def dump_csv(self, path: str | Path) -> None:
        norms = self.norms()
        with open(path, "w", newline="") as fh:
            out = csv.writer(fh)
            out.writerow(["index", "energy", "norm_check"])
            for i, (e, nrm) in enumerate(zip(self.energies, norms)):
                out.writerow([i, f"{e:.16e}", f"{nrm - 1.0:.3e}"])


def hamiltonian_matrices(basis: SplineBasis, kappa: int, Z: int,
                         alpha: float = ALPHA) -> tuple[np.ndarray, np.ndarray]:
    """Symmetric Galerkin matrices (H, S) for the (G, F) coefficient vector."""
    B, dB, r, w = basis.values, basis.derivs, basis.r, basis.w
    Bw = B * w[:, None]
    S = Bw.T @ B
    S = 0.5 * (S + S.T)
    V = (B * (w * (-alpha * Z / r))[:, None]).T @ B
    D = Bw.T @ dB
    K = (B * (w / r)[:, None]).T @ B
    off = -D + kappa * K
    H = np.block([[S + V, off], [off.T, -S + V]])
    zero = np.zeros_like(S)
    return 0.5 * (H + H.T), np.block([[S, zero], [zero, S]])


def solve_spectrum(kappa: int, basis: SplineBasis, Z: int, alpha: float = ALPHA) -> DiracSpectrum:
    if kappa == 0:
        raise ValueError("kappa must be nonzero")
    if alpha * Z >= abs(kappa):
        raise ValueError(f"alpha*Z >= |kappa| for kappa={kappa}: no point-nucleus solution")
    H, S = hamiltonian_matrices(basis, kappa, Z, alpha)
    try:
        energies, coeffs = scipy.linalg.eigh(H, S)
    except np.linalg.LinAlgError as exc:
        raise RuntimeError(f"basis: overlap matrix not positive definite ({exc})") from exc
    n = basis.size
    cG, cF = coeffs[:n], coeffs[n:]
    for arr in (energies, coeffs):
        arr.setflags(write=False)
    return DiracSpectrum(
        kappa, Z, alpha, basis, energies, coeffs,
        basis.values @ cG, basis.values @ cF, basis.derivs @ cG, basis.derivs @ cF,
    )


# --- state labels -------------------------------------------------------------

_L_LETTERS = "spdfghik"


@dataclass(frozen=True, order=True)
class StateLabel:
    n: int
    kappa: int

    def __post_init__(self):
        if self.kappa == 0 or abs(self.kappa) > self.n or (self.kappa > 0 and self.kappa == self.n):
            raise ValueError(f"not a bound state: n={self.n}, kappa={self.kappa}")

    @property
    def l(self) -> int:
        return self.kappa if self.kappa > 0 else -self.kappa - 1

    @property
    def two_j(self) -> int:
        return 2 * abs(self.kappa) - 1

    @property
    def n_r(self) -> int:
        return self.n - abs(self.kappa)

    def __str__(self) -> str:
        letter = _L_LETTERS[self.l]
        if self.l == 0:
            return f"{self.n}{letter}"
        return f"{self.n}{letter}{self.two_j}/2"

    @classmethod
    def parse(cls, text: str) -> "StateLabel":
        """Accepts '1s', '2s', '2p1/2', '2p3/2', '3d5/2', and the ½ glyph."""
        t = text.strip().replace("½", "1/2").replace("_", "").lower()
        i = 0
        while i < len(t) and t[i].isdigit():
            i += 1
        if i == 0 or i >= len(t) or t[i] not in _L_LETTERS:
            raise ValueError(f"cannot parse state label {text!r}")
        n, l = int(t[:i]), _L_LETTERS.index(t[i])
        rest = t[i + 1:]
        if l >= n:
            raise ValueError(f"l={l} not allowed for n={n} in {text!r}")
        if l == 0:
            if rest not in ("", "1/2"):
                raise ValueError(f"bad j for an s state in {text!r}")
            return cls(n, -1)
        if rest == f"{2 * l - 1}/2":
            return cls(n, l)
        if rest == f"{2 * l + 1}/2":
            return cls(n, -l - 1)
        raise ValueError(f"missing or bad j in {text!r}")
