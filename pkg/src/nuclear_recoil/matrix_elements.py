"""Reduced matrix elements of the rank-1 one-electron operators between basis states.

A ``States`` handle selects one eigenvector or a block of eigenvectors of a
DiracSpectrum.  Every function accepts a single state on one side and a single
state or a block on the other and returns a scalar or a vector accordingly, so
spectral sums reduce to a few matrix products.

Radial functions ``phi`` are given as arrays on the quadrature nodes, either
shape (n_nodes,) shared by every ket or (n_nodes, n_block) per ket.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .angular import KappaChannel, alpha_angular_factors, allowed_intermediate_kappas, n_angular_factors
from .basis import DiracSpectrum
from .special import kernel_f, kernel_ftilde

Index = Union[int, slice, np.ndarray]


@dataclass(frozen=True, eq=False)
class States:
    spectrum: DiracSpectrum
    index: Index = slice(None)

    @property
    def is_block(self) -> bool:
        return not isinstance(self.index, (int, np.integer))

    @property
    def channel(self) -> KappaChannel:
        return KappaChannel.from_kappa(self.spectrum.kappa)

    @property
    def energy(self):
        return self.spectrum.energies[self.index]

    @property
    def G(self) -> np.ndarray:
        return self.spectrum.G[:, self.index]

    @property
    def F(self) -> np.ndarray:
        return self.spectrum.F[:, self.index]

    @property
    def size(self) -> int:
        return len(np.atleast_1d(self.energy))


def _zero(bra: States, ket: States):
    if bra.is_block and ket.is_block:
        raise ValueError("at most one side may be a block of states")
    if bra.is_block or ket.is_block:
        return np.zeros((bra if bra.is_block else ket).size, dtype=complex)
    return 0j


def _radial(w: np.ndarray, x: np.ndarray, y: np.ndarray, phi) -> np.ndarray | float:
    """Quadrature of x * y * phi with at most one of x, y a block."""
    phi = np.asarray(phi)
    if x.ndim == 1 and y.ndim == 1:
        return np.sum(w * x * y * phi)
    single, block = (x, y) if x.ndim == 1 else (y, x)
    if phi.ndim <= 1:
        return (w * single * phi) @ block
    return np.einsum("q,qk,qk->k", w * single, phi, block)


def _coupled(bra: States, ket: States) -> bool:
    return ket.spectrum.kappa in allowed_intermediate_kappas(bra.spectrum.kappa)


def me_alpha_phi(bra: States, ket: States, phi) -> complex | np.ndarray:
    """(bra || alpha phi(r) || ket)."""
    if not _coupled(bra, ket):
        return _zero(bra, ket)
    c_gf, c_fg = alpha_angular_factors(bra.channel, ket.channel)
    w = bra.spectrum.basis.w
    out = 0j
    if c_gf:
        out = out + c_gf * _radial(w, bra.G, ket.F, phi)
    if c_fg:
        out = out + c_fg * _radial(w, bra.F, ket.G, phi)
    return out + _zero(bra, ket)


def me_n_phi(bra: States, ket: States, phi) -> complex | np.ndarray:
    """(bra || n phi(r) || ket) with n the radial unit vector."""
    if not _coupled(bra, ket):
        return _zero(bra, ket)
    c_gg, c_ff = n_angular_factors(bra.channel, ket.channel)
    w = bra.spectrum.basis.w
    out = 0j
    if c_gg:
        out = out + c_gg * _radial(w, bra.G, ket.G, phi)
    if c_ff:
        out = out + c_ff * _radial(w, bra.F, ket.F, phi)
    return out + _zero(bra, ket)


def _nodes(bra: States) -> np.ndarray:
    return bra.spectrum.basis.r


def _coulomb_strength(bra: States) -> float:
    return bra.spectrum.alpha * bra.spectrum.Z


def me_momentum(bra: States, ket: States) -> complex | np.ndarray:
    """(bra || p || ket) from p = (alpha H + H alpha)/2 - alpha V on eigenstates."""
    r = _nodes(bra)
    half_sum = 0.5 * (bra.energy + ket.energy)
    return (half_sum * me_alpha_phi(bra, ket, 1.0)
            + _coulomb_strength(bra) * me_alpha_phi(bra, ket, 1.0 / r))


def _energy_difference(bra: States, ket: States, energy_difference):
    if energy_difference is None:
        return bra.energy - ket.energy
    return energy_difference


def _per_ket(values, r: np.ndarray, fn):
    """Kernel on the nodes for a scalar or per-ket vector of parameters."""
    values = np.asarray(values, dtype=float)
    if values.ndim == 0:
        return fn(float(values), r)
    return fn(values[None, :], r[:, None])


def me_D(bra: States, ket: States, omega, energy_difference=None) -> complex | np.ndarray:
    """(bra || D(omega) || ket) with the commutator written as an energy difference.

    ``omega`` may be a vector aligned with a block side.  ``energy_difference``
    overrides eps_bra - eps_ket (used where the difference is known exactly).
    """
    r = _nodes(bra)
    az = _coulomb_strength(bra)
    de = _energy_difference(bra, ket, energy_difference)
    omega = np.abs(np.asarray(omega, dtype=float))
    if omega.ndim == 0 and omega == 0.0:
        return az * me_alpha_phi(bra, ket, 1.0 / r) - 0.5j * az * de * me_n_phi(bra, ket, 1.0)
    d1 = az * me_alpha_phi(bra, ket, _per_ket(omega, r, lambda w_, x: np.exp(1j * w_ * x) / x))
    d2 = 1j * az * de * me_n_phi(bra, ket, _per_ket(omega, r, kernel_f))
    return d1 + d2


def me_S(bra: States, ket: States, y, energy_difference=None) -> complex | np.ndarray:
    """(bra || S(y) || ket), the imaginary-frequency analogue of D."""
    r = _nodes(bra)
    az = _coulomb_strength(bra)
    de = _energy_difference(bra, ket, energy_difference)
    y = np.asarray(y, dtype=float)
    if np.any(y <= 0):
        raise ValueError("y must be positive")
    s1 = az * me_alpha_phi(bra, ket, _per_ket(y, r, lambda y_, x: np.exp(-y_ * x) / x))
    s2 = 1j * az * de * me_n_phi(bra, ket, _per_ket(y, r, kernel_ftilde))
    return s1 + s2


def p_squared(state: States) -> float:
    """<a|p^2|a> from the first-order radial operators acting on G and F."""
    if state.is_block:
        raise ValueError("p_squared takes a single state")
    sp, i = state.spectrum, state.index
    r, w = sp.basis.r, sp.basis.w
    kappa = sp.kappa
    up = sp.dG[:, i] + kappa * sp.G[:, i] / r
    down = sp.dF[:, i] - kappa * sp.F[:, i] / r
    return float(np.sum(w * (up ** 2 + down ** 2)))


def radial_tables(bra: States, ket: States, kernels: np.ndarray) -> dict[str, np.ndarray]:
    """Radial integrals of a single bra against a ket block for many kernels at once.

    ``kernels`` has shape (n_nodes, n_kernels); returns arrays (n_kernels, n_block)
    keyed by 'gf', 'fg', 'gg', 'ff'.
    """
    if bra.is_block or not ket.is_block:
        raise ValueError("radial_tables expects a single bra and a ket block")
    w = bra.spectrum.basis.w
    wk = kernels * w[:, None]
    out = {}
    for tag, x, y in (("gf", bra.G, ket.F), ("fg", bra.F, ket.G),
                      ("gg", bra.G, ket.G), ("ff", bra.F, ket.F)):
        out[tag] = (wk * x[:, None]).T @ y
    return out


def operator_tables(bra: States, ket: States, kernels: np.ndarray):
    """Reduced elements of alpha*phi_j and n*phi_j for many radial kernels phi_j.

    Returns four arrays of shape (n_kernels, n_block):
    (a||alpha phi||n), (n||alpha phi||a), (a||n phi||n), (n||n phi||a).
    """
    block = ket.spectrum
    shape = (kernels.shape[1], ket.size)
    if not _coupled(bra, ket):
        z = np.zeros(shape, dtype=complex)
        return z, z.copy(), z.copy(), z.copy()
    tab = radial_tables(bra, ket, kernels)
    ca, cb = bra.channel, KappaChannel.from_kappa(block.kappa)
    f_gf, f_fg = alpha_angular_factors(ca, cb)
    r_gf, r_fg = alpha_angular_factors(cb, ca)
    n_gg, n_ff = n_angular_factors(ca, cb)
    m_gg, m_ff = n_angular_factors(cb, ca)
    a_fwd = f_gf * tab["gf"] + f_fg * tab["fg"]
    # reversed roles: G_n F_a is the 'fg' integral of (a, n)
    a_rev = r_gf * tab["fg"] + r_fg * tab["gf"]
    n_fwd = n_gg * tab["gg"] + n_ff * tab["ff"] + 0j
    n_rev = m_gg * tab["gg"] + m_ff * tab["ff"] + 0j
    return a_fwd, a_rev, n_fwd, n_rev
