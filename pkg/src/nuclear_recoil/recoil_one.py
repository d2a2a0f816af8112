"""One-electron nuclear recoil corrections to all orders in alpha*Z.

Energies are in units of m^2/M (natural units, m = 1, the factor 1/M pulled out).
The spectral sums run over the complete finite-basis spectrum of every channel
coupled to the reference state by a rank-1 odd-parity operator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .angular import KappaChannel, allowed_intermediate_kappas, msum_weight
from .basis import (ALPHA, DiracSpectrum, SplineBasis, StateLabel, analytic_state,
                    basis_for, default_box_radius, solve_spectrum)
from .matrix_elements import States, me_D, me_alpha_phi, me_momentum, me_n_phi, operator_tables, p_squared
from .special import gauss_legendre, kernel_ftilde, phi1, phi2


@dataclass(frozen=True)
class RecoilConfig:
    n_splines: int = 65
    spline_order: int = 9
    quad_order: int = 12
    box_factor: float = 40.0
    box_radius: float | None = None
    alpha: float = ALPHA
    # imaginary-frequency integral: Gauss-Legendre panels in ln y
    y_nodes: int = 8
    y_panel_width: float = 1.0
    y_floor: float = 1e-8       # lower limit in units of (alpha Z)^2
    y_ceiling: float = 1e3      # upper limit in units of the largest inverse node radius
    sweep: tuple[int, ...] = (50, 80)

    def __post_init__(self):
        if self.n_splines < self.spline_order + 2:
            raise ValueError("too few splines for the spline order")
        if self.spline_order < 4 or self.quad_order < 1 or self.y_nodes < 1:
            raise ValueError("spline order must be >= 4 and quadrature orders >= 1")
        if self.box_factor <= 0 or (self.box_radius is not None and self.box_radius <= 0):
            raise ValueError("box size must be positive")
        if not 0 < self.alpha < 1:
            raise ValueError("alpha out of range")


@dataclass(frozen=True, eq=False)
class ChannelSet:
    """Finite-basis spectra of several kappa channels on one common spline basis."""

    Z: int
    alpha: float
    basis: SplineBasis = field(repr=False)
    spectra: dict[int, DiracSpectrum] = field(repr=False)

    def spectrum(self, kappa: int) -> DiracSpectrum:
        try:
            return self.spectra[kappa]
        except KeyError:
            raise ValueError(f"channel kappa={kappa} missing from the spectrum set") from None

    def state(self, label: StateLabel) -> States:
        sp = self.spectrum(label.kappa)
        return States(sp, sp.bound_index(label.n))


def build_channels(Z: int, kappas, config: RecoilConfig = RecoilConfig(), n_max: int = 1) -> ChannelSet:
    radius = config.box_radius
    if radius is None:
        radius = default_box_radius(Z, n_max, config.alpha, config.box_factor)
    basis = basis_for(Z, config.n_splines, config.spline_order, config.quad_order, radius, config.alpha)
    spectra = {k: solve_spectrum(k, basis, Z, config.alpha) for k in sorted(set(kappas))}
    return ChannelSet(Z, config.alpha, basis, spectra)


def channels_for(Z: int, label: StateLabel, config: RecoilConfig = RecoilConfig()) -> ChannelSet:
    kappas = {label.kappa} | allowed_intermediate_kappas(label.kappa)
    return build_channels(Z, kappas, config, n_max=label.n)


# --- lowest order --------------------------------------------------------------

@dataclass(frozen=True)
class LowestOrder:
    coulomb: float
    transverse: float
    total: float


def lowest_order(Z: int, label: StateLabel, alpha: float = ALPHA) -> LowestOrder:
    """Closed-form first-order recoil terms from the Dirac virial relations."""
    st = analytic_state(Z, label.n, label.kappa, alpha)
    az2 = (alpha * Z) ** 2
    k, g, nr, N = st.kappa, st.gamma, st.n_r, st.N
    bracket = k * (2 * k * (g + nr) - N) + nr * (4 * g * g - 1)
    shift = az2 * az2 * bracket / (N ** 4 * g * (4 * g * g - 1))
    # 1 - (gamma + n_r)^2/N^2 is exactly (alpha Z)^2/N^2; use the cancellation-free form
    base = az2 / (N * N)
    return LowestOrder(0.5 * base + shift, -shift, 0.5 * base)


# --- reference state and intermediate channels ---------------------------------

@dataclass(frozen=True, eq=False)
class _Channel:
    block: States
    weight: float
    energies: np.ndarray
    delta: np.ndarray
    sign: np.ndarray
    below: np.ndarray
    regular: np.ndarray      # eps_n != eps_a (analytically)
    degenerate: np.ndarray
    p_an: np.ndarray
    p_na: np.ndarray


def _degenerate_partner(channels: ChannelSet, label: StateLabel, kappa: int):
    if kappa != -label.kappa:
        return None
    try:
        partner = StateLabel(label.n, kappa)
    except ValueError:
        return None
    return channels.spectrum(kappa).bound_index(partner.n)


def _intermediates(channels: ChannelSet, label: StateLabel) -> tuple[States, list[_Channel]]:
    a = channels.state(label)
    eps_a = float(a.energy)
    out = []
    for kappa in sorted(allowed_intermediate_kappas(label.kappa)):
        sp = channels.spectrum(kappa)
        block = States(sp)
        e = sp.energies
        degenerate = np.zeros(len(e), dtype=bool)
        partner = _degenerate_partner(channels, label, kappa)
        if partner is not None:
            degenerate[partner] = True
        delta = np.abs(eps_a - e)
        regular = ~degenerate & (delta > 0)
        # the spurious vector sits at the lowest kappa' = -kappa level; it stays in
        # the spectral sums but is not a physical decay channel
        below = (np.abs(e) < eps_a) & regular
        below[sp.spurious_indices()] = False
        out.append(_Channel(
            block=block,
            weight=msum_weight(label.two_j, KappaChannel.from_kappa(kappa).two_j),
            energies=e, delta=delta, sign=np.sign(eps_a - e), below=below,
            regular=regular, degenerate=degenerate,
            p_an=me_momentum(a, block), p_na=me_momentum(block, a),
        ))
    return a, out


@dataclass(frozen=True)
class DualForm:
    """A correction evaluated by two mathematically equivalent routes."""

    value: complex
    alternative: complex

    @property
    def relative_gap(self) -> float:
        return abs(self.value.real - self.alternative.real) / abs(self.value.real)


# --- Coulomb term ------------------------------------------------------------------

def coulomb_second(channels: ChannelSet, label: StateLabel) -> DualForm:
    """Negative-energy sum of p p, and the complement form <p^2> minus the positive sum."""
    a, chans = _intermediates(channels, label)
    negative = 0j
    positive = 0j
    for ch in chans:
        terms = ch.weight * ch.p_an * ch.p_na
        negative += terms[ch.energies < 0].sum()
        positive += terms[ch.energies > 0].sum()
    return DualForm(-negative, -(p_squared(a) - positive))


def momentum_sum_rule(channels: ChannelSet, label: StateLabel) -> tuple[float, float]:
    """(sum over the full spectrum of |<a|p|n>|^2 with the m-sum weight, <a|p^2|a>)."""
    a, chans = _intermediates(channels, label)
    total = sum((ch.weight * ch.p_an * ch.p_na).sum() for ch in chans)
    return float(total.real), p_squared(a)


# --- imaginary-frequency grid ---------------------------------------------------------

@dataclass(frozen=True)
class YGrid:
    nodes: np.ndarray
    weights: np.ndarray
    floor: float


def y_grid(channels: ChannelSet, config: RecoilConfig, nodes_scale: int = 1) -> YGrid:
    """Composite Gauss-Legendre rule in u = ln y between a floor and a ceiling.

    The floor sits far below any physical level spacing; the ceiling is far
    beyond the inverse of the innermost quadrature node, where every kernel is
    negligible.
    """
    az = channels.alpha * channels.Z
    lo = math.log(config.y_floor * az * az)
    hi = math.log(config.y_ceiling / channels.basis.r[0])
    n_panels = max(1, math.ceil((hi - lo) / config.y_panel_width))
    edges = np.linspace(lo, hi, n_panels + 1)
    rule = gauss_legendre(config.y_nodes * nodes_scale)
    half = 0.5 * np.diff(edges)
    u = (half[:, None] * (rule.nodes + 1.0) + edges[:-1, None]).ravel()
    wu = (half[:, None] * rule.weights).ravel()
    y = np.exp(u)
    return YGrid(y, wu * y, math.exp(lo))


def _s_tables(a: States, ch: _Channel, ygrid: YGrid):
    """<a|S(y)|n> and <n|S(y)|a> on the y nodes plus the static y = 0 column."""
    r = a.spectrum.basis.r
    az = a.spectrum.alpha * a.spectrum.Z
    y = np.concatenate([[0.0], ygrid.nodes])
    yr = np.outer(r, y)
    k_alpha = np.exp(-yr) / r[:, None]
    k_n = np.empty_like(yr)
    k_n[:, 0] = -0.5
    k_n[:, 1:] = kernel_ftilde(ygrid.nodes[None, :], r[:, None])
    a_fwd, a_rev, _, _ = operator_tables(a, ch.block, k_alpha)
    _, _, n_fwd, n_rev = operator_tables(a, ch.block, k_n)
    de = float(a.energy) - ch.energies
    s_an = az * a_fwd + 1j * az * de * n_fwd
    s_na = az * a_rev - 1j * az * de * n_rev
    return s_an, s_na


def _y_integral(ch: _Channel, products: np.ndarray, ygrid: YGrid) -> complex:
    """Integral over y of sum_n (eps_a - eps_n)/(y^2 + Delta_n^2) * products[y, n].

    Row 0 of ``products`` is the y = 0 value, used for the analytic piece below
    the floor: the integral of the Lorentzian up to the floor is an arctangent.
    """
    m = ch.regular
    diff = (ch.sign * ch.delta)[m]
    d2 = ch.delta[m] ** 2
    lor = diff[None, :] / (ygrid.nodes[:, None] ** 2 + d2[None, :])
    body = np.einsum("y,yn,yn->", ygrid.weights, lor, products[1:, m])
    tail = np.sum(ch.sign[m] * np.arctan(ygrid.floor / ch.delta[m]) * products[0, m])
    return complex(body + tail)


# --- one transverse photon -------------------------------------------------------------

def _tr1_united(a: States, ch: _Channel) -> complex:
    m = ch.regular
    if not m.any():
        return 0j
    idx = np.flatnonzero(m)
    block = States(ch.block.spectrum, idx)
    r = a.spectrum.basis.r
    az = a.spectrum.alpha * a.spectrum.Z
    delta = ch.delta[idx][None, :]
    sign = ch.sign[idx][None, :]
    below = ch.below[idx][None, :]
    rr = r[:, None]
    k1 = phi1(delta, rr, sign, below)
    k2 = phi2(delta, rr, sign, below)
    # <a| i alpha phi |n> is i times the momentum element
    left = 1j * ch.p_an[idx]
    right = 1j * me_alpha_phi(block, a, k1) + me_n_phi(block, a, k2)
    diff = ch.energies[idx] - float(a.energy)
    return complex(2 * az / math.pi * np.sum(diff * ch.weight * left * right))


def _tr1_contour(a: States, ch: _Channel, ygrid: YGrid, s_tables) -> tuple[float, float, complex]:
    """(2a, 2b, 2c) pieces for one channel."""
    m = ch.regular
    d0_na = me_D(ch.block, a, 0.0)
    d0_an = me_D(a, ch.block, 0.0)
    piece_a = 0.5 * ch.weight * np.sum((ch.p_an * d0_na + d0_an * ch.p_na)[m])
    s_an, s_na = s_tables
    prod = ch.weight * ch.p_an[None, :] * s_na
    piece_b = 2 / math.pi * _y_integral(ch, prod, ygrid).real
    piece_c = 0j
    for i in np.flatnonzero(ch.below):
        n = States(ch.block.spectrum, int(i))
        w = ch.delta[i]
        piece_c += ch.p_an[i] * me_D(n, a, w) + me_D(a, n, w) * ch.p_na[i]
    piece_c = -ch.weight * piece_c
    return float(piece_a.real), float(piece_b), complex(piece_c)


@dataclass(frozen=True)
class TransverseOnePieces:
    static: float
    y_integral: float
    open_channels: complex

    @property
    def total(self) -> complex:
        return self.static + self.y_integral + self.open_channels


def transverse_one_pieces(channels: ChannelSet, label: StateLabel,
                          config: RecoilConfig = RecoilConfig()) -> TransverseOnePieces:
    a, chans = _intermediates(channels, label)
    ygrid = y_grid(channels, config)
    pa = pb = 0.0
    pc = 0j
    for ch in chans:
        da, db, dc = _tr1_contour(a, ch, ygrid, _s_tables(a, ch, ygrid))
        pa, pb, pc = pa + da, pb + db, pc + dc
    return TransverseOnePieces(pa, pb, pc)


def transverse_one(channels: ChannelSet, label: StateLabel,
                   config: RecoilConfig = RecoilConfig()) -> DualForm:
    """One-transverse-photon term: united closed-kernel sum vs. the contour pieces.

    ``value`` carries the real part from the closed-kernel sum and the imaginary
    (width) part from the open-channel piece.
    """
    a, chans = _intermediates(channels, label)
    united = sum(_tr1_united(a, ch) for ch in chans).real
    pieces = transverse_one_pieces(channels, label, config)
    return DualForm(complex(united, pieces.open_channels.imag), pieces.total)


# --- two transverse photons ------------------------------------------------------------

@dataclass(frozen=True)
class TransverseTwoPieces:
    y_integral: complex
    degenerate: complex
    open_channels: complex

    @property
    def total(self) -> complex:
        return self.y_integral + self.degenerate + self.open_channels


def transverse_two_pieces(channels: ChannelSet, label: StateLabel,
                          config: RecoilConfig = RecoilConfig(), y_nodes_scale: int = 1) -> TransverseTwoPieces:
    a, chans = _intermediates(channels, label)
    ygrid = y_grid(channels, config, y_nodes_scale)
    p_a = p_b = p_c = 0j
    for ch in chans:
        s_an, s_na = _s_tables(a, ch, ygrid)
        p_a += -_y_integral(ch, ch.weight * s_an * s_na, ygrid) / math.pi
        for i in np.flatnonzero(ch.degenerate):
            n = States(ch.block.spectrum, int(i))
            # exact degeneracy: the commutator part of D(0) vanishes
            p_b += 0.5 * ch.weight * me_D(a, n, 0.0, 0.0) * me_D(n, a, 0.0, 0.0)
        for i in np.flatnonzero(ch.below):
            n = States(ch.block.spectrum, int(i))
            w = ch.delta[i]
            p_c += ch.weight * me_D(a, n, w) * me_D(n, a, w)
    return TransverseTwoPieces(complex(p_a), complex(p_b), complex(p_c))


def transverse_two(channels: ChannelSet, label: StateLabel, config: RecoilConfig = RecoilConfig()) -> complex:
    return transverse_two_pieces(channels, label, config).total


# --- assembly ------------------------------------------------------------------------

def p_scale(Z: int, n: int, alpha: float = ALPHA) -> float:
    """(alpha Z)^5 / (pi n^3): converts m^2/M energies into the P function."""
    return (alpha * Z) ** 5 / (math.pi * n ** 3)


@dataclass(frozen=True)
class RecoilBreakdownOne:
    Z: int
    state: StateLabel
    lowest: LowestOrder
    coulomb: complex
    transverse_one: complex
    transverse_two: complex
    P_c: float
    P_tr1: float
    P_tr2: float
    uncertainty: float = 0.0
    coulomb_gap: float = float("nan")
    transverse_one_gap: float = float("nan")
    sweep: dict[int, float] = field(default_factory=dict)

    @property
    def P(self) -> float:
        return self.P_c + self.P_tr1 + self.P_tr2

    @property
    def second_order(self) -> complex:
        return self.coulomb + self.transverse_one + self.transverse_two


def _single_run(Z: int, label: StateLabel, config: RecoilConfig) -> RecoilBreakdownOne:
    channels = channels_for(Z, label, config)
    c = coulomb_second(channels, label)
    t1 = transverse_one(channels, label, config)
    t2 = transverse_two(channels, label, config)
    scale = p_scale(Z, label.n, config.alpha)
    return RecoilBreakdownOne(
        Z, label, lowest_order(Z, label, config.alpha), complex(c.value), complex(t1.value), complex(t2),
        float(c.value.real / scale), float(t1.value.real / scale), float(t2.real / scale),
        coulomb_gap=c.relative_gap, transverse_one_gap=t1.relative_gap,
    )


def p_function(Z: int, label: StateLabel | str, config: RecoilConfig = RecoilConfig()) -> RecoilBreakdownOne:
    """All one-electron recoil pieces for one state, with a spline-count uncertainty.

    The band is the largest deviation of P over ``config.sweep`` from the
    value at ``config.n_splines``.
    """
    if isinstance(label, str):
        label = StateLabel.parse(label)
    main = _single_run(Z, label, config)
    sweep = {config.n_splines: main.P}
    for n in config.sweep:
        if n not in sweep:
            sweep[n] = _single_run(Z, label, replace(config, n_splines=n, sweep=())).P
    band = max(abs(p - main.P) for p in sweep.values())
    return replace(main, uncertainty=band, sweep=dict(sorted(sweep.items())))


# --- low-Z reference -------------------------------------------------------------------

_BETHE_1S = 2.984129
_BETHE_2S = 2.811769
_BETHE_2P = 0.030017


def salpeter_p(label: StateLabel | str, Z: int, alpha: float = ALPHA) -> float:
    """Leading-log (alpha Z)^5 recoil result for 1s, 2s and 2p1/2."""
    if isinstance(label, str):
        label = StateLabel.parse(label)
    if Z <= 0:
        raise ValueError("Z must be positive")
    log_az = math.log(alpha * Z)
    if label == StateLabel(1, -1):
        return -2 / 3 * log_az - 8 / 3 * _BETHE_1S + 14 / 3 * math.log(2) + 62 / 9
    if label == StateLabel(2, -1):
        return -2 / 3 * log_az - 8 / 3 * _BETHE_2S + 187 / 18
    if label == StateLabel(2, 1):
        return 8 / 3 * _BETHE_2P - 7 / 18
    raise ValueError(f"no low-Z reference for state {label}")
