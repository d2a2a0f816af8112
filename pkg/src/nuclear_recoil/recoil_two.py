"""Two-electron recoil corrections for a valence electron outside a closed (1s)^2 core.

Only core states degenerate with 1s enter, and the sum over the two core spin
projections is the reduced-element m-sum, so the whole correction is a product
of single reduced elements between the valence state and the 1s orbital.
Units are m^2/M as in the one-electron module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .angular import KappaChannel, allowed_intermediate_kappas, msum_weight
from .basis import ALPHA, StateLabel, analytic_energy
from .matrix_elements import States, me_D, me_momentum
from .recoil_one import ChannelSet, RecoilConfig, _intermediates, build_channels

CORE = StateLabel(1, -1)
VALENCE_2S = StateLabel(2, -1)
VALENCE_2P = StateLabel(2, 1)

# nonrelativistic normalisation of the 2p - 1s exchange term
Q_PREFACTOR = 2 ** 9 / 3 ** 8


@dataclass(frozen=True)
class RecoilBreakdownTwo:
    Z: int
    valence: StateLabel
    coulomb: complex
    transverse_one: complex
    transverse_two: complex
    Q_c: float
    Q_tr1: float
    Q_tr2: float
    Q_L: float
    uncertainty: float = 0.0
    sweep: dict[int, float] = field(default_factory=dict)

    @property
    def total(self) -> complex:
        return self.coulomb + self.transverse_one + self.transverse_two

    @property
    def Q(self) -> float:
        return self.Q_c + self.Q_tr1 + self.Q_tr2


def q_scale(Z: int, alpha: float = ALPHA) -> float:
    """Energy (units m^2/M) corresponding to Q = 1; negative by convention."""
    return -Q_PREFACTOR * (alpha * Z) ** 2


def _core_pair(channels: ChannelSet, valence: StateLabel):
    if valence not in (VALENCE_2S, VALENCE_2P):
        raise ValueError(f"valence state must be 2s or 2p1/2, got {valence}")
    a = channels.state(valence)
    try:
        core = channels.state(CORE)
    except LookupError as exc:
        raise ValueError("no 1s eigenstate in the spectrum set") from exc
    w = msum_weight(valence.two_j, KappaChannel.from_kappa(CORE.kappa).two_j)
    omega = (analytic_energy(channels.Z, valence.n, valence.kappa, channels.alpha)
             - analytic_energy(channels.Z, CORE.n, CORE.kappa, channels.alpha))
    return a, core, w, omega


def two_electron_int(channels: ChannelSet, valence: StateLabel) -> tuple[complex, complex, complex]:
    """(Coulomb, one-transverse, two-transverse) exchange terms with the core."""
    a, core, w, omega = _core_pair(channels, valence)
    if CORE.kappa not in allowed_intermediate_kappas(valence.kappa):
        return 0j, 0j, 0j
    p_an, p_na = me_momentum(a, core), me_momentum(core, a)
    d_an = me_D(a, core, omega, energy_difference=omega)
    d_na = me_D(core, a, omega, energy_difference=-omega)
    coulomb = -w * p_an * p_na
    tr1 = w * (p_an * d_na + d_an * p_na)
    tr2 = -w * d_an * d_na
    return complex(coulomb), complex(tr1), complex(tr2)


def q_leading(Z: int, alpha: float = ALPHA) -> tuple[float, float, float, float]:
    """(Q_L, Q_c, Q_tr1, Q_tr2) from the low-order alpha*Z expansion."""
    az2 = (alpha * Z) ** 2
    log98 = math.log(9 / 8)
    return (1 + az2 * (-29 / 48 + log98), 1 + az2 * (55 / 48 + log98),
            -7 / 4 * az2, 49 / 64 * az2 * az2)


def two_electron_channels(Z: int, config: RecoilConfig = RecoilConfig()) -> ChannelSet:
    return build_channels(Z, (-1, 1), config, n_max=2)


def _q_single(Z: int, config: RecoilConfig, valence: StateLabel) -> RecoilBreakdownTwo:
    channels = two_electron_channels(Z, config)
    c, t1, t2 = two_electron_int(channels, valence)
    s = q_scale(Z, config.alpha)
    return RecoilBreakdownTwo(Z, valence, c, t1, t2, float(c.real / s), float(t1.real / s), float(t2.real / s),
                              q_leading(Z, config.alpha)[0])


def q_function(Z: int, config: RecoilConfig = RecoilConfig(),
               valence: StateLabel = VALENCE_2P) -> RecoilBreakdownTwo:
    """Q components for one Z; the band is the spread over ``config.sweep`` as for P."""
    main = _q_single(Z, config, valence)
    sweep = {config.n_splines: main.Q}
    for n in config.sweep:
        if n not in sweep:
            sweep[n] = _q_single(Z, replace(config, n_splines=n, sweep=()), valence).Q
    band = max(abs(q - main.Q) for q in sweep.values())
    return replace(main, uncertainty=band, sweep=dict(sorted(sweep.items())))


def breit_expectation(channels: ChannelSet, valence: StateLabel) -> float:
    """Core-valence exchange of the two-body part of the Breit-level recoil operator.

    The operator is (1/2M) sum_{s != s'} [p_s.p_s' - 2 D_s(0).p_s'], with D(0)
    the static transverse vertex; only the exchange term survives parity.
    """
    a, core, w, omega = _core_pair(channels, valence)
    if CORE.kappa not in allowed_intermediate_kappas(valence.kappa):
        return 0.0
    p_an, p_na = me_momentum(a, core), me_momentum(core, a)
    d_an = me_D(a, core, 0.0, energy_difference=omega)
    d_na = me_D(core, a, 0.0, energy_difference=-omega)
    return float((-w * p_an * p_na + w * (d_an * p_na + p_an * d_na)).real)


def combined_coulomb(channels: ChannelSet, valence: StateLabel) -> tuple[float, float]:
    """Total Coulomb recoil of the valence electron outside the core, two ways.

    First value: half the p.p sum over states above the core level minus half
    the sum over states at or below it (the core level is then treated as an
    occupied, negative-energy-like state).  Second value: the separate
    bookkeeping, first-order term written as half the full spectral sum, minus
    the negative-energy sum, plus the core exchange term.  Only the physical
    1s eigenvector counts as the core level.
    """
    a, chans = _intermediates(channels, valence)
    core = channels.state(CORE)
    simple = full = negative = 0.0
    for ch in chans:
        terms = (ch.weight * ch.p_an * ch.p_na).real
        lower = ch.energies < 0
        if ch.block.spectrum is core.spectrum:
            lower = lower.copy()
            lower[core.index] = True
        simple += 0.5 * (terms[~lower].sum() - terms[lower].sum())
        full += terms.sum()
        negative += terms[ch.energies < 0].sum()
    exchange = two_electron_int(channels, valence)[0].real
    return float(simple), float(0.5 * full - negative + exchange)
