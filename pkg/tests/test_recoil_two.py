import mpmath as mp
import pytest

from helpers import config, rel, run_two
from nuclear_recoil.basis import StateLabel
from nuclear_recoil.recoil_one import RecoilConfig, build_channels, transverse_one_pieces, transverse_two_pieces
from nuclear_recoil.recoil_two import (VALENCE_2P, VALENCE_2S, breit_expectation, combined_coulomb, q_function,
                                       q_leading, q_scale, two_electron_int)
from reference import TABLE_Q, TABLE_QL, tolerance


def full_channels(Z):
    return build_channels(Z, (-2, -1, 1, 2), config(), n_max=2)


def q_leading_ref(Z):
    mp.mp.dps = 30
    x = (mp.mpf(Z) / mp.mpf("137.0359895")) ** 2
    log98 = mp.log(mp.mpf(9) / 8)
    return (float(1 + x * (mp.mpf(-29) / 48 + log98)), float(1 + x * (mp.mpf(55) / 48 + log98)),
            float(-mp.mpf(7) / 4 * x), float(mp.mpf(49) / 64 * x * x))


# --- table values ------------------------------------------------------------------------

def test_q_low_z():
    r = run_two(5)
    assert abs(r.Q - TABLE_Q[5][3]) <= 1e-4
    assert round(r.Q_c, 5) == TABLE_Q[5][0]
    assert round(r.Q_tr1, 5) == TABLE_Q[5][1]
    assert round(r.Q_tr2, 5) == TABLE_Q[5][2]


def test_q_uranium():
    assert abs(run_two(92).Q - TABLE_Q[92][3]) <= 5e-4


@pytest.mark.parametrize("Z", [5, 50, 92])
def test_q_components(Z):
    r = run_two(Z)
    for got, ref in zip((r.Q_c, r.Q_tr1, r.Q_tr2, r.Q), TABLE_Q[Z]):
        assert abs(got - ref) <= tolerance(5e-6, ref)


def test_q_components_sum():
    r = run_two(50)
    assert r.Q == r.Q_c + r.Q_tr1 + r.Q_tr2
    assert r.total.real / q_scale(50) == pytest.approx(r.Q, rel=1e-12)


# --- closed-form leading terms -----------------------------------------------------------------

@pytest.mark.parametrize("Z", sorted(TABLE_QL))
def test_q_leading_column(Z):
    ours = q_leading(Z)
    ref = q_leading_ref(Z)
    for a, b in zip(ours, ref):
        assert abs(a - b) <= 1e-12
    assert abs(ours[0] - TABLE_QL[Z]) <= 5e-6


def test_q_leading_components_add_up_to_order():
    Z = 5
    ql, qc, qt1, _ = q_leading(Z)
    x = (Z / 137.0359895) ** 2
    assert abs(qc + qt1 - ql) <= 1e-15
    r = run_two(Z)
    # numerical components approach the expansion with an O(x^2) remainder
    for got, lead in ((r.Q_c, qc), (r.Q_tr1, qt1)):
        assert abs(got - lead) <= 10 * x * x


def test_q_tr2_leading():
    r = run_two(5)
    lead = q_leading(5)[3]
    assert rel(r.Q_tr2, lead) < 5e-3
    assert q_leading(92)[3] == pytest.approx(49 / 64 * (92 / 137.0359895) ** 4, rel=1e-14)


def test_q_reference_column_matches_leading():
    assert run_two(92).Q_L == q_leading(92)[0]


# --- selection rules and identities ------------------------------------------------------------

@pytest.mark.parametrize("Z", [5, 92])
def test_s_valence_is_exactly_zero(Z):
    ch = full_channels(Z)
    assert two_electron_int(ch, VALENCE_2S) == (0j, 0j, 0j)
    assert breit_expectation(ch, VALENCE_2S) == 0.0
    r = q_function(Z, config(), valence=VALENCE_2S)
    assert (r.Q_c, r.Q_tr1, r.Q_tr2, r.Q) == (0.0, 0.0, 0.0, 0.0)


@pytest.mark.parametrize("Z", [10, 92])
def test_open_channel_imaginary_parts_cancel(Z):
    ch = full_channels(Z)
    open_one = (transverse_one_pieces(ch, VALENCE_2P, config()).open_channels
                + transverse_two_pieces(ch, VALENCE_2P, config()).open_channels)
    _, t1, t2 = two_electron_int(ch, VALENCE_2P)
    assert abs(t1.imag + t2.imag) > 0
    assert abs((open_one + t1 + t2).imag) <= 1e-10 * abs(t1 + t2)


@pytest.mark.parametrize("Z", [10, 92])
def test_s_valence_energy_is_real(Z):
    ch = full_channels(Z)
    t1 = transverse_one_pieces(ch, VALENCE_2S, config())
    t2 = transverse_two_pieces(ch, VALENCE_2S, config())
    scale = abs(t1.total.real) + abs(t2.total.real)
    assert abs(t1.total.imag + t2.total.imag) <= 1e-10 * scale


@pytest.mark.parametrize("Z", [5, 92])
@pytest.mark.parametrize("valence", [VALENCE_2S, VALENCE_2P])
def test_combined_coulomb_bookkeeping(Z, valence):
    simple, separate = combined_coulomb(full_channels(Z), valence)
    assert abs(simple - separate) <= 1e-10 * abs(separate)


# --- Breit-level operator ----------------------------------------------------------------------

def test_breit_low_z_matches_leading():
    Z = 5
    b = breit_expectation(full_channels(Z), VALENCE_2P)
    expected = q_scale(Z) * q_leading(Z)[0]
    assert rel(b, expected) <= 1e-4


def test_breit_high_z_misses_two_photon_term():
    # the instantaneous operator has no two-transverse-photon part; what remains
    # is the small retardation of the one-photon exchange
    Z = 92
    q_breit = breit_expectation(full_channels(Z), VALENCE_2P) / q_scale(Z)
    r = run_two(Z)
    assert abs(r.Q - q_breit - r.Q_tr2) < 0.01
    assert abs(q_breit - r.Q_c - r.Q_tr1) < 0.01


# --- errors and bands --------------------------------------------------------------------------

def test_missing_core_rejected():
    ch = build_channels(30, (1,), config(), n_max=2)
    with pytest.raises(ValueError):
        two_electron_int(ch, VALENCE_2P)


def test_invalid_valence_rejected():
    with pytest.raises(ValueError):
        two_electron_int(full_channels(5), StateLabel(1, -1))


def test_sweep_band():
    r = q_function(5, RecoilConfig(sweep=(50, 80)))
    assert sorted(r.sweep) == [50, 65, 80]
    assert r.uncertainty < 1e-5
