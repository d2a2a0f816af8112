"""Cached runs shared by several test modules (each solve takes ~0.5 s)."""

from __future__ import annotations

from functools import lru_cache

from nuclear_recoil.basis import StateLabel
from nuclear_recoil.recoil_one import RecoilConfig, channels_for, p_function
from nuclear_recoil.recoil_two import q_function


def config(n_splines: int = 65, **kw) -> RecoilConfig:
    return RecoilConfig(n_splines=n_splines, sweep=(), **kw)


@lru_cache(maxsize=None)
def run_one(Z: int, state: str, n_splines: int = 65, **kw):
    return p_function(Z, StateLabel.parse(state), config(n_splines, **kw))


@lru_cache(maxsize=None)
def run_two(Z: int, n_splines: int = 65):
    return q_function(Z, config(n_splines))


@lru_cache(maxsize=None)
def channels(Z: int, state: str, n_splines: int = 65, **kw):
    return channels_for(Z, StateLabel.parse(state), config(n_splines, **kw))


def rel(a: float, b: float) -> float:
    return abs(a - b) / abs(b)


@lru_cache(maxsize=None)
def run_fit(state: str):
    """Expansion fit on the standard sample set with the default fit basis size."""
    from nuclear_recoil.analysis import fit_stability, fit_state

    result, runs = fit_state(state)
    samples = tuple((r.Z, r.P_c, r.P_tr1, r.P_tr2) for r in runs)
    return result, samples, fit_stability(samples, result.model)


@lru_cache(maxsize=None)
def run_lamb():
    from nuclear_recoil.analysis import lamb_shift_recoil_delta

    return lamb_shift_recoil_delta(1, results={s: run_one(1, s) for s in ("1s", "2s", "2p1/2")})


@lru_cache(maxsize=None)
def run_uranium():
    from nuclear_recoil.analysis import uranium_transition

    return uranium_transition(results={s: run_one(92, s) for s in ("1s", "2s", "2p1/2")}, two=run_two(92))
