"""Constants registry, unit conversion, alpha*Z expansion fits and derived observables."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .basis import StateLabel
from .recoil_one import RecoilBreakdownOne, RecoilConfig, lowest_order, p_function, salpeter_p
from .recoil_two import RecoilBreakdownTwo, q_function, q_scale


def _default_nuclides() -> dict[tuple[int, int], float]:
    # atomic masses in u; hydrogen is handled through the proton mass
    return {(92, 238): 238.050788}


@dataclass(frozen=True)
class PhysicalConstants:
    alpha_inverse: float = 137.0359895
    electron_rest_energy_eV: float = 510998.95
    eV_to_kHz: float = 2.417989e11
    proton_rest_energy_eV: float = 938272081.0
    atomic_mass_unit_eV: float = 931494095.0
    atomic_masses_u: dict[tuple[int, int], float] = field(default_factory=_default_nuclides)

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, float) and not v > 0:
                raise ValueError(f"{f.name} must be positive")
        if any(m <= 0 for m in self.atomic_masses_u.values()):
            raise ValueError("atomic masses must be positive")

    @property
    def alpha(self) -> float:
        return 1.0 / self.alpha_inverse

    def nuclear_mass(self, Z: int, A: int) -> float:
        """Nuclear mass in electron masses (atomic mass minus Z electrons)."""
        if (Z, A) == (1, 1):
            return self.proton_rest_energy_eV / self.electron_rest_energy_eV
        try:
            atomic = self.atomic_masses_u[(Z, A)]
        except KeyError:
            raise ValueError(f"no mass entry for Z={Z}, A={A}") from None
        return atomic * self.atomic_mass_unit_eV / self.electron_rest_energy_eV - Z

    def nuclides(self) -> list[tuple[int, int]]:
        return sorted({(1, 1), *self.atomic_masses_u})

    def with_overrides(self, values: dict[str, str]) -> "PhysicalConstants":
        """Apply key=value overrides; 'mass.Z.A' keys set atomic masses in u."""
        scalars = {f.name for f in fields(self) if f.name != "atomic_masses_u"}
        updates: dict = {}
        masses = dict(self.atomic_masses_u)
        for key, raw in values.items():
            if key.startswith("mass."):
                try:
                    _, z, a = key.split(".")
                    masses[(int(z), int(a))] = float(raw)
                except ValueError:
                    raise ValueError(f"bad nuclide key {key!r}") from None
            elif key in scalars:
                updates[key] = float(raw)
            else:
                raise ValueError(f"unknown constant {key!r}")
        return replace(self, atomic_masses_u=masses, **updates)


def read_key_values(path: str | Path) -> dict[str, str]:
    """Flat key=value text; '#' starts a comment."""
    out = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ValueError(f"{path}:{lineno}: empty key")
        out[key] = value
    return out


UNITS = ("natural", "eV", "kHz")


def convert_energy(value: float, from_unit: str, to_unit: str,
                   constants: PhysicalConstants = PhysicalConstants()) -> float:
    """Linear conversion between electron-mass units, eV and kHz."""
    to_ev = {"natural": constants.electron_rest_energy_eV, "eV": 1.0,
             "kHz": 1.0 / constants.eV_to_kHz}
    if from_unit not in to_ev or to_unit not in to_ev:
        raise ValueError(f"units must be among {UNITS}")
    if from_unit == to_unit:
        return value
    return value * to_ev[from_unit] / to_ev[to_unit]


def recoil_energy_eV(p_value: float, Z: int, n: int, mass_ratio: float,
                     constants: PhysicalConstants = PhysicalConstants()) -> float:
    """(m/M) (alpha Z)^5 / (pi n^3) P m c^2 in eV."""
    az = constants.alpha * Z
    return float(mass_ratio * az ** 5 / (math.pi * n ** 3) * p_value * constants.electron_rest_energy_eV)


# --- alpha*Z expansion fits ---------------------------------------------------

def _terms_s_coulomb(x):
    return [np.ones_like(x), x, x * x * np.log(x), x * x]


def _terms_s_transverse(x):
    lx = np.log(x)
    return [lx, np.ones_like(x), x * lx, x, x * x * lx, x * x, x ** 3]


def _terms_p_transverse(x):
    lx = np.log(x)
    return [np.ones_like(x), x, x * x * lx, x * x, x ** 3 * lx, x ** 3, x ** 4]


FIT_MODELS = {
    "s": {"P_c": ("a", _terms_s_coulomb), "P_tr1": ("b", _terms_s_transverse),
          "P_tr2": ("c", _terms_s_transverse)},
    "p": {"P_tr1": ("b", _terms_p_transverse), "P_tr2": ("c", _terms_p_transverse)},
}


@dataclass(frozen=True)
class FitResult:
    model: str
    coefficients: dict[str, float]
    residual_norm: float
    data_norm: float
    Z_samples: tuple[int, ...]

    def __getitem__(self, name: str) -> float:
        return self.coefficients[name]


def _lstsq(design: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, float]:
    # column scaling then QR; never forms the normal equations
    scale = np.linalg.norm(design, axis=0)
    q, r = np.linalg.qr(design / scale)
    diag = np.abs(np.diag(r))
    if diag.min() < 1e-13 * diag.max():
        raise ValueError("fit design matrix is rank deficient")
    coef = np.linalg.solve(r, q.T @ y) / scale
    return coef, float(np.linalg.norm(design @ coef - y))


def fit_p_expansion(samples, model: str, alpha: float = 1 / 137.0359895) -> FitResult:
    """Least-squares alpha*Z expansion of P_c, P_tr1, P_tr2.

    ``samples`` is an iterable of (Z, P_c, P_tr1, P_tr2); ``model`` is 's' for
    s states (log terms from order zero) or 'p' for p1/2 states.
    """
    if model not in FIT_MODELS:
        raise ValueError(f"model must be one of {sorted(FIT_MODELS)}")
    rows = sorted(tuple(s) for s in samples)
    data = np.array(rows, dtype=float)
    if len({r[0] for r in rows}) != len(rows):
        raise ValueError("duplicate Z in fit samples")
    x = alpha * data[:, 0]
    columns = {"P_c": data[:, 1], "P_tr1": data[:, 2], "P_tr2": data[:, 3]}
    coeffs: dict[str, float] = {}
    res2 = dat2 = 0.0
    for name, (prefix, terms) in FIT_MODELS[model].items():
        design = np.column_stack(terms(x))
        if design.shape[0] < design.shape[1]:
            raise ValueError(f"need at least {design.shape[1]} samples for {name}")
        coef, res = _lstsq(design, columns[name])
        coeffs.update({f"{prefix}{i + 1}": float(c) for i, c in enumerate(coef)})
        res2 += res ** 2
        dat2 += float(columns[name] @ columns[name])
    return FitResult(model, coeffs, math.sqrt(res2), math.sqrt(dat2),
                     tuple(int(r[0]) for r in rows))


def fit_stability(samples, model: str, alpha: float = 1 / 137.0359895) -> dict[str, float]:
    """Largest change of each coefficient when one sample is left out.

    The s-state transverse models have as many terms as the standard sample
    set has points, so after dropping a point the highest-order terms are
    dropped too until the fit is determined again; coefficients absent from a
    truncated refit do not contribute to its spread.
    """
    if model not in FIT_MODELS:
        raise ValueError(f"model must be one of {sorted(FIT_MODELS)}")
    data = np.array(sorted(tuple(s) for s in samples), dtype=float)
    x = alpha * data[:, 0]
    spread: dict[str, float] = {}
    for name, (prefix, terms) in FIT_MODELS[model].items():
        y = data[:, ("P_c", "P_tr1", "P_tr2").index(name) + 1]
        design = np.column_stack(terms(x))
        full, _ = _lstsq(design, y)
        change = np.zeros(len(full))
        for i in range(len(x)):
            keep = np.arange(len(x)) != i
            k = min(design.shape[1], int(keep.sum()))
            part, _ = _lstsq(design[keep][:, :k], y[keep])
            change[:k] = np.maximum(change[:k], np.abs(part - full[:k]))
        spread.update({f"{prefix}{j + 1}": float(c) for j, c in enumerate(change)})
    return spread


FIT_SAMPLES = (1, 2, 3, 5, 8, 15, 30)
# low-Z P_tr1 for p states carries ~1e-6 scatter at 65 splines which the x^2
# terms amplify; 100 splines keeps the combined coefficient stable
FIT_SPLINES = 100


def fit_model_for(label: StateLabel) -> str:
    if label.l == 0:
        return "s"
    if label.kappa == 1:
        return "p"
    raise ValueError(f"no expansion model for {label}")


def fit_state(label: StateLabel | str, config: RecoilConfig | None = None,
              Z_samples=FIT_SAMPLES) -> tuple[FitResult, list[RecoilBreakdownOne]]:
    """Compute P components on the sample set and fit the expansion for one state."""
    if isinstance(label, str):
        label = StateLabel.parse(label)
    model = fit_model_for(label)
    if config is None:
        config = RecoilConfig(n_splines=FIT_SPLINES, sweep=())
    runs = [p_function(Z, label, config) for Z in sorted(Z_samples)]
    samples = [(r.Z, r.P_c, r.P_tr1, r.P_tr2) for r in runs]
    return fit_p_expansion(samples, model, config.alpha), runs


def first_order_alpha6_coefficient(label: StateLabel) -> float:
    """Coefficient of (alpha Z)^6/(pi n^3) in the expansion of the closed-form first-order term."""
    n, nr, jh = label.n, label.n_r, abs(label.kappa)
    coef_energy = nr / (2 * n ** 4 * jh ** 2) * (1 / (4 * jh) + nr / n ** 2)
    return coef_energy * math.pi * n ** 3


# --- hydrogen observables -------------------------------------------------------

@dataclass(frozen=True)
class LambShiftRecoil:
    ground_kHz: float
    n2_lamb_kHz: float
    P: dict[str, float]
    P_S: dict[str, float]


def lamb_shift_recoil_delta(Z: int = 1, constants: PhysicalConstants = PhysicalConstants(),
                            config: RecoilConfig | None = None, A: int = 1,
                            results: dict[str, RecoilBreakdownOne] | None = None) -> LambShiftRecoil:
    """Recoil beyond the leading-log result for 1s and for the 2s - 2p1/2 splitting, in kHz.

    Pass ``results`` (keyed '1s', '2s', '2p1/2') to reuse finished runs.
    """
    if config is None:
        config = RecoilConfig(alpha=constants.alpha, sweep=())
    labels = ("1s", "2s", "2p1/2")
    results = dict(results or {})
    for lab in labels:
        if lab not in results:
            results[lab] = p_function(Z, lab, config)
    P = {lab: float(results[lab].P) for lab in labels}
    P_S = {lab: salpeter_p(lab, Z, constants.alpha) for lab in labels}
    mass = constants.nuclear_mass(Z, A)

    def khz(delta_p: float, n: int) -> float:
        ev = recoil_energy_eV(delta_p, Z, n, 1.0 / mass, constants)
        return convert_energy(ev, "eV", "kHz", constants)

    d = {lab: P[lab] - P_S[lab] for lab in labels}
    return LambShiftRecoil(khz(d["1s"], 1), khz(d["2s"] - d["2p1/2"], 2), P, P_S)


# --- lithium-like uranium -------------------------------------------------------------

@dataclass(frozen=True)
class UraniumTransition:
    mass_ratio: float
    first_order_eV: dict[str, float]
    second_order_eV: dict[str, float]
    interelectronic_eV: float
    transition_eV: float
    Q: float


def uranium_transition(constants: PhysicalConstants = PhysicalConstants(),
                       config: RecoilConfig | None = None, Z: int = 92, A: int = 238,
                       results: dict[str, RecoilBreakdownOne] | None = None,
                       two: RecoilBreakdownTwo | None = None) -> UraniumTransition:
    """Recoil contribution to the 2p1/2 - 2s transition of the (1s)^2 nl ion, in eV.

    The first-order terms of 2s and 2p1/2 are equal and drop out; the
    transition is the difference of the second-order one-electron terms plus
    the core exchange term of the 2p1/2 configuration.
    """
    if config is None:
        config = RecoilConfig(alpha=constants.alpha, sweep=())
    ratio = 1.0 / constants.nuclear_mass(Z, A)
    labels = ("1s", "2s", "2p1/2")
    results = dict(results or {})
    for lab in labels:
        if lab not in results:
            results[lab] = p_function(Z, lab, config)
    if two is None:
        two = q_function(Z, config)
    mc2 = constants.electron_rest_energy_eV
    first = {lab: lowest_order(Z, StateLabel.parse(lab), config.alpha).total * ratio * mc2
             for lab in labels}
    second = {lab: recoil_energy_eV(results[lab].P, Z, StateLabel.parse(lab).n, ratio, constants)
              for lab in labels}
    inter = q_scale(Z, config.alpha) * two.Q * ratio * mc2
    return UraniumTransition(ratio, first, second, float(inter),
                             second["2p1/2"] - second["2s"] + float(inter), float(two.Q))
