"""Command-line front end: ``recoil <command> [options]``.

Settings resolve as built-in defaults, then a flat key=value file (``--config``),
then command-line flags.  Output goes to stdout unless ``--output`` is given; a
relative output path is placed under $RECOIL_OUTPUT_DIR when that is set.

Exit codes: 0 success, 2 invalid arguments, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import fields, replace
from pathlib import Path

import numpy as np

from .analysis import (FIT_SAMPLES, FIT_SPLINES, PhysicalConstants, convert_energy, fit_stability, fit_state,
                       first_order_alpha6_coefficient, lamb_shift_recoil_delta, read_key_values,
                       recoil_energy_eV, uranium_transition)
from .basis import StateLabel, analytic_energy, basis_for, default_box_radius, solve_spectrum
from .recoil_one import RecoilConfig, p_function, salpeter_p
from .recoil_two import VALENCE_2P, q_function

SCHEMA_VERSION = 1
OUTPUT_DIR_ENV = "RECOIL_OUTPUT_DIR"

_ONE_E_ROWS = (1, 5, 10, 15, 20, 25, 30, 35, 40, 45, 50, 55, 60, 65, 70, 75, 80, 85, 90, 92, 95, 100)
TABLE_ROWS = {1: _ONE_E_ROWS, 2: _ONE_E_ROWS, 3: _ONE_E_ROWS, 4: _ONE_E_ROWS[1:]}
TABLE_STATES = {1: "1s", 2: "2s", 3: "2p1/2"}

_CONFIG_FIELDS = {f.name for f in fields(RecoilConfig)} - {"alpha"}
_OUTPUT_KEYS = {"format", "output", "workers"}


class UsageError(Exception):
    pass


# --- settings ---------------------------------------------------------------------------

def _sweep(text: str) -> tuple[int, ...]:
    text = text.strip()
    if not text:
        return ()
    try:
        return tuple(int(t) for t in text.split(","))
    except ValueError:
        raise UsageError(f"bad spline list {text!r}") from None


def _coerce(name: str, raw):
    if name == "sweep":
        return _sweep(raw) if isinstance(raw, str) else tuple(raw)
    if name in ("n_splines", "spline_order", "quad_order", "y_nodes"):
        return int(raw)
    if name == "box_radius" and raw in (None, "", "none", "None"):
        return None
    return float(raw)


def resolve_settings(args) -> tuple[RecoilConfig, PhysicalConstants, dict]:
    """Merge defaults, the config file and explicit flags."""
    file_values = read_key_values(args.config) if args.config else {}
    numeric: dict = {}
    constants_raw: dict[str, str] = {}
    output = {"format": "json", "output": None, "workers": 1}
    for key, value in file_values.items():
        if key in _CONFIG_FIELDS:
            numeric[key] = value
        elif key in _OUTPUT_KEYS:
            output[key] = value
        else:
            constants_raw[key] = value
    for name in _CONFIG_FIELDS:
        flag = getattr(args, name, None)
        if flag is not None:
            numeric[name] = flag
    if args.alpha_inverse is not None:
        constants_raw["alpha_inverse"] = str(args.alpha_inverse)
    for key in _OUTPUT_KEYS:
        flag = getattr(args, key, None)
        if flag is not None:
            output[key] = flag
    try:
        constants = PhysicalConstants().with_overrides(constants_raw)
        config = RecoilConfig(alpha=constants.alpha, **{k: _coerce(k, v) for k, v in numeric.items()})
        output["workers"] = int(output["workers"])
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    if output["format"] not in ("csv", "json"):
        raise UsageError("format must be csv or json")
    if output["workers"] < 1:
        raise UsageError("workers must be >= 1")
    return config, constants, output


def _config_echo(config: RecoilConfig, constants: PhysicalConstants) -> dict:
    echo = {f.name: getattr(config, f.name) for f in fields(config)}
    echo["sweep"] = list(config.sweep)
    echo["alpha_inverse"] = constants.alpha_inverse
    echo.pop("alpha")
    for f in fields(constants):
        if f.name == "atomic_masses_u":
            for (z, a), m in sorted(constants.atomic_masses_u.items()):
                echo[f"mass.{z}.{a}"] = m
        elif f.name != "alpha_inverse":
            echo[f.name] = getattr(constants, f.name)
    return echo


# --- formatting -------------------------------------------------------------------------

def _fmt(value):
    if isinstance(value, (bool, str)) or value is None:
        return value
    if isinstance(value, (int, np.integer)):
        return int(value)
    value = float(value)
    if not math.isfinite(value):
        return None
    return float(f"{value:.10g}")


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return _fmt(obj)


def render(command: str, rows: list[dict], echo: dict, fmt: str, summary: dict | None = None) -> str:
    if fmt == "json":
        doc = {"schema_version": SCHEMA_VERSION, "command": command, "config": _clean(echo),
               "results": _clean(rows)}
        if summary is not None:
            doc["summary"] = _clean(summary)
        return json.dumps(doc, indent=2) + "\n"
    buf = io.StringIO()
    if rows:
        out = csv.writer(buf, lineterminator="\n")
        header = list(rows[0])
        out.writerow(header)
        for row in rows:
            cells = []
            for key in header:
                v = _fmt(row.get(key))
                cells.append("" if v is None else (f"{v:.10g}" if isinstance(v, float) else v))
            out.writerow(cells)
    return buf.getvalue()


def _emit(text: str, output: dict) -> None:
    target = output["output"]
    if target is None:
        sys.stdout.write(text)
        return
    path = Path(target)
    env_dir = os.environ.get(OUTPUT_DIR_ENV)
    if env_dir and not path.is_absolute():
        path = Path(env_dir) / path
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


# --- row builders (module level so worker processes can import them) --------------------

def one_row(Z: int, label: StateLabel, config: RecoilConfig) -> dict:
    r = p_function(Z, label, config)
    return {
        "Z": Z, "state": str(label), "P_c": r.P_c, "P_tr1": r.P_tr1, "P_tr2": r.P_tr2,
        "P": r.P, "P_S": salpeter_p(label, Z, config.alpha), "band": r.uncertainty,
        "width_tr1": r.transverse_one.imag, "width_tr2": r.transverse_two.imag,
        "coulomb_gap": r.coulomb_gap, "transverse_one_gap": r.transverse_one_gap,
    }


def two_row(Z: int, config: RecoilConfig) -> dict:
    r = q_function(Z, config, VALENCE_2P)
    return {"Z": Z, "Q_c": r.Q_c, "Q_tr1": r.Q_tr1, "Q_tr2": r.Q_tr2, "Q": r.Q, "Q_L": r.Q_L,
            "band": r.uncertainty}


def _table_row(job):
    which, Z, config = job
    if which == 4:
        return two_row(Z, config)
    row = one_row(Z, StateLabel.parse(TABLE_STATES[which]), config)
    return {k: row[k] for k in ("Z", "P_c", "P_tr1", "P_tr2", "P", "P_S", "band")}


def _map_ordered(fn, jobs, workers: int) -> list:
    if workers == 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs))


# --- commands ---------------------------------------------------------------------------

def cmd_spectrum(args, config, constants):
    if args.kappa == 0:
        raise UsageError("kappa must be nonzero")
    radius = config.box_radius or default_box_radius(args.Z, args.n_max, config.alpha, config.box_factor)
    basis = basis_for(args.Z, config.n_splines, config.spline_order, config.quad_order, radius, config.alpha)
    sp = solve_spectrum(args.kappa, basis, args.Z, config.alpha)
    labels = {}
    for n in range(abs(args.kappa) + (args.kappa > 0), args.n_max + 1):
        i = sp.bound_index(n)
        labels[i] = (str(StateLabel(n, args.kappa)), abs(sp.energies[i] - analytic_energy(args.Z, n, args.kappa, config.alpha)))
    spurious = set(sp.spurious_indices())
    rows = []
    for i, (e, nrm) in enumerate(zip(sp.energies, sp.norms())):
        lab, band = labels.get(i, ("spurious" if i in spurious else "", None))
        rows.append({"index": i, "energy": e, "norm_check": nrm - 1.0, "label": lab, "band": band})
    return rows, None


def cmd_one(args, config, constants):
    label = args.state
    row = one_row(args.Z, label, config)
    if args.unit != "natural":
        A = _mass_number(args, constants)
        ratio = 1.0 / constants.nuclear_mass(args.Z, A)
        ev = recoil_energy_eV(row["P"], args.Z, label.n, ratio, constants)
        band_ev = recoil_energy_eV(row["band"], args.Z, label.n, ratio, constants)
        row["energy"] = convert_energy(ev, "eV", args.unit, constants)
        row["energy_band"] = convert_energy(band_ev, "eV", args.unit, constants)
        row["unit"] = args.unit
    return [row], None


def _mass_number(args, constants: PhysicalConstants) -> int:
    if args.A is not None:
        return args.A
    candidates = [a for z, a in constants.nuclides() if z == args.Z]
    if len(candidates) != 1:
        raise UsageError(f"give --A: no unique nuclide for Z={args.Z}")
    return candidates[0]


def cmd_two(args, config, constants):
    return [two_row(args.Z, config)], None


def cmd_table(args, config, constants):
    zs = args.Z_list or TABLE_ROWS[args.which]
    jobs = [(args.which, Z, config) for Z in zs]
    return _map_ordered(_table_row, jobs, args.workers_resolved), None


def cmd_fit(args, config, constants):
    label = args.state
    if args.n_splines is None and not _from_file(args, "n_splines"):
        config = replace(config, n_splines=FIT_SPLINES)
    config = replace(config, sweep=())
    args.effective_config = config
    result, runs = fit_state(label, config, args.Z_list or FIT_SAMPLES)
    samples = [(r.Z, r.P_c, r.P_tr1, r.P_tr2) for r in runs]
    spread = fit_stability(samples, result.model, config.alpha)
    rows = [{"coefficient": k, "value": v, "band": spread[k]} for k, v in result.coefficients.items()]
    summary = {"model": result.model, "Z_samples": list(result.Z_samples),
               "residual_norm": result.residual_norm, "data_norm": result.data_norm}
    if result.model == "p":
        extra = first_order_alpha6_coefficient(label)
        rows.append({"coefficient": "b2+c2+first_order", "value": result["b2"] + result["c2"] + extra,
                     "band": spread["b2"] + spread["c2"]})
    else:
        rows.append({"coefficient": "b3+c3", "value": result["b3"] + result["c3"],
                     "band": spread["b3"] + spread["c3"]})
    return rows, summary


def _from_file(args, key: str) -> bool:
    return bool(args.config) and key in read_key_values(args.config)


def cmd_lamb(args, config, constants):
    results = {lab: p_function(1, lab, config) for lab in ("1s", "2s", "2p1/2")}
    lamb = lamb_shift_recoil_delta(1, constants, config, 1, results)
    ratio = 1.0 / constants.nuclear_mass(1, 1)

    def khz(dp, n):
        return convert_energy(recoil_energy_eV(dp, 1, n, ratio, constants), "eV", "kHz", constants)

    b = {lab: results[lab].uncertainty for lab in results}
    rows = [
        {"quantity": "ground_state", "value_kHz": lamb.ground_kHz, "band": khz(b["1s"], 1)},
        {"quantity": "n2_lamb_shift", "value_kHz": lamb.n2_lamb_kHz, "band": khz(b["2s"] + b["2p1/2"], 2)},
    ]
    for lab in ("1s", "2s", "2p1/2"):
        rows.append({"quantity": f"P({lab})", "value_kHz": None, "P": lamb.P[lab], "P_S": lamb.P_S[lab],
                     "band": b[lab]})
    return rows, None


def cmd_uranium(args, config, constants):
    Z, A = 92, 238
    results = {lab: p_function(Z, lab, config) for lab in ("1s", "2s", "2p1/2")}
    two = q_function(Z, config)
    u = uranium_transition(constants, config, Z, A, results, two)
    rows = []
    for lab, v in u.first_order_eV.items():
        rows.append({"quantity": f"first_order({lab})", "value_eV": v, "band": 0.0})
    for lab, v in u.second_order_eV.items():
        band = recoil_energy_eV(results[lab].uncertainty, Z, StateLabel.parse(lab).n, u.mass_ratio, constants)
        rows.append({"quantity": f"second_order({lab})", "value_eV": v, "band": band})
    int_band = abs(u.interelectronic_eV) * two.uncertainty / abs(two.Q)
    rows.append({"quantity": "interelectronic(2p1/2)", "value_eV": u.interelectronic_eV, "band": int_band})
    total_band = rows[-2]["band"] + rows[-3]["band"] + int_band
    rows.append({"quantity": "transition(2p1/2-2s)", "value_eV": u.transition_eV, "band": total_band})
    return rows, {"mass_ratio": u.mass_ratio, "Q": u.Q}


def cmd_convergence(args, config, constants):
    counts = sorted(set(args.splines))
    if len(counts) == 1:
        print("recoil: warning: a single spline count gives zero spread", file=sys.stderr)
    rows = []
    prev = None
    for n in counts:
        r = p_function(args.Z, args.state, replace(config, n_splines=n, sweep=()))
        rows.append({"n_splines": n, "P_c": r.P_c, "P_tr1": r.P_tr1, "P_tr2": r.P_tr2, "P": r.P,
                     "change": None if prev is None else abs(r.P - prev)})
        prev = r.P
    values = [row["P"] for row in rows]
    spread = max(values) - min(values)
    summary = {"spread": spread, "band": spread}
    if args.box_check:
        n = counts[-1]
        base = rows[-1]["P"]
        doubled = p_function(args.Z, args.state, replace(config, n_splines=n, sweep=(),
                                                        box_factor=2 * config.box_factor,
                                                        box_radius=None if config.box_radius is None
                                                        else 2 * config.box_radius))
        summary["box_doubling_change"] = abs(doubled.P - base)
    return rows, summary


# --- parser -----------------------------------------------------------------------------

def _state(text: str) -> StateLabel:
    try:
        return StateLabel.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("numerics")
    g.add_argument("--config", help="flat key=value settings file")
    g.add_argument("--n-splines", dest="n_splines", type=int)
    g.add_argument("--spline-order", dest="spline_order", type=int)
    g.add_argument("--quad-order", dest="quad_order", type=int)
    g.add_argument("--box-factor", dest="box_factor", type=float)
    g.add_argument("--box-radius", dest="box_radius", type=float)
    g.add_argument("--y-nodes", dest="y_nodes", type=int)
    g.add_argument("--y-panel-width", dest="y_panel_width", type=float)
    g.add_argument("--y-floor", dest="y_floor", type=float)
    g.add_argument("--y-ceiling", dest="y_ceiling", type=float)
    g.add_argument("--sweep", type=_int_list, help="spline counts for the uncertainty band")
    g.add_argument("--alpha-inverse", dest="alpha_inverse", type=float)
    o = p.add_argument_group("output")
    o.add_argument("--format", choices=("csv", "json"))
    o.add_argument("--output", "-o")
    o.add_argument("--workers", type=int)
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="recoil", description="Relativistic nuclear recoil corrections.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", parents=[common], help="finite-basis Dirac spectrum of one channel")
    p.add_argument("--Z", type=int, required=True)
    p.add_argument("--kappa", type=int, required=True)
    p.add_argument("--n-max", dest="n_max", type=int, default=2)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("one", parents=[common], help="one-electron P function for one state")
    p.add_argument("--Z", type=int, required=True)
    p.add_argument("--state", type=_state, required=True)
    p.add_argument("--unit", choices=("natural", "eV", "kHz"), default="natural")
    p.add_argument("--A", type=int)
    p.set_defaults(func=cmd_one)

    p = sub.add_parser("two", parents=[common], help="two-electron Q function, (1s)^2 2p1/2")
    p.add_argument("--Z", type=int, required=True)
    p.set_defaults(func=cmd_two)

    p = sub.add_parser("table", parents=[common], help="regenerate a table of P or Q values")
    p.add_argument("which", type=int, choices=(1, 2, 3, 4))
    p.add_argument("--Z-list", dest="Z_list", type=_int_list)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("fit", parents=[common], help="low-Z expansion coefficients")
    p.add_argument("--state", type=_state, required=True)
    p.add_argument("--Z-list", dest="Z_list", type=_int_list)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("lamb", parents=[common], help="hydrogen recoil beyond the leading-log result, kHz")
    p.set_defaults(func=cmd_lamb)

    p = sub.add_parser("uranium-transition", parents=[common],
                       help="recoil on the 2p1/2 - 2s transition of Li-like uranium, eV")
    p.set_defaults(func=cmd_uranium)

    p = sub.add_parser("convergence", parents=[common], help="spline-count sweep of P")
    p.add_argument("--Z", type=int, required=True)
    p.add_argument("--state", type=_state, required=True)
    p.add_argument("--splines", type=_int_list, default=(40, 50, 60, 70, 80, 90))
    p.add_argument("--box-check", action="store_true", help="also report the change on doubling the box")
    p.set_defaults(func=cmd_convergence)
    return parser


def _failing_module(exc: BaseException) -> str:
    for frame in reversed(traceback.extract_tb(exc.__traceback__)):
        path = Path(frame.filename)
        if path.parent.name == "nuclear_recoil":
            return path.stem
    return "cli"


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "Z", None) is not None and args.Z < 1:
            raise UsageError("Z must be a positive integer")
        config, constants, output = resolve_settings(args)
        args.workers_resolved = output["workers"]
        rows, summary = args.func(args, config, constants)
        config = getattr(args, "effective_config", config)
        text = render(args.command, rows, _config_echo(config, constants), output["format"], summary)
        _emit(text, output)
    except UsageError as exc:
        print(f"recoil: invalid arguments: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"recoil: invalid arguments ({_failing_module(exc)}): {exc}", file=sys.stderr)
        return 2
    except (RuntimeError, LookupError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"recoil: numerical failure in {_failing_module(exc)}: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
