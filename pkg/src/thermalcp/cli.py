"""Command-line front end: scenario configs in, CSV tables out.

Usage::

    thermalcp <subcommand> --config <path-or-bundled-name> [--out DIR] [--tol REL] [--threads N]

Subcommands are ``force-vs-distance``, ``dynamics``, ``ratio``, ``rates``,
``compare`` and ``dilute-check``; ``run`` uses the ``computation`` key of
the config. ``list`` prints the bundled scenario names.
"""
import argparse
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
import math
import os
import sys

import numpy as np
import yaml

from thermalcp import constants as const
from thermalcp.atom import LevelSystem, dress, thermal_state
from thermalcp.dynamics import InternalState, evolve
from thermalcp.errors import ConvergenceError, IterationError, QuadratureError
from thermalcp.force import (
    dilute_gas_check,
    force_macroscopic,
    force_state_exact,
    force_states_perturbative,
    force_total,
    force_zero_temperature,
    imag_axis_polarizability,
    thermal_imag_axis_polarizability,
)
from thermalcp.greens import PlanarGeometry
from thermalcp.materials import Drude, DrudeLorentz, PerfectMirror, Plasma, Vacuum
from thermalcp.thermal import one_minus_thermal_reduction_ratio, thermal_reduction_ratio

COMPUTATIONS = ("force-vs-distance", "dynamics", "ratio", "rates", "compare", "dilute-check")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CONVERGENCE = 3
EXIT_WRITE = 4

SIGN_NOTE = "forces are z-components in N; negative = attraction toward the surface"


class ConfigError(ValueError):
    """Invalid scenario file; ``where`` names the line or field."""

    def __init__(self, message, where=""):
        super().__init__(f"{where}: {message}" if where else message)
        self.where = where


class OutputError(OSError):
    pass


# ---------------------------------------------------------------------------
# scenario parsing


@dataclass
class Scenario:
    name: str
    levels: LevelSystem
    material: object
    temperature: float
    z: np.ndarray
    times: np.ndarray = None
    computation: str = "force-vs-distance"
    tol: float = 1e-8
    initial_level: int = 0
    refine: bool = False
    force_model: str = "perturbative"
    linear_parameter: float = 5e-7
    output_dir: str = "."
    raw: dict = field(default_factory=dict)


def _get(block, key, where, kind=float, default=None, required=True):
    if not isinstance(block, dict):
        raise ConfigError("expected a mapping", where)
    if key not in block:
        if required and default is None:
            raise ConfigError("missing required key", f"{where}.{key}" if where else key)
        return default
    try:
        return kind(block[key])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"cannot interpret {block[key]!r} ({exc})", f"{where}.{key}" if where else key) from None


def _one_of(block, where, options):
    """Value of exactly one unit-labelled key, converted to SI."""
    hits = [k for k in options if isinstance(block, dict) and k in block]
    if len(hits) != 1:
        raise ConfigError(f"give exactly one of {', '.join(options)}", where)
    return _get(block, hits[0], where) * options[hits[0]]


_ENERGY_KEYS = {
    "energy_rad_per_s": const.hbar,
    "energy_eV": const.e,
    "energy_J": 1.0,
    "energy_per_cm": const.TWO_PI * const.hbar * const.c * 100.0,
}
_DIPOLE_KEYS = {"dipole_C_m": 1.0, "dipole_debye": const.debye, "dipole_ea0": const.ea0}


def _parse_atom(block):
    where = "atom"
    if not isinstance(block, dict):
        raise ConfigError("expected a mapping", where)
    levels = block.get("levels")
    if not isinstance(levels, list) or len(levels) < 2:
        raise ConfigError("need a list of at least two levels", f"{where}.levels")
    energies, labels = [], []
    for i, lev in enumerate(levels):
        w = f"{where}.levels[{i}]"
        energies.append(_one_of(lev, w, _ENERGY_KEYS))
        labels.append(str(lev.get("label", i)))
    trans = {}
    for i, t in enumerate(block.get("transitions") or []):
        w = f"{where}.transitions[{i}]"
        lo = _get(t, "lower", w, int)
        up = _get(t, "upper", w, int)
        if not (0 <= lo < len(levels) and 0 <= up < len(levels)):
            raise ConfigError("level index out of range", w)
        if "dipole_vector_C_m" in t:
            vec = t["dipole_vector_C_m"]
            if not isinstance(vec, list) or len(vec) != 3:
                raise ConfigError("dipole_vector_C_m must be a list of three numbers", w)
            trans[(lo, up)] = [float(v) for v in vec]
        else:
            trans[(lo, up)] = _one_of(t, w, _DIPOLE_KEYS)
    if not trans:
        raise ConfigError("at least one transition is required", f"{where}.transitions")
    iso = bool(block.get("isotropic", True))
    order = np.argsort(energies)
    if np.any(order != np.arange(len(energies))):
        raise ConfigError("levels must be listed in ascending energy", f"{where}.levels")
    return LevelSystem.from_transitions(energies, trans, labels, iso)


def _parse_drude(block, where):
    wp = _get(block, "plasma_frequency_rad_per_s", where)
    if "relaxation_rate_rad_per_s" in block:
        return Drude(wp, _get(block, "relaxation_rate_rad_per_s", where))
    return Plasma(wp)


def _parse_material(block):
    where = "material"
    model = _get(block, "model", where, str).lower()
    if model == "vacuum":
        return Vacuum()
    if model in ("perfect-mirror", "perfect_mirror"):
        return PerfectMirror()
    if model == "drude":
        return Drude(_get(block, "plasma_frequency_rad_per_s", where), _get(block, "relaxation_rate_rad_per_s", where))
    if model == "plasma":
        return Plasma(_get(block, "plasma_frequency_rad_per_s", where))
    if model in ("drude-lorentz", "drude_lorentz"):
        osc = []
        for i, o in enumerate(block.get("oscillators") or []):
            w = f"{where}.oscillators[{i}]"
            osc.append((_get(o, "strength_rad2_per_s2", w), _get(o, "resonance_rad_per_s", w), _get(o, "damping_rad_per_s", w)))
        free = _parse_drude(block["free_carriers"], f"{where}.free_carriers") if "free_carriers" in block else None
        return DrudeLorentz(tuple(osc), free)
    raise ConfigError(f"unknown model {model!r}", f"{where}.model")


def _parse_grid(block, where, unit):
    if not isinstance(block, dict):
        raise ConfigError("expected a mapping", where)
    if "values" + unit in block:
        vals = block["values" + unit]
        if not isinstance(vals, list) or not vals:
            raise ConfigError("expected a non-empty list", f"{where}.values{unit}")
        grid = np.array([float(v) for v in vals])
    else:
        start = _get(block, "start" + unit, where)
        stop = _get(block, "stop" + unit, where)
        count = _get(block, "count", where, int)
        spacing = _get(block, "spacing", where, str, default="linear")
        if count < 1:
            raise ConfigError("count must be at least 1", f"{where}.count")
        if spacing == "log":
            if start <= 0 or stop <= 0:
                raise ConfigError("log spacing needs positive bounds", where)
            grid = np.geomspace(start, stop, count)
        elif spacing == "linear":
            grid = np.linspace(start, stop, count)
        else:
            raise ConfigError("spacing must be 'log' or 'linear'", f"{where}.spacing")
    if np.any(np.diff(grid) <= 0):
        raise ConfigError("grid must be strictly ascending", where)
    return grid


def load_scenario(path):
    """Parse a YAML scenario file (or bundled scenario name) into a :class:`Scenario`."""
    text, name = _read_config(path)
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"line {mark.line + 1}, column {mark.column + 1}" if mark else ""
        raise ConfigError(getattr(exc, "problem", None) or str(exc), where) from None
    if not isinstance(raw, dict):
        raise ConfigError("top level must be a mapping")
    T = _get(raw, "temperature_K", "")
    if T < 0:
        raise ConfigError("must be non-negative", "temperature_K")
    geo = raw.get("geometry")
    if not isinstance(geo, dict):
        raise ConfigError("missing geometry block", "geometry")
    if "z_m" in geo:
        z = np.array([_get(geo, "z_m", "geometry")])
    else:
        z = _parse_grid(geo.get("z_grid"), "geometry.z_grid", "_m")
    if np.any(z <= 0):
        raise ConfigError("distances must be positive", "geometry")
    times = _parse_grid(raw["time_grid"], "time_grid", "_s") if "time_grid" in raw else None
    comp = str(raw.get("computation", "force-vs-distance"))
    if comp not in COMPUTATIONS:
        raise ConfigError(f"must be one of {', '.join(COMPUTATIONS)}", "computation")
    try:
        ls = _parse_atom(raw.get("atom"))
        material = _parse_material(raw.get("material"))
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc), "atom/material") from None
    model = str(raw.get("force_model", "perturbative"))
    if model not in ("perturbative", "exact"):
        raise ConfigError("must be 'perturbative' or 'exact'", "force_model")
    out = raw.get("output") or {}
    return Scenario(
        name=str(raw.get("name", name)),
        levels=ls,
        material=material,
        temperature=T,
        z=z,
        times=times,
        computation=comp,
        tol=_get(raw.get("tolerance") or {}, "relative", "tolerance", default=1e-8),
        initial_level=_get(raw, "initial_level", "", int, default=0, required=False),
        refine=bool(raw.get("refine_frequencies", False)),
        force_model=model,
        linear_parameter=_get(raw.get("dilute") or {}, "linear_parameter", "dilute", default=5e-7),
        output_dir=str(out.get("directory", ".")),
        raw=raw,
    )


def bundled_scenarios():
    root = resources.files("thermalcp") / "scenarios"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".yaml"))


def _read_config(path):
    if os.path.exists(path):
        with open(path, encoding="utf-8") as fh:
            return fh.read(), os.path.splitext(os.path.basename(path))[0]
    if path in bundled_scenarios():
        return (resources.files("thermalcp") / "scenarios" / f"{path}.yaml").read_text(encoding="utf-8"), path
    raise ConfigError(f"no such file or bundled scenario: {path}")


# ---------------------------------------------------------------------------
# CSV


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def emit_csv(rows, header, path, comment=SIGN_NOTE):
    """Write ``rows`` as CSV with a leading ``#`` comment line and 17 significant digits."""
    width = len(header)
    lines = [f"# {comment}", ",".join(header)]
    for r in rows:
        if len(r) != width:
            raise ValueError("rows must match the header width")
        lines.append(",".join(_fmt(v) for v in r))
    try:
        d = os.path.dirname(path)
        if d:
            os.makedirs(d, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from exc
    return path


def read_csv(path):
    """Inverse of :func:`emit_csv` for numeric tables: (header, float array)."""
    with open(path, encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh if not ln.startswith("#")]
    header = lines[0].split(",")
    data = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]]).reshape(-1, len(header))
    return header, data


# ---------------------------------------------------------------------------
# computations


def _map(fn, items, threads):
    if threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _zero_force(alpha, g, T, tol, hints):
    if T > 0:
        return force_macroscopic(alpha, g, T, tol=tol)
    return force_zero_temperature(alpha, g, tol=tol, hints=hints)


def _breakdowns(sc, g, dressed):
    if sc.force_model == "exact":
        return [force_state_exact(sc.levels, dressed, g, sc.temperature, n, tol=sc.tol) for n in range(sc.levels.size)]
    return force_states_perturbative(sc.levels, dressed, g, sc.temperature, tol=sc.tol)


def _hints(ls):
    om = ls.omega
    return tuple(sorted(set(om[om > 0].tolist())))


def force_vs_distance(sc, threads=1):
    ls, T = sc.levels, sc.temperature

    def row(z):
        g = PlanarGeometry(z, sc.material)
        d = dress(ls, g, T, refine=sc.refine, tol=sc.tol)
        f0 = _zero_force(imag_axis_polarizability(ls, d, 0), g, T, sc.tol, _hints(ls))
        fT = _zero_force(thermal_imag_axis_polarizability(ls, d, T), g, T, sc.tol, _hints(ls))
        b = _breakdowns(sc, g, d)[0]
        return [z, f0, fT, b.nonresonant, b.resonant_emission, b.resonant_absorption, b.total]

    header = ["z_m", "F_macroscopic_alpha0_N", "F_macroscopic_alphaT_N", "F_ground_nonresonant_N",
              "F_ground_emission_N", "F_ground_absorption_N", "F_ground_total_N"]
    return header, _map(row, sc.z, threads)


def dynamics(sc, threads=1):
    if sc.times is None:
        raise ConfigError("dynamics needs a time_grid block", "time_grid")
    ls, T = sc.levels, sc.temperature
    g = PlanarGeometry(float(sc.z[0]), sc.material)
    d = dress(ls, g, T, refine=sc.refine, tol=sc.tol)
    if not 0 <= sc.initial_level < ls.size:
        raise ConfigError("out of range", "initial_level")
    start = InternalState.pure(ls.size, sc.initial_level, time=0.0)
    states = evolve(start, d, sc.times)
    forces = force_total(ls, d, g, T, states, breakdowns=_breakdowns(sc, g, d))
    header = ["t_s"] + [f"p_{lab}" for lab in ls.labels] + ["F_total_N"]
    rows = [[s.time, *s.populations, f] for s, f in zip(states, forces)]
    return header, rows


def ratio(sc, threads=1):
    ls, T = sc.levels, sc.temperature
    om = ls.omega
    W = ls.weights.sum(axis=2)
    rows = []
    for k in range(ls.size):
        for n in range(k):
            if W[k, n] > 0:
                w = float(om[k, n])
                rows.append([n, k, w, T, thermal_reduction_ratio(w, T), one_minus_thermal_reduction_ratio(w, T)])
    return ["lower", "upper", "omega_rad_per_s", "T_K", "r_T", "one_minus_r_T"], rows


def rates_table(sc, threads=1):
    ls, T = sc.levels, sc.temperature

    def block(z):
        d = dress(ls, PlanarGeometry(z, sc.material), T, refine=sc.refine, tol=sc.tol)
        return [[z, n, d.shifts[n], d.totals[n], *d.rates[n]] for n in range(ls.size)]

    header = ["z_m", "level", "shift_rad_per_s", "total_rate_per_s"] + [f"rate_to_{lab}_per_s" for lab in ls.labels]
    return header, [r for b in _map(block, sc.z, threads) for r in b]


def compare(sc, threads=1):
    ls, T = sc.levels, sc.temperature

    def row(z):
        g = PlanarGeometry(z, sc.material)
        d = dress(ls, g, T, refine=sc.refine, tol=sc.tol)
        f0 = _zero_force(imag_axis_polarizability(ls, d, 0), g, T, sc.tol, _hints(ls))
        fT = _zero_force(thermal_imag_axis_polarizability(ls, d, T), g, T, sc.tol, _hints(ls))
        bs = _breakdowns(sc, g, d)
        p = thermal_state(ls, d, T)
        feq = force_total(ls, d, g, T, [p], breakdowns=bs)[0]
        ground = bs[0].total
        dev = ground - f0
        rel = dev / abs(f0) if f0 else 0.0
        return [z, f0, ground, dev, rel, bs[0].resonant_absorption, feq, fT,
                feq / f0 if f0 else math.nan, thermal_reduction_ratio(float(ls.omega[1, 0]), T)]

    header = ["z_m", "F_macroscopic_alpha0_N", "F_ground_N", "ground_deviation_N", "ground_deviation_rel",
              "F_ground_absorption_N", "F_equilibrium_N", "F_macroscopic_alphaT_N", "equilibrium_ratio",
              "r_T_lowest_transition"]
    return header, _map(row, sc.z, threads)


def dilute(sc, threads=1):
    ls, T = sc.levels, sc.temperature
    alpha0 = float(imag_axis_polarizability(ls, None, 0)(np.array([0.0])).mean())
    eta = sc.linear_parameter * const.epsilon_0 / alpha0

    def row(z):
        r = dilute_gas_check(ls, PlanarGeometry(z, sc.material), T, eta, tol=sc.tol)
        return [z, eta, r.per_atom_force, r.macroscopic_force, r.deviation, r.deviation_half_density, r.extrapolated]

    header = ["z_m", "density_per_m3", "F_per_atom_N", "F_macroscopic_N", "deviation", "deviation_half_density",
              "deviation_extrapolated"]
    return header, _map(row, sc.z, threads)


HANDLERS = {
    "force-vs-distance": force_vs_distance,
    "dynamics": dynamics,
    "ratio": ratio,
    "rates": rates_table,
    "compare": compare,
    "dilute-check": dilute,
}


def _report(header, rows):
    lines = []
    for r in rows:
        lines.append("  ".join(f"{h}={_fmt(v)}" for h, v in zip(header, r)))
    return "\n".join(lines)


def execute(sc, computation, out_dir=None, threads=1):
    """Run one computation and write its CSV; returns the output path."""
    header, rows = HANDLERS[computation](sc, threads)
    path = os.path.join(out_dir if out_dir is not None else sc.output_dir, f"{sc.name}_{computation}.csv")
    emit_csv(rows, header, path)
    if computation in ("compare", "ratio", "dilute-check"):
        print(_report(header, rows))
    return path


def build_parser():
    p = argparse.ArgumentParser(prog="thermalcp", description="Thermal Casimir-Polder forces on atoms and molecules near a surface")
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("run",) + COMPUTATIONS:
        s = sub.add_parser(name)
        s.add_argument("--config", required=True, help="scenario YAML file or bundled scenario name")
        s.add_argument("--out", default=None, help="output directory (default: config output.directory)")
        s.add_argument("--tol", type=float, default=None, help="relative truncation tolerance")
        s.add_argument("--threads", type=int, default=1, help="worker threads for grid points")
    sub.add_parser("list", help="list bundled scenarios")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "list":
        print("\n".join(bundled_scenarios()))
        return EXIT_OK
    try:
        sc = load_scenario(args.config)
        if args.tol is not None:
            if not 0 < args.tol < 1:
                raise ConfigError("must lie in (0, 1)", "--tol")
            sc.tol = args.tol
        comp = sc.computation if args.command == "run" else args.command
        path = execute(sc, comp, args.out, max(1, args.threads))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConvergenceError, QuadratureError, IterationError) as exc:
        print(f"convergence failure in {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except OutputError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_WRITE
    print(path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
