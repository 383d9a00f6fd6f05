"""Command-line scenario runner writing plot-ready CSV files and a JSON manifest.

    bosemix gamma-single --out results/
    bosemix concurrence --L 7.5 --r12 0.2,0.9 --jobs 4
    bosemix validate my.ini --scenario sdf-two

Settings are resolved as defaults < config file < command-line flags. A
config file is INI with a ``[scenario]`` section (keys as in ``DEFAULTS``)
and an optional ``[physical]`` section in SI units, or a manifest written
by a previous run.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import dataclasses
import difflib
import json
import logging
import math
import re
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .dephasing import GammaKind, decay_rate, dispersion_model, gamma, gamma_trajectory
from .entanglement import concurrence, density_matrix, induced_coupling
from .errors import BosemixError, ConfigError, StabilityViolation
from .nonmarkov import blp_measure
from .params import CONVENTIONS, REFERENCE_KAPPA, PhysicalParams, ReservoirConfig, to_dimensionless
from .reservoir import Branch, classify_ohmicity, sample_spectral_density

log = logging.getLogger("bosemix")

DEFAULT_SWEEP = (0.2, 1.0, 3.0)


@dataclass(frozen=True)
class ScenarioDef:
    quantities: tuple
    lengths: tuple = (0.75,)
    t_max: float = 20.0
    axis: str = "t"


SCENARIOS = {
    "gamma-single": ScenarioDef(("gamma0",)),
    "nonmarkov-single": ScenarioDef(("rate0",)),
    "sdf-single": ScenarioDef(("sdf0",), (0.75, 7.5), axis="omega"),
    "gamma-two": ScenarioDef(("gamma1", "gamma2")),
    "decay-rates": ScenarioDef(("rate1", "rate2"), (0.75, 7.5)),
    "sdf-two": ScenarioDef(("sdf1", "sdf2"), (0.75, 7.5), axis="omega"),
    "induced-coupling": ScenarioDef(("coupling",), (7.5,), t_max=40.0),
    "concurrence": ScenarioDef(("coupling", "concurrence"), (7.5,), t_max=40.0),
}

DEFAULTS = {
    "r12": list(DEFAULT_SWEEP),
    "L": None,  # scenario default
    "d": None,  # 2 L
    "t_max": None,  # scenario default
    "steps": 200,
    "temperature": 0.0,
    "convention": "coherent_sum",
    "allow_immiscible": False,
    "alpha": 0.76,
    "p": 0.5,
    "kappa": REFERENCE_KAPPA,
    "omega_max": 4.0,
    "omega_points": 400,
}


@dataclass
class Settings:
    scenario: str
    r12: list
    L: list
    d: float | None
    t_max: float
    steps: int
    temperature: float
    convention: str
    allow_immiscible: bool
    alpha: float
    p: float
    kappa: float
    omega_max: float
    omega_points: int
    warnings: list = field(default_factory=list)

    def config(self, r12: float, L: float) -> ReservoirConfig:
        return ReservoirConfig(
            alpha=self.alpha, p=self.p, r12=r12, coupling_prefactor=self.kappa,
            well_half_sep=L, trap_half_dist=self.d if self.d is not None else 2.0 * L,
            temperature=self.temperature, convention=self.convention,
            allow_immiscible=self.allow_immiscible,
        )

    def resolved(self) -> dict:
        out = dataclasses.asdict(self)
        out.pop("warnings")
        out.pop("scenario")
        return out


# --- parsing -----------------------------------------------------------------

def _float_list(raw):
    if isinstance(raw, (list, tuple)):
        return [float(x) for x in raw]
    if isinstance(raw, (int, float)):
        return [float(raw)]
    parts = [x for x in re.split(r"[,\s]+", str(raw).strip()) if x]
    if not parts:
        raise ValueError("empty list")
    return [float(x) for x in parts]


def _optional_float(raw):
    if raw is None or (isinstance(raw, str) and raw.strip().lower() in ("", "none", "auto")):
        return None
    return float(raw)


def _bool(raw):
    if isinstance(raw, bool):
        return raw
    value = str(raw).strip().lower()
    if value in configparser.ConfigParser.BOOLEAN_STATES:
        return configparser.ConfigParser.BOOLEAN_STATES[value]
    raise ValueError(f"not a boolean: {raw!r}")


def _optional_list(raw):
    return None if raw is None else _float_list(raw)


def _int(raw):
    value = float(raw)
    if value != int(value):
        raise ValueError(f"not an integer: {raw!r}")
    return int(value)


PARSERS = {
    "r12": _float_list, "L": _optional_list, "d": _optional_float,
    "t_max": _optional_float, "steps": _int, "temperature": float, "convention": str,
    "allow_immiscible": _bool, "alpha": float, "p": float, "kappa": float,
    "omega_max": float, "omega_points": _int,
}


_KEY_LINE = re.compile(r"^\s*([^=:#;\[\s][^=:]*?)\s*[=:]")
_SECTION_LINE = re.compile(r"^\s*\[([^\]]+)\]")


def _line_index(text):
    """Map (section, key) to the 1-based line where the key is set."""
    index, section = {}, None
    for n, line in enumerate(text.splitlines(), start=1):
        if m := _SECTION_LINE.match(line):
            section = m.group(1).strip()
        elif section and (m := _KEY_LINE.match(line)):
            index.setdefault((section, m.group(1)), n)
    return index


def _suggest(key, options):
    close = difflib.get_close_matches(key, options, n=1, cutoff=0.5)
    if not close:
        close = [o for o in options if o.lower() == key.lower()]
    return f" (did you mean {close[0]!r}?)" if close else ""


def load_config(path):
    """Read an INI file or JSON manifest.

    Returns ``{key: (raw, where)}``, the ``[physical]`` parameters (or None) and
    a list of file-level errors, so callers can report everything at once.
    """
    path = Path(path)
    text = path.read_text()
    if text.lstrip().startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}:{exc.lineno}: invalid JSON: {exc.msg}") from None
        section = data.get("config", data)
        return {k: (v, f"{path}: key {k!r}") for k, v in section.items()}, None, []

    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        parser.read_string(text, source=str(path))
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None
    lines = _line_index(text)
    errors = []
    for section in parser.sections():
        if section not in ("scenario", "physical"):
            n = next((i for i, l in enumerate(text.splitlines(), 1) if _SECTION_LINE.match(l)
                      and _SECTION_LINE.match(l).group(1).strip() == section), 0)
            errors.append(f"{path}:{n}: unknown section [{section}]"
                          + _suggest(section, ["scenario", "physical"]))
    entries = {}
    if parser.has_section("scenario"):
        for key, raw in parser.items("scenario"):
            entries[key] = (raw, f"{path}:{lines.get(('scenario', key), 0)}")
    physical = None
    if parser.has_section("physical"):
        body = "\n".join(f"{k} = {v}" for k, v in parser.items("physical"))
        try:
            physical = PhysicalParams.from_ini_string("[physical]\n" + body)
        except (ConfigError, ValueError) as exc:
            msgs = exc.errors if isinstance(exc, ConfigError) else [str(exc)]
            for msg in msgs:
                key = next((k for (s, k) in lines if s == "physical" and f"'{k}'" in msg), None)
                errors.append(f"{path}:{lines.get(('physical', key), 0)}: [physical] {msg}")
    return entries, physical, errors


def resolve(scenario: str, config_path=None, overrides: dict | None = None) -> Settings:
    """Validate and merge defaults, file entries and flag overrides."""
    if scenario not in SCENARIOS:
        raise ConfigError(f"unknown scenario {scenario!r}" + _suggest(scenario, list(SCENARIOS)))
    spec = SCENARIOS[scenario]
    entries, physical, errors = load_config(config_path) if config_path else ({}, None, [])
    for key, value in (overrides or {}).items():
        if value is not None:
            entries[key] = (value, f"--{key.replace('_', '-')}")

    values = dict(DEFAULTS)
    for key, (raw, where) in entries.items():
        if key not in PARSERS:
            errors.append(f"{where}: unknown key {key!r}" + _suggest(key, list(PARSERS)))
            continue
        try:
            values[key] = PARSERS[key](raw)
        except (TypeError, ValueError) as exc:
            errors.append(f"{where}: {key}: cannot parse {raw!r} ({exc})")

    warnings = []
    if physical is not None:
        dimless = to_dimensionless(physical, allow_immiscible=True)
        values.update(alpha=dimless.alpha, p=dimless.p, kappa=dimless.coupling_prefactor,
                      temperature=values["temperature"] or dimless.temperature)
        if "L" not in entries:
            values["L"] = [dimless.well_half_sep]
        if "d" not in entries:
            values["d"] = dimless.trap_half_dist
        if "r12" not in entries:
            values["r12"] = [dimless.r12]

    def where(key):
        return entries[key][1] if key in entries else "default"

    if values["L"] is None:
        values["L"] = list(spec.lengths)
    if values["t_max"] is None:
        values["t_max"] = spec.t_max
    checks = [
        ("t_max", values["t_max"] > 0, "must be > 0"),
        ("steps", values["steps"] >= 64, "must be >= 64"),
        ("temperature", values["temperature"] >= 0, "must be >= 0"),
        ("alpha", values["alpha"] > 0, "must be > 0"),
        ("p", values["p"] > 0, "must be > 0"),
        ("kappa", values["kappa"] > 0, "must be > 0"),
        ("omega_max", values["omega_max"] > 0, "must be > 0"),
        ("omega_points", values["omega_points"] >= 16, "must be >= 16"),
        ("L", all(L > 0 for L in values["L"]), "lengths must be > 0"),
        ("d", values["d"] is None or values["d"] > 0, "must be > 0"),
        ("convention", values["convention"] in CONVENTIONS, f"must be one of {CONVENTIONS}"),
        ("r12", len(values["r12"]) > 0, "sweep must be nonempty"),
        ("r12", all(r > -1 for r in values["r12"]), "values must be > -1"),
    ]
    for key, ok, msg in checks:
        if not ok:
            errors.append(f"{where(key)}: {key} {msg}")

    high = [r for r in values["r12"] if r >= 1]
    if high and not values["allow_immiscible"]:
        if "r12" in entries:
            errors.append(f"{where('r12')}: r12 = {high} is beyond the miscibility bound r12 < 1;"
                          " pass --allow-immiscible (or allow_immiscible = true) to run it")
        else:
            values["allow_immiscible"] = True
    if high and values["allow_immiscible"]:
        warnings.append(f"r12 = {high} >= 1: the lower branch is evaluated only above the"
                        " threshold k_th = sqrt(2 alpha (r12 - 1)) where its dispersion is real")
    if errors:
        raise ConfigError(errors)
    return Settings(scenario=scenario, warnings=warnings, **values)


# --- computation -------------------------------------------------------------

def time_grid(settings: Settings) -> np.ndarray:
    return np.linspace(0.0, settings.t_max, settings.steps + 1)


def omega_grid(settings: Settings) -> np.ndarray:
    return np.linspace(settings.omega_max / settings.omega_points, settings.omega_max,
                       settings.omega_points)


def _column(task):
    """All quantities of one (branch, r12, L) column; runs in worker processes."""
    scenario, cfg, branch, grid = task
    quantities = SCENARIOS[scenario].quantities
    out = {}
    if scenario == "nonmarkov-single":
        traj = gamma_trajectory(cfg, branch, GammaKind.GAMMA0, grid[-1], len(grid) - 1)
        report = blp_measure(traj)
        out["rate0"] = traj.rate
        out["measure"] = report.measure
        out["raw_measure"] = report.raw_measure
        out["intervals"] = len(report.intervals)
        return out
    if scenario == "concurrence":
        js, cs = [], []
        for t in grid:
            state = density_matrix(cfg, branch, t)
            js.append(induced_coupling(cfg, branch, t))
            cs.append(concurrence(state).value)
        return {"coupling": np.array(js), "concurrence": np.array(cs)}
    for q in quantities:
        kind = GammaKind[f"GAMMA{q[-1]}"] if q[-1].isdigit() else None
        if q.startswith("gamma") or q.startswith("rate"):
            out[q] = _trajectory(cfg, branch, kind, grid, rate=q.startswith("rate"))
        elif q.startswith("sdf"):
            sample = sample_spectral_density(dispersion_model(cfg), branch, kind.coupling_kind, grid)
            out[q] = sample.values
            out[f"{q}_fit"] = (sample.ohmicity_s, sample.fit_residual)
        elif q == "coupling":
            out[q] = np.array([induced_coupling(cfg, branch, t) for t in grid])
    return out


def _trajectory(cfg, branch, kind, grid, rate):
    fn = decay_rate if rate else gamma
    return np.array([fn(cfg, branch, kind, t) for t in grid])


def _write_csv(path: Path, header, columns):
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in zip(*columns):
            writer.writerow([format(float(v), ".17g") for v in row])


def run(settings: Settings, out_dir, jobs: int = 1) -> dict:
    """Compute a scenario and write its CSV files and manifest; return the manifest."""
    started = time.perf_counter()
    spec = SCENARIOS[settings.scenario]
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    grid = omega_grid(settings) if spec.axis == "omega" else time_grid(settings)

    keys, tasks = [], []
    for L in settings.L:
        for branch in Branch:
            for r12 in settings.r12:
                keys.append((L, branch, r12))
                tasks.append((settings.scenario, settings.config(r12, L), branch, grid))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_column, tasks))
    else:
        results = [_column(t) for t in tasks]
    by_key = dict(zip(keys, results))

    prefix = settings.scenario
    written = []
    header_cols = [f"r12={r12:g}" for r12 in settings.r12]
    for L in settings.L:
        for branch in Branch:
            for q in spec.quantities:
                name = f"{prefix}_{q}_{branch.label}_L{L:g}.csv"
                cols = [by_key[(L, branch, r12)][q] for r12 in settings.r12]
                _write_csv(out_dir / name, [spec.axis, *header_cols], [grid, *cols])
                written.append(name)

    if settings.scenario == "nonmarkov-single":
        name = f"{prefix}_measure.csv"
        rows = []
        for L in settings.L:
            for r12 in settings.r12:
                row = [L, r12]
                for branch in Branch:
                    res = by_key[(L, branch, r12)]
                    row += [res["measure"], res["raw_measure"], res["intervals"]]
                rows.append(row)
        header = ["L", "r12"] + [f"{col}_{b.label}" for b in Branch
                                 for col in ("N", "raw_N", "intervals")]
        _write_csv(out_dir / name, header, list(zip(*rows)))
        written.append(name)

    if spec.axis == "omega":
        name = f"{prefix}_ohmicity.csv"
        rows = []
        for q in spec.quantities:
            for L in settings.L:
                for branch in Branch:
                    for r12 in settings.r12:
                        s, resid = by_key[(L, branch, r12)][f"{q}_fit"]
                        rows.append((q, L, branch.label, r12, s, resid))
        with (out_dir / name).open("w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["quantity", "L", "branch", "r12", "s", "fit_residual", "class"])
            for q, L, b, r12, s, resid in rows:
                label = classify_ohmicity(s) if math.isfinite(s) else "undetermined"
                writer.writerow([q, format(L, "g"), b, format(r12, "g"),
                                 format(s, ".17g"), format(resid, ".17g"), label])
        written.append(name)

    manifest = {
        "tool": "bosemix",
        "version": __version__,
        "scenario": settings.scenario,
        "config": settings.resolved(),
        "convention": settings.convention,
        "warnings": settings.warnings,
        "outputs": written,
        "wall_clock_seconds": round(time.perf_counter() - started, 3),
    }
    with (out_dir / f"{prefix}_manifest.json").open("w", newline="\n") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    return manifest


# --- entry point -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bosemix", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    for name in SCENARIOS:
        p = sub.add_parser(name, help=f"write the {name} data set")
        p.add_argument("--config", type=Path, help="INI file or previous manifest")
        p.add_argument("--out", type=Path, default=Path("bosemix-out"))
        p.add_argument("--r12", help="comma-separated sweep, e.g. 0.2,1,3")
        p.add_argument("--L", dest="L", help="well half-separation(s), comma-separated")
        p.add_argument("--d", type=float, help="trap half-distance (default 2L)")
        p.add_argument("--t-max", type=float)
        p.add_argument("--steps", type=int)
        p.add_argument("--temperature", type=float)
        p.add_argument("--convention", choices=CONVENTIONS)
        p.add_argument("--allow-immiscible", action="store_true", default=None)
        p.add_argument("--jobs", type=int, default=1, help="worker processes")

    v = sub.add_parser("validate", help="check a config file and print the resolved settings")
    v.add_argument("config", type=Path)
    v.add_argument("--scenario", default="gamma-single", choices=list(SCENARIOS))
    return parser


def main(argv=None) -> int:
    logging.basicConfig(format="%(name)s: %(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        if args.command == "validate":
            settings = resolve(args.scenario, args.config)
            for w in settings.warnings:
                log.warning(w)
            print(json.dumps({"scenario": settings.scenario, "config": settings.resolved()}, indent=2))
            return 0
        overrides = {k: getattr(args, k) for k in
                     ("r12", "L", "d", "t_max", "steps", "temperature", "convention", "allow_immiscible")}
        settings = resolve(args.command, args.config, overrides)
        for w in settings.warnings:
            log.warning(w)
        manifest = run(settings, args.out, jobs=max(1, args.jobs))
        print(f"wrote {len(manifest['outputs'])} files to {args.out} "
              f"in {manifest['wall_clock_seconds']:.1f} s")
        return 0
    except (ConfigError, StabilityViolation) as exc:
        for line in str(exc).splitlines():
            print(f"error: {line}", file=sys.stderr)
        return 2
    except (BosemixError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
