"""Experiment orchestration: sweeps, scenario ensembles, CSV/JSON output.

A YAML run spec names a base configuration, an optional parameter sweep,
the number of random scenarios, the mode combinations to evaluate, and
the Monte Carlo budget.  Every (sweep value, scenario, mode) task is
seeded independently from the run seed, so the emitted CSV is
byte-identical for a given (spec, seed) regardless of thread count, and
scenario draws are shared across sweep values for paired comparisons.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .config import (
    COMBINER_MODES,
    EMI_MODES,
    POWER_MODES,
    RIS_MODES,
    SystemConfig,
    config_from_mapping,
)
from .montecarlo import estimate_uatf_terms, sinr_from_estimates
from .pipeline import build_link_statistics
from .power import aggregate_gain, fractional_power_control, full_power, maxmin_power_control
from .scenario import generate_scenario
from .se import (
    build_sinr_terms,
    optimal_lsfd_weights,
    sinr_lsfd_closed_form,
    spectral_efficiency,
)

SCHEMA_VERSION = 1

CSV_COLUMNS = [
    "sweep_param",
    "sweep_value",
    "scenario",
    "mode_combiner",
    "mode_emi",
    "mode_power",
    "mode_ris",
    "ue",
    "sinr_closed",
    "se_closed",
    "sinr_mc",
    "se_mc",
    "runtime_ms",
]

CDF_COLUMNS = [
    "sweep_param",
    "sweep_value",
    "mode_combiner",
    "mode_emi",
    "mode_power",
    "mode_ris",
    "se",
    "cdf",
    "q05",
]

_SWEEP_ALIASES = ("none", "ris_elements_side", "ris_spacing")

_SCENARIO_STREAM = 0xA
_MC_STREAM = 0xB


@dataclass(frozen=True)
class ModeSpec:
    """One combination of operating switches to evaluate."""

    combiner: str
    emi: str
    power: str
    ris: str


@dataclass(frozen=True)
class RunSpec:
    """Parsed and validated run description."""

    config: SystemConfig
    sweep_param: str
    sweep_values: tuple
    n_scenarios: int
    modes: tuple[ModeSpec, ...]
    mc_trials: int


def _require_mapping(obj: object, where: str) -> dict:
    if not isinstance(obj, dict):
        raise ValueError(f"{where} must be a mapping")
    return obj


def _reject_unknown(data: dict, allowed: set[str], where: str) -> None:
    unknown = set(data) - allowed
    if unknown:
        raise ValueError(f"unknown keys in {where}: {sorted(unknown)}")


def load_run_spec(path: str | Path) -> RunSpec:
    """Load and validate a YAML run spec; unknown keys are errors."""
    raw = yaml.safe_load(Path(path).read_text())
    data = _require_mapping(raw, "run spec")
    _reject_unknown(
        data,
        {"schema_version", "config", "sweep", "n_scenarios", "modes", "mc_trials"},
        "run spec",
    )
    version = data.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ValueError(f"schema_version must be {SCHEMA_VERSION}, got {version!r}")
    config = config_from_mapping(_require_mapping(data.get("config", {}), "config"))

    sweep = data.get("sweep")
    if sweep is None:
        param, values = "none", (0,)
    else:
        sweep = _require_mapping(sweep, "sweep")
        _reject_unknown(sweep, {"param", "values"}, "sweep")
        param = sweep.get("param")
        values = sweep.get("values")
        if not isinstance(param, str):
            raise ValueError("sweep.param must be a string")
        valid_fields = {f.name for f in SystemConfig.__dataclass_fields__.values()}
        if param not in valid_fields and param not in _SWEEP_ALIASES:
            raise ValueError(f"unknown sweep parameter: {param!r}")
        if not isinstance(values, list) or not values:
            raise ValueError("sweep.values must be a non-empty list")
        values = tuple(values)

    n_scenarios = data.get("n_scenarios", 1)
    if not isinstance(n_scenarios, int) or n_scenarios < 1:
        raise ValueError("n_scenarios must be a positive integer")
    mc_trials = data.get("mc_trials", 0)
    if not isinstance(mc_trials, int) or mc_trials < 0:
        raise ValueError("mc_trials must be a non-negative integer")

    raw_modes = data.get("modes")
    if raw_modes is None:
        raw_modes = [{}]
    if not isinstance(raw_modes, list) or not raw_modes:
        raise ValueError("modes must be a non-empty list")
    modes = []
    for entry in raw_modes:
        entry = _require_mapping(entry, "mode")
        _reject_unknown(entry, {"combiner", "emi", "power", "ris"}, "mode")
        entry = {
            key: ("on" if value else "off") if isinstance(value, bool) else value
            for key, value in entry.items()
        }
        mode = ModeSpec(
            combiner=entry.get("combiner", config.combiner),
            emi=entry.get("emi", config.emi),
            power=entry.get("power", config.power),
            ris=entry.get("ris", config.ris),
        )
        for value, options in (
            (mode.combiner, COMBINER_MODES),
            (mode.emi, EMI_MODES),
            (mode.power, POWER_MODES),
            (mode.ris, RIS_MODES),
        ):
            if value not in options:
                raise ValueError(f"invalid mode value {value!r}")
        modes.append(mode)
    return RunSpec(
        config=config,
        sweep_param=param,
        sweep_values=values,
        n_scenarios=n_scenarios,
        modes=tuple(modes),
        mc_trials=mc_trials,
    )


def apply_sweep(config: SystemConfig, param: str, value: object) -> SystemConfig:
    """Return a config with one swept parameter applied."""
    if param == "none":
        return config
    if param == "ris_elements_side":
        side = int(value)
        return config.replace(ris_width_elements=side, ris_height_elements=side)
    if param == "ris_spacing":
        return config.replace(ris_spacing_h=float(value), ris_spacing_v=float(value))
    return config.replace(**{param: value})


def _scenario_rng(seed: int, scen_idx: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, _SCENARIO_STREAM, scen_idx]))


def _mc_rng(seed: int, sweep_idx: int, scen_idx: int, mode_idx: int) -> np.random.Generator:
    return np.random.default_rng(
        np.random.SeedSequence([seed, _MC_STREAM, sweep_idx, scen_idx, mode_idx])
    )


def _fmt(value: object) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def _run_task(
    spec: RunSpec,
    seed: int,
    sweep_idx: int,
    scen_idx: int,
    mode_idx: int,
    mc_trials: int,
) -> list[dict]:
    mode = spec.modes[mode_idx]
    cfg = apply_sweep(spec.config, spec.sweep_param, spec.sweep_values[sweep_idx])
    cfg = cfg.replace(
        combiner=mode.combiner, emi=mode.emi, power=mode.power, ris=mode.ris
    )
    scenario = generate_scenario(cfg, _scenario_rng(seed, scen_idx))
    link = build_link_statistics(scenario, cfg)
    terms = build_sinr_terms(link)
    noise = cfg.noise_power

    if mode.power == "full":
        alloc = full_power(cfg.n_ues, cfg.p_max)
    elif mode.power == "fpc":
        alloc = fractional_power_control(aggregate_gain(link), cfg.fpc_alpha, cfg.p_max)
    else:
        alloc = maxmin_power_control(terms, noise, cfg.p_max, tol=cfg.maxmin_tol)
    powers = alloc.powers

    if mode.combiner == "lsfd":
        weights = optimal_lsfd_weights(terms, powers, noise).weights
    else:
        weights = np.ones_like(terms.z, dtype=complex)
    sinr_closed = sinr_lsfd_closed_form(terms, weights, powers, noise)
    se_closed = spectral_efficiency(sinr_closed, cfg.prelog)

    sinr_mc = se_mc = None
    if mc_trials > 0:
        estimates = estimate_uatf_terms(
            link, mc_trials, _mc_rng(seed, sweep_idx, scen_idx, mode_idx)
        )
        sinr_mc = sinr_from_estimates(estimates, weights, powers, noise)
        se_mc = spectral_efficiency(sinr_mc, cfg.prelog)

    rows = []
    for ue in range(cfg.n_ues):
        rows.append(
            {
                "sweep_param": spec.sweep_param,
                "sweep_value": _fmt(spec.sweep_values[sweep_idx]),
                "scenario": str(scen_idx),
                "mode_combiner": mode.combiner,
                "mode_emi": mode.emi,
                "mode_power": mode.power,
                "mode_ris": mode.ris,
                "ue": str(ue),
                "sinr_closed": _fmt(float(sinr_closed[ue])),
                "se_closed": _fmt(float(se_closed[ue])),
                "sinr_mc": _fmt(None if sinr_mc is None else float(sinr_mc[ue])),
                "se_mc": _fmt(None if se_mc is None else float(se_mc[ue])),
                "runtime_ms": "",
            }
        )
    return rows


def run_experiment(
    spec_path: str | Path,
    seed: int,
    out_dir: str | Path,
    mc_trials: int | None = None,
    threads: int = 1,
) -> dict:
    """Execute a run spec and write results.csv plus manifest.json.

    ``mc_trials`` overrides the spec's Monte Carlo budget when given.
    Rows are emitted in deterministic task order whatever the thread
    count; per-task wall time is recorded only in the manifest so the CSV
    stays byte-stable.
    """
    spec_path = Path(spec_path)
    spec = load_run_spec(spec_path)
    if not isinstance(seed, int) or isinstance(seed, bool) or not 0 <= seed < 2**64:
        raise ValueError("seed must be an unsigned 64-bit integer")
    if threads < 1:
        raise ValueError("threads must be at least 1")
    trials = spec.mc_trials if mc_trials is None else mc_trials
    if trials < 0:
        raise ValueError("mc_trials must be non-negative")

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    started = time.perf_counter()

    tasks = [
        (sweep_idx, scen_idx, mode_idx)
        for sweep_idx in range(len(spec.sweep_values))
        for scen_idx in range(spec.n_scenarios)
        for mode_idx in range(len(spec.modes))
    ]

    def execute(task: tuple[int, int, int]) -> list[dict]:
        sweep_idx, scen_idx, mode_idx = task
        return _run_task(spec, seed, sweep_idx, scen_idx, mode_idx, trials)

    if threads == 1:
        outputs = [execute(task) for task in tasks]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [pool.submit(execute, task) for task in tasks]
            outputs = [future.result() for future in futures]

    rows = [row for chunk in outputs for row in chunk]
    csv_path = out_dir / "results.csv"
    with csv_path.open("w", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)

    warnings = []
    for row in rows:
        if row["se_mc"] == "":
            continue
        closed, mc = float(row["se_closed"]), float(row["se_mc"])
        rel = abs(closed - mc) / max(abs(mc), 1e-12)
        if rel > 0.02:
            warnings.append(
                {
                    "sweep_value": row["sweep_value"],
                    "scenario": int(row["scenario"]),
                    "ue": int(row["ue"]),
                    "se_closed": closed,
                    "se_mc": mc,
                    "relative_gap": rel,
                }
            )

    manifest = {
        "schema_version": SCHEMA_VERSION,
        "package_version": __version__,
        "seed": seed,
        "threads": threads,
        "mc_trials": trials,
        "spec_sha256": hashlib.sha256(spec_path.read_bytes()).hexdigest(),
        "sweep_param": spec.sweep_param,
        "sweep_values": [_fmt(v) for v in spec.sweep_values],
        "n_scenarios": spec.n_scenarios,
        "modes": [asdict(mode) for mode in spec.modes],
        "config": {
            key: (None if value is None else value)
            for key, value in asdict(spec.config).items()
        },
        "rows": len(rows),
        "wall_time_s": time.perf_counter() - started,
        "closed_vs_mc_warnings": warnings,
    }
    manifest_path = out_dir / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return {"results": str(csv_path), "manifest": str(manifest_path)}


def emit_cdf(in_path: str | Path, out_path: str | Path) -> dict:
    """Summarize a results CSV into per-group empirical CDFs of closed SE.

    Rows are grouped by sweep point and mode; samples pool every
    (scenario, UE) pair.  q05 is the empirical 5 percent quantile of the
    group, repeated on each of its rows.
    """
    in_path, out_path = Path(in_path), Path(out_path)
    with in_path.open(newline="") as handle:
        reader = csv.DictReader(handle)
        missing = set(CSV_COLUMNS) - set(reader.fieldnames or [])
        if missing:
            raise ValueError(f"input CSV lacks columns: {sorted(missing)}")
        groups: dict[tuple, list[float]] = {}
        order = []
        for row in reader:
            key = (
                row["sweep_param"],
                row["sweep_value"],
                row["mode_combiner"],
                row["mode_emi"],
                row["mode_power"],
                row["mode_ris"],
            )
            if key not in groups:
                groups[key] = []
                order.append(key)
            groups[key].append(float(row["se_closed"]))
    if not groups:
        raise ValueError("input CSV has no data rows")

    out_rows = []
    for key in order:
        samples = sorted(groups[key])
        n = len(samples)
        q05 = samples[max(0, math.ceil(0.05 * n) - 1)]
        for i, value in enumerate(samples):
            out_rows.append(
                {
                    "sweep_param": key[0],
                    "sweep_value": key[1],
                    "mode_combiner": key[2],
                    "mode_emi": key[3],
                    "mode_power": key[4],
                    "mode_ris": key[5],
                    "se": _fmt(value),
                    "cdf": _fmt((i + 1) / n),
                    "q05": _fmt(q05),
                }
            )
    with out_path.open("w", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=CDF_COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(out_rows)
    return {"cdf": str(out_path), "rows": len(out_rows)}
