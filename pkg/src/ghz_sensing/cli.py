"""Command-line interface: reproducible runs emitting CSV/JSON artifacts.

A run is configured by a declarative JSON file plus flag overrides (flags
win).  Every run echoes its fully-resolved configuration next to the outputs,
and every output file carries the tool version and a hash of that effective
configuration.  Exit codes: 0 success, 2 config error, 3 numerical failure,
4 verification failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .estimation import ExperimentConfig, variance_bounds, variance_ghz, variance_ideal
from .montecarlo import (
    CovarianceFactorizationError,
    TrajectoryConfig,
    empirical_mse,
    ensemble_coherence,
    sample_trajectories,
)
from .noise import (
    BosonicBathParams,
    ClassicalNoiseParams,
    DephasingModel,
    coherence,
    gamma_bosonic,
    gamma_classical,
    gamma_limit_markov,
    gamma_limit_one_over_f,
)
from .output import config_hash, write_json_document, write_table
from .scaling import (
    SchedulePolicy,
    divergence_probe,
    exposure_time,
    fit_exponent,
    gamma_bound_check,
    optimal_exposure,
    uncertainty_curve,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_VERIFICATION = 4

#: MC-vs-analytic disagreement beyond this many standard errors fails the run
Z_SCORE_LIMIT = 5.0


class ConfigError(ValueError):
    """Invalid, unknown, or ill-typed configuration input."""


class VerificationError(RuntimeError):
    """A verification command found a violated check."""


# ---------------------------------------------------------------------------
# config schema


def _number(value, key: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key}: expected a number, got {value!r}")
    return float(value)


def _integer(value, key: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{key}: expected an integer, got {value!r}")
    return value


def _number_list(value, key: str) -> list[float]:
    if not isinstance(value, list) or not value:
        raise ConfigError(f"{key}: expected a nonempty list of numbers")
    return [_number(v, key) for v in value]


def _optional_number(value, key: str):
    return None if value is None else _number(value, key)


_MODEL_FIELDS = {
    "classical_gaussian": ("coupling", "correlation_time"),
    "markovian_limit": ("coupling", "correlation_time"),
    "one_over_f_limit": ("coupling", "correlation_time"),
    "bosonic_bath": ("temperature", "cutoff"),
}

_DEFAULT_MODEL = {"kind": "classical_gaussian", "coupling": 0.25, "correlation_time": 1.0}


def _validate_model(section) -> dict:
    if not isinstance(section, dict):
        raise ConfigError("model: expected an object")
    kind = section.get("kind")
    if kind not in _MODEL_FIELDS:
        raise ConfigError(f"model.kind: expected one of {sorted(_MODEL_FIELDS)}, got {kind!r}")
    fields = _MODEL_FIELDS[kind]
    unknown = set(section) - {"kind", *fields}
    if unknown:
        raise ConfigError(f"model: unknown keys {sorted(unknown)}")
    out = {"kind": kind}
    for field in fields:
        if field not in section:
            raise ConfigError(f"model.{field}: required for kind {kind}")
        out[field] = _number(section[field], f"model.{field}")
    try:
        build_model(out)
    except ValueError as exc:
        raise ConfigError(f"model: {exc}") from exc
    return out


def build_model(model_cfg: dict) -> DephasingModel:
    kind = model_cfg["kind"]
    if kind == "bosonic_bath":
        params = BosonicBathParams(temperature=model_cfg["temperature"], cutoff=model_cfg["cutoff"])
        return DephasingModel.bosonic_bath(params)
    params = ClassicalNoiseParams(
        coupling=model_cfg["coupling"], correlation_time=model_cfg["correlation_time"]
    )
    return DephasingModel(kind=kind, classical=params)


# per-command parameter schema: key -> (caster, default)
_SCHEMAS = {
    "decoherence-curve": {
        "t_min": (_number, 0.0),
        "t_max": (_number, 5.0),
        "points": (_integer, 501),
        "bath_temperature": (_optional_number, None),
        "bath_cutoff": (_optional_number, None),
    },
    "scaling": {
        "base_time": (_number, 0.1),
        "schedule_exponent": (_number, 0.5),
        "l_min_exp": (_integer, 4),
        "l_max_exp": (_integer, 14),
        "total_time": (_number, 1000.0),
        "tail_fraction": (_number, 0.5),
    },
    "mc-verify": {
        "times": (_number_list, [0.05, 0.2, 1.0, 5.0]),
        "num_trajectories": (_integer, 100_000),
        "grid_points": (_integer, 0),  # 0 = auto
        "dump_trajectories": (_integer, 0),
    },
    "mc-estimate": {
        "num_spins": (_integer, 4),
        "exposure_time": (_number, 0.5),
        "total_time": (_number, 1000.0),
        "detuning": (_optional_number, None),  # None = pi/(2 L t)
        "repetitions": (_integer, 1000),
    },
    "optimal-time": {
        "l_min_exp": (_integer, 4),
        "l_max_exp": (_integer, 14),
        "total_time": (_number, 1000.0),
    },
    "bounds-check": {
        "num_configs": (_integer, 1000),
        "l_powers_of_ten": (_number_list, [1, 2, 3, 4, 5, 6]),
        "base_time": (_number, 0.1),
        "schedule_exponent": (_number, 0.5),
    },
}

_TOP_LEVEL_KEYS = {"command", "model", "seed", "threads", "format", "out"}


def _section_name(command: str) -> str:
    return command.replace("-", "_")


@dataclass(frozen=True)
class RunConfig:
    """Fully-resolved run configuration; pure data, round-trips via JSON."""

    command: str
    out_dir: str
    seed: int
    threads: int
    output_format: str
    model: dict
    section: dict

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "out": self.out_dir,
            "seed": self.seed,
            "threads": self.threads,
            "format": self.output_format,
            "model": self.model,
            _section_name(self.command): self.section,
        }

    def content_dict(self) -> dict:
        """The keys that determine output content; the hash is taken over
        these, so reruns into another directory or with another thread count
        stay byte-identical."""
        data = self.to_dict()
        del data["out"]
        del data["threads"]
        return data


def build_run_config(command: str, file_data: dict | None, overrides: dict) -> RunConfig:
    if command not in _SCHEMAS:
        raise ConfigError(f"unknown command {command!r}")
    data = dict(file_data or {})
    section_name = _section_name(command)
    unknown = set(data) - _TOP_LEVEL_KEYS - {section_name}
    if unknown:
        raise ConfigError(f"unknown config keys {sorted(unknown)}")
    if "command" in data and data["command"] != command:
        raise ConfigError(f"config is for command {data['command']!r}, not {command!r}")

    seed = _integer(data.get("seed", 12345), "seed")
    threads = _integer(data.get("threads", 1), "threads")
    fmt = data.get("format", "csv")
    out_dir = data.get("out", ".")
    if overrides.get("seed") is not None:
        seed = overrides["seed"]
    if overrides.get("threads") is not None:
        threads = overrides["threads"]
    if overrides.get("format") is not None:
        fmt = overrides["format"]
    if overrides.get("out") is not None:
        out_dir = overrides["out"]
    if fmt not in ("csv", "json"):
        raise ConfigError(f"format: expected 'csv' or 'json', got {fmt!r}")
    if seed < 0:
        raise ConfigError("seed must be a nonnegative integer")
    if threads < 0:
        raise ConfigError("threads must be >= 0 (0 = auto)")
    if not isinstance(out_dir, str):
        raise ConfigError("out: expected a path string")

    model = _validate_model(data.get("model", _DEFAULT_MODEL))

    raw_section = data.get(section_name, {})
    if not isinstance(raw_section, dict):
        raise ConfigError(f"{section_name}: expected an object")
    schema = _SCHEMAS[command]
    unknown = set(raw_section) - set(schema)
    if unknown:
        raise ConfigError(f"{section_name}: unknown keys {sorted(unknown)}")
    section = {}
    for key, (caster, default) in schema.items():
        section[key] = caster(raw_section[key], f"{section_name}.{key}") if key in raw_section else default
    return RunConfig(
        command=command,
        out_dir=out_dir,
        seed=seed,
        threads=threads,
        output_format=fmt,
        model=model,
        section=section,
    )


def _require_classical(cfg: RunConfig, command: str) -> ClassicalNoiseParams:
    if cfg.model["kind"] == "bosonic_bath":
        raise ConfigError(f"{command} requires a classical noise model")
    return ClassicalNoiseParams(
        coupling=cfg.model["coupling"], correlation_time=cfg.model["correlation_time"]
    )


def _table_path(out: Path, stem: str, fmt: str) -> Path:
    return out / f"{stem}.{fmt}"


# ---------------------------------------------------------------------------
# commands


def cmd_decoherence_curve(cfg: RunConfig, out: Path, cfg_hash: str) -> list[Path]:
    params = _require_classical(cfg, "decoherence-curve")
    s = cfg.section
    if s["t_min"] < 0 or s["t_max"] <= s["t_min"] or s["points"] < 2:
        raise ConfigError("decoherence_curve: need 0 <= t_min < t_max and points >= 2")
    if (s["bath_temperature"] is None) != (s["bath_cutoff"] is None):
        raise ConfigError("decoherence_curve: bath_temperature and bath_cutoff go together")
    grid = np.linspace(s["t_min"], s["t_max"], s["points"])
    columns = ["t", "gamma_classical", "gamma_1f_limit", "gamma_markov_limit"]
    markov = gamma_limit_markov(params)
    series = [grid, gamma_classical(grid, params), gamma_limit_one_over_f(grid, params),
              np.full_like(grid, markov)]
    if s["bath_temperature"] is not None:
        bath = BosonicBathParams(temperature=s["bath_temperature"], cutoff=s["bath_cutoff"])
        columns.append("gamma_bosonic")
        series.append(gamma_bosonic(grid, bath))
    rows = [[float(col[i]) for col in series] for i in range(len(grid))]
    path = _table_path(out, "decoherence_curve", cfg.output_format)
    write_table(path, columns, rows, cfg.output_format, cfg_hash)
    return [path]


def _schedule_from(section: dict) -> SchedulePolicy:
    try:
        return SchedulePolicy(base_time=section["base_time"], exponent=section["schedule_exponent"])
    except ValueError as exc:
        raise ConfigError(f"schedule: {exc}") from exc


def cmd_scaling(cfg: RunConfig, out: Path, cfg_hash: str) -> list[Path]:
    s = cfg.section
    if s["l_min_exp"] < 0 or s["l_max_exp"] <= s["l_min_exp"]:
        raise ConfigError("scaling: need 0 <= l_min_exp < l_max_exp")
    policy = _schedule_from(s)
    model = build_model(cfg.model)
    sizes = 2 ** np.arange(s["l_min_exp"], s["l_max_exp"] + 1)
    probe = divergence_probe(policy, model, s["total_time"], sizes)
    series = probe.series
    fit = fit_exponent(series, s["tail_fraction"])
    rows = [
        [int(series.probe_sizes[i]), float(series.exposure_times[i]),
         float(series.variances[i]), float(series.uncertainties[i])]
        for i in range(len(series))
    ]
    table = _table_path(out, "scaling", cfg.output_format)
    write_table(table, ["L", "t", "variance", "uncertainty"], rows, cfg.output_format, cfg_hash)
    sidecar = out / "scaling_fit.json"
    write_json_document(
        sidecar,
        {
            "slope": fit.slope,
            "intercept": fit.intercept,
            "stderr": fit.stderr,
            "r_squared": fit.r_squared,
            "diverging": probe.diverging,
            "schedule": {"base_time": policy.base_time, "exponent": policy.exponent},
            "model": cfg.model,
        },
        cfg_hash,
    )
    return [table, sidecar]


def _auto_grid_points(t_max: float, correlation_time: float) -> int:
    return max(41, math.ceil(20.0 * t_max / correlation_time) + 1)


def cmd_mc_verify(cfg: RunConfig, out: Path, cfg_hash: str) -> list[Path]:
    params = _require_classical(cfg, "mc-verify")
    model = build_model(cfg.model)
    if cfg.model["kind"] != "classical_gaussian":
        raise ConfigError("mc-verify samples trajectories of the classical_gaussian model")
    s = cfg.section
    rows = []
    dump_rows = []
    paths_out = []
    for index, t_max in enumerate(s["times"]):
        points = s["grid_points"] or _auto_grid_points(t_max, params.correlation_time)
        sub_seed = int(np.random.SeedSequence(cfg.seed, spawn_key=(index,)).generate_state(1, np.uint64)[0])
        traj_cfg = TrajectoryConfig(
            t_max=t_max, grid_points=points, num_trajectories=s["num_trajectories"], seed=sub_seed
        )
        keep = index == 0 and s["dump_trajectories"] > 0
        ensemble = sample_trajectories(params, traj_cfg, keep_paths=keep, num_threads=cfg.threads)
        mc, stderr = ensemble_coherence(ensemble)
        analytic = coherence(t_max, 1, model)
        diff = mc - analytic
        z = 0.0 if diff == 0.0 else (math.inf if stderr == 0.0 else diff / stderr)
        rows.append([float(t_max), mc, stderr, analytic, z])
        if keep:
            times = traj_cfg.times
            for k in range(min(s["dump_trajectories"], traj_cfg.num_trajectories)):
                for g in range(traj_cfg.grid_points):
                    dump_rows.append([k, g, float(times[g]), float(ensemble.paths[k, g])])
    table = _table_path(out, "mc_verify", cfg.output_format)
    write_table(table, ["t", "mc_coherence", "mc_stderr", "analytic_coherence", "z_score"],
                rows, cfg.output_format, cfg_hash)
    paths_out.append(table)
    if dump_rows:
        dump = _table_path(out, "mc_trajectories", cfg.output_format)
        write_table(dump, ["trajectory_id", "grid_index", "time", "f_value"],
                    dump_rows, cfg.output_format, cfg_hash)
        paths_out.append(dump)
    worst = max(abs(r[4]) for r in rows)
    if worst > Z_SCORE_LIMIT:
        raise VerificationError(
            f"MC coherence deviates from the closed form by |z| = {worst:.2f} > {Z_SCORE_LIMIT}"
        )
    return paths_out


def cmd_mc_estimate(cfg: RunConfig, out: Path, cfg_hash: str) -> list[Path]:
    model = build_model(cfg.model)
    s = cfg.section
    detuning = s["detuning"]
    if detuning is None:
        detuning = math.pi / (2.0 * s["num_spins"] * s["exposure_time"])
    experiment = ExperimentConfig(
        num_spins=s["num_spins"],
        exposure_time=s["exposure_time"],
        total_time=s["total_time"],
        detuning=detuning,
    )
    result = empirical_mse(experiment, model, s["repetitions"], cfg.seed)
    analytic = variance_ghz(experiment, model)
    rows = [[
        experiment.num_spins, experiment.exposure_time, experiment.total_time, detuning,
        experiment.shots, s["repetitions"], result.mse, result.std_error, analytic,
        result.mse / analytic, result.clamp_fraction, result.saturated,
    ]]
    table = _table_path(out, "mc_estimate", cfg.output_format)
    write_table(
        table,
        ["L", "t", "total_time", "delta", "shots", "repetitions", "mse", "mse_stderr",
         "analytic_variance", "ratio", "clamp_fraction", "saturated"],
        rows, cfg.output_format, cfg_hash,
    )
    return [table]


def cmd_optimal_time(cfg: RunConfig, out: Path, cfg_hash: str) -> list[Path]:
    model = build_model(cfg.model)
    s = cfg.section
    if s["l_min_exp"] < 0 or s["l_max_exp"] <= s["l_min_exp"]:
        raise ConfigError("optimal_time: need 0 <= l_min_exp < l_max_exp")
    rows = []
    for size in 2 ** np.arange(s["l_min_exp"], s["l_max_exp"] + 1):
        best = optimal_exposure(int(size), model, s["total_time"])
        rows.append([
            int(size), best.exposure_time, best.variance,
            best.exposure_time * math.sqrt(float(size)), best.interior,
        ])
    table = _table_path(out, "optimal_time", cfg.output_format)
    write_table(table, ["L", "t_star", "variance_star", "t_star_times_sqrtL", "interior"],
                rows, cfg.output_format, cfg_hash)
    return [table]


# parameter ranges for the randomized sandwich sweep; exponents stay moderate
# so e^{2 gamma L t} cannot overflow
_SANDWICH_RANGES = {
    "coupling": (0.02, 0.3),
    "correlation_time": (0.2, 3.0),
    "num_spins": (1, 32),
    "exposure_time": (0.05, 1.0),
}


def cmd_bounds_check(cfg: RunConfig, out: Path, cfg_hash: str) -> list[Path]:
    s = cfg.section
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(cfg.seed, spawn_key=(7,))))
    sandwich_rows = []
    violations = 0
    for index in range(s["num_configs"]):
        lam = rng.uniform(*_SANDWICH_RANGES["coupling"])
        tau = rng.uniform(*_SANDWICH_RANGES["correlation_time"])
        size = int(rng.integers(_SANDWICH_RANGES["num_spins"][0], _SANDWICH_RANGES["num_spins"][1] + 1))
        t = rng.uniform(*_SANDWICH_RANGES["exposure_time"])
        total = t * 10 ** rng.uniform(0.0, 2.0)
        phase = rng.uniform(0.05, math.pi / 2.0)
        model = DephasingModel.classical_gaussian(
            ClassicalNoiseParams(coupling=lam, correlation_time=tau)
        )
        experiment = ExperimentConfig(
            num_spins=size, exposure_time=t, total_time=total, detuning=phase / (size * t)
        )
        bounds = variance_bounds(experiment, model)
        excess = variance_ghz(experiment, model) - variance_ideal(experiment)
        holds = bounds.lower <= excess <= bounds.upper
        violations += not holds
        sandwich_rows.append([
            index, size, t, total, experiment.detuning, bounds.lower, excess, bounds.upper, holds,
        ])
    sandwich = _table_path(out, "bounds_sandwich", cfg.output_format)
    write_table(
        sandwich,
        ["index", "L", "t", "total_time", "delta", "lower", "excess", "upper", "holds"],
        sandwich_rows, cfg.output_format, cfg_hash,
    )

    params = _require_classical(cfg, "bounds-check")
    policy = _schedule_from(s)
    bound_rows = []
    for power in s["l_powers_of_ten"]:
        size = int(round(10**power))
        check = gamma_bound_check(size, policy, params)
        violations += not check.holds
        bound_rows.append([size, exposure_time(size, policy), check.residual, check.bound, check.holds])
    gamma_table = _table_path(out, "gamma_bound", cfg.output_format)
    write_table(gamma_table, ["L", "t", "residual", "bound", "holds"],
                bound_rows, cfg.output_format, cfg_hash)
    if violations:
        raise VerificationError(f"{violations} bound checks violated")
    return [sandwich, gamma_table]


_COMMANDS = {
    "decoherence-curve": cmd_decoherence_curve,
    "scaling": cmd_scaling,
    "mc-verify": cmd_mc_verify,
    "mc-estimate": cmd_mc_estimate,
    "optimal-time": cmd_optimal_time,
    "bounds-check": cmd_bounds_check,
}


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ghz-sense",
        description="GHZ-state field sensing under dephasing: curves, scaling fits, MC verification",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "decoherence-curve": "tabulate the decoherence rate and its two limiting forms",
        "scaling": "uncertainty vs probe size along a schedule, with a power-law fit",
        "mc-verify": "verify the closed-form rate against noise-trajectory sampling",
        "mc-estimate": "empirical estimator MSE vs the analytic variance",
        "optimal-time": "numerically optimal exposure time per probe size",
        "bounds-check": "randomized sandwich bounds and scheduled-rate bound sweeps",
    }
    for name, help_text in helps.items():
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--config", type=Path, default=None, help="JSON config file")
        sp.add_argument("--out", type=str, default=None, help="output directory (default .)")
        sp.add_argument("--format", choices=("csv", "json"), default=None, help="table format")
        sp.add_argument("--seed", type=int, default=None, help="master seed override")
        sp.add_argument("--threads", type=int, default=None, help="worker threads (0 = auto)")
    return parser


def _load_config_file(path: Path | None) -> dict | None:
    if path is None:
        return None
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be an object")
    return data


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {"out": args.out, "format": args.format, "seed": args.seed, "threads": args.threads}
    try:
        file_data = _load_config_file(args.config)
        cfg = build_run_config(args.command, file_data, overrides)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    effective = cfg.to_dict()
    cfg_hash = config_hash(cfg.content_dict())
    echo = out / "effective_config.json"
    echo.write_text(json.dumps(effective, indent=2, sort_keys=True) + "\n", encoding="utf-8")

    try:
        written = _COMMANDS[cfg.command](cfg, out, cfg_hash)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except VerificationError as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return EXIT_VERIFICATION
    except (CovarianceFactorizationError, ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    for path in [echo, *written]:
        print(f"wrote {path}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
