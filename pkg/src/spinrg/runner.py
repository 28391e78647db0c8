"""Experiment orchestration: config parsing, comparison sweeps over N,
CSV/JSON artifacts and the run manifest."""

from __future__ import annotations

import hashlib
import json
import os
import time
from dataclasses import dataclass, field

from jsonschema import Draft202012Validator

from . import __version__
from .analysis import chi_squared, fit_exponential
from .core import EvolveConfig
from .models import HeisenbergCouplings, IsingCouplings
from .observables import ObservableRequest, TimeGrid, run_comparison

CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["model", "couplings", "sizes"],
    "properties": {
        "model": {"enum": ["ising", "heisenberg"]},
        "couplings": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "mode": {"enum": ["homogeneous", "random", "explicit"]},
                "J": {"type": ["number", "array"]},
                "Gamma": {"type": ["number", "array"]},
                "Delta": {"type": "number"},
                "seed": {"type": "integer"},
            },
        },
        "sizes": {"type": "array", "items": {"type": "integer"}, "minItems": 1},
        "initial_state": {"type": "string"},
        "grid": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "t_start": {"type": "number"},
                "t_end": {"type": "number"},
                "n_points": {"type": "integer"},
            },
        },
        "observables": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["kind"],
                "properties": {
                    "kind": {"enum": ["magnetization", "correlation", "entropy"]},
                    "i": {"type": "integer"},
                    "r": {"type": "integer"},
                    "n_sub": {"type": "integer"},
                },
            },
        },
        "normalize_truncated_state": {"type": "boolean"},
        "observable_mode": {"enum": ["projected", "native"]},
        "rg_steps": {"type": "integer", "minimum": 1},
        "fit_with_offset": {"type": "boolean"},
        "evolve": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "max_krylov_dim": {"type": "integer", "minimum": 2},
                "dt_max": {"type": "number", "exclusiveMinimum": 0},
                "tol": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "output_dir": {"type": "string"},
        "memory_budget_bytes": {"type": "integer", "minimum": 1},
    },
}

DEFAULT_MEMORY_BUDGET = 2 * 1024**3


class ConfigError(ValueError):
    """The experiment configuration is invalid."""


class ResourceRefusalError(RuntimeError):
    """Predicted memory use exceeds the budget and --allow-large is not set."""


@dataclass
class ExperimentConfig:
    model: str
    couplings: dict
    sizes: list
    initial_state: str = "all_up"
    grid: TimeGrid = field(default_factory=TimeGrid)
    observables: list = field(default_factory=lambda: [
        ObservableRequest("magnetization"),
        ObservableRequest("correlation"),
        ObservableRequest("entropy"),
    ])
    normalize_truncated_state: bool = True
    observable_mode: str = "projected"
    rg_steps: int = 1
    fit_with_offset: bool | None = None
    evolve_cfg: EvolveConfig = field(default_factory=EvolveConfig)
    memory_budget_bytes: int = DEFAULT_MEMORY_BUDGET
    output_dir: str = "."
    raw: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data) -> "ExperimentConfig":
        errors = sorted(Draft202012Validator(CONFIG_SCHEMA).iter_errors(data),
                        key=lambda e: list(e.path))
        if errors:
            msgs = "; ".join(
                f"{'/'.join(str(p) for p in e.path) or '<root>'}: {e.message}"
                for e in errors)
            raise ConfigError(f"invalid config: {msgs}")
        model = data["model"]
        cp = dict(data["couplings"])
        cp.setdefault("mode", "homogeneous")
        if cp["mode"] == "random" and "seed" not in cp:
            raise ConfigError("random couplings require an explicit seed")
        sizes = list(data["sizes"])
        for n in sizes:
            if model == "ising" and (n < 4 or n % 2):
                raise ConfigError(f"ising sizes must be even and >= 4, got {n}")
            if model == "heisenberg" and (n < 6 or n % 3):
                raise ConfigError(
                    f"heisenberg sizes must be divisible by 3 and >= 6, got {n}")
        if cp["mode"] == "explicit" and len(sizes) != 1:
            raise ConfigError("explicit coupling arrays require a single size")
        grid_d = data.get("grid", {})
        grid = TimeGrid(grid_d.get("t_start", 0.0), grid_d.get("t_end", 10.0),
                        grid_d.get("n_points", 201))
        obs = [
            ObservableRequest(o["kind"], o.get("i", 1), o.get("r", 1),
                              o.get("n_sub", 1))
            for o in data.get("observables", [])
        ] or None
        ev = data.get("evolve", {})
        cfg = cls(
            model=model,
            couplings=cp,
            sizes=sizes,
            initial_state=data.get("initial_state", "all_up"),
            grid=grid,
            normalize_truncated_state=data.get("normalize_truncated_state", True),
            observable_mode=data.get("observable_mode", "projected"),
            rg_steps=data.get("rg_steps", 1),
            fit_with_offset=data.get("fit_with_offset"),
            evolve_cfg=EvolveConfig(
                ev.get("max_krylov_dim", 30), ev.get("dt_max", 0.1),
                ev.get("tol", 1e-10)),
            memory_budget_bytes=data.get("memory_budget_bytes",
                                         DEFAULT_MEMORY_BUDGET),
            output_dir=data.get("output_dir", "."),
            raw=dict(data),
        )
        if obs is not None:
            cfg.observables = obs
        return cfg

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        try:
            with open(path) as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
        return cls.from_dict(data)

    def couplings_for(self, n):
        cp = self.couplings
        if self.model == "ising":
            if cp["mode"] == "homogeneous":
                return IsingCouplings.homogeneous(n, cp.get("J", 1.0),
                                                  cp.get("Gamma", 0.5))
            if cp["mode"] == "random":
                return IsingCouplings.random(n, cp["seed"])
            return IsingCouplings(n, tuple(cp["J"]), tuple(cp["Gamma"]))
        if cp["mode"] == "random":
            raise ConfigError("random couplings are not defined for heisenberg")
        return HeisenbergCouplings(n, cp.get("J", 1.0), cp.get("Delta", 1.0))

    def config_hash(self):
        return hashlib.sha256(
            json.dumps(self.raw, sort_keys=True).encode()).hexdigest()[:16]


def estimate_peak_bytes(n, cfg: EvolveConfig):
    """Predicted peak memory: the Krylov basis plus a few work vectors."""
    return (cfg.max_krylov_dim + 4) * 2**n * 16


def check_memory(config: ExperimentConfig, allow_large=False):
    for n in config.sizes:
        est = estimate_peak_bytes(n, config.evolve_cfg)
        if est > config.memory_budget_bytes and not allow_large:
            raise ResourceRefusalError(
                f"N={n} predicts peak memory {est / 1024**2:.0f} MiB, above "
                f"the budget of {config.memory_budget_bytes / 1024**2:.0f} "
                "MiB; pass --allow-large to proceed"
            )


def _fmt(x):
    return format(float(x), ".17g")


def _series_filename(model, kind, chain, n):
    return f"{model}_{kind}_{chain}_N{n:02d}.csv"


def write_series_csv(path, series, meta):
    lines = [f"# {k}: {v}" for k, v in sorted(meta.items())]
    lines.append("t,value")
    for t, v in zip(series.grid.times, series.values):
        lines.append(f"{_fmt(t)},{_fmt(v)}")
    _atomic_write(path, "\n".join(lines) + "\n")


def _atomic_write(path, text):
    tmp = f"{path}.tmp"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def _series_meta(config, n, extra=None):
    meta = {
        "config_hash": config.config_hash(),
        "model": config.model,
        "initial_state": config.initial_state,
        "grid": f"[{config.grid.t_start},{config.grid.t_end}]x{config.grid.n_points}",
        "observable_mode": config.observable_mode,
        "normalize_truncated_state": config.normalize_truncated_state,
        "rg_steps": config.rg_steps,
        "n_spins": n,
    }
    if config.couplings.get("mode") == "random":
        meta["seed"] = config.couplings["seed"]
    if extra:
        meta.update(extra)
    return meta


def run_compare(config: ExperimentConfig, out_dir, allow_large=False):
    """Paired series CSVs plus chi-squared JSON and manifest for each N."""
    check_memory(config, allow_large)
    os.makedirs(out_dir, exist_ok=True)
    t0 = time.time()
    files = []
    chi2 = {}
    fidelities = {}
    for n in config.sizes:
        c = config.couplings_for(n)
        res = run_comparison(
            config.model, c, config.initial_state, config.grid,
            requests=config.observables,
            observable_mode=config.observable_mode,
            normalize_truncated_state=config.normalize_truncated_state,
            rg_steps=config.rg_steps, cfg=config.evolve_cfg)
        fidelities[str(n)] = res.truncation_fidelity
        meta = _series_meta(config, n,
                           {"truncation_fidelity": res.truncation_fidelity})
        for series in res.original + res.renormalized:
            name = _series_filename(config.model, series.kind, series.chain, n)
            write_series_csv(os.path.join(out_dir, name), series, meta)
            files.append(name)
        for so, sr in zip(res.original, res.renormalized):
            chi2.setdefault(so.kind, []).append([n, chi_squared(so, sr)])
    chi2_path = os.path.join(out_dir, f"{config.model}_chi2.json")
    _atomic_write(chi2_path, json.dumps({
        "model": config.model,
        "config_hash": config.config_hash(),
        "grid": [config.grid.t_start, config.grid.t_end, config.grid.n_points],
        "chi2": chi2,
    }, indent=2) + "\n")
    files.append(os.path.basename(chi2_path))
    _write_manifest(config, out_dir, files, fidelities, time.time() - t0)
    return chi2


def run_convergence(config: ExperimentConfig, out_dir, allow_large=False):
    """Comparison sweep plus exponential fits of chi2 against N."""
    if len(config.sizes) < 3:
        raise ConfigError("convergence needs at least 3 sizes")
    chi2 = run_compare(config, out_dir, allow_large)
    with_offset = config.fit_with_offset
    if with_offset is None:
        with_offset = config.model == "heisenberg"
    tables = []
    for kind, points in chi2.items():
        entry = {"observable": kind, "model": config.model, "points": points}
        try:
            fit = fit_exponential(points, with_offset=with_offset)
            entry["fit"] = {"a": fit.a, "b": fit.b, "c": fit.c,
                            "residual": fit.residual, "model": fit.model}
        except (ValueError, RuntimeError) as exc:
            entry["fit_error"] = str(exc)
        tables.append(entry)
    out = {
        "model": config.model,
        "config_hash": config.config_hash(),
        "note": ("chi2 is an unweighted sum over the recorded grid; the "
                 "amplitude a depends on grid density, b does not beyond a "
                 "constant factor"),
        "fits": tables,
    }
    path = os.path.join(out_dir, f"{config.model}_convergence.json")
    _atomic_write(path, json.dumps(out, indent=2) + "\n")
    return out


def run_epsilon(config: ExperimentConfig, out_dir, allow_large=False):
    """Normalized discrepancy sweep over N, with an exponential fit."""
    from .analysis import epsilon_delta_h

    if config.model != "ising":
        raise ConfigError("the discrepancy sweep is defined for model=ising")
    os.makedirs(out_dir, exist_ok=True)
    t0 = time.time()
    rows = []
    for n in config.sizes:
        c = config.couplings_for(n)
        rep = epsilon_delta_h(c)
        rows.append((n, rep.epsilon))
    lines = [f"# config_hash: {config.config_hash()}", "N,epsilon"]
    for n, e in rows:
        lines.append(f"{n},{_fmt(e)}")
    csv_path = os.path.join(out_dir, "ising_epsilon.csv")
    _atomic_write(csv_path, "\n".join(lines) + "\n")
    out = {"model": "ising", "config_hash": config.config_hash(),
           "points": [[n, e] for n, e in rows]}
    positive = [(n, e) for n, e in rows if e > 0]
    if len(positive) >= 3:
        fit = fit_exponential(positive)
        out["fit"] = {"a": fit.a, "b": fit.b, "c": fit.c,
                      "residual": fit.residual, "model": fit.model}
    else:
        out["fit_skipped"] = "need at least 3 positive points"
    json_path = os.path.join(out_dir, "ising_epsilon.json")
    _atomic_write(json_path, json.dumps(out, indent=2) + "\n")
    _write_manifest(config, out_dir,
                    [os.path.basename(csv_path), os.path.basename(json_path)],
                    {}, time.time() - t0)
    return out


def _write_manifest(config, out_dir, files, fidelities, wall_time):
    manifest = {
        "config": config.raw,
        "config_hash": config.config_hash(),
        "code_version": __version__,
        "wall_time_seconds": wall_time,
        "truncation_fidelities": fidelities,
        "files": {
            name: _sha256(os.path.join(out_dir, name)) for name in files
        },
    }
    _atomic_write(os.path.join(out_dir, "manifest.json"),
                  json.dumps(manifest, indent=2) + "\n")
