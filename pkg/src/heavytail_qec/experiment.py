"""Monte Carlo harness for the distance-3 surface-code pipeline.

Each (grid point, trial) pair owns an independent random stream derived by
counter-based key (master_seed, point, trial), so results are bit-identical
for any worker count or execution order.  Per-point aggregates (mean logical
infidelity with percentile-bootstrap confidence intervals) are persisted as
a CSV plus a JSON manifest; completed points are reused when re-running the
same configuration.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .distributions import DistributionSpec, ParameterError, physical_infidelity, sample
from .schwarma import ArmaModel, build_ema, dc, generate, marginal_spec, white
from .surface_code import N_QUBITS, TICKS_PER_ROUND, RotatedSurfaceCode

CSV_COLUMNS = ("sigma", "sigma_eff", "physical_infidelity", "logical_infidelity", "ci_low", "ci_high", "trials")

_ROLE_TRIAL = 0
_ROLE_BOOTSTRAP = 1

_code_singleton = None


def _code() -> RotatedSurfaceCode:
    global _code_singleton
    if _code_singleton is None:
        _code_singleton = RotatedSurfaceCode()
    return _code_singleton


@dataclass(frozen=True)
class ExperimentConfig:
    noise: ArmaModel
    sigma_grid: tuple
    trials_per_point: int
    master_seed: int
    n_rounds: int = 3
    bootstrap_resamples: int = 1000
    confidence: float = 0.95
    output_path: str | None = None

    def __post_init__(self):
        grid = tuple(float(s) for s in self.sigma_grid)
        object.__setattr__(self, "sigma_grid", grid)
        if not grid:
            raise ParameterError("sigma_grid must be nonempty")
        if any(s <= 0 for s in grid) or any(b <= a for a, b in zip(grid, grid[1:])):
            raise ParameterError("sigma_grid must be positive and strictly increasing")
        if self.trials_per_point < 100:
            raise ParameterError(f"trials_per_point must be >= 100, got {self.trials_per_point}")
        if self.n_rounds < 1:
            raise ParameterError("n_rounds must be >= 1")
        if self.bootstrap_resamples < 1:
            raise ParameterError("bootstrap_resamples must be >= 1")
        if not (0.0 < self.confidence < 1.0):
            raise ParameterError("confidence must be in (0, 1)")
        if not (0 <= self.master_seed < 2**64):
            raise ParameterError("master_seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class TrialResult:
    fidelity_sq: float
    seed: int


@dataclass(frozen=True)
class ResultRow:
    sigma: float
    sigma_eff: float
    physical_infidelity: float
    logical_infidelity: float
    ci_low: float
    ci_high: float
    trials: int


@dataclass
class ResultTable:
    rows: list = field(default_factory=list)

    def to_csv(self) -> str:
        lines = [",".join(CSV_COLUMNS)]
        for r in self.rows:
            lines.append(
                ",".join(
                    repr(float(getattr(r, c))) if c != "trials" else str(r.trials) for c in CSV_COLUMNS
                )
            )
        return "\n".join(lines) + "\n"


def noise_model_to_dict(model: ArmaModel) -> dict:
    spec = model.innovations
    inn = {"family": spec.family, "sigma": spec.sigma}
    if spec.nu is not None:
        inn["nu"] = spec.nu
    if spec.alpha is not None:
        inn["alpha"] = spec.alpha
    out = {"mode": model.mode, "innovations": inn}
    if model.mode == "ema":
        out["T_h"] = model.half_life
    return out


def noise_model_from_dict(d: dict) -> ArmaModel:
    inn = d.get("innovations", {})
    spec = DistributionSpec(
        family=inn.get("family", ""),
        sigma=float(inn.get("sigma", 1.0)),
        nu=inn.get("nu"),
        alpha=inn.get("alpha"),
    )
    mode = d.get("mode")
    if mode == "white":
        return white(spec)
    if mode == "dc":
        return dc(spec)
    if mode == "ema":
        if "T_h" not in d:
            raise ParameterError("ema noise requires T_h")
        return build_ema(float(d["T_h"]), spec)
    raise ParameterError(f"unknown noise mode {mode!r}")


def config_to_dict(config: ExperimentConfig) -> dict:
    return {
        "noise": noise_model_to_dict(config.noise),
        "sigma_grid": list(config.sigma_grid),
        "trials_per_point": config.trials_per_point,
        "n_rounds": config.n_rounds,
        "master_seed": config.master_seed,
        "bootstrap_resamples": config.bootstrap_resamples,
        "confidence": config.confidence,
        "output_path": config.output_path,
    }


def config_from_dict(d: dict) -> ExperimentConfig:
    known = {
        "noise",
        "sigma_grid",
        "trials_per_point",
        "n_rounds",
        "master_seed",
        "bootstrap_resamples",
        "confidence",
        "output_path",
    }
    unknown = set(d) - known
    if unknown:
        raise ParameterError(f"unknown config keys: {sorted(unknown)}")
    missing = {"noise", "sigma_grid", "trials_per_point", "master_seed"} - set(d)
    if missing:
        raise ParameterError(f"missing config keys: {sorted(missing)}")
    kwargs = {k: d[k] for k in known & set(d) if k != "noise"}
    return ExperimentConfig(noise=noise_model_from_dict(d["noise"]), **kwargs)


def config_hash(config: ExperimentConfig) -> str:
    payload = config_to_dict(config)
    payload.pop("output_path")  # moving the output does not invalidate results
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()


def run_trial(config: ExperimentConfig, point_index: int, trial_index: int) -> TrialResult:
    """One full pipeline trial on its own derived random stream."""
    ss = np.random.SeedSequence(config.master_seed, spawn_key=(_ROLE_TRIAL, point_index, trial_index))
    rng = np.random.default_rng(ss)
    alpha = rng.uniform(0.0, 2.0 * math.pi)
    beta = rng.uniform(0.0, 2.0 * math.pi)
    model = config.noise.with_sigma(config.sigma_grid[point_index])
    angles = generate(model, TICKS_PER_ROUND * config.n_rounds, N_QUBITS, rng)
    fid = _code().run_trial(alpha, beta, angles, rng, config.n_rounds)
    return TrialResult(fidelity_sq=float(fid), seed=int(ss.generate_state(1, np.uint64)[0]))


def _chunk_worker(config: ExperimentConfig, point_index: int, start: int, stop: int) -> np.ndarray:
    out = np.empty(stop - start)
    for t in range(start, stop):
        out[t - start] = run_trial(config, point_index, t).fidelity_sq
    return out


def bootstrap_ci(
    samples,
    resamples: int,
    confidence: float,
    rng: np.random.Generator,
    chunk: int = 200,
) -> tuple[float, float]:
    """Percentile bootstrap interval for the mean: resample with
    replacement, collect means, return the (1-c)/2 and (1+c)/2 quantiles."""
    x = np.asarray(samples, dtype=float)
    if x.size == 0:
        raise ParameterError("samples must be nonempty")
    means = np.empty(resamples)
    done = 0
    while done < resamples:
        m = min(chunk, resamples - done)
        idx = rng.integers(0, x.size, size=(m, x.size))
        means[done : done + m] = x[idx].mean(axis=1)
        done += m
    lo = float(np.quantile(means, (1.0 - confidence) / 2.0))
    hi = float(np.quantile(means, (1.0 + confidence) / 2.0))
    return lo, hi


def _point_row(config: ExperimentConfig, point_index: int, fidelities: np.ndarray) -> ResultRow:
    infid = 1.0 - fidelities
    mean = float(infid.mean())
    rng = np.random.default_rng(
        np.random.SeedSequence(config.master_seed, spawn_key=(_ROLE_BOOTSTRAP, point_index))
    )
    lo, hi = bootstrap_ci(infid, config.bootstrap_resamples, config.confidence, rng)
    sigma = config.sigma_grid[point_index]
    m_spec = marginal_spec(config.noise.with_sigma(sigma))
    return ResultRow(
        sigma=sigma,
        sigma_eff=m_spec.sigma,
        physical_infidelity=physical_infidelity(m_spec),
        logical_infidelity=mean,
        ci_low=lo,
        ci_high=hi,
        trials=int(fidelities.size),
    )


def _atomic_write(path: str, text: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def manifest_path(output_path: str) -> str:
    return output_path + ".manifest.json"


def _load_resumable(config: ExperimentConfig) -> dict:
    if config.output_path is None:
        return {}
    try:
        with open(manifest_path(config.output_path)) as fh:
            manifest = json.load(fh)
    except (OSError, json.JSONDecodeError):
        return {}
    if manifest.get("config_hash") != config_hash(config):
        return {}
    return {int(p["index"]): ResultRow(**p["row"]) for p in manifest.get("points", [])}


def _persist(config: ExperimentConfig, done: dict, wall_time: float) -> None:
    if config.output_path is None:
        return
    table = ResultTable(rows=[done[i] for i in sorted(done)])
    manifest = {
        "artifact_version": __version__,
        "config": config_to_dict(config),
        "config_hash": config_hash(config),
        "master_seed": config.master_seed,
        "points": [
            {
                "index": i,
                "row": vars(done[i]),
                "trial_key_range": [[_ROLE_TRIAL, i, 0], [_ROLE_TRIAL, i, config.trials_per_point - 1]],
            }
            for i in sorted(done)
        ],
        "wall_time_seconds": wall_time,
    }
    _atomic_write(config.output_path, table.to_csv())
    _atomic_write(manifest_path(config.output_path), json.dumps(manifest, indent=1))


def run_experiment(
    config: ExperimentConfig,
    workers: int | None = None,
    resume: bool = True,
) -> ResultTable:
    """Run every (point, trial) pair, aggregate, persist, and return the
    table.  The trial -> stream mapping is independent of workers, so the
    output CSV is byte-identical for any worker count."""
    t_start = time.monotonic()
    done = _load_resumable(config) if resume else {}
    pending_points = [i for i in range(len(config.sigma_grid)) if i not in done]
    n = config.trials_per_point
    use_pool = workers is not None and workers > 1 and pending_points
    if use_pool:
        chunk = max(100, math.ceil(n / (workers * 4)))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for p in pending_points:
                spans = [(s, min(s + chunk, n)) for s in range(0, n, chunk)]
                futures = [pool.submit(_chunk_worker, config, p, a, b) for a, b in spans]
                fids = np.concatenate([f.result() for f in futures])
                done[p] = _point_row(config, p, fids)
                _persist(config, done, time.monotonic() - t_start)
    else:
        for p in pending_points:
            fids = _chunk_worker(config, p, 0, n)
            done[p] = _point_row(config, p, fids)
            _persist(config, done, time.monotonic() - t_start)
    return ResultTable(rows=[done[i] for i in sorted(done)])


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_error: float
    ci_low: float
    ci_high: float


def estimate_physical_infidelity_mc(
    spec: DistributionSpec,
    trials: int,
    rng: np.random.Generator,
    batch: int = 250_000,
) -> McEstimate:
    """Monte Carlo oracle for the single-qubit infidelity: averages
    1 - |<psi0| exp(-i theta sigma_y) |psi0>|^2 over random initial states
    (alpha, beta uniform on [0, 2pi)) and theta ~ spec.  Validates the
    closed form (3/8)(1 - f(2)) and the rotation convention."""
    if trials < 1:
        raise ParameterError("trials must be >= 1")
    if spec.sigma == 0.0:
        return McEstimate(0.0, 0.0, 0.0, 0.0)
    acc = 0.0
    acc2 = 0.0
    left = trials
    while left > 0:
        m = min(batch, left)
        alpha = rng.uniform(0.0, 2.0 * math.pi, m)
        beta = rng.uniform(0.0, 2.0 * math.pi, m)
        theta = np.asarray(sample(spec, rng, m))
        a0 = np.cos(alpha)
        a1 = np.exp(1j * beta) * np.sin(alpha)
        c = np.cos(theta)
        s = np.sin(theta)
        # same matrix as statevector.rotate_y: [[c, -s], [s, c]]
        f0 = c * a0 - s * a1
        f1 = s * a0 + c * a1
        ov = np.conj(a0) * f0 + np.conj(a1) * f1
        x = 1.0 - np.abs(ov) ** 2
        acc += float(x.sum())
        acc2 += float((x * x).sum())
        left -= m
    mean = acc / trials
    var = max(acc2 / trials - mean * mean, 0.0)
    se = math.sqrt(var / trials)
    return McEstimate(mean=mean, std_error=se, ci_low=mean - 1.96 * se, ci_high=mean + 1.96 * se)
