"""Time-correlated rotation-angle trajectories via moving-average filtering.

Per-tick angles theta_k = sum_j b_j x_{k-j} over i.i.d. innovations x.  Three
modes: "white" (b = [1], no correlation), "dc" (one draw per qubit reused at
every tick, the q -> infinity limit), and "ema" (exponential moving average
with half-life T_h ticks).  The autoregressive part is unused here (p = 0).

EMA filtering requires a distribution family closed under positive linear
combinations, so innovations must be gaussian or stable; white and dc accept
any family.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .distributions import DistributionSpec, ParameterError, UnsupportedOperationError, sample

MODES = ("white", "dc", "ema")


@dataclass(frozen=True)
class ArmaModel:
    """Moving-average noise model: theta_k = sum_j ma_coeffs[j] * x_{k-j}."""

    mode: str
    innovations: DistributionSpec
    ma_coeffs: np.ndarray
    half_life: float | None = None
    ar_coeffs: tuple = field(default=())  # p = 0 throughout this artifact

    def __post_init__(self):
        if self.mode not in MODES:
            raise ParameterError(f"unknown mode {self.mode!r}, expected one of {MODES}")
        if self.ar_coeffs:
            raise ParameterError("autoregressive coefficients are not supported (p = 0)")

    def with_sigma(self, sigma: float) -> "ArmaModel":
        return ArmaModel(self.mode, self.innovations.with_sigma(sigma), self.ma_coeffs, self.half_life)


def white(innovations: DistributionSpec) -> ArmaModel:
    return ArmaModel("white", innovations, np.ones(1))


def dc(innovations: DistributionSpec) -> ArmaModel:
    return ArmaModel("dc", innovations, np.ones(1))


def build_ema(half_life: float, innovations: DistributionSpec) -> ArmaModel:
    """EMA weights b_j = N exp(-ln2 * j / T_h), j = 0 .. 10*ceil(T_h) - 1,
    normalized so sum(b) = 1."""
    if not (half_life > 0.0) or not math.isfinite(half_life):
        raise ParameterError(f"half_life must be positive and finite, got {half_life}")
    n_terms = 10 * math.ceil(half_life)
    j = np.arange(n_terms, dtype=float)
    b = np.exp(-math.log(2.0) * j / half_life)
    b /= b.sum()
    return ArmaModel("ema", innovations, b, half_life=half_life)


def _check_ema_family(model: ArmaModel):
    if model.innovations.family == "student":
        raise UnsupportedOperationError(
            "EMA filtering requires a stable family (gaussian or stable); "
            "the student family is not closed under convex combinations"
        )


def generate(model: ArmaModel, n_ticks: int, n_qubits: int, rng: np.random.Generator) -> np.ndarray:
    """Independent per-qubit angle trajectories, shape (n_qubits, n_ticks).

    EMA trajectories include a burn-in of len(b)-1 pre-circuit innovations so
    tick 0 is already stationary.
    """
    if n_ticks < 1 or n_qubits < 1:
        raise ParameterError("n_ticks and n_qubits must be >= 1")
    if model.mode == "white":
        return np.asarray(sample(model.innovations, rng, (n_qubits, n_ticks)))
    if model.mode == "dc":
        draws = np.asarray(sample(model.innovations, rng, (n_qubits, 1)))
        return np.repeat(draws, n_ticks, axis=1)
    _check_ema_family(model)
    b = model.ma_coeffs
    x = np.asarray(sample(model.innovations, rng, (n_qubits, n_ticks + b.size - 1)))
    out = np.empty((n_qubits, n_ticks))
    for q in range(n_qubits):
        out[q] = np.convolve(x[q], b, mode="valid")
    return out


def marginal_spec(model: ArmaModel) -> DistributionSpec:
    """Per-tick marginal distribution of the generated angles.

    For EMA the family is preserved with scale sigma_eff =
    sigma * (sum_j b_j^alpha)^(1/alpha) (alpha = 2 for gaussian); white and
    dc pass the innovation spec through unchanged.
    """
    if model.mode in ("white", "dc"):
        return model.innovations
    _check_ema_family(model)
    spec = model.innovations
    alpha = 2.0 if spec.family == "gaussian" else spec.alpha
    scale = float(np.sum(model.ma_coeffs**alpha) ** (1.0 / alpha))
    return spec.with_sigma(spec.sigma * scale)


def cos_autocorrelation(trajectories: np.ndarray, lag: int, scale: float = 1.0) -> float:
    """Lag autocorrelation of cos(theta/scale) across tick pairs.

    The cosine transform keeps the statistic defined for heavy-tailed
    marginals whose second moments diverge.
    """
    y = np.cos(trajectories / scale)
    a = y[:, :-lag].ravel() if lag else y.ravel()
    b = y[:, lag:].ravel() if lag else y.ravel()
    a = a - a.mean()
    b = b - b.mean()
    denom = math.sqrt(float(np.dot(a, a)) * float(np.dot(b, b)))
    if denom == 0.0:
        return 0.0
    return float(np.dot(a, b) / denom)
