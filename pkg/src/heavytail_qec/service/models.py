"""Pydantic request/response models; also the on-disk config schema."""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..distributions import DistributionSpec
from ..experiment import ExperimentConfig, noise_model_from_dict
from ..schwarma import ArmaModel


class DistributionSpecModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    family: Literal["gaussian", "student", "stable"]
    sigma: float = Field(ge=0.0)
    nu: int | None = Field(default=None, ge=1)
    alpha: float | None = Field(default=None, gt=0.0, le=2.0)

    @model_validator(mode="after")
    def _family_params(self):
        if self.family == "student" and self.nu is None:
            raise ValueError("student requires nu")
        if self.family == "stable" and self.alpha is None:
            raise ValueError("stable requires alpha")
        return self

    def to_core(self) -> DistributionSpec:
        return DistributionSpec(self.family, self.sigma, nu=self.nu, alpha=self.alpha)


class NoiseModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    mode: Literal["white", "dc", "ema"]
    T_h: float | None = Field(default=None, gt=0.0)
    innovations: DistributionSpecModel

    @model_validator(mode="after")
    def _ema_needs_half_life(self):
        if self.mode == "ema" and self.T_h is None:
            raise ValueError("ema noise requires T_h")
        if self.mode != "ema" and self.T_h is not None:
            raise ValueError("T_h is only meaningful for ema noise")
        return self

    def to_core(self) -> ArmaModel:
        payload = {"mode": self.mode, "innovations": self.innovations.model_dump(exclude_none=True)}
        if self.T_h is not None:
            payload["T_h"] = self.T_h
        return noise_model_from_dict(payload)


class ExperimentConfigModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    noise: NoiseModel
    sigma_grid: list[float] = Field(min_length=1)
    trials_per_point: int = Field(ge=100)
    master_seed: int = Field(ge=0, lt=2**64)
    n_rounds: int = Field(default=3, ge=1)
    bootstrap_resamples: int = Field(default=1000, ge=1)
    confidence: float = Field(default=0.95, gt=0.0, lt=1.0)
    output_path: str | None = None

    def to_core(self) -> ExperimentConfig:
        return ExperimentConfig(
            noise=self.noise.to_core(),
            sigma_grid=tuple(self.sigma_grid),
            trials_per_point=self.trials_per_point,
            master_seed=self.master_seed,
            n_rounds=self.n_rounds,
            bootstrap_resamples=self.bootstrap_resamples,
            confidence=self.confidence,
            output_path=self.output_path,
        )


class ResultRowModel(BaseModel):
    sigma: float
    sigma_eff: float
    physical_infidelity: float
    logical_infidelity: float
    ci_low: float
    ci_high: float
    trials: int


class ExperimentRunRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    config: ExperimentConfigModel
    workers: int | None = Field(default=None, ge=1)
    resume: bool = True


class ExperimentRunResponse(BaseModel):
    rows: list[ResultRowModel]
    csv: str
    manifest: dict


class AnalyticRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    family: Literal["gaussian", "student", "stable"]
    nu: int | None = Field(default=None, ge=1)
    alpha: float | None = Field(default=None, gt=0.0, le=2.0)
    distances: list[int] = Field(min_length=1)
    n_qubits: int | None = None
    sigma_grid: list[float] = Field(min_length=1)
    fit: bool = False
    precision_bits: int = Field(default=256, ge=128)

    @model_validator(mode="after")
    def _family_params(self):
        if self.family == "student" and self.nu is None:
            raise ValueError("student requires nu")
        if self.family == "stable" and self.alpha is None:
            raise ValueError("stable requires alpha")
        return self


class AnalyticRowModel(BaseModel):
    distance: int
    sigma: float
    p_ph: float
    p_unc: float
    p_cor: float


class AnalyticFitModel(BaseModel):
    distance: int
    curve: Literal["unc", "cor"]
    exponent: float
    coefficient: float
    exponent_drift: float


class AnalyticResponse(BaseModel):
    rows: list[AnalyticRowModel]
    fits: list[AnalyticFitModel] | None
    csv: str
    fit_csv: str | None


class DistCheckRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    spec: DistributionSpecModel
    samples: int = Field(default=1_000_000, ge=1000)
    t_values: list[float] = Field(default=[0.5, 1.0, 2.0], min_length=1)
    seed: int = Field(default=0, ge=0)
    threshold_se: float = Field(default=4.0, gt=0.0)
    # negative-control hook: mis-scales the sampler but not the analytic cf
    sample_scale: float = Field(default=1.0, gt=0.0)


class DistCheckEntry(BaseModel):
    t: float
    empirical: float
    analytic: float
    std_error: float
    n_se: float


class DistCheckResponse(BaseModel):
    entries: list[DistCheckEntry]
    passed: bool


class LayoutResponse(BaseModel):
    text: str
    n_data: int
    n_ancilla: int
    x_stabilizers: list[list[int]]
    z_stabilizers: list[list[int]]
    logical_x: list[int]
    logical_z: list[int]
    cnot_layers: list[list[list[int]]]


class HealthResponse(BaseModel):
    status: str
    version: str
