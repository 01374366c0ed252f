"""FastAPI service wrapping the toolkit; the CLI is a thin client of this."""

from __future__ import annotations

import json

import numpy as np
from fastapi import FastAPI, HTTPException

from .. import __version__
from ..analytic import (
    FitRegimeError,
    PerfectCodeModel,
    PrecisionError,
    fit_leading_order,
    logical_error_correlated,
    logical_error_uncorrelated,
)
from ..distributions import (
    DistributionSpec,
    ParameterError,
    char_fn,
    empirical_char_fn,
    physical_error_prob,
    sample,
)
from ..experiment import config_to_dict, manifest_path, run_experiment
from ..surface_code import (
    CNOT_LAYERS,
    LOGICAL_X,
    LOGICAL_Z,
    N_ANCILLA,
    N_DATA,
    X_STABILIZERS,
    Z_STABILIZERS,
    RotatedSurfaceCode,
)
from .models import (
    AnalyticFitModel,
    AnalyticRequest,
    AnalyticResponse,
    AnalyticRowModel,
    DistCheckEntry,
    DistCheckRequest,
    DistCheckResponse,
    ExperimentRunRequest,
    ExperimentRunResponse,
    HealthResponse,
    LayoutResponse,
    ResultRowModel,
)

app = FastAPI(title="heavytail-qec", version=__version__)


def _bad_request(code: str, message: str):
    return HTTPException(status_code=400, detail={"code": code, "message": message})


@app.get("/health", response_model=HealthResponse)
def health():
    return HealthResponse(status="ok", version=__version__)


@app.post("/analytic/table", response_model=AnalyticResponse)
def analytic_table(req: AnalyticRequest):
    try:
        base = DistributionSpec(req.family, req.sigma_grid[0], nu=req.nu, alpha=req.alpha)
    except ParameterError as exc:
        raise _bad_request("invalid_spec", str(exc))
    rows = []
    fits = [] if req.fit else None
    for d in req.distances:
        p_unc = []
        p_cor = []
        for sigma in req.sigma_grid:
            model = PerfectCodeModel(base.with_sigma(sigma), d, req.n_qubits)
            try:
                unc = logical_error_uncorrelated(model)
                cor = logical_error_correlated(model, req.precision_bits)
            except PrecisionError as exc:
                raise _bad_request("precision_insufficient", str(exc))
            p_unc.append(unc)
            p_cor.append(cor)
            rows.append(
                AnalyticRowModel(
                    distance=d,
                    sigma=sigma,
                    p_ph=physical_error_prob(base.with_sigma(sigma)),
                    p_unc=unc,
                    p_cor=cor,
                )
            )
        if req.fit:
            for curve, probs in (("unc", p_unc), ("cor", p_cor)):
                try:
                    fit = fit_leading_order(req.sigma_grid, probs)
                except (FitRegimeError, ParameterError) as exc:
                    raise _bad_request("fit_regime", f"{curve} d={d}: {exc}")
                fits.append(
                    AnalyticFitModel(
                        distance=d,
                        curve=curve,
                        exponent=fit.exponent,
                        coefficient=fit.coefficient,
                        exponent_drift=fit.exponent_drift,
                    )
                )
    csv_lines = ["d,sigma,p_ph,p_unc,p_cor"]
    for r in rows:
        csv_lines.append(f"{r.distance},{r.sigma!r},{r.p_ph!r},{r.p_unc!r},{r.p_cor!r}")
    fit_csv = None
    if req.fit:
        fit_lines = ["d,curve,exponent,coefficient,exponent_drift"]
        for f in fits:
            fit_lines.append(f"{f.distance},{f.curve},{f.exponent!r},{f.coefficient!r},{f.exponent_drift!r}")
        fit_csv = "\n".join(fit_lines) + "\n"
    return AnalyticResponse(rows=rows, fits=fits, csv="\n".join(csv_lines) + "\n", fit_csv=fit_csv)


@app.post("/experiments/run", response_model=ExperimentRunResponse)
def experiments_run(req: ExperimentRunRequest):
    try:
        config = req.config.to_core()
    except ParameterError as exc:
        raise _bad_request("invalid_config", str(exc))
    table = run_experiment(config, workers=req.workers, resume=req.resume)
    manifest = {
        "artifact_version": __version__,
        "config": config_to_dict(config),
        "master_seed": config.master_seed,
    }
    if config.output_path is not None:
        with open(manifest_path(config.output_path)) as fh:
            manifest = json.load(fh)
    return ExperimentRunResponse(
        rows=[ResultRowModel(**vars(r)) for r in table.rows],
        csv=table.to_csv(),
        manifest=manifest,
    )


@app.post("/distributions/check", response_model=DistCheckResponse)
def distributions_check(req: DistCheckRequest):
    try:
        spec = req.spec.to_core()
    except ParameterError as exc:
        raise _bad_request("invalid_spec", str(exc))
    if spec.sigma == 0.0:
        raise _bad_request("invalid_spec", "dist-check needs sigma > 0")
    rng = np.random.default_rng(req.seed)
    draw_spec = spec.with_sigma(spec.sigma * req.sample_scale)
    samples = np.asarray(sample(draw_spec, rng, req.samples))
    entries = []
    passed = True
    for t in req.t_values:
        emp, se = empirical_char_fn(samples, t)
        ref = float(char_fn(spec, t))
        n_se = abs(emp - ref) / se if se > 0 else float("inf")
        entries.append(DistCheckEntry(t=t, empirical=emp, analytic=ref, std_error=se, n_se=n_se))
        if n_se > req.threshold_se:
            passed = False
    return DistCheckResponse(entries=entries, passed=passed)


@app.get("/layout", response_model=LayoutResponse)
def layout():
    code = RotatedSurfaceCode()
    return LayoutResponse(
        text=code.layout_dump(),
        n_data=N_DATA,
        n_ancilla=N_ANCILLA,
        x_stabilizers=[list(s) for s in X_STABILIZERS],
        z_stabilizers=[list(s) for s in Z_STABILIZERS],
        logical_x=list(LOGICAL_X),
        logical_z=list(LOGICAL_Z),
        cnot_layers=[[list(g) for g in layer] for layer in CNOT_LAYERS],
    )
