"""FastAPI service exposing the check / design / density / sample / reconstruct / report pipeline.

The handler functions are plain request-model -> response-model calls so the
CLI can drive them in-process; the FastAPI app is a thin routing layer over
them.  Run with `uvicorn trajsamp.service:app`.
"""

from __future__ import annotations

import numpy as np
from fastapi import FastAPI, HTTPException

from . import __version__
from .design import (optimal_hyperplane_set, optimal_uniform_2d,
                     optimal_uniform_d)
from .errors import ReconstructionImpossible, TrajsampError
from .field import make_field, reconstruct_and_error, sample_on_set
from .nyquist import check as nyquist_check
from .schemas import (CheckRequest, CheckResponse, DensityRequest,
                      DensityResponse, DesignRequest, DesignResponse,
                      FieldModel, ReconstructRequest, ReconstructResponse,
                      ReportRequest, ReportResponse, ReportRow, SampleRequest,
                      SampleResponse, VerdictModel, batch_to_csv,
                      design_to_response, from_set, report_to_csv, to_set,
                      with_spacing)
from .trajectory import density as set_density
from .trajectory import sample_points, spacing_scale


def handle_check(req: CheckRequest) -> CheckResponse:
    omega = req.omega.to_body()
    s = to_set(req.set)
    verdict = nyquist_check(s, omega)
    return CheckResponse(verdict=VerdictModel.from_verdict(verdict),
                         exit_code=verdict.exit_code)


def handle_design(req: DesignRequest) -> DesignResponse:
    omega = req.omega.to_body()
    if req.mode == "uniform_2d":
        result = optimal_uniform_2d(omega, req.epsilon)
    elif req.mode == "hyperplane":
        result = optimal_hyperplane_set(omega, req.epsilon)
    elif req.mode == "uniform_d_closed_form":
        result = optimal_uniform_d(omega, req.epsilon, search="closed_form")
    else:
        result = optimal_uniform_d(omega, req.epsilon, search="orientation_grid",
                                   k_orientations=req.k_orientations)
    return design_to_response(result)


def handle_density(req: DensityRequest) -> DensityResponse:
    return DensityResponse(density=set_density(to_set(req.set)))


def handle_sample(req: SampleRequest) -> SampleResponse:
    s = to_set(req.set)
    window = req.window.to_window()
    if req.field is not None or req.field_spec is not None:
        if req.omega is None:
            raise ValueError("sampling field values needs omega")
        omega = req.omega.to_body()
        if req.field is not None:
            fld = req.field.to_field(omega)
        else:
            spec = req.field_spec
            fld = make_field(omega, spec.n_atoms, spec.margin, spec.seed)
        batch = sample_on_set(fld, s, window, req.eps)
    else:
        batch = sample_points(s, window, req.eps)
    return SampleResponse(n_points=len(batch), csv=batch_to_csv(batch))


def handle_reconstruct(req: ReconstructRequest) -> ReconstructResponse:
    omega = req.omega.to_body()
    s = to_set(req.set)
    window = req.window.to_window()
    if req.field is not None:
        fld = req.field.to_field(omega)
    else:
        spec = req.field_spec
        fld = make_field(omega, spec.n_atoms, spec.margin, spec.seed)
    batch = sample_on_set(fld, s, window, req.eps)
    report = reconstruct_and_error(fld, s, window, req.eps,
                                   probe_per_axis=req.probe_per_axis)
    return ReconstructResponse(
        sup_error=report.sup_error,
        rms_error=report.rms_error,
        certified=report.certified,
        verdict_status=report.verdict_status,
        estimate=FieldModel.from_field(report.estimate),
        n_samples=len(batch),
        samples_csv=batch_to_csv(batch),
    )


def handle_report(req: ReportRequest) -> ReportResponse:
    omega = req.omega.to_body()
    base = to_set(req.set)
    sweep = req.sweep
    if sweep.steps < 2:
        raise ValueError("sweep needs at least two steps")
    values = np.linspace(sweep.start, sweep.stop, sweep.steps)
    rows = []
    for val in values:  # endpoints included; thresholds land deterministically
        s = with_spacing(base, float(val))
        verdict = nyquist_check(s, omega)
        rows.append(ReportRow(delta=float(spacing_scale(s)),
                              status=verdict.status,
                              density=set_density(s)))
    return ReportResponse(rows=rows, csv=report_to_csv(rows))


app = FastAPI(title="trajsamp", version=__version__,
              description="Sampling trajectory design and certification "
                          "for bandlimited fields")


def _wrap(handler, req):
    try:
        return handler(req)
    except ReconstructionImpossible as exc:
        witness = None if exc.witness is None else np.asarray(exc.witness).tolist()
        raise HTTPException(status_code=422,
                            detail={"error": "reconstruction_impossible",
                                    "message": str(exc),
                                    "witness": witness})
    except (TrajsampError, ValueError, TypeError) as exc:
        raise HTTPException(status_code=422,
                            detail={"error": type(exc).__name__,
                                    "message": str(exc)})


@app.get("/healthz")
def healthz():
    return {"status": "ok", "version": __version__}


@app.post("/check", response_model=CheckResponse)
def check_endpoint(req: CheckRequest):
    return _wrap(handle_check, req)


@app.post("/design", response_model=DesignResponse)
def design_endpoint(req: DesignRequest):
    return _wrap(handle_design, req)


@app.post("/density", response_model=DensityResponse)
def density_endpoint(req: DensityRequest):
    return _wrap(handle_density, req)


@app.post("/sample", response_model=SampleResponse)
def sample_endpoint(req: SampleRequest):
    return _wrap(handle_sample, req)


@app.post("/reconstruct", response_model=ReconstructResponse)
def reconstruct_endpoint(req: ReconstructRequest):
    return _wrap(handle_reconstruct, req)


@app.post("/report", response_model=ReportResponse)
def report_endpoint(req: ReportRequest):
    return _wrap(handle_report, req)
