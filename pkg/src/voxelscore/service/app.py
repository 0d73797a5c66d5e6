"""FastAPI app exposing the file-level pipelines.

Validation problems (bad formats, shape mismatches, missing files) map to
HTTP 400; anything unexpected bubbles up as 500. Endpoints are sync defs:
every job is CPU-bound and the service is a thin wrapper, not a scheduler.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .. import pipelines
from ..errors import InputError
from ..synth import SynthConfig
from .models import (
    AugmentRequest,
    AugmentResponse,
    CeilingRequest,
    CeilingResponse,
    DiffRequest,
    DiffResponse,
    LayersRequest,
    LayersResponse,
    RoiRequest,
    RoiResponse,
    ScoreRequest,
    ScoreResponse,
    SynthRequest,
    SynthResponse,
)


def _guard(fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except InputError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc


def create_app() -> FastAPI:
    app = FastAPI(title="voxelscore", version="0.1.0")

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.post("/score", response_model=ScoreResponse)
    def score(req: ScoreRequest):
        cfg = _guard(req.config.resolve)
        return _guard(
            pipelines.score_pipeline,
            req.transcript,
            req.features,
            req.bold_dir,
            req.out,
            cfg,
            req.per_subject,
        )

    @app.post("/ceiling", response_model=CeilingResponse)
    def ceiling(req: CeilingRequest):
        cfg = _guard(req.config.resolve)
        return _guard(pipelines.ceiling_pipeline, req.bold_dir, req.out, cfg)

    @app.post("/diff", response_model=DiffResponse)
    def diff(req: DiffRequest):
        cfg = _guard(req.config.resolve)
        return _guard(
            pipelines.diff_pipeline, req.map_a, req.map_b, req.mode, req.out, cfg
        )

    @app.post("/roi", response_model=RoiResponse)
    def roi(req: RoiRequest):
        return _guard(
            pipelines.roi_pipeline,
            req.maps,
            req.atlas,
            req.out,
            req.labels,
            req.level,
        )

    @app.post("/layers", response_model=LayersResponse)
    def layers(req: LayersRequest):
        cfg = _guard(req.config.resolve)
        return _guard(
            pipelines.layers_pipeline,
            req.transcript,
            req.features,
            req.bold_dir,
            req.atlas,
            req.out,
            cfg,
        )

    @app.post("/synth", response_model=SynthResponse)
    def synth(req: SynthRequest):
        scfg = _guard(
            SynthConfig,
            words=req.words,
            dims=req.dims,
            frames=req.frames,
            tr=req.tr,
            voxels=req.voxels,
            subjects=req.subjects,
            lags=req.lags,
            signal_scale=req.signal_scale,
            subject_noise=req.subject_noise,
            shared_noise=req.shared_noise,
            seed=req.seed,
        )
        return _guard(
            pipelines.synth_pipeline,
            req.out_dir,
            scfg,
            req.augment_dims,
            req.informative,
            req.mem_scale,
        )

    @app.post("/augment", response_model=AugmentResponse)
    def augment(req: AugmentRequest):
        return _guard(
            pipelines.augment_pipeline, req.transcript, req.annotations, req.out
        )

    return app
