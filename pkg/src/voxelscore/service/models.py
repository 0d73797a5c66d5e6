"""Request/response models for the scoring service.

Requests carry filesystem paths, not payloads: the service runs next to
the data (the CLI hosts it in-process by default), and score matrices are
far too large to be pleasant JSON.
"""

from __future__ import annotations

from pydantic import BaseModel, Field

from ..config import RunConfig, resolve_config


class ConfigModel(BaseModel):
    k: int | None = None
    penalty_grid: list[float] | None = None
    outer_folds_pooled: int | None = None
    outer_folds_subject: int | None = None
    inner_folds: int | None = None
    eps: float | None = None
    n_ceiling_splits: int | None = None
    seed: int | None = None
    workers: int | None = None

    def resolve(self) -> RunConfig:
        values = {k: v for k, v in self.model_dump().items() if v is not None}
        if "penalty_grid" in values:
            values["penalty_grid"] = tuple(values["penalty_grid"])
        return resolve_config(overrides=values)


class ScoreRequest(BaseModel):
    transcript: str
    features: str
    bold_dir: str
    out: str
    per_subject: bool = False
    config: ConfigModel = Field(default_factory=ConfigModel)


class ScoreResponse(BaseModel):
    pooled_csv: str
    pooled_sidecar: str
    subject_csvs: list[str]
    n_subjects: int
    n_voxels: int
    n_defined: int
    mean_score: float | None


class CeilingRequest(BaseModel):
    bold_dir: str
    out: str
    config: ConfigModel = Field(default_factory=ConfigModel)


class MapSummary(BaseModel):
    csv: str
    sidecar: str
    n_voxels: int
    n_defined: int
    mean_score: float | None


class CeilingResponse(MapSummary):
    n_subjects: int


class DiffRequest(BaseModel):
    map_a: str
    map_b: str
    mode: str  # "memory" or "tuning"
    out: str
    config: ConfigModel = Field(default_factory=ConfigModel)


class DiffResponse(MapSummary):
    mode: str


class RoiRequest(BaseModel):
    maps: list[str]
    atlas: str
    out: str
    labels: str | None = None  # path to a labels file, one label per line
    level: float = 0.95


class RoiResponse(BaseModel):
    csv: str
    n_maps: int
    n_cells: int


class LayersRequest(BaseModel):
    transcript: str
    features: list[str]
    bold_dir: str
    atlas: str
    out: str
    config: ConfigModel = Field(default_factory=ConfigModel)


class LayerRow(BaseModel):
    layer_id: int
    hemisphere: str
    mean_score: float | None


class LayersResponse(BaseModel):
    csv: str
    rows: list[LayerRow]
    n_layers: int


class SynthRequest(BaseModel):
    out_dir: str
    words: int = 1200
    dims: int = 12
    frames: int = 600
    tr: float = 1.5
    voxels: int = 120
    subjects: int = 4
    lags: int = 5
    signal_scale: float = 1.0
    subject_noise: float = 1.0
    shared_noise: float = 0.0
    seed: int = 0
    augment_dims: int = 0
    informative: bool = True
    mem_scale: float | None = None


class SynthResponse(BaseModel):
    transcript: str
    features: str
    bold_dir: str
    bold: list[str]
    atlas: str
    truth: str
    expected_score: float
    expected_ceiling: float
    annotations: str | None = None
    transcript_augmented: str | None = None
    features_augmented: str | None = None


class AugmentRequest(BaseModel):
    transcript: str
    annotations: str
    out: str


class AugmentResponse(BaseModel):
    transcript: str
    n_tokens_in: int
    n_records: int
    n_tokens_out: int
