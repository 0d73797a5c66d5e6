"""Voxelwise encoding scores.

brain_score fits per-voxel ridge models on FIR-expanded, frame-pooled
features and reports the Pearson correlation between held-out predictions
(concatenated across contiguous outer folds) and the measured BOLD series.
ceiling estimates per-voxel explainable correlation by split-half
agreement across subjects. memory_score and tuning_score compare two score
maps voxelwise (difference, and baseline-relative gain).

BOLD container layout (little-endian):

    magic   4 bytes  b"BOLD"
    version u32      1
    N       u64      frames
    v       u64      voxels
    tr      f64      seconds per frame
    t0      f64      time of first frame
    subject u16 length-prefixed UTF-8
    story   u16 length-prefixed UTF-8
    data    N*v float32, row-major
"""

from __future__ import annotations

import json
import os
import struct
from dataclasses import dataclass, field

import numpy as np

from .alignment import FrameTimeline, assign_words_to_frames, fir_expand, pool_by_frame
from .errors import InputError
from .features import FeatureMatrix, validate_pair
from .parallel import run_tasks
from .ridge import contiguous_folds, fit_ridge, predict

BOLD_MAGIC = b"BOLD"
BOLD_VERSION = 1
_BOLD_HEAD = struct.Struct("<4sIQQdd")

SCORE_KINDS = ("brain", "ceiling", "memory", "tuning")
# sanity bounds on stored scores, per kind; tuning gains are unbounded
_KIND_RANGE = {"brain": (-1.0, 1.0), "ceiling": (-1.0, 1.0), "memory": (-2.0, 2.0)}


@dataclass
class BoldRun:
    values: np.ndarray  # (frames, voxels) float64 in memory, float32 on disk
    timeline: FrameTimeline
    subject_id: str = ""
    story_id: str = ""

    def __post_init__(self):
        arr = np.ascontiguousarray(np.asarray(self.values, dtype=np.float64))
        if arr.ndim != 2:
            raise InputError(f"BOLD values must be 2-D, got shape {arr.shape}")
        if arr.shape[1] < 1:
            raise InputError("BOLD run has no voxels")
        if arr.shape[0] != self.timeline.frames:
            raise InputError(
                f"BOLD has {arr.shape[0]} frames but timeline declares "
                f"{self.timeline.frames}"
            )
        if not np.all(np.isfinite(arr)):
            raise InputError("BOLD values contain non-finite entries")
        self.values = arr

    @property
    def n_voxels(self) -> int:
        return self.values.shape[1]


def write_bold(run: BoldRun) -> bytes:
    sub = run.subject_id.encode("utf-8")
    story = run.story_id.encode("utf-8")
    if len(sub) > 0xFFFF or len(story) > 0xFFFF:
        raise InputError("subject/story id too long")
    head = _BOLD_HEAD.pack(
        BOLD_MAGIC,
        BOLD_VERSION,
        run.values.shape[0],
        run.values.shape[1],
        run.timeline.tr,
        run.timeline.t0,
    )
    return (
        head
        + struct.pack("<H", len(sub))
        + sub
        + struct.pack("<H", len(story))
        + story
        + run.values.astype(np.float32).tobytes()
    )


def _read_tagged(data: bytes, off: int, what: str) -> tuple[str, int]:
    if len(data) < off + 2:
        raise InputError(f"BOLD file truncated before {what}")
    (n,) = struct.unpack_from("<H", data, off)
    off += 2
    if len(data) < off + n:
        raise InputError(f"BOLD file truncated in {what}")
    try:
        return data[off : off + n].decode("utf-8"), off + n
    except UnicodeDecodeError:
        raise InputError(f"{what} is not valid UTF-8") from None


def read_bold(data: bytes) -> BoldRun:
    if len(data) < _BOLD_HEAD.size:
        raise InputError("BOLD file truncated in header")
    magic, version, n, v, tr, t0 = _BOLD_HEAD.unpack_from(data, 0)
    if magic != BOLD_MAGIC:
        raise InputError(f"bad BOLD magic {magic!r}, expected {BOLD_MAGIC!r}")
    if version != BOLD_VERSION:
        raise InputError(f"unsupported BOLD version {version}")
    subject, off = _read_tagged(data, _BOLD_HEAD.size, "subject id")
    story, off = _read_tagged(data, off, "story id")
    if n < 1 or v < 1:
        raise InputError(f"BOLD file declares empty shape ({n}, {v})")
    need = n * v * 4
    if len(data) - off != need:
        raise InputError(
            f"BOLD payload is {len(data) - off} bytes, expected {need} "
            f"for shape ({n}, {v})"
        )
    arr = np.frombuffer(data, dtype="<f4", count=n * v, offset=off)
    timeline = FrameTimeline(frames=n, tr=tr, t0=t0)
    return BoldRun(arr.reshape(n, v).astype(np.float64), timeline, subject, story)


def load_bold(path) -> BoldRun:
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read BOLD {path}: {exc}") from None
    return read_bold(data)


def save_bold(run: BoldRun, path):
    with open(path, "wb") as fh:
        fh.write(write_bold(run))


def _check_same_session(runs: list[BoldRun], what: str):
    if not runs:
        raise InputError(f"{what} needs at least one BOLD run")
    first = runs[0]
    for run in runs[1:]:
        if run.values.shape != first.values.shape:
            raise InputError(
                f"{what}: runs disagree on shape "
                f"({run.values.shape} vs {first.values.shape})"
            )
        if run.timeline != first.timeline:
            raise InputError(
                f"{what}: runs disagree on timeline "
                f"({run.timeline} vs {first.timeline})"
            )
        if run.story_id != first.story_id:
            raise InputError(
                f"{what}: runs are from different stories "
                f"({run.story_id!r} vs {first.story_id!r})"
            )


def average_subjects(runs: list[BoldRun]) -> BoldRun:
    """Frame-by-frame mean across subjects; shapes/timelines must match."""
    _check_same_session(runs, "averaging")
    mean = np.mean(np.stack([r.values for r in runs]), axis=0)
    return BoldRun(mean, runs[0].timeline, "group-mean", runs[0].story_id)


def pearson_columns(A, B) -> tuple[np.ndarray, np.ndarray]:
    """Columnwise Pearson r between two (n, v) arrays.

    Returns (r, defined). A column is undefined (r = NaN) when either side
    has zero variance. Identical non-constant columns return exactly 1.0;
    everything else is clipped to [-1, 1].
    """
    A = np.asarray(A, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    if A.shape != B.shape or A.ndim != 2:
        raise InputError(f"pearson needs matching 2-D arrays, got {A.shape} vs {B.shape}")
    if A.shape[0] < 2:
        raise InputError("pearson needs at least 2 rows")
    Ac = A - A.mean(axis=0)
    Bc = B - B.mean(axis=0)
    num = np.einsum("ij,ij->j", Ac, Bc)
    sa = np.einsum("ij,ij->j", Ac, Ac)
    sb = np.einsum("ij,ij->j", Bc, Bc)
    den = np.sqrt(sa * sb)
    defined = (sa > 0.0) & (sb > 0.0) & np.isfinite(den) & (den > 0.0)
    r = np.full(A.shape[1], np.nan)
    np.divide(num, den, out=r, where=defined)
    np.clip(r, -1.0, 1.0, out=r)
    same = np.all(A == B, axis=0) & defined
    if same.any():
        r[same] = 1.0
    return r, defined


def pearson(a, b) -> float:
    """Scalar Pearson r; NaN when either side is constant."""
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    if a.shape != b.shape:
        raise InputError(f"length mismatch: {a.shape[0]} vs {b.shape[0]}")
    r, _ = pearson_columns(a[:, None], b[:, None])
    return float(r[0])


@dataclass
class ScoreMap:
    per_voxel: np.ndarray  # (v,) float64, NaN where not defined
    defined: np.ndarray  # (v,) bool
    kind: str
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in SCORE_KINDS:
            raise InputError(f"unknown score kind {self.kind!r}")
        pv = np.asarray(self.per_voxel, dtype=np.float64).ravel()
        df = np.asarray(self.defined, dtype=bool).ravel()
        if pv.shape != df.shape:
            raise InputError("score/defined length mismatch")
        if pv.size < 1:
            raise InputError("score map is empty")
        if not np.all(np.isfinite(pv[df])):
            raise InputError("defined scores must be finite")
        lo_hi = _KIND_RANGE.get(self.kind)
        if lo_hi is not None and df.any():
            lo, hi = lo_hi
            if pv[df].min() < lo or pv[df].max() > hi:
                raise InputError(
                    f"{self.kind} scores must lie in [{lo}, {hi}]"
                )
        pv = pv.copy()
        pv[~df] = np.nan
        self.per_voxel = pv
        self.defined = df

    @property
    def n_voxels(self) -> int:
        return self.per_voxel.size

    def mean_defined(self) -> float | None:
        if not self.defined.any():
            return None
        return float(np.mean(self.per_voxel[self.defined]))


def build_design(fm: FeatureMatrix, transcript, timeline: FrameTimeline, k: int):
    """Assignment + pooling + FIR expansion for one feature/transcript pair."""
    validate_pair(fm, transcript)
    assignment = assign_words_to_frames(transcript.onsets(), timeline)
    pooled = pool_by_frame(fm.values, assignment, timeline)
    return fir_expand(pooled, k)


def _cross_validated_r(design, Y, cfg, outer_folds):
    folds = contiguous_folds(Y.shape[0], outer_folds)
    preds = np.empty_like(Y)
    mask_all = np.ones(Y.shape[0], dtype=bool)

    def run_fold(val):
        mask = mask_all.copy()
        mask[val] = False
        fit = fit_ridge(
            design[mask], Y[mask], cfg.grid(), cfg.inner_folds, cfg.seed
        )
        # Drop the fold intercept: each train mean anti-correlates with its
        # held-out fold mean, which biases the pooled r for null features
        # by about -1/sqrt(fold size). The linear part is unaffected.
        preds[val] = predict(fit, design[val]) - fit.intercepts

    run_tasks(run_fold, folds, cfg.workers)
    return pearson_columns(preds, Y)


def brain_score(fm: FeatureMatrix, transcript, bold: BoldRun, cfg,
                outer_folds: int | None = None) -> ScoreMap:
    """Held-out encoding score for one feature layer against one BOLD run.

    The run is usually the subject average; pass per-subject runs (with
    outer_folds=cfg.outer_folds_subject) for subject-level maps.
    """
    if outer_folds is None:
        outer_folds = cfg.outer_folds_pooled
    design = build_design(fm, transcript, bold.timeline, cfg.k)
    r, defined = _cross_validated_r(design.values, bold.values, cfg, outer_folds)
    return ScoreMap(
        r,
        defined,
        "brain",
        {
            "model_tag": fm.model_tag,
            "layer_id": fm.layer_id,
            "context_length": fm.context_length,
            "story_id": bold.story_id or transcript.story_id,
            "subject_id": bold.subject_id,
            "outer_folds": outer_folds,
        },
    )


def subject_scores(fm: FeatureMatrix, transcript, runs: list[BoldRun],
                   cfg) -> list[ScoreMap]:
    """Per-subject brain scores with the subject-level fold count."""
    _check_same_session(runs, "subject scoring")
    return [
        brain_score(fm, transcript, run, cfg, outer_folds=cfg.outer_folds_subject)
        for run in runs
    ]


def ceiling(runs: list[BoldRun], n_splits: int = 20, seed: int = 0,
            workers: int = 0) -> ScoreMap:
    """Split-half noise ceiling across subjects.

    For each of n_splits random splits, correlate the two half-group mean
    time series per voxel; report the mean r over splits. A voxel is
    defined only if every split is defined for it.
    """
    _check_same_session(runs, "ceiling")
    if len(runs) < 2:
        raise InputError("ceiling needs at least two subjects")
    if n_splits < 1:
        raise InputError(f"n_splits must be >= 1, got {n_splits}")
    stack = np.stack([r.values for r in runs])
    T = stack.shape[0]
    rng = np.random.default_rng(seed)
    # splits drawn up front so the stream never depends on worker timing
    halves = []
    for _ in range(n_splits):
        perm = rng.permutation(T)
        halves.append((perm[: T // 2], perm[T // 2 :]))

    def one_split(half):
        a, b = half
        return pearson_columns(stack[a].mean(axis=0), stack[b].mean(axis=0))

    results = run_tasks(one_split, halves, workers)
    rs = np.stack([r for r, _ in results])
    defined = np.logical_and.reduce([d for _, d in results])
    mean_r = np.mean(rs, axis=0)
    mean_r[~defined] = np.nan
    np.clip(mean_r, -1.0, 1.0, out=mean_r)
    return ScoreMap(
        mean_r,
        defined,
        "ceiling",
        {
            "story_id": runs[0].story_id,
            "n_subjects": T,
            "n_splits": n_splits,
        },
    )


def _check_comparable(a: ScoreMap, b: ScoreMap, what: str):
    if a.kind != "brain" or b.kind != "brain":
        raise InputError(f"{what} compares brain-score maps, got {a.kind}/{b.kind}")
    if a.n_voxels != b.n_voxels:
        raise InputError(
            f"{what}: maps have {a.n_voxels} vs {b.n_voxels} voxels"
        )
    sa = a.metadata.get("story_id")
    sb = b.metadata.get("story_id")
    if sa and sb and sa != sb:
        raise InputError(f"{what}: maps are from different stories ({sa!r} vs {sb!r})")


def memory_score(augmented: ScoreMap, base: ScoreMap) -> ScoreMap:
    """Voxelwise score gain of augmented features over base features."""
    _check_comparable(augmented, base, "memory score")
    defined = augmented.defined & base.defined
    diff = np.full(base.n_voxels, np.nan)
    diff[defined] = augmented.per_voxel[defined] - base.per_voxel[defined]
    meta = dict(augmented.metadata)
    meta["baseline_model_tag"] = base.metadata.get("model_tag")
    return ScoreMap(diff, defined, "memory", meta)


def tuning_score(tuned: ScoreMap, base: ScoreMap, eps: float = 0.01) -> ScoreMap:
    """Relative score gain of a tuned model over its base model.

    Voxels whose baseline magnitude is below eps are undefined; the ratio
    is meaningless there.
    """
    if not (eps > 0):
        raise InputError(f"eps must be > 0, got {eps!r}")
    _check_comparable(tuned, base, "tuning score")
    defined = tuned.defined & base.defined & (np.abs(base.per_voxel) >= eps)
    gain = np.full(base.n_voxels, np.nan)
    gain[defined] = (
        tuned.per_voxel[defined] - base.per_voxel[defined]
    ) / base.per_voxel[defined]
    meta = dict(tuned.metadata)
    meta["baseline_model_tag"] = base.metadata.get("model_tag")
    meta["eps"] = eps
    return ScoreMap(gain, defined, "tuning", meta)


def save_scoremap(sm: ScoreMap, csv_path, cfg=None):
    """CSV (voxel_index,score,defined) plus a .json sidecar next to it."""
    lines = ["voxel_index,score,defined"]
    for i in range(sm.n_voxels):
        lines.append(
            f"{i},{repr(float(sm.per_voxel[i]))},{int(sm.defined[i])}"
        )
    with open(csv_path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    sidecar = {
        "kind": sm.kind,
        "metadata": sm.metadata,
        "n_voxels": sm.n_voxels,
        "n_defined": int(sm.defined.sum()),
        "mean_defined_score": sm.mean_defined(),
        "config": cfg.sidecar_dict() if cfg is not None else None,
    }
    with open(sidecar_path(csv_path), "w", encoding="utf-8") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
        fh.write("\n")


def sidecar_path(csv_path) -> str:
    return os.path.splitext(os.fspath(csv_path))[0] + ".json"


def load_scoremap(csv_path) -> ScoreMap:
    try:
        with open(csv_path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise InputError(f"cannot read score map {csv_path}: {exc}") from None
    if not lines or lines[0] != "voxel_index,score,defined":
        raise InputError(f"{csv_path}: not a score map CSV")
    scores, defined = [], []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 3:
            raise InputError(f"{csv_path} line {lineno}: expected 3 fields")
        try:
            idx, score, flag = int(parts[0]), float(parts[1]), int(parts[2])
        except ValueError:
            raise InputError(f"{csv_path} line {lineno}: bad values") from None
        if idx != len(scores):
            raise InputError(
                f"{csv_path} line {lineno}: voxel_index {idx} out of order"
            )
        scores.append(score)
        defined.append(bool(flag))
    try:
        with open(sidecar_path(csv_path), "r", encoding="utf-8") as fh:
            sidecar = json.load(fh)
    except OSError as exc:
        raise InputError(
            f"score map sidecar missing for {csv_path}: {exc}"
        ) from None
    except json.JSONDecodeError as exc:
        raise InputError(f"bad score map sidecar for {csv_path}: {exc}") from None
    kind = sidecar.get("kind")
    meta = sidecar.get("metadata") or {}
    return ScoreMap(np.array(scores), np.array(defined), kind, meta)
