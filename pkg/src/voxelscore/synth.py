"""Synthetic datasets with analytically known scores.

The generator plants signal through the same pooling + FIR path the
scoring pipeline inverts: per-word features are drawn iid and exactly
column-centered (a leftover sample mean would let the word-count pattern
act as signal for arbitrary features), pooled onto the frame grid,
FIR-expanded with the configured lag count, and mixed with unit-norm true
weights; the resulting per-voxel signal is rescaled so its std over
frames is exactly signal_scale. Each subject sees

    Y_j = signal + shared_noise * eta_shared + subject_noise * eta_j

so the expected encoding score against the T-subject average is

    s / sqrt(s^2 + shared^2 + subject^2 / T)

and the expected split-half ceiling (halves of size T//2 and T - T//2) is

    (s^2 + shared^2) / sqrt((s^2 + shared^2 + subject^2/Ta)
                            * (s^2 + shared^2 + subject^2/Tb)).

RNG draw order is frozen: onsets, durations, sentence lengths, features,
true weights, [augmentation: latent rows, decoy rows, memory weights],
shared noise, then per-subject noise. Reordering draws silently changes
every downstream artifact, so treat the order as part of the format.

generate_augmented additionally inserts two zero-duration tokens at the
end of every sentence (through the real annotation-merge path) and gives
them extra_dims latent feature columns; the BOLD carries a second signal
component decodable only through those columns. Informative and decoy
variants draw identical BOLD; the decoy simply ships noise rows in place
of the latent rows, so score differences isolate feature content.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .alignment import FrameTimeline, assign_words_to_frames, fir_expand, pool_by_frame
from .errors import InputError
from .features import FeatureMatrix
from .roi import DEFAULT_ROI_LABELS, Atlas
from .scoring import BoldRun
from .stimulus import AugmentationRecord, Transcript, WordToken, merge_augmentation


@dataclass
class SynthConfig:
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

    def __post_init__(self):
        if self.words < 1 or self.dims < 1 or self.voxels < 1:
            raise InputError("words, dims and voxels must be >= 1")
        if self.frames < self.lags:
            raise InputError(
                f"frames ({self.frames}) must be >= lags ({self.lags})"
            )
        if self.lags < 1:
            raise InputError(f"lags must be >= 1, got {self.lags}")
        if self.subjects < 1:
            raise InputError(f"subjects must be >= 1, got {self.subjects}")
        if not (self.tr > 0):
            raise InputError(f"tr must be > 0, got {self.tr!r}")
        for name in ("signal_scale", "subject_noise", "shared_noise"):
            if getattr(self, name) < 0:
                raise InputError(f"{name} must be >= 0")


@dataclass
class GroundTruth:
    config: SynthConfig
    weights: np.ndarray  # (lags * dims, voxels), unit-norm columns pre-scaling
    expected_score: float
    expected_ceiling: float


@dataclass
class SynthData:
    transcript: Transcript
    features: FeatureMatrix
    runs: list[BoldRun]
    truth: GroundTruth

    @property
    def timeline(self) -> FrameTimeline:
        return self.runs[0].timeline


@dataclass
class AugmentedSynthData:
    base: SynthData
    records: list[AugmentationRecord]
    transcript: Transcript  # augmented
    features: FeatureMatrix  # (words + inserted, dims + extra_dims)
    extra_dims: int
    informative: bool
    mem_scale: float


def expected_score(cfg: SynthConfig) -> float:
    s2 = cfg.signal_scale**2
    den = s2 + cfg.shared_noise**2 + cfg.subject_noise**2 / cfg.subjects
    return float(cfg.signal_scale / np.sqrt(den)) if den > 0 else 0.0


def expected_ceiling(cfg: SynthConfig) -> float:
    if cfg.subjects < 2:
        return 0.0
    ta = cfg.subjects // 2
    tb = cfg.subjects - ta
    shared = cfg.signal_scale**2 + cfg.shared_noise**2
    den = (shared + cfg.subject_noise**2 / ta) * (shared + cfg.subject_noise**2 / tb)
    return float(shared / np.sqrt(den)) if den > 0 else 0.0


def _draw_transcript(cfg: SynthConfig, rng) -> Transcript:
    span = cfg.frames * cfg.tr
    onsets = np.sort(rng.uniform(0.0, span, cfg.words))
    durations = rng.uniform(0.05, 0.25, cfg.words)
    # sentence lengths: 6..12 words; keeps offsets clear of the next onset
    sentence_ids = np.empty(cfg.words, dtype=np.int64)
    filled = 0
    sid = 0
    while filled < cfg.words:
        length = int(rng.integers(6, 13))
        sentence_ids[filled : filled + length] = sid
        filled += length
        sid += 1
    tokens = []
    for i in range(cfg.words):
        onset = float(onsets[i])
        offset = onset + float(durations[i])
        if i + 1 < cfg.words:
            offset = min(offset, float(onsets[i + 1]))
        tokens.append(WordToken(f"w{i:05d}", onset, offset, int(sentence_ids[i])))
    return Transcript(tuple(tokens), story_id=f"synth-{cfg.seed}")


def _planted_signal(pooled_design, weights, scale) -> np.ndarray:
    """Mix design with unit-norm weights, rescale columns to std `scale`."""
    raw = pooled_design @ weights
    stds = raw.std(axis=0)
    stds[stds == 0.0] = 1.0
    return raw * (scale / stds)


def generate(cfg: SynthConfig) -> SynthData:
    """Base dataset: transcript, per-word features, per-subject BOLD."""
    rng = np.random.default_rng(cfg.seed)
    transcript = _draw_transcript(cfg, rng)
    # Exact column centering: with a nonzero sample mean, the word-count /
    # empty-frame pattern becomes a shared regressor that any same-shape
    # feature matrix can exploit, biasing null scores upward.
    feats = rng.standard_normal((cfg.words, cfg.dims))
    feats -= feats.mean(axis=0)
    fm = FeatureMatrix(
        feats.astype(np.float32), layer_id=1, model_tag="synth-base",
        context_length=0,
    )
    weights = rng.standard_normal((cfg.lags * cfg.dims, cfg.voxels))
    weights /= np.linalg.norm(weights, axis=0)
    timeline = FrameTimeline(cfg.frames, cfg.tr, 0.0)
    assignment = assign_words_to_frames(transcript.onsets(), timeline)
    design = fir_expand(pool_by_frame(fm.values, assignment, timeline), cfg.lags)
    signal = _planted_signal(design.values, weights, cfg.signal_scale)
    shared = cfg.shared_noise * rng.standard_normal((cfg.frames, cfg.voxels))
    runs = []
    for j in range(cfg.subjects):
        noise = cfg.subject_noise * rng.standard_normal((cfg.frames, cfg.voxels))
        values = signal + shared + noise
        runs.append(
            BoldRun(values, timeline, f"sub-{j:02d}", transcript.story_id)
        )
    truth = GroundTruth(cfg, weights, expected_score(cfg), expected_ceiling(cfg))
    return SynthData(transcript, fm, runs, truth)


def _augment_records(transcript: Transcript) -> list[AugmentationRecord]:
    sids = sorted({tok.sentence_id for tok in transcript.tokens})
    return [
        AugmentationRecord(sid, "word", f"m{sid:04d}a m{sid:04d}b")
        for sid in sids
    ]


def generate_augmented(cfg: SynthConfig, extra_dims: int,
                       informative: bool = True,
                       mem_scale: float | None = None) -> AugmentedSynthData:
    """Dataset whose BOLD hides a component only augmented features explain.

    The base feature matrix explains the primary signal; the augmented
    matrix (extra latent columns on inserted end-of-sentence tokens)
    additionally explains a memory component of std mem_scale (default
    0.7 * signal_scale). With extra_dims=0 the augmented features equal
    the base features exactly. informative=False replaces the latent rows
    with fresh noise while keeping the BOLD identical.
    """
    if extra_dims < 0:
        raise InputError(f"extra_dims must be >= 0, got {extra_dims}")
    if mem_scale is None:
        mem_scale = 0.7 * cfg.signal_scale
    if mem_scale < 0:
        raise InputError(f"mem_scale must be >= 0, got {mem_scale!r}")
    rng = np.random.default_rng(cfg.seed)
    transcript = _draw_transcript(cfg, rng)
    feats = rng.standard_normal((cfg.words, cfg.dims))
    feats -= feats.mean(axis=0)  # see generate(): kills occupancy leakage
    weights = rng.standard_normal((cfg.lags * cfg.dims, cfg.voxels))
    weights /= np.linalg.norm(weights, axis=0)
    timeline = FrameTimeline(cfg.frames, cfg.tr, 0.0)
    assignment = assign_words_to_frames(transcript.onsets(), timeline)
    base_design = fir_expand(
        pool_by_frame(feats, assignment, timeline), cfg.lags
    )
    signal = _planted_signal(base_design.values, weights, cfg.signal_scale)

    if extra_dims > 0:
        records = _augment_records(transcript)
        merged = merge_augmentation(transcript, records)
        n_inserted = len(merged) - len(transcript)
        inserted = np.zeros(len(merged), dtype=bool)
        orig = 0
        for i, tok in enumerate(merged.tokens):
            if orig < len(transcript) and tok == transcript.tokens[orig]:
                orig += 1
            else:
                inserted[i] = True
        latent = rng.standard_normal((n_inserted, extra_dims))
        latent -= latent.mean(axis=0)
        decoy = rng.standard_normal((n_inserted, extra_dims))
        decoy -= decoy.mean(axis=0)
        mem_weights = rng.standard_normal((cfg.lags * extra_dims, cfg.voxels))
        mem_weights /= np.linalg.norm(mem_weights, axis=0)
        extra = np.zeros((len(merged), extra_dims))
        extra[inserted] = latent
        mem_assignment = assign_words_to_frames(merged.onsets(), timeline)
        mem_design = fir_expand(
            pool_by_frame(extra, mem_assignment, timeline), cfg.lags
        )
        mem_signal = _planted_signal(mem_design.values, mem_weights, mem_scale)
        full = np.zeros((len(merged), cfg.dims + extra_dims))
        full[~inserted, : cfg.dims] = feats
        full[inserted, cfg.dims :] = latent if informative else decoy
        mem_fm = FeatureMatrix(
            full.astype(np.float32), layer_id=1,
            model_tag="synth-augmented", context_length=0,
        )
        mem_transcript = merged
    else:
        records = []
        mem_signal = 0.0
        mem_fm = FeatureMatrix(
            feats.astype(np.float32), layer_id=1, model_tag="synth-augmented",
            context_length=0,
        )
        mem_transcript = transcript

    shared = cfg.shared_noise * rng.standard_normal((cfg.frames, cfg.voxels))
    runs = []
    for j in range(cfg.subjects):
        noise = cfg.subject_noise * rng.standard_normal((cfg.frames, cfg.voxels))
        runs.append(
            BoldRun(
                signal + mem_signal + shared + noise,
                timeline,
                f"sub-{j:02d}",
                transcript.story_id,
            )
        )
    base_fm = FeatureMatrix(
        feats.astype(np.float32), layer_id=1, model_tag="synth-base",
        context_length=0,
    )
    truth = GroundTruth(cfg, weights, expected_score(cfg), expected_ceiling(cfg))
    base = SynthData(transcript, base_fm, runs, truth)
    return AugmentedSynthData(
        base, records, mem_transcript, mem_fm, extra_dims, informative,
        float(mem_scale),
    )


def synthetic_atlas(n_voxels: int, labels=DEFAULT_ROI_LABELS) -> Atlas:
    """Deterministic full-coverage atlas: left half L, right half R,
    labels cycling."""
    if n_voxels < 1:
        raise InputError(f"n_voxels must be >= 1, got {n_voxels}")
    entries = {
        voxel: ("L" if voxel < n_voxels // 2 else "R", labels[voxel % len(labels)])
        for voxel in range(n_voxels)
    }
    return Atlas(entries)


def truth_to_dict(truth: GroundTruth, max_weight_elems: int = 65536) -> dict:
    cfg = truth.config
    out = {
        "config": {
            "words": cfg.words,
            "dims": cfg.dims,
            "frames": cfg.frames,
            "tr": cfg.tr,
            "voxels": cfg.voxels,
            "subjects": cfg.subjects,
            "lags": cfg.lags,
            "signal_scale": cfg.signal_scale,
            "subject_noise": cfg.subject_noise,
            "shared_noise": cfg.shared_noise,
            "seed": cfg.seed,
        },
        "expected_score": truth.expected_score,
        "expected_ceiling": truth.expected_ceiling,
    }
    if truth.weights.size <= max_weight_elems:
        out["weights"] = [[float(x) for x in row] for row in truth.weights]
    return out
