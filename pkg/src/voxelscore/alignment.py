"""Temporal alignment of word features to scan frames.

Three steps turn per-word features into a per-frame design matrix:

1. assign each word to the frame whose acquisition time is nearest its
   onset (earlier frame wins ties);
2. average the features of the words assigned to each frame (frames with
   no words become zero rows);
3. expand with k FIR delay copies so the regression can learn a
   hemodynamic response shape, zero-filling before the first frame.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError


@dataclass(frozen=True)
class FrameTimeline:
    """Acquisition grid: `frames` volumes at `t0 + i*tr` seconds."""

    frames: int
    tr: float
    t0: float = 0.0

    def __post_init__(self):
        if self.frames < 1:
            raise InputError(f"timeline needs at least one frame, got {self.frames}")
        if not (self.tr > 0) or not np.isfinite(self.tr):
            raise InputError(f"tr must be positive and finite, got {self.tr!r}")
        if not np.isfinite(self.t0):
            raise InputError(f"t0 must be finite, got {self.t0!r}")

    def frame_times(self) -> np.ndarray:
        return self.t0 + np.arange(self.frames, dtype=np.float64) * self.tr


@dataclass
class DesignMatrix:
    """FIR-expanded per-frame design: values is (frames, lags * dim)."""

    values: np.ndarray
    lags: int

    @property
    def frames(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]


def assign_words_to_frames(onsets, timeline: FrameTimeline) -> np.ndarray:
    """Nearest-frame index for each onset; earlier frame wins exact ties.

    Onsets must be nondecreasing. Onsets outside the scan window clamp to
    the first/last frame. Returns int64 indices, nondecreasing.
    """
    t = np.asarray(onsets, dtype=np.float64)
    if t.ndim != 1:
        raise InputError("onsets must be a 1-D sequence")
    if t.size == 0:
        raise InputError("no onsets to assign")
    if not np.all(np.isfinite(t)):
        raise InputError("onsets contain non-finite values")
    if np.any(np.diff(t) < 0):
        raise InputError("onsets must be nondecreasing")
    times = timeline.frame_times()
    u = np.floor((t - timeline.t0) / timeline.tr).astype(np.int64)
    # candidates bracket the onset; comparing actual distances (not the
    # fractional part) keeps float knife-edge cases honest
    cand = np.stack([u - 1, u, u + 1], axis=1)
    np.clip(cand, 0, timeline.frames - 1, out=cand)
    dist = np.abs(times[cand] - t[:, None])
    pick = np.argmin(dist, axis=1)  # first minimum -> earlier frame on ties
    return cand[np.arange(t.size), pick]


def pool_by_frame(values, assignment, timeline: FrameTimeline) -> np.ndarray:
    """Mean of word features per assigned frame; empty frames are zero rows.

    Returns (frames, dim) float64.
    """
    feats = np.asarray(values, dtype=np.float64)
    if feats.ndim != 2:
        raise InputError("pooling expects a 2-D feature array")
    idx = np.asarray(assignment, dtype=np.int64)
    if idx.shape != (feats.shape[0],):
        raise InputError(
            f"assignment length {idx.shape} does not match "
            f"{feats.shape[0]} feature rows"
        )
    if idx.size and (idx.min() < 0 or idx.max() >= timeline.frames):
        raise InputError("assignment contains out-of-range frame indices")
    pooled = np.zeros((timeline.frames, feats.shape[1]), dtype=np.float64)
    np.add.at(pooled, idx, feats)
    counts = np.bincount(idx, minlength=timeline.frames).astype(np.float64)
    nonzero = counts > 0
    pooled[nonzero] /= counts[nonzero, None]
    return pooled


def fir_expand(pooled, lags: int) -> DesignMatrix:
    """Concatenate `lags` delayed copies of the pooled features.

    Column block j holds the features delayed by j frames, zero-filled at
    the start, so row t sees frames t, t-1, ..., t-lags+1.
    """
    arr = np.asarray(pooled, dtype=np.float64)
    if arr.ndim != 2:
        raise InputError("FIR expansion expects a 2-D array")
    n, d = arr.shape
    if lags < 1:
        raise InputError(f"lag count must be >= 1, got {lags}")
    if lags > n:
        raise InputError(f"lag count {lags} exceeds frame count {n}")
    out = np.zeros((n, lags * d), dtype=np.float64)
    for j in range(lags):
        out[j:, j * d : (j + 1) * d] = arr[: n - j]
    return DesignMatrix(out, lags)
