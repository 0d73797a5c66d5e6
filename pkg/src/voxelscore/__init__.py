"""Voxelwise encoding models for language-model features against fMRI.

Core flow: transcript + per-word features -> frame-aligned FIR design ->
per-voxel cross-validated ridge -> Pearson score maps; plus split-half
noise ceilings, augmentation/tuning contrasts, ROI aggregation, and a
synthetic benchmark generator with analytically known scores.
"""

from .alignment import (
    DesignMatrix,
    FrameTimeline,
    assign_words_to_frames,
    fir_expand,
    pool_by_frame,
)
from .config import RunConfig, resolve_config
from .errors import ComputeError, InputError, VoxelscoreError
from .features import (
    FeatureMatrix,
    load_features,
    read_features,
    save_features,
    validate_pair,
    write_features,
)
from .ridge import (
    PenaltyGrid,
    RidgeFit,
    closed_form_oracle,
    contiguous_folds,
    default_grid,
    fit_ridge,
    predict,
    sweep_weights,
)
from .roi import Atlas, load_atlas, parse_atlas, roi_ci, roi_mean, save_atlas
from .scoring import (
    BoldRun,
    ScoreMap,
    average_subjects,
    brain_score,
    ceiling,
    load_bold,
    load_scoremap,
    memory_score,
    pearson,
    pearson_columns,
    save_bold,
    save_scoremap,
    subject_scores,
    tuning_score,
)
from .stimulus import (
    AugmentationRecord,
    Transcript,
    WordToken,
    load_transcript,
    merge_augmentation,
    parse_annotations,
    parse_transcript,
    save_transcript,
    write_transcript,
)
from .synth import (
    AugmentedSynthData,
    SynthConfig,
    SynthData,
    expected_ceiling,
    expected_score,
    generate,
    generate_augmented,
    synthetic_atlas,
)

__version__ = "0.1.0"
