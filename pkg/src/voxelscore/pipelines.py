"""File-level pipelines: read inputs, run the core ops, write artifacts.

Each function returns a small JSON-friendly summary dict; the service
endpoints expose these one-to-one, and the CLI renders them. All artifact
writing is single-threaded per file and timestamp-free so byte-identical
reruns hold.
"""

from __future__ import annotations

import glob
import json
import os
import re

import numpy as np

from .config import RunConfig
from .errors import InputError
from .features import load_features, save_features
from .roi import load_atlas, roi_ci, roi_mean, save_atlas, save_roi_table
from .scoring import (
    BoldRun,
    average_subjects,
    brain_score,
    ceiling,
    load_bold,
    load_scoremap,
    memory_score,
    save_bold,
    save_scoremap,
    sidecar_path,
    subject_scores,
    tuning_score,
)
from .stimulus import (
    load_annotations,
    load_transcript,
    merge_augmentation,
    save_transcript,
    write_transcript,
)
from .synth import (
    SynthConfig,
    generate,
    generate_augmented,
    synthetic_atlas,
    truth_to_dict,
)

ANNOTATION_TSV = "annotations.tsv"


def load_bold_dir(bold_dir) -> list[BoldRun]:
    """All *.bold files in a directory, sorted by filename."""
    if not os.path.isdir(bold_dir):
        raise InputError(f"not a directory: {bold_dir}")
    paths = sorted(glob.glob(os.path.join(os.fspath(bold_dir), "*.bold")))
    if not paths:
        raise InputError(f"no .bold files in {bold_dir}")
    runs = [load_bold(p) for p in paths]
    ids = [r.subject_id for r in runs]
    if len(set(ids)) != len(ids):
        raise InputError(f"duplicate subject ids in {bold_dir}: {sorted(ids)}")
    return runs


def _subject_csv_path(out_csv, subject_id: str, index: int, seen: set) -> str:
    stem, ext = os.path.splitext(os.fspath(out_csv))
    safe = re.sub(r"[^A-Za-z0-9_.-]", "_", subject_id) or f"subject{index:02d}"
    if safe in seen:
        safe = f"{safe}-{index}"
    seen.add(safe)
    return f"{stem}.{safe}{ext or '.csv'}"


def score_pipeline(transcript_path, features_path, bold_dir, out_csv,
                   cfg: RunConfig, per_subject: bool = False) -> dict:
    transcript = load_transcript(transcript_path)
    fm = load_features(features_path)
    runs = load_bold_dir(bold_dir)
    averaged = average_subjects(runs)
    pooled = brain_score(fm, transcript, averaged, cfg)
    save_scoremap(pooled, out_csv, cfg)
    subject_csvs = []
    if per_subject:
        seen: set = set()
        for i, sm in enumerate(subject_scores(fm, transcript, runs, cfg)):
            path = _subject_csv_path(out_csv, runs[i].subject_id, i, seen)
            save_scoremap(sm, path, cfg)
            subject_csvs.append(path)
    return {
        "pooled_csv": os.fspath(out_csv),
        "pooled_sidecar": sidecar_path(out_csv),
        "subject_csvs": subject_csvs,
        "n_subjects": len(runs),
        "n_voxels": pooled.n_voxels,
        "n_defined": int(pooled.defined.sum()),
        "mean_score": pooled.mean_defined(),
    }


def ceiling_pipeline(bold_dir, out_csv, cfg: RunConfig) -> dict:
    runs = load_bold_dir(bold_dir)
    sm = ceiling(runs, cfg.n_ceiling_splits, cfg.seed, cfg.workers)
    save_scoremap(sm, out_csv, cfg)
    return {
        "csv": os.fspath(out_csv),
        "sidecar": sidecar_path(out_csv),
        "n_subjects": len(runs),
        "n_voxels": sm.n_voxels,
        "n_defined": int(sm.defined.sum()),
        "mean_score": sm.mean_defined(),
    }


def diff_pipeline(map_a_path, map_b_path, mode: str, out_csv,
                  cfg: RunConfig) -> dict:
    """mode 'memory': A - B. mode 'tuning': (A - B) / B with |B| >= eps."""
    if mode not in ("memory", "tuning"):
        raise InputError(f"diff mode must be 'memory' or 'tuning', got {mode!r}")
    a = load_scoremap(map_a_path)
    b = load_scoremap(map_b_path)
    if mode == "memory":
        sm = memory_score(a, b)
    else:
        sm = tuning_score(a, b, cfg.eps)
    save_scoremap(sm, out_csv, cfg)
    return {
        "csv": os.fspath(out_csv),
        "sidecar": sidecar_path(out_csv),
        "mode": mode,
        "n_voxels": sm.n_voxels,
        "n_defined": int(sm.defined.sum()),
        "mean_score": sm.mean_defined(),
    }


def _load_labels_file(path) -> list[str]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read labels {path}: {exc}") from None
    labels = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            labels.append(line)
    if not labels:
        raise InputError(f"labels file {path} lists no labels")
    return labels


def roi_pipeline(map_paths: list, atlas_path, out_csv, labels_path=None,
                 level: float = 0.95) -> dict:
    if not map_paths:
        raise InputError("roi needs at least one score map")
    maps = [load_scoremap(p) for p in map_paths]
    atlas = load_atlas(atlas_path)
    labels = _load_labels_file(labels_path) if labels_path else None
    if len(maps) == 1:
        rows = roi_mean(maps[0], atlas, labels)
    else:
        rows = roi_ci(maps, atlas, labels, level)
    save_roi_table(rows, out_csv)
    return {
        "csv": os.fspath(out_csv),
        "n_maps": len(maps),
        "n_cells": len(rows),
    }


def layers_pipeline(transcript_path, features_paths: list, bold_dir,
                    atlas_path, out_csv, cfg: RunConfig) -> dict:
    if not features_paths:
        raise InputError("layers needs at least one feature file")
    transcript = load_transcript(transcript_path)
    fms = [load_features(p) for p in features_paths]
    seen_layers: dict[int, str] = {}
    for path, fm in zip(features_paths, fms):
        if fm.layer_id in seen_layers:
            raise InputError(
                f"duplicate layer_id {fm.layer_id} in {path} and "
                f"{seen_layers[fm.layer_id]}"
            )
        seen_layers[fm.layer_id] = os.fspath(path)
    runs = load_bold_dir(bold_dir)
    averaged = average_subjects(runs)
    atlas = load_atlas(atlas_path)
    n_vox = averaged.n_voxels
    hemi_voxels = {
        hemi: np.array(
            sorted(v for v, (h, _) in atlas.entries.items() if h == hemi),
            dtype=np.int64,
        )
        for hemi in ("L", "R")
    }
    fms.sort(key=lambda fm: fm.layer_id)
    lines = ["layer_id,hemisphere,mean_score"]
    summary_rows = []
    for fm in fms:
        sm = brain_score(fm, transcript, averaged, cfg)
        if sm.n_voxels != n_vox:
            raise InputError("layer maps disagree on voxel count")
        for hemi in ("L", "R"):
            vox = hemi_voxels[hemi]
            use = vox[sm.defined[vox]] if vox.size else vox
            mean = float(np.mean(sm.per_voxel[use])) if use.size else None
            lines.append(
                f"{fm.layer_id},{hemi},{'' if mean is None else repr(mean)}"
            )
            summary_rows.append(
                {"layer_id": fm.layer_id, "hemisphere": hemi, "mean_score": mean}
            )
    with open(out_csv, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    return {
        "csv": os.fspath(out_csv),
        "rows": summary_rows,
        "n_layers": len(fms),
    }


def synth_pipeline(out_dir, scfg: SynthConfig, augment_dims: int = 0,
                   informative: bool = True,
                   mem_scale: float | None = None) -> dict:
    os.makedirs(out_dir, exist_ok=True)
    bold_dir = os.path.join(os.fspath(out_dir), "bold")
    os.makedirs(bold_dir, exist_ok=True)
    if augment_dims > 0:
        aug = generate_augmented(scfg, augment_dims, informative, mem_scale)
        data = aug.base
    else:
        aug = None
        data = generate(scfg)
    transcript_path = os.path.join(os.fspath(out_dir), "transcript.tsv")
    features_path = os.path.join(os.fspath(out_dir), "features.feat")
    atlas_path = os.path.join(os.fspath(out_dir), "atlas.tsv")
    truth_path = os.path.join(os.fspath(out_dir), "truth.json")
    save_transcript(data.transcript, transcript_path)
    save_features(data.features, features_path)
    bold_paths = []
    for run in data.runs:
        path = os.path.join(bold_dir, f"{run.subject_id}.bold")
        save_bold(run, path)
        bold_paths.append(path)
    save_atlas(synthetic_atlas(scfg.voxels), atlas_path)
    truth = truth_to_dict(data.truth)
    out = {
        "transcript": transcript_path,
        "features": features_path,
        "bold_dir": bold_dir,
        "bold": bold_paths,
        "atlas": atlas_path,
        "truth": truth_path,
        "expected_score": data.truth.expected_score,
        "expected_ceiling": data.truth.expected_ceiling,
    }
    if aug is not None:
        annotations_path = os.path.join(os.fspath(out_dir), ANNOTATION_TSV)
        aug_transcript_path = os.path.join(
            os.fspath(out_dir), "transcript_augmented.tsv"
        )
        aug_features_path = os.path.join(
            os.fspath(out_dir), "features_augmented.feat"
        )
        _save_annotations(aug.records, annotations_path)
        save_transcript(aug.transcript, aug_transcript_path)
        save_features(aug.features, aug_features_path)
        truth["augmentation"] = {
            "extra_dims": aug.extra_dims,
            "informative": aug.informative,
            "mem_scale": aug.mem_scale,
            "inserted_tokens": len(aug.transcript) - len(data.transcript),
        }
        out["annotations"] = annotations_path
        out["transcript_augmented"] = aug_transcript_path
        out["features_augmented"] = aug_features_path
    with open(truth_path, "w", encoding="utf-8") as fh:
        json.dump(truth, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return out


def _save_annotations(records, path):
    lines = ["sentence_id\tlevel\tcontent"]
    for rec in records:
        lines.append(f"{rec.sentence_id}\t{rec.level}\t{rec.content}")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def augment_pipeline(transcript_path, annotations_path, out_path) -> dict:
    transcript = load_transcript(transcript_path)
    records = load_annotations(annotations_path)
    merged = merge_augmentation(transcript, records)
    with open(out_path, "wb") as fh:
        fh.write(write_transcript(merged))
    return {
        "transcript": os.fspath(out_path),
        "n_tokens_in": len(transcript),
        "n_records": len(records),
        "n_tokens_out": len(merged),
    }
