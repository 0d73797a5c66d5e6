"""Region-of-interest aggregation of score maps.

An atlas assigns voxels to (hemisphere, label) cells; voxels absent from
the atlas are unmapped and never aggregated. Within a cell every defined
voxel gets equal weight. Across subjects, roi_ci reports the mean of
per-subject cell means with a Student-t confidence interval (the error bar
a publication figure would put on an ROI bar); a subject contributes to a
cell only if it has at least one defined voxel there.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import InputError
from .scoring import ScoreMap

ATLAS_COLUMNS = ("voxel_index", "hemisphere", "label")
HEMISPHERES = ("L", "R")

# cortical association regions commonly used for language-tracking summaries
DEFAULT_ROI_LABELS = (
    "S_front_inf",
    "S_front_sup",
    "G_front_middle",
    "G_front_sup",
    "G_pariet_inf-Angular",
    "G_parietal_sup",
    "G_temporal_inf",
    "S_temporal_inf",
    "G_temporal_middle",
)


@dataclass
class Atlas:
    """voxel_index -> (hemisphere, label); sparse over the voxel space."""

    entries: dict[int, tuple[str, str]]

    def __post_init__(self):
        for voxel, (hemi, label) in self.entries.items():
            if voxel < 0:
                raise InputError(f"negative voxel index {voxel} in atlas")
            if hemi not in HEMISPHERES:
                raise InputError(
                    f"voxel {voxel}: hemisphere must be L or R, got {hemi!r}"
                )
            if not label or "," in label:
                raise InputError(f"voxel {voxel}: bad label {label!r}")

    def __len__(self):
        return len(self.entries)

    def cells(self) -> list[tuple[str, str]]:
        """Sorted (label, hemisphere) pairs present in the atlas."""
        return sorted({(lab, hemi) for hemi, lab in self.entries.values()})

    def cell_voxels(self) -> dict[tuple[str, str], np.ndarray]:
        groups: dict[tuple[str, str], list[int]] = {}
        for voxel in sorted(self.entries):
            hemi, lab = self.entries[voxel]
            groups.setdefault((lab, hemi), []).append(voxel)
        return {key: np.array(vox, dtype=np.int64) for key, vox in groups.items()}


def parse_atlas(data) -> Atlas:
    """Parse TSV bytes/str with columns voxel_index, hemisphere, label."""
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise InputError(f"atlas is not valid UTF-8: {exc}") from None
    lines = data.splitlines()
    if not lines:
        raise InputError("empty atlas file")
    if tuple(lines[0].split("\t")) != ATLAS_COLUMNS:
        raise InputError(
            f"atlas header must be {list(ATLAS_COLUMNS)}, got {lines[0]!r}"
        )
    entries: dict[int, tuple[str, str]] = {}
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise InputError(f"atlas line {lineno}: expected 3 fields")
        try:
            voxel = int(fields[0])
        except ValueError:
            raise InputError(
                f"atlas line {lineno}: voxel_index must be an integer"
            ) from None
        if voxel in entries:
            raise InputError(f"atlas line {lineno}: duplicate voxel {voxel}")
        hemi, label = fields[1], fields[2]
        if hemi not in HEMISPHERES:
            raise InputError(
                f"atlas line {lineno}: hemisphere must be L or R, got {hemi!r}"
            )
        if not label:
            raise InputError(f"atlas line {lineno}: empty label")
        entries[voxel] = (hemi, label)
    if not entries:
        raise InputError("atlas has no entries")
    return Atlas(entries)


def write_atlas(atlas: Atlas) -> bytes:
    lines = ["\t".join(ATLAS_COLUMNS)]
    for voxel in sorted(atlas.entries):
        hemi, label = atlas.entries[voxel]
        lines.append(f"{voxel}\t{hemi}\t{label}")
    return ("\n".join(lines) + "\n").encode("utf-8")


def load_atlas(path) -> Atlas:
    try:
        with open(path, "rb") as fh:
            return parse_atlas(fh.read())
    except OSError as exc:
        raise InputError(f"cannot read atlas {path}: {exc}") from None


def save_atlas(atlas: Atlas, path):
    with open(path, "wb") as fh:
        fh.write(write_atlas(atlas))


def _check_coverage(atlas: Atlas, n_voxels: int):
    top = max(atlas.entries)
    if top >= n_voxels:
        raise InputError(
            f"atlas maps voxel {top} but the score map has only "
            f"{n_voxels} voxels"
        )


def _filter_cells(cells, labels):
    if labels is None:
        return cells
    wanted = set(labels)
    known = {lab for lab, _ in cells}
    missing = wanted - known
    if missing:
        raise InputError(f"labels not in atlas: {sorted(missing)}")
    return [(lab, hemi) for lab, hemi in cells if lab in wanted]


def roi_mean(sm: ScoreMap, atlas: Atlas, labels=None) -> list[dict]:
    """Per-cell mean over defined voxels of one score map.

    Returns one row dict per (label, hemisphere), sorted; cells with no
    defined voxels get mean None and n_voxels 0.
    """
    _check_coverage(atlas, sm.n_voxels)
    groups = atlas.cell_voxels()
    rows = []
    for lab, hemi in _filter_cells(sorted(groups), labels):
        vox = groups[(lab, hemi)]
        use = vox[sm.defined[vox]]
        rows.append(
            {
                "label": lab,
                "hemisphere": hemi,
                "mean": float(np.mean(sm.per_voxel[use])) if use.size else None,
                "ci_low": None,
                "ci_high": None,
                "n_voxels": int(use.size),
                "n_subjects": 1,
            }
        )
    return rows


def roi_ci(maps: list[ScoreMap], atlas: Atlas, labels=None,
           level: float = 0.95) -> list[dict]:
    """Across-subject cell means with Student-t confidence intervals.

    Each map is one subject. The CI is mean +/- t_{(1+level)/2, T-1} *
    sd / sqrt(T) over the T subjects contributing to the cell; cells with
    fewer than two contributing subjects get None bounds.
    """
    if not maps:
        raise InputError("roi_ci needs at least one score map")
    if not (0 < level < 1):
        raise InputError(f"confidence level must be in (0, 1), got {level!r}")
    n_vox = maps[0].n_voxels
    for sm in maps[1:]:
        if sm.n_voxels != n_vox:
            raise InputError("score maps disagree on voxel count")
    _check_coverage(atlas, n_vox)
    groups = atlas.cell_voxels()
    rows = []
    for lab, hemi in _filter_cells(sorted(groups), labels):
        vox = groups[(lab, hemi)]
        per_subject = []
        for sm in maps:
            use = vox[sm.defined[vox]]
            if use.size:
                per_subject.append(float(np.mean(sm.per_voxel[use])))
        t_eff = len(per_subject)
        row = {
            "label": lab,
            "hemisphere": hemi,
            "mean": float(np.mean(per_subject)) if t_eff else None,
            "ci_low": None,
            "ci_high": None,
            "n_voxels": int(vox.size),
            "n_subjects": t_eff,
        }
        if t_eff >= 2:
            sd = float(np.std(per_subject, ddof=1))
            q = float(stats.t.ppf(0.5 * (1.0 + level), t_eff - 1))
            half = q * sd / t_eff ** 0.5
            row["ci_low"] = row["mean"] - half
            row["ci_high"] = row["mean"] + half
        rows.append(row)
    return rows


ROI_CSV_HEADER = "label,hemisphere,mean,ci_low,ci_high,n_voxels,n_subjects"


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        # plain-float repr; numpy scalars pass the isinstance check but
        # repr as np.float64(...), which is not CSV
        return repr(float(value))
    return str(value)


def write_roi_table(rows: list[dict]) -> str:
    lines = [ROI_CSV_HEADER]
    for row in rows:
        lines.append(
            ",".join(
                _cell(row[key])
                for key in (
                    "label",
                    "hemisphere",
                    "mean",
                    "ci_low",
                    "ci_high",
                    "n_voxels",
                    "n_subjects",
                )
            )
        )
    return "\n".join(lines) + "\n"


def save_roi_table(rows: list[dict], path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(write_roi_table(rows))
