import numpy as np
import pytest

from voxelscore.errors import InputError
from voxelscore.roi import (
    DEFAULT_ROI_LABELS,
    ROI_CSV_HEADER,
    Atlas,
    load_atlas,
    parse_atlas,
    roi_ci,
    roi_mean,
    save_atlas,
    write_atlas,
    write_roi_table,
)
from voxelscore.scoring import ScoreMap


def brain_map(values, defined=None):
    values = np.asarray(values, dtype=np.float64)
    if defined is None:
        defined = np.isfinite(values)
    return ScoreMap(values, defined, "brain", {"story_id": "st"})


def tiny_atlas():
    return Atlas({0: ("L", "A"), 1: ("L", "A"), 2: ("R", "A")})


def test_atlas_validation():
    with pytest.raises(InputError, match="negative"):
        Atlas({-1: ("L", "A")})
    with pytest.raises(InputError, match="hemisphere"):
        Atlas({0: ("left", "A")})
    with pytest.raises(InputError, match="bad label"):
        Atlas({0: ("L", "")})
    with pytest.raises(InputError, match="bad label"):
        Atlas({0: ("L", "a,b")})


def test_atlas_cells_sorted():
    atlas = Atlas({3: ("R", "B"), 0: ("L", "B"), 1: ("R", "A")})
    assert atlas.cells() == [("A", "R"), ("B", "L"), ("B", "R")]
    assert len(atlas) == 3


def test_parse_write_round_trip():
    data = (
        "voxel_index\themisphere\tlabel\n"
        "2\tR\tG_temporal_inf\n"
        "0\tL\tS_front_inf\n"
    )
    atlas = parse_atlas(data)
    assert atlas.entries == {2: ("R", "G_temporal_inf"), 0: ("L", "S_front_inf")}
    out = write_atlas(atlas).decode()
    # writer sorts by voxel index
    assert out.splitlines()[1:] == ["0\tL\tS_front_inf", "2\tR\tG_temporal_inf"]
    assert parse_atlas(write_atlas(atlas)).entries == atlas.entries


def test_atlas_file_round_trip(tmp_path):
    atlas = tiny_atlas()
    path = tmp_path / "atlas.tsv"
    save_atlas(atlas, path)
    assert load_atlas(path).entries == atlas.entries


@pytest.mark.parametrize(
    "data,message",
    [
        ("voxel\themi\tlabel\n0\tL\tA\n", "header"),
        ("voxel_index\themisphere\tlabel\nx\tL\tA\n", "integer"),
        ("voxel_index\themisphere\tlabel\n0\tL\tA\n0\tR\tB\n", "duplicate"),
        ("voxel_index\themisphere\tlabel\n0\tQ\tA\n", "hemisphere"),
        ("voxel_index\themisphere\tlabel\n0\tL\t\n", "empty label"),
        ("voxel_index\themisphere\tlabel\n0\tL\n", "3 fields"),
        ("voxel_index\themisphere\tlabel\n", "no entries"),
    ],
)
def test_parse_atlas_errors(data, message):
    with pytest.raises(InputError, match=message):
        parse_atlas(data)


def test_roi_mean_worked_example():
    # voxel 3 is unmapped and must not contribute anywhere
    sm = brain_map([0.1, 0.3, 0.5, 0.9])
    rows = roi_mean(sm, tiny_atlas())
    assert [(r["label"], r["hemisphere"]) for r in rows] == [("A", "L"), ("A", "R")]
    assert rows[0]["mean"] == pytest.approx(0.2, abs=1e-15)
    assert rows[0]["n_voxels"] == 2
    assert rows[1]["mean"] == pytest.approx(0.5, abs=1e-15)
    assert rows[1]["n_voxels"] == 1
    assert all(r["ci_low"] is None and r["ci_high"] is None for r in rows)
    assert all(r["n_subjects"] == 1 for r in rows)


def test_roi_mean_skips_undefined_voxels():
    sm = brain_map([0.1, np.nan, 0.5])
    rows = roi_mean(sm, tiny_atlas())
    assert rows[0]["mean"] == pytest.approx(0.1)
    assert rows[0]["n_voxels"] == 1


def test_roi_mean_empty_cell_is_none():
    sm = brain_map([np.nan, np.nan, 0.5])
    rows = roi_mean(sm, tiny_atlas())
    assert rows[0]["mean"] is None
    assert rows[0]["n_voxels"] == 0


def test_roi_mean_label_filter():
    atlas = Atlas({0: ("L", "A"), 1: ("R", "B")})
    sm = brain_map([0.1, 0.2])
    rows = roi_mean(sm, atlas, labels=["B"])
    assert [(r["label"], r["hemisphere"]) for r in rows] == [("B", "R")]
    with pytest.raises(InputError, match="not in atlas"):
        roi_mean(sm, atlas, labels=["C"])


def test_atlas_coverage_check():
    sm = brain_map([0.1, 0.2])
    with pytest.raises(InputError, match="only"):
        roi_mean(sm, tiny_atlas())


def test_roi_ci_two_subject_worked_example():
    # cell means 0.1 and 0.3 -> sd = sqrt(0.02), t_{0.975,1} = 12.7062...
    atlas = Atlas({0: ("L", "A"), 1: ("L", "A")})
    maps = [brain_map([0.1, 0.1]), brain_map([0.3, 0.3])]
    (row,) = roi_ci(maps, atlas, level=0.95)
    assert row["mean"] == pytest.approx(0.2, abs=1e-15)
    assert row["n_subjects"] == 2
    half = 12.706204736432095 * np.sqrt(0.02) / np.sqrt(2.0)
    assert row["ci_low"] == pytest.approx(0.2 - half, abs=1e-10)
    assert row["ci_high"] == pytest.approx(0.2 + half, abs=1e-10)


def test_roi_ci_uses_sample_sd():
    atlas = Atlas({0: ("L", "A")})
    vals = [0.1, 0.2, 0.4, 0.5]
    maps = [brain_map([v]) for v in vals]
    (row,) = roi_ci(maps, atlas)
    sd = float(np.std(vals, ddof=1))
    half = 3.182446305284263 * sd / 2.0  # t_{0.975,3}, sqrt(4) = 2
    assert row["ci_low"] == pytest.approx(row["mean"] - half, abs=1e-10)
    assert row["ci_high"] == pytest.approx(row["mean"] + half, abs=1e-10)


def test_roi_ci_subject_without_defined_voxels_drops_out():
    atlas = Atlas({0: ("L", "A"), 1: ("L", "A")})
    maps = [
        brain_map([0.1, 0.3]),
        brain_map([np.nan, np.nan]),
        brain_map([0.5, 0.7]),
    ]
    (row,) = roi_ci(maps, atlas)
    assert row["n_subjects"] == 2
    assert row["mean"] == pytest.approx(np.mean([0.2, 0.6]), abs=1e-12)


def test_roi_ci_single_subject_has_no_interval():
    atlas = Atlas({0: ("L", "A")})
    (row,) = roi_ci([brain_map([0.4])], atlas)
    assert row["mean"] == pytest.approx(0.4)
    assert row["ci_low"] is None and row["ci_high"] is None
    assert row["n_subjects"] == 1


def test_roi_ci_narrows_with_higher_t():
    rng = np.random.default_rng(0)
    atlas = Atlas({0: ("L", "A")})
    vals = rng.normal(0.3, 0.05, size=64)
    few = roi_ci([brain_map([v]) for v in vals[:4]], atlas)[0]
    many = roi_ci([brain_map([v]) for v in vals], atlas)[0]
    width_few = few["ci_high"] - few["ci_low"]
    width_many = many["ci_high"] - many["ci_low"]
    assert width_many < width_few


def test_roi_ci_validation():
    atlas = Atlas({0: ("L", "A")})
    with pytest.raises(InputError, match="at least one"):
        roi_ci([], atlas)
    with pytest.raises(InputError, match="level"):
        roi_ci([brain_map([0.1])], atlas, level=1.0)
    with pytest.raises(InputError, match="disagree"):
        roi_ci([brain_map([0.1]), brain_map([0.1, 0.2])], atlas)


def test_write_roi_table_format():
    rows = [
        {
            "label": "A",
            "hemisphere": "L",
            "mean": 0.25,
            "ci_low": None,
            "ci_high": None,
            "n_voxels": 3,
            "n_subjects": 1,
        }
    ]
    text = write_roi_table(rows)
    lines = text.splitlines()
    assert lines[0] == ROI_CSV_HEADER
    assert lines[0] == "label,hemisphere,mean,ci_low,ci_high,n_voxels,n_subjects"
    assert lines[1] == "A,L,0.25,,,3,1"
    assert text.endswith("\n")


def test_ci_table_cells_are_plain_csv_floats():
    # the CI arithmetic must not leak numpy scalar reprs into the CSV
    maps = [brain_map([0.2, 0.3, 0.1]), brain_map([0.3, 0.4, 0.5])]
    text = write_roi_table(roi_ci(maps, tiny_atlas()))
    assert "np.float64" not in text
    for line in text.splitlines()[1:]:
        label, hemi, mean, lo, hi, nv, ns = line.split(",")
        for cell in (mean, lo, hi):
            if cell:
                float(cell)
        int(nv), int(ns)
    row = roi_ci(maps, tiny_atlas())[0]
    assert type(row["ci_low"]) is float
    assert type(row["ci_high"]) is float


def test_default_roi_labels_cover_association_cortex():
    assert len(DEFAULT_ROI_LABELS) == 9
    assert "G_temporal_middle" in DEFAULT_ROI_LABELS
    assert len(set(DEFAULT_ROI_LABELS)) == 9
