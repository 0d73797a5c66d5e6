import numpy as np
import pytest

from voxelscore.alignment import (
    FrameTimeline,
    assign_words_to_frames,
    fir_expand,
    pool_by_frame,
)
from voxelscore.errors import InputError


def test_frame_times():
    tl = FrameTimeline(frames=4, tr=1.5, t0=10.0)
    np.testing.assert_array_equal(tl.frame_times(), [10.0, 11.5, 13.0, 14.5])


@pytest.mark.parametrize(
    "kwargs,message",
    [
        (dict(frames=0, tr=1.0), "at least one frame"),
        (dict(frames=3, tr=0.0), "tr"),
        (dict(frames=3, tr=-2.0), "tr"),
        (dict(frames=3, tr=np.nan), "tr"),
        (dict(frames=3, tr=1.0, t0=np.inf), "t0"),
    ],
)
def test_timeline_validation(kwargs, message):
    with pytest.raises(InputError, match=message):
        FrameTimeline(**kwargs)


def test_assign_worked_example():
    tl = FrameTimeline(frames=3, tr=2.0, t0=0.0)
    out = assign_words_to_frames([0.9, 1.1, 3.9], tl)
    np.testing.assert_array_equal(out, [0, 1, 2])


def test_assign_tie_prefers_earlier_frame():
    tl = FrameTimeline(frames=3, tr=2.0, t0=0.0)
    np.testing.assert_array_equal(assign_words_to_frames([1.0, 3.0], tl), [0, 1])


def test_assign_clamps_out_of_window():
    tl = FrameTimeline(frames=3, tr=2.0, t0=0.0)
    out = assign_words_to_frames([-5.0, -0.1, 4.4, 100.0], tl)
    np.testing.assert_array_equal(out, [0, 0, 2, 2])


def test_assign_respects_t0():
    tl = FrameTimeline(frames=3, tr=2.0, t0=10.0)
    out = assign_words_to_frames([10.9, 11.1, 13.9], tl)
    np.testing.assert_array_equal(out, [0, 1, 2])


def test_assign_onsets_on_frame_times_exactly():
    tl = FrameTimeline(frames=5, tr=0.7, t0=0.0)
    times = tl.frame_times()
    np.testing.assert_array_equal(assign_words_to_frames(times, tl), np.arange(5))


def test_assign_matches_bruteforce_nearest():
    rng = np.random.default_rng(11)
    tl = FrameTimeline(frames=40, tr=1.3, t0=2.0)
    onsets = np.sort(rng.uniform(-3.0, 60.0, size=200))
    got = assign_words_to_frames(onsets, tl)
    times = tl.frame_times()
    dist = np.abs(times[None, :] - onsets[:, None])
    expect = np.argmin(dist, axis=1)
    np.testing.assert_array_equal(got, expect)


def test_assign_is_nondecreasing():
    rng = np.random.default_rng(3)
    tl = FrameTimeline(frames=25, tr=0.8)
    onsets = np.sort(rng.uniform(0, 30, size=300))
    out = assign_words_to_frames(onsets, tl)
    assert np.all(np.diff(out) >= 0)


@pytest.mark.parametrize(
    "onsets,message",
    [
        ([], "no onsets"),
        ([[0.1]], "1-D"),
        ([0.1, np.nan], "non-finite"),
        ([0.5, 0.4], "nondecreasing"),
    ],
)
def test_assign_validation(onsets, message):
    tl = FrameTimeline(frames=3, tr=1.0)
    with pytest.raises(InputError, match=message):
        assign_words_to_frames(onsets, tl)


def test_pool_means_and_zero_rows():
    tl = FrameTimeline(frames=4, tr=1.0)
    vals = np.array([[1.0, 10.0], [3.0, 30.0], [5.0, 50.0]])
    pooled = pool_by_frame(vals, [0, 0, 2], tl)
    expect = np.array([[2.0, 20.0], [0.0, 0.0], [5.0, 50.0], [0.0, 0.0]])
    np.testing.assert_array_equal(pooled, expect)
    assert pooled.dtype == np.float64


def test_pool_single_word_frames_copy_values():
    tl = FrameTimeline(frames=3, tr=1.0)
    vals = np.arange(6, dtype=np.float32).reshape(3, 2)
    pooled = pool_by_frame(vals, [0, 1, 2], tl)
    np.testing.assert_array_equal(pooled, vals.astype(np.float64))


def test_pool_validation():
    tl = FrameTimeline(frames=3, tr=1.0)
    with pytest.raises(InputError, match="2-D"):
        pool_by_frame(np.zeros(4), [0, 1, 2, 2], tl)
    with pytest.raises(InputError, match="does not match"):
        pool_by_frame(np.zeros((4, 2)), [0, 1], tl)
    with pytest.raises(InputError, match="out-of-range"):
        pool_by_frame(np.zeros((2, 2)), [0, 3], tl)


def test_fir_shape_and_lag_blocks():
    arr = np.array([[1.0], [2.0], [3.0], [4.0]])
    dm = fir_expand(arr, 3)
    assert dm.frames == 4
    assert dm.width == 3
    assert dm.lags == 3
    expect = np.array(
        [
            [1.0, 0.0, 0.0],
            [2.0, 1.0, 0.0],
            [3.0, 2.0, 1.0],
            [4.0, 3.0, 2.0],
        ]
    )
    np.testing.assert_array_equal(dm.values, expect)


def test_fir_multi_dim_blocks_group_by_lag():
    arr = np.array([[1.0, 10.0], [2.0, 20.0]])
    dm = fir_expand(arr, 2)
    expect = np.array([[1.0, 10.0, 0.0, 0.0], [2.0, 20.0, 1.0, 10.0]])
    np.testing.assert_array_equal(dm.values, expect)


def test_fir_lag_one_is_identity():
    arr = np.arange(8, dtype=np.float64).reshape(4, 2)
    np.testing.assert_array_equal(fir_expand(arr, 1).values, arr)


def test_fir_validation():
    arr = np.zeros((3, 2))
    with pytest.raises(InputError, match=">= 1"):
        fir_expand(arr, 0)
    with pytest.raises(InputError, match="exceeds frame count"):
        fir_expand(arr, 4)
    with pytest.raises(InputError, match="2-D"):
        fir_expand(np.zeros(3), 1)


def test_pipeline_composes():
    tl = FrameTimeline(frames=5, tr=2.0)
    onsets = [0.2, 0.4, 2.1, 8.0]
    vals = np.array([[2.0], [4.0], [6.0], [8.0]])
    assignment = assign_words_to_frames(onsets, tl)
    np.testing.assert_array_equal(assignment, [0, 0, 1, 4])
    pooled = pool_by_frame(vals, assignment, tl)
    np.testing.assert_array_equal(pooled[:, 0], [3.0, 6.0, 0.0, 0.0, 8.0])
    dm = fir_expand(pooled, 2)
    np.testing.assert_array_equal(dm.values[:, 1], [0.0, 3.0, 6.0, 0.0, 0.0])
