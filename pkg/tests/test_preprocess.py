import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lfx.landmarks import LandmarkFrame, LandmarkSequence, N_POINTS, Point2
from lfx.preprocess import (
    EmptySequence,
    SEGMENT_FRAMES,
    build_segment,
    differentials,
    expected_segments,
    load_segments,
    preprocess_sequences,
    save_segments,
    scale_frame,
    standardize_length,
)


def frame_from_arrays(xs, ys, video_id="v", index=0):
    pts = [Point2(float(x), float(y)) for x, y in zip(xs, ys)]
    return LandmarkFrame(video_id, index, 100, 100, pts)


def spread_frame(video_id="v", index=0, offset=0.0):
    xs = np.linspace(0.0, 1.0, N_POINTS) + offset
    ys = np.linspace(2.0, 3.0, N_POINTS) + offset
    return frame_from_arrays(xs, ys, video_id, index)


def sequence_of_length(n, video_id="v", label=0):
    frames = [spread_frame(video_id, t, offset=0.001 * t) for t in range(n)]
    return LandmarkSequence(video_id, label, frames)


# --- scale_frame ------------------------------------------------------------

def test_scale_minmax_basic():
    xs = [10.0, 20.0, 30.0] + [10.0] * 65
    f = scale_frame(frame_from_arrays(xs, xs))
    got = [p.x for p in f.points[:3]]
    assert got == [0.0, 0.5, 1.0]


def test_scale_eliminates_negatives():
    xs = [-5.0, 0.0, 5.0] + [-5.0] * 65
    f = scale_frame(frame_from_arrays(xs, xs))
    assert [p.x for p in f.points[:3]] == [0.0, 0.5, 1.0]
    assert all(0.0 <= p.x <= 1.0 for p in f.points)


def test_scale_degenerate_axis_maps_to_half():
    xs = [7.0] * N_POINTS
    ys = list(range(N_POINTS))
    f = scale_frame(frame_from_arrays(xs, ys))
    assert all(p.x == 0.5 for p in f.points)
    assert f.points[0].y == 0.0 and f.points[-1].y == 1.0


def test_scale_idempotent():
    f = spread_frame()
    once = scale_frame(f)
    twice = scale_frame(once)
    for a, b in zip(once.points, twice.points):
        assert abs(a.x - b.x) < 1e-12 and abs(a.y - b.y) < 1e-12


@given(
    a=st.floats(min_value=0.01, max_value=100, allow_nan=False),
    bx=st.floats(min_value=-100, max_value=100, allow_nan=False),
    by=st.floats(min_value=-100, max_value=100, allow_nan=False),
)
@settings(max_examples=50, deadline=None)
def test_scale_translation_and_scale_invariance(a, bx, by):
    base = spread_frame()
    moved = frame_from_arrays(
        [a * p.x + bx for p in base.points], [a * p.y + by for p in base.points]
    )
    ref = scale_frame(base)
    got = scale_frame(moved)
    for p, q in zip(ref.points, got.points):
        assert p.x == pytest.approx(q.x, abs=1e-9)
        assert p.y == pytest.approx(q.y, abs=1e-9)


# --- standardize_length -----------------------------------------------------

@pytest.mark.parametrize("length,expected", [(599, 0), (600, 1), (650, 1),
                                             (720, 1), (1320, 2), (1500, 2)])
def test_segment_counts_at_boundaries(length, expected):
    precursors = standardize_length(sequence_of_length(length))
    assert len(precursors) == expected
    assert expected_segments(length) == expected
    for k, pre in enumerate(precursors):
        assert pre.segment_index == k
        assert pre.points.shape == (SEGMENT_FRAMES, N_POINTS, 2)


def test_1500_splits_and_drops_remainder():
    pres = standardize_length(sequence_of_length(1500))
    assert [p.padded_frames for p in pres] == [0, 0]


def test_650_pads_70_trailing_frames():
    (pre,) = standardize_length(sequence_of_length(650))
    assert pre.padded_frames == 70
    # padded tail repeats the last real frame
    assert np.array_equal(pre.points[649], pre.points[719])


def test_1320_keeps_600_frame_remainder():
    pres = standardize_length(sequence_of_length(1320))
    assert [p.padded_frames for p in pres] == [0, 120]


def test_empty_sequence_raises():
    with pytest.raises(EmptySequence):
        standardize_length(LandmarkSequence("v", 0, []))


def test_frame_conservation_formula_random_lengths():
    rng = np.random.default_rng(7)
    for length in rng.integers(1, 3000, size=40):
        length = int(length)
        pres = standardize_length(sequence_of_length(length))
        full, rem = divmod(length, SEGMENT_FRAMES)
        expected = SEGMENT_FRAMES * (full + (1 if rem >= 600 else 0))
        assert sum(p.points.shape[0] for p in pres) == expected


# --- differentials ----------------------------------------------------------

def oracle_diff(values):
    out = [0.0]
    for t in range(1, len(values)):
        out.append(values[t] - values[t - 1])
    return np.array(out)


def test_differentials_quadratic_cascade():
    v = np.cumsum(np.cumsum(np.ones(SEGMENT_FRAMES)))  # 1, 3, 6, 10, ...
    v = np.concatenate([[0.0], v])[:SEGMENT_FRAMES]
    d1, d2, d3 = differentials(v)
    assert np.array_equal(d1, oracle_diff(v))
    assert np.array_equal(d2, oracle_diff(oracle_diff(v)))
    assert np.array_equal(d3, oracle_diff(oracle_diff(oracle_diff(v))))


def test_differentials_constant_series_is_zero():
    d1, d2, d3 = differentials(np.full(SEGMENT_FRAMES, 3.7))
    assert not d1.any() and not d2.any() and not d3.any()


def test_differentials_linear_series():
    s = 0.25
    v = s * np.arange(SEGMENT_FRAMES)
    d1, d2, d3 = differentials(v)
    assert np.all(d1[1:] == s) and d1[0] == 0
    assert np.all(d2[2:] == 0)


def test_differentials_random_matches_oracle_bitwise():
    rng = np.random.default_rng(11)
    for _ in range(20):
        v = rng.standard_normal(SEGMENT_FRAMES)
        d1, d2, d3 = differentials(v)
        o1 = oracle_diff(v)
        o2 = oracle_diff(o1)
        o3 = oracle_diff(o2)
        assert np.array_equal(d1, o1)
        assert np.array_equal(d2, o2)
        assert np.array_equal(d3, o3)


def test_differentials_linearity():
    rng = np.random.default_rng(5)
    u = rng.standard_normal(SEGMENT_FRAMES)
    w = rng.standard_normal(SEGMENT_FRAMES)
    for du, dw, ds in zip(differentials(u), differentials(w), differentials(u + w)):
        assert np.allclose(du + dw, ds, atol=1e-12)


def test_differentials_wrong_length():
    with pytest.raises(ValueError):
        differentials(np.zeros(10))


# --- build_segment ----------------------------------------------------------

def test_stationary_face_has_zero_differentials():
    (pre,) = standardize_length(
        LandmarkSequence("v", 0, [spread_frame("v", t) for t in range(720)])
    )
    seg = build_segment(pre)
    assert seg.features.shape == (720, 544)
    assert not seg.features[:, 136:].any()
    assert np.all(seg.features[0, :136] == seg.features[333, :136])


def test_single_moving_point_nonzero_only_in_its_d1_column():
    pres = standardize_length(sequence_of_length(720))
    pre = pres[0]
    pre.points[:] = 0.25
    pre.points[:, 3, 0] = np.linspace(0.0, 1.0, 720)  # point 3 moves in x only
    seg = build_segment(pre)
    d1 = seg.features[:, 136:272]
    nonzero_cols = np.where(d1[1:].any(axis=0))[0]
    assert list(nonzero_cols) == [6]  # x of point 3
    d2 = seg.features[:, 272:408]
    assert np.allclose(d2[2:], 0.0, atol=1e-12)
    d3 = seg.features[:, 408:]
    assert np.allclose(d3[3:], 0.0, atol=1e-12)


def test_build_segment_matches_per_column_oracle():
    rng = np.random.default_rng(13)
    pres = standardize_length(sequence_of_length(720))
    pre = pres[0]
    pre.points[:] = rng.random((720, N_POINTS, 2))
    seg = build_segment(pre)
    flat = pre.points.reshape(720, 136)
    for col in rng.integers(0, 136, size=8):
        o1 = oracle_diff(flat[:, col])
        o2 = oracle_diff(o1)
        o3 = oracle_diff(o2)
        assert np.array_equal(seg.features[:, col], flat[:, col])
        assert np.array_equal(seg.features[:, 136 + col], o1)
        assert np.array_equal(seg.features[:, 272 + col], o2)
        assert np.array_equal(seg.features[:, 408 + col], o3)


def test_padded_rows_have_zero_differentials_after_first():
    (pre,) = standardize_length(sequence_of_length(650))
    seg = build_segment(pre)
    assert seg.padded_frames == 70
    # padding starts at row 650; each differential order needs one more row
    # for the duplication spike to wash out
    assert not seg.features[650:, 136:272].any()  # d1
    assert not seg.features[651:, 272:408].any()  # d2
    assert not seg.features[652:, 408:].any()     # d3
    # position block of padded rows equals the last real row
    assert np.array_equal(seg.features[719, :136], seg.features[649, :136])


# --- store ------------------------------------------------------------------

def test_segment_store_round_trip(tmp_path):
    seqs = [sequence_of_length(720, "a", 0), sequence_of_length(1320, "b", 1)]
    segments, dropped = preprocess_sequences(seqs)
    assert dropped == 0 and len(segments) == 3
    save_segments(segments, tmp_path / "store")
    loaded = load_segments(tmp_path / "store")
    assert len(loaded) == 3
    for orig, back in zip(segments, loaded):
        assert np.array_equal(orig.features, back.features)
        assert (orig.source_video_id, orig.segment_index, orig.label,
                orig.padded_frames) == (back.source_video_id, back.segment_index,
                                        back.label, back.padded_frames)


def test_dropped_video_counted():
    segments, dropped = preprocess_sequences([sequence_of_length(599, "tiny")])
    assert segments == [] and dropped == 1
