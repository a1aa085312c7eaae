from pathlib import Path

import numpy as np
import pytest
from click.testing import CliRunner

from lfx import landmarks
from lfx_extract.cli import main as cli_main
from lfx_extract.detect import BlobDetector, FaceBox
from lfx_extract.extract import ExtractConfig, UnreadableVideo, extract_video
from lfx_extract.predict import TemplatePredictor
from lfx_extract.track import TrackState

DATA = Path(__file__).parent / "data"


def parse(csv_path, video_ids):
    with open(csv_path) as fh:
        return landmarks.parse_csv(fh, {v: 0 for v in video_ids})


# --------------------------------------------------------------------------
# Golden file
# --------------------------------------------------------------------------

def test_golden_clip_matches_byte_for_byte(tmp_path):
    out = tmp_path / "face.csv"
    rows = extract_video(DATA / "face.avi", out)
    assert rows == 48
    assert out.read_bytes() == (DATA / "golden.csv").read_bytes()


def test_golden_clip_parses_with_zero_violations(tmp_path):
    out = tmp_path / "face.csv"
    extract_video(DATA / "face.avi", out)
    sequences = parse(out, ["face"])
    assert len(sequences) == 1
    assert landmarks.validate_sequence(sequences[0]) == []


def test_golden_clip_yield_and_scaled_range(tmp_path):
    out = tmp_path / "face.csv"
    rows = extract_video(DATA / "face.avi", out)
    assert rows >= 0.9 * 48
    seq = parse(out, ["face"])[0]
    for frame in seq.frames:
        xs = np.array([p.x for p in frame.points]) / frame.image_width
        ys = np.array([p.y for p in frame.points]) / frame.image_height
        assert xs.min() >= 0 and xs.max() <= 1
        assert ys.min() >= 0 and ys.max() <= 1


def test_extraction_is_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    extract_video(DATA / "face.avi", a)
    extract_video(DATA / "face.avi", b)
    assert a.read_bytes() == b.read_bytes()


# --------------------------------------------------------------------------
# Two-face tracking
# --------------------------------------------------------------------------

def test_two_face_clip_tracks_the_nearer_face(tmp_path):
    out = tmp_path / "two.csv"
    extract_video(DATA / "twoface.avi", out)
    seq = parse(out, ["twoface"])[0]
    cents = np.array([
        [np.mean([p.x for p in f.points]), np.mean([p.y for p in f.points])]
        for f in seq.frames
    ])
    inter_face_distance = 150.0  # left face ~x=95, right face x=245
    steps = np.linalg.norm(np.diff(cents, axis=0), axis=1)
    assert steps.max() < inter_face_distance
    # never jumps to the second face on the right
    assert cents[:, 0].max() < 160


# --------------------------------------------------------------------------
# No-face and error handling
# --------------------------------------------------------------------------

def test_no_face_video_zero_rows_exit_zero(tmp_path):
    out = tmp_path / "none.csv"
    result = CliRunner().invoke(
        cli_main, [str(DATA / "noface.avi"), "-o", str(out)])
    assert result.exit_code == 0, result.output
    assert "rows=0" in result.output
    assert out.read_text().count("\n") == 1  # header only


def test_unreadable_video_exits_2(tmp_path):
    bogus = tmp_path / "not_a_video.avi"
    bogus.write_bytes(b"not video content")
    result = CliRunner().invoke(
        cli_main, [str(bogus), "-o", str(tmp_path / "x.csv")])
    assert result.exit_code == 2


def test_missing_video_raises():
    with pytest.raises(UnreadableVideo):
        extract_video("/nonexistent/clip.avi", "/tmp/never.csv")


# --------------------------------------------------------------------------
# Frame-index gaps
# --------------------------------------------------------------------------

def test_skipped_frames_leave_gaps(tmp_path):
    """Interleave face and no-face segments; indices must keep absolute
    positions with gaps where detection failed."""
    import cv2

    clip = tmp_path / "gappy.avi"
    writer = cv2.VideoWriter(str(clip), cv2.VideoWriter_fourcc(*"MJPG"),
                             24, (320, 240))
    from make_clips import draw_face, frame, to_bgr
    for t in range(20):
        img = frame()
        if t not in range(8, 13):
            draw_face(img, 160, 120)
        writer.write(to_bgr(img))
    writer.release()

    out = tmp_path / "gappy.csv"
    extract_video(clip, out)
    seq = parse(out, ["gappy"])[0]
    indices = [f.frame_index for f in seq.frames]
    assert indices == sorted(indices)
    assert len(indices) == len(set(indices))
    assert set(range(8, 13)).isdisjoint(indices)
    assert 7 in indices and 13 in indices


# --------------------------------------------------------------------------
# Unit behavior: track state and predictor
# --------------------------------------------------------------------------

def test_track_resets_after_misses():
    track = TrackState(reset_after=3)
    track.update(FaceBox(10, 10, 20, 20))
    assert track.active
    for _ in range(3):
        track.miss()
    assert not track.active


def test_track_nearest_prefers_last_center():
    track = TrackState()
    track.update(FaceBox(100, 100, 40, 40))
    near = FaceBox(105, 95, 40, 40)
    far = FaceBox(260, 100, 60, 60)
    assert track.nearest([far, near]) == near


def test_search_crop_scale_and_clipping():
    track = TrackState()
    track.update(FaceBox(0, 0, 100, 100))
    crop = track.search_crop(320, 240, scale=2.0)
    assert (crop.x, crop.y) == (0, 0)  # clipped at the frame edge
    assert crop.w == 150 and crop.h == 150


def test_template_predictor_point_count_and_bounds():
    pred = TemplatePredictor()
    pts = pred.predict(np.zeros((256, 256), np.uint8))
    assert pts.shape == (68, 2)
    assert pts.min() >= 0 and pts.max() <= 256


def test_blob_detector_rejects_elongated_regions():
    import cv2

    img = np.full((240, 320), 45, np.uint8)
    cv2.rectangle(img, (40, 100), (280, 112), 220, -1)
    assert BlobDetector().detect_faces(img) == []
