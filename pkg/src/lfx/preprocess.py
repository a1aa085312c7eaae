"""Coordinate normalization, 720-frame standardization, and differential features.

Feature layout per frame row (544 columns, fixed):

    [positions (136) | d1 (136) | d2 (136) | d3 (136)]

where each 136-block is ``x0,y0,x1,y1,...,x67,y67`` in canonical landmark
order. This ordering is the segment-store contract and must never change.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .landmarks import LandmarkFrame, LandmarkSequence, N_POINTS, Point2

SEGMENT_FRAMES = 720
MIN_REMAINDER = 600  # remainders >= this are padded to 720; shorter are dropped
FEATURES_PER_FRAME = 4 * 2 * N_POINTS  # positions + three differentials
DEGENERATE_EPS = 1e-9


class EmptySequence(ValueError):
    pass


class DegenerateFrame(ValueError):
    """All points collinear on one axis; raised only when requested."""


@dataclass
class Segment:
    """A standardized 720-frame training unit.

    features is a (720, 544) float64 matrix in the documented layout.
    padded_frames counts the duplicated trailing frames.
    """

    source_video_id: str
    segment_index: int
    label: int
    features: np.ndarray
    padded_frames: int


def scale_frame(frame: LandmarkFrame) -> LandmarkFrame:
    """Min-max normalize each axis independently to [0, 1].

    Removes translation and positive scaling, and eliminates negative raw
    coordinates. A degenerate axis (max - min < eps) maps to 0.5.
    """
    xs = np.array([p.x for p in frame.points])
    ys = np.array([p.y for p in frame.points])
    xs = _scale_axis(xs)
    ys = _scale_axis(ys)
    points = [Point2(float(x), float(y)) for x, y in zip(xs, ys)]
    return LandmarkFrame(
        frame.video_id, frame.frame_index, frame.image_height, frame.image_width, points
    )


def _scale_axis(values: np.ndarray) -> np.ndarray:
    lo, hi = values.min(), values.max()
    if hi - lo < DEGENERATE_EPS:
        return np.full_like(values, 0.5)
    return (values - lo) / (hi - lo)


def expected_segments(length: int) -> int:
    """Closed-form segment count for a video of `length` frames."""
    full, rem = divmod(length, SEGMENT_FRAMES)
    return full + (1 if rem >= MIN_REMAINDER else 0)


@dataclass
class SegmentPrecursor:
    source_video_id: str
    segment_index: int
    label: int
    points: np.ndarray  # (720, 68, 2) scaled coordinates
    padded_frames: int


def standardize_length(seq: LandmarkSequence) -> list[SegmentPrecursor]:
    """Chunk a sequence into 720-frame segments, padding or dropping the tail.

    Full 720-frame chunks are emitted as-is. A remainder of >= 600 frames is
    padded to 720 by duplicating its last frame (a static face); shorter
    remainders are discarded. Frames are scaled per-frame before chunking.
    """
    if not seq.frames:
        raise EmptySequence(f"video {seq.video_id!r} has no frames")

    coords = np.empty((len(seq.frames), N_POINTS, 2))
    for t, frame in enumerate(seq.frames):
        scaled = scale_frame(frame)
        for i, p in enumerate(scaled.points):
            coords[t, i, 0] = p.x
            coords[t, i, 1] = p.y

    precursors = []
    n_full = len(seq.frames) // SEGMENT_FRAMES
    for k in range(n_full):
        block = coords[k * SEGMENT_FRAMES : (k + 1) * SEGMENT_FRAMES]
        precursors.append(SegmentPrecursor(seq.video_id, k, seq.label, block.copy(), 0))

    remainder = coords[n_full * SEGMENT_FRAMES :]
    if len(remainder) >= MIN_REMAINDER and len(remainder) < SEGMENT_FRAMES:
        pad = SEGMENT_FRAMES - len(remainder)
        block = np.concatenate([remainder, np.repeat(remainder[-1:], pad, axis=0)])
        precursors.append(SegmentPrecursor(seq.video_id, n_full, seq.label, block, pad))
    return precursors


def differentials(series: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """First/second/third finite differences with d[0] = 0.

    Works on the leading axis, so a (720, k) matrix is differenced per column.
    """
    series = np.asarray(series, dtype=np.float64)
    if series.shape[0] != SEGMENT_FRAMES:
        raise ValueError(f"expected {SEGMENT_FRAMES} values, got {series.shape[0]}")
    d1 = _diff(series)
    d2 = _diff(d1)
    d3 = _diff(d2)
    return d1, d2, d3


def _diff(v: np.ndarray) -> np.ndarray:
    out = np.zeros_like(v)
    out[1:] = v[1:] - v[:-1]
    return out


def build_segment(precursor: SegmentPrecursor) -> Segment:
    """Assemble the (720, 544) feature matrix from scaled coordinates.

    Differentials are computed after padding, so a duplicated static tail
    yields exact zeros in every differential block.
    """
    positions = precursor.points.reshape(SEGMENT_FRAMES, 2 * N_POINTS)
    d1, d2, d3 = differentials(positions)
    features = np.concatenate([positions, d1, d2, d3], axis=1)
    return Segment(
        source_video_id=precursor.source_video_id,
        segment_index=precursor.segment_index,
        label=precursor.label,
        features=features,
        padded_frames=precursor.padded_frames,
    )


def preprocess_sequences(sequences: list[LandmarkSequence]) -> tuple[list[Segment], int]:
    """Run the whole pipeline; returns (segments, dropped_video_count)."""
    segments = []
    dropped = 0
    for seq in sequences:
        precursors = standardize_length(seq)
        if not precursors:
            dropped += 1
        for pre in precursors:
            segments.append(build_segment(pre))
    return segments, dropped


# --- segment store ---------------------------------------------------------
#
# One .npy file holding the stacked (N, 720, 544) feature block plus a JSON
# sidecar with per-segment metadata. np.save is byte-stable for fixed input,
# which the determinism-replay contract relies on.

def save_segments(segments: list[Segment], directory: str | Path) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    block = np.stack([s.features for s in segments]) if segments else np.empty(
        (0, SEGMENT_FRAMES, FEATURES_PER_FRAME)
    )
    np.save(directory / "segments.npy", block)
    meta = [
        {
            "source_video_id": s.source_video_id,
            "segment_index": s.segment_index,
            "label": s.label,
            "padded_frames": s.padded_frames,
        }
        for s in segments
    ]
    (directory / "segments.meta.json").write_text(
        json.dumps(meta, indent=0, sort_keys=True) + "\n"
    )


def load_segments(directory: str | Path) -> list[Segment]:
    directory = Path(directory)
    block = np.load(directory / "segments.npy")
    meta = json.loads((directory / "segments.meta.json").read_text())
    if len(meta) != block.shape[0]:
        raise ValueError("segment store metadata does not match feature block")
    return [
        Segment(
            source_video_id=m["source_video_id"],
            segment_index=m["segment_index"],
            label=m["label"],
            features=block[i],
            padded_frames=m["padded_frames"],
        )
        for i, m in enumerate(meta)
    ]
