"""Per-frame extraction loop: video file -> landmark CSV."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import cv2
import numpy as np

from .csvout import CSV_HEADER, format_row
from .detect import FaceBox, default_detector
from .predict import TemplatePredictor
from .track import TrackState


class UnreadableVideo(RuntimeError):
    """The video file could not be opened or decoded."""


@dataclass
class ExtractConfig:
    resize: int = 256          # uniform face-crop size fed to the predictor
    crop_scale: float = 2.0    # search-crop size as a multiple of the last box
    reset_after: int = 30      # no-face frames before the track resets
    require_two_eyes: bool = False
    detector: object = None
    predictor: object = None

    def resolved(self) -> "ExtractConfig":
        cfg = ExtractConfig(**{**self.__dict__})
        if cfg.detector is None:
            cfg.detector = default_detector()
        if cfg.predictor is None:
            cfg.predictor = TemplatePredictor()
        return cfg


def _detect_in(gray: np.ndarray, detector, origin=(0, 0)) -> list[FaceBox]:
    ox, oy = origin
    return [FaceBox(b.x + ox, b.y + oy, b.w, b.h)
            for b in detector.detect_faces(gray)]


def extract_frame(gray: np.ndarray, track: TrackState,
                  cfg: ExtractConfig) -> np.ndarray | None:
    """One frame's 68 landmark points in pixel coordinates, or None."""
    height, width = gray.shape

    # (a) search the crop around the last fixed point first
    faces: list[FaceBox] = []
    crop = track.search_crop(width, height, cfg.crop_scale)
    if crop is not None:
        sub = gray[crop.y:crop.y + crop.h, crop.x:crop.x + crop.w]
        faces = _detect_in(sub, cfg.detector, (crop.x, crop.y))
    if not faces:  # no track yet, or the face left the crop
        faces = _detect_in(gray, cfg.detector)
    if not faces:
        track.miss()
        return None

    # (b) keep the face closest to the last fixed point
    face = track.nearest(faces).clipped(width, height)
    if face.w == 0 or face.h == 0:
        track.miss()
        return None

    # (b') eye verification guards against non-face detections
    face_gray = gray[face.y:face.y + face.h, face.x:face.x + face.w]
    resized = cv2.resize(face_gray, (cfg.resize, cfg.resize),
                         interpolation=cv2.INTER_AREA)
    eyes = cfg.detector.detect_eyes(resized)
    needed = 2 if cfg.require_two_eyes else 1
    if len(eyes) < needed:
        track.miss()
        return None

    # (c) predict on the uniform crop, then map back to frame pixels
    pts = cfg.predictor.predict(resized, eyes)
    pts = pts.astype(float)
    pts[:, 0] = face.x + pts[:, 0] * face.w / cfg.resize
    pts[:, 1] = face.y + pts[:, 1] * face.h / cfg.resize
    track.update(face)
    return pts


def extract_video(video_path, out_csv, video_id: str | None = None,
                  cfg: ExtractConfig | None = None) -> int:
    """Extract landmarks from every face-bearing frame; returns row count.

    Frames without a verified face are skipped, leaving gaps in
    frame_index. The output always starts with the CSV header, so a
    face-free video yields a header-only file.
    """
    cfg = (cfg or ExtractConfig()).resolved()
    video_path = Path(video_path)
    video_id = video_id or video_path.stem

    capture = cv2.VideoCapture(str(video_path))
    if not capture.isOpened():
        raise UnreadableVideo(f"cannot open video: {video_path}")

    track = TrackState(reset_after=cfg.reset_after)
    rows = []
    frame_index = 0
    while True:
        ok, frame = capture.read()
        if not ok:
            break
        gray = cv2.cvtColor(frame, cv2.COLOR_BGR2GRAY)
        height, width = gray.shape
        pts = extract_frame(gray, track, cfg)
        if pts is not None:
            rows.append(format_row(video_id, frame_index, height, width, pts))
        frame_index += 1
    capture.release()
    if frame_index == 0:
        raise UnreadableVideo(f"no decodable frames in: {video_path}")

    Path(out_csv).write_text("\n".join([CSV_HEADER, *rows]) + "\n")
    return len(rows)
