"""Face and eye detection backends.

Two interchangeable backends implement the same two-method interface:

- HaarDetector wraps OpenCV's classical cascade classifiers and is used
  whenever the cascade API and the cascade definition files are available.
- BlobDetector is a deterministic classical fallback (brightness blobs for
  faces, dark blobs inside the upper face for eyes) for environments where
  no cascade assets exist. It has no tunable randomness, so extraction
  output is bit-reproducible.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import cv2
import numpy as np


@dataclass(frozen=True)
class FaceBox:
    x: int
    y: int
    w: int
    h: int

    @property
    def center(self) -> tuple[float, float]:
        return (self.x + self.w / 2.0, self.y + self.h / 2.0)

    def clipped(self, width: int, height: int) -> "FaceBox":
        x0 = max(0, self.x)
        y0 = max(0, self.y)
        x1 = min(width, self.x + self.w)
        y1 = min(height, self.y + self.h)
        return FaceBox(x0, y0, max(0, x1 - x0), max(0, y1 - y0))


class HaarDetector:
    """OpenCV cascade classifiers for the frontal face and the eyes."""

    FACE_FILE = "haarcascade_frontalface_default.xml"
    EYE_FILE = "haarcascade_eye.xml"

    def __init__(self, face_path=None, eye_path=None):
        base = getattr(getattr(cv2, "data", None), "haarcascades", "")
        face_path = face_path or os.path.join(base, self.FACE_FILE)
        eye_path = eye_path or os.path.join(base, self.EYE_FILE)
        self.face_cascade = cv2.CascadeClassifier(face_path)
        self.eye_cascade = cv2.CascadeClassifier(eye_path)
        if self.face_cascade.empty() or self.eye_cascade.empty():
            raise FileNotFoundError("cascade definition files not found")

    @staticmethod
    def available() -> bool:
        if not hasattr(cv2, "CascadeClassifier"):
            return False
        base = getattr(getattr(cv2, "data", None), "haarcascades", "")
        return (os.path.exists(os.path.join(base, HaarDetector.FACE_FILE))
                and os.path.exists(os.path.join(base, HaarDetector.EYE_FILE)))

    def detect_faces(self, gray: np.ndarray) -> list[FaceBox]:
        found = self.face_cascade.detectMultiScale(gray, 1.1, 5)
        return [FaceBox(int(x), int(y), int(w), int(h)) for x, y, w, h in found]

    def detect_eyes(self, face_gray: np.ndarray) -> list[FaceBox]:
        found = self.eye_cascade.detectMultiScale(face_gray, 1.1, 3)
        return [FaceBox(int(x), int(y), int(w), int(h)) for x, y, w, h in found]


class BlobDetector:
    """Deterministic brightness-blob detector.

    Faces are bright connected regions of plausible size and aspect ratio;
    eyes are dark blobs in the upper half of the face crop. Thresholds are
    fixed, so the same frame always yields the same boxes.
    """

    def __init__(self, face_threshold=110, eye_threshold=70,
                 min_face=24, max_aspect=2.5):
        self.face_threshold = face_threshold
        self.eye_threshold = eye_threshold
        self.min_face = min_face
        self.max_aspect = max_aspect

    def detect_faces(self, gray: np.ndarray) -> list[FaceBox]:
        _, mask = cv2.threshold(gray, self.face_threshold, 255,
                                cv2.THRESH_BINARY)
        boxes = []
        n, _, stats, _ = cv2.connectedComponentsWithStats(mask)
        for i in range(1, n):
            x, y, w, h, area = stats[i]
            if w < self.min_face or h < self.min_face:
                continue
            aspect = max(w / h, h / w)
            if aspect > self.max_aspect or area < 0.4 * w * h:
                continue
            boxes.append(FaceBox(int(x), int(y), int(w), int(h)))
        boxes.sort(key=lambda b: (-b.w * b.h, b.x, b.y))
        return boxes

    def detect_eyes(self, face_gray: np.ndarray) -> list[FaceBox]:
        h, w = face_gray.shape
        upper = face_gray[: h // 2]
        _, mask = cv2.threshold(upper, self.eye_threshold, 255,
                                cv2.THRESH_BINARY_INV)
        boxes = []
        n, _, stats, _ = cv2.connectedComponentsWithStats(mask)
        for i in range(1, n):
            x, y, bw, bh, area = stats[i]
            if bw < 3 or bh < 2:
                continue
            if bw > 0.6 * w or bh > 0.5 * h:
                continue
            boxes.append(FaceBox(int(x), int(y), int(bw), int(bh)))
        boxes.sort(key=lambda b: (b.x, b.y))
        return boxes


def default_detector():
    """Haar cascades when the assets exist, the blob fallback otherwise."""
    if HaarDetector.available():
        return HaarDetector()
    return BlobDetector()
