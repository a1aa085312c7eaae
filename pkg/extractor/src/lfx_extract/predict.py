"""68-point landmark predictors.

The canonical predictor asset (`shape_predictor_68_face_landmark.dat` for
dlib) is not redistributable with this package, so prediction is pluggable:

- DlibPredictor adapts dlib's shape predictor when both the library and the
  model file are present.
- TemplatePredictor is the deterministic default: a canonical 68-point face
  layout scaled into the detected face box, with the eye rows nudged toward
  detected eye centers when available. It needs no assets and makes
  extraction bit-reproducible.

Both emit points in the 68-point convention: chin 0-16, right brow 17-21,
left brow 22-26, nose 27-35, right eye 36-41, left eye 42-47, outer lip
48-59, inner lip 60-67.
"""

from __future__ import annotations

import numpy as np

from .detect import FaceBox

N_POINTS = 68


def _unit_template() -> np.ndarray:
    """Canonical landmark layout in the unit square (x right, y down)."""
    pts = np.zeros((N_POINTS, 2))
    # chin: lower face arc
    ang = np.linspace(np.pi, 2 * np.pi, 17)
    pts[0:17, 0] = 0.5 + 0.46 * np.cos(ang)
    pts[0:17, 1] = 0.55 - 0.42 * np.sin(ang)
    # brows
    pts[17:22, 0] = np.linspace(0.16, 0.42, 5)
    pts[17:22, 1] = 0.28 - 0.03 * np.sin(np.linspace(0, np.pi, 5))
    pts[22:27, 0] = np.linspace(0.58, 0.84, 5)
    pts[22:27, 1] = 0.28 - 0.03 * np.sin(np.linspace(0, np.pi, 5))
    # nose: bridge (27-30) and base (31-35)
    pts[27:31, 0] = 0.5
    pts[27:31, 1] = np.linspace(0.35, 0.55, 4)
    pts[31:36, 0] = np.linspace(0.42, 0.58, 5)
    pts[31:36, 1] = 0.60
    # eyes: closed hexagons
    for start, cx in ((36, 0.30), (42, 0.70)):
        a = np.linspace(0, 2 * np.pi, 6, endpoint=False)
        pts[start:start + 6, 0] = cx + 0.08 * np.cos(a)
        pts[start:start + 6, 1] = 0.38 - 0.035 * np.sin(a)
    # outer lip ellipse, inner lip ellipse
    a = np.linspace(0, 2 * np.pi, 12, endpoint=False)
    pts[48:60, 0] = 0.5 + 0.16 * np.cos(a)
    pts[48:60, 1] = 0.78 + 0.06 * np.sin(a)
    a = np.linspace(0, 2 * np.pi, 8, endpoint=False)
    pts[60:68, 0] = 0.5 + 0.09 * np.cos(a)
    pts[60:68, 1] = 0.78 + 0.03 * np.sin(a)
    return pts


class TemplatePredictor:
    """Scale the canonical layout into the face box; align eyes if known."""

    def __init__(self):
        self.template = _unit_template()

    def predict(self, face_gray: np.ndarray,
                eye_boxes: list[FaceBox] | None = None) -> np.ndarray:
        """Landmarks in pixel coordinates of the (resized) face crop."""
        h, w = face_gray.shape[:2]
        pts = self.template.copy()
        if eye_boxes:
            self._align_eyes(pts, eye_boxes, w, h)
        pts[:, 0] *= w
        pts[:, 1] *= h
        return pts

    @staticmethod
    def _align_eyes(pts: np.ndarray, eye_boxes: list[FaceBox],
                    w: int, h: int) -> None:
        centers = sorted((b.center for b in eye_boxes), key=lambda c: c[0])
        targets = [(36, centers[0])]
        if len(centers) > 1:
            targets.append((42, centers[-1]))
        for start, (ex, ey) in targets:
            dx = ex / w - pts[start:start + 6, 0].mean()
            dy = ey / h - pts[start:start + 6, 1].mean()
            pts[start:start + 6, 0] += dx
            pts[start:start + 6, 1] += dy


class DlibPredictor:
    """Adapter for dlib's 68-point shape predictor (optional asset)."""

    def __init__(self, model_path: str):
        import dlib  # deferred: optional dependency

        self._predictor = dlib.shape_predictor(model_path)
        self._rectangle = dlib.rectangle

    def predict(self, face_gray: np.ndarray,
                eye_boxes: list[FaceBox] | None = None) -> np.ndarray:
        h, w = face_gray.shape[:2]
        shape = self._predictor(face_gray, self._rectangle(0, 0, w, h))
        return np.array([[p.x, p.y] for p in shape.parts()], dtype=float)
