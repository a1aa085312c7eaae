"""Face tracking state across frames."""

from __future__ import annotations

from dataclasses import dataclass, field

from .detect import FaceBox


@dataclass
class TrackState:
    """Remembers where the face was last seen.

    The previous face center acts as a fixed point: the next frame is
    searched in a crop around it, and when several faces are detected the
    one closest to the center wins. After `reset_after` consecutive
    frames without a detection the state clears so a stale center cannot
    drag the crop off-screen.
    """

    reset_after: int = 30
    center: tuple[float, float] | None = None
    box: FaceBox | None = None
    misses: int = field(default=0)

    @property
    def active(self) -> bool:
        return self.center is not None

    def update(self, box: FaceBox) -> None:
        self.box = box
        self.center = box.center
        self.misses = 0

    def miss(self) -> None:
        if not self.active:
            return
        self.misses += 1
        if self.misses >= self.reset_after:
            self.center = None
            self.box = None
            self.misses = 0

    def nearest(self, boxes: list[FaceBox]) -> FaceBox:
        """The detected face closest to the last fixed point."""
        if not boxes:
            raise ValueError("no boxes to choose from")
        if not self.active:
            return boxes[0]
        cx, cy = self.center
        return min(boxes, key=lambda b: (b.center[0] - cx) ** 2
                                        + (b.center[1] - cy) ** 2)

    def search_crop(self, width: int, height: int,
                    scale: float = 2.0) -> FaceBox | None:
        """Crop rectangle of `scale` x the last face box around the center."""
        if not self.active or self.box is None:
            return None
        w = int(self.box.w * scale)
        h = int(self.box.h * scale)
        cx, cy = self.center
        crop = FaceBox(int(cx - w / 2), int(cy - h / 2), w, h)
        crop = crop.clipped(width, height)
        if crop.w == 0 or crop.h == 0:
            return None
        return crop
