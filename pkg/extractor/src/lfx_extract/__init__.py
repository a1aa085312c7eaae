"""Video -> facial-landmark CSV extraction.

Pipeline per frame: crop near the tracked face center, detect the face,
verify at least one eye inside it, tightly re-crop and resize, predict the
68 landmark points, and append a CSV row in the landmark wire format.
"""

from .detect import BlobDetector, FaceBox, HaarDetector, default_detector
from .extract import ExtractConfig, extract_video
from .predict import TemplatePredictor
from .track import TrackState

__all__ = [
    "BlobDetector",
    "ExtractConfig",
    "FaceBox",
    "HaarDetector",
    "TemplatePredictor",
    "TrackState",
    "default_detector",
    "extract_video",
]
