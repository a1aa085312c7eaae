"""Domain types for 68-point facial landmark sequences and the CSV wire format.

The landmark CSV is flat: one row per frame with 140 columns,
``video_id,frame_index,image_height,image_width,p0_x,p0_y,...,p67_x,p67_y``.
Labels live in a separate two-column manifest (``video_id,label``).
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import IO, Iterable

N_POINTS = 68

# Canonical predictor index ranges for the nine facial groups.
GROUPS = {
    "chin": range(0, 17),
    "left_eyebrow": range(17, 22),
    "right_eyebrow": range(22, 27),
    "nose_bridge": range(27, 31),
    "nose_bottom": range(31, 36),
    "left_eye": range(36, 42),
    "right_eye": range(42, 48),
    "outer_lip": range(48, 60),
    "inner_lip": range(60, 68),
}

assert sum(len(r) for r in GROUPS.values()) == N_POINTS, "group partition must cover 68 points"

CSV_HEADER = "video_id,frame_index,image_height,image_width," + ",".join(
    f"p{i}_{axis}" for i in range(N_POINTS) for axis in ("x", "y")
)
N_COLUMNS = 4 + 2 * N_POINTS


class SchemaError(ValueError):
    """Malformed CSV row: wrong column count or a non-numeric cell."""

    def __init__(self, line_no, message):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {message}")


class DuplicateFrame(ValueError):
    """Repeated (video_id, frame_index) pair in the input."""

    def __init__(self, line_no, video_id, frame_index):
        self.line_no = line_no
        super().__init__(f"line {line_no}: duplicate frame {frame_index} for video {video_id!r}")


class UnknownVideo(KeyError):
    """A CSV row references a video_id absent from the label manifest."""

    def __init__(self, line_no, video_id):
        self.line_no = line_no
        super().__init__(f"line {line_no}: video {video_id!r} not in manifest")


@dataclass(frozen=True)
class Point2:
    x: float
    y: float


@dataclass
class LandmarkFrame:
    """One video frame's 68 landmark points plus provenance.

    Raw ingested coordinates may lie outside [0, 1], including negatives;
    normalization is preprocess.scale_frame's job.
    """

    video_id: str
    frame_index: int
    image_height: int
    image_width: int
    points: list[Point2]


@dataclass
class LandmarkSequence:
    video_id: str
    label: int  # 0 = real, 1 = fake
    frames: list[LandmarkFrame] = field(default_factory=list)


@dataclass(frozen=True)
class Violation:
    kind: str  # PointCount | NonMonotonic | VideoIdMismatch | BadLabel
    frame_index: int
    detail: str = ""


LabelManifest = dict  # video_id -> label in {0, 1}


def parse_manifest(stream: IO[str] | IO[bytes]) -> LabelManifest:
    """Parse the two-column ``video_id,label`` manifest CSV."""
    text = _as_text(stream)
    manifest: dict[str, int] = {}
    for line_no, line in enumerate(text, start=1):
        line = line.strip()
        if not line:
            continue
        if line_no == 1 and line.lower().startswith("video_id"):
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise SchemaError(line_no, f"expected 2 columns, got {len(parts)}")
        vid, raw_label = parts[0], parts[1].strip()
        if raw_label not in ("0", "1"):
            raise SchemaError(line_no, f"label must be 0 or 1, got {raw_label!r}")
        if vid in manifest:
            raise SchemaError(line_no, f"video {vid!r} listed twice in manifest")
        manifest[vid] = int(raw_label)
    return manifest


def _as_text(stream):
    if isinstance(stream, (bytes, bytearray)):
        return io.StringIO(stream.decode("utf-8"))
    if isinstance(stream, str):
        return io.StringIO(stream)
    first = stream.read(0)
    if isinstance(first, bytes):
        return io.TextIOWrapper(stream, encoding="utf-8")
    return stream


def parse_csv(stream, manifest: LabelManifest) -> list[LandmarkSequence]:
    """Parse the landmark CSV into per-video sequences.

    Rows are grouped by video_id in first-appearance order; within a video,
    rows are sorted by frame_index. Pure function of its input: parallel
    parsing of distinct files shares no state.

    Raises SchemaError, DuplicateFrame, or UnknownVideo with line numbers.
    """
    text = _as_text(stream)
    sequences: dict[str, LandmarkSequence] = {}
    seen: set[tuple[str, int]] = set()

    for line_no, line in enumerate(text, start=1):
        line = line.rstrip("\r\n")
        if not line:
            continue
        if line_no == 1:
            if line != CSV_HEADER:
                raise SchemaError(1, "unexpected header")
            continue
        cells = line.split(",")
        if len(cells) != N_COLUMNS:
            raise SchemaError(line_no, f"expected {N_COLUMNS} columns, got {len(cells)}")
        video_id = cells[0]
        if video_id not in manifest:
            raise UnknownVideo(line_no, video_id)
        try:
            frame_index = int(cells[1])
            height = int(cells[2])
            width = int(cells[3])
            coords = [float(c) for c in cells[4:]]
        except ValueError as exc:
            raise SchemaError(line_no, f"non-numeric cell: {exc}") from None
        key = (video_id, frame_index)
        if key in seen:
            raise DuplicateFrame(line_no, video_id, frame_index)
        seen.add(key)

        points = [Point2(coords[2 * i], coords[2 * i + 1]) for i in range(N_POINTS)]
        frame = LandmarkFrame(video_id, frame_index, height, width, points)
        seq = sequences.get(video_id)
        if seq is None:
            seq = LandmarkSequence(video_id, manifest[video_id])
            sequences[video_id] = seq
        seq.frames.append(frame)

    for seq in sequences.values():
        seq.frames.sort(key=lambda f: f.frame_index)
    return list(sequences.values())


def serialize_csv(sequences: Iterable[LandmarkSequence]) -> str:
    """Inverse of parse_csv up to float formatting (repr round-trips exactly)."""
    lines = [CSV_HEADER]
    for seq in sequences:
        for frame in seq.frames:
            cells = [
                frame.video_id,
                str(frame.frame_index),
                str(frame.image_height),
                str(frame.image_width),
            ]
            for p in frame.points:
                cells.append(repr(p.x))
                cells.append(repr(p.y))
            lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def serialize_manifest(manifest: LabelManifest) -> str:
    lines = ["video_id,label"]
    for vid, label in manifest.items():
        lines.append(f"{vid},{label}")
    return "\n".join(lines) + "\n"


def validate_sequence(seq: LandmarkSequence) -> list[Violation]:
    """Check LandmarkFrame invariants; violations are data, not failures."""
    violations: list[Violation] = []
    if seq.label not in (0, 1):
        violations.append(Violation("BadLabel", -1, f"label={seq.label!r}"))
    prev_index = None
    for frame in seq.frames:
        if len(frame.points) != N_POINTS:
            violations.append(
                Violation("PointCount", frame.frame_index, f"{len(frame.points)} points")
            )
        if frame.video_id != seq.video_id:
            violations.append(
                Violation("VideoIdMismatch", frame.frame_index, frame.video_id)
            )
        if prev_index is not None and frame.frame_index <= prev_index:
            violations.append(
                Violation("NonMonotonic", frame.frame_index, f"follows {prev_index}")
            )
        prev_index = frame.frame_index
    return violations
