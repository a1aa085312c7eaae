"""Landmark CSV wire format (writer side).

One row per face-bearing frame, 140 columns:
``video_id,frame_index,image_height,image_width,p0_x,p0_y,...,p67_x,p67_y``.
Floats are written with repr so they round-trip exactly.
"""

from __future__ import annotations

import numpy as np

N_POINTS = 68

CSV_HEADER = "video_id,frame_index,image_height,image_width," + ",".join(
    f"p{i}_{axis}" for i in range(N_POINTS) for axis in ("x", "y")
)


def format_row(video_id: str, frame_index: int, height: int, width: int,
               points: np.ndarray) -> str:
    if points.shape != (N_POINTS, 2):
        raise ValueError(f"expected ({N_POINTS}, 2) points, got {points.shape}")
    cells = [video_id, str(frame_index), str(height), str(width)]
    for x, y in points:
        cells.append(repr(float(x)))
        cells.append(repr(float(y)))
    return ",".join(cells)
