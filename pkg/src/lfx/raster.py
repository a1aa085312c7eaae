"""Trajectory images: one-second landmark splices drawn as 68-channel rasters.

Each landmark's path over one second (24 frames) is drawn as a polyline on an
R x R grid with Bresenham line stepping; the 68 per-point rasters stack into
one image. Gaussian pixel noise is added at training time only.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .landmarks import N_POINTS
from .preprocess import Segment, SEGMENT_FRAMES

SPLICE_FRAMES = 24  # 720 frames / 30 seconds
SPLICES_PER_SEGMENT = SEGMENT_FRAMES // SPLICE_FRAMES
DEFAULT_RESOLUTION = 32
DEFAULT_NOISE_SIGMA = 0.01


class ChannelCount(ValueError):
    pass


@dataclass
class TrajectoryImage:
    pixels: np.ndarray  # (68, R, R)
    label: int
    source_segment_id: str
    splice_index: int


def splice(segment: Segment) -> list[np.ndarray]:
    """Cut a segment's position block into 30 non-overlapping (24, 68, 2) splices."""
    positions = segment.features[:, : 2 * N_POINTS].reshape(SEGMENT_FRAMES, N_POINTS, 2)
    return [
        positions[k * SPLICE_FRAMES : (k + 1) * SPLICE_FRAMES]
        for k in range(SPLICES_PER_SEGMENT)
    ]


def _to_cell(value: float, resolution: int) -> int:
    # unit interval -> grid cell, with 1.0 landing in the last cell
    return min(int(value * resolution), resolution - 1)


def bresenham(x0: int, y0: int, x1: int, y1: int) -> list[tuple[int, int]]:
    """Integer line stepping between two grid cells, endpoints included."""
    points = []
    dx = abs(x1 - x0)
    dy = -abs(y1 - y0)
    sx = 1 if x0 < x1 else -1
    sy = 1 if y0 < y1 else -1
    err = dx + dy
    x, y = x0, y0
    while True:
        points.append((x, y))
        if x == x1 and y == y1:
            break
        e2 = 2 * err
        if e2 >= dy:
            err += dy
            x += sx
        if e2 <= dx:
            err += dx
            y += sy
    return points


def rasterize_point(trajectory: np.ndarray, resolution: int = DEFAULT_RESOLUTION) -> np.ndarray:
    """Draw one landmark's trajectory (N x 2 points in [0,1]^2) onto an R x R grid.

    Visited pixels are set to 1.0; a stationary point lights exactly one cell.
    Rows index y, columns index x.
    """
    grid = np.zeros((resolution, resolution))
    cells = [(_to_cell(x, resolution), _to_cell(y, resolution)) for x, y in trajectory]
    for (x0, y0), (x1, y1) in zip(cells, cells[1:]):
        for x, y in bresenham(x0, y0, x1, y1):
            grid[y, x] = 1.0
    if len(cells) == 1:
        grid[cells[0][1], cells[0][0]] = 1.0
    return grid


def derive_splice_seed(global_seed: int, segment_id: str, splice_index: int) -> int:
    """Per-splice seed so parallel rasterization order never changes results."""
    digest = hashlib.sha256(
        f"{global_seed}:{segment_id}:{splice_index}".encode()
    ).digest()
    return int.from_bytes(digest[:8], "little")


def stack_and_noise(
    rasters: list[np.ndarray],
    sigma: float = DEFAULT_NOISE_SIGMA,
    seed: int = 0,
    training: bool = True,
) -> np.ndarray:
    """Stack 68 per-point rasters and add i.i.d. Gaussian pixel noise when training."""
    if len(rasters) != N_POINTS:
        raise ChannelCount(f"expected {N_POINTS} rasters, got {len(rasters)}")
    image = np.stack(rasters)
    if training and sigma > 0:
        rng = np.random.default_rng(seed)
        image = image + rng.normal(0.0, sigma, size=image.shape)
    return image


def segment_to_images(
    segment: Segment,
    resolution: int = DEFAULT_RESOLUTION,
    sigma: float = DEFAULT_NOISE_SIGMA,
    global_seed: int = 0,
    training: bool = True,
) -> list[TrajectoryImage]:
    """Full CNN-path conversion: one segment -> 30 labeled TrajectoryImages."""
    segment_id = f"{segment.source_video_id}#{segment.segment_index}"
    images = []
    for idx, block in enumerate(splice(segment)):
        rasters = [rasterize_point(block[:, p], resolution) for p in range(N_POINTS)]
        seed = derive_splice_seed(global_seed, segment_id, idx)
        pixels = stack_and_noise(rasters, sigma=sigma, seed=seed, training=training)
        images.append(TrajectoryImage(pixels, segment.label, segment_id, idx))
    return images


def write_pgm(path, raster: np.ndarray) -> None:
    """Dump one channel as a binary P5 grayscale image for inspection."""
    h, w = raster.shape
    levels = np.clip(raster * 255.0, 0, 255).astype(np.uint8)
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode())
        fh.write(levels.tobytes())
