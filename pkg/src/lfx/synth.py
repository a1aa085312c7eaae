"""Seeded synthetic landmark corpus with a controllable temporal-fakery signal.

Real videos move a canonical 68-point face template with smooth sinusoidal
head motion and per-group articulation. Fake videos get the identical smooth
motion plus per-frame independent jitter on a random subset of points: a
discontinuity visible in the differential features but not in any single
frame's pooled geometry. With jitter amplitude 0 the two classes are
statistically identical (the null-signal control).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .landmarks import GROUPS, LandmarkFrame, LandmarkSequence, N_POINTS, Point2
from .seeds import derive_seed

FPS = 24.0
IMAGE_SIZE = 256


@dataclass
class SynthConfig:
    n_real: int = 60
    n_fake: int = 60
    frames: int = 720
    jitter_amplitude: float = 0.12  # alpha; 0 disables the fake signal
    jitter_prob: float = 0.8        # rho, per point per frame
    motion_amplitude: float = 0.05
    seed: int = 42


def face_template() -> np.ndarray:
    """Canonical 68-point face in roughly [0.2, 0.8]^2, built from simple arcs.

    Not anatomically exact; only the group structure and distinct per-point
    positions matter to the classifiers.
    """
    pts = np.zeros((N_POINTS, 2))
    # chin: lower half-ellipse
    theta = np.linspace(np.pi, 2 * np.pi, 17)
    pts[0:17, 0] = 0.5 + 0.28 * np.cos(theta)
    pts[0:17, 1] = 0.45 - 0.33 * np.sin(theta)
    # eyebrows: shallow arcs
    for start, cx in ((17, 0.36), (22, 0.64)):
        xs = np.linspace(cx - 0.10, cx + 0.10, 5)
        pts[start : start + 5, 0] = xs
        pts[start : start + 5, 1] = 0.33 - 0.02 * np.sin(np.linspace(0, np.pi, 5))
    # nose bridge and bottom
    pts[27:31, 0] = 0.5
    pts[27:31, 1] = np.linspace(0.38, 0.52, 4)
    pts[31:36, 0] = np.linspace(0.44, 0.56, 5)
    pts[31:36, 1] = 0.56
    # eyes: small hexagons
    for start, cx in ((36, 0.37), (42, 0.63)):
        ang = np.linspace(0, 2 * np.pi, 6, endpoint=False)
        pts[start : start + 6, 0] = cx + 0.05 * np.cos(ang)
        pts[start : start + 6, 1] = 0.40 + 0.025 * np.sin(ang)
    # lips: outer ring of 12, inner ring of 8
    ang = np.linspace(0, 2 * np.pi, 12, endpoint=False)
    pts[48:60, 0] = 0.5 + 0.09 * np.cos(ang)
    pts[48:60, 1] = 0.68 + 0.04 * np.sin(ang)
    ang = np.linspace(0, 2 * np.pi, 8, endpoint=False)
    pts[60:68, 0] = 0.5 + 0.05 * np.cos(ang)
    pts[60:68, 1] = 0.68 + 0.02 * np.sin(ang)
    return pts


def _make_video(rng: np.random.Generator, n_frames: int, alpha: float,
                rho: float, motion: float) -> np.ndarray:
    """One video's (frames, 68, 2) raw coordinates."""
    template = face_template()
    t = np.arange(n_frames) / FPS

    # smooth global head motion (per axis)
    coords = np.broadcast_to(template, (n_frames, N_POINTS, 2)).copy()
    for axis in range(2):
        freq = rng.uniform(0.1, 0.5)
        phase = rng.uniform(0, 2 * np.pi)
        coords[:, :, axis] += (motion * np.sin(2 * np.pi * freq * t + phase))[:, None]

    # smooth per-group articulation (eyes blink-ish, lips talk-ish, ...)
    for indices in GROUPS.values():
        idx = list(indices)
        for axis in range(2):
            amp = motion * 0.4 * rng.uniform(0.2, 1.0)
            freq = rng.uniform(0.3, 2.0)
            phase = rng.uniform(0, 2 * np.pi)
            coords[:, idx, axis] += (amp * np.sin(2 * np.pi * freq * t + phase))[:, None]

    if alpha > 0:
        # the fakery: independent per-frame jitter on a random point subset
        mask = rng.random((n_frames, N_POINTS)) < rho
        jitter = rng.uniform(-alpha, alpha, size=(n_frames, N_POINTS, 2))
        coords += jitter * mask[:, :, None]
    return coords


def generate(config: SynthConfig) -> list[LandmarkSequence]:
    """Build the labeled corpus; bit-identical for a given config."""
    if config.n_real < 1 or config.n_fake < 1:
        raise ValueError("need at least one video per class")
    sequences = []
    specs = [(f"real_{k:03d}", 0) for k in range(config.n_real)]
    specs += [(f"fake_{k:03d}", 1) for k in range(config.n_fake)]
    for video_id, label in specs:
        rng = np.random.default_rng(derive_seed(config.seed, "synth", video_id))
        alpha = config.jitter_amplitude if label == 1 else 0.0
        coords = _make_video(rng, config.frames, alpha, config.jitter_prob,
                             config.motion_amplitude)
        frames = [
            LandmarkFrame(
                video_id, frame_idx, IMAGE_SIZE, IMAGE_SIZE,
                [Point2(float(x), float(y)) for x, y in coords[frame_idx]],
            )
            for frame_idx in range(config.frames)
        ]
        sequences.append(LandmarkSequence(video_id, label, frames))
    return sequences


def manifest_for(sequences: list[LandmarkSequence]) -> dict:
    return {seq.video_id: seq.label for seq in sequences}
