"""Run configuration: one serializable object reproduces a whole run."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .pipeline import DEFAULT_FRACTIONS


@dataclass
class RunConfig:
    # paths
    out_dir: str = "runs/default"
    csv_path: str = ""        # landmark CSV (defaults to <out_dir>/landmarks.csv)
    manifest_path: str = ""   # label manifest (defaults to <out_dir>/labels.csv)
    segments_dir: str = ""    # segment store (defaults to <out_dir>/segments)

    # root seed; every random stream derives from it by name
    seed: int = 42

    # synth corpus
    n_real: int = 60
    n_fake: int = 60
    frames: int = 720
    jitter_amplitude: float = 0.12
    jitter_prob: float = 0.8
    motion_amplitude: float = 0.05

    # model / training
    model: str = "rnn"
    epochs: int = 8
    batch_size: int = 16
    lr: float = 0.0005
    rounds: list | None = None  # [[epochs, batch], ...]; None = plain training
    fractions: tuple = DEFAULT_FRACTIONS

    # model hyperparameters (None = architecture defaults). The ANN default
    # here is narrower than ModelSpec's: with the full 720x544 flattened
    # input, 512-wide first layers need gigabytes of optimizer state.
    ann_widths: list | None = field(default_factory=lambda: [64, 32, 16, 8, 8])
    lstm_units: list | None = None

    # cnn path
    raster_resolution: int = 32
    noise_sigma: float = 0.01

    def resolved(self) -> "RunConfig":
        cfg = RunConfig(**asdict(self))
        out = Path(cfg.out_dir)
        cfg.csv_path = cfg.csv_path or str(out / "landmarks.csv")
        cfg.manifest_path = cfg.manifest_path or str(out / "labels.csv")
        cfg.segments_dir = cfg.segments_dir or str(out / "segments")
        return cfg

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        cfg = cls(**d)
        cfg.fractions = tuple(cfg.fractions)
        return cfg

    @classmethod
    def load(cls, path) -> "RunConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))


def parse_rounds(text: str) -> list[list[int]]:
    """Parse the CLI rounds syntax 'epochs:batch,epochs:batch,...'."""
    rounds = []
    for part in text.split(","):
        epochs, _, batch = part.partition(":")
        rounds.append([int(epochs), int(batch)])
    return rounds
