"""The three classifier architectures, assembled from tensor_nn layers.

All three share a common interface: forward(batch, training) -> scores in
(0, 1), backward(dscore), params()/grads() for the optimizer, and
checkpoint round-tripping.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import tensor_nn as nn
from .landmarks import N_POINTS
from .preprocess import FEATURES_PER_FRAME, SEGMENT_FRAMES

SCORE_CLAMP = 1e-12


class InvalidSpec(ValueError):
    pass


@dataclass
class ModelSpec:
    kind: str  # "ann" | "rnn" | "cnn"
    seed: int = 0
    # rnn
    lstm_units: tuple = (64, 32)
    rnn_dense_units: int = 16
    rnn_dropout: float = 0.2
    # ann
    ann_widths: tuple = (512, 256, 128, 64, 32)
    ann_dropout: float = 0.3
    # cnn
    conv_channels: tuple = (32, 16)
    kernel_size: int = 3
    cnn_dropout: float = 0.25
    cnn_dense_units: int = 64
    raster_resolution: int = 32
    # input geometry (overridable for tiny grad-check builds)
    seq_len: int = SEGMENT_FRAMES
    feature_width: int = FEATURES_PER_FRAME
    channels: int = N_POINTS

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "seed": self.seed,
            "lstm_units": list(self.lstm_units),
            "rnn_dense_units": self.rnn_dense_units,
            "rnn_dropout": self.rnn_dropout,
            "ann_widths": list(self.ann_widths),
            "ann_dropout": self.ann_dropout,
            "conv_channels": list(self.conv_channels),
            "kernel_size": self.kernel_size,
            "cnn_dropout": self.cnn_dropout,
            "cnn_dense_units": self.cnn_dense_units,
            "raster_resolution": self.raster_resolution,
            "seq_len": self.seq_len,
            "feature_width": self.feature_width,
            "channels": self.channels,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ModelSpec":
        d = dict(d)
        for key in ("lstm_units", "ann_widths", "conv_channels"):
            if key in d:
                d[key] = tuple(d[key])
        return cls(**d)


class Classifier:
    """A Sequential pipeline ending in a sigmoid; scores are clamped into
    (0, 1) strictly."""

    def __init__(self, spec: ModelSpec, net: nn.Sequential):
        self.spec = spec
        self.net = net

    def forward(self, x: np.ndarray, training: bool = False) -> np.ndarray:
        scores = self.net.forward(x, training=training)[:, 0]
        return np.clip(scores, SCORE_CLAMP, 1.0 - SCORE_CLAMP)

    def backward(self, dscore: np.ndarray) -> np.ndarray:
        return self.net.backward(dscore[:, None])

    def params(self):
        return self.net.params()

    def grads(self):
        return self.net.grads()

    def parameter_count(self) -> int:
        return sum(int(np.prod(v.shape)) for v in self.params().values())

    def save(self, path) -> None:
        nn.save_checkpoint(path, self.spec.to_dict(), self.params())

    def load_params(self, tensors: dict[str, np.ndarray]) -> None:
        params = self.params()
        if set(params) != set(tensors):
            raise InvalidSpec("checkpoint tensor names do not match architecture")
        for name, value in tensors.items():
            if params[name].shape != value.shape:
                raise InvalidSpec(f"checkpoint tensor {name} shape mismatch")
            params[name][...] = value


def build(spec: ModelSpec) -> Classifier:
    """Construct a classifier from its spec with seeded Glorot init."""
    rng = np.random.default_rng(spec.seed)
    if spec.kind == "rnn":
        net = _build_rnn(spec, rng)
    elif spec.kind == "ann":
        net = _build_ann(spec, rng)
    elif spec.kind == "cnn":
        net = _build_cnn(spec, rng)
    else:
        raise InvalidSpec(f"unknown model kind {spec.kind!r}")
    return Classifier(spec, net)


def _build_rnn(spec, rng):
    if not spec.lstm_units:
        raise InvalidSpec("rnn needs at least one LSTM layer")
    layers = []
    width = spec.feature_width
    for i, units in enumerate(spec.lstm_units):
        last = i == len(spec.lstm_units) - 1
        layers.append(nn.LSTM(width, units, rng, return_sequences=not last))
        width = units
    layers.append(nn.Dense(width, spec.rnn_dense_units, rng))
    layers.append(nn.ReLU())
    layers.append(nn.Dropout(spec.rnn_dropout, rng))
    layers.append(nn.Dense(spec.rnn_dense_units, 1, rng))
    layers.append(nn.SigmoidLayer())
    return nn.Sequential(layers)


def _build_ann(spec, rng):
    if len(spec.ann_widths) != 5:
        raise InvalidSpec("ann uses exactly five dense layers before the output")
    layers = [nn.Flatten()]
    width = spec.seq_len * spec.feature_width
    for units in spec.ann_widths:
        layers.append(nn.Dense(width, units, rng))
        layers.append(nn.ReLU())
        layers.append(nn.Dropout(spec.ann_dropout, rng))
        width = units
    layers.append(nn.Dense(width, 1, rng))
    layers.append(nn.SigmoidLayer())
    return nn.Sequential(layers)


def _build_cnn(spec, rng):
    if len(spec.conv_channels) != 2:
        raise InvalidSpec("cnn uses exactly two convolutional layers")
    k = spec.kernel_size
    res = spec.raster_resolution
    if res - 2 * (k - 1) <= 0:
        raise InvalidSpec(f"kernel {k} too large for resolution {res}")
    layers = []
    c_in = spec.channels
    side = res
    for c_out in spec.conv_channels:
        layers.append(nn.Conv2d(c_in, c_out, k, rng))
        layers.append(nn.ReLU())
        layers.append(nn.Dropout(spec.cnn_dropout, rng))
        c_in = c_out
        side = side - k + 1
    layers.append(nn.Flatten())
    layers.append(nn.Dense(c_in * side * side, spec.cnn_dense_units, rng))
    layers.append(nn.ReLU())
    layers.append(nn.Dense(spec.cnn_dense_units, 1, rng))
    layers.append(nn.SigmoidLayer())
    return nn.Sequential(layers)


def load(path) -> Classifier:
    """Rebuild a classifier from a checkpoint; inference is bit-identical."""
    arch, tensors = nn.load_checkpoint(path)
    model = build(ModelSpec.from_dict(arch))
    model.load_params(tensors)
    return model


def predict_label(score: float) -> int:
    """Round a probability score to a class; a tie at 0.5 goes to fake (1)."""
    return 1 if score >= 0.5 else 0
