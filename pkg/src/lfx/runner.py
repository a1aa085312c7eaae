"""End-to-end run orchestration shared by the HTTP service and the CLI."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from . import landmarks, pipeline, preprocess, raster, synth
from .config import RunConfig
from .models import ModelSpec, build
from .seeds import derive_seed


class DataError(ValueError):
    """Schema or numeric problem in the input data (CLI exit code 1)."""


def run_synth(cfg: RunConfig) -> dict:
    """Generate the synthetic corpus and write CSV + manifest."""
    cfg = cfg.resolved()
    config = synth.SynthConfig(
        n_real=cfg.n_real,
        n_fake=cfg.n_fake,
        frames=cfg.frames,
        jitter_amplitude=cfg.jitter_amplitude,
        jitter_prob=cfg.jitter_prob,
        motion_amplitude=cfg.motion_amplitude,
        seed=cfg.seed,
    )
    sequences = synth.generate(config)
    Path(cfg.out_dir).mkdir(parents=True, exist_ok=True)
    Path(cfg.csv_path).write_text(landmarks.serialize_csv(sequences))
    Path(cfg.manifest_path).write_text(
        landmarks.serialize_manifest(synth.manifest_for(sequences))
    )
    rows = sum(len(s.frames) for s in sequences)
    return {
        "csv_path": cfg.csv_path,
        "manifest_path": cfg.manifest_path,
        "videos": len(sequences),
        "rows": rows,
    }


def run_preprocess(cfg: RunConfig) -> dict:
    """Ingest the CSV, build segments, and write the segment store."""
    cfg = cfg.resolved()
    try:
        with open(cfg.manifest_path) as fh:
            manifest = landmarks.parse_manifest(fh)
        with open(cfg.csv_path) as fh:
            sequences = landmarks.parse_csv(fh, manifest)
    except (landmarks.SchemaError, landmarks.DuplicateFrame, landmarks.UnknownVideo) as exc:
        raise DataError(str(exc)) from exc
    for seq in sequences:
        violations = landmarks.validate_sequence(seq)
        if violations:
            raise DataError(f"video {seq.video_id!r}: {violations[0]}")
    segments, dropped = preprocess.preprocess_sequences(sequences)
    preprocess.save_segments(segments, cfg.segments_dir)
    return {
        "segments_dir": cfg.segments_dir,
        "videos": len(sequences),
        "segments": len(segments),
        "dropped": dropped,
    }


def _model_spec(cfg: RunConfig) -> ModelSpec:
    spec = ModelSpec(kind=cfg.model, seed=derive_seed(cfg.seed, "init"),
                     raster_resolution=cfg.raster_resolution)
    if cfg.ann_widths:
        spec.ann_widths = tuple(cfg.ann_widths)
    if cfg.lstm_units:
        spec.lstm_units = tuple(cfg.lstm_units)
    return spec


def _segment_features(segments, dtype=np.float64):
    x = np.stack([s.features for s in segments]).astype(dtype)
    y = np.array([s.label for s in segments], dtype=np.float64)
    return x, y


def _segment_images(segments, cfg: RunConfig, training: bool):
    images = []
    labels = []
    for segment in segments:
        for img in raster.segment_to_images(
            segment,
            resolution=cfg.raster_resolution,
            sigma=cfg.noise_sigma,
            global_seed=derive_seed(cfg.seed, "noise"),
            training=training,
        ):
            images.append(img.pixels)
            labels.append(img.label)
    return np.stack(images), np.array(labels, dtype=np.float64)


def run_train(cfg: RunConfig) -> dict:
    """Split, train the configured model, evaluate on test, emit artifacts."""
    cfg = cfg.resolved()
    segments = preprocess.load_segments(cfg.segments_dir)
    if not segments:
        raise DataError("segment store is empty")

    video_labels = {}
    for s in segments:
        video_labels[s.source_video_id] = s.label
    plan = pipeline.split(video_labels, cfg.fractions, derive_seed(cfg.seed, "split"))
    plan.assert_valid(video_labels)

    parts = {
        "train": [s for s in segments if s.source_video_id in plan.train],
        "val": [s for s in segments if s.source_video_id in plan.validation],
        "test": [s for s in segments if s.source_video_id in plan.test],
    }

    if cfg.model == "cnn":
        x_train, y_train = _segment_images(parts["train"], cfg, training=True)
        x_val, y_val = _segment_images(parts["val"], cfg, training=False)
        x_test, y_test = _segment_images(parts["test"], cfg, training=False)
    else:
        x_train, y_train = _segment_features(parts["train"])
        x_val, y_val = _segment_features(parts["val"])
        x_test, y_test = _segment_features(parts["test"])

    model = build(_model_spec(cfg))
    shuffle_rng = np.random.default_rng(derive_seed(cfg.seed, "shuffle"))
    if cfg.rounds:
        curves, _ = pipeline.cross_validate(
            model, x_train, y_train, x_val, y_val,
            rounds=[tuple(r) for r in cfg.rounds], lr=cfg.lr, shuffle_rng=shuffle_rng,
        )
    else:
        curves = pipeline.train(
            model, x_train, y_train, x_val, y_val,
            epochs=cfg.epochs, batch_size=cfg.batch_size, lr=cfg.lr,
            shuffle_rng=shuffle_rng,
        )

    _, _, test_scores = pipeline.evaluate(model, x_test, y_test)
    report = pipeline.metrics(test_scores, y_test.astype(int))
    report.curves = curves

    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    checkpoint_path = out / f"{cfg.model}.ckpt"
    report_path = out / f"{cfg.model}.report.txt"
    model.save(checkpoint_path)
    pipeline.write_report(report_path, cfg.model, cfg.seed, report)
    (out / f"{cfg.model}.config.json").write_text(cfg.to_json() + "\n")

    return {
        "checkpoint": str(checkpoint_path),
        "report": str(report_path),
        "kind": cfg.model,
        "accuracy": report.accuracy,
        "precision": report.precision,
        "recall": report.recall,
        "f1": report.f1,
        "roc_auc": report.roc_auc,
        "test_samples": int(len(y_test)),
    }


def run_report(run_dir) -> list[dict]:
    """Collect all run reports under a directory into Table-style rows."""
    run_dir = Path(run_dir)
    rows = []
    for path in sorted(run_dir.glob("**/*.report.txt")):
        header, _ = pipeline.read_report(path)
        rows.append({
            "kind": header["kind"],
            "accuracy": float(header["accuracy"]),
            "precision": float(header["precision"]),
            "recall": float(header["recall"]),
            "f1": float(header["f1"]),
            "roc_auc": float(header["roc_auc"]),
            "path": str(path),
        })
    if not rows:
        raise DataError(f"no run reports found under {run_dir}")
    return rows
