"""Thin-client CLI: every subcommand talks to the HTTP service.

With --server the client hits a remote instance; otherwise the service app is
mounted in-process, so single-machine runs stay hermetic and deterministic
(LFX_THREADS=1 guarantees bit-identical replays).

Exit codes: 0 success, 1 data/numeric error, 2 environment/I/O error.
"""

from __future__ import annotations

import json
import sys
from dataclasses import asdict

import click

from .config import RunConfig, parse_rounds

EXIT_DATA = 1
EXIT_ENV = 2


def _client(server: str | None):
    if server:
        import httpx

        return httpx.Client(base_url=server, timeout=3600.0)
    # in-process: import lazily so remote mode never loads numpy/the app
    from fastapi.testclient import TestClient

    from .service import app

    return TestClient(app)


def _post(server, path, payload):
    try:
        client = _client(server)
        response = client.post(path, json=payload)
    except Exception as exc:  # connection refused, bad URL, ...
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_ENV)
    if response.status_code == 422:
        click.echo(f"error: {_detail(response)}", err=True)
        sys.exit(EXIT_DATA)
    if response.status_code != 200:
        click.echo(f"error: {_detail(response)}", err=True)
        sys.exit(EXIT_ENV)
    return response.json()


def _detail(response):
    try:
        return response.json().get("detail", response.text)
    except (ValueError, AttributeError):
        return response.text


def _build_config(config_path, **overrides) -> dict:
    cfg = RunConfig.load(config_path) if config_path else RunConfig()
    payload = asdict(cfg)
    for key, value in overrides.items():
        if value is not None:
            payload[key] = value
    return payload


common_options = [
    click.option("--config", "config_path", type=click.Path(exists=True),
                 help="JSON run config; flags override its fields."),
    click.option("--server", help="base URL of a running lfx service; "
                                  "default runs in-process."),
    click.option("--seed", type=int, default=None),
    click.option("--out", "out_dir", default=None, help="output directory."),
]


def add_options(options):
    def wrap(fn):
        for option in reversed(options):
            fn = option(fn)
        return fn
    return wrap


@click.group()
def main():
    """Deepfake detection from facial-landmark time series."""


@main.command("synth")
@add_options(common_options)
@click.option("--n-real", type=int, default=None)
@click.option("--n-fake", type=int, default=None)
@click.option("--frames", type=int, default=None)
@click.option("--jitter-amplitude", type=float, default=None)
def cmd_synth(config_path, server, **overrides):
    """Generate a synthetic labeled landmark corpus (CSV + manifest)."""
    payload = _build_config(config_path, **overrides)
    result = _post(server, "/synth", payload)
    click.echo(f"csv={result['csv_path']} manifest={result['manifest_path']} "
               f"videos={result['videos']} rows={result['rows']}")


@main.command("preprocess")
@add_options(common_options)
@click.option("--csv", "csv_path", default=None)
@click.option("--manifest", "manifest_path", default=None)
def cmd_preprocess(config_path, server, **overrides):
    """Ingest the landmark CSV and build the 720-frame segment store."""
    payload = _build_config(config_path, **overrides)
    result = _post(server, "/preprocess", payload)
    click.echo(f"videos={result['videos']} segments={result['segments']} "
               f"dropped={result['dropped']}")


@main.command("train")
@add_options(common_options)
@click.option("--model", type=click.Choice(["ann", "rnn", "cnn"]), default=None)
@click.option("--epochs", type=int, default=None)
@click.option("--batch-size", type=int, default=None)
@click.option("--lr", type=float, default=None)
@click.option("--rounds", default=None, help='staged schedule "e:b,e:b,e:b".')
@click.option("--raster-res", "raster_resolution", type=int, default=None)
@click.option("--noise-sigma", type=float, default=None)
def cmd_train(config_path, server, rounds, **overrides):
    """Train the configured model and evaluate it on the test partition."""
    payload = _build_config(config_path, **overrides)
    if rounds is not None:
        payload["rounds"] = parse_rounds(rounds)
    result = _post(server, "/train", payload)
    click.echo(f"checkpoint={result['checkpoint']} report={result['report']}")
    click.echo(
        f"kind={result['kind']} accuracy={result['accuracy']:.4f} "
        f"precision={result['precision']:.4f} recall={result['recall']:.4f} "
        f"f1={result['f1']:.4f} roc_auc={result['roc_auc']:.4f}"
    )


@main.command("report")
@click.argument("run_dir")
@click.option("--server", help="base URL of a running lfx service.")
def cmd_report(run_dir, server):
    """Summarize completed runs as one table row per run."""
    rows = _post(server, "/report", {"run_dir": run_dir})
    header = f"{'Model':<8}{'Accuracy':>10}{'Precision':>11}{'Recall':>9}{'F1':>8}{'ROC-AUC':>10}"
    click.echo(header)
    for row in rows:
        click.echo(
            f"{row['kind'].upper():<8}{row['accuracy']:>10.4f}"
            f"{row['precision']:>11.4f}{row['recall']:>9.4f}"
            f"{row['f1']:>8.4f}{row['roc_auc']:>10.4f}"
        )


if __name__ == "__main__":
    main()
