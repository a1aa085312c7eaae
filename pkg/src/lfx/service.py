"""HTTP service wrapping the pipeline: synth, preprocess, train, report.

The service works on server-side paths (it is a local orchestration daemon,
not a data-upload API): requests carry a run configuration, responses carry
the summary the CLI prints.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import __version__
from .config import RunConfig
from .pipeline import NonFiniteLoss
from .runner import DataError, run_preprocess, run_report, run_synth, run_train


class RunConfigBody(BaseModel):
    """Request body mirroring RunConfig; omitted fields use the defaults."""

    out_dir: str = "runs/default"
    csv_path: str = ""
    manifest_path: str = ""
    segments_dir: str = ""
    seed: int = 42
    n_real: int = 60
    n_fake: int = 60
    frames: int = 720
    jitter_amplitude: float = 0.12
    jitter_prob: float = 0.8
    motion_amplitude: float = 0.05
    model: str = Field(default="rnn", pattern="^(ann|rnn|cnn)$")
    epochs: int = 8
    batch_size: int = 16
    lr: float = 0.0005
    rounds: list[list[int]] | None = None
    fractions: tuple[float, float, float] = (0.70, 0.15, 0.15)
    ann_widths: list[int] | None = [64, 32, 16, 8, 8]
    lstm_units: list[int] | None = None
    raster_resolution: int = 32
    noise_sigma: float = 0.01

    def to_config(self) -> RunConfig:
        return RunConfig.from_dict(self.model_dump())


class SynthResponse(BaseModel):
    csv_path: str
    manifest_path: str
    videos: int
    rows: int


class PreprocessResponse(BaseModel):
    segments_dir: str
    videos: int
    segments: int
    dropped: int


class TrainResponse(BaseModel):
    checkpoint: str
    report: str
    kind: str
    accuracy: float
    precision: float
    recall: float
    f1: float
    roc_auc: float
    test_samples: int


class ReportRequest(BaseModel):
    run_dir: str


class ReportRow(BaseModel):
    kind: str
    accuracy: float
    precision: float
    recall: float
    f1: float
    roc_auc: float
    path: str


app = FastAPI(title="lfx", version=__version__)


@app.get("/health")
def health():
    return {"status": "ok", "version": __version__}


@app.post("/synth", response_model=SynthResponse)
def synth_endpoint(body: RunConfigBody):
    try:
        return run_synth(body.to_config())
    except OSError as exc:
        raise HTTPException(status_code=500, detail=f"cannot write output: {exc}")


@app.post("/preprocess", response_model=PreprocessResponse)
def preprocess_endpoint(body: RunConfigBody):
    try:
        return run_preprocess(body.to_config())
    except DataError as exc:
        raise HTTPException(status_code=422, detail=str(exc))
    except FileNotFoundError as exc:
        raise HTTPException(status_code=500, detail=str(exc))


@app.post("/train", response_model=TrainResponse)
def train_endpoint(body: RunConfigBody):
    try:
        return run_train(body.to_config())
    except (DataError, NonFiniteLoss) as exc:
        raise HTTPException(status_code=422, detail=str(exc))
    except FileNotFoundError as exc:
        raise HTTPException(status_code=500, detail=str(exc))


@app.post("/report", response_model=list[ReportRow])
def report_endpoint(body: ReportRequest):
    try:
        return run_report(body.run_dir)
    except DataError as exc:
        raise HTTPException(status_code=422, detail=str(exc))
