"""Deepfake detection from facial-landmark time series.

Core package: CSV ingestion, 720-frame standardization with differential
features, three from-scratch neural classifiers (ANN, LSTM-RNN,
trajectory-image CNN), training/evaluation pipeline, and a synthetic
corpus generator for end-to-end verification.
"""

import os

# LFX_THREADS caps BLAS worker counts; must be exported before numpy
# initializes its threadpools, so this module must be imported before
# numpy anywhere in the process for the cap to take effect.
_threads = os.environ.get("LFX_THREADS")
if _threads:
    for _var in (
        "OMP_NUM_THREADS",
        "OPENBLAS_NUM_THREADS",
        "MKL_NUM_THREADS",
        "NUMEXPR_NUM_THREADS",
    ):
        os.environ.setdefault(_var, _threads)

__version__ = "0.1.0"
