"""cardioseq: from-scratch 1D-CNN heart-disease classifier with baselines."""

from . import baselines, data, evaluation, model_io, network, synthetic, training

__all__ = [
    "baselines",
    "data",
    "evaluation",
    "model_io",
    "network",
    "synthetic",
    "training",
]

__version__ = "0.1.0"
