"""Scorer service hosting a real seq2seq model behind the v1 wire protocol."""

from .app import create_app
from .hosted import HostedScorer, ScoredSequence, ServiceConfig
from .tinymodel import MODEL_NAME, build_tiny_model

__version__ = "0.1.0"

__all__ = [
    "MODEL_NAME",
    "HostedScorer",
    "ScoredSequence",
    "ServiceConfig",
    "build_tiny_model",
    "create_app",
]
