"""Lightweight BWT and LCP construction for large string collections."""
from .engine import EngineConfig, Monitor, RunResult, compute, run
from .model import DNA, Alphabet, GsaEntry, SequenceCollection, validate_collection

__all__ = [
    "DNA",
    "Alphabet",
    "EngineConfig",
    "GsaEntry",
    "Monitor",
    "RunResult",
    "SequenceCollection",
    "compute",
    "run",
    "validate_collection",
]
__version__ = "0.1.0"
