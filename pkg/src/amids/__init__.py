"""Feedforward intrusion detection for smart-meter networks, trained on NSL-KDD."""
from ._accel import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]
