"""Embedding sidecar for keyscore's embedding-greedy kernel."""

from .app import create_app
from .cache import build_cache
from .encoders import (DEFAULT_MODEL_ID, EncoderRegistry, HashEncoder,
                       ModelInfo, UnknownModelError)

__version__ = "0.1.0"
