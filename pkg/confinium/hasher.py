import dataclasses
import hashlib
import json
import logging
import math
import os
from enum import Enum
from typing import Any

import numpy as np

logger = logging.getLogger(__name__)


class HashWriter:
    """Adapter to stream write operations to a hasher."""
    def __init__(self, hasher):
        self.hasher = hasher

    def write(self, data):
        if isinstance(data, str):
            self.hasher.update(data.encode('utf-8'))
        elif isinstance(data, bytes):
            self.hasher.update(data)

    def flush(self):
        pass


def _finite(obj: Any) -> Any:
    """Replace non-finite floats by strings so output stays strict JSON."""
    if isinstance(obj, float):
        if math.isnan(obj):
            return "nan"
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        return obj
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.floating):
        return _finite(float(obj))
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [_finite(x) for x in obj.tolist()]
    if isinstance(obj, Enum):
        return obj.value
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        if hasattr(obj, "to_dict"):
            return _finite(obj.to_dict())
        return _finite({f.name: getattr(obj, f.name) for f in dataclasses.fields(obj)})
    if isinstance(obj, dict):
        return {str(k): _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(x) for x in obj]
    return obj


class StableJSONEncoder(json.JSONEncoder):
    """
    JSON encoder for report documents: numpy scalars and arrays, enums and
    dataclasses become plain JSON; anything else falls back to ``str``.
    """
    def default(self, obj):
        converted = _finite(obj)
        if converted is not obj:
            return converted
        return str(obj)


class Hasher:
    @staticmethod
    def canonical_json(obj: Any, indent: int = 2) -> str:
        """Deterministic JSON text (sorted keys, strict floats, trailing newline)."""
        return json.dumps(_finite(obj), cls=StableJSONEncoder, sort_keys=True,
                          indent=indent, allow_nan=False) + "\n"

    @staticmethod
    def digest(obj: Any) -> str:
        """SHA-256 of the compact canonical JSON of ``obj``."""
        sha256 = hashlib.sha256()
        writer = HashWriter(sha256)
        json.dump(_finite(obj), writer, cls=StableJSONEncoder, sort_keys=True,
                  separators=(",", ":"), allow_nan=False)
        return sha256.hexdigest()

    @staticmethod
    def hash_file(filepath: str) -> str:
        """Hash a file using SHA-256."""
        if not os.path.exists(filepath):
            return "N/A"
        sha256 = hashlib.sha256()
        with open(filepath, "rb") as f:
            for chunk in iter(lambda: f.read(4096), b""):
                sha256.update(chunk)
        return sha256.hexdigest()
