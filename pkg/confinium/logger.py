import contextvars
import datetime
import json
import logging
import os
import shutil
import threading
from contextlib import contextmanager
from typing import Any, Dict, Iterator, List, Optional, Tuple

from .hasher import Hasher

logger = logging.getLogger(__name__)

GENESIS_HASH = "0" * 64


class TraceLog:
    """NDJSON record of solver events, each entry chained to the previous one by SHA-256."""

    _active_trace = contextvars.ContextVar("active_trace", default=None)

    def __init__(self, stream_path: Optional[str] = None) -> None:
        self.log: List[Dict[str, Any]] = []
        self.sequence_number = 0
        self.previous_entry_hash = GENESIS_HASH
        self.stream_path = stream_path
        self._file_handle = None
        self._lock = threading.Lock()

        if self.stream_path:
            self.start_streaming(self.stream_path)

    def start_streaming(self, path: str) -> None:
        """Switch to streaming mode. Flushes the in-memory entries to the file."""
        with self._lock:
            if self._file_handle:
                return

            self.stream_path = path
            self._file_handle = open(path, "w", encoding="utf-8")
            for entry in self.log:
                self._file_handle.write(json.dumps(entry) + "\n")
            self._file_handle.flush()
            self.log = []

    def close(self) -> None:
        with self._lock:
            if self._file_handle:
                self._file_handle.close()
                self._file_handle = None

    def record(self, action: str, target: str, payload: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
        timestamp = datetime.datetime.now(datetime.timezone.utc).isoformat()
        payload = json.loads(Hasher.canonical_json(payload or {}))

        with self._lock:
            self.sequence_number += 1
            entry = {
                "timestamp": timestamp,
                "sequence_number": self.sequence_number,
                "previous_entry_hash": self.previous_entry_hash,
                "action": action,
                "target": target,
                "payload": payload,
            }
            self.previous_entry_hash = Hasher.digest(entry)

            if self._file_handle:
                self._file_handle.write(json.dumps(entry) + "\n")
                self._file_handle.flush()
            else:
                self.log.append(entry)
        return entry

    def entries(self) -> List[Dict[str, Any]]:
        if self.stream_path and os.path.exists(self.stream_path):
            with self._lock:
                if self._file_handle:
                    self._file_handle.flush()
            return TraceLog.read(self.stream_path)
        return list(self.log)

    def save(self, filepath: str) -> None:
        if self.stream_path:
            self.close()
            if os.path.abspath(filepath) != os.path.abspath(self.stream_path):
                shutil.copy(self.stream_path, filepath)
        else:
            with open(filepath, "w", encoding="utf-8") as f:
                for entry in self.log:
                    f.write(json.dumps(entry) + "\n")

    @classmethod
    def active(cls) -> Optional["TraceLog"]:
        return cls._active_trace.get()

    @classmethod
    @contextmanager
    def recording(cls, path: Optional[str] = None) -> Iterator["TraceLog"]:
        """Make a trace the active one for the duration of the block."""
        trace = cls(stream_path=path)
        token = cls._active_trace.set(trace)
        try:
            yield trace
        finally:
            cls._active_trace.reset(token)
            trace.close()

    @staticmethod
    def read(path: str) -> List[Dict[str, Any]]:
        with open(path, "r", encoding="utf-8") as f:
            return [json.loads(line) for line in f if line.strip()]

    @staticmethod
    def verify_chain(path: str) -> Tuple[bool, Optional[int]]:
        """Re-derive the hash chain; returns (ok, first broken sequence number)."""
        expected = GENESIS_HASH
        for position, entry in enumerate(TraceLog.read(path), start=1):
            if entry.get("sequence_number") != position or entry.get("previous_entry_hash") != expected:
                logger.warning("trace chain broken at entry %d of %s", position, path)
                return False, position
            expected = Hasher.digest(entry)
        return True, None


def record_event(action: str, target: str, payload: Optional[Dict[str, Any]] = None) -> None:
    """Append to the active trace, if any."""
    trace = TraceLog.active()
    if trace is not None:
        trace.record(action, target, payload)
