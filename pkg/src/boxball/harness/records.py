"""Run records: one JSON object per line."""

from __future__ import annotations

import json
import math
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from typing import IO

import numpy as np

from .. import __version__


@dataclass
class RunRecord:
    command: str
    seed: int | None
    spec: dict
    outputs: dict
    passed: bool | None = None
    timestamps: dict = field(default_factory=dict)
    version: str = __version__

    def to_json(self) -> str:
        data = {"command": self.command, "seed": self.seed, "spec": self.spec,
                "outputs": self.outputs, "version": self.version}
        if self.passed is not None:
            data["passed"] = self.passed
        if self.timestamps:
            data["timestamps"] = self.timestamps
        return json.dumps(jsonable(data), sort_keys=True, allow_nan=False)


def jsonable(obj):
    """Plain JSON values; non-finite floats become the strings ``"inf"`` etc."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating, Fraction)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    return obj


def now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


class RecordWriter:
    """Single writer appending records to a file or a stream."""

    def __init__(self, path: str | None = None, stream: IO[str] | None = None):
        self._path = path
        self._stream = stream or sys.stdout

    def write(self, record: RunRecord) -> None:
        line = record.to_json() + "\n"
        if self._path:
            with open(self._path, "a", encoding="utf-8") as fh:
                fh.write(line)
        else:
            self._stream.write(line)


def read_records(path: str) -> list[dict]:
    with open(path, encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]
