"""Trust-score history and fluctuation analysis.

A healthy score moves in small steps; large consecutive jumps are flagged as
abrupt.  History is stored as JSON Lines, one :class:`ScoreRecord` per line::

    {"timestamp": "2024-01-01T00:00:00+00:00", "raw": 0.33, "clamped": 0.33,
     "contributions": [{"name": "Uptime", "value": 0.14}, ...]}
"""

from __future__ import annotations

import enum
import json
import math
import os
import statistics
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Iterable

from .errors import FormatError, InsufficientDataError, OrderingError, ValidationError
from .score import ScoreRecord

DEFAULT_WINDOW = 8
DEFAULT_ABRUPT_THRESHOLD = 0.2


class Verdict(str, enum.Enum):
    Gentle = "Gentle"
    Abrupt = "Abrupt"


@dataclass(frozen=True)
class FluctuationReport:
    window: int
    max_abs_delta: float
    range: float
    std_dev: float
    verdict: Verdict


@dataclass(frozen=True)
class ScoreSeries:
    records: tuple[ScoreRecord, ...] = ()

    def __post_init__(self) -> None:
        recs = tuple(self.records)
        for prev, cur in zip(recs, recs[1:]):
            if not cur.timestamp > prev.timestamp:
                raise OrderingError(
                    f"timestamps must strictly increase: {cur.timestamp.isoformat()} "
                    f"follows {prev.timestamp.isoformat()}"
                )
        for r in recs:
            if not -1.0 <= r.clamped_score <= 1.0:
                raise ValidationError("clamped", f"must be in [-1, 1], got {r.clamped_score!r}")
        object.__setattr__(self, "records", recs)

    def __len__(self) -> int:
        return len(self.records)

    @property
    def scores(self) -> list[float]:
        return [r.clamped_score for r in self.records]

    def append(self, record: ScoreRecord) -> "ScoreSeries":
        if self.records and not record.timestamp > self.records[-1].timestamp:
            raise OrderingError(
                f"record at {record.timestamp.isoformat()} is not after the last "
                f"record at {self.records[-1].timestamp.isoformat()}"
            )
        return ScoreSeries(self.records + (record,))


def append(series: ScoreSeries, record: ScoreRecord) -> ScoreSeries:
    return series.append(record)


def fluctuation(
    series: ScoreSeries | Iterable[float],
    window: int = DEFAULT_WINDOW,
    abrupt_threshold: float = DEFAULT_ABRUPT_THRESHOLD,
) -> FluctuationReport:
    """Summarise movement over the trailing ``window`` scores.

    ``max_abs_delta`` is the largest change between consecutive scores and
    alone decides the verdict; ``range`` and ``std_dev`` (population) describe
    the spread of the window.
    """
    scores = series.scores if isinstance(series, ScoreSeries) else [float(s) for s in series]
    if window < 2:
        raise ValueError(f"window must be >= 2, got {window!r}")
    if len(scores) < window:
        raise InsufficientDataError(
            f"need at least {window} records for window {window}, have {len(scores)}"
        )
    tail = scores[-window:]
    max_delta = max(abs(b - a) for a, b in zip(tail, tail[1:]))
    return FluctuationReport(
        window=window,
        max_abs_delta=max_delta,
        range=max(tail) - min(tail),
        std_dev=statistics.pstdev(tail),
        verdict=Verdict.Abrupt if max_delta > abrupt_threshold else Verdict.Gentle,
    )


# --------------------------------------------------------------------------
# JSONL persistence
# --------------------------------------------------------------------------


def format_timestamp(ts: datetime) -> str:
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.isoformat()


def parse_timestamp(text: str) -> datetime:
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    ts = datetime.fromisoformat(text)
    if ts.tzinfo is None:
        raise ValueError(f"timestamp {text!r} has no UTC offset")
    return ts


def record_to_json(record: ScoreRecord) -> dict[str, Any]:
    return {
        "timestamp": format_timestamp(record.timestamp),
        "raw": record.raw_score,
        "clamped": record.clamped_score,
        "contributions": [{"name": n, "value": v} for n, v in record.contributions],
    }


def record_from_json(obj: Any) -> ScoreRecord:
    if not isinstance(obj, dict):
        raise ValueError("record must be a JSON object")
    raw, clamped = obj["raw"], obj["clamped"]
    for name, v in (("raw", raw), ("clamped", clamped)):
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            raise ValueError(f"{name} must be a finite number, got {v!r}")
    return ScoreRecord(
        raw_score=float(raw),
        clamped_score=float(clamped),
        contributions=tuple((c["name"], float(c["value"])) for c in obj.get("contributions", [])),
        timestamp=parse_timestamp(obj["timestamp"]),
    )


def load_history(path: str | Path) -> ScoreSeries:
    """Read a history file.

    Raises:
        OSError: unreadable file.
        FormatError: malformed line (message carries the 1-based line number).
        OrderingError: timestamps out of order.
    """
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                records.append(record_from_json(json.loads(line)))
            except (KeyError, TypeError, ValueError) as exc:
                raise FormatError(f"{path}:{lineno}: malformed record ({exc})") from None
    return ScoreSeries(tuple(records))


def _last_timestamp(path: Path) -> datetime | None:
    last = None
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                last = line
    if last is None:
        return None
    return parse_timestamp(json.loads(last)["timestamp"])


def append_history(path: str | Path, record: ScoreRecord) -> None:
    """Append one record as a single flushed line.

    A single writer is assumed; readers may run concurrently and only ever see
    whole lines.
    """
    path = Path(path)
    if path.exists():
        last = _last_timestamp(path)
        if last is not None and not record.timestamp > last:
            raise OrderingError(
                f"record at {record.timestamp.isoformat()} is not after the last "
                f"record at {last.isoformat()}"
            )
    line = json.dumps(record_to_json(record), ensure_ascii=False) + "\n"
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(line)
        fh.flush()
        os.fsync(fh.fileno())


def save_history(path: str | Path, series: ScoreSeries) -> None:
    """Write a whole series, replacing the file atomically."""
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8") as fh:
        for r in series.records:
            fh.write(json.dumps(record_to_json(r), ensure_ascii=False) + "\n")
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)
