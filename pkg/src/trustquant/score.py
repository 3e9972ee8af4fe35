"""Weighted trust score over NIST AI RMF trustworthiness categories.

A metric vector ``M`` (fractions, presence flags and raw counts) is dotted with a
weight vector ``S`` and the result is clamped to ``[-1, 1]``.  Negative weights
penalise their metric, e.g. a crash count.

Weights are *not* required to sum to one; a non-unit sum only produces a
warning.  Count metrics enter the dot product as raw integers unless the caller
opts into per-entry capping (``count -> min(count / cap, 1)``).
"""

from __future__ import annotations

import enum
import json
import logging
import math
import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Iterable, Sequence

from .errors import ValidationError

log = logging.getLogger(__name__)

CONFUSION_TOLERANCE = 1e-9


class MetricCategory(str, enum.Enum):
    ReliabilityValidity = "ReliabilityValidity"
    Safety = "Safety"
    SecurityResilience = "SecurityResilience"
    AccountabilityTransparency = "AccountabilityTransparency"
    ExplainabilityInterpretability = "ExplainabilityInterpretability"
    Privacy = "Privacy"
    BiasManagement = "BiasManagement"


class MetricKind(str, enum.Enum):
    fraction = "fraction"
    flag = "flag"
    count = "count"


class ConfusionRole(str, enum.Enum):
    """Marks an entry as one cell of the confusion matrix.

    The four cells share the number of *categorisable* inferences as their
    denominator, so their fractions should add up to at most one.
    """

    TP = "TP"
    TN = "TN"
    FP = "FP"
    FN = "FN"


_ROLE_BY_NAME = re.compile(r"^\s*(true|false)\s+(positive|negative)s?\b", re.IGNORECASE)


def _infer_role(name: str) -> ConfusionRole | None:
    m = _ROLE_BY_NAME.match(name)
    if not m:
        return None
    return ConfusionRole(m.group(1)[0].upper() + m.group(2)[0].upper())


@dataclass(frozen=True)
class MetricEntry:
    """One measured trait.

    ``cap`` only matters for count metrics scored with ``normalize=True``.
    ``role`` is inferred from names like "True Positives/..." when omitted.
    """

    name: str
    category: MetricCategory
    kind: MetricKind
    value: float
    cap: float | None = None
    role: ConfusionRole | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "category", MetricCategory(self.category))
        object.__setattr__(self, "kind", MetricKind(self.kind))
        if self.role is None:
            object.__setattr__(self, "role", _infer_role(self.name))
        else:
            object.__setattr__(self, "role", ConfusionRole(self.role))

    def scored_value(self, normalize: bool = False) -> float:
        if normalize and self.kind is MetricKind.count and self.cap:
            return min(self.value / self.cap, 1.0)
        return float(self.value)


@dataclass(frozen=True)
class WeightVector:
    weights: tuple[float, ...]

    def __post_init__(self) -> None:
        ws = tuple(float(w) for w in self.weights)
        for i, w in enumerate(ws):
            if not math.isfinite(w):
                raise ValidationError(f"weights[{i}]", f"must be finite, got {w!r}")
        if not any(w != 0.0 for w in ws):
            raise ValidationError("weights", "must contain at least one nonzero entry")
        object.__setattr__(self, "weights", ws)

    def __len__(self) -> int:
        return len(self.weights)

    def __iter__(self):
        return iter(self.weights)

    @property
    def total(self) -> float:
        return math.fsum(self.weights)


@dataclass(frozen=True)
class ScoreRecord:
    raw_score: float
    clamped_score: float
    contributions: tuple[tuple[str, float], ...]
    timestamp: datetime


@dataclass(frozen=True)
class EntryCheck:
    index: int
    name: str
    ok: bool
    reason: str = ""


@dataclass
class ValidationReport:
    checks: list[EntryCheck] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    confusion_total: float | None = None

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    @property
    def failures(self) -> list[EntryCheck]:
        return [c for c in self.checks if not c.ok]


def _check_entry(entry: MetricEntry) -> str:
    v = entry.value
    if not isinstance(v, (int, float)) or isinstance(v, bool) or not math.isfinite(v):
        return f"value must be a finite number, got {v!r}"
    if entry.kind is MetricKind.fraction and not 0.0 <= v <= 1.0:
        return f"fraction must be in [0, 1], got {v!r}"
    if entry.kind is MetricKind.flag and v not in (0, 1):
        return f"flag must be 0 or 1, got {v!r}"
    if entry.kind is MetricKind.count:
        if v < 0:
            return f"count must be nonnegative, got {v!r}"
        if v != int(v):
            return f"count must be an integer, got {v!r}"
    if entry.cap is not None and not entry.cap > 0:
        return f"cap must be > 0, got {entry.cap!r}"
    return ""


def validate_metrics(metrics: Sequence[MetricEntry]) -> ValidationReport:
    """Check every entry against its kind's domain.

    Never raises.  Besides per-entry results, the report warns when the
    confusion-matrix fractions add up to more than one.
    """
    report = ValidationReport()
    confusion = []
    for i, m in enumerate(metrics):
        reason = _check_entry(m)
        report.checks.append(EntryCheck(i, m.name, not reason, reason))
        if m.role is not None and not reason:
            confusion.append(m.value)
    if confusion:
        total = math.fsum(confusion)
        report.confusion_total = total
        if total > 1.0 + CONFUSION_TOLERANCE:
            report.warnings.append(
                f"confusion-matrix fractions sum to {total!r}, exceeding 1 by {total - 1.0:.3g}"
            )
    return report


def _require_valid(M: Sequence[MetricEntry], S: WeightVector) -> None:
    if len(M) != len(S):
        raise ValidationError(
            "weights", f"length mismatch: {len(M)} metrics but {len(S)} weights"
        )
    for c in validate_metrics(M).checks:
        if not c.ok:
            raise ValidationError(f"metrics[{c.index}].value", c.reason)


def contributions(
    M: Sequence[MetricEntry], S: WeightVector, normalize: bool = False
) -> list[tuple[str, float]]:
    _require_valid(M, S)
    return [(m.name, m.scored_value(normalize) * s) for m, s in zip(M, S)]


def raw_score(M: Sequence[MetricEntry], S: WeightVector, normalize: bool = False) -> float:
    """Dot product of metric values and weights, before clamping."""
    return math.fsum(v for _, v in contributions(M, S, normalize))


def clamp(x: float, lo: float = -1.0, hi: float = 1.0) -> float:
    return min(hi, max(x, lo))


def trust_score(
    M: Sequence[MetricEntry],
    S: WeightVector,
    *,
    normalize: bool = False,
    timestamp: datetime | None = None,
) -> ScoreRecord:
    """Score ``M`` against ``S`` and clamp the result to ``[-1, 1]``.

    Args:
        M: Metric entries, index-aligned with ``S``.
        S: Weights; negative entries penalise.
        normalize: Cap count metrics that declare a ``cap``.
        timestamp: Defaults to the current UTC time.
    """
    parts = contributions(M, S, normalize)
    raw = math.fsum(v for _, v in parts)
    if not math.isclose(S.total, 1.0, rel_tol=0.0, abs_tol=1e-9):
        log.warning("weights sum to %r, not 1", S.total)
    return ScoreRecord(
        raw_score=raw,
        clamped_score=clamp(raw),
        contributions=tuple(parts),
        timestamp=timestamp or datetime.now(timezone.utc),
    )


def category_breakdown(
    record: ScoreRecord, M: Sequence[MetricEntry]
) -> dict[MetricCategory, float]:
    """Subtotal the record's contributions per category (all seven keys present)."""
    if len(record.contributions) != len(M):
        raise ValidationError(
            "metrics",
            f"record has {len(record.contributions)} contributions but {len(M)} metrics given",
        )
    buckets: dict[MetricCategory, list[float]] = {c: [] for c in MetricCategory}
    for m, (_, v) in zip(M, record.contributions):
        buckets[m.category].append(v)
    return {c: math.fsum(vs) for c, vs in buckets.items()}


def confusion_entries(
    tp: int, tn: int, fp: int, fn: int, categorizable: int
) -> list[MetricEntry]:
    """Build the four confusion-matrix fraction entries.

    ``categorizable`` counts only inferences whose outcome is knowable; it is
    not the total number of inferences served.
    """
    counts = {"TP": tp, "TN": tn, "FP": fp, "FN": fn}
    for k, c in counts.items():
        if c < 0:
            raise ValidationError(k, f"must be nonnegative, got {c!r}")
    if categorizable <= 0:
        raise ValidationError("categorizable", f"must be > 0, got {categorizable!r}")
    if sum(counts.values()) > categorizable:
        raise ValidationError(
            "categorizable",
            f"TP+TN+FP+FN = {sum(counts.values())} exceeds categorizable = {categorizable}",
        )
    labels = {
        "TP": "True Positives",
        "TN": "True Negatives",
        "FP": "False Positives",
        "FN": "False Negatives",
    }
    return [
        MetricEntry(
            name=f"{labels[k]}/Number of Inferences",
            category=MetricCategory.ReliabilityValidity,
            kind=MetricKind.fraction,
            value=c / categorizable,
            role=ConfusionRole(k),
        )
        for k, c in counts.items()
    ]


# --------------------------------------------------------------------------
# Reference example: simulated scores for the seven categories and weights
# --------------------------------------------------------------------------

_R = MetricCategory.ReliabilityValidity
_SA = MetricCategory.Safety
_SE = MetricCategory.SecurityResilience
_AC = MetricCategory.AccountabilityTransparency
_EX = MetricCategory.ExplainabilityInterpretability
_PR = MetricCategory.Privacy
_BI = MetricCategory.BiasManagement

_FRACTION, _FLAG, _COUNT = MetricKind.fraction, MetricKind.flag, MetricKind.count

EXAMPLE_METRICS: tuple[MetricEntry, ...] = (
    MetricEntry("Uptime", _R, _FRACTION, 0.9999),
    MetricEntry("Number of Crashes", _R, _COUNT, 3),
    MetricEntry("True Positives/Number of Inferences", _R, _FRACTION, 0.6000),
    MetricEntry("True Negatives/Number of Inferences", _R, _FRACTION, 0.3429),
    MetricEntry("False Positives/Number of Inferences", _R, _FRACTION, 0.0429),
    MetricEntry("False Negatives/Number of Inferences", _R, _FRACTION, 0.0143),
    MetricEntry("System Design", _SA, _FLAG, 1),
    MetricEntry("Data Handling Processes", _SA, _FLAG, 1),
    MetricEntry("Data Points Report", _SA, _FLAG, 1),
    MetricEntry("Data Access Consent", _SA, _FLAG, 1),
    MetricEntry("Touchless Model Training", _SA, _FLAG, 1),
    MetricEntry("Access Control", _SE, _FLAG, 1),
    MetricEntry("Tiered Access", _SE, _FLAG, 1),
    MetricEntry("Data Isolation", _SE, _FLAG, 1),
    MetricEntry("Data Usage Report", _AC, _FLAG, 1),
    MetricEntry("Inference Explanation", _EX, _FRACTION, 0.40),
    MetricEntry("Present Similar Records", _EX, _FRACTION, 0.20),
    MetricEntry("Number of Explanation/Total Inferences", _EX, _FRACTION, 0.10),
    MetricEntry("Legal and Privacy Frameworks", _PR, _FLAG, 1),
    MetricEntry("De-identification of Data", _PR, _FLAG, 0),
    MetricEntry("Privacy Training", _PR, _FLAG, 1),
    MetricEntry("Number of Confirmed Bias Issues", _BI, _COUNT, 2),
    MetricEntry("Number of Deployed Bias Fixes", _BI, _COUNT, 1),
)

EXAMPLE_WEIGHTS = WeightVector((
    0.14, -0.14, 0.24, 0.24, -0.10, -0.10,
    0.01, 0.02, 0.02, 0.01, 0.04,
    0.06, 0.07, 0.06,
    0.05,
    0.05, 0.05, 0.05,
    0.06, 0.05, 0.02,
    -0.06, 0.06,
))


# --------------------------------------------------------------------------
# File I/O
# --------------------------------------------------------------------------


def _parse_entry(obj: Any, where: str) -> MetricEntry:
    if not isinstance(obj, dict):
        raise ValidationError(where, "must be an object")
    for key in ("name", "category", "kind", "value"):
        if key not in obj:
            raise ValidationError(f"{where}.{key}", "is required")
    if not isinstance(obj["name"], str):
        raise ValidationError(f"{where}.name", "must be a string")
    try:
        category = MetricCategory(obj["category"])
    except ValueError:
        allowed = ", ".join(c.value for c in MetricCategory)
        raise ValidationError(f"{where}.category", f"must be one of {allowed}") from None
    try:
        kind = MetricKind(obj["kind"])
    except ValueError:
        raise ValidationError(f"{where}.kind", "must be one of fraction, flag, count") from None
    value = obj["value"]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(f"{where}.value", f"must be a number, got {value!r}")
    cap = obj.get("cap")
    if cap is not None and (isinstance(cap, bool) or not isinstance(cap, (int, float))):
        raise ValidationError(f"{where}.cap", f"must be a number, got {cap!r}")
    role = obj.get("role")
    if role is not None:
        try:
            role = ConfusionRole(role)
        except ValueError:
            raise ValidationError(f"{where}.role", "must be one of TP, TN, FP, FN") from None
    entry = MetricEntry(obj["name"], category, kind, value, cap=cap, role=role)
    reason = _check_entry(entry)
    if reason:
        raise ValidationError(f"{where}.value", reason)
    return entry


def parse_metrics(obj: Any) -> list[MetricEntry]:
    """Parse the ``metrics`` array of a decoded metrics document."""
    if isinstance(obj, dict):
        if "metrics" not in obj:
            raise ValidationError("metrics", "is required")
        obj = obj["metrics"]
    if not isinstance(obj, list):
        raise ValidationError("metrics", "must be an array")
    return [_parse_entry(item, f"metrics[{i}]") for i, item in enumerate(obj)]


def parse_weights(obj: Any) -> WeightVector:
    """Parse ``{"weights": [...]}`` or a bare array of numbers."""
    if isinstance(obj, dict):
        if "weights" not in obj:
            raise ValidationError("weights", "is required")
        obj = obj["weights"]
    if not isinstance(obj, list):
        raise ValidationError("weights", "must be an array")
    for i, w in enumerate(obj):
        if isinstance(w, bool) or not isinstance(w, (int, float)):
            raise ValidationError(f"weights[{i}]", f"must be a number, got {w!r}")
    return WeightVector(tuple(obj))


def load_json(path: str | Path) -> Any:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def load_inputs(
    metrics_path: str | Path, weights_path: str | Path | None = None
) -> tuple[list[MetricEntry], WeightVector]:
    """Load metrics and weights; weights come from the metrics file if no path is given.

    Raises:
        OSError, json.JSONDecodeError: unreadable or malformed file.
        ValidationError: well-formed JSON with out-of-domain content.
    """
    doc = load_json(metrics_path)
    metrics = parse_metrics(doc)
    if weights_path is not None:
        weights = parse_weights(load_json(weights_path))
    else:
        weights = parse_weights(doc)
    if len(weights) != len(metrics):
        raise ValidationError(
            "weights", f"length mismatch: {len(metrics)} metrics but {len(weights)} weights"
        )
    return metrics, weights


def metrics_to_json(metrics: Iterable[MetricEntry]) -> list[dict[str, Any]]:
    out = []
    for m in metrics:
        d: dict[str, Any] = {
            "name": m.name,
            "category": m.category.value,
            "kind": m.kind.value,
            "value": m.value,
        }
        if m.cap is not None:
            d["cap"] = m.cap
        if m.role is not None:
            d["role"] = m.role.value
        out.append(d)
    return out
