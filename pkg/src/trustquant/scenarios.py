"""Config-driven trust-game simulations.

Scenario file::

    {"name": "...", "initial_value": 1000000, "mode": "per_cycle",
     "cycles": [{"p": 0.65, "q": 0.14, "K": 2}, ...]}

``per_cycle`` plays every cycle against the same offered value; ``closed_form``
evaluates the product-of-sums n-cycle formula over the first ``n`` cycles for
each ``n``.  Neither mode compounds holdings; compounding is what
:func:`trustquant.fair_trade.step_exchange` models.
"""

from __future__ import annotations

import csv
import enum
import io
import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any

from . import game_engine as ge
from .errors import ValidationError
from .game_engine import CycleLedger, CycleParams, GameConfig

CSV_HEADER = ("cycle", "trustor_gain", "trustee_gain", "remittance", "gain", "repayment", "residual")

BUILTIN = ("simulation1", "simulation2", "simulation3", "simulation4")


class Mode(str, enum.Enum):
    per_cycle = "per_cycle"
    closed_form = "closed_form"


class Regime(str, enum.Enum):
    AddsValue = "AddsValue"
    Neutral = "Neutral"
    Inefficient = "Inefficient"
    Eroding = "Eroding"


def regime_of(K: float) -> Regime:
    """Qualitative effect of the magnification factor on the trustee."""
    if K > 1:
        return Regime.AddsValue
    if K == 1:
        return Regime.Neutral
    if K >= 0:
        return Regime.Inefficient
    if K < 0:
        return Regime.Eroding
    raise ValueError(f"K must be finite, got {K!r}")


@dataclass(frozen=True)
class Scenario:
    name: str
    initial_value: float
    cycles: tuple[CycleParams, ...]
    mode: Mode = Mode.per_cycle

    def __post_init__(self) -> None:
        object.__setattr__(self, "mode", Mode(self.mode))
        # reuse GameConfig's checks for V and the cycle list
        cfg = GameConfig(self.initial_value, tuple(self.cycles))
        object.__setattr__(self, "initial_value", cfg.initial_value)
        object.__setattr__(self, "cycles", cfg.cycles)

    @property
    def config(self) -> GameConfig:
        return GameConfig(self.initial_value, self.cycles)


@dataclass(frozen=True)
class TrajectoryRow:
    cycle: int
    trustor_gain: float
    trustee_gain: float
    ledger: CycleLedger | None = None


@dataclass(frozen=True)
class Trajectory:
    scenario: str
    mode: Mode
    rows: tuple[TrajectoryRow, ...]

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def final(self) -> TrajectoryRow:
        return self.rows[-1]


def run_scenario(s: Scenario) -> Trajectory:
    if s.mode is Mode.per_cycle:
        rows = []
        for i, c in enumerate(s.cycles):
            led = ge.run_cycle(c, s.initial_value)
            rows.append(TrajectoryRow(i, led.trustor_accumulated, led.trustee_net, led))
    else:
        rows = []
        for n in range(1, len(s.cycles) + 1):
            a, b = ge.closed_form_n_cycles(GameConfig(s.initial_value, s.cycles[:n]))
            rows.append(TrajectoryRow(n - 1, a, b))
    return Trajectory(s.name, s.mode, tuple(rows))


# --------------------------------------------------------------------------
# Loading
# --------------------------------------------------------------------------


def _number(obj: dict, key: str, where: str) -> float:
    if key not in obj:
        raise ValidationError(f"{where}{key}", "is required")
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ValidationError(f"{where}{key}", f"must be a number, got {v!r}")
    return v


def parse_scenario(obj: Any) -> Scenario:
    """Build a :class:`Scenario` from decoded JSON.

    Raises:
        ValidationError: field path such as ``cycles[2].q``; the message names
            the scenario when it has one.
    """
    if not isinstance(obj, dict):
        raise ValidationError("scenario", "must be a JSON object")
    name = obj.get("name", "")
    if not isinstance(name, str) or not name:
        raise ValidationError("name", "must be a non-empty string")

    def fail(err: ValidationError) -> ValidationError:
        return ValidationError(err.field, f"{err.message} (scenario {name!r})")

    try:
        V = _number(obj, "initial_value", "")
        mode = obj.get("mode", Mode.per_cycle.value)
        try:
            mode = Mode(mode)
        except ValueError:
            raise ValidationError("mode", f"must be per_cycle or closed_form, got {mode!r}") from None
        raw_cycles = obj.get("cycles")
        if not isinstance(raw_cycles, list) or not raw_cycles:
            raise ValidationError("cycles", "must be a non-empty array")
        cycles = []
        for i, c in enumerate(raw_cycles):
            where = f"cycles[{i}]"
            if not isinstance(c, dict):
                raise ValidationError(where, "must be an object with p, q, K")
            vals = {k: _number(c, k, where + ".") for k in ("p", "q", "K")}
            try:
                cycles.append(CycleParams(**vals))
            except ValidationError as exc:
                raise exc.prefixed(where) from None
        return Scenario(name, V, tuple(cycles), mode)
    except ValidationError as exc:
        raise fail(exc) from None


def load_scenario(path: str | Path) -> Scenario:
    """Read a scenario file. ``OSError``/``json.JSONDecodeError`` propagate."""
    with open(path, encoding="utf-8") as fh:
        return parse_scenario(json.load(fh))


def builtin_path(name: str) -> Path:
    """Path of a bundled scenario or example file, e.g. ``"simulation1"``."""
    fname = name if name.endswith(".json") else name + ".json"
    return Path(str(resources.files("trustquant") / "data" / fname))


# --------------------------------------------------------------------------
# Output
# --------------------------------------------------------------------------


def format_number(x: float, precision: int | None = 6) -> str:
    """Fixed-point text with ``.`` separator, no grouping; ``None`` means full repr."""
    if precision is None:
        return repr(float(x))
    return f"{x:.{precision}f}"


def to_csv(traj: Trajectory, precision: int | None = 6) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in traj.rows:
        row = [str(r.cycle), format_number(r.trustor_gain, precision), format_number(r.trustee_gain, precision)]
        if r.ledger is not None:
            led = r.ledger
            row += [format_number(v, precision) for v in (led.remittance, led.gain, led.repayment, led.residual)]
        else:
            row += ["", "", "", ""]
        w.writerow(row)
    return buf.getvalue()


def to_json(traj: Trajectory) -> str:
    rows = []
    for r in traj.rows:
        d: dict[str, Any] = {
            "cycle": r.cycle,
            "trustor_gain": r.trustor_gain,
            "trustee_gain": r.trustee_gain,
        }
        if r.ledger is not None:
            d.update(
                remittance=r.ledger.remittance,
                gain=r.ledger.gain,
                repayment=r.ledger.repayment,
                residual=r.ledger.residual,
            )
        rows.append(d)
    return json.dumps({"name": traj.scenario, "mode": traj.mode.value, "rows": rows}, indent=2) + "\n"
