"""Trust-game value exchange between a trustor (provider) and a trustee (customer).

One cycle of the game:

* the trustor remits ``R = p*V`` of the value ``V`` it can offer and keeps the
  residual ``r = (1 - p)*V``;
* the trustee perceives a gain ``G = K*R``;
* the trustee repays ``B = q*G`` and keeps ``N = (1 - q)*G``;
* the trustor ends the cycle holding ``A = r + B``.

Ledger arithmetic is carried out on the exact decimal values the inputs print
as (``0.14`` is treated as 14/100, not as the nearest binary double) and the
result is rounded once to ``float``.  This keeps hand-checkable figures such as
``0.14 * 1_300_000 == 182_000`` exact.

Two n-cycle evaluations exist and they disagree for ``n > 1``:
:func:`closed_form_n_cycles` evaluates the product-of-sums generalisation
literally, while :func:`run_cycles` applies :func:`run_cycle` once per cycle.
Neither is treated as canonical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import MAX_EMAX, MAX_PREC, MIN_EMIN, Context, Decimal, Inexact, localcontext

from .errors import ValidationError

__all__ = [
    "CycleParams",
    "GameConfig",
    "CycleLedger",
    "ThresholdCheck",
    "remittance",
    "perceived_gain",
    "repayment",
    "residual",
    "run_cycle",
    "run_cycles",
    "closed_form_n_cycles",
    "check_threshold",
]


def _finite(name: str, value: float) -> float:
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ValidationError(name, f"must be a real number, got {value!r}") from None
    if not math.isfinite(value):
        raise ValidationError(name, f"must be finite, got {value!r}")
    return value


def _check_p(p: float) -> float:
    p = _finite("p", p)
    if not 0.0 <= p <= 1.0:
        raise ValidationError("p", f"must satisfy 0 <= p <= 1, got {p!r}")
    return p


def _check_q(q: float) -> float:
    q = _finite("q", q)
    if not 0.0 <= q < 1.0:
        raise ValidationError("q", f"must satisfy 0 <= q < 1, got {q!r}")
    return q


def _check_value(V: float) -> float:
    V = _finite("V", V)
    if V <= 0.0:
        raise ValidationError("V", f"must be > 0, got {V!r}")
    return V


# unbounded precision; products and sums never round, and Inexact traps if they would
_EXACT = Context(prec=MAX_PREC, Emax=MAX_EMAX, Emin=MIN_EMIN, traps=[Inexact])


def _exact(x: float) -> Decimal:
    # shortest round-tripping decimal of the double
    return Decimal(repr(float(x)))


@dataclass(frozen=True)
class CycleParams:
    """Per-cycle game parameters.

    Attributes:
        p: Fraction of the offered value actually delivered, ``0 <= p <= 1``.
        q: Portion of the perceived gain paid back, ``0 <= q < 1``.
        K: Magnification of delivered value as perceived by the trustee.
            Unbounded; negative values mean the service destroys value.
    """

    p: float
    q: float
    K: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "p", _check_p(self.p))
        object.__setattr__(self, "q", _check_q(self.q))
        object.__setattr__(self, "K", _finite("K", self.K))


@dataclass(frozen=True)
class GameConfig:
    initial_value: float
    cycles: tuple[CycleParams, ...]

    def __post_init__(self) -> None:
        V = _finite("initial_value", self.initial_value)
        if V <= 0.0:
            raise ValidationError("initial_value", f"must be > 0, got {V!r}")
        object.__setattr__(self, "initial_value", V)
        cycles = tuple(self.cycles)
        if not cycles:
            raise ValidationError("cycles", "must contain at least one cycle")
        for i, c in enumerate(cycles):
            if not isinstance(c, CycleParams):
                raise ValidationError(f"cycles[{i}]", "must be a CycleParams")
        object.__setattr__(self, "cycles", cycles)


@dataclass(frozen=True)
class CycleLedger:
    """Every quantity produced by one cycle of the game."""

    remittance: float
    gain: float
    repayment: float
    residual: float
    trustor_accumulated: float
    trustee_net: float


@dataclass(frozen=True)
class ThresholdCheck:
    """Outcome of the two trustworthiness inequalities ``pV >= T`` and ``K >= 1``.

    Both sub-flags are exposed because a large ``K`` can make up for a
    remittance below threshold, a case the strict conjunction rejects.
    """

    threshold: float
    remittance_value: float
    magnification: float
    remittance_ok: bool
    magnification_ok: bool

    @property
    def satisfied(self) -> bool:
        return self.remittance_ok and self.magnification_ok


def remittance(p: float, V: float) -> float:
    """Value delivered to the trustee, ``p*V``."""
    p, V = _check_p(p), _check_value(V)
    with localcontext(_EXACT):
        return float(_exact(p) * _exact(V))


def perceived_gain(K: float, remittance: float) -> float:
    """Value the trustee perceives, ``K*remittance``. Negative when ``K < 0``."""
    K = _finite("K", K)
    remittance = _finite("remittance", remittance)
    with localcontext(_EXACT):
        return float(_exact(K) * _exact(remittance))


def repayment(q: float, gain: float) -> float:
    """Portion of the gain returned to the trustor, ``q*gain``."""
    q, gain = _check_q(q), _finite("gain", gain)
    with localcontext(_EXACT):
        return float(_exact(q) * _exact(gain))


def residual(p: float, V: float) -> float:
    """Undelivered value left with the trustor, ``(1 - p)*V``."""
    p, V = _check_p(p), _check_value(V)
    with localcontext(_EXACT):
        return float((1 - _exact(p)) * _exact(V))


def run_cycle(params: CycleParams, V: float) -> CycleLedger:
    """Play one cycle starting from an offered value ``V``.

    Fields are derived from one exact computation so that
    ``remittance + residual == V`` and ``trustee_net + repayment == gain``
    hold before the final rounding to ``float``.
    """
    V = _check_value(V)
    p, q, K = _exact(params.p), _exact(params.q), _exact(params.K)
    v = _exact(V)
    with localcontext(_EXACT):
        sent = p * v
        kept = v - sent
        gain = K * sent
        back = q * gain
        held, net = kept + back, gain - back
    return CycleLedger(
        remittance=float(sent),
        gain=float(gain),
        repayment=float(back),
        residual=float(kept),
        trustor_accumulated=float(held),
        trustee_net=float(net),
    )


def run_cycles(config: GameConfig) -> list[CycleLedger]:
    """Apply :func:`run_cycle` to every cycle, each re-based on ``initial_value``."""
    return [run_cycle(c, config.initial_value) for c in config.cycles]


def closed_form_n_cycles(config: GameConfig) -> tuple[float, float]:
    """Trustor and trustee holdings after ``n`` cycles via the product-of-sums form.

    Evaluates, with ``P, Q, S`` the sums of ``p``, ``q`` and ``K`` over all cycles::

        A = V * (1 - P + Q*S*P)
        N = V * (1 - Q) * S * P

    For a single cycle this reduces to :func:`run_cycle`.

    Returns:
        ``(trustor, trustee)``.
    """
    cycles = config.cycles
    with localcontext(_EXACT):
        P = sum(_exact(c.p) for c in cycles)
        Q = sum(_exact(c.q) for c in cycles)
        S = sum(_exact(c.K) for c in cycles)
        v = _exact(config.initial_value)
        trustor = v * (1 - P + Q * S * P)
        trustee = v * (1 - Q) * S * P
    return float(trustor), float(trustee)


def check_threshold(p: float, V: float, K: float, T: float) -> ThresholdCheck:
    """Evaluate ``pV >= T`` and ``K >= 1``.

    ``T`` is taken in the same units as ``pV``; no normalisation is applied.
    """
    p, V, K, T = (_finite(n, x) for n, x in (("p", p), ("V", V), ("K", K), ("T", T)))
    with localcontext(_EXACT):
        pv = float(_exact(p) * _exact(V))
    return ThresholdCheck(
        threshold=T,
        remittance_value=pv,
        magnification=K,
        remittance_ok=pv >= T,
        magnification_ok=K >= 1.0,
    )

