"""Fair-trade region from the eigen-structure of the exchange recurrence.

Holdings evolve as::

    A' = (1 - p)*A + q*N
    N' = K*p*A    - q*N

i.e. ``(A', N') = X @ (A, N)`` with ``X = [[1-p, q], [K*p, -q]]``.  The
eigenvector of the largest (signed) positive eigenvalue spans a line through
the origin along which both parties' holdings scale together.  Points are
classified against that line in the (N, A) plane: above it the trustor
accumulates more, below it the trustee retains more.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import DegeneracyError, DomainError
from .game_engine import CycleParams

INDEPENDENCE_TOL = 1e-12
DEGENERACY_TOL = 1e-12
# relative size under which an eigenvector component is treated as zero
_ZERO_COMPONENT = 1e-14

Vec2 = tuple[float, float]


@dataclass(frozen=True)
class ExchangeMatrix:
    a: float
    b: float
    c: float
    d: float
    p: float | None = None
    q: float | None = None
    K: float | None = None

    @property
    def entries(self) -> tuple[Vec2, Vec2]:
        return (self.a, self.b), (self.c, self.d)

    @property
    def trace(self) -> float:
        return self.a + self.d

    @property
    def det(self) -> float:
        return self.a * self.d - self.b * self.c

    def __matmul__(self, v: Vec2) -> Vec2:
        x, y = v
        return self.a * x + self.b * y, self.c * x + self.d * y

    @classmethod
    def from_rows(cls, rows) -> "ExchangeMatrix":
        (a, b), (c, d) = rows
        return cls(float(a), float(b), float(c), float(d))


@dataclass(frozen=True)
class EigenPair:
    eigenvalue: float
    eigenvector: Vec2


@dataclass(frozen=True)
class FairTradeLine:
    slope: float
    source: EigenPair
    intercept: float = 0.0

    def __call__(self, n: float) -> float:
        return self.slope * n + self.intercept


class TradeBalance(str, enum.Enum):
    Fair = "Fair"
    TrustorFavoring = "TrustorFavoring"
    TrusteeFavoring = "TrusteeFavoring"


def build_matrix(p: float, q: float, K: float) -> ExchangeMatrix:
    params = CycleParams(p, q, K)
    p, q, K = params.p, params.q, params.K
    return ExchangeMatrix(1.0 - p, q, K * p, -q, p=p, q=q, K=K)


def step_exchange(matrix: ExchangeMatrix, state: Vec2) -> Vec2:
    """Advance ``(A, N)`` by one cycle of the recurrence."""
    return matrix @ state


def rows_linearly_independent(matrix: ExchangeMatrix) -> bool:
    scale = max(abs(x) for x in (matrix.a, matrix.b, matrix.c, matrix.d))
    return abs(matrix.det) > INDEPENDENCE_TOL * scale * scale


def _normalize(v: Vec2) -> Vec2:
    x, y = v
    size = max(abs(x), abs(y))
    if abs(y) > _ZERO_COMPONENT * size:
        return x / y, 1.0
    return 1.0, y / x


def _eigenvector(m: ExchangeMatrix, lam: float) -> Vec2:
    # null vector of (m - lam*I), taken from whichever row is better conditioned
    from_top = (m.b, lam - m.a)
    from_bottom = (lam - m.d, m.c)
    v = max(from_top, from_bottom, key=lambda u: max(abs(u[0]), abs(u[1])))
    if v == (0.0, 0.0):
        raise DegeneracyError(f"no unique eigenvector for eigenvalue {lam!r}")
    return _normalize(v)


def eigen_decompose(matrix: ExchangeMatrix) -> tuple[EigenPair, EigenPair]:
    """Closed-form eigenpairs, larger eigenvalue first.

    Eigenvectors are scaled so the second (N) component is 1, or the first
    component is 1 when the second is zero.

    Raises:
        DomainError: dependent rows, or complex eigenvalues.
        DegeneracyError: repeated eigenvalue.
    """
    if not rows_linearly_independent(matrix):
        raise DomainError("matrix rows are linearly dependent")
    t, det = matrix.trace, matrix.det
    disc = t * t - 4.0 * det
    tol = DEGENERACY_TOL * max(t * t, abs(det))
    if disc < -tol:
        raise DomainError(f"complex eigenvalues: discriminant {disc!r} < 0")
    if disc <= tol:
        raise DegeneracyError(f"repeated eigenvalue: discriminant {disc!r} is within tolerance of 0")
    root = math.sqrt(disc)
    # avoid cancellation: compute the larger-magnitude root first
    s = 0.5 * (t + math.copysign(root, t))
    big, small = s, det / s
    hi, lo = (big, small) if big > small else (small, big)
    return (
        EigenPair(hi, _eigenvector(matrix, hi)),
        EigenPair(lo, _eigenvector(matrix, lo)),
    )


def fair_trade_line(matrix: ExchangeMatrix) -> FairTradeLine:
    """Line through the origin along the dominant eigenvector.

    With the eigenvector ``(v1, 1)`` the slope is ``1 / v1``, so a point
    ``(N, A)`` lies on the line when ``A == slope * N``.
    """
    first, _ = eigen_decompose(matrix)
    if first.eigenvalue <= 0.0:
        raise DomainError(f"no positive dominant eigenvalue (largest is {first.eigenvalue!r})")
    v1, v2 = first.eigenvector
    if v1 == 0.0:
        raise DomainError("dominant eigenvector is vertical; slope undefined")
    return FairTradeLine(slope=v2 / v1, source=first)


def classify_point(line: FairTradeLine, point: Vec2, tolerance: float = 1e-6) -> TradeBalance:
    """Place ``point = (N, A)`` relative to the fair-trade line.

    The fair band is ``|A - m*N| <= tolerance * max(1, |A|, |m*N|)``.
    """
    if tolerance < 0:
        raise ValueError(f"tolerance must be >= 0, got {tolerance!r}")
    n, a = point
    on_line = line.slope * n
    gap = a - on_line
    if abs(gap) <= tolerance * max(1.0, abs(a), abs(on_line)):
        return TradeBalance.Fair
    return TradeBalance.TrustorFavoring if gap > 0 else TradeBalance.TrusteeFavoring


def power_iterate(matrix: ExchangeMatrix, state: Vec2, steps: int = 200) -> Vec2:
    """Repeatedly apply :func:`step_exchange`, renormalising to unit max-norm."""
    x, y = state
    for _ in range(steps):
        x, y = step_exchange(matrix, (x, y))
        size = max(abs(x), abs(y))
        if size == 0.0:
            raise DomainError("iteration collapsed to the origin")
        x, y = x / size, y / size
    return x, y


def direction_error(u: Vec2, v: Vec2) -> float:
    """Sine of the angle between two lines through the origin (sign-insensitive)."""
    nu, nv = math.hypot(*u), math.hypot(*v)
    if nu == 0.0 or nv == 0.0:
        raise DomainError("direction of a zero vector is undefined")
    return abs(u[0] * v[1] - u[1] * v[0]) / (nu * nv)
