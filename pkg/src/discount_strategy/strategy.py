"""Accept/reject strategy engine for the two-period discount problem.

The engine evaluates the guessing surface ``h(v, w)``, the no-guessing
curve ``h(v)``, locates the acceptance threshold where the curve crosses
zero, and computes the expected buying price of arbitrary strategies via
the decomposition ``E[X] = mu0 + mu1(S)`` (strategy-free plus
strategy-dependent term).  Accepting is optimal exactly where these
functions are nonpositive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Sequence

from .errors import MissingGuessError, OutOfDomainError
from .first_mover import FirstMoverModel
from .pricing import MarketModel, PriceRange, joint_pdf
from .quadrature import (
    DEFAULT_SETTINGS_1D,
    DEFAULT_SETTINGS_2D,
    QuadratureSettings,
    find_root,
    integrate_1d,
    integrate_2d,
)

__all__ = [
    "Verdict",
    "Decision",
    "DecisionModel",
    "StrategyKind",
    "StrategySpec",
    "ExpectedPriceBreakdown",
    "ThresholdResult",
    "h_surface",
    "h_surface_symmetric",
    "h_curve",
    "find_threshold",
    "decide",
    "decide_with_guess",
    "expected_price",
]

# Joint-density values are memoized per model; beyond this many entries new
# values are computed but no longer stored.
_JOINT_CACHE_CAP = 600_000


class Verdict(Enum):
    ACCEPT = "ACCEPT"
    REJECT = "REJECT"


@dataclass(frozen=True)
class Decision:
    """Outcome of a single accept/reject query.

    ``boundary`` is set when ``|h|`` falls inside the model's zero band,
    marking prices where the tie-break (accept on h == 0) was decisive.
    """

    verdict: Verdict
    h_value: float
    boundary: bool


@dataclass(frozen=True)
class DecisionModel:
    """Immutable bundle of price model, first-mover kernel and tolerances.

    ``first_mover`` may be any object exposing ``prob(x, y) -> float`` and
    a ``range`` attribute equal to the market's price range; the shipped
    beta-cdf kernel is :class:`FirstMoverModel`.  A per-instance cache
    memoizes joint-density and curve values; results are identical with or
    without cache hits.
    """

    market: MarketModel
    first_mover: FirstMoverModel
    quad: QuadratureSettings = DEFAULT_SETTINGS_1D
    quad_2d: QuadratureSettings = DEFAULT_SETTINGS_2D
    zero_band: float = 1e-10
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.market.range != self.first_mover.range:
            raise ValueError("market and first-mover kernel must share one price range")
        if self.zero_band < 0.0:
            raise ValueError("zero_band must be nonnegative")

    @property
    def support(self) -> tuple[float, float]:
        rng = self.market.range
        return rng.x_min, rng.x_max


def _joint(model: DecisionModel, x: float, y: float) -> float:
    cache = model._cache.setdefault("joint", {})
    key = (x, y)
    value = cache.get(key)
    if value is None:
        value = joint_pdf(x, y, model.market, model.quad)
        if len(cache) < _JOINT_CACHE_CAP:
            cache[key] = value
    return value


def h_surface(v: float, w: float, model: DecisionModel) -> float:
    """Guessing-strategy surface at first-period price v and guess w.

    Sum of the two offer orderings: L quoting v against H's w, weighted by
    the chance L moves first, plus H quoting v against L's w, weighted by
    the chance H moves first.  Zero on the diagonal and sharing the sign
    of ``v - w`` elsewhere.
    """
    prob = model.first_mover.prob
    return (v - w) * prob(v, w) * _joint(model, v, w) + (v - w) * (
        1.0 - prob(w, v)
    ) * _joint(model, w, v)


def h_surface_symmetric(v: float, w: float, model: DecisionModel) -> float:
    """Collapsed surface ``(v-w) p(v,w) (f(v,w) + f(w,v))``.

    Valid only when the kernel is complement symmetric,
    ``p(v, w) = 1 - p(w, v)``; must then agree with :func:`h_surface`.
    """
    return (
        (v - w)
        * model.first_mover.prob(v, w)
        * (_joint(model, v, w) + _joint(model, w, v))
    )


def h_curve(v: float, model: DecisionModel) -> float:
    """No-guessing strategy curve at first-period price v.

    Marginalizes the two h-surface terms over the unseen second-period
    price, each term integrated separately over the support.
    """
    cache = model._cache.setdefault("h_curve", {})
    value = cache.get(v)
    if value is not None:
        return value
    x0, x1 = model.support
    prob = model.first_mover.prob

    def first_term(w: float) -> float:
        return (v - w) * prob(v, w) * _joint(model, v, w)

    def second_term(w: float) -> float:
        return (v - w) * (1.0 - prob(w, v)) * _joint(model, w, v)

    value = integrate_1d(first_term, x0, x1, model.quad) + integrate_1d(
        second_term, x0, x1, model.quad
    )
    cache[v] = value
    return value


def decide(v: float, model: DecisionModel) -> Decision:
    """Accept/reject the first-period price v with no second-period guess."""
    x0, x1 = model.support
    if not x0 <= v <= x1:
        raise OutOfDomainError(f"price {v!r} outside support [{x0!r}, {x1!r}]")
    h = h_curve(v, model)
    return Decision(
        verdict=Verdict.ACCEPT if h <= 0.0 else Verdict.REJECT,
        h_value=h,
        boundary=abs(h) < model.zero_band,
    )


def decide_with_guess(v: float, w: float, model: DecisionModel) -> Decision:
    """Accept/reject the first-period price v given a point guess w."""
    x0, x1 = model.support
    if not (x0 <= v <= x1 and x0 <= w <= x1):
        raise OutOfDomainError(
            f"prices ({v!r}, {w!r}) outside support [{x0!r}, {x1!r}]"
        )
    h = h_surface(v, w, model)
    return Decision(
        verdict=Verdict.ACCEPT if h <= 0.0 else Verdict.REJECT,
        h_value=h,
        boundary=abs(h) < model.zero_band,
    )


@dataclass(frozen=True)
class ThresholdResult:
    """Zero crossing of the no-guessing curve, or a single-signed verdict.

    ``kind`` is ``"root"`` when a crossing was located (``value`` holds
    it), ``"always-accept"`` when the curve is nonpositive on the whole
    grid, ``"always-reject"`` when nonnegative.  ``sign_changes`` above 1
    flags a non-interval acceptance region; the leftmost root is returned.
    """

    value: float | None
    kind: str
    bracket: tuple[float, float] | None
    sign_changes: int


def _threshold_from_curve(
    curve: Callable[[float], float],
    price_range: PriceRange,
    x_tol: float,
    grid_points: int,
) -> ThresholdResult:
    """Grid-scan ``curve`` for sign changes, then bisect the leftmost."""
    if grid_points < 2:
        raise ValueError("grid_points must be at least 2")
    x0, x1 = price_range.x_min, price_range.x_max
    step = (x1 - x0) / grid_points
    # Midpoint grid: the curve vanishes identically at the support edges,
    # which would otherwise register as spurious roots.
    xs = [x0 + (i + 0.5) * step for i in range(grid_points)]
    vals = [curve(x) for x in xs]

    brackets: list[tuple[float, float]] = []
    for i in range(grid_points - 1):
        a, b = vals[i], vals[i + 1]
        if a == 0.0:
            brackets.append((xs[i], xs[i]))
        elif (a > 0.0) != (b > 0.0) and b != 0.0:
            brackets.append((xs[i], xs[i + 1]))
    if vals[-1] == 0.0:
        brackets.append((xs[-1], xs[-1]))

    if not brackets:
        kind = "always-accept" if all(v <= 0.0 for v in vals) else "always-reject"
        return ThresholdResult(value=None, kind=kind, bracket=None, sign_changes=0)

    lo, hi = brackets[0]
    root = lo if lo == hi else find_root(curve, lo, hi, x_tol)
    return ThresholdResult(
        value=root, kind="root", bracket=(lo, hi), sign_changes=len(brackets)
    )


def find_threshold(
    model: DecisionModel,
    x_tol: float = 1e-6,
    grid_points: int = 64,
) -> ThresholdResult:
    """Locate the acceptance threshold where the no-guessing curve crosses zero."""
    return _threshold_from_curve(
        lambda v: h_curve(v, model), model.market.range, x_tol, grid_points
    )


class StrategyKind(Enum):
    THRESHOLD = "threshold"
    GUESSING_SURFACE = "guessing-surface"
    ALWAYS_ACCEPT = "always-accept"
    ALWAYS_REJECT = "always-reject"
    TABULATED = "tabulated"


@dataclass(frozen=True)
class StrategySpec:
    """A buyer strategy: the probability of accepting the first offer.

    Use the factory classmethods.  ``accept_probability(v, w)`` is the
    single entry point shared by the semi-analytic evaluator and the
    simulator; ``w`` is the (guessed or realized) second-period price and
    is required only by the guess-aware kinds.
    """

    kind: StrategyKind
    threshold: float | None = None
    table: tuple[tuple[float, ...], ...] | None = None
    table_range: PriceRange | None = None

    @classmethod
    def always_accept(cls) -> "StrategySpec":
        return cls(kind=StrategyKind.ALWAYS_ACCEPT)

    @classmethod
    def always_reject(cls) -> "StrategySpec":
        return cls(kind=StrategyKind.ALWAYS_REJECT)

    @classmethod
    def threshold_at(cls, v0: float) -> "StrategySpec":
        return cls(kind=StrategyKind.THRESHOLD, threshold=float(v0))

    @classmethod
    def guessing_surface(cls) -> "StrategySpec":
        return cls(kind=StrategyKind.GUESSING_SURFACE)

    @classmethod
    def tabulated(
        cls, values: Sequence[Sequence[float]], price_range: PriceRange
    ) -> "StrategySpec":
        """Piecewise-constant acceptance probabilities on a uniform grid.

        ``values[i][j]`` applies when the first-period price falls in the
        i-th cell and the second-period price in the j-th cell of
        ``price_range``.
        """
        rows = tuple(tuple(float(x) for x in row) for row in values)
        if not rows or not rows[0]:
            raise ValueError("tabulated strategy needs a nonempty grid")
        width = len(rows[0])
        if any(len(row) != width for row in rows):
            raise ValueError("tabulated grid rows must have equal length")
        for row in rows:
            for x in row:
                if not 0.0 <= x <= 1.0:
                    raise ValueError(f"acceptance probability {x!r} outside [0, 1]")
        return cls(kind=StrategyKind.TABULATED, table=rows, table_range=price_range)

    def accept_probability(self, v: float, w: float | None = None) -> float:
        if self.kind is StrategyKind.ALWAYS_ACCEPT:
            return 1.0
        if self.kind is StrategyKind.ALWAYS_REJECT:
            return 0.0
        if self.kind is StrategyKind.THRESHOLD:
            return 1.0 if v <= self.threshold else 0.0
        if self.kind is StrategyKind.GUESSING_SURFACE:
            if w is None:
                raise MissingGuessError("guessing-surface strategy needs a guess")
            # Theorem-level rule h(v, w) <= 0 reduces to v <= w: the bracket
            # multiplying (v - w) is nonnegative everywhere.
            return 1.0 if v <= w else 0.0
        if w is None:
            raise MissingGuessError("tabulated strategy needs a second-period price")
        return self._table_lookup(v, w)

    def _table_lookup(self, v: float, w: float) -> float:
        rng = self.table_range
        if not (rng.contains(v) and rng.contains(w)):
            return 0.0
        n_v = len(self.table)
        n_w = len(self.table[0])
        i = min(int((v - rng.x_min) / rng.rho * n_v), n_v - 1)
        j = min(int((w - rng.x_min) / rng.rho * n_w), n_w - 1)
        return self.table[i][j]


@dataclass(frozen=True)
class ExpectedPriceBreakdown:
    """Expected buying price split into strategy-free and strategy terms."""

    mu0: float
    mu1: float
    total: float


def _mu0(model: DecisionModel) -> float:
    cached = model._cache.get("mu0")
    if cached is not None:
        return cached
    x0, x1 = model.support
    prob = model.first_mover.prob

    def integrand(x: float, y: float) -> float:
        p = prob(x, y)
        return (x * (1.0 - p) + y * p) * _joint(model, x, y)

    value = integrate_2d(integrand, x0, x1, x0, x1, model.quad_2d)
    model._cache["mu0"] = value
    return value


def _cell_integrals(
    model: DecisionModel, n_v: int, n_w: int, rng: PriceRange
) -> list[list[float]]:
    """Integral of the h-surface over each cell of a uniform grid (cached)."""
    key = ("cells", n_v, n_w, rng.x_min, rng.x_max)
    cached = model._cache.get(key)
    if cached is not None:
        return cached
    dv = rng.rho / n_v
    dw = rng.rho / n_w
    surf = lambda v, w: h_surface(v, w, model)
    cells = [
        [
            integrate_2d(
                surf,
                rng.x_min + i * dv,
                rng.x_min + (i + 1) * dv,
                rng.x_min + j * dw,
                rng.x_min + (j + 1) * dw,
                model.quad_2d,
            )
            for j in range(n_w)
        ]
        for i in range(n_v)
    ]
    model._cache[key] = cells
    return cells


def expected_price(strategy: StrategySpec, model: DecisionModel) -> ExpectedPriceBreakdown:
    """Expected buying price of ``strategy`` under ``model``.

    ``mu0`` is the strategy-free term (the always-reject price); ``mu1``
    weights the strategy's acceptance probabilities by the h-surface (for
    guess-aware strategies) or the h-curve (for price-only strategies).
    """
    x0, x1 = model.support
    kind = strategy.kind

    if kind is StrategyKind.ALWAYS_REJECT:
        mu1 = 0.0
    elif kind is StrategyKind.ALWAYS_ACCEPT:
        mu1 = integrate_1d(lambda v: h_curve(v, model), x0, x1, model.quad)
    elif kind is StrategyKind.THRESHOLD:
        v0 = strategy.threshold
        if not x0 <= v0 <= x1:
            raise OutOfDomainError(f"threshold {v0!r} outside support [{x0!r}, {x1!r}]")
        mu1 = 0.0 if v0 == x0 else integrate_1d(
            lambda v: h_curve(v, model), x0, v0, model.quad
        )
    elif kind is StrategyKind.GUESSING_SURFACE:
        mu1 = integrate_2d(
            lambda v, w: min(h_surface(v, w, model), 0.0), x0, x1, x0, x1,
            model.quad_2d,
        )
    else:
        cells = _cell_integrals(
            model, len(strategy.table), len(strategy.table[0]), strategy.table_range
        )
        mu1 = math.fsum(
            strategy.table[i][j] * cells[i][j]
            for i in range(len(strategy.table))
            for j in range(len(strategy.table[0]))
        )

    mu0 = _mu0(model)
    return ExpectedPriceBreakdown(mu0=mu0, mu1=mu1, total=mu0 + mu1)
