"""Beta distribution machinery and the multiplicative-background price model.

Two salesperson types quote beta-distributed base prices on the common
support ``[x_min, x_max]``; a latent management factor, itself beta on the
same support after standardization, multiplies both.  This module exposes
the resulting marginal and joint densities plus the plain beta pdf/cdf
primitives everything else is built from.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

from .errors import OutOfDomainError, SeriesDivergenceError
from .quadrature import DEFAULT_SETTINGS_1D, QuadratureSettings, integrate_1d

__all__ = [
    "Seller",
    "PriceRange",
    "BetaShape",
    "MarketModel",
    "beta_pdf",
    "beta_cdf",
    "scaled_beta_pdf",
    "marginal_pdf",
    "marginal_pdf_closed_form",
    "joint_pdf",
]


class Seller(str, Enum):
    """The two salesperson types: L quotes lower prices, H higher ones."""

    L = "L"
    H = "H"


@dataclass(frozen=True)
class PriceRange:
    """Reservation prices bounding every offer, with range ``rho``."""

    x_min: float
    x_max: float

    def __post_init__(self) -> None:
        if not self.x_min < self.x_max:
            raise ValueError(
                f"x_min must be below x_max, got [{self.x_min!r}, {self.x_max!r}]"
            )

    @property
    def rho(self) -> float:
        return self.x_max - self.x_min

    def standardize(self, x: float) -> float:
        return (x - self.x_min) / self.rho

    def contains(self, x: float) -> bool:
        return self.x_min <= x <= self.x_max


@dataclass(frozen=True)
class BetaShape:
    """A pair of positive beta shape parameters."""

    alpha: float
    beta: float

    def __post_init__(self) -> None:
        if not (self.alpha > 0.0 and self.beta > 0.0):
            raise ValueError(
                f"shape parameters must be positive, got ({self.alpha!r}, {self.beta!r})"
            )


@dataclass(frozen=True)
class MarketModel:
    """Full generative price model: seller shapes, background shape, range."""

    low: BetaShape
    high: BetaShape
    background: BetaShape
    range: PriceRange

    def seller_shape(self, seller: Seller) -> BetaShape:
        return self.low if seller is Seller.L else self.high


@lru_cache(maxsize=None)
def _log_beta(alpha: float, beta: float) -> float:
    # log B(a, b) via log-gamma; safe for large shapes.
    return math.lgamma(alpha) + math.lgamma(beta) - math.lgamma(alpha + beta)


def beta_pdf(t: float, shape: BetaShape) -> float:
    """Beta density ``t^(a-1) (1-t)^(b-1) / B(a, b)`` on [0, 1].

    Endpoint values follow the convention used throughout: 0 whenever the
    corresponding exponent is nonzero (the boundary value is irrelevant to
    any integral and this avoids propagating infinities), the finite limit
    when the exponent is zero.
    """
    if not 0.0 <= t <= 1.0:
        raise OutOfDomainError(f"beta_pdf argument {t!r} outside [0, 1]")
    log_b = _log_beta(shape.alpha, shape.beta)
    if t == 0.0:
        return math.exp(-log_b) if shape.alpha == 1.0 else 0.0
    if t == 1.0:
        return math.exp(-log_b) if shape.beta == 1.0 else 0.0
    return math.exp(
        (shape.alpha - 1.0) * math.log(t)
        + (shape.beta - 1.0) * math.log1p(-t)
        - log_b
    )


_CF_MAX_ITER = 300
_CF_EPS = 1e-16
_CF_TINY = 1e-300


def _beta_cont_frac(a: float, b: float, x: float) -> float:
    """Lentz evaluation of the incomplete-beta continued fraction."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _CF_TINY:
        d = _CF_TINY
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            break
    return h


def beta_cdf(t: float, shape: BetaShape) -> float:
    """Regularized incomplete beta function ``I_t(a, b)``.

    Continued-fraction evaluation with the standard symmetry switch at
    ``t = (a+1)/(a+b+2)``; accurate to ~1e-15 across the tails.
    """
    if not 0.0 <= t <= 1.0:
        raise OutOfDomainError(f"beta_cdf argument {t!r} outside [0, 1]")
    if t == 0.0:
        return 0.0
    if t == 1.0:
        return 1.0
    a, b = shape.alpha, shape.beta
    if t == 0.5 and a == b:
        return 0.5  # exact by symmetry
    front = math.exp(
        a * math.log(t) + b * math.log1p(-t) - _log_beta(a, b)
    )
    if t < (a + 1.0) / (a + b + 2.0):
        value = front * _beta_cont_frac(a, b, t) / a
    else:
        value = 1.0 - front * _beta_cont_frac(b, a, 1.0 - t) / b
    return min(max(value, 0.0), 1.0)


def scaled_beta_pdf(x: float, shape: BetaShape, price_range: PriceRange) -> float:
    """Beta density rescaled from [0, 1] to the price support; 0 outside."""
    t = price_range.standardize(x)
    if not 0.0 < t < 1.0:
        return 0.0
    return beta_pdf(t, shape) / price_range.rho


def marginal_pdf(
    x: float,
    seller: Seller,
    model: MarketModel,
    settings: QuadratureSettings = DEFAULT_SETTINGS_1D,
) -> float:
    """Marginal density of the observable price quoted by ``seller``.

    Mixes the seller's base beta kernel over the standardized background
    factor t, integrating t from the standardized price up to 1.
    """
    rng = model.range
    sx = rng.standardize(x)
    if not 0.0 < sx < 1.0:
        return 0.0
    shape = model.seller_shape(seller)
    ea = shape.alpha - 1.0
    eb = shape.beta - 1.0
    bg = model.background
    # 1/t * f_Z(t) merged into a single power of t.
    e0 = bg.alpha - 2.0
    e1 = bg.beta - 1.0
    norm = math.exp(-_log_beta(shape.alpha, shape.beta) - _log_beta(bg.alpha, bg.beta))

    def integrand(t: float) -> float:
        u = sx / t
        if u >= 1.0:
            return 0.0
        return norm * u**ea * (1.0 - u) ** eb * t**e0 * (1.0 - t) ** e1

    value = integrate_1d(integrand, sx, 1.0, settings) / rng.rho
    return value if value > 0.0 else 0.0


_SERIES_MAX_TERMS = 20_000
_SERIES_REL_TOL = 1e-10


def _gauss_2f1(a: float, b: float, c: float, z: float) -> float:
    """Gauss hypergeometric series, summed to relative tolerance 1e-10."""
    term = 1.0
    total = 1.0
    for n in range(_SERIES_MAX_TERMS):
        term *= (a + n) * (b + n) / (c + n) * z / (n + 1.0)
        total += term
        if abs(term) <= _SERIES_REL_TOL * abs(total):
            return total
    raise SeriesDivergenceError(
        f"2F1({a}, {b}; {c}; {z}) did not converge in {_SERIES_MAX_TERMS} terms"
    )


def marginal_pdf_closed_form(x: float, seller: Seller, model: MarketModel) -> float:
    """Hypergeometric closed form of :func:`marginal_pdf`.

    Product-of-betas identity; intended as a cross-check of the quadrature
    path, not the primary evaluation route.  The series argument is
    ``1 - t_x``, so points close to ``x_min`` converge slowly and may
    raise :class:`SeriesDivergenceError`.
    """
    rng = model.range
    tx = rng.standardize(x)
    if not 0.0 < tx < 1.0:
        raise OutOfDomainError(f"price {x!r} outside the open support")
    shape = model.seller_shape(seller)
    a, b = shape.alpha, shape.beta
    a0, b0 = model.background.alpha, model.background.beta
    lead = math.exp(
        math.lgamma(a + b)
        + math.lgamma(a0 + b0)
        - math.lgamma(b + b0)
        - math.lgamma(a)
        - math.lgamma(a0)
        + (a - 1.0) * math.log(tx)
        + (b + b0 - 1.0) * math.log1p(-tx)
    )
    series = _gauss_2f1(b0, a + b - a0, b + b0, 1.0 - tx)
    return lead * series / rng.rho


def joint_pdf(
    x: float,
    y: float,
    model: MarketModel,
    settings: QuadratureSettings = DEFAULT_SETTINGS_1D,
) -> float:
    """Joint density of the two observable prices; 0 outside the support.

    Single mixing integral over the background factor t from
    ``max(s_x, s_y)`` to 1, with both seller kernels evaluated at their
    background-deflated standardized prices.
    """
    rng = model.range
    sx = rng.standardize(x)
    sy = rng.standardize(y)
    if not (0.0 < sx < 1.0 and 0.0 < sy < 1.0):
        return 0.0
    t_lo = max(sx, sy)
    if t_lo >= 1.0 - settings.edge_inset:
        return 0.0  # empty or degenerate mixing interval

    low, high, bg = model.low, model.high, model.background
    eal = low.alpha - 1.0
    ebl = low.beta - 1.0
    eah = high.alpha - 1.0
    ebh = high.beta - 1.0
    # 1/t^2 * f_Z(t) merged into a single power of t.
    e0 = bg.alpha - 3.0
    e1 = bg.beta - 1.0
    norm = math.exp(
        -_log_beta(low.alpha, low.beta)
        - _log_beta(high.alpha, high.beta)
        - _log_beta(bg.alpha, bg.beta)
    )

    def integrand(t: float) -> float:
        ul = sx / t
        uh = sy / t
        if ul >= 1.0 or uh >= 1.0:
            return 0.0
        return (
            norm
            * ul**eal
            * (1.0 - ul) ** ebl
            * uh**eah
            * (1.0 - uh) ** ebh
            * t**e0
            * (1.0 - t) ** e1
        )

    value = integrate_1d(integrand, t_lo, 1.0, settings) / rng.rho**2
    # The integrand is nonnegative; clip extrapolation roundoff.
    return value if value > 0.0 else 0.0
