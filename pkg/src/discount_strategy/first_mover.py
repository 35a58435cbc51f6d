"""Probability that the low-price salesperson makes the first-period offer.

Modeled as ``F(x - y)`` with F a symmetric beta cdf on ``[-rho, rho]``:
the larger L's quote relative to H's, the likelier L fronts the opening
promotion.  Equal quotes give probability 1/2 exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import OutOfDomainError
from .pricing import BetaShape, PriceRange, beta_cdf

__all__ = ["FirstMoverModel", "first_mover_prob"]


@dataclass(frozen=True)
class FirstMoverModel:
    """Beta-cdf-of-price-difference kernel with equal shape ``gamma``.

    Equal shapes make the kernel complement symmetric,
    ``p(x, y) + p(y, x) = 1``, the hypothesis under which the guessing
    surface collapses to its single-product form.  The strategy engine
    only requires a ``prob(x, y)`` method and a ``range`` attribute, so
    tests can plug in deliberately asymmetric kernels.
    """

    gamma: float
    range: PriceRange

    def __post_init__(self) -> None:
        if not self.gamma > 0.0:
            raise ValueError(f"gamma must be positive, got {self.gamma!r}")

    def prob(self, x: float, y: float) -> float:
        return first_mover_prob(x, y, self)


def first_mover_prob(x: float, y: float, model: FirstMoverModel) -> float:
    """P(L moves first | L quotes x, H quotes y), in [0, 1].

    Evaluates the symmetric beta cdf of ``x - y`` on ``[-rho, rho]`` via
    the regularized incomplete beta after the affine rescaling
    ``z = (x - y + rho) / (2 rho)``; equivalent to integrating the kernel
    density directly, but fast and accurate in the tails.
    """
    rho = model.range.rho
    diff = x - y
    if abs(diff) > rho:
        raise OutOfDomainError(
            f"price difference {diff!r} exceeds the support range {rho!r}"
        )
    z = (diff + rho) / (2.0 * rho)
    return beta_cdf(min(max(z, 0.0), 1.0), BetaShape(model.gamma, model.gamma))
