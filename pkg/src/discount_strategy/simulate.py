"""Independent Monte Carlo oracle for the two-period purchase problem.

Samples the full generative story (base prices, background factor, first
mover, buyer decision), plays out purchase episodes under any strategy,
and estimates expected buying prices to cross-validate the semi-analytic
engine.

Randomness is fully reproducible: a master ``numpy.random.SeedSequence``
built from the report seed is split into one child per episode batch
(batch size fixed at 2**16 regardless of worker count).  Within a batch
the uniform draws are consumed in a fixed order -- price triples
(row-major, one row per episode), then first-mover uniforms, then
acceptance uniforms -- so every strategy sees the identical episode
stream and reports are bit-identical across runs and worker counts.

Guess-aware strategies are played against the realized second-period
price: the paper-level theory leaves the origin of the buyer's guess
open, and feeding the true price makes the guessing strategy a checkable
perfect-information bound.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import special as _special

from .first_mover import FirstMoverModel, first_mover_prob
from .pricing import MarketModel, Seller
from .strategy import DecisionModel, StrategyKind, StrategySpec, Verdict

__all__ = [
    "Episode",
    "SimulationReport",
    "BATCH_SIZE",
    "sample_prices",
    "sample_first_mover",
    "run_episode",
    "estimate_expected_price",
    "compare_strategies",
]

BATCH_SIZE = 1 << 16


@dataclass(frozen=True)
class Episode:
    """One simulated purchase: prices, first mover, decision, amount paid."""

    x_l: float
    x_h: float
    first_mover: Seller
    first_offer: float
    decision: Verdict
    paid: float


@dataclass(frozen=True)
class SimulationReport:
    """Summary of a batch of simulated episodes under one strategy."""

    n: int
    mean_paid: float
    std_err: float
    accept_rate: float
    seed: int


def _prices_from_uniforms(model: MarketModel, u_low, u_high, u_background):
    """Map uniform draws to observable prices via inverse beta cdfs.

    Works elementwise on scalars or arrays.  ``betaincinv`` inverts the
    same regularized incomplete beta the analytic module implements, so
    sampled marginals and the quadrature densities agree by construction.
    """
    z_l = _special.betaincinv(model.low.alpha, model.low.beta, u_low)
    z_h = _special.betaincinv(model.high.alpha, model.high.beta, u_high)
    z = _special.betaincinv(model.background.alpha, model.background.beta, u_background)
    rho = model.range.rho
    x_min = model.range.x_min
    return z_l * z * rho + x_min, z_h * z * rho + x_min


def sample_prices(model: MarketModel, rng: np.random.Generator) -> tuple[float, float]:
    """Draw one pair of observable prices (x_l, x_h); deterministic per rng state."""
    u = rng.random(3)
    x_l, x_h = _prices_from_uniforms(model, u[0], u[1], u[2])
    return float(x_l), float(x_h)


def sample_first_mover(
    x_l: float, x_h: float, model: FirstMoverModel, rng: np.random.Generator
) -> Seller:
    """Draw which salesperson quotes first, given both prices."""
    p = first_mover_prob(x_l, x_h, model)
    return Seller.L if rng.random() < p else Seller.H


def run_episode(
    strategy: StrategySpec,
    prices: tuple[float, float],
    first_mover: Seller,
    guess: float | None = None,
    accept_u: float | None = None,
) -> Episode:
    """Play a single purchase episode under ``strategy``.

    Rejecting the first offer forces paying the other seller's price in
    the second period.  ``guess`` is required by guess-aware strategies;
    ``accept_u`` supplies the uniform draw for strategies with fractional
    acceptance probabilities.
    """
    x_l, x_h = prices
    first_offer = x_l if first_mover is Seller.L else x_h
    second_offer = x_h if first_mover is Seller.L else x_l

    prob = strategy.accept_probability(first_offer, guess)
    if prob == 1.0:
        accepted = True
    elif prob == 0.0:
        accepted = False
    elif accept_u is None:
        raise ValueError("accept_u draw required for a fractional acceptance probability")
    else:
        accepted = accept_u < prob

    return Episode(
        x_l=x_l,
        x_h=x_h,
        first_mover=first_mover,
        first_offer=first_offer,
        decision=Verdict.ACCEPT if accepted else Verdict.REJECT,
        paid=first_offer if accepted else second_offer,
    )


def _first_mover_prob_batch(model, x_l: np.ndarray, x_h: np.ndarray) -> np.ndarray:
    if isinstance(model, FirstMoverModel):
        rho = model.range.rho
        z = np.clip((x_l - x_h + rho) / (2.0 * rho), 0.0, 1.0)
        return _special.betainc(model.gamma, model.gamma, z)
    # Custom kernels fall back to scalar evaluation.
    return np.array([model.prob(a, b) for a, b in zip(x_l, x_h)])


def _accept_prob_batch(
    strategy: StrategySpec, first: np.ndarray, second: np.ndarray
) -> np.ndarray:
    kind = strategy.kind
    if kind is StrategyKind.ALWAYS_ACCEPT:
        return np.ones_like(first)
    if kind is StrategyKind.ALWAYS_REJECT:
        return np.zeros_like(first)
    if kind is StrategyKind.THRESHOLD:
        return (first <= strategy.threshold).astype(np.float64)
    if kind is StrategyKind.GUESSING_SURFACE:
        return (first <= second).astype(np.float64)
    rng = strategy.table_range
    table = np.asarray(strategy.table)
    n_v, n_w = table.shape
    in_range = (
        (first >= rng.x_min)
        & (first <= rng.x_max)
        & (second >= rng.x_min)
        & (second <= rng.x_max)
    )
    i = np.clip(((first - rng.x_min) / rng.rho * n_v).astype(np.int64), 0, n_v - 1)
    j = np.clip(((second - rng.x_min) / rng.rho * n_w).astype(np.int64), 0, n_w - 1)
    return np.where(in_range, table[i, j], 0.0)


def _episode_batch(model: DecisionModel, seed_seq: np.random.SeedSequence, size: int):
    """Common random numbers for one batch: prices, first mover, accept draws."""
    rng = np.random.default_rng(seed_seq)
    u = rng.random((size, 3))
    u_pi = rng.random(size)
    u_accept = rng.random(size)
    x_l, x_h = _prices_from_uniforms(model.market, u[:, 0], u[:, 1], u[:, 2])
    first_is_l = u_pi < _first_mover_prob_batch(model.first_mover, x_l, x_h)
    first = np.where(first_is_l, x_l, x_h)
    second = np.where(first_is_l, x_h, x_l)
    return first, second, u_accept


def _play_batch(strategy: StrategySpec, first, second, u_accept):
    """Amounts paid and the acceptance mask for one batch under ``strategy``."""
    accepted = u_accept < _accept_prob_batch(strategy, first, second)
    paid = np.where(accepted, first, second)
    return paid, accepted


def _batch_sizes(n: int) -> list[int]:
    sizes = [BATCH_SIZE] * (n // BATCH_SIZE)
    if n % BATCH_SIZE:
        sizes.append(n % BATCH_SIZE)
    return sizes


def _reduce_reports(
    partials: list[list[tuple[float, float, int]]],
    n: int,
    seed: int,
    x_min: float,
    count: int,
) -> list[SimulationReport]:
    """Combine per-batch partial sums, in batch order, into final reports."""
    reports = []
    for s in range(count):
        s1 = 0.0
        s2 = 0.0
        accepts = 0
        for batch in partials:
            b1, b2, ba = batch[s]
            s1 += b1
            s2 += b2
            accepts += ba
        mean = x_min + s1 / n
        var = max((s2 - s1 * s1 / n) / (n - 1), 0.0) if n > 1 else 0.0
        reports.append(
            SimulationReport(
                n=n,
                mean_paid=mean,
                std_err=math.sqrt(var / n),
                accept_rate=accepts / n,
                seed=seed,
            )
        )
    return reports


def _simulate(
    strategies: list[StrategySpec],
    model: DecisionModel,
    n: int,
    seed: int,
    workers: int,
) -> list[SimulationReport]:
    if n < 1:
        raise ValueError("episode count must be at least 1")
    x_min = model.market.range.x_min
    sizes = _batch_sizes(n)
    children = np.random.SeedSequence(seed).spawn(len(sizes))

    def one_batch(k: int) -> list[tuple[float, float, int]]:
        first, second, u_accept = _episode_batch(model, children[k], sizes[k])
        out = []
        for strategy in strategies:
            paid, accepted = _play_batch(strategy, first, second, u_accept)
            shifted = paid - x_min  # better-conditioned moment sums
            out.append(
                (float(np.sum(shifted)), float(np.sum(shifted * shifted)),
                 int(np.count_nonzero(accepted)))
            )
        return out

    if workers > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(one_batch, range(len(sizes))))
    else:
        partials = [one_batch(k) for k in range(len(sizes))]

    return _reduce_reports(partials, n, seed, x_min, len(strategies))


def estimate_expected_price(
    strategy: StrategySpec,
    model: DecisionModel,
    n: int,
    seed: int,
    workers: int = 1,
) -> SimulationReport:
    """Estimate the expected buying price of ``strategy`` over n episodes.

    Reproducible for a fixed seed; the report is independent of
    ``workers``.  Guess-aware strategies receive the realized
    second-period price as their guess.
    """
    return _simulate([strategy], model, n, seed, workers)[0]


def compare_strategies(
    strategies: list[StrategySpec],
    model: DecisionModel,
    n: int,
    seed: int,
    workers: int = 1,
) -> list[SimulationReport]:
    """Evaluate several strategies on the identical episode stream.

    Common random numbers isolate strategy effects: every strategy sees
    the same prices, first movers and acceptance draws, so permuting the
    input list permutes but never changes the per-strategy reports.
    """
    if not strategies:
        raise ValueError("need at least one strategy to compare")
    return _simulate(list(strategies), model, n, seed, workers)
