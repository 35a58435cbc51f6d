import math

import numpy as np
import pytest

import discount_strategy as ds
from discount_strategy.errors import OutOfDomainError
from discount_strategy.pricing import BetaShape, PriceRange
from discount_strategy.quadrature import QuadratureSettings, integrate_1d
from discount_strategy.strategy import ThresholdResult, _threshold_from_curve


def make_market(low=(2.5, 4.5), high=(4.5, 1.5)):
    return ds.MarketModel(
        low=BetaShape(*low),
        high=BetaShape(*high),
        background=BetaShape(2.5, 2.5),
        range=PriceRange(1400.0, 1600.0),
    )


def test_model_requires_matching_ranges():
    market = make_market()
    kernel = ds.FirstMoverModel(gamma=10.0, range=PriceRange(1300.0, 1600.0))
    with pytest.raises(ValueError):
        ds.DecisionModel(market=market, first_mover=kernel)


def test_h_surface_zero_on_diagonal(paper_model):
    for v in np.linspace(1400.0, 1600.0, 9):
        assert ds.h_surface(float(v), float(v), paper_model) == 0.0


def test_h_surface_signs(paper_model):
    assert ds.h_surface(1450.0, 1500.0, paper_model) < 0.0
    assert ds.h_surface(1500.0, 1450.0, paper_model) > 0.0


def test_h_surface_term_by_term(paper_model):
    # Reassemble the two displayed terms from the raw building blocks.
    v, w = 1500.0, 1450.0
    market = paper_model.market
    kernel = paper_model.first_mover
    term1 = (v - w) * ds.first_mover_prob(v, w, kernel) * ds.joint_pdf(v, w, market)
    term2 = (v - w) * (1.0 - ds.first_mover_prob(w, v, kernel)) * ds.joint_pdf(w, v, market)
    assert ds.h_surface(v, w, paper_model) == pytest.approx(term1 + term2, rel=1e-12)


def test_symmetric_form_matches(paper_model):
    points = np.linspace(1405.0, 1595.0, 8)
    for v in points:
        for w in points:
            full = ds.h_surface(float(v), float(w), paper_model)
            collapsed = ds.h_surface_symmetric(float(v), float(w), paper_model)
            assert abs(full - collapsed) <= 1e-10 * (1.0 + abs(full))
    assert ds.h_surface_symmetric(1470.0, 1430.0, paper_model) == pytest.approx(
        ds.h_surface(1470.0, 1430.0, paper_model), rel=1e-10
    )


def test_symmetric_form_sign_law(paper_model):
    points = np.linspace(1410.0, 1590.0, 8)
    for v in points:
        for w in points:
            value = ds.h_surface_symmetric(float(v), float(w), paper_model)
            assert value * (v - w) >= 0.0


def test_h_curve_signs(paper_model):
    assert ds.h_curve(1400.0, paper_model) <= 0.0
    assert ds.h_curve(1420.0, paper_model) < 0.0
    assert ds.h_curve(1500.0, paper_model) > 0.0


def test_threshold_matches_reference_value(v0):
    assert v0 == pytest.approx(1434.43, abs=0.5)


def test_threshold_stable_under_tighter_tolerances(paper_model, v0):
    base = ds.find_threshold(paper_model, x_tol=1e-3, grid_points=16)
    tight_model = ds.DecisionModel(
        market=paper_model.market,
        first_mover=paper_model.first_mover,
        quad=QuadratureSettings(abs_tol=1e-9, rel_tol=1e-9),
    )
    tight = ds.find_threshold(tight_model, x_tol=1e-3, grid_points=16)
    assert abs(base.value - tight.value) <= 1e-3
    assert abs(base.value - v0) <= 1e-3


def test_threshold_scan_sentinels():
    rng = PriceRange(0.0, 10.0)
    res = _threshold_from_curve(lambda v: -1.0 - v * v, rng, 1e-9, 64)
    assert res == ThresholdResult(value=None, kind="always-accept", bracket=None, sign_changes=0)
    res = _threshold_from_curve(lambda v: 1.0 + v, rng, 1e-9, 64)
    assert res.kind == "always-reject" and res.value is None


def test_threshold_scan_multiple_roots_flags_leftmost():
    rng = PriceRange(0.0, 10.0)
    res = _threshold_from_curve(math.sin, rng, 1e-9, 64)
    assert res.kind == "root"
    assert res.sign_changes == 3
    assert res.value == pytest.approx(math.pi, abs=1e-8)


def test_threshold_scan_scale_invariance():
    rng = PriceRange(0.0, 10.0)
    f = lambda v: (v - 3.7) * (v * v + 1.0)
    base = _threshold_from_curve(f, rng, 1e-9, 64)
    doubled = _threshold_from_curve(lambda v: 2.0 * f(v), rng, 1e-9, 64)
    assert abs(base.value - doubled.value) <= 1e-9


def test_identical_shapes_still_yield_threshold():
    market = make_market(low=(2.5, 4.5), high=(2.5, 4.5))
    model = ds.DecisionModel(
        market=market,
        first_mover=ds.FirstMoverModel(gamma=10.0, range=market.range),
    )
    res = ds.find_threshold(model, x_tol=1e-3, grid_points=16)
    assert res.kind == "root"
    assert res.sign_changes == 1
    below = ds.decide(res.value - 5.0, model)
    above = ds.decide(res.value + 5.0, model)
    assert below.verdict is ds.Verdict.ACCEPT
    assert above.verdict is ds.Verdict.REJECT


def test_asymmetric_kernel_breaks_collapsed_form():
    # The general two-term path must keep working when the complement
    # symmetry hypothesis fails; only the collapsed form loses validity.
    class Skewed:
        def __init__(self, range_):
            self.range = range_
            self._shape = BetaShape(3.0, 6.0)

        def prob(self, x, y):
            z = (x - y + self.range.rho) / (2.0 * self.range.rho)
            return ds.beta_cdf(min(max(z, 0.0), 1.0), self._shape)

    market = make_market()
    model = ds.DecisionModel(market=market, first_mover=Skewed(market.range))
    p = model.first_mover.prob
    assert abs(p(1500.0, 1450.0) + p(1450.0, 1500.0) - 1.0) > 1e-3

    v, w = 1520.0, 1460.0
    full = ds.h_surface(v, w, model)
    collapsed = ds.h_surface_symmetric(v, w, model)
    assert abs(full - collapsed) > 1e-6
    assert full * (v - w) >= 0.0  # sign law holds regardless

    res = ds.find_threshold(model, x_tol=1e-3, grid_points=16)
    assert res.kind == "root"
    assert 1400.0 < res.value < 1600.0


def test_decide_examples(paper_model):
    assert ds.decide(1431.01, paper_model).verdict is ds.Verdict.ACCEPT
    assert ds.decide(1450.0, paper_model).verdict is ds.Verdict.REJECT
    assert ds.decide(1420.0, paper_model).verdict is ds.Verdict.ACCEPT
    with pytest.raises(OutOfDomainError):
        ds.decide(1399.0, paper_model)


def test_decide_with_guess_examples(paper_model):
    assert ds.decide_with_guess(1470.0, 1500.0, paper_model).verdict is ds.Verdict.ACCEPT
    assert ds.decide_with_guess(1500.0, 1450.0, paper_model).verdict is ds.Verdict.REJECT
    tie = ds.decide_with_guess(1470.0, 1470.0, paper_model)
    assert tie.verdict is ds.Verdict.ACCEPT
    assert tie.boundary
    with pytest.raises(OutOfDomainError):
        ds.decide_with_guess(1500.0, 1650.0, paper_model)


def test_strategy_spec_validation():
    rng = PriceRange(1400.0, 1600.0)
    with pytest.raises(ValueError):
        ds.StrategySpec.tabulated([[0.5, 1.2]], rng)
    with pytest.raises(ValueError):
        ds.StrategySpec.tabulated([], rng)
    with pytest.raises(ValueError):
        ds.StrategySpec.tabulated([[0.1, 0.2], [0.3]], rng)
    spec = ds.StrategySpec.tabulated([[0.25]], rng)
    assert spec.accept_probability(1500.0, 1450.0) == 0.25
    assert spec.accept_probability(1350.0, 1450.0) == 0.0


def test_always_reject_pays_mu0(paper_model):
    breakdown = ds.expected_price(ds.StrategySpec.always_reject(), paper_model)
    assert breakdown.mu1 == 0.0
    assert breakdown.total == breakdown.mu0


def test_mu0_identical_across_strategies(paper_model):
    a = ds.expected_price(ds.StrategySpec.always_reject(), paper_model)
    rng = np.random.default_rng(5)
    table = rng.uniform(0.0, 1.0, size=(4, 4))
    b = ds.expected_price(
        ds.StrategySpec.tabulated(table, paper_model.market.range), paper_model
    )
    assert a.mu0 == b.mu0  # bitwise, thanks to memoization
    assert 1400.0 <= b.total <= 1600.0


def test_threshold_outside_support_rejected(paper_model):
    with pytest.raises(OutOfDomainError):
        ds.expected_price(ds.StrategySpec.threshold_at(1650.0), paper_model)
