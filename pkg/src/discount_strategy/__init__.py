"""Decision engine for the two-period discount shopping problem.

Computes the buyer strategy minimizing the expected purchase price when a
first-period offer must be accepted or rejected before the second-period
price is known, and verifies optimality with an independent Monte Carlo
simulator.
"""

from .config import ModelConfig, load_config
from .errors import (
    ConfigError,
    ConfigParseError,
    ConfigValidationError,
    DepthExceededWarning,
    MissingGuessError,
    NoBracketError,
    NonFiniteError,
    OutOfDomainError,
    SeriesDivergenceError,
)
from .first_mover import FirstMoverModel, first_mover_prob
from .pricing import (
    BetaShape,
    MarketModel,
    PriceRange,
    Seller,
    beta_cdf,
    beta_pdf,
    joint_pdf,
    marginal_pdf,
    marginal_pdf_closed_form,
    scaled_beta_pdf,
)
from .quadrature import (
    DEFAULT_SETTINGS_1D,
    DEFAULT_SETTINGS_2D,
    QuadratureSettings,
    find_root,
    integrate_1d,
    integrate_2d,
)
from .simulate import (
    Episode,
    SimulationReport,
    compare_strategies,
    estimate_expected_price,
    run_episode,
    sample_first_mover,
    sample_prices,
)
from .strategy import (
    Decision,
    DecisionModel,
    ExpectedPriceBreakdown,
    StrategyKind,
    StrategySpec,
    ThresholdResult,
    Verdict,
    decide,
    decide_with_guess,
    expected_price,
    find_threshold,
    h_curve,
    h_surface,
    h_surface_symmetric,
)

__version__ = "0.1.0"
