"""Model configuration: a flat JSON schema with nested shape blocks.

Every field is optional; omitted fields take the shipped defaults (the
reference parameter set in ``default_config.json``).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

from .errors import ConfigParseError, ConfigValidationError
from .first_mover import FirstMoverModel
from .pricing import BetaShape, MarketModel, PriceRange
from .quadrature import QuadratureSettings
from .strategy import DecisionModel

__all__ = ["ModelConfig", "load_config"]

_TOP_KEYS = {
    "price_range",
    "low_shape",
    "high_shape",
    "background_shape",
    "gamma",
    "quadrature",
    "zero_band",
}


@dataclass(frozen=True)
class ModelConfig:
    """Validated model parameters, convertible to the engine's model types."""

    price_range: PriceRange
    low_shape: BetaShape
    high_shape: BetaShape
    background_shape: BetaShape
    gamma: float
    quadrature: QuadratureSettings
    zero_band: float

    @classmethod
    def default(cls) -> "ModelConfig":
        return cls.from_dict(_default_dict())

    @classmethod
    def from_dict(cls, raw: dict) -> "ModelConfig":
        unknown = set(raw) - _TOP_KEYS
        if unknown:
            raise ConfigValidationError(f"unknown config keys: {sorted(unknown)}")
        merged = _default_dict()
        for key, value in raw.items():
            if isinstance(merged[key], dict):
                if not isinstance(value, dict):
                    raise ConfigValidationError(f"{key!r} must be a JSON object")
                block = dict(merged[key])
                extra = set(value) - set(block)
                if extra:
                    raise ConfigValidationError(
                        f"unknown keys in {key!r}: {sorted(extra)}"
                    )
                block.update(value)
                merged[key] = block
            else:
                merged[key] = value

        price = _build(
            "price_range: x_min < x_max",
            lambda: PriceRange(
                _number(merged["price_range"], "price_range", "x_min"),
                _number(merged["price_range"], "price_range", "x_max"),
            ),
        )
        shapes = {}
        for name in ("low_shape", "high_shape", "background_shape"):
            shapes[name] = _build(
                f"{name}: alpha > 0 and beta > 0",
                lambda name=name: BetaShape(
                    _number(merged[name], name, "alpha"),
                    _number(merged[name], name, "beta"),
                ),
            )
        gamma = _number(merged, "<top level>", "gamma")
        if not gamma > 0.0:
            raise ConfigValidationError(f"gamma must be positive, got {gamma!r}")
        quad_block = merged["quadrature"]
        quad = _build(
            "quadrature: abs_tol > 0, rel_tol > 0, max_depth >= 1",
            lambda: QuadratureSettings(
                abs_tol=_number(quad_block, "quadrature", "abs_tol"),
                rel_tol=_number(quad_block, "quadrature", "rel_tol"),
                max_depth=int(_number(quad_block, "quadrature", "max_depth")),
            ),
        )
        zero_band = _number(merged, "<top level>", "zero_band")
        if zero_band < 0.0:
            raise ConfigValidationError(f"zero_band must be nonnegative, got {zero_band!r}")
        return cls(
            price_range=price,
            low_shape=shapes["low_shape"],
            high_shape=shapes["high_shape"],
            background_shape=shapes["background_shape"],
            gamma=gamma,
            quadrature=quad,
            zero_band=zero_band,
        )

    def market_model(self) -> MarketModel:
        return MarketModel(
            low=self.low_shape,
            high=self.high_shape,
            background=self.background_shape,
            range=self.price_range,
        )

    def first_mover_model(self) -> FirstMoverModel:
        return FirstMoverModel(gamma=self.gamma, range=self.price_range)

    def decision_model(self) -> DecisionModel:
        return DecisionModel(
            market=self.market_model(),
            first_mover=self.first_mover_model(),
            quad=self.quadrature,
            zero_band=self.zero_band,
        )


def _default_dict() -> dict:
    text = resources.files("discount_strategy").joinpath("default_config.json").read_text(
        encoding="utf-8"
    )
    return json.loads(text)


def _number(block: dict, block_name: str, key: str) -> float:
    if key not in block:
        raise ConfigValidationError(f"missing key {key!r} in {block_name!r}")
    value = block[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigValidationError(
            f"{block_name}.{key} must be a number, got {value!r}"
        )
    return float(value)


def _build(invariant: str, factory):
    try:
        return factory()
    except ValueError as exc:
        raise ConfigValidationError(f"invalid {invariant}: {exc}") from exc


def load_config(path: str | None = None) -> ModelConfig:
    """Load and validate a configuration file.

    ``None`` loads the shipped default configuration.  Parse failures
    raise :class:`ConfigParseError` with file/line context; invariant
    violations raise :class:`ConfigValidationError` naming the field.
    """
    if path is None:
        return ModelConfig.default()
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigParseError(f"cannot read config {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigParseError(
            f"config {path!r} is not valid JSON: line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(raw, dict):
        raise ConfigValidationError("config root must be a JSON object")
    return ModelConfig.from_dict(raw)
