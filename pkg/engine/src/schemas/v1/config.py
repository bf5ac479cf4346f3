"""
Configuration schemas: fuel sectors, synthetic generator, shocks and runs.
"""

import hashlib
import os
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Type, TypeVar

import yaml
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    PrivateAttr,
    ValidationError,
    model_validator,
)

from ...errors import ConfigurationError

ModelT = TypeVar("ModelT", bound=BaseModel)

OUTPUT_DIR_ENV = "CARBON_STRESS_OUTPUT_DIR"
WORKERS_ENV = "CARBON_STRESS_WORKERS"
WRITE_RETAINED_ENV = "CARBON_STRESS_WRITE_RETAINED"

# Combustion totals in tonnes, before removing household consumption.
GROSS_GAS_EMISSIONS = 12.5e6
GROSS_OIL_EMISSIONS = 13.7e6
COMMERCIAL_GAS_SHARE = 2.0 / 3.0
COMMERCIAL_OIL_SHARE = 0.736


def default_price_grid() -> List[float]:
    return [float(p) for p in range(10, 1001, 10)]


def default_output_dir() -> Path:
    return Path(os.getenv(OUTPUT_DIR_ENV, "results"))


def default_workers() -> int:
    value = os.getenv(WORKERS_ENV)
    if value:
        try:
            return max(1, int(value))
        except ValueError as e:
            raise ConfigurationError(f"{WORKERS_ENV} must be an integer") from e
    return max(1, min(8, os.cpu_count() or 1))


def default_write_retained() -> bool:
    return os.getenv(WRITE_RETAINED_ENV, "").strip().lower() in ("1", "true", "yes")


def load_model(model: Type[ModelT], data: Any, source: str = "config") -> ModelT:
    """Validate ``data`` as ``model``, converting validation errors."""
    try:
        return model.model_validate(data)
    except ValidationError as e:
        raise ConfigurationError(f"invalid {source}: {e}") from e


def read_yaml(path: Path) -> Dict[str, Any]:
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f)
    except FileNotFoundError as e:
        raise ConfigurationError(f"config file not found: {path}") from e
    except yaml.YAMLError as e:
        raise ConfigurationError(f"config file {path} is not valid YAML: {e}") from e
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigurationError(f"config file {path} must contain a mapping")
    return data


class ProductionFunction(str, Enum):
    GL = "GL"
    LINEAR = "Linear"


class PassThroughMode(str, Enum):
    ON = "on"
    OFF = "off"
    BOTH = "both"


class FunctionChoice(str, Enum):
    GL = "GL"
    LINEAR = "Linear"
    BOTH = "both"


class FixtureName(str, Enum):
    BANKS = "banks"
    CORE = "core"


class FuelSectorConfig(BaseModel):
    """Fuel distributing sectors and the national combustion totals to split."""

    model_config = ConfigDict(frozen=True)

    gas_sectors: List[str] = Field(
        ..., description="Sector code prefixes of gas distributors"
    )
    oil_sectors: List[str] = Field(
        ..., description="Sector code prefixes of oil distributors"
    )
    total_gas_emissions: float = Field(
        ..., ge=0, description="Commercial gas combustion emissions in tonnes"
    )
    total_oil_emissions: float = Field(
        ..., ge=0, description="Commercial oil combustion emissions in tonnes"
    )
    excluded_sectors: List[str] = Field(
        default_factory=list,
        description="Sector code prefixes whose purchases are not attributed",
    )

    @model_validator(mode="after")
    def _check_disjoint(self) -> "FuelSectorConfig":
        overlap = set(self.gas_sectors) & set(self.oil_sectors)
        if overlap:
            raise ValueError(f"gas and oil sectors overlap: {sorted(overlap)}")
        return self

    @classmethod
    def hungarian_defaults(cls) -> "FuelSectorConfig":
        """Hungarian sector lists with totals net of household use."""
        return cls(
            gas_sectors=["D35.2.1", "D35.2.2", "D35.2.3"],
            oil_sectors=["C19.2.0", "G46.7.1", "G47.3.0"],
            excluded_sectors=["K", "G46.1.2"],
            total_gas_emissions=GROSS_GAS_EMISSIONS * COMMERCIAL_GAS_SHARE,
            total_oil_emissions=GROSS_OIL_EMISSIONS * COMMERCIAL_OIL_SHARE,
        )

    @classmethod
    def from_yaml(cls, path: Path) -> "FuelSectorConfig":
        return load_model(cls, read_yaml(Path(path)), source=f"fuel config {path}")


def _default_sector_mix() -> Dict[str, float]:
    return {
        "A": 0.04,
        "C": 0.14,
        "D": 0.01,
        "F": 0.12,
        "G": 0.27,
        "H": 0.06,
        "I": 0.05,
        "J": 0.05,
        "L": 0.06,
        "M": 0.12,
        "N": 0.08,
    }


class GeneratorConfig(BaseModel):
    """Parameters of the synthetic instance generator."""

    model_config = ConfigDict(frozen=True)

    n_firms: int = Field(default=1000, ge=2, description="Number of firms")
    n_banks: int = Field(default=5, ge=0, description="Number of banks")
    seed: int = Field(default=0, ge=0, lt=2**64, description="Generator seed")
    emission_tail_exponent: float = Field(
        default=1.05, gt=0, description="Power-law tail exponent of sizes"
    )
    sector_mix: Dict[str, float] = Field(
        default_factory=_default_sector_mix,
        description="Weights over section letters",
    )
    fuel_seller_fraction: float = Field(
        default=0.01, ge=0, le=1, description="Fraction of firms selling fuel"
    )
    loan_coverage: float = Field(
        default=0.3, ge=0, le=1, description="Fraction of firms with a loan"
    )
    essentiality_rate: float = Field(
        default=0.2,
        ge=0,
        le=1,
        description="Fraction of sector pairs marked essential",
    )
    mean_degree: float = Field(
        default=4.0, gt=0, description="Mean number of customers per firm"
    )
    emitter_fraction: float = Field(
        default=0.45, ge=0, le=1, description="Fraction of firms buying fuel"
    )
    core_size: int = Field(
        default=6, ge=0, description="Firms in the essential-supply ring"
    )

    @model_validator(mode="after")
    def _check_feasible(self) -> "GeneratorConfig":
        if self.n_banks == 0 and self.loan_coverage > 0:
            raise ValueError("loan_coverage > 0 requires at least one bank")
        if self.core_size > self.n_firms:
            raise ValueError("core_size cannot exceed n_firms")
        if self.core_size == 1:
            raise ValueError("core_size must be 0 or at least 2")
        if not self.sector_mix:
            raise ValueError("sector_mix must not be empty")
        for letter, weight in self.sector_mix.items():
            if len(letter) != 1 or not letter.isalpha() or not letter.isupper():
                raise ValueError(f"sector_mix key '{letter}' is not a section letter")
            if weight < 0:
                raise ValueError(f"sector_mix weight for '{letter}' is negative")
        if sum(self.sector_mix.values()) <= 0:
            raise ValueError("sector_mix weights must not all be zero")
        return self

    @classmethod
    def from_yaml(cls, path: Path) -> "GeneratorConfig":
        data = read_yaml(Path(path))
        return load_model(cls, data.get("generator", data), source=f"{path}")


class ShockScenario(BaseModel):
    """One cell of a sweep: price plus the flags that shape the shock."""

    model_config = ConfigDict(frozen=True)

    price: float = Field(..., ge=0, description="Carbon price per tonne")
    pass_through: bool = Field(default=False, description="Pass costs downstream")
    production_fn: ProductionFunction = Field(default=ProductionFunction.GL)
    kappa: float = Field(default=1.0, ge=0, le=1, description="Loss given default")
    coverage: float = Field(
        default=0.999999, gt=0, lt=1, description="Pass-through stopping share"
    )
    epsilon: float = Field(default=1e-6, gt=0, description="Propagation tolerance")
    max_iterations: int = Field(default=10_000, ge=1)
    max_passthrough_iterations: Optional[int] = Field(
        default=None, ge=1, description="Defaults to 10 times the firm count"
    )
    demand_channel: bool = Field(default=True)
    trace: bool = Field(default=False, description="Record per-iteration deltas")

    @property
    def mode(self) -> str:
        return "pass_through" if self.pass_through else "no_pass_through"

    @property
    def cell_id(self) -> str:
        return f"{self.price:g}_{self.mode}_{self.production_fn.value}"


class InputPaths(BaseModel):
    firms: Path
    edges: Path
    criticality: Optional[Path] = None
    banks: Optional[Path] = None
    loans: Optional[Path] = None
    fuel_config: Optional[Path] = None
    emissions: Optional[Path] = Field(
        default=None, description="Explicit per-firm emissions overriding estimates"
    )


class RunConfig(BaseModel):
    """A full sweep: data source, price grid and scenario axes."""

    inputs: Optional[InputPaths] = None
    generator: Optional[GeneratorConfig] = None
    fuel: Optional[FuelSectorConfig] = None
    prices: List[float] = Field(default_factory=default_price_grid)
    pass_through: PassThroughMode = PassThroughMode.BOTH
    fn: FunctionChoice = FunctionChoice.BOTH
    kappa: float = Field(default=1.0, ge=0, le=1)
    epsilon: float = Field(default=1e-6, gt=0)
    coverage: float = Field(default=0.999999, gt=0, lt=1)
    threshold: float = Field(default=0.0, ge=0, description="Minimum edge value")
    max_iterations: int = Field(default=10_000, ge=1)
    max_passthrough_iterations: Optional[int] = Field(default=None, ge=1)
    demand_channel: bool = True
    check_dominance: bool = True
    dominance_tolerance: float = Field(
        default=1e-6, ge=0, description="Slack for fixed points stopped at epsilon"
    )
    write_trace: bool = False
    write_retained_costs: bool = Field(
        default_factory=default_write_retained,
        description="Dump retained carbon costs per price and mode",
    )
    output_dir: Path = Field(default_factory=default_output_dir)
    workers: int = Field(default_factory=default_workers, ge=1)

    _source_text: Optional[str] = PrivateAttr(default=None)

    @model_validator(mode="after")
    def _check_run(self) -> "RunConfig":
        if self.inputs is not None and self.generator is not None:
            raise ValueError("inputs and generator are mutually exclusive")
        if not self.prices:
            raise ValueError("price grid must not be empty")
        if any(p < 0 for p in self.prices):
            raise ValueError("prices must be >= 0")
        if any(b <= a for a, b in zip(self.prices, self.prices[1:])):
            raise ValueError("prices must be strictly ascending")
        return self

    @classmethod
    def from_yaml(cls, path: Path) -> "RunConfig":
        config = load_model(cls, read_yaml(Path(path)), source=f"run config {path}")
        config._source_text = Path(path).read_text(encoding="utf-8")
        return config

    @property
    def source_text(self) -> Optional[str]:
        """The YAML text this config was loaded from, verbatim."""
        return self._source_text

    def source_digest(self) -> Optional[str]:
        if self._source_text is None:
            return None
        return hashlib.sha256(self._source_text.encode("utf-8")).hexdigest()

    def with_overrides(self, **overrides: Any) -> "RunConfig":
        """Return a re-validated copy with the non-None overrides applied."""
        data = self.model_dump()
        data.update({k: v for k, v in overrides.items() if v is not None})
        config = load_model(RunConfig, data, source="run config overrides")
        config._source_text = self._source_text
        return config

    def modes(self) -> List[bool]:
        if self.pass_through is PassThroughMode.BOTH:
            return [False, True]
        return [self.pass_through is PassThroughMode.ON]

    def functions(self) -> List[ProductionFunction]:
        if self.fn is FunctionChoice.BOTH:
            return [ProductionFunction.GL, ProductionFunction.LINEAR]
        return [ProductionFunction(self.fn.value)]

    def scenarios(self) -> List[ShockScenario]:
        """Grid cells ordered by price, then mode, then production function."""
        return [
            ShockScenario(
                price=price,
                pass_through=pass_through,
                production_fn=fn,
                kappa=self.kappa,
                coverage=self.coverage,
                epsilon=self.epsilon,
                max_iterations=self.max_iterations,
                max_passthrough_iterations=self.max_passthrough_iterations,
                demand_channel=self.demand_channel,
                trace=self.write_trace,
            )
            for price in self.prices
            for pass_through in self.modes()
            for fn in self.functions()
        ]

    def to_yaml_text(self) -> str:
        return yaml.safe_dump(
            self.model_dump(mode="json", exclude={"output_dir", "workers"}),
            sort_keys=True,
        )


__all__ = [
    "OUTPUT_DIR_ENV",
    "WORKERS_ENV",
    "WRITE_RETAINED_ENV",
    "default_price_grid",
    "default_output_dir",
    "default_workers",
    "default_write_retained",
    "load_model",
    "read_yaml",
    "ProductionFunction",
    "PassThroughMode",
    "FunctionChoice",
    "FixtureName",
    "FuelSectorConfig",
    "GeneratorConfig",
    "ShockScenario",
    "InputPaths",
    "RunConfig",
]
