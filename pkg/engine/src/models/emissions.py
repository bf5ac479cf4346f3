from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class FuelInStrengths:
    """Fuel purchases per firm and the distributable fuel sales."""

    s_in_gas: np.ndarray
    s_in_oil: np.ndarray
    s_out_gas: float
    s_out_oil: float
    gas_distributors: np.ndarray
    oil_distributors: np.ndarray

    @property
    def gas_degenerate(self) -> bool:
        return self.s_out_gas <= 0

    @property
    def oil_degenerate(self) -> bool:
        return self.s_out_oil <= 0

    @property
    def degenerate(self) -> bool:
        return self.gas_degenerate and self.oil_degenerate

    @property
    def distributors(self) -> np.ndarray:
        return self.gas_distributors | self.oil_distributors


@dataclass(frozen=True)
class EmissionVector:
    """
    Estimated tonnes of CO2 per firm.

    ``covered_*_share`` is the fraction of the configured total that was
    distributed to purchasing firms at all; ``dropped_emissions`` is the part
    of it attributed to purchases of excluded firms and not assigned to anyone.
    """

    emissions: np.ndarray
    total_gas: float
    total_oil: float
    covered_gas_share: float
    covered_oil_share: float
    dropped_emissions: float

    @classmethod
    def explicit(cls, emissions: np.ndarray) -> "EmissionVector":
        """Wrap given per-firm emissions, bypassing the fuel-based estimate."""
        values = np.asarray(emissions, dtype=float)
        total = float(values.sum())
        return cls(
            emissions=values,
            total_gas=total,
            total_oil=0.0,
            covered_gas_share=1.0 if total > 0 else 0.0,
            covered_oil_share=0.0,
            dropped_emissions=0.0,
        )

    @property
    def n(self) -> int:
        return int(len(self.emissions))

    @property
    def total(self) -> float:
        return float(self.emissions.sum())

    @property
    def emitters(self) -> np.ndarray:
        return self.emissions > 0

    @property
    def covered_total(self) -> float:
        return (
            self.total_gas * self.covered_gas_share
            + self.total_oil * self.covered_oil_share
        )


__all__ = ["FuelInStrengths", "EmissionVector"]
