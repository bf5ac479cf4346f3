from dataclasses import dataclass
from typing import Tuple

import numpy as np


@dataclass(frozen=True)
class MarketShares:
    """Market share of each firm within its class-level sector."""

    mu: np.ndarray
    effective: np.ndarray


@dataclass(frozen=True)
class PassThroughResult:
    """Outcome of distributing initial carbon costs down the supply chain."""

    initial: np.ndarray
    retained: np.ndarray
    iterations: int
    circulating: Tuple[float, ...]

    @property
    def initial_total(self) -> float:
        return float(self.initial.sum())

    @property
    def retained_total(self) -> float:
        return float(self.retained.sum())

    @property
    def residual(self) -> float:
        """Initial cost mass not yet retained by any firm."""
        return max(0.0, self.initial_total - self.retained_total)

    @property
    def distributed_fraction(self) -> float:
        total = self.initial_total
        return 1.0 if total <= 0 else self.retained_total / total


@dataclass(frozen=True)
class ContagionResult:
    """Fixed point of production levels after a shock and the implied losses."""

    h_initial: np.ndarray
    h_final: np.ndarray
    iterations: int
    total_loss: float
    direct_loss: float
    indirect_loss: float
    trace: Tuple[float, ...] = ()

    @property
    def n(self) -> int:
        return int(len(self.h_final))


__all__ = ["MarketShares", "PassThroughResult", "ContagionResult"]
