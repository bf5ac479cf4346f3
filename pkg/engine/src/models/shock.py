from dataclasses import dataclass, field
from typing import Dict

import numpy as np
from scipy import sparse

from .banking import DefaultVector, LossReport, ProjectedBook
from .contagion import ContagionResult, MarketShares, PassThroughResult
from .emissions import EmissionVector
from .instance import ModelInstance
from .network import ProductionParams, SupplyNetwork, ThresholdResult


@dataclass(frozen=True)
class DirectShockPoint:
    """Direct defaults and output loss at one carbon price."""

    price: float
    defaults: np.ndarray
    output_loss: float

    @property
    def default_count(self) -> int:
        return int(self.defaults.sum())


@dataclass(frozen=True)
class PreparedInstance:
    """
    An instance made ready for a sweep.

    Emissions are estimated on the full network; the production network,
    market shares and transfer operator belong to the thresholded one.
    """

    instance: ModelInstance
    network: SupplyNetwork
    threshold: ThresholdResult
    emissions: EmissionVector
    params: ProductionParams
    shares: MarketShares
    transfer: sparse.csr_matrix
    buckets: np.ndarray


@dataclass(frozen=True)
class CellOutcome:
    """Every intermediate result of one sweep cell."""

    costs: PassThroughResult
    contagion: ContagionResult
    projected: ProjectedBook
    defaults: DefaultVector
    losses: LossReport
    section_output_losses: Dict[str, float] = field(default_factory=dict)


__all__ = ["DirectShockPoint", "PreparedInstance", "CellOutcome"]
