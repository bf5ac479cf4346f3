from dataclasses import dataclass, field
from typing import Optional

from ..schemas.v1.config import FuelSectorConfig
from .banking import BankRegister
from .emissions import EmissionVector
from .network import CriticalityTable, FirmBook, SupplyNetwork


@dataclass(frozen=True)
class ModelInstance:
    """
    Everything a sweep needs: network, books, banks, criticality and fuel setup.

    ``emissions`` overrides the fuel-based estimate when given.
    """

    network: SupplyNetwork
    book: FirmBook
    banks: BankRegister
    criticality: CriticalityTable = field(default_factory=CriticalityTable)
    fuel: FuelSectorConfig = field(default_factory=FuelSectorConfig.hungarian_defaults)
    emissions: Optional[EmissionVector] = None
    name: str = "instance"

    @property
    def n(self) -> int:
        return self.network.n


__all__ = ["ModelInstance"]
