"""
Base test class for contagion testing.
"""

from typing import Dict, Sequence, Tuple

import numpy as np

from engine.src.models import CriticalityTable, ProductionParams, SupplyNetwork
from engine.src.services.v1 import ContagionService, NetworkService
from engine.tests.services.v1.base import BaseServiceTest, Edge


class BaseContagionServiceTest(BaseServiceTest):
    """Base test class for contagion tests."""

    def setUp(self):
        super().setUp()
        self.networks = NetworkService()
        self.service = ContagionService()

    def calibrate(
        self, network: SupplyNetwork, sectors: Sequence[str], table: CriticalityTable
    ) -> ProductionParams:
        return self.networks.calibrate(
            network, np.asarray(sectors, dtype=object), table
        )

    @staticmethod
    def essential_pairs(
        edges: Sequence[Edge], sectors: Sequence[str], table: CriticalityTable
    ) -> Dict[Tuple[int, int], bool]:
        """(buyer, supplier) -> essential, in the form the oracle expects."""
        return {
            (j, i): table.is_essential(sectors[j], sectors[i]) for i, j, _ in edges
        }


__all__ = ["BaseContagionServiceTest"]
