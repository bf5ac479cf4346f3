"""
Base test class for synthetic data testing.
"""

from engine.src.schemas.v1.config import GeneratorConfig
from engine.src.services.v1 import (
    EmissionsService,
    NetworkService,
    SyntheticDataService,
)
from engine.tests.services.v1.base import BaseServiceTest


class BaseSyntheticDataServiceTest(BaseServiceTest):
    """Base test class for generator and fixture tests."""

    def setUp(self):
        super().setUp()
        self.service = SyntheticDataService()
        self.networks = NetworkService()
        self.emissions = EmissionsService()

    @staticmethod
    def config(**overrides) -> GeneratorConfig:
        values = {"n_firms": 300, "n_banks": 3, "seed": 7}
        values.update(overrides)
        return GeneratorConfig(**values)


__all__ = ["BaseSyntheticDataServiceTest"]
