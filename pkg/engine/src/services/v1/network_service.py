"""
Network loading, thresholding, production-function calibration and summaries.
"""

import logging
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np
import pandas as pd

from ...errors import CalibrationError, ConfigurationError, InputDataError
from ...gateways.v1.csv_gateway import CsvReader
from ...models import (
    BankRegister,
    CriticalityTable,
    EmissionVector,
    FirmBook,
    ModelInstance,
    ProductionParams,
    SupplyNetwork,
    ThresholdResult,
)
from ...schemas.v1.config import FuelSectorConfig, InputPaths
from ...schemas.v1.reports import NetworkSummary
from .base_service import BaseService

PathLike = Union[str, Path]

CALIBRATION_RTOL = 1e-9


class NetworkService(BaseService):
    """Owns the supply network, the firm book and production parameters."""

    def load_network(
        self, firms_file: PathLike, edges_file: PathLike
    ) -> Tuple[SupplyNetwork, FirmBook]:
        book = CsvReader.read_firms(firms_file)
        network = CsvReader.read_edges(edges_file, book.n)
        self._log(
            logging.INFO,
            "Loaded network",
            firms=network.n,
            edges=network.edge_count,
            total_sales=network.total_sales,
        )
        return network, book

    def load_instance(
        self, inputs: InputPaths, fuel: Optional[FuelSectorConfig] = None
    ) -> ModelInstance:
        """Load every input file named in ``inputs`` into one model instance."""
        network, book = self.load_network(inputs.firms, inputs.edges)

        criticality = (
            CsvReader.read_criticality(inputs.criticality)
            if inputs.criticality is not None
            else CriticalityTable()
        )

        if (inputs.banks is None) != (inputs.loans is None):
            raise ConfigurationError("banks and loans files must be given together")
        if inputs.banks is not None and inputs.loans is not None:
            banks = CsvReader.read_banks(inputs.banks, inputs.loans, network.n)
        else:
            banks = BankRegister.empty(network.n)

        if fuel is None:
            fuel = (
                FuelSectorConfig.from_yaml(inputs.fuel_config)
                if inputs.fuel_config is not None
                else FuelSectorConfig.hungarian_defaults()
            )

        emissions: Optional[EmissionVector] = None
        if inputs.emissions is not None:
            emissions = CsvReader.read_emissions(inputs.emissions, network.n)

        return ModelInstance(
            network=network,
            book=book.with_loans(banks.borrowers),
            banks=banks,
            criticality=criticality,
            fuel=fuel,
            emissions=emissions,
            name=Path(inputs.firms).stem,
        )

    def threshold_network(
        self, network: SupplyNetwork, min_edge_value: float
    ) -> ThresholdResult:
        """Drop edges below ``min_edge_value``; firm indices are unchanged."""
        if min_edge_value < 0:
            raise ConfigurationError("min_edge_value must be >= 0")
        keep = network.value >= min_edge_value
        kept = SupplyNetwork.from_edges(
            network.n, network.supplier[keep], network.buyer[keep], network.value[keep]
        )
        total = network.value.sum()
        value_fraction = float(network.value[keep].sum() / total) if total > 0 else 1.0
        edge_fraction = (
            float(keep.sum() / network.edge_count) if network.edge_count else 1.0
        )
        self._log(
            logging.INFO,
            "Thresholded network",
            min_edge_value=min_edge_value,
            edges=kept.edge_count,
            retained_value_fraction=value_fraction,
        )
        return ThresholdResult(
            network=kept,
            min_edge_value=float(min_edge_value),
            retained_value_fraction=value_fraction,
            retained_edge_fraction=edge_fraction,
        )

    def calibrate(
        self,
        network: SupplyNetwork,
        sectors: np.ndarray,
        criticality: CriticalityTable,
    ) -> ProductionParams:
        """
        Calibrate the production function so that baseline output equals s_out.

        Essential inputs are grouped by supplier sector; every group enters
        a Leontief minimum. Non-essential inputs enter linearly on top of the
        value-added floor ``beta = max(0, s_out - s_in)``.
        """
        sectors = np.asarray(sectors, dtype=object)
        if len(sectors) != network.n:
            raise InputDataError("one sector code per firm is required")

        s_out, s_in = network.s_out, network.s_in
        essential = criticality.edge_mask(
            sectors[network.buyer], sectors[network.supplier]
        )

        edge_group = np.full(network.edge_count, -1, dtype=np.int64)
        if essential.any():
            keys = pd.MultiIndex.from_arrays(
                [network.buyer[essential], sectors[network.supplier[essential]]]
            )
            codes, uniques = pd.factorize(keys, sort=True)
            edge_group[essential] = codes
            group_firm = uniques.get_level_values(0).to_numpy(dtype=np.int64)
            group_sector = uniques.get_level_values(1).to_numpy(dtype=object)
            group_input = np.bincount(
                codes, weights=network.value[essential], minlength=len(uniques)
            )
        else:
            group_firm = np.zeros(0, dtype=np.int64)
            group_sector = np.zeros(0, dtype=object)
            group_input = np.zeros(0)

        group_out = s_out[group_firm]
        group_alpha = np.divide(
            group_input, group_out, out=np.zeros_like(group_input), where=group_out > 0
        )

        nonessential_input = np.bincount(
            network.buyer[~essential],
            weights=network.value[~essential],
            minlength=network.n,
        ).astype(float)
        beta = np.maximum(0.0, s_out - s_in)
        variable_output = s_out - beta
        linear_active = (nonessential_input > 0) | (variable_output <= 0)

        params = ProductionParams(
            network=network,
            beta=beta,
            nonessential_input=nonessential_input,
            linear_active=linear_active,
            inert=s_out <= 0,
            group_firm=group_firm,
            group_sector=group_sector,
            group_alpha=group_alpha,
            group_input=group_input,
            edge_group=edge_group,
        )
        self._verify_calibration(params)
        self._log(
            logging.INFO,
            "Calibrated production functions",
            firms=network.n,
            essential_groups=len(group_firm),
            essential_edges=int(essential.sum()),
            inert=int(params.inert.sum()),
        )
        return params

    def _verify_calibration(self, params: ProductionParams) -> None:
        producing = ~params.inert
        ones = np.ones(params.n)
        for linear in (False, True):
            level = params.supply_level(ones, linear=linear)
            deviation = np.abs(level[producing] - 1.0)
            if deviation.size and deviation.max() > CALIBRATION_RTOL:
                worst = int(np.flatnonzero(producing)[np.argmax(deviation)])
                raise CalibrationError(
                    f"baseline output of firm {worst} deviates from s_out by "
                    f"{deviation.max():.3g} (linear={linear})"
                )

    def summarize(
        self,
        network: SupplyNetwork,
        book: FirmBook,
        banks: BankRegister,
        emissions: Optional[EmissionVector] = None,
        label: str = "full",
        threshold: Optional[ThresholdResult] = None,
    ) -> NetworkSummary:
        """Firm, link, sales, loan and emission totals of one network."""
        active = network.degree() > 0
        eligible_borrowers = active & book.eligible
        loan_volume = float(banks.loans_per_firm[eligible_borrowers].sum())
        total_emissions = (
            float(emissions.emissions[active].sum()) if emissions is not None else 0.0
        )
        return NetworkSummary(
            label=label,
            min_edge_value=threshold.min_edge_value if threshold else 0.0,
            firms=network.n,
            active_firms=int(active.sum()),
            links=network.edge_count,
            total_sales=network.total_sales,
            retained_value_fraction=(
                threshold.retained_value_fraction if threshold else 1.0
            ),
            eligible_loan_volume=loan_volume,
            total_emissions=total_emissions,
        )


__all__ = ["NetworkService", "CALIBRATION_RTOL"]
