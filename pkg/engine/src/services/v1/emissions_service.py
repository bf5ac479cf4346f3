"""
Firm-level CO2 estimates from fuel purchases and the carbon-to-profit ratio.
"""

import logging
from typing import List, Tuple

import numpy as np

from ...models import EmissionVector, FirmBook, FuelInStrengths, SupplyNetwork
from ...schemas.v1.config import FuelSectorConfig
from ...schemas.v1.reports import DistributorSummaryEntry, EmissionStatistics
from ...utils.sectors import prefix_mask
from .base_service import BaseService

# Upper breakeven prices (currency per tonne) of the carbon-risk buckets.
BUCKET_EDGES = (10.0, 45.0, 100.0, 500.0, 1000.0)
BUCKET_LABELS = ("<=10", "<=45", "<=100", "<=500", "<=1000", ">1000")
NON_EMITTER = "non-emitter"
BREAKEVEN_QUANTILES = (0.1, 0.25, 0.5, 0.75, 0.9)


class EmissionsService(BaseService):
    """Splits national oil and gas combustion totals onto purchasing firms."""

    def distributor_masks(
        self, sectors: np.ndarray, cfg: FuelSectorConfig
    ) -> Tuple[np.ndarray, np.ndarray]:
        """Gas and oil distributor masks; a firm matching both counts as gas."""
        gas = prefix_mask(sectors, cfg.gas_sectors)
        oil = prefix_mask(sectors, cfg.oil_sectors) & ~gas
        return gas, oil

    def fuel_in_strengths(
        self, network: SupplyNetwork, sectors: np.ndarray, cfg: FuelSectorConfig
    ) -> FuelInStrengths:
        gas, oil = self.distributor_masks(sectors, cfg)
        fuel = gas | oil
        supplier, buyer, value = network.supplier, network.buyer, network.value

        from_gas = gas[supplier]
        from_oil = oil[supplier]
        s_in_gas = np.bincount(
            buyer[from_gas], weights=value[from_gas], minlength=network.n
        ).astype(float)
        s_in_oil = np.bincount(
            buyer[from_oil], weights=value[from_oil], minlength=network.n
        ).astype(float)

        # trade within or between fuel sectors would be counted twice
        to_outside = ~fuel[buyer]
        s_out_gas = float(value[from_gas & to_outside].sum())
        s_out_oil = float(value[from_oil & to_outside].sum())

        result = FuelInStrengths(
            s_in_gas=s_in_gas,
            s_in_oil=s_in_oil,
            s_out_gas=s_out_gas,
            s_out_oil=s_out_oil,
            gas_distributors=gas,
            oil_distributors=oil,
        )
        if result.degenerate:
            self._log(
                logging.WARNING,
                "No fuel sales to attribute",
                gas_distributors=int(gas.sum()),
                oil_distributors=int(oil.sum()),
            )
        return result

    def estimate_emissions(
        self, network: SupplyNetwork, sectors: np.ndarray, cfg: FuelSectorConfig
    ) -> EmissionVector:
        strengths = self.fuel_in_strengths(network, sectors, cfg)
        gas_share = self._shares(strengths.s_in_gas, strengths.s_out_gas)
        oil_share = self._shares(strengths.s_in_oil, strengths.s_out_oil)
        raw = gas_share * cfg.total_gas_emissions + oil_share * cfg.total_oil_emissions

        fuel = strengths.distributors
        excluded = prefix_mask(sectors, cfg.excluded_sectors) & ~fuel
        emissions = np.where(excluded | fuel, 0.0, raw)

        outside = ~fuel
        vector = EmissionVector(
            emissions=emissions,
            total_gas=cfg.total_gas_emissions,
            total_oil=cfg.total_oil_emissions,
            covered_gas_share=float(gas_share[outside].sum()),
            covered_oil_share=float(oil_share[outside].sum()),
            dropped_emissions=float(raw[excluded].sum()),
        )
        self._log(
            logging.INFO,
            "Estimated emissions",
            emitters=int((emissions > 0).sum()),
            total=vector.total,
            dropped=vector.dropped_emissions,
        )
        return vector

    @staticmethod
    def _shares(s_in: np.ndarray, s_out: float) -> np.ndarray:
        if s_out <= 0:
            return np.zeros_like(s_in)
        return s_in / s_out

    def carbon_to_profit(self, emissions: EmissionVector, book: FirmBook) -> np.ndarray:
        """Tonnes per currency unit of net profit; NaN where profit <= 0."""
        profit = book.net_profit
        return np.divide(
            emissions.emissions,
            profit,
            out=np.full(len(profit), np.nan),
            where=profit > 0,
        )

    def breakeven_prices(self, emissions: EmissionVector, book: FirmBook) -> np.ndarray:
        """Price at which carbon costs reach net profit; inf for non-emitters."""
        e = emissions.emissions
        return np.divide(
            np.maximum(book.net_profit, 0.0),
            e,
            out=np.full(len(e), np.inf),
            where=e > 0,
        )

    def risk_buckets(self, emissions: EmissionVector, book: FirmBook) -> np.ndarray:
        breakeven = self.breakeven_prices(emissions, book)
        index = np.searchsorted(BUCKET_EDGES, breakeven, side="left")
        labels = np.array(BUCKET_LABELS, dtype=object)[np.minimum(index, 5)]
        labels[emissions.emissions <= 0] = NON_EMITTER
        return labels

    def distributor_summary(
        self, network: SupplyNetwork, sectors: np.ndarray, cfg: FuelSectorConfig
    ) -> List[DistributorSummaryEntry]:
        """Firm count, out-links and out-strength per configured fuel sector."""
        gas, oil = self.distributor_masks(sectors, cfg)
        out_links = np.bincount(network.supplier, minlength=network.n)
        entries = []
        for fuel, prefixes, assigned in (
            ("gas", cfg.gas_sectors, gas),
            ("oil", cfg.oil_sectors, oil),
        ):
            for prefix in prefixes:
                members = assigned & prefix_mask(sectors, [prefix])
                entries.append(
                    DistributorSummaryEntry(
                        fuel=fuel,
                        sector=prefix,
                        firms=int(members.sum()),
                        out_links=int(out_links[members].sum()),
                        out_strength=float(network.s_out[members].sum()),
                    )
                )
        return entries

    def statistics(
        self, emissions: EmissionVector, book: FirmBook
    ) -> EmissionStatistics:
        e = emissions.emissions
        defined = (e > 0) & (book.net_profit > 0)
        breakeven = self.breakeven_prices(emissions, book)[defined]
        quantiles = (
            {
                f"q{int(q * 100)}": float(v)
                for q, v in zip(
                    BREAKEVEN_QUANTILES, np.quantile(breakeven, BREAKEVEN_QUANTILES)
                )
            }
            if breakeven.size
            else {}
        )
        n = len(e)
        return EmissionStatistics(
            firms=n,
            emitting_firms=int((e > 0).sum()),
            emitting_share=float((e > 0).sum() / n) if n else 0.0,
            total_emissions=emissions.total,
            covered_gas_share=emissions.covered_gas_share,
            covered_oil_share=emissions.covered_oil_share,
            dropped_emissions=emissions.dropped_emissions,
            cpr_defined=int(defined.sum()),
            breakeven_quantiles=quantiles,
        )


__all__ = [
    "EmissionsService",
    "BUCKET_EDGES",
    "BUCKET_LABELS",
    "NON_EMITTER",
]
