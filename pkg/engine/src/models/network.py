"""
Supply chain network, firm book and production-function parameters.

All containers are frozen; derived operators are cached on first access and
never mutated afterwards, so instances can be shared between worker threads.
"""

from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Dict, Mapping, Optional, Sequence, Set, Tuple

import numpy as np
import pandas as pd
from scipy import sparse

from ..errors import InputDataError
from ..utils.sectors import sector_hierarchy, sections


def _strengths(
    n: int, supplier: np.ndarray, buyer: np.ndarray, value: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    s_out = np.bincount(supplier, weights=value, minlength=n).astype(float)
    s_in = np.bincount(buyer, weights=value, minlength=n).astype(float)
    return s_out, s_in


@dataclass(frozen=True)
class SupplyNetwork:
    """Directed weighted firm-to-firm network; edge ``i -> j`` means i sells to j."""

    n: int
    supplier: np.ndarray
    buyer: np.ndarray
    value: np.ndarray
    s_out: np.ndarray
    s_in: np.ndarray

    @classmethod
    def from_edges(
        cls,
        n: int,
        supplier: Sequence[int],
        buyer: Sequence[int],
        value: Sequence[float],
    ) -> "SupplyNetwork":
        """Build a network, summing duplicate (supplier, buyer) pairs."""
        supplier_arr = np.asarray(supplier, dtype=np.int64)
        buyer_arr = np.asarray(buyer, dtype=np.int64)
        value_arr = np.asarray(value, dtype=float)

        if n < 0:
            raise InputDataError(f"firm count must be non-negative, got {n}")
        if not (len(supplier_arr) == len(buyer_arr) == len(value_arr)):
            raise InputDataError("edge columns have different lengths")
        if len(value_arr):
            if supplier_arr.min() < 0 or buyer_arr.min() < 0:
                raise InputDataError("negative firm id in edges")
            if supplier_arr.max() >= n or buyer_arr.max() >= n:
                raise InputDataError("edge references a firm id outside 0..n-1")
            if np.any(supplier_arr == buyer_arr):
                raise InputDataError("self-loops are not allowed")
            if not np.all(np.isfinite(value_arr)) or np.any(value_arr <= 0):
                raise InputDataError("edge values must be finite and > 0")

        matrix = sparse.coo_matrix(
            (value_arr, (supplier_arr, buyer_arr)), shape=(n, n)
        ).tocsr()
        matrix.sum_duplicates()
        matrix.sort_indices()

        rows = np.repeat(np.arange(n, dtype=np.int64), np.diff(matrix.indptr))
        cols = matrix.indices.astype(np.int64)
        data = matrix.data.astype(float)
        s_out, s_in = _strengths(n, rows, cols, data)
        return cls(n=n, supplier=rows, buyer=cols, value=data, s_out=s_out, s_in=s_in)

    @property
    def edge_count(self) -> int:
        return int(len(self.value))

    @property
    def total_sales(self) -> float:
        return float(self.s_out.sum())

    @cached_property
    def matrix(self) -> sparse.csr_matrix:
        """W as CSR, rows = suppliers, columns = buyers."""
        return sparse.csr_matrix(
            (self.value, (self.supplier, self.buyer)), shape=(self.n, self.n)
        )

    def recompute_strengths(self) -> Tuple[np.ndarray, np.ndarray]:
        return _strengths(self.n, self.supplier, self.buyer, self.value)

    def degree(self) -> np.ndarray:
        return np.bincount(self.supplier, minlength=self.n) + np.bincount(
            self.buyer, minlength=self.n
        )

    def sales_shares(self) -> np.ndarray:
        """s_out / Σ s_out, all zeros for an empty network."""
        total = self.s_out.sum()
        if total <= 0:
            return np.zeros(self.n)
        return self.s_out / total

    def scaled(self, factor: float) -> "SupplyNetwork":
        return SupplyNetwork.from_edges(
            self.n, self.supplier, self.buyer, self.value * factor
        )


@dataclass(frozen=True)
class ThresholdResult:
    network: SupplyNetwork
    min_edge_value: float
    retained_value_fraction: float
    retained_edge_fraction: float


@dataclass(frozen=True)
class FirmBook:
    """Per-firm income statement and balance sheet items plus sector codes."""

    sectors: np.ndarray
    revenue: np.ndarray
    material_costs: np.ndarray
    other_income: np.ndarray
    operating_profit: np.ndarray
    net_profit: np.ndarray
    equity: np.ndarray
    liquidity: np.ndarray
    retained_earnings: np.ndarray
    has_loan: np.ndarray

    @classmethod
    def from_columns(
        cls,
        sectors: Sequence[str],
        revenue: Sequence[float],
        material_costs: Sequence[float],
        operating_profit: Sequence[float],
        net_profit: Sequence[float],
        equity: Sequence[float],
        liquidity: Sequence[float],
        retained_earnings: Sequence[float],
        has_loan: Optional[Sequence[bool]] = None,
    ) -> "FirmBook":
        """Build a book; other income is derived so that p = r - c + o holds."""
        revenue_arr = np.asarray(revenue, dtype=float)
        costs_arr = np.asarray(material_costs, dtype=float)
        profit_arr = np.asarray(operating_profit, dtype=float)
        n = len(revenue_arr)
        loans = (
            np.zeros(n, dtype=bool)
            if has_loan is None
            else np.asarray(has_loan, dtype=bool)
        )
        book = cls(
            sectors=np.asarray(list(sectors), dtype=object),
            revenue=revenue_arr,
            material_costs=costs_arr,
            other_income=profit_arr - revenue_arr + costs_arr,
            operating_profit=profit_arr,
            net_profit=np.asarray(net_profit, dtype=float),
            equity=np.asarray(equity, dtype=float),
            liquidity=np.asarray(liquidity, dtype=float),
            retained_earnings=np.asarray(retained_earnings, dtype=float),
            has_loan=loans,
        )
        book._validate()
        return book

    def _validate(self) -> None:
        n = self.n
        for name in (
            "sectors",
            "material_costs",
            "operating_profit",
            "net_profit",
            "equity",
            "liquidity",
            "retained_earnings",
            "has_loan",
        ):
            if len(getattr(self, name)) != n:
                raise InputDataError(f"firm book column '{name}' has wrong length")
        if any(not code for code in self.sectors):
            raise InputDataError("sector codes must be non-empty")

    @property
    def n(self) -> int:
        return int(len(self.revenue))

    @cached_property
    def eligible(self) -> np.ndarray:
        """Non-negativity filter deciding which firms may default."""
        return (
            (self.revenue >= 0)
            & (self.material_costs >= 0)
            & (self.equity >= 0)
            & (self.liquidity >= 0)
            & (self.operating_profit >= 0)
            & (self.net_profit >= 0)
        )

    @cached_property
    def sections(self) -> np.ndarray:
        return sections(self.sectors)

    def with_loans(self, has_loan: np.ndarray) -> "FirmBook":
        return replace(self, has_loan=np.asarray(has_loan, dtype=bool))


@dataclass(frozen=True)
class CriticalityTable:
    """
    Essentiality of supplier sectors for buyer sectors.

    Entries may be given at any level of the sector hierarchy; a lookup walks
    buyer prefixes from most to least specific and, for each, supplier
    prefixes likewise. Pairs not found are non-essential.
    """

    entries: Mapping[Tuple[str, str], bool] = field(default_factory=dict)

    @classmethod
    def from_pairs(cls, essential: Sequence[Tuple[str, str]]) -> "CriticalityTable":
        return cls(entries={(b, s): True for b, s in essential})

    def is_essential(self, buyer_sector: str, supplier_sector: str) -> bool:
        if not self.entries:
            return False
        supplier_levels = sector_hierarchy(supplier_sector)
        for buyer_level in sector_hierarchy(buyer_sector):
            for supplier_level in supplier_levels:
                verdict = self.entries.get((buyer_level, supplier_level))
                if verdict is not None:
                    return verdict
        return False

    def edge_mask(
        self, buyer_sectors: np.ndarray, supplier_sectors: np.ndarray
    ) -> np.ndarray:
        """Essential flag per edge, looked up once per distinct sector pair."""
        if len(buyer_sectors) == 0:
            return np.zeros(0, dtype=bool)
        pairs = pd.DataFrame({"buyer": buyer_sectors, "supplier": supplier_sectors})
        codes, uniques = pd.factorize(pd.MultiIndex.from_frame(pairs))
        verdicts = np.array(
            [self.is_essential(b, s) for b, s in uniques], dtype=bool
        )
        return verdicts[codes]

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class ProductionParams:
    """
    Calibrated generalized Leontief parameters.

    Essential inputs are grouped per (firm, supplier sector); ``group_*``
    arrays are sorted by firm. ``edge_group`` maps every edge of ``network``
    to its essential group or -1 for non-essential edges.
    """

    network: SupplyNetwork
    beta: np.ndarray
    nonessential_input: np.ndarray
    linear_active: np.ndarray
    inert: np.ndarray
    group_firm: np.ndarray
    group_sector: np.ndarray
    group_alpha: np.ndarray
    group_input: np.ndarray
    edge_group: np.ndarray

    @property
    def n(self) -> int:
        return self.network.n

    def essential_sectors(self, firm: int) -> Set[str]:
        return set(self.group_sector[self.group_firm == firm])

    def alpha_es(self, firm: int) -> Dict[str, float]:
        mask = self.group_firm == firm
        return dict(zip(self.group_sector[mask], self.group_alpha[mask].tolist()))

    @cached_property
    def alpha_ne(self) -> np.ndarray:
        """Non-essential input per unit of variable output, NaN without any."""
        variable = self.network.s_out - self.beta
        return np.divide(
            self.nonessential_input,
            variable,
            out=np.full(self.n, np.nan),
            where=variable > 0,
        )

    @cached_property
    def floor_share(self) -> np.ndarray:
        """beta / s_out, the share of output immune to input shocks."""
        s_out = self.network.s_out
        return np.divide(
            self.beta, s_out, out=np.zeros_like(s_out), where=s_out > 0
        )

    @cached_property
    def essential_operator(self) -> sparse.csr_matrix:
        """Rows are essential groups; (A h)_g is the share of group g still supplied."""
        net = self.network
        mask = self.edge_group >= 0
        groups = self.edge_group[mask]
        weights = net.value[mask] / self.group_input[groups]
        return sparse.csr_matrix(
            (weights, (groups, net.supplier[mask])),
            shape=(len(self.group_firm), net.n),
        )

    @cached_property
    def nonessential_operator(self) -> sparse.csr_matrix:
        """Row i averages h over the non-essential suppliers of firm i."""
        net = self.network
        mask = self.edge_group < 0
        buyers = net.buyer[mask]
        totals = self.nonessential_input[buyers]
        weights = np.divide(
            net.value[mask], totals, out=np.zeros(mask.sum()), where=totals > 0
        )
        return sparse.csr_matrix(
            (weights, (buyers, net.supplier[mask])), shape=(net.n, net.n)
        )

    @cached_property
    def input_operator(self) -> sparse.csr_matrix:
        """Row i averages h over all suppliers of firm i."""
        net = self.network
        totals = net.s_in[net.buyer]
        weights = np.divide(
            net.value, totals, out=np.zeros_like(net.value), where=totals > 0
        )
        return sparse.csr_matrix(
            (weights, (net.buyer, net.supplier)), shape=(net.n, net.n)
        )

    @cached_property
    def demand_operator(self) -> sparse.csr_matrix:
        """Row i averages h over the customers of firm i, weighted by sales."""
        net = self.network
        totals = net.s_out[net.supplier]
        weights = np.divide(
            net.value, totals, out=np.zeros_like(net.value), where=totals > 0
        )
        return sparse.csr_matrix(
            (weights, (net.supplier, net.buyer)), shape=(net.n, net.n)
        )

    @cached_property
    def group_starts(self) -> Tuple[np.ndarray, np.ndarray]:
        """(firms that have essential groups, start offset of each firm's run)."""
        if len(self.group_firm) == 0:
            return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
        firms, starts = np.unique(self.group_firm, return_index=True)
        return firms, starts

    def supply_level(self, h: np.ndarray, linear: bool = False) -> np.ndarray:
        """
        Output each firm can produce, relative to baseline, when every
        supplier j runs at level ``h[j]``.

        With ``linear`` all inputs are treated as substitutable.
        """
        b = self.floor_share
        if linear:
            return np.clip(b + (1.0 - b) * (self.input_operator @ h), 0.0, 1.0)

        level = np.where(
            self.linear_active,
            b + (1.0 - b) * (self.nonessential_operator @ h),
            np.inf,
        )
        firms, starts = self.group_starts
        if len(firms):
            essential = self.essential_operator @ h
            level[firms] = np.minimum(
                level[firms], np.minimum.reduceat(essential, starts)
            )
        return np.clip(level, 0.0, 1.0)


__all__ = [
    "SupplyNetwork",
    "ThresholdResult",
    "FirmBook",
    "CriticalityTable",
    "ProductionParams",
]
