"""
Bank register, projected firm books and bank loss reports.
"""

from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Optional, Sequence

import numpy as np
from scipy import sparse

from ..errors import InputDataError


@dataclass(frozen=True)
class BankRegister:
    """
    Bank equities and the firm x bank loan book.

    ``write_off`` holds principal times per-loan loss given default; several
    loans of one firm to one bank are summed into one entry.
    """

    equity: np.ndarray
    principal: sparse.csr_matrix
    write_off: sparse.csr_matrix

    @classmethod
    def from_loans(
        cls,
        n_firms: int,
        equity: Sequence[float],
        firm: Sequence[int],
        bank: Sequence[int],
        principal: Sequence[float],
        lgd: Optional[Sequence[float]] = None,
    ) -> "BankRegister":
        equity_arr = np.asarray(equity, dtype=float)
        firm_arr = np.asarray(firm, dtype=np.int64)
        bank_arr = np.asarray(bank, dtype=np.int64)
        principal_arr = np.asarray(principal, dtype=float)
        lgd_arr = (
            np.ones_like(principal_arr)
            if lgd is None
            else np.asarray(lgd, dtype=float)
        )
        m = len(equity_arr)

        if np.any(~np.isfinite(equity_arr)) or np.any(equity_arr <= 0):
            raise InputDataError("bank equity must be finite and > 0")
        if not (len(firm_arr) == len(bank_arr) == len(principal_arr) == len(lgd_arr)):
            raise InputDataError("loan columns have different lengths")
        if len(principal_arr):
            if firm_arr.min() < 0 or firm_arr.max() >= n_firms:
                raise InputDataError("loan references an unknown firm id")
            if bank_arr.min() < 0 or bank_arr.max() >= m:
                raise InputDataError("loan references an unknown bank id")
            if np.any(~np.isfinite(principal_arr)) or np.any(principal_arr < 0):
                raise InputDataError("loan principals must be finite and >= 0")
            if np.any((lgd_arr < 0) | (lgd_arr > 1)):
                raise InputDataError("loss given default must lie in [0, 1]")

        shape = (n_firms, m)
        principal_matrix = sparse.csr_matrix(
            (principal_arr, (firm_arr, bank_arr)), shape=shape
        )
        write_off_matrix = sparse.csr_matrix(
            (principal_arr * lgd_arr, (firm_arr, bank_arr)), shape=shape
        )
        principal_matrix.sum_duplicates()
        write_off_matrix.sum_duplicates()
        return cls(
            equity=equity_arr, principal=principal_matrix, write_off=write_off_matrix
        )

    @classmethod
    def empty(cls, n_firms: int) -> "BankRegister":
        shape = (n_firms, 0)
        return cls(
            equity=np.zeros(0),
            principal=sparse.csr_matrix(shape),
            write_off=sparse.csr_matrix(shape),
        )

    @property
    def m(self) -> int:
        return int(len(self.equity))

    @property
    def n_firms(self) -> int:
        return int(self.principal.shape[0])

    @property
    def total_equity(self) -> float:
        return float(self.equity.sum())

    @cached_property
    def borrowers(self) -> np.ndarray:
        return np.asarray(self.principal.sum(axis=1)).ravel() > 0

    @cached_property
    def loans_per_firm(self) -> np.ndarray:
        return np.asarray(self.principal.sum(axis=1)).ravel()

    @cached_property
    def loans_per_bank(self) -> np.ndarray:
        return np.asarray(self.principal.sum(axis=0)).ravel()

    def write_offs(self, defaulted: np.ndarray, kappa: float = 1.0) -> np.ndarray:
        """Per-bank amount written off when ``defaulted`` firms fail."""
        weights = np.asarray(defaulted, dtype=float)
        return kappa * (self.write_off.T @ weights)


@dataclass(frozen=True)
class ProjectedBook:
    """Income statement and balance sheet after one year of shock."""

    delta_profit: np.ndarray
    equity: np.ndarray
    liquidity: np.ndarray
    evaluated: np.ndarray


@dataclass(frozen=True)
class DefaultVector:
    direct: np.ndarray
    indirect: np.ndarray

    @property
    def any(self) -> np.ndarray:
        return self.direct | self.indirect

    @property
    def direct_count(self) -> int:
        return int(self.direct.sum())

    @property
    def indirect_count(self) -> int:
        return int(self.indirect.sum())


@dataclass(frozen=True)
class LossReport:
    """
    Bank equity losses as fractions of own equity.

    System figures are equity weighted. ``section_losses`` and
    ``bucket_losses`` split the system total loss by borrower section letter
    and by borrower carbon-risk bucket, as fractions of total bank equity.
    """

    bank_direct: np.ndarray
    bank_indirect: np.ndarray
    bank_total: np.ndarray
    system_direct: float
    system_indirect: float
    system_total: float
    section_losses: Dict[str, float] = field(default_factory=dict)
    bucket_losses: Dict[str, float] = field(default_factory=dict)

    @property
    def m(self) -> int:
        return int(len(self.bank_total))


__all__ = ["BankRegister", "ProjectedBook", "DefaultVector", "LossReport"]
