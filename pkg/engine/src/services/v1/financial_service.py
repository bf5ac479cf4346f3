"""
Translation of production losses and carbon costs into firm defaults and
bank equity losses.
"""

import logging
from typing import Dict, Optional, Tuple

import numpy as np
import pandas as pd

from ...models import BankRegister, DefaultVector, FirmBook, LossReport, ProjectedBook
from .base_service import BaseService


class FinancialService(BaseService):
    def project_books(
        self,
        book: FirmBook,
        h_final: np.ndarray,
        retained: np.ndarray,
        direct: Optional[np.ndarray] = None,
    ) -> ProjectedBook:
        """
        One-year projection of equity and liquidity.

        Only default-eligible firms that did not fail directly are evaluated;
        the others keep their figures but never count as indirect defaults.
        """
        h = np.asarray(h_final, dtype=float)
        gamma = np.asarray(retained, dtype=float)
        direct_mask = (
            np.zeros(book.n, dtype=bool)
            if direct is None
            else np.asarray(direct, dtype=bool)
        )
        delta_profit = (1.0 - h) * (book.revenue - book.material_costs)
        return ProjectedBook(
            delta_profit=delta_profit,
            equity=book.equity + book.retained_earnings - delta_profit - gamma,
            liquidity=book.liquidity - delta_profit - gamma,
            evaluated=book.eligible & ~direct_mask,
        )

    def indirect_defaults(
        self, projected: ProjectedBook, direct: np.ndarray, retained: np.ndarray
    ) -> np.ndarray:
        # a firm must actually be hit; untouched zero-equity firms do not fail
        shocked = (projected.delta_profit > 0) | (np.asarray(retained) > 0)
        insolvent = (projected.equity <= 0) | (projected.liquidity <= 0)
        survivors = projected.evaluated & ~np.asarray(direct, dtype=bool)
        return survivors & shocked & insolvent

    def bank_losses(
        self,
        banks: BankRegister,
        defaults: DefaultVector,
        kappa: float = 1.0,
        sections: Optional[np.ndarray] = None,
        buckets: Optional[np.ndarray] = None,
    ) -> LossReport:
        """Per-bank and equity-weighted system losses, split by cause."""
        equity = banks.equity
        direct_w = banks.write_offs(defaults.direct, kappa)
        indirect_w = banks.write_offs(defaults.indirect, kappa)
        total_w = direct_w + indirect_w
        total_equity = banks.total_equity

        def per_bank(amount: np.ndarray) -> np.ndarray:
            return np.divide(
                amount, equity, out=np.zeros_like(equity), where=equity > 0
            )

        def system(amount: float) -> float:
            return float(amount / total_equity) if total_equity > 0 else 0.0

        firm_write_off = self._firm_write_offs(banks, defaults, kappa)
        report = LossReport(
            bank_direct=per_bank(direct_w),
            bank_indirect=per_bank(indirect_w),
            bank_total=per_bank(total_w),
            system_direct=system(direct_w.sum()),
            system_indirect=system(indirect_w.sum()),
            system_total=system(direct_w.sum() + indirect_w.sum()),
            section_losses=self._grouped(firm_write_off, sections, total_equity),
            bucket_losses=self._grouped(firm_write_off, buckets, total_equity),
        )
        self._log(
            logging.INFO,
            "Computed bank losses",
            banks=banks.m,
            direct_defaults=defaults.direct_count,
            indirect_defaults=defaults.indirect_count,
            system_direct=report.system_direct,
            system_total=report.system_total,
        )
        return report

    @staticmethod
    def _firm_write_offs(
        banks: BankRegister, defaults: DefaultVector, kappa: float
    ) -> np.ndarray:
        per_firm = np.asarray(banks.write_off.sum(axis=1)).ravel()
        return kappa * per_firm * defaults.any

    @staticmethod
    def _grouped(
        amounts: np.ndarray, labels: Optional[np.ndarray], total_equity: float
    ) -> Dict[str, float]:
        if labels is None or total_equity <= 0:
            return {}
        sums = pd.Series(amounts).groupby(pd.Series(labels, dtype=object)).sum()
        return {str(k): float(v / total_equity) for k, v in sums.sort_index().items()}

    def translate(
        self,
        book: FirmBook,
        banks: BankRegister,
        h_final: np.ndarray,
        retained: np.ndarray,
        direct: np.ndarray,
        kappa: float = 1.0,
        buckets: Optional[np.ndarray] = None,
    ) -> Tuple[ProjectedBook, DefaultVector, LossReport]:
        """Books, defaults and bank losses for one shock outcome."""
        direct = np.asarray(direct, dtype=bool)
        projected = self.project_books(book, h_final, retained, direct)
        indirect = self.indirect_defaults(projected, direct, retained)
        defaults = DefaultVector(direct=direct, indirect=indirect)
        losses = self.bank_losses(
            banks, defaults, kappa, sections=book.sections, buckets=buckets
        )
        return projected, defaults, losses


__all__ = ["FinancialService"]
