import logging
from typing import List, Optional, Sequence

import numpy as np

from ...errors import ConfigurationError
from ...models import (
    DirectShockPoint,
    EmissionVector,
    FirmBook,
    MarketShares,
    SupplyNetwork,
)
from .base_service import BaseService
from .passthrough_service import PassThroughService


class DirectShockService(BaseService):
    """Shutdown points: firms whose carbon costs reach their net profit."""

    def __init__(self, passthrough: Optional[PassThroughService] = None):
        self.passthrough = passthrough or PassThroughService()

    def direct_defaults(self, book: FirmBook, retained: np.ndarray) -> np.ndarray:
        retained = np.asarray(retained, dtype=float)
        return book.eligible & (retained > 0) & (book.net_profit <= retained)

    def direct_output_loss(self, network: SupplyNetwork, defaults: np.ndarray) -> float:
        total = network.s_out.sum()
        if total <= 0:
            return 0.0
        return float(network.s_out[np.asarray(defaults, dtype=bool)].sum() / total)

    def price_sweep(
        self,
        network: SupplyNetwork,
        book: FirmBook,
        emissions: EmissionVector,
        prices: Sequence[float],
        pass_through: bool = False,
        shares: Optional[MarketShares] = None,
        sectors: Optional[np.ndarray] = None,
        coverage: float = 0.999999,
    ) -> List[DirectShockPoint]:
        """Direct defaults and loss for every price of an ascending grid."""
        prices = [float(p) for p in prices]
        if any(b < a for a, b in zip(prices, prices[1:])):
            raise ConfigurationError("price grid must be sorted ascending")
        if pass_through and shares is None:
            if sectors is None:
                raise ConfigurationError("pass-through needs market shares or sectors")
            shares = self.passthrough.market_shares(network, sectors)
        operator = (
            self.passthrough.transfer_operator(network, shares)
            if pass_through and shares is not None
            else None
        )

        points = []
        for price in prices:
            costs = self.passthrough.retained_costs(
                network,
                shares if shares is not None else _no_shares(network.n),
                emissions,
                price,
                pass_through,
                coverage=coverage,
                operator=operator,
            )
            defaults = self.direct_defaults(book, costs.retained)
            points.append(
                DirectShockPoint(
                    price=price,
                    defaults=defaults,
                    output_loss=self.direct_output_loss(network, defaults),
                )
            )
        self._log(
            logging.INFO,
            "Direct price sweep",
            prices=len(points),
            pass_through=pass_through,
            max_loss=max((p.output_loss for p in points), default=0.0),
        )
        return points


def _no_shares(n: int) -> MarketShares:
    zeros = np.zeros(n)
    return MarketShares(mu=zeros, effective=zeros)


__all__ = ["DirectShockService"]
