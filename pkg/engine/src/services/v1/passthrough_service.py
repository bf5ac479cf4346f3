"""
Carbon cost pass-through along the supply chain.

Each round, a firm keeps the share ``1 - mu`` of the costs it receives and
passes the rest to its customers in proportion to its sales to them, where
``mu`` is its market share within its sector.
"""

import logging
from typing import List, Optional

import numpy as np
import pandas as pd
from scipy import sparse

from ...errors import ConfigurationError, ConvergenceError
from ...models import EmissionVector, MarketShares, PassThroughResult, SupplyNetwork
from .base_service import BaseService


class PassThroughService(BaseService):
    def market_shares(
        self, network: SupplyNetwork, sectors: np.ndarray
    ) -> MarketShares:
        s_out = network.s_out
        totals = (
            pd.Series(s_out)
            .groupby(pd.Series(np.asarray(sectors, dtype=object)))
            .transform("sum")
            .to_numpy(dtype=float)
        )
        mu = np.divide(s_out, totals, out=np.zeros_like(s_out), where=totals > 0)
        effective = np.where(s_out > 0, mu, 0.0)
        return MarketShares(mu=mu, effective=effective)

    def transfer_operator(
        self, network: SupplyNetwork, shares: MarketShares
    ) -> sparse.csr_matrix:
        """M with c(t+1) = M c(t); row = receiving buyer, column = passing supplier."""
        mu = shares.effective
        s_out = network.s_out[network.supplier]
        weights = np.divide(
            mu[network.supplier] * network.value,
            s_out,
            out=np.zeros_like(network.value),
            where=s_out > 0,
        )
        return sparse.csr_matrix(
            (weights, (network.buyer, network.supplier)), shape=(network.n, network.n)
        )

    def initial_costs(self, emissions: EmissionVector, price: float) -> np.ndarray:
        if price < 0:
            raise ConfigurationError("price must be >= 0")
        return price * emissions.emissions

    def pass_through(
        self,
        network: SupplyNetwork,
        shares: MarketShares,
        c0: np.ndarray,
        coverage: float = 0.999999,
        max_iterations: Optional[int] = None,
        operator: Optional[sparse.csr_matrix] = None,
    ) -> PassThroughResult:
        """
        Distribute ``c0`` until at least ``coverage`` of it is retained.

        Raises:
            ConvergenceError: ``max_iterations`` (10 times the firm count by
                default) is reached first, as on cycles of firms passing on
                everything they receive.
        """
        if not 0 < coverage < 1:
            raise ConfigurationError("coverage must lie in (0, 1)")
        c0 = np.asarray(c0, dtype=float)
        cap = max_iterations or 10 * network.n
        transfer = operator
        if transfer is None:
            transfer = self.transfer_operator(network, shares)
        retain = 1.0 - shares.effective

        total = float(c0.sum())
        retained = retain * c0
        circulating: List[float] = [total]
        if total <= 0:
            return PassThroughResult(
                initial=c0,
                retained=retained,
                iterations=0,
                circulating=tuple(circulating),
            )

        target = coverage * total
        costs = c0
        iterations = 0
        while retained.sum() < target:
            if iterations >= cap:
                residual = total - float(retained.sum())
                raise ConvergenceError(
                    f"pass-through left {residual:.6g} of {total:.6g} undistributed",
                    iterations=iterations,
                    residual=residual,
                )
            costs = transfer @ costs
            retained = retained + retain * costs
            iterations += 1
            circulating.append(float(costs.sum()))
            self.logger.debug(
                "Pass-through round",
                extra={"data": {"round": iterations, "circulating": circulating[-1]}},
            )

        result = PassThroughResult(
            initial=c0,
            retained=retained,
            iterations=iterations,
            circulating=tuple(circulating),
        )
        self._log(
            logging.INFO,
            "Passed through carbon costs",
            iterations=iterations,
            distributed=result.distributed_fraction,
            residual=result.residual,
        )
        return result

    def retained_costs(
        self,
        network: SupplyNetwork,
        shares: MarketShares,
        emissions: EmissionVector,
        price: float,
        pass_through: bool,
        coverage: float = 0.999999,
        max_iterations: Optional[int] = None,
        operator: Optional[sparse.csr_matrix] = None,
    ) -> PassThroughResult:
        """Carbon costs each firm finally bears, with or without pass-through."""
        c0 = self.initial_costs(emissions, price)
        if not pass_through:
            return PassThroughResult(
                initial=c0,
                retained=c0.copy(),
                iterations=0,
                circulating=(float(c0.sum()),),
            )
        return self.pass_through(
            network, shares, c0, coverage, max_iterations, operator=operator
        )


__all__ = ["PassThroughService"]
