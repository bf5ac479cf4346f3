"""
Shock propagation through the production network and systemic risk indices.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from ...errors import ConvergenceError, InputDataError
from ...models import (
    BankRegister,
    ContagionResult,
    DefaultVector,
    FirmBook,
    ProductionParams,
    SupplyNetwork,
)
from ...schemas.v1.config import ProductionFunction
from .base_service import BaseService
from .financial_service import FinancialService

EXTRAPOLATION_WINDOW = 20


@dataclass(frozen=True)
class _Pins:
    h0: np.ndarray
    failed: np.ndarray
    inert: np.ndarray


class ContagionService(BaseService):
    """Iterates production levels to the fixed point of the production functions."""

    def __init__(self, financial: Optional[FinancialService] = None):
        self.financial = financial or FinancialService()

    def propagate(
        self,
        params: ProductionParams,
        h_init: np.ndarray,
        fn: ProductionFunction = ProductionFunction.GL,
        epsilon: float = 1e-6,
        max_iterations: int = 10_000,
        demand_channel: bool = True,
        trace: bool = False,
    ) -> ContagionResult:
        """
        Synchronous updates ``h <- min(supply(h), demand(h), h)`` until the
        largest change drops below ``epsilon``.

        Firms starting at zero stay at zero; inert firms keep their start value.
        Every ``EXTRAPOLATION_WINDOW`` steps a geometric tail estimate of the
        limit is tried; it never raises a level and is only taken when one
        more step would lift it by less than ``epsilon``.
        """
        h0 = np.asarray(h_init, dtype=float)
        if h0.shape != (params.n,):
            raise InputDataError(f"h_init must have shape ({params.n},)")
        if np.isnan(h0).any():
            raise InputDataError("h_init contains NaN")
        if (h0 < 0).any() or (h0 > 1).any():
            raise InputDataError("h_init must lie in [0, 1]")

        linear = ProductionFunction(fn) is ProductionFunction.LINEAR
        pinned = _Pins(h0=h0, failed=h0 == 0, inert=params.inert)
        h = h0.copy()
        snapshots: List[np.ndarray] = [h]
        deltas: List[float] = []
        iterations = 0
        extrapolations = 0
        converged = params.n == 0

        while not converged:
            if iterations >= max_iterations:
                raise ConvergenceError(
                    "production levels did not converge",
                    iterations=iterations,
                    residual=deltas[-1] if deltas else float("nan"),
                )
            updated = np.minimum(
                self._step(params, h, pinned, linear, demand_channel), h
            )
            delta = float(np.max(np.abs(updated - h)))
            h = updated
            iterations += 1
            if trace:
                deltas.append(delta)
            else:
                deltas = [delta]
            self.logger.debug(
                "Propagation step",
                extra={"data": {"iteration": iterations, "max_delta": delta}},
            )
            converged = delta < epsilon

            if not converged and iterations % EXTRAPOLATION_WINDOW == 0:
                snapshots = (snapshots + [h])[-3:]
                estimate = self._extrapolate(
                    params, snapshots, pinned, linear, demand_channel, epsilon
                )
                if estimate is not None:
                    h = estimate
                    snapshots = [h]
                    extrapolations += 1

        total = self.output_loss(params.network, h)
        direct = self.output_loss(params.network, h0)
        result = ContagionResult(
            h_initial=h0,
            h_final=h,
            iterations=iterations,
            total_loss=total,
            direct_loss=direct,
            indirect_loss=total - direct,
            trace=tuple(deltas) if trace else (),
        )
        self._log(
            logging.INFO,
            "Propagated shock",
            fn=ProductionFunction(fn).value,
            iterations=iterations,
            extrapolations=extrapolations,
            direct_loss=direct,
            total_loss=total,
        )
        return result

    @staticmethod
    def _step(
        params: ProductionParams,
        h: np.ndarray,
        pinned: "_Pins",
        linear: bool,
        demand_channel: bool,
    ) -> np.ndarray:
        """Feasible levels given ``h``, before the no-recovery clamp."""
        level = np.minimum(params.supply_level(h, linear=linear), pinned.h0)
        if demand_channel:
            level = np.minimum(level, params.demand_operator @ h)
        level[pinned.failed] = 0.0
        level[pinned.inert] = pinned.h0[pinned.inert]
        return level

    def _extrapolate(
        self,
        params: ProductionParams,
        snapshots: List[np.ndarray],
        pinned: "_Pins",
        linear: bool,
        demand_channel: bool,
        epsilon: float,
    ) -> Optional[np.ndarray]:
        """
        Limit estimate from three snapshots one window apart, assuming the
        tail contracts geometrically. Windows span several steps so that
        staircase patterns on supply cycles contract as a whole.
        """
        if len(snapshots) < 3:
            return None
        oldest, middle, latest = snapshots
        before = float(np.max(oldest - middle))
        after = float(np.max(middle - latest))
        if before <= 0 or after <= 0:
            return None
        ratio = after / before
        if ratio >= 1.0:
            return None
        estimate = np.clip(
            latest - (middle - latest) * (ratio / (1.0 - ratio)), 0.0, latest
        )
        estimate[pinned.failed] = 0.0
        estimate[pinned.inert] = pinned.h0[pinned.inert]

        # how far below the fixed point the estimate may sit
        lift = self._step(params, estimate, pinned, linear, demand_channel) - estimate
        per_step = 1.0 - ratio ** (1.0 / EXTRAPOLATION_WINDOW)
        if per_step <= 0 or float(lift.max(initial=0.0)) / per_step >= epsilon:
            return None
        return estimate

    @staticmethod
    def output_loss(network: SupplyNetwork, h: np.ndarray) -> float:
        """Sales-weighted share of production lost."""
        total = network.s_out.sum()
        if total <= 0:
            return 0.0
        return float((network.s_out * (1.0 - h)).sum() / total)

    @staticmethod
    def section_output_losses(
        network: SupplyNetwork, sections: np.ndarray, h: np.ndarray
    ) -> Dict[str, float]:
        total = network.s_out.sum()
        if total <= 0:
            return {}
        lost = pd.Series(network.s_out * (1.0 - h) / total)
        sums = lost.groupby(pd.Series(sections, dtype=object)).sum()
        return {str(k): float(v) for k, v in sums.sort_index().items()}

    def _single_failure(self, n: int, firm: int) -> np.ndarray:
        h = np.ones(n)
        h[firm] = 0.0
        return h

    def _firms(self, n: int, firms: Optional[Sequence[int]]) -> List[int]:
        selected = list(range(n)) if firms is None else [int(f) for f in firms]
        for firm in selected:
            if not 0 <= firm < n:
                raise InputDataError(f"firm id {firm} is out of range")
        return selected

    def esri(
        self,
        params: ProductionParams,
        fn: ProductionFunction = ProductionFunction.GL,
        firms: Optional[Sequence[int]] = None,
        epsilon: float = 1e-6,
        max_iterations: int = 10_000,
        demand_channel: bool = True,
    ) -> np.ndarray:
        """Network output loss caused by the failure of each firm alone."""
        selected = self._firms(params.n, firms)
        values = np.array(
            [
                self.propagate(
                    params,
                    self._single_failure(params.n, firm),
                    fn,
                    epsilon,
                    max_iterations,
                    demand_channel,
                ).total_loss
                for firm in selected
            ],
            dtype=float,
        )
        self._log(
            logging.INFO,
            "Computed ESRI",
            firms=len(selected),
            max_esri=values.max(initial=0.0),
        )
        return values

    def fsri(
        self,
        params: ProductionParams,
        book: FirmBook,
        banks: BankRegister,
        fn: ProductionFunction = ProductionFunction.GL,
        firms: Optional[Sequence[int]] = None,
        kappa: float = 1.0,
        epsilon: float = 1e-6,
        max_iterations: int = 10_000,
        demand_channel: bool = True,
    ) -> np.ndarray:
        """System bank equity loss caused by the failure of each firm alone."""
        selected = self._firms(params.n, firms)
        no_costs = np.zeros(params.n)
        values = []
        for firm in selected:
            h_init = self._single_failure(params.n, firm)
            result = self.propagate(
                params, h_init, fn, epsilon, max_iterations, demand_channel
            )
            direct = h_init == 0
            projected = self.financial.project_books(
                book, result.h_final, no_costs, direct
            )
            indirect = self.financial.indirect_defaults(projected, direct, no_costs)
            report = self.financial.bank_losses(
                banks, DefaultVector(direct=direct, indirect=indirect), kappa
            )
            values.append(report.system_total)
        return np.array(values, dtype=float)


__all__ = ["ContagionService", "EXTRAPOLATION_WINDOW"]
