"""
Price sweeps over the (price, pass-through, production function) grid.
"""

import asyncio
import logging
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ...errors import ConfigurationError, EngineError, InvariantViolationError
from ...gateways.v1.csv_gateway import CsvWriter
from ...models import (
    CellOutcome,
    DirectShockPoint,
    ModelInstance,
    PassThroughResult,
    PreparedInstance,
)
from ...schemas.v1.config import ProductionFunction, RunConfig, ShockScenario
from ...schemas.v1.reports import (
    BankLossEntry,
    CellResult,
    NetworkSummary,
    SectionLossEntry,
    SweepResponse,
)
from .base_service import BaseService
from .contagion_service import ContagionService
from .direct_shock_service import DirectShockService
from .emissions_service import EmissionsService
from .financial_service import FinancialService
from .network_service import NetworkService
from .passthrough_service import PassThroughService
from .synthetic_service import SyntheticDataService


class ScenarioService(BaseService):
    """Runs every sweep cell against one prepared instance and writes the reports."""

    def __init__(
        self,
        network: Optional[NetworkService] = None,
        emissions: Optional[EmissionsService] = None,
        passthrough: Optional[PassThroughService] = None,
        financial: Optional[FinancialService] = None,
        synthetic: Optional[SyntheticDataService] = None,
    ):
        self.network = network or NetworkService()
        self.emissions = emissions or EmissionsService()
        self.passthrough = passthrough or PassThroughService()
        self.financial = financial or FinancialService()
        self.contagion = ContagionService(self.financial)
        self.direct = DirectShockService(self.passthrough)
        self.synthetic = synthetic or SyntheticDataService(self.emissions)

    def load_or_generate(self, config: RunConfig) -> ModelInstance:
        if config.inputs is not None:
            return self.network.load_instance(config.inputs, config.fuel)
        if config.generator is None:
            raise ConfigurationError("run config names neither inputs nor a generator")
        instance = self.synthetic.generate(config.generator)
        if config.fuel is not None:
            instance = ModelInstance(
                network=instance.network,
                book=instance.book,
                banks=instance.banks,
                criticality=instance.criticality,
                fuel=config.fuel,
                emissions=instance.emissions,
                name=instance.name,
            )
        return instance

    def prepare(
        self, instance: ModelInstance, threshold: float = 0.0
    ) -> PreparedInstance:
        """
        Estimate emissions on the full network, then threshold it and derive
        everything the cells share.
        """
        sectors = instance.book.sectors
        emissions = instance.emissions
        if emissions is None:
            emissions = self.emissions.estimate_emissions(
                instance.network, sectors, instance.fuel
            )
        kept = self.network.threshold_network(instance.network, threshold)
        params = self.network.calibrate(kept.network, sectors, instance.criticality)
        shares = self.passthrough.market_shares(kept.network, sectors)
        return PreparedInstance(
            instance=instance,
            network=kept.network,
            threshold=kept,
            emissions=emissions,
            params=params,
            shares=shares,
            transfer=self.passthrough.transfer_operator(kept.network, shares),
            buckets=self.emissions.risk_buckets(emissions, instance.book),
        )

    def retained_costs(
        self, prepared: PreparedInstance, scenario: ShockScenario
    ) -> PassThroughResult:
        return self.passthrough.retained_costs(
            prepared.network,
            prepared.shares,
            prepared.emissions,
            scenario.price,
            scenario.pass_through,
            coverage=scenario.coverage,
            max_iterations=scenario.max_passthrough_iterations,
            operator=prepared.transfer,
        )

    def run_cell(
        self, prepared: PreparedInstance, scenario: ShockScenario
    ) -> CellOutcome:
        """Costs, direct defaults, contagion and bank losses of one cell."""
        book = prepared.instance.book
        costs = self.retained_costs(prepared, scenario)
        direct = self.direct.direct_defaults(book, costs.retained)
        h_init = np.where(direct, 0.0, 1.0)
        contagion = self.contagion.propagate(
            prepared.params,
            h_init,
            scenario.production_fn,
            epsilon=scenario.epsilon,
            max_iterations=scenario.max_iterations,
            demand_channel=scenario.demand_channel,
            trace=scenario.trace,
        )
        projected, defaults, losses = self.financial.translate(
            book,
            prepared.instance.banks,
            contagion.h_final,
            costs.retained,
            direct,
            kappa=scenario.kappa,
            buckets=prepared.buckets,
        )
        return CellOutcome(
            costs=costs,
            contagion=contagion,
            projected=projected,
            defaults=defaults,
            losses=losses,
            section_output_losses=self.contagion.section_output_losses(
                prepared.network, book.sections, contagion.h_final
            ),
        )

    def evaluate(
        self, prepared: PreparedInstance, scenario: ShockScenario
    ) -> CellResult:
        """Run one cell; engine errors become a failed result naming the cell."""
        fn = scenario.production_fn.value
        try:
            outcome = self.run_cell(prepared, scenario)
        except EngineError as e:
            message = (
                f"cell price={scenario.price:g} mode={scenario.mode} fn={fn} "
                f"failed: {e}"
            )
            self._log(logging.ERROR, "Cell failed", cell=scenario.cell_id, error=str(e))
            return CellResult(
                success=False,
                message=message,
                price=scenario.price,
                mode=scenario.mode,
                fn=fn,
            )
        return self._cell_result(scenario, outcome)

    @staticmethod
    def _cell_result(scenario: ShockScenario, outcome: CellOutcome) -> CellResult:
        losses = outcome.losses
        sections = sorted(
            set(outcome.section_output_losses) | set(losses.section_losses)
        )
        return CellResult(
            success=True,
            price=scenario.price,
            mode=scenario.mode,
            fn=scenario.production_fn.value,
            direct_output_loss=outcome.contagion.direct_loss,
            total_output_loss=outcome.contagion.total_loss,
            indirect_output_loss=outcome.contagion.indirect_loss,
            direct_bank_loss=losses.system_direct,
            indirect_bank_loss=losses.system_indirect,
            total_bank_loss=losses.system_total,
            direct_defaults=outcome.defaults.direct_count,
            indirect_defaults=outcome.defaults.indirect_count,
            passthrough_iterations=outcome.costs.iterations,
            passthrough_residual=outcome.costs.residual,
            contagion_iterations=outcome.contagion.iterations,
            banks=[
                BankLossEntry(
                    bank_id=k,
                    direct=float(losses.bank_direct[k]),
                    indirect=float(losses.bank_indirect[k]),
                    total=float(losses.bank_total[k]),
                )
                for k in range(len(losses.bank_total))
            ],
            sections=[
                SectionLossEntry(
                    section=section,
                    output_loss=outcome.section_output_losses.get(section, 0.0),
                    bank_loss=losses.section_losses.get(section, 0.0),
                )
                for section in sections
            ],
            buckets=dict(losses.bucket_losses),
            trace=list(outcome.contagion.trace),
        )

    async def run(
        self, config: RunConfig, instance: Optional[ModelInstance] = None
    ) -> Tuple[SweepResponse, PreparedInstance]:
        """
        Evaluate every cell of the grid concurrently on ``config.workers``
        threads. Cells come back sorted by price, mode and function.
        """
        if instance is None:
            instance = await asyncio.to_thread(self.load_or_generate, config)
        prepared = await asyncio.to_thread(self.prepare, instance, config.threshold)
        scenarios = config.scenarios()
        semaphore = asyncio.Semaphore(config.workers)

        async def run_one(scenario: ShockScenario) -> CellResult:
            async with semaphore:
                return await asyncio.to_thread(self.evaluate, prepared, scenario)

        cells = list(await asyncio.gather(*(run_one(s) for s in scenarios)))
        violations = (
            self.check_dominance(cells, config.dominance_tolerance)
            if config.check_dominance
            else []
        )
        failed = [c for c in cells if not c.success]
        success = not failed and not violations
        message = None
        if failed:
            message = f"{len(failed)} of {len(cells)} cells failed"
        elif violations:
            message = f"dominance ordering violated in {len(violations)} cells"

        self._log(
            logging.INFO if success else logging.WARNING,
            "Sweep finished",
            instance=instance.name,
            cells=len(cells),
            failed=len(failed),
            dominance_violations=len(violations),
        )
        response = SweepResponse(
            success=success,
            message=message,
            cells=cells,
            dominance_violations=violations,
        )
        return response, prepared

    @staticmethod
    def check_dominance(
        cells: Sequence[CellResult], tolerance: float = 1e-6
    ) -> List[str]:
        """
        Direct <= Linear <= GL for output and bank losses, per price and mode.
        Returns a description of every violation.
        """
        by_key: Dict[Tuple[float, str], Dict[str, CellResult]] = {}
        for cell in cells:
            if cell.success:
                by_key.setdefault((cell.price, cell.mode), {})[cell.fn] = cell

        violations: List[str] = []
        for (price, mode), row in sorted(by_key.items()):
            for cell in row.values():
                for direct, total, kind in (
                    (cell.direct_output_loss, cell.total_output_loss, "output"),
                    (cell.direct_bank_loss, cell.total_bank_loss, "bank"),
                ):
                    if direct is not None and total is not None:
                        if direct > total + tolerance:
                            violations.append(
                                f"price={price:g} mode={mode} fn={cell.fn}: direct "
                                f"{kind} loss {direct:.6g} exceeds total {total:.6g}"
                            )
            gl = row.get(ProductionFunction.GL.value)
            linear = row.get(ProductionFunction.LINEAR.value)
            if gl is None or linear is None:
                continue
            for kind, lin, pes in (
                ("output", linear.total_output_loss, gl.total_output_loss),
                ("bank", linear.total_bank_loss, gl.total_bank_loss),
            ):
                if lin is not None and pes is not None and lin > pes + tolerance:
                    violations.append(
                        f"price={price:g} mode={mode}: Linear {kind} loss "
                        f"{lin:.6g} exceeds GL {pes:.6g}"
                    )
        return violations

    @classmethod
    def assert_dominance(
        cls, cells: Sequence[CellResult], tolerance: float = 1e-6
    ) -> None:
        violations = cls.check_dominance(cells, tolerance)
        if violations:
            raise InvariantViolationError("; ".join(violations))

    def summaries(self, prepared: PreparedInstance) -> List[NetworkSummary]:
        instance = prepared.instance
        full = self.network.summarize(
            instance.network, instance.book, instance.banks, prepared.emissions, "full"
        )
        thresholded = self.network.summarize(
            prepared.network,
            instance.book,
            instance.banks,
            prepared.emissions,
            "thresholded",
            threshold=prepared.threshold,
        )
        return [full, thresholded]

    def direct_sweeps(
        self, config: RunConfig, prepared: PreparedInstance
    ) -> Dict[str, List[DirectShockPoint]]:
        """Direct defaults and loss over the price grid, per pass-through mode."""
        sweeps: Dict[str, List[DirectShockPoint]] = {}
        for pass_through in config.modes():
            mode = "pass_through" if pass_through else "no_pass_through"
            try:
                sweeps[mode] = self.direct.price_sweep(
                    prepared.network,
                    prepared.instance.book,
                    prepared.emissions,
                    config.prices,
                    pass_through=pass_through,
                    shares=prepared.shares,
                    coverage=config.coverage,
                )
            except EngineError as e:
                self._log(
                    logging.WARNING, "Direct sweep skipped", mode=mode, error=str(e)
                )
        return sweeps

    def _write_retained(
        self,
        config: RunConfig,
        response: SweepResponse,
        prepared: PreparedInstance,
        root: Path,
    ) -> None:
        # retained costs depend on price and mode only
        succeeded = {cell.cell_id for cell in response.cells if cell.success}
        written = set()
        for scenario in config.scenarios():
            key = (scenario.price, scenario.mode)
            if scenario.cell_id not in succeeded or key in written:
                continue
            written.add(key)
            costs = self.retained_costs(prepared, scenario)
            CsvWriter.write_retained_costs(
                root / f"retained_{scenario.price:g}_{scenario.mode}.csv",
                costs.retained,
            )

    def write_reports(
        self,
        config: RunConfig,
        response: SweepResponse,
        prepared: PreparedInstance,
        output_dir: Optional[Path] = None,
    ) -> Dict[str, str]:
        """Write the sweep reports; every CSV carries the run config as header."""
        root = Path(output_dir or config.output_dir)
        root.mkdir(parents=True, exist_ok=True)
        config_text = config.to_yaml_text()
        header = config_text.splitlines()
        digest = config.source_digest()
        if digest is not None:
            header.insert(0, f"source_sha256: {digest}")

        files: Dict[str, Path] = {
            "sweep": CsvWriter.write_sweep(root / "sweep.csv", response.cells, header),
            "bank_losses": CsvWriter.write_bank_losses(
                root / "bank_losses.csv", response.cells, header
            ),
            "sector_losses": CsvWriter.write_sector_losses(
                root / "sector_losses.csv", response.cells, header
            ),
            "network_summary": CsvWriter.write_json(
                root / "network_summary.json", self.summaries(prepared)
            ),
            "run": CsvWriter.write_json(
                root / "run.json",
                {
                    "config": config_text,
                    "source": config.source_text,
                    "source_sha256": digest,
                    "instance": prepared.instance.name,
                    "success": response.success,
                    "message": response.message,
                    "dominance_violations": response.dominance_violations,
                    "cells": [
                        {
                            "cell": cell.cell_id,
                            "success": cell.success,
                            "message": cell.message,
                        }
                        for cell in response.cells
                    ],
                },
            ),
        }
        for cell in response.cells:
            CsvWriter.write_json(root / "cells" / f"{cell.cell_id}.json", cell)
            if config.write_trace and cell.success:
                CsvWriter.write_trace(root / f"trace_{cell.cell_id}.csv", cell.trace)
        for mode, points in self.direct_sweeps(config, prepared).items():
            files[f"direct_sweep_{mode}"] = CsvWriter.write_direct_sweep(
                root / f"direct_sweep_{mode}.csv", points, header
            )
        if config.write_retained_costs:
            self._write_retained(config, response, prepared, root)

        self._log(logging.INFO, "Wrote sweep reports", output_dir=str(root))
        return {name: str(path) for name, path in files.items()}


__all__ = ["ScenarioService"]
