"""
Command Line Interface for carbon-price stress tests.

Google Fire builds the commands from the public methods of ``StressCLI``.
"""

import asyncio
import sys
from pathlib import Path
from typing import Any, List, Optional, Sequence, Union

try:
    import fire
    from dotenv import load_dotenv
except ImportError as e:
    print(f"Error importing required modules: {e}")
    print("Please ensure you have installed the required dependencies:")
    print("  pip install fire python-dotenv")
    sys.exit(1)

from engine.src.errors import EngineError, InvariantViolationError
from engine.src.gateways.v1.csv_gateway import CsvWriter
from engine.src.schemas.v1.config import (
    FixtureName,
    FuelSectorConfig,
    FunctionChoice,
    GeneratorConfig,
    PassThroughMode,
    RunConfig,
    default_output_dir,
    load_model,
)
from engine.src.schemas.v1.reports import EsriEntry, EsriResponse, GenerateResponse
from engine.src.services.v1 import (
    ContagionService,
    EmissionsService,
    NetworkService,
    ScenarioService,
    SyntheticDataService,
)

from .utils import setup_logger

ListArg = Union[None, str, int, float, Sequence[Any]]


def _as_list(value: ListArg, cast=float) -> Optional[List[Any]]:
    """Fire hands ``10,45`` over as a tuple and ``10`` as a number."""
    if value is None:
        return None
    if isinstance(value, str):
        items: Sequence[Any] = [v for v in value.split(",") if v.strip()]
    elif isinstance(value, (list, tuple)):
        items = value
    else:
        items = [value]
    return [cast(v) for v in items]


class StressCLI:
    """
    Carbon Stress CLI

    Usage:
        python stress.py generate --config gen.yaml --output_dir DIR
        python stress.py estimate_emissions --firms F --edges E --output OUT
        python stress.py sweep --config run.yaml --prices 10,45 --fn GL
        python stress.py esri --config run.yaml --firms 0,1,2 --output OUT
        python stress.py toy --price 20 --fixture banks
    """

    def __init__(self):
        load_dotenv()
        self._logger = setup_logger(__name__)
        self._scenarios = ScenarioService()

    def _configure(self, verbose: bool) -> None:
        self._logger = setup_logger(__name__, verbose=verbose)

    async def generate(
        self,
        config: Optional[str] = None,
        output_dir: Optional[str] = None,
        seed: Optional[int] = None,
        n_firms: Optional[int] = None,
        verbose: bool = False,
    ) -> bool:
        """Generate a synthetic instance and write it as CSV files."""
        self._configure(verbose)
        try:
            cfg = (
                GeneratorConfig.from_yaml(Path(config)) if config else GeneratorConfig()
            )
            overrides = {"seed": seed, "n_firms": n_firms}
            cfg = load_model(
                GeneratorConfig,
                {
                    **cfg.model_dump(),
                    **{k: v for k, v in overrides.items() if v is not None},
                },
                source="generator overrides",
            )
            synthetic = self._scenarios.synthetic
            instance = await asyncio.to_thread(synthetic.generate, cfg)
            target = Path(output_dir) if output_dir else default_output_dir()
            files = synthetic.write_instance(instance, target)
            alpha, ks = synthetic.fit_tail_exponent(
                instance.network.s_out, target=cfg.emission_tail_exponent
            )
            response = GenerateResponse(
                success=True,
                message=f"generated {instance.n} firms",
                files=files,
                fitted_tail_exponent=alpha,
                ks_distance=ks,
            )
            CsvWriter.write_json(target / "generate.json", response)
            self._logger.info(
                "Generated %d firms into %s (tail exponent %.3f, KS %.3f)",
                instance.n,
                target,
                alpha,
                ks,
            )
            return True
        except EngineError as e:
            self._logger.error("Generation failed: %s", e)
            return False

    async def estimate_emissions(
        self,
        firms: str,
        edges: str,
        fuel_config: Optional[str] = None,
        output: Optional[str] = None,
        verbose: bool = False,
    ) -> bool:
        """Estimate per-firm emissions from fuel purchases."""
        self._configure(verbose)
        try:
            network, book = NetworkService().load_network(firms, edges)
            fuel = (
                FuelSectorConfig.from_yaml(Path(fuel_config))
                if fuel_config
                else FuelSectorConfig.hungarian_defaults()
            )
            service = EmissionsService()
            emissions = service.estimate_emissions(network, book.sectors, fuel)
            target = Path(output) if output else default_output_dir() / "emissions.csv"
            CsvWriter.write_emissions(target, emissions)
            CsvWriter.write_json(
                target.with_suffix(".json"),
                {
                    "statistics": service.statistics(emissions, book).model_dump(
                        mode="json"
                    ),
                    "distributors": [
                        entry.model_dump(mode="json")
                        for entry in service.distributor_summary(
                            network, book.sectors, fuel
                        )
                    ],
                },
            )
            self._logger.info(
                "Estimated %.6g t for %d emitting firms into %s",
                emissions.total,
                int(emissions.emitters.sum()),
                target,
            )
            return True
        except EngineError as e:
            self._logger.error("Emission estimate failed: %s", e)
            return False

    def _run_config(self, config: Optional[str], **overrides: Any) -> RunConfig:
        base = RunConfig.from_yaml(Path(config)) if config else RunConfig()
        return base.with_overrides(**overrides)

    async def sweep(
        self,
        config: Optional[str] = None,
        prices: ListArg = None,
        fn: Optional[str] = None,
        pass_through: Optional[str] = None,
        kappa: Optional[float] = None,
        epsilon: Optional[float] = None,
        coverage: Optional[float] = None,
        threshold: Optional[float] = None,
        output_dir: Optional[str] = None,
        workers: Optional[int] = None,
        write_trace: Optional[bool] = None,
        write_retained_costs: Optional[bool] = None,
        verbose: bool = False,
    ) -> bool:
        """Run the price sweep and write the reports."""
        self._configure(verbose)
        try:
            run_config = self._run_config(
                config,
                prices=_as_list(prices),
                fn=FunctionChoice(fn) if fn else None,
                pass_through=PassThroughMode(pass_through) if pass_through else None,
                kappa=kappa,
                epsilon=epsilon,
                coverage=coverage,
                threshold=threshold,
                output_dir=output_dir,
                workers=workers,
                write_trace=write_trace,
                write_retained_costs=write_retained_costs,
            )
            return await self._sweep(run_config)
        except ValueError as e:
            self._logger.error("Invalid option: %s", e)
            return False
        except EngineError as e:
            self._logger.error("Sweep failed: %s", e)
            return False

    async def _sweep(self, run_config: RunConfig, instance=None) -> bool:
        response, prepared = await self._scenarios.run(run_config, instance)
        files = self._scenarios.write_reports(run_config, response, prepared)
        for cell in response.cells:
            if not cell.success:
                self._logger.error("%s", cell.message)
        self._logger.info("Reports written: %s", ", ".join(sorted(files.values())))
        if response.dominance_violations:
            raise InvariantViolationError("; ".join(response.dominance_violations))
        return response.success

    async def esri(
        self,
        config: Optional[str] = None,
        fn: str = "GL",
        firms: ListArg = None,
        output: Optional[str] = None,
        fsri: bool = True,
        verbose: bool = False,
    ) -> bool:
        """Output (and bank) loss caused by the failure of each firm alone."""
        self._configure(verbose)
        try:
            run_config = self._run_config(config)
            functions = FunctionChoice(fn)
            if functions is FunctionChoice.BOTH:
                raise ValueError("esri needs a single production function")
            instance = await asyncio.to_thread(
                self._scenarios.load_or_generate, run_config
            )
            prepared = await asyncio.to_thread(
                self._scenarios.prepare, instance, run_config.threshold
            )
            selected = _as_list(firms, cast=int)
            contagion: ContagionService = self._scenarios.contagion
            kwargs = dict(
                fn=functions.value,
                firms=selected,
                epsilon=run_config.epsilon,
                max_iterations=run_config.max_iterations,
                demand_channel=run_config.demand_channel,
            )
            esri_values = await asyncio.to_thread(
                contagion.esri, prepared.params, **kwargs
            )
            fsri_values = (
                await asyncio.to_thread(
                    contagion.fsri,
                    prepared.params,
                    instance.book,
                    instance.banks,
                    kappa=run_config.kappa,
                    **kwargs,
                )
                if fsri
                else None
            )
            ids = selected if selected is not None else list(range(instance.n))
            response = EsriResponse(
                success=True,
                fn=functions.value,
                entries=[
                    EsriEntry(
                        firm_id=firm,
                        esri=float(esri_values[k]),
                        fsri=float(fsri_values[k]) if fsri_values is not None else None,
                    )
                    for k, firm in enumerate(ids)
                ],
            )
            target = Path(output) if output else run_config.output_dir / "esri.csv"
            CsvWriter.write_esri(target, response.entries)
            self._logger.info("ESRI of %d firms written to %s", len(ids), target)
            return True
        except ValueError as e:
            self._logger.error("Invalid option: %s", e)
            return False
        except EngineError as e:
            self._logger.error("ESRI failed: %s", e)
            return False

    async def toy(
        self,
        price: ListArg = 20.0,
        fn: str = "both",
        fixture: str = "banks",
        pass_through: str = "off",
        output_dir: Optional[str] = None,
        verbose: bool = False,
    ) -> bool:
        """Run a golden fixture end to end."""
        self._configure(verbose)
        try:
            synthetic: SyntheticDataService = self._scenarios.synthetic
            instance = (
                synthetic.systemic_core_fixture()
                if FixtureName(fixture) is FixtureName.CORE
                else synthetic.toy_fixture()
            )
            run_config = RunConfig(
                prices=_as_list(price) or [20.0],
                fn=FunctionChoice(fn),
                pass_through=PassThroughMode(pass_through),
                output_dir=(
                    Path(output_dir)
                    if output_dir
                    else default_output_dir() / instance.name
                ),
            )
            return await self._sweep(run_config, instance)
        except ValueError as e:
            self._logger.error("Invalid option: %s", e)
            return False
        except EngineError as e:
            self._logger.error("Fixture run failed: %s", e)
            return False


def main():
    """
    Main entry point for the stress CLI.

    Uses Fire to handle all command processing; a failed command exits with 1.
    """
    try:
        result = fire.Fire(StressCLI)
    except KeyboardInterrupt:
        print("\nOperation cancelled by user")
        sys.exit(1)
    except Exception as e:
        print(f"Unexpected error: {e}")
        sys.exit(1)
    sys.exit(1 if result is False else 0)


if __name__ == "__main__":
    main()

__all__ = ["StressCLI", "main"]
