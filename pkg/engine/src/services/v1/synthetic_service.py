"""
Reproducible synthetic instances and the two golden fixtures.

Every random draw comes from one ``PCG64`` stream seeded by the config, in a
fixed order, so a seed determines the instance bit for bit.
"""

import logging
import math
from pathlib import Path
from typing import Dict, Optional, Tuple, Union

import numpy as np
import yaml
from scipy import stats

from ...gateways.v1.csv_gateway import CsvWriter
from ...models import (
    BankRegister,
    CriticalityTable,
    EmissionVector,
    FirmBook,
    ModelInstance,
    SupplyNetwork,
)
from ...schemas.v1.config import FuelSectorConfig, GeneratorConfig
from .base_service import BaseService
from .emissions_service import EmissionsService

PathLike = Union[str, Path]

SIZE_SCALE = 1e5
HUNGARIAN_FIRM_COUNT = 410_523
GAS_SELLER_SECTOR = "D35.2.2"
OIL_SELLER_SECTOR = "G46.7.1"
CORE_SECTOR = "C24.1.0"
RING_SHARE = 0.25
INELIGIBLE_SHARE = 0.03
MIN_BREAKEVEN, MAX_BREAKEVEN = 5.0, 5000.0


class SyntheticDataService(BaseService):
    def __init__(self, emissions: Optional[EmissionsService] = None):
        self.emissions = emissions or EmissionsService()

    def generate(self, cfg: GeneratorConfig) -> ModelInstance:
        """
        Draw a network with Pareto distributed out-strengths, fuel sellers
        whose customers become emitters, a ring of firms that are each
        other's sole essential supplier, books and a bank loan register.
        """
        rng = np.random.Generator(np.random.PCG64(cfg.seed))
        n = cfg.n_firms

        sectors = self._draw_sectors(rng, cfg)
        core = np.sort(rng.choice(n, size=cfg.core_size, replace=False))
        sectors[core] = CORE_SECTOR

        non_core = np.setdiff1d(np.arange(n), core)
        n_fuel = min(len(non_core) - 1, int(round(cfg.fuel_seller_fraction * n)))
        if cfg.fuel_seller_fraction > 0:
            n_fuel = max(n_fuel, 1)
        fuel = np.sort(rng.choice(non_core, size=max(n_fuel, 0), replace=False))
        n_gas = math.ceil(len(fuel) / 2)
        sectors[fuel[:n_gas]] = GAS_SELLER_SECTOR
        sectors[fuel[n_gas:]] = OIL_SELLER_SECTOR

        sizes = SIZE_SCALE * (rng.pareto(cfg.emission_tail_exponent, n) + 1.0)
        network = self._draw_network(rng, cfg, sizes, core, fuel)

        fuel_cfg = self._fuel_config(n)
        emissions = self.emissions.estimate_emissions(network, sectors, fuel_cfg)
        book = self._draw_book(rng, network, sectors, emissions, core)
        banks = self._draw_banks(rng, cfg, book)
        criticality = self._draw_criticality(rng, cfg, core)

        self._log(
            logging.INFO,
            "Generated synthetic instance",
            seed=cfg.seed,
            firms=n,
            edges=network.edge_count,
            fuel_sellers=len(fuel),
            emitters=int(emissions.emitters.sum()),
            banks=banks.m,
        )
        return ModelInstance(
            network=network,
            book=book.with_loans(banks.borrowers),
            banks=banks,
            criticality=criticality,
            fuel=fuel_cfg,
            name=f"synthetic-{cfg.seed}",
        )

    def _draw_sectors(
        self, rng: np.random.Generator, cfg: GeneratorConfig
    ) -> np.ndarray:
        letters = sorted(cfg.sector_mix)
        weights = np.array([cfg.sector_mix[k] for k in letters], dtype=float)
        section = rng.choice(len(letters), size=cfg.n_firms, p=weights / weights.sum())
        division = rng.integers(10, 14, size=cfg.n_firms)
        group = rng.integers(1, 4, size=cfg.n_firms)
        klass = rng.integers(0, 2, size=cfg.n_firms)
        return np.array(
            [
                f"{letters[s]}{d}.{g}.{c}"
                for s, d, g, c in zip(section, division, group, klass)
            ],
            dtype=object,
        )

    def _draw_network(
        self,
        rng: np.random.Generator,
        cfg: GeneratorConfig,
        sizes: np.ndarray,
        core: np.ndarray,
        fuel: np.ndarray,
    ) -> SupplyNetwork:
        n = cfg.n_firms
        is_fuel = np.zeros(n, dtype=bool)
        is_fuel[fuel] = True
        ordinary = np.flatnonzero(~is_fuel)

        # customers drawn proportionally to size
        degree = 1 + rng.poisson(max(cfg.mean_degree - 1.0, 0.0), size=len(ordinary))
        degree = np.minimum(degree, n - 1)
        supplier = np.repeat(ordinary, degree)
        cumulative = np.cumsum(sizes)
        buyer = np.searchsorted(
            cumulative, rng.random(len(supplier)) * cumulative[-1], side="right"
        )
        buyer = np.minimum(buyer, n - 1)
        loops = buyer == supplier
        buyer[loops] = (
            buyer[loops] + 1 + rng.integers(0, n - 1, size=int(loops.sum()))
        ) % n
        weight = rng.exponential(1.0, size=len(supplier))

        # emitters buy fuel proportionally to their size
        if len(fuel):
            candidates = ordinary
            n_emitters = max(1, int(round(cfg.emitter_fraction * len(candidates))))
            emitters = np.sort(rng.choice(candidates, size=n_emitters, replace=False))
            seller = fuel[rng.integers(0, len(fuel), size=n_emitters)]
            fuel_weight = sizes[emitters] * rng.uniform(0.5, 1.5, size=n_emitters)
            idle = np.setdiff1d(fuel, seller)
            idle_buyer = candidates[rng.integers(0, len(candidates), size=len(idle))]
            supplier = np.concatenate([supplier, seller, idle])
            buyer = np.concatenate([buyer, emitters, idle_buyer])
            weight = np.concatenate(
                [weight, fuel_weight, rng.exponential(1.0, size=len(idle))]
            )

        per_supplier = np.bincount(supplier, weights=weight, minlength=n)
        value = weight / per_supplier[supplier] * sizes[supplier]

        if len(core) >= 2:
            in_core = np.zeros(n, dtype=bool)
            in_core[core] = True
            value = np.where(in_core[supplier], value * (1.0 - RING_SHARE), value)
            supplier = np.concatenate([supplier, core])
            buyer = np.concatenate([buyer, np.roll(core, -1)])
            value = np.concatenate([value, RING_SHARE * sizes[core]])

        return SupplyNetwork.from_edges(n, supplier, buyer, value)

    def _fuel_config(self, n: int) -> FuelSectorConfig:
        defaults = FuelSectorConfig.hungarian_defaults()
        scale = n / HUNGARIAN_FIRM_COUNT
        return defaults.model_copy(
            update={
                "total_gas_emissions": defaults.total_gas_emissions * scale,
                "total_oil_emissions": defaults.total_oil_emissions * scale,
            }
        )

    def _draw_book(
        self,
        rng: np.random.Generator,
        network: SupplyNetwork,
        sectors: np.ndarray,
        emissions: EmissionVector,
        core: np.ndarray,
    ) -> FirmBook:
        n = network.n
        s_out, s_in = network.s_out, network.s_in
        revenue = s_out * (1.0 + rng.uniform(0.2, 1.0, n))
        material = np.minimum(s_in * (1.0 + rng.uniform(0.0, 0.2, n)), 0.9 * revenue)
        operating = (revenue - material) * rng.uniform(0.1, 0.4, n)
        net = operating * rng.uniform(0.5, 0.9, n)

        # emitters get breakeven prices spread log-uniformly over the sweep range
        breakeven = np.exp(
            rng.uniform(math.log(MIN_BREAKEVEN), math.log(MAX_BREAKEVEN), n)
        )
        emitters = emissions.emitters
        net = np.where(emitters, emissions.emissions * breakeven, net)
        operating = np.maximum(operating, net / 0.7)

        equity = revenue * rng.uniform(0.1, 0.6, n)
        liquidity = revenue * rng.uniform(0.05, 0.3, n)
        retained = equity * rng.uniform(0.0, 0.3, n)

        ineligible = rng.random(n) < INELIGIBLE_SHARE
        ineligible[core] = False
        net = np.where(ineligible, -np.abs(net) - 1.0, net)

        return FirmBook.from_columns(
            sectors=sectors,
            revenue=revenue,
            material_costs=material,
            operating_profit=operating,
            net_profit=net,
            equity=equity,
            liquidity=liquidity,
            retained_earnings=retained,
        )

    def _draw_banks(
        self, rng: np.random.Generator, cfg: GeneratorConfig, book: FirmBook
    ) -> BankRegister:
        if cfg.n_banks == 0:
            return BankRegister.empty(book.n)
        borrowers = np.flatnonzero(rng.random(book.n) < cfg.loan_coverage)
        counts = 1 + rng.poisson(0.5, size=len(borrowers))
        firm = np.repeat(borrowers, counts)
        bank = rng.integers(0, cfg.n_banks, size=len(firm))
        principal = book.revenue[firm] * rng.uniform(0.05, 0.5, size=len(firm))

        book_per_bank = np.bincount(bank, weights=principal, minlength=cfg.n_banks)
        equity = book_per_bank * rng.uniform(0.2, 0.4, size=cfg.n_banks)
        fallback = equity[equity > 0].mean() if (equity > 0).any() else SIZE_SCALE
        equity = np.where(equity > 0, equity, fallback)
        return BankRegister.from_loans(book.n, equity, firm, bank, principal)

    def _draw_criticality(
        self, rng: np.random.Generator, cfg: GeneratorConfig, core: np.ndarray
    ) -> CriticalityTable:
        letters = sorted(set(cfg.sector_mix) | {"C", "D", "G"})
        entries: Dict[Tuple[str, str], bool] = {}
        for buyer in letters:
            for supplier in letters:
                if rng.random() < cfg.essentiality_rate:
                    entries[(buyer, supplier)] = True
        if len(core) >= 2:
            entries[(CORE_SECTOR, CORE_SECTOR)] = True
        return CriticalityTable(entries=entries)

    def fit_tail_exponent(
        self,
        sample: np.ndarray,
        x_min: Optional[float] = None,
        target: Optional[float] = None,
    ) -> Tuple[float, float]:
        """
        Maximum-likelihood Pareto exponent above ``x_min`` and the
        Kolmogorov-Smirnov distance of the tail to Pareto(``target``).
        """
        values = np.asarray(sample, dtype=float)
        values = values[values > 0]
        cutoff = float(values.min()) if x_min is None else float(x_min)
        tail = values[values >= cutoff] / cutoff
        log_sum = np.log(tail).sum()
        alpha = float(len(tail) / log_sum) if log_sum > 0 else float("inf")
        exponent = alpha if target is None else target
        ks = float(stats.kstest(tail, "pareto", args=(exponent,)).statistic)
        return alpha, ks

    def write_instance(
        self, instance: ModelInstance, output_dir: PathLike
    ) -> Dict[str, str]:
        """Write an instance in the CSV layout the loaders read back."""
        root = Path(output_dir)
        root.mkdir(parents=True, exist_ok=True)
        files = {
            "firms": CsvWriter.write_firms(root / "firms.csv", instance.book),
            "edges": CsvWriter.write_edges(root / "edges.csv", instance.network),
            "criticality": CsvWriter.write_criticality(
                root / "criticality.csv", instance.criticality
            ),
        }
        if instance.banks.m:
            banks_path, loans_path = CsvWriter.write_banks(
                root / "banks.csv", root / "loans.csv", instance.banks
            )
            files["banks"], files["loans"] = banks_path, loans_path
        if instance.emissions is not None:
            files["emissions"] = CsvWriter.write_emissions(
                root / "emissions.csv", instance.emissions
            )
        fuel_path = root / "fuel.yaml"
        with open(fuel_path, "w", encoding="utf-8", newline="") as f:
            yaml.safe_dump(instance.fuel.model_dump(mode="json"), f, sort_keys=True)
        files["fuel_config"] = fuel_path
        return {name: str(path) for name, path in files.items()}

    def toy_fixture(self) -> ModelInstance:
        """
        Five firms a..e and two banks.

        e buys from a and is the sole essential supplier of b (C25 <- C23) and
        c (F41 <- C23); d and b supply c, c supplies b. At a carbon price of 20
        only e (10 t, net profit 100) fails directly. The cascade stops a, b
        and c; d loses its only customer but its equity absorbs the drop.
        All loans are 1 against equities of 10, so bank 1 loses 0.1 (a),
        bank 2 loses 0.3 (e directly, b and c indirectly), the system 0.2.
        Equities and loans are ten times the textbook toy of equity 1 and
        loans 0.1, which leaves every loss ratio unchanged.
        """
        a, b, c, d, e = range(5)
        network = SupplyNetwork.from_edges(
            5,
            supplier=[a, e, e, d, b, c],
            buyer=[e, b, c, c, c, b],
            value=[10.0, 10.0, 10.0, 5.0, 4.0, 3.0],
        )
        book = FirmBook.from_columns(
            sectors=["C20.1.4", "C25.1.1", "F41.2.0", "B08.1.2", "C23.5.1"],
            revenue=[10.0, 50.0, 40.0, 200.0, 300.0],
            material_costs=[2.0, 30.0, 25.0, 60.0, 120.0],
            operating_profit=[8.0, 20.0, 15.0, 140.0, 150.0],
            net_profit=[6.0, 15.0, 10.0, 100.0, 100.0],
            equity=[5.0, 10.0, 5.0, 500.0, 200.0],
            liquidity=[4.0, 8.0, 6.0, 300.0, 100.0],
            retained_earnings=[1.0, 2.0, 1.0, 10.0, 20.0],
        )
        # the loan of b to bank 1 is left out: with it bank 1 would lose 0.2
        banks = BankRegister.from_loans(
            5,
            equity=[10.0, 10.0],
            firm=[a, b, c, d, e],
            bank=[0, 1, 1, 1, 1],
            principal=[1.0, 1.0, 1.0, 1.0, 1.0],
        )
        criticality = CriticalityTable.from_pairs([("C25", "C23"), ("F41", "C23")])
        return ModelInstance(
            network=network,
            book=book.with_loans(banks.borrowers),
            banks=banks,
            criticality=criticality,
            emissions=EmissionVector.explicit(np.array([0.0, 0.0, 0.0, 1.0, 10.0])),
            name="toy",
        )

    def systemic_core_fixture(self, ring_size: int = 10) -> ModelInstance:
        """
        A ring of core firms, each the sole essential supplier of the next,
        holding about 59% of sales.

        Core firm 0 emits 10 t at a net profit of 1000 (breakeven 100); an
        unrelated firm emits 7.5 t at 150 (breakeven 20). Below 100 only the
        unrelated firm fails; from 100 on the GL ring collapses while linear
        substitution keeps most of it running.
        """
        k = ring_size
        core = np.arange(k)
        suppliers = core + k
        customers = core + 2 * k
        emitter, emitter_sink, final_demand = 3 * k, 3 * k + 1, 3 * k + 2
        n = 3 * k + 3

        supplier = np.concatenate(
            [core, core, core, suppliers, suppliers, customers, [emitter]]
        )
        buyer = np.concatenate(
            [
                np.roll(core, -1),
                customers,
                np.full(k, final_demand),
                core,
                customers,
                np.full(k, final_demand),
                [emitter_sink],
            ]
        )
        value = np.concatenate(
            [
                np.full(k, 10.0),
                np.full(k, 60.0),
                np.full(k, 180.0),
                np.full(k, 50.0),
                np.full(k, 10.0),
                np.full(k, 100.0),
                [150.0],
            ]
        )
        network = SupplyNetwork.from_edges(n, supplier, buyer, value)

        sectors = np.empty(n, dtype=object)
        sectors[core] = CORE_SECTOR
        sectors[suppliers] = "M70.2.2"
        sectors[customers] = "G47.1.1"
        sectors[emitter] = "H49.4.1"
        sectors[emitter_sink] = "N82.9.2"
        sectors[final_demand] = "O84.1.1"

        emissions = np.zeros(n)
        emissions[core[0]] = 10.0
        emissions[emitter] = 7.5
        revenue = 1.25 * network.s_out + 10.0
        material = network.s_in.copy()
        operating = 0.5 * (revenue - material)
        net = 0.8 * operating
        net[core[0]] = 1000.0
        net[emitter] = 150.0
        operating = np.maximum(operating, net)

        book = FirmBook.from_columns(
            sectors=sectors,
            revenue=revenue,
            material_costs=material,
            operating_profit=operating,
            net_profit=net,
            equity=0.3 * revenue,
            liquidity=0.2 * revenue,
            retained_earnings=0.05 * revenue,
        )
        firm = np.concatenate([core, customers, [emitter]])
        bank = np.concatenate([np.zeros(k, int), np.ones(k, int), [1]])
        principal = np.concatenate([np.full(k, 20.0), np.full(k, 10.0), [30.0]])
        banks = BankRegister.from_loans(n, [200.0, 100.0], firm, bank, principal)
        return ModelInstance(
            network=network,
            book=book.with_loans(banks.borrowers),
            banks=banks,
            criticality=CriticalityTable.from_pairs([(CORE_SECTOR, CORE_SECTOR)]),
            emissions=EmissionVector.explicit(emissions),
            name="systemic-core",
        )


__all__ = ["SyntheticDataService"]
