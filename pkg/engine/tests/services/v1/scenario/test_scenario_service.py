"""
Tests for ScenarioService: sweeps, dominance checks and reports.
"""

import hashlib
import json
import os
from pathlib import Path
from unittest.mock import patch

import pandas as pd

from engine.src.errors import ConfigurationError, InvariantViolationError
from engine.src.gateways.v1.csv_gateway import DIRECT_SWEEP_COLUMNS
from engine.src.schemas.v1.config import (
    WRITE_RETAINED_ENV,
    GeneratorConfig,
    InputPaths,
    RunConfig,
    load_model,
)
from engine.src.schemas.v1.reports import CellResult
from engine.src.services.v1 import SyntheticDataService
from engine.tests.services.v1.scenario.base import BaseScenarioServiceTest


class TestToySweep(BaseScenarioServiceTest):
    def test_single_cell_reproduces_bank_losses(self):
        config = self.run_config(prices=[20.0], fn="GL", pass_through="off")
        response, _ = self.sweep(config, self.toy_instance())
        self.assertTrue(response.success)
        self.assertEqual(len(response.cells), 1)
        cell = response.cells[0]
        self.assertEqual(cell.total_bank_loss, 0.2)
        self.assertEqual([bank.total for bank in cell.banks], [0.1, 0.3])
        self.assertEqual((cell.direct_defaults, cell.indirect_defaults), (1, 3))
        self.assertAlmostEqual(cell.total_output_loss, 1.0)

    def test_loaded_files_give_the_same_losses(self):
        files = SyntheticDataService().write_instance(
            self.toy_instance(), self.tmp_dir / "toy"
        )
        config = self.run_config(
            inputs=InputPaths(**files), prices=[20.0], fn="GL", pass_through="off"
        )
        response, prepared = self.sweep(config)
        self.assertEqual(prepared.instance.name, "firms")
        self.assertEqual(response.cells[0].total_bank_loss, 0.2)

    def test_failed_cell_is_reported_and_others_kept(self):
        config = self.run_config(
            prices=[5.0, 20.0], fn="GL", pass_through="off", max_iterations=1
        )
        response, _ = self.sweep(config, self.toy_instance())
        self.assertFalse(response.success)
        self.assertEqual(response.exit_code, 1)
        ok, failed = response.cells
        self.assertTrue(ok.success)
        self.assertEqual(ok.total_output_loss, 0.0)
        self.assertFalse(failed.success)
        self.assertIn("price=20", failed.message)
        self.assertIn("fn=GL", failed.message)
        self.assertIn("1 of 2 cells failed", response.message)

    def test_supply_cycle_with_full_pass_through_fails_its_cell(self):
        config = self.run_config(prices=[20.0], fn="GL", pass_through="on")
        response, _ = self.sweep(config, self.toy_instance())
        self.assertFalse(response.cells[0].success)
        self.assertIn("mode=pass_through", response.cells[0].message)

    def test_no_data_source(self):
        with self.assertRaises(ConfigurationError):
            self.service.load_or_generate(self.run_config(prices=[10.0]))

    def test_empty_price_grid(self):
        with self.assertRaises(ConfigurationError):
            load_model(RunConfig, {"prices": []})
        with self.assertRaises(ConfigurationError):
            load_model(RunConfig, {"prices": [20.0, 10.0]})


class TestSystemicCore(BaseScenarioServiceTest):
    def test_leontief_jump_at_core_breakeven(self):
        config = self.run_config(prices=[90.0, 100.0], fn="both", pass_through="off")
        response, _ = self.sweep(config, self.core_instance())
        self.assertTrue(response.success)
        losses = {(c.price, c.fn): c.total_output_loss for c in response.cells}
        self.assertAlmostEqual(losses[(90.0, "GL")], 150.0 / 4250.0, places=6)
        self.assertGreaterEqual(losses[(100.0, "GL")], 10.0 * losses[(90.0, "GL")])
        self.assertLess(losses[(100.0, "Linear")], 10.0 * losses[(90.0, "Linear")])
        self.assertGreater(losses[(100.0, "GL")], losses[(100.0, "Linear")])


class TestSyntheticGrid(BaseScenarioServiceTest):
    def setUp(self):
        super().setUp()
        generator = GeneratorConfig(
            n_firms=200, n_banks=3, seed=11, sector_mix={"C": 0.6, "G": 0.4}
        )
        self.config = self.run_config(
            generator=generator, prices=[10.0, 45.0, 100.0, 200.0], epsilon=1e-10
        )

    def test_grid_is_complete_ordered_and_dominated(self):
        response, _ = self.sweep(self.config)
        self.assertTrue(response.success, response.message)
        self.assertEqual(response.dominance_violations, [])
        for mode in ("no_pass_through", "pass_through"):
            self.assertEqual(sum(c.mode == mode for c in response.cells), 8)
        keys = [(c.price, c.mode, c.fn) for c in response.cells]
        self.assertEqual(
            keys[:4],
            [
                (10.0, "no_pass_through", "GL"),
                (10.0, "no_pass_through", "Linear"),
                (10.0, "pass_through", "GL"),
                (10.0, "pass_through", "Linear"),
            ],
        )
        self.assertEqual([k[0] for k in keys], sorted(k[0] for k in keys))

    def test_cells_do_not_depend_on_each_other(self):
        full, _ = self.sweep(self.config)
        single, _ = self.sweep(self.config.with_overrides(prices=[100.0], workers=1))
        expected = [c for c in full.cells if c.price == 100.0]
        self.assertEqual(
            [c.model_dump() for c in single.cells], [c.model_dump() for c in expected]
        )


class TestDominanceCheck(BaseScenarioServiceTest):
    @staticmethod
    def cell(fn, direct, total, bank_direct=0.0, bank_total=0.0):
        return CellResult(
            success=True,
            price=50.0,
            mode="no_pass_through",
            fn=fn,
            direct_output_loss=direct,
            total_output_loss=total,
            direct_bank_loss=bank_direct,
            total_bank_loss=bank_total,
        )

    def test_ordered_cells_pass(self):
        cells = [self.cell("GL", 0.1, 0.5, 0.0, 0.2), self.cell("Linear", 0.1, 0.3)]
        self.assertEqual(self.service.check_dominance(cells), [])

    def test_linear_above_leontief(self):
        cells = [self.cell("GL", 0.1, 0.3), self.cell("Linear", 0.1, 0.5)]
        violations = self.service.check_dominance(cells)
        self.assertEqual(len(violations), 1)
        self.assertIn("Linear output loss", violations[0])
        with self.assertRaises(InvariantViolationError):
            self.service.assert_dominance(cells)

    def test_direct_above_total(self):
        cells = [self.cell("GL", 0.1, 0.1, bank_direct=0.3, bank_total=0.2)]
        violations = self.service.check_dominance(cells)
        self.assertEqual(len(violations), 1)
        self.assertIn("direct bank loss", violations[0])

    def test_tolerance(self):
        cells = [self.cell("GL", 0.1, 0.3), self.cell("Linear", 0.1, 0.3 + 1e-9)]
        self.assertEqual(self.service.check_dominance(cells, tolerance=1e-6), [])
        self.assertEqual(len(self.service.check_dominance(cells, tolerance=0.0)), 1)

    def test_failed_cells_are_skipped(self):
        failed = CellResult(success=False, price=50.0, mode="no_pass_through", fn="GL")
        cells = [failed, self.cell("Linear", 0.1, 0.5)]
        self.assertEqual(self.service.check_dominance(cells), [])


class TestReports(BaseScenarioServiceTest):
    def _write(self, name, **values):
        config = self.run_config(
            prices=[20.0, 100.0], fn="GL", pass_through="off", **values
        )
        response, prepared = self.sweep(config, self.toy_instance())
        return self.service.write_reports(
            config, response, prepared, self.tmp_dir / name
        )

    def test_report_files(self):
        files = self._write("a")
        lines = Path(files["sweep"]).read_text(encoding="utf-8").splitlines()
        header = [line for line in lines if line.startswith("# ")]
        rows = [line for line in lines if not line.startswith("# ")]
        self.assertIn("# fn: GL", header)
        self.assertTrue(rows[0].startswith("price,mode,fn,direct_output_loss"))
        self.assertEqual(len(rows), 3)

        run = json.loads(Path(files["run"]).read_text(encoding="utf-8"))
        self.assertTrue(run["success"])
        self.assertEqual(
            [c["cell"] for c in run["cells"]],
            ["20_no_pass_through_GL", "100_no_pass_through_GL"],
        )
        cell_file = Path(files["run"]).parent / "cells" / "20_no_pass_through_GL.json"
        cell = json.loads(cell_file.read_text(encoding="utf-8"))
        self.assertEqual(cell["total_bank_loss"], 0.2)

        summary = json.loads(Path(files["network_summary"]).read_text(encoding="utf-8"))
        self.assertEqual([s["label"] for s in summary], ["full", "thresholded"])

    def test_reports_are_byte_identical(self):
        first = self._write("a")
        second = self._write("b")
        for name in first:
            self.assertEqual(
                Path(first[name]).read_bytes(), Path(second[name]).read_bytes(), name
            )

    def test_trace_files(self):
        files = self._write("traced", write_trace=True)
        root = Path(files["sweep"]).parent
        trace = (root / "trace_20_no_pass_through_GL.csv").read_text(encoding="utf-8")
        self.assertTrue(trace.startswith("iteration,max_delta"))

    def test_direct_sweep_file(self):
        files = self._write("direct")
        self.assertNotIn("direct_sweep_pass_through", files)
        frame = pd.read_csv(files["direct_sweep_no_pass_through"], comment="#")
        self.assertEqual(list(frame.columns), DIRECT_SWEEP_COLUMNS)
        self.assertEqual(frame["price"].tolist(), [20.0, 100.0])
        # at 100 d's costs reach its net profit as well
        self.assertEqual(frame["direct_defaults_count"].tolist(), [1, 2])
        self.assertArrayClose(frame["direct_output_loss"], [20.0 / 42.0, 25.0 / 42.0])

    def test_retained_costs_only_on_request(self):
        root = Path(self._write("plain")["sweep"]).parent
        self.assertEqual(list(root.glob("retained_*.csv")), [])

        root = Path(self._write("retained", write_retained_costs=True)["sweep"]).parent
        self.assertEqual(
            sorted(p.name for p in root.glob("retained_*.csv")),
            ["retained_100_no_pass_through.csv", "retained_20_no_pass_through.csv"],
        )
        frame = pd.read_csv(root / "retained_20_no_pass_through.csv")
        self.assertEqual(list(frame.columns), ["firm_id", "retained_cost"])
        self.assertEqual(frame["firm_id"].tolist(), [0, 1, 2, 3, 4])
        self.assertArrayClose(frame["retained_cost"], [0.0, 0.0, 0.0, 20.0, 200.0])

    def test_retained_costs_from_environment(self):
        with patch.dict(os.environ, {WRITE_RETAINED_ENV: "true"}):
            self.assertTrue(RunConfig().write_retained_costs)
        with patch.dict(os.environ, {WRITE_RETAINED_ENV: "0"}):
            self.assertFalse(RunConfig().write_retained_costs)

    def test_config_source_in_reports(self):
        text = 'prices: [20, 100]\nfn: GL\npass_through: "off"\n# toy run\n'
        path = self.tmp_dir / "run.yaml"
        path.write_text(text, encoding="utf-8")
        config = RunConfig.from_yaml(path).with_overrides(
            output_dir=self.tmp_dir / "sourced", workers=2
        )
        self.assertEqual(config.source_text, text)
        response, prepared = self.sweep(config, self.toy_instance())
        files = self.service.write_reports(config, response, prepared)

        digest = hashlib.sha256(text.encode("utf-8")).hexdigest()
        first = Path(files["sweep"]).read_text(encoding="utf-8").splitlines()[0]
        self.assertEqual(first, f"# source_sha256: {digest}")
        run = json.loads(Path(files["run"]).read_text(encoding="utf-8"))
        self.assertEqual(run["source"], text)
        self.assertEqual(run["source_sha256"], digest)

    def test_config_without_source_has_no_digest(self):
        files = self._write("unsourced")
        lines = Path(files["sweep"]).read_text(encoding="utf-8").splitlines()
        self.assertFalse(any("source_sha256" in line for line in lines))
