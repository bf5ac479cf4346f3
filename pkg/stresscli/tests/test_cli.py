"""
Tests for the stress CLI commands.
"""

import json
import os
from pathlib import Path
from unittest.mock import patch

from stresscli.src.cli import StressCLI, _as_list, main
from stresscli.tests.base import BaseTest


class TestListArguments(BaseTest):
    def test_forms_fire_produces(self):
        self.assertEqual(_as_list((10, 45)), [10.0, 45.0])
        self.assertEqual(_as_list(20), [20.0])
        self.assertEqual(_as_list("10,45,"), [10.0, 45.0])
        self.assertEqual(_as_list([1, 2], cast=int), [1, 2])
        self.assertIsNone(_as_list(None))


class TestToyCommand(BaseTest):
    def setUp(self):
        super().setUp()
        self.cli = StressCLI()

    def test_bank_fixture(self):
        """The golden fixture loses 0.2 of bank equity at a price of 20."""
        out = self.temp_dir / "toy"
        ok = self.run_async(self.cli.toy(price=20, fn="GL", output_dir=str(out)))
        self.assertTrue(ok)
        cell = json.loads(
            (out / "cells" / "20_no_pass_through_GL.json").read_text(encoding="utf-8")
        )
        self.assertEqual(cell["total_bank_loss"], 0.2)
        self.assertTrue((out / "sweep.csv").exists())

    def test_core_fixture(self):
        out = self.temp_dir / "core"
        ok = self.run_async(
            self.cli.toy(price=(90, 100), fixture="core", output_dir=str(out))
        )
        self.assertTrue(ok)
        rows = (out / "sweep.csv").read_text(encoding="utf-8").splitlines()
        self.assertEqual(len([r for r in rows if not r.startswith("#")]), 5)

    def test_failed_cell_fails_the_command(self):
        ok = self.run_async(
            self.cli.toy(pass_through="on", output_dir=str(self.temp_dir / "cycle"))
        )
        self.assertFalse(ok)
        run = json.loads((self.temp_dir / "cycle" / "run.json").read_text("utf-8"))
        self.assertFalse(run["success"])

    def test_unknown_option(self):
        self.assertFalse(self.run_async(self.cli.toy(fn="Cobb-Douglas")))
        self.assertFalse(self.run_async(self.cli.toy(fixture="nope")))


class TestDataCommands(BaseTest):
    def setUp(self):
        super().setUp()
        self.cli = StressCLI()

    def test_generate_and_estimate(self):
        out = self.temp_dir / "synthetic"
        ok = self.run_async(
            self.cli.generate(output_dir=str(out), seed=3, n_firms=150)
        )
        self.assertTrue(ok)
        summary = json.loads((out / "generate.json").read_text(encoding="utf-8"))
        self.assertTrue(summary["success"])
        self.assertIsNotNone(summary["fitted_tail_exponent"])

        target = self.temp_dir / "emissions.csv"
        ok = self.run_async(
            self.cli.estimate_emissions(
                firms=str(out / "firms.csv"),
                edges=str(out / "edges.csv"),
                output=str(target),
            )
        )
        self.assertTrue(ok)
        self.assertEqual(len(target.read_text(encoding="utf-8").splitlines()), 151)
        stats = json.loads(target.with_suffix(".json").read_text(encoding="utf-8"))
        self.assertEqual(stats["statistics"]["firms"], 150)

    def test_generate_rejects_infeasible_config(self):
        config = self.write_config("gen.yaml", {"n_banks": 0, "loan_coverage": 0.5})
        ok = self.run_async(
            self.cli.generate(config=config, output_dir=str(self.temp_dir / "x"))
        )
        self.assertFalse(ok)

    def test_estimate_with_missing_file(self):
        ok = self.run_async(
            self.cli.estimate_emissions(
                firms=str(self.temp_dir / "absent.csv"),
                edges=str(self.temp_dir / "absent_edges.csv"),
            )
        )
        self.assertFalse(ok)


class TestSweepCommand(BaseTest):
    def setUp(self):
        super().setUp()
        self.cli = StressCLI()
        self.config = self.write_config(
            "run.yaml", {"inputs": self.toy_files(), "workers": 1}
        )

    def test_sweep_with_overrides(self):
        out = self.temp_dir / "results"
        ok = self.run_async(
            self.cli.sweep(
                config=self.config,
                prices=(5, 20),
                fn="both",
                pass_through="off",
                output_dir=str(out),
            )
        )
        self.assertTrue(ok)
        lines = (out / "sweep.csv").read_text(encoding="utf-8").splitlines()
        self.assertIn("# - 5.0", lines)
        self.assertEqual(len([line for line in lines if not line.startswith("#")]), 5)

    def test_sweep_writes_retained_costs_on_request(self):
        out = self.temp_dir / "retained"
        ok = self.run_async(
            self.cli.sweep(
                config=self.config,
                prices=20,
                fn="GL",
                pass_through="off",
                output_dir=str(out),
                write_retained_costs=True,
            )
        )
        self.assertTrue(ok)
        self.assertTrue((out / "retained_20_no_pass_through.csv").exists())
        self.assertTrue((out / "direct_sweep_no_pass_through.csv").exists())
        first = (out / "sweep.csv").read_text(encoding="utf-8").splitlines()[0]
        self.assertTrue(first.startswith("# source_sha256: "))

    def test_unsorted_prices(self):
        ok = self.run_async(
            self.cli.sweep(
                config=self.config, prices=(20, 5), output_dir=str(self.temp_dir)
            )
        )
        self.assertFalse(ok)

    def test_missing_config_file(self):
        missing = str(self.temp_dir / "no.yaml")
        self.assertFalse(self.run_async(self.cli.sweep(config=missing)))

    def test_without_data_source(self):
        self.assertFalse(
            self.run_async(self.cli.sweep(prices=10, output_dir=str(self.temp_dir)))
        )

    def test_esri(self):
        target = self.temp_dir / "esri.csv"
        ok = self.run_async(
            self.cli.esri(config=self.config, firms=(4,), output=str(target))
        )
        self.assertTrue(ok)
        lines = target.read_text(encoding="utf-8").splitlines()
        self.assertEqual(lines, ["firm_id,esri,fsri", "4,1,0.2"])

    def test_esri_needs_one_function(self):
        self.assertFalse(self.run_async(self.cli.esri(config=self.config, fn="both")))


class TestMain(BaseTest):
    def test_exit_codes(self):
        for result, code in ((True, 0), (None, 0), (False, 1)):
            with patch("stresscli.src.cli.fire.Fire", return_value=result):
                with self.assertRaises(SystemExit) as ctx:
                    main()
            self.assertEqual(ctx.exception.code, code)

    def test_unexpected_error_exits_nonzero(self):
        with patch("stresscli.src.cli.fire.Fire", side_effect=RuntimeError("boom")):
            with self.assertRaises(SystemExit) as ctx:
                main()
        self.assertEqual(ctx.exception.code, 1)

    def test_output_directory_from_environment(self):
        out = self.temp_dir / "from_env"
        with patch.dict(os.environ, {"CARBON_STRESS_OUTPUT_DIR": str(out)}):
            ok = self.run_async(StressCLI().toy(fn="GL"))
        self.assertTrue(ok)
        self.assertTrue(Path(out / "toy" / "sweep.csv").exists())
