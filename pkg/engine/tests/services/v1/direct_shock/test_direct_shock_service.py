"""
Tests for DirectShockService.
"""

import numpy as np

from engine.src.errors import ConfigurationError
from engine.src.models import EmissionVector
from engine.tests.services.v1.direct_shock.base import BaseDirectShockServiceTest


class TestDirectDefaults(BaseDirectShockServiceTest):
    def setUp(self):
        super().setUp()
        self.network = self.network_from(
            4, [(0, 1, 10.0), (1, 2, 30.0), (2, 3, 60.0), (3, 0, 100.0)]
        )
        # breakeven prices 45, 100 and 10; firm 3 emits nothing
        self.book = self.healthy_book(
            self.network, net_profit=[90.0, 500.0, 10.0, 50.0]
        )
        self.emissions = EmissionVector.explicit(np.array([2.0, 5.0, 1.0, 0.0]))

    def test_breakeven_price_is_the_threshold(self):
        points = self.service.price_sweep(
            self.network, self.book, self.emissions, [9.0, 10.0, 44.0, 45.0, 100.0]
        )
        defaults = [np.flatnonzero(p.defaults).tolist() for p in points]
        self.assertEqual(defaults, [[], [2], [2], [0, 2], [0, 1, 2]])

    def test_defaults_grow_with_price(self):
        points = self.service.price_sweep(
            self.network, self.book, self.emissions, np.arange(0.0, 200.0, 5.0)
        )
        for low, high in zip(points, points[1:]):
            self.assertTrue(np.all(low.defaults <= high.defaults))
            self.assertLessEqual(low.output_loss, high.output_loss)

    def test_output_loss_is_sales_share(self):
        points = self.service.price_sweep(
            self.network, self.book, self.emissions, [45.0]
        )
        self.assertAlmostEqual(points[0].output_loss, 70.0 / 200.0)
        self.assertEqual(points[0].default_count, 2)

    def test_zero_price_has_no_defaults(self):
        points = self.service.price_sweep(
            self.network, self.book, self.emissions, [0.0]
        )
        self.assertEqual(points[0].default_count, 0)
        self.assertEqual(points[0].output_loss, 0.0)

    def test_ineligible_firms_never_default(self):
        book = self.healthy_book(self.network, net_profit=[-1.0, 500.0, 10.0, 50.0])
        points = self.service.price_sweep(self.network, book, self.emissions, [1000.0])
        self.assertFalse(points[0].defaults[0])

    def test_pass_through_spreads_defaults(self):
        sectors = np.array(["C10.1.1", "C10.1.1", "C10.1.2", "C10.1.2"], dtype=object)
        points = self.service.price_sweep(
            self.network,
            self.book,
            self.emissions,
            [45.0],
            pass_through=True,
            sectors=sectors,
        )
        self.assertEqual(len(points), 1)
        self.assertLessEqual(points[0].output_loss, 1.0)

    def test_unsorted_grid(self):
        with self.assertRaises(ConfigurationError):
            self.service.price_sweep(
                self.network, self.book, self.emissions, [20.0, 10.0]
            )

    def test_pass_through_needs_sectors(self):
        with self.assertRaises(ConfigurationError):
            self.service.price_sweep(
                self.network, self.book, self.emissions, [10.0], pass_through=True
            )
