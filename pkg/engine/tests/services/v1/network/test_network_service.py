"""
Tests for NetworkService: network construction, thresholding, criticality
lookup and summaries.
"""

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from engine.src.errors import ConfigurationError, InputDataError
from engine.src.models import BankRegister, CriticalityTable, SupplyNetwork
from engine.tests.services.v1.network.base import BaseNetworkServiceTest


class TestSupplyNetwork(BaseNetworkServiceTest):
    def test_duplicate_edges_are_summed(self):
        network = SupplyNetwork.from_edges(3, [0, 0, 1], [1, 1, 2], [2.0, 3.0, 4.0])
        self.assertEqual(network.edge_count, 2)
        self.assertArrayClose(network.s_out, [5.0, 4.0, 0.0])
        self.assertArrayClose(network.s_in, [0.0, 5.0, 4.0])

    def test_strengths_match_recomputation(self):
        rng = np.random.default_rng(3)
        network = self.network_from(12, self.random_edges(rng, 12, 0.3))
        s_out, s_in = network.recompute_strengths()
        self.assertArrayClose(network.s_out, s_out)
        self.assertArrayClose(network.s_in, s_in)
        self.assertAlmostEqual(network.s_out.sum(), network.s_in.sum(), places=9)

    def test_invalid_edges_are_rejected(self):
        with self.assertRaises(InputDataError):
            SupplyNetwork.from_edges(2, [0], [0], [1.0])
        with self.assertRaises(InputDataError):
            SupplyNetwork.from_edges(2, [0], [1], [0.0])
        with self.assertRaises(InputDataError):
            SupplyNetwork.from_edges(2, [0], [2], [1.0])
        with self.assertRaises(InputDataError):
            SupplyNetwork.from_edges(2, [0], [1], [np.inf])

    def test_empty_network(self):
        network = self.network_from(4, [])
        self.assertEqual(network.edge_count, 0)
        self.assertEqual(network.total_sales, 0.0)
        self.assertArrayClose(network.sales_shares(), np.zeros(4))


class TestThreshold(BaseNetworkServiceTest):
    def test_threshold_keeps_indices(self):
        network = self.network_from(4, [(0, 1, 1.0), (1, 2, 5.0), (2, 3, 10.0)])
        result = self.service.threshold_network(network, 5.0)
        self.assertEqual(result.network.n, 4)
        self.assertEqual(result.network.edge_count, 2)
        self.assertAlmostEqual(result.retained_value_fraction, 15.0 / 16.0)
        self.assertAlmostEqual(result.retained_edge_fraction, 2.0 / 3.0)
        self.assertEqual(result.network.s_out[0], 0.0)

    def test_zero_threshold_is_identity(self):
        network = self.toy_instance().network
        result = self.service.threshold_network(network, 0.0)
        self.assertArrayClose(result.network.value, network.value)
        self.assertEqual(result.retained_value_fraction, 1.0)

    @settings(max_examples=50, deadline=None)
    @given(
        st.integers(0, 2**32 - 1), st.floats(0.0, 30.0), st.floats(0.0, 30.0)
    )
    def test_larger_threshold_keeps_a_subset(self, seed, first, second):
        low, high = sorted((first, second))
        rng = np.random.default_rng(seed)
        network = self.network_from(12, self.random_edges(rng, 12, 0.4))
        kept_low, kept_high = (
            self.service.threshold_network(network, t).network for t in (low, high)
        )
        low_edges = set(zip(kept_low.supplier.tolist(), kept_low.buyer.tolist()))
        high_edges = set(zip(kept_high.supplier.tolist(), kept_high.buyer.tolist()))
        self.assertLessEqual(high_edges, low_edges)
        self.assertTrue(np.all(kept_high.s_out <= kept_low.s_out + 1e-12))

    def test_negative_threshold(self):
        with self.assertRaises(ConfigurationError):
            self.service.threshold_network(self.toy_instance().network, -1.0)


class TestCriticalityTable(BaseNetworkServiceTest):
    def test_section_level_entry_matches_every_class(self):
        table = CriticalityTable.from_pairs([("C25", "C23")])
        self.assertTrue(table.is_essential("C25.1.1", "C23.5.1"))
        self.assertFalse(table.is_essential("C23.5.1", "C25.1.1"))
        self.assertFalse(table.is_essential("F41.2.0", "C23.5.1"))

    def test_most_specific_entry_wins(self):
        table = CriticalityTable(
            entries={("C", "D"): True, ("C25.1.1", "D35"): False}
        )
        self.assertFalse(table.is_essential("C25.1.1", "D35.1.1"))
        self.assertTrue(table.is_essential("C25.1.2", "D35.1.1"))
        self.assertTrue(table.is_essential("C25.1.1", "D36.0.0"))

    def test_buyer_level_before_supplier_level(self):
        table = CriticalityTable(
            entries={("C25.1.1", "D"): False, ("C25", "D35.1.1"): True}
        )
        self.assertFalse(table.is_essential("C25.1.1", "D35.1.1"))

    def test_edge_mask(self):
        table = CriticalityTable.from_pairs([("C25", "C23")])
        mask = table.edge_mask(
            np.array(["C25.1.1", "C25.1.1", "F41.2.0"], dtype=object),
            np.array(["C23.5.1", "B08.1.2", "C23.5.1"], dtype=object),
        )
        self.assertEqual(mask.tolist(), [True, False, False])

    def test_empty_table(self):
        table = CriticalityTable()
        self.assertFalse(table.is_essential("A01.1.1", "A01.1.1"))
        self.assertEqual(len(table), 0)


class TestSummarize(BaseNetworkServiceTest):
    def test_toy_summary(self):
        toy = self.toy_instance()
        summary = self.service.summarize(
            toy.network, toy.book, toy.banks, toy.emissions, label="toy"
        )
        self.assertEqual(summary.firms, 5)
        self.assertEqual(summary.active_firms, 5)
        self.assertEqual(summary.links, 6)
        self.assertEqual(summary.total_sales, 42.0)
        self.assertEqual(summary.eligible_loan_volume, 5.0)
        self.assertEqual(summary.total_emissions, 11.0)

    def test_isolated_firms_are_inactive(self):
        network = self.network_from(3, [(0, 1, 2.0)])
        summary = self.service.summarize(
            network, self.healthy_book(network), BankRegister.empty(3)
        )
        self.assertEqual(summary.active_firms, 2)
        self.assertEqual(summary.eligible_loan_volume, 0.0)
        self.assertEqual(summary.total_emissions, 0.0)
