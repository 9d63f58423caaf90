"""Patience-trigger and running-mean tests, including the hand-traced
trigger scenarios and the incremental-vs-batch exactness check."""
import numpy as np
import pytest

from poula.averaging import PatienceAverager
from poula.rng import make_rng


class TestTrigger:
    def test_never_fires_when_always_improving(self):
        avg = PatienceAverager(patience=5)
        for epoch in range(20):
            avg.observe_metric(epoch, 100.0 - epoch)
        assert avg.trigger_epoch is None

    def test_fires_after_patience_constant_metric(self):
        # improves through epoch 10, constant afterwards: epochs 11..15 count
        # 1..5, so the trigger lands on epoch 16 ("after epoch 15")
        avg = PatienceAverager(patience=5)
        for epoch in range(11):
            avg.observe_metric(epoch, 100.0 - epoch)
        for epoch in range(11, 30):
            avg.observe_metric(epoch, 90.0)
        assert avg.trigger_epoch == 16

    def test_patience_one_immediate_worsening(self):
        avg = PatienceAverager(patience=1)
        avg.observe_metric(0, 1.0)
        avg.observe_metric(1, 2.0)
        assert avg.trigger_epoch == 2

    def test_trigger_idempotent(self):
        avg = PatienceAverager(patience=2)
        avg.observe_metric(0, 1.0)
        for epoch in range(1, 15):
            avg.observe_metric(epoch, 5.0)
        assert avg.trigger_epoch == 3
        for epoch in range(15, 30):
            avg.observe_metric(epoch, 0.0001 * epoch)
        assert avg.trigger_epoch == 3

    def test_min_delta(self):
        # improvements smaller than min_delta do not reset the counter
        avg = PatienceAverager(patience=2, min_delta=0.5)
        avg.observe_metric(0, 10.0)
        avg.observe_metric(1, 9.9)
        avg.observe_metric(2, 9.8)
        assert avg.trigger_epoch == 3

    def test_maximize_mode(self):
        avg = PatienceAverager(patience=2, minimize=False)
        avg.observe_metric(0, 1.0)
        avg.observe_metric(1, 2.0)
        avg.observe_metric(2, 1.5)
        avg.observe_metric(3, 1.4)
        assert avg.trigger_epoch == 4

    def test_out_of_order_epochs_rejected(self):
        avg = PatienceAverager()
        avg.observe_metric(3, 1.0)
        with pytest.raises(ValueError):
            avg.observe_metric(3, 1.0)
        with pytest.raises(ValueError):
            avg.observe_metric(2, 1.0)

    def test_counter_never_exceeds_patience_before_trigger(self):
        avg = PatienceAverager(patience=4)
        avg.observe_metric(0, 1.0)
        for epoch in range(1, 10):
            assert avg.epochs_since_best <= avg.patience or avg.triggered
            avg.observe_metric(epoch, 2.0)

    def test_invalid_construction(self):
        with pytest.raises(ValueError):
            PatienceAverager(patience=0)
        with pytest.raises(ValueError):
            PatienceAverager(min_delta=-1.0)


def _triggered(patience=1) -> PatienceAverager:
    avg = PatienceAverager(patience=patience)
    avg.observe_metric(0, 1.0)
    avg.observe_metric(1, 2.0)
    assert avg.triggered
    return avg


class TestAccumulate:
    def test_simple_mean(self):
        avg = _triggered()
        for v in (1.0, 2.0, 3.0):
            avg.accumulate(np.array([v]))
        assert avg.running_mean[0] == pytest.approx(2.0, rel=1e-15)

    def test_single_iterate(self):
        avg = _triggered()
        avg.accumulate(np.array([7.5, -1.0]))
        np.testing.assert_array_equal(avg.current_estimate(np.zeros(2)), [7.5, -1.0])

    def test_constant_vector_stays_exact(self):
        avg = _triggered()
        c = np.array([0.1, -2.7, 3.14])
        for _ in range(10_000):
            avg.accumulate(c)
        np.testing.assert_allclose(avg.running_mean, c, rtol=1e-14)

    def test_incremental_matches_batch_recomputation(self):
        rng = make_rng(12)
        avg = _triggered()
        thetas = rng.standard_normal((100_000, 2))
        for row in thetas:
            avg.accumulate(row)
        batch = thetas.mean(axis=0)
        np.testing.assert_allclose(avg.running_mean, batch, rtol=1e-12)

    def test_premature_accumulate_warns_and_ignores(self):
        avg = PatienceAverager()
        with pytest.warns(UserWarning):
            avg.accumulate(np.ones(2))
        assert avg.count == 0
        assert avg.premature_accumulate


class TestCurrentEstimate:
    def test_pre_trigger_returns_last(self):
        avg = PatienceAverager()
        last = np.array([4.0])
        assert avg.current_estimate(last)[0] == 4.0

    def test_post_trigger_mean(self):
        avg = _triggered()
        avg.accumulate(np.array([0.0]))
        avg.accumulate(np.array([2.0]))
        assert avg.current_estimate(np.array([100.0]))[0] == pytest.approx(1.0, rel=1e-15)

    def test_alternating_chain_averages_to_zero(self):
        avg = _triggered()
        for k in range(2000):
            avg.accumulate(np.array([1.0 if k % 2 == 0 else -1.0]))
        assert abs(avg.current_estimate(np.array([5.0]))[0]) < 1e-15
