"""Tests for trial aggregation."""
# pylint: disable=import-error

import math

import pandas as pd
import pytest

from trial_aggregator import TrialAggregator


@pytest.fixture
def trials_df():
    """Six trials over two instance sizes."""
    return pd.DataFrame({
        "n": [10, 10, 10, 20, 20, 20],
        "comparisons": [1, 2, 3, 1, 1, 4],
        "failed": [True, False, False, False, False, False],
        "route": ["fast", "fast", "fallback", "fast", "fast", "fast"],
        "label": ["x", "y", "z", "x", "y", "z"],
    })


class TestGroupStatistics:
    """Test per-size statistics."""

    def test_mean_by(self, trials_df):
        """Test groupby mean."""
        result = TrialAggregator.mean_by(trials_df, "n", "comparisons")
        assert result == {10: 2.0, 20: 2.0}

    def test_summarize(self, trials_df):
        """Test mean, median, p99 and sample count."""
        result = TrialAggregator.summarize(trials_df, "n", "comparisons")
        assert list(result.columns) == ["n", "mean", "median", "p99", "samples"]
        first = result.iloc[0]
        assert first["n"] == 10
        assert first["median"] == 2
        assert first["samples"] == 3
        assert result.iloc[1]["p99"] == pytest.approx(3.94)

    def test_rate_by(self, trials_df):
        """Test rate and binomial standard error."""
        result = TrialAggregator.rate_by(trials_df, "n", "failed")
        assert result.iloc[0]["rate"] == pytest.approx(1 / 3)
        assert result.iloc[0]["stderr"] == pytest.approx(math.sqrt((1 / 3) * (2 / 3) / 3))
        assert result.iloc[1]["rate"] == 0.0
        assert result.iloc[1]["stderr"] == 0.0

    def test_route_fractions(self, trials_df):
        """Test one fraction column per route."""
        result = TrialAggregator.route_fractions(trials_df, "n", "route")
        assert result.iloc[0]["frac_fast"] == pytest.approx(2 / 3)
        assert result.iloc[1]["frac_fallback"] == 0.0


class TestErrors:
    """Test error handling."""

    def test_missing_column(self, trials_df):
        """Test missing value column."""
        with pytest.raises(ValueError, match="Column 'missing' not found"):
            TrialAggregator.summarize(trials_df, "n", "missing")

    def test_non_numeric_column(self, trials_df):
        """Test non-numeric value column."""
        with pytest.raises(ValueError, match="is not numeric"):
            TrialAggregator.mean_by(trials_df, "n", "label")

    def test_missing_group(self, trials_df):
        """Test missing group column."""
        with pytest.raises(ValueError, match="Group column 'size' not found"):
            TrialAggregator.rate_by(trials_df, "size", "failed")

    def test_empty_frame(self):
        """Test empty DataFrame."""
        with pytest.raises(ValueError, match="No rows"):
            TrialAggregator.summarize(pd.DataFrame({"n": [], "x": []}), "n", "x")


class TestLogLinearFit:
    """Test the exponential decay fit."""

    def test_exact_geometric(self):
        """Test y = 2 * 0.5^x."""
        q, c = TrialAggregator.fit_log_linear([1, 2, 3, 4], [1.0, 0.5, 0.25, 0.125])
        assert q == pytest.approx(0.5)
        assert c == pytest.approx(2.0)

    def test_zero_rates_skipped(self):
        """Test that zero rates are ignored."""
        q, _ = TrialAggregator.fit_log_linear([1, 2, 3], [0.5, 0.25, 0.0])
        assert q == pytest.approx(0.5)

    def test_too_few_points(self):
        """Test nan with fewer than two positive points."""
        q, c = TrialAggregator.fit_log_linear([1, 2], [0.5, 0.0])
        assert math.isnan(q) and math.isnan(c)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
