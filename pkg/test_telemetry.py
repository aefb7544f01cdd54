"""Tests for trial telemetry and logging."""

import logging

import pytest

from trial_telemetry import TrialRecord, TrialTelemetry, configure_logging


class TestTrialRecord:
    """Test TrialRecord dataclass."""

    def test_record_creation(self):
        """Test creating a TrialRecord."""
        record = TrialRecord(
            timestamp="2026-01-01T10:00:00",
            experiment="ppp-cost",
            n=100,
            trial=3,
            route="-",
            counters={"comparisons": 2},
            wall_time_ms=0.5,
        )
        assert record.experiment == "ppp-cost"
        assert record.success is True
        assert record.error_message is None

    def test_to_dict(self):
        """Test dictionary serialization."""
        record = TrialRecord("2026-01-01T10:00:00", "mpd-cost", 50, 0, "fast", {"letters_read": 7})
        data = record.to_dict()
        assert data["route"] == "fast"
        assert data["counters"] == {"letters_read": 7}


class TestTrialTelemetry:
    """Test the trial collector."""

    @pytest.fixture
    def telemetry(self):
        """Collector with three trials."""
        telemetry = TrialTelemetry()
        telemetry.log_trial("mpd-cost", 50, 0, "fast", {"letters_read": 8}, wall_time_ms=1.0)
        telemetry.log_trial("mpd-cost", 50, 1, "fallback", {"letters_read": 40}, wall_time_ms=3.0)
        telemetry.log_trial("mpd-cost", 100, 0, "fast", {"letters_read": 9}, wall_time_ms=2.0)
        return telemetry

    def test_route_counts(self, telemetry):
        """Test counting per route."""
        assert telemetry.get_route_counts() == {"fast": 2, "fallback": 1}

    def test_average_wall_time(self, telemetry):
        """Test average wall time per size."""
        assert telemetry.get_average_wall_time() == {50: 2.0, 100: 2.0}

    def test_success_rate(self, telemetry):
        """Test success rate with a failure."""
        telemetry.log_trial("mpd-cost", 100, 1, "error", success=False, error_message="boom")
        assert telemetry.get_success_rate() == pytest.approx(0.75)

    def test_empty_success_rate(self):
        """Test success rate with no trials."""
        assert TrialTelemetry().get_success_rate() == 1.0
        assert len(TrialTelemetry().records) == 0

    def test_summary(self, telemetry):
        """Test summary keys."""
        summary = telemetry.get_summary()
        assert summary["total_trials"] == 3
        assert summary["route_counts"]["fast"] == 2
        assert summary["session_duration_seconds"] >= 0

    def test_history_limit(self):
        """Test max history is enforced."""
        telemetry = TrialTelemetry(max_history=2)
        for trial in range(5):
            telemetry.log_trial("ppp-cost", 10, trial, "-")
        assert [record.trial for record in telemetry.records] == [3, 4]

    def test_dataframe_flattens_counters(self, telemetry):
        """Test counters become columns."""
        frame = telemetry.to_dataframe()
        assert len(frame) == 3
        assert frame["letters_read"].tolist() == [8, 40, 9]
        assert "counters" not in frame.columns

    def test_failure_logged_at_error(self, caplog):
        """Test failed trials are logged at ERROR."""
        telemetry = TrialTelemetry()
        with caplog.at_level(logging.ERROR, logger="freegroup.telemetry"):
            telemetry.log_trial("ctp-failure", 10, 0, "error", success=False, error_message="bad depth")
        assert "bad depth" in caplog.text

    def test_success_not_logged_above_debug(self, caplog):
        """Test successful trials stay silent at INFO."""
        telemetry = TrialTelemetry()
        with caplog.at_level(logging.INFO, logger="freegroup.telemetry"):
            telemetry.log_trial("ppp-cost", 10, 0, "-")
        assert caplog.text == ""


class TestConfigureLogging:
    """Test logging configuration."""

    def test_unknown_level(self):
        """Test invalid level names."""
        with pytest.raises(ValueError, match="Unknown log level"):
            configure_logging("LOUD")

    def test_known_level(self):
        """Test valid level names."""
        configure_logging("info")


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
