"""Telemetry for benchmark trials.

Records one entry per trial (experiment, size, route taken, counters, wall
time) so runs can be audited and debugged. Wall times live here only; the
CSV results never contain them.
"""

import logging
from collections import deque
from dataclasses import asdict, dataclass, field
from datetime import datetime
from typing import Any, Deque, Dict, List, Optional

import pandas as pd

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

logger = logging.getLogger("freegroup.telemetry")


def configure_logging(level: str = "WARNING") -> None:
    """Configure the root logger once for the CLI."""
    numeric = getattr(logging, level.upper(), None)
    if not isinstance(numeric, int):
        raise ValueError(f"Unknown log level '{level}'")
    logging.basicConfig(level=numeric, format=LOG_FORMAT)


@dataclass
class TrialRecord:
    """Record of a single trial."""
    timestamp: str
    experiment: str
    n: int
    trial: int
    route: str
    counters: Dict[str, Any] = field(default_factory=dict)
    wall_time_ms: float = 0.0
    success: bool = True
    error_message: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for serialization."""
        return asdict(self)


class TrialTelemetry:
    """Collector for trial records of one benchmark run."""

    def __init__(self, max_history: int = 100_000):
        """Initialize the collector.

        Args:
            max_history: Maximum number of trial records kept in memory
        """
        self.max_history = max_history
        self.records: Deque[TrialRecord] = deque(maxlen=max_history)
        self.session_start_time = datetime.now()

    def log_trial(
        self,
        experiment: str,
        n: int,
        trial: int,
        route: str,
        counters: Optional[Dict[str, Any]] = None,
        wall_time_ms: float = 0.0,
        success: bool = True,
        error_message: Optional[str] = None,
    ) -> TrialRecord:
        """Record a trial and return its record.

        Failed trials are logged at ERROR and kept.
        """
        record = TrialRecord(
            timestamp=datetime.now().isoformat(),
            experiment=experiment,
            n=n,
            trial=trial,
            route=route,
            counters=dict(counters or {}),
            wall_time_ms=wall_time_ms,
            success=success,
            error_message=error_message,
        )
        self.records.append(record)

        if success:
            logger.debug("%s n=%d trial=%d route=%s | %.3fms", experiment, n, trial, route, wall_time_ms)
        else:
            logger.error(
                "%s n=%d trial=%d route=%s | %.3fms | Error: %s",
                experiment, n, trial, route, wall_time_ms, error_message,
            )
        return record

    def get_route_counts(self) -> Dict[str, int]:
        """Number of trials per route."""
        counts: Dict[str, int] = {}
        for record in self.records:
            counts[record.route] = counts.get(record.route, 0) + 1
        return counts

    def get_success_rate(self) -> float:
        """Fraction of trials that finished without error (1.0 when empty)."""
        if not self.records:
            return 1.0
        return sum(record.success for record in self.records) / len(self.records)

    def get_average_wall_time(self) -> Dict[int, float]:
        """Average wall time in ms per instance size n."""
        times: Dict[int, List[float]] = {}
        for record in self.records:
            times.setdefault(record.n, []).append(record.wall_time_ms)
        return {n: sum(values) / len(values) for n, values in times.items()}

    def get_summary(self) -> Dict[str, Any]:
        """Aggregated view of the run."""
        return {
            "session_duration_seconds": (
                datetime.now() - self.session_start_time
            ).total_seconds(),
            "total_trials": len(self.records),
            "route_counts": self.get_route_counts(),
            "success_rate": self.get_success_rate(),
            "average_wall_time_ms": self.get_average_wall_time(),
        }

    def to_dataframe(self) -> pd.DataFrame:
        """One row per trial with the counters flattened into columns."""
        rows = []
        for record in self.records:
            row = {key: value for key, value in record.to_dict().items() if key != "counters"}
            row.update(record.counters)
            rows.append(row)
        return pd.DataFrame(rows)
