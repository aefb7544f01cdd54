"""Aggregation of per-trial benchmark rows into per-size statistics."""

import math
from typing import Dict, Sequence, Tuple

import numpy as np
import pandas as pd

P99 = 0.99


class TrialAggregator:
    """Group-by statistics over trial DataFrames."""

    @staticmethod
    def _check_numeric(dataframe: pd.DataFrame, column: str) -> None:
        if column not in dataframe.columns:
            raise ValueError(f"Column '{column}' not found")
        if not pd.api.types.is_numeric_dtype(dataframe[column]):
            raise ValueError(f"Column '{column}' is not numeric")

    @staticmethod
    def _check_group(dataframe: pd.DataFrame, group_column: str) -> None:
        if group_column not in dataframe.columns:
            raise ValueError(f"Group column '{group_column}' not found")
        if dataframe.empty:
            raise ValueError("No rows to aggregate")

    @staticmethod
    def mean_by(dataframe: pd.DataFrame, group_column: str, value_column: str) -> Dict:
        """Mean of ``value_column`` per group.

        Returns:
            dict: {group_value: mean}

        Raises:
            ValueError: If a column is missing or not numeric
        """
        TrialAggregator._check_group(dataframe, group_column)
        TrialAggregator._check_numeric(dataframe, value_column)
        grouped = dataframe.groupby(group_column, sort=True)[value_column].mean()
        return {k: float(v) for k, v in grouped.items()}

    @staticmethod
    def summarize(dataframe: pd.DataFrame, group_column: str, value_column: str) -> pd.DataFrame:
        """Mean, median, 99th percentile and count of ``value_column`` per group.

        Returns:
            pd.DataFrame: Columns ``group_column``, mean, median, p99, samples
        """
        TrialAggregator._check_group(dataframe, group_column)
        TrialAggregator._check_numeric(dataframe, value_column)
        grouped = dataframe.groupby(group_column, sort=True)[value_column]
        summary = pd.DataFrame({
            "mean": grouped.mean(),
            "median": grouped.median(),
            "p99": grouped.quantile(P99),
            "samples": grouped.size(),
        })
        return summary.reset_index()

    @staticmethod
    def rate_by(dataframe: pd.DataFrame, group_column: str, flag_column: str) -> pd.DataFrame:
        """Empirical rate of a boolean column per group with its binomial standard error.

        Returns:
            pd.DataFrame: Columns ``group_column``, rate, stderr, samples
        """
        TrialAggregator._check_group(dataframe, group_column)
        if flag_column not in dataframe.columns:
            raise ValueError(f"Column '{flag_column}' not found")
        grouped = dataframe[flag_column].astype(float).groupby(dataframe[group_column], sort=True)
        rates = grouped.mean()
        samples = grouped.size()
        stderr = np.sqrt(rates * (1 - rates) / samples)
        return pd.DataFrame({"rate": rates, "stderr": stderr, "samples": samples}).reset_index()

    @staticmethod
    def route_fractions(dataframe: pd.DataFrame, group_column: str, route_column: str) -> pd.DataFrame:
        """Fraction of trials per route in each group, one column per route."""
        TrialAggregator._check_group(dataframe, group_column)
        if route_column not in dataframe.columns:
            raise ValueError(f"Column '{route_column}' not found")
        table = pd.crosstab(dataframe[group_column], dataframe[route_column], normalize="index")
        table.columns = [f"frac_{name}" for name in table.columns]
        return table.reset_index()

    @staticmethod
    def fit_log_linear(xs: Sequence[float], ys: Sequence[float]) -> Tuple[float, float]:
        """Least-squares fit of log y = log C + x log q over the points with y > 0.

        Returns:
            Tuple of (q, C); (nan, nan) with fewer than two usable points
        """
        points = [(float(x), math.log(y)) for x, y in zip(xs, ys) if y > 0]
        if len(points) < 2:
            return math.nan, math.nan
        slope, intercept = np.polyfit([p[0] for p in points], [p[1] for p in points], 1)
        return float(math.exp(slope)), float(math.exp(intercept))
