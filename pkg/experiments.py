"""Monte Carlo experiments behind the average-case claims.

Every experiment draws ``samples`` independent trials per instance size,
each with its own random source seeded by (seed, size index, trial), and
aggregates the per-trial counters into one CSV row per size. The CSV is a
function of the configuration alone.
"""

import io
import logging
import math
import re
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from ctp import DepthPolicy, check_ctp, ctp_failure_probability_bound, eval_depth, membership_mpd
from free_words import (
    Alphabet,
    Word,
    cyclic_core,
    probe_proper_prefix,
    sample_length_at_most,
    sample_uniform_reduced,
    sample_uniform_reduced_batch,
)
from growth import alpha_bound
from primitivity import (
    OBSTRUCTION,
    SHORT_CORE,
    WHITEHEAD_FALLBACK,
    connected_without_cutvertex,
    is_primitive_shpilrain,
    shpilrain_threshold,
    whitehead_graph,
)
from stallings import mp_worst_case_bound
from trial_aggregator import TrialAggregator
from trial_telemetry import TrialTelemetry

logger = logging.getLogger("freegroup.experiments")

# Constants
UNIFORM_LENGTH = "uniform-length"
UNIFORM_BALL = "uniform-ball"
LENGTH_DISTRIBUTIONS = (UNIFORM_LENGTH, UNIFORM_BALL)
DEFAULT_SAMPLES = 10_000
DEFAULT_SEED = 0
DEFAULT_RANK = 2
DEFAULT_ELLS = (1, 2, 3, 4, 5)
DEFAULT_W0_LENGTHS = (1_000, 10_000)
DEFAULT_LENGTHS: Dict[str, Tuple[int, ...]] = {
    "ctp-failure": (50, 100, 200),
    "short-generators": (10, 20, 40),
    "ppp-cost": (100, 1_000, 10_000),
    "core-tail": (100,),
    "cutvertex-decay": (10, 20, 30, 40),
    "mpd-cost": (50, 100),
    "shpilrain-cost": (1_000, 10_000, 100_000),
}
PREFIX_CHUNK = 32
FLOAT_FORMAT = "%.6f"
K_PATTERN = re.compile(r"^(?:(?P<const>\d+)|pow:(?P<theta>[0-9]*\.?[0-9]+))$")


@dataclass(frozen=True)
class TupleSizePolicy:
    """k as a constant or as k(n) = ceil(n^theta)."""
    constant: Optional[int] = 2
    theta: Optional[float] = None

    def __post_init__(self):
        if (self.constant is None) == (self.theta is None):
            raise ValueError("Give either a constant k or an exponent theta")
        if self.constant is not None and self.constant < 1:
            raise ValueError(f"k must be positive, got {self.constant}")
        if self.theta is not None and not 0 < self.theta < 1:
            raise ValueError(f"theta must lie in (0, 1), got {self.theta}")

    @classmethod
    def parse(cls, text: str) -> "TupleSizePolicy":
        """'3' or 'pow:0.5'."""
        match = K_PATTERN.match(str(text).strip())
        if not match:
            raise ValueError(f"Cannot parse k policy '{text}'. Use an integer or pow:θ")
        if match.group("const") is not None:
            return cls(constant=int(match.group("const")))
        return cls(constant=None, theta=float(match.group("theta")))

    def evaluate(self, n: int) -> int:
        if self.constant is not None:
            return self.constant
        return max(1, math.ceil(n ** self.theta))

    def __str__(self) -> str:
        return str(self.constant) if self.constant is not None else f"pow:{self.theta:g}"


@dataclass(frozen=True)
class ExperimentConfig:
    """Immutable description of one benchmark run."""
    experiment: str
    rank: int = DEFAULT_RANK
    lengths: Tuple[int, ...] = ()
    k: TupleSizePolicy = field(default_factory=TupleSizePolicy)
    depth_policy: DepthPolicy = field(default_factory=DepthPolicy)
    samples: int = DEFAULT_SAMPLES
    seed: int = DEFAULT_SEED
    length_distribution: str = UNIFORM_LENGTH
    w0_lengths: Tuple[int, ...] = DEFAULT_W0_LENGTHS
    ells: Tuple[int, ...] = DEFAULT_ELLS
    out: Optional[Path] = None

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError(
                f"Unknown experiment '{self.experiment}'. Choose one of: {', '.join(EXPERIMENTS)}"
            )
        Alphabet(self.rank)
        if self.samples < 1:
            raise ValueError(f"Sample count must be at least 1, got {self.samples}")
        if self.length_distribution not in LENGTH_DISTRIBUTIONS:
            raise ValueError(
                f"Unknown length distribution '{self.length_distribution}'. "
                f"Choose one of: {', '.join(LENGTH_DISTRIBUTIONS)}"
            )
        lengths = tuple(self.lengths) or DEFAULT_LENGTHS[self.experiment]
        object.__setattr__(self, "lengths", lengths)
        object.__setattr__(self, "w0_lengths", tuple(self.w0_lengths))
        object.__setattr__(self, "ells", tuple(self.ells))
        minimum = 2 if self.experiment in NEEDS_TWO else 1
        if any(n < minimum for n in lengths):
            raise ValueError(f"Experiment '{self.experiment}' needs lengths >= {minimum}")
        if any(m < 0 for m in self.w0_lengths):
            raise ValueError("w0 lengths must be nonnegative")
        if any(ell < 1 for ell in self.ells):
            raise ValueError("Tail offsets must be positive")
        if self.experiment in NEEDS_RANK_TWO and self.rank < 2:
            raise ValueError(f"Experiment '{self.experiment}' needs rank r >= 2")

    def describe(self) -> str:
        """Single-line key=value rendering for the CSV header."""
        parts = [
            f"rank={self.rank}",
            f"lengths={','.join(map(str, self.lengths))}",
            f"samples={self.samples}",
            f"length_distribution={self.length_distribution}",
        ]
        if self.experiment in ("ctp-failure", "short-generators", "mpd-cost"):
            parts.append(f"k={self.k}")
        if self.experiment in ("ctp-failure", "mpd-cost"):
            parts.append(f"depth_policy={self.depth_policy}")
        if self.experiment == "mpd-cost":
            parts.append(f"w0_lengths={','.join(map(str, self.w0_lengths))}")
        if self.experiment == "core-tail":
            parts.append(f"ells={','.join(map(str, self.ells))}")
        return "; ".join(parts)


def trial_rng(seed: int, size_index: int, trial: int) -> np.random.Generator:
    """Independent random source of one trial."""
    return np.random.default_rng([seed, size_index, trial])


def sample_generator(config: ExperimentConfig, n: int, rng: np.random.Generator) -> Word:
    """One nonempty generator of length at most n under the configured distribution."""
    alphabet = Alphabet(config.rank)
    if config.length_distribution == UNIFORM_BALL:
        return sample_length_at_most(alphabet, n, rng, minimum=1)
    return sample_uniform_reduced(alphabet, int(rng.integers(1, n + 1)), rng)


def sample_tuple(config: ExperimentConfig, n: int, k: int, rng: np.random.Generator) -> Tuple[Word, ...]:
    return tuple(sample_generator(config, n, rng) for _ in range(k))


def _run_trials(
    config: ExperimentConfig,
    telemetry: TrialTelemetry,
    size_index: int,
    n: int,
    trial_fn: Callable[[np.random.Generator], dict],
) -> List[dict]:
    rows = []
    for trial in range(config.samples):
        rng = trial_rng(config.seed, size_index, trial)
        start = time.perf_counter()
        try:
            row = trial_fn(rng)
        except (ValueError, OverflowError) as e:
            telemetry.log_trial(
                config.experiment, n, trial, "error",
                wall_time_ms=(time.perf_counter() - start) * 1000,
                success=False, error_message=str(e),
            )
            raise
        telemetry.log_trial(
            config.experiment, n, trial, str(row.get("route", "-")),
            counters=row, wall_time_ms=(time.perf_counter() - start) * 1000,
        )
        row["n"] = n
        rows.append(row)
    return rows


def _ctp_failure(config: ExperimentConfig, telemetry: TrialTelemetry) -> pd.DataFrame:
    r = config.rank
    results = []
    for size_index, n in enumerate(config.lengths):
        k = config.k.evaluate(n)
        depth = eval_depth(config.depth_policy, n, k, r)
        depth_half = eval_depth(config.depth_policy, max(2, n // 2), k, r)

        def trial(rng, n=n, k=k, depth=depth):
            failed = check_ctp(sample_tuple(config, n, k, rng), depth) is None
            return {"failed": failed, "route": "fail" if failed else "ctp"}

        rows = pd.DataFrame(_run_trials(config, telemetry, size_index, n, trial))
        rate = TrialAggregator.rate_by(rows, "n", "failed").iloc[0]
        results.append({
            "n": n, "k": k, "depth": depth, "samples": int(rate["samples"]),
            "failure_rate": rate["rate"], "stderr": rate["stderr"],
            "bound": ctp_failure_probability_bound(k, r, depth_half),
        })
    return pd.DataFrame(results)


def _short_generators(config: ExperimentConfig, telemetry: TrialTelemetry) -> pd.DataFrame:
    r = config.rank
    results = []
    for size_index, n in enumerate(config.lengths):
        k = config.k.evaluate(n)

        def trial(rng, n=n, k=k):
            shortest = min(w.length for w in sample_tuple(config, n, k, rng))
            return {"short": 2 * shortest <= n, "shortest": shortest}

        rows = pd.DataFrame(_run_trials(config, telemetry, size_index, n, trial))
        rate = TrialAggregator.rate_by(rows, "n", "short").iloc[0]
        results.append({
            "n": n, "k": k, "samples": int(rate["samples"]),
            "rate": rate["rate"], "stderr": rate["stderr"],
            "bound": k * float(2 * r - 1) ** (-n / 2),
        })
    return pd.DataFrame(results)


def _prefix_comparisons(alphabet: Alphabet, n: int, rng: np.random.Generator) -> int:
    """Letter comparisons of the proper-prefix test on two uniform words of length n.

    Letters are drawn in chunks as the scan needs them; a chunk continuing a
    word is sampled after its last letter, so the words stay uniform.
    """
    comparisons = 0
    u_last = v_last = None
    remaining = n
    while remaining:
        size = min(PREFIX_CHUNK, remaining)
        u = sample_uniform_reduced_batch(alphabet, size, 1, rng, after=u_last)[0].tolist()
        v = sample_uniform_reduced_batch(alphabet, size, 1, rng, after=v_last)[0].tolist()
        probe = probe_proper_prefix(u, v)
        comparisons += probe.comparisons
        if probe.comparisons < size or u[-1] != v[-1]:
            return comparisons
        u_last, v_last = u[-1], v[-1]
        remaining -= size
    return comparisons


def _ppp_cost(config: ExperimentConfig, telemetry: TrialTelemetry) -> pd.DataFrame:
    alphabet = Alphabet(config.rank)
    base = 2 * config.rank - 1
    frames = []
    for size_index, n in enumerate(config.lengths):
        def trial(rng, n=n):
            return {"comparisons": _prefix_comparisons(alphabet, n, rng)}

        frames.extend(_run_trials(config, telemetry, size_index, n, trial))
    summary = TrialAggregator.summarize(pd.DataFrame(frames), "n", "comparisons")
    summary["bound"] = base / (base - 1) if base > 1 else math.nan
    return summary[["n", "samples", "mean", "median", "p99", "bound"]]


def _core_tail(config: ExperimentConfig, telemetry: TrialTelemetry) -> pd.DataFrame:
    alphabet = Alphabet(config.rank)
    base = 2 * config.rank - 1
    results = []
    for size_index, n in enumerate(config.lengths):
        def trial(rng, n=n):
            peeled = cyclic_core(sample_uniform_reduced(alphabet, n, rng)).peel_steps
            return {"core_length": n - 2 * peeled}

        rows = pd.DataFrame(_run_trials(config, telemetry, size_index, n, trial))
        for ell in config.ells:
            rows["tail"] = rows["core_length"] <= n - 2 * ell
            rate = TrialAggregator.rate_by(rows, "n", "tail").iloc[0]
            results.append({
                "n": n, "ell": ell, "samples": int(rate["samples"]),
                "rate": rate["rate"], "stderr": rate["stderr"],
                "bound": 1.5 * float(base) ** (-ell),
            })
    return pd.DataFrame(results)


def _cutvertex_decay(config: ExperimentConfig, telemetry: TrialTelemetry) -> pd.DataFrame:
    r = config.rank
    alphabet = Alphabet(r)
    results = []
    for size_index, n in enumerate(config.lengths):
        def trial(rng, n=n):
            graph = whitehead_graph(sample_uniform_reduced(alphabet, n, rng), cyclic=False)
            return {"fails": not connected_without_cutvertex(graph)}

        rows = pd.DataFrame(_run_trials(config, telemetry, size_index, n, trial))
        rate = TrialAggregator.rate_by(rows, "n", "fails").iloc[0]
        results.append({
            "n": n, "samples": int(rate["samples"]),
            "rate": rate["rate"], "stderr": rate["stderr"],
            "simple_bound": (1 - 0.5 / r ** 2) ** n,
            "spectral_bound": alpha_bound(r) ** n,
        })
    table = pd.DataFrame(results)
    ratio, _ = TrialAggregator.fit_log_linear(table["n"], table["rate"])
    table["fitted_ratio"] = ratio
    return table


def _mpd_cost(config: ExperimentConfig, telemetry: TrialTelemetry) -> pd.DataFrame:
    r = config.rank
    alphabet = Alphabet(r)
    results = []
    grid = [(n, m) for n in config.lengths for m in config.w0_lengths]
    for size_index, (n, m) in enumerate(grid):
        k = config.k.evaluate(n)
        depth = eval_depth(config.depth_policy, n, k, r)

        def trial(rng, n=n, m=m, k=k):
            generators = sample_tuple(config, n, k, rng)
            report = membership_mpd(sample_uniform_reduced(alphabet, m, rng), generators, config.depth_policy)
            return {
                "route": report.path,
                "fast": report.path == "fast",
                "member": report.member,
                "letters_read": report.letters_read,
            }

        rows = pd.DataFrame(_run_trials(config, telemetry, size_index, n, trial))
        fast = rows[rows["fast"]]
        if fast.empty:
            mean = median = p99 = math.nan
        else:
            stats = TrialAggregator.summarize(fast, "n", "letters_read").iloc[0]
            mean, median, p99 = stats["mean"], stats["median"], stats["p99"]
        results.append({
            "n": n, "m": m, "k": k, "depth": depth, "samples": len(rows),
            "fast_fraction": float(rows["fast"].mean()),
            "member_fraction": float(rows["member"].mean()),
            "mean_letters_fast": mean, "median_letters_fast": median, "p99_letters_fast": p99,
            "kd_reference": k * depth,
            "mp_reference": mp_worst_case_bound(k, n, m, r),
        })
    return pd.DataFrame(results)


def _shpilrain_cost(config: ExperimentConfig, telemetry: TrialTelemetry) -> pd.DataFrame:
    alphabet = Alphabet(config.rank)
    r = config.rank
    trials = []
    for size_index, n in enumerate(config.lengths):
        def trial(rng, n=n):
            report = is_primitive_shpilrain(sample_uniform_reduced(alphabet, n, rng))
            return {
                "route": report.route,
                "edges_added": report.edges_added,
                "cutvertex_checks": report.cutvertex_checks,
                "primitive": report.verdict,
            }

        trials.extend(_run_trials(config, telemetry, size_index, n, trial))
    rows = pd.DataFrame(trials)
    table = TrialAggregator.summarize(rows, "n", "edges_added").rename(columns={
        "mean": "mean_edges", "median": "median_edges", "p99": "p99_edges",
    })
    table["mean_checks"] = TrialAggregator.summarize(rows, "n", "cutvertex_checks")["mean"].to_numpy()
    table["primitive_fraction"] = TrialAggregator.rate_by(rows, "n", "primitive")["rate"].to_numpy()
    routes = TrialAggregator.route_fractions(rows, "n", "route")
    for route in (SHORT_CORE, OBSTRUCTION, WHITEHEAD_FALLBACK):
        column = f"frac_{route}"
        table[column] = routes[column].to_numpy() if column in routes else 0.0
    # cores at or below g(n) take the short-core route
    table["threshold"] = [shpilrain_threshold(int(n), r) if r >= 2 else math.nan for n in table["n"]]
    return table


EXPERIMENTS: Dict[str, Callable[[ExperimentConfig, TrialTelemetry], pd.DataFrame]] = {
    "ctp-failure": _ctp_failure,
    "short-generators": _short_generators,
    "ppp-cost": _ppp_cost,
    "core-tail": _core_tail,
    "cutvertex-decay": _cutvertex_decay,
    "mpd-cost": _mpd_cost,
    "shpilrain-cost": _shpilrain_cost,
}
NEEDS_TWO = ("ctp-failure", "cutvertex-decay", "mpd-cost")
NEEDS_RANK_TWO = ("ctp-failure", "cutvertex-decay")


def to_csv(config: ExperimentConfig, table: pd.DataFrame) -> str:
    """Metadata comment lines, header and rows; LF line endings, six decimals."""
    buffer = io.StringIO()
    buffer.write(f"# experiment={config.experiment}\n")
    buffer.write(f"# seed={config.seed}\n")
    buffer.write(f"# config={config.describe()}\n")
    table.to_csv(buffer, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return buffer.getvalue()


def run_experiment(config: ExperimentConfig, telemetry: Optional[TrialTelemetry] = None) -> str:
    """Run the configured experiment and return its CSV; also written to ``config.out`` if set."""
    telemetry = telemetry if telemetry is not None else TrialTelemetry()
    logger.info(
        "Starting %s: seed=%d samples=%d lengths=%s",
        config.experiment, config.seed, config.samples, config.lengths,
    )
    table = EXPERIMENTS[config.experiment](config, telemetry)
    csv_text = to_csv(config, table)
    if config.out is not None:
        path = Path(config.out)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as handle:
            handle.write(csv_text)
        logger.info("Wrote %s", path)
    summary = telemetry.get_summary()
    logger.info(
        "Finished %s: %d trials, routes=%s, success_rate=%.3f",
        config.experiment, summary["total_trials"], summary["route_counts"], summary["success_rate"],
    )
    return csv_text
