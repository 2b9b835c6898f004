"""
Monte-Carlo codeword-error-rate curves and diversity estimation.
"""

import dataclasses
import logging
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Mapping, Optional

import numpy as np
import pandas as pd
import yaml
from tqdm import tqdm

from .channel import apply_channel, sample_channel, svd_sorted, trial_rng
from .codebook import alphabet_size, sample_dither, sample_symbols, symbols_to_points
from .exceptions import DomainError, EnumerationBudgetError
from .lattice import DEFAULT_NODE_BUDGET
from .ml import ml_decode
from .precoders import DEFAULT_THETA_STEP, PrecoderKind, design_precoder
from .receiver import build_effective_channel, if_decode, solve_integer_forcing
from .utils.matrix_io import write_csv
from .utils.validators import (
    validate_positive_int,
    validate_qam_order,
    validate_snr_grid,
)


CURVE_COLUMNS = ["snr_db", "trials", "errors", "cer"]

# channel intervals scheduled per worker thread between stop-rule checks
_INTERVALS_PER_THREAD = 8


class ReceiverKind(str, Enum):
    IF = "if"
    ML = "ml"


@dataclass
class SimConfig:
    """One error-rate experiment."""

    n_complex: int = 2
    qam_order: int = 4
    snr_grid_db: List[float] = field(default_factory=lambda: [0.0, 10.0, 20.0])
    precoder_kind: PrecoderKind = PrecoderKind.TYPE2
    receiver_kind: ReceiverKind = ReceiverKind.IF
    min_errors: int = 100
    max_trials: int = 100_000
    codewords_per_channel: int = 1
    master_seed: int = 0
    threads: int = 1
    dither: bool = False
    type1_step: float = DEFAULT_THETA_STEP
    enumeration_budget: int = DEFAULT_NODE_BUDGET
    time_budget_s: Optional[float] = None
    label: str = ""

    def __post_init__(self):
        self.n_complex = validate_positive_int(self.n_complex, "n_complex")
        self.qam_order = validate_qam_order(self.qam_order)
        self.snr_grid_db = validate_snr_grid(self.snr_grid_db)
        self.min_errors = validate_positive_int(self.min_errors, "min_errors")
        self.max_trials = validate_positive_int(self.max_trials, "max_trials")
        self.codewords_per_channel = validate_positive_int(self.codewords_per_channel, "codewords_per_channel")
        self.master_seed = validate_positive_int(self.master_seed, "master_seed", minimum=0)
        self.threads = validate_positive_int(self.threads, "threads")
        self.enumeration_budget = validate_positive_int(self.enumeration_budget, "enumeration_budget")
        try:
            self.precoder_kind = PrecoderKind(self.precoder_kind)
            self.receiver_kind = ReceiverKind(self.receiver_kind)
        except ValueError as exc:
            raise DomainError(str(exc)) from exc
        self.dither = bool(self.dither)
        self.label = str(self.label or "")

        if not 0 < float(self.type1_step) <= math.pi / 4:
            raise DomainError(f"type1_step must lie in (0, pi/4], got {self.type1_step}")
        self.type1_step = float(self.type1_step)
        if self.time_budget_s is not None and not float(self.time_budget_s) > 0:
            raise DomainError(f"time_budget_s must be positive, got {self.time_budget_s}")

        kind, n = self.precoder_kind, self.n_complex
        if kind is PrecoderKind.ROTATION:
            raise DomainError("A fixed plain rotation is not an experiment precoder; use type1")
        if kind is PrecoderKind.TYPE1 and n not in (1, 2):
            raise DomainError(f"Type I search covers n_complex in (1, 2), got {n}")
        if kind is PrecoderKind.TYPE2 and 2 * n not in (2, 4, 8):
            raise DomainError(f"Type II rotations cover n_complex in (1, 2, 4), got {n}")
        if kind is PrecoderKind.XCODE and (n % 2 or self.qam_order > 64):
            raise DomainError(f"X-codes need even n_complex and QAM order <= 64, got n={n}, qam={self.qam_order}")
        if self.dither and self.receiver_kind is not ReceiverKind.IF:
            raise DomainError("Dithering is only supported with the IF receiver")

    @property
    def g(self) -> int:
        return alphabet_size(self.qam_order)

    @classmethod
    def from_dict(cls, mapping: Mapping[str, Any]) -> "SimConfig":
        """
        Build a config from a flat mapping whose keys are field names.

        Raises:
            DomainError: If the mapping contains unknown keys
        """
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(mapping) - known
        if unknown:
            raise DomainError(f"Unknown configuration keys: {sorted(unknown)}")
        return cls(**dict(mapping))

    def to_dict(self) -> Dict[str, Any]:
        data = dataclasses.asdict(self)
        data["precoder_kind"] = self.precoder_kind.value
        data["receiver_kind"] = self.receiver_kind.value
        return data


@dataclass(frozen=True)
class CurvePoint:
    snr_db: float
    trials: int
    errors: int
    complete: bool = True

    @property
    def cer(self) -> float:
        return self.errors / self.trials if self.trials else float("nan")


@dataclass
class ErrorCurve:
    """Codeword error rate per SNR point plus run metadata."""

    points: List[CurvePoint]
    metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def complete(self) -> bool:
        return all(p.complete for p in self.points)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [(p.snr_db, p.trials, p.errors, p.cer) for p in self.points],
            columns=CURVE_COLUMNS,
        )

    def save(self, csv_path: str) -> str:
        """Write the CSV and a ``.meta.yaml`` sidecar; returns the CSV path."""
        write_csv(self.to_frame(), csv_path)
        meta = dict(self.metadata)
        meta["complete"] = [p.complete for p in self.points]
        with open(f"{csv_path}.meta.yaml", "w") as f:
            yaml.safe_dump(meta, f, sort_keys=False)
        return csv_path

    @classmethod
    def load(cls, csv_path: str) -> "ErrorCurve":
        df = pd.read_csv(csv_path)
        missing = set(CURVE_COLUMNS) - set(df.columns)
        if missing:
            raise DomainError(f"Missing required columns in curve CSV: {sorted(missing)}")

        metadata: Dict[str, Any] = {}
        meta_path = f"{csv_path}.meta.yaml"
        if os.path.exists(meta_path):
            with open(meta_path) as f:
                metadata = yaml.safe_load(f) or {}
        flags = metadata.pop("complete", [True] * len(df))

        points = [
            CurvePoint(float(row.snr_db), int(row.trials), int(row.errors), bool(flag))
            for row, flag in zip(df.itertuples(index=False), flags)
        ]
        return cls(points, metadata)


# ---------------------------------------------------------------------
# Monte-Carlo engine
# ---------------------------------------------------------------------

def _simulate_interval(config: SimConfig, rho: float, interval: int, n_codewords: int, fixed_precoder) -> int:
    """Codeword errors over one channel interval."""
    n, g = config.n_complex, config.g
    channel = sample_channel(n, trial_rng(config.master_seed, interval, "channel"), seed_tag=interval)
    sigma = svd_sorted(channel).sigma

    precoder = fixed_precoder or design_precoder(
        config.precoder_kind, sigma, rho, n, config.qam_order,
        step=config.type1_step, budget=config.enumeration_budget,
    )
    solution = None
    if config.receiver_kind is ReceiverKind.IF:
        solution = solve_integer_forcing(build_effective_channel(sigma, precoder, rho))

    codeword_rng = trial_rng(config.master_seed, interval, "codeword")
    noise_rng = trial_rng(config.master_seed, interval, "noise")
    dither_rng = trial_rng(config.master_seed, interval, "dither") if config.dither else None

    errors = 0
    for _ in range(n_codewords):
        symbols = sample_symbols(n, g, codeword_rng)
        dither = sample_dither(n, dither_rng) if dither_rng is not None else None
        received = apply_channel(symbols_to_points(symbols, g, dither), sigma, precoder, rho, noise_rng)
        if solution is not None:
            decoded = if_decode(received, solution, rho, g, dither)
        else:
            decoded = ml_decode(received, sigma, precoder, rho, g)
        errors += int(not np.array_equal(decoded, symbols))
    return errors


class CurveSimulator:
    """Run codeword-error-rate curves."""

    def __init__(self, logger=None):
        """
        Initialize CurveSimulator.

        Args:
            logger: Logger instance (defaults to this module's logger)
        """
        self.logger = logger or logging.getLogger(__name__)
        self.config = None
        self.curve = None

    def run(self, config: SimConfig, progress: bool = False) -> ErrorCurve:
        """
        Simulate every SNR point until ``min_errors`` errors or ``max_trials`` codewords.

        Channel, codeword, noise and dither draws of a channel interval come from
        substreams keyed by (master_seed, interval index), so the curve does
        not depend on the thread count. A point that hits the time budget or
        the enumeration budget is kept with ``complete=False`` and the remaining
        points are skipped.
        """
        from . import __version__

        self.config = config
        self.logger.info("\n" + "=" * 70)
        self.logger.info("[CURVE] %s/%s, %dx%d, %d-QAM", config.precoder_kind.value.upper(),
                         config.receiver_kind.value.upper(), config.n_complex, config.n_complex, config.qam_order)
        self.logger.info("=" * 70)

        fixed = None
        if config.precoder_kind is not PrecoderKind.TYPE1:
            fixed = design_precoder(config.precoder_kind, None, 1.0, config.n_complex, config.qam_order)
            self.logger.info("Precoder: %s", fixed.label)

        started = time.monotonic()
        cpc = config.codewords_per_channel
        batch_size = _INTERVALS_PER_THREAD * config.threads
        points: List[CurvePoint] = []

        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            for snr_db in tqdm(config.snr_grid_db, desc="SNR points", disable=not progress):
                rho = 10.0 ** (snr_db / 10.0) / config.n_complex
                trials = errors = interval = 0
                complete = True

                while trials < config.max_trials and errors < config.min_errors:
                    batch = [k for k in range(interval, interval + batch_size) if k * cpc < config.max_trials]
                    sizes = [min(cpc, config.max_trials - k * cpc) for k in batch]
                    try:
                        outcomes = list(pool.map(
                            lambda k, size: _simulate_interval(config, rho, k, size, fixed), batch, sizes
                        ))
                    except EnumerationBudgetError as exc:
                        self.logger.warning("⚠ %s at %.2f dB; curve truncated", exc, snr_db)
                        complete = False
                        break

                    for k, size, errs in zip(batch, sizes, outcomes):
                        trials += size
                        errors += errs
                        interval = k + 1
                        if errors >= config.min_errors or trials >= config.max_trials:
                            break

                    over_time = config.time_budget_s is not None and time.monotonic() - started > config.time_budget_s
                    if over_time and errors < config.min_errors and trials < config.max_trials:
                        self.logger.warning("⚠ Time budget of %.1f s exhausted at %.2f dB", config.time_budget_s, snr_db)
                        complete = False
                        break

                if trials:
                    points.append(CurvePoint(snr_db, trials, errors, complete))
                    self.logger.info("  %6.2f dB: %d/%d errors, CER=%.3e%s", snr_db, errors, trials,
                                     errors / trials, "" if complete else " (incomplete)")
                if not complete:
                    break

        self.curve = ErrorCurve(points, {
            "config": config.to_dict(),
            "version": f"upifpy {__version__}",
            "elapsed_s": round(time.monotonic() - started, 3),
        })
        self.logger.info("✓ Curve finished in %.1f s", self.curve.metadata["elapsed_s"])
        return self.curve

    def save_results(self, csv_path: str) -> str:
        """Save the last curve as CSV plus metadata sidecar."""
        if self.curve is None:
            raise ValueError("Must run a curve first")
        self.curve.save(csv_path)
        self.logger.info("📄 Error curve saved to: %s", csv_path)
        return csv_path


def run_curve(config: SimConfig, logger=None, progress: bool = False) -> ErrorCurve:
    """Simulate an error-rate curve (see ``CurveSimulator.run``)."""
    return CurveSimulator(logger).run(config, progress=progress)


# ---------------------------------------------------------------------
# Curve post-processing
# ---------------------------------------------------------------------

def _log_points(curve: ErrorCurve):
    pts = sorted((p.snr_db, math.log10(p.cer)) for p in curve.points if p.trials and p.errors > 0)
    return pts


def diversity_slope(curve: ErrorCurve, cer_low: float, cer_high: float) -> float:
    """
    Empirical diversity order between two CER levels.

    The curve is taken piecewise linear in (snr_db / 10, log10 cer). Crossings of
    both levels are interpolated and, together with the measured points in
    between, fitted by least squares. Returns the negated slope in decades per
    10 dB.

    Raises:
        DomainError: If the levels are invalid or fewer than two distinct
            points fall between them
    """
    if not 0 < cer_low < cer_high <= 1:
        raise DomainError(f"Need 0 < cer_low < cer_high <= 1, got {cer_low}, {cer_high}")
    lo, hi = math.log10(cer_low), math.log10(cer_high)
    pts = [(snr / 10.0, y) for snr, y in _log_points(curve)]

    selected = {}
    for x, y in pts:
        if lo <= y <= hi:
            selected[x] = y
    for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
        for level in (lo, hi):
            if (y0 - level) * (y1 - level) < 0:
                selected[x0 + (level - y0) * (x1 - x0) / (y1 - y0)] = level

    if len(selected) < 2:
        raise DomainError(f"Curve does not bracket the CER range [{cer_low}, {cer_high}]")
    xs = np.array(sorted(selected))
    ys = np.array([selected[x] for x in xs])
    slope = np.polyfit(xs, ys, 1)[0]
    return float(-slope) + 0.0


def snr_at_cer(curve: ErrorCurve, cer: float) -> float:
    """
    SNR (dB) where the curve first falls to ``cer``, interpolated in log10(cer).

    Raises:
        DomainError: If the curve never crosses the level
    """
    if not 0 < cer <= 1:
        raise DomainError(f"CER level must lie in (0, 1], got {cer}")
    level = math.log10(cer)
    pts = _log_points(curve)
    for (s0, y0), (s1, y1) in zip(pts, pts[1:]):
        if y0 >= level >= y1 and y0 != y1:
            return s0 + (level - y0) * (s1 - s0) / (y1 - y0)
    raise DomainError(f"Curve does not cross CER {cer}")


def snr_gap_db(curve_a: ErrorCurve, curve_b: ErrorCurve, cer: float) -> float:
    """Horizontal distance ``snr_a - snr_b`` (dB) between two curves at a CER level."""
    return snr_at_cer(curve_a, cer) - snr_at_cer(curve_b, cer)
