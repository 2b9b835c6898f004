"""
Main UPIFSimulation class that orchestrates experiments and their outputs.
"""

import math
import os
from datetime import datetime

from .exceptions import DomainError
from .landscape import LandscapeAnalyzer, coding_gain_histogram
from .precoders import PrecoderKind, design_precoder, lift_precoder, rotation_2d, type2_rotation
from .simulation import CurveSimulator, ErrorCurve, SimConfig, diversity_slope
from .utils.config_handler import get_config
from .utils.logger import setup_logger
from .utils.matrix_io import save_precoder, write_csv


# optional config sections next to the SimConfig fields
PIPELINE_SECTIONS = ("landscape", "slope")


def split_config(raw):
    """Separate ``SimConfig`` fields from the optional pipeline sections."""
    raw = dict(raw or {})
    sections = {name: raw.pop(name) or {} for name in PIPELINE_SECTIONS if name in raw}
    return raw, sections


class UPIFSimulation:
    """
    Run directory for one invocation: logger, outputs and the experiment steps.

    Each step writes into its own subdirectory of a timestamped run directory
    unless an explicit output path is given.
    """

    def __init__(self, config=None, run_id="upif", output_base='./outputs'):
        """
        Initialize UPIFSimulation.

        Args:
            config: Configuration dictionary (optional)
            run_id: Identifier used in the run directory and log names
            output_base: Base output directory
        """
        from . import __version__

        self.run_id = run_id
        timestamp = datetime.now().strftime('%Y%m%d_%H%M%S')
        self.output_dir = os.path.join(output_base, f"{run_id}_{timestamp}")
        os.makedirs(self.output_dir, exist_ok=True)

        self.logger = setup_logger(self.output_dir, run_id)
        self.config = config if config else {}

        self.curve_simulator = CurveSimulator(self.logger)
        self.landscape_analyzer = LandscapeAnalyzer(self.logger)

        self.curve = None
        self.landscape = None

        self.logger.info("\n" + "="*70)
        self.logger.info(f"UPIF SIMULATION v{__version__}")
        self.logger.info("="*70)
        self.logger.info(f"Output directory: {self.output_dir}")

    def _step_path(self, step, filename, out_path=None):
        if out_path:
            return out_path
        step_dir = os.path.join(self.output_dir, step)
        os.makedirs(step_dir, exist_ok=True)
        return os.path.join(step_dir, filename)

    def run_curve(self, sim_config=None, out_path=None, progress=True):
        """Simulate an error-rate curve and save it with its metadata sidecar."""
        if sim_config is None:
            fields, _ = split_config(self.config)
            sim_config = SimConfig.from_dict(fields)

        self.curve = self.curve_simulator.run(sim_config, progress=progress)
        name = f"cer_{sim_config.precoder_kind.value}_{sim_config.receiver_kind.value}.csv"
        self.curve_simulator.save_results(self._step_path("curve", name, out_path))
        return self.curve

    def run_landscape(self, num_channels, rho, seed=0, threads=1, out_path=None, progress=True):
        """Sweep the Type I landscape and save the table plus a coding-gain histogram."""
        self.landscape = self.landscape_analyzer.sweep(
            num_channels, rho, seed=seed, threads=threads, progress=progress
        )
        path = self.landscape_analyzer.save_results(self._step_path("landscape", "landscape.csv", out_path))

        hist_path = os.path.splitext(path)[0] + "_gain_hist.csv"
        write_csv(coding_gain_histogram(self.landscape), hist_path)
        self.logger.info(f"📄 Coding-gain histogram saved to: {hist_path}")
        return self.landscape

    def estimate_slope(self, cer_low, cer_high, curve=None):
        """
        Diversity slope of a curve (the last simulated one by default).

        Args:
            cer_low: Lower CER level
            cer_high: Upper CER level
            curve: ErrorCurve or path to a curve CSV
        """
        if curve is None:
            curve = self.curve
        if curve is None:
            raise ValueError("Must simulate or load a curve first")
        if isinstance(curve, (str, os.PathLike)):
            curve = ErrorCurve.load(curve)

        slope = diversity_slope(curve, cer_low, cer_high)
        self.logger.info(f"✓ Diversity slope in [{cer_low:g}, {cer_high:g}]: {slope:.4f}")
        return slope

    def export_precoder(self, kind, out_path, n_complex=2, qam_order=4, theta=None, dim=None):
        """
        Build a precoder and write it in the precoder text format.

        Type I needs ``theta`` (there is no channel to search on). ``dim``
        selects the real dimension of a Type II rotation directly.
        """
        kind = PrecoderKind(kind)
        if kind is PrecoderKind.TYPE1:
            if theta is None:
                raise DomainError("Exporting a Type I precoder needs an angle")
            if not 0.0 <= theta <= math.pi / 4:
                raise DomainError(f"Type I angles lie in [0, pi/4], got {theta}")
            precoder = lift_precoder(rotation_2d(theta), n_complex)
        elif kind is PrecoderKind.TYPE2 and dim is not None:
            precoder = type2_rotation(int(dim))
        else:
            precoder = design_precoder(kind, None, 1.0, n_complex, qam_order)
        save_precoder(precoder, out_path)
        self.logger.info(f"📄 Precoder {precoder.label} saved to: {out_path}")
        return precoder

    def run_full_pipeline(self, config_path=None):
        """
        Run curve, optional slope estimate and optional landscape sweep.

        The slope step reads ``slope: {cer_low, cer_high}`` and the landscape
        step ``landscape: {num_channels, rho, seed}`` from the configuration.
        """
        if config_path or not self.config:
            self.config = get_config(config_path)

        try:
            fields, sections = split_config(self.config)
            sim_config = SimConfig.from_dict(fields)

            # Step 1: error-rate curve
            self.run_curve(sim_config)

            # Step 2: diversity slope
            if "slope" in sections:
                slope_cfg = sections["slope"]
                try:
                    self.estimate_slope(slope_cfg.get("cer_low", 1e-4), slope_cfg.get("cer_high", 1e-2))
                except DomainError as e:
                    self.logger.warning(f"⚠ Slope not estimated: {e}")

            # Step 3: landscape
            if "landscape" in sections:
                land_cfg = sections["landscape"]
                self.run_landscape(
                    land_cfg.get("num_channels", 1000),
                    land_cfg.get("rho", 100.0),
                    seed=land_cfg.get("seed", sim_config.master_seed),
                    threads=sim_config.threads,
                )

            self.logger.info("\n" + "="*70)
            self.logger.info("✅ SIMULATION COMPLETED SUCCESSFULLY!")
            self.logger.info("="*70)
            self.logger.info(f"\nAll results saved to: {self.output_dir}")
            self.logger.info("  - Plot the curves with: python analysis.py " + self.output_dir)

        except SystemExit:
            self.logger.error("\n❌ Simulation stopped due to error")
            self.logger.error("Check log file for details")
            raise
        except Exception as e:
            self.logger.error(f"\n❌ Unexpected error: {str(e)}")
            raise
