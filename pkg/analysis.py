#!/usr/bin/env python3
"""
analysis.py

Post-processing and figure generation for UPIF simulation outputs.

This file:
- DOES NOT rerun any simulation
- Consumes CSV outputs generated by main.py (curves and landscape tables)
- Produces CER plots, landscape scatter plots, coding-gain histograms
  and an SNR-gap table

Author: Alex
License: MIT
"""

from pathlib import Path
from typing import Dict, List, Optional

import numpy as np
import pandas as pd
import matplotlib.pyplot as plt

from upif.exceptions import DomainError
from upif.landscape import (
    FULL_ROTATION_TAN_ETA,
    HERMITE_GAMMA_2,
    LANDSCAPE_COLUMNS,
    coding_gain_histogram,
)
from upif.simulation import CURVE_COLUMNS, ErrorCurve, snr_gap_db


# ---------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------

DEFAULT_FIG_DPI = 300
GAP_CER_LEVELS = (1e-2, 1e-3, 1e-4)
HISTOGRAM_BINS = 50


# ---------------------------------------------------------------------
# Utility functions
# ---------------------------------------------------------------------

def ensure_dir(path: Path):
    """Create directory if it does not exist."""
    path.mkdir(parents=True, exist_ok=True)


def _has_columns(csv_path: Path, columns) -> bool:
    try:
        header = pd.read_csv(csv_path, nrows=0).columns
    except (pd.errors.EmptyDataError, pd.errors.ParserError, UnicodeDecodeError):
        return False
    return list(header) == list(columns)


def find_curves(output_dir: Path) -> List[Path]:
    """All CER curve CSVs below a run directory."""
    return sorted(p for p in output_dir.rglob("*.csv") if _has_columns(p, CURVE_COLUMNS))


def find_landscapes(output_dir: Path) -> List[Path]:
    """All landscape tables below a run directory."""
    return sorted(p for p in output_dir.rglob("*.csv") if _has_columns(p, LANDSCAPE_COLUMNS))


def curve_label(csv_path: Path, curve: ErrorCurve) -> str:
    config = curve.metadata.get("config") or {}
    if config.get("label"):
        return str(config["label"])
    if config:
        return (f"{config.get('precoder_kind', '?')}/{config.get('receiver_kind', '?')} "
                f"{config.get('qam_order', '?')}-QAM")
    return csv_path.stem


# ---------------------------------------------------------------------
# Error-rate curves
# ---------------------------------------------------------------------

def plot_cer_curves(
    curves: Dict[str, ErrorCurve],
    output_path: Path,
):
    """
    Semilog CER-vs-SNR plot of several curves.

    Incomplete points are drawn hollow.
    """
    plt.figure(figsize=(6, 4.5))
    for label, curve in curves.items():
        df = curve.to_frame()
        mask = df["errors"] > 0
        line, = plt.semilogy(df.loc[mask, "snr_db"], df.loc[mask, "cer"], marker="o", label=label)
        incomplete = [i for i, p in enumerate(curve.points) if not p.complete and p.errors > 0]
        if incomplete:
            plt.semilogy(df.loc[incomplete, "snr_db"], df.loc[incomplete, "cer"], "o",
                         markerfacecolor="white", color=line.get_color())
    plt.xlabel("SNR (dB)")
    plt.ylabel("Codeword error rate")
    plt.grid(True, which="both", alpha=0.3)
    plt.legend()
    plt.tight_layout()
    plt.savefig(output_path, dpi=DEFAULT_FIG_DPI)
    plt.close()


def gap_table(curves: Dict[str, ErrorCurve], levels=GAP_CER_LEVELS) -> pd.DataFrame:
    """
    Horizontal SNR gap of every curve to the first one, per CER level.

    Levels a curve does not reach are left empty.
    """
    labels = list(curves)
    if not labels:
        return pd.DataFrame(columns=["curve", "cer", "gap_db"])
    reference = curves[labels[0]]

    rows = []
    for label in labels[1:]:
        for cer in levels:
            try:
                gap = snr_gap_db(curves[label], reference, cer)
            except DomainError:
                gap = np.nan
            rows.append({"curve": label, "cer": cer, "gap_db": gap})
    return pd.DataFrame(rows, columns=["curve", "cer", "gap_db"])


# ---------------------------------------------------------------------
# Type I landscape
# ---------------------------------------------------------------------

def load_landscape(csv_path: Path) -> pd.DataFrame:
    """
    Load a landscape table produced by ``main.py landscape``.
    """
    df = pd.read_csv(csv_path)
    missing = set(LANDSCAPE_COLUMNS) - set(df.columns)
    if missing:
        raise ValueError(f"Missing required columns in landscape table: {missing}")
    return df


def plot_theta_landscape(df: pd.DataFrame, output_path: Path):
    """
    Scatter of tan(theta*) against tan(eta).
    """
    plt.figure(figsize=(5, 4.5))
    plt.scatter(df["tan_eta"], df["tan_theta_star"], s=4, alpha=0.5)
    plt.axvline(FULL_ROTATION_TAN_ETA, color="grey", linestyle="--", linewidth=1)
    plt.xlabel(r"$\tan\eta$")
    plt.ylabel(r"$\tan\theta^*$")
    plt.xlim(0, 1)
    plt.ylim(0, 1.05)
    plt.tight_layout()
    plt.savefig(output_path, dpi=DEFAULT_FIG_DPI)
    plt.close()


def plot_gain_landscape(df: pd.DataFrame, output_path: Path):
    """
    Scatter of the coding gain against tan(eta), with the Hermite limit.
    """
    plt.figure(figsize=(5, 4.5))
    plt.scatter(df["tan_eta"], df["coding_gain"], s=4, alpha=0.5)
    plt.axhline(HERMITE_GAMMA_2, color="grey", linestyle="--", linewidth=1)
    plt.axhline(1.0, color="black", linewidth=0.5)
    plt.xlabel(r"$\tan\eta$")
    plt.ylabel(r"Coding gain $\gamma$")
    plt.xlim(0, 1)
    plt.tight_layout()
    plt.savefig(output_path, dpi=DEFAULT_FIG_DPI)
    plt.close()


def plot_gain_histogram(hist: pd.DataFrame, output_path: Path):
    """
    Bar chart of the coding-gain distribution.
    """
    plt.figure(figsize=(6, 4))
    plt.bar(hist["bin_left"], hist["fraction"], width=hist["bin_right"] - hist["bin_left"], align="edge")
    plt.xlabel(r"Coding gain $\gamma$")
    plt.ylabel("Fraction of channels")
    plt.tight_layout()
    plt.savefig(output_path, dpi=DEFAULT_FIG_DPI)
    plt.close()


# ---------------------------------------------------------------------
# Main analysis workflow
# ---------------------------------------------------------------------

def run_analysis(output_dir: Path, analysis_dir: Optional[Path] = None):
    """
    Run all post-hoc analyses on simulation outputs.
    """
    analysis_dir = analysis_dir or output_dir / "analysis"
    figures_dir = analysis_dir / "figures"
    tables_dir = analysis_dir / "tables"

    ensure_dir(figures_dir)
    ensure_dir(tables_dir)

    # ---------------------------
    # CER curves
    # ---------------------------
    curve_paths = [p for p in find_curves(output_dir) if analysis_dir not in p.parents]
    curves = {}
    for path in curve_paths:
        curve = ErrorCurve.load(str(path))
        curves[curve_label(path, curve)] = curve

    if curves:
        plot_cer_curves(curves, figures_dir / "cer_curves.png")
        gap_table(curves).to_csv(tables_dir / "snr_gaps.csv", index=False)
        print(f"✓ {len(curves)} CER curve(s) plotted")

    # ---------------------------
    # Landscape tables
    # ---------------------------
    for path in find_landscapes(output_dir):
        df = load_landscape(path)
        stem = path.stem
        plot_theta_landscape(df, figures_dir / f"{stem}_theta.png")
        plot_gain_landscape(df, figures_dir / f"{stem}_gain.png")

        hist = coding_gain_histogram(df, bins=HISTOGRAM_BINS)
        plot_gain_histogram(hist, figures_dir / f"{stem}_gain_hist.png")
        df.describe().to_csv(tables_dir / f"{stem}_summary.csv")
        print(f"✓ Landscape {stem}: {len(df)} channels")

    print("✓ analysis.py completed successfully")
    print(f"Results saved to: {analysis_dir}")


# ---------------------------------------------------------------------
# CLI entry point
# ---------------------------------------------------------------------

if __name__ == "__main__":
    import argparse

    parser = argparse.ArgumentParser(
        description="Post-hoc analysis for UPIF simulation outputs"
    )
    parser.add_argument(
        "output_dir",
        help="Run directory (or any directory containing curve/landscape CSVs)",
    )

    args = parser.parse_args()
    run_analysis(Path(args.output_dir))
