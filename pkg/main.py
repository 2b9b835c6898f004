#!/usr/bin/env python3
"""
UPIF Simulator - Main Entry Point

Usage:
    python main.py curve --config configs/curve_2x2_type2_4qam.yaml
    python main.py landscape --num-channels 1000 --rho 100
    python main.py slope --curve cer.csv --cer-low 1e-4 --cer-high 1e-2
    python main.py precoder export --kind type2 --dim 4 --out p.txt
"""

import sys
import argparse

import numpy as np

from upif import UPIFSimulation, __version__
from upif.simulation import ErrorCurve, SimConfig, diversity_slope
from upif.core import split_config
from upif.utils.config_handler import get_config
from upif.utils.matrix_io import load_precoder


def build_parser():
    parser = argparse.ArgumentParser(
        description=f'Unitary Precoded Integer-Forcing Simulator v{__version__}',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
    # Error-rate curve from a configuration file (interactive without --config)
    python main.py curve --config configs/curve_2x2_type2_4qam.yaml --threads 4

    # Type I landscape over 1000 random 2x2 channels at rho = 100
    python main.py landscape --num-channels 1000 --rho 100 --seed 1

    # Full pipeline of a config file (curve, then optional slope and landscape)
    python main.py run --config configs/landscape_rho100.yaml

    # Diversity slope of a saved curve
    python main.py slope --curve outputs/.../cer_type2_if.csv --cer-low 1e-4 --cer-high 1e-2

    # Export and inspect a precoder
    python main.py precoder export --kind type2 --dim 4 --out type2_d4.txt
    python main.py precoder show type2_d4.txt
        """
    )

    parser.add_argument(
        '--output',
        type=str,
        default='./outputs',
        help='Base output directory (default: ./outputs)'
    )

    sub = parser.add_subparsers(dest='command', required=True)

    curve = sub.add_parser('curve', help='Simulate a CER-vs-SNR curve')
    curve.add_argument('--config', type=str, help='YAML or key=value configuration file (optional)')
    curve.add_argument('--seed', type=int, help='Override the master seed')
    curve.add_argument('--out', type=str, help='Output CSV path (default: inside the run directory)')
    curve.add_argument('--threads', type=int, help='Override the number of worker threads')

    run = sub.add_parser('run', help='Run the pipeline of a config file (curve, slope, landscape)')
    run.add_argument('--config', type=str, help='Configuration file (optional)')

    land = sub.add_parser('landscape', help='Sweep the Type I angle over random 2x2 channels')
    land.add_argument('--num-channels', type=int, required=True)
    land.add_argument('--rho', type=float, required=True, help='Per-antenna SNR (linear)')
    land.add_argument('--seed', type=int, default=0)
    land.add_argument('--out', type=str, help='Output CSV path')
    land.add_argument('--threads', type=int, default=1)

    slope = sub.add_parser('slope', help='Estimate the diversity slope of a saved curve')
    slope.add_argument('--curve', type=str, required=True, help='Curve CSV')
    slope.add_argument('--cer-low', type=float, required=True)
    slope.add_argument('--cer-high', type=float, required=True)

    prec = sub.add_parser('precoder', help='Export or inspect precoder matrices')
    prec_sub = prec.add_subparsers(dest='action', required=True)
    export = prec_sub.add_parser('export', help='Write a precoder file')
    export.add_argument('--kind', required=True, choices=['identity', 'type1', 'type2', 'xcode'])
    export.add_argument('--dim', type=int, help='Real dimension of a Type II rotation (2, 4 or 8)')
    export.add_argument('--n', type=int, default=2, help='Number of complex antennas (default: 2)')
    export.add_argument('--qam-order', type=int, default=4)
    export.add_argument('--theta', type=float, help='Type I angle in radians')
    export.add_argument('--out', type=str, required=True)
    show = prec_sub.add_parser('show', help='Print a precoder file')
    show.add_argument('path', type=str)

    return parser


def run_curve(args):
    config = get_config(args.config)
    fields, _ = split_config(config)
    if args.seed is not None:
        fields['master_seed'] = args.seed
    if args.threads is not None:
        fields['threads'] = args.threads
    sim_config = SimConfig.from_dict(fields)

    sim = UPIFSimulation(config=config, run_id='curve', output_base=args.output)
    curve = sim.run_curve(sim_config, out_path=args.out)
    print(curve.to_frame().to_string(index=False))
    return 0 if curve.complete else 2


def run_pipeline(args):
    sim = UPIFSimulation(run_id='run', output_base=args.output)
    sim.run_full_pipeline(config_path=args.config)
    return 0 if sim.curve.complete else 2


def run_landscape(args):
    sim = UPIFSimulation(run_id='landscape', output_base=args.output)
    sim.run_landscape(args.num_channels, args.rho, seed=args.seed, threads=args.threads, out_path=args.out)
    return 0


def run_slope(args):
    slope = diversity_slope(ErrorCurve.load(args.curve), args.cer_low, args.cer_high)
    print(f"{slope:.6f}")
    return 0


def run_precoder(args):
    if args.action == 'show':
        precoder = load_precoder(args.path)
        print(f"kind:  {precoder.kind.value}")
        print(f"theta: {precoder.theta}")
        print(f"label: {precoder.label}")
        with np.printoptions(precision=6, suppress=True):
            print(precoder.p)
        return 0

    sim = UPIFSimulation(run_id='precoder', output_base=args.output)
    sim.export_precoder(
        args.kind, args.out,
        n_complex=args.n, qam_order=args.qam_order, theta=args.theta, dim=args.dim,
    )
    return 0


COMMANDS = {
    'run': run_pipeline,
    'curve': run_curve,
    'landscape': run_landscape,
    'slope': run_slope,
    'precoder': run_precoder,
}


def main(argv=None):
    """Main entry point for the UPIF simulator."""
    args = build_parser().parse_args(argv)

    try:
        return COMMANDS[args.command](args)

    except KeyboardInterrupt:
        print("\n\n⚠ Simulation interrupted by user")
        return 1
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 1
    except Exception as e:
        print(f"\n❌ Fatal error: {str(e)}")
        return 1


if __name__ == '__main__':
    sys.exit(main())
