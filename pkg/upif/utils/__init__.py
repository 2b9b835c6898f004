"""
Utility modules for the simulator.
"""

from .logger import setup_logger
from .validators import (
    validate_alphabet_size,
    validate_positive_int,
    validate_qam_order,
    validate_snr_grid,
)
from .config_handler import get_config, load_config, prompt_user_config
from .matrix_io import load_precoder, save_precoder, write_csv

__all__ = [
    'setup_logger',
    'validate_alphabet_size',
    'validate_positive_int',
    'validate_qam_order',
    'validate_snr_grid',
    'get_config',
    'load_config',
    'prompt_user_config',
    'load_precoder',
    'save_precoder',
    'write_csv',
]
