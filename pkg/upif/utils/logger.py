"""
Logging configuration for simulation runs.
"""

import logging
import os
from datetime import datetime


def setup_logger(output_dir, run_id, console_level=logging.INFO):
    """
    Set up the ``upif`` logger for one run.

    Args:
        output_dir: Directory to save the log file in
        run_id: Run identifier used in the log filename
        console_level: Level of the console handler

    Returns:
        Logger instance
    """
    logger = logging.getLogger('upif')
    logger.setLevel(logging.DEBUG)

    # Avoid duplicate handlers
    if logger.handlers:
        return logger

    console_handler = logging.StreamHandler()
    console_handler.setLevel(console_level)
    console_handler.setFormatter(logging.Formatter('%(message)s'))

    os.makedirs(output_dir, exist_ok=True)
    timestamp = datetime.now().strftime('%Y%m%d_%H%M%S')
    log_file = os.path.join(output_dir, f'{run_id}_{timestamp}.log')
    file_handler = logging.FileHandler(log_file)
    file_handler.setLevel(logging.DEBUG)
    file_handler.setFormatter(logging.Formatter(
        '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S'
    ))

    logger.addHandler(console_handler)
    logger.addHandler(file_handler)

    logger.info(f"Log file created: {log_file}")

    return logger
