"""
Configuration handling - loading from a file or prompting the user.

Two file formats are accepted: a YAML mapping, or flat ``key = value`` lines
where every value is read as a YAML scalar or flow sequence.
"""

import os
import re

import yaml


_FLAT_LINE = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*=(.*)$")


def _strip_comment(line):
    return line.split('#', 1)[0].strip()


def _is_flat(text):
    lines = [_strip_comment(line) for line in text.splitlines()]
    lines = [line for line in lines if line]
    return bool(lines) and all(_FLAT_LINE.match(line) for line in lines)


def parse_flat_config(text):
    """
    Parse ``key = value`` lines into a dict.

    Raises:
        ValueError: If a line is not of the form ``key = value``
    """
    config = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line:
            continue
        match = _FLAT_LINE.match(line)
        if match is None:
            raise ValueError(f"Line {number}: expected 'key = value', got {raw!r}")
        key, value = match.group(1), match.group(2).strip()
        config[key] = yaml.safe_load(value) if value else None
    return config


def load_config(config_path):
    """
    Load configuration from a YAML or ``key = value`` file.

    Args:
        config_path: Path to config file

    Returns:
        dict: Configuration dictionary

    Raises:
        FileNotFoundError: If config file doesn't exist
        ValueError: If the file is not a mapping
        yaml.YAMLError: If config file is invalid
    """
    if not os.path.exists(config_path):
        raise FileNotFoundError(f"Config file not found: {config_path}")

    with open(config_path, 'r') as f:
        text = f.read()

    if _is_flat(text):
        return parse_flat_config(text)

    config = yaml.safe_load(text)
    if config is None:
        return {}
    if not isinstance(config, dict):
        raise ValueError(f"Config file must contain a mapping: {config_path}")
    return config


def _ask(prompt, default, parse, error):
    while True:
        raw = input(f"{prompt} [{default}]: ").strip()
        if not raw:
            return default
        try:
            return parse(raw)
        except ValueError:
            print(f"❌ {error}")


def _parse_grid(raw):
    return [float(x) for x in raw.replace(',', ' ').split()]


def _parse_choice(choices):
    def parse(raw):
        value = raw.lower()
        if value not in choices:
            raise ValueError(value)
        return value
    return parse


def prompt_user_config():
    """
    Interactively prompt user for an error-rate experiment.

    Returns:
        dict: Configuration dictionary with ``SimConfig`` field names
    """
    print("\n" + "="*70)
    print("UPIF SIMULATION - CONFIGURATION")
    print("="*70 + "\n")

    config = {}

    print("--- SYSTEM ---")
    config['n_complex'] = _ask("Number of antennas n", 2, int, "Please enter an integer.")
    config['qam_order'] = _ask("QAM order (4, 16, 64, ...)", 4, int, "Please enter an integer.")

    print("\n--- PRECODER AND RECEIVER ---")
    config['precoder_kind'] = _ask(
        "Precoder [identity/type1/type2/xcode]", 'type2',
        _parse_choice({'identity', 'type1', 'type2', 'xcode'}),
        "Invalid precoder. Choose identity, type1, type2 or xcode.",
    )
    config['receiver_kind'] = _ask(
        "Receiver [if/ml]", 'if', _parse_choice({'if', 'ml'}),
        "Invalid receiver. Choose 'if' or 'ml'.",
    )

    print("\n--- MONTE-CARLO ---")
    config['snr_grid_db'] = _ask(
        "SNR grid in dB (space or comma separated)", [0.0, 10.0, 20.0], _parse_grid,
        "Invalid SNR grid. Please enter numbers.",
    )
    config['min_errors'] = _ask("Errors to collect per SNR point", 100, int, "Please enter an integer.")
    config['max_trials'] = _ask("Maximum codewords per SNR point", 100000, int, "Please enter an integer.")
    config['master_seed'] = _ask("Master seed", 0, int, "Please enter an integer.")
    config['threads'] = _ask("Worker threads", 1, int, "Please enter an integer.")

    print("\n" + "="*70)
    print("✓ Configuration complete!")
    print("="*70 + "\n")

    return config


def get_config(config_path=None):
    """
    Get configuration either from file or interactive prompt.

    Args:
        config_path: Optional path to config file

    Returns:
        dict: Configuration dictionary
    """
    if config_path:
        if os.path.exists(config_path):
            print(f"Loading configuration from: {config_path}")
            return load_config(config_path)
        raise FileNotFoundError(f"Config file not found: {config_path}")

    return prompt_user_config()
