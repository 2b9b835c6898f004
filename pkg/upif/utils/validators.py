"""
Input validation functions.
"""

import math
from typing import Iterable, List, Union

from ..exceptions import DomainError


def validate_positive_int(value: Union[str, int], name: str = "value", minimum: int = 1) -> int:
    """
    Validate an integer parameter with a lower bound.

    Args:
        value: Integer (or integer string)
        name: Parameter name for error messages
        minimum: Smallest allowed value

    Returns:
        int: Valid integer

    Raises:
        DomainError: If the value is not an integer or is too small
    """
    if isinstance(value, bool):
        raise DomainError(f"Invalid {name}: {value}. Must be an integer >= {minimum}.")
    try:
        as_int = int(value)
        if isinstance(value, float) and as_int != value:
            raise ValueError
    except (ValueError, TypeError):
        raise DomainError(f"Invalid {name}: {value}. Must be an integer >= {minimum}.")
    if as_int < minimum:
        raise DomainError(f"{name} must be >= {minimum}, got {as_int}")
    return as_int


def validate_qam_order(qam_order: Union[str, int]) -> int:
    """
    Validate a square QAM order (a power of 4, at least 4).

    Returns:
        int: Valid QAM order

    Raises:
        DomainError: If the order is not a power of 4
    """
    order = validate_positive_int(qam_order, "qam_order", minimum=4)
    if order & (order - 1) or (order.bit_length() - 1) % 2:
        raise DomainError(f"qam_order must be a power of 4, got {order}")
    return order


def validate_alphabet_size(g: Union[str, int]) -> int:
    """
    Validate a per-dimension alphabet size (a power of 2, at least 2).

    Raises:
        DomainError: If g is not a power of 2
    """
    size = validate_positive_int(g, "g", minimum=2)
    if size & (size - 1):
        raise DomainError(f"Alphabet size g must be a power of 2, got {size}")
    return size


def validate_snr_grid(snr_grid_db: Iterable[float]) -> List[float]:
    """
    Validate an SNR grid in dB.

    Returns:
        list: Grid as floats

    Raises:
        DomainError: If the grid is empty, non-finite or not strictly increasing
    """
    if isinstance(snr_grid_db, (int, float)):
        snr_grid_db = [snr_grid_db]
    try:
        grid = [float(x) for x in snr_grid_db]
    except (ValueError, TypeError):
        raise DomainError(f"Invalid SNR grid: {snr_grid_db}")
    if not grid:
        raise DomainError("SNR grid must contain at least one point")
    if not all(math.isfinite(x) for x in grid):
        raise DomainError(f"SNR grid contains non-finite values: {grid}")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise DomainError(f"SNR grid must be strictly increasing: {grid}")
    return grid
