"""
Cubic lattice codebooks: Z_g per real dimension, i.e. square g²-QAM per complex symbol.

Symbols are integers in ``0..g-1``. On the air they become
``delta * (c - (g - 1) / 2)``, with ``delta`` chosen so that a complex symbol
has unit average energy (1/2 per real dimension).
"""

import math
from typing import Optional

import numpy as np
from numpy.random import Generator

from .utils.validators import validate_alphabet_size, validate_qam_order


def symbol_spacing(g: int) -> float:
    """Distance between neighboring real amplitudes, ``sqrt(6 / (g^2 - 1))``."""
    g = validate_alphabet_size(g)
    return math.sqrt(6.0 / (g * g - 1))


def alphabet_size(qam_order: int) -> int:
    """Per-dimension alphabet size g for a square QAM order."""
    return math.isqrt(validate_qam_order(qam_order))


def symbols_to_points(symbols: np.ndarray, g: int, dither: Optional[np.ndarray] = None) -> np.ndarray:
    """
    Map integer symbols to transmitted real amplitudes.

    With a dither ``u`` the transmitted value is ``((c + u + 1/2) mod g) - 1/2``
    before centering and scaling, so it stays inside the shaping interval.
    """
    values = np.asarray(symbols, dtype=float)
    if dither is not None:
        values = np.mod(values + dither + 0.5, g) - 0.5
    return symbol_spacing(g) * (values - (g - 1) / 2.0)


def sample_symbols(n_complex: int, g: int, rng: Generator) -> np.ndarray:
    """Uniform integer symbol matrix of shape 2n×2n with entries in 0..g-1."""
    dim = 2 * n_complex
    return rng.integers(0, validate_alphabet_size(g), size=(dim, dim))


def sample_codeword(n_complex: int, g: int, rng: Generator) -> np.ndarray:
    """
    Uniform codeword of shape 2n×2n in transmitted (zero-centered, scaled) form.

    For g = 2 the entries are ``±delta/2``, the real decomposition of 4-QAM.
    """
    return symbols_to_points(sample_symbols(n_complex, g, rng), g)



def sample_dither(n_complex: int, rng: Generator) -> np.ndarray:
    """Uniform dither on [-1/2, 1/2) for every entry of a 2n×2n codeword."""
    dim = 2 * n_complex
    return rng.random((dim, dim)) - 0.5
