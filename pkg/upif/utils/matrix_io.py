"""
Plain-text exchange formats: precoder matrices and result tables.
"""

import os
import re

import numpy as np

from ..exceptions import DomainError


FLOAT_FORMAT = "%.17g"

_HEADER = re.compile(r"^#\s*kind=(?P<kind>\S+)\s+theta=(?P<theta>\S+)\s+label=(?P<label>.*)$")


def _ensure_parent(path):
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)


def write_csv(df, path):
    """
    Write a table with full float precision and LF line endings.

    Returns:
        str: The path written
    """
    _ensure_parent(path)
    df.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return path


def save_precoder(precoder, path):
    """
    Save a precoder as whitespace-separated rows under a one-line header.

    The header reads ``# kind=<kind> theta=<float|none> label=<text>``.
    """
    _ensure_parent(path)
    theta = "none" if precoder.theta is None else repr(float(precoder.theta))
    header = f"kind={precoder.kind.value} theta={theta} label={precoder.label}"
    np.savetxt(path, precoder.p, fmt=FLOAT_FORMAT, header=header, comments="# ")
    return path


def load_precoder(path):
    """
    Load a precoder written by ``save_precoder``.

    Raises:
        FileNotFoundError: If the file doesn't exist
        DomainError: If the header is missing or malformed
    """
    from ..precoders import Precoder, PrecoderKind

    if not os.path.exists(path):
        raise FileNotFoundError(f"Precoder file not found: {path}")

    with open(path, "r") as f:
        first = f.readline().rstrip("\n")
    match = _HEADER.match(first)
    if match is None:
        raise DomainError(f"Missing precoder header in {path}")

    try:
        kind = PrecoderKind(match["kind"])
    except ValueError as exc:
        raise DomainError(str(exc)) from exc
    theta = None if match["theta"] == "none" else float(match["theta"])
    matrix = np.loadtxt(path, comments="#", ndmin=2)
    return Precoder(matrix, kind, theta=theta, label=match["label"].strip())
