# ricci_mcmc/validator.py

"""
Non-raising checks for user supplied inputs.

Each is_valid_* function wraps the corresponding raising validator and
returns (is_valid, error_message). The message is "" when the input is valid.
"""

from __future__ import annotations
from typing import Sequence, Tuple

from .errors import RicciMCMCError
from .generator import Generator, WeightMatrix, validate_generator, validate_weight_matrix
from .simplex import NORMALIZATION_TOL, validate_distribution


def is_valid_distribution(raw: Sequence[float], tol: float = NORMALIZATION_TOL) -> Tuple[bool, str]:
    """
    Check a raw vector against the open simplex.

    Returns:
        (is_valid, error_message)

    Example:
        >>> is_valid_distribution([0.5, 0.5])
        (True, '')
        >>> is_valid_distribution([1.0, 0.0])[0]
        False
    """
    try:
        validate_distribution(raw, tol)
        return True, ""
    except RicciMCMCError as e:
        return False, str(e)
    except (TypeError, ValueError) as e:
        return False, f"not a numeric vector: {e}"


def is_valid_generator(g: Generator) -> Tuple[bool, str]:
    """Nonnegative off-diagonal rates, zero row sums and detailed balance against g.pi."""
    try:
        validate_generator(g)
        return True, ""
    except RicciMCMCError as e:
        return False, str(e)


def is_valid_weight_matrix(w: WeightMatrix) -> Tuple[bool, str]:
    try:
        validate_weight_matrix(w)
        return True, ""
    except RicciMCMCError as e:
        return False, str(e)
