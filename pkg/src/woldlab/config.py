"""Numeric policy: one global tolerance, overridable via WOLDLAB_TOLERANCE."""

import os

from .errors import MalformedInputError

DEFAULT_TOLERANCE = 1e-9

# Residual threshold below which a vector is dropped during
# orthonormalization; looser than the working tolerance on purpose so that
# bases stay deterministic under floating-point noise.
ORTHO_DROP_TOL = 1e-7

# Coefficients below this are pruned at vector construction.  This is a
# numerical noise floor, deliberately far below the working tolerance:
# pruning at the working tolerance would silently destroy the small
# orthogonalization corrections the certificates depend on, while any
# geometrically decaying support still crosses this floor and stays finite.
PRUNE_TOL = 1e-14

DEFAULT_DEPTH = 64
DEFAULT_HORIZON = 64


def tolerance() -> float:
    """Working tolerance for norm and orthogonality checks.

    Reads WOLDLAB_TOLERANCE on every call so tests and CLI runs can
    override it per process.
    """
    raw = os.environ.get("WOLDLAB_TOLERANCE")
    if raw is None:
        return DEFAULT_TOLERANCE
    try:
        value = float(raw)
    except ValueError:
        raise MalformedInputError(
            f"WOLDLAB_TOLERANCE is not a number: {raw!r}"
        ) from None
    if not value > 0.0:
        raise MalformedInputError(
            f"WOLDLAB_TOLERANCE must be positive, got {value!r}"
        )
    return value
