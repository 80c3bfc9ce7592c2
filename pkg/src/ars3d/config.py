"""Global numerical tolerance.

The relative tolerance used by membership and commutation tests defaults to
``1e-9`` and can be overridden with the ``ARS3D_TOL`` environment variable.
"""

import os

DEFAULT_TOL = 1e-9
DEFAULT_SEED = 0x5EED


def default_tol():
    """Return the global relative tolerance (read from ``ARS3D_TOL`` if set)."""
    raw = os.environ.get("ARS3D_TOL")
    if raw is None or raw.strip() == "":
        return DEFAULT_TOL
    value = float(raw)
    if not value > 0:
        raise ValueError(f"ARS3D_TOL must be positive, got {raw!r}")
    return value
