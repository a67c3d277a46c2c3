import os

DEFAULT_TOL = 1e-10


def default_tol():
    """Default numerical tolerance; ``SNWIT_TOL`` overrides it."""
    raw = os.environ.get("SNWIT_TOL")
    return float(raw) if raw else DEFAULT_TOL
