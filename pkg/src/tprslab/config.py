"""Global numeric knobs and caps.

Every cap is overridable per call; the dimension cap additionally honors the
TPRS_DIM_CAP environment variable so whole experiment runs can be resized
without touching call sites.
"""

from __future__ import annotations

import os

ENV_DIM_CAP = "TPRS_DIM_CAP"

DEFAULT_DIM_CAP = 4096          # largest dense operator dimension (2^(n t))
DEFAULT_ENUM_BUDGET = 10**6     # exact-moment term budget
DEFAULT_TABLE_CAP = 2**20       # explicit permutation table cap
DEFAULT_BUDGET_CONSTANT = 10.0  # c in the runtime-budget test cost <= c * T(n)
DEFAULT_KAPPA = 1.0             # rendering constant for asymptotic table entries

# Tolerance ladder: tight at construction, looser for derived property checks.
NORM_TOL = 1e-12
HERM_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-9
EIG_FLOOR = 1e-12
PROP_TOL = 1e-9


def dim_cap(override: int | None = None) -> int:
    """Resolve the dense-dimension cap: explicit arg > env var > default."""
    if override is not None:
        return int(override)
    env = os.environ.get(ENV_DIM_CAP)
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise ValueError(f"{ENV_DIM_CAP} must be an integer, got {env!r}") from exc
    return DEFAULT_DIM_CAP
