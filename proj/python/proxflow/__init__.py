"""Python interface to the proxflow C++ core."""

import json as _json

from ._core import (
    EnergyTrace,
    InvalidArgument,
    NumericalError,
    Objective,
    SystemParams,
    Trajectory,
    classify_rate,
    corollary_check,
    derive_params,
    energy_violations,
    integrate,
    lipschitz_l1,
    lipschitz_l2,
    monitor,
    run_cli,
    run_inertial,
    trajectory_from_csv,
)


def make_problem(spec):
    """Build an objective from a catalog spec (dict or JSON string)."""
    text = spec if isinstance(spec, str) else _json.dumps(spec)
    return _core._make_problem_json(text)


from . import _core  # noqa: E402

__all__ = [
    "EnergyTrace",
    "InvalidArgument",
    "NumericalError",
    "Objective",
    "SystemParams",
    "Trajectory",
    "classify_rate",
    "corollary_check",
    "derive_params",
    "energy_violations",
    "integrate",
    "lipschitz_l1",
    "lipschitz_l2",
    "make_problem",
    "monitor",
    "run_cli",
    "run_inertial",
    "trajectory_from_csv",
]
