"""Input coercion shared by the estimators and the CLI."""
from __future__ import annotations

import math
from pathlib import Path

from .exceptions import InvalidArgumentError
from .instances import ProblemInstance, load_instance


def check_instance(X) -> ProblemInstance:
    """Accept a ProblemInstance, an instance dict, or a path to an instance file."""
    if isinstance(X, ProblemInstance):
        return X
    if isinstance(X, dict):
        return ProblemInstance.from_dict(X)
    if isinstance(X, (str, Path)):
        return load_instance(X)
    raise InvalidArgumentError(f"cannot interpret {type(X).__name__} as a problem instance")


def check_positive(name: str, value) -> float:
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise InvalidArgumentError(f"{name} must be a number, got {value!r}") from None
    if not (math.isfinite(value) and value > 0):
        raise InvalidArgumentError(f"{name} must be positive, got {value}")
    return value


def check_choice(name: str, value, choices) -> str:
    if value not in choices:
        raise InvalidArgumentError(f"{name} must be one of {tuple(choices)}, got {value!r}")
    return value
