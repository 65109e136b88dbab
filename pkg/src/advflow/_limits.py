"""Enumeration budget shared by the exhaustive searches in this package."""

from __future__ import annotations

import os

_ENV_VAR = "ADVFLOW_GUARD"


class GuardExceeded(RuntimeError):
    """An exhaustive enumeration exceeded its configured state budget."""


def guard_limit(default: int) -> int:
    """Return the active enumeration budget.

    The ``ADVFLOW_GUARD`` environment variable overrides *default* when set
    to a positive integer.
    """
    raw = os.environ.get(_ENV_VAR)
    if raw is None:
        return default
    try:
        value = int(raw)
    except ValueError as exc:
        raise ValueError(f"{_ENV_VAR} must be an integer, got {raw!r}") from exc
    if value <= 0:
        raise ValueError(f"{_ENV_VAR} must be positive, got {value}")
    return value
