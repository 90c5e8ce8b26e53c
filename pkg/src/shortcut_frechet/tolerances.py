"""Global numeric tolerance plumbing.

All geometric predicates in this package share a single relative tolerance
eta (default 1e-9).  Deciders are advertised as correct for thresholds
outside [delta - eta*scale, delta + eta*scale], where scale is the bounding
box diameter of the input.  The env var SFD_TOLERANCE overrides the default.
"""
from __future__ import annotations

import os

DEFAULT_ETA = 1e-9

_eta = DEFAULT_ETA


def _init_from_env() -> None:
    global _eta
    raw = os.environ.get("SFD_TOLERANCE")
    if raw is None:
        return
    try:
        val = float(raw)
    except ValueError:
        return
    if val > 0.0:
        _eta = val


def get_eta() -> float:
    """The global tolerance eta."""
    return _eta


def set_eta(value: float) -> None:
    """Override eta (tests and the CLI --tolerance flag)."""
    global _eta
    if value <= 0.0:
        raise ValueError("tolerance must be positive")
    _eta = value


def reset_eta() -> None:
    """Restore the default (or SFD_TOLERANCE if set)."""
    global _eta
    _eta = DEFAULT_ETA
    _init_from_env()


_init_from_env()
