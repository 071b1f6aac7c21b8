"""Python access to the curvkit C++ core."""

import json

from . import _curvkit
from ._curvkit import (
    DomainError,
    Error,
    InvalidArgument,
    PreconditionError,
    atlas_volume,
    ball_volume,
    catalog_names,
    check_groups,
    curvature,
    gbc4,
    gray_coefficients,
    gray_expansion,
    schottky_exponent,
    suite_names,
)

__version__ = _curvkit.__version__


def verify(suite="all", fast=False, checks=()):
    """Run a verification suite and return the report as a dict."""
    return json.loads(_curvkit.verify_json(suite, fast, list(checks)))


__all__ = [
    "DomainError",
    "Error",
    "InvalidArgument",
    "PreconditionError",
    "atlas_volume",
    "ball_volume",
    "catalog_names",
    "check_groups",
    "curvature",
    "gbc4",
    "gray_coefficients",
    "gray_expansion",
    "schottky_exponent",
    "suite_names",
    "verify",
]
