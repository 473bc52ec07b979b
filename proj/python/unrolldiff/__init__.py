"""Unrolled differentiation of first-order methods on parametric quadratics."""

from ._core import *  # noqa: F401,F403

__version__ = "0.1.0"
