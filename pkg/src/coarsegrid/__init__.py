"""Finite-window machinery for fat half-grid minors in locally finite graphs."""
from __future__ import annotations

__version__ = "0.1.0"
