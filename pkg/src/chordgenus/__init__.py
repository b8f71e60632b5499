"""Genus-filtered generating functions for two-backbone chord diagrams."""

from __future__ import annotations

__version__ = "0.1.0"
