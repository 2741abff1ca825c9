"""Rydberg superatom + optical cavity open-system simulator."""

__version__ = "0.1.0"
