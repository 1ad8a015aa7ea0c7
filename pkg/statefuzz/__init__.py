"""Statefuzz - sequence-aware greybox fuzzing for stateful contracts."""

__version__ = "0.3.0"
