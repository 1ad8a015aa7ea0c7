"""Tests for statefuzz."""
