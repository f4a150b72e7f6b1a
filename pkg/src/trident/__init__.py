"""Determinant-method solver for ternary form equations."""
