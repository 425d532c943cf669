"""Finite-key security bounds for QKD."""
