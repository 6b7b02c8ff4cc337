"""Exact entanglement calculator for the toric code."""
