"""Resonances of one-dimensional Stark Hamiltonians."""
