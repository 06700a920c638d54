"""conewalk: random walks in cones, their survival tails and harmonic functions."""

__version__ = "0.1.0"
