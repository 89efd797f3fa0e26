"""Spatial-temporal subspace attention blocks for latent video."""

__version__ = "0.1.0"
