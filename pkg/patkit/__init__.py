"""Photoacoustic tomography reconstruction toolkit: forward model, classical and learned inversions."""

__version__ = "0.1.0"
