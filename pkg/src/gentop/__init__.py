"""Negligible sets, diffuse maps, gluing and group quotients on finite spaces."""
__version__ = "0.1.0"
