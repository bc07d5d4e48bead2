"""Modeling, simulation and optimization of amplifying reconfigurable intelligent surfaces."""

__version__ = "0.1.0"
