"""Spiral point sets {k^(1/n) u_k} and numerical checks of their Delone property."""

from .dioph import BadVector, make_bad_vector
from .geom import UnitVector, geodesic_distance
from .lift import LiftedSequence
from .spiral import FermatSource, LiftedSource, SpiralSet, generate, spiral_point
from .tetra import GreedyConfig, greedy_select, tetra_source

__all__ = [
    "BadVector",
    "FermatSource",
    "GreedyConfig",
    "LiftedSequence",
    "LiftedSource",
    "SpiralSet",
    "UnitVector",
    "generate",
    "geodesic_distance",
    "greedy_select",
    "make_bad_vector",
    "spiral_point",
    "tetra_source",
]

__version__ = "0.1.0"
