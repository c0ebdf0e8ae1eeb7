"""Tension and bitension fields of maps between charted Riemannian manifolds."""

from .errors import BitensionError
from .fields import GridMap, GridSection, Lattice
from .geometry import MetricChart, chart_catalog
from .jets import Jet3
from .reduction import ReducedState, reduce
from .stencil import BACKEND as STENCIL_BACKEND
from .warped import ProfileAlpha

__all__ = [
    "BitensionError", "GridMap", "GridSection", "Jet3", "Lattice", "MetricChart",
    "ProfileAlpha", "ReducedState", "STENCIL_BACKEND", "chart_catalog", "reduce",
]
__version__ = "0.1.0"
