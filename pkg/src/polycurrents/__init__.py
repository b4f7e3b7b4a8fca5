"""Polyhedral currents: chains, flat norms, deformations and space-time trajectories."""

__version__ = "0.1.0"

from .chains import Chain, boundary, canonicalize, mass  # noqa: E402
from .complex import SimplicialComplex, build_complex, embed, flat_norm, flat_norm_hom  # noqa: E402
from .errors import PolyCurrentsError  # noqa: E402
from .spacetime import SpaceTimeChain  # noqa: E402

__all__ = [
    "Chain",
    "PolyCurrentsError",
    "SimplicialComplex",
    "SpaceTimeChain",
    "boundary",
    "build_complex",
    "canonicalize",
    "embed",
    "flat_norm",
    "flat_norm_hom",
    "mass",
]
