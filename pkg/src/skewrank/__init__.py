"""Exact exterior algebra and the secant variety of lines to a Grassmannian."""

__version__ = "0.1.0"

__all__ = [
    "DualForm",
    "Multivector",
    "contract",
    "merge_sign",
    "wedge",
    "Subspace",
    "GrassPoint",
    "hamming_distance",
    "pluecker_embed",
    "OrbitLabel",
    "classify",
    "orbit_atlas",
    "orbit_dim",
    "q3",
    "representative",
    "decompose_secant",
    "tangential_locus",
    "terracini_pair",
    "unident_family",
    "annihilator",
    "perp_dim",
    "smoothness_certificate",
]

from .exterior import DualForm, Multivector, contract, merge_sign, wedge  # noqa: E402
from .linalg import Subspace  # noqa: E402
from .grassmann import GrassPoint, hamming_distance, pluecker_embed  # noqa: E402
from .orbits import OrbitLabel, classify, orbit_atlas, orbit_dim, q3, representative  # noqa: E402
from .identifiability import decompose_secant, tangential_locus, terracini_pair, unident_family  # noqa: E402
from .apolarity import annihilator, perp_dim, smoothness_certificate  # noqa: E402
