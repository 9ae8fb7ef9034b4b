"""Quantum money laboratory: a dense simulator plus private- and public-key money schemes."""

__version__ = "0.1.0"

from . import algorithms, core, f2, money_private, money_public  # noqa: E402,F401
from ._backend import requested_backend, set_backend  # noqa: E402,F401
from .rng import make_rng, split  # noqa: E402,F401
