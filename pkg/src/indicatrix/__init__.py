"""Fourier transforms of indicator functions, their L^p integrability and related moduli."""
import os as _os

# cap BLAS/OpenMP pools before numpy loads them
_threads = _os.environ.get("INDICATRIX_THREADS")
if _threads:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        _os.environ.setdefault(_var, _threads)

from . import apnorms, geometry, integrability, moduli, sobolev, spectra  # noqa: E402
from .errors import *  # noqa: E402,F401,F403

__version__ = "0.1.0"
