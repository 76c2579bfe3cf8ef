"""Fourier transforms of indicator functions under ``f^(u) = int f(t) exp(-i(u,t)) dt``."""
from .bessel import j1, jinc_area, seam_gap
from .transforms import (CONVENTION, LambdaSlice, SpectrumGrid, boundary_integral, closed_form,
                         grid_transform, has_closed_form, interval_transform, lemma1_transform,
                         parseval_constant, rasterize, transform)

__all__ = [name for name in dir() if not name.startswith("_")]
