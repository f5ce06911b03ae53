"""Finite-difference derivative estimation on uniform grids.

All stencils are central differences; points where the stencil does not fit
are masked invalid and their derivative entries set to NaN, so that any
accidental use downstream fails loudly.  Masks from composed applications
intersect with :func:`intersect_masks`.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class StencilError(ValueError):
    """Grid too short for the requested stencil."""


@dataclass(frozen=True)
class Grid1D:
    """Uniformly sampled values with positive spacing."""

    values: np.ndarray
    spacing: float

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if self.values.ndim != 1:
            raise StencilError("Grid1D values must be one-dimensional")
        if not self.spacing > 0:
            raise StencilError("spacing must be positive")


@dataclass(frozen=True)
class InteriorMask:
    """Boolean mask marking points where the stencil fit."""

    valid: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "valid", np.asarray(self.valid, dtype=bool))

    def __and__(self, other: "InteriorMask") -> "InteriorMask":
        return InteriorMask(self.valid & other.valid)


def intersect_masks(*masks: InteriorMask) -> InteriorMask:
    valid = masks[0].valid.copy()
    for m in masks[1:]:
        valid &= m.valid
    return InteriorMask(valid)


def _unpack(values, spacing):
    if isinstance(values, Grid1D):
        return values.values, values.spacing
    if spacing is None:
        raise StencilError("spacing required when values is a plain array")
    return np.asarray(values, dtype=float), float(spacing)


def _masked(deriv, radius, n):
    valid = np.zeros(n, dtype=bool)
    valid[radius : n - radius] = True
    out = np.full(n, np.nan)
    out[valid] = deriv
    return out, InteriorMask(valid)


def central_diff_3pt(values, spacing=None):
    """First derivative, (v[i+1] - v[i-1]) / (2h); one point masked per end."""
    v, h = _unpack(values, spacing)
    if v.size < 3:
        raise StencilError("need at least 3 points for the 3-point stencil")
    d = (v[2:] - v[:-2]) / (2.0 * h)
    return _masked(d, 1, v.size)


def central_diff_5pt(values, spacing=None):
    """First derivative, (-v[i+2] + 8v[i+1] - 8v[i-1] + v[i-2]) / (12h)."""
    v, h = _unpack(values, spacing)
    if v.size < 5:
        raise StencilError("need at least 5 points for the 5-point stencil")
    d = (-v[4:] + 8.0 * v[3:-1] - 8.0 * v[1:-3] + v[:-4]) / (12.0 * h)
    return _masked(d, 2, v.size)


def second_central_diff(values, spacing=None):
    """Second derivative, (v[i+1] - 2v[i] + v[i-1]) / h^2."""
    v, h = _unpack(values, spacing)
    if v.size < 3:
        raise StencilError("need at least 3 points for the 3-point stencil")
    d = (v[2:] - 2.0 * v[1:-1] + v[:-2]) / (h * h)
    return _masked(d, 1, v.size)


def second_central_diff_5pt(values, spacing=None):
    """Second derivative, (-v[i+2] + 16v[i+1] - 30v[i] + 16v[i-1] - v[i-2]) / (12h^2).

    Fourth-order accurate; masks two points per end, matching the width of
    :func:`central_diff_5pt` so first- and second-derivative columns share a
    common interior.
    """
    v, h = _unpack(values, spacing)
    if v.size < 5:
        raise StencilError("need at least 5 points for the 5-point stencil")
    d = (-v[4:] + 16.0 * v[3:-1] - 30.0 * v[2:-2] + 16.0 * v[1:-3] - v[:-4]) / (
        12.0 * h * h
    )
    return _masked(d, 2, v.size)


def forward_diff_2pt(values, spacing=None):
    """Two-frame forward difference, (v[i+1] - v[i]) / h; last point masked.

    For time derivatives computed "using the points from two adjacent
    frames" when only two frames are available.
    """
    v, h = _unpack(values, spacing)
    if v.size < 2:
        raise StencilError("need at least 2 points")
    d = (v[1:] - v[:-1]) / h
    valid = np.ones(v.size, dtype=bool)
    valid[-1] = False
    out = np.full(v.size, np.nan)
    out[:-1] = d
    return out, InteriorMask(valid)
