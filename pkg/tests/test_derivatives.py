"""Finite-difference stencils and their interior masks."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from eqforge import (
    Grid1D,
    StencilError,
    central_diff_3pt,
    central_diff_5pt,
    forward_diff_2pt,
    intersect_masks,
    second_central_diff,
    second_central_diff_5pt,
)

OPS = (
    central_diff_3pt,
    central_diff_5pt,
    second_central_diff,
    second_central_diff_5pt,
    forward_diff_2pt,
)


def test_central_3pt_on_quadratic():
    x = np.linspace(0.0, 3.0, 13)
    deriv, mask = central_diff_3pt(x**2, spacing=x[1] - x[0])
    # exact for polynomials of degree <= 2
    assert np.allclose(deriv[mask.valid], 2.0 * x[mask.valid], atol=1e-12)
    assert mask.valid[0] == False and mask.valid[-1] == False  # noqa: E712
    assert mask.valid[1:-1].all()
    assert np.isnan(deriv[~mask.valid]).all()


def test_central_3pt_truncation_bound():
    h = 0.01
    x = np.arange(0.0, 2.0 * np.pi, h)
    deriv, mask = central_diff_3pt(np.sin(x), spacing=h)
    err = np.abs(deriv[mask.valid] - np.cos(x[mask.valid]))
    assert err.max() <= h**2 / 6.0 + 1e-12  # (h^2/6) max |f'''|


def test_constant_input_gives_zero():
    c = np.full(9, 4.2)
    for op in OPS:
        deriv, mask = op(c, spacing=0.5)
        assert np.allclose(deriv[mask.valid], 0.0, atol=1e-12)


def test_central_5pt_exact_on_cubic():
    x = np.linspace(-1.0, 1.0, 20)
    deriv, mask = central_diff_5pt(x**3 - 2.0 * x, spacing=x[1] - x[0])
    assert mask.valid.sum() == 16
    assert not mask.valid[:2].any() and not mask.valid[-2:].any()
    assert np.allclose(deriv[mask.valid], 3.0 * x[mask.valid] ** 2 - 2.0, atol=1e-12)


def test_second_central_on_quadratic():
    x = np.linspace(0.0, 1.0, 11)
    deriv, mask = second_central_diff(x**2, spacing=0.1)
    assert np.allclose(deriv[mask.valid], 2.0, atol=1e-10)


def test_second_central_truncation():
    h = 0.01
    x = np.arange(0.0, 3.0, h)
    deriv, mask = second_central_diff(np.sin(x), spacing=h)
    assert np.abs(deriv[mask.valid] + np.sin(x[mask.valid])).max() <= 1e-4


def test_second_central_5pt_exact_on_quartic():
    x = np.linspace(0.0, 2.0, 25)
    deriv, mask = second_central_diff_5pt(x**4, spacing=x[1] - x[0])
    assert np.allclose(deriv[mask.valid], 12.0 * x[mask.valid] ** 2, atol=1e-9)


def test_forward_2pt():
    deriv, mask = forward_diff_2pt(np.array([0.0, 1.0, 4.0]), spacing=1.0)
    assert np.array_equal(mask.valid, [True, True, False])
    assert deriv[0] == 1.0 and deriv[1] == 3.0 and np.isnan(deriv[2])


def test_grid_argument_matches_spacing_argument():
    rng = np.random.default_rng(3)
    y = rng.normal(size=30)
    for op in OPS:
        a, ma = op(Grid1D(y, 0.25))
        b, mb = op(y, spacing=0.25)
        assert np.array_equal(ma.valid, mb.valid)
        assert np.array_equal(a[ma.valid], b[mb.valid])


@given(seed=st.integers(0, 10_000), a=st.floats(-3, 3), b=st.floats(-3, 3))
def test_linearity_on_interior(seed, a, b):
    rng = np.random.default_rng(seed)
    f = rng.normal(size=16)
    g = rng.normal(size=16)
    for op in OPS:
        lhs, mask = op(a * f + b * g, spacing=0.5)
        rf, _ = op(f, spacing=0.5)
        rg, _ = op(g, spacing=0.5)
        assert np.allclose(
            lhs[mask.valid], a * rf[mask.valid] + b * rg[mask.valid], atol=1e-9
        )


def test_intersect_masks():
    _, m3 = central_diff_3pt(np.zeros(10), spacing=1.0)
    _, m5 = central_diff_5pt(np.zeros(10), spacing=1.0)
    both = intersect_masks(m3, m5)
    assert np.array_equal(both.valid, m5.valid)
    assert np.array_equal((m3 & m5).valid, both.valid)


def test_too_short_input_rejected():
    with pytest.raises(StencilError):
        central_diff_3pt(np.ones(2), spacing=1.0)
    with pytest.raises(StencilError):
        central_diff_5pt(np.ones(4), spacing=1.0)
    with pytest.raises(StencilError):
        second_central_diff_5pt(np.ones(3), spacing=1.0)


def test_missing_spacing_rejected():
    with pytest.raises(StencilError):
        central_diff_3pt(np.ones(6))


def test_bad_spacing_rejected():
    with pytest.raises(StencilError):
        central_diff_3pt(np.ones(6), spacing=0.0)
