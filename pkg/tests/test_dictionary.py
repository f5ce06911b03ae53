"""Polynomial basis dictionaries: enumeration order, evaluation, dimensional pruning."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eqforge import (
    BasisTerm,
    Dictionary,
    DictionaryError,
    VariableSpec,
    dimensional_dictionary,
    monomials_up_to_degree,
)
from eqforge.dictionary import DIMENSIONLESS

L = (1, 0, 0, 0, 0, 0, 0)
L_PER_T = (1, 0, -1, 0, 0, 0, 0)
L_PER_T2 = (1, 0, -2, 0, 0, 0, 0)
PER_T = (0, 0, -1, 0, 0, 0, 0)


def test_degree3_two_variable_labels():
    d = monomials_up_to_degree(("x", "y"), 3)
    assert d.labels == (
        "1",
        "x",
        "y",
        "x^2",
        "x y",
        "y^2",
        "x^3",
        "x^2 y",
        "x y^2",
        "y^3",
    )


def test_degree0_is_constant_only():
    d = monomials_up_to_degree(("x",), 0)
    assert d.labels == ("1",)
    out = d.evaluate(np.array([[3.0], [7.0]]))
    assert np.array_equal(out, np.ones((2, 1)))


def test_heat_dictionary_has_56_terms():
    d = monomials_up_to_degree(("x", "t", "u", "u_x", "u_xx"), 3)
    assert len(d.terms) == 56
    assert "u_xx" in d.labels
    assert "u u_x" in d.labels


@given(degree=st.integers(0, 5), n_vars=st.integers(1, 4))
def test_term_count_matches_binomial(degree, n_vars):
    names = tuple(f"v{i}" for i in range(n_vars))
    d = monomials_up_to_degree(names, degree)
    assert len(d.terms) == math.comb(degree + n_vars, n_vars)


def test_evaluate_single_row_degree3():
    d = monomials_up_to_degree(("x", "y"), 3)
    out = d.evaluate(np.array([[0.6, 0.2]]))
    expected = [1.0, 0.6, 0.2, 0.36, 0.12, 0.04, 0.216, 0.072, 0.024, 0.008]
    assert np.allclose(out[0], expected, rtol=0, atol=1e-15)


def test_evaluate_constant_column_is_ones():
    d = monomials_up_to_degree(("x", "y"), 2)
    rng = np.random.default_rng(0)
    out = d.evaluate(rng.normal(size=(40, 2)))
    assert np.array_equal(out[:, 0], np.ones(40))


def test_evaluate_specific_term_value():
    d = monomials_up_to_degree(("x", "y"), 3)
    out = d.evaluate(np.array([[2.0, 3.0]]))
    assert out[0, d.labels.index("x^2 y")] == 12.0


def test_evaluate_column_reorder_and_superset():
    d = monomials_up_to_degree(("x", "y"), 2)
    rng = np.random.default_rng(1)
    xy = rng.normal(size=(25, 2))
    base = d.evaluate(xy)
    # extra column plus swapped order; selection is by name
    wide = np.column_stack([xy[:, 1], rng.normal(size=25), xy[:, 0]])
    assert np.array_equal(d.evaluate(wide, columns=("y", "junk", "x")), base)


def test_evaluate_rejects_missing_columns():
    d = monomials_up_to_degree(("x", "y"), 2)
    with pytest.raises(DictionaryError):
        d.evaluate(np.ones((4, 1)), columns=("x",))


def test_evaluate_rejects_nonfinite_rows():
    d = monomials_up_to_degree(("x", "y"), 2)
    samples = np.ones((5, 2))
    samples[3, 1] = np.nan
    with pytest.raises(DictionaryError) as err:
        d.evaluate(samples)
    assert "3" in str(err.value)


def test_duplicate_variable_names_rejected():
    with pytest.raises(DictionaryError):
        monomials_up_to_degree(("x", "x"), 2)


def test_basis_term_display_and_degree():
    t = BasisTerm(exponents=(("x", 2), ("y", 1)))
    assert t.display() == "x^2 y"
    assert t.degree == 3
    assert BasisTerm(exponents=()).display() == "1"


def test_roundtrip_to_dict():
    d = monomials_up_to_degree(("x", "y"), 3)
    clone = Dictionary.from_dict(d.to_dict())
    assert clone.labels == d.labels
    assert clone.variable_names == d.variable_names
    rng = np.random.default_rng(2)
    pts = rng.normal(size=(10, 2))
    assert np.array_equal(clone.evaluate(pts), d.evaluate(pts))


# --- dimensional pruning ------------------------------------------------

SHALLOW_WATER = (
    VariableSpec("g", L_PER_T2),
    VariableSpec("h", L),
    VariableSpec("u", L_PER_T),
    VariableSpec("v", L_PER_T),
    VariableSpec("h_t", L_PER_T),
    VariableSpec("h_x", DIMENSIONLESS),
    VariableSpec("h_y", DIMENSIONLESS),
    VariableSpec("u_x", PER_T),
    VariableSpec("u_y", PER_T),
    VariableSpec("v_x", PER_T),
    VariableSpec("v_y", PER_T),
)


def test_shallow_water_mass_balance_dictionary():
    d = dimensional_dictionary(SHALLOW_WATER, 2, L_PER_T, exclude=("h_t",))
    assert set(d.labels) == {
        "h u_x",
        "h u_y",
        "h v_x",
        "h v_y",
        "u",
        "u h_x",
        "u h_y",
        "v",
        "v h_x",
        "v h_y",
        "h_t h_x",
        "h_t h_y",
    }
    assert len(d.labels) == 12


def test_shallow_water_momentum_dictionary():
    d = dimensional_dictionary(SHALLOW_WATER, 2, L_PER_T2, exclude=("g",))
    assert set(d.labels) == {
        "u u_x",
        "u u_y",
        "u v_x",
        "u v_y",
        "v u_x",
        "v u_y",
        "v v_x",
        "v v_y",
        "h_t u_x",
        "h_t u_y",
        "h_t v_x",
        "h_t v_y",
        "g h_x",
        "g h_y",
    }
    assert len(d.labels) == 14


def test_dimensional_terms_carry_target_dimension():
    d = dimensional_dictionary(SHALLOW_WATER, 2, L_PER_T, exclude=("h_t",))
    variables = {v.name: v for v in SHALLOW_WATER}
    for term in d.terms:
        assert term.dimension(variables) == L_PER_T


def test_dimensional_is_subset_of_unrestricted():
    d = dimensional_dictionary(SHALLOW_WATER, 2, L_PER_T2, exclude=("g",))
    full = monomials_up_to_degree(tuple(v.name for v in SHALLOW_WATER), 2)
    assert set(d.labels) <= set(full.labels)


def test_dimensionless_filter_is_vacuous():
    variables = (VariableSpec("x", DIMENSIONLESS), VariableSpec("y", DIMENSIONLESS))
    d = dimensional_dictionary(variables, 3, DIMENSIONLESS)
    assert d.labels == monomials_up_to_degree(("x", "y"), 3).labels
