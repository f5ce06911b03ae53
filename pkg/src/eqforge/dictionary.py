"""Candidate basis-function dictionaries.

A dictionary is an ordered list of monomial terms over named variables.
Terms are ordered by total degree, then lexicographically in variable
declaration order, so that column order in a design matrix is stable and
reproducible.  Variables may carry physical-dimension vectors (integer
exponents over the 7 SI base dimensions), which enables construction of
dimensionally homogeneous dictionaries.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

#: Number of base physical dimensions (SI: length, mass, time, current,
#: temperature, amount of substance, luminous intensity).
N_BASE_DIMENSIONS = 7

DIMENSIONLESS = (0,) * N_BASE_DIMENSIONS


class DictionaryError(ValueError):
    """Invalid dictionary configuration (duplicate names, bad dimensions, ...)."""


def _as_dimension(dim) -> tuple:
    if dim is None:
        return DIMENSIONLESS
    dim = tuple(int(d) for d in dim)
    if len(dim) != N_BASE_DIMENSIONS:
        raise DictionaryError(
            f"dimension vector must have {N_BASE_DIMENSIONS} entries, got {len(dim)}"
        )
    return dim


@dataclass(frozen=True)
class VariableSpec:
    """A named variable with an optional physical dimension.

    ``dimension`` is a vector of integer exponents over the SI base
    dimensions; all-zeros means dimensionless.
    """

    name: str
    dimension: tuple = DIMENSIONLESS

    def __post_init__(self):
        if not self.name:
            raise DictionaryError("variable name must be non-empty")
        object.__setattr__(self, "dimension", _as_dimension(self.dimension))


@dataclass(frozen=True)
class BasisTerm:
    """A monomial: a map from variable name to non-negative exponent.

    Stored as ``(name, exponent)`` pairs in variable declaration order with
    zero exponents dropped; the empty tuple is the constant term "1".
    """

    exponents: tuple = ()

    def __post_init__(self):
        exps = tuple((str(n), int(e)) for n, e in self.exponents if int(e) != 0)
        if any(e < 0 for _, e in exps):
            raise DictionaryError("exponents must be non-negative")
        object.__setattr__(self, "exponents", exps)

    @property
    def display(self) -> str:
        """Canonical human-readable form, e.g. ``"x^2 y"``; constant is ``"1"``."""
        if not self.exponents:
            return "1"
        return " ".join(n if e == 1 else f"{n}^{e}" for n, e in self.exponents)

    @property
    def degree(self) -> int:
        return sum(e for _, e in self.exponents)

    def dimension(self, variables) -> tuple:
        """Aggregate physical dimension under the given variable specs."""
        dims = {v.name: v.dimension for v in variables}
        total = [0] * N_BASE_DIMENSIONS
        for name, exp in self.exponents:
            if name not in dims:
                raise DictionaryError(f"term references undeclared variable {name!r}")
            for k in range(N_BASE_DIMENSIONS):
                total[k] += exp * dims[name][k]
        return tuple(total)

    def __str__(self):
        return self.display


@dataclass(frozen=True)
class Dictionary:
    """An ordered, duplicate-free list of basis terms over declared variables."""

    variables: tuple = ()
    terms: tuple = ()
    target_dimension: tuple | None = None

    def __post_init__(self):
        variables = tuple(
            v if isinstance(v, VariableSpec) else VariableSpec(str(v))
            for v in self.variables
        )
        object.__setattr__(self, "variables", variables)
        names = [v.name for v in variables]
        if len(set(names)) != len(names):
            raise DictionaryError(f"duplicate variable names in {names}")
        terms = tuple(
            t if isinstance(t, BasisTerm) else BasisTerm(tuple(t)) for t in self.terms
        )
        object.__setattr__(self, "terms", terms)
        if len(set(terms)) != len(terms):
            raise DictionaryError("duplicate terms in dictionary")
        if self.target_dimension is not None:
            target = _as_dimension(self.target_dimension)
            object.__setattr__(self, "target_dimension", target)
            for t in terms:
                if t.dimension(variables) != target:
                    raise DictionaryError(
                        f"term {t.display!r} has dimension {t.dimension(variables)}, "
                        f"expected {target}"
                    )

    def __len__(self):
        return len(self.terms)

    @property
    def labels(self) -> tuple:
        return tuple(t.display for t in self.terms)

    @property
    def variable_names(self) -> tuple:
        return tuple(v.name for v in self.variables)

    def evaluate(self, samples, columns=None) -> np.ndarray:
        """Evaluate every term at every sample row.

        ``samples`` is an N x V matrix whose columns align with the declared
        variables; pass ``columns`` (a sequence of names) when the sample
        columns are in a different order or a superset.  Rows containing
        non-finite values are rejected with their indices reported.
        """
        samples = np.atleast_2d(np.asarray(samples, dtype=float))
        names = self.variable_names
        if columns is None:
            if samples.shape[1] != len(names):
                raise DictionaryError(
                    f"expected {len(names)} sample columns, got {samples.shape[1]}"
                )
            index = {n: k for k, n in enumerate(names)}
        else:
            columns = list(columns)
            missing = [n for n in names if n not in columns]
            if missing:
                raise DictionaryError(f"samples missing variable columns {missing}")
            index = {n: columns.index(n) for n in names}
        used = samples[:, [index[n] for n in names]]
        bad = np.flatnonzero(~np.isfinite(used).all(axis=1))
        if bad.size:
            raise DictionaryError(
                f"non-finite values in sample rows {bad.tolist()[:20]}"
                + ("..." if bad.size > 20 else "")
            )
        out = np.ones((samples.shape[0], len(self.terms)))
        col = {n: used[:, k] for k, n in enumerate(names)}
        for j, term in enumerate(self.terms):
            for name, exp in term.exponents:
                out[:, j] *= col[name] ** exp
        return out

    def to_dict(self, include_terms: bool = True) -> dict:
        d = {
            "variables": [
                {"name": v.name}
                | ({} if v.dimension == DIMENSIONLESS else {"dimension": list(v.dimension)})
                for v in self.variables
            ]
        }
        if self.target_dimension is not None:
            d["target_dimension"] = list(self.target_dimension)
        if include_terms:
            d["terms"] = [[[n, e] for n, e in t.exponents] for t in self.terms]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Dictionary":
        variables = tuple(
            VariableSpec(v["name"], _as_dimension(v.get("dimension")))
            for v in d["variables"]
        )
        terms = tuple(BasisTerm(tuple((n, e) for n, e in t)) for t in d["terms"])
        return cls(variables, terms, d.get("target_dimension"))


def monomials_up_to_degree(variables, degree: int) -> Dictionary:
    """All monomials of total degree <= ``degree`` over the given variables.

    Count is C(degree + V, V); order is graded (by total degree), then
    lexicographic in declaration order within each degree, e.g.
    {1, x, y, x^2, x y, y^2, ...}.
    """
    if degree < 0:
        raise DictionaryError("degree must be non-negative")
    variables = tuple(
        v if isinstance(v, VariableSpec) else VariableSpec(str(v)) for v in variables
    )
    if not variables:
        raise DictionaryError("at least one variable required")
    names = [v.name for v in variables]
    terms = []
    for d in range(degree + 1):
        for combo in itertools.combinations_with_replacement(range(len(names)), d):
            exps = [0] * len(names)
            for k in combo:
                exps[k] += 1
            terms.append(BasisTerm(tuple(zip(names, exps))))
    assert len(terms) == math.comb(degree + len(names), len(names))
    return Dictionary(variables, tuple(terms))


def dimensional_dictionary(
    variables, degree: int, target_dimension, exclude=()
) -> Dictionary:
    """Monomials up to ``degree`` whose aggregate dimension equals the target.

    ``exclude`` drops terms by display string; use it to omit terms that are
    not admissible regressors even though dimensionally consistent (e.g. the
    bare target quantity when it also appears among the variables, or a bare
    physical constant).  An empty result is allowed — widen the degree if
    no term matches.
    """
    target = _as_dimension(target_dimension)
    full = monomials_up_to_degree(variables, degree)
    exclude = set(exclude)
    kept = tuple(
        t
        for t in full.terms
        if t.dimension(full.variables) == target and t.display not in exclude
    )
    return Dictionary(full.variables, kept, target)
