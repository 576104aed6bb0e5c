import random
from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_matrix
from spencer_lab.exactla import Matrix
from spencer_lab.multilinear import (
    DegreeError,
    GradedSlot,
    contraction,
    exterior_indices,
    exterior_tensor_embedding,
    multi_indices,
    partial_matrix,
    phi_partial_matrix,
    slot_dim,
    wedge_sign,
)
from spencer_lab.tableau import TableauMap, prolong_phi


def test_multi_index_order():
    assert multi_indices(2, 2) == ((2, 0), (1, 1), (0, 2))
    assert multi_indices(3, 1) == ((1, 0, 0), (0, 1, 0), (0, 0, 1))
    assert multi_indices(2, 0) == ((0, 0),)


def test_exterior_order():
    assert exterior_indices(3, 2) == ((0, 1), (0, 2), (1, 2))
    assert exterior_indices(2, 3) == ()


@pytest.mark.parametrize("n,m,j,k", [(2, 1, 0, 2), (3, 2, 1, 3), (4, 1, 2, 1), (3, 1, 3, 0)])
def test_slot_dim(n, m, j, k):
    assert slot_dim(GradedSlot(n, m, j, k)) == comb(n, j) * comb(n + k - 1, k) * m
    assert len(list(GradedSlot(n, m, j, k).enumerate())) == slot_dim(GradedSlot(n, m, j, k))


def test_wedge_sign():
    assert wedge_sign((0,), 1) == (1, (0, 1))
    assert wedge_sign((1,), 0) == (-1, (0, 1))
    assert wedge_sign((0, 2), 1) == (-1, (0, 1, 2))
    assert wedge_sign((0, 1), 1) == (0, None)


def test_contraction_is_partial_derivative():
    # x1^2 -> 2 x1 in direction 1, and x1 x2 -> x2 in direction 1
    c = contraction(GradedSlot(2, 1, 0, 2), 1)
    assert c.apply([1, 0, 0]) == (Fraction(2), Fraction(0))
    assert c.apply([0, 1, 0]) == (Fraction(0), Fraction(1))


def test_partial_on_square():
    # ∂(x1^2) = 2 x1 dx1 with the derivative convention
    d = partial_matrix(GradedSlot(1, 1, 0, 2))
    assert d.apply([1]) == (Fraction(2),)


def test_degree_errors():
    with pytest.raises(DegreeError):
        partial_matrix(GradedSlot(2, 1, 0, 0))
    with pytest.raises(DegreeError):
        partial_matrix(GradedSlot(2, 1, 2, 1))
    with pytest.raises(DegreeError):
        contraction(GradedSlot(2, 1, 1, 2), 1)
    with pytest.raises(ValueError):
        contraction(GradedSlot(2, 1, 0, 2), 3)


def _dd_slots():
    for n in range(1, 5):
        for k in range(2, 5):
            for j in range(0, n - 1):
                for m in (1, 2):
                    yield n, m, j, k


@pytest.mark.parametrize("n,m,j,k", list(_dd_slots()))
def test_partial_squares_to_zero(n, m, j, k):
    d1 = partial_matrix(GradedSlot(n, m, j, k))
    d2 = partial_matrix(GradedSlot(n, m, j + 1, k - 1))
    assert (d2 @ d1).is_zero()


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 4), st.integers(1, 2), st.integers(0, 10**6))
def test_phi_partial_composes_to_zero(n, m, seed):
    rng = random.Random(seed)
    d = rng.randint(1, 3)
    phi = random_matrix(rng, n * m, d)
    # Λ^j ⊗ g^{(1)}(φ) → Λ^{j+1} ⊗ g → Λ^{j+2} ⊗ W
    g1 = prolong_phi(TableauMap(n, m, phi))
    for j in range(0, n - 1):
        first = partial_matrix(GradedSlot(n, d, j, 1)) @ exterior_tensor_embedding(n, j, g1.inclusion())
        assert (phi_partial_matrix(n, phi, j + 1) @ first).is_zero()


def test_phi_partial_of_inclusion_matches_partial():
    n, m = 3, 2
    inc = Matrix.identity(n * m)
    for j in range(n):
        assert phi_partial_matrix(n, inc, j) == partial_matrix(GradedSlot(n, m, j, 1))
