import random
from fractions import Fraction

import pytest

from oracles import all_trees, free_lie_dimension, pbw_lie_dimensions
from whitehead_dgl.errors import ValidationError
from whitehead_dgl.graded_lie import FiniteLie, FreeLieAlgebra, sign

GENERATOR_SETS = [(1,), (2,), (1, 1), (1, 2), (2, 2), (2, 3), (1, 3), (1, 1, 1), (1, 1, 2), (1, 2, 3), (2, 2, 2),
                  (3, 4)]


def free(degrees):
    return FreeLieAlgebra([(f"g{i}", d) for i, d in enumerate(degrees)])


@pytest.mark.parametrize("degrees", GENERATOR_SETS, ids=str)
def test_dimensions_match_pbw_through_degree_8(degrees):
    A = free(degrees)
    expected = pbw_lie_dimensions(degrees, 8)
    assert [A.dim(n) for n in range(1, 9)] == [expected[n] for n in range(1, 9)]


@pytest.mark.parametrize("degrees", GENERATOR_SETS, ids=str)
def test_dimensions_match_tree_rank(degrees):
    A = free(degrees)
    for n in range(1, 9):
        if len(all_trees(list(degrees), n)) > 600:
            break
        assert A.dim(n) == free_lie_dimension(list(degrees), n)


def random_element(rng, A, n):
    basis = A.basis(n)
    if not basis:
        return A.zero()
    return A.combination((Fraction(rng.randint(-3, 3), rng.randint(1, 2)), b) for b in basis)


@pytest.mark.parametrize("seed", range(5))
def test_graded_antisymmetry_and_jacobi(seed):
    rng = random.Random(seed)
    A = free((1, 2, 2))
    for _ in range(10):
        p, q, r = (rng.randint(1, 3) for _ in range(3))
        x, y, z = random_element(rng, A, p), random_element(rng, A, q), random_element(rng, A, r)
        assert A.bracket(x, y) == -sign(p * q) * A.bracket(y, x)
        lhs = A.bracket(x, A.bracket(y, z))
        rhs = A.bracket(A.bracket(x, y), z) + sign(p * q) * A.bracket(y, A.bracket(x, z))
        assert lhs == rhs


def test_normal_form_and_coordinates_roundtrip():
    A = free((1, 2))
    a, b = A.gens()
    x = A.bracket(a, A.bracket(a, b)) * 3 + A.bracket(A.bracket(a, a), b)
    nf = A.normal_form(x)
    assert nf == x
    coords = A.coordinates(x, 4)
    assert A.element(coords, 4) == x


def test_odd_square_survives_even_square_vanishes():
    A = free((1, 2))
    a, b = A.gens()
    assert not A.bracket(a, a).is_zero()
    assert A.bracket(b, b).is_zero()


def test_mixing_algebras_is_rejected():
    A, B = free((1,)), FreeLieAlgebra([("h", 1)])
    with pytest.raises(Exception):
        A.gen(0) + B.gen(0)


def test_finite_lie_rejects_broken_jacobi():
    # [x,[x,x]] must vanish for odd x, so a nonzero value breaks Jacobi
    with pytest.raises(ValidationError):
        FiniteLie([("x", 1), ("w", 2), ("t", 3)], {("x", "x"): {"w": 1}, ("x", "w"): {"t": 1}})


def test_finite_lie_rejects_even_square():
    with pytest.raises(ValidationError):
        FiniteLie([("u", 2), ("v", 4)], {("u", "u"): {"v": 1}})


def test_finite_lie_brackets_and_top_degree():
    H = FiniteLie([("u", 3), ("uu", 6)], {("u", "u"): {"uu": 2}})
    u = H.gen("u")
    assert H.bracket(u, u) == H.combination([(2, H.gen("uu"))])
    assert H.top_degree() == 6
    assert H.has_zero_differential()
    assert not H.check_axioms()
