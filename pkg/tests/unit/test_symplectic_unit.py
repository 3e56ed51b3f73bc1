from __future__ import annotations

import numpy as np
import pytest

from spinext_core.errors import (
    DimensionMismatchError,
    NotSymplecticError,
    OutOfRangeError,
    ZeroVectorError,
)
from spinext_core.f2core import F2Mat, F2Vec
from spinext_core.symplectic import (
    SymplecticElement,
    SymplecticSpace,
    all_transvections,
    chain_transvections,
    enumerate_sp,
    formula_order,
    group_order,
    is_symplectic,
    omega,
    split_form_value,
    stabilizer_chain,
    transvection,
)


def test_interleaved_basis_handles():
    space = SymplecticSpace(3)
    assert space.dim == 6
    assert space.a(1).to_string() == "100000"
    assert space.b(1).to_string() == "010000"
    assert space.a(3).to_string() == "000010"
    assert space.b(3).to_string() == "000001"
    with pytest.raises(OutOfRangeError):
        space.a(4)
    with pytest.raises(OutOfRangeError):
        SymplecticSpace(0)


def test_omega_pairs_handles():
    space = SymplecticSpace(2)
    a1, b1, a2, b2 = (space.basis(k) for k in range(4))
    assert omega(space, a1, b1) == 1
    assert omega(space, b1, a1) == 1
    assert omega(space, a1, a2) == 0
    assert omega(space, a1, b2) == 0
    assert omega(space, a2, b2) == 1
    for x in space.vectors():
        assert omega(space, x, x) == 0


def test_omega_matches_gram_matrix():
    space = SymplecticSpace(2)
    gram = space.gram().to_dense()
    for x in space.vectors():
        for y in space.vectors():
            expected = int(x.bits @ gram @ y.bits) & 1
            assert omega(space, x, y) == expected


def test_split_form_value():
    assert split_form_value(F2Vec.from_string("11")) == 1
    assert split_form_value(F2Vec.from_string("10")) == 0
    assert split_form_value(F2Vec.from_string("1111")) == 0
    assert split_form_value(F2Vec.from_string("0111")) == 1


def test_transvection_formula_and_symplecticity():
    space = SymplecticSpace(2)
    for t in all_transvections(space):
        assert is_symplectic(space, t.matrix)
        assert (t @ t).is_identity()
    v = space.a(1)
    t = transvection(space, v)
    # x -> x + omega(x, v) v
    for x in space.vectors():
        expected = x + v if omega(space, x, v) else x
        assert t.apply(x) == expected


def test_zero_transvection_rejected():
    space = SymplecticSpace(1)
    with pytest.raises(ZeroVectorError):
        transvection(space, space.zero())


def test_non_symplectic_matrix_rejected():
    space = SymplecticSpace(1)
    with pytest.raises(NotSymplecticError):
        SymplecticElement.from_strings(space, ["10", "00"])
    with pytest.raises(DimensionMismatchError):
        SymplecticElement.from_strings(space, ["1000", "0100", "0010", "0001"])
    # every invertible 2x2 matrix over Z/2 preserves the pairing
    assert is_symplectic(space, F2Mat.from_strings(["11", "01"]))


def test_inverse_and_composition():
    space = SymplecticSpace(3)
    gens = chain_transvections(space)
    rng = np.random.default_rng(3)
    m = SymplecticElement.identity(space)
    for idx in rng.integers(0, len(gens), 25):
        m = gens[int(idx)] @ m
    assert is_symplectic(space, m.matrix)
    assert (m @ m.inverse()).is_identity()
    assert (m.inverse() @ m).is_identity()


def test_chain_generators_count():
    for g in range(1, 5):
        assert len(chain_transvections(SymplecticSpace(g))) == 3 * g - 1


@pytest.mark.parametrize("g,order", [(1, 6), (2, 720), (3, 1451520)])
def test_formula_order(g, order):
    assert formula_order(g) == order


@pytest.mark.parametrize("g", [1, 2, 3, pytest.param(4, marks=pytest.mark.slow)])
def test_chain_order_matches_formula(g):
    space = SymplecticSpace(g)
    sizes = stabilizer_chain(space)
    assert sizes[0] == (1 << (2 * g)) - 1
    assert group_order(space) == formula_order(g)


@pytest.mark.parametrize("g", [1, 2])
def test_all_transvections_generate_same_group(g):
    space = SymplecticSpace(g)
    assert group_order(space, all_transvections(space)) == group_order(space)


def test_subset_generates_proper_subgroup():
    space = SymplecticSpace(1)
    assert group_order(space, [transvection(space, space.a(1))]) == 2


@pytest.mark.parametrize("g,order", [(1, 6), (2, 720)])
def test_enumeration_matches_order(g, order):
    space = SymplecticSpace(g)
    elements = enumerate_sp(space).points
    assert len(elements) == order
    assert all(is_symplectic(space, m.matrix) for m in elements)
