from __future__ import annotations

import numpy as np
import pytest

from spinext_core.config import DEFAULT_SETTINGS
from spinext_core.errors import (
    ArfMismatchError,
    DimensionMismatchError,
    OutOfRangeError,
    SearchExhaustedError,
)
from spinext_core.f2core import F2Vec
from spinext_core.group_utils import orbit_stabilizer
from spinext_core.quadform import (
    QuadraticRefinement,
    all_refinements,
    arf_basis_formula,
    pullback,
    random_refinement,
    standard_form,
)
from spinext_core.surface_spin import (
    all_orbits,
    count_fixed,
    count_formula,
    count_recurrence,
    counting_bound_check,
    enumerate_spin,
    index_lower_bound_surface,
    no_extension_witness,
    spin_difference,
    spin_orbit,
    stabilizer_union_size,
    transitivity_witness,
    translate,
)
from spinext_core.symplectic import SymplecticSpace, enumerate_sp, is_symplectic
from tests.utils import forms

EXPECTED_COUNTS = {1: (3, 1), 2: (10, 6), 3: (36, 28), 4: (136, 120), 5: (528, 496)}


class TestCounts:
    @pytest.mark.parametrize("g", [1, 2, 3, 4, 5])
    def test_formula(self, g):
        assert count_formula(g) == EXPECTED_COUNTS[g]

    def test_recurrence_matches_formula(self):
        seq = count_recurrence(12)
        assert len(seq) == 12
        for g, pair in enumerate(seq, start=1):
            assert pair == count_formula(g)
            assert sum(pair) == 1 << (2 * g)

    @pytest.mark.parametrize("g", [1, 2, 3, 4, 5])
    def test_enumeration_matches_formula(self, g):
        part = enumerate_spin(g)
        assert (part.b, part.u) == EXPECTED_COUNTS[g]

    def test_genus_one_partition(self):
        part = enumerate_spin(1)
        assert [q.to_string() for q in part.bounding] == ["00", "01", "10"]
        assert [q.to_string() for q in part.unbounding] == ["11"]
        assert part.to_dict()["b"] == 3

    def test_out_of_range(self):
        with pytest.raises(OutOfRangeError):
            count_formula(0)
        with pytest.raises(OutOfRangeError):
            enumerate_spin(DEFAULT_SETTINGS.g_max + 1)


class TestOrbits:
    def test_genus_one_bounding_orbit(self):
        orbit = spin_orbit(1, QuadraticRefinement.from_string("00"))
        assert orbit.keys == ("00", "01", "10")

    def test_genus_one_unbounding_is_fixed(self):
        assert spin_orbit(1, QuadraticRefinement.from_string("11")).size == 1

    def test_genus_two_orbit_sizes(self):
        assert spin_orbit(2, QuadraticRefinement.from_string("0000")).size == 10
        assert spin_orbit(2, QuadraticRefinement.from_string("1100")).size == 6

    @pytest.mark.parametrize("g", [1, 2, 3])
    def test_exactly_two_orbits_split_by_arf(self, g):
        orbits = all_orbits(g)
        assert len(orbits) == 2
        b, u = count_formula(g)
        by_arf = {arf_basis_formula(o.points[0]): o for o in orbits}
        assert by_arf[0].size == b
        assert by_arf[1].size == u
        for a, orbit in by_arf.items():
            assert all(arf_basis_formula(q) == a for q in orbit.points)

    def test_recorded_words_rebuild_points(self):
        from spinext_core.symplectic import all_transvections

        seed = QuadraticRefinement.from_string("0000")
        orbit = spin_orbit(2, seed, record_words=True)
        gens = all_transvections(seed.space)
        for key, word in orbit.witness_words.items():
            q = seed
            for i in word:
                q = pullback(q, gens[i])
            assert q.to_string() == key

    def test_genus_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            spin_orbit(2, QuadraticRefinement.from_string("00"))

    def test_index_bound_is_orbit_size(self):
        for q in all_refinements(SymplecticSpace(2)):
            assert index_lower_bound_surface(q) == spin_orbit(2, q).size


class TestTransitivity:
    @pytest.mark.parametrize("g", [1, 2])
    def test_every_same_arf_pair(self, g):
        space = SymplecticSpace(g)
        refinements = list(all_refinements(space))
        for q1 in refinements:
            for q2 in refinements:
                if arf_basis_formula(q1) != arf_basis_formula(q2):
                    continue
                m = transitivity_witness(q1, q2)
                assert is_symplectic(space, m.matrix)
                assert pullback(q1, m) == q2

    @pytest.mark.parametrize("g", [3, 4])
    def test_random_same_arf_pairs(self, g):
        rng = np.random.default_rng(g)
        space = SymplecticSpace(g)
        for _ in range(1000):
            q1 = random_refinement(space, rng)
            q2 = random_refinement(space, rng)
            while arf_basis_formula(q2) != arf_basis_formula(q1):
                q2 = random_refinement(space, rng)
            m = transitivity_witness(q1, q2)
            assert is_symplectic(space, m.matrix)
            assert pullback(q1, m) == q2

    def test_arf_mismatch(self):
        q1, q2 = forms("00", "11")
        with pytest.raises(ArfMismatchError):
            transitivity_witness(q1, q2)

    def test_genus_mismatch(self):
        q1, q2 = forms("00", "0000")
        with pytest.raises(DimensionMismatchError):
            transitivity_witness(q1, q2)


class TestWitness:
    def test_genus_one_exhaustive(self):
        w = no_extension_witness(1)
        assert w.method == "exhaustive"
        assert w.element.to_strings() == ["01", "11"]
        assert w.fixed_bounding_count == 0
        assert w.seed is None

    @pytest.mark.parametrize("g", [2, 3])
    def test_random_witness_moves_every_bounding_form(self, g):
        w = no_extension_witness(g, seed=5)
        assert w.method == "random" and w.seed == 5
        assert is_symplectic(w.element.space, w.element.matrix)
        bounding = enumerate_spin(g).bounding
        assert count_fixed(w.element, bounding) == 0
        assert all(pullback(q, w.element) != q for q in bounding)

    def test_same_seed_same_witness(self):
        a = no_extension_witness(2, seed=42)
        b = no_extension_witness(2, seed=42)
        assert a.to_dict() == b.to_dict()

    def test_exhausted_search(self):
        # a single transvection always fixes some bounding form
        settings = DEFAULT_SETTINGS.with_overrides(witness_max_word=1)
        with pytest.raises(SearchExhaustedError) as exc:
            no_extension_witness(2, settings, seed=1, max_tries=5)
        assert exc.value.tries == 5 and exc.value.seed == 1

    def test_genus_beyond_limit(self):
        with pytest.raises(OutOfRangeError):
            no_extension_witness(DEFAULT_SETTINGS.g_witness + 1)


class TestCountingBound:
    def test_genus_one_is_tight(self):
        check = counting_bound_check(1, exact=True)
        assert (check.order, check.b, check.stabilizer_order) == (6, 3, 2)
        assert check.lhs == 4 and check.ok
        assert check.union_size == 4

    def test_genus_two(self):
        check = counting_bound_check(2, exact=True)
        assert check.order == 720 and check.stabilizer_order == 72
        assert check.lhs == 711 and check.ok
        assert check.union_size <= 711
        assert check.union_size == stabilizer_union_size(2)

    def test_genus_three(self):
        check = counting_bound_check(3)
        assert check.order == 1451520 and check.ok
        assert check.union_size is None

    @pytest.mark.parametrize("g", [1, 2])
    def test_stabilizer_counted_over_the_whole_group(self, g):
        elements = enumerate_sp(SymplecticSpace(g)).points
        for a, size in zip((0, 1), count_formula(g), strict=True):
            orbit, stab, total = orbit_stabilizer(
                elements, standard_form(g, a), lambda m, q: pullback(q, m)
            )
            assert orbit == size
            assert orbit * stab == total == len(elements)
        assert counting_bound_check(g).stabilizer_order == len(elements) // count_formula(g)[0]


class TestDifferences:
    def test_translate_by_difference(self):
        q1, q2 = forms("0110", "1100")
        h = spin_difference(q1, q2)
        assert h.to_string() == "1010"
        assert translate(q2, h) == q1

    def test_translate_checks_dimension(self):
        with pytest.raises(DimensionMismatchError):
            translate(QuadraticRefinement.from_string("00"), F2Vec.zeros(4))


@pytest.mark.slow
def test_enumeration_at_genus_six():
    part = enumerate_spin(6)
    assert (part.b, part.u) == count_formula(6) == (2080, 2016)
