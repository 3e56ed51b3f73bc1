from __future__ import annotations

import itertools

import numpy as np
import pytest

from spinext_core.errors import (
    DimensionMismatchError,
    InvariantViolationError,
    MalformedInputError,
    OutOfRangeError,
    PreconditionError,
    SingularMatrixError,
)
from spinext_core.f2core import F2Mat, mat_mul, rank
from spinext_core.quadform import arf
from spinext_core.torus_spin import (
    T3_BOUND,
    T3Tag,
    T3Verdict,
    TorusSpin,
    dehn_twist_matrix,
    gl_order,
    index_lower_bound_torus,
    t3_signature_gate,
    torus_act,
    torus_as_surface,
    torus_orbit,
    twist_closure,
    twist_matrices,
)


def _bits(rng: np.random.Generator, p: int) -> str:
    return "".join(str(int(b)) for b in rng.integers(0, 2, p))


def _random_invertible(p: int, rng: np.random.Generator) -> F2Mat:
    while True:
        m = F2Mat.from_dense(rng.integers(0, 2, (p, p)))
        if rank(m) == p:
            return m


def _count_invertible(p: int) -> int:
    count = 0
    for bits in itertools.product((0, 1), repeat=p * p):
        m = F2Mat.from_dense(np.array(bits, dtype=np.uint8).reshape(p, p))
        count += rank(m) == p
    return count


class TestTorusSpin:
    def test_lie_structure(self):
        s = TorusSpin.lie(3)
        assert s.is_lie
        assert s.to_string() == "000"
        assert s.to_dict() == {"p": 3, "diff": "000"}

    def test_parse(self):
        s = TorusSpin.from_string("0110")
        assert s.p == 4 and not s.is_lie
        with pytest.raises(MalformedInputError):
            TorusSpin.from_string("01x")
        with pytest.raises(OutOfRangeError):
            TorusSpin.from_string("")


class TestTwists:
    def test_twist_adds_one_basis_vector_to_another(self):
        m = dehn_twist_matrix(3, 1, 2)
        # column i-1 is e_i + e_j
        assert m.to_strings() == ["100", "110", "001"]
        assert len(twist_matrices(3)) == 6

    def test_bad_indices(self):
        with pytest.raises(PreconditionError):
            dehn_twist_matrix(3, 2, 2)
        with pytest.raises(OutOfRangeError):
            dehn_twist_matrix(3, 0, 1)

    def test_action_is_transpose(self):
        m = dehn_twist_matrix(2, 1, 2)
        assert torus_act(m, TorusSpin.from_string("01")).to_string() == "11"
        assert torus_act(m, TorusSpin.from_string("10")).to_string() == "10"

    def test_action_composes_contravariantly(self):
        a = dehn_twist_matrix(3, 1, 2)
        b = dehn_twist_matrix(3, 2, 3)
        s = TorusSpin.from_string("001")
        assert torus_act(b, torus_act(a, s)) == torus_act(mat_mul(a, b), s)

    def test_singular_or_mismatched_matrix(self):
        with pytest.raises(SingularMatrixError):
            torus_act(F2Mat.from_strings(["11", "11"]), TorusSpin.lie(2))
        with pytest.raises(DimensionMismatchError):
            torus_act(F2Mat.identity(3), TorusSpin.lie(2))

    @pytest.mark.parametrize("p", range(1, 9))
    def test_action_and_fixed_point_on_random_matrices(self, p):
        rng = np.random.default_rng(p)
        lie = TorusSpin.lie(p)
        for _ in range(1000):
            a, b = _random_invertible(p, rng), _random_invertible(p, rng)
            s = TorusSpin.from_string(_bits(rng, p))
            assert torus_act(a, lie) == lie
            assert torus_act(a, torus_act(b, s)) == torus_act(mat_mul(b, a), s)
            assert torus_act(F2Mat.identity(p), s) == s

    @pytest.mark.parametrize("p", [1, 2, 3])
    def test_closure_matches_counted_invertible_matrices(self, p):
        assert twist_closure(p).size == _count_invertible(p)

    @pytest.mark.slow
    def test_closure_matches_counted_invertible_matrices_p4(self):
        assert twist_closure(4).size == _count_invertible(4)

    @pytest.mark.parametrize("p,order", [(1, 1), (2, 6), (3, 168)])
    def test_twists_generate_gl(self, p, order):
        assert gl_order(p) == order
        assert twist_closure(p).size == order

    @pytest.mark.slow
    def test_twists_generate_gl4(self):
        assert twist_closure(4).size == gl_order(4) == 20160


class TestOrbits:
    @pytest.mark.parametrize("p", range(1, 11))
    def test_two_orbits(self, p):
        assert torus_orbit(p, TorusSpin.lie(p)).size == 1
        odd = TorusSpin.from_string("1" + "0" * (p - 1))
        orbit = torus_orbit(p, odd)
        assert orbit.size == (1 << p) - 1
        assert TorusSpin.lie(p) not in orbit

    def test_index_bounds(self):
        assert index_lower_bound_torus(TorusSpin.lie(5)) == 1
        assert index_lower_bound_torus(TorusSpin.from_string("00100")) == 31

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            torus_orbit(3, TorusSpin.lie(2))


class TestSurfaceView:
    def test_lie_torus_is_the_unbounding_form(self):
        q = torus_as_surface(TorusSpin.lie(2))
        assert q.to_string() == "11"
        assert arf(q) == 1

    def test_other_structures_bound(self):
        for text in ("01", "10", "11"):
            assert arf(torus_as_surface(TorusSpin.from_string(text))) == 0

    def test_only_two_torus(self):
        with pytest.raises(PreconditionError):
            torus_as_surface(TorusSpin.lie(3))


class TestT3Gate:
    @pytest.mark.parametrize("sig", range(-32, 33))
    def test_residues(self, sig):
        verdict = t3_signature_gate(sig)
        residue = sig % 16
        if residue == 0:
            assert verdict == T3Verdict(T3Tag.BOUND_APPLIES, T3_BOUND)
        elif residue == 8:
            assert verdict.tag is T3Tag.INDETERMINATE and verdict.bound is None
        else:
            assert verdict.tag is T3Tag.INVALID_SIGNATURE and verdict.bound is None

    def test_known_values(self):
        assert t3_signature_gate(0).to_dict() == {"tag": "BoundApplies", "bound": 7}
        assert t3_signature_gate(8).tag is T3Tag.INDETERMINATE
        assert t3_signature_gate(-8).tag is T3Tag.INDETERMINATE
        assert t3_signature_gate(-16).tag is T3Tag.BOUND_APPLIES
        assert t3_signature_gate(4).tag is T3Tag.INVALID_SIGNATURE

    def test_verdict_invariant(self):
        with pytest.raises(InvariantViolationError):
            T3Verdict(T3Tag.INDETERMINATE, 7)
        with pytest.raises(InvariantViolationError):
            T3Verdict(T3Tag.BOUND_APPLIES)


@pytest.mark.slow
def test_orbit_at_dimension_sixteen():
    s = TorusSpin.from_string("1" + "0" * 15)
    assert torus_orbit(16, s).size == (1 << 16) - 1
