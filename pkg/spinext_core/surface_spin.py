"""Spin structures on closed orientable surfaces, via their quadratic refinements.

The mapping class group acts through its image Sp(2g, Z/2); a spin structure
is bounding exactly when its refinement has Arf invariant 0.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .config import DEFAULT_SETTINGS, Settings
from .errors import (
    ArfMismatchError,
    DimensionMismatchError,
    InvariantViolationError,
    OutOfRangeError,
    SearchExhaustedError,
)
from .f2core import F2Vec
from .group_utils import OrbitResult, orbit_closure, orbit_stabilizer
from .quadform import (
    QuadraticRefinement,
    all_refinements,
    arf,
    arf_basis_formula,
    pullback,
    reduce_to_standard,
    standard_form,
)
from .symplectic import (
    EVEN_MASK,
    SymplecticElement,
    SymplecticSpace,
    all_transvections,
    enumerate_sp,
    group_order,
)

logger = logging.getLogger(__name__)

_ONE = np.uint64(1)


def _check_genus(g: int, limit: int, what: str) -> None:
    if not 1 <= g <= limit:
        raise OutOfRangeError(f"{what} needs 1 <= g <= {limit}, got g={g}")


@dataclass(frozen=True)
class SpinPartition:
    g: int
    bounding: tuple[QuadraticRefinement, ...]
    unbounding: tuple[QuadraticRefinement, ...]

    def __post_init__(self) -> None:
        if self.b + self.u != 1 << (2 * self.g):
            raise InvariantViolationError(
                f"partition of genus {self.g} has {self.b + self.u} members"
            )

    @property
    def b(self) -> int:
        return len(self.bounding)

    @property
    def u(self) -> int:
        return len(self.unbounding)

    def to_dict(self) -> dict[str, Any]:
        return {
            "g": self.g,
            "b": self.b,
            "u": self.u,
            "bounding": [q.to_string() for q in self.bounding],
            "unbounding": [q.to_string() for q in self.unbounding],
        }


def enumerate_spin(g: int, settings: Settings = DEFAULT_SETTINGS) -> SpinPartition:
    """All ``2^{2g}`` refinements, split by their zero-count Arf invariant."""
    _check_genus(g, settings.g_max, "enumerate_spin")
    bounding: list[QuadraticRefinement] = []
    unbounding: list[QuadraticRefinement] = []
    for q in all_refinements(SymplecticSpace(g)):
        value = arf(q, chunk=settings.enumeration_chunk, budget=settings.state_budget)
        (unbounding if value else bounding).append(q)
    logger.info("genus %d: %d bounding, %d unbounding", g, len(bounding), len(unbounding))
    return SpinPartition(g, tuple(bounding), tuple(unbounding))


def count_formula(g: int) -> tuple[int, int]:
    if g < 1:
        raise OutOfRangeError(f"genus must be at least 1, got {g}")
    half = 1 << (2 * g - 1)
    offset = 1 << (g - 1)
    return half + offset, half - offset


def count_recurrence(g_max: int) -> list[tuple[int, int]]:
    """``(b_g, u_g)`` for ``g = 1..g_max`` from ``(3, 1)`` by ``(3b + u, 3u + b)``."""
    if g_max < 1:
        raise OutOfRangeError(f"g_max must be at least 1, got {g_max}")
    seq = [(3, 1)]
    while len(seq) < g_max:
        b, u = seq[-1]
        seq.append((3 * b + u, 3 * u + b))
    return seq


def _pullback_action(t: SymplecticElement, q: QuadraticRefinement) -> QuadraticRefinement:
    return pullback(q, t)


def spin_orbit(
    g: int,
    q: QuadraticRefinement,
    settings: Settings = DEFAULT_SETTINGS,
    *,
    record_words: bool = False,
) -> OrbitResult:
    """Orbit of ``q`` under pullback by every transvection."""
    _check_genus(g, settings.g_orbit, "spin_orbit")
    if q.g != g:
        raise DimensionMismatchError(f"form of genus {q.g} given for genus {g}")
    return orbit_closure(
        [q],
        all_transvections(q.space),
        _pullback_action,
        budget=settings.state_budget,
        record_words=record_words,
    )


def all_orbits(g: int, settings: Settings = DEFAULT_SETTINGS) -> list[OrbitResult]:
    """The orbit partition of all refinements, each orbit seeded by its least member."""
    _check_genus(g, settings.g_orbit, "all_orbits")
    remaining = {q.to_string(): q for q in all_refinements(SymplecticSpace(g))}
    orbits: list[OrbitResult] = []
    while remaining:
        seed = remaining[min(remaining)]
        orbit = spin_orbit(g, seed, settings)
        for key in orbit.keys:
            remaining.pop(key, None)
        orbits.append(orbit)
    return orbits


def transitivity_witness(q1: QuadraticRefinement, q2: QuadraticRefinement) -> SymplecticElement:
    """Some ``M`` with ``pullback(q1, M) == q2``."""
    if q1.space != q2.space:
        raise DimensionMismatchError(f"forms of genus {q1.g} and {q2.g}")
    m1, s1 = reduce_to_standard(q1)
    m2, s2 = reduce_to_standard(q2)
    if s1 != s2:
        raise ArfMismatchError(
            f"{q1.to_string()} has Arf {arf_basis_formula(q1)} but "
            f"{q2.to_string()} has Arf {arf_basis_formula(q2)}"
        )
    m = m1.inverse() @ m2
    if pullback(q1, m) != q2:
        raise InvariantViolationError(
            f"witness does not carry {q1.to_string()} to {q2.to_string()}"
        )
    return m


@dataclass(frozen=True)
class _FormTable:
    """A batch of refinements, for counting how many an element fixes."""

    words: np.ndarray
    bits: np.ndarray

    @classmethod
    def of(cls, forms: tuple[QuadraticRefinement, ...] | list[QuadraticRefinement]) -> _FormTable:
        return cls(
            np.stack([q.basis_values.words for q in forms]),
            np.stack([q.basis_values.bits for q in forms]),
        )

    def fixed_mask(self, m: SymplecticElement) -> np.ndarray:
        cols = m.column_words
        linear = np.bitwise_count(self.words[:, None, :] & cols[None, :, :]).sum(axis=2)
        split = np.bitwise_count(cols & (cols >> _ONE) & EVEN_MASK).sum(axis=1)
        images = (linear + split[None, :]) & 1
        return np.all(images == self.bits, axis=1)


def count_fixed(m: SymplecticElement, forms: tuple[QuadraticRefinement, ...] | list[QuadraticRefinement]) -> int:
    if not forms:
        return 0
    return int(_FormTable.of(forms).fixed_mask(m).sum())


@dataclass(frozen=True)
class NoExtensionWitness:
    g: int
    element: SymplecticElement
    fixed_bounding_count: int
    tries: int
    method: str
    seed: int | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "g": self.g,
            "matrix": self.element.to_strings(),
            "fixed_bounding_count": self.fixed_bounding_count,
            "tries": self.tries,
            "method": self.method,
            "seed": self.seed,
        }


def _bounding_forms(g: int) -> list[QuadraticRefinement]:
    return [q for q in all_refinements(SymplecticSpace(g)) if arf_basis_formula(q) == 0]


def no_extension_witness(
    g: int,
    settings: Settings = DEFAULT_SETTINGS,
    *,
    seed: int | None = None,
    max_tries: int | None = None,
) -> NoExtensionWitness:
    """An element of Sp(2g, Z/2) fixing no bounding spin structure.

    Genus 1 is searched exhaustively in matrix-key order. Higher genera try
    seeded random products of at most ``witness_max_word`` transvections.
    """
    _check_genus(g, settings.g_witness, "no_extension_witness")
    space = SymplecticSpace(g)
    table = _FormTable.of(_bounding_forms(g))

    if g == 1:
        elements = enumerate_sp(space, settings.group_budget).points
        for tries, m in enumerate(elements, start=1):
            if not table.fixed_mask(m).any():
                return NoExtensionWitness(g, m, 0, tries, "exhaustive")
        raise SearchExhaustedError(
            "no element of Sp(2, Z/2) moves every bounding form", tries=len(elements), seed=None
        )

    seed = settings.witness_seed if seed is None else seed
    max_tries = settings.witness_max_tries if max_tries is None else max_tries
    rng = np.random.default_rng(seed)
    gens = all_transvections(space)
    for tries in range(1, max_tries + 1):
        length = int(rng.integers(1, settings.witness_max_word + 1))
        m = SymplecticElement.identity(space)
        for idx in rng.integers(0, len(gens), size=length):
            m = gens[int(idx)] @ m
        if not table.fixed_mask(m).any():
            logger.info("genus %d witness found after %d tries (seed %d)", g, tries, seed)
            return NoExtensionWitness(g, m, 0, tries, "random", seed)
    raise SearchExhaustedError(
        f"no witness for genus {g} within {max_tries} tries", tries=max_tries, seed=seed
    )


@dataclass(frozen=True)
class CountingBound:
    """``b (|G| / b - 1) + 1`` against ``|G|``; ``union_size`` is filled when counted exactly."""

    g: int
    b: int
    order: int
    stabilizer_order: int
    lhs: int
    union_size: int | None = field(default=None)

    @property
    def ok(self) -> bool:
        return self.lhs < self.order

    def to_dict(self) -> dict[str, Any]:
        return {
            "g": self.g,
            "b": self.b,
            "group_order": self.order,
            "stabilizer_order": self.stabilizer_order,
            "bound_lhs": self.lhs,
            "bound_ok": self.ok,
            "union_size": self.union_size,
        }


def stabilizer_union_size(g: int, settings: Settings = DEFAULT_SETTINGS) -> int:
    """Number of group elements fixing at least one bounding form (g <= 2)."""
    _check_genus(g, 2, "stabilizer_union_size")
    table = _FormTable.of(_bounding_forms(g))
    elements = enumerate_sp(SymplecticSpace(g), settings.group_budget).points
    return sum(1 for m in elements if table.fixed_mask(m).any())


def counting_bound_check(
    g: int, settings: Settings = DEFAULT_SETTINGS, *, exact: bool = False
) -> CountingBound:
    _check_genus(g, 3, "counting_bound_check")
    b, _ = count_formula(g)
    space = SymplecticSpace(g)
    order = group_order(space)
    if g <= 2:
        elements = enumerate_sp(space, settings.group_budget).points
        orbit, stab, total = orbit_stabilizer(
            elements, standard_form(g, 0), lambda m, q: pullback(q, m)
        )
        if orbit != b or total != order or orbit * stab != total:
            raise InvariantViolationError(
                f"genus {g}: orbit {orbit} times stabilizer {stab} "
                f"against |Sp| = {order} and b = {b}"
            )
    else:
        if order % b:
            raise InvariantViolationError(
                f"|Sp({2 * g}, Z/2)| = {order} is not divisible by b = {b}"
            )
        stab = order // b
    union = stabilizer_union_size(g, settings) if exact and g <= 2 else None
    result = CountingBound(g, b, order, stab, b * (stab - 1) + 1, union)
    if union is not None and union > result.lhs:
        raise InvariantViolationError(f"{union} elements fix a bounding form, above {result.lhs}")
    return result


def index_lower_bound_surface(q: QuadraticRefinement) -> int:
    """Orbit size of ``q``: ``b_g`` for Arf 0 and ``u_g`` for Arf 1."""
    b, u = count_formula(q.g)
    return u if arf_basis_formula(q) else b


def spin_difference(q1: QuadraticRefinement, q2: QuadraticRefinement) -> F2Vec:
    """The class in H^1(F_g; Z/2) carrying ``q2`` to ``q1``."""
    if q1.space != q2.space:
        raise DimensionMismatchError(f"forms of genus {q1.g} and {q2.g}")
    return q1.basis_values + q2.basis_values


def translate(q: QuadraticRefinement, h: F2Vec) -> QuadraticRefinement:
    q.space.check_vector(h)
    return QuadraticRefinement(q.space, q.basis_values + h)
