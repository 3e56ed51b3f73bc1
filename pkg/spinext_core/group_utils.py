"""Finite actions: orbit closure, small permutation groups, semidirect index checks."""

from __future__ import annotations

import logging
from collections import deque
from collections.abc import Callable, Iterable, Mapping, Sequence
from dataclasses import dataclass
from typing import Any

from sympy.combinatorics import Permutation, PermutationGroup
from sympy.combinatorics.named_groups import SymmetricGroup

from .errors import (
    BudgetExceededError,
    MalformedInputError,
    NotSemidirectError,
    OutOfRangeError,
    PreconditionError,
)

logger = logging.getLogger(__name__)

Perm = tuple[int, ...]

DEFAULT_STATE_BUDGET = 2**24
DEFAULT_GROUP_BUDGET = 10**6


def canonical_key(state: Any) -> str:
    """Serialized form used to hash orbit states."""
    to_string = getattr(state, "to_string", None)
    if callable(to_string):
        return to_string()
    key = getattr(state, "key", None)
    if callable(key):
        return key()
    if isinstance(state, tuple) and all(isinstance(i, int) for i in state):
        return format_perm(state)
    return str(state)


@dataclass(frozen=True)
class OrbitResult:
    """An orbit, canonically sorted by key.

    ``witness_words[k]`` lists generator indices ``(i1, ..., in)`` such that the
    point with key ``k`` equals ``apply(g_in, ... apply(g_i1, seed))``.
    """

    points: tuple[Any, ...]
    keys: tuple[str, ...]
    generator_count: int
    witness_words: Mapping[str, tuple[int, ...]] | None = None

    @property
    def size(self) -> int:
        return len(self.points)

    def __contains__(self, state: Any) -> bool:
        return canonical_key(state) in self.keys

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "size": self.size,
            "generator_count": self.generator_count,
            "points": list(self.keys),
        }
        if self.witness_words is not None:
            out["witness_words"] = {k: list(w) for k, w in self.witness_words.items()}
        return out


def orbit_closure(
    seed_states: Iterable[Any],
    generators: Sequence[Any],
    apply: Callable[[Any, Any], Any],
    *,
    key: Callable[[Any], str] = canonical_key,
    budget: int | None = None,
    record_words: bool = False,
) -> OrbitResult:
    """Least set containing the seeds and closed under every generator (BFS)."""
    budget = DEFAULT_STATE_BUDGET if budget is None else budget
    seen: dict[str, Any] = {}
    words: dict[str, tuple[int, ...]] = {}
    queue: deque[tuple[Any, str]] = deque()
    for s in seed_states:
        k = key(s)
        if k not in seen:
            seen[k] = s
            words[k] = ()
            queue.append((s, k))
    if len(seen) > budget:
        raise BudgetExceededError(f"{len(seen)} seed states exceed the state budget {budget}")

    while queue:
        state, k = queue.popleft()
        word = words[k]
        for gi, gen in enumerate(generators):
            image = apply(gen, state)
            ki = key(image)
            if ki in seen:
                continue
            if len(seen) >= budget:
                raise BudgetExceededError(
                    f"orbit closure exceeded the state budget of {budget} states"
                )
            seen[ki] = image
            words[ki] = (*word, gi)
            queue.append((image, ki))

    order = sorted(seen)
    logger.debug("orbit closure: %d states under %d generators", len(order), len(generators))
    return OrbitResult(
        points=tuple(seen[k] for k in order),
        keys=tuple(order),
        generator_count=len(generators),
        witness_words={k: words[k] for k in order} if record_words else None,
    )


# -- permutations ---------------------------------------------------------


def is_perm(p: Sequence[int], degree: int | None = None) -> bool:
    n = len(p) if degree is None else degree
    return len(p) == n and sorted(p) == list(range(n))


def format_perm(p: Perm) -> str:
    return "[" + ",".join(str(i) for i in p) + "]"


def parse_perm(text: str) -> Perm:
    body = text.strip()
    if not (body.startswith("[") and body.endswith("]")):
        raise MalformedInputError(f"Permutation must look like [p0,p1,...]: {text!r}")
    inner = body[1:-1].strip()
    try:
        images = tuple(int(x) for x in inner.split(",")) if inner else ()
    except ValueError as e:
        raise MalformedInputError(f"Non-integer image in permutation {text!r}") from e
    if not is_perm(images):
        raise MalformedInputError(f"Not a permutation of 0..{len(images) - 1}: {text!r}")
    return images


def parse_perm_list(text: str) -> list[Perm]:
    """Parse ``"[1,0,2];[1,2,0]"``; the empty string is the empty list."""
    return [parse_perm(part) for part in text.split(";") if part.strip()]


def to_permutation(p: Perm) -> Permutation:
    return Permutation(list(p))


def from_permutation(p: Permutation) -> Perm:
    return tuple(p.array_form)


def element_set(group: PermutationGroup) -> frozenset[Perm]:
    return frozenset(from_permutation(x) for x in group.generate())


@dataclass(frozen=True)
class PermGroupSpec:
    """Generators of a permutation group on ``0..degree-1`` as image lists."""

    degree: int
    generators: tuple[Perm, ...] = ()

    def __post_init__(self) -> None:
        if self.degree < 1:
            raise OutOfRangeError(f"degree must be at least 1, got {self.degree}")
        for g in self.generators:
            if not is_perm(g, self.degree):
                raise PreconditionError(
                    f"generator {format_perm(tuple(g))} is not a bijection on 0..{self.degree - 1}"
                )
        object.__setattr__(self, "generators", tuple(tuple(g) for g in self.generators))

    @classmethod
    def from_group(cls, group: PermutationGroup) -> PermGroupSpec:
        return cls(group.degree, tuple(from_permutation(g) for g in group.generators))

    @classmethod
    def symmetric(cls, n: int) -> PermGroupSpec:
        if n < 1:
            raise OutOfRangeError(f"degree must be at least 1, got {n}")
        return cls.from_group(SymmetricGroup(n))

    def permutation_group(self, budget: int | None = None) -> PermutationGroup:
        gens = [to_permutation(g) for g in self.generators]
        group = PermutationGroup(gens or [Permutation(list(range(self.degree)))])
        budget = DEFAULT_GROUP_BUDGET if budget is None else budget
        if group.order() > budget:
            raise BudgetExceededError(
                f"group of order {group.order()} exceeds the group budget {budget}"
            )
        return group


def enumerate_group(spec: PermGroupSpec, budget: int | None = None) -> frozenset[Perm]:
    """All elements of the group generated by ``spec.generators``."""
    return element_set(spec.permutation_group(budget))


def stabilizer(
    elements: Iterable[Any], point: Any, apply: Callable[[Any, Any], Any]
) -> list[Any]:
    key_point = canonical_key(point)
    return [g for g in elements if canonical_key(apply(g, point)) == key_point]


def orbit_stabilizer(
    elements: Sequence[Any], point: Any, apply: Callable[[Any, Any], Any]
) -> tuple[int, int, int]:
    """Return ``(orbit size, stabilizer order, group order)`` by direct counting."""
    orbit = {canonical_key(apply(g, point)) for g in elements}
    stab = stabilizer(elements, point, apply)
    return len(orbit), len(stab), len(elements)


def _contains_group(outer: PermutationGroup, inner: PermutationGroup) -> bool:
    return all(outer.contains(x) for x in inner.generators)


def intersection_order(a: PermutationGroup, b: PermutationGroup) -> int:
    return sum(1 for x in a.generate() if b.contains(x))


def is_normal(sub: PermutationGroup, ambient: PermutationGroup) -> bool:
    # PermutationGroup.is_normal answers True for any subgroup flagged abelian
    return all(
        sub.contains(a * x * ~a) for a in ambient.generators for x in sub.generators
    )


def all_subgroups(spec: PermGroupSpec, budget: int | None = None) -> list[PermutationGroup]:
    """Every subgroup, found by joining cyclic subgroups until nothing new appears."""
    group = spec.permutation_group(budget)
    cyclics: dict[frozenset[Perm], PermutationGroup] = {}
    for e in group.generate():
        c = PermutationGroup([e])
        cyclics.setdefault(element_set(c), c)
    found = dict(cyclics)
    frontier = list(found.values())
    while frontier:
        fresh: list[PermutationGroup] = []
        for h in frontier:
            for c in cyclics.values():
                if _contains_group(h, c):
                    continue
                joined = PermutationGroup(list(h.generators) + list(c.generators))
                key = element_set(joined)
                if key not in found:
                    found[key] = joined
                    fresh.append(joined)
        frontier = fresh
    logger.debug(
        "degree %d group of order %d has %d subgroups", spec.degree, group.order(), len(found)
    )
    return [found[k] for k in sorted(found, key=lambda s: (len(s), sorted(s)))]


def semidirect_decompositions(
    spec: PermGroupSpec, budget: int | None = None
) -> list[tuple[PermutationGroup, PermutationGroup]]:
    """Pairs ``(N, H)`` with N normal, N ∩ H trivial and |N||H| = |ambient|."""
    whole = spec.permutation_group(budget)
    subs = all_subgroups(spec, budget)
    normals = [n for n in subs if is_normal(n, whole)]
    return [
        (n, h)
        for n in normals
        for h in subs
        if n.order() * h.order() == whole.order() and intersection_order(n, h) == 1
    ]


@dataclass(frozen=True)
class SemidirectCheck:
    lhs: int
    rhs: int
    ambient_order: int

    @property
    def ok(self) -> bool:
        return self.lhs <= self.rhs

    def to_dict(self) -> dict[str, Any]:
        return {
            "lhs": self.lhs,
            "rhs": self.rhs,
            "ok": self.ok,
            "ambient_order": self.ambient_order,
        }


def semidirect_index_check(
    n: PermGroupSpec,
    h: PermGroupSpec,
    g: PermGroupSpec,
    ambient: PermGroupSpec,
    budget: int | None = None,
) -> SemidirectCheck:
    """Compare ``[N⋊H : G]`` with ``[N : N∩G]·[H : H∩G]``."""
    degrees = {n.degree, h.degree, g.degree, ambient.degree}
    if len(degrees) != 1:
        raise NotSemidirectError(f"groups act on different degrees {sorted(degrees)}")
    whole = ambient.permutation_group(budget)
    for name, spec in (("N", n), ("H", h), ("G", g)):
        outside = [p for p in spec.generators if not whole.contains(to_permutation(p))]
        if outside:
            raise NotSemidirectError(
                f"{name} is not a subgroup of the ambient group: {format_perm(outside[0])}"
            )
    n_grp = n.permutation_group(budget)
    h_grp = h.permutation_group(budget)
    g_grp = g.permutation_group(budget)
    if not is_normal(n_grp, whole):
        raise NotSemidirectError("N is not normal in the ambient group")
    if intersection_order(n_grp, h_grp) != 1:
        raise NotSemidirectError("N and H intersect nontrivially")
    if n_grp.order() * h_grp.order() != whole.order():
        raise NotSemidirectError(
            f"|N|·|H| = {n_grp.order() * h_grp.order()} differs from "
            f"the ambient order {whole.order()}"
        )
    lhs = whole.order() // g_grp.order()
    rhs = (n_grp.order() // intersection_order(n_grp, g_grp)) * (
        h_grp.order() // intersection_order(h_grp, g_grp)
    )
    return SemidirectCheck(lhs=lhs, rhs=rhs, ambient_order=whole.order())
