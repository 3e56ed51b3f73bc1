"""Quadratic refinements of the intersection form and their Arf invariant.

A refinement ``q`` is stored by its values on the interleaved basis; its value
on any vector is ``sum_k x_k q(e_k) + sum_i x_{a_i} x_{b_i}``. Every bit string
of length ``2g`` is a valid refinement.
"""

from __future__ import annotations

import logging
from collections.abc import Iterator, Mapping
from dataclasses import dataclass
from typing import Any

import numpy as np

from .errors import (
    BudgetExceededError,
    DimensionMismatchError,
    InvariantViolationError,
    MalformedInputError,
    PreconditionError,
)
from .f2core import F2Mat, F2Vec, mat_inverse, row_reduce
from .group_utils import DEFAULT_STATE_BUDGET
from .symplectic import (
    EVEN_MASK,
    SymplecticElement,
    SymplecticSpace,
    omega,
    split_form_value,
)

logger = logging.getLogger(__name__)

_ONE = np.uint64(1)
DEFAULT_CHUNK = 1 << 20


@dataclass(frozen=True)
class QuadraticRefinement:
    space: SymplecticSpace
    basis_values: F2Vec

    def __post_init__(self) -> None:
        self.space.check_vector(self.basis_values)

    @classmethod
    def from_string(cls, text: str) -> QuadraticRefinement:
        if not text or len(text) % 2:
            raise MalformedInputError(
                f"A form needs a nonempty even number of bits, got {text!r}"
            )
        return cls(SymplecticSpace(len(text) // 2), F2Vec.from_string(text))

    @classmethod
    def from_int(cls, space: SymplecticSpace, value: int) -> QuadraticRefinement:
        return cls(space, F2Vec.from_int(value, space.dim))

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> QuadraticRefinement:
        q = cls.from_string(str(data["basis_values"]))
        if "g" in data and int(data["g"]) != q.g:
            raise MalformedInputError(f"g={data['g']} does not match {q.to_string()!r}")
        return q

    @property
    def g(self) -> int:
        return self.space.g

    def to_string(self) -> str:
        return self.basis_values.to_string()

    def to_dict(self) -> dict[str, Any]:
        return {"g": self.g, "basis_values": self.to_string()}

    def __call__(self, x: F2Vec) -> int:
        return evaluate(self, x)

    def __lt__(self, other: QuadraticRefinement) -> bool:
        return (self.g, self.to_string()) < (other.g, other.to_string())

    def __repr__(self) -> str:
        return f"QuadraticRefinement('{self.to_string()}')"


def all_refinements(space: SymplecticSpace) -> Iterator[QuadraticRefinement]:
    """All ``2^{2g}`` refinements in lexicographic order of their bit strings."""
    dim = space.dim
    for n in range(1 << dim):
        # lexicographic on strings means index 0 is the most significant bit
        bits = [(n >> (dim - 1 - k)) & 1 for k in range(dim)]
        yield QuadraticRefinement(space, F2Vec.from_bits(bits))


def random_refinement(space: SymplecticSpace, rng: np.random.Generator) -> QuadraticRefinement:
    return QuadraticRefinement(space, F2Vec.from_bits(rng.integers(0, 2, space.dim)))


def evaluate(q: QuadraticRefinement, x: F2Vec) -> int:
    if x.dim != q.space.dim:
        raise DimensionMismatchError(f"form of dim {q.space.dim} evaluated at dim {x.dim}")
    linear = int(np.bitwise_count(x.words & q.basis_values.words).sum()) & 1
    return linear ^ split_form_value(x)


def _values(q: QuadraticRefinement, words: np.ndarray) -> np.ndarray:
    """Evaluate ``q`` on every row of a packed ``(n, nwords)`` array."""
    linear = np.bitwise_count(words & q.basis_values.words).sum(axis=1)
    split = np.bitwise_count(words & (words >> _ONE) & EVEN_MASK).sum(axis=1)
    return ((linear + split) & 1).astype(np.uint8)


def zero_count(
    q: QuadraticRefinement,
    *,
    chunk: int = DEFAULT_CHUNK,
    budget: int | None = None,
) -> int:
    """Number of vectors where ``q`` vanishes, by exhaustive word-parallel evaluation."""
    dim = q.space.dim
    budget = DEFAULT_STATE_BUDGET if budget is None else budget
    total = 1 << dim
    if total > budget or dim > 62:
        raise BudgetExceededError(
            f"zero count needs 2^{dim} evaluations, over the budget of {budget}"
        )
    ones = 0
    for start in range(0, total, chunk):
        stop = min(total, start + chunk)
        words = np.arange(start, stop, dtype=np.uint64).reshape(-1, 1)
        ones += int(_values(q, words).sum())
    return total - ones


def arf(q: QuadraticRefinement, *, chunk: int = DEFAULT_CHUNK, budget: int | None = None) -> int:
    """Arf invariant by the majority-value criterion."""
    g = q.g
    count = zero_count(q, chunk=chunk, budget=budget)
    even = (1 << (2 * g - 1)) + (1 << (g - 1))
    odd = (1 << (2 * g - 1)) - (1 << (g - 1))
    if count == even:
        return 0
    if count == odd:
        return 1
    raise InvariantViolationError(
        f"zero count {count} of {q.to_string()!r} is neither {even} nor {odd}"
    )


def arf_basis_formula(q: QuadraticRefinement) -> int:
    """``sum_i q(a_i) q(b_i)`` over the symplectic basis pairs."""
    return split_form_value(q.basis_values)


def gauss_sum(q: QuadraticRefinement, *, chunk: int = DEFAULT_CHUNK, budget: int | None = None) -> int:
    """``sum_x (-1)^{q(x)}``, equal to ``(-1)^{Arf(q)} 2^g``."""
    count = zero_count(q, chunk=chunk, budget=budget)
    return 2 * count - (1 << q.space.dim)


def pullback(q: QuadraticRefinement, m: SymplecticElement | F2Mat) -> QuadraticRefinement:
    """Right action ``(q . M)(x) = q(M x)``, computed on the columns of ``M``."""
    if isinstance(m, F2Mat):
        m = SymplecticElement(q.space, m)
    elif m.space != q.space:
        raise DimensionMismatchError(f"genus {q.g} form pulled back by a genus {m.space.g} element")
    values = _values(q, m.column_words)
    return QuadraticRefinement(q.space, F2Vec.from_bits(values))


def direct_sum(q1: QuadraticRefinement, q2: QuadraticRefinement) -> QuadraticRefinement:
    return QuadraticRefinement(
        SymplecticSpace(q1.g + q2.g), q1.basis_values.concat(q2.basis_values)
    )


def standard_form(g: int, a: int) -> QuadraticRefinement:
    """All zeros for Arf 0; a leading ``(1, 1)`` block for Arf 1."""
    space = SymplecticSpace(g)
    if a not in (0, 1):
        raise PreconditionError(f"Arf value must be 0 or 1, got {a}")
    bits = np.zeros(space.dim, dtype=np.uint8)
    if a:
        bits[:2] = 1
    return QuadraticRefinement(space, F2Vec.from_bits(bits))


def _first_singular(q: QuadraticRefinement, span: list[F2Vec]) -> F2Vec | None:
    """First nonzero singular vector of ``span`` in Gray-code order, if any."""
    current = F2Vec.zeros(q.space.dim)
    for i in range(1, 1 << len(span)):
        current = current + span[(i & -i).bit_length() - 1]
        if not current.is_zero() and evaluate(q, current) == 0:
            return current
    return None


def _project(space: SymplecticSpace, span: list[F2Vec], u: F2Vec, w: F2Vec) -> list[F2Vec]:
    """Basis of the omega-complement of the hyperbolic pair ``(u, w)`` inside ``span``."""
    projected = []
    for x in span:
        y = x
        if omega(space, x, w):
            y = y + u
        if omega(space, x, u):
            y = y + w
        projected.append(y)
    reduced = row_reduce(F2Mat.from_rows(projected))
    return [reduced.matrix.row(i) for i in range(reduced.rank)]


def reduce_to_standard(q: QuadraticRefinement) -> tuple[SymplecticElement, QuadraticRefinement]:
    """Return ``(M, s)`` with ``s`` the standard form of ``q`` and ``pullback(s, M) == q``.

    Splits off hyperbolic pairs of singular vectors one at a time; when the
    Arf invariant is 1 the last plane is anisotropic and becomes the first
    basis pair.
    """
    space = q.space
    span = [space.basis(k) for k in range(space.dim)]
    pairs: list[tuple[F2Vec, F2Vec]] = []
    anisotropic: tuple[F2Vec, F2Vec] | None = None
    while span:
        u = _first_singular(q, span)
        if u is None:
            if len(span) != 2:
                raise InvariantViolationError(
                    f"no singular vector in a {len(span)}-dimensional complement of {q.to_string()!r}"
                )
            anisotropic = (span[0], span[1])
            break
        w = next((x for x in span if omega(space, u, x)), None)
        if w is None:
            raise InvariantViolationError("complement is degenerate")
        if evaluate(q, w):
            w = w + u
        pairs.append((u, w))
        span = _project(space, span, u, w)

    if anisotropic is not None:
        pairs.insert(0, anisotropic)
    columns = [v for pair in pairs for v in pair]
    change = SymplecticElement(space, F2Mat.from_columns(columns))
    m = SymplecticElement(space, mat_inverse(change.matrix), verify=False)
    s = standard_form(space.g, 1 if anisotropic is not None else 0)
    if pullback(s, m) != q:
        raise InvariantViolationError(f"normal form reduction failed for {q.to_string()!r}")
    logger.debug("reduced %s to %s", q.to_string(), s.to_string())
    return m, s
