"""Spin structures on the p-torus as an affine space over H^1(T^p; Z/2).

A structure is stored as its difference from the Lie-group structure. Matrices
act on H_1 column vectors; the twist along ``(i, j)`` sends ``e_i`` to
``e_i + e_j`` and differences transform by the transpose.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any

import numpy as np

from .config import DEFAULT_SETTINGS, Settings
from .errors import (
    DimensionMismatchError,
    InvariantViolationError,
    OutOfRangeError,
    PreconditionError,
    SingularMatrixError,
)
from .f2core import F2Mat, F2Vec, mat_mul, mat_vec, rank, transpose
from .group_utils import OrbitResult, orbit_closure
from .quadform import QuadraticRefinement
from .symplectic import SymplecticSpace

logger = logging.getLogger(__name__)

T3_BOUND = 7


@dataclass(frozen=True)
class TorusSpin:
    p: int
    diff: F2Vec

    def __post_init__(self) -> None:
        if self.p < 1:
            raise OutOfRangeError(f"torus dimension must be at least 1, got {self.p}")
        if self.diff.dim != self.p:
            raise DimensionMismatchError(f"difference of dim {self.diff.dim} on T^{self.p}")

    @classmethod
    def lie(cls, p: int) -> TorusSpin:
        return cls(p, F2Vec.zeros(p))

    @classmethod
    def from_string(cls, text: str) -> TorusSpin:
        diff = F2Vec.from_string(text)
        return cls(diff.dim, diff)

    @property
    def is_lie(self) -> bool:
        return self.diff.is_zero()

    def to_string(self) -> str:
        return self.diff.to_string()

    def to_dict(self) -> dict[str, Any]:
        return {"p": self.p, "diff": self.to_string()}


class T3Tag(str, Enum):
    BOUND_APPLIES = "BoundApplies"
    INDETERMINATE = "Indeterminate"
    INVALID_SIGNATURE = "InvalidSignature"


@dataclass(frozen=True)
class T3Verdict:
    tag: T3Tag
    bound: int | None = None

    def __post_init__(self) -> None:
        expected = T3_BOUND if self.tag is T3Tag.BOUND_APPLIES else None
        if self.bound != expected:
            raise InvariantViolationError(f"{self.tag.value} verdict with bound {self.bound}")

    def to_dict(self) -> dict[str, Any]:
        return {"tag": self.tag.value, "bound": self.bound}


def _check_dim(p: int, limit: int, what: str) -> None:
    if not 1 <= p <= limit:
        raise OutOfRangeError(f"{what} needs 1 <= p <= {limit}, got p={p}")


def dehn_twist_matrix(p: int, i: int, j: int) -> F2Mat:
    """Mod 2 action of the twist ``tau_{i,j}`` on H_1 (1-based indices)."""
    if not (1 <= i <= p and 1 <= j <= p):
        raise OutOfRangeError(f"twist indices ({i}, {j}) outside 1..{p}")
    if i == j:
        raise PreconditionError(f"twist needs distinct indices, got ({i}, {j})")
    dense = np.eye(p, dtype=np.uint8)
    dense[j - 1, i - 1] = 1
    return F2Mat.from_dense(dense)


def twist_matrices(p: int) -> list[F2Mat]:
    """The ``p(p-1)`` twist matrices, ordered by ``(i, j)``."""
    return [
        dehn_twist_matrix(p, i, j)
        for i in range(1, p + 1)
        for j in range(1, p + 1)
        if i != j
    ]


def torus_act(a: F2Mat, s: TorusSpin) -> TorusSpin:
    if (a.rows, a.cols) != (s.p, s.p):
        raise DimensionMismatchError(f"{a.rows}x{a.cols} matrix acting on T^{s.p}")
    if rank(a) < s.p:
        raise SingularMatrixError(f"matrix {a.to_strings()} is singular")
    return TorusSpin(s.p, mat_vec(transpose(a), s.diff))


def _act_transposed(at: F2Mat, s: TorusSpin) -> TorusSpin:
    return TorusSpin(s.p, mat_vec(at, s.diff))


def torus_orbit(
    p: int,
    s: TorusSpin,
    settings: Settings = DEFAULT_SETTINGS,
    *,
    record_words: bool = False,
) -> OrbitResult:
    _check_dim(p, settings.p_max, "torus_orbit")
    if s.p != p:
        raise DimensionMismatchError(f"structure on T^{s.p} given for p={p}")
    gens = [transpose(m) for m in twist_matrices(p)]
    orbit = orbit_closure(
        [s], gens, _act_transposed, budget=settings.state_budget, record_words=record_words
    )
    logger.debug("torus orbit p=%d seed=%s size=%d", p, s.to_string(), orbit.size)
    return orbit


def index_lower_bound_torus(s: TorusSpin) -> int:
    return 1 if s.is_lie else (1 << s.p) - 1


def t3_signature_gate(sig: int) -> T3Verdict:
    """Classify a Seifert-hypersurface signature for an embedded 3-torus."""
    residue = sig % 16
    if residue % 8:
        return T3Verdict(T3Tag.INVALID_SIGNATURE)
    if residue == 0:
        return T3Verdict(T3Tag.BOUND_APPLIES, T3_BOUND)
    return T3Verdict(T3Tag.INDETERMINATE)


def torus_as_surface(s: TorusSpin) -> QuadraticRefinement:
    """The 2-torus as a genus-1 surface: ``q(e_i) = 1 + diff_i``."""
    if s.p != 2:
        raise PreconditionError(f"only the 2-torus is a surface, got p={s.p}")
    bits = 1 ^ s.diff.bits
    return QuadraticRefinement(SymplecticSpace(1), F2Vec.from_bits(bits))


def gl_order(p: int) -> int:
    """``|GL(p, Z/2)| = prod_{k<p} (2^p - 2^k)``."""
    if p < 1:
        raise OutOfRangeError(f"dimension must be at least 1, got {p}")
    return math.prod((1 << p) - (1 << k) for k in range(p))


def twist_closure(p: int, settings: Settings = DEFAULT_SETTINGS) -> OrbitResult:
    """Group generated by the twist matrices, as the closure of the identity."""
    _check_dim(p, 4, "twist_closure")
    return orbit_closure(
        [F2Mat.identity(p)],
        twist_matrices(p),
        mat_mul,
        budget=settings.group_budget,
    )
