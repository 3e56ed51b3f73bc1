"""The standard symplectic space over Z/2 and its isometry group Sp(2g, Z/2).

Basis order is interleaved: ``a_1, b_1, ..., a_g, b_g`` occupy bit indices
``0, 1, ..., 2g-2, 2g-1``, so ``a_i`` is bit ``2(i-1)`` and ``b_i`` is bit
``2i-1``. Matrices act on column vectors.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Iterable, Sequence
from dataclasses import InitVar, dataclass
from functools import cached_property

import numpy as np

from .errors import (
    DimensionMismatchError,
    InvariantViolationError,
    NotSymplecticError,
    OutOfRangeError,
    ZeroVectorError,
)
from .f2core import F2Mat, F2Vec, mat_vec, transpose
from .group_utils import OrbitResult, orbit_closure

logger = logging.getLogger(__name__)

# bits sitting at a_i positions inside each 64-bit word
EVEN_MASK = np.uint64(0x5555555555555555)
_ONE = np.uint64(1)


def pairswap_words(words: np.ndarray) -> np.ndarray:
    """Swap every (a_i, b_i) bit pair; this is ``J x`` on packed words."""
    return ((words & EVEN_MASK) << _ONE) | ((words >> _ONE) & EVEN_MASK)


def _parity(words: np.ndarray) -> int:
    return int(np.bitwise_count(words).sum()) & 1


@dataclass(frozen=True)
class SymplecticSpace:
    g: int

    def __post_init__(self) -> None:
        if self.g < 1:
            raise OutOfRangeError(f"genus must be at least 1, got {self.g}")

    @property
    def dim(self) -> int:
        return 2 * self.g

    def basis(self, k: int) -> F2Vec:
        return F2Vec.basis(self.dim, k)

    def a(self, i: int) -> F2Vec:
        """``a_i`` for ``1 <= i <= g``."""
        self._check_handle(i)
        return self.basis(2 * (i - 1))

    def b(self, i: int) -> F2Vec:
        self._check_handle(i)
        return self.basis(2 * i - 1)

    def _check_handle(self, i: int) -> None:
        if not 1 <= i <= self.g:
            raise OutOfRangeError(f"handle index {i} outside 1..{self.g}")

    def zero(self) -> F2Vec:
        return F2Vec.zeros(self.dim)

    def vector(self, text: str) -> F2Vec:
        v = F2Vec.from_string(text)
        self.check_vector(v)
        return v

    def vectors(self) -> Iterable[F2Vec]:
        """All ``2^{2g}`` vectors in increasing integer order."""
        for n in range(1 << self.dim):
            yield F2Vec.from_int(n, self.dim)

    def gram(self) -> F2Mat:
        dense = np.zeros((self.dim, self.dim), dtype=np.uint8)
        idx = np.arange(0, self.dim, 2)
        dense[idx, idx + 1] = 1
        dense[idx + 1, idx] = 1
        return F2Mat.from_dense(dense)

    def check_vector(self, v: F2Vec) -> None:
        if v.dim != self.dim:
            raise DimensionMismatchError(f"expected a vector of dim {self.dim}, got {v.dim}")

    def check_matrix(self, m: F2Mat) -> None:
        if (m.rows, m.cols) != (self.dim, self.dim):
            raise DimensionMismatchError(
                f"expected a {self.dim}x{self.dim} matrix, got {m.rows}x{m.cols}"
            )


def omega(space: SymplecticSpace, x: F2Vec, y: F2Vec) -> int:
    """Intersection pairing ``sum_i x_{a_i} y_{b_i} + x_{b_i} y_{a_i}``."""
    space.check_vector(x)
    space.check_vector(y)
    return _parity(x.words & pairswap_words(y.words))


def split_form_value(x: F2Vec) -> int:
    """``sum_i x_{a_i} x_{b_i}``; the refinement with all basis values 0."""
    return _parity(x.words & (x.words >> _ONE) & EVEN_MASK)


def _pair_permutation(dim: int) -> np.ndarray:
    return np.arange(dim) ^ 1


def _is_symplectic_dense(dense: np.ndarray) -> bool:
    swap = _pair_permutation(dense.shape[0])
    # M^T J M == J, with J M the row-swapped M
    lhs = (dense.T.astype(np.int64) @ dense[swap].astype(np.int64)) & 1
    return bool(np.array_equal(lhs, np.eye(dense.shape[0], dtype=np.int64)[swap]))


def is_symplectic(space: SymplecticSpace, m: F2Mat) -> bool:
    space.check_matrix(m)
    return _is_symplectic_dense(m.to_dense())


@dataclass(frozen=True, eq=False)
class SymplecticElement:
    """An element of Sp(2g, Z/2); construction verifies the form is preserved."""

    space: SymplecticSpace
    matrix: F2Mat
    verify: InitVar[bool] = True

    def __post_init__(self, verify: bool) -> None:
        self.space.check_matrix(self.matrix)
        if verify and not _is_symplectic_dense(self.matrix.to_dense()):
            raise NotSymplecticError(f"matrix {self.matrix.to_strings()} does not preserve omega")

    @classmethod
    def identity(cls, space: SymplecticSpace) -> SymplecticElement:
        return cls(space, F2Mat.identity(space.dim), verify=False)

    @classmethod
    def from_strings(cls, space: SymplecticSpace, rows: Sequence[str]) -> SymplecticElement:
        return cls(space, F2Mat.from_strings(rows))

    @classmethod
    def _from_dense(cls, space: SymplecticSpace, dense: np.ndarray) -> SymplecticElement:
        return cls(space, F2Mat.from_dense(dense), verify=False)

    @cached_property
    def dense(self) -> np.ndarray:
        return self.matrix.to_dense()

    @cached_property
    def column_words(self) -> np.ndarray:
        """Packed columns ``M e_k`` as rows of a word array."""
        return transpose(self.matrix).row_data

    def apply(self, v: F2Vec) -> F2Vec:
        self.space.check_vector(v)
        return mat_vec(self.matrix, v)

    def compose(self, other: SymplecticElement) -> SymplecticElement:
        """Matrix product ``self @ other`` (apply ``other`` first)."""
        if other.space != self.space:
            raise DimensionMismatchError(f"genus {self.space.g} vs genus {other.space.g}")
        return self._from_dense(self.space, _mul(self.dense, other.dense))

    def __matmul__(self, other: SymplecticElement) -> SymplecticElement:
        return self.compose(other)

    def inverse(self) -> SymplecticElement:
        return self._from_dense(self.space, _inv(self.dense))

    def is_identity(self) -> bool:
        return self.matrix.is_identity()

    def key(self) -> str:
        return self.matrix.key()

    def to_strings(self) -> list[str]:
        return self.matrix.to_strings()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SymplecticElement):
            return NotImplemented
        return self.space == other.space and self.matrix == other.matrix

    def __hash__(self) -> int:
        return hash(self.matrix)

    def __repr__(self) -> str:
        return f"SymplecticElement(g={self.space.g}, {self.matrix.to_strings()!r})"


def _mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return ((a.astype(np.int64) @ b.astype(np.int64)) & 1).astype(np.uint8)


def _inv(dense: np.ndarray) -> np.ndarray:
    # M^-1 = J M^T J for symplectic M
    swap = _pair_permutation(dense.shape[0])
    return np.ascontiguousarray(dense.T[swap][:, swap])


def transvection(space: SymplecticSpace, v: F2Vec) -> SymplecticElement:
    """``x -> x + omega(x, v) v``, i.e. ``I + v (J v)^T``."""
    space.check_vector(v)
    if v.is_zero():
        raise ZeroVectorError("transvection along the zero vector")
    vb = v.bits.astype(np.uint8)
    dense = np.eye(space.dim, dtype=np.uint8) ^ np.outer(vb, vb[_pair_permutation(space.dim)])
    return SymplecticElement._from_dense(space, dense)


def all_transvections(space: SymplecticSpace) -> list[SymplecticElement]:
    """The ``2^{2g} - 1`` transvections, ordered by the integer value of ``v``."""
    return [transvection(space, F2Vec.from_int(n, space.dim)) for n in range(1, 1 << space.dim)]


def chain_transvections(space: SymplecticSpace) -> list[SymplecticElement]:
    """Transvections along ``a_i``, ``b_i`` and ``a_i + a_{i+1}`` (``3g - 1`` of them)."""
    vectors = [space.a(i) for i in range(1, space.g + 1)]
    vectors += [space.b(i) for i in range(1, space.g + 1)]
    vectors += [space.a(i) + space.a(i + 1) for i in range(1, space.g)]
    return [transvection(space, v) for v in vectors]


def formula_order(g: int) -> int:
    """``2^{g^2} * prod_{k=1..g} (2^{2k} - 1)``."""
    if g < 1:
        raise OutOfRangeError(f"genus must be at least 1, got {g}")
    return (1 << (g * g)) * math.prod((1 << (2 * k)) - 1 for k in range(1, g + 1))


class _ChainLevel:
    """One level of a stabilizer chain with base point ``e_depth``.

    Elements are dense 0/1 arrays; each stored generator is kept with its
    inverse. The transversal maps an orbit point (column bytes) to a pair
    ``(u, u^-1)`` with ``u e_depth`` equal to that point.
    """

    def __init__(self, dim: int, depth: int) -> None:
        self.dim = dim
        self.depth = depth
        self.identity = np.eye(dim, dtype=np.uint8)
        self.base = self.identity[:, depth].tobytes()
        self.gens: list[tuple[np.ndarray, np.ndarray]] = []
        self.transversal: dict[bytes, tuple[np.ndarray, np.ndarray]] = {
            self.base: (self.identity, self.identity)
        }
        self.stab = _ChainLevel(dim, depth + 1) if depth + 1 < dim else None

    def generators(self) -> list[tuple[np.ndarray, np.ndarray]]:
        below = self.stab.generators() if self.stab is not None else []
        return below + self.gens

    def orbit_sizes(self) -> list[int]:
        below = self.stab.orbit_sizes() if self.stab is not None else []
        return [len(self.transversal), *below]

    def _image(self, m: np.ndarray) -> bytes:
        return np.ascontiguousarray(m[:, self.depth]).tobytes()

    def sift(self, h: np.ndarray) -> np.ndarray:
        point = self._image(h)
        entry = self.transversal.get(point)
        if entry is None:
            return h
        residue = _mul(entry[1], h)
        if self.stab is None:
            return residue
        return self.stab.sift(residue)

    def add_gen(self, h: np.ndarray) -> None:
        residue = self.sift(h)
        if not np.array_equal(residue, self.identity):
            self.add_nonmember_gen(residue)

    def add_nonmember_gen(self, h: np.ndarray) -> None:
        if self._image(h) == self.base:
            if self.stab is None:
                raise InvariantViolationError("a nontrivial element fixes the whole base")
            self.stab.add_nonmember_gen(h)
        else:
            self.gens.append((h, _inv(h)))
        self.rebuild_transversal()
        self.add_all_schreier_gens()

    def rebuild_transversal(self) -> None:
        gens = self.generators()
        self.transversal = {self.base: (self.identity, self.identity)}
        frontier = [self.base]
        while frontier:
            nxt: list[bytes] = []
            for point in frontier:
                u, u_inv = self.transversal[point]
                for s, s_inv in gens:
                    su = _mul(s, u)
                    image = self._image(su)
                    if image not in self.transversal:
                        self.transversal[image] = (su, _mul(u_inv, s_inv))
                        nxt.append(image)
            frontier = nxt

    def add_all_schreier_gens(self) -> None:
        if self.stab is None:
            return
        for s, _ in self.generators():
            for point in sorted(self.transversal):
                u, _ = self.transversal[point]
                su = _mul(s, u)
                _, w_inv = self.transversal[self._image(su)]
                self.stab.add_gen(_mul(w_inv, su))


def stabilizer_chain(
    space: SymplecticSpace, generators: Sequence[SymplecticElement] | None = None
) -> list[int]:
    """Orbit sizes of ``e_0, e_1, ...`` under the successive pointwise stabilizers."""
    gens = chain_transvections(space) if generators is None else list(generators)
    root = _ChainLevel(space.dim, 0)
    for gen in gens:
        if gen.space != space:
            raise DimensionMismatchError(f"generator of genus {gen.space.g} for genus {space.g}")
        root.add_gen(gen.dense)
    sizes = root.orbit_sizes()
    logger.debug("stabilizer chain for g=%d: orbit sizes %s", space.g, sizes)
    return sizes


def group_order(
    space: SymplecticSpace, generators: Sequence[SymplecticElement] | None = None
) -> int:
    """Order of the group generated by ``generators`` (default: chain transvections)."""
    return math.prod(stabilizer_chain(space, generators))


def enumerate_sp(space: SymplecticSpace, budget: int | None = None) -> OrbitResult:
    """Every element, as the closure of the identity under left multiplication by transvections."""
    return orbit_closure(
        [SymplecticElement.identity(space)],
        all_transvections(space),
        lambda t, m: t.compose(m),
        budget=budget,
    )
