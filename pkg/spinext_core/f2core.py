"""Linear algebra over the two-element field on packed bit words.

Bit ``k`` of a vector lives in bit ``k % 64`` of word ``k // 64`` (word 0 first,
least significant bit first). Text form is a ``'0'/'1'`` string with index 0
leftmost; a matrix is a list of such row strings.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, MalformedInputError, SingularMatrixError

WORD_BITS = 64
_WORD_DTYPE = np.uint64


def _nwords(dim: int) -> int:
    return max(1, (dim + WORD_BITS - 1) // WORD_BITS)


def _tail_mask(dim: int) -> int:
    rem = dim % WORD_BITS
    if dim == 0:
        return 0
    return (1 << rem) - 1 if rem else (1 << WORD_BITS) - 1


def _pack(bits: np.ndarray) -> np.ndarray:
    """Pack ``(..., dim)`` 0/1 values into ``(..., nwords)`` uint64 words."""
    bits = np.asarray(bits, dtype=np.uint8) & 1
    dim = bits.shape[-1]
    pad = _nwords(dim) * WORD_BITS - dim
    if pad:
        filler = np.zeros((*bits.shape[:-1], pad), dtype=np.uint8)
        bits = np.concatenate([bits, filler], axis=-1)
    packed = np.ascontiguousarray(np.packbits(bits, axis=-1, bitorder="little"))
    return packed.view("<u8").astype(_WORD_DTYPE)


def _unpack(words: np.ndarray, dim: int) -> np.ndarray:
    """Inverse of :func:`_pack`; returns uint8 bits of shape ``(..., dim)``."""
    raw = np.ascontiguousarray(words, dtype="<u8").view(np.uint8)
    return np.unpackbits(raw, axis=-1, bitorder="little")[..., :dim]


def _frozen(words: np.ndarray, dim: int) -> np.ndarray:
    out = np.array(words, dtype=_WORD_DTYPE, copy=True)
    out[..., -1] &= _WORD_DTYPE(_tail_mask(dim))
    out.setflags(write=False)
    return out


def _parity(words: np.ndarray) -> int:
    return int(np.bitwise_count(words).sum()) & 1


def _parse_bits(text: str) -> np.ndarray:
    if any(ch not in "01" for ch in text):
        raise MalformedInputError(f"Not a bit string: {text!r}")
    return np.frombuffer(text.encode("ascii"), dtype=np.uint8) - ord("0")


@dataclass(frozen=True, eq=False)
class F2Vec:
    """Immutable packed vector over the two-element field."""

    dim: int
    words: np.ndarray

    def __post_init__(self) -> None:
        if self.dim < 0:
            raise ValueError(f"negative dimension {self.dim}")
        if self.words.shape != (_nwords(self.dim),):
            raise ValueError(
                f"expected {_nwords(self.dim)} words for dim {self.dim}, got shape {self.words.shape}"
            )
        object.__setattr__(self, "words", _frozen(self.words, self.dim))

    @classmethod
    def zeros(cls, dim: int) -> F2Vec:
        return cls(dim, np.zeros(_nwords(dim), dtype=_WORD_DTYPE))

    @classmethod
    def from_bits(cls, bits: Iterable[int] | np.ndarray) -> F2Vec:
        if isinstance(bits, np.ndarray):
            arr = (bits.astype(np.uint8) & 1).reshape(-1)
        else:
            arr = np.fromiter((int(b) & 1 for b in bits), dtype=np.uint8)
        return cls(arr.shape[0], _pack(arr))

    @classmethod
    def from_string(cls, text: str) -> F2Vec:
        return cls.from_bits(_parse_bits(text))

    @classmethod
    def from_int(cls, value: int, dim: int) -> F2Vec:
        """Vector whose bit ``k`` is bit ``k`` of ``value``."""
        if value < 0 or value >> dim:
            raise ValueError(f"{value} does not fit in {dim} bits")
        mask = (1 << WORD_BITS) - 1
        words = [(value >> (WORD_BITS * i)) & mask for i in range(_nwords(dim))]
        return cls(dim, np.array(words, dtype=_WORD_DTYPE))

    @classmethod
    def basis(cls, dim: int, k: int) -> F2Vec:
        if not 0 <= k < dim:
            raise DimensionMismatchError(f"basis index {k} outside 0..{dim - 1}")
        return cls.from_int(1 << k, dim)

    @property
    def bits(self) -> np.ndarray:
        return _unpack(self.words, self.dim)

    def to_int(self) -> int:
        return sum(int(w) << (WORD_BITS * i) for i, w in enumerate(self.words))

    def to_string(self) -> str:
        return "".join("1" if b else "0" for b in self.bits)

    def is_zero(self) -> bool:
        return not self.words.any()

    def weight(self) -> int:
        return int(np.bitwise_count(self.words).sum())

    def concat(self, other: F2Vec) -> F2Vec:
        return F2Vec.from_bits(np.concatenate([self.bits, other.bits]))

    def __getitem__(self, k: int) -> int:
        if not 0 <= k < self.dim:
            raise IndexError(k)
        return int(self.words[k // WORD_BITS] >> _WORD_DTYPE(k % WORD_BITS)) & 1

    def __iter__(self) -> Iterator[int]:
        return iter(int(b) for b in self.bits)

    def __len__(self) -> int:
        return self.dim

    def __add__(self, other: F2Vec) -> F2Vec:
        return vec_add(self, other)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, F2Vec):
            return NotImplemented
        return self.dim == other.dim and bool(np.array_equal(self.words, other.words))

    def __hash__(self) -> int:
        return hash((self.dim, self.words.tobytes()))

    def __repr__(self) -> str:
        return f"F2Vec('{self.to_string()}')"


@dataclass(frozen=True, eq=False)
class F2Mat:
    """Immutable packed matrix; ``row_data[i]`` holds row ``i`` as words."""

    rows: int
    cols: int
    row_data: np.ndarray

    def __post_init__(self) -> None:
        expected = (self.rows, _nwords(self.cols))
        if self.row_data.shape != expected:
            raise ValueError(f"expected row_data shape {expected}, got {self.row_data.shape}")
        object.__setattr__(self, "row_data", _frozen(self.row_data, self.cols))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> F2Mat:
        return cls(rows, cols, np.zeros((rows, _nwords(cols)), dtype=_WORD_DTYPE))

    @classmethod
    def identity(cls, n: int) -> F2Mat:
        return cls.from_dense(np.eye(n, dtype=np.uint8))

    @classmethod
    def from_dense(cls, dense: np.ndarray | Sequence[Sequence[int]]) -> F2Mat:
        arr = np.asarray(dense, dtype=np.uint8)
        if arr.ndim != 2:
            raise ValueError(f"expected a 2-d array, got {arr.ndim}-d")
        rows, cols = arr.shape
        return cls(rows, cols, _pack(arr & 1).reshape(rows, _nwords(cols)))

    @classmethod
    def from_strings(cls, rows: Sequence[str]) -> F2Mat:
        if not rows:
            return cls.zeros(0, 0)
        widths = {len(r) for r in rows}
        if len(widths) != 1:
            raise MalformedInputError(f"Ragged matrix rows: {list(rows)!r}")
        return cls.from_dense(np.stack([_parse_bits(r) for r in rows]))

    @classmethod
    def from_rows(cls, vectors: Sequence[F2Vec]) -> F2Mat:
        if not vectors:
            raise ValueError("from_rows needs at least one row")
        dims = {v.dim for v in vectors}
        if len(dims) != 1:
            raise DimensionMismatchError(f"rows of differing dims {sorted(dims)}")
        return cls(len(vectors), vectors[0].dim, np.stack([v.words for v in vectors]))

    @classmethod
    def from_columns(cls, vectors: Sequence[F2Vec]) -> F2Mat:
        return transpose(cls.from_rows(vectors))

    def to_dense(self) -> np.ndarray:
        return _unpack(self.row_data, self.cols)

    def to_strings(self) -> list[str]:
        return ["".join("1" if b else "0" for b in row) for row in self.to_dense()]

    def key(self) -> str:
        return "/".join(self.to_strings())

    def row(self, i: int) -> F2Vec:
        return F2Vec(self.cols, self.row_data[i])

    def column(self, j: int) -> F2Vec:
        return F2Vec.from_bits(self.to_dense()[:, j])

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def is_identity(self) -> bool:
        return self.is_square and self == F2Mat.identity(self.rows)

    def __matmul__(self, other: F2Mat | F2Vec) -> F2Mat | F2Vec:
        if isinstance(other, F2Vec):
            return mat_vec(self, other)
        return mat_mul(self, other)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, F2Mat):
            return NotImplemented
        return (
            self.rows == other.rows
            and self.cols == other.cols
            and bool(np.array_equal(self.row_data, other.row_data))
        )

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self.row_data.tobytes()))

    def __repr__(self) -> str:
        return f"F2Mat({self.to_strings()!r})"


def vec_add(u: F2Vec, v: F2Vec) -> F2Vec:
    if u.dim != v.dim:
        raise DimensionMismatchError(f"vec_add: dims {u.dim} and {v.dim}")
    return F2Vec(u.dim, u.words ^ v.words)


def dot(u: F2Vec, v: F2Vec) -> int:
    if u.dim != v.dim:
        raise DimensionMismatchError(f"dot: dims {u.dim} and {v.dim}")
    return _parity(u.words & v.words)


def mat_vec(m: F2Mat, v: F2Vec) -> F2Vec:
    if m.cols != v.dim:
        raise DimensionMismatchError(f"mat_vec: {m.rows}x{m.cols} matrix, vector of dim {v.dim}")
    bits = np.bitwise_count(m.row_data & v.words).sum(axis=1) & 1
    return F2Vec(m.rows, _pack(bits.astype(np.uint8)))


def mat_mul(a: F2Mat, b: F2Mat) -> F2Mat:
    if a.cols != b.rows:
        raise DimensionMismatchError(f"mat_mul: {a.rows}x{a.cols} times {b.rows}x{b.cols}")
    prod = (a.to_dense().astype(np.int64) @ b.to_dense().astype(np.int64)) & 1
    return F2Mat.from_dense(prod.astype(np.uint8).reshape(a.rows, b.cols))


def transpose(m: F2Mat) -> F2Mat:
    return F2Mat.from_dense(m.to_dense().T.reshape(m.cols, m.rows))


@dataclass(frozen=True)
class RowReduceResult:
    matrix: F2Mat
    rank: int
    pivots: tuple[int, ...]


def row_reduce(m: F2Mat) -> RowReduceResult:
    """Reduced row echelon form by elimination over the two-element field."""
    mat = m.to_dense().copy()
    rows, cols = mat.shape
    pivots: list[int] = []
    row = 0
    for col in range(cols):
        if row == rows:
            break
        candidates = np.nonzero(mat[row:, col])[0]
        if candidates.size == 0:
            continue
        pivot = row + int(candidates[0])
        if pivot != row:
            mat[[row, pivot]] = mat[[pivot, row]]
        hits = mat[:, col].astype(bool)
        hits[row] = False
        mat[hits] ^= mat[row]
        pivots.append(col)
        row += 1
    return RowReduceResult(matrix=F2Mat.from_dense(mat), rank=len(pivots), pivots=tuple(pivots))


def rank(m: F2Mat) -> int:
    return row_reduce(m).rank


def mat_inverse(m: F2Mat) -> F2Mat:
    if not m.is_square:
        raise DimensionMismatchError(f"mat_inverse: {m.rows}x{m.cols} is not square")
    n = m.rows
    aug = np.concatenate([m.to_dense(), np.eye(n, dtype=np.uint8)], axis=1)
    for col in range(n):
        candidates = np.nonzero(aug[col:, col])[0]
        if candidates.size == 0:
            raise SingularMatrixError(f"matrix {m.to_strings()} is singular")
        pivot = col + int(candidates[0])
        if pivot != col:
            aug[[col, pivot]] = aug[[pivot, col]]
        hits = aug[:, col].astype(bool)
        hits[col] = False
        aug[hits] ^= aug[col]
    return F2Mat.from_dense(aug[:, n:])
