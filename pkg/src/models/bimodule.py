"""
Matrices over an algebra and dg bimodules presented by idempotents
"""

from dataclasses import dataclass, field
from typing import Any, Iterator, Mapping, Optional, Sequence

from src.models.algebra import Algebra
from src.models.exceptions import AlgebraMismatchError, DimensionMismatchError
from src.models.matrix import Vector, vec_add


class BMatrix:
    """
    A matrix whose entries are elements of an algebra B, stored sparsely as
    {(row, col): coefficient vector}. Acts on column vectors from the left,
    so it is a map of right B-modules.
    """

    __slots__ = ("algebra", "nrows", "ncols", "entries")

    def __init__(self, algebra: Algebra, nrows: int, ncols: int,
                 entries: Optional[Mapping[tuple[int, int], Mapping[int, Any]]] = None):
        self.algebra = algebra
        self.nrows = nrows
        self.ncols = ncols
        self.entries: dict[tuple[int, int], Vector] = {}
        for (i, j), v in (entries or {}).items():
            if not (0 <= i < nrows and 0 <= j < ncols):
                raise DimensionMismatchError(f"Entry ({i},{j}) outside {nrows}x{ncols} matrix over {algebra.name}")
            clean = {k: x for k, x in v.items() if x}
            if clean:
                self.entries[(i, j)] = clean

    @classmethod
    def zeros(cls, algebra: Algebra, nrows: int, ncols: int) -> "BMatrix":
        return cls(algebra, nrows, ncols)

    @classmethod
    def identity(cls, algebra: Algebra, n: int) -> "BMatrix":
        return cls(algebra, n, n, {(i, i): dict(algebra.unit) for i in range(n)})

    @classmethod
    def scalar(cls, algebra: Algebra, element: Mapping[int, Any]) -> "BMatrix":
        return cls(algebra, 1, 1, {(0, 0): dict(element)})

    @classmethod
    def from_dense(cls, algebra: Algebra, rows: Sequence[Sequence[Sequence[Any]]]) -> "BMatrix":
        """Rows of entries, each entry a dense coefficient list of length dim B"""
        nrows = len(rows)
        ncols = len(rows[0]) if rows else 0
        entries = {}
        for i, row in enumerate(rows):
            if len(row) != ncols:
                raise DimensionMismatchError(f"Row {i} has {len(row)} entries, expected {ncols}")
            for j, coeffs in enumerate(row):
                entries[(i, j)] = algebra.coerce(coeffs)
        return cls(algebra, nrows, ncols, entries)

    @classmethod
    def block_diagonal(cls, algebra: Algebra, blocks: Sequence["BMatrix"]) -> "BMatrix":
        entries = {}
        r0 = c0 = 0
        for blk in blocks:
            for (i, j), v in blk.entries.items():
                entries[(r0 + i, c0 + j)] = v
            r0 += blk.nrows
            c0 += blk.ncols
        return cls(algebra, r0, c0, entries)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def get(self, i: int, j: int) -> Vector:
        return self.entries.get((i, j), {})

    def items(self) -> Iterator[tuple[tuple[int, int], Vector]]:
        for key in sorted(self.entries):
            yield key, self.entries[key]

    def is_zero(self) -> bool:
        return not self.entries

    def to_dense(self) -> list[list[list[str]]]:
        field = self.algebra.field
        dim = self.algebra.dim
        return [[[field.to_string(self.get(i, j).get(k, field.zero)) for k in range(dim)]
                 for j in range(self.ncols)] for i in range(self.nrows)]

    def _check(self, other: "BMatrix") -> None:
        if self.algebra is not other.algebra and not self.algebra.same_structure(other.algebra):
            raise AlgebraMismatchError(f"Matrices over {self.algebra.name} and {other.algebra.name}")

    def __add__(self, other: "BMatrix") -> "BMatrix":
        self._check(other)
        if self.shape != other.shape:
            raise DimensionMismatchError(f"Shape mismatch: {self.shape} vs {other.shape}")
        entries = {k: dict(v) for k, v in self.entries.items()}
        for k, v in other.entries.items():
            vec_add(entries.setdefault(k, {}), v)
        return BMatrix(self.algebra, self.nrows, self.ncols, entries)

    def scale(self, coeff: Any) -> "BMatrix":
        return BMatrix(self.algebra, self.nrows, self.ncols,
                       {k: {i: coeff * x for i, x in v.items()} for k, v in self.entries.items()})

    def __neg__(self) -> "BMatrix":
        return self.scale(-self.algebra.field.one)

    def __sub__(self, other: "BMatrix") -> "BMatrix":
        return self + (-other)

    def __matmul__(self, other: "BMatrix") -> "BMatrix":
        self._check(other)
        if self.ncols != other.nrows:
            raise DimensionMismatchError(f"Cannot multiply {self.shape} by {other.shape} over {self.algebra.name}")
        by_row: dict[int, list[tuple[int, Vector]]] = {}
        for (k, j), v in other.entries.items():
            by_row.setdefault(k, []).append((j, v))
        entries: dict[tuple[int, int], Vector] = {}
        for (i, k), u in self.entries.items():
            for j, v in by_row.get(k, ()):
                vec_add(entries.setdefault((i, j), {}), self.algebra.multiply(u, v))
        return BMatrix(self.algebra, self.nrows, other.ncols, entries)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BMatrix):
            return NotImplemented
        return self.shape == other.shape and self.entries == other.entries

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"BMatrix({self.nrows}x{self.ncols} over {self.algebra.name}, nnz={len(self.entries)})"


@dataclass
class DgBimodule:
    """
    A bounded complex X^low..X^high of right B-modules X^p = E_p B^{r_p}
    with d_p: X^p -> X^{p-1} and a left A-action L_p(e_i) in every degree.

    `differentials` is keyed by the source degree p > low; `left_action[p][i]`
    is the matrix of the i-th basis element of A.
    """

    name: str
    source: Algebra
    target: Algebra
    low: int
    high: int
    ranks: dict[int, int]
    idempotents: dict[int, BMatrix]
    differentials: dict[int, BMatrix] = field(default_factory=dict)
    left_action: dict[int, list[BMatrix]] = field(default_factory=dict)

    @property
    def degrees(self) -> range:
        return range(self.low, self.high + 1)

    def rank(self, p: int) -> int:
        return self.ranks.get(p, 0)

    def idempotent(self, p: int) -> BMatrix:
        return self.idempotents.get(p, BMatrix.zeros(self.target, 0, 0))

    def differential(self, p: int) -> BMatrix:
        """d_p: X^p -> X^{p-1}, zero outside the stored range"""
        if p in self.differentials:
            return self.differentials[p]
        return BMatrix.zeros(self.target, self.rank(p - 1), self.rank(p))

    def action(self, p: int, i: int) -> BMatrix:
        if p not in self.left_action:
            return BMatrix.zeros(self.target, self.rank(p), self.rank(p))
        return self.left_action[p][i]

    def action_of(self, p: int, a: Mapping[int, Any]) -> BMatrix:
        """Matrix of an arbitrary element of A in degree p"""
        out = BMatrix.zeros(self.target, self.rank(p), self.rank(p))
        for i, x in a.items():
            out = out + self.action(p, i).scale(x)
        return out

    def corner(self, p: int, i: int) -> BMatrix:
        """E_p L_p(e_i) E_p, the matrix of xi_j(e_i x_k)"""
        e = self.idempotent(p)
        return e @ self.action(p, i) @ e

    def __repr__(self) -> str:
        ranks = ",".join(str(self.rank(p)) for p in self.degrees)
        return f"DgBimodule({self.name}: {self.source.name} -> {self.target.name}, degrees {self.low}..{self.high}, ranks {ranks})"
