"""
Sparse exact matrices and vectors over a Field.

A vector is a plain dict {index: element} holding nonzero entries only.
A SparseMatrix stores rows as dicts of nonzero entries.
"""

from typing import Any, Iterable, Iterator, Mapping, Sequence

from sympy.polys.matrices import DomainMatrix

from src.models.exceptions import DimensionMismatchError
from src.models.field import Field

Vector = dict[int, Any]


def vec_add(target: Vector, other: Mapping[int, Any], coeff: Any = None) -> Vector:
    """In-place target += coeff * other"""
    for idx, value in other.items():
        term = value if coeff is None else coeff * value
        new = target[idx] + term if idx in target else term
        if new:
            target[idx] = new
        else:
            target.pop(idx, None)
    return target


def vec_scale(v: Mapping[int, Any], coeff: Any) -> Vector:
    if not coeff:
        return {}
    return {i: coeff * x for i, x in v.items() if coeff * x}


def vec_from_dense(field: Field, values: Sequence[Any]) -> Vector:
    out: Vector = {}
    for i, raw in enumerate(values):
        x = field.convert(raw)
        if x:
            out[i] = x
    return out


def vec_to_dense(field: Field, v: Mapping[int, Any], size: int) -> list[Any]:
    dense = [field.zero] * size
    for i, x in v.items():
        dense[i] = x
    return dense


class SparseMatrix:
    """Row-major sparse matrix with exact entries"""

    __slots__ = ("field", "nrows", "ncols", "_rows")

    def __init__(self, field: Field, nrows: int, ncols: int, rows: Mapping[int, Mapping[int, Any]] | None = None):
        if nrows < 0 or ncols < 0:
            raise DimensionMismatchError(f"Negative matrix shape {nrows}x{ncols}")
        self.field = field
        self.nrows = nrows
        self.ncols = ncols
        self._rows: dict[int, dict[int, Any]] = {}
        for i, row in (rows or {}).items():
            clean = {j: x for j, x in row.items() if x}
            if clean:
                if not 0 <= i < nrows or any(not 0 <= j < ncols for j in clean):
                    raise DimensionMismatchError(f"Entry outside {nrows}x{ncols} matrix in row {i}")
                self._rows[i] = clean

    # Constructors

    @classmethod
    def zeros(cls, field: Field, nrows: int, ncols: int) -> "SparseMatrix":
        return cls(field, nrows, ncols)

    @classmethod
    def identity(cls, field: Field, n: int) -> "SparseMatrix":
        return cls(field, n, n, {i: {i: field.one} for i in range(n)})

    @classmethod
    def from_entries(cls, field: Field, nrows: int, ncols: int, entries: Iterable[tuple[int, int, Any]]) -> "SparseMatrix":
        """Build from (row, col, value) triples; repeated positions accumulate"""
        rows: dict[int, dict[int, Any]] = {}
        for i, j, x in entries:
            row = rows.setdefault(i, {})
            row[j] = row[j] + x if j in row else x
        return cls(field, nrows, ncols, rows)

    @classmethod
    def from_rows(cls, field: Field, dense_rows: Sequence[Sequence[Any]], ncols: int | None = None) -> "SparseMatrix":
        width = ncols if ncols is not None else (len(dense_rows[0]) if dense_rows else 0)
        rows = {}
        for i, dense in enumerate(dense_rows):
            if len(dense) != width:
                raise DimensionMismatchError(f"Row {i} has {len(dense)} entries, expected {width}")
            rows[i] = vec_from_dense(field, dense)
        return cls(field, len(dense_rows), width, rows)

    @classmethod
    def from_row_vectors(cls, field: Field, ncols: int, vectors: Sequence[Mapping[int, Any]]) -> "SparseMatrix":
        return cls(field, len(vectors), ncols, {i: dict(v) for i, v in enumerate(vectors)})

    @classmethod
    def from_columns(cls, field: Field, nrows: int, columns: Sequence[Mapping[int, Any]]) -> "SparseMatrix":
        rows: dict[int, dict[int, Any]] = {}
        for j, col in enumerate(columns):
            for i, x in col.items():
                if x:
                    rows.setdefault(i, {})[j] = x
        return cls(field, nrows, len(columns), rows)

    @classmethod
    def block(cls, field: Field, row_sizes: Sequence[int], col_sizes: Sequence[int],
              blocks: Mapping[tuple[int, int], "SparseMatrix"]) -> "SparseMatrix":
        """Assemble a block matrix; missing blocks are zero"""
        row_offsets = [sum(row_sizes[:k]) for k in range(len(row_sizes))]
        col_offsets = [sum(col_sizes[:k]) for k in range(len(col_sizes))]
        rows: dict[int, dict[int, Any]] = {}
        for (bi, bj), blk in blocks.items():
            if blk.shape != (row_sizes[bi], col_sizes[bj]):
                raise DimensionMismatchError(
                    f"Block ({bi},{bj}) has shape {blk.shape}, expected {(row_sizes[bi], col_sizes[bj])}")
            for i, row in blk._rows.items():
                target = rows.setdefault(row_offsets[bi] + i, {})
                for j, x in row.items():
                    target[col_offsets[bj] + j] = x
        return cls(field, sum(row_sizes), sum(col_sizes), rows)

    @classmethod
    def direct_sum(cls, field: Field, mats: Sequence["SparseMatrix"]) -> "SparseMatrix":
        return cls.block(field, [m.nrows for m in mats], [m.ncols for m in mats],
                         {(k, k): m for k, m in enumerate(mats)})

    # Access

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    @property
    def nnz(self) -> int:
        return sum(len(r) for r in self._rows.values())

    def get(self, i: int, j: int) -> Any:
        return self._rows.get(i, {}).get(j, self.field.zero)

    def row(self, i: int) -> Vector:
        return dict(self._rows.get(i, {}))

    def row_items(self) -> Iterator[tuple[int, dict[int, Any]]]:
        """Nonzero rows in increasing index order"""
        for i in sorted(self._rows):
            yield i, self._rows[i]

    def entries(self) -> Iterator[tuple[int, int, Any]]:
        for i, row in self.row_items():
            for j in sorted(row):
                yield i, j, row[j]

    def columns(self) -> list[Vector]:
        cols: list[Vector] = [{} for _ in range(self.ncols)]
        for i, row in self._rows.items():
            for j, x in row.items():
                cols[j][i] = x
        return cols

    def column(self, j: int) -> Vector:
        return {i: row[j] for i, row in self._rows.items() if j in row}

    def is_zero(self) -> bool:
        return not self._rows

    def to_dense(self) -> list[list[Any]]:
        return [vec_to_dense(self.field, self._rows.get(i, {}), self.ncols) for i in range(self.nrows)]

    def to_strings(self) -> list[list[str]]:
        return [[self.field.to_string(x) for x in row] for row in self.to_dense()]

    def to_domain_matrix(self) -> DomainMatrix:
        return DomainMatrix({i: dict(r) for i, r in self._rows.items()}, self.shape, self.field.domain)

    # Arithmetic

    def _check_same(self, other: "SparseMatrix") -> None:
        if self.field != other.field:
            raise DimensionMismatchError(f"Field mismatch: {self.field} vs {other.field}")
        if self.shape != other.shape:
            raise DimensionMismatchError(f"Shape mismatch: {self.shape} vs {other.shape}")

    def __add__(self, other: "SparseMatrix") -> "SparseMatrix":
        self._check_same(other)
        rows = {i: dict(r) for i, r in self._rows.items()}
        for i, r in other._rows.items():
            vec_add(rows.setdefault(i, {}), r)
        return SparseMatrix(self.field, self.nrows, self.ncols, rows)

    def __neg__(self) -> "SparseMatrix":
        return SparseMatrix(self.field, self.nrows, self.ncols,
                            {i: {j: -x for j, x in r.items()} for i, r in self._rows.items()})

    def __sub__(self, other: "SparseMatrix") -> "SparseMatrix":
        return self + (-other)

    def scale(self, coeff: Any) -> "SparseMatrix":
        return SparseMatrix(self.field, self.nrows, self.ncols,
                            {i: vec_scale(r, coeff) for i, r in self._rows.items()})

    def __matmul__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.field != other.field:
            raise DimensionMismatchError(f"Field mismatch: {self.field} vs {other.field}")
        if self.ncols != other.nrows:
            raise DimensionMismatchError(f"Cannot multiply {self.shape} by {other.shape}")
        rows: dict[int, dict[int, Any]] = {}
        for i, row in self._rows.items():
            acc: dict[int, Any] = {}
            for k, x in row.items():
                other_row = other._rows.get(k)
                if other_row:
                    vec_add(acc, other_row, x)
            if acc:
                rows[i] = acc
        return SparseMatrix(self.field, self.nrows, other.ncols, rows)

    def apply(self, v: Mapping[int, Any]) -> Vector:
        """Matrix times a sparse column vector"""
        out: Vector = {}
        for i, row in self._rows.items():
            acc = self.field.zero
            for j, y in row.items():
                x = v.get(j)
                if x:
                    acc += y * x
            if acc:
                out[i] = acc
        return out

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix(self.field, self.ncols, self.nrows, dict(enumerate(self.columns())))

    def submatrix(self, row_idx: Sequence[int], col_idx: Sequence[int]) -> "SparseMatrix":
        col_pos = {c: k for k, c in enumerate(col_idx)}
        rows = {}
        for k, i in enumerate(row_idx):
            src = self._rows.get(i, {})
            rows[k] = {col_pos[j]: x for j, x in src.items() if j in col_pos}
        return SparseMatrix(self.field, len(row_idx), len(col_idx), rows)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return self.field == other.field and self.shape == other.shape and self._rows == other._rows

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"SparseMatrix({self.nrows}x{self.ncols}, nnz={self.nnz}, {self.field.label()})"
