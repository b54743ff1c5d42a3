"""
Exact sparse linear algebra: reduced row echelon form, kernels, solving, subquotients
"""

import logging
from typing import Any, Mapping, Optional, Sequence

from src.config import get_max_chain_dim
from src.models.exceptions import ComplexConsistencyError, ResourceLimitExceeded
from src.models.field import Field
from src.models.homology import HomologySpace
from src.models.matrix import SparseMatrix, Vector, vec_add, vec_from_dense

logger = logging.getLogger(__name__)

# Blocks smaller than this in both directions are reduced with the dense backend
DENSE_BLOCK_LIMIT = 64


def check_dimension(dim: int, what: str, limit: Optional[int] = None) -> None:
    """Refuse to materialize spaces above the configured cap"""
    cap = limit if limit is not None else get_max_chain_dim()
    if dim > cap:
        raise ResourceLimitExceeded(f"{what} has dimension {dim}, above the limit {cap}")


def _components(m: SparseMatrix) -> list[tuple[list[int], list[int]]]:
    """Connected components of the bipartite row/column graph of nonzero entries"""
    parent: dict[int, int] = {}

    def find(x: int) -> int:
        root = x
        while parent.setdefault(root, root) != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    offset = m.nrows
    for i, row in m.row_items():
        ri = find(i)
        for j in row:
            rj = find(offset + j)
            if ri != rj:
                parent[rj] = ri

    groups: dict[int, tuple[list[int], list[int]]] = {}
    for node in list(parent):
        rows, cols = groups.setdefault(find(node), ([], []))
        if node < offset:
            rows.append(node)
        else:
            cols.append(node - offset)
    blocks = [(sorted(r), sorted(c)) for r, c in groups.values() if r]
    blocks.sort(key=lambda rc: rc[1][0])
    return blocks


def _rref_block(m: SparseMatrix, rows: list[int], cols: list[int]) -> list[tuple[int, Vector]]:
    field = m.field
    if len(rows) == 1:
        row = m.row(rows[0])
        inv = field.div(field.one, row[cols[0]])
        return [(cols[0], {j: inv * x for j, x in row.items()})]

    dm = m.submatrix(rows, cols).to_domain_matrix()
    if len(rows) < DENSE_BLOCK_LIMIT and len(cols) < DENSE_BLOCK_LIMIT:
        dm = dm.to_dense()
    reduced, pivots = dm.rref()
    rep = reduced.to_sparse().rep
    out = []
    for r, p in enumerate(pivots):
        local = rep.get(r, {})
        out.append((cols[p], {cols[j]: x for j, x in local.items() if x}))
    return out


def rref(m: SparseMatrix) -> tuple[SparseMatrix, list[int]]:
    """
    Reduced row echelon form of m with its pivot columns.

    The matrix is split into independent blocks first so each block is
    reduced on its own; zero rows are placed at the bottom.
    """
    reduced: list[tuple[int, Vector]] = []
    for rows, cols in _components(m):
        reduced.extend(_rref_block(m, rows, cols))
    reduced.sort(key=lambda pr: pr[0])
    pivots = [p for p, _ in reduced]
    result = SparseMatrix(m.field, m.nrows, m.ncols, {i: row for i, (_, row) in enumerate(reduced)})
    return result, pivots


def rank(m: SparseMatrix) -> int:
    return len(rref(m)[1])


def kernel_basis(m: SparseMatrix) -> list[Vector]:
    """Basis of the null space, one vector per free column in increasing order"""
    field = m.field
    reduced, pivots = rref(m)
    pivot_set = set(pivots)
    by_column: dict[int, list[tuple[int, Any]]] = {}
    for r, p in enumerate(pivots):
        for j, x in reduced.row(r).items():
            if j != p:
                by_column.setdefault(j, []).append((p, x))
    basis = []
    for f in range(m.ncols):
        if f in pivot_set:
            continue
        v: Vector = {f: field.one}
        for p, x in by_column.get(f, []):
            v[p] = -x
        basis.append(v)
    return basis


def image_basis(m: SparseMatrix) -> list[Vector]:
    """Columns of m at the pivot positions of its rref"""
    _, pivots = rref(m)
    cols = m.columns()
    return [cols[j] for j in pivots]


def solve(m: SparseMatrix, rhs: Mapping[int, Any] | Sequence[Any]) -> Optional[Vector]:
    """One solution of m x = rhs with free variables set to zero, or None"""
    field = m.field
    b = vec_from_dense(field, rhs) if isinstance(rhs, (list, tuple)) else dict(rhs)
    rows = {i: dict(r) for i, r in m.row_items()}
    for i, x in b.items():
        rows.setdefault(i, {})[m.ncols] = x
    augmented = SparseMatrix(field, m.nrows, m.ncols + 1, rows)
    reduced, pivots = rref(augmented)
    if pivots and pivots[-1] == m.ncols:
        return None
    x: Vector = {}
    for r, p in enumerate(pivots):
        value = reduced.get(r, m.ncols)
        if value:
            x[p] = value
    return x


def reduce_vector(v: Mapping[int, Any], reduced: SparseMatrix, pivots: Sequence[int]) -> Vector:
    """Remainder of v after clearing the pivot positions of a row-reduced basis"""
    out = dict(v)
    for r, p in enumerate(pivots):
        c = v.get(p)
        if c:
            vec_add(out, reduced.row(r), -c)
    return out


def subquotient(field: Field, ambient_dim: int, cycles: Sequence[Mapping[int, Any]],
                boundaries: Sequence[Mapping[int, Any]], degree: int = 0,
                differential: Optional[SparseMatrix] = None) -> HomologySpace:
    """
    Quotient span(cycles) / span(boundaries) with representatives and a projection.

    Representatives are chosen greedily from the cycle list. The projection
    sends any cycle to the coordinates of its class in that basis.
    """
    bd = SparseMatrix.from_row_vectors(field, ambient_dim, list(boundaries))
    red_b, piv_b = rref(bd)

    if boundaries:
        zm = SparseMatrix.from_row_vectors(field, ambient_dim, list(cycles))
        red_z, piv_z = rref(zm)
        for r in range(len(piv_b)):
            rest = reduce_vector(red_b.row(r), red_z, piv_z)
            if rest:
                raise ComplexConsistencyError(
                    f"Boundaries in degree {degree} are not contained in the cycles",
                    witness=f"boundary row {r}, support={sorted(rest)[:8]}")
        cycle_rank = len(piv_z)
    else:
        cycle_rank = len(cycles)

    reduced_cycles = [reduce_vector(z, red_b, piv_b) for z in cycles]
    _, chosen = rref(SparseMatrix.from_columns(field, ambient_dim, reduced_cycles))
    expected = cycle_rank - len(piv_b)
    if len(chosen) != expected:
        raise ComplexConsistencyError(
            f"Degree {degree}: found {len(chosen)} independent classes, expected {expected}")
    h = len(chosen)

    reps = SparseMatrix.from_columns(field, ambient_dim, [dict(cycles[i]) for i in chosen])
    if h == 0:
        projection = SparseMatrix.zeros(field, 0, ambient_dim)
        return HomologySpace(field, degree, ambient_dim, reps, projection, differential)

    # rref [W | I] records how each reduced row combines the chosen reduced cycles
    aug_rows = {}
    for k, i in enumerate(chosen):
        row = dict(reduced_cycles[i])
        row[ambient_dim + k] = field.one
        aug_rows[k] = row
    red_h, piv_h = rref(SparseMatrix(field, h, ambient_dim + h, aug_rows))
    transforms = []
    for r in range(h):
        row = red_h.row(r)
        transforms.append({j - ambient_dim: x for j, x in row.items() if j >= ambient_dim})
    pos_h = {p: r for r, p in enumerate(piv_h)}

    columns: dict[int, Vector] = {}
    for q, r in pos_h.items():
        columns[q] = dict(transforms[r])
    for rb, q in enumerate(piv_b):
        col: Vector = {}
        for j, x in red_b.row(rb).items():
            r = pos_h.get(j)
            if r is not None:
                vec_add(col, transforms[r], -x)
        if col:
            columns[q] = col
    entries = ((i, q, x) for q, col in columns.items() for i, x in col.items())
    projection = SparseMatrix.from_entries(field, h, ambient_dim, entries)
    logger.debug(f"Subquotient in degree {degree}: {len(cycles)} cycles, {len(piv_b)} boundaries, dim {h}")
    return HomologySpace(field, degree, ambient_dim, reps, projection, differential)


def homology(field: Field, dim: int, outgoing: Optional[SparseMatrix],
             incoming: Optional[SparseMatrix], degree: int = 0) -> HomologySpace:
    """
    Homology at a node of a complex.

    Args:
        dim: Dimension of the chain space at this node
        outgoing: Differential leaving the node (None means every vector is a cycle)
        incoming: Differential arriving at the node (None means no boundaries)
    """
    if outgoing is None or outgoing.nrows == 0:
        cycles: list[Vector] = [{i: field.one} for i in range(dim)]
    else:
        cycles = kernel_basis(outgoing)
    boundaries = image_basis(incoming) if incoming is not None and incoming.ncols else []
    return subquotient(field, dim, cycles, boundaries, degree=degree, differential=outgoing)
