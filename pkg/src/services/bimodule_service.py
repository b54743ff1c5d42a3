"""
Bimodule service - dg bimodules presented by idempotents: construction,
validation, composition and the endomorphism complex
"""

import logging
from typing import Any, Optional, Sequence

from src.models.algebra import Algebra
from src.models.bimodule import BMatrix, DgBimodule
from src.models.exceptions import AlgebraMismatchError, DimensionMismatchError, DocumentParseError, ValidationFailure
from src.models.homology import HomologySpace
from src.models.matrix import SparseMatrix, Vector, vec_add
from src.models.schemas import BimoduleDegree, BimoduleDocument, Report
from src.services.exactlin import image_basis, kernel_basis, rank, subquotient

logger = logging.getLogger(__name__)


# Construction

def regular_bimodule(a: Algebra, degree: int = 0) -> DgBimodule:
    """A over A in a single degree, E = (1) and L(e_i) = (e_i)"""
    actions = [BMatrix.scalar(a, a.basis_vector(i)) for i in range(a.dim)]
    return DgBimodule(f"regular({a.name})", a, a, degree, degree, {degree: 1},
                      {degree: BMatrix.identity(a, 1)}, {}, {degree: actions})


def bimodule_from_morphism(f: SparseMatrix, a: Algebra, b: Algebra, name: Optional[str] = None) -> DgBimodule:
    """
    The bimodule f(1)B for a multiplicative, possibly non-unital, linear map
    f: A -> B given as a dim B x dim A matrix whose column i is f(e_i).
    """
    if f.shape != (b.dim, a.dim):
        raise DimensionMismatchError(f"Morphism matrix has shape {f.shape}, expected {(b.dim, a.dim)}")
    for i in range(a.dim):
        for j in range(a.dim):
            lhs = f.apply(a.product(i, j))
            rhs = b.multiply(f.column(i), f.column(j))
            if lhs != rhs:
                raise ValidationFailure(f"Map {a.name} -> {b.name} is not multiplicative",
                                        witness=f"f({a.basis[i]}{a.basis[j]}) != f({a.basis[i]})f({a.basis[j]})")
    one = f.apply(a.unit)
    if b.multiply(one, one) != one:
        raise ValidationFailure(f"f(1) is not idempotent in {b.name}")
    actions = [BMatrix.scalar(b, f.column(i)) for i in range(a.dim)]
    label = name or f"{a.name}->{b.name}"
    logger.info(f"Bimodule from morphism {label}")
    return DgBimodule(label, a, b, 0, 0, {0: 1}, {0: BMatrix.scalar(b, one)}, {}, {0: actions})


def shift(x: DgBimodule, k: int) -> DgBimodule:
    """X[k]: degree p moves to p + k and the differential picks up (-1)^k"""
    sign = x.target.field.sign(k)
    return DgBimodule(
        f"{x.name}[{k}]", x.source, x.target, x.low + k, x.high + k,
        {p + k: r for p, r in x.ranks.items()},
        {p + k: e for p, e in x.idempotents.items()},
        {p + k: d.scale(sign) for p, d in x.differentials.items()},
        {p + k: list(acts) for p, acts in x.left_action.items()},
    )


def direct_sum(x: DgBimodule, y: DgBimodule) -> DgBimodule:
    _same_pair(x, y)
    low, high = min(x.low, y.low), max(x.high, y.high)
    ranks, idems, diffs, actions = {}, {}, {}, {}
    for p in range(low, high + 1):
        ranks[p] = x.rank(p) + y.rank(p)
        idems[p] = BMatrix.block_diagonal(x.target, [x.idempotent(p), y.idempotent(p)])
        if p > low:
            diffs[p] = BMatrix.block_diagonal(x.target, [x.differential(p), y.differential(p)])
        actions[p] = [BMatrix.block_diagonal(x.target, [x.action(p, i), y.action(p, i)])
                      for i in range(x.source.dim)]
    return DgBimodule(f"{x.name}+{y.name}", x.source, x.target, low, high, ranks, idems, diffs, actions)


def _same_pair(x: DgBimodule, y: DgBimodule) -> None:
    if not (x.source.same_structure(y.source) and x.target.same_structure(y.target)):
        raise AlgebraMismatchError(f"{x.name} and {y.name} are not bimodules over the same algebras")


# Validation

def _first(m: BMatrix) -> str:
    for (i, j), _ in m.items():
        return f"entry ({i},{j})"
    return "entry (?)"


def validate_bimodule(x: DgBimodule) -> Report:
    """Check the presentation, the differential and the left action exactly"""
    report = Report(title=f"validate bimodule {x.name}")
    a, b = x.source, x.target
    checks: dict[str, Optional[str]] = {name: None for name in (
        "bimodule.shapes", "bimodule.idempotent", "bimodule.presentation",
        "bimodule.d_squared", "bimodule.unital", "bimodule.action_stable", "bimodule.multiplicative",
        "bimodule.action_commutes_d")}

    def fail(check_id: str, witness: str) -> None:
        if checks[check_id] is None:
            checks[check_id] = witness

    for p in x.degrees:
        r = x.rank(p)
        e = x.idempotent(p)
        acts = x.left_action.get(p, [])
        if e.shape != (r, r) or len(acts) != a.dim or any(m.shape != (r, r) for m in acts):
            fail("bimodule.shapes", f"degree {p}")
            continue
        if p > x.low and x.differential(p).shape != (x.rank(p - 1), r):
            fail("bimodule.shapes", f"differential in degree {p}")
            continue
        if e @ e != e:
            fail("bimodule.idempotent", f"degree {p} {_first(e @ e - e)}")
        if p > x.low:
            d = x.differential(p)
            if x.idempotent(p - 1) @ d @ e != d:
                fail("bimodule.presentation", f"degree {p}")
            if p - 1 > x.low and not (x.differential(p - 1) @ d).is_zero():
                fail("bimodule.d_squared", f"d_{p - 1} d_{p} {_first(x.differential(p - 1) @ d)}")
        if x.action_of(p, a.unit) @ e != e:
            fail("bimodule.unital", f"L_{p}(1) E_{p} != E_{p}")
        for i in range(a.dim):
            li = acts[i] @ e
            if e @ li != li:
                fail("bimodule.action_stable", f"degree {p}, {a.basis[i]}")
            for j in range(a.dim):
                lhs = acts[i] @ acts[j] @ e
                rhs = x.action_of(p, a.product(i, j)) @ e
                if lhs != rhs:
                    fail("bimodule.multiplicative", f"degree {p}, ({a.basis[i]},{a.basis[j]})")
            if p > x.low:
                d = x.differential(p)
                if d @ li != x.action(p - 1, i) @ d @ e:
                    fail("bimodule.action_commutes_d", f"degree {p}, {a.basis[i]}")

    details = {
        "bimodule.shapes": "matrix shapes match ranks and dim A",
        "bimodule.idempotent": "E_p E_p = E_p, so columns and rows of E_p are a dual basis of E_p B^r",
        "bimodule.presentation": "E_{p-1} d_p E_p = d_p",
        "bimodule.d_squared": "d d = 0",
        "bimodule.unital": "L(1) acts as the identity of X^p",
        "bimodule.action_stable": "L(a) preserves E_p B^r",
        "bimodule.multiplicative": "L(e_i) L(e_j) = L(e_i e_j) on X^p",
        "bimodule.action_commutes_d": "d L(a) = L(a) d",
    }
    for check_id, witness in checks.items():
        report.add(check_id, witness is None, details[check_id], witness)
    logger.info(f"Validated bimodule {x.name} ({a.name} -> {b.name}): ok={report.ok}")
    return report


def require_valid_bimodule(x: DgBimodule) -> None:
    report = validate_bimodule(x)
    if not report.ok:
        first = report.failures()[0]
        raise ValidationFailure(f"Bimodule {x.name} fails {first.id}", witness=first.witness)


# Documents

def bimodule_from_document(doc: BimoduleDocument, source: Algebra, target: Algebra) -> DgBimodule:
    """Build a DgBimodule from a parsed document once both algebras are known"""
    low, high = doc.degrees

    def matrix(rows: Sequence, what: str, shape: tuple[int, int]) -> BMatrix:
        if not rows or all(not row for row in rows):
            return BMatrix.zeros(target, *shape)
        try:
            m = BMatrix.from_dense(target, rows)
        except (ValueError, ZeroDivisionError, DimensionMismatchError) as e:
            raise DocumentParseError(f"Invalid {what} in bimodule {doc.name}: {e}") from e
        if m.shape != shape:
            raise DocumentParseError(f"{what} in bimodule {doc.name} has shape {m.shape}, expected {shape}")
        return m

    ranks = {low + k: entry.rank for k, entry in enumerate(doc.modules)}
    idems, diffs, actions = {}, {}, {}
    for k, entry in enumerate(doc.modules):
        p = low + k
        r = entry.rank
        idems[p] = matrix(entry.idempotent, f"idempotent of degree {p}", (r, r))
        if p > low:
            diffs[p] = matrix(entry.differential or [], f"differential of degree {p}", (ranks[p - 1], r))
        elif entry.differential:
            raise DocumentParseError(f"Bimodule {doc.name}: the lowest degree {p} takes no differential")
        if len(entry.left_action) != source.dim:
            raise DocumentParseError(
                f"Bimodule {doc.name}: degree {p} has {len(entry.left_action)} action matrices, "
                f"expected dim {source.name} = {source.dim}")
        actions[p] = [matrix(m, f"left action of {source.basis[i]} in degree {p}", (r, r))
                      for i, m in enumerate(entry.left_action)]
    return DgBimodule(doc.name, source, target, low, high, ranks, idems, diffs, actions)


def bimodule_to_document(x: DgBimodule, source_ref: Any = None, target_ref: Any = None) -> BimoduleDocument:
    modules = []
    for p in x.degrees:
        modules.append(BimoduleDegree(
            rank=x.rank(p),
            idempotent=x.idempotent(p).to_dense(),
            differential=x.differential(p).to_dense() if p > x.low else None,
            left_action=[x.action(p, i).to_dense() for i in range(x.source.dim)],
        ))
    return BimoduleDocument(name=x.name, source=source_ref or x.source.name, target=target_ref or x.target.name,
                            degrees=[x.low, x.high], modules=modules)


# Composition X (x)_B Y

def _assemble(algebra: Algebra, row_sizes: Sequence[int], col_sizes: Sequence[int],
              blocks: dict[tuple[int, int], BMatrix]) -> BMatrix:
    row_off = [sum(row_sizes[:k]) for k in range(len(row_sizes))]
    col_off = [sum(col_sizes[:k]) for k in range(len(col_sizes))]
    entries = {}
    for (bi, bj), blk in blocks.items():
        if blk.shape != (row_sizes[bi], col_sizes[bj]):
            raise DimensionMismatchError(
                f"Block ({bi},{bj}) has shape {blk.shape}, expected {(row_sizes[bi], col_sizes[bj])}")
        for (i, j), v in blk.entries.items():
            entries[(row_off[bi] + i, col_off[bj] + j)] = v
    return BMatrix(algebra, sum(row_sizes), sum(col_sizes), entries)


class _Representation:
    """rho_q(b) = F_q L_q(b) F_q, the action of B on Y^q as s x s matrices over C"""

    def __init__(self, y: DgBimodule):
        self.y = y
        self._basis: dict[int, list[BMatrix]] = {q: [y.corner(q, k) for k in range(y.source.dim)]
                                                 for q in y.degrees}

    def element(self, q: int, v: Vector) -> BMatrix:
        s = self.y.rank(q)
        out = BMatrix.zeros(self.y.target, s, s)
        for k, x in v.items():
            out = out + self._basis[q][k].scale(x)
        return out

    def matrix(self, q: int, m: BMatrix) -> BMatrix:
        """Entrywise rho_q: an r x r' matrix over B becomes (r s) x (r' s) over C, index (i, u) -> i s + u"""
        s = self.y.rank(q)
        blocks = {(i, j): self.element(q, v) for (i, j), v in m.entries.items()}
        return _assemble(self.y.target, [s] * m.nrows, [s] * m.ncols, blocks)


def compose(x: DgBimodule, y: DgBimodule) -> DgBimodule:
    """
    X (x)_B Y with degree n = sum over p + q = n of X^p (x)_B Y^q, blocks ordered by p.

    Presentation rho_q(E_p), differential rho(d_X) + (-1)^p (1 (x) d_Y) and left
    action rho(L_X), all cut down by the idempotents.
    """
    if not x.target.same_structure(y.source):
        raise AlgebraMismatchError(f"Cannot compose {x.name} (into {x.target.name}) with {y.name} (from {y.source.name})")
    rho = _Representation(y)
    c = y.target
    field = c.field
    low, high = x.low + y.low, x.high + y.high

    def pairs(n: int) -> list[tuple[int, int]]:
        return [(p, n - p) for p in x.degrees if y.low <= n - p <= y.high]

    def sizes(n: int) -> list[int]:
        return [x.rank(p) * y.rank(q) for p, q in pairs(n)]

    ranks, idems, diffs, actions = {}, {}, {}, {}
    for n in range(low, high + 1):
        blocks = pairs(n)
        ranks[n] = sum(sizes(n))
        idems[n] = BMatrix.block_diagonal(c, [rho.matrix(q, x.idempotent(p)) for p, q in blocks])
        actions[n] = [BMatrix.block_diagonal(c, [rho.matrix(q, x.action(p, i)) for p, q in blocks])
                      for i in range(x.source.dim)]
    for n in range(low + 1, high + 1):
        src, dst = pairs(n), pairs(n - 1)
        where = {pq: k for k, pq in enumerate(dst)}
        blocks = {}
        for k, (p, q) in enumerate(src):
            if (p - 1, q) in where:
                blocks[(where[(p - 1, q)], k)] = rho.matrix(q, x.differential(p))
            if (p, q - 1) in where:
                dy = y.differential(q).scale(field.sign(p))
                blocks[(where[(p, q - 1)], k)] = BMatrix.block_diagonal(c, [dy] * x.rank(p))
        d = _assemble(c, sizes(n - 1), sizes(n), blocks)
        diffs[n] = idems[n - 1] @ d @ idems[n]
    z = DgBimodule(f"{x.name}*{y.name}", x.source, c, low, high, ranks, idems, diffs, actions)
    logger.info(f"Composed {z}")
    return z


# Endomorphism complex

class EndComplex:
    """
    End_n = sum over p of Hom_B(X^p, X^{p+n}) inside the ambient matrix spaces
    Mat(r_{p+n} x r_p, B), with D(f) = d f - (-1)^n f d.

    Ambient coordinates of degree n list the blocks by source degree p; inside a
    block the entry (i, j) with B-basis element l has index (i r_p + j) dim B + l.
    """

    def __init__(self, x: DgBimodule):
        self.x = x
        self.algebra = x.target
        self.field = x.target.field
        span = x.high - x.low
        self.degrees = range(-span, span + 1)
        self._offsets = {n: self._layout(n) for n in self.degrees}
        self.corner_bases = {n: self._corner_basis(n) for n in self.degrees}
        self.differentials = {n: self._differential(n) for n in self.degrees}

    def _layout(self, n: int) -> tuple[dict[int, int], int]:
        offsets, acc = {}, 0
        for p in self.x.degrees:
            if p + n in self.x.degrees:
                offsets[p] = acc
                acc += self.x.rank(p + n) * self.x.rank(p) * self.algebra.dim
        return offsets, acc

    def ambient_dim(self, n: int) -> int:
        return self._offsets[n][1] if n in self._offsets else 0

    def blocks(self, n: int) -> list[int]:
        return list(self._offsets[n][0]) if n in self._offsets else []

    def vector(self, n: int, p: int, m: BMatrix) -> Vector:
        """Ambient coordinates of a block f_p: X^p -> X^{p+n}"""
        off, cols, dim = self._offsets[n][0][p], self.x.rank(p), self.algebra.dim
        return {off + (i * cols + j) * dim + l: c for (i, j), v in m.entries.items() for l, c in v.items()}

    def _unit(self, n: int, p: int, index: int) -> BMatrix:
        q, l = divmod(index, self.algebra.dim)
        i, j = divmod(q, self.x.rank(p))
        return BMatrix(self.algebra, self.x.rank(p + n), self.x.rank(p), {(i, j): {l: self.field.one}})

    def _block_units(self, n: int):
        for p in self.blocks(n):
            size = self.x.rank(p + n) * self.x.rank(p) * self.algebra.dim
            for index in range(size):
                yield self._offsets[n][0][p] + index, p, self._unit(n, p, index)

    def _corner_basis(self, n: int) -> SparseMatrix:
        columns = []
        for _, p, unit in self._block_units(n):
            corner = self.x.idempotent(p + n) @ unit @ self.x.idempotent(p)
            columns.append(self.vector(n, p, corner))
        ambient = self.ambient_dim(n)
        basis = image_basis(SparseMatrix.from_columns(self.field, ambient, columns))
        return SparseMatrix.from_columns(self.field, ambient, basis)

    def _differential(self, n: int) -> SparseMatrix:
        """D from ambient degree n to ambient degree n - 1"""
        x, field = self.x, self.field
        rows = self.ambient_dim(n - 1)
        sign = -field.sign(n)
        targets = set(self.blocks(n - 1))
        columns = []
        for _, p, f in self._block_units(n):
            image: Vector = {}
            if p in targets:
                vec_add(image, self.vector(n - 1, p, x.differential(p + n) @ f))
            if p + 1 in targets:
                vec_add(image, self.vector(n - 1, p + 1, f @ x.differential(p + 1)), sign)
            columns.append(image)
        return SparseMatrix.from_columns(field, rows, columns) if columns else SparseMatrix.zeros(field, rows, 0)

    def homology(self, n: int) -> HomologySpace:
        basis = self.corner_bases[n]
        outgoing = self.differentials[n]
        cycles = [basis.apply(v) for v in kernel_basis(outgoing @ basis)]
        boundaries: list[Vector] = []
        if n + 1 in self.differentials:
            boundaries = image_basis(self.differentials[n + 1] @ self.corner_bases[n + 1])
        return subquotient(self.field, self.ambient_dim(n), cycles, boundaries, degree=n, differential=outgoing)

    def alpha(self) -> SparseMatrix:
        """A -> End_0, a -> (E_p L_p(a) E_p)_p, as an ambient_0 x dim A matrix"""
        columns = []
        for i in range(self.x.source.dim):
            v: Vector = {}
            for p in self.blocks(0):
                vec_add(v, self.vector(0, p, self.x.corner(p, i)))
            columns.append(v)
        return SparseMatrix.from_columns(self.field, self.ambient_dim(0), columns)


def end_complex(x: DgBimodule) -> EndComplex:
    end = EndComplex(x)
    logger.info(f"End complex of {x.name}: degrees {end.degrees.start}..{end.degrees.stop - 1}, "
                f"dims {[end.corner_bases[n].ncols for n in end.degrees]}")
    return end


def validate_derived_equivalence(x: DgBimodule) -> Report:
    """
    Certify that - (x)_A X is a derived equivalence: H_0(End_B(X)) is A via the
    left action and every other degree of the endomorphism complex is acyclic.
    """
    report = Report(title=f"derived equivalence {x.name}")
    if not report.extend(validate_bimodule(x)).ok:
        return report
    end = end_complex(x)
    a = x.source

    witness = None
    for n in end.degrees:
        if n - 1 in end.differentials:
            composite = end.differentials[n - 1] @ end.differentials[n] @ end.corner_bases[n]
            if not composite.is_zero():
                witness = f"End_{n}"
                break
    report.add("end.d_squared", witness is None, "D D = 0 on the endomorphism complex", witness)
    if witness:
        return report

    alpha = end.alpha()
    cycles = (end.differentials[0] @ alpha).is_zero()
    report.add("end.alpha_cycles", cycles, "the left action commutes with d", None if cycles else "D alpha != 0")

    witness = None
    for i in range(a.dim):
        for j in range(a.dim):
            for p in end.blocks(0):
                lhs = x.corner(p, i) @ x.corner(p, j)
                e = x.idempotent(p)
                rhs = e @ x.action_of(p, a.product(i, j)) @ e
                if lhs != rhs and witness is None:
                    witness = f"degree {p}, ({a.basis[i]},{a.basis[j]})"
    report.add("end.alpha_multiplicative", witness is None, "alpha is an algebra map into End_0", witness)
    if not cycles:
        return report

    spaces = {n: end.homology(n) for n in end.degrees}
    report.data["end_homology_dims"] = {str(n): spaces[n].dim for n in end.degrees}
    h0 = spaces[0]
    induced = h0.project_matrix(alpha)
    iso = h0.dim == a.dim and rank(induced) == a.dim
    report.add("end.h0_iso", iso, f"H_0(End) has dim {h0.dim}, alpha has rank {rank(induced)}, dim A = {a.dim}",
               None if iso else f"dim H_0 = {h0.dim}")
    nonzero = [n for n in end.degrees if n != 0 and spaces[n].dim]
    report.add("end.vanishing", not nonzero, "H_n(End) = 0 for n != 0",
               f"H_{nonzero[0]} has dim {spaces[nonzero[0]].dim}" if nonzero else None)
    logger.info(f"Derived equivalence check for {x.name}: ok={report.ok}")
    return report
