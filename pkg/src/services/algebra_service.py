"""
Algebra service - construction, validation and conversion of finite-dimensional algebras
"""

import itertools
import logging
from typing import Any, Callable, Mapping, Optional, Sequence

from src.models.algebra import Algebra, Quiver
from src.models.enums import AlgebraFamily
from src.models.exceptions import AlgebraMismatchError, DocumentParseError, ValidationFailure
from src.models.field import Field
from src.models.matrix import SparseMatrix, Vector, vec_add
from src.models.schemas import AlgebraDocument, FieldDescriptor, Report

logger = logging.getLogger(__name__)


def _labels(a: Algebra, *idx: int) -> str:
    return "(" + ",".join(a.basis[i] for i in idx) + ")"


def multiply(a: Algebra, u: Sequence[Any] | Mapping[int, Any], v: Sequence[Any] | Mapping[int, Any]) -> Vector:
    """Product of two elements given as dense coefficient lists or sparse vectors"""
    return a.multiply(a.coerce(u), a.coerce(v))


def validate_algebra(a: Algebra) -> Report:
    """Check associativity, the unit and the idempotent decomposition exactly"""
    report = Report(title=f"validate {a.name}")
    d = a.dim

    witness, failures = None, 0
    for i, j, l in itertools.product(range(d), repeat=3):
        left = a.multiply(a.product(i, j), a.basis_vector(l))
        right = a.multiply(a.basis_vector(i), a.product(j, l))
        if left != right:
            failures += 1
            if witness is None:
                witness = f"(e_i e_j) e_l != e_i (e_j e_l) at (i,j,l)=({i},{j},{l}) {_labels(a, i, j, l)}"
    report.data["assoc_failures"] = failures
    report.add("algebra.assoc", failures == 0, f"{failures} of {d**3} basis triples fail associativity", witness)

    left_bad = next((i for i in range(d) if a.multiply(a.unit, a.basis_vector(i)) != a.basis_vector(i)), None)
    report.add("algebra.unit.left", left_bad is None, "1 e_i = e_i",
               None if left_bad is None else f"i={left_bad} {_labels(a, left_bad)}")
    right_bad = next((i for i in range(d) if a.multiply(a.basis_vector(i), a.unit) != a.basis_vector(i)), None)
    report.add("algebra.unit.right", right_bad is None, "e_i 1 = e_i",
               None if right_bad is None else f"i={right_bad} {_labels(a, right_bad)}")

    if a.idempotents is not None:
        bad_pair = None
        for (p, u), (q, v) in itertools.product(enumerate(a.idempotents), repeat=2):
            expected = dict(u) if p == q else {}
            if a.multiply(u, v) != expected:
                bad_pair = f"idempotents ({p},{q})"
                break
        report.add("algebra.idempotents.orthogonal", bad_pair is None,
                   "u_p u_q = delta_pq u_p", bad_pair)
        total: Vector = {}
        for u in a.idempotents:
            vec_add(total, u)
        report.add("algebra.idempotents.sum", total == a.unit, "sum of idempotents is the unit",
                   None if total == a.unit else "sum differs from unit")

    logger.info(f"Validated {a.name}: ok={report.ok}")
    return report


def require_valid(a: Algebra) -> None:
    report = validate_algebra(a)
    if not report.ok:
        first = report.failures()[0]
        raise ValidationFailure(f"Algebra {a.name} fails {first.id}", witness=first.witness)


# Documents

def algebra_from_document(doc: AlgebraDocument, field: Optional[Field] = None) -> Algebra:
    """Build an Algebra from a parsed document, optionally re-reading scalars in another field"""
    try:
        base = field or Field.from_descriptor(doc.field.model_dump())
    except ValueError as e:
        raise DocumentParseError(f"Invalid field in {doc.name}: {e}") from e

    def scalar(raw: Any) -> Any:
        try:
            return base.convert(str(raw))
        except (ValueError, ZeroDivisionError) as e:
            raise DocumentParseError(f"Invalid scalar '{raw}' in {doc.name}: {e}") from e

    mult: dict[tuple[int, int], Vector] = {}
    for i, j, l, coeff in doc.mult:
        x = scalar(coeff)
        if x:
            vec_add(mult.setdefault((int(i), int(j)), {}), {int(l): x})
    mult = {k: v for k, v in mult.items() if v}
    unit = {i: x for i, x in ((i, scalar(s)) for i, s in enumerate(doc.unit)) if x}
    idempotents = None
    if doc.idempotents is not None:
        idempotents = tuple({i: x for i, x in ((i, scalar(s)) for i, s in enumerate(row)) if x}
                            for row in doc.idempotents)
    return Algebra(doc.name, base, tuple(doc.basis), mult, unit, idempotents)


def algebra_to_document(a: Algebra) -> AlgebraDocument:
    f = a.field
    mult = [[i, j, l, f.to_string(x)] for (i, j), prod in sorted(a.mult.items()) for l, x in sorted(prod.items())]
    dense = lambda v: [f.to_string(v.get(i, f.zero)) for i in range(a.dim)]  # noqa: E731
    return AlgebraDocument(
        name=a.name,
        field=FieldDescriptor(**a.field.descriptor()),
        dim=a.dim,
        basis=list(a.basis),
        unit=dense(a.unit),
        mult=mult,
        idempotents=[dense(u) for u in a.idempotents] if a.idempotents is not None else None,
    )


# Families

def ground_field(field: Optional[Field] = None) -> Algebra:
    f = field or Field.rational()
    one = {0: f.one}
    return Algebra("ground_field", f, ("1",), {(0, 0): dict(one)}, dict(one), (dict(one),))


def truncated_poly(n: int, field: Optional[Field] = None) -> Algebra:
    """k[x]/(x^n) with basis 1, x, ..., x^{n-1}"""
    if n < 1:
        raise ValueError(f"truncated_poly needs n >= 1, got {n}")
    f = field or Field.rational()
    basis = tuple("1" if k == 0 else ("x" if k == 1 else f"x^{k}") for k in range(n))
    mult = {(i, j): {i + j: f.one} for i in range(n) for j in range(n) if i + j < n}
    return Algebra(f"truncated_poly_{n}", f, basis, mult, {0: f.one}, ({0: f.one},))


def dual_numbers(field: Optional[Field] = None) -> Algebra:
    a = truncated_poly(2, field)
    return Algebra("dual_numbers", a.field, a.basis, a.mult, a.unit, a.idempotents)


def product(algebras: Sequence[Algebra], name: Optional[str] = None) -> Algebra:
    """Direct product; the block units are the idempotents"""
    if not algebras:
        raise ValueError("product needs at least one factor")
    f = algebras[0].field
    if any(x.field != f for x in algebras):
        raise AlgebraMismatchError("product factors are over different fields")
    basis: list[str] = []
    mult: dict[tuple[int, int], Vector] = {}
    unit: Vector = {}
    blocks: list[Vector] = []
    offset = 0
    for k, x in enumerate(algebras):
        basis.extend(f"{label}_{k + 1}" for label in x.basis)
        for (i, j), prod in x.mult.items():
            mult[(offset + i, offset + j)] = {offset + l: c for l, c in prod.items()}
        block_unit = {offset + i: c for i, c in x.unit.items()}
        unit.update(block_unit)
        blocks.append(block_unit)
        offset += x.dim
    label = name or "x".join(x.name for x in algebras)
    return Algebra(label, f, tuple(basis), mult, unit, tuple(blocks))


def matrix_algebra(n: int, field: Optional[Field] = None) -> Algebra:
    """M_n(k) with matrix units e_ij in lexicographic order"""
    f = field or Field.rational()
    pairs = [(i, j) for i in range(n) for j in range(n)]
    index = {p: k for k, p in enumerate(pairs)}
    label = (lambda i, j: f"e{i + 1}{j + 1}") if n < 10 else (lambda i, j: f"e{i + 1}_{j + 1}")
    mult = {(index[(i, j)], index[(j, l)]): {index[(i, l)]: f.one}
            for i, j in pairs for l in range(n)}
    idempotents = tuple({index[(i, i)]: f.one} for i in range(n))
    unit = {index[(i, i)]: f.one for i in range(n)}
    return Algebra(f"matrix_algebra_{n}", f, tuple(label(i, j) for i, j in pairs), mult, unit, idempotents)


def upper_triangular(n: int, field: Optional[Field] = None) -> Algebra:
    """Upper triangular n x n matrices with e_ij, i <= j, in lexicographic order"""
    f = field or Field.rational()
    pairs = [(i, j) for i in range(n) for j in range(i, n)]
    index = {p: k for k, p in enumerate(pairs)}
    mult = {(index[(i, j)], index[(j, l)]): {index[(i, l)]: f.one}
            for i, j in pairs for l in range(j, n)}
    idempotents = tuple({index[(i, i)]: f.one} for i in range(n))
    unit = {index[(i, i)]: f.one for i in range(n)}
    return Algebra(f"upper_triangular_{n}", f, tuple(f"e{i + 1}{j + 1}" for i, j in pairs),
                   mult, unit, idempotents)


def _admissible(path: tuple[int, ...], relations: Sequence[tuple[int, ...]]) -> bool:
    for rel in relations:
        k = len(rel)
        if any(path[s:s + k] == rel for s in range(len(path) - k + 1)):
            return False
    return True


def path_algebra(quiver: Quiver, field: Optional[Field] = None, name: str = "path_algebra") -> Algebra:
    """
    Path algebra of a quiver modulo monomial relations.

    Basis: vertex idempotents e1..ev, then admissible paths by length, each
    length in lexicographic order of arrow indices. The product p*q is the
    concatenation "p then q" when p ends where q starts.
    """
    f = field or Field.rational()
    arrows = quiver.arrows
    relations = quiver.relations
    max_rel = max((len(r) for r in relations), default=1)

    layers: list[list[tuple[int, ...]]] = [[]]
    layers[0] = [(k,) for k in range(len(arrows)) if _admissible((k,), relations)]
    while layers[-1]:
        nxt = []
        for path in layers[-1]:
            end = arrows[path[-1]].target
            for k, arrow in enumerate(arrows):
                if arrow.source == end and _admissible(path + (k,), relations):
                    nxt.append(path + (k,))
        layers.append(nxt)
        length = len(layers)
        if nxt and length >= max_rel - 1:
            # A path visiting more (max_rel - 1)-windows than exist can be pumped
            states = quiver.vertices if max_rel == 1 else len(layers[max_rel - 2])
            if length >= states + max_rel - 1:
                raise ValueError(f"Quiver algebra {name} is infinite-dimensional "
                                 f"(admissible paths of length {length})")
    paths = [p for layer in layers for p in layer]

    basis = [f"e{v + 1}" for v in range(quiver.vertices)] + ["".join(arrows[k].label for k in p) for p in paths]
    index = {p: quiver.vertices + k for k, p in enumerate(paths)}
    src = lambda p: arrows[p[0]].source  # noqa: E731
    tgt = lambda p: arrows[p[-1]].target  # noqa: E731

    mult: dict[tuple[int, int], Vector] = {}
    for v in range(quiver.vertices):
        mult[(v, v)] = {v: f.one}
    for p, ip in index.items():
        mult[(src(p), ip)] = {ip: f.one}
        mult[(ip, tgt(p))] = {ip: f.one}
        for q, iq in index.items():
            if tgt(p) == src(q) and (p + q) in index:
                mult[(ip, iq)] = {index[p + q]: f.one}
    unit = {v: f.one for v in range(quiver.vertices)}
    idempotents = tuple({v: f.one} for v in range(quiver.vertices))
    logger.debug(f"Built {name}: {len(basis)} basis paths")
    return Algebra(name, f, tuple(basis), mult, unit, idempotents)


def opposite(a: Algebra) -> Algebra:
    mult = {(j, i): dict(prod) for (i, j), prod in a.mult.items()}
    return Algebra(f"{a.name}^op", a.field, a.basis, mult, dict(a.unit), a.idempotents)


def tensor_product(a: Algebra, b: Algebra) -> Algebra:
    """A (x) B with basis pairs in lexicographic order"""
    if a.field != b.field:
        raise AlgebraMismatchError(f"{a.name} and {b.name} are over different fields")
    f = a.field
    idx = lambda i, j: i * b.dim + j  # noqa: E731
    basis = tuple(f"{x}*{y}" for x in a.basis for y in b.basis)
    mult: dict[tuple[int, int], Vector] = {}
    for (i, k), pa in a.mult.items():
        for (j, l), pb in b.mult.items():
            prod: Vector = {}
            for s, x in pa.items():
                for t, y in pb.items():
                    vec_add(prod, {idx(s, t): x * y})
            if prod:
                mult[(idx(i, j), idx(k, l))] = prod
    unit = {idx(i, j): x * y for i, x in a.unit.items() for j, y in b.unit.items()}
    idempotents = None
    if a.idempotents is not None and b.idempotents is not None:
        idempotents = tuple({idx(i, j): x * y for i, x in u.items() for j, y in v.items()}
                            for u in a.idempotents for v in b.idempotents)
    return Algebra(f"{a.name}*{b.name}", f, basis, mult, unit, idempotents)


BUILDERS: dict[AlgebraFamily, Callable[..., Algebra]] = {
    AlgebraFamily.GROUND_FIELD: ground_field,
    AlgebraFamily.DUAL_NUMBERS: dual_numbers,
    AlgebraFamily.TRUNCATED_POLY: truncated_poly,
    AlgebraFamily.PRODUCT: product,
    AlgebraFamily.MATRIX_ALGEBRA: matrix_algebra,
    AlgebraFamily.UPPER_TRIANGULAR: upper_triangular,
    AlgebraFamily.PATH_ALGEBRA: path_algebra,
    AlgebraFamily.OPPOSITE: opposite,
    AlgebraFamily.TENSOR_PRODUCT: tensor_product,
}


def build(family: AlgebraFamily | str, *args: Any, **params: Any) -> Algebra:
    """Build a member of a named family; the result is validated before it is returned"""
    builder = BUILDERS[AlgebraFamily(family)]
    algebra = builder(*args, **params)
    require_valid(algebra)
    return algebra


# Basis change putting the unit first

def with_unit_first(a: Algebra) -> tuple[Algebra, SparseMatrix, SparseMatrix]:
    """
    Rewrite a in a basis whose first vector is the unit.

    Returns (algebra, to_old, to_new): to_old has the new basis vectors as
    columns in old coordinates; to_new is its inverse.
    """
    f = a.field
    d = a.dim
    if a.unit == {0: f.one}:
        ident = SparseMatrix.identity(f, d)
        return a, ident, ident
    if not a.unit:
        raise ValidationFailure(f"Algebra {a.name} has a zero unit")
    k = min(a.unit)
    others = [i for i in range(d) if i != k]
    pos = {old: new for new, old in enumerate(others, start=1)}
    to_old = SparseMatrix.from_columns(f, d, [dict(a.unit)] + [{i: f.one} for i in others])

    inv_uk = f.div(f.one, a.unit[k])
    new_of_old: list[Vector] = [{} for _ in range(d)]
    for i in others:
        new_of_old[i] = {pos[i]: f.one}
    ek: Vector = {0: inv_uk}
    for i, x in a.unit.items():
        if i != k:
            vec_add(ek, {pos[i]: -x * inv_uk})
    new_of_old[k] = ek
    to_new = SparseMatrix.from_columns(f, d, new_of_old)

    columns = to_old.columns()
    mult: dict[tuple[int, int], Vector] = {}
    for p in range(d):
        for q in range(d):
            prod = to_new.apply(a.multiply(columns[p], columns[q]))
            if prod:
                mult[(p, q)] = prod
    basis = ("1",) + tuple(a.basis[i] for i in others)
    idempotents = None
    if a.idempotents is not None:
        idempotents = tuple(to_new.apply(u) for u in a.idempotents)
    return Algebra(a.name, f, basis, mult, {0: f.one}, idempotents), to_old, to_new
