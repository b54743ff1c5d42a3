"""
Calculus service - cup product, Gerstenhaber bracket, cap product and Connes' B,
their induced tables on (co)homology, and the identity verifier.

Sign conventions (frozen, see DESIGN.md):
  cup:      (f u g)(a_1..a_{m+n}) = f(a_1..a_m) g(a_{m+1}..a_{m+n})
  circle:   f o g = sum_i (-1)^{(i-1)(n-1)} f(.., g(a_i..a_{i+n-1}), ..)
  bracket:  [f, g] = f o g - (-1)^{(m-1)(n-1)} g o f
  cap:      (a_0, .., a_n) cap f = (a_0 f(a_1..a_m), a_{m+1}, .., a_n)
  iota:     iota_f(z) = (-1)^{mn} z cap f
  action:   j_f(z) = (-1)^{m(m-1)/2} z cap f, a left action of HH^* on HH_*
"""

import logging
from typing import Any, Optional

from src.models.algebra import Algebra
from src.models.complexes import CalculusTable, Chain, Cochain, Word
from src.models.exceptions import ComplexConsistencyError, DegreeError
from src.models.field import Field
from src.models.homology import induced_map
from src.models.enums import CheckStatus
from src.models.matrix import SparseMatrix, Vector, vec_add
from src.models.schemas import Report
from src.services.exactlin import rank
from src.services.hochschild_service import HochschildModel, model_cohomology, model_homology

logger = logging.getLogger(__name__)


def _accumulate(terms: dict, key: Any, value: Any) -> None:
    new = terms[key] + value if key in terms else value
    if new:
        terms[key] = new
    else:
        terms.pop(key, None)


def _check_degree(degree: int, max_degree: Optional[int]) -> None:
    if max_degree is not None and degree > max_degree:
        raise DegreeError(f"Result degree {degree} exceeds the top degree {max_degree}")


def cup(a: Algebra, f: Cochain, g: Cochain, max_degree: Optional[int] = None) -> Cochain:
    m, n = f.degree, g.degree
    _check_degree(m + n, max_degree)
    out: dict[tuple[Word, int], Any] = {}
    for (s, l), x in f.terms.items():
        for (t, k), y in g.terms.items():
            for r, c in a.product(l, k).items():
                _accumulate(out, (s + t, r), x * y * c)
    return Cochain(m + n, out)


def circle(a: Algebra, f: Cochain, g: Cochain) -> Cochain:
    """Gerstenhaber composition f o g, of degree m + n - 1"""
    m, n = f.degree, g.degree
    field = a.field
    by_output: dict[int, list[tuple[Word, Any]]] = {}
    for (t, k), y in g.terms.items():
        by_output.setdefault(k, []).append((t, y))
    out: dict[tuple[Word, int], Any] = {}
    for (s, l), x in f.terms.items():
        for i in range(1, m + 1):
            sign = field.sign((i - 1) * (n - 1))
            for t, y in by_output.get(s[i - 1], ()):
                _accumulate(out, (s[:i - 1] + t + s[i:], l), sign * x * y)
    return Cochain(max(m + n - 1, 0), out)


def bracket(a: Algebra, f: Cochain, g: Cochain, max_degree: Optional[int] = None) -> Cochain:
    m, n = f.degree, g.degree
    _check_degree(m + n - 1, max_degree)
    out = dict(circle(a, f, g).terms)
    sign = -a.field.sign((m - 1) * (n - 1))
    for key, x in circle(a, g, f).terms.items():
        _accumulate(out, key, sign * x)
    return Cochain(max(m + n - 1, 0), out)


def cap(a: Algebra, z: Chain, f: Cochain) -> Chain:
    """z cap f; zero when the cochain degree exceeds the chain degree"""
    n, m = z.degree, f.degree
    if m > n:
        return Chain(n - m, {})
    by_input: dict[Word, list[tuple[int, Any]]] = {}
    for (s, l), x in f.terms.items():
        by_input.setdefault(s, []).append((l, x))
    out: dict[Word, Any] = {}
    for u, c in z.terms.items():
        for l, x in by_input.get(u[1:m + 1], ()):
            for r, y in a.product(u[0], l).items():
                _accumulate(out, (r,) + u[m + 1:], c * x * y)
    return Chain(n - m, out)


def iota(a: Algebra, f: Cochain, z: Chain) -> Chain:
    """iota_f(z) = (-1)^{|f||z|} z cap f"""
    result = cap(a, z, f)
    sign = a.field.sign(f.degree * z.degree)
    return Chain(result.degree, {w: sign * x for w, x in result.terms.items()})


def derivation_on_chains(a: Algebra, f: Cochain, z: Chain) -> Chain:
    """Natural action of a 1-cochain: sum over slots of (.., f(a_i), ..)"""
    if f.degree != 1:
        raise DegreeError(f"Expected a 1-cochain, got degree {f.degree}")
    values: dict[int, list[tuple[int, Any]]] = {}
    for ((s0,), l), x in f.terms.items():
        values.setdefault(s0, []).append((l, x))
    out: dict[Word, Any] = {}
    for u, c in z.terms.items():
        for i, ui in enumerate(u):
            for l, x in values.get(ui, ()):
                _accumulate(out, u[:i] + (l,) + u[i + 1:], c * x)
    return Chain(z.degree, out)


# Connes' operator

def connes_matrix(model: HochschildModel, n: int) -> SparseMatrix:
    """
    Normalized B from C_n to C_{n+1}:
    B(a_0, .., a_n) = sum_i (-1)^{in} (1, a_i, .., a_n, a_0, .., a_{i-1}).
    Words starting with the unit go to zero.
    """
    if not model.normalized:
        raise DegreeError("connes_matrix needs the normalized model")
    src, dst = model.chains(n), model.chains(n + 1)
    field = model.field
    entries = []
    for col, u in enumerate(src.words()):
        if u[0] == 0:
            continue
        for i in range(n + 1):
            entries.append((dst.index((0,) + u[i:] + u[:i]), col, field.sign(i * n)))
    return SparseMatrix.from_entries(field, dst.size, src.size, entries)


def connes_unnormalized_matrix(model: HochschildModel, n: int) -> SparseMatrix:
    """B = (1 - t) s N on the unnormalized complex, with s(z) = 1 (x) z"""
    if model.normalized:
        raise DegreeError("connes_unnormalized_matrix needs the unnormalized model")
    src, dst = model.chains(n), model.chains(n + 1)
    unit = model.algebra.unit
    s_entries = [(dst.index((k,) + u), col, x) for col, u in enumerate(src.words()) for k, x in unit.items()]
    s = SparseMatrix.from_entries(model.field, dst.size, src.size, s_entries)
    one_minus_t = SparseMatrix.identity(model.field, dst.size) - model.t(n + 1)
    return one_minus_t @ (s @ model.norm(n))


def connes_B_chain(a: Algebra, n: int) -> SparseMatrix:
    """Normalized Connes operator in the unit-first basis of a"""
    return connes_matrix(HochschildModel(a, normalized=True), n)


def connes_B_unnormalized(a: Algebra, n: int) -> SparseMatrix:
    return connes_unnormalized_matrix(HochschildModel(a), n)


def kron(x: Vector, y: Vector, width: int) -> Vector:
    """Coordinates of the pair (x, y) in the basis i * width + j"""
    return {i * width + j: a * b for i, a in x.items() for j, b in y.items() if a * b}


# Induced tables on (co)homology

def _class_cochains(model: HochschildModel, space, m: int) -> list[Cochain]:
    return [Cochain(m, model.cochain_terms(m, space.representative(i))) for i in range(space.dim)]


def _class_chains(model: HochschildModel, space, n: int) -> list[Chain]:
    return [Chain(n, model.chain_terms(n, space.representative(i))) for i in range(space.dim)]


def induced_tables(a: Algebra, D: int, max_chain_dim: Optional[int] = None,
                   connes_sign: int = 1) -> CalculusTable:
    """
    Cup, bracket, cap and B on HH^* and HH_* through degree D.

    Everything is computed on the normalized complexes of the unit-first basis.
    `connes_sign` scales B and exists for mutation testing.
    """
    model = HochschildModel(a, normalized=True, max_chain_dim=max_chain_dim)
    alg, field = model.algebra, model.field
    hh = model_homology(model, D)
    coh = model_cohomology(model, D)
    table = CalculusTable(a.name, D, hh, coh, model=model)
    cochains = [_class_cochains(model, coh[m], m) for m in range(D + 1)]
    chains = [_class_chains(model, hh[n], n) for n in range(D + 1)]

    for m in range(D + 1):
        for n in range(D + 1 - m):
            cols = [coh[m + n].project(model.cochain_vector(m + n, cup(alg, f, g).terms))
                    for f in cochains[m] for g in cochains[n]]
            table.cup[(m, n)] = SparseMatrix.from_columns(field, coh[m + n].dim, cols)

    for m in range(D + 1):
        for n in range(D + 1):
            deg = m + n - 1
            if deg < 0 or deg > D:
                continue
            cols = [coh[deg].project(model.cochain_vector(deg, bracket(alg, f, g).terms))
                    for f in cochains[m] for g in cochains[n]]
            table.bracket[(m, n)] = SparseMatrix.from_columns(field, coh[deg].dim, cols)

    for m in range(D + 1):
        for i, f in enumerate(cochains[m]):
            for n in range(m, D + 1):
                cols = [hh[n - m].project(model.chain_vector(n - m, cap(alg, z, f).terms)) for z in chains[n]]
                table.contraction[(m, i, n)] = SparseMatrix.from_columns(field, hh[n - m].dim, cols)

    for n in range(D):
        op = connes_matrix(model, n)
        if connes_sign < 0:
            op = -op
        table.connes[n] = hh[n + 1].project_matrix(op @ hh[n].representatives)

    logger.info(f"Calculus tables for {a.name}: HH_* {table.hh_dims}, HH^* {table.coh_dims}")
    return table


# Operators on class coordinates

class ClassOperators:
    """Evaluates cup, bracket, the action j and the Lie derivative from a CalculusTable"""

    def __init__(self, table: CalculusTable, field: Field):
        self.table = table
        self.field = field
        self.D = table.top_degree

    def hh_dim(self, n: int) -> int:
        return self.table.homology[n].dim if 0 <= n <= self.D else 0

    def coh_dim(self, m: int) -> int:
        return self.table.cohomology[m].dim if 0 <= m <= self.D else 0

    def zero(self, rows_degree: int, cols_degree: int) -> SparseMatrix:
        return SparseMatrix.zeros(self.field, self.hh_dim(rows_degree), self.hh_dim(cols_degree))

    def unit(self, i: int) -> Vector:
        return {i: self.field.one}

    def cup(self, m: int, x: Vector, n: int, y: Vector) -> Vector:
        return self.table.cup[(m, n)].apply(kron(x, y, self.coh_dim(n)))

    def bracket(self, m: int, x: Vector, n: int, y: Vector) -> Vector:
        if m + n - 1 < 0:
            return {}
        return self.table.bracket[(m, n)].apply(kron(x, y, self.coh_dim(n)))

    def contraction(self, m: int, x: Vector, n: int) -> SparseMatrix:
        """z -> z cap x from HH_n to HH_{n-m}"""
        out = self.zero(n - m, n)
        if n - m < 0 or n < 0:
            return out
        for i, c in x.items():
            out = out + self.table.contraction[(m, i, n)].scale(c)
        return out

    def action(self, m: int, x: Vector, n: int) -> SparseMatrix:
        """Left action j_x = (-1)^{m(m-1)/2} cap"""
        op = self.contraction(m, x, n)
        return -op if (m * (m - 1) // 2) % 2 else op

    def twisted(self, m: int, x: Vector, n: int) -> SparseMatrix:
        """iota_x = (-1)^{mn} cap on HH_n"""
        op = self.contraction(m, x, n)
        return -op if (m * n) % 2 else op

    def connes(self, n: int) -> SparseMatrix:
        if n < 0:
            return self.zero(n + 1, n)
        return self.table.connes[n]

    def lie(self, m: int, x: Vector, p: int, op=None) -> SparseMatrix:
        """L_x = [j_x, B] = j_x B - (-1)^m B j_x from HH_p to HH_{p+1-m}; needs p + 1 <= D"""
        op = op or self.action
        if p < 0 or p + 1 - m < 0:
            return self.zero(p + 1 - m, p)
        first = op(m, x, p + 1) @ self.connes(p)
        if p - m < 0:
            return first
        second = self.connes(p - m) @ op(m, x, p)
        return first - second if m % 2 == 0 else first + second

    def literal_lie(self, m: int, x: Vector, p: int) -> SparseMatrix:
        """B iota_x - (-1)^m iota_x B with the twisted iota"""
        if p < 0 or p + 1 - m < 0:
            return self.zero(p + 1 - m, p)
        second = self.twisted(m, x, p + 1) @ self.connes(p)
        if p - m < 0:
            first = self.zero(p + 1 - m, p)
        else:
            first = self.connes(p - m) @ self.twisted(m, x, p)
        return first - second if m % 2 == 0 else first + second


def _first_entry(diff: SparseMatrix) -> str:
    for i, j, _ in diff.entries():
        return f"entry ({i},{j})"
    return "entry (?)"


class _Tally:
    """Collects instances of one identity and keeps the first failure"""

    def __init__(self):
        self.count = 0
        self.witness: Optional[str] = None

    def vectors(self, lhs: Vector, rhs: Vector, label: str) -> None:
        self.count += 1
        if lhs != rhs and self.witness is None:
            self.witness = label

    def matrices(self, lhs: SparseMatrix, rhs: SparseMatrix, label: str) -> None:
        self.count += 1
        if lhs != rhs and self.witness is None:
            self.witness = f"{label} {_first_entry(lhs - rhs)}"


def _classes(ops: ClassOperators, m: int):
    for i in range(ops.coh_dim(m)):
        yield i, ops.unit(i)


# Verifier

def _chain_level_checks(model: HochschildModel, D: int, report: Report, connes_sign: int) -> bool:
    b = {n: model.b(n) for n in range(1, D + 2)}
    witness = next((f"n={n} {_first_entry(b[n] @ b[n + 1])}" for n in range(1, D + 1)
                    if not (b[n] @ b[n + 1]).is_zero()), None)
    report.add("complex.b_squared", witness is None, f"b b = 0 on C_2..C_{D + 1}", witness)

    delta = {n: model.delta(n) for n in range(D + 1)}
    witness = next((f"n={n} {_first_entry(delta[n + 1] @ delta[n])}" for n in range(D)
                    if not (delta[n + 1] @ delta[n]).is_zero()), None)
    report.add("complex.delta_squared", witness is None, f"delta delta = 0 on C^0..C^{D - 1}", witness)

    big_b = {n: connes_matrix(model, n) for n in range(D + 1)}
    if connes_sign < 0:
        big_b = {n: -m for n, m in big_b.items()}
    witness = next((f"n={n} {_first_entry(big_b[n + 1] @ big_b[n])}" for n in range(D)
                    if not (big_b[n + 1] @ big_b[n]).is_zero()), None)
    report.add("complex.B_squared", witness is None, "B B = 0 on normalized chains", witness)

    witness = None
    for n in range(1, D + 1):
        anti = b[n + 1] @ big_b[n] + big_b[n - 1] @ b[n]
        if not anti.is_zero():
            witness = f"n={n} {_first_entry(anti)}"
            break
    report.add("complex.bB_anticommute", witness is None, "bB + Bb = 0 on normalized chains", witness)
    return report.ok


def verify_calculus(a: Algebra, D: int, max_chain_dim: Optional[int] = None,
                    connes_sign: int = 1) -> Report:
    """
    Check the calculus identities on HH^* and HH_* through degree D.

    Identifiers: gerst.cup.assoc, gerst.cup.comm, gerst.jacobi, gerst.leibniz,
    tt.cap_assoc, tt.B_squared, tt.eq1; informational: tt.cap_assoc.orientation,
    tt.eq1.literal, tt.lie_module.
    """
    report = Report(title=f"calculus identities for {a.name} through degree {D}")
    model = HochschildModel(a, normalized=True, max_chain_dim=max_chain_dim)
    if not _chain_level_checks(model, D, report, connes_sign):
        logger.warning(f"Chain-level identities fail for {a.name}; skipping homology checks")
        return report
    try:
        table = induced_tables(a, D, max_chain_dim, connes_sign)
    except ComplexConsistencyError as e:
        report.add("calculus.tables", False, e.detail, e.witness)
        return report
    ops = ClassOperators(table, model.field)
    report.data["hh_dims"] = table.hh_dims
    report.data["hh_cohomology_dims"] = table.coh_dims
    degrees = range(D + 1)

    assoc, comm = _Tally(), _Tally()
    for m in degrees:
        for n in degrees:
            for i, x in _classes(ops, m):
                for j, y in _classes(ops, n):
                    if m + n <= D:
                        sign = model.field.sign(m * n)
                        flipped = {k: sign * c for k, c in ops.cup(n, y, m, x).items()}
                        comm.vectors(ops.cup(m, x, n, y), flipped, f"H^{m}[{i}] H^{n}[{j}]")
                    for k in range(D + 1 - m - n):
                        for l, z in _classes(ops, k):
                            lhs = ops.cup(m + n, ops.cup(m, x, n, y), k, z)
                            rhs = ops.cup(m, x, n + k, ops.cup(n, y, k, z))
                            assoc.vectors(lhs, rhs, f"H^{m}[{i}] H^{n}[{j}] H^{k}[{l}]")
    report.add("gerst.cup.assoc", assoc.witness is None, f"{assoc.count} triples", assoc.witness)
    report.add("gerst.cup.comm", comm.witness is None, f"{comm.count} pairs", comm.witness)

    _check_jacobi_leibniz(ops, report)
    _check_cap_and_B(ops, report)
    _check_eq1(ops, report)
    logger.info(f"Calculus verification for {a.name}: ok={report.ok}")
    return report


def _bracket_or_zero(ops: ClassOperators, m: int, x: Vector, n: int, y: Vector) -> Vector:
    if m < 0 or n < 0 or m + n - 1 < 0:
        return {}
    if max(m, n, m + n - 1) > ops.D:
        raise DegreeError(f"Bracket of degrees {m} and {n} leaves the table of top degree {ops.D}")
    return ops.bracket(m, x, n, y)


def _cup_or_zero(ops: ClassOperators, m: int, x: Vector, n: int, y: Vector) -> Vector:
    if m < 0 or n < 0:
        return {}
    if m + n > ops.D:
        raise DegreeError(f"Cup of degrees {m} and {n} leaves the table of top degree {ops.D}")
    return ops.cup(m, x, n, y)


def _check_jacobi_leibniz(ops: ClassOperators, report: Report) -> None:
    D = ops.D
    jacobi, leibniz = _Tally(), _Tally()
    for m in range(D + 1):
        for n in range(D + 1):
            for k in range(D + 1):
                for i, x in _classes(ops, m):
                    for j, y in _classes(ops, n):
                        for l, z in _classes(ops, k):
                            label = f"H^{m}[{i}] H^{n}[{j}] H^{k}[{l}]"
                            total = m + n + k - 2
                            if 0 <= total <= D and max(m + n, n + k, m + k) - 1 <= D:
                                lhs = _bracket_or_zero(ops, m, x, n + k - 1, _bracket_or_zero(ops, n, y, k, z))
                                rhs = _bracket_or_zero(ops, m + n - 1, _bracket_or_zero(ops, m, x, n, y), k, z)
                                swapped = _bracket_or_zero(ops, n, y, m + k - 1, _bracket_or_zero(ops, m, x, k, z))
                                sign = ops.field.sign((m - 1) * (n - 1))
                                vec_add(rhs, swapped, sign)
                                jacobi.vectors(lhs, rhs, label)
                            if 0 <= total + 1 <= D and n + k <= D:
                                lhs = _bracket_or_zero(ops, m, x, n + k, _cup_or_zero(ops, n, y, k, z))
                                rhs = _cup_or_zero(ops, m + n - 1, _bracket_or_zero(ops, m, x, n, y), k, z)
                                other = _cup_or_zero(ops, n, y, m + k - 1, _bracket_or_zero(ops, m, x, k, z))
                                vec_add(rhs, other, ops.field.sign((m - 1) * n))
                                leibniz.vectors(lhs, rhs, label)
    report.add("gerst.jacobi", jacobi.witness is None, f"{jacobi.count} triples", jacobi.witness)
    report.add("gerst.leibniz", leibniz.witness is None, f"{leibniz.count} triples", leibniz.witness)


def _check_cap_and_B(ops: ClassOperators, report: Report) -> None:
    D = ops.D
    assoc, flipped = _Tally(), _Tally()
    for m in range(D + 1):
        for k in range(D + 1 - m):
            for i, x in _classes(ops, m):
                for j, y in _classes(ops, k):
                    for n in range(m + k, D + 1):
                        label = f"H^{k}[{j}] H^{m}[{i}] on HH_{n}"
                        composed = ops.action(k, y, n - m) @ ops.action(m, x, n)
                        assoc.matrices(composed, ops.action(m + k, ops.cup(k, y, m, x), n), label)
                        flipped.matrices(composed, ops.action(m + k, ops.cup(m, x, k, y), n), label)
    report.add("tt.cap_assoc", assoc.witness is None, f"j_b j_a = j_(b cup a), {assoc.count} instances",
               assoc.witness)
    report.note("tt.cap_assoc.orientation", CheckStatus.INFO,
                f"j_b j_a = j_(a cup b) {'holds' if flipped.witness is None else 'fails'}", flipped.witness)

    squares = _Tally()
    for p in range(D - 1):
        squares.matrices(ops.connes(p + 1) @ ops.connes(p), ops.zero(p + 2, p), f"HH_{p}")
    report.add("tt.B_squared", squares.witness is None, f"B B = 0 on HH_0..HH_{max(D - 2, 0)}", squares.witness)


def _commutator(left: SparseMatrix, right: SparseMatrix, sign: Any) -> SparseMatrix:
    return left - right.scale(sign)


def _check_eq1(ops: ClassOperators, report: Report) -> None:
    """[L_a, j_b] = j_[a,b], plus the literal twisted form and the Lie module law as information"""
    # Required form: j_a = (-1)^(m(m-1)/2) cap_a and L_a = j_a B - (-1)^m B j_a.
    # The twisted form with i_a = (-1)^(mn) cap_a on HH_n is reported as INFO only.
    D = ops.D
    field = ops.field
    eq1, literal, module = _Tally(), _Tally(), _Tally()
    for m in range(D + 1):
        for k in range(D + 1):
            for i, x in _classes(ops, m):
                for j, y in _classes(ops, k):
                    br = _bracket_or_zero(ops, m, x, k, y) if m + k - 1 <= D else {}
                    sign = field.sign((m + 1) * k)
                    for p in range(D):
                        out = p + 1 - m - k
                        if out < 0:
                            continue
                        label = f"a=H^{m}[{i}] b=H^{k}[{j}] on HH_{p}"
                        lhs = _commutator(ops.lie(m, x, p - k) @ ops.action(k, y, p),
                                          ops.action(k, y, p + 1 - m) @ ops.lie(m, x, p), sign)
                        eq1.matrices(lhs, ops.action(m + k - 1, br, p) if br else ops.zero(out, p), label)

                        twisted_lhs = _commutator(ops.literal_lie(m, x, p - k) @ ops.twisted(k, y, p),
                                                  ops.twisted(k, y, p + 1 - m) @ ops.literal_lie(m, x, p), sign)
                        literal.matrices(twisted_lhs, ops.twisted(m + k - 1, br, p) if br else ops.zero(out, p),
                                         label)

                        if p <= D - 2 and out + 1 >= 0:
                            pair = _commutator(ops.lie(m, x, p + 1 - k) @ ops.lie(k, y, p),
                                               ops.lie(k, y, p + 1 - m) @ ops.lie(m, x, p),
                                               field.sign((m + 1) * (k + 1)))
                            module.matrices(pair, ops.lie(m + k - 1, br, p) if br else ops.zero(out + 1, p), label)

    report.add("tt.eq1", eq1.witness is None, f"[L_a, j_b] = j_[a,b], {eq1.count} instances", eq1.witness)
    report.note("tt.eq1.literal", CheckStatus.INFO,
                f"twisted form B i - (-1)^m i B {'holds' if literal.witness is None else 'fails'}", literal.witness)
    report.note("tt.lie_module", CheckStatus.INFO,
                f"[L_a, L_b] = L_[a,b] {'holds' if module.witness is None else 'fails'}", module.witness)


# Derivations acting on chains

def derivation_matrix(model: HochschildModel, f: Cochain, n: int) -> SparseMatrix:
    """Matrix of the slotwise action of a 1-cochain on unnormalized C_n"""
    basis = model.chains(n)
    one = model.field.one
    cols = [model.chain_vector(n, derivation_on_chains(model.algebra, f, Chain(n, {u: one})).terms)
            for u in basis.words()]
    return SparseMatrix.from_columns(model.field, basis.size, cols)


def verify_derivation(a: Algebra, f: Cochain, D: int, max_chain_dim: Optional[int] = None) -> Report:
    """
    A 1-cocycle acts on chains by a map commuting with b and t;
    report that and the ranks of the induced maps on HH_0..HH_D.
    """
    report = Report(title=f"derivation action on the chains of {a.name} through degree {D}")
    model = HochschildModel(a, max_chain_dim=max_chain_dim)
    coboundary = model.delta(1).apply(model.cochain_vector(1, f.terms))
    report.add("derivation.cocycle", not coboundary, "delta f = 0",
               f"{len(coboundary)} nonzero coordinates" if coboundary else None)

    maps = {n: derivation_matrix(model, f, n) for n in range(D + 2)}
    witness = None
    for n in range(1, D + 2):
        b = model.b(n)
        diff = b @ maps[n] - maps[n - 1] @ b
        if not diff.is_zero():
            witness = f"n={n} {_first_entry(diff)}"
            break
    report.add("derivation.chain_map", witness is None, "b L_f = L_f b", witness)

    witness = next((f"n={n}" for n in range(D + 2) if model.t(n) @ maps[n] != maps[n] @ model.t(n)), None)
    report.add("derivation.cyclic", witness is None, "t L_f = L_f t", witness)

    if report.ok:
        spaces = model_homology(model, D)
        report.data["induced_ranks"] = [rank(induced_map(maps[n], spaces[n], spaces[n])) for n in range(D + 1)]
    return report
