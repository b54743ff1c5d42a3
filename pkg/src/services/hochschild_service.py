"""
Hochschild service - chain and cochain complexes of an algebra and their (co)homology
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from functools import cached_property
from typing import Any, Callable, Iterable, Mapping, Optional, TypeVar

from src.config import get_threads
from src.models.algebra import Algebra
from src.models.complexes import TensorBasis, Word, chain_basis, cochain_input_basis
from src.models.exceptions import DegreeError
from src.models.homology import HomologySpace
from src.models.matrix import SparseMatrix, Vector, vec_add
from src.models.schemas import Report
from src.services.algebra_service import with_unit_first
from src.services.exactlin import check_dimension, homology, kernel_basis, rank

logger = logging.getLogger(__name__)

T = TypeVar("T")


def map_degrees(fn: Callable[[int], T], degrees: Iterable[int], threads: Optional[int] = None) -> list[T]:
    """Evaluate fn per degree, in order; uses a thread pool when TTCALC_THREADS > 1"""
    degrees = list(degrees)
    workers = threads if threads is not None else get_threads()
    if workers <= 1 or len(degrees) <= 1:
        return [fn(n) for n in degrees]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, degrees))


class HochschildModel:
    """
    Chains C_n = A^{(x)(n+1)} and cochains C^n = Hom(A^{(x)n}, A) of one algebra.

    The normalized model works in a basis with e_0 = 1 and drops words with
    the unit in an interior slot.
    """

    def __init__(self, algebra: Algebra, normalized: bool = False, max_chain_dim: Optional[int] = None):
        self.source = algebra
        self.normalized = normalized
        self.max_chain_dim = max_chain_dim
        if normalized:
            self.algebra, self.to_old, self.to_new = with_unit_first(algebra)
        else:
            self.algebra = algebra
            self.to_old = self.to_new = None
        self.field = algebra.field
        self.d = algebra.dim
        self.lo = 1 if normalized else 0
        self._chains: dict[int, TensorBasis] = {}
        self._inputs: dict[int, TensorBasis] = {}

    def chains(self, n: int) -> TensorBasis:
        if n < 0:
            raise DegreeError(f"Negative chain degree {n}")
        if n not in self._chains:
            basis = chain_basis(self.d, n, self.normalized)
            check_dimension(basis.size, f"C_{n}({self.source.name})", self.max_chain_dim)
            self._chains[n] = basis
        return self._chains[n]

    def inputs(self, n: int) -> TensorBasis:
        if n < 0:
            raise DegreeError(f"Negative cochain degree {n}")
        if n not in self._inputs:
            basis = cochain_input_basis(self.d, n, self.normalized)
            check_dimension(basis.size * self.d, f"C^{n}({self.source.name})", self.max_chain_dim)
            self._inputs[n] = basis
        return self._inputs[n]

    def chain_dim(self, n: int) -> int:
        return self.chains(n).size

    def cochain_dim(self, n: int) -> int:
        return self.inputs(n).size * self.d

    def cochain_index(self, word: Word, out: int) -> int:
        return self.inputs(len(word)).index(word) * self.d + out

    def cochain_key(self, n: int, index: int) -> tuple[Word, int]:
        q, out = divmod(index, self.d)
        return self.inputs(n).word(q), out

    # Sparse term dictionaries <-> coordinate vectors

    def chain_terms(self, n: int, v: Mapping[int, Any]) -> dict[Word, Any]:
        basis = self.chains(n)
        return {basis.word(i): x for i, x in v.items()}

    def chain_vector(self, n: int, terms: Mapping[Word, Any]) -> Vector:
        basis = self.chains(n)
        return {basis.index(w): x for w, x in terms.items() if x}

    def cochain_terms(self, n: int, v: Mapping[int, Any]) -> dict[tuple[Word, int], Any]:
        return {self.cochain_key(n, i): x for i, x in v.items()}

    def cochain_vector(self, n: int, terms: Mapping[tuple[Word, int], Any]) -> Vector:
        return {self.cochain_index(w, l): x for (w, l), x in terms.items() if x}

    @cached_property
    def product_preimages(self) -> dict[int, list[tuple[int, int, Any]]]:
        """For each l, the pairs (i, j) with e_i e_j having coefficient c at e_l"""
        table: dict[int, list[tuple[int, int, Any]]] = {}
        for (i, j), prod in sorted(self.algebra.mult.items()):
            if i < self.lo or j < self.lo:
                continue
            for l, c in sorted(prod.items()):
                table.setdefault(l, []).append((i, j, c))
        return table

    # Chain-level operators

    def b(self, n: int, cyclic_term: bool = True) -> SparseMatrix:
        """Hochschild boundary b (or b' without the wrap-around term) from C_n to C_{n-1}"""
        if n < 1:
            raise DegreeError("No boundary out of degree 0")
        src, dst = self.chains(n), self.chains(n - 1)
        alg, field, lo = self.algebra, self.field, self.lo
        entries = []
        for col, u in enumerate(src.words()):
            for i in range(n):
                sign = field.sign(i)
                for l, c in alg.product(u[i], u[i + 1]).items():
                    if i >= 1 and l < lo:
                        continue
                    entries.append((dst.index(u[:i] + (l,) + u[i + 2:]), col, sign * c))
            if cyclic_term:
                sign = field.sign(n)
                for l, c in alg.product(u[n], u[0]).items():
                    entries.append((dst.index((l,) + u[1:n]), col, sign * c))
        return SparseMatrix.from_entries(field, dst.size, src.size, entries)

    def t(self, n: int) -> SparseMatrix:
        """Cyclic operator t(a_0,...,a_n) = (-1)^n (a_n, a_0, ..., a_{n-1})"""
        basis = self.chains(n)
        sign = self.field.sign(n)
        entries = [(basis.index((u[n],) + u[:n]), col, sign) for col, u in enumerate(basis.words())]
        return SparseMatrix.from_entries(self.field, basis.size, basis.size, entries)

    def norm(self, n: int) -> SparseMatrix:
        """N = 1 + t + ... + t^n"""
        basis = self.chains(n)
        entries = []
        for col, u in enumerate(basis.words()):
            for j in range(n + 1):
                rotated = u[n + 1 - j:] + u[:n + 1 - j]
                entries.append((basis.index(rotated), col, self.field.sign(n * j)))
        return SparseMatrix.from_entries(self.field, basis.size, basis.size, entries)

    def delta(self, n: int) -> SparseMatrix:
        """Hochschild coboundary from C^n to C^{n+1}, assembled column by column"""
        src, dst = self.inputs(n), self.inputs(n + 1)
        alg, field, d, lo = self.algebra, self.field, self.d, self.lo
        preimages = self.product_preimages
        entries = []
        for s_idx, s in enumerate(src.words()):
            for out in range(d):
                col = s_idx * d + out
                for x in range(lo, d):
                    row_word = dst.index((x,) + s) * d
                    for l, c in alg.product(x, out).items():
                        entries.append((row_word + l, col, c))
                last_sign = field.sign(n + 1)
                for x in range(lo, d):
                    row_word = dst.index(s + (x,)) * d
                    for l, c in alg.product(out, x).items():
                        entries.append((row_word + l, col, last_sign * c))
                for i in range(1, n + 1):
                    sign = field.sign(i)
                    for x, y, c in preimages.get(s[i - 1], ()):
                        w = s[:i - 1] + (x, y) + s[i:]
                        entries.append((dst.index(w) * d + out, col, sign * c))
        return SparseMatrix.from_entries(field, dst.size * d, src.size * d, entries)


# Public operations on algebras

def boundary_b(a: Algebra, n: int, normalized: bool = False) -> SparseMatrix:
    return HochschildModel(a, normalized).b(n)


def boundary_bprime(a: Algebra, n: int) -> SparseMatrix:
    return HochschildModel(a).b(n, cyclic_term=False)


def cyclic_t(a: Algebra, n: int) -> SparseMatrix:
    return HochschildModel(a).t(n)


def cyclic_N(a: Algebra, n: int) -> SparseMatrix:
    return HochschildModel(a).norm(n)


def cochain_delta(a: Algebra, n: int, normalized: bool = False) -> SparseMatrix:
    return HochschildModel(a, normalized).delta(n)


def model_homology(model: HochschildModel, D: int) -> list[HomologySpace]:
    """HH_0..HH_D from boundaries b_1..b_{D+1}"""
    if D < 0:
        raise DegreeError(f"Top degree must be non-negative, got {D}")
    boundaries = dict(zip(range(1, D + 2), map_degrees(model.b, range(1, D + 2))))
    spaces = []
    for n in range(D + 1):
        outgoing = boundaries.get(n) if n >= 1 else None
        spaces.append(homology(model.field, model.chain_dim(n), outgoing, boundaries[n + 1], degree=n))
    logger.info(f"HH of {model.source.name} (normalized={model.normalized}): {[h.dim for h in spaces]}")
    return spaces


def model_cohomology(model: HochschildModel, D: int) -> list[HomologySpace]:
    """HH^0..HH^D from coboundaries delta_0..delta_D"""
    if D < 0:
        raise DegreeError(f"Top degree must be non-negative, got {D}")
    deltas = map_degrees(model.delta, range(D + 1))
    spaces = []
    for n in range(D + 1):
        incoming = deltas[n - 1] if n >= 1 else None
        spaces.append(homology(model.field, model.cochain_dim(n), deltas[n], incoming, degree=n))
    logger.info(f"HH^ of {model.source.name} (normalized={model.normalized}): {[h.dim for h in spaces]}")
    return spaces


def hochschild_homology(a: Algebra, D: int, normalized: bool = False,
                        max_chain_dim: Optional[int] = None) -> list[HomologySpace]:
    return model_homology(HochschildModel(a, normalized, max_chain_dim), D)


def hochschild_cohomology(a: Algebra, D: int, normalized: bool = False,
                          max_chain_dim: Optional[int] = None) -> list[HomologySpace]:
    return model_cohomology(HochschildModel(a, normalized, max_chain_dim), D)


def hh0_via_commutators(a: Algebra) -> int:
    """dim A/[A,A], computed without chain complexes"""
    columns = []
    for i in range(a.dim):
        for j in range(i + 1, a.dim):
            comm: Vector = dict(a.product(i, j))
            vec_add(comm, a.product(j, i), -a.field.one)
            if comm:
                columns.append(comm)
    if not columns:
        return a.dim
    return a.dim - rank(SparseMatrix.from_columns(a.field, a.dim, columns))


def center_dimension(a: Algebra) -> int:
    """dim Z(A) as the kernel of x -> (x e_j - e_j x)_j"""
    entries = []
    for i in range(a.dim):
        for j in range(a.dim):
            for l, c in a.product(i, j).items():
                entries.append((j * a.dim + l, i, c))
            for l, c in a.product(j, i).items():
                entries.append((j * a.dim + l, i, -c))
    m = SparseMatrix.from_entries(a.field, a.dim * a.dim, a.dim, entries)
    return len(kernel_basis(m))


def hochschild_report(a: Algebra, D: int, normalized: bool = False,
                      max_chain_dim: Optional[int] = None
                      ) -> tuple[HochschildModel, list[HomologySpace], Report]:
    """HH_0..HH_D with the degree-zero cross-checks against A/[A,A] and the center"""
    model = HochschildModel(a, normalized, max_chain_dim)
    spaces = model_homology(model, D)
    report = Report(title=f"Hochschild homology of {a.name} through degree {D}")
    report.data["hh_dims"] = [h.dim for h in spaces]
    report.data["normalized"] = normalized

    direct = hh0_via_commutators(a)
    report.add("hh.hh0_commutators", direct == spaces[0].dim,
               f"dim A/[A,A] = {direct}, dim HH_0 = {spaces[0].dim}")
    center = center_dimension(a)
    coh0 = model_cohomology(model, 0)[0].dim
    report.add("hh.hh0_center", center == coh0, f"dim Z(A) = {center}, dim HH^0 = {coh0}")
    return model, spaces, report
