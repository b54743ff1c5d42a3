"""
Transport service - the trace chain map of a dg bimodule and the checks that
it carries HH, HC, the SBI ladder and the calculus of A onto those of B.

For X with dual basis (x_j = columns of E_p, xi_j = rows of E_p) the trace is
  Tr(a_0, .., a_n) = sum_p eps(p, n) sum_j (M_p(a_0)_{j0 j1}, .., M_p(a_n)_{jn j0})
with M_p(a) = E_p L_p(a) E_p and eps(p, n) = (-1)^{c_1 p + c_2 p n}.
"""

import logging
from typing import Any, Optional, Sequence

from src.models.algebra import Algebra
from src.models.bimodule import DgBimodule
from src.models.complexes import Chain, Cochain, MixedComplex
from src.models.enums import CheckStatus
from src.models.exceptions import AlgebraMismatchError, ComplexConsistencyError
from src.models.field import Field
from src.models.homology import HomologySpace, induced_map
from src.models.matrix import SparseMatrix, Vector, vec_add
from src.models.schemas import Report
from src.services.bimodule_service import bimodule_from_morphism, compose, regular_bimodule, shift, validate_bimodule
from src.services.calculus_service import cap, bracket, connes_unnormalized_matrix, cup
from src.services.cyclic_service import cone_mixed_complex, sbi_maps, total_sizes
from src.services.exactlin import rank, solve
from src.services.hochschild_service import HochschildModel, model_cohomology, model_homology

logger = logging.getLogger(__name__)

SignScheme = tuple[int, int]
SIGN_SCHEMES: tuple[SignScheme, ...] = ((0, 0), (1, 0), (0, 1), (1, 1))
# Pinned by pin_sign_scheme: the only candidate that is a chain map and fixes A[1]
FROZEN_SIGN_SCHEME: SignScheme = (0, 0)


def _epsilon(scheme: SignScheme, p: int, n: int) -> int:
    c1, c2 = scheme
    return c1 * p + c2 * p * n


def _corner_rows(x: DgBimodule, p: int) -> list[dict[int, list[tuple[int, Vector]]]]:
    """For each basis element of A, the nonzero entries of E_p L_p(e_i) E_p grouped by row"""
    tables = []
    for i in range(x.source.dim):
        rows: dict[int, list[tuple[int, Vector]]] = {}
        for (r, c), v in x.corner(p, i).items():
            rows.setdefault(r, []).append((c, v))
        tables.append(rows)
    return tables


def _word_products(tables: list, size: int, word: Sequence[int], one: Any) -> dict[tuple[int, ...], Any]:
    """Sum over closed index cycles j_0 -> j_1 -> .. -> j_0 of the tensor of corner entries"""
    rows = [tables[i] for i in word]
    out: dict[tuple[int, ...], Any] = {}

    def walk(k: int, start: int, current: int, partial: dict[tuple[int, ...], Any]) -> None:
        if k == len(word):
            if current == start:
                vec_add(out, partial)
            return
        for j, v in rows[k].get(current, ()):
            if k == len(word) - 1 and j != start:
                continue
            extended: dict[tuple[int, ...], Any] = {}
            for w, c in partial.items():
                for l, y in v.items():
                    key = w + (l,)
                    extended[key] = extended[key] + c * y if key in extended else c * y
            walk(k + 1, start, j, {w: c for w, c in extended.items() if c})

    for start in range(size):
        walk(0, start, start, {(): one})
    return out


def _corner_tables(x: DgBimodule) -> dict[int, list]:
    return {p: _corner_rows(x, p) for p in x.degrees if x.rank(p)}


def trace_map(x: DgBimodule, n: int, scheme: SignScheme = FROZEN_SIGN_SCHEME,
              max_chain_dim: Optional[int] = None, tables: Optional[dict] = None) -> SparseMatrix:
    """Tr_n: C_n(A) -> C_n(B) on unnormalized chains"""
    src = HochschildModel(x.source, max_chain_dim=max_chain_dim).chains(n)
    dst = HochschildModel(x.target, max_chain_dim=max_chain_dim).chains(n)
    field = x.target.field
    tables = tables if tables is not None else _corner_tables(x)
    entries = []
    for col, word in enumerate(src.words()):
        for p, rows in tables.items():
            sign = field.sign(_epsilon(scheme, p, n))
            for out_word, c in _word_products(rows, x.rank(p), word, field.one).items():
                entries.append((dst.index(out_word), col, sign * c))
    return SparseMatrix.from_entries(field, dst.size, src.size, entries)


def _first_entry(m: SparseMatrix) -> str:
    for i, j, _ in m.entries():
        return f"entry ({i},{j})"
    return "entry (?)"


def trace_maps(x: DgBimodule, top: int, scheme: SignScheme = FROZEN_SIGN_SCHEME,
               max_chain_dim: Optional[int] = None, check: bool = True) -> dict[int, SparseMatrix]:
    """
    Tr_0..Tr_top. With `check`, asserts b Tr = Tr b, b' Tr = Tr b' and t Tr = Tr t
    so that Tr is a map of cone mixed complexes.
    """
    tables = _corner_tables(x)
    maps = {n: trace_map(x, n, scheme, max_chain_dim, tables) for n in range(top + 1)}
    if not check:
        return maps
    ma = HochschildModel(x.source, max_chain_dim=max_chain_dim)
    mb = HochschildModel(x.target, max_chain_dim=max_chain_dim)
    for n in range(top + 1):
        if n >= 1:
            for label, cyclic_term in (("b", True), ("b'", False)):
                diff = mb.b(n, cyclic_term) @ maps[n] - maps[n - 1] @ ma.b(n, cyclic_term)
                if not diff.is_zero():
                    raise ComplexConsistencyError(
                        f"Trace of {x.name} does not commute with {label} in degree {n} (sign scheme {scheme})",
                        witness=_first_entry(diff))
        diff = mb.t(n) @ maps[n] - maps[n] @ ma.t(n)
        if not diff.is_zero():
            raise ComplexConsistencyError(f"Trace of {x.name} does not commute with t in degree {n}",
                                          witness=_first_entry(diff))
    logger.info(f"Trace maps of {x.name} through degree {top} (scheme {scheme})")
    return maps


def _is_identity(m: SparseMatrix) -> bool:
    return m.nrows == m.ncols and m == SparseMatrix.identity(m.field, m.nrows)


def pin_sign_scheme(algebras: Sequence[Algebra], D: int = 2) -> tuple[SignScheme, Report]:
    """
    Find the sign scheme for which Tr is a chain map and the regular bimodule
    placed in degree 1 induces the identity on HH_0..HH_D of every algebra.
    """
    report = Report(title="trace sign scheme")
    passing = []
    for scheme in SIGN_SCHEMES:
        witness = None
        for a in algebras:
            x = shift(regular_bimodule(a), 1)
            try:
                maps = trace_maps(x, D + 1, scheme)
            except ComplexConsistencyError as e:
                witness = f"{a.name}: {e.detail}"
                break
            spaces = model_homology(HochschildModel(a), D)
            bad = next((n for n in range(D + 1) if not _is_identity(induced_map(maps[n], spaces[n], spaces[n]))), None)
            if bad is not None:
                witness = f"{a.name}: HH_{bad}(Tr) of {x.name} is not the identity"
                break
        report.add(f"signs.scheme.{scheme[0]}{scheme[1]}", witness is None,
                   f"eps(p, n) = (-1)^({scheme[0]} p + {scheme[1]} p n)", witness)
        if witness is None:
            passing.append(scheme)
    if len(passing) != 1:
        raise ComplexConsistencyError(f"Expected exactly one admissible sign scheme, found {passing}")
    report.data["scheme"] = list(passing[0])
    return passing[0], report


# Induced maps and the transport report

def mixed_map(field: Field, maps: dict[int, SparseMatrix], k: int) -> SparseMatrix:
    """Tr on the cone M_k = C_k + C_{k-1}"""
    if k == 0:
        return maps[0]
    return SparseMatrix.direct_sum(field, [maps[k], maps[k - 1]])


def total_map(mc_a: MixedComplex, mc_b: MixedComplex, maps: dict[int, SparseMatrix], n: int) -> SparseMatrix:
    """Tr on Tot_n, column by column"""
    field = mc_b.field
    blocks = {(p, p): mixed_map(field, maps, n - 2 * p) for p in range(len(total_sizes(mc_a, n)))}
    return SparseMatrix.block(field, total_sizes(mc_b, n), total_sizes(mc_a, n), blocks)


def _is_iso(m: SparseMatrix) -> bool:
    return m.nrows == m.ncols and rank(m) == m.nrows


def _check_algebras(a: Algebra, b: Algebra, x: DgBimodule) -> None:
    if not (x.source.same_structure(a) and x.target.same_structure(b)):
        raise AlgebraMismatchError(f"{x.name} is a bimodule from {x.source.name} to {x.target.name}, "
                                   f"not from {a.name} to {b.name}")


def transport_report(a: Algebra, b: Algebra, x: DgBimodule, D: int, max_chain_dim: Optional[int] = None,
                     scheme: SignScheme = FROZEN_SIGN_SCHEME) -> Report:
    """
    Induced maps of Tr on HH and HC through degree D and the checks that they are
    isomorphisms commuting with Connes' operator and with the SBI ladder.
    """
    _check_algebras(a, b, x)
    report = Report(title=f"transport along {x.name} ({a.name} -> {b.name}) through degree {D}")
    if not report.extend(validate_bimodule(x)).ok:
        return report
    try:
        maps = trace_maps(x, D + 1, scheme, max_chain_dim)
    except ComplexConsistencyError as e:
        report.add("transport.chain_map", False, e.detail, e.witness)
        return report
    report.add("transport.chain_map", True, f"Tr commutes with b, b' and t through degree {D + 1}")

    ma, mb = HochschildModel(a, max_chain_dim=max_chain_dim), HochschildModel(b, max_chain_dim=max_chain_dim)
    hh_a, hh_b = model_homology(ma, D), model_homology(mb, D)
    hh_tr = {n: induced_map(maps[n], hh_a[n], hh_b[n]) for n in range(D + 1)}
    report.data["hh_dims_source"] = [h.dim for h in hh_a]
    report.data["hh_dims_target"] = [h.dim for h in hh_b]
    bad = next((n for n in range(D + 1) if not _is_iso(hh_tr[n])), None)
    report.add("transport.hh_iso", bad is None, "HH_n(Tr) is an isomorphism",
               None if bad is None else f"HH_{bad}: {hh_tr[bad].shape}, rank {rank(hh_tr[bad])}")

    witness, chain_witness = None, None
    for n in range(D):
        ba, bb = connes_unnormalized_matrix(ma, n), connes_unnormalized_matrix(mb, n)
        lhs = hh_tr[n + 1] @ induced_map(ba, hh_a[n], hh_a[n + 1])
        rhs = induced_map(bb, hh_b[n], hh_b[n + 1]) @ hh_tr[n]
        if lhs != rhs and witness is None:
            witness = f"HH_{n} {_first_entry(lhs - rhs)}"
        chain = maps[n + 1] @ ba - bb @ maps[n]
        if not chain.is_zero() and chain_witness is None:
            chain_witness = f"C_{n} {_first_entry(chain)}"
    report.add("transport.connes", witness is None, "HH(Tr) B = B HH(Tr)", witness)
    report.note("transport.connes_chain_level", CheckStatus.INFO,
                f"Tr B = B Tr on chains {'holds' if chain_witness is None else 'fails'}", chain_witness)

    try:
        _ladder(a, b, maps, D, max_chain_dim, report)
    except ComplexConsistencyError as e:
        report.add("ladder.maps", False, e.detail, e.witness)
    logger.info(f"Transport along {x.name}: ok={report.ok}")
    return report


def _ladder(a: Algebra, b: Algebra, maps: dict[int, SparseMatrix], D: int,
            max_chain_dim: Optional[int], report: Report) -> None:
    mc_a, mc_b = cone_mixed_complex(a, D, max_chain_dim), cone_mixed_complex(b, D, max_chain_dim)
    ta, tb = sbi_maps(mc_a, D), sbi_maps(mc_b, D)
    field = mc_b.field
    hh_tr = {n: induced_map(mixed_map(field, maps, n), ta.homology[n], tb.homology[n]) for n in range(D + 1)}
    hc_tr = {n: induced_map(total_map(mc_a, mc_b, maps, n), ta.cyclic[n], tb.cyclic[n]) for n in range(D + 1)}
    report.data["hc_dims_source"] = ta.hc_dims
    report.data["hc_dims_target"] = tb.hc_dims

    for n in range(D + 1):
        lhs, rhs = tb.inclusion[n] @ hh_tr[n], hc_tr[n] @ ta.inclusion[n]
        report.add(f"ladder.I.n{n}", lhs == rhs, "I HH(Tr) = HC(Tr) I",
                   None if lhs == rhs else _first_entry(lhs - rhs))
        if n >= 2:
            lhs, rhs = tb.periodicity[n] @ hc_tr[n], hc_tr[n - 2] @ ta.periodicity[n]
            report.add(f"ladder.S.n{n}", lhs == rhs, "S HC(Tr) = HC(Tr) S",
                       None if lhs == rhs else _first_entry(lhs - rhs))
        if n < D:
            lhs, rhs = tb.connecting[n] @ hc_tr[n], hh_tr[n + 1] @ ta.connecting[n]
            report.add(f"ladder.Bprime.n{n}", lhs == rhs, "B' HC(Tr) = HH(Tr) B'",
                       None if lhs == rhs else _first_entry(lhs - rhs))
    bad = next((n for n in range(D + 1) if not _is_iso(hc_tr[n])), None)
    report.add("transport.hc_iso", bad is None, "HC_n(Tr) is an isomorphism",
               None if bad is None else f"HC_{bad}: {hc_tr[bad].shape}")


# Cohomology transport

def _chain_reps(model: HochschildModel, spaces: list[HomologySpace], maps: Optional[dict] = None):
    """Class representatives as Chain objects, optionally pushed through Tr"""
    out = {}
    for n, h in enumerate(spaces):
        reps = []
        for k in range(h.dim):
            v = h.representative(k)
            if maps is not None:
                v = maps[n].apply(v)
            reps.append(Chain(n, model.chain_terms(n, v)))
        out[n] = reps
    return out


def _cochain(model: HochschildModel, m: int, v: Vector) -> Cochain:
    return Cochain(m, model.cochain_terms(m, v))


def _project_cochain(model: HochschildModel, space: HomologySpace, c: Cochain) -> Vector:
    return space.project(model.cochain_vector(c.degree, c.terms))


def _stack(field: Field, blocks: list[SparseMatrix], ncols: int) -> SparseMatrix:
    return SparseMatrix.block(field, [blk.nrows for blk in blocks], [ncols],
                              {(k, 0): blk for k, blk in enumerate(blocks)})


def transport_cohomology_solve(a: Algebra, b: Algebra, x: DgBimodule, D: int,
                               max_chain_dim: Optional[int] = None
                               ) -> tuple[Optional[dict[int, SparseMatrix]], Report]:
    """
    Solve HH(Tr)(z cap alpha) = HH(Tr)(z) cap T(alpha) for T: HH^m(A) -> HH^m(B).

    Returns T (one matrix per degree) when every system has a unique solution,
    together with checks that T preserves the unit, cup and bracket.
    """
    _check_algebras(a, b, x)
    report = Report(title=f"cohomology transport along {x.name} through degree {D}")
    field = b.field
    maps = trace_maps(x, D, max_chain_dim=max_chain_dim)
    ma, mb = HochschildModel(a, max_chain_dim=max_chain_dim), HochschildModel(b, max_chain_dim=max_chain_dim)
    hh_a, hh_b = model_homology(ma, D), model_homology(mb, D)
    coh_a, coh_b = model_cohomology(ma, D), model_cohomology(mb, D)
    hh_tr = {n: induced_map(maps[n], hh_a[n], hh_b[n]) for n in range(D + 1)}
    chains_a = _chain_reps(ma, hh_a)
    chains_b = _chain_reps(mb, hh_a, maps)
    report.data["coh_dims_source"] = [h.dim for h in coh_a]
    report.data["coh_dims_target"] = [h.dim for h in coh_b]

    transport: dict[int, SparseMatrix] = {}
    unique_all = True
    for m in range(D + 1):
        targets = [_cochain(mb, m, coh_b[m].representative(j)) for j in range(coh_b[m].dim)]
        system_blocks, rhs_blocks = [], []
        for n in range(m, D + 1):
            for k, z in enumerate(chains_a[n]):
                tz = chains_b[n][k]
                cols = [hh_b[n - m].project(mb.chain_vector(n - m, cap(b, tz, g).terms)) for g in targets]
                system_blocks.append(SparseMatrix.from_columns(field, hh_b[n - m].dim, cols))
                rhs = []
                for i in range(coh_a[m].dim):
                    f = _cochain(ma, m, coh_a[m].representative(i))
                    capped = hh_a[n - m].project(ma.chain_vector(n - m, cap(a, z, f).terms))
                    rhs.append(hh_tr[n - m].apply(capped))
                rhs_blocks.append(SparseMatrix.from_columns(field, hh_b[n - m].dim, rhs))
        system = _stack(field, system_blocks, coh_b[m].dim)
        rhs_all = _stack(field, rhs_blocks, coh_a[m].dim)
        solutions, inconsistent = [], None
        for i in range(coh_a[m].dim):
            sol = solve(system, rhs_all.column(i))
            if sol is None:
                inconsistent = f"HH^{m}[{i}]"
                break
            solutions.append(sol)
        free = coh_b[m].dim - rank(system)
        check_id = f"cohomology.solve.m{m}"
        if inconsistent:
            report.add(check_id, False, f"cap-intertwining system for HH^{m} is inconsistent", inconsistent)
            unique_all = False
        elif free:
            report.note(check_id, CheckStatus.INCONCLUSIVE,
                        f"solution space of dimension {free} for each class of HH^{m}")
            logger.warning(f"Cohomology transport along {x.name} underdetermined in degree {m}")
            unique_all = False
        else:
            report.add(check_id, True, f"unique T on HH^{m} ({coh_a[m].dim} -> {coh_b[m].dim})")
            transport[m] = SparseMatrix.from_columns(field, coh_b[m].dim, solutions)

    if not unique_all:
        return None, report
    _check_transport(a, b, ma, mb, coh_a, coh_b, transport, D, report)
    return transport, report


def _check_transport(a: Algebra, b: Algebra, ma: HochschildModel, mb: HochschildModel,
                     coh_a: list[HomologySpace], coh_b: list[HomologySpace],
                     transport: dict[int, SparseMatrix], D: int, report: Report) -> None:
    bad = next((m for m in range(D + 1) if not _is_iso(transport[m])), None)
    report.add("cohomology.iso", bad is None, "T is an isomorphism in every degree",
               None if bad is None else f"HH^{bad}")

    unit_a = coh_a[0].project(ma.cochain_vector(0, {((), l): c for l, c in a.unit.items()}))
    unit_b = coh_b[0].project(mb.cochain_vector(0, {((), l): c for l, c in b.unit.items()}))
    report.add("cohomology.unit", transport[0].apply(unit_a) == unit_b, "T(1) = 1",
               None if transport[0].apply(unit_a) == unit_b else "T(1) != 1")

    def source(m: int, i: int) -> Cochain:
        return _cochain(ma, m, coh_a[m].representative(i))

    def image(m: int, i: int) -> Cochain:
        return _cochain(mb, m, coh_b[m].representatives.apply(transport[m].column(i)))

    cup_witness, bracket_witness = None, None
    for m in range(D + 1):
        for n in range(D + 1):
            for i in range(coh_a[m].dim):
                for j in range(coh_a[n].dim):
                    label = f"HH^{m}[{i}] HH^{n}[{j}]"
                    if m + n <= D and cup_witness is None:
                        lhs = transport[m + n].apply(_project_cochain(ma, coh_a[m + n], cup(a, source(m, i), source(n, j))))
                        rhs = _project_cochain(mb, coh_b[m + n], cup(b, image(m, i), image(n, j)))
                        if lhs != rhs:
                            cup_witness = label
                    deg = m + n - 1
                    if 0 <= deg <= D and bracket_witness is None:
                        lhs = transport[deg].apply(
                            _project_cochain(ma, coh_a[deg], bracket(a, source(m, i), source(n, j))))
                        rhs = _project_cochain(mb, coh_b[deg], bracket(b, image(m, i), image(n, j)))
                        if lhs != rhs:
                            bracket_witness = label
    report.add("cohomology.cup", cup_witness is None, "T(a cup b) = T(a) cup T(b)", cup_witness)
    report.add("cohomology.bracket", bracket_witness is None, "T([a, b]) = [T(a), T(b)]", bracket_witness)


# Functoriality and normalization

def _induced_all(maps: dict[int, SparseMatrix], source: list[HomologySpace],
                 target: list[HomologySpace]) -> dict[int, SparseMatrix]:
    return {n: induced_map(maps[n], source[n], target[n]) for n in range(len(source))}


def transport_functoriality(x: DgBimodule, y: DgBimodule, D: int, max_chain_dim: Optional[int] = None) -> Report:
    """Tr of X (x)_B Y against Tr_Y Tr_X, on chains and on HH"""
    z = compose(x, y)
    report = Report(title=f"functoriality {x.name} then {y.name} through degree {D}")
    report.extend(validate_bimodule(z))
    if not report.ok:
        return report
    tx, ty, tz = (trace_maps(w, D + 1, max_chain_dim=max_chain_dim) for w in (x, y, z))
    witness = next((f"C_{n} {_first_entry(tz[n] - ty[n] @ tx[n])}" for n in range(D + 1)
                    if tz[n] != ty[n] @ tx[n]), None)
    report.add("functoriality.chain", witness is None, "Tr_(X (x) Y) = Tr_Y Tr_X on chains", witness)

    hh = [model_homology(HochschildModel(alg, max_chain_dim=max_chain_dim), D)
          for alg in (x.source, x.target, y.target)]
    hx, hy, hz = _induced_all(tx, hh[0], hh[1]), _induced_all(ty, hh[1], hh[2]), _induced_all(tz, hh[0], hh[2])
    witness = next((f"HH_{n}" for n in range(D + 1) if hz[n] != hy[n] @ hx[n]), None)
    report.add("functoriality.hh", witness is None, "HH(Tr_(X (x) Y)) = HH(Tr_Y) HH(Tr_X)", witness)
    return report


def tensor_power_map(f: SparseMatrix, a: Algebra, b: Algebra, n: int) -> SparseMatrix:
    """a_0 (x) .. (x) a_n -> f(a_0) (x) .. (x) f(a_n) on unnormalized chains"""
    src, dst = HochschildModel(a).chains(n), HochschildModel(b).chains(n)
    images = [f.column(i) for i in range(a.dim)]
    entries = []
    for col, word in enumerate(src.words()):
        terms: dict[tuple[int, ...], Any] = {(): b.field.one}
        for i in word:
            terms = {w + (l,): c * y for w, c in terms.items() for l, y in images[i].items()}
        entries.extend((dst.index(w), col, c) for w, c in terms.items())
    return SparseMatrix.from_entries(b.field, dst.size, src.size, entries)


def transport_normalization(f: SparseMatrix, a: Algebra, b: Algebra, D: int,
                            max_chain_dim: Optional[int] = None) -> Report:
    """Tr of the bimodule f(1)B against the map induced by f itself"""
    x = bimodule_from_morphism(f, a, b)
    report = Report(title=f"normalization for {x.name} through degree {D}")
    maps = trace_maps(x, D + 1, max_chain_dim=max_chain_dim)
    direct = {n: tensor_power_map(f, a, b, n) for n in range(D + 1)}
    witness = next((f"C_{n}" for n in range(D + 1) if maps[n] != direct[n]), None)
    report.add("normalization.chain", witness is None, "Tr = f (x) .. (x) f on chains", witness)
    hh_a = model_homology(HochschildModel(a, max_chain_dim=max_chain_dim), D)
    hh_b = model_homology(HochschildModel(b, max_chain_dim=max_chain_dim), D)
    lhs, rhs = _induced_all(maps, hh_a, hh_b), _induced_all(direct, hh_a, hh_b)
    witness = next((f"HH_{n}" for n in range(D + 1) if lhs[n] != rhs[n]), None)
    report.add("normalization.hh", witness is None, "HH(Tr) equals the map induced by f", witness)
    return report
