"""
Cyclic service - mixed complexes, cyclic homology and the SBI sequence

Two models of the mixed complex of an algebra are carried:
  cone:        M_n = C_n + C_{n-1}, d1 = [[b, 1-t], [0, -b']], d2 = [[0, 0], [N, 0]]
  normalized:  M_n = normalized C_n, d1 = b, d2 = Connes B

HC is the homology of Tot_n = M_n + M_{n-2} + ..., column p holding M_{n-2p}.
"""

import logging
from typing import Optional

from src.models.algebra import Algebra
from src.models.complexes import CyclicTable, MixedComplex
from src.models.enums import CyclicModel
from src.models.exceptions import ComplexConsistencyError, DegreeError
from src.models.homology import HomologySpace, induced_map
from src.models.matrix import SparseMatrix
from src.models.schemas import Report
from src.services.calculus_service import connes_matrix, connes_unnormalized_matrix
from src.services.exactlin import homology, rank
from src.services.hochschild_service import HochschildModel, map_degrees, model_homology

logger = logging.getLogger(__name__)


# Mixed complexes

def cone_mixed_complex(a: Algebra, D: int, max_chain_dim: Optional[int] = None,
                       norm_mutation: bool = False) -> MixedComplex:
    """
    Cone model through degree D + 1.

    With `norm_mutation` the operator N is replaced by N - 2t, a deliberately
    broken complex used by the mutation tests.
    """
    if D < 0:
        raise DegreeError(f"Top degree must be non-negative, got {D}")
    model = HochschildModel(a, max_chain_dim=max_chain_dim)
    field = model.field
    top = D + 1
    c = [model.chain_dim(n) for n in range(top + 1)]
    dims = [c[0]] + [c[n] + c[n - 1] for n in range(1, top + 1)]

    def sizes(n: int) -> list[int]:
        return [c[0]] if n == 0 else [c[n], c[n - 1]]

    def norm(n: int) -> SparseMatrix:
        op = model.norm(n)
        return op - model.t(n).scale(field.from_int(2)) if norm_mutation else op

    mc = MixedComplex(a.name, CyclicModel.CONE.value, field, dims, extra={"model": model})
    for n in range(1, top + 1):
        blocks = {(0, 0): model.b(n), (0, 1): SparseMatrix.identity(field, c[n - 1]) - model.t(n - 1)}
        if n >= 2:
            blocks[(1, 1)] = -model.b(n - 1, cyclic_term=False)
        mc.d1[n] = SparseMatrix.block(field, sizes(n - 1), sizes(n), blocks)
    for n in range(top):
        mc.d2[n] = SparseMatrix.block(field, sizes(n + 1), sizes(n), {(1, 0): norm(n)})
    logger.info(f"Cone mixed complex of {a.name}: dims {dims}")
    return mc


def normalized_mixed_complex(a: Algebra, D: int, max_chain_dim: Optional[int] = None) -> MixedComplex:
    """Normalized (b, B) model through degree D + 1"""
    if D < 0:
        raise DegreeError(f"Top degree must be non-negative, got {D}")
    model = HochschildModel(a, normalized=True, max_chain_dim=max_chain_dim)
    top = D + 1
    dims = [model.chain_dim(n) for n in range(top + 1)]
    mc = MixedComplex(a.name, CyclicModel.NORMALIZED.value, model.field, dims, extra={"model": model})
    for n in range(1, top + 1):
        mc.d1[n] = model.b(n)
    for n in range(top):
        mc.d2[n] = connes_matrix(model, n)
    logger.info(f"Normalized mixed complex of {a.name}: dims {dims}")
    return mc


def mixed_complex(a: Algebra, D: int, model: CyclicModel | str = CyclicModel.CONE,
                  max_chain_dim: Optional[int] = None) -> MixedComplex:
    if CyclicModel(model) == CyclicModel.NORMALIZED:
        return normalized_mixed_complex(a, D, max_chain_dim)
    return cone_mixed_complex(a, D, max_chain_dim)


def _first_entry(m: SparseMatrix) -> str:
    for i, j, _ in m.entries():
        return f"entry ({i},{j})"
    return "entry (?)"


def check_mixed_axioms(mc: MixedComplex, report: Optional[Report] = None) -> Report:
    """d1 d1 = 0, d2 d2 = 0 and d1 d2 + d2 d1 = 0 on every materialized degree"""
    report = report or Report(title=f"mixed complex axioms for {mc.name} ({mc.model})")
    top = mc.top

    witness = next((f"M_{n} {_first_entry(mc.d1[n - 1] @ mc.d1[n])}" for n in range(2, top + 1)
                    if not (mc.d1[n - 1] @ mc.d1[n]).is_zero()), None)
    report.add("mixed.d1_squared", witness is None, f"d1 d1 = 0 on M_2..M_{top}", witness)

    witness = next((f"M_{n} {_first_entry(mc.d2[n + 1] @ mc.d2[n])}" for n in range(top - 1)
                    if not (mc.d2[n + 1] @ mc.d2[n]).is_zero()), None)
    report.add("mixed.d2_squared", witness is None, f"d2 d2 = 0 on M_0..M_{top - 2}", witness)

    witness = None
    for n in range(top):
        anti = mc.d1[n + 1] @ mc.d2[n]
        if n >= 1:
            anti = anti + mc.d2[n - 1] @ mc.d1[n]
        if not anti.is_zero():
            witness = f"M_{n} {_first_entry(anti)}"
            break
    report.add("mixed.anticommute", witness is None, f"d1 d2 + d2 d1 = 0 on M_0..M_{top - 1}", witness)
    return report


# Total complex and cyclic homology

def total_sizes(mc: MixedComplex, n: int) -> list[int]:
    """Column sizes of Tot_n, column p holding M_{n-2p}"""
    if n < 0:
        return []
    if n > mc.top:
        raise DegreeError(f"Tot_{n} needs M_{n}, materialized only through M_{mc.top}")
    return [mc.dims[n - 2 * p] for p in range(n // 2 + 1)]


def total_differential(mc: MixedComplex, n: int) -> SparseMatrix:
    """Tot_n -> Tot_{n-1}: d1 inside a column, d2 from column p to column p - 1"""
    src, dst = total_sizes(mc, n), total_sizes(mc, n - 1)
    blocks = {}
    for p in range(len(src)):
        deg = n - 2 * p
        if deg >= 1:
            blocks[(p, p)] = mc.d1[deg]
        if p >= 1:
            blocks[(p - 1, p)] = mc.d2[deg]
    return SparseMatrix.block(mc.field, dst, src, blocks)


def mixed_hochschild(mc: MixedComplex, D: int) -> list[HomologySpace]:
    """Homology of (M, d1) through degree D"""
    if D + 1 > mc.top:
        raise DegreeError(f"HH_{D} needs M_{D + 1}, materialized only through M_{mc.top}")
    return [homology(mc.field, mc.dims[n], mc.d1.get(n), mc.d1[n + 1], degree=n) for n in range(D + 1)]


def cyclic_homology(mc: MixedComplex, D: int) -> list[HomologySpace]:
    """HC_0..HC_D as homology of the total complex"""
    if D < 0:
        raise DegreeError(f"Top degree must be non-negative, got {D}")
    diffs = dict(zip(range(1, D + 2), map_degrees(lambda n: total_differential(mc, n), range(1, D + 2))))
    spaces = []
    for n in range(D + 1):
        dim = sum(total_sizes(mc, n))
        spaces.append(homology(mc.field, dim, diffs.get(n), diffs[n + 1], degree=n))
    logger.info(f"HC of {mc.name} ({mc.model}): {[h.dim for h in spaces]}")
    return spaces


def _column_embedding(mc: MixedComplex, n: int) -> SparseMatrix:
    """M_n -> Tot_n onto column 0"""
    sizes = total_sizes(mc, n)
    return SparseMatrix.block(mc.field, sizes, [mc.dims[n]], {(0, 0): SparseMatrix.identity(mc.field, mc.dims[n])})


def _drop_column(mc: MixedComplex, n: int) -> SparseMatrix:
    """Tot_n -> Tot_{n-2} forgetting column 0"""
    src, dst = total_sizes(mc, n), total_sizes(mc, n - 2)
    blocks = {(p - 1, p): SparseMatrix.identity(mc.field, src[p]) for p in range(1, len(src))}
    return SparseMatrix.block(mc.field, dst, src, blocks)


def _column_zero(mc: MixedComplex, n: int) -> SparseMatrix:
    """Tot_n -> M_n reading column 0"""
    sizes = total_sizes(mc, n)
    return SparseMatrix.block(mc.field, [mc.dims[n]], sizes, {(0, 0): SparseMatrix.identity(mc.field, mc.dims[n])})


def connecting_lift(mc: MixedComplex, n: int, cycles: SparseMatrix,
                    shift: Optional[SparseMatrix] = None) -> SparseMatrix:
    """
    Zig-zag for B' on Tot_n cycles (columns of `cycles`): lift y to
    (w, y_0, y_1, ...) in Tot_{n+2}, apply the total differential and read
    column 0 of Tot_{n+1}, which is d2 y_0 + d1 w.

    `shift` gives w in M_{n+2} for each column (None means w = 0).
    """
    lifted = _drop_column(mc, n + 2).transpose() @ cycles
    if shift is not None:
        lifted = lifted + _column_embedding(mc, n + 2) @ shift
    image = total_differential(mc, n + 2) @ lifted
    rest = _drop_column(mc, n + 1) @ image
    if not rest.is_zero():
        raise ComplexConsistencyError(f"Lift of Tot_{n} cycles does not land in column 0",
                                      witness=_first_entry(rest))
    return _column_zero(mc, n + 1) @ image


# SBI sequence

def _exact_at(incoming: Optional[SparseMatrix], outgoing: Optional[SparseMatrix], middle: int) -> tuple[bool, str]:
    """im(incoming) = ker(outgoing) at a node of dimension `middle`; None stands for a map from or to zero"""
    if incoming is not None and outgoing is not None:
        composite = outgoing @ incoming
        if not composite.is_zero():
            return False, f"composite nonzero at {_first_entry(composite)}"
    r_in = rank(incoming) if incoming is not None else 0
    r_out = rank(outgoing) if outgoing is not None else 0
    if r_in + r_out != middle:
        return False, f"rank(in)={r_in} rank(out)={r_out} dim={middle}"
    return True, f"rank(in)={r_in} rank(out)={r_out} dim={middle}"


def sbi_maps(mc: MixedComplex, D: int) -> CyclicTable:
    """
    I_n: HH_n -> HC_n, S_n: HC_n -> HC_{n-2} and B'_n: HC_n -> HH_{n+1} in class coordinates,
    with exactness flags keyed 'n{n}.hh', 'n{n}.hc' and 'n{n}.hcs'.
    """
    hh = mixed_hochschild(mc, D)
    hc = cyclic_homology(mc, D)
    table = CyclicTable(mc.name, mc.model, D, hh, hc)
    for n in range(D + 1):
        table.inclusion[n] = induced_map(_column_embedding(mc, n), hh[n], hc[n])
        if n >= 2:
            table.periodicity[n] = induced_map(_drop_column(mc, n), hc[n], hc[n - 2])
    for n in range(D):
        table.connecting[n] = hh[n + 1].project_matrix(connecting_lift(mc, n, hc[n].representatives))

    for n in range(D + 1):
        table.exact[f"n{n}.hh"] = _exact_at(table.connecting.get(n - 1), table.inclusion[n], hh[n].dim)
        table.exact[f"n{n}.hc"] = _exact_at(table.inclusion[n], table.periodicity.get(n), hc[n].dim)
        if n + 2 <= D:
            table.exact[f"n{n}.hcs"] = _exact_at(table.periodicity[n + 2], table.connecting[n], hc[n].dim)
    logger.info(f"SBI maps for {mc.name} ({mc.model}) through degree {D}")
    return table


def _cone_injection(mc: MixedComplex, model: HochschildModel, n: int) -> SparseMatrix:
    """C_n -> M_n as the first summand of the cone"""
    c = model.chain_dim(n)
    sizes = [c] if n == 0 else [c, model.chain_dim(n - 1)]
    return SparseMatrix.block(mc.field, sizes, [c], {(0, 0): SparseMatrix.identity(mc.field, c)})


def _connes_expected(mc: MixedComplex, table: CyclicTable, n: int) -> tuple[SparseMatrix, SparseMatrix]:
    """(B' I, B) on HH_n, both in the class bases used for the comparison"""
    hh = table.homology
    lhs = table.connecting[n] @ table.inclusion[n]
    if mc.model == CyclicModel.NORMALIZED.value:
        return lhs, induced_map(mc.d2[n], hh[n], hh[n + 1])

    # Cone classes are compared through the inclusion J of (C, b) as the first summand
    model: HochschildModel = mc.extra["model"]
    if "plain_homology" not in mc.extra:
        mc.extra["plain_homology"] = model_homology(model, table.top_degree)
    plain = mc.extra["plain_homology"]
    j_n = induced_map(_cone_injection(mc, model, n), plain[n], hh[n])
    chain_b = _cone_injection(mc, model, n + 1) @ connes_unnormalized_matrix(model, n)
    expected = induced_map(chain_b, plain[n], hh[n + 1])
    return lhs @ j_n, expected


def _second_lift(mc: MixedComplex, n: int, count: int) -> SparseMatrix:
    """w = first basis vector of M_{n+2} for every class"""
    rows = {0: {j: mc.field.one for j in range(count)}} if mc.dims[n + 2] else {}
    return SparseMatrix(mc.field, mc.dims[n + 2], count, rows)


def verify_sbi(a: Algebra, D: int, model: CyclicModel | str = CyclicModel.CONE,
               max_chain_dim: Optional[int] = None, compare_models: bool = True,
               norm_mutation: bool = False) -> Report:
    """
    Check the SBI sequence of one model through degree D.

    Identifiers: mixed.*, sbi.exact.n{n}.{hh|hc|hcs}, sbi.SI, sbi.IB, sbi.BI,
    sbi.lift_independent and sbi.models_agree.
    """
    model = CyclicModel(model)
    report = Report(title=f"SBI sequence of {a.name} ({model.value}) through degree {D}")
    if model == CyclicModel.CONE:
        mc = cone_mixed_complex(a, D, max_chain_dim, norm_mutation=norm_mutation)
    else:
        mc = normalized_mixed_complex(a, D, max_chain_dim)
    if not check_mixed_axioms(mc, report).ok:
        logger.warning(f"Mixed complex of {a.name} ({model.value}) is broken; skipping the SBI checks")
        return report
    try:
        table = sbi_maps(mc, D)
    except ComplexConsistencyError as e:
        report.add("sbi.maps", False, e.detail, e.witness)
        return report
    report.data["hh_dims"] = table.hh_dims
    report.data["hc_dims"] = table.hc_dims

    for key, (exact, detail) in table.exact.items():
        report.add(f"sbi.exact.{key}", exact, detail, None if exact else f"node {key}: {detail}")

    witness = next((f"n={n}" for n, s in table.periodicity.items()
                    if not (s @ table.inclusion[n]).is_zero()), None)
    report.add("sbi.SI", witness is None, "S I = 0", witness)
    witness = next((f"n={n}" for n, bp in table.connecting.items()
                    if not (table.inclusion[n + 1] @ bp).is_zero()), None)
    report.add("sbi.IB", witness is None, "I B' = 0", witness)

    witness = None
    for n in range(D):
        lhs, rhs = _connes_expected(mc, table, n)
        if lhs != rhs:
            witness = f"HH_{n} -> HH_{n + 1} {_first_entry(lhs - rhs)}"
            break
    report.add("sbi.BI", witness is None, "B' I equals the Connes operator on HH", witness)

    witness = None
    for n in range(D):
        reps = table.cyclic[n].representatives
        again = connecting_lift(mc, n, reps, _second_lift(mc, n, reps.ncols))
        if table.homology[n + 1].project_matrix(again) != table.connecting[n]:
            witness = f"HC_{n}"
            break
    report.add("sbi.lift_independent", witness is None, "B' agrees for two lifts", witness)

    if compare_models:
        other = CyclicModel.NORMALIZED if model == CyclicModel.CONE else CyclicModel.CONE
        oc = mixed_complex(a, D, other, max_chain_dim)
        other_hh = [h.dim for h in mixed_hochschild(oc, D)]
        other_hc = [h.dim for h in cyclic_homology(oc, D)]
        agree = other_hh == table.hh_dims and other_hc == table.hc_dims
        report.add("sbi.models_agree", agree,
                   f"{model.value} HC {table.hc_dims}, {other.value} HC {other_hc}",
                   None if agree else f"HH {table.hh_dims} vs {other_hh}")
        report.data[f"hc_dims_{other.value}"] = other_hc
    logger.info(f"SBI verification for {a.name} ({model.value}): ok={report.ok}")
    return report


def cyclic_dimensions(a: Algebra, D: int, model: CyclicModel | str = CyclicModel.CONE,
                      max_chain_dim: Optional[int] = None) -> list[int]:
    return [h.dim for h in cyclic_homology(mixed_complex(a, D, model, max_chain_dim), D)]
