"""
Homology spaces: a subquotient with chosen representatives and a projection
"""

from dataclasses import dataclass
from typing import Any, Mapping, Optional

from src.models.exceptions import ComplexConsistencyError
from src.models.field import Field
from src.models.matrix import SparseMatrix, Vector


@dataclass(frozen=True, eq=False)
class HomologySpace:
    """
    Homology in one degree.

    Attributes:
        degree: Homological (or cohomological) degree
        ambient_dim: Dimension of the chain space the classes live in
        representatives: ambient_dim x dim matrix, columns are cycle representatives
        projection: dim x ambient_dim matrix sending a cycle to its class coordinates
        differential: Outgoing differential, used to reject non-cycles (None for degree 0 chains)
    """

    field: Field
    degree: int
    ambient_dim: int
    representatives: SparseMatrix
    projection: SparseMatrix
    differential: Optional[SparseMatrix] = None

    @property
    def dim(self) -> int:
        return self.representatives.ncols

    def representative(self, i: int) -> Vector:
        return self.representatives.column(i)

    def is_cycle(self, v: Mapping[int, Any]) -> bool:
        if self.differential is None:
            return True
        return not self.differential.apply(v)

    def project(self, v: Mapping[int, Any], check: bool = True) -> Vector:
        """Class coordinates of a cycle"""
        if check and not self.is_cycle(v):
            raise ComplexConsistencyError(
                f"Vector projected into degree {self.degree} homology is not a cycle",
                witness=f"support={sorted(v)[:8]}")
        return self.projection.apply(v)

    def project_matrix(self, m: SparseMatrix, check: bool = True) -> SparseMatrix:
        """Project every column of m; columns must be cycles"""
        if check and self.differential is not None:
            residue = self.differential @ m
            if not residue.is_zero():
                bad = sorted({j for _, row in residue.row_items() for j in row})
                raise ComplexConsistencyError(
                    f"Image in degree {self.degree} contains non-cycles",
                    witness=f"columns={bad[:8]}")
        return self.projection @ m


def induced_map(chain_map: SparseMatrix, source: HomologySpace, target: HomologySpace) -> SparseMatrix:
    """Matrix of the map on homology induced by a chain map, in class coordinates"""
    return target.project_matrix(chain_map @ source.representatives)
