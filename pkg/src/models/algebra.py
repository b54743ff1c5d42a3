"""
Finite-dimensional unital associative algebras given by structure constants
"""

from dataclasses import dataclass, field as dc_field
from typing import Any, Mapping, Optional, Sequence

from src.models.exceptions import DimensionMismatchError
from src.models.field import Field
from src.models.matrix import Vector, vec_add


@dataclass(frozen=True, eq=False)
class Algebra:
    """
    An algebra with basis e_0..e_{d-1} and e_i e_j = sum_l c[i][j][l] e_l.

    `mult` maps (i, j) to the sparse product vector; pairs with zero product are absent.
    """

    name: str
    field: Field
    basis: tuple[str, ...]
    mult: Mapping[tuple[int, int], Vector]
    unit: Vector
    idempotents: Optional[tuple[Vector, ...]] = None
    metadata: dict = dc_field(default_factory=dict)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def product(self, i: int, j: int) -> Vector:
        """e_i e_j as a sparse vector (do not mutate)"""
        return self.mult.get((i, j), {})

    def multiply(self, u: Mapping[int, Any], v: Mapping[int, Any]) -> Vector:
        out: Vector = {}
        for i, x in u.items():
            for j, y in v.items():
                prod = self.mult.get((i, j))
                if prod:
                    vec_add(out, prod, x * y)
        return out

    def coerce(self, values: Sequence[Any] | Mapping[int, Any]) -> Vector:
        """Accept a dense coefficient list or a sparse vector of this algebra"""
        if isinstance(values, Mapping):
            if any(not 0 <= i < self.dim for i in values):
                raise DimensionMismatchError(f"Index out of range for {self.name} (dim {self.dim})")
            return {i: self.field.convert(x) for i, x in values.items() if x}
        if len(values) != self.dim:
            raise DimensionMismatchError(
                f"Vector of length {len(values)} does not match {self.name} (dim {self.dim})")
        out: Vector = {}
        for i, raw in enumerate(values):
            x = self.field.convert(raw)
            if x:
                out[i] = x
        return out

    def basis_vector(self, i: int) -> Vector:
        return {i: self.field.one}

    def same_structure(self, other: "Algebra") -> bool:
        """Equal field, dimension, unit and structure constants"""
        return (self.field == other.field and self.dim == other.dim and self.unit == other.unit
                and {k: v for k, v in self.mult.items() if v} == {k: v for k, v in other.mult.items() if v})

    def __repr__(self) -> str:
        return f"Algebra({self.name}, dim={self.dim}, {self.field.label()})"


@dataclass(frozen=True)
class Arrow:
    source: int
    target: int
    label: str


@dataclass(frozen=True)
class Quiver:
    """
    A finite quiver with monomial relations.

    Vertices are 0..vertices-1. A relation is a sequence of arrow indices
    read in path order (first arrow first).
    """

    vertices: int
    arrows: tuple[Arrow, ...]
    relations: tuple[tuple[int, ...], ...] = ()

    @classmethod
    def from_edges(cls, vertices: int, edges: Sequence[tuple[int, int, str]],
                   relations: Sequence[Sequence[int]] = ()) -> "Quiver":
        return cls(vertices, tuple(Arrow(s, t, label) for s, t, label in edges),
                   tuple(tuple(r) for r in relations))
