"""
Tensor-word bases for Hochschild chains and cochains
"""

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Iterator


Word = tuple[int, ...]


@dataclass(frozen=True)
class TensorBasis:
    """
    Words (u_0, ..., u_{k-1}) with lo_i <= u_i < d, ordered lexicographically.

    The index of a word is its mixed-radix value, so enumeration order and
    index order agree.
    """

    d: int
    lows: tuple[int, ...]

    @property
    def length(self) -> int:
        return len(self.lows)

    @cached_property
    def radices(self) -> tuple[int, ...]:
        return tuple(self.d - lo for lo in self.lows)

    @cached_property
    def strides(self) -> tuple[int, ...]:
        strides = []
        acc = 1
        for r in reversed(self.radices):
            strides.append(acc)
            acc *= r
        return tuple(reversed(strides))

    @cached_property
    def size(self) -> int:
        total = 1
        for r in self.radices:
            total *= r
        return total

    def index(self, word: Word) -> int:
        return sum((u - lo) * s for u, lo, s in zip(word, self.lows, self.strides))

    def word(self, index: int) -> Word:
        out = []
        for lo, s, r in zip(self.lows, self.strides, self.radices):
            q, index = divmod(index, s)
            out.append(lo + q)
        return tuple(out)

    def words(self) -> Iterator[Word]:
        return itertools.product(*(range(lo, self.d) for lo in self.lows))


def chain_basis(d: int, n: int, normalized: bool = False) -> TensorBasis:
    """Basis of C_n: slot 0 ranges over all of A, interior slots skip the unit when normalized"""
    lo = 1 if normalized else 0
    return TensorBasis(d, (0,) + (lo,) * n)


def cochain_input_basis(d: int, n: int, normalized: bool = False) -> TensorBasis:
    """Input words of C^n = Hom(A^{(x)n}, A)"""
    lo = 1 if normalized else 0
    return TensorBasis(d, (lo,) * n)


@dataclass
class Chain:
    """A Hochschild chain as sparse terms {(u_0, ..., u_n): coeff}"""

    degree: int
    terms: dict[Word, Any]


@dataclass
class Cochain:
    """A Hochschild cochain as sparse values {(input word, output index): coeff}"""

    degree: int
    terms: dict[tuple[Word, int], Any]


@dataclass
class CalculusTable:
    """
    Structure constants of the calculus in the class bases of HH^* and HH_*.

    cup[(m, n)] has columns indexed i * dim HH^n + j for classes (i, j);
    contraction[(m, i, n)] is z -> z cap alpha_i from HH_n to HH_{n-m};
    connes[n] is the Connes operator HH_n -> HH_{n+1}.
    """

    algebra_name: str
    top_degree: int
    homology: list = field(default_factory=list)
    cohomology: list = field(default_factory=list)
    cup: dict = field(default_factory=dict)
    bracket: dict = field(default_factory=dict)
    contraction: dict = field(default_factory=dict)
    connes: dict = field(default_factory=dict)
    model: Any = None

    @property
    def hh_dims(self) -> list[int]:
        return [h.dim for h in self.homology]

    @property
    def coh_dims(self) -> list[int]:
        return [h.dim for h in self.cohomology]


@dataclass
class MixedComplex:
    """
    Graded spaces M_0..M_top with d1: M_n -> M_{n-1} and d2: M_n -> M_{n+1}.

    d1 is keyed by its source degree 1..top, d2 by its source degree 0..top-1.
    """

    name: str
    model: str
    field: Any
    dims: list[int]
    d1: dict = field(default_factory=dict)
    d2: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    @property
    def top(self) -> int:
        return len(self.dims) - 1


@dataclass
class CyclicTable:
    """HH and HC through degree D with the SBI maps in class coordinates"""

    algebra_name: str
    model: str
    top_degree: int
    homology: list = field(default_factory=list)
    cyclic: list = field(default_factory=list)
    inclusion: dict = field(default_factory=dict)
    periodicity: dict = field(default_factory=dict)
    connecting: dict = field(default_factory=dict)
    exact: dict = field(default_factory=dict)

    @property
    def hh_dims(self) -> list[int]:
        return [h.dim for h in self.homology]

    @property
    def hc_dims(self) -> list[int]:
        return [h.dim for h in self.cyclic]
