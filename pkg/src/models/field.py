"""
Scalar fields: the rationals and prime fields, backed by sympy domains
"""

from typing import Any

from sympy import isprime
from sympy.polys.domains import GF, QQ

from src.models.enums import FieldType

MAX_PRIME = 2**31


class Field:
    """An exact ground field. Elements are native sympy domain elements."""

    def __init__(self, kind: FieldType, p: int | None = None):
        self.kind = FieldType(kind)
        if self.kind == FieldType.PRIME:
            if p is None or p < 2 or p >= MAX_PRIME or not isprime(p):
                raise ValueError(f"Fp requires a prime p < 2^31, got {p!r}")
            self.p = int(p)
            self.domain = GF(self.p, symmetric=False)
        else:
            self.p = None
            self.domain = QQ
        self.zero = self.domain.zero
        self.one = self.domain.one

    @classmethod
    def rational(cls) -> "Field":
        return cls(FieldType.RATIONAL)

    @classmethod
    def prime(cls, p: int) -> "Field":
        return cls(FieldType.PRIME, p)

    @classmethod
    def parse(cls, text: str) -> "Field":
        """Parse 'Q' or 'Fp:<p>'"""
        spec = text.strip()
        if spec == "Q":
            return cls.rational()
        if spec.startswith("Fp:"):
            try:
                return cls.prime(int(spec[3:]))
            except ValueError as e:
                raise ValueError(f"Invalid field descriptor '{text}': {e}") from e
        raise ValueError(f"Invalid field descriptor '{text}' (expected Q or Fp:<p>)")

    @classmethod
    def from_descriptor(cls, descriptor: dict) -> "Field":
        return cls(FieldType(descriptor["type"]), descriptor.get("p"))

    def descriptor(self) -> dict:
        if self.kind == FieldType.PRIME:
            return {"type": self.kind.value, "p": self.p}
        return {"type": self.kind.value}

    def label(self) -> str:
        return f"Fp:{self.p}" if self.kind == FieldType.PRIME else "Q"

    # Element conversions

    def from_int(self, n: int) -> Any:
        return self.domain(int(n))

    def from_string(self, text: str) -> Any:
        """Parse an integer or 'n/d' string exactly"""
        raw = str(text).strip()
        if "/" in raw:
            num_s, den_s = raw.split("/", 1)
            num, den = int(num_s), int(den_s)
        else:
            num, den = int(raw), 1
        if den == 0:
            raise ValueError(f"Zero denominator in scalar '{text}'")
        if self.kind == FieldType.PRIME:
            den_elem = self.domain(den)
            if not den_elem:
                raise ValueError(f"Denominator of '{text}' vanishes mod {self.p}")
            return self.domain.quo(self.domain(num), den_elem)
        return self.domain(num, den)

    def convert(self, value: Any) -> Any:
        """Accept ints, scalar strings or elements already in this field"""
        if isinstance(value, str):
            return self.from_string(value)
        if isinstance(value, int):
            return self.from_int(value)
        return self.domain.convert(value)

    def to_string(self, x: Any) -> str:
        if self.kind == FieldType.PRIME:
            return str(self.domain.to_int(x) % self.p)
        num, den = int(self.domain.numer(x)), int(self.domain.denom(x))
        return str(num) if den == 1 else f"{num}/{den}"

    def div(self, a: Any, b: Any) -> Any:
        if not b:
            raise ZeroDivisionError("Division by zero field element")
        return self.domain.quo(a, b)

    def is_zero(self, x: Any) -> bool:
        return not x

    def sign(self, exponent: int) -> Any:
        """(-1)^exponent as a field element"""
        return self.one if exponent % 2 == 0 else -self.one

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Field) and (self.kind, self.p) == (other.kind, other.p)

    def __hash__(self) -> int:
        return hash((self.kind, self.p))

    def __repr__(self) -> str:
        return f"Field({self.label()})"
