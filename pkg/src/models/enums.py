from enum import Enum

class FieldType(str, Enum):
    RATIONAL = "Q"
    PRIME = "Fp"

class AlgebraFamily(str, Enum):
    GROUND_FIELD = "ground_field"
    DUAL_NUMBERS = "dual_numbers"
    TRUNCATED_POLY = "truncated_poly"
    PRODUCT = "product"
    MATRIX_ALGEBRA = "matrix_algebra"
    UPPER_TRIANGULAR = "upper_triangular"
    PATH_ALGEBRA = "path_algebra"
    OPPOSITE = "opposite"
    TENSOR_PRODUCT = "tensor_product"

class CheckStatus(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    INCONCLUSIVE = "inconclusive"
    INFO = "info"    # Measured and reported, never affects the verdict

class OutputFormat(str, Enum):
    TABLE = "table"
    JSON = "json"
    CSV = "csv"

class CyclicModel(str, Enum):
    CONE = "cone"              # Unnormalized (b, 1-t, -b', N) bicomplex
    NORMALIZED = "normalized"  # Normalized (b, B) mixed complex
