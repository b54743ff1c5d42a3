"""
ttcalc - exact Hochschild and cyclic calculus of finite-dimensional algebras
"""

__version__ = "1.0.0"
__author__ = "ttcalc Team"
__email__ = "team@ttcalc.dev"
__description__ = "Exact Hochschild and cyclic calculus of finite-dimensional algebras, with transport along dg bimodules"
