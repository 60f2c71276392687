"""Generalized Dedekind sums, Eichler integrals and a quantum-modular signature."""

from .exact_arith import bernoulli_number, bernoulli_poly, periodic_bernoulli
from .periodic import PeriodicMap, dft
from .dedekind import (
    EisensteinSpec,
    GammaMatrix,
    gen_dedekind_sum,
    odd_spec,
    reciprocity_defect,
    s_odd_exact,
    s_odd_float,
)
from .tqft import sigma2_exact

__version__ = "0.1.0"

__all__ = [
    "bernoulli_number",
    "bernoulli_poly",
    "periodic_bernoulli",
    "PeriodicMap",
    "dft",
    "EisensteinSpec",
    "GammaMatrix",
    "gen_dedekind_sum",
    "odd_spec",
    "reciprocity_defect",
    "s_odd_exact",
    "s_odd_float",
    "sigma2_exact",
]
