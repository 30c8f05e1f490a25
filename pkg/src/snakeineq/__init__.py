"""Snake-polynomials and Markov/Duffin–Schaeffer inequalities with majorants."""

from .chebcore import ChebPoly, Interval, evaluate, derivative, multiply, roots, supnorm
from .snake import (
    CATALOG,
    Majorant,
    MajorantError,
    Node,
    Snake,
    SnakeError,
    catalog_majorant,
    fejer_riesz,
    oscillation_nodes,
    product_snake,
    snake_construct,
)
from .extremal import (
    ExtremalReport,
    Verdict,
    brute_force_ds,
    ds_constant,
    ds_pointwise,
    markov_attainment,
    md_growth_fit,
    md_lower_bound,
    positivity_profile,
    verify_theorem_main,
)

__all__ = [
    "ChebPoly", "Interval", "evaluate", "derivative", "multiply", "roots", "supnorm",
    "CATALOG", "Majorant", "MajorantError", "Node", "Snake", "SnakeError", "catalog_majorant",
    "fejer_riesz", "oscillation_nodes", "product_snake", "snake_construct",
    "ExtremalReport", "Verdict", "brute_force_ds", "ds_constant", "ds_pointwise",
    "markov_attainment", "md_growth_fit", "md_lower_bound", "positivity_profile",
    "verify_theorem_main",
]

__version__ = "0.1.0"
