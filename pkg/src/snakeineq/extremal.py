"""Markov and Duffin–Schaeffer constants for snake-polynomials.

The Duffin–Schaeffer problem only constrains ``|p|`` at the oscillation
points, so ``p`` is pinned down by its node values and

    d*(x) = sup |p^(k)(x)| = sum_i b_i |(w l_i)^(k)(x)|

where ``l_i`` are the Lagrange polynomials of the nodes carrying a value
constraint, ``b_i`` the admissible bounds and ``w`` the factor of forced
endpoint zeros (``w = 1`` unless the majorant vanishes at +-1). The
constant D* is the maximum of ``d*`` over [-1, 1].
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from typing import Mapping, NamedTuple, Sequence

import numpy as np
import numpy.polynomial.chebyshev as C
import numpy.polynomial.polynomial as P
from scipy.optimize import brentq

from ._parallel import ordered_map
from .chebcore import (
    ChebPoly,
    chebyshev_grid,
    derivative,
    divide_linear,
    evaluate,
    multiply,
    supnorm,
)
from .snake import Majorant, Snake, catalog_majorant

POSITIVITY_RTOL = 1e-10
EQUALITY_RTOL = 1e-7
DS_GRID = 4096
DS_REFINE = 16
NODE_SEPARATION = 1e-9
TIE_RTOL = 1e-12
BRUTE_FORCE_MAX_N = 12


class OracleError(ValueError):
    pass


class ParityError(ValueError):
    pass


class Verdict(enum.Enum):
    CONFIRMS = "ConfirmsTheoremMain"
    POSITIVITY_FAILS = "PositivityFails"
    EQUALITY_FAILS = "EqualityFails"


class PositivityProfile(NamedTuple):
    k0: int | None  # None: no derivative up to the degree has a positive expansion
    margins: list[float]


def positivity_profile(omega: ChebPoly) -> PositivityProfile:
    """Smallest ``k`` with ``omega^(k) = c_0 + sum_{i>=1} a_i T_i``, all ``a_i >= 0``.

    ``margins[k]`` is the smallest coefficient of index >= 1 of ``omega^(k)``
    (zero when the derivative is constant).
    """
    margins = []
    for k in range(omega.degree + 1):
        c = derivative(omega, k).coeffs
        tail = c[1:]
        low = float(np.min(tail)) if tail.size else 0.0
        margins.append(low)
        if low >= -POSITIVITY_RTOL * np.max(np.abs(c)):
            return PositivityProfile(k, margins)
    return PositivityProfile(None, margins)


def _check_nodes(nodes: np.ndarray) -> None:
    if nodes.size > 1:
        gaps = np.abs(np.diff(np.sort(nodes)))
        if np.min(gaps) <= NODE_SEPARATION:
            raise OracleError("boundary-degenerate majorant: pointwise oracle unavailable")


def lagrange_basis(nodes: Sequence[float]) -> list[ChebPoly]:
    """Fundamental polynomials ``l_i`` with ``l_i(nodes[j]) = delta_ij``."""
    nodes = np.asarray(nodes, dtype=float)
    _check_nodes(nodes)
    m = nodes.size - 1
    coef = np.linalg.solve(C.chebvander(nodes, m), np.eye(m + 1))
    return [ChebPoly(coef[:, i]) for i in range(m + 1)]


def ds_pointwise(nodes: Sequence[float], muvals: Sequence[float], k: int, x) -> float:
    """``sup |p^(k)(x)|`` over ``deg p <= n`` with ``|p(nodes[i])| <= muvals[i]``."""
    nodes = np.asarray(nodes, dtype=float)
    muvals = np.asarray(muvals, dtype=float)
    if k > nodes.size - 1:
        raise ValueError("derivative order exceeds degree")
    basis = lagrange_basis(nodes)
    vals = np.array([evaluate(derivative(l, k), x) for l in basis])
    return float(np.abs(vals).T @ muvals) if vals.ndim == 1 else np.abs(vals).T @ muvals


def ds_sign_pattern(nodes: Sequence[float], k: int, x: float, scale: float = 1.0) -> np.ndarray:
    """Maximizing signs ``sign(l_i^(k)(x))``; near-zero entries are reported as +1."""
    basis = lagrange_basis(nodes)
    vals = np.array([evaluate(derivative(l, k), x) for l in basis])
    eps = np.where(vals < -TIE_RTOL * scale, -1, 1)
    return eps


@dataclass(frozen=True, eq=False)
class DSSystem:
    """Reduced Duffin–Schaeffer data of a snake: ``p = weight * q``."""

    nodes: np.ndarray
    bounds: np.ndarray
    weight: ChebPoly

    def basis_derivatives(self, k: int) -> list[ChebPoly]:
        return [derivative(multiply(self.weight, l), k) for l in lagrange_basis(self.nodes)]


def ds_system(snake: Snake, mu: Majorant | None = None) -> DSSystem:
    """Value-constrained nodes of ``snake`` after splitting off forced endpoint zeros."""
    mu = mu or snake.mu
    rp, rm = mu.endpoint_orders
    jp, jm = mu.forced_zero_orders
    keep = []
    for nd in snake.nodes:
        if nd.x == 1.0 and rp % 2:
            continue
        if nd.x == -1.0 and rm % 2:
            continue
        keep.append(nd.x)
    nodes = np.array(keep)
    expected = snake.n - jp - jm + 1
    if nodes.size != expected:
        raise OracleError(f"reduced node count {nodes.size} != {expected}")
    return DSSystem(nodes, mu.ratio_bound(nodes), mu.weight)


def _refine_max(polys: list[ChebPoly], bounds: np.ndarray, grid: np.ndarray,
                refine: int = DS_REFINE) -> tuple[float, float]:
    vals = np.array([evaluate(g, grid) for g in polys])  # (m+1, npts)
    d = np.abs(vals).T @ bounds

    def dstar(x):
        return float(np.abs([evaluate(g, x) for g in polys]) @ bounds)

    cands = [(float(d[0]), float(grid[0])), (float(d[-1]), float(grid[-1]))]
    interior = [j for j in range(1, grid.size - 1) if d[j] >= d[j - 1] and d[j] >= d[j + 1]]
    interior.sort(key=lambda j: -d[j])
    scale = float(np.max(d)) or 1.0
    for j in interior[:refine]:
        eps = np.where(vals[:, j] < -TIE_RTOL * scale, -1.0, 1.0)
        fixed = ChebPoly.constant(0.0)
        for e, b, g in zip(eps, bounds, polys):
            fixed = fixed + g * (e * b)
        dfix = derivative(fixed)
        a, b = grid[j + 1], grid[j - 1]
        x = float(grid[j])
        fa, fb = evaluate(dfix, a), evaluate(dfix, b)
        if fa * fb < 0:
            x = brentq(lambda s: evaluate(dfix, s), a, b, xtol=1e-15)
        cands.append((dstar(x), x))
    best = max(v for v, _ in cands)
    argmax = max(x for v, x in cands if v >= best * (1.0 - TIE_RTOL))
    return best, argmax


def ds_constant(snake: Snake, mu: Majorant | None = None, k: int = 1,
                npts: int = DS_GRID) -> tuple[float, float]:
    """``(D*_k, argmax)`` for the oscillation points of ``snake``.

    Dense Chebyshev sampling of ``d*`` followed by refinement of the best
    grid-local maxima, each with the sign pattern frozen so that ``d*``
    is a polynomial on the bracket.
    """
    system = ds_system(snake, mu)
    if k > snake.n:
        raise ValueError("derivative order exceeds degree")
    polys = system.basis_derivatives(k)
    return _refine_max(polys, system.bounds, chebyshev_grid(npts))


def ds_function(snake: Snake, k: int, x, mu: Majorant | None = None):
    """Pointwise ``d*(x)`` for the snake's (reduced) Duffin–Schaeffer system."""
    system = ds_system(snake, mu)
    vals = np.array([evaluate(g, x) for g in system.basis_derivatives(k)])
    return np.abs(vals).T @ system.bounds


def _sign_vectors(size: int) -> np.ndarray:
    # first entry fixed to +1: p and -p give the same |p^(k)|
    rest = np.array(list(itertools.product((1.0, -1.0), repeat=size - 1))).reshape(-1, size - 1)
    return np.hstack([np.ones((rest.shape[0], 1)), rest])


def brute_force_ds(nodes: Sequence[float], muvals: Sequence[float], k: int, x="norm",
                   weight: ChebPoly | None = None, return_pattern: bool = False):
    """Duffin–Schaeffer supremum by enumerating every sign pattern.

    Each pattern ``eps`` fixes ``p(nodes[i]) = eps_i * muvals[i]`` (times
    ``weight`` if given, which then multiplies the interpolant); the result
    is ``max |p^(k)(x)|`` or, with ``x="norm"``, the max sup-norm. Works
    in the monomial basis so it shares no code path with :func:`ds_constant`.
    """
    nodes = np.asarray(nodes, dtype=float)
    muvals = np.asarray(muvals, dtype=float)
    m = nodes.size - 1
    if m > BRUTE_FORCE_MAX_N:
        raise ValueError("instance too large for enumeration")
    eps = _sign_vectors(m + 1)
    coef = np.linalg.solve(P.polyvander(nodes, m), (eps * muvals).T)  # (m+1, patterns)
    if weight is not None:
        wm = C.cheb2poly(weight.coeffs)
        coef = np.array([np.convolve(wm, coef[:, j]) for j in range(coef.shape[1])]).T
    dcoef = P.polyder(coef, k, axis=0) if k else coef
    if dcoef.shape[0] == 0:
        dcoef = np.zeros((1, coef.shape[1]))
    if isinstance(x, str):
        if x != "norm":
            raise ValueError("x must be a number or 'norm'")
        vals = np.empty(coef.shape[1])
        for j in range(coef.shape[1]):
            c = dcoef[:, j]
            pts = [1.0, -1.0]
            if c.size > 2:
                r = P.polyroots(P.polyder(c))
                pts += [z.real for z in r if abs(z.imag) < 1e-9 and -1.0 <= z.real <= 1.0]
            vals[j] = np.max(np.abs(P.polyval(np.array(pts), c)))
        signed = vals
    else:
        signed = P.polyval(float(x), dcoef)
        vals = np.abs(signed)
    j = int(np.argmax(vals))
    best = float(vals[j])
    if not return_pattern:
        return best
    pattern = eps[j] * (1.0 if np.ndim(signed) and signed[j] >= 0 else -1.0)
    return best, pattern.astype(int)


class MarkovResult(NamedTuple):
    norm: float
    argmax: float
    value_at_1: float
    attained_at_1: bool


def markov_attainment(snake, k: int) -> MarkovResult:
    """Sup-norm of ``omega^(k)`` and whether it is attained at ``x = 1``."""
    omega = snake.omega if isinstance(snake, Snake) else snake
    if k > omega.degree:
        raise ValueError("derivative order exceeds degree")
    dk = derivative(omega, k)
    norm, arg = supnorm(dk)
    at1 = float(evaluate(dk, 1.0))
    attained = abs(arg - 1.0) <= 1e-8 or abs(at1) >= norm * (1.0 - 1e-12)
    return MarkovResult(norm, 1.0 if attained else arg, at1, attained)


@dataclass
class ExtremalReport:
    """Markov and Duffin–Schaeffer data of one snake at one derivative order."""

    case_id: str
    params: dict
    n: int
    k: int
    omega_k_at_1: float
    markov_norm: float
    markov_argmax: float
    ds_constant: float | None
    ds_argmax: float | None
    positivity_k0: int | None
    margins: list[float] = field(default_factory=list)
    boundary_degenerate: bool = False
    ds_note: str = ""
    verdict: Verdict = Verdict.CONFIRMS

    CSV_FIELDS = ("case", "n", "k", "omega_k_at_1", "markov_norm", "markov_argmax",
                  "ds_constant", "ds_argmax", "positivity_k0", "verdict")

    @property
    def equality_error(self) -> float | None:
        if self.ds_constant is None:
            return None
        return abs(self.ds_constant - self.omega_k_at_1) / max(abs(self.omega_k_at_1), 1e-300)

    def csv_row(self) -> list[str]:
        def fmt(v):
            if v is None:
                return ""
            return repr(float(v)) if isinstance(v, float) else str(v)

        return [self.case_id, str(self.n), str(self.k), fmt(self.omega_k_at_1),
                fmt(self.markov_norm), fmt(self.markov_argmax), fmt(self.ds_constant),
                fmt(self.ds_argmax), fmt(self.positivity_k0), self.verdict.value]

    def to_text(self) -> str:
        lines = [f"{key}={val}" for key, val in zip(self.CSV_FIELDS, self.csv_row())]
        lines.append(f"boundary_degenerate={self.boundary_degenerate}")
        if self.ds_note:
            lines.append(f"ds_note={self.ds_note}")
        return "\n".join(lines)


def theorem_main_report(snake: Snake, k: int, case_id: str = "custom",
                        params: Mapping | None = None) -> ExtremalReport:
    """Check ``M = D* = omega^(k)(1)`` for a constructed snake."""
    prof = positivity_profile(snake.omega)
    markov = markov_attainment(snake, k)
    ds_val = ds_arg = None
    note = ""
    try:
        ds_val, ds_arg = ds_constant(snake, snake.mu, k)
    except OracleError as exc:
        note = str(exc)
    positive = prof.k0 is not None and prof.k0 <= k - 1
    at1 = markov.value_at_1
    equal = markov.attained_at_1
    if ds_val is not None:
        equal = equal and abs(ds_val - at1) <= EQUALITY_RTOL * abs(at1)
    if not positive:
        verdict = Verdict.POSITIVITY_FAILS
    elif not equal:
        verdict = Verdict.EQUALITY_FAILS
    else:
        verdict = Verdict.CONFIRMS
    return ExtremalReport(case_id, dict(params or {}), snake.n, k, at1, markov.norm,
                          markov.argmax, ds_val, ds_arg, prof.k0, prof.margins,
                          snake.mu.boundary_degenerate, note, verdict)


def verify_theorem_main(case_id: str, params: Mapping | None, n: int, k: int) -> ExtremalReport:
    _, snake = catalog_majorant(case_id, params, n)
    return theorem_main_report(snake, k, case_id, params)


# --- growth separation for mu_m = (1 - x^2)^(m/2) -------------------------

def _half(m: int) -> int:
    if m < 1:
        raise ValueError("m must be a positive integer")
    return (m + 1) // 2


def check_parity(m: int, k: int, n: int) -> None:
    ok = (n - k) % 2 == 1 if m % 2 == 0 else (n - k) % 2 == 0
    if not ok:
        raise ParityError("parity condition violated")


def suggest_parity(m: int, k: int, n: int) -> tuple[int, int]:
    """Nearest admissible neighbours ``(n - 1, n + 1)`` for a parity-violating ``n``."""
    return n - 1, n + 1


def mu_m_snake(m: int, n: int) -> ChebPoly:
    """``(x^2-1)^s T_n`` for ``m = 2s`` and ``(x^2-1)^s T_n'/n`` for ``m = 2s-1``."""
    s = _half(m)
    base = ChebPoly.basis(n) if m % 2 == 0 else derivative(ChebPoly.basis(n)) / n
    x2m1 = ChebPoly(np.array([-0.5, 0.0, 0.5]))
    out = base
    for _ in range(s):
        out = multiply(out, x2m1)
    return out


@dataclass(frozen=True, eq=False)
class MDConstruction:
    """Explicit admissible ``q`` with large ``[(x^2-1)^s q]^(k)(0)``."""

    m: int
    k: int
    n: int
    q: ChebPoly
    nodes: np.ndarray
    values: np.ndarray      # |q| at the nodes
    bounds: np.ndarray      # admissible bounds at the nodes
    active: np.ndarray      # nodes where the construction is meant to touch the bound
    value: float

    @property
    def max_violation(self) -> float:
        return float(np.max(self.values - self.bounds))

    @property
    def touch_error(self) -> float:
        return float(np.max(np.abs(self.values[self.active] - self.bounds[self.active]), initial=0.0))


def _pair_sum(base: ChebPoly, ts: np.ndarray) -> ChebPoly:
    total = ChebPoly.constant(0.0)
    for t in ts:
        qp, _ = divide_linear(base, t)
        qm, _ = divide_linear(base, -t)
        total = total + qp - qm
    return total


def md_construction(m: int, k: int, n: int, enforce_parity: bool = True) -> MDConstruction:
    if enforce_parity:
        check_parity(m, k, n)
    s = _half(m)
    half = (n - 1) // 2
    Tn = ChebPoly.basis(n)
    dTn = derivative(Tn)
    if m % 2 == 0:
        x2m1 = ChebPoly(np.array([-0.5, 0.0, 0.5]))
        Pp = multiply(x2m1, dTn)
        ts = np.cos(np.pi * np.arange(1, half + 1) / n)
        q = _pair_sum(Pp, ts) / n**2
        nodes = np.cos(np.pi * np.arange(n + 1) / n)
        bounds = np.ones_like(nodes)
        # |q(t_i)| = |P'(t_i)|/n^2 with P' = n^2 T_n + x T_n'
        active_idx = np.r_[np.arange(1, half + 1), n - np.arange(1, half + 1)]
    else:
        ts = np.cos(np.pi * (np.arange(1, half + 1) - 0.5) / n)
        q = _pair_sum(Tn, ts) / n
        nodes = np.cos(np.pi * (np.arange(1, n + 1) - 0.5) / n)
        bounds = np.abs(evaluate(dTn, nodes)) / n
        active_idx = np.r_[np.arange(0, half), n - 1 - np.arange(0, half)]
    active = np.zeros(nodes.size, dtype=bool)
    active[active_idx] = True
    values = np.abs(evaluate(q, nodes))
    w = ChebPoly.constant(1.0)
    for _ in range(s):
        w = multiply(w, ChebPoly(np.array([-0.5, 0.0, 0.5])))
    value = float(abs(evaluate(derivative(multiply(w, q), k), 0.0)))
    return MDConstruction(m, k, n, q, nodes, values, bounds, active, value)


def md_lower_bound(m: int, k: int, n: int) -> float:
    """Certified lower bound ``d*_{k,mu_m}(0)`` from the explicit ``q`` construction.

    Raises
    ------
    ParityError
        If ``n`` has the wrong parity for the construction.
    ArithmeticError
        If the constructed ``q`` violates a node constraint beyond 1e-9.
    """
    con = md_construction(m, k, n)
    scale = float(np.max(con.bounds))
    if con.max_violation > 1e-9 * scale:
        raise ArithmeticError(f"node constraint violated by {con.max_violation:.3e}")
    return con.value


def md_markov_value(m: int, k: int, n: int) -> float:
    """M-side value ``omega^(k)(1)`` for the ``mu_m`` snake built on ``T_n``."""
    return float(evaluate(derivative(mu_m_snake(m, n), k), 1.0))


@dataclass
class GrowthFit:
    m: int
    k: int
    n: list[int]
    markov: list[float]
    lower: list[float]
    markov_exponent: float
    lower_exponent: float
    log_factor: bool

    def rows(self):
        for n, mv, dv in zip(self.n, self.markov, self.lower):
            yield (n, mv, dv, dv / (n**self.k * math.log(n)) if n > 1 else float("nan"),
                   dv / n ** (self.k + 0.5))


def _slope(ns, vals) -> float:
    x = np.log(np.asarray(ns, dtype=float))
    y = np.log(np.abs(np.asarray(vals, dtype=float)))
    return float(np.polyfit(x, y, 1)[0])


def md_growth_fit(m: int, k: int, n_list: Sequence[int]) -> GrowthFit:
    """Log-log slopes for both sides plus the ``ln n`` detector.

    The flag is set when ``D/n^k`` is strictly increasing while
    ``D/n^(k+1/2)`` is strictly decreasing along ``n_list``.
    """
    ns = [int(n) for n in n_list]
    if len(ns) < 4 or any(b <= a for a, b in zip(ns, ns[1:])):
        raise ValueError("n_list must be increasing with at least 4 entries")
    for n in ns:
        check_parity(m, k, n)
    markov = ordered_map(lambda n: md_markov_value(m, k, n), ns)
    lower = ordered_map(lambda n: md_lower_bound(m, k, n), ns)
    r1 = [d / n**k for n, d in zip(ns, lower)]
    r2 = [d / n ** (k + 0.5) for n, d in zip(ns, lower)]
    flag = all(b > a for a, b in zip(r1, r1[1:])) and all(b < a for a, b in zip(r2, r2[1:]))
    return GrowthFit(m, k, ns, markov, lower, _slope(ns, markov), _slope(ns, lower), flag)
