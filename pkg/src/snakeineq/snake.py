"""Majorants, Fejér–Riesz factors and snake-polynomials.

A majorant is ``mu = sqrt(R)`` with ``R`` a polynomial that is nonnegative
on [-1, 1]. Writing ``R(cos t) = |A(e^{it})|^2`` with all zeros of ``A`` in
the closed unit disk, the snake-polynomial of degree ``N + deg R`` is

    omega(cos t) = Re(e^{iNt} A(e^{it})) = sum_i A_i T_{N+i}(cos t),

whose phase ``N t + arg A(e^{it})`` increases monotonically, so ``omega``
touches ``+mu`` and ``-mu`` alternately ``N + deg R + 1`` times.

Zeros of ``R`` at the endpoints are split off exactly. If ``R`` vanishes to
order ``r`` at an endpoint, admissible polynomials must vanish there to
order ``ceil(r / 2)``; the endpoint then carries ``floor(r / 2) + 1``
oscillation points. Such majorants are called boundary-degenerate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping

import numpy as np
import numpy.polynomial.polynomial as P

from .chebcore import (
    ChebPoly,
    chebyshev_grid,
    derivative,
    divide_linear,
    evaluate,
    from_monomial,
    multiply,
    roots,
)

NONNEG_RTOL = 1e-10
ENDPOINT_ZERO_RTOL = 1e-10
FACTOR_RTOL = 1e-8
SNAKE_ATOL = 1e-8
NODE_RTOL = 1e-6
UNIT_CIRCLE_TOL = 1e-6
CIRCLE_CLUSTER_TOL = 1e-4
GRID_POINTS = 4096


class MajorantError(ValueError):
    pass


class SnakeError(ValueError):
    pass


def _linear(e: float) -> ChebPoly:
    """``1 - e x`` (so ``1 - x`` for e = 1 and ``1 + x`` for e = -1)."""
    return ChebPoly(np.array([1.0, -e]))


def _power(p: ChebPoly, k: int) -> ChebPoly:
    out = ChebPoly.constant(1.0)
    for _ in range(k):
        out = multiply(out, p)
    return out


@dataclass(frozen=True, eq=False)
class Majorant:
    """``mu = sqrt(R)`` with ``R`` given in the Chebyshev basis."""

    R: ChebPoly
    tag: str | None = None
    params: Mapping = field(default_factory=dict)

    def __post_init__(self):
        xs = chebyshev_grid(GRID_POINTS)
        vals = evaluate(self.R, xs)
        if np.min(vals) < -NONNEG_RTOL * np.max(np.abs(self.R.coeffs)):
            raise MajorantError("majorant not nonnegative")

    @property
    def s(self) -> int:
        return self.R.degree

    def __call__(self, x):
        return np.sqrt(np.maximum(evaluate(self.R, x), 0.0))

    @cached_property
    def _deflation(self) -> tuple[int, int, ChebPoly]:
        orders = []
        rem = self.R
        for e in (1.0, -1.0):
            r = 0
            while rem.degree > 0:
                scale = np.max(np.abs(rem.coeffs))
                if abs(evaluate(rem, e)) > ENDPOINT_ZERO_RTOL * scale:
                    break
                rem, _ = divide_linear(rem, e)
                rem = rem * (-e)  # R = (x - e) q = (1 - e x)(-e q)
                r += 1
            orders.append(r)
        return orders[0], orders[1], rem

    @property
    def endpoint_orders(self) -> tuple[int, int]:
        """Vanishing orders of ``R`` at ``x = 1`` and ``x = -1``."""
        return self._deflation[0], self._deflation[1]

    @property
    def reduced(self) -> ChebPoly:
        """``R / ((1 - x)^r+ (1 + x)^r-)``, positive at both endpoints."""
        return self._deflation[2]

    @property
    def boundary_degenerate(self) -> bool:
        return any(self.endpoint_orders)

    @property
    def forced_zero_orders(self) -> tuple[int, int]:
        rp, rm = self.endpoint_orders
        return -(-rp // 2), -(-rm // 2)

    @property
    def weight(self) -> ChebPoly:
        """``(1 - x)^j+ (1 + x)^j-`` with the forced zero orders ``j``."""
        jp, jm = self.forced_zero_orders
        return multiply(_power(_linear(1.0), jp), _power(_linear(-1.0), jm))

    def ratio_bound(self, x):
        """Limit of ``mu / weight``; infinite at an endpoint of odd order."""
        rp, rm = self.endpoint_orders
        jp, jm = self.forced_zero_orders
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            v = (evaluate(self.reduced, x)
                 * (1.0 - x) ** float(rp - 2 * jp)
                 * (1.0 + x) ** float(rm - 2 * jm))
        return np.sqrt(np.maximum(v, 0.0))


@dataclass(frozen=True, eq=False)
class FejerFactor:
    """Real coefficients ``a_0..a_s`` of ``A(z) = sum a_i z^i``."""

    A: np.ndarray

    def __post_init__(self):
        a = np.array(self.A, dtype=float)
        a.flags.writeable = False
        object.__setattr__(self, "A", a)

    def modulus_sq(self, theta):
        return np.abs(P.polyval(np.exp(1j * np.asarray(theta)), self.A)) ** 2


@dataclass(frozen=True)
class Node:
    x: float
    sign: int
    multiplicity: int
    index: int  # position of the first copy in the multiplicity-counted list


@dataclass(frozen=True, eq=False)
class Snake:
    omega: ChebPoly
    nodes: tuple[Node, ...]
    mu: Majorant
    factor: FejerFactor | None = None
    base: int | None = None

    @property
    def n(self) -> int:
        return self.omega.degree

    @property
    def node_points(self) -> np.ndarray:
        return np.array([nd.x for nd in self.nodes])


def _laurent_coeffs(R: ChebPoly) -> np.ndarray:
    """Ascending coefficients of ``z^s R((z + 1/z) / 2)``."""
    r = R.coeffs
    s = r.size - 1
    c = np.zeros(2 * s + 1)
    c[s] = r[0]
    c[s + 1:] += 0.5 * r[1:]
    c[:s] += 0.5 * r[1:][::-1]
    return c


def _interior_factor(R: ChebPoly) -> np.ndarray:
    """Monic-up-to-scale factor from the roots of the Laurent polynomial."""
    if R.degree == 0:
        return np.array([1.0])
    z = P.polyroots(_laurent_coeffs(R))
    mod = np.abs(z)
    inside = list(z[mod < 1.0 - UNIT_CIRCLE_TOL])
    circle = z[np.abs(mod - 1.0) <= UNIT_CIRCLE_TOL]
    ang = np.sort(np.angle(circle))
    groups: list[list[float]] = []
    for a in ang:
        if groups and abs(a - groups[-1][-1]) <= CIRCLE_CLUSTER_TOL:
            groups[-1].append(a)
        else:
            groups.append([a])
    for g in groups:
        if len(g) % 2:
            raise MajorantError("factorization failed: odd boundary multiplicity")
        inside += [np.exp(1j * np.mean(g))] * (len(g) // 2)
    return np.real(P.polyfromroots(inside)) if inside else np.array([1.0])


def fejer_riesz(mu: Majorant) -> FejerFactor:
    """Factor ``R(cos t) = |A(e^{it})|^2`` with the zeros of ``A`` in ``|z| <= 1``.

    Endpoint zeros of ``R`` are removed first: ``1 - x`` and ``1 + x``
    correspond exactly to ``(1 - z) / sqrt 2`` and ``(1 + z) / sqrt 2``.
    The sign is fixed by ``A(1) > 0``, or ``a_0 > 0`` when ``A(1) = 0``.
    """
    rp, rm = mu.endpoint_orders
    a = _interior_factor(mu.reduced)
    a = P.polymul(a, P.polypow([1.0, -1.0], rp)) if rp else a
    a = P.polymul(a, P.polypow([1.0, 1.0], rm)) if rm else a
    theta = np.linspace(0.0, np.pi, GRID_POINTS)
    target = evaluate(mu.R, np.cos(theta))
    got = np.abs(P.polyval(np.exp(1j * theta), a)) ** 2
    a = a * math.sqrt(np.sum(target) / np.sum(got))
    lead = np.sum(a)
    if abs(lead) <= 1e-12 * np.max(np.abs(a)):
        lead = a[np.nonzero(np.abs(a) > 1e-12 * np.max(np.abs(a)))[0][0]]
    if lead < 0:
        a = -a
    f = FejerFactor(a)
    resid = np.max(np.abs(f.modulus_sq(theta) - target))
    if resid > FACTOR_RTOL * max(np.max(np.abs(target)), 1e-300):
        raise MajorantError(f"factorization failed: residual {resid:.3e}")
    return f


def _deflate(p: ChebPoly, e: float, times: int) -> ChebPoly:
    for _ in range(times):
        p, _ = divide_linear(p, e)
        p = p * (-e)
    return p


def oscillation_nodes(omega: ChebPoly, mu: Majorant) -> tuple[Node, ...]:
    """Touch points of ``omega`` against ``+-mu``, descending, with multiplicities.

    Interior nodes are double roots of ``omega^2 - R`` (found as critical
    points where the difference vanishes). Signs are those of the ratio
    ``omega / weight``; at an endpoint of odd vanishing order the ratio is
    zero and the nominal sign ``(-1)^index`` is recorded.
    """
    rp, rm = mu.endpoint_orders
    jp, jm = mu.forced_zero_orders
    diff = multiply(omega, omega) - mu.R
    q = _deflate(_deflate(diff, 1.0, rp), -1.0, rm)
    ratio = _deflate(_deflate(omega, 1.0, jp), -1.0, jm)
    red = mu.reduced

    found: list[tuple[float, int, bool]] = []  # (x, multiplicity, has_sign)
    for e, r in ((1.0, rp), (-1.0, rm)):
        if r % 2:
            found.append((e, r // 2 + 1, False))
        elif abs(evaluate(q, e)) <= NODE_RTOL * evaluate(red, e):
            found.append((e, r // 2 + 1, True))
    if q.degree >= 2:
        for x, _ in roots(derivative(q)):
            if abs(x) >= 1.0 - 1e-12:
                continue
            if abs(evaluate(q, x)) <= NODE_RTOL * evaluate(red, x):
                found.append((x, 1, True))
    found.sort(key=lambda f: -f[0])

    total = sum(m for _, m, _ in found)
    if total != omega.degree + 1:
        raise SnakeError(f"not a snake: {total} oscillation points for degree {omega.degree}")

    signed = []
    idx = 0
    for x, m, has_sign in found:
        # a multiple endpoint's ratio sign belongs to the copy next to the interior
        pos = idx + m - 1 if x == 1.0 else idx
        sgn = int(np.sign(evaluate(ratio, x))) if has_sign else 0
        signed.append((x, m, idx, pos, sgn))
        idx += m
    ref = next(((sg, p) for _, _, _, p, sg in signed if sg), None)
    if ref is None:
        raise SnakeError("not a snake: no signed oscillation point")
    sigma = ref[0] * (-1) ** ref[1]
    nodes = []
    for x, m, i, pos, sgn in signed:
        want = sigma * (-1) ** pos
        if sgn and sgn != want:
            raise SnakeError("not a snake: signs do not alternate")
        nodes.append(Node(float(x), sigma * (-1) ** i, m, i))
    return tuple(nodes)


def _validate(omega: ChebPoly, mu: Majorant) -> None:
    xs = chebyshev_grid(GRID_POINTS)
    excess = np.max(np.abs(evaluate(omega, xs)) - mu(xs))
    if excess > SNAKE_ATOL:
        raise SnakeError(f"construction failed validation: |omega| exceeds mu by {excess:.3e}")


def _from_factor(a: np.ndarray, N: int) -> ChebPoly:
    c = np.zeros(N + a.size)
    c[N:] = a
    return ChebPoly(c)


def _assemble(a: np.ndarray, N: int, mu: Majorant) -> Snake:
    omega = _from_factor(a, N)
    if omega.degree != N + a.size - 1:
        raise SnakeError("construction failed validation: leading coefficient vanished")
    try:
        nodes = oscillation_nodes(omega, mu)
    except SnakeError as exc:
        raise SnakeError(f"construction failed validation: {exc}") from exc
    if nodes[0].sign * (-1) ** nodes[0].index < 0:
        a = -a
        omega = -omega
        nodes = tuple(Node(nd.x, -nd.sign, nd.multiplicity, nd.index) for nd in nodes)
    _validate(omega, mu)
    return Snake(omega, nodes, mu, FejerFactor(a), N)


def snake_construct(mu: Majorant, N: int) -> Snake:
    """Snake-polynomial ``sum_i A_i T_{N+i}`` of degree ``N + deg R``.

    The sign is normalized so that ``omega(tau_i) = (-1)^i mu(tau_i)`` with
    ``i`` counted from the largest node.
    """
    if N < 0:
        raise ValueError("base index N must be nonnegative")
    f = fejer_riesz(mu)
    return _assemble(np.array(f.A), N, mu)


def product_snake(s1: Snake, s2: Snake, N: int | None = None) -> Snake:
    """Snake for ``mu1 * mu2`` from the convolution of the two factors.

    Coefficient ``sum_{i+j=k} a_i b_j`` lands on ``T_{N+k}``; ``N`` defaults
    to the common base index of the inputs.
    """
    if s1.factor is None or s2.factor is None:
        raise ValueError("product_snake needs snakes built from Fejér–Riesz factors")
    if N is None:
        if s1.base != s2.base:
            raise ValueError(f"base index mismatch: {s1.base} vs {s2.base}")
        N = s1.base
    mu = Majorant(multiply(s1.mu.R, s2.mu.R), tag="product",
                  params={"factors": (s1.mu.tag, s2.mu.tag)})
    return _assemble(np.convolve(s1.factor.A, s2.factor.A), N, mu)


# ---------------------------------------------------------------------------
# catalog

def _floats(v) -> tuple[float, ...]:
    if isinstance(v, (int, float)):
        return (float(v),)
    return tuple(float(u) for u in v)


def _scalar(v) -> float:
    vals = _floats(v)
    if len(vals) != 1:
        raise MajorantError("catalog constraint violated: expected a single value")
    return vals[0]


def _nonneg_int(v, name) -> int:
    x = _scalar(v)
    if x < 0 or x != int(x):
        raise MajorantError(f"catalog constraint violated: {name} must be a nonnegative integer")
    return int(x)


def _quadratic(a: float, b: float) -> ChebPoly:
    if b < 0:
        raise MajorantError("catalog constraint violated: b >= 0 required")
    R = from_monomial([1.0, b, a])
    lo = min(1.0 - b + a, 1.0 + b + a)
    if a > 0 and abs(b / (2 * a)) <= 1:
        lo = min(lo, 1.0 - b * b / (4 * a))
    if lo < 0:
        raise MajorantError("catalog constraint violated: a x^2 + b x + 1 < 0 on [-1, 1]")
    return R


def _even_product(cs) -> ChebPoly:
    R = ChebPoly.constant(1.0)
    for c in cs:
        R = multiply(R, from_monomial([1.0, 0.0, c * c]))
    return R


def _case_unit(p):
    return ChebPoly.constant(1.0), {}


def _case_sqrt1mx2(p):
    return from_monomial([1.0, 0.0, -1.0]), {}


def _case1(p):
    a, b = _scalar(p.get("a", 1.0)), _scalar(p.get("b", 1.0))
    return _quadratic(a, b), {"a": a, "b": b}


def _case2(p):
    ell, m = _nonneg_int(p.get("l", 1), "l"), _nonneg_int(p.get("m", 1), "m")
    R = multiply(_power(_linear(-1.0), ell), _power(from_monomial([1.0, 0.0, -1.0]), m))
    return R, {"l": ell, "m": m}


def _case3(p):
    a = _scalar(p.get("a", 2.0))
    if a <= 0:
        raise MajorantError("catalog constraint violated: a > 0 required")
    return from_monomial([1.0, 0.0, a * a - 1.0]), {"a": a}


def _case4(p):
    cs = _floats(p.get("c", (1.0, 2.0)))
    return _even_product(cs), {"c": cs}


def _case5(p):
    ys = _floats(p.get("coeffs", (1.0, 0.5, 0.25)))
    mono = np.zeros(2 * len(ys) - 1)
    mono[::2] = ys
    R = from_monomial(mono)
    if np.min(evaluate(R, chebyshev_grid(GRID_POINTS))) < 0:
        raise MajorantError("catalog constraint violated: R(x^2) < 0 on [-1, 1]")
    return R, {"coeffs": ys}


def _case7(p):
    c, a = _scalar(p.get("c", 1.0)), _scalar(p.get("a", 2.0))
    if a <= 0:
        raise MajorantError("catalog constraint violated: a > 0 required")
    return multiply(from_monomial([1.0, 0.0, c * c]),
                    from_monomial([1.0, 0.0, a * a - 1.0])), {"c": c, "a": a}


def _case8(p):
    a = _scalar(p.get("a", 1.0))
    if not 0 < a < 2:
        # a = 2 gives interior double zeros of R, which the node finder does not handle
        raise MajorantError("catalog constraint violated: 0 < a < 2 required")
    return from_monomial([1.0, 0.0, -a * a, 0.0, a * a]), {"a": a}


def _case9(p):
    ell = _nonneg_int(p.get("l", 1), "l")
    cs = _floats(p.get("c", (1.0, 2.0)))
    return multiply(_power(_linear(-1.0), ell), _even_product(cs)), {"l": ell, "c": cs}


def _case10(p):
    as_ = _floats(p.get("a", (1.0, 2.0)))
    bs = _floats(p.get("b", (1.0, 1.0)))
    if len(as_) != len(bs) or not as_:
        raise MajorantError("catalog constraint violated: a and b need equal, nonzero length")
    R = ChebPoly.constant(1.0)
    for a, b in zip(as_, bs):
        R = multiply(R, _quadratic(a, b))
    return R, {"a": as_, "b": bs}


def _mu_m(p):
    m = _nonneg_int(p.get("m", 2), "m")
    return _power(from_monomial([1.0, 0.0, -1.0]), m), {"m": m}


def _custom(p):
    if "coeffs" not in p:
        raise MajorantError("catalog constraint violated: custom needs coeffs")
    return from_monomial(_floats(p["coeffs"])), {"coeffs": _floats(p["coeffs"])}


CATALOG = {
    "unit": (_case_unit, "mu = 1"),
    "sqrt1mx2": (_case_sqrt1mx2, "sqrt(1 - x^2)"),
    "case1": (_case1, "sqrt(a x^2 + b x + 1), b >= 0"),
    "case2": (_case2, "(1 + x)^(l/2) (1 - x^2)^(m/2)"),
    "case3": (_case3, "sqrt(1 + (a^2 - 1) x^2)"),
    "case4": (_case4, "sqrt(prod (1 + c_i^2 x^2))"),
    "case5": (_case5, "sqrt(R(x^2)), R given by ascending coeffs in x^2"),
    "case7": (_case7, "sqrt((1 + c^2 x^2)(1 + (a^2 - 1) x^2))"),
    "case8": (_case8, "sqrt(1 - a^2 x^2 + a^2 x^4)"),
    "case9": (_case9, "(1 + x)^(l/2) sqrt(prod (1 + c_i^2 x^2))"),
    "case10": (_case10, "sqrt(prod (a_i x^2 + b_i x + 1)), b_i >= 0"),
    "mu_m": (_mu_m, "(1 - x^2)^(m/2)"),
    "custom": (_custom, "sqrt(R), R given by ascending monomial coeffs"),
}

_ALLOWED = {
    "unit": set(), "sqrt1mx2": set(), "case1": {"a", "b"}, "case2": {"l", "m"},
    "case3": {"a"}, "case4": {"c"}, "case5": {"coeffs"}, "case7": {"c", "a"},
    "case8": {"a"}, "case9": {"l", "c"}, "case10": {"a", "b"}, "mu_m": {"m"},
    "custom": {"coeffs"},
}


def catalog_majorant_only(case_id: str, params: Mapping | None = None) -> Majorant:
    if case_id not in CATALOG:
        raise MajorantError(f"catalog constraint violated: unknown case {case_id!r}")
    params = dict(params or {})
    extra = set(params) - _ALLOWED[case_id]
    if extra:
        raise MajorantError(f"catalog constraint violated: unknown parameters {sorted(extra)}")
    R, canon = CATALOG[case_id][0](params)
    try:
        return Majorant(R, tag=case_id, params=canon)
    except MajorantError as exc:
        raise MajorantError(f"catalog constraint violated: {exc}") from exc


def catalog_majorant(case_id: str, params: Mapping | None = None,
                     n: int = 10) -> tuple[Majorant, Snake]:
    """Majorant of a catalog case and its snake-polynomial of degree ``n``."""
    mu = catalog_majorant_only(case_id, params)
    if n < mu.s:
        raise MajorantError(f"catalog constraint violated: n = {n} < deg R = {mu.s}")
    return mu, snake_construct(mu, n - mu.s)
