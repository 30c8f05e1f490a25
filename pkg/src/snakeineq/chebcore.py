"""Polynomials in the Chebyshev basis on [-1, 1].

Everything here is a pure function of immutable :class:`ChebPoly` values.
Evaluation, differentiation, products and the colleague-matrix root finder
are delegated to :mod:`numpy.polynomial.chebyshev`; trimming, root
clustering, division by linear factors and the sup-norm search live here.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
import numpy.polynomial.chebyshev as C
from scipy.optimize import brentq

TRIM_RTOL = 1e-13
ROOT_CLUSTER_RTOL = 1e-7
ROOT_WINDOW = 1e-8
SUPNORM_OVERSAMPLING = 16


def _trim(c: np.ndarray) -> np.ndarray:
    c = np.asarray(c, dtype=float)
    if c.size == 0:
        return np.zeros(1)
    scale = np.max(np.abs(c))
    if scale == 0.0:
        return np.zeros(1)
    keep = np.nonzero(np.abs(c) > TRIM_RTOL * scale)[0]
    return c[: keep[-1] + 1].copy()


@dataclass(frozen=True, eq=False)
class ChebPoly:
    """Finite Chebyshev series ``sum_j coeffs[j] * T_j(x)``.

    Trailing coefficients below ``1e-13 * max|c_j|`` are dropped on
    construction, so ``degree`` is the honest degree after arithmetic.
    """

    coeffs: np.ndarray

    def __post_init__(self):
        c = _trim(self.coeffs)
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def basis(cls, n: int, scale: float = 1.0) -> "ChebPoly":
        """``scale * T_n``."""
        c = np.zeros(n + 1)
        c[n] = scale
        return cls(c)

    @classmethod
    def constant(cls, value: float) -> "ChebPoly":
        return cls(np.array([float(value)]))

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    def __call__(self, x):
        return evaluate(self, x)

    def __add__(self, other):
        other = _as_poly(other)
        return ChebPoly(C.chebadd(self.coeffs, other.coeffs))

    __radd__ = __add__

    def __sub__(self, other):
        other = _as_poly(other)
        return ChebPoly(C.chebsub(self.coeffs, other.coeffs))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __neg__(self):
        return ChebPoly(-self.coeffs)

    def __mul__(self, other):
        if isinstance(other, ChebPoly):
            return multiply(self, other)
        return ChebPoly(self.coeffs * float(other))

    __rmul__ = __mul__

    def __truediv__(self, scalar: float):
        return ChebPoly(self.coeffs / float(scalar))

    def deriv(self, k: int = 1) -> "ChebPoly":
        return derivative(self, k)

    def allclose(self, other: "ChebPoly", rtol: float = 1e-12) -> bool:
        """Coefficientwise comparison relative to the larger coefficient."""
        a, b = self.coeffs, _as_poly(other).coeffs
        m = max(a.size, b.size)
        a = np.pad(a, (0, m - a.size))
        b = np.pad(b, (0, m - b.size))
        scale = max(np.max(np.abs(a)), np.max(np.abs(b)), np.finfo(float).tiny)
        return bool(np.max(np.abs(a - b)) <= rtol * scale)

    def __repr__(self):
        return f"ChebPoly({np.array2string(self.coeffs, precision=6)})"


def _as_poly(p) -> ChebPoly:
    if isinstance(p, ChebPoly):
        return p
    return ChebPoly.constant(p)


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo <= self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")


UNIT = Interval(-1.0, 1.0)


def evaluate(p: ChebPoly, x):
    """Clenshaw evaluation of ``p`` at ``x`` (scalar or array, any real x)."""
    return C.chebval(x, p.coeffs)


def derivative(p: ChebPoly, k: int = 1) -> ChebPoly:
    if k < 0:
        raise ValueError("derivative order must be nonnegative")
    if k == 0 or p.degree == 0:
        return p if k == 0 else ChebPoly.constant(0.0)
    if k > p.degree:
        return ChebPoly.constant(0.0)
    return ChebPoly(C.chebder(p.coeffs, k))


def multiply(p: ChebPoly, q: ChebPoly) -> ChebPoly:
    return ChebPoly(C.chebmul(p.coeffs, q.coeffs))


def from_monomial(m: Sequence[float]) -> ChebPoly:
    """Convert ascending monomial coefficients to the Chebyshev basis."""
    return ChebPoly(C.poly2cheb(np.asarray(m, dtype=float)))


def to_monomial(p: ChebPoly) -> np.ndarray:
    return C.cheb2poly(p.coeffs)


def from_roots(rs: Iterable[float], lead: float = 1.0) -> ChebPoly:
    """``lead * prod (x - r)`` in the Chebyshev basis."""
    rs = np.asarray(list(rs), dtype=float)
    if rs.size == 0:
        return ChebPoly.constant(lead)
    return ChebPoly(C.chebfromroots(rs) * lead)


def divide_linear(p: ChebPoly, t: float) -> tuple[ChebPoly, float]:
    """Divide ``p`` by ``(x - t)``; return ``(quotient, remainder)``.

    Works directly on Chebyshev coefficients with the backward recurrence
    ``b[j-1] = 2 (c[j] + t b[j]) - b[j+1]``, so no basis change is needed.
    """
    c = p.coeffs
    n = c.size - 1
    if n == 0:
        return ChebPoly.constant(0.0), float(c[0])
    b = np.zeros(n + 1)  # b[n] is a zero sentinel
    b[n - 1] = 2.0 * c[n] if n >= 2 else c[n]
    for j in range(n - 1, 1, -1):
        b[j - 1] = 2.0 * (c[j] + t * b[j]) - b[j + 1]
    if n >= 2:
        b[0] = c[1] + t * b[1] - 0.5 * b[2]
    r = c[0] - 0.5 * b[1] + t * b[0]
    return ChebPoly(b[:n]), float(r)


def divide_linear_batch(c: np.ndarray, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized :func:`divide_linear`: row ``i`` of ``c`` divided by ``x - t[i]``."""
    c = np.atleast_2d(np.asarray(c, dtype=float))
    t = np.asarray(t, dtype=float).reshape(-1)
    m, n1 = c.shape
    n = n1 - 1
    b = np.zeros((m, n + 1))
    b[:, n - 1] = 2.0 * c[:, n] if n >= 2 else c[:, n]
    for j in range(n - 1, 1, -1):
        b[:, j - 1] = 2.0 * (c[:, j] + t * b[:, j]) - b[:, j + 1]
    if n >= 2:
        b[:, 0] = c[:, 1] + t * b[:, 1] - 0.5 * b[:, 2]
    r = c[:, 0] - 0.5 * b[:, 1] + t * b[:, 0]
    return b[:, :n], r


def roots(p: ChebPoly, window: float = ROOT_WINDOW,
          cluster_rtol: float = ROOT_CLUSTER_RTOL) -> list[tuple[float, int]]:
    """Real roots in ``[-1 - window, 1 + window]`` with clustered multiplicity.

    Eigenvalues of the colleague matrix within ``cluster_rtol * (1 + |r|)``
    of each other (or of the real axis) are merged into one root whose
    location is the cluster mean. Result is sorted in descending order.
    """
    if p.degree < 1:
        raise ValueError("constant polynomial")
    z = C.chebroots(p.coeffs)
    z = z[np.abs(z.imag) <= cluster_rtol * (1.0 + np.abs(z))]
    x = np.sort(z.real)[::-1]
    out: list[tuple[float, int]] = []
    group: list[float] = []
    for xi in x:
        if group and abs(group[-1] - xi) > cluster_rtol * (1.0 + abs(xi)):
            out.append((float(np.mean(group)), len(group)))
            group = []
        group.append(float(xi))
    if group:
        out.append((float(np.mean(group)), len(group)))
    return [(r, m) for r, m in out if -1.0 - window <= r <= 1.0 + window]


def chebyshev_grid(npts: int, interval: Interval = UNIT) -> np.ndarray:
    """Chebyshev extreme points mapped to ``interval``, descending, endpoints included."""
    if npts < 2:
        return np.array([interval.hi])
    u = np.cos(np.pi * np.arange(npts) / (npts - 1))
    return 0.5 * (interval.hi + interval.lo) + 0.5 * (interval.hi - interval.lo) * u


def supnorm(p: ChebPoly, interval: Interval = UNIT) -> tuple[float, float]:
    """``(max |p|, argmax)`` over ``interval``.

    Samples a Chebyshev grid of ``16 (d + 1)`` points, then polishes every
    grid-local maximum of ``|p|`` by a bracketed root of ``p'``. Ties within
    1e-12 relative go to the larger abscissa.
    """
    if interval.lo == interval.hi:
        return float(abs(evaluate(p, interval.lo))), interval.lo
    if p.degree == 0:
        return float(abs(p.coeffs[0])), interval.hi
    xs = chebyshev_grid(SUPNORM_OVERSAMPLING * (p.degree + 1), interval)
    vals = np.abs(evaluate(p, xs))
    dp = derivative(p)
    cands = [(float(vals[0]), float(xs[0])), (float(vals[-1]), float(xs[-1]))]
    for j in range(1, xs.size - 1):
        if vals[j] >= vals[j - 1] and vals[j] >= vals[j + 1]:
            a, b = xs[j + 1], xs[j - 1]
            fa, fb = evaluate(dp, a), evaluate(dp, b)
            x = float(xs[j])
            if fa * fb < 0.0:
                x = brentq(lambda s: evaluate(dp, s), a, b, xtol=1e-15)
            cands.append((float(abs(evaluate(p, x))), x))
    best = max(v for v, _ in cands)
    tied = [x for v, x in cands if v >= best * (1.0 - 1e-12)]
    return best, max(tied)
