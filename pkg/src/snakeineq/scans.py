"""Numerical checks around ``tau_n(x, t) = (1 - x t)(T_n(x) - T_n(t)) / (x - t)``.

For each fixed ``t`` the function ``tau_n(., t)`` is a polynomial of degree
``n`` in ``x``. It is always built as a Chebyshev series (synthetic division
by ``x - t``, then a product with ``1 - x t``), so the removable singularity
at ``x = t`` never appears and derivatives come from :mod:`chebcore`.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field

import numpy as np
import numpy.polynomial.chebyshev as C
from scipy.optimize import minimize, minimize_scalar

from ._parallel import ordered_map
from .chebcore import (
    ChebPoly,
    chebyshev_grid,
    derivative,
    divide_linear,
    divide_linear_batch,
    evaluate,
    multiply,
)

SCAN_RTOL = 1e-9
TILE_ROWS = 256
IDENTITY_RTOL = 1e-9
NODE_TOL = 1e-8
INTERLACE_SLACK = 1e-8
PSI_EXCLUSION = 1e-6


@dataclass(frozen=True)
class CheckResult:
    """Outcome of a numerical verification; ``margin > 0`` means slack to spare."""

    passed: bool
    margin: float
    details: str = ""

    def __bool__(self):
        return self.passed


# --- tau as a polynomial in x ----------------------------------------------

def _times_one_minus_xt(b: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Rows of ``b`` (Chebyshev coefficients) multiplied by ``1 - x t[i]``."""
    m, d1 = b.shape
    xb = np.zeros((m, d1 + 1))
    # x T_0 = T_1, x T_j = (T_{j+1} + T_{j-1}) / 2
    xb[:, 1] += b[:, 0]
    if d1 > 1:
        xb[:, 2:] += 0.5 * b[:, 1:]
        xb[:, : d1 - 1] += 0.5 * b[:, 1:]
    out = -t[:, None] * xb
    out[:, :d1] += b
    return out


def tau_coefficients_of(p: ChebPoly, ts) -> np.ndarray:
    """Coefficients of ``(1 - x t)(p(x) - p(t)) / (x - t)`` for every ``t`` in ``ts``."""
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    if p.degree == 0:
        return np.zeros((ts.size, 1))
    c = np.tile(p.coeffs, (ts.size, 1))
    c[:, 0] -= evaluate(p, ts)
    q, _ = divide_linear_batch(c, ts)
    return _times_one_minus_xt(q, ts)


def tau_coefficients(n: int, ts) -> np.ndarray:
    """Chebyshev coefficients of ``tau_n(., t)`` for every ``t`` in ``ts`` (one row each)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    c = np.zeros((ts.size, n + 1))
    c[:, n] = 1.0
    c[:, 0] -= np.cos(n * np.arccos(np.clip(ts, -1.0, 1.0)))
    q, _ = divide_linear_batch(c, ts)
    return _times_one_minus_xt(q, ts)


def tau_dx_max_of(p: ChebPoly, npts: int = 401) -> float:
    """Grid maximum of ``|d/dx tau_p(x, t)|`` over the square (endpoints included)."""
    xs = np.linspace(-1.0, 1.0, npts)
    coef = tau_coefficients_of(p, xs)
    if coef.shape[1] < 2:
        return 0.0
    d = C.chebder(coef, 1, axis=1)
    return float(np.max(np.abs(d @ C.chebvander(xs, d.shape[1] - 1).T)))


def tau_poly(n: int, t: float) -> ChebPoly:
    """``tau_n(., t)`` as a :class:`ChebPoly` in ``x``."""
    Tn = ChebPoly.basis(n)
    q, _ = divide_linear(Tn - float(evaluate(Tn, t)), t)
    return multiply(q, ChebPoly(np.array([1.0, -t])))


def _rowwise_eval(coef: np.ndarray, x: np.ndarray) -> np.ndarray:
    # Clenshaw over rows, each row at its own abscissa
    b1 = np.zeros(x.shape)
    b2 = np.zeros(x.shape)
    for j in range(coef.shape[1] - 1, 0, -1):
        b1, b2 = coef[:, j] + 2.0 * x * b1 - b2, b1
    return coef[:, 0] + x * b1 - b2


def _tau_eval(n: int, x, t, order: int):
    x, t = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(t, dtype=float))
    coef = tau_coefficients(n, t.ravel())
    if order:
        coef = C.chebder(coef, order, axis=1) if coef.shape[1] > order else np.zeros((coef.shape[0], 1))
    out = _rowwise_eval(coef, x.ravel()).reshape(x.shape)
    return float(out) if out.ndim == 0 else out


def tau(n: int, x, t):
    return _tau_eval(n, x, t, 0)


def tau_dx(n: int, x, t):
    return _tau_eval(n, x, t, 1)


def tau_dxx(n: int, x, t):
    return _tau_eval(n, x, t, 2)


def tau_table(n: int, xs: np.ndarray, ts: np.ndarray, order: int = 1) -> np.ndarray:
    """``d^order/dx^order tau_n`` on the grid: rows follow ``ts``, columns ``xs``."""
    coef = tau_coefficients(n, ts)
    if order:
        if coef.shape[1] <= order:
            return np.zeros((len(ts), len(xs)))
        coef = C.chebder(coef, order, axis=1)
    V = C.chebvander(np.asarray(xs, dtype=float), coef.shape[1] - 1)
    return coef @ V.T


def tau1_closed_form(n: int, t):
    """``tau''(1, t)`` from its closed form (valid for ``t < 1``)."""
    t = np.asarray(t, dtype=float)
    Tt = np.cos(n * np.arccos(np.clip(t, -1.0, 1.0)))
    r = (1.0 + t) / (1.0 - t)
    return n * n * (n * n - 1) / 3.0 - 2.0 * r * n * n + 2.0 * (1.0 + t) / (1.0 - t) ** 2 * (1.0 - Tt)


# --- endpoint bound ----------------------------------------------------------

def tau_endpoint_check(n: int, npts: int = 10001) -> CheckResult:
    """``|tau'(+-1, t)| <= n^2`` on a t-grid, with equality where ``T_n(t) = 1``."""
    ts = np.linspace(-1.0, 1.0, npts)
    bound = float(n * n)
    vals = np.abs(tau_table(n, np.array([1.0, -1.0]), ts))
    worst = float(np.max(vals))
    tj = np.cos(2.0 * np.pi * np.arange(0, n // 2 + 1) / n)
    touch = np.abs(tau_table(n, np.array([1.0]), tj))[:, 0]
    touch_err = float(np.max(np.abs(touch - bound))) / bound
    ok = worst <= bound * (1.0 + SCAN_RTOL) and touch_err <= SCAN_RTOL
    return CheckResult(ok, bound - worst, f"max |tau'(+-1,t)| = {worst!r}, equality error {touch_err:.2e}")


# --- square scan -------------------------------------------------------------

@dataclass
class TauScanResult:
    n: int
    global_max: float
    argmax: tuple[float, float]
    boundary_max: float
    interior_max: float
    interior_argmax: tuple[float, float] | None
    local_extrema: list[tuple[float, float, float]] = field(default_factory=list)

    @property
    def interior_ratio(self) -> float:
        return self.interior_max / (self.n * self.n)


def default_grid(n: int) -> int:
    return 2001 if n <= 20 else 4001


def _refine_point(n: int, x0: float, t0: float, xlim: tuple[float, float]) -> tuple[float, float, float]:
    def f(z):
        return -abs(tau_dx(n, z[0], z[1]))

    res = minimize(f, np.array([x0, t0]), method="L-BFGS-B",
                   bounds=[xlim, (-1.0, 1.0)], options={"ftol": 1e-15, "gtol": 1e-12})
    x, t = (float(v) for v in res.x)
    if -res.fun < abs(tau_dx(n, x0, t0)):
        x, t = x0, t0
    return x, t, float(tau_dx(n, x, t))


def _refine_boundary(n: int, xb: float, t0: float, h: float) -> tuple[float, float]:
    def f(t):
        return -abs(tau_dx(n, xb, t))

    res = minimize_scalar(f, bounds=(max(-1.0, t0 - h), min(1.0, t0 + h)), method="bounded",
                          options={"xatol": 1e-14})
    t = float(res.x)
    if abs(tau_dx(n, xb, t)) < abs(tau_dx(n, xb, t0)):
        t = t0
    return t, abs(float(tau_dx(n, xb, t)))


def _grid_maxima(a: np.ndarray) -> np.ndarray:
    """Indices of entries not smaller than any of their 8 neighbours (edges excluded)."""
    c = a[1:-1, 1:-1]
    mask = np.ones_like(c, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di or dj:
                mask &= c >= a[1 + di: a.shape[0] - 1 + di, 1 + dj: a.shape[1] - 1 + dj]
    i, j = np.nonzero(mask)
    return np.stack([i + 1, j + 1], axis=1)


def tau_scan(n: int, grid_x: int | None = None, grid_t: int | None = None,
             refine: bool = True, max_refine: int = 64,
             extrema: bool = True) -> TauScanResult:
    """Maximize ``|tau_n'(x, t)|`` over the square with grid sampling plus refinement.

    The best ``max_refine`` interior grid maxima are polished by local
    optimization (the rest keep grid values); ties prefer ``x = +1`` and
    then the larger ``t``. With ``extrema=False`` only the interior argmax
    is refined and ``local_extrema`` stays empty.
    """
    grid_x = grid_x or default_grid(n)
    grid_t = grid_t or default_grid(n)
    if grid_x < 2 or grid_t < 2:
        raise ValueError("grid sizes must be at least 2")
    xs = np.linspace(1.0, -1.0, grid_x)
    ts = np.linspace(1.0, -1.0, grid_t)
    tiles = [ts[i:i + TILE_ROWS] for i in range(0, grid_t, TILE_ROWS)]
    A = np.abs(np.vstack(ordered_map(lambda tt: tau_table(n, xs, tt), tiles)))

    # boundary x = +-1
    cands = []
    for col, xb in ((0, 1.0), (grid_x - 1, -1.0)):
        j = int(np.argmax(A[:, col]))
        t, v = float(ts[j]), float(A[j, col])
        if refine:
            t, v = _refine_boundary(n, xb, t, 2.0 / (grid_t - 1))
        cands.append((v, xb, t))
    boundary_max = max(c[0] for c in cands)

    xn = math.cos(math.pi / n)
    band = np.nonzero(np.abs(xs) <= xn)[0]
    extrema: list[tuple[float, float, float]] = []
    interior_max, interior_arg = 0.0, None
    if band.size:
        sub = A[:, band]
        k = np.unravel_index(int(np.argmax(sub)), sub.shape)
        interior_max = float(sub[k])
        interior_arg = (float(xs[band[k[1]]]), float(ts[k[0]]))
        if not extrema and refine and n >= 3:
            x0, t0, v = _refine_point(n, *interior_arg, (-xn, xn))
            if abs(v) > interior_max:
                interior_max, interior_arg = abs(v), (x0, t0)
        if extrema and n >= 3 and band.size >= 3:
            peaks = _grid_maxima(sub)
            order = np.argsort(-sub[peaks[:, 0], peaks[:, 1]], kind="stable")
            for rank, (i, j) in enumerate(peaks[order]):
                x0, t0 = float(xs[band[j]]), float(ts[i])
                if refine and rank < max_refine:
                    x0, t0, v = _refine_point(n, x0, t0, (-xn, xn))
                else:
                    v = float(tau_dx(n, x0, t0))
                if all(abs(x0 - e[0]) > 1e-6 or abs(t0 - e[1]) > 1e-6 for e in extrema):
                    extrema.append((x0, t0, v))
            extrema.sort(key=lambda e: (-abs(e[2]), -e[0], -e[1]))
            if extrema and abs(extrema[0][2]) > interior_max:
                interior_max = abs(extrema[0][2])
                interior_arg = (extrema[0][0], extrema[0][1])
        cands.append((interior_max, *interior_arg))

    # grid argmax anywhere (covers t = +-1 edges)
    i, j = np.unravel_index(int(np.argmax(A)), A.shape)
    cands.append((float(A[i, j]), float(xs[j]), float(ts[i])))
    best = max(c[0] for c in cands)
    tied = [c for c in cands if c[0] >= best * (1.0 - 1e-12)]
    tied.sort(key=lambda c: (c[1] != 1.0, -c[1], -c[2]))
    top = tied[0]
    return TauScanResult(n, best, (top[1], top[2]), boundary_max, interior_max, interior_arg, extrema)


def scan_rows(n: int, grid_x: int, grid_t: int):
    """Rows ``(n, x, t, tau, tau_dx, tau_dxx, domain_tag)`` over a square grid."""
    xs = np.linspace(1.0, -1.0, grid_x)
    ts = np.linspace(1.0, -1.0, grid_t)
    T0, T1, T2 = (tau_table(n, xs, ts, o) for o in (0, 1, 2))
    for i, t in enumerate(ts):
        for j, x in enumerate(xs):
            tag = domain_classify(n, x, t).value if n >= 3 and x >= 0 else ""
            yield n, float(x), float(t), float(T0[i, j]), float(T1[i, j]), float(T2[i, j]), tag


CSV_HEADER = ("n", "x", "t", "tau", "tau_dx", "tau_dxx", "domain_tag")


def write_scan_csv(path, n: int, grid_x: int = 201, grid_t: int = 201) -> int:
    """Write the grid data to ``path``; returns the number of data rows."""
    count = 0
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for row in scan_rows(n, grid_x, grid_t):
            w.writerow([row[0]] + [repr(v) for v in row[1:6]] + [row[6]])
            count += 1
    return count


# --- psi identities ----------------------------------------------------------

@dataclass(frozen=True)
class PsiResiduals:
    psi1: float
    psi2: float

    @property
    def max(self) -> float:
        return max(self.psi1, self.psi2)


def psi_identity_check(omega: ChebPoly, t: float, npts: int = 2001) -> PsiResiduals:
    """Relative residuals of both psi identities at a root ``t`` of ``omega``.

    ``phi(x) = (1 - x t) omega(x) / (x - t)`` is a polynomial when
    ``omega(t) = 0``; psi_1 and psi_2 from their closed forms are compared
    with ``phi' + (x - t) phi'' / 2`` and
    ``phi' + (x - t)(1 - x^2) phi'' / (2 (1 - x t))``.
    """
    scale = float(np.max(np.abs(omega.coeffs)))
    r = C.chebroots(omega.coeffs)
    dist = float(np.min(np.abs(r - t))) if r.size else np.inf
    if dist > NODE_TOL and abs(float(evaluate(omega, t))) > NODE_TOL * scale:
        raise ValueError("t must be a node")
    q, _ = divide_linear(omega, t)
    lin = ChebPoly(np.array([1.0, -t]))
    phi = multiply(q, lin)
    d1, d2 = derivative(phi), derivative(phi, 2)
    w1, w2 = derivative(omega), derivative(omega, 2)

    xs = chebyshev_grid(npts)
    xs = xs[np.abs(1.0 - xs * t) >= PSI_EXCLUSION]
    om, o1, o2 = (evaluate(p, xs) for p in (omega, w1, w2))
    p1, p2, qv = evaluate(d1, xs), evaluate(d2, xs), evaluate(q, xs)
    one = 1.0 - xs * t

    psi1 = 0.5 * one * o2 - t * o1
    rhs1 = p1 + 0.5 * (xs - t) * p2
    # omega / (x - t) is the exact quotient q
    psi2 = 0.5 * (1.0 - xs**2) * o2 + ((xs - t) * o1 - xs * (1.0 - t * t) * qv) / one
    rhs2 = p1 + 0.5 * (xs - t) * (1.0 - xs**2) * p2 / one

    def rel(a, b):
        s = max(np.max(np.abs(a)), np.max(np.abs(b)), np.finfo(float).tiny)
        return float(np.max(np.abs(a - b)) / s)

    return PsiResiduals(rel(psi1, rhs1), rel(psi2, rhs2))


# --- F and G bounds ----------------------------------------------------------

def F_bound(n: int, x, gamma):
    x = np.asarray(x, dtype=float)
    gamma = np.asarray(gamma, dtype=float)
    d = n * n * (1.0 - x * x)
    return 0.5 * np.sqrt(1.0 + (x + 2.0 * gamma) ** 2 / d) + (1.0 - gamma**2) / gamma * 2.0 * x / d


def G_bound(gamma):
    # n-independent majorant of F(x_n, .) for n >= 4: 16 sin^2(pi/4) = 8
    gamma = np.asarray(gamma, dtype=float)
    return 0.5 * np.sqrt(1.0 + (1.0 + 2.0 * gamma) ** 2 / 8.0) + (1.0 - gamma**2) / gamma * 2.0 / 8.0


def fg_bound_check(n: int = 3, npts: int = 10001) -> CheckResult:
    """``F(cos(pi/n), gamma) <= 1`` and ``G(gamma) <= 1`` for ``gamma`` in [1/2, 1]."""
    if n < 3:
        raise ValueError("n must be >= 3")
    g = np.linspace(0.5, 1.0, npts)
    f = float(np.max(F_bound(n, math.cos(math.pi / n), g)))
    gg = float(np.max(G_bound(g)))
    margin = 1.0 - max(f, gg)
    return CheckResult(margin > 0, margin, f"max F(x_n,.) = {f!r}, max G = {gg!r}")


def chebyshev_ode_residual(n: int, gamma: float, xs) -> float:
    """Residual of ``(1-x^2) T'' + 2 gamma T' = (x + 2 gamma) T' - n^2 T``."""
    Tn = ChebPoly.basis(n)
    xs = np.asarray(xs, dtype=float)
    t0, t1, t2 = evaluate(Tn, xs), evaluate(derivative(Tn), xs), evaluate(derivative(Tn, 2), xs)
    lhs = (1.0 - xs**2) * t2 + 2.0 * gamma * t1
    rhs = (xs + 2.0 * gamma) * t1 - n * n * t0
    return float(np.max(np.abs(lhs - rhs)) / max(np.max(np.abs(lhs)), 1.0))


def g_envelope_check(n: int, gammas=None, npts: int = 2001) -> CheckResult:
    """Cauchy–Schwarz envelope ``2|g_gamma(x)| <= n^2 (1 + (x+2g)^2/(n^2(1-x^2)))^(1/2)``."""
    gammas = np.linspace(0.5, 1.0, 51) if gammas is None else np.asarray(gammas, dtype=float)
    xs = np.linspace(-1.0, 1.0, npts) * math.cos(math.pi / (2 * n))
    Tn = ChebPoly.basis(n)
    t0, t1 = evaluate(Tn, xs), evaluate(derivative(Tn), xs)
    worst = np.inf
    for g in gammas:
        two_g = np.abs((xs + 2 * g) * t1 - n * n * t0)
        env = n * n * np.sqrt(1.0 + (xs + 2 * g) ** 2 / (n * n * (1.0 - xs**2)))
        worst = min(worst, float(np.min((env - two_g) / env)))
    return CheckResult(worst >= -1e-12, worst, "relative envelope slack")


# --- second derivative -------------------------------------------------------

def tstar_inequality(n: int) -> float:
    """Left side of the sufficient inequality for ``tau''(1, cos(3 pi / 2n)) > 0``."""
    u = 1.0 / math.tan(3.0 * math.pi / (4.0 * n)) ** 2
    return n * n * (n * n - 1) / 3.0 - 2.0 * n * n * u + 2.0 / (1.0 + math.cos(3.0 * math.pi / (2.0 * n))) * u * u


def tau_second_deriv_check(n: int, npts: int = 2001, grid2: int = 201) -> CheckResult:
    """Positivity of ``tau''`` at ``x = 1`` and on the rectangle next to it.

    (i) ``tau''(1, t) >= 0`` for ``t`` in ``[-1, cos(3 pi/2n)]`` (closed form,
    cross-checked against the polynomial expansion); (ii) ``tau'' > 0`` on
    ``[cos(pi/n), 1] x [-1, cos(3 pi/2n)]``; (iii) the explicit inequality at
    ``t = cos(3 pi/2n)`` for ``n >= 7``.
    """
    if n < 3:
        raise ValueError("n must be >= 3")
    scale = n**4 / 3.0
    tmax = math.cos(3.0 * math.pi / (2.0 * n))
    ts = np.linspace(-1.0, tmax, npts)
    closed = tau1_closed_form(n, ts)
    poly = tau_table(n, np.array([1.0]), ts, 2)[:, 0]
    form_err = float(np.max(np.abs(closed - poly))) / scale
    m1 = float(np.min(closed)) / scale

    xs = np.linspace(math.cos(math.pi / n), 1.0, grid2)
    m2 = float(np.min(tau_table(n, xs, np.linspace(-1.0, tmax, grid2), 2))) / scale

    m3 = tstar_inequality(n) / scale if n >= 7 else math.inf
    margin = min(m1, m2, m3)
    ok = m1 >= 0 and m2 > 0 and m3 > 0 and form_err <= 1e-10
    return CheckResult(ok, margin, f"min tau''(1,t) = {m1:.3e}, rectangle min = {m2:.3e}, "
                                   f"(t*) = {m3:.3e}, closed-form error = {form_err:.1e} (units n^4/3)")


# --- interlacing ---------------------------------------------------------------

def _real_roots(c: np.ndarray) -> np.ndarray | None:
    r = C.chebroots(c)
    if np.max(np.abs(r.imag), initial=0.0) > 1e-7 * (1.0 + np.max(np.abs(r))):
        return None
    return np.sort(r.real)[::-1]


def interlacing_check(n: int, t: float) -> CheckResult:
    """Zeros of ``tau(., t)`` interlace with those of ``T_n - T_n(t)``."""
    Tn = ChebPoly.basis(n)
    Tt = float(evaluate(Tn, t))
    if abs(abs(Tt) - 1.0) < 1e-9:
        return CheckResult(True, 0.0, "skipped: T_n(t) = +-1 gives a double zero")
    om = (Tn - Tt).coeffs
    tp = tau_poly(n, t)
    s = _real_roots(tp.coeffs)
    r = _real_roots(om)
    if s is None or r is None:
        return CheckResult(False, -np.inf, "complex zeros found")
    if t == 0.0:
        # degree drops: the zero 1/t has moved to -infinity
        s = np.r_[s, -np.inf]
    if s.size != n or r.size != n:
        return CheckResult(False, -np.inf, f"zero counts {s.size}, {r.size}")
    sl = INTERLACE_SLACK
    margins = []
    for i in range(n):
        if t <= 0:
            lo, hi = s[i], (s[i - 1] if i > 0 else np.inf)
        else:
            lo, hi = (s[i + 1] if i + 1 < n else -np.inf), s[i]
        margins.append(min(r[i] - lo, hi - r[i]))
    margin = float(min(margins))
    ok = bool(margin >= -sl)
    details = []
    if t != 0.0:
        expect = np.sort(np.r_[np.delete(r, np.argmin(np.abs(r - t))), 1.0 / t])[::-1]
        rep = float(np.max(np.abs(expect - s) / (1.0 + np.abs(expect))))
        ok = ok and rep <= 1e-8
        details.append(f"replacement error {rep:.1e}")
        if t > 0:
            neg = tp.coeffs[-1] < 0
            ok = ok and bool(neg)
            details.append(f"leading coefficient {float(tp.coeffs[-1])!r}")
    return CheckResult(ok, margin, ", ".join(details))


# --- domain decomposition ----------------------------------------------------

class DomainTag(enum.Enum):
    D1 = "D1"
    D2_1 = "D2_1"
    D2_2 = "D2_2"
    D2_3 = "D2_3"


def gamma_of(x: float, t: float) -> float:
    d = 1.0 - x * t
    return 0.0 if d == 0.0 else (x - t) / d


def domain_classify(n: int, x: float, t: float) -> DomainTag:
    """Region of ``(x, t)``, ``x >= 0``; boundary points go to the lower-index region."""
    if x < 0:
        raise ValueError("use symmetry τ(x,t) = ±τ(−x,−t) first")
    if not (x <= 1.0 and -1.0 <= t <= 1.0):
        raise ValueError("(x, t) outside [0,1] x [-1,1]")
    if gamma_of(x, t) <= 0.5:
        return DomainTag.D1
    if t >= math.cos(3.0 * math.pi / (2.0 * n)):
        return DomainTag.D2_1
    if x <= math.cos(math.pi / n):
        return DomainTag.D2_2
    return DomainTag.D2_3


@dataclass
class PropDDReport:
    n: int
    critical_points: int
    worst_margin_a: float      # n^2 - max |tau'| over part-(a) critical points (relative)
    d23_roots: int
    max_abs_tau_dx: float
    by_region: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.worst_margin_a >= -SCAN_RTOL and self.d23_roots == 0


def verify_prop_DD(n: int, npts: int = 2001) -> PropDDReport:
    """Classify every critical point of ``tau'(., t)`` on a t-grid and test both parts."""
    if n < 3:
        raise ValueError("n must be >= 3")
    ts = np.linspace(-1.0, 1.0, npts)
    coef = tau_coefficients(n, ts)
    d1 = C.chebder(coef, 1, axis=1)
    d2 = C.chebder(coef, 2, axis=1)
    bound = float(n * n)

    def per_t(i):
        out = []
        r = C.chebroots(d2[i])
        r = r[np.abs(r.imag) <= 1e-9].real
        r = r[(r >= 0.0) & (r <= 1.0)]
        for x in r:
            v = abs(C.chebval(x, d1[i]))
            out.append((float(x), float(ts[i]), float(v)))
        return out

    pts = [p for chunk in ordered_map(per_t, range(npts)) for p in chunk]
    by_region = {tag.value: 0 for tag in DomainTag}
    worst = math.inf
    d23 = 0
    best = 0.0
    for x, t, v in pts:
        tag = domain_classify(n, x, t)
        by_region[tag.value] += 1
        best = max(best, v)
        if tag is DomainTag.D2_3:
            d23 += 1
        else:
            worst = min(worst, (bound - v) / bound)
    ends = np.abs(tau_table(n, np.array([1.0, -1.0]), ts))
    best = max(best, float(np.max(ends)))
    return PropDDReport(n, len(pts), worst, d23, best, by_region)
