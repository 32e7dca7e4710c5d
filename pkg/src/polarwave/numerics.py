"""Numerical kernels: finite differences, cubic roots, RK4, damped fixed point, bisection."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .errors import DegenerateLeadingCoefficient, NoConvergence, NonFinite

_EPS = float(np.finfo(float).eps)


def second_derivative(f: Callable[[float], float], x0: float, h: float) -> float:
    """Central second difference with one Richardson step (steps ``2h`` and ``h``).

    Evaluates ``f`` on ``[x0 - 2h, x0 + 2h]``; truncation error is O(h^4).
    """
    if not h > 0:
        raise ValueError("h must be > 0")
    fm2, fm1, f0, fp1, fp2 = (float(f(x0 + j * h)) for j in (-2, -1, 0, 1, 2))
    if not all(math.isfinite(v) for v in (fm2, fm1, f0, fp1, fp2)):
        raise NonFinite(f"non-finite function value near x0={x0!r}", where=x0)
    d_h = (fp1 - 2.0 * f0 + fm1) / (h * h)
    d_2h = (fp2 - 2.0 * f0 + fm2) / (4.0 * h * h)
    return (4.0 * d_h - d_2h) / 3.0


class RootKind(enum.Enum):
    THREE_REAL = "ThreeReal"
    ONE_REAL = "OneReal"


@dataclass(frozen=True)
class CubicRoots:
    roots: tuple[float, ...]
    discriminant_sign: RootKind

    def __len__(self) -> int:
        return len(self.roots)


Coeffs = tuple[float, float, float, float]


def _eval(c: Coeffs, x: float) -> float:
    return ((c[0] * x + c[1]) * x + c[2]) * x + c[3]


def _slope(c: Coeffs, x: float) -> float:
    return (3.0 * c[0] * x + 2.0 * c[1]) * x + c[2]


def _exact_value(c: Coeffs, x: float) -> Fraction:
    """``p(x)`` without rounding: float inputs are exact binary rationals."""
    fx = Fraction(x)
    return ((Fraction(c[0]) * fx + Fraction(c[1])) * fx + Fraction(c[2])) * fx + Fraction(c[3])


def _critical_points(c: Coeffs, s: float, b: float, cc: float) -> list[float]:
    """Real zeros of ``p'`` (ascending), from the scaled monic form ``y^3 + b y^2 + cc y + ...``."""
    disc = b * b - 3.0 * cc
    if disc <= 0.0:
        return []
    q = -(b + math.copysign(math.sqrt(disc), b))
    ys = sorted((q / 3.0, cc / q))
    out = []
    for y in ys:
        m = s * y
        for _ in range(3):
            curv = 6.0 * c[0] * m + 2.0 * c[1]
            if curv == 0.0:
                break
            step = _slope(c, m) / curv
            m -= step
            if abs(step) <= 1e-16 * abs(m):
                break
        out.append(m)
    return out


def _flat_band(c: Coeffs, m: float) -> float:
    """Largest ``|p(m)|`` explained by rounding ``m`` away from the true stationary point."""
    curv = abs(6.0 * c[0] * m + 2.0 * c[1])
    if curv == 0.0:
        return math.inf
    terms = abs(3.0 * c[0] * m * m) + abs(2.0 * c[1] * m) + abs(c[2])
    dm = 8.0 * _EPS * max(terms / curv, abs(m))
    return 0.5 * curv * dm * dm


def _bracketed_root(c: Coeffs, lo: float, hi: float, sign_lo: int, seeds: Sequence[float]) -> float:
    """Safeguarded Newton on ``[lo, hi]`` where ``p`` changes sign; ``sign_lo`` is ``sign p(lo)``."""
    inside = [x for x in seeds if lo < x < hi and math.isfinite(x)]
    x = min(inside, key=lambda v: abs(_eval(c, v))) if inside else 0.5 * (lo + hi)
    for _ in range(1200):
        fx = _eval(c, x)
        if fx == 0.0:
            return x
        if (fx > 0) == (sign_lo > 0):
            lo = x
        else:
            hi = x
        d = _slope(c, x)
        nx = x - fx / d if d != 0.0 else math.nan
        if not lo < nx < hi:
            nx = 0.5 * (lo + hi)
        if abs(nx - x) <= 1e-16 * abs(nx) or nx in (lo, hi):
            return nx
        x = nx
    return x


def _quadratic_seeds(c: Coeffs, m: float, value: float) -> list[float]:
    """Local ``p(m) + p''(m) (x - m)^2 / 2`` zeros next to a stationary point."""
    curv = 6.0 * c[0] * m + 2.0 * c[1]
    if curv == 0.0 or value * curv >= 0.0:
        return []
    w = math.sqrt(-2.0 * value / curv)
    return [m - w, m + w]


def cubic_real_roots(c3: float, c2: float, c1: float, c0: float) -> CubicRoots:
    """All real roots of ``c3 x^3 + c2 x^2 + c1 x + c0``, ascending and deduplicated.

    The critical points of the cubic split the line into monotone brackets. The sign of the
    cubic at each critical point is evaluated exactly, which fixes how many real roots there
    are even when two of them nearly coincide. Each root is then refined in its bracket from
    the closed-form (Cardano / trigonometric) seed.
    """
    scale = max(abs(c3), abs(c2), abs(c1), abs(c0))
    if scale == 0.0 or abs(c3) < 1e-30 * scale:
        raise DegenerateLeadingCoefficient("leading coefficient is numerically zero")
    b, c, d = c2 / c3, c1 / c3, c0 / c3
    # rescale x = s y so the monic coefficients are O(1); keeps the discriminant in range
    s = max(abs(b), math.sqrt(abs(c)), abs(d) ** (1.0 / 3.0))
    if s == 0.0:
        return CubicRoots((0.0,), RootKind.THREE_REAL)
    b, c, d = b / s, c / s / s, d / s / s / s
    coeffs: Coeffs = (c3, c2, c1, c0)
    seeds = [s * y for y in _closed_form_seeds(b, c, d)]

    sigma = 1 if c3 > 0 else -1
    bound = 2.000001 * s  # every root satisfies |x| <= 2 s
    crit = _critical_points(coeffs, s, b, c)
    if len(crit) < 2:
        root = _bracketed_root(coeffs, -bound, bound, -sigma, seeds)
        return CubicRoots((root,), RootKind.ONE_REAL)

    m1, m2 = crit
    exact = [_exact_value(coeffs, m) for m in crit]
    flat = [abs(e) <= _flat_band(coeffs, m) for e, m in zip(exact, crit)]
    v1, v2 = (sigma * (e > 0) - sigma * (e < 0) for e in exact)
    near = seeds + [x for m, e in zip(crit, exact) for x in _quadratic_seeds(coeffs, m, float(e))]

    roots: list[float] = []
    if flat[0] and flat[1]:
        roots = [0.5 * (m1 + m2)]
        kind = RootKind.THREE_REAL
    elif flat[0]:
        roots = [m1, _bracketed_root(coeffs, m2, bound, -sigma, near)]
        kind = RootKind.THREE_REAL
    elif flat[1]:
        roots = [_bracketed_root(coeffs, -bound, m1, -sigma, near), m2]
        kind = RootKind.THREE_REAL
    elif v1 > 0 and v2 < 0:
        roots = [
            _bracketed_root(coeffs, -bound, m1, -sigma, near),
            _bracketed_root(coeffs, m1, m2, sigma, near),
            _bracketed_root(coeffs, m2, bound, -sigma, near),
        ]
        kind = RootKind.THREE_REAL
    elif v1 < 0:
        roots = [_bracketed_root(coeffs, m2, bound, -sigma, near)]
        kind = RootKind.ONE_REAL
    else:
        roots = [_bracketed_root(coeffs, -bound, m1, -sigma, near)]
        kind = RootKind.ONE_REAL
    out: list[float] = []
    for r in sorted(roots):
        if out and abs(r - out[-1]) <= 1e-9 * max(abs(r), abs(out[-1])):
            continue
        out.append(r)
    return CubicRoots(tuple(out), kind)


def _closed_form_seeds(b: float, c: float, d: float) -> list[float]:
    """Cardano / trigonometric roots of the monic ``y^3 + b y^2 + c y + d`` (used as seeds)."""
    shift = b / 3.0
    p = c - b * b / 3.0
    q = 2.0 * b**3 / 27.0 - b * c / 3.0 + d
    disc = (q / 2.0) ** 2 + (p / 3.0) ** 3
    if disc < 0.0:
        m = 2.0 * math.sqrt(-p / 3.0)
        arg = 3.0 * q / (p * m)
        theta = math.acos(max(-1.0, min(1.0, arg))) / 3.0
        return [m * math.cos(theta - 2.0 * math.pi * j / 3.0) - shift for j in range(3)]
    if disc == 0.0 and p != 0.0:
        return [3.0 * q / p - shift, -1.5 * q / p - shift]
    sq = math.sqrt(disc)
    u = math.copysign(abs(-q / 2.0 - sq) ** (1.0 / 3.0), -q / 2.0 - sq)
    if u == 0.0:
        return [math.copysign(abs(q) ** (1.0 / 3.0), -q) - shift]
    return [u - p / (3.0 * u) - shift]


@dataclass(frozen=True)
class OdeState:
    t: float
    y: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "y", np.asarray(self.y, dtype=complex))
        if not np.all(np.isfinite(self.y)):
            raise NonFinite("state contains non-finite entries", where=self.t)


def rk4_step(rhs: Callable[[float, np.ndarray], np.ndarray], t: float, y: np.ndarray, dt: float) -> np.ndarray:
    k1 = rhs(t, y)
    k2 = rhs(t + 0.5 * dt, y + 0.5 * dt * k1)
    k3 = rhs(t + 0.5 * dt, y + 0.5 * dt * k2)
    k4 = rhs(t + dt, y + dt * k3)
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def rk4_evolve(
    rhs: Callable[[float, np.ndarray], np.ndarray],
    y0: OdeState,
    t_end: float,
    dt: float,
) -> OdeState:
    """Classical fixed-step RK4 from ``y0.t`` to ``t_end``; the last step is shortened to land exactly."""
    if not dt > 0:
        raise ValueError("dt must be > 0")
    t = float(y0.t)
    y = np.array(y0.y, dtype=complex)
    n_full = int(math.floor((t_end - t) / dt + 1e-12)) if t_end > t else 0
    for i in range(n_full):
        y = rk4_step(rhs, t, y, dt)
        t = y0.t + (i + 1) * dt
        if not np.all(np.isfinite(y)):
            raise NonFinite(f"integration blew up at t={t!r}", where=t)
    rest = t_end - t
    if rest > 1e-12 * max(1.0, abs(t_end)):
        y = rk4_step(rhs, t, y, rest)
        if not np.all(np.isfinite(y)):
            raise NonFinite(f"integration blew up at t={t_end!r}", where=t_end)
    return OdeState(max(t_end, t), y)


def damped_fixed_point(
    func: Callable[[np.ndarray], np.ndarray],
    y0: Sequence[float] | np.ndarray | float,
    damping: float = 0.5,
    max_iter: int = 10_000,
    tol: float = 1e-13,
) -> np.ndarray:
    """Iterate ``y <- (1 - d) y + d func(y)`` until ``|func(y) - y| <= tol max(|y|, |func(y)|)``.

    The test is relative so that fixed points of any magnitude are resolved. Iteration also stops
    once an update no longer changes ``y`` in floating point.
    """
    if not tol > 0:
        raise ValueError("tol must be > 0")
    if not 0 < damping <= 1:
        raise ValueError("damping must lie in (0, 1]")
    y = np.atleast_1d(np.asarray(y0, dtype=float)).copy()
    residual = float("inf")
    for _ in range(max_iter + 1):
        gy = np.atleast_1d(np.asarray(func(y), dtype=float))
        if not np.all(np.isfinite(gy)):
            raise NoConvergence("fixed-point map returned non-finite values", residual)
        # max-norm: squaring in the 2-norm would underflow for tiny states
        residual = float(np.max(np.abs(gy - y)))
        if residual <= tol * max(float(np.max(np.abs(y))), float(np.max(np.abs(gy)))):
            return y
        y_next = (1.0 - damping) * y + damping * gy
        if np.array_equal(y_next, y):
            # no representable progress, e.g. stuck in the subnormal range
            return y
        y = y_next
    raise NoConvergence(f"no fixed point after {max_iter} iterations", residual)


def bisect_root(
    func: Callable[[float], float],
    lo: float,
    hi: float,
    rtol: float = 1e-14,
    max_iter: int = 400,
) -> float:
    """Root of ``func`` on a sign-changing bracket ``[lo, hi]``."""
    f_lo, f_hi = func(lo), func(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if (f_lo > 0) == (f_hi > 0):
        raise ValueError("bracket does not change sign")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if abs(hi - lo) <= rtol * max(abs(mid), 1e-300) or mid in (lo, hi):
            return mid
        f_mid = func(mid)
        if f_mid == 0.0:
            return mid
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
