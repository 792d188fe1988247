"""Approximating diffeomorphisms of [0, 1] and of the circle by Thompson elements."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable

import numpy as np

from .errors import DyadicError, IntervalError, NotDiffeoError
from .thompson import GroupElement, PLMap, element_to_pl, pl_to_element, simplify

TOL = 1e-12


def _over_ceil(x: Fraction) -> int:
    """Least integer strictly greater than x."""
    return math.floor(x) + 1


def dyadic_between(p, q) -> Fraction:
    """A dyadic rational strictly inside (p, q).

    With L = q - p, take the least k >= 0 with 2^k L > 1 (the integer just above
    -log2 L), then m = the integer just above 2^k p.
    """
    p, q = Fraction(p), Fraction(q)
    if not q > p:
        raise IntervalError(f"empty interval ({p}, {q})")
    length = q - p
    k = 0
    while (2 ** k) * length <= 1:
        k += 1
    m = _over_ceil(p * 2 ** k)
    return Fraction(m, 2 ** k)


def _as_dyadic(x) -> Fraction:
    x = Fraction(x)
    den = x.denominator
    if den & (den - 1):
        raise DyadicError(f"{x} is not dyadic")
    return x


def _mk(x: Fraction):
    return x.numerator, x.denominator.bit_length() - 1


def interpolation_cuts(m_a: int, k_a: int, m_b: int):
    """Breakpoints of the refined short side, as offsets in [0, m_a / 2^k_a].

    The side starts with m_a pieces of length 2^-k_a; pieces are halved from
    left to right, level by level, until there are m_b of them.
    """
    d = m_b - m_a
    cuts = {Fraction(m, 2 ** k_a) for m in range(m_a + 1)}
    if d > 0:
        l, c_prev = 1, 0
        while m_a * (2 ** l - 1) < d:
            l += 1
        for n in range(1, l + 1):
            c_prev = m_a * (2 ** (n - 1) - 1)
            top = 2 ** (n - 1) * m_a if n < l else d - c_prev
            for i in range(1, top + 1):
                cuts.add(Fraction(2 * i - 1, 2 ** (k_a + n)))
    return sorted(cuts)


def _interpolate(p, q, explicit=None):
    p1, p2 = (_as_dyadic(v) for v in p)
    q1, q2 = (_as_dyadic(v) for v in q)
    if not (p1 < q1 and p2 < q2):
        raise IntervalError("interpolation needs p < q in both coordinates")
    if explicit is None:
        (m1, k1), (m2, k2) = _mk(q1 - p1), _mk(q2 - p2)
    else:
        (m1, k1), (m2, k2) = explicit
        if Fraction(m1, 2 ** k1) != q1 - p1 or Fraction(m2, 2 ** k2) != q2 - p2:
            raise DyadicError("explicit (m, k) do not match the rectangle")
    if m1 <= m2:
        xs = [p1 + c for c in interpolation_cuts(m1, k1, m2)]
        ys = [p2 + Fraction(j, 2 ** k2) for j in range(m2 + 1)]
    else:
        ys = [p2 + c for c in interpolation_cuts(m2, k2, m1)]
        xs = [p1 + Fraction(j, 2 ** k1) for j in range(m1 + 1)]
    return list(zip(xs, ys))


def dyadic_interpolation(p, q, explicit=None) -> PLMap:
    """Piecewise-linear bijection from the point p to the point q.

    ``explicit`` may give the (m, k) representations of the two side lengths;
    by default the reduced ones are used.  The result is returned as a PLMap
    whose points live in the rectangle spanned by p and q.
    """
    return PLMap(tuple(_interpolate(p, q, explicit)))


def _estimate_bound(f, grid=2 ** 14):
    x = np.linspace(0.0, 1.0, grid + 1)
    y = np.array([f(v) for v in x], dtype=float)
    if np.any(np.diff(y) <= 0):
        raise NotDiffeoError("samples are not strictly increasing")
    h = x[1] - x[0]
    slopes = np.empty_like(y)
    slopes[1:-1] = (y[2:] - y[:-2]) / (2 * h)
    slopes[0] = (y[1] - y[0]) / h
    slopes[-1] = (y[-1] - y[-2]) / h
    return 1.1 * float(slopes.max())


def approximate(f: Callable[[float], float], S: float | None = None, eps: float = 0.1,
                mode: str = "interval") -> GroupElement:
    """Element of F (interval) or T (circle) within ``eps`` of f in sup norm.

    In circle mode f is the lift: increasing on [0, 1] with f(1) = f(0) + 1.
    """
    if not 0 < eps < 1:
        raise IntervalError("eps must lie in (0, 1)")
    if mode not in ("interval", "circle"):
        raise ValueError(f"unknown mode {mode!r}")
    if S is None:
        S = _estimate_bound(f)
    S = max(float(S), 1.0)
    delta_exp = max(1, math.ceil(-math.log2(eps / (3 * S))))
    n = 2 ** delta_exp
    xi = [Fraction(i, n) for i in range(n + 1)]
    fx = [float(f(float(x))) for x in xi]
    if mode == "circle":
        shift = math.floor(fx[0])
        fx = [v - shift for v in fx]
        if abs(fx[-1] - fx[0] - 1) > 1e-9:
            raise NotDiffeoError("circle lift must satisfy f(1) = f(0) + 1")
    elif abs(fx[0]) > 1e-9 or abs(fx[-1] - 1) > 1e-9:
        raise NotDiffeoError("interval maps must fix 0 and 1")
    if any(b <= a for a, b in zip(fx, fx[1:])):
        raise NotDiffeoError("samples are not strictly increasing")

    if mode == "interval":
        delta = min(eps / 2, (fx[n] - fx[n - 1]) / 2)
    else:
        delta = min(eps / 2, (fx[1] - fx[0]) / 2)
    eta = [Fraction(0)] * (n + 1)
    for i in range(1, n):
        lo = max(fx[i - 1] + delta, fx[i])
        eta[i] = dyadic_between(Fraction(lo), Fraction(fx[i] + delta))
    if mode == "interval":
        eta[n] = Fraction(1)
    else:
        eta[0] = dyadic_between(Fraction(fx[0] + delta), Fraction(fx[1]))
        eta[n] = eta[0] + 1
    pts = []
    for i in range(n):
        seg = _interpolate((xi[i], eta[i]), (xi[i + 1], eta[i + 1]))
        pts.extend(seg if i == 0 else seg[1:])
    base = math.floor(pts[0][1])
    pts = tuple((x, y - base) for x, y in pts)
    g = simplify(PLMap(pts, circle=pts[0][1] != 0))
    return pl_to_element(g)


def sup_error(f, g: GroupElement, samples: int = 10 ** 4, mode: str = "interval") -> float:
    """Max |f(x) - g(x)| over a uniform grid, distances taken mod 1 on the circle."""
    pl = element_to_pl(g)
    xs = np.linspace(0.0, 1.0, samples)
    diff = np.array([f(float(x)) for x in xs]) - pl.evalf(xs)
    if mode == "circle" or pl.circle:
        diff = (diff + 0.5) % 1.0 - 0.5
    return float(np.abs(diff).max())


def derivative_distance(fprime: Callable[[float], float], g: GroupElement,
                        samples: int = 2 ** 14) -> float:
    """Sup of |f'(x) - g'(x)| over a grid that avoids the breakpoints of g."""
    pl = element_to_pl(g)
    xs = np.array([float(p[0]) for p in pl.points])
    slopes = np.array([float(s) for s in pl.slopes()])
    # offsets by 1/3 of a cell never hit a dyadic breakpoint
    grid = (np.arange(samples) + 1.0 / 3.0) / samples
    seg = np.searchsorted(xs, grid, side="right") - 1
    fp = np.array([fprime(float(x)) for x in grid])
    return float(np.abs(fp - slopes[seg]).max())


def builtin(name: str):
    """Named test diffeomorphisms: returns (f, f', S, mode)."""
    if name == "identity":
        return (lambda x: x), (lambda x: 1.0), 1.0, "interval"
    if name == "quadratic":
        return (lambda x: (x + x * x) / 2), (lambda x: 0.5 + x), 1.5, "interval"
    if name.startswith("rotation:"):
        r = float(Fraction(name.split(":", 1)[1]))
        return (lambda x: x + r), (lambda x: 1.0), 1.0, "circle"
    raise ValueError(f"unknown builtin {name!r}")


def from_table(path: str, mode: str = "interval"):
    """Monotone (piecewise-linear) interpolation of a CSV of x, f(x) pairs."""
    data = np.loadtxt(path, delimiter=",", ndmin=2)
    x, y = data[:, 0], data[:, 1]
    if np.any(np.diff(x) <= 0) or np.any(np.diff(y) <= 0):
        raise NotDiffeoError("table must be strictly increasing in both columns")
    return lambda t: float(np.interp(t, x, y))
