"""Correlation functions of the discretized fields built from an ascending system.

The field of type a at x, resolved on a dyadic partition, is lam_a^{-n} mu_a
placed on the interval of depth n that contains x.  This normalization makes
values independent of the partition.

Two pictures are used.
* The limit: expectation values in the vacuum of the semicontinuous limit
  (or in a transformed state U(g) vacuum), see :func:`npoint`.
* Finite regular trees: the level-m tree with V at every caret and its root
  leg traced out, see :func:`brute_force_npoint`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.integrate import simpson

from .errors import (DyadicError, ResourceError, SingularEigenvalueError,
                     SupportError)
from .forest import CARET, LEAF, DyadicPartition, Tree, as_tree, join, partition_tree, tree_partition
from .semicont import LimitState, act, embed, max_leaves, phi_tree, vacuum
from .tensorlab import AscendingSystem, Isometry3, fuse, fusion_coefficients
from .thompson import GroupElement, element_to_pl, inverse

ZERO_TOL = 1e-12
SIMPSON_PIECES = 64
MAX_SMEARED_INTERVALS = 8


# ---------------------------------------------------------------- points

@dataclass(frozen=True)
class DyadicPoint:
    value: Fraction

    def __post_init__(self):
        v = Fraction(self.value)
        if not 0 <= v < 1:
            raise DyadicError(f"{v} is not in [0, 1)")
        object.__setattr__(self, "value", v)

    @classmethod
    def from_binary(cls, text: str) -> "DyadicPoint":
        """Parse an expansion such as ``0.01101``."""
        head, _, tail = text.strip().partition(".")
        if head not in ("", "0") or set(tail) - {"0", "1"}:
            raise DyadicError(f"bad binary expansion {text!r}")
        return cls(Fraction(int(tail or "0", 2), 2 ** len(tail)))

    def digits(self, level: int) -> str:
        n = self.value * 2 ** level
        if n.denominator != 1:
            raise DyadicError(f"{self.value} needs more than {level} binary digits")
        return format(int(n), f"0{level}b") if level else ""

    def truncate(self, k: int, level: int) -> "DyadicPoint":
        """x^(k): drop the last k of ``level`` digits."""
        n = int(self.value * 2 ** level)
        return DyadicPoint(Fraction(n >> k, 2 ** (level - k)))

    def __str__(self):
        return str(self.value)


def as_point(x) -> Fraction:
    if isinstance(x, DyadicPoint):
        return x.value
    if isinstance(x, str):
        x = x.strip()
        if x.endswith("b"):
            return DyadicPoint.from_binary(x[:-1]).value
    return Fraction(x)


def xor_and_tree_metric(x, y, level: int) -> dict:
    """Bitwise difference y (-) x and the regular-tree leaf distance at ``level``."""
    px, py = DyadicPoint(as_point(x)), DyadicPoint(as_point(y))
    a, b = int(px.value * 2 ** level), int(py.value * 2 ** level)
    px.digits(level), py.digits(level)
    xor = Fraction(a ^ b, 2 ** level)

    recursive = 0
    while a != b:
        a, b = a >> 1, b >> 1
        recursive += 1
    closed = 0 if xor == 0 else level + 1 + _floor_log2(xor)
    return {"xor": xor, "d_T": recursive, "d_T_closed": closed}


def _floor_log2(q: Fraction) -> int:
    # exact floor(log2 q) for positive rationals
    k = q.numerator.bit_length() - q.denominator.bit_length()
    if Fraction(2) ** k > q:
        k -= 1
    return k


def common_digits(x, y) -> int:
    """Number of leading binary digits that x and y in [0, 1) share."""
    x, y = as_point(x), as_point(y)
    if x == y:
        raise SupportError("points coincide")
    k = 1
    while math.floor(x * 2 ** k) == math.floor(y * 2 ** k):
        k += 1
    return k - 1


# ---------------------------------------------------------------- partitions

def _support_tree(pts, lo: Fraction, length: Fraction) -> Tree:
    if len(pts) <= 1:
        return LEAF
    mid = lo + length / 2
    left = [p for p in pts if p < mid]
    right = [p for p in pts if p >= mid]
    return Tree(_support_tree(left, lo, length / 2), _support_tree(right, mid, length / 2))


def _checked_points(points):
    pts = [as_point(p) for p in points]
    if any(not 0 <= p < 1 for p in pts):
        raise SupportError("points must lie in [0, 1)")
    if len(set(pts)) != len(pts):
        raise SupportError("points must be distinct")
    return pts


def support_tree(points) -> Tree:
    """Tree of the minimal supporting partition.

    Equivalently: take a deep regular tree and delete every node below which
    at most one point sits.
    """
    return _support_tree(sorted(_checked_points(points)), Fraction(0), Fraction(1))


def minimal_supporting_partition(points) -> DyadicPartition:
    return tree_partition(support_tree(points))


def supports(partition, points) -> bool:
    """True when every interval of the partition holds at most one point."""
    p = partition if isinstance(partition, DyadicPartition) else tree_partition(partition)
    pts = sorted(_checked_points(points))
    for a, b in p.intervals:
        if sum(1 for x in pts if a <= x < b) > 1:
            return False
    return True


def locate(tree: Tree, x: Fraction):
    """Index and depth of the leaf of ``tree`` whose interval contains x."""
    idx, depth, lo, length, t = 0, 0, Fraction(0), Fraction(1), tree
    while not t.is_leaf:
        length /= 2
        depth += 1
        if x < lo + length:
            t = t.left
        else:
            idx += t.left.leaves
            lo += length
            t = t.right
    return idx, depth


# ---------------------------------------------------------------- field data

def _lam(sys: AscendingSystem, a: int) -> complex:
    lam = complex(sys.eigenvalues[a])
    if abs(lam) < ZERO_TOL:
        raise SingularEigenvalueError(f"eigenvalue of {_label(sys, a)} vanishes")
    return lam


def _label(sys: AscendingSystem, a: int) -> str:
    return sys.labels[a] if sys.labels else str(a)


def field_at_depth(sys: AscendingSystem, a: int, depth: int) -> np.ndarray:
    return _lam(sys, a) ** (-depth) * sys.mu[a]


def _prepare(points, alphas, sys):
    if len(points) != len(alphas):
        raise ValueError("need one field label per point")
    pts = _checked_points(points)
    idx = [sys.index(a) for a in alphas]
    order = sorted(range(len(pts)), key=lambda i: pts[i])
    return [pts[i] for i in order], [idx[i] for i in order]


def _ascend_tree(tree: Tree, V: Isometry3, ops: dict, start: int = 0):
    """Operator on the root leg after coarse-graining the leaf operators."""
    if tree.is_leaf:
        return ops.get(start)
    left = _ascend_tree(tree.left, V, ops, start)
    right = _ascend_tree(tree.right, V, ops, start + tree.left.leaves)
    if left is None and right is None:
        return None
    eye = np.eye(V.d)
    return fuse(V, eye if left is None else left, eye if right is None else right)


def _vacuum_value(tree: Tree, V: Isometry3, ops: dict) -> complex:
    # the vacuum restricted to the two halves of the circle is the cup
    # sum_l |l>|l> / sqrt(d), the right half being the input leg of V
    eye = np.eye(V.d)
    a = _ascend_tree(tree.left, V, ops, 0)
    b = _ascend_tree(tree.right, V, ops, tree.left.leaves)
    a = eye if a is None else a
    b = eye if b is None else b
    return complex(np.sum(a * b) / V.d)


def npoint(points, alphas, sys: AscendingSystem, V: Isometry3, state=None) -> complex:
    return npoint_details(points, alphas, sys, V, state)["value"]


def npoint_details(points, alphas, sys: AscendingSystem, V: Isometry3, state=None) -> dict:
    """Limit n-point function of fields at distinct points of [0, 1).

    ``state`` may be None (the vacuum), a GroupElement g (the state U(g) vacuum)
    or a LimitState.  The vacuum is handled by coarse-graining the insertions
    up the minimal supporting tree; other states are evaluated on their
    amplitude tensor at the join of their context with that tree.
    """
    pts, idx = _prepare(points, alphas, sys)
    base = join(support_tree(pts), CARET)[0]
    if state is None:
        ops = {}
        for x, a in zip(pts, idx):
            i, depth = locate(base, x)
            ops[i] = field_at_depth(sys, a, depth)
        value = _vacuum_value(base, V, ops)
        return {"value": value, "partition": tree_partition(base), "formula_path": "vacuum-ascent"}
    if isinstance(state, GroupElement):
        state = act(state, vacuum(V), V)
    if not isinstance(state, LimitState):
        raise TypeError("state must be a GroupElement or LimitState")
    return _state_value(pts, idx, sys, V, state, base)


def _state_value(pts, idx, sys, V, state: LimitState, base: Tree) -> dict:
    q = join(base, state.tree)[0]
    if q.leaves > max_leaves():
        raise ResourceError(f"evaluation needs {q.leaves} leaves (cap {max_leaves()})")
    s = embed(state, q, V)
    amps = s.amps
    out = amps
    for x, a in zip(pts, idx):
        i, depth = locate(q, x)
        op = field_at_depth(sys, a, depth)
        out = np.moveaxis(np.tensordot(op, out, axes=([1], [i])), 0, i)
    value = complex(np.vdot(amps, out))
    return {"value": value, "partition": tree_partition(q), "formula_path": "state-vector"}


# ---------------------------------------------------------------- closed forms

def _trace_weights(sys: AscendingSystem):
    return [complex(np.trace(m)) / sys.d for m in sys.mu]


def one_point_closed_form(alpha, sys: AscendingSystem, m: int | None = None) -> complex:
    """<mu_a> at a leaf of the level-m regular tree, or the limit field value.

    Level m: lam^m tr(mu) / d.  Limit (m None): lam^-1 tr(mu) / d, the field
    sitting on a half of the circle, where the vacuum is maximally mixed.
    """
    a = sys.index(alpha)
    tr = complex(np.trace(sys.mu[a])) / sys.d
    lam = complex(sys.eigenvalues[a])
    if m is not None:
        return lam ** m * tr
    if abs(tr) < ZERO_TOL:
        return 0j
    return tr / _lam(sys, a)


def _fusion(sys, V):
    return sys.fusion if sys.fusion is not None else fusion_coefficients(sys, V)


def two_point_closed_form(x, y, alpha, beta, sys: AscendingSystem, V: Isometry3,
                          m: int | None = None) -> dict:
    """Closed-form two-point function with alpha at x and beta at y.

    With m given, x and y are leaves of the level-m regular tree and
    K = floor(log2(y (-) x)); the value is
    (lam_a lam_b)^(m+K) sum_g f^{ab}_g lam_g^(-K-1) tr(mu_g) / d.

    Without m this is the limit in the vacuum.  If x and y share l >= 1
    leading digits, D = 2^-(l+1) and the value is
    sum_g lam_g^-1 D^(log2 lam_a + log2 lam_b - log2 lam_g) f^{ab}_g <mu_g>,
    with <mu_g> the one-point value; only integer powers of eigenvalues occur.
    Points on opposite halves meet at the top of the circle, where the vacuum
    is a cup rather than a V, and the value is (lam_a lam_b)^-1 tr(mu_a^T mu_b) / d.
    """
    x, y = as_point(x), as_point(y)
    a, b = sys.index(alpha), sys.index(beta)
    if x == y:
        raise SupportError("points coincide")
    if x > y:
        x, y, a, b = y, x, b, a
    lam = [complex(v) for v in sys.eigenvalues]
    f = _fusion(sys, V)
    tw = _trace_weights(sys)

    if m is not None:
        k = _floor_log2(xor_and_tree_metric(x, y, m)["xor"])
        value = sum(f[a, b, g] * lam[g] ** (-k - 1) * tw[g]
                    for g in range(sys.size) if abs(tw[g]) > ZERO_TOL)
        value *= (lam[a] * lam[b]) ** (m + k)
        return {"value": complex(value), "d_T": m + 1 + k, "formula_path": "regular-tree"}

    la, lb = _lam(sys, a), _lam(sys, b)
    l = common_digits(x, y)
    if l == 0:
        value = np.sum(sys.mu[a] * sys.mu[b]) / sys.d / (la * lb)
        return {"value": complex(value), "D": Fraction(1, 2), "formula_path": "cross-half"}
    value = 0j
    for g in range(sys.size):
        if abs(f[a, b, g]) < ZERO_TOL or abs(tw[g]) < ZERO_TOL:
            continue
        lg = _lam(sys, g)
        # D^(log2 lam) = lam^-(l+1); <mu_g> = tr(mu_g) / (d lam_g)
        value += lg ** -1 * (la * lb / lg) ** (-(l + 1)) * f[a, b, g] * tw[g] / lg
    return {"value": complex(value), "D": Fraction(1, 2 ** (l + 1)),
            "formula_path": "coarse-graining"}


# ---------------------------------------------------------------- OPE

def ope_table(sys: AscendingSystem, V: Isometry3, tol: float = 1e-9) -> dict:
    """Operator product data.

    Each row carries two numbers: ``coefficient`` is the overlap
    tr(mu_g^dagger F(mu_a, mu_b)) / d and ``expansion`` the coefficient of mu_g
    when F(mu_a, mu_b) is expanded in the mu basis.  They agree for an
    orthonormal basis.  Fusion rules and the matrices N^a use the expansion.
    """
    dual = _fusion(sys, V)
    proj = fusion_coefficients(sys, V, convention="projection")
    h = sys.scaling_dimensions
    n = sys.size
    rows = []
    for a in range(n):
        for b in range(n):
            for g in range(n):
                if abs(dual[a, b, g]) <= tol and abs(proj[a, b, g]) <= tol:
                    continue
                rows.append({"alpha": _label(sys, a), "beta": _label(sys, b),
                             "gamma": _label(sys, g), "coefficient": complex(proj[a, b, g]),
                             "expansion": complex(dual[a, b, g]),
                             "exponent": float(h[g] - h[a] - h[b])})
    nmat = (np.abs(dual) > tol).astype(int)
    return {"rows": rows, "N": [nmat[a] for a in range(n)], "labels": list(sys.labels)}


def ope_row(table: dict, alpha, beta) -> list:
    return [r for r in table["rows"] if r["alpha"] == alpha and r["beta"] == beta]


# ---------------------------------------------------------------- smeared fields

def smeared_field(partition, f, sys: AscendingSystem) -> np.ndarray:
    """Dense matrix of sum_a sum_I fbar_a(I) lam_a^log2|I| mu_a on the legs of P.

    fbar_a(I) = (1/d) int_I tr(nu_a^dagger f(x)) dx by composite Simpson with
    64 pieces per interval; f maps a float to a d x d matrix.
    """
    p = partition if isinstance(partition, DyadicPartition) else tree_partition(as_tree(partition))
    n, d = len(p), sys.d
    if n > MAX_SMEARED_INTERVALS:
        raise ResourceError(f"{n} intervals exceed the dense limit {MAX_SMEARED_INTERVALS}")
    out = np.zeros((d ** n, d ** n), dtype=complex)
    for j, (lo, hi) in enumerate(p.intervals):
        depth = (hi - lo).denominator.bit_length() - 1
        xs = np.linspace(float(lo), float(hi), SIMPSON_PIECES + 1)
        samples = np.array([np.asarray(f(x), dtype=complex) for x in xs])
        local = np.zeros((d, d), dtype=complex)
        for a in range(sys.size):
            vals = np.einsum("ij,xij->x", sys.nu[a].conj(), samples) / d
            coeff = simpson(vals.real, x=xs) + 1j * simpson(vals.imag, x=xs)
            if abs(coeff) < ZERO_TOL:
                continue
            local += coeff * _lam(sys, a) ** (-depth) * sys.mu[a]
        out += np.kron(np.kron(np.eye(d ** j), local), np.eye(d ** (n - j - 1)))
    return out


def discrete_field(partition, x, alpha, sys: AscendingSystem) -> np.ndarray:
    """The field of type alpha at x as a dense matrix on the legs of P."""
    p = partition if isinstance(partition, DyadicPartition) else tree_partition(as_tree(partition))
    x = as_point(x)
    n, d = len(p), sys.d
    a = sys.index(alpha)
    for j, (lo, hi) in enumerate(p.intervals):
        if lo <= x < hi:
            depth = (hi - lo).denominator.bit_length() - 1
            local = field_at_depth(sys, a, depth)
            return np.kron(np.kron(np.eye(d ** j), local), np.eye(d ** (n - j - 1)))
    raise SupportError(f"{x} is outside [0, 1)")


# ---------------------------------------------------------------- oracle

def regular_tree(m: int) -> Tree:
    t = LEAF
    for _ in range(m):
        t = Tree(t, t)
    return t


def brute_force_npoint(V: Isometry3, m: int, leaf_ops) -> complex:
    """tr(W^dagger O W) / d for W the level-m regular tree of V's.

    ``leaf_ops`` is a list of (leaf index, d x d matrix); operators on the
    same leaf are multiplied in list order.
    """
    n, d = 2 ** m, V.d
    if d ** n > d ** max_leaves():
        raise ResourceError(f"{d}^{n} amplitudes exceed the cap")
    w = phi_tree(regular_tree(m), V).reshape((d,) * n + (d,))
    out = w
    for leaf, op in leaf_ops:
        if not 0 <= leaf < n:
            raise IndexError(f"leaf {leaf} out of range")
        out = np.moveaxis(np.tensordot(np.asarray(op), out, axes=([1], [leaf])), 0, leaf)
    return complex(np.vdot(w, out) / d)


# ---------------------------------------------------------------- covariance

def covariance_residual(g: GroupElement, points, alphas, sys: AscendingSystem,
                        V: Isometry3) -> float:
    return covariance_details(g, points, alphas, sys, V)["residual"]


def covariance_details(g: GroupElement, points, alphas, sys: AscendingSystem,
                       V: Isometry3) -> dict:
    """Compare <U(g) vac, prod phi(x_j) U(g) vac> with the transformed vacuum value.

    The right side is prod_j lam_j^(log2 g'(g^-1 x_j)) <vac, prod phi(g^-1 x_j) vac>.
    For positive eigenvalues the factor is g'^(-h); the integer power keeps the
    sign of a negative eigenvalue.
    """
    pts = [as_point(p) for p in points]
    idx = [sys.index(a) for a in alphas]
    lhs = npoint(pts, idx, sys, V, state=g)
    pl, inv = element_to_pl(g), element_to_pl(inverse(g))
    pre = [inv(x) for x in pts]
    factor = 1 + 0j
    for z, a in zip(pre, idx):
        slope = pl.slope_at(z)
        k = _floor_log2(slope)
        factor *= _lam(sys, a) ** k
    rhs = factor * npoint(pre, idx, sys, V)
    return {"lhs": lhs, "rhs": rhs, "residual": float(abs(lhs - rhs)),
            "preimages": pre}
