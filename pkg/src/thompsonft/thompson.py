"""Thompson's groups F and T as reduced tree-pair fractions.

An element sends the partition of its denominator tree onto the partition of
its numerator tree: denominator leaf ``i`` goes linearly onto numerator leaf
``(i + rot) mod n``.  Elements of F have ``rot == 0``.  All arithmetic is exact.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from .errors import ElementError, NotInGroupError
from .forest import (
    CARET, LEAF, Forest, Tree, as_tree, compose, dyadic_from_json, dyadic_json,
    graft, identity, is_standard_interval, join, parse_tree, partition_tree,
    rotate, tree_partition, DyadicPartition,
)


@dataclass(frozen=True)
class GroupElement:
    num: Tree
    den: Tree
    rot: int = 0

    def __post_init__(self):
        object.__setattr__(self, "num", as_tree(self.num))
        object.__setattr__(self, "den", as_tree(self.den))
        if self.num.leaves != self.den.leaves:
            raise ElementError(
                f"leaf counts differ: {self.num.leaves} vs {self.den.leaves}")
        object.__setattr__(self, "rot", self.rot % self.num.leaves)

    @property
    def leaves(self):
        return self.num.leaves

    @property
    def in_F(self):
        return self.rot == 0

    def target(self, i):
        return (i + self.rot) % self.leaves

    def __str__(self):
        return f"{self.num}/{self.den}@{self.rot}"

    def to_json(self):
        return {"num": str(self.num), "den": str(self.den), "rot": self.rot}

    @classmethod
    def from_json(cls, obj):
        return reduce(parse_tree(obj["num"]), parse_tree(obj["den"]), int(obj.get("rot", 0)))

    def __mul__(self, other):
        # g * h means "h then g", i.e. the map composition g o h
        return multiply(other, self)

    def __call__(self, x):
        return element_to_pl(self)(x)


def _sibling_pairs(tree: Tree):
    """Leftmost leaf index of every caret whose two children are leaves."""
    out = []

    def walk(t, pos):
        if t.is_leaf:
            return pos + 1
        if t.left.is_leaf and t.right.is_leaf:
            out.append(pos)
        return walk(t.right, walk(t.left, pos))

    walk(tree, 0)
    return out


def _collapse(tree: Tree, index: int) -> Tree:
    """Remove the caret whose left leaf has position ``index``."""

    def walk(t, pos):
        if t.is_leaf:
            return t, pos + 1
        if t.left.is_leaf and t.right.is_leaf and pos == index:
            return LEAF, pos + 2
        left, pos = walk(t.left, pos)
        right, pos = walk(t.right, pos)
        return Tree(left, right), pos

    return walk(tree, 0)[0]


def reduce(num, den, rot: int = 0) -> GroupElement:
    """Cancel opposing caret pairs, leftmost first, until none remain."""
    num, den = as_tree(num), as_tree(den)
    if num.leaves != den.leaves:
        raise ElementError(f"leaf counts differ: {num.leaves} vs {den.leaves}")
    n = num.leaves
    rot %= n
    while n > 1:
        num_pairs = set(_sibling_pairs(num))
        for i in _sibling_pairs(den):
            j = (i + rot) % n
            if j in num_pairs and j + 1 < n:
                den = _collapse(den, i)
                num = _collapse(num, j)
                if rot > j:
                    rot -= 1
                n -= 1
                rot %= n
                break
        else:
            break
    return GroupElement(num, den, rot)


def identity_element() -> GroupElement:
    return GroupElement(LEAF, LEAF, 0)


def expand(a: GroupElement, forest) -> GroupElement:
    """Equivalent (unreduced) fraction whose numerator is ``num o forest``."""
    forest = forest if isinstance(forest, Forest) else Forest(tuple(forest))
    if forest.domain != a.leaves:
        raise ElementError("expansion forest must have one tree per leaf")
    new_num = compose(Forest((a.num,)), forest).trees[0]
    new_den = compose(Forest((a.den,)), rotate(forest, a.rot)).trees[0]
    shift = sum(t.leaves for t in forest.trees[:a.rot])
    return GroupElement(new_num, new_den, shift)


def expand_den(a: GroupElement, forest) -> GroupElement:
    """Equivalent fraction whose denominator is ``den o forest``."""
    forest = forest if isinstance(forest, Forest) else Forest(tuple(forest))
    # tree at numerator leaf j is the one at denominator leaf j - rot
    return expand(a, rotate(forest, -a.rot))


def multiply(a: GroupElement, b: GroupElement) -> GroupElement:
    """The element "a then b": as maps, ``b o a``."""
    u, tau, sigma = join(a.num, b.den)
    a2 = expand(a, tau)
    b2 = expand_den(b, sigma)
    assert a2.num == b2.den == u
    return reduce(b2.num, a2.den, a2.rot + b2.rot)


def inverse(a: GroupElement) -> GroupElement:
    return reduce(a.den, a.num, -a.rot)


def power(a: GroupElement, k: int) -> GroupElement:
    base = a if k >= 0 else inverse(a)
    out = identity_element()
    for _ in range(abs(k)):
        out = multiply(out, base)
    return out


def compose_word(word, gens=None) -> GroupElement:
    """Product of a word read left to right, each letter applied after the previous."""
    out = identity_element()
    for letter in word:
        g = letter if isinstance(letter, GroupElement) else generator(letter)
        out = multiply(out, g)
    return out


_GENERATORS = {
    "A": ("((**)*)", "(*(**))", 0),
    "B": ("(*((**)*))", "(*(*(**)))", 0),
    "C": ("(*(**))", "(*(**))", 2),
}


def generator(name: str) -> GroupElement:
    try:
        num, den, rot = _GENERATORS[name.upper()]
    except KeyError:
        raise ElementError(f"unknown generator {name!r}") from None
    return GroupElement(parse_tree(num), parse_tree(den), rot)


# ---------------------------------------------------------------- PL maps

@dataclass(frozen=True)
class PLMap:
    """Piecewise-linear map given by breakpoints ``(x_i, y_i)``.

    ``x`` runs from 0 to 1.  ``y`` is a lift: it increases strictly from
    ``y_0`` to ``y_0 + 1``.  For interval maps ``y_0 = 0``; for circle maps
    the value at x is ``y mod 1``.
    """

    points: tuple
    circle: bool = False

    def __post_init__(self):
        pts = tuple((Fraction(x), Fraction(y)) for x, y in self.points)
        object.__setattr__(self, "points", pts)

    @cached_property
    def xs(self):
        return [p[0] for p in self.points]

    @cached_property
    def _float_pts(self):
        arr = np.array([[float(x), float(y)] for x, y in self.points])
        return arr[:, 0], arr[:, 1]

    def lift(self, x) -> Fraction:
        """Value of the lifted map at x in [0, 1]."""
        x = Fraction(x)
        pts = self.points
        i = bisect_right(self.xs, x) - 1
        i = min(max(i, 0), len(pts) - 2)
        (x0, y0), (x1, y1) = pts[i], pts[i + 1]
        return y0 + (x - x0) * (y1 - y0) / (x1 - x0)

    def __call__(self, x):
        y = self.lift(Fraction(x) % 1 if self.circle else x)
        return y % 1 if self.circle else y

    def evalf(self, x: float) -> float:
        """Floating-point evaluation, for numeric sampling."""
        xs, ys = self._float_pts
        x = np.asarray(x, dtype=float)
        if self.circle:
            x = x % 1.0
        y = np.interp(x, xs, ys)
        y = y % 1.0 if self.circle else y
        return float(y) if y.ndim == 0 else y

    def slopes(self):
        return [(y1 - y0) / (x1 - x0)
                for (x0, y0), (x1, y1) in zip(self.points, self.points[1:])]

    def slope_at(self, x) -> Fraction:
        """Right derivative at x."""
        x = Fraction(x) % 1 if self.circle else Fraction(x)
        i = min(max(bisect_right(self.xs, x) - 1, 0), len(self.points) - 2)
        return self.slopes()[i]

    def breakpoints(self):
        return [p[0] for p in self.points[1:-1]]

    def compose(self, other: "PLMap") -> "PLMap":
        """``self o other`` computed directly on breakpoints."""
        xs = set(other.xs)
        for bx, _ in self.points:
            # preimages of self's breakpoints under other (on the lift)
            for shift in (-1, 0, 1):
                target = bx + shift
                for (x0, y0), (x1, y1) in zip(other.points, other.points[1:]):
                    if y0 <= target <= y1:
                        xs.add(x0 + (target - y0) * (x1 - x0) / (y1 - y0))
        xs = sorted(x for x in xs if 0 <= x <= 1)
        pts = [(x, _lift_eval(self, other.lift(x))) for x in xs]
        base = pts[0][1].__floor__()
        pts = tuple((x, y - base) for x, y in pts)
        return simplify(PLMap(pts, pts[0][1] != 0))

    def to_json(self):
        return {"circle": self.circle,
                "points": [[dyadic_json(x), dyadic_json(y)] for x, y in self.points]}

    @classmethod
    def from_json(cls, obj):
        pts = tuple((dyadic_from_json(a), dyadic_from_json(b)) for a, b in obj["points"])
        return cls(pts, bool(obj.get("circle", False)))


def _lift_eval(f: PLMap, y: Fraction) -> Fraction:
    """Lifted value of f at any real y, using f(y + 1) = f(y) + 1."""
    n = y.__floor__()
    frac = y - n
    if frac == 0 and n > 0:
        frac, n = Fraction(1), n - 1
    return f.lift(frac) + n


def simplify(f: PLMap) -> PLMap:
    """Drop breakpoints where the slope does not change."""
    pts = list(f.points)
    out = [pts[0]]
    for i in range(1, len(pts) - 1):
        (x0, y0), (x1, y1), (x2, y2) = out[-1], pts[i], pts[i + 1]
        if (y1 - y0) * (x2 - x1) != (y2 - y1) * (x1 - x0):
            out.append(pts[i])
    out.append(pts[-1])
    return PLMap(tuple(out), f.circle)


def element_to_pl(a: GroupElement) -> PLMap:
    dom = a.den.leaf_intervals()
    tgt = a.num.leaf_intervals()
    pts = []
    for i, (x, _) in enumerate(dom):
        j = a.target(i)
        y = tgt[j][0] + (1 if j < a.rot else 0)
        pts.append((x, y))
    pts.append((Fraction(1), pts[0][1] + 1))
    return simplify(PLMap(tuple(pts), circle=not a.in_F))


def _is_pow2(q: Fraction) -> bool:
    if q <= 0:
        return False
    n, d = q.numerator, q.denominator
    return (n == 1 or d == 1) and not (n & (n - 1)) and not (d & (d - 1))


def _is_dyadic(q: Fraction) -> bool:
    d = Fraction(q).denominator
    return not (d & (d - 1))


def validate_pl(f: PLMap):
    """Check the breakpoint and slope conditions; raises NotInGroupError."""
    pts = f.points
    if len(pts) < 2 or pts[0][0] != 0 or pts[-1][0] != 1:
        raise NotInGroupError("x must run from 0 to 1")
    if pts[-1][1] - pts[0][1] != 1:
        raise NotInGroupError("map is not a bijection of the interval/circle")
    if not f.circle and pts[0][1] != 0:
        raise NotInGroupError("interval map must fix 0")
    if not 0 <= pts[0][1] < 1:
        raise NotInGroupError("lift must start in [0, 1)")
    for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
        if x1 <= x0 or y1 <= y0:
            raise NotInGroupError("map must be strictly increasing")
        if not (_is_dyadic(x0) and _is_dyadic(y0)):
            raise NotInGroupError(f"non-dyadic breakpoint ({x0}, {y0})")
        if not _is_pow2((y1 - y0) / (x1 - x0)):
            raise NotInGroupError(f"slope on [{x0}, {x1}] is not a power of 2")
    return True


def is_valid_pl(f: PLMap) -> bool:
    try:
        return validate_pl(f)
    except NotInGroupError:
        return False


def _good_interval(f: PLMap, a: Fraction, b: Fraction) -> bool:
    xs = f.xs
    i = bisect_right(xs, a)
    if i < len(xs) and xs[i] < b:
        return False
    ya, yb = f.lift(a), f.lift(b)
    start = ya % 1
    return is_standard_interval(start, start + (yb - ya)) and start + (yb - ya) <= 1


def _refine(f: PLMap, a, b, depth=0):
    if _good_interval(f, a, b):
        return [(a, b)]
    if depth > 200:
        raise NotInGroupError("bisection did not terminate")
    mid = (a + b) / 2
    return _refine(f, a, mid, depth + 1) + _refine(f, mid, b, depth + 1)


def pl_to_element(f: PLMap) -> GroupElement:
    validate_pl(f)
    ivs = _refine(f, Fraction(0), Fraction(1))
    den = partition_tree([a for a, _ in ivs] + [Fraction(1)])
    images = [f.lift(a) % 1 for a, _ in ivs]
    order = sorted(images)
    num = partition_tree(order + [Fraction(1)])
    return reduce(num, den, order.index(images[0]))


def good_refinement(a: GroupElement, p) -> DyadicPartition:
    """Coarsest refinement of ``p`` on which ``a`` is linear with standard dyadic images."""
    f = element_to_pl(a)
    pts = p.points if isinstance(p, DyadicPartition) else tuple(Fraction(x) for x in p)
    partition_tree(pts)
    out = []
    for x0, x1 in zip(pts, pts[1:]):
        out.extend(_refine(f, x0, x1))
    return DyadicPartition(tuple(x for x, _ in out) + (Fraction(1),))


def random_element(rng, max_leaves: int = 6, circle: bool = True) -> GroupElement:
    from .forest import random_tree
    n = int(rng.integers(1, max_leaves + 1))
    rot = int(rng.integers(n)) if circle else 0
    return reduce(random_tree(n, rng), random_tree(n, rng), rot)


def random_word(rng, length: int, letters="ABC"):
    return [letters[int(rng.integers(len(letters)))] for _ in range(length)]
