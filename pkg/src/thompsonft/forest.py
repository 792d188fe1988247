"""Binary trees, binary forests and annular forests.

Trees are written with the grammar ``T ::= "*" | "(" T T ")"``; a forest is a
whitespace separated list of trees.  All values are immutable and compared
structurally.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from .errors import CompositionError, ParseError, PartitionError


@dataclass(frozen=True)
class Tree:
    """A rooted planar binary tree.  ``left is None`` marks a leaf."""

    left: "Tree | None" = None
    right: "Tree | None" = None

    def __post_init__(self):
        if (self.left is None) != (self.right is None):
            raise ValueError("a node needs two children")

    @property
    def is_leaf(self) -> bool:
        return self.left is None

    @cached_property
    def leaves(self) -> int:
        if self.is_leaf:
            return 1
        return self.left.leaves + self.right.leaves

    @cached_property
    def depth(self) -> int:
        if self.is_leaf:
            return 0
        return 1 + max(self.left.depth, self.right.depth)

    def __str__(self) -> str:
        if self.is_leaf:
            return "*"
        return f"({self.left}{self.right})"

    def __repr__(self) -> str:
        return f"Tree({str(self)!r})"

    def leaf_intervals(self, start=Fraction(0), length=Fraction(1)):
        """Standard dyadic intervals (start, length) of the leaves, left to right."""
        if self.is_leaf:
            return [(start, length)]
        half = length / 2
        return (self.left.leaf_intervals(start, half)
                + self.right.leaf_intervals(start + half, half))

    def leaf_depths(self):
        if self.is_leaf:
            return [0]
        return [d + 1 for d in self.left.leaf_depths() + self.right.leaf_depths()]


LEAF = Tree()
CARET = Tree(LEAF, LEAF)


def node(left: Tree, right: Tree) -> Tree:
    return Tree(left, right)


def parse_tree(text: str) -> Tree:
    text = "".join(text.split())
    tree, pos = _parse(text, 0)
    if pos != len(text):
        raise ParseError(f"trailing input in tree {text!r} at {pos}")
    return tree


def _parse(text, pos):
    if pos >= len(text):
        raise ParseError("unexpected end of tree text")
    ch = text[pos]
    if ch == "*":
        return LEAF, pos + 1
    if ch != "(":
        raise ParseError(f"unexpected {ch!r} at {pos}")
    left, pos = _parse(text, pos + 1)
    right, pos = _parse(text, pos)
    if pos >= len(text) or text[pos] != ")":
        raise ParseError(f"expected ')' at {pos}")
    return Tree(left, right), pos + 1


def as_tree(t) -> Tree:
    return t if isinstance(t, Tree) else parse_tree(t)


@dataclass(frozen=True)
class Forest:
    """An ordered list of trees; a morphism ``domain -> codomain`` of BinFor."""

    trees: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "trees", tuple(as_tree(t) for t in self.trees))

    @property
    def domain(self) -> int:
        return len(self.trees)

    @cached_property
    def codomain(self) -> int:
        return sum(t.leaves for t in self.trees)

    def __str__(self):
        return " ".join(str(t) for t in self.trees)

    def __repr__(self):
        return f"Forest({str(self)!r})"

    def __len__(self):
        return len(self.trees)

    def __getitem__(self, i):
        return self.trees[i]

    def is_identity(self) -> bool:
        return all(t.is_leaf for t in self.trees)

    def to_json(self):
        return {"trees": [str(t) for t in self.trees], "rotation": 0}


def parse_forest(text: str) -> Forest:
    # split at top level: each tree is either "*" or a balanced group
    trees, depth, cur = [], 0, []
    for ch in text:
        if ch.isspace():
            continue
        cur.append(ch)
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise ParseError("unbalanced parentheses")
        elif ch != "*":
            raise ParseError(f"unexpected {ch!r}")
        if depth == 0:
            trees.append(parse_tree("".join(cur)))
            cur = []
    if depth or cur:
        raise ParseError("unbalanced parentheses")
    return Forest(tuple(trees))


def as_forest(w) -> Forest:
    if isinstance(w, Forest):
        return w
    if isinstance(w, Tree):
        return Forest((w,))
    if isinstance(w, str):
        return parse_forest(w)
    return Forest(tuple(w))


def identity(n: int) -> Forest:
    return Forest((LEAF,) * n)


def _graft(tree: Tree, pieces: Sequence[Tree], pos: int):
    if tree.is_leaf:
        return pieces[pos], pos + 1
    left, pos = _graft(tree.left, pieces, pos)
    right, pos = _graft(tree.right, pieces, pos)
    return Tree(left, right), pos


def graft(tree: Tree, pieces: Sequence[Tree]) -> Tree:
    """Attach ``pieces[i]`` to leaf ``i`` of ``tree``."""
    if len(pieces) != tree.leaves:
        raise CompositionError(f"tree has {tree.leaves} leaves, got {len(pieces)} pieces")
    return _graft(tree, pieces, 0)[0]


def compose(w1, w2) -> Forest:
    """Graft tree i of ``w2`` onto leaf i of ``w1``; requires cod(w1) = dom(w2)."""
    w1, w2 = as_forest(w1), as_forest(w2)
    if w1.codomain != w2.domain:
        raise CompositionError(f"codomain {w1.codomain} != domain {w2.domain}")
    out, pos = [], 0
    for t in w1.trees:
        out.append(graft(t, w2.trees[pos:pos + t.leaves]))
        pos += t.leaves
    return Forest(tuple(out))


def tensor(w1, w2) -> Forest:
    w1, w2 = as_forest(w1), as_forest(w2)
    return Forest(w1.trees + w2.trees)


def tensor_all(forests: Iterable) -> Forest:
    out = ()
    for w in forests:
        out += as_forest(w).trees
    return Forest(out)


def join(s, t):
    """Smallest common supertree of two trees.

    Returns ``(u, tau, sigma)`` with ``compose(s, tau) == u == compose(t, sigma)``.
    """
    s, t = as_tree(s), as_tree(t)
    if s.is_leaf:
        return t, Forest((t,)), identity(t.leaves)
    if t.is_leaf:
        return s, identity(s.leaves), Forest((s,))
    ul, tl, sl = join(s.left, t.left)
    ur, tr, sr = join(s.right, t.right)
    return Tree(ul, ur), tensor(tl, tr), tensor(sl, sr)


def join_forests(v, w):
    """Componentwise join of two forests with equal domain."""
    v, w = as_forest(v), as_forest(w)
    if v.domain != w.domain:
        raise CompositionError(f"domains differ: {v.domain} vs {w.domain}")
    us, taus, sigmas = [], [], []
    for a, b in zip(v.trees, w.trees):
        u, ta, sg = join(a, b)
        us.append(u)
        taus.append(ta)
        sigmas.append(sg)
    return Forest(tuple(us)), tensor_all(taus), tensor_all(sigmas)


def refines(coarse, fine) -> bool:
    """True when ``fine`` is obtained from ``coarse`` by grafting."""
    coarse, fine = as_tree(coarse), as_tree(fine)
    if coarse.is_leaf:
        return True
    if fine.is_leaf:
        return False
    return refines(coarse.left, fine.left) and refines(coarse.right, fine.right)


def complement(coarse, fine) -> Forest:
    """The forest p with ``compose(coarse, p) == fine``."""
    coarse, fine = as_tree(coarse), as_tree(fine)
    if not refines(coarse, fine):
        raise CompositionError(f"{fine} does not refine {coarse}")
    u, tau, _ = join(coarse, fine)
    return tau


def rotate(w, k: int) -> Forest:
    """Cyclic shift: tree i of the result is tree ``i + k mod m`` of ``w``."""
    w = as_forest(w)
    m = w.domain
    if m == 0:
        raise CompositionError("cannot rotate the empty forest")
    k %= m
    return Forest(w.trees[k:] + w.trees[:k])


@dataclass(frozen=True)
class AnnularForest:
    """A forest together with a cyclic relabelling of its leaves.

    Leaf i of ``forest`` carries the label ``i + rotation mod codomain``.
    """

    forest: Forest
    rotation: int = 0

    def __post_init__(self):
        f = as_forest(self.forest)
        object.__setattr__(self, "forest", f)
        n = f.codomain
        object.__setattr__(self, "rotation", self.rotation % n if n else 0)

    @property
    def domain(self):
        return self.forest.domain

    @property
    def codomain(self):
        return self.forest.codomain

    def to_json(self):
        return {"trees": [str(t) for t in self.forest.trees], "rotation": self.rotation}


def annular_compose(w: AnnularForest, v: AnnularForest) -> AnnularForest:
    """``(w, l) o (v, k) = ([k](w) o v, s)`` where ``s`` tracks where leaf 0 went.

    ``v`` is applied first.  The trees of ``w`` attach to the labelled leaves of
    ``v``; leaf 0 of the result is the first leaf of tree ``k`` of ``w``, whose
    label is ``l`` plus the number of leaves in trees ``0..k-1`` of ``w``.
    """
    if w.domain != v.codomain:
        raise CompositionError(f"codomain {v.codomain} != domain {w.domain}")
    k = v.rotation
    forest = compose(v.forest, rotate(w.forest, k) if w.domain else w.forest)
    shift = sum(t.leaves for t in w.forest.trees[:k])
    return AnnularForest(forest, w.rotation + shift)


@dataclass(frozen=True)
class DyadicPartition:
    """Breakpoints ``0 = p_0 < ... < p_n = 1`` of a standard dyadic partition."""

    points: tuple = field(default_factory=lambda: (Fraction(0), Fraction(1)))

    def __post_init__(self):
        pts = tuple(Fraction(p) for p in self.points)
        object.__setattr__(self, "points", pts)

    @property
    def intervals(self):
        return list(zip(self.points[:-1], self.points[1:]))

    def __len__(self):
        return len(self.points) - 1

    def to_json(self):
        return [dyadic_json(p) for p in self.points]


def dyadic_mk(x: Fraction):
    """Return (m, k) with ``x == m / 2**k`` and k minimal."""
    x = Fraction(x)
    den = x.denominator
    if den & (den - 1):
        raise PartitionError(f"{x} is not a dyadic rational")
    return x.numerator, den.bit_length() - 1


def dyadic_json(x):
    m, k = dyadic_mk(x)
    return {"m": m, "k": k}


def dyadic_from_json(obj) -> Fraction:
    return Fraction(int(obj["m"]), 2 ** int(obj["k"]))


def is_standard_interval(a: Fraction, b: Fraction) -> bool:
    length = b - a
    if length <= 0 or length.numerator != 1:
        return False
    if length.denominator & (length.denominator - 1):
        return False
    return (a / length).denominator == 1


def tree_partition(t) -> DyadicPartition:
    t = as_tree(t)
    ivs = t.leaf_intervals()
    return DyadicPartition(tuple(a for a, _ in ivs) + (Fraction(1),))


def partition_tree(p) -> Tree:
    """Inverse of :func:`tree_partition`."""
    pts = tuple(Fraction(x) for x in (p.points if isinstance(p, DyadicPartition) else p))
    if len(pts) < 2 or pts[0] != 0 or pts[-1] != 1:
        raise PartitionError("partition must start at 0 and end at 1")
    if any(b <= a for a, b in zip(pts, pts[1:])):
        raise PartitionError("breakpoints must increase strictly")
    for a, b in zip(pts, pts[1:]):
        if not is_standard_interval(a, b):
            raise PartitionError(f"[{a}, {b}] is not a standard dyadic interval")
    return _build(pts, 0, len(pts) - 1)


def _build(pts, lo, hi):
    # pts[lo] and pts[hi] bound a standard interval; split at its midpoint
    if hi == lo + 1:
        return LEAF
    mid = (pts[lo] + pts[hi]) / 2
    i = bisect_left(pts, mid, lo, hi)
    if pts[i] != mid:
        raise PartitionError(f"midpoint {mid} of [{pts[lo]}, {pts[hi]}] missing")
    return Tree(_build(pts, lo, i), _build(pts, i, hi))


def all_trees(n: int):
    """Every binary tree with exactly n leaves."""
    if n == 1:
        return [LEAF]
    out = []
    for k in range(1, n):
        for left in all_trees(k):
            for right in all_trees(n - k):
                out.append(Tree(left, right))
    return out


def random_tree(n: int, rng) -> Tree:
    """A tree with n leaves built by splitting random leaves."""
    t = LEAF
    for _ in range(n - 1):
        i = int(rng.integers(t.leaves))
        pieces = [LEAF] * t.leaves
        pieces[i] = CARET
        t = graft(t, pieces)
    return t
