from fractions import Fraction

import pytest

from thompsonft.errors import CompositionError, PartitionError, ParseError
from thompsonft.forest import (
    CARET, LEAF, AnnularForest, Forest, all_trees, annular_compose, as_forest, complement,
    compose, identity, join, parse_forest, parse_tree, partition_tree, random_tree, refines,
    rotate, tensor, tree_partition,
)


def test_parse_roundtrip():
    for text in ["*", "(**)", "((**)*)", "(*((**)*))"]:
        assert str(parse_tree(text)) == text
    assert str(parse_forest("(**) * ((**)*)")) == "(**) * ((**)*)"


@pytest.mark.parametrize("bad", ["(*", "(**", "x", "(***)", ""])
def test_parse_rejects(bad):
    with pytest.raises(ParseError):
        parse_tree(bad)


def test_leaf_counts():
    t = parse_tree("((**)(*(**)))")
    assert t.leaves == 5
    assert t.depth == 3
    w = parse_forest("(**) * (*(**))")
    assert (w.domain, w.codomain) == (3, 6)
    assert (Forest().domain, Forest().codomain) == (0, 0)


def test_compose():
    assert str(compose("(**)", "(**) *")) == "((**)*)"
    f = parse_forest("(**) (*(**))")
    assert compose(identity(2), f) == f
    assert compose(f, identity(5)) == f
    assert compose(f, parse_forest("* * (**) * *")).codomain == 6
    with pytest.raises(CompositionError):
        compose("(**)", "(**)")


def test_compose_associative(rng):
    for _ in range(50):
        a = as_forest([random_tree(int(rng.integers(1, 4)), rng)])
        b = as_forest([random_tree(int(rng.integers(1, 3)), rng) for _ in range(a.codomain)])
        c = as_forest([random_tree(int(rng.integers(1, 3)), rng) for _ in range(b.codomain)])
        assert compose(compose(a, b), c) == compose(a, compose(b, c))


def test_tensor():
    assert tensor(Forest(), "(**)") == as_forest("(**)")
    w = tensor("(**)", "(**)")
    assert (w.domain, w.codomain) == (2, 4)
    assert tensor("*", "(**)") == as_forest([LEAF, CARET])


def test_join_examples():
    t = parse_tree("((**)*)")
    assert join(t, t) == (t, identity(3), identity(3))
    u, tau, sigma = join("((**)*)", "(*(**))")
    assert str(u) == "((**)(**))"
    assert tau == parse_forest("* * (**)")
    assert sigma == parse_forest("(**) * *")
    assert join(LEAF, t) == (t, Forest((t,)), identity(3))


def test_join_is_least_upper_bound(rng):
    for _ in range(100):
        s, t = random_tree(int(rng.integers(1, 7)), rng), random_tree(int(rng.integers(1, 7)), rng)
        u, tau, sigma = join(s, t)
        assert compose(s, tau).trees[0] == u == compose(t, sigma).trees[0]
        assert refines(s, u) and refines(t, u)
        # any common refinement refines the join
        w = join(u, random_tree(int(rng.integers(1, 7)), rng))[0]
        assert refines(u, w)
        assert compose(s, complement(s, w)).trees[0] == w


def test_rotate():
    w = parse_forest("* (**) ((**)*)")
    assert rotate(w, 0) == w
    assert rotate(w, 1) == parse_forest("(**) ((**)*) *")
    for k in range(4):
        assert rotate(rotate(w, k), 3 - k) == w


def test_annular_compose_identity():
    v = AnnularForest(parse_forest("(**) *"), 1)
    one = AnnularForest(identity(3), 0)
    assert annular_compose(one, v) == v
    assert annular_compose(AnnularForest(identity(2), 0), AnnularForest(identity(2), 0)).rotation == 0


def test_partitions():
    assert tree_partition(CARET).points == (0, Fraction(1, 2), 1)
    t = parse_tree("((*(**))*)")
    assert tree_partition(t).points == (0, Fraction(1, 4), Fraction(3, 8), Fraction(1, 2), 1)
    for n in range(1, 9):
        for tree in all_trees(n):
            assert partition_tree(tree_partition(tree)) == tree
    with pytest.raises(PartitionError):
        partition_tree([0, Fraction(1, 3), 1])
    with pytest.raises(PartitionError):
        partition_tree([0, Fraction(1, 4), 1])


def test_tree_counts_are_catalan():
    assert [len(all_trees(n)) for n in range(1, 7)] == [1, 1, 2, 5, 14, 42]
