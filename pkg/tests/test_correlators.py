from fractions import Fraction

import numpy as np
import pytest

from thompsonft import correlators as corr
from thompsonft.errors import DyadicError, ResourceError, SupportError
from thompsonft.forest import parse_tree, tree_partition
from thompsonft.semicont import embed, vacuum
from thompsonft.tensorlab import qutrit, qutrit_system
from thompsonft.thompson import compose_word, generator, identity_element, random_word

V = qutrit()
SYS = qutrit_system(V)


def test_binary_points():
    assert corr.DyadicPoint.from_binary("0.01101").value == Fraction(13, 32)
    assert corr.as_point("0.011b") == Fraction(3, 8)
    assert corr.DyadicPoint(Fraction(5, 8)).digits(4) == "1010"
    assert corr.DyadicPoint(Fraction(5, 8)).truncate(2, 4).value == Fraction(1, 2)
    with pytest.raises(DyadicError):
        corr.DyadicPoint(1)
    with pytest.raises(DyadicError):
        corr.DyadicPoint.from_binary("0.012")


def test_tree_metric():
    r = corr.xor_and_tree_metric("0.01101b", "0.01111b", 5)
    assert r["d_T"] == r["d_T_closed"] == 2
    assert r["xor"] == Fraction(2, 32)
    assert corr.xor_and_tree_metric(Fraction(3, 8), Fraction(3, 8), 5)["d_T"] == 0
    assert corr.xor_and_tree_metric(0, Fraction(1, 2), 3)["d_T"] == 3


def test_supporting_partition():
    p = corr.minimal_supporting_partition([Fraction(1, 7), Fraction(2, 3), Fraction(5, 6)])
    assert p.points == (0, Fraction(1, 2), Fraction(3, 4), 1)
    assert corr.minimal_supporting_partition([Fraction(1, 3)]).points == (0, 1)
    assert corr.minimal_supporting_partition([0, Fraction(1, 2)]).points == (0, Fraction(1, 2), 1)
    with pytest.raises(SupportError):
        corr.support_tree([Fraction(1, 3), Fraction(1, 3)])
    with pytest.raises(SupportError):
        corr.support_tree([Fraction(3, 2)])


def test_locate():
    t = parse_tree("(*(**))")
    assert corr.locate(t, Fraction(5, 8)) == (1, 2)
    assert corr.locate(t, Fraction(1, 4)) == (0, 1)


def test_smeared_field():
    p = tree_partition(parse_tree("(*(**))"))
    assert np.abs(corr.smeared_field(p, lambda x: np.zeros((3, 3)), SYS)).max() == 0
    eye = corr.smeared_field(p, lambda x: np.eye(3), SYS)
    assert np.allclose(eye, np.eye(27))
    # a unit-mass bump inside [1/2, 3/4) picks out the discrete field there
    a = SYS.index("beta1")
    z, w = 0.625, 1 / 32

    def bump(x):
        return max(0.0, 1 - abs(x - z) / w) / w * SYS.mu[a]

    got = corr.smeared_field(p, bump, SYS)
    want = corr.discrete_field(p, Fraction(5, 8), a, SYS)
    assert np.abs(got - want).max() < 1e-3
    with pytest.raises(ResourceError):
        corr.smeared_field(tree_partition(corr.regular_tree(4)), lambda x: np.eye(3), SYS)


def test_one_point():
    for a in range(1, SYS.size):
        assert abs(corr.npoint([Fraction(1, 3)], [a], SYS, V)) < 1e-12
        assert abs(corr.one_point_closed_form(a, SYS)) < 1e-12
    assert abs(corr.npoint([Fraction(1, 3)], ["1"], SYS, V) - 1) < 1e-12


def test_brute_force_basics():
    assert abs(corr.brute_force_npoint(V, 2, []) - 1) < 1e-12
    for a in range(SYS.size):
        for leaf in range(4):
            brute = corr.brute_force_npoint(V, 2, [(leaf, SYS.mu[a])])
            assert abs(brute - corr.one_point_closed_form(a, SYS, 2)) < 1e-12


def test_two_point_against_oracle():
    b1 = SYS.index("beta1")
    got = corr.two_point_closed_form(0, Fraction(7, 8), b1, b1, SYS, V, m=3)
    brute = corr.brute_force_npoint(V, 3, [(0, SYS.mu[b1]), (7, SYS.mu[b1])])
    assert abs(got["value"] - brute) < 1e-12
    assert got["formula_path"] == "regular-tree"


def test_two_point_limit_matches_npoint(rng):
    for _ in range(50):
        x, y = (Fraction(int(q), 256) for q in rng.choice(256, size=2, replace=False))
        a, b = (int(v) for v in rng.integers(0, 9, size=2))
        closed = corr.two_point_closed_form(x, y, a, b, SYS, V)["value"]
        assert abs(closed - corr.npoint([x, y], [a, b], SYS, V)) < 1e-9


def test_two_point_scale():
    for n in range(2, 6):
        x, y = Fraction(2, 2 ** n), Fraction(3, 2 ** n)
        assert corr.two_point_closed_form(x, y, 3, 3, SYS, V)["D"] == abs(y - x)
    assert abs(corr.two_point_closed_form(Fraction(1, 8), Fraction(1, 2), 0, 0, SYS, V)["value"] - 1) < 1e-12
    assert corr.two_point_closed_form(0, Fraction(3, 4), 1, 2, SYS, V)["formula_path"] == "cross-half"


def test_refinement_independence(rng):
    vac = vacuum(V)
    pts = [Fraction(1, 8), Fraction(5, 8)]
    base = corr.npoint(pts, ["beta1", "beta1"], SYS, V)
    finer = embed(vac, parse_tree("((**)((**)(**)))"), V)
    other = corr.npoint_details(pts, ["beta1", "beta1"], SYS, V, state=finer)
    assert other["formula_path"] == "state-vector"
    assert abs(other["value"] - base) < 1e-9


def test_ope():
    table = corr.ope_table(SYS, V)
    assert len(table["N"]) == 9
    assert table["N"][0].tolist() == np.eye(9, dtype=int).tolist()
    rows = corr.ope_row(table, "beta2", "alpha3")
    assert abs(rows[0]["expansion"] - 0.5) < 1e-9


def test_covariance(rng):
    pts = [Fraction(1, 16), Fraction(11, 16)]
    assert corr.covariance_residual(identity_element(), pts, [3, 4], SYS, V) < 1e-12
    assert corr.covariance_residual(generator("A"), pts, [3, 4], SYS, V) < 1e-9
    for _ in range(10):
        g = compose_word(random_word(rng, int(rng.integers(1, 5)), "AC"))
        a, b = (int(v) for v in rng.integers(0, 9, size=2))
        lhs = corr.npoint(pts, [a, b], SYS, V, state=g)
        assert abs(lhs - corr.npoint(pts, [a, b], SYS, V)) < 1e-9
