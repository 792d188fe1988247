from fractions import Fraction

import numpy as np
import pytest

from thompsonft.diffapprox import (
    approximate, builtin, derivative_distance, dyadic_between, dyadic_interpolation,
    from_table, interpolation_cuts, sup_error,
)
from thompsonft.errors import IntervalError, NotDiffeoError
from thompsonft.thompson import element_to_pl, identity_element, is_valid_pl, random_element


def test_dyadic_between():
    assert dyadic_between(Fraction(3, 10), Fraction(4, 10)) == Fraction(5, 16)
    assert dyadic_between(Fraction(1, 4), Fraction(3, 4)) == Fraction(1, 2)
    with pytest.raises(IntervalError):
        dyadic_between(1, 1)


def test_dyadic_between_interior(rng):
    for _ in range(500):
        p, q = sorted(Fraction(int(v), 10 ** 6) for v in rng.integers(0, 10 ** 6, size=2))
        if p == q:
            continue
        z = dyadic_between(p, q)
        assert p < z < q
        assert z.denominator & (z.denominator - 1) == 0


def test_interpolation_trivial_cases():
    f = dyadic_interpolation((0, 0), (Fraction(1, 2), Fraction(1, 2)))
    assert f.slopes() == [1]
    f = dyadic_interpolation((0, 0), (Fraction(1, 2), Fraction(1, 4)))
    assert f.slopes() == [Fraction(1, 2)]


def test_interpolation_figure_example():
    f = dyadic_interpolation((0, 0), (Fraction(11, 64), Fraction(2, 8)), explicit=((11, 6), (2, 3)))
    xs = [x for x, _ in f.points]
    ys = [y for _, y in f.points]
    assert xs == [Fraction(i, 64) for i in range(12)]
    assert len(ys) == 12 and ys[-1] == Fraction(1, 4)
    # every image piece is standard dyadic, so each slope is a power of 2
    for s in f.slopes():
        assert s.numerator & (s.numerator - 1) == 0 and s.denominator & (s.denominator - 1) == 0


def test_interpolation_cuts_count():
    for m_a in range(1, 5):
        for m_b in range(m_a, 20):
            assert len(interpolation_cuts(m_a, 3, m_b)) == m_b + 1


@pytest.mark.parametrize("eps", [0.1, 0.03, 0.01])
def test_quadratic(eps):
    f, _, S, mode = builtin("quadratic")
    g = approximate(f, S, eps, mode)
    assert is_valid_pl(element_to_pl(g))
    assert sup_error(f, g) < eps


def test_identity_and_rotation():
    f, _, S, mode = builtin("identity")
    assert sup_error(f, approximate(f, S, 0.05, mode)) < 0.05
    f, _, S, mode = builtin("rotation:1/2")
    g = approximate(f, S, 0.05, mode)
    assert not g.in_F
    assert sup_error(f, g, mode="circle") < 0.05


def test_not_a_diffeo():
    with pytest.raises(NotDiffeoError):
        approximate(lambda x: 1 - x, 1.0, 0.1)
    with pytest.raises(IntervalError):
        approximate(lambda x: x, 1.0, 1.5)


def test_table_input(tmp_path):
    path = tmp_path / "f.csv"
    xs = np.linspace(0, 1, 33)
    np.savetxt(path, np.column_stack([xs, xs ** 2 * 0.5 + xs * 0.5]), delimiter=",")
    f = from_table(str(path))
    g = approximate(f, 1.5, 0.05)
    assert sup_error(f, g) < 0.05


def test_derivative_distance(rng):
    _, fp, _, _ = builtin("identity")
    assert derivative_distance(fp, identity_element()) == 0
    _, fp, _, _ = builtin("quadratic")
    for _ in range(100):
        g = random_element(rng, circle=False)
        assert derivative_distance(fp, g) >= 0.1 - 1e-3
