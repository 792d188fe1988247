import numpy as np
import pytest

from thompsonft import trivalent as tv
from thompsonft.errors import GramError, IrreducibleError, ParameterError

GENERIC = tv.TrivalentParams(2.7, 1.3, 0.6)


def test_parameter_validation():
    with pytest.raises(ParameterError):
        tv.TrivalentParams(0, 1, 1)
    with pytest.raises(ParameterError):
        tv.TrivalentParams(2, 0, 1)
    with pytest.raises(ParameterError):
        tv.TrivalentParams(2.7, 1.3, 0.6, dimC4=3)
    with pytest.raises(ParameterError):
        tv.TrivalentParams(2.7, 1.3, 0.6, dimC4=2)
    p = tv.fibonacci()
    assert abs(p.d - tv.PHI_PLUS) < 1e-15 and abs(p.t - tv.PHI_MINUS) < 1e-15
    assert abs(tv.pso3(tv.so3_point(2.5, 0.9))) < 1e-12


def test_closed_evaluations():
    p = GENERIC
    assert tv.reduce(tv.circle(), p) == p.d
    assert tv.reduce(tv.theta(), p) == p.b * p.d
    assert tv.reduce(tv.lollipop_closed(), p) == 0


def test_diagram_structure():
    for D in (tv.theta(), tv.square4(), tv.beta4(3), tv.vertex_tangle()):
        assert tv.is_planar(D)
    # boundary points all sit on the outer vertex
    assert tv.components(tv.beta4(1)) == 1
    assert tv.components(tv.theta()) == 1
    with pytest.raises(ValueError):
        tv.beta4(5)


def test_json_roundtrip():
    for D in (tv.theta(), tv.square4(), tv.beta4(4), tv.cupcap()):
        E = tv.Diagram.from_json(D.to_json())
        assert E.to_json() == D.to_json()


def test_gram_entries():
    p = GENERIC
    d, b, t = p.d, p.b, p.t
    ip = lambda i, j: tv.inner_product(tv.beta4(i), tv.beta4(j), p)
    assert abs(ip(1, 1) - d * d) < 1e-12
    assert abs(ip(1, 2) - d) < 1e-12
    assert abs(ip(3, 4) - b * d * t) < 1e-12


@pytest.mark.parametrize("p", [GENERIC, tv.TrivalentParams(3.1, 0.4, -0.8),
                               tv.so3_point(2.6, 1.1), tv.fibonacci(),
                               tv.TrivalentParams(2.2 + 0.3j, 1.1 - 0.2j, 0.5 + 0.1j)])
def test_m41(p):
    num, sym = tv.m41_numeric(p), tv.m41_symbolic(p)
    assert np.abs(num - sym).max() < 1e-9 * np.abs(sym).max()


def test_square_window_dim3_recovery():
    # solving G c = <beta_j, square> gives back the square coefficients
    p = tv.so3_point(2.6, 1.1)
    basis = [tv.beta4(i) for i in range(1, 4)]
    G = tv.gram_matrix(basis, p)
    rhs = [tv.inner_product(B, tv.square4(), p) for B in basis]
    coeffs, w = tv.square_window(p)
    assert np.allclose(np.linalg.solve(G, rhs), coeffs)
    printed, _ = tv.square_window(p, printed=True)
    assert not np.allclose(printed, coeffs)
    assert abs(tv.inner_product(tv.square4(), tv.square4(), p) - w) < 1e-9


def test_square_window_dim2():
    p = tv.fibonacci()
    coeffs, w = tv.square_window(p)
    c = p.b ** 2 / (p.d + 1)
    assert np.allclose(coeffs, [c, c])
    assert abs(w - 2 * p.b ** 4 * p.d / (p.d + 1)) < 1e-12
    assert abs(tv.det_m40_symbolic(p)) < 1e-9


def test_confluence(rng):
    p = GENERIC
    closed = tv.glue_closed(tv.square4(), tv.square4())
    first = tv.reduce(closed, p)
    for _ in range(20):
        assert abs(tv.reduce(closed, p, rng=rng) - first) < 1e-9


def test_orthonormalization():
    p = tv.TrivalentParams(3.0, 2.0, 0.5)
    basis = [tv.beta4(i) for i in range(1, 5)]
    G = tv.gram_matrix(basis, p)
    on = tv.gram_orthonormalize(G)
    assert abs(on.Theta[0, 0] - 1 / abs(p.d)) < 1e-12
    assert np.allclose(on.Theta @ G @ on.Theta.conj().T, np.eye(4))
    x = tv.DiagramSum([(2.0, basis[0]), (-1.0, basis[1])])
    got = on.coefficients([tv.inner_product(B, x, p) for B in basis])
    assert np.allclose(got, [2, -1, 0, 0])
    with pytest.raises(GramError):
        tv.gram_orthonormalize(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(GramError):
        tv.gram_orthonormalize(tv.gram_matrix(basis, GENERIC))


def test_fibonacci_gram_rank():
    p = tv.fibonacci()
    basis = [tv.beta4(i) for i in range(1, 5)] + [tv.square4()]
    on = tv.gram_orthonormalize(tv.gram_matrix(basis, p))
    assert on.rank == 2


def test_reidemeister_two():
    p = tv.fibonacci()
    x = tv.crossing("/")
    both = tv.reduce(tv.product(x, x.dagger()), p)
    one = tv.reduce(tv.DiagramSum.of(tv.identity_diagram(2)), p)
    basis = tv.fib_basis()
    a = [tv.inner_product(B, both, p) for B in basis]
    b = [tv.inner_product(B, one, p) for B in basis]
    assert np.allclose(a, b)


def test_fib_ascending():
    fib = tv.fib_ascending()
    lam = (3 - np.sqrt(5)) / 2
    assert np.allclose(fib.E, [[1, lam], [0, lam]])
    assert abs(fib.scaling_dimensions[1] - 1.388484) < 1e-6
    assert np.allclose(fib.fusion_matrix("1"), [[1, 0], [0, lam]])
    assert np.allclose(fib.fusion_matrix("tau"), [[0, lam], [np.sqrt(5) - 2, 5 - 2 * np.sqrt(5)]])


def test_irreducible():
    # a closed diagram with only pentagon or larger faces cannot be reduced
    p = GENERIC
    B = tv.Builder(0)
    v = [B.vertex() for _ in range(20)]
    # dodecahedron: outer 5-cycle, middle 10-cycle, inner 5-cycle
    outer, mid, inner = v[:5], v[5:15], v[15:]
    for i in range(5):
        B.link((outer[i], 0), (outer[(i + 1) % 5], 1))
        B.link((outer[i], 2), (mid[2 * i], 2))
        B.link((inner[i], 0), (inner[(i + 1) % 5], 1))
        B.link((inner[i], 2), (mid[2 * i + 1], 2))
    for i in range(10):
        B.link((mid[i], 0), (mid[(i + 1) % 10], 1))
    D = B.build()
    with pytest.raises(IrreducibleError):
        tv.reduce(D, p)
