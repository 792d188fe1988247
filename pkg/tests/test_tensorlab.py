import numpy as np
import pytest

from thompsonft.errors import DegenerateBlobError, ShapeError
from thompsonft.tensorlab import (
    Isometry3, ascend, ascending_eigensystem, biorthogonality_residual, blob_residual,
    fusion_coefficients, fusion_residual, fuse, hs_inner, preset, qutrit, qutrit_blobs,
    qutrit_system, random_isometry, verify_blob, verify_tensor,
)

V = qutrit()


def test_qutrit_entries():
    for j in range(3):
        for k in range(3):
            for l in range(3):
                expected = 0 if len({j, k, l}) < 3 else 1 / np.sqrt(2)
                assert abs(V.v[j, k, l] - expected) < 1e-15


def test_verify_qutrit():
    assert verify_tensor(V) == {"isometry": True, "swap_invariant": True,
                                "planar_perfect": True, "rotation_invariant": True}


def test_verify_zero_and_random(rng):
    assert not verify_tensor(Isometry3(np.zeros((3, 3, 3))))["isometry"]
    perfect = 0
    for _ in range(20):
        rep = verify_tensor(random_isometry(3, rng))
        assert rep["isometry"]
        perfect += rep["planar_perfect"]
    assert perfect == 0


def test_shape_errors():
    with pytest.raises(ShapeError):
        Isometry3(np.zeros((3, 3, 2)))
    with pytest.raises(ShapeError):
        Isometry3(np.zeros((8, 3)))


def test_json_roundtrip():
    assert np.array_equal(Isometry3.from_json(V.to_json()).v, V.v)
    assert np.array_equal(preset("qutrit").v, V.v)


def test_unital(rng):
    for _ in range(5):
        W = random_isometry(3, rng)
        assert np.allclose(ascend(W, np.eye(3)), np.eye(3))


def test_eigensystem_generic(rng):
    W = random_isometry(2, rng)
    sys_ = ascending_eigensystem(W)
    assert abs(sys_.eigenvalues[0] - 1) < 1e-9
    assert biorthogonality_residual(sys_) < 1e-9
    for mu, lam in zip(sys_.mu, sys_.eigenvalues):
        assert np.allclose(ascend(W, mu), lam * mu)


def test_expansion_identity(rng):
    sys_ = qutrit_system()
    for _ in range(50):
        a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        back = sum(hs_inner(n, a) * m for n, m in zip(sys_.nu, sys_.mu))
        assert np.abs(back - a).max() < 1e-9


def test_scaling_dimensions():
    h = qutrit_system().scaling_dimensions
    assert abs(h[0]) < 1e-12
    assert np.allclose(h[1:], 1.0)


def test_fusion_identity_row():
    sys_ = qutrit_system()
    f = sys_.fusion
    for b in range(9):
        for g in range(9):
            expected = sys_.eigenvalues[b] if b == g else 0
            assert abs(f[0, b, g] - expected) < 1e-9
    assert fusion_residual(sys_, V) < 1e-9


def test_fusion_conventions():
    sys_ = qutrit_system()
    b2, a3, a1 = (sys_.index(x) for x in ("beta2", "alpha3", "alpha1"))
    proj = fusion_coefficients(sys_, V, "projection")
    assert abs(proj[b2, a3, a1] - 1 / 3) < 1e-9
    # the dual expansion reconstructs F exactly
    dual = fusion_coefficients(sys_, V, "dual")
    F = fuse(V, sys_.mu[b2], sys_.mu[a3])
    assert np.abs(sum(dual[b2, a3, g] * sys_.mu[g] for g in range(9)) - F).max() < 1e-12


def test_blobs(rng):
    b1 = np.ones(3) / np.sqrt(2)
    assert verify_blob(V, b1)
    assert not verify_blob(V, np.array([1.0, 0, 0]))
    assert all(verify_blob(V, b) for b in qutrit_blobs())
    with pytest.raises(DegenerateBlobError):
        blob_residual(V, np.zeros(3))
