"""Analysis of the seed isometry V: h -> h (x) h.

V is stored as an array ``v[j, k, l] = <jk|V|l>``.  Generic morphisms
``Y^m -> Y^k`` are arrays with axes (outputs..., inputs...); leg bending uses
the canonical basis pairing.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegeneracyError, DegenerateBlobError, ShapeError

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class Isometry3:
    v: np.ndarray
    name: str = ""

    def __post_init__(self):
        v = np.asarray(self.v, dtype=complex)
        if v.ndim == 2:
            d = v.shape[1]
            if v.shape[0] != d * d:
                raise ShapeError(f"expected shape (d^2, d), got {v.shape}")
            v = v.reshape(d, d, d)
        if v.ndim != 3 or len(set(v.shape)) != 1:
            raise ShapeError(f"expected a (d, d, d) tensor, got {v.shape}")
        object.__setattr__(self, "v", v)

    @property
    def d(self) -> int:
        return self.v.shape[0]

    @property
    def matrix(self) -> np.ndarray:
        """V as a (d^2, d) matrix, rows indexed by j*d + k."""
        return self.v.reshape(self.d * self.d, self.d)

    def to_json(self):
        flat = self.v.reshape(-1)
        return {"d": self.d, "entries": [[float(z.real), float(z.imag)] for z in flat]}

    @classmethod
    def from_json(cls, obj):
        d = int(obj["d"])
        entries = np.array([complex(re, im) for re, im in obj["entries"]])
        if entries.size != d ** 3:
            raise ShapeError(f"need {d ** 3} entries, got {entries.size}")
        return cls(entries.reshape(d, d, d))


def qutrit() -> Isometry3:
    v = np.zeros((3, 3, 3))
    for j in range(3):
        for k in range(3):
            for l in range(3):
                if len({j, k, l}) == 3:
                    v[j, k, l] = 1 / np.sqrt(2)
    return Isometry3(v, "qutrit")


def random_isometry(d: int, rng) -> Isometry3:
    z = rng.normal(size=(d * d, d)) + 1j * rng.normal(size=(d * d, d))
    q, _ = np.linalg.qr(z)
    return Isometry3(q, "random")


# ---------------------------------------------------------------- leg bending

def rot(t: np.ndarray, m: int, k: int) -> np.ndarray:
    """Cyclically move legs: first output becomes first input, last input becomes last output."""
    if m < 1 or k < 1:
        raise ShapeError("rot needs at least one input and one output")
    order = list(range(1, k)) + [k + m - 1, 0] + list(range(k, k + m - 1))
    return t.transpose(order)


def down(t: np.ndarray, m: int, k: int) -> np.ndarray:
    """Bend the first output leg down into a new first input leg."""
    if k < 1:
        raise ShapeError("down needs an output leg")
    order = list(range(1, k)) + [0] + list(range(k, k + m))
    return t.transpose(order)


def _as_matrix(t: np.ndarray, m: int, k: int) -> np.ndarray:
    d = t.shape[0] if t.ndim else 1
    return t.reshape(d ** k, d ** m)


def proportional_to_isometry(mat: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    g = mat.conj().T @ mat
    n = g.shape[0]
    c = np.trace(g).real / n
    if c <= tol:
        return False
    return np.linalg.norm(g - c * np.eye(n)) <= tol * c * max(1, np.sqrt(n))


def state_tensor(V: Isometry3) -> np.ndarray:
    """V with its input leg raised: legs (in, out1, out2)."""
    return V.v.transpose(2, 0, 1)


def verify_tensor(V: Isometry3, tol: float = DEFAULT_TOL) -> dict:
    v = V.v
    mat = V.matrix
    isometry = bool(np.allclose(mat.conj().T @ mat, np.eye(V.d), atol=tol, rtol=0))
    swap = bool(np.allclose(v, v.transpose(1, 0, 2), atol=tol, rtol=0))

    t = state_tensor(V)
    legs = 3
    perfect = bool(np.linalg.norm(t) > tol)
    for i in range(1, legs // 2 + 1):
        s = t
        for step in range(i):
            s = down(s, step, legs - step)
        m, k = i, legs - i
        for _ in range(legs):
            perfect &= proportional_to_isometry(_as_matrix(s, m, k), tol)
            s = rot(s, m, k)
    rotated = rot(v, 1, 2)
    rotation = bool(np.allclose(rotated, v, atol=tol, rtol=0))
    return {"isometry": isometry, "swap_invariant": swap,
            "planar_perfect": perfect, "rotation_invariant": rotation}


# ---------------------------------------------------------------- ascending map

def ascend(V: Isometry3, a: np.ndarray) -> np.ndarray:
    """E(A) = V^dagger (A (x) 1) V."""
    v = V.v
    return np.einsum("jkl,jJ,Jkm->lm", v.conj(), a, v)


def fuse(V: Isometry3, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """F(A, B) = V^dagger (A (x) B) V."""
    v = V.v
    return np.einsum("jkl,jJ,kK,JKm->lm", v.conj(), a, b, v)


def ascending_superoperator(V: Isometry3) -> np.ndarray:
    """Matrix of E acting on row-major vectorised operators."""
    d = V.d
    v = V.v
    s = np.einsum("jkl,Jkm->lmjJ", v.conj(), v)
    return s.reshape(d * d, d * d)


def hs_inner(a: np.ndarray, b: np.ndarray) -> complex:
    """<a, b> = tr(a^dagger b) / d."""
    return np.vdot(a, b) / a.shape[0]


@dataclass
class AscendingSystem:
    d: int
    eigenvalues: np.ndarray
    mu: list
    nu: list
    labels: list = field(default_factory=list)
    fusion: np.ndarray | None = None

    @property
    def size(self):
        return len(self.eigenvalues)

    @property
    def scaling_dimensions(self) -> np.ndarray:
        lam = self.eigenvalues.astype(complex)
        with np.errstate(divide="ignore"):
            return -np.log2(np.abs(lam))

    def index(self, key) -> int:
        if isinstance(key, (int, np.integer)):
            if not 0 <= key < self.size:
                raise IndexError(f"field index {key} out of range")
            return int(key)
        if key in self.labels:
            return self.labels.index(key)
        try:
            return int(key)
        except ValueError:
            raise KeyError(f"unknown field label {key!r}") from None

    def coefficients(self, a: np.ndarray) -> np.ndarray:
        return np.array([hs_inner(n, a) for n in self.nu])

    def to_json(self):
        return {
            "d": self.d,
            "labels": self.labels,
            "eigenvalues": [[float(z.real), float(z.imag)] for z in self.eigenvalues],
            "scaling_dimensions": [float(h) for h in self.scaling_dimensions],
        }


QUTRIT_LABELS = ["1", "delta1", "delta2", "beta1", "beta2", "beta3",
                 "alpha1", "alpha2", "alpha3"]


def qutrit_basis() -> list:
    """The explicit eigenoperator basis in the order of the fusion table."""
    def m(rows):
        return np.array(rows, dtype=complex)
    return [
        np.eye(3, dtype=complex),
        m([[-1, 0, 0], [0, 0, 0], [0, 0, 1]]),
        m([[-1, 0, 0], [0, 1, 0], [0, 0, 0]]),
        m([[0, 0, 0], [0, 0, 1], [0, 1, 0]]),
        m([[0, 0, 1], [0, 0, 0], [1, 0, 0]]),
        m([[0, 1, 0], [1, 0, 0], [0, 0, 0]]),
        m([[0, 0, 0], [0, 0, -1], [0, 1, 0]]),
        m([[0, 0, -1], [0, 0, 0], [1, 0, 0]]),
        m([[0, -1, 0], [1, 0, 0], [0, 0, 0]]),
    ]


def _fix_phase(a: np.ndarray) -> np.ndarray:
    a = a / np.sqrt(hs_inner(a, a).real)
    flat = a.reshape(-1)
    idx = np.flatnonzero(np.abs(flat) > 1e-12)
    if idx.size:
        z = flat[idx[0]]
        a = a * (abs(z) / z)
    return a


def _duals(mu: list, d: int, cond_limit: float = 1e10) -> list:
    mat = np.column_stack([m.reshape(-1) for m in mu])
    if np.linalg.cond(mat) > cond_limit:
        raise DegeneracyError("eigenoperators do not form a basis")
    inv = np.linalg.inv(mat)
    nu_mat = d * inv.conj().T
    return [nu_mat[:, i].reshape(d, d) for i in range(len(mu))]


def ascending_eigensystem(V: Isometry3, basis: list | None = None,
                          labels: list | None = None, tol: float = DEFAULT_TOL) -> AscendingSystem:
    """Eigendata of E, with duals normalised by the 1/d Hilbert-Schmidt pairing.

    With an explicit ``basis`` the eigen-relations are verified instead of computed.
    """
    d = V.d
    if basis is not None:
        mu = [np.asarray(b, dtype=complex) for b in basis]
        lams = []
        for m in mu:
            em = ascend(V, m)
            lam = hs_inner(m, em) / hs_inner(m, m)
            if np.linalg.norm(em - lam * m) > tol * max(1.0, np.linalg.norm(m)):
                raise DegeneracyError("supplied operator is not an eigenvector of E")
            lams.append(lam)
        lams = np.array(lams)
    else:
        s = ascending_superoperator(V)
        vals, vecs = np.linalg.eig(s)
        mu = [vecs[:, i].reshape(d, d) for i in range(d * d)]
        # order: eigenvalue 1 first, then by decreasing modulus, then by phase
        order = sorted(range(d * d), key=lambda i: (abs(vals[i] - 1) > 1e-8,
                                                    -round(abs(vals[i]), 9),
                                                    round(float(np.angle(vals[i])), 9), i))
        vals = vals[order]
        mu = [mu[i] for i in order]
        ident = np.eye(d, dtype=complex)
        if abs(vals[0] - 1) < 1e-8:
            ones = [i for i in range(d * d) if abs(vals[i] - 1) < 1e-8]
            overlaps = [abs(hs_inner(mu[i], ident)) for i in ones]
            pick = ones[int(np.argmax(overlaps))]
            mu[pick], mu[0] = mu[0], mu[pick]
            mu[0] = ident
            vals[0] = 1.0
        mu = [mu[0]] + [_fix_phase(m) for m in mu[1:]]
        lams = vals
    nu = _duals(mu, d)
    lbl = labels if labels is not None else [str(i) for i in range(len(mu))]
    return AscendingSystem(d=d, eigenvalues=np.asarray(lams, dtype=complex), mu=mu, nu=nu,
                           labels=list(lbl))


def qutrit_system(V: Isometry3 | None = None) -> AscendingSystem:
    V = V or qutrit()
    sys = ascending_eigensystem(V, basis=qutrit_basis(), labels=QUTRIT_LABELS)
    sys.fusion = fusion_coefficients(sys, V)
    return sys


def fusion_coefficients(sys: AscendingSystem, V: Isometry3,
                        convention: str = "dual") -> np.ndarray:
    """f[a, b, c] = tr(w_c^dagger F(mu_a, mu_b)) / d.

    With convention "dual", w = nu and F(mu_a, mu_b) = sum_c f[a, b, c] mu_c
    exactly.  With "projection", w = mu; this is the plain Hilbert-Schmidt
    overlap, which differs from the expansion coefficient whenever the mu basis
    is not orthonormal.  Only the dual array is cached on ``sys``.
    """
    if convention not in ("dual", "projection"):
        raise ValueError(f"unknown convention {convention!r}")
    w = sys.nu if convention == "dual" else sys.mu
    n = sys.size
    out = np.zeros((n, n, n), dtype=complex)
    for a in range(n):
        for b in range(n):
            fab = fuse(V, sys.mu[a], sys.mu[b])
            for c in range(n):
                out[a, b, c] = hs_inner(w[c], fab)
    if convention == "dual":
        sys.fusion = out
    return out


def biorthogonality_residual(sys: AscendingSystem) -> float:
    g = np.array([[hs_inner(n, m) for m in sys.mu] for n in sys.nu])
    return float(np.abs(g - np.eye(sys.size)).max())


def eigen_residual(sys: AscendingSystem, V: Isometry3) -> float:
    return max(float(np.linalg.norm(ascend(V, m) - lam * m))
               for m, lam in zip(sys.mu, sys.eigenvalues))


def fusion_residual(sys: AscendingSystem, V: Isometry3) -> float:
    f = sys.fusion if sys.fusion is not None else fusion_coefficients(sys, V)
    worst = 0.0
    for a in range(sys.size):
        for b in range(sys.size):
            lhs = fuse(V, sys.mu[a], sys.mu[b])
            rhs = sum(f[a, b, c] * sys.mu[c] for c in range(sys.size))
            worst = max(worst, float(np.linalg.norm(lhs - rhs)))
    return worst


# ---------------------------------------------------------------- blobs

def blob_residual(V: Isometry3, b) -> float:
    b = np.asarray(b, dtype=complex)
    if np.linalg.norm(b) == 0:
        raise DegenerateBlobError("blob vector must be nonzero")
    lhs = np.einsum("jkl,j,k->l", V.v.conj(), b, b)
    return float(np.linalg.norm(lhs - b))


def verify_blob(V: Isometry3, b, tol: float = DEFAULT_TOL) -> bool:
    """True iff V^dagger (b (x) b) = b, i.e. the two-blob caret collapses to one blob."""
    return blob_residual(V, b) <= tol


def qutrit_blobs() -> list:
    s = 1 / np.sqrt(2)
    return [s * np.array(v, dtype=float) for v in
            ([1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1])]


PRESETS = {"qutrit": qutrit}


def preset(name: str) -> Isometry3:
    try:
        return PRESETS[name]()
    except KeyError:
        raise KeyError(f"unknown tensor preset {name!r}") from None
