"""Evaluation of planar trivalent diagrams by local skein moves.

Diagrams are rotation systems.  Every internal vertex lists its three slots in
counterclockwise order.  A diagram is a morphism drawn in the plane with
``n_up`` boundary points on its top edge and ``n_low`` on its bottom edge, both
numbered from left to right; a disk diagram with n points has n_up = n.  Going
clockwise around the disk the points read U0..U(n_up-1), L(n_low-1)..L0.

Moves, each applied to an internal face whose vertices are distinct:
loop -> d, lollipop -> 0, bigon -> b, triangle -> t, square -> its expansion
in the faceless four-point diagrams.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import GramError, IrreducibleError, ParameterError

PHI_PLUS = (1 + math.sqrt(5)) / 2
PHI_MINUS = (1 - math.sqrt(5)) / 2
OMEGA = cmath.exp(4j * math.pi / 5)


# ---------------------------------------------------------------- parameters

@dataclass(frozen=True)
class TrivalentParams:
    d: complex
    b: complex
    t: complex
    dimC4: int = 4
    tol: float = 1e-9

    def __post_init__(self):
        d, b, t = complex(self.d), complex(self.b), complex(self.t)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "t", t)
        if abs(d) < self.tol or abs(b) < self.tol:
            raise ParameterError("loop and bigon values must be nonzero")
        if self.dimC4 not in (2, 3, 4):
            raise ParameterError("dimC4 must be 2, 3 or 4")
        scale = max(1.0, abs(d), abs(b), abs(t)) ** 2
        if self.dimC4 == 3 and abs(pso3(self)) > self.tol * scale:
            raise ParameterError("dimC4 = 3 needs bd + t - dt - 2b = 0")
        if self.dimC4 == 2:
            c1, c2 = fib_conditions(self)
            if abs(c1) > self.tol * scale or abs(c2) > self.tol * scale ** 3:
                raise ParameterError("dimC4 = 2 needs the Fibonacci parameters")

    def to_json(self):
        return {"d": _cjson(self.d), "b": _cjson(self.b), "t": _cjson(self.t),
                "dimC4": self.dimC4}


def _cjson(z: complex):
    return [float(z.real), float(z.imag)]


def pso3(p: TrivalentParams) -> complex:
    return p.b * p.d + p.t - p.d * p.t - 2 * p.b


def fib_conditions(p: TrivalentParams):
    d, b, t = p.d, p.b, p.t
    return (b * d + t + d * t,
            2 * b ** 5 * d + 2 * b ** 4 * d * t - 4 * b ** 3 * d * t ** 2
            + 2 * b * d * t ** 4 + 2 * b * d ** 2 * t ** 4)


def fibonacci(b: complex = 1.0, branch: str = "+") -> TrivalentParams:
    """d = Phi+, t = b Phi- (branch "+"), or the conjugate pair."""
    if branch == "+":
        return TrivalentParams(PHI_PLUS, b, b * PHI_MINUS, dimC4=2)
    return TrivalentParams(PHI_MINUS, b, b * PHI_PLUS, dimC4=2)


def so3_point(d: complex, b: complex) -> TrivalentParams:
    """Parameters on the SO(3)_q family: t solves bd + t - dt - 2b = 0."""
    return TrivalentParams(d, b, b * (2 - d) / (1 - d), dimC4=3)


# ---------------------------------------------------------------- diagrams

def _is_boundary(v) -> bool:
    return isinstance(v, tuple) and v[0] in ("U", "L")


def _is_pass(v) -> bool:
    return isinstance(v, tuple) and v[0] == "P"


@dataclass
class Diagram:
    n_up: int
    n_low: int = 0
    deg: dict = field(default_factory=dict)     # internal and pass vertices -> degree
    pair: dict = field(default_factory=dict)    # half-edge -> half-edge
    circles: int = 0

    def copy(self) -> "Diagram":
        return Diagram(self.n_up, self.n_low, dict(self.deg), dict(self.pair), self.circles)

    @property
    def boundary(self):
        return ([("U", i) for i in range(self.n_up)]
                + [("L", i) for i in reversed(range(self.n_low))])

    @property
    def internal(self):
        return [v for v in self.deg if not _is_pass(v)]

    def degree(self, v) -> int:
        return 1 if _is_boundary(v) else self.deg[v]

    def connect(self, h1, h2):
        self.pair[h1] = h2
        self.pair[h2] = h1

    def fresh(self) -> int:
        ints = [v for v in self.deg if isinstance(v, int)]
        return max(ints, default=-1) + 1

    def is_closed(self) -> bool:
        return self.n_up == 0 and self.n_low == 0

    # -- serialization
    def to_json(self):
        names = self.boundary + sorted(self.internal)
        index = {v: i for i, v in enumerate(names)}
        half = [(v, s) for v in names for s in range(self.degree(v))]
        hidx = {h: i for i, h in enumerate(half)}
        pairs = sorted({tuple(sorted((hidx[a], hidx[b]))) for a, b in self.pair.items()})
        return {"boundary": self.n_up, "lower": self.n_low,
                "vertices": [self.degree(v) for v in names],
                "half_edges": [[index[v], s] for v, s in half],
                "pairing": [list(p) for p in pairs], "circles": self.circles}

    @classmethod
    def from_json(cls, obj) -> "Diagram":
        n_up, n_low = int(obj["boundary"]), int(obj.get("lower", 0))
        D = cls(n_up, n_low, circles=int(obj.get("circles", 0)))
        names = D.boundary
        degs = obj["vertices"]
        nb = len(names)
        for i in range(nb, len(degs)):
            if degs[i] != 3:
                raise ValueError("internal vertices must be trivalent")
            D.deg[i - nb] = 3
        names = names + list(range(len(degs) - nb))
        half = [(names[v], s) for v, s in obj["half_edges"]]
        for i, j in obj["pairing"]:
            D.connect(half[i], half[j])
        _check(D)
        return D


def _check(D: Diagram):
    for v in D.boundary:
        if (v, 0) not in D.pair:
            raise ValueError(f"boundary point {v} is not connected")
    for v, k in D.deg.items():
        for s in range(k):
            if (v, s) not in D.pair:
                raise ValueError(f"slot {s} of vertex {v} is not connected")


def contract_passes(D: Diagram) -> Diagram:
    """Remove degree-2 pass vertices, closing pass-only cycles into circles."""
    D = D.copy()
    passes = [v for v in D.deg if _is_pass(v)]
    for p in passes:
        a, b = D.pair[(p, 0)], D.pair[(p, 1)]
        del D.deg[p]
        del D.pair[(p, 0)], D.pair[(p, 1)]
        if a == (p, 1):
            D.circles += 1
            continue
        D.connect(a, b)
    return D


def _relabel(D: Diagram, offset: int):
    """Internal vertex ids shifted by ``offset``; returns (deg, pair) maps."""
    def f(v):
        return v + offset if isinstance(v, int) else v
    deg = {f(v): k for v, k in D.deg.items()}
    pair = {(f(a[0]), a[1]): (f(b[0]), b[1]) for a, b in D.pair.items()}
    return deg, pair


def stack(top: Diagram, bottom: Diagram) -> Diagram:
    """Glue the bottom points of ``top`` to the top points of ``bottom``."""
    if top.n_low != bottom.n_up:
        raise ValueError(f"cannot stack {top.n_low} points onto {bottom.n_up}")
    off = top.fresh()
    p1 = _relabel(top, 0)
    p2 = _relabel(bottom, off)
    glue = [("P", ("stack", i)) for i in range(top.n_low)]

    def rename(part, v):
        if part == 0:
            return v if v[0] == "U" else glue[v[1]]
        return v if v[0] == "L" else glue[v[1]]

    out = Diagram(top.n_up, bottom.n_low, circles=top.circles + bottom.circles)
    for part, (deg, pair) in enumerate((p1, p2)):
        out.deg.update(deg)
        for a, b in pair.items():
            a2 = _rename_half(part, a, rename, glue)
            b2 = _rename_half(part, b, rename, glue)
            out.pair[a2] = b2
    for g in glue:
        out.deg[g] = 2
    return contract_passes(out)


def _rename_half(part, h, rename, glue):
    v, s = h
    if not _is_boundary(v):
        return h
    nv = rename(part, v)
    if _is_boundary(nv):
        return (nv, 0)
    # glue vertex: slot 0 faces the top part, slot 1 the bottom part
    return (nv, part)


def tensor(a: Diagram, b: Diagram) -> Diagram:
    """Place ``b`` to the right of ``a``."""
    off = a.fresh()
    out = Diagram(a.n_up + b.n_up, a.n_low + b.n_low, circles=a.circles + b.circles)
    out.deg.update(a.deg)
    out.pair.update(a.pair)
    deg, pair = _relabel(b, off)
    out.deg.update(deg)

    def shift(h):
        v, s = h
        if _is_boundary(v):
            return ((v[0], v[1] + (a.n_up if v[0] == "U" else a.n_low)), s)
        return h
    for x, y in pair.items():
        out.pair[shift(x)] = shift(y)
    return out


def mirror(D: Diagram) -> Diagram:
    """Reverse every rotation, keeping boundary labels."""
    out = D.copy()
    out.pair = {}

    def flip(h):
        v, s = h
        if _is_boundary(v) or _is_pass(v):
            return h
        return (v, (D.deg[v] - 1 - s) % D.deg[v])
    for a, b in D.pair.items():
        out.pair[flip(a)] = flip(b)
    return out


def dagger(D: Diagram) -> Diagram:
    """Reflection across a horizontal line: top and bottom points swap."""
    out = mirror(D)
    swapped = {}

    def sw(h):
        v, s = h
        if _is_boundary(v):
            return (("L" if v[0] == "U" else "U", v[1]), s)
        return h
    for a, b in out.pair.items():
        swapped[sw(a)] = sw(b)
    out.pair = swapped
    out.n_up, out.n_low = D.n_low, D.n_up
    return out


def glue_closed(D1: Diagram, D2: Diagram) -> Diagram:
    """The closed diagram pairing the mirror image of D1 with D2."""
    if (D1.n_up, D1.n_low) != (D2.n_up, D2.n_low):
        raise ValueError("diagrams have different boundaries")
    m = mirror(D1)
    off = m.fresh()
    deg2, pair2 = _relabel(D2, off)
    out = Diagram(0, 0, circles=D1.circles + D2.circles)
    glue = {v: ("P", v) for v in D1.boundary}
    for part, (deg, pair) in enumerate(((m.deg, m.pair), (deg2, pair2))):
        out.deg.update(deg)
        for a, b in pair.items():
            out.pair[_gl(a, glue, part)] = _gl(b, glue, part)
    for g in glue.values():
        out.deg[g] = 2
    return contract_passes(out)


def _gl(h, glue, part):
    v, s = h
    if _is_boundary(v):
        return (glue[v], part)
    return h


# ---------------------------------------------------------------- builders

class Builder:
    """Small helper for writing diagrams by hand."""

    def __init__(self, n_up: int, n_low: int = 0):
        self.D = Diagram(n_up, n_low)

    def vertex(self) -> int:
        v = self.D.fresh()
        self.D.deg[v] = 3
        return v

    def link(self, a, b):
        self.D.connect(_half(a), _half(b))
        return self

    def build(self) -> Diagram:
        _check(self.D)
        return self.D


def _half(x):
    if isinstance(x, str):
        return ((x[0], int(x[1:])), 0)
    return x


def identity_diagram(n: int) -> Diagram:
    B = Builder(n, n)
    for i in range(n):
        B.link(f"U{i}", f"L{i}")
    return B.build()


def cupcap() -> Diagram:
    return Builder(2, 2).link("U0", "U1").link("L0", "L1").build()


def circle() -> Diagram:
    return Diagram(0, 0, circles=1)


def theta() -> Diagram:
    B = Builder(0)
    u, v = B.vertex(), B.vertex()
    for s in range(3):
        B.link((u, s), (v, 2 - s))
    return B.build()


def lollipop_closed() -> Diagram:
    """A circle with a lollipop attached to it."""
    B = Builder(0)
    u, v = B.vertex(), B.vertex()
    B.link((u, 0), (u, 1)).link((u, 2), (v, 0)).link((v, 1), (v, 2))
    return B.build()


def beta4(i: int) -> Diagram:
    """The faceless four-point diagrams, points 0..3 left to right on top."""
    B = Builder(4)
    if i == 1:
        B.link("U0", "U3").link("U1", "U2")
    elif i == 2:
        B.link("U0", "U1").link("U2", "U3")
    elif i == 3:
        u, v = B.vertex(), B.vertex()
        B.link((u, 0), (v, 0)).link((u, 1), "U1").link((u, 2), "U0")
        B.link((v, 1), "U3").link((v, 2), "U2")
    elif i == 4:
        u, v = B.vertex(), B.vertex()
        B.link((u, 0), "U2").link((u, 1), "U1").link((u, 2), (v, 1))
        B.link((v, 0), "U3").link((v, 2), "U0")
    else:
        raise ValueError("beta4 index runs from 1 to 4")
    return B.build()


def square4() -> Diagram:
    """The four-point diagram with one square face."""
    B = Builder(4)
    a, b, c, e = (B.vertex() for _ in range(4))
    B.link((a, 0), (c, 1)).link((a, 1), "U0").link((a, 2), (b, 2))
    B.link((b, 0), "U3").link((b, 1), (e, 2))
    B.link((c, 0), "U1").link((c, 2), (e, 1))
    B.link((e, 0), "U2")
    return B.build()


def vertex_tangle() -> Diagram:
    B = Builder(3)
    v = B.vertex()
    B.link((v, 0), "U0").link((v, 1), "U2").link((v, 2), "U1")
    return B.build()


def strand_tangle() -> Diagram:
    return Builder(2).link("U0", "U1").build()


# ---------------------------------------------------------------- faces

def faces(D: Diagram):
    """All faces as (darts, touches_outside).  A dart (v, s) leaves v via s."""
    bnd = D.boundary
    pos = {v: k for k, v in enumerate(bnd)}
    darts = [(v, 0) for v in bnd] + [(v, s) for v, k in D.deg.items() for s in range(k)]
    seen = set()
    out = []
    for start in darts:
        if start in seen:
            continue
        cyc, outer, h = [], False, start
        while h not in seen:
            seen.add(h)
            cyc.append(h)
            w, j = D.pair[h]
            if _is_boundary(w):
                outer = True
                h = (bnd[(pos[w] - 1) % len(bnd)], 0)
            else:
                h = (w, (j - 1) % D.deg[w])
        out.append((cyc, outer))
    return out


def euler_characteristic(D: Diagram) -> int:
    """V - E + F with the outside collapsed to one vertex."""
    nb = len(D.boundary)
    V = len(D.deg) + (1 if nb else 0)
    E = len(D.pair) // 2
    F = len(faces(D))
    return V - E + F


def components(D: Diagram) -> int:
    parent = {}

    def find(x):
        while parent.setdefault(x, x) != x:
            x = parent[x]
        return x
    nodes = list(D.deg) + (["O"] if D.boundary else [])
    for v in nodes:
        find(v)
    for (a, _), (b, _) in D.pair.items():
        ra = "O" if _is_boundary(a) else a
        rb = "O" if _is_boundary(b) else b
        parent[find(ra)] = find(rb)
    return len({find(v) for v in nodes})


def is_planar(D: Diagram) -> bool:
    return euler_characteristic(D) == 2 * components(D)


# ---------------------------------------------------------------- moves

def _move_candidates(D: Diagram):
    cands = []
    for cyc, outer in faces(D):
        if outer:
            continue
        verts = [v for v, _ in cyc]
        if len(cyc) == 1:
            cands.append((1, cyc))
            continue
        if len(cyc) <= 4 and len(set(verts)) == len(verts) and not any(_is_pass(v) for v in verts):
            cands.append((len(cyc), cyc))
    return cands


def _square_tangles(p: TrivalentParams):
    coeffs, _ = square_window(p)
    return [(c, beta4(i + 1)) for i, c in enumerate(coeffs)]


def _substitute(D: Diagram, cyc, tangle: Diagram) -> Diagram:
    """Replace the face's vertices by ``tangle`` (a k-point disk diagram)."""
    k = len(cyc)
    region = [v for v, _ in cyc]
    # external slot of each vertex: the one before its outgoing face slot
    ext = [(v, (s - 1) % 3) for v, s in cyc]
    ext_index = {h: m for m, h in enumerate(ext)}
    out = D.copy()
    for v in region:
        del out.deg[v]
        for s in range(3):
            out.pair.pop((v, s), None)
    off = out.fresh()
    deg, pair = _relabel(tangle, off)
    out.deg.update(deg)
    out.circles += tangle.circles
    plug = [("P", ("sub", m)) for m in range(k)]
    for g in plug:
        out.deg[g] = 2
    # outside side
    for m, h in enumerate(ext):
        target = D.pair[h]
        if target in ext_index:
            out.connect((plug[m], 0), (plug[ext_index[target]], 0))
        else:
            out.connect((plug[m], 0), target)
    # tangle side: tangle point j sits at region leg -j (clockwise order)
    def tmap(h):
        v, s = h
        if _is_boundary(v):
            return (plug[(-v[1]) % k], 1)
        return h
    for a, b in pair.items():
        out.pair[tmap(a)] = tmap(b)
    return contract_passes(out)


def _apply(D: Diagram, size: int, cyc, p: TrivalentParams):
    """Terms (coefficient, diagram) replacing D after one move."""
    if size == 1:
        return []
    if size == 2:
        return [(p.b, _substitute(D, cyc, strand_tangle()))]
    if size == 3:
        return [(p.t, _substitute(D, cyc, vertex_tangle()))]
    return [(c, _substitute(D, cyc, tg)) for c, tg in _square_tangles(p)]


@dataclass
class DiagramSum:
    terms: list = field(default_factory=list)   # (coefficient, Diagram)

    @classmethod
    def of(cls, D: Diagram, c: complex = 1.0) -> "DiagramSum":
        return cls([(complex(c), D)])

    def __add__(self, other):
        return DiagramSum(self.terms + other.terms)

    def scale(self, c) -> "DiagramSum":
        return DiagramSum([(c * a, D) for a, D in self.terms])

    def dagger(self) -> "DiagramSum":
        return DiagramSum([(np.conj(a), dagger(D)) for a, D in self.terms])

    def is_scalar(self) -> bool:
        return all(D.is_closed() and not D.deg and D.circles == 0 for _, D in self.terms)

    def scalar(self) -> complex:
        return complex(sum(a for a, _ in self.terms))


def product(*sums) -> DiagramSum:
    """Vertical composition, first argument on top."""
    out = sums[0]
    for s in sums[1:]:
        out = DiagramSum([(a * b, stack(D, E)) for a, D in out.terms for b, E in s.terms])
    return out


def tensor_sum(x: DiagramSum, y: DiagramSum) -> DiagramSum:
    return DiagramSum([(a * b, tensor(D, E)) for a, D in x.terms for b, E in y.terms])


def _as_sum(x) -> DiagramSum:
    return x if isinstance(x, DiagramSum) else DiagramSum.of(x)


def reduce(s, p: TrivalentParams, rng=None):
    """Apply moves to a fixed point.

    Faces are taken smallest first, then in enumeration order; with ``rng`` a
    random eligible face is used instead.  Closed input returns a scalar.
    """
    s = _as_sum(s)
    done = []
    work = list(s.terms)
    while work:
        c, D = work.pop()
        if abs(c) == 0:
            continue
        cands = _move_candidates(D)
        if not cands:
            if D.circles:
                c *= p.d ** D.circles
                D = D.copy()
                D.circles = 0
            if D.is_closed() and D.deg:
                raise IrreducibleError("closed diagram has no face with at most four sides")
            done.append((c, D))
            continue
        if rng is None:
            size, cyc = min(cands, key=lambda x: x[0])
        else:
            size, cyc = cands[int(rng.integers(len(cands)))]
        for a, E in _apply(D, size, cyc, p):
            work.append((c * a, E))
    out = DiagramSum(done)
    if all(D.is_closed() for _, D in done):
        return out.scalar()
    return out


def inner_product(x, y, p: TrivalentParams, rng=None) -> complex:
    """<x, y> = tr(x^dagger y): mirror x, glue its boundary to y, evaluate."""
    x, y = _as_sum(x), _as_sum(y)
    total = 0j
    for a, D in x.terms:
        for b, E in y.terms:
            total += np.conj(a) * b * reduce(glue_closed(D, E), p, rng)
    return complex(total)


def gram_matrix(diagrams, p: TrivalentParams) -> np.ndarray:
    n = len(diagrams)
    G = np.zeros((n, n), dtype=complex)
    for i in range(n):
        for j in range(i, n):
            G[i, j] = inner_product(diagrams[i], diagrams[j], p)
            G[j, i] = np.conj(G[i, j]) if _real(p) else inner_product(diagrams[j], diagrams[i], p)
    return G


def _real(p: TrivalentParams) -> bool:
    return all(abs(z.imag) < 1e-15 for z in (p.d, p.b, p.t))


# ---------------------------------------------------------------- orthonormalization

@dataclass
class Orthonormal:
    G: np.ndarray
    Theta: np.ndarray
    rank: int

    def coefficients(self, overlaps) -> np.ndarray:
        """c_k = sum_jl conj(Theta_jl) Theta_jk <beta_l, x>."""
        ov = np.asarray(overlaps, dtype=complex)
        return np.einsum("jl,jk,l->k", self.Theta.conj(), self.Theta, ov)


def gram_orthonormalize(G, tol: float = 1e-9) -> Orthonormal:
    """Gram-Schmidt on the Gram matrix; dependent vectors get a zero row.

    Theta is lower triangular with Theta G Theta^dagger the identity on the
    span (zero rows for dependent vectors).
    """
    G = np.asarray(G, dtype=complex)
    n = G.shape[0]
    if np.abs(G - G.conj().T).max() > tol * max(1.0, np.abs(G).max()):
        raise GramError("Gram matrix is not Hermitian")
    Theta = np.zeros((n, n), dtype=complex)
    scale = max(1.0, float(np.abs(np.diag(G)).max()))
    rank = 0
    for i in range(n):
        v = np.zeros(n, dtype=complex)
        v[i] = 1.0
        for j in range(i):
            if not Theta[j].any():
                continue
            proj = Theta[j].conj() @ G @ v
            v = v - proj * Theta[j]
        nrm2 = (v.conj() @ G @ v).real
        if nrm2 < -tol * scale:
            raise GramError(f"Gram matrix is indefinite (norm^2 {nrm2:.3g})")
        if nrm2 <= tol * scale:
            continue
        Theta[i] = v / math.sqrt(nrm2)
        rank += 1
    return Orthonormal(G, Theta, rank)


# ---------------------------------------------------------------- closed forms

def square_window(p: TrivalentParams, printed: bool = False):
    """Expansion of the square in beta4_1..k and the window value w4.

    For dimC4 = 3 the commonly printed third component carries a factor d + 1;
    solving the Gram system gives d - 1, which is also what the printed w4
    requires.  ``printed=True`` returns the d + 1 variant for comparison.
    """
    d, b, t = p.d, p.b, p.t
    if p.dimC4 == 2:
        c = b * b / (d + 1)
        return [c, c], 2 * b ** 4 * d / (d + 1)
    if p.dimC4 == 3:
        q = d * d - d - 1
        if abs(q) < p.tol:
            raise ParameterError("dimC4 = 3 formulas need d^2 - d - 1 != 0")
        coeffs = [(b * b * d - b * b - d * t * t) / q,
                  (b * b * d - 2 * b * b + t * t) / q,
                  ((d + 1) if printed else (d - 1)) * (d * t * t + t * t - b * b) / (b * q)]
        w = d * (-3 * b ** 4 + 2 * b ** 4 * d + 2 * b * b * t * t - 2 * b * b * d * t * t
                 - t ** 4 + d * d * t ** 4) / q
        return coeffs, w
    q = b * d + t + d * t
    if abs(q) < p.tol:
        raise ParameterError("dimC4 = 4 formulas need bd + t + dt != 0")
    c12 = b * (b * b + b * t - t * t) / q
    c34 = (t * t * (d + 1) - b * b) / q
    w = 2 * b * d * (b ** 4 + b ** 3 * t - 2 * b * b * t * t + t ** 4 + d * t ** 4) / q
    return [c12, c12, c34, c34], w


def m41_symbolic(p: TrivalentParams, w4: complex | None = None) -> np.ndarray:
    d, b, t = p.d, p.b, p.t
    if w4 is None:
        w4 = square_window(p)[1]
    return np.array([
        [d * d, d, b * d, 0, b * b * d],
        [d, d * d, 0, b * d, b * b * d],
        [b * d, 0, b * b * d, b * d * t, b * d * t * t],
        [0, b * d, b * d * t, b * b * d, b * d * t * t],
        [b * b * d, b * b * d, b * d * t * t, b * d * t * t, w4],
    ], dtype=complex)


def m41_numeric(p: TrivalentParams) -> np.ndarray:
    return gram_matrix([beta4(i) for i in range(1, 5)] + [square4()], p)


def det_m40_symbolic(p: TrivalentParams) -> complex:
    d, b, t = p.d, p.b, p.t
    return b * b * d ** 4 * (b * d + t - d * t - 2 * b) * (b * d + t + d * t)


# ---------------------------------------------------------------- Fibonacci

def crossing(over: str = "/") -> DiagramSum:
    """A crossing on two strands, resolved.

    With the over strand running bottom-left to top-right ("/") the crossing is
    the vertical pair plus e^{4 pi i / 5} times the horizontal pair; the other
    crossing swaps the two roles.
    """
    vertical, horizontal = identity_diagram(2), cupcap()
    if over == "/":
        return DiagramSum([(1.0, vertical), (OMEGA, horizontal)])
    return DiagramSum([(1.0, horizontal), (OMEGA, vertical)])


def doubled_vertex(p: TrivalentParams) -> DiagramSum:
    """The doubled-line vertex: two vertices braided together, divided by b.

    Top points (input pair) U0, U1; bottom points L0..L3 form the left and
    right output pairs.  The vertex u1 carries U0, L1, L3 and passes over;
    u2 carries U1, L0, L2 and passes under at two crossings, each resolved by
    :func:`crossing`.
    """
    terms = []
    for r1, r2 in itertools.product((0, 1), repeat=2):
        B = Builder(2, 4)
        u1, u2 = B.vertex(), B.vertex()
        up1, left1, right1 = (u1, 0), (u1, 1), (u1, 2)
        up2, left2, down2 = (u2, 0), (u2, 1), (u2, 2)
        B.link(up1, "U0").link(down2, "L2")
        weight = 1.0
        # first crossing: over strand from u1 to L1, under strand from u2 to L0
        if r1 == 0:
            B.link("L0", "L1").link(left1, left2)
        else:
            B.link("L1", left2).link("L0", left1)
            weight *= OMEGA
        # second crossing: over strand from u1 to L3, under strand from u2 to U1
        if r2 == 0:
            B.link(right1, "U1").link(up2, "L3")
        else:
            B.link(right1, up2).link("U1", "L3")
            weight *= OMEGA
        terms.append((weight / p.b, B.build()))
    return DiagramSum(terms)


def fib_basis():
    """Operators on a doubled leg: the identity pair and the cup-cap."""
    return [identity_diagram(2), cupcap()]


def _eye_pair() -> DiagramSum:
    return DiagramSum.of(identity_diagram(2))


def ascend_diagram(V: DiagramSum, A: DiagramSum) -> DiagramSum:
    """E(A) = V^dagger (A (x) 1) V, V drawn on top."""
    return product(V, tensor_sum(A, _eye_pair()), V.dagger())


def fuse_diagram(V: DiagramSum, A: DiagramSum, B: DiagramSum) -> DiagramSum:
    return product(V, tensor_sum(A, B), V.dagger())


@dataclass
class DiagramAscendingSystem:
    """Ascending data on a space of diagrams, coordinates in ``basis``."""
    labels: list
    E: np.ndarray
    eigenvalues: np.ndarray
    mu: np.ndarray          # row a: coordinates of mu_a
    nu: np.ndarray          # row a: coordinates of the dual nu_a
    fusion: np.ndarray      # f[a, b, c]
    N: list
    gram: np.ndarray
    leg_dimension: complex

    @property
    def scaling_dimensions(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return -np.log2(np.abs(self.eigenvalues))

    def fusion_matrix(self, a) -> np.ndarray:
        """[f^a]_{b c} = f^{a b}_c."""
        a = self.labels.index(a) if isinstance(a, str) else a
        return self.fusion[a]

    def to_json(self):
        cj = lambda M: [[_cjson(z) for z in row] for row in np.atleast_2d(M)]
        return {"labels": self.labels, "E": cj(self.E),
                "eigenvalues": [_cjson(z) for z in self.eigenvalues],
                "scaling_dimensions": [float(h) for h in self.scaling_dimensions],
                "fusion": {lab: cj(self.fusion[i]) for i, lab in enumerate(self.labels)},
                "N": {lab: np.asarray(n).tolist() for lab, n in zip(self.labels, self.N)}}


def _combo(coords, basis) -> DiagramSum:
    return DiagramSum([(complex(c), D) for c, D in zip(coords, basis) if abs(c) > 0])


def fib_ascending(p: TrivalentParams | None = None, tol: float = 1e-9) -> DiagramAscendingSystem:
    """Ascending operator, eigen-operators and fusion data of the doubled vertex.

    Everything is computed by reducing closed diagrams: E in the basis of
    :func:`fib_basis` via c = G^-1 <beta, E(beta_j)>, then
    f^{ab}_c = <nu_c, F(mu_a, mu_b)>_2 with <x, y>_2 = tr(x^dagger y) / tr(1).
    The tau operator is the traceless combination cupcap - 1/d.
    """
    p = p or fibonacci()
    V = doubled_vertex(p)
    basis = fib_basis()
    G = gram_matrix(basis, p)
    on = gram_orthonormalize(G, tol)

    def coords(x: DiagramSum) -> np.ndarray:
        return on.coefficients([inner_product(b, x, p) for b in basis])

    E = np.column_stack([coords(ascend_diagram(V, DiagramSum.of(b))) for b in basis])
    evals, evecs = np.linalg.eig(E)
    order = np.argsort(-np.abs(evals))
    evals, evecs = evals[order], evecs[:, order]
    dim = G[0, 0]                       # tr(1) on a doubled leg
    hs = G / dim                        # <x, y>_2 in basis coordinates
    mu = []
    for k in range(len(evals)):
        v = evecs[:, k]
        # the identity first; other eigen-operators get unit cup-cap weight
        v = v / (v[0] if k == 0 else v[1])
        mu.append(v)
    mu = np.array(mu)
    overlap = mu.conj() @ hs @ mu.T     # <mu_a, mu_b>_2
    nu = np.linalg.inv(overlap).conj().T @ mu   # <nu_a, mu_b>_2 = delta
    n = len(evals)
    f = np.zeros((n, n, n), dtype=complex)
    for a in range(n):
        for b in range(n):
            F = coords(fuse_diagram(V, _combo(mu[a], basis), _combo(mu[b], basis)))
            for c in range(n):
                f[a, b, c] = nu[c].conj() @ hs @ F
    N = [(np.abs(f[a]) > tol).astype(int) for a in range(n)]
    return DiagramAscendingSystem(["1", "tau"], E, evals, mu, nu, f, N, G, dim)
