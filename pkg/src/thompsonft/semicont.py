"""States of the semicontinuous limit and the unitary action of T on them.

A state is a context tree together with an amplitude tensor with one leg per
leaf, legs ordered around the circle starting at 0.  Two states are equal when
they agree after embedding both into the join of their contexts.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .errors import (ForestError, RefinementError, ResourceError, VacuumError)
from .forest import (Forest, Tree, as_forest, as_tree, join, parse_tree, refines,
                     complement, LEAF)
from .tensorlab import Isometry3, verify_tensor
from .thompson import GroupElement, expand_den

VACUUM_TREE = parse_tree("(*(**))")


def max_leaves() -> int:
    return int(os.environ.get("TFT_MAX_LEAVES", "12"))


def _check_cap(n: int):
    cap = max_leaves()
    if n > cap:
        raise ResourceError(f"context would need {n} leaves (cap {cap}, set TFT_MAX_LEAVES)")


# ---------------------------------------------------------------- the functor

def phi_tree(tree, V: Isometry3) -> np.ndarray:
    """Isometry d -> d^leaves built by placing V at every caret."""
    tree = as_tree(tree)
    if tree.is_leaf:
        return np.eye(V.d, dtype=complex)
    return np.kron(phi_tree(tree.left, V), phi_tree(tree.right, V)) @ V.matrix


def phi(w, V: Isometry3) -> np.ndarray:
    """Matrix d^dom -> d^cod of a forest; phi(compose(w1, w2)) = phi(w2) @ phi(w1)."""
    w = as_forest(w)
    if w.domain == 0:
        raise ForestError("phi of the empty forest")
    out = np.ones((1, 1), dtype=complex)
    for t in w.trees:
        out = np.kron(out, phi_tree(t, V))
    return out


def apply_v(amps: np.ndarray, axis: int, V: Isometry3) -> np.ndarray:
    """Refine leg ``axis`` by one caret; the new legs sit at axis, axis + 1."""
    out = np.tensordot(V.v, amps, axes=([2], [axis]))
    return np.moveaxis(out, [0, 1], [axis, axis + 1])


def apply_tree(amps: np.ndarray, axis: int, tree: Tree, V: Isometry3) -> np.ndarray:
    if tree.is_leaf:
        return amps
    amps = apply_v(amps, axis, V)
    amps = apply_tree(amps, axis + 1, tree.right, V)
    return apply_tree(amps, axis, tree.left, V)


def apply_forest(amps: np.ndarray, forest: Forest, V: Isometry3) -> np.ndarray:
    """Apply phi(forest) leg by leg, working from the right so indices stay valid."""
    if forest.domain != amps.ndim:
        raise ForestError(f"forest has {forest.domain} roots, state has {amps.ndim} legs")
    _check_cap(forest.codomain)
    for i in reversed(range(forest.domain)):
        amps = apply_tree(amps, i, forest.trees[i], V)
    return amps


# ---------------------------------------------------------------- states

@dataclass(frozen=True)
class LimitState:
    tree: Tree
    amps: np.ndarray

    def __post_init__(self):
        t = as_tree(self.tree)
        object.__setattr__(self, "tree", t)
        a = np.asarray(self.amps, dtype=complex)
        d = round(a.size ** (1.0 / t.leaves)) if a.ndim <= 1 else a.shape[0]
        if d ** t.leaves != a.size:
            raise ValueError(f"{a.size} amplitudes do not fit {t.leaves} legs")
        object.__setattr__(self, "amps", a.reshape((d,) * t.leaves))

    @property
    def d(self) -> int:
        return self.amps.shape[0]

    @property
    def leaves(self) -> int:
        return self.tree.leaves

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def to_json(self):
        flat = self.amps.reshape(-1)
        return {"context": {"tree": str(self.tree), "rot": 0},
                "amps": [[float(z.real), float(z.imag)] for z in flat]}

    @classmethod
    def from_json(cls, obj):
        ctx = obj["context"]
        tree = parse_tree(ctx["tree"])
        amps = np.array([complex(re, im) for re, im in obj["amps"]])
        n = tree.leaves
        d = round(amps.size ** (1.0 / n))
        amps = amps.reshape((d,) * n)
        # leg i of a rotated context sits at leaf i + rot
        rot = int(ctx.get("rot", 0)) % n
        if rot:
            amps = np.moveaxis(amps, list(range(n)), [(i + rot) % n for i in range(n)])
        return cls(tree, amps)


def vacuum(V: Isometry3, tol: float = 1e-9) -> LimitState:
    """Single V with its input leg raised; legs [0,1/2), [1/2,3/4), [3/4,1)."""
    rep = verify_tensor(V, tol)
    if not (rep["isometry"] and rep["planar_perfect"] and rep["rotation_invariant"]):
        raise VacuumError(f"V is not a rotation-invariant planar perfect isometry: {rep}")
    amps = V.v.transpose(2, 0, 1) / np.sqrt(V.d)
    return LimitState(VACUUM_TREE, amps)


def embed(s: LimitState, target, V: Isometry3) -> LimitState:
    target = as_tree(target)
    if not refines(s.tree, target):
        raise RefinementError(f"{target} does not refine {s.tree}")
    if target == s.tree:
        return s
    p = complement(s.tree, target)
    return LimitState(target, apply_forest(s.amps, p, V))


def common(s: LimitState, r: LimitState, V: Isometry3):
    u, _, _ = join(s.tree, r.tree)
    return embed(s, u, V), embed(r, u, V)


def inner(s: LimitState, r: LimitState, V: Isometry3) -> complex:
    a, b = common(s, r, V)
    return complex(np.vdot(a.amps, b.amps))


def distance(s: LimitState, r: LimitState, V: Isometry3) -> float:
    a, b = common(s, r, V)
    return float(np.linalg.norm(a.amps - b.amps))


def equal(s: LimitState, r: LimitState, V: Isometry3, tol: float = 1e-9) -> bool:
    return distance(s, r, V) <= tol


def roll_legs(amps: np.ndarray, shift: int) -> np.ndarray:
    """Move leg i to position (i + shift) mod n."""
    n = amps.ndim
    shift %= n
    if not shift:
        return amps
    return np.moveaxis(amps, list(range(n)), [(i + shift) % n for i in range(n)])


def act(g: GroupElement, s: LimitState, V: Isometry3) -> LimitState:
    """U(g): refine until the denominator of g matches the context, then transport.

    With R = den v context, the state is embedded into R, g is rewritten with
    denominator R, and leg i is carried to numerator leaf i + rot.
    """
    r, tau, sigma = join(g.den, s.tree)
    _check_cap(r.leaves)
    g2 = expand_den(g, tau)
    amps = apply_forest(s.amps, sigma, V)
    return LimitState(g2.num, roll_legs(amps, g2.rot))


def random_state(tree, d: int, rng) -> LimitState:
    tree = as_tree(tree)
    z = rng.normal(size=(d,) * tree.leaves) + 1j * rng.normal(size=(d,) * tree.leaves)
    return LimitState(tree, z / np.linalg.norm(z))
