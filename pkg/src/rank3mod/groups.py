"""Isometry group generators, induced point permutations, and order certification.

Generators are transvections t_v : x -> x + (x,v) v with Q(v) = 1 for the
orthogonal families, and pseudo-reflections r_{v,lam} : x -> x + (lam-1)(x,v) v
with (v,v) = 1 and lam a primitive cube root of unity for the unitary families.
Candidate vectors are nonsingular-point representatives (a unitary nonsingular
representative automatically has hermitian norm 1).  Every generator passes an
isometry check before use.

Orders are certified by a stabiliser chain on the set of nonsingular VECTORS:
the point action of a unitary group has the scalars in its kernel, so the
vector action is the faithful one (for the orthogonal families over F2 vectors
and points coincide).  The product of fundamental orbit lengths is always a
lower bound for the generated group; after the Schreier-generator verification
pass it is the exact order, independently of the closed order formulas, which
serve as a cross-check that the pool generates the full group.

Rank and suborbits are certified on P by orbital closure (min-label
propagation on P x P), which needs no stabiliser generators.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CertificationError
from .fields import GF4_CONJ, GF4_MUL, GF4_T, GF4_T2
from .geometry import (
    OPLUS,
    OMINUS,
    PointSets,
    Space,
    bilinear,
    pack_codes,
    quadratic,
)


# ---------------------------------------------------------------------------
# matrix arithmetic over the defining field (codes; right action on rows)


def mat_mul(space: Space, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    if space.q == 2:
        return (A.astype(np.int64) @ B.astype(np.int64) % 2).astype(np.uint8)
    a0, a1 = (A & 1).astype(np.int64), (A >> 1).astype(np.int64)
    b0, b1 = (B & 1).astype(np.int64), (B >> 1).astype(np.int64)
    c0 = (a0 @ b0 + a1 @ b1) % 2
    c1 = (a0 @ b1 + a1 @ b0 + a1 @ b1) % 2
    return (c0 | (c1 << 1)).astype(np.uint8)


def vec_mat(space: Space, V: np.ndarray, M: np.ndarray) -> np.ndarray:
    """Apply M to the rows of V."""
    return mat_mul(space, np.atleast_2d(V), M)


def is_isometry(space: Space, M: np.ndarray) -> bool:
    m = space.dim
    if space.q == 2:
        G = space.gram.astype(np.int64)
        Mi = M.astype(np.int64)
        if ((Mi @ G @ Mi.T) % 2 != G).any():
            return False
        return all(quadratic(space, M[i]) == int(space.qvals[i]) for i in range(m))
    for i in range(m):
        for j in range(m):
            if bilinear(space, M[i], M[j]) != int(space.gram[i, j]):
                return False
    return True


def transvection(space: Space, v: np.ndarray) -> np.ndarray:
    """x -> x + (x, v) v; an isometry exactly when Q(v) = 1 (characteristic 2)."""
    Gv = (space.gram.astype(np.int64) @ v.astype(np.int64)) % 2
    M = (np.eye(space.dim, dtype=np.int64) + np.outer(Gv, v.astype(np.int64))) % 2
    return M.astype(np.uint8)


def pseudo_reflection(space: Space, v: np.ndarray, lam: int) -> np.ndarray:
    """x -> x + (lam - 1)(x, v) v for (v, v) = 1 and lam of order 3."""
    m = space.dim
    cv = GF4_CONJ[v]
    Gcv = np.zeros(m, dtype=np.uint8)
    for i in range(m):
        acc = 0
        for j in range(m):
            if space.gram[i, j]:
                acc ^= GF4_MUL[space.gram[i, j], cv[j]]
        Gcv[i] = acc
    mu = lam ^ 1  # lam - 1 in characteristic 2
    M = np.eye(m, dtype=np.uint8)
    for i in range(m):
        M[i] = M[i] ^ GF4_MUL[GF4_MUL[mu, Gcv[i]], v]
    return M


def candidate_generators(space: Space, points: PointSets):
    """Isometry generator candidates from nonsingular-point representatives."""
    if space.q == 2:
        for rep in points.P:
            M = transvection(space, rep)
            if not is_isometry(space, M):
                raise CertificationError("transvection failed the isometry check")
            yield M
    else:
        for rep in points.P:
            for lam in (GF4_T, GF4_T2):
                M = pseudo_reflection(space, rep, lam)
                if not is_isometry(space, M):
                    raise CertificationError("pseudo-reflection failed the isometry check")
                yield M


# ---------------------------------------------------------------------------
# induced permutations


def normalise_rows(space: Space, V: np.ndarray) -> np.ndarray:
    if space.q == 2:
        return V
    first = np.argmax(V != 0, axis=1)
    lead = V[np.arange(len(V)), first]
    scale = np.array([0, 1, 3, 2], dtype=np.uint8)[lead]
    return GF4_MUL[scale[:, None], V]


@dataclass
class PermPair:
    """Permutations induced on P and P0 by one isometry."""

    on_P: np.ndarray
    on_P0: np.ndarray


def induced_perm(space: Space, points: PointSets, M: np.ndarray) -> PermPair:
    out = []
    for reps, index in ((points.P, points.index_P), (points.P0, points.index_P0)):
        img = normalise_rows(space, vec_mat(space, reps, M))
        codes = pack_codes(img, space.q)
        try:
            perm = np.array([index[int(c)] for c in codes], dtype=np.int64)
        except KeyError as exc:
            raise CertificationError("image point missing from index: not an isometry") from exc
        if len(np.unique(perm)) != len(perm):
            raise CertificationError("induced map on points is not a bijection")
        out.append(perm)
    return PermPair(out[0], out[1])


def vector_action_domain(space: Space, points: PointSets) -> np.ndarray:
    """All nonsingular vectors (the scalar multiples of the P representatives)."""
    if space.q == 2:
        return points.P
    reps = points.P
    allv = np.vstack([reps, GF4_MUL[GF4_T, reps], GF4_MUL[GF4_T2, reps]])
    return allv[np.argsort(pack_codes(allv, 4))]


# ---------------------------------------------------------------------------
# stabiliser chain


class _Level:
    __slots__ = ("base", "gens", "parent", "gen_of", "orbit")

    def __init__(self, base: int, degree: int):
        self.base = base
        self.gens: list[np.ndarray] = []
        self.parent = np.full(degree, -1, dtype=np.int64)
        self.gen_of = np.full(degree, -1, dtype=np.int64)
        self.orbit: list[int] = [base]

    def rebuild_orbit(self):
        self.parent[:] = -1
        self.gen_of[:] = -1
        self.parent[self.base] = self.base
        self.orbit = [self.base]
        head = 0
        while head < len(self.orbit):
            x = self.orbit[head]
            head += 1
            for gi, g in enumerate(self.gens):
                y = int(g[x])
                if self.parent[y] == -1:
                    self.parent[y] = x
                    self.gen_of[y] = gi
                    self.orbit.append(y)

    def transversal(self, beta: int, degree: int) -> np.ndarray | None:
        """Permutation u with u[base] = beta, or None when beta is not in the orbit."""
        if self.parent[beta] == -1:
            return None
        chain = []
        x = beta
        while x != self.base:
            chain.append(int(self.gen_of[x]))
            x = int(self.parent[x])
        u = np.arange(degree, dtype=np.int64)
        for gi in reversed(chain):
            u = self.gens[gi][u]
        return u


class StabilizerChain:
    """Randomised Schreier-Sims; verify() makes the order exact via Sims' criterion."""

    def __init__(self, degree: int, seed: int = 0):
        self.degree = degree
        self.levels: list[_Level] = []
        self.rng = np.random.default_rng(np.random.SeedSequence([seed, degree, 0x5C]))
        self.verified = False

    @staticmethod
    def _inv(p: np.ndarray) -> np.ndarray:
        return np.argsort(p)

    def _is_identity(self, p: np.ndarray) -> bool:
        return bool((p == np.arange(self.degree)).all())

    def sift(self, p: np.ndarray) -> tuple[np.ndarray, int]:
        """Strip p through the chain; (residue, level index where it stuck)."""
        for li, lev in enumerate(self.levels):
            beta = int(p[lev.base])
            if beta == lev.base:
                continue
            u = lev.transversal(beta, self.degree)
            if u is None:
                return p, li
            p = self._inv(u)[p]
        return p, len(self.levels)

    def contains(self, p: np.ndarray) -> bool:
        res, _ = self.sift(p)
        return self._is_identity(res)

    def _add_residue(self, res: np.ndarray, level: int):
        self.verified = False
        if level == len(self.levels):
            moved = np.nonzero(res != np.arange(self.degree))[0]
            self.levels.append(_Level(int(moved[0]), self.degree))
        self.levels[level].gens.append(res)
        self.levels[level].rebuild_orbit()

    def add_generator(self, p: np.ndarray, rounds: int = 8) -> bool:
        res, level = self.sift(p)
        if self._is_identity(res):
            return False
        self._add_residue(res, level)
        self._random_rounds(rounds)
        return True

    def _random_element(self) -> np.ndarray:
        word = np.arange(self.degree, dtype=np.int64)
        pool = [g for lev in self.levels for g in lev.gens]
        if not pool:
            return word
        for _ in range(int(self.rng.integers(2, 7))):
            g = pool[int(self.rng.integers(0, len(pool)))]
            word = g[word] if self.rng.integers(2) else self._inv(g)[word]
        return word

    def _random_rounds(self, quiet_target: int):
        quiet = 0
        while quiet < quiet_target:
            res, level = self.sift(self._random_element())
            if self._is_identity(res):
                quiet += 1
            else:
                quiet = 0
                self._add_residue(res, level)

    def order_lower_bound(self) -> int:
        out = 1
        for lev in self.levels:
            out *= len(lev.orbit)
        return out

    def verify(self, max_passes: int = 200) -> None:
        """Sims' criterion: every Schreier generator sifts to the identity.

        Witnesses are added and the sweep restarts, so on return the product of
        the fundamental orbit lengths is the exact order of the generated group.
        """
        for _ in range(max_passes):
            witness = self._find_witness()
            if witness is None:
                self.verified = True
                return
            self._add_residue(*witness)
        raise CertificationError("Schreier-Sims verification did not stabilise")

    def _find_witness(self):
        for lev in self.levels:
            tr = {beta: lev.transversal(beta, self.degree) for beta in lev.orbit}
            tr_inv = {beta: self._inv(u) for beta, u in tr.items()}
            for beta in lev.orbit:
                u = tr[beta]
                for g in lev.gens:
                    schreier = tr_inv[int(g[beta])][g[u]]
                    res, level = self.sift(schreier)
                    if not self._is_identity(res):
                        return res, level
        return None

    def order(self) -> int:
        if not self.verified:
            self.verify()
        return self.order_lower_bound()


# ---------------------------------------------------------------------------
# assembling the certified generating set


@dataclass
class GroupData:
    """Pruned generating set with order data and induced point permutations."""

    mats: list[np.ndarray]
    pairs: list[PermPair]
    order: int | None
    formula_order: int
    base_size: int
    order_certified: bool


def formula_order(space: Space) -> int:
    n = space.spec.n
    if space.spec.family in (OPLUS, OMINUS):
        eps = 1 if space.spec.family == OPLUS else -1
        out = 2 * 2 ** (n * (n - 1)) * (2**n - eps)
        for i in range(1, n):
            out *= 4**i - 1
        return out
    m = space.dim
    out = 2 ** (m * (m - 1) // 2)
    for i in range(1, m + 1):
        out *= 2**i - (-1) ** i
    return out


def build_group(
    space: Space, points: PointSets, seed: int = 0, certify_order: bool = True
) -> GroupData:
    """Grow a generating set until it provably generates the full isometry group.

    Candidates already sifting into the chain are skipped, so the returned
    matrices are a small generating subset.  The loop stops when the orbit
    lower bound reaches the formula order (the generated group is contained in
    the isometry group, so equality of the bound certifies fullness); with
    certify_order the chain is then Schreier-verified, making the reported
    order a theorem about the generators alone.
    """
    target = formula_order(space)
    domain = vector_action_domain(space, points)
    index = {int(c): i for i, c in enumerate(pack_codes(domain, space.q))}
    chain = StabilizerChain(len(domain), seed=seed)
    mats: list[np.ndarray] = []

    def vec_perm(M):
        codes = pack_codes(vec_mat(space, domain, M), space.q)
        return np.array([index[int(c)] for c in codes], dtype=np.int64)

    for M in candidate_generators(space, points):
        p = vec_perm(M)
        if chain.contains(p):
            continue
        chain.add_generator(p)
        mats.append(M)
        if chain.order_lower_bound() >= target:
            break
    lb = chain.order_lower_bound()
    if lb > target:
        raise CertificationError("generated group exceeds the isometry group order")
    if lb < target:
        raise CertificationError(
            f"generator pool exhausted at order >= {lb}, formula order {target}"
        )
    if certify_order:
        order = chain.order()
        if order != target:
            raise CertificationError(
                f"verified order {order} disagrees with formula order {target}"
            )
    else:
        order = None
    pairs = [induced_perm(space, points, M) for M in mats]
    return GroupData(mats, pairs, order, target, len(chain.levels), certify_order)


# ---------------------------------------------------------------------------
# rank and suborbits on P


def orbit_of(perms: list[np.ndarray], start: int, degree: int) -> np.ndarray:
    seen = np.zeros(degree, dtype=bool)
    seen[start] = True
    frontier = [start]
    while frontier:
        nxt = []
        for x in frontier:
            for g in perms:
                y = int(g[x])
                if not seen[y]:
                    seen[y] = True
                    nxt.append(y)
        frontier = nxt
    return seen


def rank_and_orbitals(perms: list[np.ndarray], points: PointSets, base: int = 0) -> dict:
    """Transitivity, rank, suborbit sizes on P, and the orbital/adjacency match.

    The orbit partition of P x P is computed by min-label propagation along
    (i, j) -> (g i, g j); the suborbits are the label classes on the base row.
    """
    v = points.nP
    if not orbit_of(perms, 0, v).all():
        return {"transitive": False, "rank": None, "suborbits": [], "orbitals_match": False}
    labels = np.arange(v * v, dtype=np.int64).reshape(v, v)
    while True:
        before = labels
        for g in perms:
            ig = np.argsort(g)
            labels = np.minimum(labels, labels[np.ix_(g, g)])
            labels = np.minimum(labels, labels[np.ix_(ig, ig)])
        if np.array_equal(before, labels):
            break
    row = labels[base]
    classes: dict[int, list[int]] = {}
    for j in range(v):
        classes.setdefault(int(row[j]), []).append(j)
    suborbits = sorted(len(js) for js in classes.values())
    rank = len(classes)
    ok = False
    if rank == 3:
        sets = sorted(classes.values(), key=len)
        delta = set(np.nonzero(points.adj[base])[0].tolist())
        sizes = {frozenset(s) for s in sets[1:]}
        ok = sets[0] == [base] and frozenset(delta) in sizes
    return {"transitive": True, "rank": rank, "suborbits": suborbits, "orbitals_match": ok}
