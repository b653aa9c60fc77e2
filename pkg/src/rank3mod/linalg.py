"""Dense linear algebra over F_ell on numpy int64 arrays.

Matrix products go through float64 BLAS: entries stay below ell <= 17 and the
inner dimensions below 2^12, so accumulated products are < 2^53 and exact.
Row reduction is pivot-at-a-time with whole-matrix vectorised updates, which
is plenty for the dimensions here (a few thousand at most).

Bases of subspaces are always kept in reduced row echelon form with sorted
pivots, so equality of subspaces is equality of arrays.
"""

from __future__ import annotations

import numpy as np

_INV_CACHE: dict[int, np.ndarray] = {}


def inv_table(ell: int) -> np.ndarray:
    tab = _INV_CACHE.get(ell)
    if tab is None:
        tab = np.zeros(ell, dtype=np.int64)
        for x in range(1, ell):
            tab[x] = pow(x, ell - 2, ell)
        _INV_CACHE[ell] = tab
    return tab


def matmul(A: np.ndarray, B: np.ndarray, ell: int) -> np.ndarray:
    prod = A.astype(np.float64) @ B.astype(np.float64)
    return np.rint(prod).astype(np.int64) % ell


def _forward_echelon(A: np.ndarray, ell: int) -> tuple[np.ndarray, list[int]]:
    """Row echelon (pivots 1, zeros below); updates touch trailing columns only."""
    m, n = A.shape
    inv = inv_table(ell)
    pivots: list[int] = []
    row = 0
    for col in range(n):
        if row >= m:
            break
        nz = np.nonzero(A[row:, col])[0]
        if len(nz) == 0:
            continue
        p = row + nz[0]
        if p != row:
            A[[row, p]] = A[[p, row]]
        if A[row, col] != 1:
            A[row, col:] = (A[row, col:] * inv[A[row, col]]) % ell
        coeffs = A[row + 1 :, col]
        hit = np.nonzero(coeffs)[0]
        if len(hit):
            idx = row + 1 + hit
            A[idx, col:] = (A[idx, col:] - np.outer(coeffs[hit], A[row, col:])) % ell
        pivots.append(col)
        row += 1
    return A[:row], pivots


def rref(A: np.ndarray, ell: int, panel: int = 64) -> tuple[np.ndarray, np.ndarray]:
    """Reduced row echelon form.  Returns (R, pivot_columns); R has no zero rows.

    Forward elimination clears below the pivots; back-substitution is blocked
    so the dominating updates are matrix products.
    """
    A = np.asarray(A, dtype=np.int64) % ell
    if A.ndim != 2:
        raise ValueError("rref expects a matrix")
    R, pivots = _forward_echelon(A, ell)
    k = R.shape[0]
    end = k
    while end > 0:
        a = max(0, end - panel)
        # clear the panel's pivot columns inside the panel (bottom-up)
        for i in range(end - 1, a, -1):
            col = pivots[i]
            coeffs = R[a:i, col]
            hit = np.nonzero(coeffs)[0]
            if len(hit):
                idx = a + hit
                R[idx] = (R[idx] - np.outer(coeffs[hit], R[i])) % ell
        # one product clears the panel's pivot columns from everything above
        if a > 0:
            cols = [pivots[i] for i in range(a, end)]
            coeffs = R[:a, cols]
            if coeffs.any():
                R[:a] = (R[:a] - matmul(coeffs, R[a:end], ell)) % ell
        end = a
    return R, np.array(pivots, dtype=np.int64)


def rank(A: np.ndarray, ell: int) -> int:
    # the % produces a fresh writable array, so in-place echelon is safe
    return _forward_echelon(np.asarray(A, dtype=np.int64) % ell, ell)[0].shape[0]


def nullspace(A: np.ndarray, ell: int) -> np.ndarray:
    """RREF basis of {x : x A^T = 0}, i.e. right kernel of A as row vectors."""
    A = np.asarray(A, dtype=np.int64)
    m, n = A.shape
    R, piv = rref(A, ell)
    free = np.setdiff1d(np.arange(n), piv)
    if len(free) == 0:
        return np.zeros((0, n), dtype=np.int64)
    N = np.zeros((len(free), n), dtype=np.int64)
    N[np.arange(len(free)), free] = 1
    # x_piv = -R[:, free]^T for each free column unit vector
    if R.shape[0]:
        N[:, piv] = (-R[:, free].T) % ell
    return rref(N, ell)[0]


def reduce_rows(V: np.ndarray, basis: np.ndarray, pivots: np.ndarray, ell: int) -> np.ndarray:
    """Reduce rows of V modulo an RREF basis (returns the residues)."""
    V = V % ell
    if basis.shape[0] == 0 or V.shape[0] == 0:
        return V
    coeff = V[:, pivots]
    return (V - matmul(coeff, basis, ell)) % ell


def in_rowspace(V: np.ndarray, basis: np.ndarray, pivots: np.ndarray, ell: int) -> bool:
    return not reduce_rows(np.atleast_2d(V), basis, pivots, ell).any()


def rowspace_sum(A: np.ndarray, B: np.ndarray, ell: int) -> tuple[np.ndarray, np.ndarray]:
    return rref(np.vstack([A, B]), ell)


def rowspace_intersect(A: np.ndarray, B: np.ndarray, ell: int) -> tuple[np.ndarray, np.ndarray]:
    """Zassenhaus-style intersection via the kernel of the stacked matrix."""
    if A.shape[0] == 0 or B.shape[0] == 0:
        return np.zeros((0, A.shape[1]), dtype=np.int64), np.array([], dtype=np.int64)
    # x*A + y*B = 0  =>  x*A is in the intersection (and all of it arises this way).
    stacked = np.vstack([A, B])
    ker = nullspace(stacked.T, ell)
    if ker.shape[0] == 0:
        return np.zeros((0, A.shape[1]), dtype=np.int64), np.array([], dtype=np.int64)
    X = ker[:, : A.shape[0]]
    return rref(matmul(X, A, ell), ell)
