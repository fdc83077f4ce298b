"""Shared test fixtures and independent oracles.

The oracles here deliberately avoid the library's own code paths: cofactor
determinants, explicit realization enumeration, and LAPACK eigensolvers
serve as the second opinion against the package's Jacobi / repeated-squaring
implementations.
"""

import numpy as np

from signed_gossip import build_partition


def cofactor_det(m):
    """Determinant by recursive cofactor expansion (exact oracle, n <= 6)."""
    m = np.asarray(m, dtype=float)
    n = m.shape[0]
    if n == 1:
        return m[0, 0]
    total = 0.0
    for col in range(n):
        minor = np.delete(np.delete(m, 0, axis=0), col, axis=1)
        total += ((-1.0) ** col) * m[0, col] * cofactor_det(minor)
    return total


def unweighted_complete_laplacian(n):
    return n * np.eye(n) - np.ones((n, n))


def random_bidirectional_laplacian(n, rng, weighted=True):
    """Laplacian of a random undirected graph with symmetric weights."""
    a = rng.uniform(0.5, 2.0, size=(n, n)) if weighted else np.ones((n, n))
    mask = rng.random((n, n)) < 0.6
    mask = np.triu(mask, k=1)
    w = np.where(mask, a, 0.0)
    w = w + w.T
    return np.diag(w.sum(axis=1)) - w


def symmetric_doubly_stochastic(n, rng, iters=2000, tol=1e-14):
    """Random symmetric doubly stochastic matrix with zero diagonal, via
    symmetric Sinkhorn scaling of a positive symmetric matrix."""
    a = rng.uniform(0.2, 1.0, size=(n, n))
    a = 0.5 * (a + a.T)
    np.fill_diagonal(a, 0.0)
    for _ in range(iters):
        r = a.sum(axis=1)
        if np.abs(r - 1.0).max() < tol:
            break
        d = 1.0 / np.sqrt(r)
        a = a * np.outer(d, d)
    return a


def random_symmetric_partition(n, rng, rep_fraction=0.25):
    """SignedGraph with a random symmetric doubly stochastic selection
    matrix and a random bidirectional attraction/repulsion split."""
    p = symmetric_doubly_stochastic(n, rng)
    att, rep = [], []
    for i in range(n):
        for j in range(i + 1, n):
            target = rep if rng.random() < rep_fraction else att
            target.append((i + 1, j + 1, p[j, i]))
            target.append((j + 1, i + 1, p[i, j]))
    return build_partition(n, att, rep)
