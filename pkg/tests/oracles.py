"""Independent reference implementations used by several test modules."""

from itertools import combinations

import numpy as np


def oracle_project(v, u_mat, feas_tol=1e-9):
    """Exhaustive active-set enumeration, written independently of the
    package kernels.

    For every subset of constraints solve the equality-constrained least
    squares (via an SVD nullspace projection, which stays accurate even
    for nearly dependent subsets), keep feasible candidates whose
    multipliers are nonnegative, and return the one closest to v.
    """
    n = u_mat.shape[0]
    best = None
    for size in range(n + 1):
        for subset in combinations(range(n), size):
            if size == 0:
                y = v.copy()
            else:
                u_sub = u_mat[list(subset)]
                _, s, vt = np.linalg.svd(u_sub, full_matrices=False)
                cutoff = max(u_sub.shape) * np.finfo(float).eps * s[0]
                rows = vt[s > cutoff]
                y = v - rows.T @ (rows @ v)
                lam = np.linalg.lstsq(u_sub.T, y - v, rcond=None)[0]
                if (lam < -feas_tol).any():
                    continue
            if n and (u_mat @ y).min() < -feas_tol:
                continue
            d2 = float(np.dot(y - v, y - v))
            if best is None or d2 < best[0] - 1e-15:
                best = (d2, y)
    assert best is not None
    return best[1]
