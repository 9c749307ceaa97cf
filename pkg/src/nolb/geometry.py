"""Geometric kernels: projection onto polyhedral cones, hulls, boxes.

The central object is the cone C = {v : <v, u_k> >= 0 for all k} of
velocities compatible with a set of constraint directions u_k.  Projection
onto C is computed exactly by active-set enumeration for small constraint
counts and by Dykstra's alternating projections onto the defining
half-spaces above that.  Every projection can be certified through its
KKT conditions: the projected point equals the input plus a nonnegative
combination of the constraint vectors, is feasible, and is complementary.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

DEFAULT_PROJECTION_TOL = 1e-10
DEFAULT_GEOMETRY_EPS = 1e-9
DEDUP_ANGLE = 1e-9
ENUMERATION_LIMIT = 12
DYKSTRA_MAX_SWEEPS = 10_000


class ProjectionError(RuntimeError):
    """Raised when the iterative projection fallback fails to converge."""


@dataclass(frozen=True)
class VelocityCone:
    """Cone {v : <v, u> >= 0 for every constraint u}.

    An empty constraint list represents the whole space.  Constraint
    vectors must be nonzero; callers building cones from behind-neighbors
    guarantee this because those neighbors sit at distance >= 1 - r* > 0.
    """

    constraints: np.ndarray
    dimension: int

    def __init__(self, constraints, dimension: int):
        arr = np.asarray(constraints, dtype=float)
        if arr.size == 0:
            arr = np.zeros((0, dimension))
        arr = arr.reshape(-1, dimension)
        if arr.shape[0] and np.linalg.norm(arr, axis=1).min() <= 0.0:
            raise ValueError("cone constraint vectors must be nonzero")
        object.__setattr__(self, "constraints", arr)
        object.__setattr__(self, "dimension", int(dimension))

    @property
    def n_constraints(self) -> int:
        return self.constraints.shape[0]


@dataclass(frozen=True)
class ProjectionCertificate:
    """Projection result plus the KKT data that proves it.

    projected = input + sum_i multipliers[i] * u_i with multipliers >= 0,
    <projected, u_i> >= -tol, and multipliers[i] * <projected, u_i> ~ 0.
    """

    projected: np.ndarray
    multipliers: np.ndarray
    feasibility_residual: float
    complementarity_residual: float
    stationarity_residual: float
    tol: float


@dataclass(frozen=True)
class KKTCheck:
    passed: bool
    stationarity_residual: float
    feasibility_residual: float
    complementarity_residual: float
    min_multiplier: float
    tol: float


def _dedupe_directions(u_mat: np.ndarray, angle_tol: float) -> np.ndarray:
    """Indices of one representative per near-identical constraint direction.

    Two constraints whose unit vectors differ by less than angle_tol
    radians define the same half-space up to that angle; keeping one
    avoids degenerate KKT systems.  Chord length approximates angle.
    """
    norms = np.linalg.norm(u_mat, axis=1)
    units = u_mat / norms[:, None]
    keep: list[int] = []
    for k in range(u_mat.shape[0]):
        if all(np.linalg.norm(units[k] - units[j]) >= angle_tol for j in keep):
            keep.append(k)
    return np.asarray(keep, dtype=int)


def _project_1d(v: np.ndarray, u_mat: np.ndarray) -> np.ndarray:
    has_pos = bool((u_mat[:, 0] > 0).any())
    has_neg = bool((u_mat[:, 0] < 0).any())
    if has_pos and has_neg:
        return np.zeros(1)
    if has_pos:
        return np.maximum(v, 0.0)
    return np.minimum(v, 0.0)


def _project_2d(v: np.ndarray, u_mat: np.ndarray,
                tol: float) -> np.ndarray | None:
    """Closed-form 2-D cone projection via the angular extremes.

    The intersection of half-planes through the origin is a wedge bounded
    by the constraints at the ends of the arc spanned by all constraint
    directions; interior constraints are implied while that arc is
    strictly below pi, and the intersection is {0} when it exceeds pi.
    At an arc of exactly pi a dropped interior constraint could still cut
    the wedge line down to a ray, so that boundary band (with more than
    two constraints) is left to the general path by returning None.
    """
    u0 = u_mat[0]
    cross = u0[0] * u_mat[:, 1] - u0[1] * u_mat[:, 0]
    rel = np.arctan2(cross, u_mat @ u0)
    lo = int(rel.argmin())
    hi = int(rel.argmax())
    if u_mat.shape[0] > 2:
        spread = rel[hi] - rel[lo]
        if spread > np.pi + 1e-9:
            return np.zeros(2)
        if spread > np.pi - 1e-9:
            return None
    a = u_mat[lo]
    b = u_mat[hi]
    sa = float(v @ a)
    sb = float(v @ b)
    if sa >= -tol and sb >= -tol:
        return v.copy()
    best = np.zeros(2)
    best_dist = float(v @ v)
    ya = v - (sa / float(a @ a)) * a
    if float(ya @ b) >= -tol:
        dist = float(np.dot(ya - v, ya - v))
        if dist < best_dist:
            best, best_dist = ya, dist
    yb = v - (sb / float(b @ b)) * b
    if float(yb @ a) >= -tol:
        dist = float(np.dot(yb - v, yb - v))
        if dist < best_dist:
            best, best_dist = yb, dist
    return best


def _subspace_project(v: np.ndarray, u_sub: np.ndarray) -> np.ndarray:
    """Project v onto the nullspace {y : u_sub @ y = 0} (SVD, rank-safe)."""
    _, s, vt = np.linalg.svd(u_sub, full_matrices=False)
    cutoff = max(u_sub.shape) * np.finfo(float).eps * (s[0] if s.size else 0.0)
    rows = vt[s > cutoff]
    if rows.shape[0] == 0:
        return v.copy()
    return v - rows.T @ (rows @ v)


def _enumerate_project(v: np.ndarray, u_mat: np.ndarray, tol: float) -> np.ndarray:
    d = v.shape[0]
    n = u_mat.shape[0]
    best = None
    best_dist = np.inf
    indices = range(n)
    for size in range(0, min(n, d) + 1):
        for subset in combinations(indices, size):
            y = v.copy() if size == 0 else _subspace_project(v, u_mat[list(subset)])
            if n and (u_mat @ y).min() < -tol:
                continue
            dist = float(np.dot(y - v, y - v))
            if dist < best_dist - 1e-18:
                best, best_dist = y, dist
    if best is None:
        # All subsets infeasible can only happen if the cone is {0}.
        return np.zeros(d)
    return best


def _dykstra_project(v: np.ndarray, u_mat: np.ndarray, tol: float,
                     max_sweeps: int) -> np.ndarray:
    norms_sq = np.einsum("ij,ij->i", u_mat, u_mat)
    z = v.copy()
    corrections = np.zeros_like(u_mat)
    for _ in range(max_sweeps):
        shift = 0.0
        for k in range(u_mat.shape[0]):
            w = z + corrections[k]
            viol = float(w @ u_mat[k])
            if viol < 0.0:
                y = w - (viol / norms_sq[k]) * u_mat[k]
            else:
                y = w
            corrections[k] = w - y
            shift = max(shift, float(np.abs(y - z).max(initial=0.0)))
            z = y
        feas = float((u_mat @ z).min()) if u_mat.shape[0] else 0.0
        if shift <= 0.1 * tol and feas >= -tol:
            return z
    raise ProjectionError(
        f"Dykstra projection did not reach tolerance {tol} within "
        f"{max_sweeps} sweeps ({u_mat.shape[0]} constraints)"
    )


def project_vector(v: np.ndarray, u_mat: np.ndarray,
                   tol: float = DEFAULT_PROJECTION_TOL,
                   angle_tol: float = DEDUP_ANGLE,
                   enumeration_limit: int = ENUMERATION_LIMIT,
                   max_sweeps: int = DYKSTRA_MAX_SWEEPS) -> np.ndarray:
    """Projection of v onto {y : u_mat @ y >= 0}, without certificate.

    This is the single projection path shared by the public operation and
    the simulation steppers.
    """
    v = np.asarray(v, dtype=float)
    if u_mat.shape[0] == 0:
        return v.copy()
    d = v.shape[0]
    if d == 1:
        return _project_1d(v, u_mat)
    if d == 2:
        y = _project_2d(v, u_mat, tol)
        if y is not None:
            return y
    keep = _dedupe_directions(u_mat, angle_tol)
    reduced = u_mat[keep]
    if reduced.shape[0] <= enumeration_limit:
        return _enumerate_project(v, reduced, tol)
    return _dykstra_project(v, reduced, tol, max_sweeps)


def nonnegative_lstsq(a_mat: np.ndarray, b: np.ndarray,
                      max_iter: int | None = None) -> tuple[np.ndarray, float]:
    """Classical Lawson-Hanson active-set solve of min ||a_mat x - b||, x >= 0.

    Small and exact for the tiny systems used here (multiplier recovery
    over at most a few dozen constraints).
    """
    m, n = a_mat.shape
    if max_iter is None:
        max_iter = 3 * n + 30
    passive = np.zeros(n, dtype=bool)
    x = np.zeros(n)
    grad = a_mat.T @ b
    grad_tol = 10 * max(m, n) * np.finfo(float).eps * (
        np.abs(a_mat).sum(axis=0).max(initial=0.0) * np.linalg.norm(b) + 1e-300)
    for _ in range(max_iter):
        candidates = ~passive & (grad > grad_tol)
        if not candidates.any():
            break
        k = int(np.argmax(np.where(candidates, grad, -np.inf)))
        passive[k] = True
        while True:
            s = np.zeros(n)
            s[passive] = np.linalg.lstsq(a_mat[:, passive], b, rcond=None)[0]
            if (s[passive] > 0).all():
                x = s
                break
            blocking = passive & (s <= 0)
            ratios = x[blocking] / (x[blocking] - s[blocking])
            alpha = float(ratios.min())
            x = x + alpha * (s - x)
            passive &= x > np.finfo(float).eps * np.abs(x).max(initial=1.0)
            x[~passive] = 0.0
        grad = a_mat.T @ (b - a_mat @ x)
    return x, float(np.linalg.norm(b - a_mat @ x))


def _multipliers(v: np.ndarray, y: np.ndarray, u_mat: np.ndarray,
                 angle_tol: float) -> tuple[np.ndarray, float]:
    """Nonnegative multipliers with y = v + u_mat.T @ lam.

    Solved on deduplicated directions; dropped near-duplicates get zero.
    """
    keep = _dedupe_directions(u_mat, angle_tol)
    lam_kept, residual = nonnegative_lstsq(u_mat[keep].T, y - v)
    lam = np.zeros(u_mat.shape[0])
    lam[keep] = lam_kept
    return lam, float(residual)


def project_onto_cone(v, cone: VelocityCone,
                      tol: float = DEFAULT_PROJECTION_TOL,
                      angle_tol: float = DEDUP_ANGLE,
                      enumeration_limit: int = ENUMERATION_LIMIT,
                      max_sweeps: int = DYKSTRA_MAX_SWEEPS) -> ProjectionCertificate:
    """Unique minimizer of ||y - v|| over the cone, with KKT certificate.

    An empty constraint list leaves v unchanged with no multipliers.
    Raises ProjectionError if the iterative fallback cannot reach tol.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    v = np.asarray(v, dtype=float).reshape(cone.dimension)
    u_mat = cone.constraints
    y = project_vector(v, u_mat, tol=tol, angle_tol=angle_tol,
                       enumeration_limit=enumeration_limit,
                       max_sweeps=max_sweeps)
    if u_mat.shape[0] == 0:
        return ProjectionCertificate(
            projected=y, multipliers=np.zeros(0),
            feasibility_residual=0.0, complementarity_residual=0.0,
            stationarity_residual=0.0, tol=tol)
    lam, stationarity = _multipliers(v, y, u_mat, angle_tol)
    slacks = u_mat @ y
    feasibility = max(0.0, float(-slacks.min()))
    complementarity = float(np.abs(lam * slacks).max(initial=0.0))
    return ProjectionCertificate(
        projected=y, multipliers=lam,
        feasibility_residual=feasibility,
        complementarity_residual=complementarity,
        stationarity_residual=stationarity, tol=tol)


def verify_kkt(v, cone: VelocityCone, cert: ProjectionCertificate,
               tol: float | None = None) -> KKTCheck:
    """Independently recompute the certificate residuals and pass/fail.

    Pure check: recomputes stationarity, feasibility and complementarity
    from (v, cone, cert) alone and passes iff all are within tolerance
    and every multiplier is nonnegative.
    """
    if tol is None:
        tol = cert.tol
    v = np.asarray(v, dtype=float).reshape(cone.dimension)
    y = np.asarray(cert.projected, dtype=float)
    u_mat = cone.constraints
    lam = np.asarray(cert.multipliers, dtype=float)
    if u_mat.shape[0] == 0:
        stationarity = float(np.linalg.norm(y - v))
        return KKTCheck(stationarity <= tol, stationarity, 0.0, 0.0, 0.0, tol)
    stationarity = float(np.linalg.norm(y - (v + u_mat.T @ lam)))
    slacks = u_mat @ y
    feasibility = max(0.0, float(-slacks.min()))
    complementarity = float(np.abs(lam * slacks).max(initial=0.0))
    min_multiplier = float(lam.min())
    passed = (stationarity <= tol and feasibility <= tol
              and complementarity <= tol and min_multiplier >= -tol)
    return KKTCheck(passed, stationarity, feasibility, complementarity,
                    min_multiplier, tol)


def _point_segment_distance(p: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    ab = b - a
    denom = float(ab @ ab)
    if denom == 0.0:
        return float(np.linalg.norm(p - a))
    t = float(np.clip((p - a) @ ab / denom, 0.0, 1.0))
    return float(np.linalg.norm(p - (a + t * ab)))


def _convex_hull_2d(points: np.ndarray) -> np.ndarray:
    """Monotone-chain hull, counter-clockwise, collinear points dropped."""
    pts = np.unique(points, axis=0)
    if pts.shape[0] <= 2:
        return pts
    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    lower: list[np.ndarray] = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[np.ndarray] = []
    for p in pts[::-1]:
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return np.asarray(lower[:-1] + upper[:-1])


def hull_contains_2d(points, query, eps: float = DEFAULT_GEOMETRY_EPS) -> bool:
    """True iff query lies in the convex hull of points inflated by eps.

    Handles degenerate hulls (single point, collinear set) by distance
    to the point or segment.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if pts.shape[0] == 0:
        raise ValueError("points must be non-empty")
    q = np.asarray(query, dtype=float).reshape(2)
    hull = _convex_hull_2d(pts)
    if hull.shape[0] == 1:
        return float(np.linalg.norm(q - hull[0])) <= eps
    if hull.shape[0] == 2:
        return _point_segment_distance(q, hull[0], hull[1]) <= eps
    n = hull.shape[0]
    for k in range(n):
        a = hull[k]
        b = hull[(k + 1) % n]
        edge = b - a
        # Signed area >= -eps * |edge| keeps points within eps outside an edge.
        s = edge[0] * (q[1] - a[1]) - edge[1] * (q[0] - a[0])
        if s < -eps * float(np.linalg.norm(edge)):
            return False
    return True


def bounding_box(points) -> tuple[np.ndarray, np.ndarray]:
    """Componentwise (min-corner, max-corner) of a non-empty point set."""
    pts = np.asarray(points, dtype=float)
    pts = pts.reshape(pts.shape[0], -1)
    if pts.shape[0] == 0:
        raise ValueError("points must be non-empty")
    return pts.min(axis=0), pts.max(axis=0)
