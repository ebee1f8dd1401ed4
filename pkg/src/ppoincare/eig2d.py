"""First nontrivial Neumann eigenvalue of the p-Laplacian on convex polygons.

The eigenvalue is realized purely variationally: minimize the Rayleigh
quotient  sum_T area*|grad u|^p / int |u - t|^p  over piecewise-linear nodal
fields on a clipped structured triangulation, re-solving the p-mean balance
shift t every iteration.  Descent directions are preconditioned with the H1
operator of the mesh (plain metric descent stalls at fine resolutions), with
Armijo backtracking and per-step renormalization.  Since the discrete space
is conforming, every result is an upper bound for the continuum eigenvalue,
which is what makes the diameter bound checkable: the computed ratio
mu/(pi_p/d)^p can only fall below 1 through discretization slack.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix, diags
from scipy.sparse.linalg import splu
from scipy.spatial import ConvexHull

from ._backend import kernels
from ._descent import projected_descent
from .errors import BracketError, DomainError, MeshError
from .geom import ConvexPolygon, ScalarField, area, chord_length, diameter
from .ptrig import _pval, sharp_constant_1d

__all__ = [
    "TriMesh",
    "EigenResult2D",
    "BoundReport",
    "SharpnessRow",
    "ThinReductionRecord",
    "mesh",
    "rayleigh_min_2d",
    "check_bound",
    "thin_slab_sharpness",
    "thin_reduction_check",
]

# degree-4 (6-point) triangle rule, barycentric points and unit weights
_B1, _W1 = 0.108103018168070, 0.223381589678011
_B2, _W2 = 0.816847572980459, 0.109951743655322
_A1 = (1.0 - _B1) / 2.0
_A2 = (1.0 - _B2) / 2.0
_QB = np.array(
    [
        [_B1, _A1, _A1],
        [_A1, _B1, _A1],
        [_A1, _A1, _B1],
        [_B2, _A2, _A2],
        [_A2, _B2, _A2],
        [_A2, _A2, _B2],
    ]
)
_QW = np.array([_W1, _W1, _W1, _W2, _W2, _W2])


@dataclass(frozen=True, eq=False)
class TriMesh:
    nodes: np.ndarray  # (n, 2)
    tris: np.ndarray  # (m, 3) int32, positively oriented
    boundary: np.ndarray  # (n,) bool

    @property
    def areas(self) -> np.ndarray:
        a = self.nodes[self.tris[:, 1]] - self.nodes[self.tris[:, 0]]
        b = self.nodes[self.tris[:, 2]] - self.nodes[self.tris[:, 0]]
        return 0.5 * (a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0])

    def hat_gradients(self) -> np.ndarray:
        """(m, 3, 2) gradients of the nodal hat functions per triangle."""
        p = self.nodes[self.tris]
        out = np.empty((self.tris.shape[0], 3, 2))
        two_a = 2.0 * self.areas
        for i in range(3):
            a = p[:, (i + 1) % 3]
            b = p[:, (i + 2) % 3]
            out[:, i, 0] = (a[:, 1] - b[:, 1]) / two_a
            out[:, i, 1] = (b[:, 0] - a[:, 0]) / two_a
        return out


class _NodeRegistry:
    """Deduplicates mesh nodes; nearly coincident points (clipped cell
    corners computed along different paths) are snapped together."""

    def __init__(self, snap: float):
        self.snap = snap
        self.buckets: dict = {}
        self.coords: list = []

    def index(self, pt) -> int:
        kx = round(pt[0] / self.snap)
        ky = round(pt[1] / self.snap)
        for dx in (0, -1, 1):
            for dy in (0, -1, 1):
                hitlist = self.buckets.get((kx + dx, ky + dy))
                if not hitlist:
                    continue
                for idx in hitlist:
                    c = self.coords[idx]
                    if abs(c[0] - pt[0]) <= self.snap and abs(c[1] - pt[1]) <= self.snap:
                        return idx
        idx = len(self.coords)
        self.coords.append((float(pt[0]), float(pt[1])))
        self.buckets.setdefault((kx, ky), []).append(idx)
        return idx


def _clip_cell(cell: np.ndarray, poly_v: np.ndarray) -> np.ndarray | None:
    """Sutherland-Hodgman clip of a grid cell against every polygon edge.

    Intersections are computed with lexicographically ordered segment
    endpoints so adjacent cells reproduce shared points bitwise.
    """
    pts = cell
    k = poly_v.shape[0]
    for i in range(k):
        a = poly_v[i]
        b = poly_v[(i + 1) % k]
        # inside = left of edge a->b
        nx, ny = a[1] - b[1], b[0] - a[0]
        c = nx * a[0] + ny * a[1]
        d = pts[:, 0] * nx + pts[:, 1] * ny - c
        keep = []
        n = pts.shape[0]
        for j in range(n):
            jn = (j + 1) % n
            if d[j] >= 0.0:
                keep.append(pts[j])
            if (d[j] > 0.0 > d[jn]) or (d[jn] > 0.0 > d[j]):
                keep.append(_seg_isect(pts[j], pts[jn], nx, ny, c))
        if len(keep) < 3:
            return None
        pts = np.array(keep)
        d = None
    return pts


def _seg_isect(p, q, nx, ny, c):
    if (q[0], q[1]) < (p[0], p[1]):
        p, q = q, p
    dp = p[0] * nx + p[1] * ny - c
    dq = q[0] * nx + q[1] * ny - c
    t = dp / (dp - dq)
    return p + t * (q - p)


def mesh(poly: ConvexPolygon, h: float) -> TriMesh:
    """Structured grid of pitch h clipped exactly to the polygon.

    Interior cells split into two triangles along a fixed diagonal; boundary
    cells are clipped and fan-triangulated.  Triangle areas sum to the
    polygon area to within roundoff.
    """
    d = diameter(poly)
    if not 0.0 < h < d:
        raise MeshError(f"grid pitch must lie in (0, diameter); got {h!r}")
    A = area(poly)
    if A <= 0.0:
        raise MeshError("degenerate polygon")
    v = poly.vertices
    xmin, ymin = v.min(axis=0)
    xmax, ymax = v.max(axis=0)
    nx = max(1, int(math.ceil((xmax - xmin) / h - 1e-12)))
    ny = max(1, int(math.ceil((ymax - ymin) / h - 1e-12)))
    reg = _NodeRegistry(snap=1e-9 * h)
    tris = []

    for j in range(ny):
        y0 = ymin + j * h
        y1 = ymin + (j + 1) * h
        for i in range(nx):
            x0 = xmin + i * h
            x1 = xmin + (i + 1) * h
            cell = np.array([[x0, y0], [x1, y0], [x1, y1], [x0, y1]])
            inside = poly.contains(cell, slack=0.0)
            if np.all(inside):
                clipped = cell
            else:
                clipped = _clip_cell(cell, v)
                if clipped is None:
                    continue
            ids = []
            for pt in clipped:
                idx = reg.index(pt)
                if not ids or (ids[-1] != idx and idx != ids[0]):
                    ids.append(idx)
            if len(ids) < 3:
                continue
            for k in range(1, len(ids) - 1):
                tris.append((ids[0], ids[k], ids[k + 1]))

    nodes = np.array(reg.coords)
    tris = np.array(tris, dtype=np.int32)
    # drop degenerate triangles (collinear clip output)
    a = nodes[tris[:, 1]] - nodes[tris[:, 0]]
    b = nodes[tris[:, 2]] - nodes[tris[:, 0]]
    tri_area = 0.5 * (a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0])
    if np.any(tri_area < -1e-13 * h * h):
        raise MeshError("inverted triangle produced during clipping")
    tris = tris[tri_area > 1e-14 * h * h]
    used = np.unique(tris)
    remap = -np.ones(nodes.shape[0], dtype=np.int32)
    remap[used] = np.arange(used.size, dtype=np.int32)
    nodes = nodes[used]
    tris = remap[tris]

    msh = TriMesh(nodes=nodes, tris=np.ascontiguousarray(tris), boundary=_boundary_flags(nodes, v))
    total = float(np.sum(msh.areas))
    if abs(total - A) > 1e-9 * A:
        raise MeshError(f"mesh area {total!r} does not tile the polygon area {A!r}")
    return msh


def _boundary_flags(nodes: np.ndarray, poly_v: np.ndarray) -> np.ndarray:
    scale = float(np.max(np.abs(poly_v))) + 1.0
    flags = np.zeros(nodes.shape[0], dtype=bool)
    k = poly_v.shape[0]
    for i in range(k):
        a = poly_v[i]
        b = poly_v[(i + 1) % k]
        e = b - a
        L2 = e @ e
        rel = nodes - a
        t = np.clip((rel @ e) / L2, 0.0, 1.0)
        dist2 = np.sum((rel - t[:, None] * e[None, :]) ** 2, axis=1)
        flags |= dist2 <= (1e-9 * scale) ** 2
    return flags


# ---------------------------------------------------------------------------
# Rayleigh quotient minimization
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class EigenResult2D:
    mu: float
    u: np.ndarray
    shift_t: float
    grad_norm: float
    iterations: int
    converged: bool


def _balance_quad(uq: np.ndarray, wa: np.ndarray, pv: float) -> float:
    """Shift t with sum wa*|uq-t|^{p-2}(uq-t) = 0 over precomputed quadrature
    values; the residual is strictly decreasing in t, so bracketed Newton
    converges in a handful of steps."""
    lo = float(uq.min())
    hi = float(uq.max())
    if hi - lo <= 1e-300:
        return lo

    def resid_slope(t):
        dd = uq - t
        aa = np.abs(dd)
        ap2 = np.where(aa > 0.0, aa ** (pv - 2.0), 0.0)
        return float(np.sum(wa * ap2 * dd)), -(pv - 1.0) * float(np.sum(wa * ap2))

    r_lo, _ = resid_slope(lo)
    r_hi, _ = resid_slope(hi)
    scale = max(r_lo, -r_hi, 1e-300)
    if r_lo < -1e-12 * scale or r_hi > 1e-12 * scale:
        raise BracketError("balance residual must decrease from >=0 to <=0")
    t = 0.5 * (lo + hi)
    for _ in range(80):
        r, dr = resid_slope(t)
        if abs(r) <= 1e-13 * scale or hi - lo <= 4.0 * np.finfo(float).eps * (abs(hi) + abs(lo)):
            return t
        if r > 0.0:
            lo = t
        else:
            hi = t
        t_new = t - r / dr if dr < 0.0 else 0.5 * (lo + hi)
        if not lo < t_new < hi:
            t_new = 0.5 * (lo + hi)
        t = t_new
    return t


def _diameter_direction(nodes: np.ndarray) -> np.ndarray:
    hull = nodes[ConvexHull(nodes).vertices]
    d2 = np.sum((hull[:, None, :] - hull[None, :, :]) ** 2, axis=2)
    i, j = np.unravel_index(np.argmax(d2), d2.shape)
    e = hull[j] - hull[i]
    return e / np.hypot(e[0], e[1])


def rayleigh_min_2d(msh: TriMesh, p, tol: float, max_iters: int) -> EigenResult2D:
    """Minimize the discrete Rayleigh quotient under the p-mean constraint.

    Deterministic throughout: fixed init (projection of the nodes onto the
    diameter direction), fixed iteration order, fixed reductions.  Returns
    the best iterate with a non-convergence flag when the budget runs out.
    """
    pv = _pval(p)
    if pv < 2.0:
        raise DomainError("the 2D solver requires p >= 2")
    nodes = msh.nodes
    tris = np.ascontiguousarray(msh.tris, dtype=np.int32)
    areas = np.ascontiguousarray(msh.areas)
    gphi = np.ascontiguousarray(msh.hat_gradients())
    wa = areas[:, None] * _QW[None, :]

    # H1 preconditioner: stiffness + lumped mass, factorized once
    local = np.einsum("mid,mjd->mij", gphi, gphi) * areas[:, None, None]
    rows = np.repeat(tris, 3, axis=1).ravel()
    cols = np.tile(tris, (1, 3)).ravel()
    K = coo_matrix((local.ravel(), (rows, cols)), shape=(nodes.shape[0],) * 2).tocsc()
    lump = np.bincount(tris.ravel(), weights=np.repeat(areas / 3.0, 3), minlength=nodes.shape[0])
    lu = splu((K + diags(lump)).tocsc())

    def project(u):
        uq = u[tris] @ _QB.T
        t = _balance_quad(uq, wa, pv)
        u = u - t
        uq = uq - t
        norm = float(np.sum(wa * np.abs(uq) ** pv)) ** (1.0 / pv)
        return u / norm

    def evaluate(u):
        E, gE = kernels.tri_energy_grad(u, tris, gphi, areas, pv)
        D, _, gD = kernels.tri_lp_shift(u, tris, _QB, _QW, areas, 0.0, pv)
        J = E / D
        return J, (gE - J * gD) / D

    e_d = _diameter_direction(nodes)
    centroid = nodes.mean(axis=0)
    u, J, pg_norm, it, converged = projected_descent(
        (nodes - centroid) @ e_d, project, evaluate, lu.solve, max_iters, gtol=tol
    )
    uq = u[tris] @ _QB.T
    shift = _balance_quad(uq, wa, pv)
    return EigenResult2D(
        mu=J, u=u, shift_t=shift, grad_norm=pg_norm, iterations=it, converged=converged
    )


@dataclass(frozen=True)
class BoundReport:
    mu_est: float
    d: float
    bound: float
    ratio: float
    h: float
    iterations: int

    @property
    def ok(self) -> bool:
        # conforming discretization overestimates mu; a ratio below 1 beyond
        # the discretization slack falsifies the run, not the inequality
        return self.ratio >= 1.0 - 5.0 * self.h


def check_bound(
    poly: ConvexPolygon, p, h: float, tol: float = 1e-7, max_iters: int = 2000
) -> BoundReport:
    """Estimate mu on the polygon and compare against (pi_p/diameter)^p."""
    pv = _pval(p)
    msh = mesh(poly, h)
    res = rayleigh_min_2d(msh, pv, tol, max_iters)
    d = diameter(poly)
    bound = sharp_constant_1d(pv, d)
    return BoundReport(
        mu_est=res.mu, d=d, bound=bound, ratio=res.mu / bound, h=h, iterations=res.iterations
    )


@dataclass(frozen=True)
class SharpnessRow:
    delta: float
    h: float
    mu_est: float
    bound: float
    ratio: float


def thin_slab_sharpness(d: float, deltas, p, h_rule=None):
    """Eigenvalue of the d x delta rectangle against the interval constant
    (pi_p/d)^p, for a decreasing list of slab thicknesses.

    The ratio tends to 1 from above as the slab degenerates to a segment;
    rows come back in the order given.  Default resolution h = delta/5 so the
    cross-section stays resolved.
    """
    pv = _pval(p)
    if h_rule is None:
        h_rule = lambda delta: min(delta / 5.0, d / 40.0)
    bound = sharp_constant_1d(pv, d)
    rows = []
    for delta in deltas:
        if not 0.0 < delta < d / 2.0:
            raise DomainError(f"slab thickness {delta!r} must lie in (0, d/2)")
        h = h_rule(delta)
        msh = mesh(ConvexPolygon.rectangle(0.0, 0.0, d, delta), h)
        res = rayleigh_min_2d(msh, pv, 1e-7, 4000)
        rows.append(
            SharpnessRow(delta=delta, h=h, mu_est=res.mu, bound=bound, ratio=res.mu / bound)
        )
    return rows


# ---------------------------------------------------------------------------
# thin-piece 1D reduction residuals
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ThinReductionRecord:
    r1: float
    r2: float
    r3: float
    bound1: float
    bound2: float
    bound3: float

    @property
    def ok(self) -> bool:
        return self.r1 <= self.bound1 and self.r2 <= self.bound2 and self.r3 <= self.bound3


def thin_reduction_check(piece, u: ScalarField, p, c2_bound: float) -> ThinReductionRecord:
    """Residuals of the thin-piece reduction to the weighted interval problem.

    With the piece lying in a slab of width w around its axis, the axis trace
    v(t) = u(axis point at t) and the chord profile f satisfy

        r1 = |int |du/daxis|^p dx - int f |v'|^p dt|  <= p*C^p * (w/2) * |piece|
        r2 = |int |u|^p dx       - int f |v|^p dt |  <= p*C^p * (w/2) * |piece|
        r3 = |int f |v|^{p-2} v dt|                  <= (p-1)*C^{p-1} * (w/2) * |piece| + moment residual

    where C bounds |u|, |grad u| and |D^2 u| on the slab.  Quadrature and
    finite-difference slack is folded into the reported bounds.
    """
    from .geom import _adaptive_polygon_quad  # local import to avoid cycle noise

    pv = _pval(p)
    if not c2_bound > 0.0:
        raise DomainError("a positive C2 bound for u is required")
    poly = piece.polygon
    A = area(poly)
    axis = piece.axis_theta
    e = np.array([math.cos(axis), math.sin(axis)])
    nrm = np.array([-e[1], e[0]])
    proj_e = poly.vertices @ e
    proj_n = poly.vertices @ nrm
    t0 = float(proj_e.min())
    d_i = float(proj_e.max()) - t0
    s_mid = 0.5 * (float(proj_n.min()) + float(proj_n.max()))
    origin = t0 * e + s_mid * nrm
    fd = 1e-6 * max(d_i, 1.0)

    def v_of(t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        return u(origin[None, :] + t[:, None] * e[None, :])

    def dv_of(t):
        return (v_of(t + fd) - v_of(t - fd)) / (2.0 * fd)

    def f_of(t):
        return chord_length(poly, axis, t0 + np.asarray(t, dtype=float))

    qtol = 1e-10 * (1.0 + c2_bound**pv) * A

    def g1(pts):
        up = u(pts + fd * e[None, :])
        um = u(pts - fd * e[None, :])
        return np.abs((up - um) / (2.0 * fd)) ** pv

    I1, _ = _adaptive_polygon_quad(poly, g1, qtol)
    I2, _ = _adaptive_polygon_quad(poly, lambda pts: np.abs(u(pts)) ** pv, qtol)

    kinks = np.unique(np.concatenate([[0.0], np.sort(proj_e - t0), [d_i]]))
    J1 = _quad_1d(lambda t: f_of(t) * np.abs(dv_of(t)) ** pv, kinks)
    J2 = _quad_1d(lambda t: f_of(t) * np.abs(v_of(t)) ** pv, kinks)

    def mom(t):
        vv = v_of(t)
        av = np.abs(vv)
        return f_of(t) * np.where(av > 0.0, av ** (pv - 2.0), 0.0) * vv

    J3 = _quad_1d(mom, kinks)

    w = piece.width
    slack = 1e-8 * (1.0 + c2_bound**pv) * A
    bound12 = pv * c2_bound**pv * (w / 2.0) * A + slack
    bound3 = (pv - 1.0) * c2_bound ** (pv - 1.0) * (w / 2.0) * A + piece.p_moment_residual + slack
    return ThinReductionRecord(
        r1=abs(I1 - J1),
        r2=abs(I2 - J2),
        r3=abs(J3),
        bound1=bound12,
        bound2=bound12,
        bound3=bound3,
    )


_GL8_X, _GL8_W = np.polynomial.legendre.leggauss(8)


def _quad_1d(fn, breakpoints) -> float:
    """Composite 8-point Gauss rule between the given breakpoints, with one
    refinement level; integrands here are piecewise smooth."""
    bps = np.asarray(breakpoints, dtype=float)
    fine = np.unique(np.concatenate([bps, (bps[:-1] + bps[1:]) / 2.0]))
    total = 0.0
    for a, b in zip(fine[:-1], fine[1:]):
        if b <= a:
            continue
        xm = 0.5 * (a + b)
        xr = 0.5 * (b - a)
        total += xr * float(np.sum(_GL8_W * fn(xm + xr * _GL8_X)))
    return total
