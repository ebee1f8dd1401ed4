"""Convex polygon geometry and the planar zero-moment slicing decomposition.

A convex domain is cut recursively by straight lines into convex pieces, each
line chosen so the two sides have equal area and both carry zero p-moment of
the test field; recursion stops once every piece is thinner than a prescribed
eps in some direction.  Chord-length profiles of the pieces along their long
axis are exported as log-concave 1D weights, which is what ties the planar
problem to the weighted interval problem.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import LinearNDInterpolator, NearestNDInterpolator

from . import expr as expr_mod
from .errors import BracketError, DepthError, DomainError, SplitError, ToleranceError
from .ptrig import _pval
from .wirtinger1d import Weight1D

__all__ = [
    "ConvexPolygon",
    "SplitLine",
    "SlicePiece",
    "ScalarField",
    "WidthRecord",
    "clip",
    "area",
    "diameter",
    "min_width",
    "support_extent",
    "chord_length",
    "p_moment",
    "balance_shift",
    "split_once",
    "SplitResult",
    "decompose",
    "section_profile",
]


@dataclass(frozen=True, eq=False)
class ConvexPolygon:
    """Convex planar region given by a CCW vertex loop.

    Canonicalization removes repeated and collinear vertices; convexity and
    positive area are then enforced.
    """

    vertices: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 3:
            raise DomainError("need at least three planar vertices")
        v = _canonical_loop(v)
        if v.shape[0] < 3:
            raise DomainError("polygon degenerates to a segment")
        scale2 = float(np.max(np.abs(v))) ** 2 + 1e-300
        e = np.roll(v, -1, axis=0) - v
        cross = e[:, 0] * np.roll(e, -1, axis=0)[:, 1] - e[:, 1] * np.roll(e, -1, axis=0)[:, 0]
        if np.any(cross < -1e-12 * scale2):
            raise DomainError("vertices must form a convex CCW loop")
        if _shoelace(v) <= 0.0:
            raise DomainError("polygon must have positive area (CCW order)")
        object.__setattr__(self, "vertices", v)

    @classmethod
    def rectangle(cls, x0: float, y0: float, x1: float, y1: float) -> "ConvexPolygon":
        return cls(np.array([[x0, y0], [x1, y0], [x1, y1], [x0, y1]]))

    @classmethod
    def regular(cls, n: int, radius: float = 1.0, center=(0.0, 0.0)) -> "ConvexPolygon":
        ang = 2.0 * np.pi * np.arange(n) / n
        return cls(np.column_stack([center[0] + radius * np.cos(ang), center[1] + radius * np.sin(ang)]))

    @classmethod
    def from_file(cls, path) -> "ConvexPolygon":
        """One "x y" vertex per line, CCW."""
        return cls(np.atleast_2d(np.loadtxt(path)))

    def to_file(self, path) -> None:
        np.savetxt(path, self.vertices, fmt="%.17g")

    def centroid(self) -> np.ndarray:
        v = self.vertices
        w = np.roll(v, -1, axis=0)
        cr = v[:, 0] * w[:, 1] - w[:, 0] * v[:, 1]
        a = cr.sum() / 2.0
        return ((v + w) * cr[:, None]).sum(axis=0) / (6.0 * a)

    def contains(self, pts, slack: float = 1e-12) -> np.ndarray:
        pts = np.atleast_2d(pts)
        v = self.vertices
        e = np.roll(v, -1, axis=0) - v
        scale = float(np.max(np.abs(v))) + 1.0
        rel = pts[:, None, :] - v[None, :, :]
        cr = e[None, :, 0] * rel[:, :, 1] - e[None, :, 1] * rel[:, :, 0]
        return np.all(cr >= -slack * scale * scale, axis=1)


def _canonical_loop(v: np.ndarray) -> np.ndarray:
    scale = float(np.max(np.abs(v))) + 1e-300
    keep = []
    for i in range(v.shape[0]):
        if keep and np.max(np.abs(v[i] - v[keep[-1]])) <= 1e-14 * scale:
            continue
        keep.append(i)
    if len(keep) > 1 and np.max(np.abs(v[keep[0]] - v[keep[-1]])) <= 1e-14 * scale:
        keep.pop()
    v = v[keep]
    # drop collinear interior vertices
    out = []
    k = v.shape[0]
    for i in range(k):
        a, b, c = v[i - 1], v[i], v[(i + 1) % k]
        cr = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        if abs(cr) > 1e-12 * scale * scale:
            out.append(v[i])
    return np.array(out) if out else v[:0]


def _shoelace(v: np.ndarray) -> float:
    w = np.roll(v, -1, axis=0)
    return float(np.sum(v[:, 0] * w[:, 1] - w[:, 0] * v[:, 1]) / 2.0)


@dataclass(frozen=True)
class SplitLine:
    """Line {x*cos(theta) + y*sin(theta) = c}; theta normalized to [0, pi)."""

    theta: float
    c: float

    def __post_init__(self):
        th = float(self.theta) % math.pi
        c = float(self.c)
        # flipping theta by pi flips the normal, hence the sign of c
        if not 0.0 <= th < math.pi:
            th = 0.0
        wraps = round((float(self.theta) - th) / math.pi)
        if wraps % 2:
            c = -c
        object.__setattr__(self, "theta", th)
        object.__setattr__(self, "c", c)

    @property
    def normal(self) -> np.ndarray:
        return np.array([math.cos(self.theta), math.sin(self.theta)])


@dataclass(frozen=True)
class WidthRecord:
    width: float
    theta: float  # direction (angle of the width normal) in [0, pi)


class ScalarField:
    """Evaluable real field on the plane; vectorized over (n, 2) points."""

    def __init__(self, fn, description: str = "<callable>"):
        self._fn = fn
        self.description = description

    def __call__(self, pts):
        pts = np.asarray(pts, dtype=float)
        single = pts.ndim == 1
        pts = np.atleast_2d(pts)
        vals = np.asarray(self._fn(pts), dtype=float)
        return float(vals[0]) if single else vals

    def shifted(self, t: float) -> "ScalarField":
        return ScalarField(lambda pts: self._fn(pts) - t, f"{self.description} - {t!r}")

    @classmethod
    def from_expression(cls, src: str) -> "ScalarField":
        ast = expr_mod.parse(src)
        return cls(lambda pts: expr_mod.evaluate_array(ast, pts[:, 0], pts[:, 1]), src)

    @classmethod
    def from_callable(cls, f, description: str = "<callable>") -> "ScalarField":
        return cls(lambda pts: np.array([f(x, y) for x, y in pts]), description)

    @classmethod
    def from_samples(cls, points, values, description: str = "<samples>") -> "ScalarField":
        lin = LinearNDInterpolator(points, values)
        near = NearestNDInterpolator(points, values)

        def fn(pts):
            out = lin(pts)
            bad = np.isnan(out)
            if np.any(bad):
                out[bad] = near(pts[bad])
            return out

        return cls(fn, description)


# ---------------------------------------------------------------------------
# elementary measurements
# ---------------------------------------------------------------------------


def area(poly: ConvexPolygon) -> float:
    """Shoelace area."""
    return _shoelace(poly.vertices)


def diameter(poly: ConvexPolygon) -> float:
    """Largest pairwise vertex distance (attained at vertices for convex sets)."""
    v = poly.vertices
    d2 = np.sum((v[:, None, :] - v[None, :, :]) ** 2, axis=2)
    return float(np.sqrt(np.max(d2)))


def min_width(poly: ConvexPolygon) -> WidthRecord:
    """Smallest support width; the minimum over edge-normal directions."""
    v = poly.vertices
    e = np.roll(v, -1, axis=0) - v
    lens = np.hypot(e[:, 0], e[:, 1])
    normals = np.column_stack([-e[:, 1], e[:, 0]]) / lens[:, None]
    proj = v @ normals.T
    widths = proj.max(axis=0) - proj.min(axis=0)
    k = int(np.argmin(widths))
    theta = math.atan2(normals[k, 1], normals[k, 0]) % math.pi
    return WidthRecord(width=float(widths[k]), theta=theta)


def support_extent(poly: ConvexPolygon, theta: float) -> float:
    """Extent of the polygon along the direction (cos theta, sin theta)."""
    d = poly.vertices @ np.array([math.cos(theta), math.sin(theta)])
    return float(d.max() - d.min())


def clip(poly: ConvexPolygon, line: SplitLine, side: str = "le"):
    """Intersection with the closed half-plane on one side of the line.

    side "le" keeps x.n <= c, side "ge" keeps x.n >= c.  Returns a
    ConvexPolygon, or None when the intersection has no interior.
    """
    if side not in ("le", "ge"):
        raise DomainError("side must be 'le' or 'ge'")
    sgn = 1.0 if side == "le" else -1.0
    out = _clip_halfplane(poly.vertices, sgn * line.normal, sgn * line.c)
    if out is None:
        return None
    try:
        return ConvexPolygon(out)
    except DomainError:
        return None


def _clip_halfplane(verts: np.ndarray, n: np.ndarray, c: float):
    d = verts @ n - c
    k = verts.shape[0]
    pts = []
    for i in range(k):
        j = (i + 1) % k
        if d[i] <= 0.0:
            pts.append(verts[i])
        if (d[i] < 0.0 < d[j]) or (d[j] < 0.0 < d[i]):
            t = d[i] / (d[i] - d[j])
            pts.append(verts[i] + t * (verts[j] - verts[i]))
    if len(pts) < 3:
        return None
    return np.array(pts)


def chord_length(poly: ConvexPolygon, theta: float, t):
    """Length of the section poly cut by {x.n = t}, n = (cos theta, sin theta).

    Vectorized over t; exact (piecewise linear in t between vertex
    projections).
    """
    n = np.array([math.cos(theta), math.sin(theta)])
    e = np.array([-n[1], n[0]])
    v = poly.vertices
    dn = v @ n
    de = v @ e
    t = np.asarray(t, dtype=float)
    single = t.ndim == 0
    tt = np.atleast_1d(t)
    out = np.zeros(tt.shape)
    k = v.shape[0]
    for m, c in enumerate(tt):
        lo, hi = np.inf, -np.inf
        for i in range(k):
            j = (i + 1) % k
            a, b = dn[i] - c, dn[j] - c
            if a == 0.0:
                lo, hi = min(lo, de[i]), max(hi, de[i])
            if (a < 0.0 < b) or (b < 0.0 < a):
                s = a / (a - b)
                te = de[i] + s * (de[j] - de[i])
                lo, hi = min(lo, te), max(hi, te)
        if hi > lo:
            out[m] = hi - lo
    return float(out[0]) if single else out


# ---------------------------------------------------------------------------
# adaptive quadrature over the polygon
# ---------------------------------------------------------------------------

# degree-5 Radon rule (7 points) in barycentric coordinates
_SQ15 = math.sqrt(15.0)
_A1 = (6.0 - _SQ15) / 21.0
_A2 = (6.0 + _SQ15) / 21.0
_RULE5_B = np.array(
    [
        [1 / 3, 1 / 3, 1 / 3],
        [_A1, _A1, 1 - 2 * _A1],
        [_A1, 1 - 2 * _A1, _A1],
        [1 - 2 * _A1, _A1, _A1],
        [_A2, _A2, 1 - 2 * _A2],
        [_A2, 1 - 2 * _A2, _A2],
        [1 - 2 * _A2, _A2, _A2],
    ]
)
_RULE5_W = np.array(
    [9 / 40]
    + [(155.0 - _SQ15) / 1200.0] * 3
    + [(155.0 + _SQ15) / 1200.0] * 3
)
def _tri_areas(tris: np.ndarray) -> np.ndarray:
    a = tris[:, 1] - tris[:, 0]
    b = tris[:, 2] - tris[:, 0]
    return 0.5 * np.abs(a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0])


def _rule_eval(tris: np.ndarray, g, bary: np.ndarray, w: np.ndarray) -> np.ndarray:
    pts = np.einsum("qk,nkd->nqd", bary, tris).reshape(-1, 2)
    vals = g(pts).reshape(tris.shape[0], bary.shape[0])
    return vals @ w


def _fan_triangles(poly: ConvexPolygon) -> np.ndarray:
    v = poly.vertices
    c = poly.centroid()
    k = v.shape[0]
    tris = np.empty((k, 3, 2))
    tris[:, 0] = c
    tris[:, 1] = v
    tris[:, 2] = np.roll(v, -1, axis=0)
    return tris


def _adaptive_polygon_quad(poly: ConvexPolygon, g, tol: float, max_tris: int = 600000):
    """Integrate g over poly with the degree-5 rule under adaptive
    quadrisection; the error indicator per triangle is the difference between
    its value and the sum over its four children, so smooth (in particular
    affine) integrands are accepted immediately."""
    tris = _fan_triangles(poly)
    total_area = area(poly)
    parent_vals = _rule_eval(tris, g, _RULE5_B, _RULE5_W) * _tri_areas(tris)
    value = 0.0
    err = 0.0
    seen = tris.shape[0]
    for _ in range(48):
        children = _quadrisect(tris)
        seen += children.shape[0]
        child_vals = _rule_eval(children, g, _RULE5_B, _RULE5_W) * _tri_areas(children)
        sums = child_vals.reshape(-1, 4).sum(axis=1)
        e = np.abs(parent_vals - sums)
        if err + float(np.sum(e)) <= tol:  # global bound met: stop everywhere
            return value + float(np.sum(sums)), err + float(np.sum(e))
        A = _tri_areas(tris)
        local_tol = tol * np.maximum(A, 1e-18 * total_area) / total_area
        done = (e <= local_tol) | (A <= 4e-14 * total_area)
        value += float(np.sum(sums[done]))
        err += float(np.sum(e[done]))
        if np.all(done):
            return value, err
        keep = np.repeat(~done, 4)
        tris = children[keep]
        parent_vals = child_vals[keep]
        if seen > max_tris:
            raise ToleranceError(
                f"polygon quadrature exceeded {max_tris} triangles at tol {tol:.2e}"
            )
    raise ToleranceError("polygon quadrature failed to converge")


def _quadrisect(tris: np.ndarray) -> np.ndarray:
    m01 = 0.5 * (tris[:, 0] + tris[:, 1])
    m12 = 0.5 * (tris[:, 1] + tris[:, 2])
    m20 = 0.5 * (tris[:, 2] + tris[:, 0])
    out = np.empty((tris.shape[0] * 4, 3, 2))
    out[0::4] = np.stack([tris[:, 0], m01, m20], axis=1)
    out[1::4] = np.stack([m01, tris[:, 1], m12], axis=1)
    out[2::4] = np.stack([m20, m12, tris[:, 2]], axis=1)
    out[3::4] = np.stack([m01, m12, m20], axis=1)
    return out


def p_moment(poly: ConvexPolygon, u: ScalarField, p, t: float, tol: float) -> float:
    """int over poly of |u - t|^(p-2) (u - t) dx, within tol."""
    pv = _pval(p)
    if not tol > 0.0:
        raise DomainError("tol must be positive")

    def g(pts):
        d = u(pts) - t
        a = np.abs(d)
        return np.where(a > 0.0, a ** (pv - 2.0), 0.0) * d

    val, _ = _adaptive_polygon_quad(poly, g, tol)
    return val


def _abs_p_minus_1_integral(poly: ConvexPolygon, u: ScalarField, pv: float) -> float:
    """int |u|^(p-1), the natural scale for p-moment magnitudes; a fixed
    two-level refinement of the centroid fan is plenty for a tolerance
    scale."""
    tris = _quadrisect(_quadrisect(_fan_triangles(poly)))
    vals = _rule_eval(tris, lambda pts: np.abs(u(pts)) ** (pv - 1.0), _RULE5_B, _RULE5_W)
    return float(np.sum(vals * _tri_areas(tris)))


def balance_shift(poly: ConvexPolygon, u: ScalarField, p, tol: float) -> float:
    """The unique t making the p-moment of u - t vanish, by bisection.

    The moment is strictly decreasing in t; for a constant field the constant
    itself is returned.
    """
    pv = _pval(p)
    samples = _field_samples(poly, u)
    lo, hi = float(np.min(samples)), float(np.max(samples))
    if hi - lo <= 1e-14 * max(abs(hi), abs(lo), 1.0):
        return 0.5 * (lo + hi)
    mid = 0.5 * (lo + hi)
    scale = _abs_p_minus_1_integral(poly, u.shifted(mid), pv)
    qtol = 0.2 * tol * max(scale, 1e-300)
    m_lo = p_moment(poly, u, pv, lo, qtol)
    m_hi = p_moment(poly, u, pv, hi, qtol)
    slack = tol * scale + 2.0 * qtol
    if m_lo < -slack or m_hi > slack:
        raise BracketError("p-moment is not decreasing across the sample bracket")
    for _ in range(200):
        t = 0.5 * (lo + hi)
        m = p_moment(poly, u, pv, t, qtol)
        if abs(m) <= tol * scale:
            return t
        if m > 0.0:
            lo = t
        else:
            hi = t
        if hi - lo <= 4.0 * np.finfo(float).eps * max(abs(lo), abs(hi), 1e-30):
            return 0.5 * (lo + hi)
    return 0.5 * (lo + hi)


def _field_samples(poly: ConvexPolygon, u: ScalarField) -> np.ndarray:
    tris = _quadrisect(_quadrisect(_fan_triangles(poly)))
    pts = np.einsum("qk,nkd->nqd", _RULE5_B, tris).reshape(-1, 2)
    pts = np.vstack([pts, poly.vertices])
    return u(pts)


# ---------------------------------------------------------------------------
# zero-moment equal-area splitting
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SplitResult:
    left: ConvexPolygon
    right: ConvexPolygon
    line: SplitLine


def _area_median(poly: ConvexPolygon, theta: float) -> float:
    """Offset c for which the half-plane {x.n <= c} holds half the area."""
    n = np.array([math.cos(theta), math.sin(theta)])
    proj = np.sort(np.unique(poly.vertices @ n))
    chords = chord_length(poly, theta, proj)
    segment_area = np.diff(proj) * (chords[:-1] + chords[1:]) / 2.0
    cum = np.concatenate([[0.0], np.cumsum(segment_area)])
    half = cum[-1] / 2.0
    k = int(np.searchsorted(cum, half, side="right")) - 1
    k = min(max(k, 0), len(proj) - 2)
    # chord is linear on [proj_k, proj_{k+1}]; bisect the local quadratic
    base, top = proj[k], proj[k + 1]
    g0, g1 = chords[k], chords[k + 1]
    d = top - base

    def a_of(c):
        s = c - base
        return cum[k] + s * g0 + s * s * (g1 - g0) / (2.0 * d)

    lo, hi = base, top
    for _ in range(80):
        c = 0.5 * (lo + hi)
        if a_of(c) < half:
            lo = c
        else:
            hi = c
    return 0.5 * (lo + hi)


def _left_piece(poly: ConvexPolygon, theta: float):
    """Clip along the area-median line of direction theta; theta may run over
    [0, 2pi), flipping which side counts as left."""
    n = np.array([math.cos(theta), math.sin(theta)])
    c = _area_median(poly, theta)
    left = _clip_halfplane(poly.vertices, n, c)
    right = _clip_halfplane(poly.vertices, -n, -c)
    return left, right, c


def split_once(poly: ConvexPolygon, u: ScalarField, p, tol: float) -> SplitResult:
    """Cut poly by a line so both sides have equal area and zero p-moment.

    The area-median offset c(theta) is unique and continuous in theta, and
    the left-piece moment B(theta) satisfies B(theta+pi) = -B(theta) when the
    whole-polygon moment vanishes, so a sign change always exists; theta is
    found by a 128-direction scan plus bisection.  The caller must pre-balance
    u on poly.
    """
    pv = _pval(p)
    A = area(poly)
    scale = _abs_p_minus_1_integral(poly, u, pv)
    ztol = tol * max(scale, 1e-300)
    qtol = 0.25 * ztol
    m_tot = p_moment(poly, u, pv, 0.0, qtol)
    if abs(m_tot) > 64.0 * ztol:
        raise DomainError(
            f"field is not balanced on the polygon (moment {m_tot:.3e}, scale {scale:.3e})"
        )
    # splitting any residual imbalance evenly keeps the per-piece moment,
    # relative to the piece's own shrinking scale, from blowing up as the
    # recursion deepens
    target = 0.5 * m_tot

    def centered_moment(theta):
        left, right, c = _left_piece(poly, theta)
        if left is None or right is None:
            return None, None
        val, _ = _adaptive_polygon_quad(
            ConvexPolygon(left), lambda pts: _moment_integrand(u, pv, pts), qtol
        )
        return val - target, c

    nscan = 128
    thetas = np.pi * np.arange(nscan) / nscan
    bvals = np.empty(nscan)
    hit = None
    for k in range(nscan):
        b, c = centered_moment(thetas[k])
        bvals[k] = np.nan if b is None else b
        if b is not None and abs(b) <= ztol:
            hit = (thetas[k], c)
            break
    if hit is None:
        ext = np.append(bvals, -bvals[0])
        ext_th = np.append(thetas, np.pi)
        for k in range(nscan):
            b0, b1 = ext[k], ext[k + 1]
            if np.isnan(b0) or np.isnan(b1) or b0 * b1 >= 0.0:
                continue
            ta, tb, ba = ext_th[k], ext_th[k + 1], b0
            for _ in range(100):
                tm = 0.5 * (ta + tb)
                bm, cm = centered_moment(tm)
                if bm is None:
                    raise SplitError("degenerate clip during theta bisection")
                if abs(bm) <= ztol or tb - ta < 1e-14:
                    hit = (tm, cm)
                    break
                if (bm > 0.0) == (ba > 0.0):
                    ta = tm
                else:
                    tb = tm
            break
        if hit is None:
            raise SplitError(
                "no zero of the centered left-piece moment on the direction scan; "
                f"range [{np.nanmin(bvals):.3e}, {np.nanmax(bvals):.3e}], ztol {ztol:.3e}"
            )
    theta_star, c_star = hit
    n = np.array([math.cos(theta_star), math.sin(theta_star)])
    left_v = _clip_halfplane(poly.vertices, n, c_star)
    right_v = _clip_halfplane(poly.vertices, -n, -c_star)
    if left_v is None or right_v is None:
        raise SplitError("split line grazes the polygon; pieces are degenerate")
    left = ConvexPolygon(left_v)
    right = ConvexPolygon(right_v)
    # independent re-verification of the postconditions
    a_l, a_r = area(left), area(right)
    if abs(a_l - a_r) > max(tol, 1e-9) * A + 1e-12 * A:
        raise SplitError(f"area imbalance {abs(a_l - a_r):.3e} after split")
    m_l = p_moment(left, u, pv, 0.0, qtol)
    m_r = p_moment(right, u, pv, 0.0, qtol)
    allowed = abs(target) + 2.0 * ztol
    if abs(m_l) > allowed or abs(m_r) > allowed:
        raise SplitError(f"piece moments {m_l:.3e}, {m_r:.3e} exceed {allowed:.3e}")
    return SplitResult(left=left, right=right, line=SplitLine(theta_star, c_star))


def _moment_integrand(u: ScalarField, pv: float, pts: np.ndarray) -> np.ndarray:
    d = u(pts)
    a = np.abs(d)
    return np.where(a > 0.0, a ** (pv - 2.0), 0.0) * d


@dataclass(frozen=True, eq=False)
class SlicePiece:
    polygon: ConvexPolygon
    axis_theta: float  # long-axis direction, in [0, pi)
    length: float  # extent along the axis (the piece's d_i)
    width: float  # min-width, <= eps after decomposition
    p_moment_residual: float


def decompose(
    poly: ConvexPolygon, u: ScalarField, p, eps: float, max_depth: int = 48, tol: float = 1e-10
):
    """Recursively split until every piece has min-width <= eps.

    Every split halves the area exactly, so the planar width bound
    w <= sqrt(2*area) forces termination regardless of the cut directions the
    moment condition picks.  Pieces tile the polygon and each carries zero
    p-moment up to tol*scale; ordering is lexicographic on centroids.
    """
    pv = _pval(p)
    if not eps > 0.0:
        raise DomainError("eps must be positive")
    scale = _abs_p_minus_1_integral(poly, u, pv)
    m0 = p_moment(poly, u, pv, 0.0, 0.25 * tol * scale)
    if abs(m0) > 16.0 * tol * max(scale, 1e-300):
        raise DomainError("field must be pre-balanced on the polygon")
    pieces = []
    stack = [(poly, 0)]
    while stack:
        piece, depth = stack.pop()
        wr = min_width(piece)
        if wr.width <= eps:
            axis = (wr.theta + math.pi / 2.0) % math.pi
            resid = p_moment(piece, u, pv, 0.0, 0.25 * tol * max(scale, 1e-300))
            pieces.append(
                SlicePiece(
                    polygon=piece,
                    axis_theta=axis,
                    length=support_extent(piece, axis),
                    width=wr.width,
                    p_moment_residual=abs(resid),
                )
            )
            continue
        if depth >= max_depth:
            raise DepthError(f"decomposition exceeded depth {max_depth}")
        result = split_once(piece, u, pv, tol)
        stack.append((result.left, depth + 1))
        stack.append((result.right, depth + 1))
    pieces.sort(key=lambda s: (s.polygon.centroid()[0], s.polygon.centroid()[1]))
    return pieces


def section_profile(poly: ConvexPolygon, theta: float, m: int) -> Weight1D:
    """Chord-length profile along theta, sampled at m uniform stations and
    exported as a log-linear spline over the positive samples.

    Convexity makes the chord profile concave, hence log-concave, which is
    what the 1D weighted eigenvalue machinery requires.
    """
    if m < 8:
        raise DomainError("need at least 8 profile samples")
    n = np.array([math.cos(theta), math.sin(theta)])
    proj = poly.vertices @ n
    t0, t1 = float(proj.min()), float(proj.max())
    ts = np.linspace(t0, t1, m)
    f = chord_length(poly, theta, ts)
    pos = f > 1e-12 * float(f.max())
    ts, f = ts[pos], f[pos]
    if ts.size < 2:
        raise DomainError("profile has fewer than two positive samples")
    return Weight1D.log_linear(ts - ts[0], np.log(f))
