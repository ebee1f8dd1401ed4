"""Weighted eigenvalue solvers for the 1D p-Laplacian.

For a positive log-concave weight f on [0, L] the operations here locate the
first nontrivial Neumann eigenvalue and the first Dirichlet eigenvalue of

    (-u'|u'|^{p-2})' = lam*u|u|^{p-2} + h'(x)*u'|u'|^{p-2},   h = log f,

by shooting on the equivalent first-order system in (u, phi) with
phi = u'|u'|^{p-2}, bisecting lam on the boundary residual.  A direct
variational route (projected descent on the weighted Rayleigh quotient over a
uniform grid) provides an independent upper bound, and the exponential
substitution identities connect weighted energies to unweighted drift
energies of the transformed function.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.linalg import cho_solve_banded, cholesky_banded

from ._backend import kernels
from ._descent import projected_descent
from .errors import BracketError, DomainError, ToleranceError
from .ptrig import _pval, sharp_constant_1d
from .pwl import PiecewiseLinear

__all__ = [
    "Weight1D",
    "SampledFunction",
    "EigenResult1D",
    "neumann_first_nontrivial",
    "dirichlet_first",
    "rayleigh_min_1d",
    "Rayleigh1DResult",
    "neumann_dirichlet_gap",
    "GapRecord",
    "fold_to_dirichlet",
    "dirichlet_quotient",
    "exp_identity_check",
    "ExpIdentityRecord",
]


@dataclass(frozen=True, eq=False)
class Weight1D:
    """Positive log-concave weight on [0, L].

    Two variants: ``exponential`` with f(x) = exp(kappa*x), and ``spline``
    where log f is piecewise linear over increasing knots spanning [0, L]
    (slopes must be nonincreasing, which is exactly log-concavity for that
    class).
    """

    length: float
    kind: str
    kappa: float = 0.0
    knots: np.ndarray | None = None
    log_values: np.ndarray | None = None

    def __post_init__(self):
        if not self.length > 0.0:
            raise DomainError("weight domain length must be positive")
        if self.kind == "exponential":
            return
        if self.kind != "spline":
            raise DomainError(f"unknown weight kind {self.kind!r}")
        k = np.asarray(self.knots, dtype=float)
        lv = np.asarray(self.log_values, dtype=float)
        if k.ndim != 1 or k.shape != lv.shape or k.size < 2:
            raise DomainError("spline weight needs matching knot/value arrays")
        if not (np.all(np.diff(k) > 0) and k[0] == 0.0 and abs(k[-1] - self.length) < 1e-12):
            raise DomainError("knots must increase from 0 to L")
        slopes = np.diff(lv) / np.diff(k)
        scale = max(1.0, float(np.max(np.abs(slopes))))
        if np.any(np.diff(slopes) > 1e-9 * scale):
            raise DomainError("log-weight slopes must be nonincreasing (log-concavity)")
        object.__setattr__(self, "knots", k)
        object.__setattr__(self, "log_values", lv)

    # -- constructors ----------------------------------------------------
    @classmethod
    def exponential(cls, kappa: float, length: float) -> "Weight1D":
        return cls(length=float(length), kind="exponential", kappa=float(kappa))

    @classmethod
    def log_linear(cls, knots, log_values) -> "Weight1D":
        knots = np.asarray(knots, dtype=float)
        return cls(
            length=float(knots[-1]),
            kind="spline",
            knots=knots,
            log_values=np.asarray(log_values, dtype=float),
        )

    @classmethod
    def from_log_fn(cls, log_f, length: float, n: int = 65) -> "Weight1D":
        """Sample a concave log-weight onto a uniform spline."""
        knots = np.linspace(0.0, length, n)
        return cls.log_linear(knots, np.array([log_f(t) for t in knots]))

    @classmethod
    def from_csv(cls, path) -> "Weight1D":
        """Rows "x,log_f" sorted by x, spanning [0, L]."""
        rows = np.atleast_2d(np.loadtxt(path, delimiter=","))
        return cls.log_linear(rows[:, 0], rows[:, 1])

    # -- evaluation -------------------------------------------------------
    def log_f(self, x):
        if self.kind == "exponential":
            return self.kappa * np.asarray(x, dtype=float)
        return np.interp(x, self.knots, self.log_values)

    def f(self, x):
        return np.exp(self.log_f(x))

    def dlog_f(self, x):
        """h'(x); for splines the left-limit at knots."""
        if self.kind == "exponential":
            return np.full(np.shape(x), self.kappa) if np.ndim(x) else self.kappa
        slopes = np.diff(self.log_values) / np.diff(self.knots)
        idx = np.clip(np.searchsorted(self.knots, x, side="left") - 1, 0, len(slopes) - 1)
        return slopes[idx]

    def segments(self):
        """(seg_x, seg_g): contiguous intervals with constant h'."""
        if self.kind == "exponential":
            return np.array([0.0, self.length]), np.array([self.kappa])
        seg_g = np.diff(self.log_values) / np.diff(self.knots)
        return self.knots.copy(), seg_g


@dataclass(frozen=True, eq=False)
class SampledFunction:
    """Function known at sample points; evaluated by linear interpolation."""

    x: np.ndarray
    y: np.ndarray

    def __call__(self, t):
        return np.interp(t, self.x, self.y)

    def to_csv(self, path) -> None:
        np.savetxt(path, np.column_stack([self.x, self.y]), delimiter=",", fmt="%.17g")


@dataclass(frozen=True, eq=False)
class EigenResult1D:
    lam: float
    eigenfunction: SampledFunction
    interior_zero: float
    boundary_residual: float
    iterations: int
    converged: bool


# ---------------------------------------------------------------------------
# shooting
# ---------------------------------------------------------------------------

_N_BASE = 4000
_REFINE = 16


def _integrate(w: Weight1D, p: float, lam: float, u0: float, phi0: float):
    seg_x, seg_g = w.segments()
    lens = np.diff(seg_x)
    seg_n = np.maximum(1, np.rint(_N_BASE * lens / w.length)).astype(np.int64)
    return kernels.shoot1d(
        p,
        lam,
        np.ascontiguousarray(seg_x),
        np.ascontiguousarray(seg_g),
        seg_n,
        u0,
        phi0,
        _REFINE,
    )


def _interior_zero(xs, us, x_hi_cut=None):
    for i in range(len(us) - 1):
        if x_hi_cut is not None and xs[i + 1] >= x_hi_cut:
            break
        if us[i] * us[i + 1] < 0.0:
            return float(xs[i] - us[i] * (xs[i + 1] - xs[i]) / (us[i + 1] - us[i]))
    return math.nan


def _zeros_before(xs, us, x_cut):
    count = 0
    for i in range(len(us) - 1):
        if xs[i + 1] >= x_cut:
            break
        if us[i] * us[i + 1] < 0.0:
            count += 1
    return count


def _eigen_bisect(w, p, tol, u0, phi0, residual_of, zero_budget):
    """Scan lam upward from below the sharp constant until the boundary
    residual changes sign, then bisect.  residual_of maps the integrator
    output to the signed quantity driving the bisection."""
    pv = p
    sharp = sharp_constant_1d(pv, w.length)
    lam = 0.5 * sharp
    evals = 0

    def run(lam):
        nonlocal evals
        evals += 1
        return _integrate(w, pv, lam, u0, phi0)

    out = run(lam)
    # defensive: make sure we start below the first sign change
    tries = 0
    while _zeros_before(out[0], out[1], w.length) > zero_budget and tries < 60:
        lam *= 0.5
        out = run(lam)
        tries += 1
    s_lo = math.copysign(1.0, residual_of(out))
    lam_lo, lam_hi = lam, None
    for _ in range(200):
        lam_try = lam * 1.4
        out_try = run(lam_try)
        if math.copysign(1.0, residual_of(out_try)) != s_lo:
            lam_hi = lam_try
            break
        lam = lam_try
        lam_lo = lam
    if lam_hi is None:
        raise BracketError("no sign change of the boundary residual found in the lam scan")

    best = None
    for _ in range(200):
        mid = 0.5 * (lam_lo + lam_hi)
        out_mid = run(mid)
        r = residual_of(out_mid)
        if best is None or abs(r) < abs(best[1]):
            best = (mid, r, out_mid)
        if math.copysign(1.0, r) == s_lo:
            lam_lo = mid
        else:
            lam_hi = mid
        if (lam_hi - lam_lo) <= 8.0 * np.finfo(float).eps * lam_hi:
            break
    return best, evals, sharp


def neumann_first_nontrivial(w: Weight1D, p, tol: float) -> EigenResult1D:
    """Smallest lam whose Neumann shooting solution (u(0)=1, u'(0)=0) has one
    interior zero and u'(L) = 0 within tol."""
    pv = _pval(p)
    if not tol > 0.0:
        raise DomainError("tol must be positive")

    def residual(out):
        return out[2][-1]  # phi(L)

    best, evals, _ = _eigen_bisect(w, pv, tol, 1.0, 0.0, residual, zero_budget=1)
    lam, phi_L, (xs, us, phis, zc) = best
    boundary = abs(phi_L) ** (1.0 / (pv - 1.0))
    if boundary > tol:
        raise ToleranceError(
            f"boundary residual |u'(L)| = {boundary:.3e} stuck above tol {tol:.3e}; "
            "for p > 2 the residual floor scales like (eps*lam)^(1/(p-1))"
        )
    if zc != 1:
        raise BracketError(f"converged eigenfunction has {zc} interior zeros, expected 1")
    x0 = _interior_zero(xs, us)
    return EigenResult1D(
        lam=lam,
        eigenfunction=SampledFunction(xs, us),
        interior_zero=x0,
        boundary_residual=boundary,
        iterations=evals,
        converged=True,
    )


def dirichlet_first(w: Weight1D, p, tol: float) -> EigenResult1D:
    """Smallest lam with u(0) = u(L) = 0 and u > 0 in between."""
    pv = _pval(p)
    if not tol > 0.0:
        raise DomainError("tol must be positive")

    def residual(out):
        return out[1][-1]  # u(L)

    best, evals, _ = _eigen_bisect(w, pv, tol, 0.0, 1.0, residual, zero_budget=0)
    lam, u_L, (xs, us, phis, zc) = best
    if abs(u_L) > tol:
        raise ToleranceError(f"boundary residual |u(L)| = {abs(u_L):.3e} above tol {tol:.3e}")
    if _zeros_before(xs, us, 0.99 * w.length) != 0:
        raise BracketError("first Dirichlet eigenfunction must be one-signed")
    return EigenResult1D(
        lam=lam,
        eigenfunction=SampledFunction(xs, us),
        interior_zero=math.nan,
        boundary_residual=abs(u_L),
        iterations=evals,
        converged=True,
    )


@dataclass(frozen=True)
class GapRecord:
    lambda_n: float
    lambda_d: float
    gap: float
    ok: bool


def neumann_dirichlet_gap(kappa: float, p, L: float, tol: float) -> GapRecord:
    """Relative gap between the Neumann and Dirichlet eigenvalues for the
    exponential weight exp(kappa*x); the two coincide in exact arithmetic."""
    w = Weight1D.exponential(kappa, L)
    rn = neumann_first_nontrivial(w, p, tol)
    rd = dirichlet_first(w, p, tol)
    gap = abs(rn.lam - rd.lam) / rd.lam
    return GapRecord(lambda_n=rn.lam, lambda_d=rd.lam, gap=gap, ok=gap <= 10.0 * tol)


# ---------------------------------------------------------------------------
# variational route
# ---------------------------------------------------------------------------

_GL4_X = np.array(
    [0.069431844202973714, 0.33000947820757187, 0.66999052179242813, 0.93056815579702623]
)
_GL4_W = np.array(
    [0.17392742256872692, 0.32607257743127305, 0.32607257743127305, 0.17392742256872692]
)


@dataclass(frozen=True, eq=False)
class Rayleigh1DResult:
    lambda_upper: float
    u_discrete: SampledFunction
    iterations: int
    converged: bool


def _balance_nodes(uq, wq, p, assert_monotone=True):
    """Scalar shift t with sum wq*|uq-t|^{p-2}(uq-t) = 0, by bisection."""

    def moment(t):
        d = uq - t
        return float(np.sum(wq * np.abs(d) ** (p - 2.0) * d))

    lo, hi = float(np.min(uq)), float(np.max(uq))
    if hi - lo <= 1e-300:
        return lo
    mlo, mhi = moment(lo), moment(hi)
    scale = max(mlo, -mhi, 1e-300)
    if assert_monotone and (mlo < -1e-12 * scale or mhi > 1e-12 * scale):
        raise BracketError("balance residual is not decreasing across its bracket")
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        m = moment(mid)
        if abs(m) <= 1e-13 * scale:
            return mid
        if m > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def rayleigh_min_1d(w: Weight1D, p, N: int, iters: int) -> Rayleigh1DResult:
    """Upper bound on the weighted Rayleigh quotient minimum over
    piecewise-linear functions on a uniform N-node grid.

    Projected descent: after every step the p-mean constraint is restored by
    the balance shift and the iterate is renormalized; search directions are
    preconditioned by the (unweighted) H1 operator of the grid, with Armijo
    backtracking.  Deterministic start u0(x) = x - L/2.
    """
    pv = _pval(p)
    if N < 16:
        raise DomainError("need at least 16 grid nodes")
    L = w.length
    x = np.linspace(0.0, L, N)
    h = x[1] - x[0]
    # weighted quadrature data per element
    xq = (x[:-1, None] + h * _GL4_X[None, :]).ravel()
    fq = w.f(xq)
    wq = fq * np.tile(_GL4_W, N - 1) * h
    xi = np.tile(_GL4_X, N - 1)
    F_e = (fq.reshape(N - 1, 4) * _GL4_W[None, :]).sum(axis=1) * h

    # H1 preconditioner (stiffness + lumped mass), banded Cholesky
    band = np.zeros((2, N))
    band[1, :] = 2.0 / h + h
    band[1, 0] = band[1, -1] = 1.0 / h + h / 2.0
    band[0, 1:] = -1.0 / h
    chol = cholesky_banded(band)

    def precond(g):
        return cho_solve_banded((chol, False), g)

    def quad_values(u):
        return u[:-1].repeat(4) * (1.0 - xi) + u[1:].repeat(4) * xi

    def project(u):
        uq = quad_values(u)
        t = _balance_nodes(uq, wq, pv)
        u = u - t
        uq = uq - t
        norm = float(np.sum(wq * np.abs(uq) ** pv)) ** (1.0 / pv)
        return u / norm

    def evaluate(u):
        s = np.diff(u) / h
        ap = np.abs(s) ** (pv - 2.0) * s
        E = float(np.sum(F_e * np.abs(s) ** pv))
        gE = np.zeros(N)
        contrib = pv * F_e * ap / h
        gE[:-1] -= contrib
        gE[1:] += contrib
        uq = quad_values(u)
        aq = np.abs(uq)
        sp = np.where(aq > 0.0, aq ** (pv - 2.0), 0.0) * uq
        D = float(np.sum(wq * sp * uq))
        coef = pv * wq * sp
        gD = np.zeros(N)
        np.add.at(gD, np.repeat(np.arange(N - 1), 4), coef * (1.0 - xi))
        np.add.at(gD, np.repeat(np.arange(1, N), 4), coef * xi)
        J = E / D
        return J, (gE - J * gD) / D

    u, J, _, it, converged = projected_descent(
        x - L / 2.0, project, evaluate, precond, iters, gtol=1e-8, stag_tol=1e-10
    )
    return Rayleigh1DResult(
        lambda_upper=J, u_discrete=SampledFunction(x, u), iterations=it, converged=converged
    )


# ---------------------------------------------------------------------------
# folding and the exponential substitution
# ---------------------------------------------------------------------------


def fold_to_dirichlet(v: SampledFunction, x0: float, L: float) -> SampledFunction:
    """Fold a one-zero Neumann eigenfunction into a nonnegative Dirichlet one.

    w(x) = |v(x+x0)/v(L)| on [0, L-x0] and |v(x-(L-x0))/v(0)| on [L-x0, L];
    both branches equal 1 at the seam.
    """
    y0 = float(v(x0))
    vmax = float(np.max(np.abs(v.y)))
    i = int(np.searchsorted(v.x, x0))
    bracketed = 0 < i < len(v.x) and v.y[i - 1] * v.y[i] <= 0.0
    if not bracketed and abs(y0) > 1e-6 * vmax:
        raise DomainError("v has no bracketed zero at x0")
    vL, v0 = float(v.y[-1]), float(v.y[0])
    if abs(vL) < 1e-12 * vmax or abs(v0) < 1e-12 * vmax:
        raise DomainError("v must be nonzero at both endpoints")
    left_m = v.x >= x0
    xs_l = v.x[left_m] - x0
    ys_l = np.abs(v.y[left_m] / vL)
    right_m = v.x <= x0
    xs_r = (L - x0) + v.x[right_m]
    ys_r = np.abs(v.y[right_m] / v0)
    if xs_l[0] > 0.0:  # x0 fell between samples: pin the left endpoint
        xs_l = np.concatenate([[0.0], xs_l])
        ys_l = np.concatenate([[abs(y0 / vL)], ys_l])
    if xs_r[-1] < L:  # and the right endpoint
        xs_r = np.concatenate([xs_r, [L]])
        ys_r = np.concatenate([ys_r, [abs(y0 / v0)]])
    xs = np.concatenate([xs_l, xs_r])
    ys = np.concatenate([ys_l, ys_r])
    keep = np.concatenate([[True], np.diff(xs) > 0])
    return SampledFunction(xs[keep], ys[keep])


def dirichlet_quotient(fn: SampledFunction, w: Weight1D, p) -> float:
    """Weighted Rayleigh quotient of a sampled function (no zero-mean
    constraint; intended for boundary-vanishing functions)."""
    pv = _pval(p)
    xs, ys = fn.x, fn.y
    hs = np.diff(xs)
    s = np.diff(ys) / hs
    xq = xs[:-1, None] + hs[:, None] * _GL4_X[None, :]
    fq = w.f(xq)
    wq = fq * _GL4_W[None, :] * hs[:, None]
    uq = ys[:-1, None] * (1.0 - _GL4_X[None, :]) + ys[1:, None] * _GL4_X[None, :]
    num = float(np.sum(wq * np.abs(s[:, None]) ** pv))
    den = float(np.sum(wq * np.abs(uq) ** pv))
    return num / den


@dataclass(frozen=True)
class ExpIdentityRecord:
    lhs_energy: float
    rhs_energy: float
    lhs_norm: float
    rhs_norm: float

    @property
    def energy_residual(self) -> float:
        return abs(self.lhs_energy - self.rhs_energy)

    @property
    def norm_residual(self) -> float:
        return abs(self.lhs_norm - self.rhs_norm)


def exp_identity_check(u: PiecewiseLinear, kappa: float, p, tol: float) -> ExpIdentityRecord:
    """Quadrature check of the exponential substitution v = u*exp(kappa*x/p):

        int exp(kappa x)|u'|^p dx = int |v' - (kappa/p) v|^p dx
        int exp(kappa x)|u|^p  dx = int |v|^p dx

    Both sides of each identity are integrated independently piece by piece.
    """
    pv = _pval(p)
    if not tol > 0.0:
        raise DomainError("tol must be positive")
    r = kappa / pv
    vals = np.zeros(4)
    errs = np.zeros(4)
    for i in range(len(u.x) - 1):
        x0, x1 = u.x[i], u.x[i + 1]
        v0, s = u.v[i], u.slopes[i]

        def uu(x):
            return v0 + s * (x - x0)

        def lhs_e(x):
            return math.exp(kappa * x) * abs(s) ** pv

        def rhs_e(x):
            vv = uu(x) * math.exp(r * x)
            dv = (s + r * uu(x)) * math.exp(r * x)
            return abs(dv - r * vv) ** pv

        def lhs_n(x):
            return math.exp(kappa * x) * abs(uu(x)) ** pv

        def rhs_n(x):
            return abs(uu(x) * math.exp(r * x)) ** pv

        for j, fn in enumerate((lhs_e, rhs_e, lhs_n, rhs_n)):
            val, err = integrate.quad(fn, x0, x1, epsrel=1e-12, epsabs=0.0, limit=200)
            vals[j] += val
            errs[j] += err
    scale = max(float(np.max(np.abs(vals))), 1e-300)
    if float(np.max(errs)) > tol * scale:
        raise ToleranceError("identity quadrature failed to reach tolerance")
    return ExpIdentityRecord(
        lhs_energy=vals[0], rhs_energy=vals[1], lhs_norm=vals[2], rhs_norm=vals[3]
    )
