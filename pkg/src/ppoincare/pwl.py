"""Exact calculus on compactly supported piecewise-linear functions.

Everything here is closed-form per linear piece: L^p norms, drift energies
int |u' + kappa*u|^p, the distribution function, and the symmetric decreasing
rearrangement.  The rearrangement inequality check (drift energy of u versus
the plain derivative energy of the rearranged function) and the two-slope
micro-inequality underlying it live here as well, together with the explicit
two-slope wedge showing that the rearranged drift energy can exceed the
original one when p > 2.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .errors import DomainError, ToleranceError
from .ptrig import _pval

__all__ = [
    "PiecewiseLinear",
    "DistributionFunction",
    "lp_norm_p",
    "distribution",
    "rearrange",
    "derivative_energy",
    "drift_energy",
    "general_drift_energy",
    "two_slope_gap",
    "TwoSlopeGap",
    "verify_prop21",
    "Prop21Report",
    "remark21_function",
    "remark21_counterexample",
    "Remark21Record",
]

# 4-point Gauss-Legendre on [0, 1]; used only on nearly-constant pieces where
# the closed-form antiderivative would cancel catastrophically.
_GL4_X = np.array(
    [0.069431844202973714, 0.33000947820757187, 0.66999052179242813, 0.93056815579702623]
)
_GL4_W = np.array(
    [0.17392742256872692, 0.32607257743127305, 0.32607257743127305, 0.17392742256872692]
)


@dataclass(frozen=True, eq=False)
class PiecewiseLinear:
    """Continuous compactly supported piecewise-linear function.

    ``x`` holds strictly increasing breakpoints, ``v`` the values there; the
    first and last value must be exactly zero.  Construction canonicalizes:
    interior breakpoints where the left and right slopes coincide are dropped.
    """

    x: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        v = np.asarray(self.v, dtype=float)
        if x.ndim != 1 or x.shape != v.shape or x.size < 2:
            raise DomainError("need matching 1D arrays with at least two breakpoints")
        if not np.all(np.diff(x) > 0):
            raise DomainError("breakpoints must be strictly increasing")
        if v[0] != 0.0 or v[-1] != 0.0:
            raise DomainError("endpoint values must be exactly zero (compact support)")
        x, v = _canonicalize(x, v)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "v", v)

    # -- basic queries -------------------------------------------------
    def __call__(self, t):
        return np.interp(t, self.x, self.v, left=0.0, right=0.0)

    @property
    def lengths(self) -> np.ndarray:
        return np.diff(self.x)

    @property
    def slopes(self) -> np.ndarray:
        return np.diff(self.v) / np.diff(self.x)

    @property
    def support_length(self) -> float:
        return float(self.x[-1] - self.x[0])

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.v)))

    # -- algebra -------------------------------------------------------
    def translate(self, dx: float) -> "PiecewiseLinear":
        return PiecewiseLinear(self.x + dx, self.v.copy())

    def abs(self) -> "PiecewiseLinear":
        """Pointwise modulus; inserts breakpoints at interior zero crossings."""
        xs = [self.x[0]]
        vs = [0.0]
        for i in range(len(self.x) - 1):
            x0, x1 = self.x[i], self.x[i + 1]
            v0, v1 = self.v[i], self.v[i + 1]
            if v0 * v1 < 0.0:
                xc = x0 + (x1 - x0) * v0 / (v0 - v1)
                if xs[-1] < xc < x1:
                    xs.append(xc)
                    vs.append(0.0)
            xs.append(x1)
            vs.append(abs(v1))
        return PiecewiseLinear(np.array(xs), np.array(vs))

    # -- I/O -----------------------------------------------------------
    @classmethod
    def from_csv(cls, path) -> "PiecewiseLinear":
        """Read rows "x,value" sorted by x."""
        rows = np.atleast_2d(np.loadtxt(path, delimiter=","))
        return cls(rows[:, 0], rows[:, 1])

    def to_csv(self, path) -> None:
        np.savetxt(path, np.column_stack([self.x, self.v]), delimiter=",", fmt="%.17g")


def _canonicalize(x: np.ndarray, v: np.ndarray):
    if x.size <= 2:
        return x.copy(), v.copy()
    slopes = np.diff(v) / np.diff(x)
    keep = np.ones(x.size, dtype=bool)
    keep[1:-1] = slopes[:-1] != slopes[1:]
    return x[keep].copy(), v[keep].copy()


# ---------------------------------------------------------------------------
# exact |a + b s|^p integrals
# ---------------------------------------------------------------------------


def _abs_pow_integral(a, b, ell, p):
    """Exact int_0^ell |a + b*s|^p ds, elementwise over arrays.

    Uses the antiderivative |y|^p * y / (b*(p+1)); on nearly constant pieces
    (|b|*ell far below the value scale) that difference cancels, so a 4-point
    Gauss rule takes over; it is accurate to roundoff there because the
    integrand has no interior zero.
    """
    a = np.asarray(a, dtype=float)
    b, ell = np.broadcast_to(b, a.shape).astype(float), np.broadcast_to(ell, a.shape).astype(float)
    a1 = a + b * ell
    scale = np.maximum(np.abs(a), np.abs(a1))
    out = np.zeros(a.shape)

    nz = scale > 0.0
    const = nz & (b == 0.0)
    out[const] = np.abs(a[const]) ** p * ell[const]

    gen = nz & (b != 0.0)
    near = gen & (np.abs(b) * ell < 1e-4 * scale)
    gen &= ~near

    if np.any(gen):
        an = a[gen] / scale[gen]
        a1n = a1[gen] / scale[gen]
        bn = b[gen] / scale[gen]
        out[gen] = (
            scale[gen] ** p
            * (np.abs(a1n) ** p * a1n - np.abs(an) ** p * an)
            / (bn * (p + 1.0))
        )
    if np.any(near):
        s = a[near, None] + b[near, None] * (ell[near, None] * _GL4_X[None, :])
        out[near] = ell[near] * (np.abs(s) ** p @ _GL4_W)
    return out


def lp_norm_p(u: PiecewiseLinear, p) -> float:
    """Exact int |u|^p dx."""
    pv = _pval(p)
    return float(np.sum(_abs_pow_integral(u.v[:-1], u.slopes, u.lengths, pv)))


def derivative_energy(u: PiecewiseLinear, p) -> float:
    """Exact int |u'|^p dx (u' is piecewise constant)."""
    pv = _pval(p)
    return float(np.sum(np.abs(u.slopes) ** pv * u.lengths))


def drift_energy(u: PiecewiseLinear, kappa: float, p) -> float:
    """Exact int |u'(x) + kappa*u(x)|^p dx.

    On a piece where u(s) = v0 + b*s the integrand is |(b + kappa*v0) +
    kappa*b*s|^p, again an affine argument, so the same antiderivative
    applies.
    """
    pv = _pval(p)
    b = u.slopes
    a = b + kappa * u.v[:-1]
    return float(np.sum(_abs_pow_integral(a, kappa * b, u.lengths, pv)))


def _drift_energy_sweep(u: PiecewiseLinear, kappas: np.ndarray, p: float) -> np.ndarray:
    """drift_energy for every kappa at once (pieces x kappas broadcast)."""
    b = u.slopes[None, :]
    v0 = u.v[:-1][None, :]
    ell = np.broadcast_to(u.lengths[None, :], (kappas.size, u.lengths.size))
    kk = kappas[:, None]
    a = b + kk * v0
    vals = _abs_pow_integral(a, kk * b, ell, p)
    return vals.sum(axis=1)


def general_drift_energy(u: PiecewiseLinear, f, p, tol: float) -> float:
    """int |u'(x) + f(u(x))|^p dx within tol, for a level function f.

    u must be nonnegative; f must be evaluable on [0, max u].  Adaptive
    quadrature runs per linear piece (and is exact to roundoff when f is
    constant).
    """
    pv = _pval(p)
    if not tol > 0.0:
        raise DomainError("tol must be positive")
    if np.min(u.v) < 0.0:
        raise DomainError("u must be nonnegative; apply .abs() first")
    total = 0.0
    err_total = 0.0
    npieces = len(u.lengths)
    for i in range(npieces):
        x0, x1 = u.x[i], u.x[i + 1]
        v0, s = u.v[i], u.slopes[i]

        def integrand(x):
            return abs(s + f(v0 + s * (x - x0))) ** pv

        val, err = integrate.quad(integrand, x0, x1, epsabs=tol / (2 * npieces), limit=200)
        total += val
        err_total += err
    if err_total > tol:
        raise ToleranceError(f"drift quadrature error {err_total:.3e} exceeds tol {tol:.3e}")
    return total


# ---------------------------------------------------------------------------
# distribution function and rearrangement
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DistributionFunction:
    """Exact distribution function t -> measure{|u| > t}.

    ``levels`` are the sorted distinct values of |u| at its breakpoints with 0
    prepended; on the open band (levels[i], levels[i+1]) the function is
    affine with slope -inv_slope_sum[i]; ``jumps[i]`` is the plateau jump at
    levels[i] (0 where |u| has no plateau).  Right-continuous by convention.
    """

    levels: np.ndarray
    inv_slope_sum: np.ndarray
    jumps: np.ndarray
    mu_at: np.ndarray  # mu(levels[i]) with right-continuity

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < 0):
            raise DomainError("distribution function is defined for t >= 0")
        out = np.zeros(t.shape)
        inside = t < self.levels[-1]
        idx = np.searchsorted(self.levels, t[inside], side="right") - 1
        out[inside] = (
            self.mu_at[idx + 1]
            + self.jumps[idx + 1]
            + (self.levels[idx + 1] - t[inside]) * self.inv_slope_sum[idx]
        )
        return out if out.ndim else float(out)

    def jump_at(self, t: float) -> float:
        i = np.searchsorted(self.levels, t)
        if i < len(self.levels) and self.levels[i] == t:
            return float(self.jumps[i])
        return 0.0


def _band_data(u: PiecewiseLinear):
    """Levels, per-band sums of 1/|slope|, and plateau jumps of |u|."""
    w = u.abs()
    vals = w.v
    levels = np.unique(vals)
    if levels[0] != 0.0:
        levels = np.concatenate([[0.0], levels])
    nb = len(levels) - 1
    inv_sum = np.zeros(max(nb, 0))
    jumps = np.zeros(len(levels))
    lo_idx = np.searchsorted(levels, np.minimum(vals[:-1], vals[1:]))
    hi_idx = np.searchsorted(levels, np.maximum(vals[:-1], vals[1:]))
    slopes = w.slopes
    lens = w.lengths
    for j in range(len(slopes)):
        if slopes[j] == 0.0:
            jumps[lo_idx[j]] += lens[j]  # plateau at that level
        else:
            inv_sum[lo_idx[j] : hi_idx[j]] += 1.0 / abs(slopes[j])
    return levels, inv_sum, jumps


def distribution(u: PiecewiseLinear) -> DistributionFunction:
    """Exact distribution function of u (computed on |u|)."""
    levels, inv_sum, jumps = _band_data(u)
    n = len(levels)
    mu_at = np.zeros(n)
    for i in range(n - 2, -1, -1):
        mu_at[i] = mu_at[i + 1] + jumps[i + 1] + (levels[i + 1] - levels[i]) * inv_sum[i]
    return DistributionFunction(levels, inv_sum, jumps, mu_at)


def rearrange(u: PiecewiseLinear) -> PiecewiseLinear:
    """Symmetric decreasing rearrangement of |u|, centered at the origin.

    Built exactly band by band: between adjacent levels the output slope
    magnitude s satisfies 2/s = sum of 1/|slope| over the crossing pieces of
    |u|, and every plateau of |u| reappears as a plateau of equal total
    length, split evenly about 0.
    """
    levels, inv_sum, jumps = _band_data(u)
    top = levels[-1]
    if top == 0.0:
        return PiecewiseLinear(np.array([u.x[0], u.x[-1]]), np.zeros(2))
    # walk down from the peak, accumulating the right-half breakpoints
    xs = [0.0]
    vs = [top]
    n = len(levels)
    if jumps[n - 1] > 0.0:
        xs.append(jumps[n - 1] / 2.0)
        vs.append(top)
    for i in range(n - 2, -1, -1):
        run = (levels[i + 1] - levels[i]) * inv_sum[i] / 2.0
        xs.append(xs[-1] + run)
        vs.append(levels[i])
        if i > 0 and jumps[i] > 0.0:
            xs.append(xs[-1] + jumps[i] / 2.0)
            vs.append(levels[i])
    # mirror to the left half
    xs = np.array(xs)
    vs = np.array(vs)
    full_x = np.concatenate([-xs[::-1], xs[1:]])
    full_v = np.concatenate([vs[::-1], vs[1:]])
    return PiecewiseLinear(full_x, full_v)


# ---------------------------------------------------------------------------
# the two-slope micro-inequality
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TwoSlopeGap:
    min_value: float
    lower_bound: float
    argmin_shift: float


def two_slope_gap(a: float, b: float, p) -> TwoSlopeGap:
    """Minimum over sigma of |a+sigma|^p/a + |b-sigma|^p/b, with its bound.

    For p >= 2 the minimum dominates 2^p * (a*b/(a+b))^(p-1); the stationary
    shift is (a^q*b - a*b^q)/(a^q + b^q) with q = 1/(p-1).
    """
    pv = _pval(p)
    if pv < 2.0:
        raise DomainError("the two-slope bound is only guaranteed for p >= 2")
    if not (a > 0.0 and b > 0.0):
        raise DomainError("slopes a, b must be positive")
    q = 1.0 / (pv - 1.0)
    aq, bq = a**q, b**q
    sigma = (aq * b - a * bq) / (aq + bq)
    min_value = abs(a + sigma) ** pv / a + abs(b - sigma) ** pv / b
    lower = 2.0**pv * (a * b / (a + b)) ** (pv - 1.0)
    return TwoSlopeGap(min_value=min_value, lower_bound=lower, argmin_shift=sigma)


# ---------------------------------------------------------------------------
# rearrangement inequality report and the explicit wedge
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Prop21Report:
    p: float
    sharp: float
    kappas: np.ndarray
    margins: np.ndarray
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def verify_prop21(u: PiecewiseLinear, p, kappa_grid, rel_tol: float = 1e-12) -> Prop21Report:
    """Check int |u'+kappa*u|^p >= int |(u#)'|^p over a kappa grid.

    All integrals are exact per piece; a kappa is recorded as violating when
    its margin drops below -rel_tol * sharp.
    """
    pv = _pval(p)
    if pv < 2.0:
        raise DomainError("the drift inequality is only guaranteed for p >= 2")
    kappas = np.asarray(kappa_grid, dtype=float)
    ua = u.abs()
    sharp = derivative_energy(rearrange(u), pv)
    energies = _drift_energy_sweep(ua, kappas, pv)
    margins = energies - sharp
    bad = margins < -rel_tol * sharp
    return Prop21Report(
        p=pv,
        sharp=sharp,
        kappas=kappas,
        margins=margins,
        violations=[float(k) for k in kappas[bad]],
    )


def remark21_function(eps: float) -> PiecewiseLinear:
    """Two-slope wedge: slope 1-eps on [-1/(1-eps), 0], slope -1 on [0, 1]."""
    if not 0.0 < eps < 1.0:
        raise DomainError("eps must lie in (0, 1)")
    return PiecewiseLinear(
        np.array([-1.0 / (1.0 - eps), 0.0, 1.0]), np.array([0.0, 1.0, 0.0])
    )


@dataclass(frozen=True)
class Remark21Record:
    p: float
    eps: float
    lhs: float
    rhs_rearranged: float
    sharp: float

    @property
    def rearranged_drift_is_larger(self) -> bool:
        """True when the rearranged drift energy exceeds the original one."""
        return self.lhs < self.rhs_rearranged

    @property
    def sharp_bound_holds(self) -> bool:
        return self.lhs >= self.sharp


def remark21_counterexample(p, eps: float) -> Remark21Record:
    """Closed forms for the wedge showing the naive rearranged-drift bound fails.

    lhs            = int |u' + 1|^p           = (2-eps)^p / (1-eps)
    rhs_rearranged = int |(u#)' + 1|^p        = ((1+s)^p + (1-s)^p) * T/2
    sharp          = int |(u#)'|^p            = s^p * T
    with T = (2-eps)/(1-eps) the rearranged support and s = 2/T its slope.
    For small eps: lhs < rhs_rearranged while lhs >= sharp.
    """
    pv = _pval(p)
    if pv <= 2.0:
        raise DomainError("the wedge only beats its rearrangement for p > 2")
    if not 0.0 < eps < 1.0:
        raise DomainError("eps must lie in (0, 1)")
    T = (2.0 - eps) / (1.0 - eps)
    s = 2.0 * (1.0 - eps) / (2.0 - eps)
    lhs = (2.0 - eps) ** pv / (1.0 - eps)
    rhs = ((1.0 + s) ** pv + (1.0 - s) ** pv) * T / 2.0
    sharp = s**pv * T
    return Remark21Record(p=pv, eps=eps, lhs=lhs, rhs_rearranged=rhs, sharp=sharp)
