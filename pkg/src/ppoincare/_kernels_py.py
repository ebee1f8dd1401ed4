"""Pure-Python reference kernels.

Same call contracts as the compiled extension ``_kernels``; selected at import
time when the extension is unavailable (or PPOINCARE_PURE is set).  The 1D
shooting integrator is a plain loop and markedly slower here; the triangle
assembly kernels are vectorized numpy and reasonably quick either way.
"""

import numpy as np


def shoot1d(p, lam, seg_x, seg_g, seg_n, u0, phi0, refine):
    """March the first-order eigen-system u' = sign(phi)|phi|^{1/(p-1)},
    phi' = -lam*u|u|^{p-2} - g(x)*phi across contiguous segments on each of
    which the drift coefficient g = (log f)' is constant.

    seg_x: segment breakpoints (k+1,); seg_g: per-segment g (k,); seg_n:
    RK4 steps per segment (k,).  A step across a sign change of u or phi is
    redone with ``refine`` substeps (the right-hand side is non-Lipschitz at
    phi = 0 when p > 2).  Returns (xs, us, phis, zero_count) sampled at the
    accepted step endpoints.
    """
    e = 1.0 / (p - 1.0)
    pm1 = p - 1.0

    def rhs(u, phi, g):
        du = np.sign(phi) * abs(phi) ** e
        dphi = -lam * np.sign(u) * abs(u) ** pm1 - g * phi
        return du, dphi

    def rk4(u, phi, g, h):
        k1u, k1p = rhs(u, phi, g)
        k2u, k2p = rhs(u + 0.5 * h * k1u, phi + 0.5 * h * k1p, g)
        k3u, k3p = rhs(u + 0.5 * h * k2u, phi + 0.5 * h * k2p, g)
        k4u, k4p = rhs(u + h * k3u, phi + h * k3p, g)
        return (
            u + h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u),
            phi + h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p),
        )

    n_total = int(np.sum(seg_n))
    xs = np.empty(n_total + 1)
    us = np.empty(n_total + 1)
    phis = np.empty(n_total + 1)
    u, phi = float(u0), float(phi0)
    xs[0], us[0], phis[0] = seg_x[0], u, phi
    idx = 0
    zero_count = 0
    for k in range(len(seg_g)):
        g = float(seg_g[k])
        n = int(seg_n[k])
        h = (seg_x[k + 1] - seg_x[k]) / n
        x = seg_x[k]
        for _ in range(n):
            u1, phi1 = rk4(u, phi, g, h)
            if u * u1 <= 0.0 or phi * phi1 <= 0.0:
                u1, phi1 = u, phi
                hs = h / refine
                for _ in range(refine):
                    u1, phi1 = rk4(u1, phi1, g, hs)
            if u * u1 < 0.0:
                zero_count += 1
            u, phi = u1, phi1
            x += h
            idx += 1
            xs[idx], us[idx], phis[idx] = x, u, phi
    return xs, us, phis, zero_count


def tri_energy_grad(u, tris, gphi, areas, p):
    """Gradient energy sum areas*|grad u|^p over a P1 mesh, with its
    derivative with respect to the nodal values."""
    ut = u[tris]
    g = np.einsum("mi,mij->mj", ut, gphi)
    g2 = g[:, 0] ** 2 + g[:, 1] ** 2
    gp2 = np.where(g2 > 0.0, g2 ** ((p - 2.0) / 2.0), 0.0)
    energy = float(np.sum(areas * gp2 * g2))
    coef = (p * areas * gp2)[:, None]
    contrib = coef * np.einsum("mj,mij->mi", g, gphi)
    grad = np.bincount(tris.ravel(), weights=contrib.ravel(), minlength=u.size)
    return energy, grad


def tri_lp_shift(u, tris, qb, qw, areas, t, p):
    """Quadrature of |u-t|^p over the mesh plus its nodal gradient and the
    signed moment integral |u-t|^{p-2}(u-t)."""
    uq = u[tris] @ qb.T - t
    aq = np.abs(uq)
    ap2 = np.where(aq > 0.0, aq ** (p - 2.0), 0.0)
    wa = areas[:, None] * qw[None, :]
    signed = ap2 * uq
    value = float(np.sum(wa * signed * uq))
    moment = float(np.sum(wa * signed))
    contrib = (p * wa * signed) @ qb
    grad = np.bincount(tris.ravel(), weights=contrib.ravel(), minlength=u.size)
    return value, moment, grad


def tri_moment(u, tris, qb, qw, areas, t, p):
    """Signed moment integral |u-t|^{p-2}(u-t) alone (balance bisection)."""
    uq = u[tris] @ qb.T - t
    aq = np.abs(uq)
    ap2 = np.where(aq > 0.0, aq ** (p - 2.0), 0.0)
    wa = areas[:, None] * qw[None, :]
    return float(np.sum(wa * ap2 * uq))
