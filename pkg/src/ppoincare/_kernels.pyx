# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled hot kernels: 1D shooting integrator and P1 triangle assembly.

Mirrors the contracts of ``_kernels_py``; the shooting loop is the part that
gains the most (it is inherently sequential).
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, pow

cnp.import_array()


cdef inline double _spow(double y, double e) noexcept nogil:
    # sign(y) * |y|^e
    if y > 0.0:
        return pow(y, e)
    elif y < 0.0:
        return -pow(-y, e)
    return 0.0


cdef inline void _rk4(double u, double phi, double g, double h,
                      double lam, double e, double pm1,
                      double* uo, double* po) noexcept nogil:
    cdef double k1u, k1p, k2u, k2p, k3u, k3p, k4u, k4p
    k1u = _spow(phi, e)
    k1p = -lam * _spow(u, pm1) - g * phi
    k2u = _spow(phi + 0.5 * h * k1p, e)
    k2p = -lam * _spow(u + 0.5 * h * k1u, pm1) - g * (phi + 0.5 * h * k1p)
    k3u = _spow(phi + 0.5 * h * k2p, e)
    k3p = -lam * _spow(u + 0.5 * h * k2u, pm1) - g * (phi + 0.5 * h * k2p)
    k4u = _spow(phi + h * k3p, e)
    k4p = -lam * _spow(u + h * k3u, pm1) - g * (phi + h * k3p)
    uo[0] = u + h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u)
    po[0] = phi + h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)


def shoot1d(double p, double lam, double[:] seg_x, double[:] seg_g,
            long[:] seg_n, double u0, double phi0, int refine):
    cdef double e = 1.0 / (p - 1.0)
    cdef double pm1 = p - 1.0
    cdef Py_ssize_t n_total = 0, k, i, j, idx
    for k in range(seg_n.shape[0]):
        n_total += seg_n[k]
    xs_a = np.empty(n_total + 1)
    us_a = np.empty(n_total + 1)
    ph_a = np.empty(n_total + 1)
    cdef double[:] xs = xs_a
    cdef double[:] us = us_a
    cdef double[:] ph = ph_a
    cdef double u = u0, phi = phi0, g, h, hs, x, u1, phi1
    cdef long zero_count = 0, n
    xs[0] = seg_x[0]
    us[0] = u
    ph[0] = phi
    idx = 0
    for k in range(seg_g.shape[0]):
        g = seg_g[k]
        n = seg_n[k]
        h = (seg_x[k + 1] - seg_x[k]) / n
        x = seg_x[k]
        for i in range(n):
            _rk4(u, phi, g, h, lam, e, pm1, &u1, &phi1)
            if u * u1 <= 0.0 or phi * phi1 <= 0.0:
                u1 = u
                phi1 = phi
                hs = h / refine
                for j in range(refine):
                    _rk4(u1, phi1, g, hs, lam, e, pm1, &u1, &phi1)
            if u * u1 < 0.0:
                zero_count += 1
            u = u1
            phi = phi1
            x += h
            idx += 1
            xs[idx] = x
            us[idx] = u
            ph[idx] = phi
    return xs_a, us_a, ph_a, zero_count


def tri_energy_grad(double[:] u, int[:, :] tris, double[:, :, :] gphi,
                    double[:] areas, double p):
    cdef Py_ssize_t m = tris.shape[0], t, i
    grad_a = np.zeros(u.shape[0])
    cdef double[:] grad = grad_a
    cdef double energy = 0.0
    cdef double gx, gy, g2, gp2, coef
    cdef double hp = (p - 2.0) / 2.0
    for t in range(m):
        gx = 0.0
        gy = 0.0
        for i in range(3):
            gx += u[tris[t, i]] * gphi[t, i, 0]
            gy += u[tris[t, i]] * gphi[t, i, 1]
        g2 = gx * gx + gy * gy
        if g2 > 0.0:
            gp2 = pow(g2, hp)
        else:
            gp2 = 0.0
        energy += areas[t] * gp2 * g2
        coef = p * areas[t] * gp2
        for i in range(3):
            grad[tris[t, i]] += coef * (gx * gphi[t, i, 0] + gy * gphi[t, i, 1])
    return energy, grad_a


def tri_lp_shift(double[:] u, int[:, :] tris, double[:, :] qb, double[:] qw,
                 double[:] areas, double t0, double p):
    cdef Py_ssize_t m = tris.shape[0], nq = qb.shape[0], t, q, i
    grad_a = np.zeros(u.shape[0])
    cdef double[:] grad = grad_a
    cdef double value = 0.0, moment = 0.0
    cdef double uq, aq, ap2, wa, signed, u0, u1, u2
    for t in range(m):
        u0 = u[tris[t, 0]]
        u1 = u[tris[t, 1]]
        u2 = u[tris[t, 2]]
        for q in range(nq):
            uq = qb[q, 0] * u0 + qb[q, 1] * u1 + qb[q, 2] * u2 - t0
            aq = fabs(uq)
            ap2 = pow(aq, p - 2.0) if aq > 0.0 else 0.0
            wa = areas[t] * qw[q]
            signed = ap2 * uq
            value += wa * signed * uq
            moment += wa * signed
            for i in range(3):
                grad[tris[t, i]] += p * wa * signed * qb[q, i]
    return value, moment, grad_a


def tri_moment(double[:] u, int[:, :] tris, double[:, :] qb, double[:] qw,
               double[:] areas, double t0, double p):
    cdef Py_ssize_t m = tris.shape[0], nq = qb.shape[0], t, q
    cdef double moment = 0.0
    cdef double uq, aq, ap2, u0, u1, u2
    for t in range(m):
        u0 = u[tris[t, 0]]
        u1 = u[tris[t, 1]]
        u2 = u[tris[t, 2]]
        for q in range(nq):
            uq = qb[q, 0] * u0 + qb[q, 1] * u1 + qb[q, 2] * u2 - t0
            aq = fabs(uq)
            ap2 = pow(aq, p - 2.0) if aq > 0.0 else 0.0
            moment += areas[t] * qw[q] * ap2 * uq
    return moment
