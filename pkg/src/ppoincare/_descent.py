"""Preconditioned projected-descent driver shared by the 1D and 2D
Rayleigh-quotient minimizers.

Armijo backtracking alone tends to park at a step that barely contracts the
high-frequency error modes of the quotient, so each accepted step is polished
by a parabolic fit through J(0), J(alpha/2), J(alpha); with an H1
preconditioner this behaves like an exact line search and converges linearly
with a mesh-independent rate.
"""

import math

__all__ = ["projected_descent"]


def projected_descent(u0, project, evaluate, precond, iters: int, gtol: float,
                      stag_tol: float = 3e-7):
    """Minimize J over the projected manifold.

    project: maps a raw iterate onto the constraint set (balance shift plus
    normalization); evaluate: u -> (J, grad J); precond: grad -> search
    direction metric solve.  Returns (u, J, grad_norm, iterations,
    converged); the iterate returned is the best one seen.  Besides the
    gradient test, the loop stops once a 12-iteration window improves J by
    less than stag_tol relative: near-degenerate eigenvalue pairs (and the
    flat spots of the energy for p > 2) otherwise produce an endless
    microscopic creep that never moves the quotient at a useful scale.
    """
    u = project(u0)
    J, g = evaluate(u)
    alpha = 1.0
    converged = False
    pg = math.inf
    it = 0
    window = []
    for it in range(1, iters + 1):
        d = -precond(g)
        gg = -float(g @ d)
        pg = math.sqrt(max(gg, 0.0))
        if pg <= gtol * max(1.0, abs(J)):
            converged = True
            break
        window.append(J)
        if len(window) > 12:
            window.pop(0)
            if window[0] - J <= stag_tol * max(1.0, abs(J)):
                converged = True
                break
        accepted = False
        for _ in range(60):
            u1 = project(u + alpha * d)
            J1, g1 = evaluate(u1)
            if J1 <= J - 1e-4 * alpha * gg:
                accepted = True
                break
            alpha *= 0.5
        if not accepted:
            converged = True  # stationary to line-search resolution
            break
        best = (J1, u1, g1, alpha)
        u2 = project(u + 0.5 * alpha * d)
        J2, g2 = evaluate(u2)
        if J2 < best[0]:
            best = (J2, u2, g2, 0.5 * alpha)
        curv = J + J1 - 2.0 * J2
        if curv > 0.0:
            a_star = 0.5 * alpha * (3.0 * J + J1 - 4.0 * J2) / (2.0 * curv)
            if 0.0 < a_star <= 4.0 * alpha:
                u3 = project(u + a_star * d)
                J3, g3 = evaluate(u3)
                if J3 < best[0]:
                    best = (J3, u3, g3, a_star)
        J, u, g, step = best
        alpha = min(2.0 * step, 1e8)
    return u, J, pg, it, converged
