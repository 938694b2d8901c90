"""Independent reference computations used to validate the solvers.

Everything here deliberately avoids the package's own code paths: time
stepping is classical RK4 on the differential form of the system, root
finding is Brent's method, operator values are recomputed by explicit
triangular trapezoid sums on exponential kernels, and spectral quantities
come from numpy's eigenvalue routines.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import brentq


def rk4_pair(lam, F, G, x0, y0, T, n):
    """RK4 paths of x' = lam x + F(x, y), y' = lam y + G(x, y)."""
    h = T / n
    xs = np.empty(n + 1)
    ys = np.empty(n + 1)
    xs[0], ys[0] = x0, y0
    x, y = float(x0), float(y0)
    for i in range(n):
        k1x = lam * x + F(x, y)
        k1y = lam * y + G(x, y)
        x2, y2 = x + 0.5 * h * k1x, y + 0.5 * h * k1y
        k2x = lam * x2 + F(x2, y2)
        k2y = lam * y2 + G(x2, y2)
        x3, y3 = x + 0.5 * h * k2x, y + 0.5 * h * k2y
        k3x = lam * x3 + F(x3, y3)
        k3y = lam * y3 + G(x3, y3)
        x4, y4 = x + h * k3x, y + h * k3y
        k4x = lam * x4 + F(x4, y4)
        k4y = lam * y4 + G(x4, y4)
        x += (h / 6.0) * (k1x + 2 * k2x + 2 * k3x + k4x)
        y += (h / 6.0) * (k1y + 2 * k2y + 2 * k3y + k4y)
        xs[i + 1], ys[i + 1] = x, y
    return xs, ys


def final_condition_residual(lam, F, G, a, b, k, T, x0, y0, n=2048):
    """x(T) - a x(0) - k (y(T) - b y(0)) for the RK4 path from (x0, y0)."""
    xs, ys = rk4_pair(lam, F, G, x0, y0, T, n)
    return xs[-1] - a * x0 - k * (ys[-1] - b * y0)


def shoot_semi_x0(lam, F, G, a, b, k, T, beta, bracket=(-5.0, 5.0), n=2048):
    """Shooting value of x(0) for the semi-observability problem, y(0) = beta."""

    def residual(x0):
        return final_condition_residual(lam, F, G, a, b, k, T, x0, beta, n=n)

    return brentq(residual, bracket[0], bracket[1], xtol=1e-14, rtol=8.9e-16)


def membership_defect(lam, F, G, a, b, k, T, alpha, beta, n=4096):
    """How far (alpha, beta) is from the observability solution manifold."""
    return abs(final_condition_residual(lam, F, G, a, b, k, T, alpha, beta, n=n))


def trapezoid_weights(m, dt):
    w = np.full(m + 1, dt)
    w[0] = w[-1] = dt / 2.0
    return w


def conv_direct_scalar(lam, w_vals, t_nodes, i):
    """Explicit trapezoid sum for int_0^{t_i} e^{lam (t_i - s)} w(s) ds."""
    if i == 0:
        return 0.0
    dt = t_nodes[1] - t_nodes[0]
    weights = trapezoid_weights(i, dt)
    s = t_nodes[: i + 1]
    return float(np.sum(weights * np.exp(lam * (t_nodes[i] - s)) * w_vals[: i + 1]))


def semi_pair_direct(lam, F, G, a, b, k, T, beta, t_nodes, x_vals, y_vals):
    """Direct-quadrature evaluation of the semi-observability pair operator.

    Every integral is an explicit trapezoid sum over the exponential kernel at
    the shifted times; no semigroup factorization or recurrence is used.
    """
    n = len(t_nodes) - 1
    dt = t_nodes[1] - t_nodes[0]
    Fv = np.array([F(x_vals[j], y_vals[j]) for j in range(n + 1)])
    Gv = np.array([G(x_vals[j], y_vals[j]) for j in range(n + 1)])
    Hv = Fv - k * Gv
    wT = trapezoid_weights(n, dt)
    x_new = np.empty(n + 1)
    y_new = np.empty(n + 1)
    for i, t in enumerate(t_nodes):
        conv_F = conv_direct_scalar(lam, Fv, t_nodes, i)
        shifted = float(np.sum(wT * np.exp(lam * (t + T - t_nodes)) * Hv))
        x_new[i] = (
            (1.0 / a) * np.exp(lam * (t + T)) * (x_vals[0] - k * beta)
            + (k * b / a) * np.exp(lam * t) * beta
            + conv_F
            + (1.0 / a) * shifted
        )
        y_new[i] = np.exp(lam * t) * beta + conv_direct_scalar(lam, Gv, t_nodes, i)
    return x_new, y_new


def obs_pair_direct(lam, F, G, a, b, k, T, alpha, beta, t_nodes, x_vals, y_vals):
    """Direct-quadrature evaluation of the frozen-(alpha, beta) pair operator."""
    n = len(t_nodes) - 1
    dt = t_nodes[1] - t_nodes[0]
    Fv = np.array([F(x_vals[j], y_vals[j]) for j in range(n + 1)])
    Gv = np.array([G(x_vals[j], y_vals[j]) for j in range(n + 1)])
    Hv = Fv - k * Gv
    wT = trapezoid_weights(n, dt)
    sT = np.exp(lam * T)
    head1 = sT * alpha - k * sT * beta + k * b * beta
    head2 = -sT * alpha + k * sT * beta + a * alpha
    x_new = np.empty(n + 1)
    y_new = np.empty(n + 1)
    for i, t in enumerate(t_nodes):
        # S(t) applied to the full [0, T] integral: kernel e^{lam (t + T - s)}.
        shifted = float(np.sum(wT * np.exp(lam * (t + T - t_nodes)) * Hv))
        x_new[i] = (1.0 / a) * (np.exp(lam * t) * head1 + shifted) + conv_direct_scalar(
            lam, Fv, t_nodes, i
        )
        y_new[i] = (1.0 / (k * b)) * (np.exp(lam * t) * head2 - shifted) + conv_direct_scalar(
            lam, Gv, t_nodes, i
        )
    return x_new, y_new


def eig_spectral_radius(M):
    return float(np.max(np.abs(np.linalg.eigvals(np.asarray(M, dtype=float)))))


def sine_project_dense(f_of_x, L, n_modes, n_dense=4096):
    """Coefficients of f in the orthonormal sine basis by dense quadrature."""
    x = np.arange(1, n_dense + 1) * L / (n_dense + 1)
    w = L / (n_dense + 1)
    k = np.arange(1, n_modes + 1)
    B = np.sqrt(2.0 / L) * np.sin(np.outer(x, k * np.pi / L))
    return w * (B.T @ f_of_x(x))
