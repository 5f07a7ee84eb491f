"""Closed-form index values for decoupled harmonic oscillators.

B = diag(a, b) (p-weights a, q-weights b) gives, in each coordinate plane, a rotation by
angle theta_j = sqrt(a_j b_j) tau after a constant diagonal rescaling.  Written from the
explicit solution, without calling the package."""

import math

import numpy as np


def _is_multiple(x, base, tol=1e-9):
    k = round(x / base)
    return k >= 1 and abs(x - k * base) < tol


def lagrangian_index(theta):
    """(i_L, nu_L) of one plane for either L0 or L1: interior zeros of sin, endpoint zero."""
    i = sum(1 for m in range(1, int(theta / math.pi) + 2) if m * math.pi < theta - 1e-9)
    return i, int(_is_multiple(theta, math.pi))


def omega_index(theta, phi):
    """(i_omega, nu_omega) of one plane, omega = exp(i phi).

    Crossings at t with t = +-phi mod 2 pi, all positive; for omega = 1 the start at
    t = 0 counts 1 and each interior multiple of 2 pi counts 2."""
    phi = phi % (2 * math.pi)
    if phi < 1e-12:
        k = int(theta // (2 * math.pi))
        if _is_multiple(theta, 2 * math.pi):
            return 2 * round(theta / (2 * math.pi)) - 1, 2
        return 2 * k + 1, 0
    hits = []
    for base in (phi, 2 * math.pi - phi):  # both branches coincide at omega = -1
        t = base
        while t <= theta + 1e-9:
            hits.append(t)
            t += 2 * math.pi
    interior = sum(1 for t in hits if t < theta - 1e-9)
    end = sum(1 for t in hits if abs(t - theta) <= 1e-9)
    return interior, end


def diagonal_indices(a, b, tau, phi=0.0):
    thetas = [math.sqrt(x * y) * tau for x, y in zip(a, b)]
    L = [lagrangian_index(t) for t in thetas]
    W = [omega_index(t, phi) for t in thetas]
    return {"L": (sum(x[0] for x in L), sum(x[1] for x in L)),
            "omega": (sum(x[0] for x in W), sum(x[1] for x in W))}


def diag_generator(a, b):
    return np.diag(np.r_[np.asarray(a, float), np.asarray(b, float)])
