"""(eps, L0, L1)-signature calculus: the symmetrization M_eps, concavity, and the
signature identities and bounds for symplectic matrices in (L0, L1) block form."""

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT, IndeterminateError
from .core import (InertiaTriple, blocks, check_symplectic, elliptic_height, half_dim, inertia,
                   n_transform, nu_lagrangian, require_symplectic)
from .index import index_lagrangian

EPS_SCHEDULE = (1e-3, 1e-4)


@dataclass(frozen=True)
class EpsSymmetrization:
    eps: float
    matrix: np.ndarray

    @property
    def inertia(self):
        return inertia(self.matrix)

    @property
    def sgn(self):
        return self.inertia.sgn


def m_epsilon(P, eps):
    """M_eps(P) = P^T [[s, -c], [-c, -s]] P + [[s, c], [c, -s]] with s = sin 2eps, c = cos 2eps."""
    P = np.asarray(P, dtype=float)
    n = half_dim(P)
    I = np.eye(n)
    s, c = np.sin(2 * eps), np.cos(2 * eps)
    inner = np.block([[s * I, -c * I], [-c * I, -s * I]])
    outer = np.block([[s * I, c * I], [c * I, -s * I]])
    M = P.T @ inner @ P + outer
    return EpsSymmetrization(float(eps), (M + M.T) / 2)


def signature_small_eps(P, side=+1, schedule=EPS_SCHEDULE):
    """sgn M_eps(P) for 0 < side*eps << 1; the schedule values must agree."""
    vals = []
    for e in schedule:
        vals.append(m_epsilon(P, side * e).sgn)
    if len(set(vals)) != 1:
        raise IndeterminateError("signature not stable across the eps schedule",
                                 values=vals, side=side)
    return vals[0]


def concavity(path, schedule=EPS_SCHEDULE):
    """concav = i_L0 - i_L1 and concav* = (i_L0 + nu_L0) - (i_L1 + nu_L1), each checked
    against half the signature of M_eps(gamma(tau)) for eps > 0 and eps < 0."""
    a = index_lagrangian(path, 0)
    b = index_lagrangian(path, 1)
    concav = a.i - b.i
    concav_star = (a.i + a.nu) - (b.i + b.nu)
    P = path.end
    sp = signature_small_eps(P, +1, schedule)
    sm = signature_small_eps(P, -1, schedule)
    if 2 * concav != sp or 2 * concav_star != sm:
        raise IndeterminateError("concavity routes disagree", concav=concav,
                                 half_sgn_pos=sp / 2, concav_star=concav_star,
                                 half_sgn_neg=sm / 2)
    return {"concav": concav, "concav_star": concav_star,
            "half_sgn_pos": sp // 2, "half_sgn_neg": sm // 2}


def lemma33_bounds(P):
    """Upper bounds on the half-signature in terms of q = max(m+(A^T C), m+(B^T D))."""
    P = require_symplectic(P, 1e-8)
    k = half_dim(P)
    A, B, C, D = blocks(P)
    q = max(inertia(A.T @ C).m_plus, inertia(B.T @ D).m_plus)
    sn = signature_small_eps(P, -1)
    sp = signature_small_eps(P, +1)
    bound_neg = k - q - nu_lagrangian(P, 1)
    bound_pos = k - q - nu_lagrangian(P, 0)
    holds = 2 * bound_neg >= sn and 2 * bound_pos >= sp
    invertible = (np.linalg.matrix_rank(B) == k and np.linalg.matrix_rank(C) == k)
    constant = None
    if invertible:
        s0 = m_epsilon(P, 0.0).sgn
        constant = (s0 == sn == sp)
        holds = holds and constant
    return {"bound_neg": int(bound_neg), "bound_pos": int(bound_pos), "half_sgn_neg": sn // 2,
            "half_sgn_pos": sp // 2, "q": int(q), "bc_invertible": bool(invertible),
            "sgn_constant": constant, "holds": bool(holds)}


def lemma36_check(A1, A3, spec_margin=DEFAULT.spec_margin):
    """sgn A1 + sgn(A1 A3) for symmetric A1, A1 A3 and real spectrum of A3 below -margin."""
    A1 = np.asarray(A1, dtype=float)
    A3 = np.asarray(A3, dtype=float)
    S = A1 @ A3
    scale = max(1.0, np.max(np.abs(A1)), np.max(np.abs(S)))
    if np.max(np.abs(A1 - A1.T)) > 1e-9 * scale:
        raise ValueError("A1 is not symmetric")
    if np.max(np.abs(S - S.T)) > 1e-9 * scale:
        raise ValueError("A1 A3 is not symmetric")
    ev = np.linalg.eigvals(A3)
    # defective eigenvalues split by ~sqrt(eps) in floating point
    if np.max(ev.real) >= -spec_margin or np.max(np.abs(ev.imag)) > 1e-6 * max(1.0, np.max(np.abs(ev))):
        raise ValueError("spectrum of A3 must lie in (-inf, -margin)")
    total = inertia(A1).sgn + inertia((S + S.T) / 2).sgn
    return {"sum": int(total), "holds": total == 0}


def core_blocks(R, tol=1e-9):
    """(A1, A3, A2) of R = [[A1, I], [A3, A2]]."""
    R = np.asarray(R, dtype=float)
    A1, B, A3, A2 = blocks(R)
    if np.max(np.abs(B - np.eye(B.shape[0]))) > tol:
        raise ValueError("upper-right block must be the identity")
    return A1, A3, A2


def lemma37_bound(R, det_tol=1e-8):
    """m - k <= half sgn M_eps(R) <= k - m with 2m the elliptic height of N R^{-1} N R."""
    R = require_symplectic(R, 1e-8)
    k = half_dim(R)
    A1, A3, A2 = core_blocks(R)
    if abs(np.linalg.det(A3)) <= det_tol:
        raise ValueError("A3 must be invertible")
    e = elliptic_height(n_transform(R))
    m = e // 2
    halves = {"pos": signature_small_eps(R, +1) // 2, "neg": signature_small_eps(R, -1) // 2,
              "zero": m_epsilon(R, 0.0).sgn // 2}
    holds = all(m - k <= h <= k - m for h in halves.values())
    return {"m": int(m), "half_sgn": int(halves["pos"]), "half_sgn_by_side": halves,
            "holds": bool(holds)}


def charpoly_identity_defect(R, n_lambda=7):
    """max relative gap between det(lam I - N R^{-1} N R) and prod(lam^2 - (2 + 4u)lam + 1)
    over eigenvalues u of A3, sampled at a few real and complex lam."""
    A1, A3, A2 = core_blocks(R)
    T = n_transform(R)
    u = np.linalg.eigvals(A3)
    k = half_dim(R)
    worst = 0.0
    for lam in np.r_[np.linspace(-2.5, 2.5, n_lambda), 0.3 + 0.7j, -1.1 + 0.4j]:
        lhs = np.linalg.det(lam * np.eye(2 * k) - T)
        rhs = np.prod(lam ** 2 - (2 + 4 * u) * lam + 1)
        worst = max(worst, abs(lhs - rhs) / max(1.0, abs(rhs)))
    return float(worst)


from .normal_form import NormalFormReport, normal_form_L0L1  # noqa: E402,F401
