"""Symplectic linear algebra: J, N, the diamond product, basic normal forms,
the N-transform and elementary spectral invariants.

Coordinates are x = (p, q) with p the first k entries.  J = [[0, -I], [I, 0]],
N = diag(-I, I), L0 = {0} x R^k (p = 0) and L1 = R^k x {0} (q = 0).
"""

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT, IndeterminateError


def J(k):
    out = np.zeros((2 * k, 2 * k))
    out[:k, k:] = -np.eye(k)
    out[k:, :k] = np.eye(k)
    return out


def N(k):
    return np.diag(np.r_[-np.ones(k), np.ones(k)])


def half_dim(M):
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] % 2:
        raise ValueError(f"expected a square matrix of even size, got shape {M.shape}")
    return M.shape[0] // 2


def blocks(M):
    """Split M into its k x k blocks (A, B, C, D)."""
    k = half_dim(M)
    return M[:k, :k], M[:k, k:], M[k:, :k], M[k:, k:]


def from_blocks(A, B, C, D):
    return np.block([[A, B], [C, D]])


def symplectic_defect(M):
    k = half_dim(M)
    Jk = J(k)
    return np.max(np.abs(M.T @ Jk @ M - Jk))


def check_symplectic(M, tol=DEFAULT.symplectic_tol):
    M = np.asarray(M, dtype=float)
    return bool(symplectic_defect(M) <= tol)


def require_symplectic(M, tol=DEFAULT.symplectic_tol, name="matrix"):
    M = np.asarray(M, dtype=float)
    d = symplectic_defect(M)
    if d > tol:
        raise ValueError(f"{name} is not symplectic (defect {d:.3e} > {tol:.1e})")
    return M


def diamond(*Ms, validate=True):
    """Symplectic direct sum. Each factor keeps its (p, q) split in the result."""
    Ms = [np.asarray(M, dtype=float) for M in Ms]
    if validate:
        for M in Ms:
            require_symplectic(M)
    ks = [half_dim(M) for M in Ms]
    k = sum(ks)
    out = np.zeros((2 * k, 2 * k))
    off = 0
    for M, m in zip(Ms, ks):
        A, B, C, D = blocks(M)
        s = slice(off, off + m)
        t = slice(k + off, k + off + m)
        out[s, s] = A
        out[s, t] = B
        out[t, s] = C
        out[t, t] = D
        off += m
    return out


def diamond_power(M, m):
    if m == 0:
        return np.zeros((0, 0))
    return diamond(*([M] * m))


def diamond_all(Ms):
    Ms = [M for M in Ms if np.asarray(M).size]
    if not Ms:
        return np.zeros((0, 0))
    return diamond(*Ms)


def diamond_split(M, sizes):
    """Inverse of ``diamond``: extract the factors of given half-sizes (no coupling check)."""
    k = half_dim(M)
    assert sum(sizes) == k
    out = []
    off = 0
    for m in sizes:
        idx = np.r_[off:off + m, k + off:k + off + m]
        out.append(M[np.ix_(idx, idx)])
        off += m
    return out


def rotation(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def basic_normal_form(kind, *params):
    """D(lam), N1(lam, b), R(theta) or N2(theta, b) as listed among the basic normal forms."""
    if kind == "D":
        (lam,) = params
        if lam not in (2, -2):
            raise ValueError("D(lam) needs lam = +-2")
        return np.diag([float(lam), 1.0 / lam])
    if kind == "N1":
        lam, b = params
        if lam not in (1, -1) or b not in (-1, 0, 1):
            raise ValueError("N1(lam, b) needs lam = +-1 and b in {-1, 0, 1}")
        return np.array([[lam, b], [0.0, lam]], dtype=float)
    if kind == "R":
        (theta,) = params
        _check_angle(theta)
        return rotation(theta)
    if kind == "N2":
        theta, b = params
        _check_angle(theta)
        b = np.asarray(b, dtype=float).reshape(2, 2)
        if abs(b[0, 1] - b[1, 0]) < 1e-12:
            raise ValueError("N2(omega, b) needs b2 != b3")
        R = rotation(theta)
        M = np.block([[R, b], [np.zeros((2, 2)), R]])
        if not check_symplectic(M, 1e-9):
            raise ValueError("N2 block b must make the matrix symplectic (b = R(theta) S, S symmetric)")
        return M
    raise ValueError(f"unknown normal form kind {kind!r}")


def n2_block(theta, S):
    """The admissible N2 off-diagonal block b = R(theta) S for symmetric S."""
    S = np.asarray(S, dtype=float)
    return rotation(theta) @ (S + S.T) / 2


def _check_angle(theta):
    t = float(np.mod(theta, 2 * np.pi))
    if t < 1e-12 or abs(t - np.pi) < 1e-12:
        raise ValueError("theta must lie in (0, pi) or (pi, 2 pi)")


def n_transform(M, route="closed", tol=DEFAULT.symplectic_tol):
    """N M^{-1} N M.  ``route='closed'`` uses the block formula, ``'direct'`` multiplies out."""
    M = np.asarray(M, dtype=float)
    k = half_dim(M)
    if route == "direct":
        cond = np.linalg.cond(M)
        if not np.isfinite(cond) or cond > 1e12:
            raise ValueError(f"matrix is ill-conditioned (cond {cond:.2e})")
        Nk = N(k)
        return Nk @ np.linalg.solve(M, Nk @ M)
    A, B, C, D = blocks(M)
    return np.eye(2 * k) + 2 * from_blocks(B.T @ C, B.T @ D, A.T @ C, C.T @ B)


def _count_small(values, tol):
    return int(np.sum(values <= tol))


def stable_count(values, tol, what):
    """Count entries of ``values`` below ``tol``; insist the count is the same at tol/10 and 10 tol."""
    values = np.asarray(values)
    counts = {_count_small(values, t) for t in (tol / 10, tol, tol * 10)}
    if len(counts) != 1:
        raise IndeterminateError(f"{what}: count changes across tolerance band",
                                 values=values.tolist(), tol=tol)
    return counts.pop()


def nu_omega(M, omega=1.0, tol=DEFAULT.kernel_tol):
    """dim_C ker(M - omega I) via singular values (relative to max(1, ||M||))."""
    M = np.asarray(M, dtype=float)
    n2 = M.shape[0]
    if n2 == 0:
        return 0
    s = np.linalg.svd(M - omega * np.eye(n2), compute_uv=False)
    scale = max(1.0, np.linalg.norm(M, 2))
    return stable_count(s / scale, tol, "nu_omega")


def lagrangian_frame(k, j):
    """Column frame of L0 (j=0) or L1 (j=1)."""
    F = np.zeros((2 * k, k))
    if j == 0:
        F[k:, :] = np.eye(k)
    elif j == 1:
        F[:k, :] = np.eye(k)
    else:
        raise ValueError("j must be 0 or 1")
    return F


def nu_lagrangian(M, j, tol=DEFAULT.kernel_tol):
    """dim(M L_j cap L_j).  For M = [[A,B],[C,D]] this is dim ker B (j=0) or dim ker C (j=1)."""
    M = np.asarray(M, dtype=float)
    k = half_dim(M)
    if k == 0:
        return 0
    F = lagrangian_frame(k, j)
    stacked = np.hstack([M @ F, F])
    s = np.linalg.svd(stacked, compute_uv=False)
    scale = max(1.0, s[0])
    # 2k columns, rank = 2k - dim(intersection)
    return stable_count(s / scale, tol, "nu_lagrangian")


def elliptic_height(M, tol=DEFAULT.eig_tol, with_flag=False):
    """Total algebraic multiplicity of eigenvalues on the unit circle."""
    M = np.asarray(M, dtype=float)
    ev = np.linalg.eigvals(M)
    dev = np.abs(np.abs(ev) - 1.0)
    # eigenvalues of a Jordan block spread like tol^(1/size); use a loose band and
    # require the decision to be clear.
    band = np.sqrt(tol)
    on = dev <= band
    ambiguous = bool(np.any((dev > band / 10) & (dev <= band * 10)))
    e = int(np.sum(on))
    if e % 2:
        ambiguous = True
        e += 1 if np.sum(dev <= band * 10) > e else -1
    if with_flag:
        return e, ambiguous
    return e


@dataclass(frozen=True)
class InertiaTriple:
    m_plus: int
    m_zero: int
    m_minus: int

    @property
    def sgn(self):
        return self.m_plus - self.m_minus

    def __add__(self, other):
        return InertiaTriple(self.m_plus + other.m_plus, self.m_zero + other.m_zero,
                             self.m_minus + other.m_minus)

    def as_tuple(self):
        return (self.m_plus, self.m_zero, self.m_minus)


def inertia(S, tol=DEFAULT.inertia_tol):
    """(m+, m0, m-) with a relative zero band; an eigenvalue inside [tol/10, 10 tol] is unstable."""
    S = np.asarray(S, dtype=float)
    if S.size == 0:
        return InertiaTriple(0, 0, 0)
    if np.max(np.abs(S - S.T)) > 1e-8 * max(1.0, np.max(np.abs(S))):
        raise ValueError("inertia needs a symmetric matrix")
    w = np.linalg.eigvalsh((S + S.T) / 2)
    scale = max(1.0, np.max(np.abs(w)))
    a = np.abs(w) / scale
    if np.any((a > tol / 10) & (a <= tol * 10)):
        raise IndeterminateError("inertia: eigenvalue inside the zero band",
                                 eigenvalues=w.tolist(), tol=tol)
    zero = a <= tol
    return InertiaTriple(int(np.sum((w > 0) & ~zero)), int(np.sum(zero)),
                         int(np.sum((w < 0) & ~zero)))


def random_symmetric(rng, m, scale=1.0):
    X = rng.standard_normal((m, m)) * scale
    return (X + X.T) / 2


def random_symplectic(rng, k, scale=1.0):
    """exp(J S) for a random symmetric S."""
    from scipy.linalg import expm
    return expm(J(k) @ random_symmetric(rng, 2 * k, scale))


def block_diag_symplectic(Q):
    """diag(Q, Q^{-T})."""
    Q = np.asarray(Q, dtype=float)
    k = Q.shape[0]
    out = np.zeros((2 * k, 2 * k))
    out[:k, :k] = Q
    out[k:, k:] = np.linalg.inv(Q).T
    return out


# -- homotopy (approx) invariants -------------------------------------------

@dataclass(frozen=True)
class ApproxInvariants:
    unit_spectrum: tuple   # ((angle, nu), ...) with angle in [0, 2 pi)
    splitting: tuple       # ((angle, s_plus, s_minus), ...)
    hyperbolic_sign: int   # parity of negative real eigenvalue pairs off the circle
    indeterminate: bool = False

    def matches(self, other, angle_tol=1e-6):
        if self.indeterminate or other.indeterminate:
            return None
        if self.hyperbolic_sign != other.hyperbolic_sign:
            return False
        if len(self.unit_spectrum) != len(other.unit_spectrum):
            return False
        for (a, n1), (b, n2) in zip(self.unit_spectrum, other.unit_spectrum):
            if abs(a - b) > angle_tol or n1 != n2:
                return False
        for (a, p1, m1), (b, p2, m2) in zip(self.splitting, other.splitting):
            if abs(a - b) > angle_tol or p1 != p2 or m1 != m2:
                return False
        return True


def unit_eigen_angles(M, tol=DEFAULT.eig_tol):
    """Distinct eigenvalue angles on the unit circle, clustered."""
    ev = np.linalg.eigvals(np.asarray(M, dtype=float))
    on = np.abs(np.abs(ev) - 1) <= np.sqrt(tol)
    ang = np.sort(np.mod(np.angle(ev[on]), 2 * np.pi))
    clusters = []
    for a in ang:
        if clusters and (a - clusters[-1][-1]) < 1e-4:
            clusters[-1].append(a)
        else:
            clusters.append([a])
    if len(clusters) > 1 and (clusters[0][0] + 2 * np.pi - clusters[-1][-1]) < 1e-4:
        last = clusters.pop()
        clusters[0] = [x - 2 * np.pi for x in last] + clusters[0]
    # defective eigenvalues +-1 can drift off the circle numerically; the kernel sees them
    for target in (0.0, np.pi):
        try:
            hit = nu_omega(M, np.exp(1j * target), tol) > 0
        except IndeterminateError:
            hit = True
        if hit and not any(
                abs(np.mod(np.mean(c) - target + np.pi, 2 * np.pi) - np.pi) < 1e-4 for c in clusters):
            clusters.append([target])
    out = []
    for c in clusters:
        a = float(np.mean(c))
        # snap the real eigenvalues exactly
        for target in (0.0, np.pi):
            if abs(a - target) < 1e-4:
                a = target
        out.append(float(np.mod(a, 2 * np.pi)))
    return sorted(set(out))


def approx_invariants(M, tol=DEFAULT.eig_tol):
    """Unit spectrum with nu, splitting numbers at each unit eigenvalue, hyperbolic sign.

    Splitting numbers come from ``index.splitting_numbers`` (table route when M is a
    recognized diamond product of basic normal forms, limit route otherwise)."""
    from .index import splitting_numbers
    M = np.asarray(M, dtype=float)
    ev = np.linalg.eigvals(M)
    off = np.abs(np.abs(ev) - 1) > np.sqrt(tol)
    neg_pairs = int(round(np.sum(off & (np.abs(ev.imag) < 1e-9) & (ev.real < 0)) / 2))
    hyper = (-1) ** neg_pairs
    unit, split = [], []
    indeterminate = False
    for a in unit_eigen_angles(M, tol):
        w = np.exp(1j * a)
        try:
            nu = nu_omega(M, w)
            sp = splitting_numbers(M, w)
        except (IndeterminateError, ValueError):
            indeterminate = True
            continue
        unit.append((a, nu))
        split.append((a, sp.s_plus, sp.s_minus))
    return ApproxInvariants(tuple(unit), tuple(split), hyper, indeterminate)


def approx_equivalent(M1, M2):
    """True / False, or None when either invariant list is indeterminate."""
    return approx_invariants(M1).matches(approx_invariants(M2))
