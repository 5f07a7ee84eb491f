"""Symplectic paths starting at the identity.

A path is stored as a callable t -> gamma(t) on [0, tau] together with a list of
breakpoints (times where it is only piecewise smooth).  Paths built from a
generator B(t) keep it so that finer samples can always be produced by
re-integration.
"""

import numpy as np
from scipy.linalg import expm, logm

from .core import J, N, half_dim, require_symplectic, diamond

_GL = (0.5 - np.sqrt(3) / 6, 0.5 + np.sqrt(3) / 6)


class SymplecticPath:
    """gamma: [0, tau] -> Sp(2n) with gamma(0) = I."""

    def __init__(self, tau, func, dim_half, generator=None, breakpoints=(), label=""):
        if tau <= 0:
            raise ValueError("tau must be positive")
        self.tau = float(tau)
        self._func = func
        self.n = int(dim_half)
        self.generator = generator
        bp = sorted({float(b) for b in breakpoints if 0 < b < tau})
        self.breakpoints = tuple(bp)
        self.label = label

    def __call__(self, t):
        return self.at(t)

    def at(self, t):
        t = min(max(float(t), 0.0), self.tau)
        return self._func(t)

    def at_many(self, ts):
        return np.array([self.at(t) for t in ts])

    @property
    def end(self):
        return self.at(self.tau)

    def pieces(self):
        """Smooth pieces as (start, stop) intervals."""
        edges = (0.0,) + self.breakpoints + (self.tau,)
        return list(zip(edges[:-1], edges[1:]))

    def default_grid(self, per_piece=64):
        ts = []
        for a, b in self.pieces():
            ts.append(np.linspace(a, b, per_piece + 1)[:-1])
        ts.append([self.tau])
        return np.concatenate(ts)

    @property
    def samples(self):
        ts = self.default_grid()
        return list(zip(ts, self.at_many(ts)))

    def check(self, tol=1e-9):
        g0 = self.at(0.0)
        if np.max(np.abs(g0 - np.eye(2 * self.n))) > tol:
            raise ValueError("path must start at the identity")
        for t in self.default_grid(16):
            require_symplectic(self.at(t), tol, name=f"gamma({t:.4g})")
        return True

    def restrict(self, t1):
        """gamma on [0, t1]."""
        return SymplecticPath(t1, self._func, self.n, self.generator,
                              [b for b in self.breakpoints if b < t1], self.label)

    def __repr__(self):
        return f"SymplecticPath(tau={self.tau:.6g}, n={self.n}, label={self.label!r})"


# -- constructors ------------------------------------------------------------

def _magnus4(Bfun, t0, h, Jn):
    c1, c2 = _GL
    A1 = Jn @ Bfun(t0 + c1 * h)
    A2 = Jn @ Bfun(t0 + c2 * h)
    Om = 0.5 * h * (A1 + A2) + (np.sqrt(3) / 12) * h * h * (A2 @ A1 - A1 @ A2)
    return expm(Om)


def constant_path(B, tau):
    """Fundamental solution of x' = J B x with constant symmetric B: gamma(t) = exp(t J B)."""
    B = np.asarray(B, dtype=float)
    if np.max(np.abs(B - B.T)) > 1e-12:
        raise ValueError("B must be symmetric")
    n = half_dim(B)
    A = J(n) @ B
    return SymplecticPath(tau, lambda t: expm(t * A), n, generator=lambda t: B, label="constant")


def fundamental_solution(B, tau, n_steps=256, constant=None):
    """Solve gamma' = J B(t) gamma, gamma(0) = I with a fourth-order Magnus scheme.

    Every step is an exponential of a Hamiltonian matrix, so the result stays in
    Sp(2n) to rounding.  Off-grid times are reached by one extra step from the
    nearest grid point below."""
    if n_steps < 64:
        raise ValueError("n_steps must be at least 64")
    if not callable(B):
        return constant_path(B, tau)
    B0 = np.asarray(B(0.0), dtype=float)
    n = half_dim(B0)
    Jn = J(n)
    h = tau / n_steps
    mats = np.empty((n_steps + 1, 2 * n, 2 * n))
    mats[0] = np.eye(2 * n)
    for k in range(n_steps):
        mats[k + 1] = _magnus4(B, k * h, h, Jn) @ mats[k]
    drift = np.max(np.abs(mats[-1].T @ Jn @ mats[-1] - Jn))
    if drift > 1e-9 * max(1.0, np.max(np.abs(mats[-1])) ** 2):
        raise ValueError(f"symplecticity drift {drift:.2e} exceeds 1e-9; increase n_steps")

    def func(t):
        k = min(int(np.floor(t / h)), n_steps)
        dt = t - k * h
        if dt <= 1e-15 * tau:
            return mats[k].copy()
        return _magnus4(B, k * h, dt, Jn) @ mats[k]

    return SymplecticPath(tau, func, n, generator=B, label="fundamental")


def sampled_path(times, mats):
    """Path from samples, interpolated by the one-parameter subgroup between neighbours."""
    times = np.asarray(times, dtype=float)
    mats = np.asarray(mats, dtype=float)
    if times[0] != 0 or np.any(np.diff(times) <= 0):
        raise ValueError("sample times must start at 0 and increase")
    n = half_dim(mats[0])
    if np.max(np.abs(mats[0] - np.eye(2 * n))) > 1e-9:
        raise ValueError("first sample must be the identity")
    for M in mats:
        require_symplectic(M)
    logs = []
    for k in range(len(times) - 1):
        L = logm(np.linalg.solve(mats[k], mats[k + 1]))
        if np.max(np.abs(L.imag)) > 1e-8 or np.linalg.norm(L) > 1.0:
            raise ValueError(f"samples {k},{k + 1} too far apart for interpolation")
        logs.append(L.real)

    def func(t):
        k = min(np.searchsorted(times, t, side="right") - 1, len(times) - 2)
        s = (t - times[k]) / (times[k + 1] - times[k])
        return mats[k] @ expm(s * logs[k])

    return SymplecticPath(times[-1], func, n, label="sampled")


def special_path_xi(n, tau=1.0):
    """xi_n(t) = diag(2 - t/tau, (2 - t/tau)^{-1})^{diamond n}, from D(2)^n to I."""
    def func(t):
        a = 2.0 - t / tau
        return np.diag(np.r_[np.full(n, a), np.full(n, 1.0 / a)])
    # xi_n(0) is not the identity, so it is only used as a raw callable
    return func


def joint_path(xi, eta, tol=1e-8):
    """eta * xi: xi(2t) on [0, tau/2], eta(2t - tau) on [tau/2, tau]; both on [0, tau]."""
    if abs(xi.tau - eta.tau) > 1e-12:
        raise ValueError("joint_path expects paths on the same interval")
    tau = xi.tau
    if np.max(np.abs(xi.end - eta.at(0.0))) > tol:
        raise ValueError("joint_path: xi(tau) != eta(0)")

    def func(t):
        if t <= tau / 2:
            return xi.at(2 * t)
        return eta.at(2 * t - tau)

    bps = [b / 2 for b in xi.breakpoints] + [tau / 2] + [(b + tau) / 2 for b in eta.breakpoints]
    return SymplecticPath(tau, func, xi.n, breakpoints=bps, label="joint")


def concatenate(g1, g2):
    """g1 on [0, t1] followed by g2(t - t1) g1(t1) on [t1, t1 + t2]."""
    t1 = g1.tau
    M1 = g1.end

    def func(t):
        if t <= t1:
            return g1.at(t)
        return g2.at(t - t1) @ M1

    bps = list(g1.breakpoints) + [t1] + [t1 + b for b in g2.breakpoints]
    return SymplecticPath(t1 + g2.tau, func, g1.n, breakpoints=bps, label="concat")


def product_path(g1, g2):
    """Pointwise product g1(t) g2(t) of two paths on the same interval."""
    if abs(g1.tau - g2.tau) > 1e-12:
        raise ValueError("product_path expects paths on the same interval")
    return SymplecticPath(g1.tau, lambda t: g1.at(t) @ g2.at(t), g1.n,
                          breakpoints=set(g1.breakpoints) | set(g2.breakpoints), label="product")


def diamond_path(*paths):
    tau = paths[0].tau
    if any(abs(p.tau - tau) > 1e-12 for p in paths):
        raise ValueError("diamond_path expects paths on the same interval")
    bps = set()
    for p in paths:
        bps |= set(p.breakpoints)
    return SymplecticPath(tau, lambda t: diamond(*[p.at(t) for p in paths], validate=False),
                          sum(p.n for p in paths), breakpoints=bps, label="diamond")


def rescale(path, tau):
    """Same path reparametrized linearly onto [0, tau]."""
    s = path.tau / tau
    return SymplecticPath(tau, lambda t: path.at(t * s), path.n,
                          breakpoints=[b / s for b in path.breakpoints], label=path.label)


def rotation_path(n, tau=np.pi, speed=1.0):
    """R(speed t)^{diamond n} on [0, tau]."""
    return constant_path(speed * np.eye(2 * n), tau)


def perturbed_path(path, eps):
    """gamma(t) exp(-eps t J)."""
    Jn = J(path.n)
    return SymplecticPath(path.tau, lambda t: path.at(t) @ expm(-eps * t * Jn), path.n,
                          breakpoints=path.breakpoints, label=path.label + "+perturbed")


def witness_path(M):
    """A path from I to M: the polar factors of M joined through one-parameter subgroups.

    M = P O with P = (M M^T)^{1/2} positive symplectic and O orthogonal symplectic;
    gamma(t) = exp(t log P) exp(t log O)."""
    from scipy.linalg import sqrtm
    M = np.asarray(M, dtype=float)
    n = half_dim(M)
    P = np.real(sqrtm(M @ M.T))
    P = (P + P.T) / 2
    O = np.linalg.solve(P, M)
    w, V = np.linalg.eigh(P)
    LP = V @ np.diag(np.log(w)) @ V.T
    # O = [[X, -Y], [Y, X]] corresponds to the unitary X + iY
    X, Y = O[:n, :n], O[n:, :n]
    u = X + 1j * Y
    ev, W = np.linalg.eig(u)
    K = W @ np.diag(1j * np.angle(ev)) @ np.linalg.inv(W)
    LO = np.block([[K.real, -K.imag], [K.imag, K.real]])

    def func(t):
        return expm(t * LP) @ expm(t * LO)

    return SymplecticPath(1.0, func, n, label="witness")


def shifted_witness(M, loops=1):
    """Witness with ``loops`` extra full turns of R(t)^{diamond n} prepended (same endpoint)."""
    n = half_dim(np.asarray(M))
    loop = constant_path(np.eye(2 * n), 2 * np.pi * loops)
    return concatenate(loop, witness_path(M))


# -- brake iteration -----------------------------------------------------------

def brake_iterate(path, k):
    """The k-th brake iteration on [0, k tau].

    On [2j tau, (2j+1) tau]: gamma(t - 2j tau) M^j, and on [(2j+1) tau, (2j+2) tau]:
    N gamma((2j+2) tau - t) N M^(j+1), where M = N gamma(tau)^{-1} N gamma(tau)."""
    if k < 1:
        raise ValueError("k must be positive")
    if k == 1:
        return path
    tau = path.tau
    n = path.n
    Nn = N(n)
    P = path.end
    M = Nn @ np.linalg.solve(P, Nn @ P)
    powers = [np.eye(2 * n)]
    for _ in range(k // 2 + 1):
        powers.append(powers[-1] @ M)

    def func(t):
        j2 = min(int(np.floor(t / tau)), k - 1)
        if j2 % 2 == 0:
            j = j2 // 2
            return path.at(t - 2 * j * tau) @ powers[j]
        j = (j2 - 1) // 2
        return Nn @ path.at((2 * j + 2) * tau - t) @ Nn @ powers[j + 1]

    bps = [m * tau + b for m in range(k) for b in path.breakpoints] + [m * tau for m in range(1, k)]
    # reflected pieces have mirrored breakpoints
    bps += [m * tau + (tau - b) for m in range(1, k, 2) for b in path.breakpoints]
    gen = None
    if path.generator is not None:
        B = path.generator

        def gen(t):
            j2 = min(int(np.floor(t / tau)), k - 1)
            if j2 % 2 == 0:
                return B(t - j2 * tau)
            return Nn @ B((j2 + 1) * tau - t) @ Nn
    return SymplecticPath(k * tau, func, n, generator=gen, breakpoints=bps,
                          label=f"{path.label}^{k}")


def periodic_iterate(path, k):
    """gamma(t - j tau) gamma(tau)^j on [j tau, (j+1) tau]."""
    tau = path.tau
    P = path.end
    powers = [np.eye(2 * path.n)]
    for _ in range(k):
        powers.append(powers[-1] @ P)

    def func(t):
        j = min(int(np.floor(t / tau)), k - 1)
        return path.at(t - j * tau) @ powers[j]

    bps = [m * tau + b for m in range(k) for b in path.breakpoints] + [m * tau for m in range(1, k)]
    return SymplecticPath(k * tau, func, path.n, breakpoints=bps, label=f"{path.label}^{k}p")


def brake_condition_defect(path, n_check=17):
    """max |gamma^2(t) - gamma(t - tau) gamma(tau)| over [tau, 2 tau]."""
    g2 = brake_iterate(path, 2)
    tau = path.tau
    P = path.end
    err = 0.0
    for t in np.linspace(tau, 2 * tau, n_check):
        err = max(err, np.max(np.abs(g2.at(t) - path.at(t - tau) @ P)))
    return err
