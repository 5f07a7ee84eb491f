"""Brake orbits on convex, even, reversible energy surfaces.

A brake orbit of x' = J H'(x) starts on L0 (p = 0), returns to L0 at time tau/2 and
is continued by x(tau - t) = N x(t).  Orbits are found by shooting from L0 on the
energy surface, then deduplicated as point sets.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.interpolate import CubicHermiteSpline, CubicSpline
from scipy.optimize import brentq
from scipy.spatial.distance import directed_hausdorff

from .config import DEFAULT, ConvergenceError
from .core import J, N
from .paths import brake_iterate, constant_path, fundamental_solution

log = logging.getLogger(__name__)

_S3 = np.sqrt(3.0)
GL_A = np.array([[0.25, 0.25 - _S3 / 6], [0.25 + _S3 / 6, 0.25]])
GL_B = np.array([0.5, 0.5])
HALF_STEPS = 1024          # steps per half period: step tau / 2048


# -- Hamiltonians -----------------------------------------------------------------

@dataclass
class ConvexSymmetricHamiltonian:
    """H with gradient and Hessian.  ``degree`` is the homogeneity degree used to move
    points onto the energy surface; ``form`` is set when H(x) = x^T form x."""
    kind: str
    n: int
    energy: float
    H: object
    grad: object
    hess: object
    degree: float
    form: np.ndarray = None
    params: dict = field(default_factory=dict)

    def to_surface(self, y):
        y = np.asarray(y, dtype=float)
        val = self.H(y)
        if val <= 0:
            raise ValueError("cannot rescale the origin onto the energy surface")
        return y * (self.energy / val) ** (1.0 / self.degree)

    def energies(self, X):
        X = np.asarray(X, dtype=float)
        if self.form is not None:
            return np.einsum("ij,jk,ik->i", X, self.form, X)
        return np.array([self.H(x) for x in X])

    def vector_field(self, x):
        return J(self.n) @ self.grad(x)

    def vector_fields(self, X):
        """Rows J H'(x) for the rows x of X."""
        X = np.asarray(X, dtype=float)
        Jn = J(self.n)
        if self.form is not None:
            return X @ (2 * Jn @ self.form).T
        return np.array([Jn @ self.grad(x) for x in X])

    def frequencies(self):
        """Linear frequencies (only for quadratic H)."""
        if self.form is None:
            return None
        ev = np.linalg.eigvals(J(self.n) @ (2 * self.form))
        return np.sort(np.abs(ev.imag))[::2]

    def validate(self, rng=None, n_samples=32, tol=1e-10, require_even=True):
        rng = np.random.default_rng(0) if rng is None else rng
        Nn = N(self.n)
        for _ in range(n_samples):
            x = self.to_surface(rng.standard_normal(2 * self.n))
            h = self.H(x)
            if require_even and abs(self.H(-x) - h) > tol * max(1.0, abs(h)):
                raise ValueError("H is not even")
            if abs(self.H(Nx := Nn @ x) - h) > tol * max(1.0, abs(h)):
                raise ValueError(f"H is not reversible at {Nx}")
            if require_even and np.linalg.eigvalsh(self.hess(x))[0] <= 0:
                raise ValueError("Hessian is not positive definite on the energy surface")
        return True


def quadratic_hamiltonian(weights=None, form=None, energy=1.0):
    """H = 1/2 |p|^2 + sum a_j^2 q_j^2 from weights a, or H = x^T form x."""
    if (weights is None) == (form is None):
        raise ValueError("give exactly one of weights and form")
    if weights is not None:
        a = np.asarray(weights, dtype=float)
        Q = np.diag(np.r_[0.5 * np.ones(a.size), a ** 2])
    else:
        Q = np.asarray(form, dtype=float)
        Q = (Q + Q.T) / 2
    n = Q.shape[0] // 2
    if np.linalg.eigvalsh(Q)[0] <= 0:
        raise ValueError("quadratic form must be positive definite")
    if np.max(np.abs(Q[:n, n:])) > 1e-12:
        raise ValueError("a reversible quadratic form has no p-q coupling")
    Ham = ConvexSymmetricHamiltonian(
        "quadratic", n, float(energy), H=lambda x: float(x @ Q @ x),
        grad=lambda x: 2 * Q @ x, hess=lambda x: 2 * Q, degree=2.0, form=Q,
        params={"form": Q.tolist()} if weights is None else {"weights": a.tolist()})
    Ham.validate()
    return Ham


def _fd_grad(g, y, h=1e-6):
    e = np.eye(y.size)
    return np.array([(g(y + h * e[i]) - g(y - h * e[i])) / (2 * h) for i in range(y.size)])


def _fd_hess(grad, y, h=1e-5):
    e = np.eye(y.size)
    Hm = np.array([(grad(y + h * e[i]) - grad(y - h * e[i])) / (2 * h) for i in range(y.size)])
    return (Hm + Hm.T) / 2


def gauge_hamiltonian(surface, alpha=2.0, check=True):
    """H_alpha = j^alpha for the gauge j of a convex body.

    ``surface`` is {"ellipsoid": Q} (the body x^T Q x <= 1) or {"level": g, "grad": ...,
    "hess": ...} with the body {g <= 1}, g(0) < 1 and g radially increasing."""
    if alpha <= 1:
        raise ValueError("alpha must exceed 1")
    if "ellipsoid" in surface:
        Q = np.asarray(surface["ellipsoid"], dtype=float)
        Q = (Q + Q.T) / 2
        n = Q.shape[0] // 2
        if np.max(np.abs(Q[:n, n:])) > 1e-12:
            raise ValueError("surface is not N-symmetric")

        def j(x):
            return np.sqrt(max(x @ Q @ x, 0.0))

        def jgrad(x, v):
            return Q @ x / v

        def jhess(x, v):
            return Q / v - np.outer(Q @ x, Q @ x) / v ** 3
        form = Q if alpha == 2 else None
        params = {"ellipsoid": Q.tolist(), "alpha": alpha}
    else:
        g = surface["level"]
        gg = surface.get("grad") or (lambda y: _fd_grad(g, y))
        gh = surface.get("hess") or (lambda y: _fd_hess(gg, y))
        n = surface["n"]

        def j(x):
            r = np.linalg.norm(x)
            if r == 0:
                return 0.0
            return r / _radial_root(g, gg, x / r)

        def jgrad(x, v):
            y = x / v
            gy = gg(y)
            return gy / (gy @ y)

        def jhess(x, v):
            y = x / v
            gy, Hy = gg(y), gh(y)
            c = gy @ y
            dv = (Hy * c - np.outer(gy, Hy @ y + gy)) / c ** 2
            dj = gy / c
            return dv @ (np.eye(y.size) - np.outer(y, dj)) / v
        form = None
        params = {"alpha": alpha, "level": getattr(g, "__name__", "level")}

    def H(x):
        return float(j(x) ** alpha)

    def grad(x):
        v = j(x)
        return alpha * v ** (alpha - 1) * jgrad(x, v)

    def hess(x):
        v = j(x)
        if v == 0:
            raise ValueError("the gauge Hamiltonian is not twice differentiable at 0")
        dj = jgrad(x, v)
        return (alpha * (alpha - 1) * v ** (alpha - 2) * np.outer(dj, dj)
                + alpha * v ** (alpha - 1) * jhess(x, v))

    Ham = ConvexSymmetricHamiltonian("gauge_power", n, 1.0, H=H, grad=grad, hess=hess,
                                     degree=float(alpha), form=form, params=params)
    if check:
        Ham.validate(tol=1e-9)
    return Ham


def _radial_root(g, gg, u, max_iter=60):
    """s > 0 with g(s u) = 1 for a convex level function increasing along rays."""
    s = 1.0
    for _ in range(max_iter):
        val = g(s * u) - 1.0
        d = gg(s * u) @ u
        if d <= 0:
            break
        step = val / d
        s_new = s - step
        if s_new <= 0:
            s_new = s / 2
        if abs(s_new - s) <= 1e-15 * s:
            return s_new
        s = s_new
    f = lambda t: g(t * u) - 1.0
    hi = 1.0
    while f(hi) < 0:
        hi *= 2
    lo = hi / 2
    while f(lo) > 0 and lo > 1e-12:
        lo /= 2
    return brentq(f, lo, hi, xtol=1e-15, rtol=1e-15)


def mechanical_hamiltonian(V, gradV, hessV, n, energy=1.0):
    """H = 1/2 |p|^2 + V(q): reversible, even only when V is."""
    def H(x):
        return float(0.5 * x[:n] @ x[:n] + V(x[n:]))

    def grad(x):
        return np.r_[x[:n], gradV(x[n:])]

    def hess(x):
        out = np.zeros((2 * n, 2 * n))
        out[:n, :n] = np.eye(n)
        out[n:, n:] = hessV(x[n:])
        return out

    Ham = ConvexSymmetricHamiltonian("mechanical", n, float(energy), H, grad, hess, 2.0)
    Ham.to_surface = lambda y: _mechanical_surface(Ham, y)
    return Ham


def _mechanical_surface(Ham, y):
    """Point on {H = h} along the ray through y (H grows along rays from a well at 0)."""
    y = np.asarray(y, dtype=float)
    f = lambda s: Ham.H(s * y) - Ham.energy
    hi = 1.0
    while f(hi) < 0:
        hi *= 2
    return brentq(f, 0.0, hi, xtol=1e-15, rtol=1e-15) * y


# -- integration --------------------------------------------------------------------

def pade_step(A, h):
    """Gauss-Legendre 2-stage step of x' = A x: the (2, 2) Pade approximant of exp(hA)."""
    Z = h * A
    Z2 = Z @ Z / 12
    I = np.eye(A.shape[0])
    return np.linalg.solve(I - Z / 2 + Z2, I + Z / 2 + Z2)


def _power(S, m):
    """S^m for m a power of two."""
    out = S
    while m > 1:
        out = out @ out
        m //= 2
    return out


def gl2_step(Ham, x, h, with_jac=False, max_iter=60):
    """One Gauss-Legendre step for x' = J grad H(x); optionally the step Jacobian."""
    n2 = x.size
    Jn = J(n2 // 2)
    f = lambda y: Jn @ Ham.grad(y)
    K = np.tile(f(x), (2, 1))
    Df = Jn @ Ham.hess(x)
    Msimp = np.eye(2 * n2) - h * np.kron(GL_A, Df)
    for _ in range(max_iter):
        X = x + h * GL_A @ K
        F = np.array([f(X[0]), f(X[1])])
        G = (K - F).ravel()
        dK = np.linalg.solve(Msimp, -G)
        K = K + dK.reshape(2, n2)
        if np.max(np.abs(dK)) <= 1e-13 * max(1.0, np.max(np.abs(K))):
            break
    else:
        raise ConvergenceError("stage equations did not converge", step=h)
    X = x + h * GL_A @ K
    x1 = x + h * (GL_B @ np.array([f(X[0]), f(X[1])]))
    if not with_jac:
        return x1, None
    D = [Jn @ Ham.hess(X[0]), Jn @ Ham.hess(X[1])]
    big = np.eye(2 * n2)
    for i in range(2):
        for k in range(2):
            big[i * n2:(i + 1) * n2, k * n2:(k + 1) * n2] -= h * GL_A[i, k] * D[k]
    dX = np.linalg.solve(big, np.vstack([np.eye(n2), np.eye(n2)]))
    jac = np.eye(n2) + h * sum(GL_B[i] * D[i] @ dX[i * n2:(i + 1) * n2] for i in range(2))
    return x1, jac


def flow(Ham, x0, T, n_steps=HALF_STEPS, samples=False, with_jac=True):
    """Integrate over [0, T] with n_steps Gauss-Legendre steps.

    Returns (x(T), Phi(T) or None, samples or None)."""
    x0 = np.asarray(x0, dtype=float)
    h = T / n_steps
    if Ham.form is not None:
        S = pade_step(J(Ham.n) @ (2 * Ham.form), h)
        if samples:
            X = np.empty((n_steps + 1, x0.size))
            X[0] = x0
            m, P = 1, S
            while m <= n_steps:
                top = min(2 * m, n_steps + 1)
                X[m:top] = X[:top - m] @ P.T
                P = P @ P
                m *= 2
            Phi = _power(S, n_steps) if (n_steps & (n_steps - 1)) == 0 else np.linalg.matrix_power(S, n_steps)
            return X[-1].copy(), Phi, X
        Phi = _power(S, n_steps) if (n_steps & (n_steps - 1)) == 0 else np.linalg.matrix_power(S, n_steps)
        return Phi @ x0, Phi, None
    x = x0.copy()
    Phi = np.eye(x0.size) if with_jac else None
    X = [x.copy()] if samples else None
    for _ in range(n_steps):
        x, jac = gl2_step(Ham, x, h, with_jac)
        if with_jac:
            Phi = jac @ Phi
        if samples:
            X.append(x.copy())
    return x, Phi, (np.array(X) if samples else None)


# -- orbits ---------------------------------------------------------------------------

@dataclass
class BrakeOrbit:
    period: float
    times: np.ndarray          # uniform grid on [0, period]
    states: np.ndarray
    energy: float
    residuals: dict
    q0: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def n(self):
        return self.states.shape[1] // 2

    def dense(self, Ham):
        """C^1 interpolant of x(t) on [0, period]."""
        dx = Ham.vector_fields(self.states)
        return CubicHermiteSpline(self.times, self.states, dx)

    def image(self, n_points=512):
        """n_points samples equally spaced in arc length (periodic spline)."""
        cache = self.__dict__.setdefault("_images", {})
        if n_points not in cache:
            cache[n_points] = self._image(n_points)
        return cache[n_points]

    def _image(self, n_points):
        X = self.states
        seg = np.linalg.norm(np.diff(X, axis=0), axis=1)
        s = np.r_[0.0, np.cumsum(seg)]
        if s[-1] <= 0:
            return X[:1]
        Y = X.copy()
        Y[-1] = Y[0]
        keep = np.r_[True, np.diff(s) > 0]
        spl = CubicSpline(s[keep], Y[keep], bc_type="periodic")
        return spl(np.linspace(0, s[-1], n_points, endpoint=False))

    def to_dict(self, with_samples=True):
        out = {"period": self.period, "energy": self.energy, "q0": self.q0.tolist(),
               "residuals": self.residuals, "meta": self.meta}
        if with_samples:
            out["times"] = self.times.tolist()
            out["states"] = self.states.tolist()
        return out


def _tangent_basis(v):
    """Orthonormal basis of v^perp (n x (n-1))."""
    Q, _ = np.linalg.qr(np.c_[v, np.eye(v.size)])
    return Q[:, 1:v.size]


def _surface_jac(Ham, v):
    """d q0 / d v where (0, q0) = to_surface((0, v))."""
    n = Ham.n
    y = np.r_[np.zeros(n), v]
    x = Ham.to_surface(y)
    s = x[n:] @ v / (v @ v)
    if Ham.kind == "mechanical":
        g = Ham.grad(x)[n:]
        # s(v) solves H(0, s v) = h: ds/dv = -s g / (g . v)
        ds = -s * g / (g @ v)
    else:
        g = Ham.grad(y)[n:]
        ds = -(s / Ham.degree) * g / Ham.H(y)
    return s * np.eye(n) + np.outer(v, ds), x


def half_period_guess(Ham, q0, horizon=None, n_probe=4096):
    """First local minimum t > 0 of |p(t)| starting from (0, q0) on the surface."""
    n = Ham.n
    x0 = Ham.to_surface(np.r_[np.zeros(n), q0])
    if horizon is None:
        if Ham.form is not None:
            w = Ham.frequencies()
            horizon = 1.5 * np.pi / w.min()
        else:
            horizon = 8.0
    h = horizon / n_probe
    if Ham.form is not None:
        _, _, X = flow(Ham, x0, horizon, n_probe, samples=True, with_jac=False)
    else:
        _, _, X = flow(Ham, x0, horizon, min(n_probe, 512), samples=True, with_jac=False)
        h = horizon / (X.shape[0] - 1)
    pn = np.linalg.norm(X[:, :n], axis=1)
    for i in range(2, pn.size - 1):
        if pn[i] <= pn[i - 1] and pn[i] < pn[i + 1]:
            return i * h
    return None


def half_period_guess_batch(Ham, Q0, n_probe=4096):
    """Vectorized ``half_period_guess`` for quadratic H."""
    n = Ham.n
    w = Ham.frequencies()
    horizon = 1.5 * np.pi / w.min()
    h = horizon / n_probe
    S = pade_step(J(n) @ (2 * Ham.form), h)
    X0 = np.array([Ham.to_surface(np.r_[np.zeros(n), q]) for q in Q0])
    out = np.full(len(Q0), np.nan)
    X = X0.copy()
    prev2 = prev = None
    alive = np.ones(len(Q0), bool)
    for i in range(1, n_probe + 1):
        X = X @ S.T
        pn = np.linalg.norm(X[:, :n], axis=1)
        if prev2 is not None:
            hit = alive & (prev <= prev2) & (prev < pn)
            out[hit] = (i - 1) * h
            alive &= ~hit
            if not alive.any():
                break
        prev2, prev = prev, pn
    return out


def shoot_brake_orbit(Ham, q0, tau_guess, tol=DEFAULT, max_iter=40, half_steps=HALF_STEPS,
                      check_minimal=True):
    """Newton on (direction of q0, T = tau/2) for p(T) = 0, starting from (0, q0) moved onto
    the energy surface.  Raises ConvergenceError with the residual trace on failure."""
    n = Ham.n
    v = np.asarray(q0, dtype=float)
    v = v / np.linalg.norm(v)
    T = 0.5 * float(tau_guess)
    if T <= 0:
        raise ValueError("tau_guess must be positive")
    trace = []
    converged = False
    for it in range(max_iter):
        dq, x0 = _surface_jac(Ham, v)
        xT, Phi, _ = flow(Ham, x0, T, half_steps)
        res = xT[:n]
        err = float(np.max(np.abs(res)))
        trace.append(err)
        scale = max(1.0, np.max(np.abs(x0)))
        if err <= tol.bc_tol * scale:
            converged = True
            break
        if n > 1:
            Bt = _tangent_basis(v)
            Jc = np.c_[Phi[:n, n:] @ dq @ Bt, Ham.vector_field(xT)[:n]]
        else:
            Jc = Ham.vector_field(xT)[:n].reshape(1, 1)
        step = np.linalg.lstsq(Jc, -res, rcond=None)[0]
        dw, dT = step[:-1], step[-1]
        lim = max(np.linalg.norm(dw) / 0.5, abs(dT) / (0.25 * T), 1.0)
        dw, dT = dw / lim, dT / lim
        if n > 1:
            v = v + Bt @ dw
            v /= np.linalg.norm(v)
        T += dT
        if T <= 0:
            break
    if not converged:
        raise ConvergenceError("shooting did not converge", trace=trace, q0=v.tolist(), T=T)
    orbit = _assemble(Ham, x0, T, half_steps, tol)
    orbit.meta["newton_trace"] = trace
    if check_minimal:
        orbit = _minimize_period(Ham, orbit, tol, half_steps)
    return orbit


def _assemble(Ham, x0, T, half_steps, tol):
    """Samples on [0, 2T]: integrated half, reflected half, and a direct re-integration of
    the second half for comparison."""
    n = Ham.n
    Nn = N(n)
    xT, _, X = flow(Ham, x0, T, half_steps, samples=True, with_jac=False)
    second = (Nn @ X[::-1].T).T                 # x(2T - t) = N x(t)
    states = np.vstack([X, second[1:]])
    times = np.linspace(0, 2 * T, 2 * half_steps + 1)
    x_direct, _, _ = flow(Ham, xT, T, half_steps, with_jac=False)
    energies = Ham.energies(states)
    res = {"bc_start": float(np.max(np.abs(x0[:n]))), "bc_half": float(np.max(np.abs(xT[:n]))),
           "energy": float(np.max(np.abs(energies - Ham.energy))),
           "reflection": float(np.max(np.abs(x_direct - x0)))}
    orbit = BrakeOrbit(2 * T, times, states, Ham.energy, res, x0[n:].copy())
    scale = max(1.0, np.max(np.abs(states)))
    ok = (res["bc_start"] <= tol.bc_tol * scale and res["bc_half"] <= tol.bc_tol * scale
          and res["energy"] <= tol.energy_tol * max(1.0, Ham.energy)
          and res["reflection"] <= 1e3 * tol.bc_tol * scale)
    orbit.meta["valid"] = bool(ok)
    return orbit


def _minimize_period(Ham, orbit, tol, half_steps, max_divisor=12):
    """If x(tau/d) = x(0) for some d > 1, re-shoot at the smaller period."""
    x0 = orbit.states[0]
    scale = max(1.0, np.max(np.abs(orbit.states)))
    xs = orbit.dense(Ham)
    for d in range(max_divisor, 1, -1):
        # the interpolant is a cheap screen; candidates are confirmed by integration
        if np.max(np.abs(xs(orbit.period / d) - x0)) > 1e-4 * scale:
            continue
        xd, _, _ = flow(Ham, x0, orbit.period / d, half_steps, with_jac=False)
        if np.max(np.abs(xd - x0)) <= 1e3 * tol.bc_tol * scale:
            smaller = shoot_brake_orbit(Ham, x0[Ham.n:], orbit.period / d, tol,
                                        half_steps=half_steps, check_minimal=False)
            smaller.meta["period_reduced_from"] = orbit.period
            return smaller
    return orbit


def classify_symmetry(orbit, tol=DEFAULT):
    """'symmetric' when x(t + tau/2) = -x(t) on the samples."""
    X = orbit.states[:-1]
    m = X.shape[0]
    if m % 2:
        raise ValueError("needs an even number of samples per period")
    shifted = np.roll(X, -m // 2, axis=0)
    defect = float(np.max(np.abs(shifted + X)))
    scale = max(1.0, np.max(np.abs(X)))
    orbit.meta["symmetry_defect"] = defect
    return "symmetric" if defect <= tol.sym_tol * scale else "asymmetric"


def hausdorff(o1, o2, n_points=512):
    A, B = o1.image(n_points), o2.image(n_points)
    return max(directed_hausdorff(A, B)[0], directed_hausdorff(B, A)[0])


def resonance_flag(Ham, max_den=64, tol=1e-9):
    """True when some frequency ratio is rational with denominator <= max_den."""
    w = Ham.frequencies()
    if w is None:
        return None
    for i in range(w.size):
        for j in range(i + 1, w.size):
            r = w[j] / w[i]
            f = Fraction(r).limit_denominator(max_den)
            if abs(r - f.numerator / f.denominator) <= tol * r:
                return True
    return False


def direction_grid(n, density):
    """Unit directions: hyperspherical angles, the last one on [0, 2 pi), the others at
    midpoints of (0, pi)."""
    if n == 1:
        return np.array([[1.0], [-1.0]])
    phis = 2 * np.pi * np.arange(density) / density
    if n == 2:
        return np.c_[np.cos(phis), np.sin(phis)]
    thetas = np.pi * (np.arange(density) + 0.5) / density
    inner = direction_grid(n - 1, density)
    out = []
    for th in thetas:
        for u in inner:
            out.append(np.r_[np.cos(th), np.sin(th) * u])
    return np.array(out)


@dataclass
class Enumeration:
    classes: list               # representative BrakeOrbit per class
    multiplicity: list
    unconverged: list
    resonant: object
    note: str = ""

    @property
    def count(self):
        return len(self.classes)


def enumerate_brake_orbits(Ham, grid_density=64, dedup_tol=DEFAULT.dedup_tol, tol=DEFAULT,
                           directions=None):
    """Shoot from every grid direction and group converged orbits by image."""
    D = direction_grid(Ham.n, grid_density) if directions is None else np.asarray(directions)
    if Ham.form is not None:
        guesses = half_period_guess_batch(Ham, D)
    else:
        guesses = np.array([half_period_guess(Ham, d) or np.nan for d in D])
    classes, mult, unconverged = [], [], []
    keys = []
    for d, g in zip(D, guesses):
        if not np.isfinite(g):
            unconverged.append({"direction": d.tolist(), "reason": "no period guess"})
            continue
        try:
            orb = shoot_brake_orbit(Ham, d, 2 * g, tol)
        except ConvergenceError as e:
            unconverged.append({"direction": d.tolist(), "reason": str(e),
                                "trace": e.detail.get("trace", [])[-3:]})
            log.debug("unconverged direction %s", d)
            continue
        if not orb.meta["valid"]:
            unconverged.append({"direction": d.tolist(), "reason": "invariants failed",
                                "residuals": orb.residuals})
            continue
        key = _l0_key(orb)
        for c, (rep, k) in enumerate(zip(classes, keys)):
            if abs(rep.period - orb.period) > 1e-6 * rep.period:
                continue
            if np.max(np.abs(k - key)) > 1e-3:
                continue
            if hausdorff(rep, orb) < dedup_tol:
                mult[c] += 1
                break
        else:
            classes.append(orb)
            keys.append(key)
            mult.append(1)
    res = resonance_flag(Ham)
    note = "grid-resolved, continuum suspected" if res else ""
    return Enumeration(classes, mult, unconverged, res, note)


def _l0_key(orb):
    """The two L0 points, sorted so the key does not depend on the starting one."""
    n = orb.n
    a = orb.states[0, n:]
    b = orb.states[(orb.states.shape[0] - 1) // 2, n:]
    pts = sorted([tuple(np.round(a, 6)), tuple(np.round(b, 6))])
    return np.array(pts)


# -- linearization and indices ------------------------------------------------------------

def linearized_path(orbit, Ham, n_steps=512):
    """Fundamental solution of y' = J H''(x(t)) y on [0, tau/2]."""
    half = orbit.period / 2
    if np.min(np.linalg.norm(orbit.states, axis=1)) == 0:
        raise ValueError("orbit passes through the origin where H'' is undefined")
    if Ham.form is not None:
        p = constant_path(2 * Ham.form, half)
        p.label = "linearized"
        return p
    xs = orbit.dense(Ham)

    def B(t):
        return Ham.hess(xs(t))
    p = fundamental_solution(B, half, n_steps=n_steps)
    p.label = "linearized"
    return p


def orbit_indices(orbit, Ham, m, path=None):
    """(i_L0, nu_L0), (i_L1, nu_L1) of gamma^m and (i, nu) of gamma^{2m}."""
    from .index import index_lagrangian, index_omega
    g = linearized_path(orbit, Ham) if path is None else path
    gm = brake_iterate(g, m)
    a = index_lagrangian(gm, 0)
    b = index_lagrangian(gm, 1)
    w = index_omega(brake_iterate(g, 2 * m), 1.0)
    return {"m": m, "L0": a.as_tuple(), "L1": b.as_tuple(), "omega1": w.as_tuple()}


def orbit_theorem_checks(orbit, Ham, path=None):
    """Inequality i_L1 + S^+_M(1) - nu_L0 >= 0 with M = gamma^2(tau), the sum identity
    i_L0 + i_L1 = i(gamma^2) - n, and the companion inequality for i_L0."""
    from .index import splitting_numbers
    g = linearized_path(orbit, Ham) if path is None else path
    rec = orbit_indices(orbit, Ham, 1, g)
    g2 = brake_iterate(g, 2)
    S = splitting_numbers(g2.end, 1.0, witness=g2).s_plus
    (iL0, nuL0), (iL1, nuL1), (i2, _) = rec["L0"], rec["L1"], rec["omega1"]
    n = g.n
    return {"S_plus": S, "thm41_L1": iL1 + S - nuL0, "thm41_L0": iL0 + S - nuL1,
            "bott": iL0 + iL1 == i2 - n, **rec}
