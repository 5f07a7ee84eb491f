"""Spectral-flow engine for intersection indices of Lagrangian paths.

The graph of gamma(t) and the reference Lagrangian (V1 = L0 x L0, V2 = L1 x L1 or
Gr(omega I)) live in (R^2n x R^2n, (-J) + J).  Flipping the first factor by N turns
this into the standard form, where each Lagrangian frame (X; Y) has the unitary
U = (X + iY)(X - iY)^{-1}.  The intersection dimension with the reference equals the
multiplicity of the eigenvalue 1 of U_ref^* U(t), and the crossing form is positive
exactly when those eigenvalues pass 1 counterclockwise.

With lifted eigen-angles theta_j(t), the count sum_j ceil(theta_j / 2 pi) changes by
the signed number of crossings; crossings at the initial time count with the positive
part of the crossing form and at the final time with minus the negative part.  Only
the sum of the lifts is needed, and that is the continuous argument of
det(U_ref^* U(t)), tracked step by step.
"""

from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT, IndeterminateError


def graph_frame(G, omega=None):
    """(X, Y) frames of Gr(G) (batched), or of Gr(omega I) when G is None."""
    G = np.asarray(G)
    batch = G.ndim == 3
    if not batch:
        G = G[None]
    m, n2, _ = G.shape
    n = n2 // 2
    A, B, C, D = G[:, :n, :n], G[:, :n, n:], G[:, n:, :n], G[:, n:, n:]
    X = np.zeros((m, n2, n2), dtype=complex)
    Y = np.zeros((m, n2, n2), dtype=complex)
    X[:, :n, :n] = -np.eye(n)
    X[:, n:, :n] = A
    X[:, n:, n:] = B
    Y[:, :n, n:] = np.eye(n)
    Y[:, n:, :n] = C
    Y[:, n:, n:] = D
    if not batch:
        return X[0], Y[0]
    return X, Y


def scalar_graph_frame(n, omega):
    X = np.zeros((2 * n, 2 * n), dtype=complex)
    Y = np.zeros((2 * n, 2 * n), dtype=complex)
    X[:n, :n] = -np.eye(n)
    X[n:, :n] = omega * np.eye(n)
    Y[:n, n:] = np.eye(n)
    Y[n:, n:] = omega * np.eye(n)
    return X, Y


def souriau(X, Y):
    """U = (X + iY)(X - iY)^{-1}, batched."""
    P = X + 1j * Y
    Q = X - 1j * Y
    Pt = np.swapaxes(P, -1, -2)
    Qt = np.swapaxes(Q, -1, -2)
    return np.swapaxes(np.linalg.solve(Qt, Pt), -1, -2)


def reference_unitary(n, ref):
    """Unitary of the reference Lagrangian: 'L0', 'L1' or a unit complex omega."""
    if ref == "L0":
        return -np.eye(2 * n, dtype=complex)
    if ref == "L1":
        return np.eye(2 * n, dtype=complex)
    return souriau(*scalar_graph_frame(n, complex(ref)))


@dataclass
class FlowResult:
    times: np.ndarray
    counts: dict = field(default_factory=dict)   # mark -> ceil count
    nus: dict = field(default_factory=dict)      # mark -> intersection dimension
    grid_size: int = 0
    end_margin: float = np.inf                   # smallest |angle| at an unsnapped end


def _angles(U):
    return np.angle(np.linalg.eigvals(U))


def _mark_data(U, tol, snap):
    phi = _angles(U)
    a = np.abs(phi)
    if snap:
        if np.any((a > tol / 10) & (a <= tol * 10)):
            raise IndeterminateError("eigen-angle inside the degeneracy band",
                                     angles=phi.tolist(), tol=tol)
        zero = a <= tol
    else:
        zero = np.zeros_like(a, dtype=bool)
    phi_mod = np.where(zero, 0.0, np.mod(phi, 2 * np.pi))
    return phi_mod, int(np.sum(zero))


def spectral_flow(path, ref, marks=None, per_piece=32, step_norm=0.5, max_points=400000,
                  tol=DEFAULT.angle_tol, snap_end=True):
    """Ceil counts at the requested mark times (default: 0 and tau).

    ``snap_end=False`` treats the final time as non-degenerate (used when the
    reference has been moved off the spectrum on purpose)."""
    n = path.n
    Uref_h = reference_unitary(n, ref).conj().T
    if marks is None:
        marks = [0.0, path.tau]
    marks = sorted({float(m) for m in marks} | {0.0})
    grid = np.unique(np.concatenate([path.default_grid(per_piece), marks]))

    cache = {}

    def rel(ts):
        need = [t for t in ts if t not in cache]
        if need:
            G = path.at_many(need)
            X, Y = graph_frame(G)
            U = Uref_h[None] @ souriau(X, Y)
            for t, u in zip(need, U):
                cache[t] = u
        return np.array([cache[t] for t in ts])

    while True:
        U = rel(list(grid))
        d = np.linalg.norm(U[1:] - U[:-1], axis=(1, 2))
        bad = np.nonzero(d > step_norm)[0]
        if bad.size == 0:
            break
        if grid.size + bad.size > max_points:
            raise IndeterminateError("spectral flow refinement exceeded the grid budget",
                                     interval=(float(grid[bad[0]]), float(grid[bad[0] + 1])))
        mids = (grid[bad] + grid[bad + 1]) / 2
        if np.any(mids <= grid[bad]) or np.any(mids >= grid[bad + 1]):
            raise IndeterminateError("path is discontinuous",
                                     interval=(float(grid[bad[0]]), float(grid[bad[0] + 1])))
        grid = np.sort(np.concatenate([grid, mids]))

    steps = np.einsum("kji,kjl->kil", U[:-1].conj(), U[1:])
    dtheta = np.sum(np.angle(np.linalg.eigvals(steps)), axis=1)
    theta = np.concatenate([[0.0], np.cumsum(dtheta)])

    res = FlowResult(times=grid, grid_size=grid.size)
    phi0, _ = _mark_data(U[0], tol, True)
    theta = theta + np.sum(phi0)
    pos = {t: i for i, t in enumerate(grid)}
    for m in marks:
        i = pos[m]
        snap = snap_end or m != path.tau
        phi, nu = _mark_data(U[i], tol, snap)
        if not snap:
            res.end_margin = float(np.min(np.abs(_angles(U[i]))))
        wind = (theta[i] - np.sum(phi)) / (2 * np.pi)
        w = int(np.rint(wind))
        if abs(wind - w) > 1e-6:
            raise IndeterminateError("winding bookkeeping lost integrality", value=float(wind))
        res.counts[m] = w + (2 * n - nu)
        res.nus[m] = nu
    return res


def crossing_count(path, ref, **kw):
    """(count(tau) - count(0), nu at tau)."""
    r = spectral_flow(path, ref, **kw)
    return r.counts[path.tau] - r.counts[0.0], r.nus[path.tau]
