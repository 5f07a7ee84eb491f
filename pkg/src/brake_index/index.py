"""Index theory for symplectic paths: omega-index, L0/L1 indices, splitting numbers,
brake iteration, mixed concavities, mean index and the common index jump search."""

from dataclasses import dataclass, field
import itertools

import numpy as np
from scipy.optimize import minimize_scalar

from .config import DEFAULT, IndeterminateError
from .core import (blocks, half_dim, nu_lagrangian, nu_omega, n_transform, check_symplectic,
                   rotation, unit_eigen_angles)
from .maslov import spectral_flow
from .paths import (SymplecticPath, brake_iterate, fundamental_solution, constant_path,
                    perturbed_path, witness_path)

__all__ = [
    "IndexPair", "SplittingPair", "index_omega", "index_lagrangian", "splitting_numbers",
    "brake_iterate", "fundamental_solution", "mixed_concavity", "mean_index_L0",
    "common_index_jump_search", "iteration_monotonicity_check", "lagrangian_iterates",
    "omega_iterates", "degeneracy_sum", "recognize_normal_forms",
]

GRIDS = (32, 47)


@dataclass(frozen=True)
class IndexPair:
    i: int
    nu: int
    flavor: str
    meta: dict = field(default_factory=dict, compare=False)

    def as_tuple(self):
        return (self.i, self.nu)


@dataclass(frozen=True)
class SplittingPair:
    omega: complex
    s_plus: int
    s_minus: int
    route: str = "limit"


def _ref_key(ref):
    if isinstance(ref, str):
        return ref
    return complex(ref)


def _flow(path, ref, marks=None, snap_end=True, grids=GRIDS, tol=DEFAULT.angle_tol):
    """Spectral flow on two base grids; the integer results must agree."""
    results = [spectral_flow(path, _ref_key(ref), marks=marks, per_piece=g, tol=tol,
                             snap_end=snap_end) for g in grids]
    r0 = results[0]
    for r in results[1:]:
        for m in r0.counts:
            if r.counts[m] - r.counts[0.0] != r0.counts[m] - r0.counts[0.0] or r.nus[m] != r0.nus[m]:
                raise IndeterminateError("index differs between sampling grids",
                                         mark=m, counts=(r0.counts[m], r.counts[m]))
    return r0


def _is_one(omega):
    return abs(complex(omega) - 1) < 1e-14


def index_omega(path, omega=1.0, tol=DEFAULT.kernel_tol, snap_end=True, grids=GRIDS):
    """(i_omega, nu_omega).  For omega = 1 the n initial directions of the joined
    special path are subtracted so that i(R(t)^n on [0, pi]) = n."""
    omega = complex(omega)
    if abs(abs(omega) - 1) > 1e-12:
        raise ValueError("omega must lie on the unit circle")
    r = _flow(path, omega, snap_end=snap_end, grids=grids)
    i = r.counts[path.tau] - r.counts[0.0] - (path.n if _is_one(omega) else 0)
    nu = r.nus[path.tau]
    meta = {"grid": int(r.grid_size)}
    if not snap_end:
        meta["end_margin"] = r.end_margin
    if snap_end:
        nu_direct = nu_omega(path.end, omega, tol)
        if nu_direct != nu:
            raise IndeterminateError("nu_omega disagrees between kernel and flow routes",
                                     flow=nu, kernel=nu_direct)
    return IndexPair(int(i), int(nu), f"omega={omega:.6g}", meta)


def index_omega_perturbed(path, omega=1.0, eps_list=(1e-4, 1e-5)):
    """i_omega via the end-perturbed paths gamma(t) exp(-eps t J); all eps must agree."""
    vals = set()
    for eps in eps_list:
        p = perturbed_path(path, eps)
        vals.add(index_omega(p, omega, snap_end=False).i)
    if len(vals) != 1:
        raise IndeterminateError("perturbation route unstable in eps", values=sorted(vals))
    return vals.pop()


def index_lagrangian(path, j, tol=DEFAULT.kernel_tol, definite_route="auto", grids=GRIDS):
    """(i_Lj, nu_Lj).

    The general route is the spectral flow of Gr(gamma) against L_j x L_j.  When the
    generator's relevant diagonal block (b22 for L0, b11 for L1) is positive definite,
    i_Lj is also the number of interior L_j-degeneracies, and the two must agree."""
    if j not in (0, 1):
        raise ValueError("j must be 0 or 1")
    ref = "L0" if j == 0 else "L1"
    r = _flow(path, ref, grids=grids)
    i = r.counts[path.tau] - r.counts[0.0] - path.n
    nu = r.nus[path.tau]
    nu_direct = nu_lagrangian(path.end, j, tol)
    if nu_direct != nu:
        raise IndeterminateError("nu_L disagrees between frame and flow routes",
                                 flow=nu, frame=nu_direct)
    meta = {"grid": int(r.grid_size), "route": "flow"}
    if definite_route and definite_block(path, j):
        d = degeneracy_sum(path, j, tol)
        meta["route"] = "flow+degeneracy"
        meta["degeneracy_sum"] = d
        if d != i:
            raise IndeterminateError("definite-block route disagrees with the flow route",
                                     flow=i, degeneracy=d)
    return IndexPair(int(i), int(nu), ref, meta)


def definite_block(path, j, n_check=65):
    """True when b22 (j=0) or b11 (j=1) of the generator is positive definite on samples."""
    if path.generator is None:
        return False
    n = path.n
    s = slice(n, 2 * n) if j == 0 else slice(0, n)
    for t in np.linspace(0, path.tau, n_check):
        B = np.asarray(path.generator(t))
        if np.linalg.eigvalsh(B[s, s])[0] <= 1e-9:
            return False
    return True


def _block_sv(path, j):
    n = path.n

    def sv(t):
        G = path.at(t)
        blk = G[:n, n:] if j == 0 else G[n:, :n]
        return np.linalg.svd(blk, compute_uv=False) / max(1.0, np.linalg.norm(G, 2))
    return sv


def degeneracy_sum(path, j, tol=DEFAULT.kernel_tol, per_piece=512):
    """Sum over interior times s of nu_Lj(gamma(s)), by locating the zeros of the
    relevant off-diagonal block (upper-right for L0, lower-left for L1)."""
    sv = _block_sv(path, j)
    total = 0
    # crossings exactly at a breakpoint
    for b in path.breakpoints:
        s = sv(b)
        total += int(np.sum(s <= tol))
    for a, b in path.pieces():
        ts = np.linspace(a, b, per_piece + 1)
        smin = np.array([sv(t)[-1] for t in ts])
        cand = [(ts[k - 1], ts[k + 1]) for k in range(1, per_piece)
                if smin[k] <= smin[k - 1] and smin[k] <= smin[k + 1] and smin[k] < 0.1]
        # a crossing inside the first or last cell shows up as a minimum at the edge
        # (a kernel at the edge itself is a breakpoint or endpoint degeneracy, counted elsewhere)
        if tol < smin[0] < min(smin[1], 0.1):
            cand.append((ts[0], ts[1]))
        if tol < smin[-1] < min(smin[-2], 0.1):
            cand.append((ts[-2], ts[-1]))
        for lo, hi in cand:
            res = minimize_scalar(lambda t: sv(t)[-1], bounds=(lo, hi),
                                  method="bounded", options={"xatol": 1e-13 * path.tau})
            t0 = res.x
            if abs(t0 - a) < 1e-9 * path.tau or abs(t0 - b) < 1e-9 * path.tau:
                continue
            s = sv(t0)
            # a transversal crossing is only located to ~1e-13 relative, so the
            # singular value there is small but not at rounding level
            total += int(np.sum(s <= 1e-6))
    return total


# -- splitting numbers -----------------------------------------------------------

def _components(M, tol=1e-12):
    k = half_dim(M)
    coupled = np.zeros((k, k), dtype=bool)
    for a in range(k):
        for b in range(k):
            ia = [a, a + k]
            ib = [b, b + k]
            coupled[a, b] = np.max(np.abs(M[np.ix_(ia, ib)])) > tol
    comp, seen = [], set()
    for a in range(k):
        if a in seen:
            continue
        stack, c = [a], []
        seen.add(a)
        while stack:
            x = stack.pop()
            c.append(x)
            for y in range(k):
                if (coupled[x, y] or coupled[y, x]) and y not in seen:
                    seen.add(y)
                    stack.append(y)
        comp.append(sorted(c))
    return comp


def _submatrix(M, idx):
    k = half_dim(M)
    full = list(idx) + [i + k for i in idx]
    return M[np.ix_(full, full)]


def n2_is_trivial(M, alpha=1e-3):
    """Trivial N2: M R((t-1) alpha)^{diamond 2} has no unit eigenvalue for t in [0, 1)."""
    from .core import diamond
    off = []
    for t in (0.0, 0.5, 0.9):
        P = M @ diamond(rotation((t - 1) * alpha), rotation((t - 1) * alpha), validate=False)
        ev = np.linalg.eigvals(P)
        off.append(np.min(np.abs(np.abs(ev) - 1)))
    return bool(min(off) > 1e-9)


def recognize_normal_forms(M, tol=1e-10):
    """List of (kind, params, indices) when M is a diamond product of basic normal
    forms (coordinate order preserved), else None."""
    M = np.asarray(M, dtype=float)
    out = []
    for idx in _components(M):
        S = _submatrix(M, idx)
        if len(idx) == 1:
            a, b, c, d = S[0, 0], S[0, 1], S[1, 0], S[1, 1]
            if abs(c) < tol and abs(b) < tol and abs(abs(a) - 2) < tol and abs(a * d - 1) < tol:
                out.append(("D", (float(np.sign(a) * 2),), idx))
            elif abs(c) < tol and abs(abs(a) - 1) < tol and abs(a - d) < tol and \
                    min(abs(b - v) for v in (-1, 0, 1)) < tol:
                out.append(("N1", (int(round(a)), int(round(b))), idx))
            elif abs(a - d) < tol and abs(b + c) < tol and abs(a * a + c * c - 1) < tol and abs(c) > tol:
                out.append(("R", (float(np.mod(np.arctan2(c, a), 2 * np.pi)),), idx))
            else:
                return None
        elif len(idx) == 2:
            R1, bb, Z, R2 = S[:2, :2], S[:2, 2:], S[2:, :2], S[2:, 2:]
            th = np.arctan2(R1[1, 0], R1[0, 0])
            if (np.max(np.abs(Z)) < tol and np.max(np.abs(R1 - R2)) < tol
                    and np.max(np.abs(R1 - rotation(th))) < tol and abs(np.sin(th)) > tol
                    and abs(bb[0, 1] - bb[1, 0]) > tol):
                out.append(("N2", (float(np.mod(th, 2 * np.pi)), n2_is_trivial(S)), idx))
            else:
                return None
        else:
            return None
    return out


def _angle_close(a, b, tol=1e-9):
    d = np.mod(a - b + np.pi, 2 * np.pi) - np.pi
    return abs(d) < tol


def table_splitting(forms, omega):
    """Splitting numbers from the basic normal form table, summed over factors."""
    w = np.mod(np.angle(omega), 2 * np.pi)
    sp = sm = 0
    for kind, params, _ in forms:
        if kind == "D":
            continue
        if kind == "N1":
            lam, b = params
            if _angle_close(w, 0.0 if lam == 1 else np.pi):
                bb = b * lam           # N1(lam, b) = lam N1(1, b lam)
                if bb in (1, 0):
                    sp += 1
                    sm += 1
            continue
        if kind == "R":
            (th,) = params
            if _angle_close(w, th):
                sm += 1
            elif _angle_close(w, -th):
                sp += 1
            continue
        if kind == "N2":
            th, trivial = params
            if (_angle_close(w, th) or _angle_close(w, -th)) and not trivial:
                sp += 1
                sm += 1
    return sp, sm


END_ANGLE_FLOOR = 1e-11


def limit_splitting(M, omega, witness=None, eps_list=(1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 1e-4)):
    """S^+- = i_{omega exp(+- i eps)}(witness) - i_omega(witness), stabilized in eps.

    The two smallest admissible eps must agree.  An eps is admissible when it stays below
    the gap to other unit eigenvalues, above the numerical spread of the eigenvalue
    cluster at omega, and keeps every end angle of the shifted problem above
    END_ANGLE_FLOOR (high-order Jordan blocks push those angles like eps^size)."""
    M = np.asarray(M, dtype=float)
    if witness is None:
        witness = witness_path(M)
    elif np.max(np.abs(witness.end - M)) > 1e-8 * max(1, np.max(np.abs(M))):
        raise ValueError("witness path does not end at M")
    omega = complex(omega)
    base = index_omega(witness, omega).i
    # eps must stay below the gap to the next unit eigenvalue
    angs = unit_eigen_angles(M)
    w = np.mod(np.angle(omega), 2 * np.pi)
    gaps = [abs(np.mod(a - w + np.pi, 2 * np.pi) - np.pi) for a in angs]
    gaps = [g for g in gaps if g > 1e-6]
    gap = min(gaps) if gaps else np.inf
    # and well above the numerical spread of a defective eigenvalue (~eps_mach^(1/size))
    ev = np.linalg.eigvals(M)
    near = np.abs(ev - omega)
    spread = float(np.max(near[near < min(1e-2, gap / 2)], initial=0.0))
    eps_list = [e for e in eps_list if 5 * spread < e < gap / 4]
    if len(eps_list) < 2:
        raise IndeterminateError("unit eigenvalues too close for the eps-limit", gap=gap,
                                 spread=spread)
    hist = []
    for eps in eps_list:
        ip = index_omega(witness, omega * np.exp(1j * eps), snap_end=False)
        im = index_omega(witness, omega * np.exp(-1j * eps), snap_end=False)
        if min(ip.meta["end_margin"], im.meta["end_margin"]) < END_ANGLE_FLOOR:
            break
        hist.append((ip.i - base, im.i - base))
    if len(hist) < 2:
        raise IndeterminateError("too few admissible eps for the splitting limit",
                                 gap=gap, spread=spread, history=hist)
    if hist[-1] != hist[-2]:
        raise IndeterminateError("splitting-number limit did not stabilize", history=hist)
    return hist[-1]


def splitting_numbers(M, omega, witness=None, cross_check=True):
    """S_M^+-(omega).  Table route for recognized normal-form products (cross-checked
    against the eps-limit route), eps-limit route otherwise."""
    M = np.asarray(M, dtype=float)
    if not check_symplectic(M, 1e-8):
        raise ValueError("M must be symplectic")
    omega = complex(omega)
    if nu_omega(M, omega) == 0 and not np.any(np.abs(np.linalg.eigvals(M) - omega) < 1e-6):
        # omega is not an eigenvalue: both numbers vanish
        return SplittingPair(omega, 0, 0, "regular")
    forms = recognize_normal_forms(M)
    if forms is not None:
        sp, sm = table_splitting(forms, omega)
        if cross_check:
            lim = limit_splitting(M, omega, witness)
            if lim != (sp, sm):
                raise IndeterminateError("table and limit routes disagree",
                                         table=(sp, sm), limit=lim)
        return SplittingPair(omega, sp, sm, "table")
    sp, sm = limit_splitting(M, omega, witness)
    return SplittingPair(omega, sp, sm, "limit")


# -- iteration ---------------------------------------------------------------------

def lagrangian_iterates(path, j, k_max):
    """[(i_Lj(gamma^k), nu_Lj(gamma^k)) for k = 1..k_max] from one pass over gamma^{k_max}."""
    ref = "L0" if j == 0 else "L1"
    it = brake_iterate(path, k_max)
    marks = [k * path.tau for k in range(1, k_max + 1)]
    marks[-1] = it.tau
    r = _flow(it, ref, marks=marks)
    c0 = r.counts[0.0]
    return [(r.counts[m] - c0 - path.n, r.nus[m]) for m in marks]


def omega_iterates(path, k_max, omega=1.0):
    """[(i(gamma^k), nu(gamma^k)) for k = 1..k_max] (brake iterates, omega-index)."""
    it = brake_iterate(path, k_max)
    marks = [k * path.tau for k in range(1, k_max + 1)]
    marks[-1] = it.tau
    r = _flow(it, complex(omega), marks=marks)
    c0 = r.counts[0.0]
    off = path.n if _is_one(omega) else 0
    return [(r.counts[m] - c0 - off, r.nus[m]) for m in marks]


def mixed_concavity(path):
    """mu_01 = i_L0 - nu_L1 and mu_10 = i_L1 - nu_L0."""
    a = index_lagrangian(path, 0)
    b = index_lagrangian(path, 1)
    return {"mu_01": a.i - b.nu, "mu_10": b.i - a.nu}


def mean_index_L0(path, k_max=32):
    """i_L0(gamma^k)/k at k_max, with |value(k_max) - value(k_max/2)| as error bar."""
    if k_max < 16:
        raise ValueError("k_max must be at least 16")
    seq = lagrangian_iterates(path, 0, k_max)
    est = seq[-1][0] / k_max
    half = seq[k_max // 2 - 1][0] / (k_max // 2)
    err = abs(est - half)
    # i_L0(gamma^k)/k converges at rate O(1/k); a much larger spread is suspicious
    flagged = err > 4 * (path.n + 1) / k_max
    return {"estimate": est, "error": err, "flagged": bool(flagged), "sequence": [s[0] for s in seq]}


def _path_data(path, bound):
    k_max = 2 * bound + 1
    L0 = lagrangian_iterates(path, 0, k_max)
    W = omega_iterates(path, 2 * k_max)
    i1 = index_lagrangian(path, 1)
    M = n_transform(path.end)
    sp = splitting_numbers(M, 1.0).s_plus
    return {"L0": L0, "W": W, "iL1": i1.i, "nuL0": L0[0][1], "iL0": L0[0][0], "S": sp,
            "i2": W[1][0], "nu2": W[1][1], "n": path.n}


def common_index_jump_search(paths, search_bound=64, k_mean=None):
    """All (R, m_1..m_q), 1 <= m_j <= search_bound, satisfying conditions (i)-(iii) of the
    common index jump; each record also says whether (iv)-(vi) hold."""
    data = []
    for p in paths:
        d = _path_data(p, search_bound)
        kk = len(d["L0"])
        if d["L0"][-1][0] / kk <= 0:
            raise ValueError("mean L0-index must be positive for every path")
        data.append(d)

    per_path = []
    for d in data:
        L0, W, n = d["L0"], d["W"], d["n"]
        good = {}
        for m in range(1, search_bound + 1):
            lo, hi = L0[2 * m - 2], L0[2 * m]          # iterates 2m-1, 2m+1
            if lo[1] != d["nuL0"] or hi[1] != d["nuL0"]:
                continue
            R = hi[0] - d["iL0"]
            if lo[0] + lo[1] != R - (d["iL1"] + n + d["S"] - d["nuL0"]):
                continue
            wlo, whi = W[2 * (2 * m - 1) - 1], W[2 * (2 * m + 1) - 1]
            extra = (wlo[1] == d["nu2"] and whi[1] == d["nu2"]
                     and wlo[0] + wlo[1] == 2 * R - (d["i2"] + 2 * d["S"] - d["nu2"])
                     and whi[0] == 2 * R + d["i2"])
            good.setdefault(R, []).append((m, extra))
        per_path.append(good)

    common = set(per_path[0])
    for g in per_path[1:]:
        common &= set(g)
    out = []
    for R in sorted(common):
        for combo in itertools.product(*[g[R] for g in per_path]):
            out.append({"R": R, "m": [c[0] for c in combo],
                        "iv_vi": all(c[1] for c in combo)})
    return out


def _convex_generator(path, n_check=65):
    if path.generator is None:
        return False
    for t in np.linspace(0, path.tau, n_check):
        if np.linalg.eigvalsh(np.asarray(path.generator(t)))[0] <= 1e-9:
            return False
    return True


def iteration_monotonicity_check(path, m_max=8):
    """Both iteration inequalities for L0-indices of a strictly convex path, m < m_max:
    i(m+1) - i(m) >= 1 and i(m+1) > i(m) + nu(m) - 1."""
    if not _convex_generator(path):
        raise ValueError("monotonicity check needs a positive definite generator")
    seq = lagrangian_iterates(path, 0, m_max)
    violations = []
    for m in range(1, m_max):
        (i_m, nu_m), (i_n, _) = seq[m - 1], seq[m]
        if not (i_n - i_m >= 1 and i_n > i_m + nu_m - 1):
            violations.append({"m": m, "i_m": i_m, "nu_m": nu_m, "i_m1": i_n})
    return {"holds": not violations, "sequence": seq, "violations": violations}
