"""Seeded property suites.  Each trial draws its own generator from the master seed,
checks one identity or inequality and returns a record with a reproducer."""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
import time

import numpy as np

from .config import DEFAULT, ConvergenceError, IndeterminateError
from .core import (basic_normal_form, diamond, diamond_all, n2_block, n_transform, random_symmetric)
from .index import (index_lagrangian, index_omega, iteration_monotonicity_check,
                    limit_splitting, recognize_normal_forms, splitting_numbers, table_splitting)
from .paths import (brake_condition_defect, brake_iterate, fundamental_solution,
                    periodic_iterate, shifted_witness)
from .signature import (charpoly_identity_defect, concavity, lemma36_check, lemma37_bound,
                        normal_form_L0L1)
from .normal_form import core_block, random_degenerate

SUITES = ("prop41", "thm41", "lemma36", "lemma37", "lemma38", "splitting", "bott", "claim41")


@dataclass
class SuiteConfig:
    suite: str
    trials: int = None            # None: the suite default
    seed: int = 0
    dims: list = None
    tolerances: dict = field(default_factory=lambda: asdict(DEFAULT))

    def __post_init__(self):
        if self.suite not in SUITES:
            raise ValueError(f"unknown suite {self.suite!r}; choose from {', '.join(SUITES)}")
        if self.trials is None:
            self.trials = DEFAULT_TRIALS[self.suite]
        if self.dims is None:
            self.dims = DEFAULT_DIMS[self.suite]
        if self.trials < 1:
            raise ValueError("trials must be positive")
        self.dims = [int(d) for d in self.dims]
        if not self.dims or min(self.dims) < 1:
            raise ValueError("dims must be positive integers")


DEFAULT_TRIALS = {"prop41": 200, "thm41": 200, "bott": 200, "lemma36": 500, "lemma37": 200,
                  "lemma38": 200, "splitting": 100, "claim41": 100}
DEFAULT_DIMS = {"prop41": [1, 2, 3, 4], "thm41": [1, 2, 3, 4], "bott": [1, 2, 3, 4],
                "lemma36": [1, 2, 3, 4, 5, 6], "lemma37": [1, 2, 3, 4],
                "lemma38": [2, 3, 4], "splitting": [1, 2, 3], "claim41": [1, 2, 3]}


# -- convex-generator corpus ------------------------------------------------------

def convex_generator(rng, n):
    """Parameters of B(s) = S0 + cos(2 pi s / tau) S1 + cos(pi s / tau) S2.

    S0 and S1 are block diagonal (commute with N), S2 is block off-diagonal
    (anticommutes with N).  Then N B(tau - s) N = B(s), so the brake condition holds,
    and S0 dominates so that B(s) is positive definite.  One trial in four is constant
    and one in eight is a resonant harmonic oscillator with a degenerate endpoint."""
    kind = rng.choice(["varying", "varying", "varying", "varying", "varying",
                       "constant", "constant", "resonant"])
    Z = np.zeros((n, n))
    if kind == "resonant":
        w = rng.uniform(0.5, 2.0, n)
        j = int(rng.integers(n))
        tau = np.pi * int(rng.integers(1, 3)) / w[j]
        S0 = np.diag(np.r_[w, w])
        return {"kind": kind, "tau": float(tau), "S0": S0.tolist(),
                "S1": np.zeros((2 * n, 2 * n)).tolist(), "S2": np.zeros((2 * n, 2 * n)).tolist()}
    P = _spd(rng, n)
    Q = _spd(rng, n)
    S0 = np.block([[P, Z], [Z, Q]])
    tau = float(rng.uniform(0.4, 2.5))
    if kind == "constant":
        S1 = S2 = np.zeros((2 * n, 2 * n))
    else:
        S1 = np.block([[random_symmetric(rng, n), Z], [Z, random_symmetric(rng, n)]])
        C = rng.standard_normal((n, n))
        S2 = np.block([[Z, C], [C.T, Z]])
        lo = np.linalg.eigvalsh(S0)[0]
        budget = 0.8 * lo / (np.linalg.norm(S1, 2) + np.linalg.norm(S2, 2))
        a = rng.uniform(0.2, 1.0) * budget
        S1, S2 = a * S1, a * S2
    return {"kind": kind, "tau": tau, "S0": S0.tolist(), "S1": S1.tolist(), "S2": S2.tolist()}


def _spd(rng, n):
    X = rng.standard_normal((n, n))
    w = rng.uniform(0.4, 2.5, n)
    Qm, _ = np.linalg.qr(X)
    return Qm @ np.diag(w) @ Qm.T


def convex_path(params, n_steps=256):
    S0, S1, S2 = (np.asarray(params[k]) for k in ("S0", "S1", "S2"))
    tau = params["tau"]
    if not np.any(S1) and not np.any(S2):
        from .paths import constant_path
        return constant_path(S0, tau)

    def B(s):
        return S0 + np.cos(2 * np.pi * s / tau) * S1 + np.cos(np.pi * s / tau) * S2

    return fundamental_solution(B, tau, n_steps)


def path_record(path, with_splitting=False):
    """Every index the path-level suites compare, computed once."""
    a = index_lagrangian(path, 0)
    b = index_lagrangian(path, 1)
    g2 = brake_iterate(path, 2)
    w1 = index_omega(path, 1.0)
    w2 = index_omega(g2, 1.0)
    rec = {"n": path.n, "iL0": a.i, "nuL0": a.nu, "iL1": b.i, "nuL1": b.nu,
           "i1": w1.i, "nu1": w1.nu, "i2": w2.i, "nu2": w2.nu,
           "mu01": a.i - b.nu, "mu10": b.i - a.nu}
    if with_splitting:
        rec["S_plus_P2"] = splitting_numbers(n_transform(path.end), 1.0, witness=g2).s_plus
    return rec


def _convex_trial(rng, n):
    params = convex_generator(rng, n)
    return params, convex_path(params)


# -- trials -------------------------------------------------------------------------

def trial_prop41(rng, n):
    params, path = _convex_trial(rng, n)
    rec = path_record(path)
    conc = concavity(path)
    rec["half_sgn_neg"] = conc["half_sgn_neg"]
    sum_ok = rec["mu01"] + rec["mu10"] == rec["i2"] - rec["nu2"] - n
    diff_ok = rec["mu01"] - rec["mu10"] == conc["half_sgn_neg"]
    return {"pass": bool(sum_ok and diff_ok), "sum_identity": bool(sum_ok),
            "difference_identity": bool(diff_ok), "record": rec}, params


def trial_thm41(rng, n):
    params, path = _convex_trial(rng, n)
    rec = path_record(path, with_splitting=True)
    defect = brake_condition_defect(path)
    hyp = (rec["iL0"] >= 0 and rec["iL1"] >= 0 and rec["i1"] >= n and defect < 1e-7)
    S = rec["S_plus_P2"]
    v01, v10 = rec["mu01"] + S, rec["mu10"] + S
    ok = (not hyp) or (v01 >= 0 and v10 >= 0)
    return {"pass": bool(ok), "hypotheses": bool(hyp), "mu01_plus_S": v01, "mu10_plus_S": v10,
            "brake_defect": float(defect), "record": rec}, params


def ellipsoid_orbit_path(rng, n):
    """Linearized axis brake orbit of H = |p|^2/2 + sum a_j^2 q_j^2 (closed form: the
    axis-j orbit has frequency sqrt(2) a_j, and H'' = 2Q is constant)."""
    from .paths import constant_path
    a = rng.uniform(0.5, 2.0, n)
    j = int(rng.integers(n))
    Q = np.diag(np.r_[0.5 * np.ones(n), a ** 2])
    half = np.pi / (np.sqrt(2) * a[j])
    return {"weights": a.tolist(), "axis": j}, constant_path(2 * Q, half)


def trial_bott(rng, n):
    """Both Bott-type sums on a corpus path, and the iteration inequalities on a
    linearized ellipsoid brake orbit (the setting where they are claimed)."""
    params, path = _convex_trial(rng, n)
    rec = path_record(path)
    sum_i = rec["iL0"] + rec["iL1"] == rec["i2"] - n
    sum_nu = rec["nuL0"] + rec["nuL1"] == rec["nu2"]
    oparams, opath = ellipsoid_orbit_path(rng, n)
    mono = iteration_monotonicity_check(opath, 8)
    return {"pass": bool(sum_i and sum_nu and mono["holds"]), "index_sum": bool(sum_i),
            "nullity_sum": bool(sum_nu), "monotone": mono["holds"],
            "L0_iterates": mono["sequence"], "violations": mono["violations"],
            "record": rec}, {"corpus": params, "orbit": oparams}


def _sip_jordan(lam):
    """(E, E J) pair for a 2x2 Jordan block J with eigenvalue lam and E = antidiag(1, 1)."""
    E = np.array([[0.0, 1.0], [1.0, 0.0]])
    Jb = np.array([[lam, 1.0], [0.0, lam]])
    return E, E @ Jb


def lemma36_instance(rng, k):
    """(A1, A3, family).  Families:

    pencil: A1 = V^-T E V^-1 and A1 A3 = V^-T E L V^-1 with A3 = V L V^-1, where E is
    a signature matrix with sip blocks and L has negative eigenvalues (with Jordan blocks
    paired to the sip blocks); singular: the same with zero entries in E;
    inverse: A3 = A1^-1 S for random symmetric A1, S, rejected until the spectrum of A3
    lies below -margin."""
    family = rng.choice(["pencil", "singular", "inverse"])
    if family == "inverse":
        kk = min(k, 4)
        for _ in range(20000):
            A1 = random_symmetric(rng, kk)
            if abs(np.linalg.det(A1)) < 1e-2:
                continue
            S = random_symmetric(rng, kk)
            A3 = np.linalg.solve(A1, S)
            ev = np.linalg.eigvals(A3)
            if np.max(np.abs(ev.imag)) < 1e-9 and np.max(ev.real) < -DEFAULT.spec_margin:
                return A1, A3, family
        family = "pencil"
    E = np.zeros((k, k))
    L = np.zeros((k, k))
    i = 0
    while i < k:
        if i + 1 < k and rng.random() < 0.3:
            lam = -rng.uniform(0.1, 3.0)
            e, el = _sip_jordan(lam)
            s = rng.choice([-1.0, 1.0])
            E[i:i + 2, i:i + 2] = s * e
            L[i:i + 2, i:i + 2] = np.array([[lam, 1.0], [0.0, lam]])
            i += 2
        else:
            E[i, i] = rng.choice([-1.0, 1.0] + ([0.0] if family == "singular" else []))
            L[i, i] = -rng.uniform(0.1, 3.0)
            i += 1
    if family == "singular" and np.all(np.abs(np.diag(E)) > 0) and np.all(E[np.triu_indices(k, 1)] == 0):
        E[0, 0] = 0.0
    V = np.eye(k) + 0.4 * rng.standard_normal((k, k))
    while abs(np.linalg.det(V)) < 0.2:
        V = np.eye(k) + 0.4 * rng.standard_normal((k, k))
    Vi = np.linalg.inv(V)
    A1 = Vi.T @ E @ Vi
    A3 = V @ L @ Vi
    return (A1 + A1.T) / 2, A3, family


def trial_lemma36(rng, k):
    A1, A3, family = lemma36_instance(rng, k)
    res = lemma36_check(A1, A3)
    return {"pass": bool(res["holds"]), "sum": res["sum"], "family": family,
            "k": int(A1.shape[0])}, {"A1": A1.tolist(), "A3": A3.tolist()}


def trial_lemma37(rng, k):
    while True:
        A1, A2 = random_symmetric(rng, k), random_symmetric(rng, k)
        if abs(np.linalg.det(A2 @ A1 - np.eye(k))) > 1e-2:
            break
    R = core_block(A1, A2)
    res = lemma37_bound(R)
    defect = charpoly_identity_defect(R)
    ok = res["holds"] and defect <= 1e-8
    return {"pass": bool(ok), "bound": res, "charpoly_defect": defect}, {"R": R.tolist()}


def trial_lemma38(rng, k):
    R = random_degenerate(rng, k)
    rep = normal_form_L0L1(R)
    err = float(np.max(np.abs(rep.reassemble() - R)) / max(1.0, np.max(np.abs(R))))
    inert = (rep.factor_inertia_AC() == rep.inertia_AC and rep.factor_inertia_BD() == rep.inertia_BD)
    iv_ok = True
    iv = None
    if rep.iv is not None:
        iv = {k_: rep.iv[k_] for k_ in ("r", "lam", "p", "q_plus", "q_zero", "q_minus",
                                        "q_sum_ok", "m2_m4", "m1")}
        iv_ok = bool(rep.iv["m2_m4"] and rep.iv["q_sum_ok"] and rep.iv["m1"] is not False)
    ok = err <= 1e-9 and inert and iv_ok
    return {"pass": bool(ok), "case": rep.case, "rank_B": rep.rank_B, "roundtrip_error": err,
            "inertia_preserved": bool(inert), "iv": iv}, {"R": R.tolist()}


def random_normal_form(rng, allow_n2=True):
    """(kind, params, matrix) for a random basic normal form."""
    kinds = ["D", "N1", "R", "R"] + (["N2"] if allow_n2 else [])
    kind = rng.choice(kinds)
    if kind == "D":
        p = (int(rng.choice([2, -2])),)
    elif kind == "N1":
        p = (int(rng.choice([1, -1])), int(rng.choice([-1, 0, 1])))
    elif kind == "R":
        p = (float(rng.uniform(0.2, np.pi - 0.2) + rng.choice([0.0, np.pi])),)
    else:
        th = float(rng.uniform(0.3, np.pi - 0.3) + rng.choice([0.0, np.pi]))
        p = (th, n2_block(th, random_symmetric(rng, 2)).tolist())
    return kind, p, basic_normal_form(kind, *p)


def trial_splitting(rng, n):
    """Additivity over a random diamond product: the product's splitting numbers by the
    eps-limit route equal the sum over the factors' eps-limit values and the table sum."""
    while True:
        parts, size = [], 0
        while size < n:
            kind, p, M = random_normal_form(rng, allow_n2=(n - size >= 2))
            parts.append((kind, p, M))
            size += M.shape[0] // 2
        if size == n:
            break
    M = diamond(*[m for _, _, m in parts])
    omegas = {1.0 + 0j, -1.0 + 0j}
    for kind, p, _ in parts:
        if kind in ("R", "N2"):
            omegas.add(complex(np.exp(1j * p[0])))
            omegas.add(complex(np.exp(-1j * p[0])))
    omegas.add(complex(np.exp(1j * rng.uniform(0.1, 3.0))))
    forms = recognize_normal_forms(M)
    rows, ok = [], forms is not None
    for w in sorted(omegas, key=lambda z: (np.angle(z) % (2 * np.pi))):
        prod = limit_splitting(M, w)
        fac = [limit_splitting(m, w) for _, _, m in parts]
        tot = (sum(f[0] for f in fac), sum(f[1] for f in fac))
        tab = table_splitting(forms, w) if forms is not None else None
        good = prod == tot and (tab is None or tuple(tab) == prod)
        ok = ok and good
        rows.append({"omega_angle": float(np.angle(w) % (2 * np.pi)), "product": list(prod),
                     "factor_sum": list(tot), "table": None if tab is None else list(tab),
                     "ok": bool(good)})
    return {"pass": bool(ok), "factors": [[k, p] for k, p, _ in parts], "omegas": rows}, \
        {"factors": [[k, p] for k, p, _ in parts]}


CLAIM_BLOCKS = {
    "I": np.eye(2), "N1(1,1)": basic_normal_form("N1", 1, 1),
    "N1(1,-1)": basic_normal_form("N1", 1, -1), "-I": -np.eye(2),
    "N1(-1,1)": basic_normal_form("N1", -1, 1), "N1(-1,-1)": basic_normal_form("N1", -1, -1),
    "D(2)": basic_normal_form("D", 2), "D(-2)": basic_normal_form("D", -2),
}


def trial_claim41(rng, n):
    """P is a diamond product of 2x2 normal forms; gamma joins I to P with full turns
    prepended until i(gamma) >= n, and gamma^2 is its periodic iterate.  Squaring sends
    N1(1,1) and N1(-1,-1) to N1(1,1) classes and D(+-2) to D(2) classes, which gives p1, p2."""
    names = []
    mats = []
    for _ in range(n):
        if rng.random() < 0.25:
            th = float(rng.uniform(0.2, np.pi - 0.2) + rng.choice([0.0, np.pi]))
            names.append(f"R({th:.17g})")
            mats.append(basic_normal_form("R", th))
        else:
            key = str(rng.choice(list(CLAIM_BLOCKS)))
            names.append(key)
            mats.append(CLAIM_BLOCKS[key])
    P = diamond(*mats)
    p1 = sum(nm in ("N1(1,1)", "N1(-1,-1)") for nm in names)
    p2 = sum(nm in ("D(2)", "D(-2)") for nm in names)
    loops = 1
    while True:
        gamma = shifted_witness(P, loops)
        i1 = index_omega(gamma, 1.0)
        if i1.i >= n or loops > 4:
            break
        loops += 1
    g2 = periodic_iterate(gamma, 2)
    w2 = index_omega(g2, 1.0)
    S = splitting_numbers(P @ P, 1.0, witness=g2).s_plus
    lhs = w2.i + 2 * S - w2.nu
    ok = i1.i >= n and lhs >= n + p1 + p2
    return {"pass": bool(ok), "blocks": names, "p1": p1, "p2": p2, "loops": loops,
            "i1": i1.i, "i2": w2.i, "nu2": w2.nu, "S_plus_P2": S, "lhs": lhs,
            "rhs": n + p1 + p2}, {"blocks": names, "loops": loops}


TRIALS = {"prop41": trial_prop41, "thm41": trial_thm41, "bott": trial_bott,
          "lemma36": trial_lemma36, "lemma37": trial_lemma37, "lemma38": trial_lemma38,
          "splitting": trial_splitting, "claim41": trial_claim41}


def _run_one(args):
    suite, idx, seed_seq, dim, tolerances, master_seed = args
    rng = np.random.default_rng(seed_seq)
    t0 = time.perf_counter()
    try:
        result, inputs = TRIALS[suite](rng, dim)
        status = "pass" if result.pop("pass") else "fail"
    except IndeterminateError as e:
        result, inputs, status = {"error": str(e), "detail": _jsonable(e.detail)}, None, "indeterminate"
    except ConvergenceError as e:
        result, inputs, status = {"error": str(e), "detail": _jsonable(e.detail)}, None, "no_convergence"
    rec = {"trial": idx, "dim": dim, "status": status, "result": _jsonable(result)}
    if status != "pass":
        rec["reproducer"] = {"suite": suite, "trial": idx, "seed": master_seed,
                             "spawn_key": list(seed_seq.spawn_key), "dim": dim,
                             "tolerances": tolerances, "input": _jsonable(inputs)}
    return rec, time.perf_counter() - t0


def _jsonable(o):
    from .io import _plain
    return _plain(o)


def run_suite(config, jobs=1):
    """Run every trial; records are ordered by trial index whatever the completion order.
    Timing stays out of the report so that equal configs give identical bytes."""
    seeds = np.random.SeedSequence(config.seed).spawn(config.trials)
    args = [(config.suite, i, seeds[i], config.dims[i % len(config.dims)],
             config.tolerances, config.seed) for i in range(config.trials)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            out = list(ex.map(_run_one, args, chunksize=max(1, config.trials // (4 * jobs))))
    else:
        out = [_run_one(a) for a in args]
    records = [r for r, _ in out]
    counts = {s: sum(r["status"] == s for r in records)
              for s in ("pass", "fail", "indeterminate", "no_convergence")}
    return {"suite": config.suite, "trials": config.trials, "seed": config.seed,
            "dims": config.dims, "tolerances": config.tolerances, "counts": counts,
            "all_pass": counts["pass"] == config.trials, "records": records}, \
        float(sum(t for _, t in out))
