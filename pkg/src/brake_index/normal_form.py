"""(L0, L1)-normal forms of degenerate symplectic matrices.

Two matrices are (L0, L1)-equivalent (written ~) when R = P1 M P2 with
P = diag(Q, Q^{-T}) and det Q > 0.  Such transforms act on A^T C and B^T D by
congruence, so their inertia triples are invariants.  ``normal_form_L0L1`` reduces R
by explicit eliminations according to rank B = r and rank A3 (the lower-left r x r
block after the rank reduction), and reports the factors, the witnesses and the
inertia data.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import null_space

from .config import DEFAULT, IndeterminateError
from .core import (InertiaTriple, approx_invariants, basic_normal_form, blocks,
                   block_diag_symplectic, diamond, diamond_all, diamond_power, from_blocks,
                   half_dim, inertia, n_transform, nu_omega, require_symplectic)

TAGS = ("rank_r_core", "diag_complement", "invertible_A3_core", "lemma38_iv_product")


@dataclass
class NormalFormReport:
    factors: list                 # [(matrix, tag), ...] in diamond order
    witness_transforms: tuple     # (P1, P2) with R = P1 (diamond of factors) P2
    inertia_AC: InertiaTriple
    inertia_BD: InertiaTriple
    case: str
    rank_B: int
    rank_A3: int = None
    iv: dict = None               # data of the A3 = 0 reduction, when present
    approx_classes: list = field(default_factory=list)
    tol: dict = field(default_factory=dict)

    def reassemble(self):
        P1, P2 = self.witness_transforms
        return P1 @ diamond_all([M for M, _ in self.factors]) @ P2

    def factor_inertia_AC(self):
        tot = InertiaTriple(0, 0, 0)
        for M, _ in self.factors:
            A, _, C, _ = blocks(M)
            tot = tot + inertia(_sym(A.T @ C))
        return tot

    def factor_inertia_BD(self):
        tot = InertiaTriple(0, 0, 0)
        for M, _ in self.factors:
            _, B, _, D = blocks(M)
            tot = tot + inertia(_sym(B.T @ D))
        return tot


def _sym(S):
    return (S + S.T) / 2


def numerical_rank(X, tol=DEFAULT.rank_tol, what="matrix"):
    """Rank with singular values below tol * sigma_max counted as zero; a singular value
    inside [tol/10, 10 tol] (relative) makes the rank indeterminate."""
    X = np.asarray(X, dtype=float)
    if X.size == 0:
        return 0
    s = np.linalg.svd(X, compute_uv=False)
    scale = max(1.0, s[0])
    a = s / scale
    band = (a > tol / 10) & (a <= tol * 10)
    if np.any(band):
        lo = int(np.sum(a > tol * 10))
        raise IndeterminateError(f"indeterminate branch: rank of {what}",
                                 candidates=[lo, lo + int(np.sum(band))],
                                 singular_values=s.tolist())
    return int(np.sum(a > tol))


class _Reducer:
    """Holds M with R = diag(Q1, Q1^{-T}) M diag(Q2, Q2^{-T})."""

    def __init__(self, R):
        self.M = R.copy()
        k = half_dim(R)
        self.Q1 = np.eye(k)
        self.Q2 = np.eye(k)

    def apply(self, L=None, Rt=None):
        """M <- diag(L, L^{-T}) M diag(Rt, Rt^{-T})."""
        k = self.Q1.shape[0]
        if L is not None:
            if np.linalg.det(L) <= 0:
                raise ValueError("left transform must have det > 0")
            self.M = block_diag_symplectic(L) @ self.M
            self.Q1 = self.Q1 @ np.linalg.inv(L)
        if Rt is not None:
            if np.linalg.det(Rt) <= 0:
                raise ValueError("right transform must have det > 0")
            self.M = self.M @ block_diag_symplectic(Rt)
            self.Q2 = np.linalg.inv(Rt) @ self.Q2
        assert self.Q1.shape == (k, k)

    def witnesses(self):
        return block_diag_symplectic(self.Q1), block_diag_symplectic(self.Q2)


def _flip_last_column(X):
    X = X.copy()
    X[:, -1] *= -1
    return X


def _positive(X):
    return X if np.linalg.det(X) > 0 else _flip_last_column(X)


def _require_zero(X, what, tol):
    if X.size and np.max(np.abs(X)) > tol:
        raise IndeterminateError(f"elimination left a nonzero {what}",
                                 residual=float(np.max(np.abs(X))))


def _reduce_rank(red, r):
    """Bring B to diag(I_r, 0) with an SVD."""
    A, B, C, D = blocks(red.M)
    k = B.shape[0]
    U, s, Vt = np.linalg.svd(B)
    # columns beyond r pair with zero singular values, so sign flips there keep B
    U = _positive(U)
    V = _positive(Vt.T)
    scale = np.ones(k)
    scale[:r] = s[:r]
    red.apply(L=np.diag(1 / scale) @ U.T, Rt=V)


def _split_zero_eigen(A3, tol):
    """Invertible S (det > 0) with S^{-1} A3 S = diag(Lam, 0); requires the zero eigenvalue
    to be semisimple."""
    r = A3.shape[0]
    lam = numerical_rank(A3, tol, "A3")
    Ur, _, _ = np.linalg.svd(A3)
    rng_basis = Ur[:, :lam]
    ker = null_space(A3, rcond=tol)
    if ker.shape[1] != r - lam:
        raise IndeterminateError("kernel dimension of A3 disagrees with its rank",
                                 rank=lam, kernel=ker.shape[1])
    S = np.hstack([rng_basis, ker])
    s = np.linalg.svd(S, compute_uv=False)
    if s[-1] < 1e-6:
        raise IndeterminateError("A3 has a nilpotent part at 0; the partial-rank split "
                                 "needs a semisimple zero eigenvalue",
                                 smallest_singular_value=float(s[-1]), rank=lam)
    return _positive(S), lam


def _decouple(red, lam, tol):
    """Split off the leading lam coordinates, whose lower-left block Lam is invertible."""
    k = red.Q1.shape[0]
    A, B, C, D = blocks(red.M)
    a = slice(0, lam)
    Lam = C[a, a]
    X = np.zeros((k, k))
    X[a, lam:] = -np.linalg.solve(Lam, C[a, lam:])
    red.apply(Rt=np.eye(k) + X)
    A, B, C, D = blocks(red.M)
    # A[rest, rest] is invertible: its diagonal blocks pair with identities of D
    rest = slice(lam, k)
    Y = np.zeros((k, k))
    Arr = A[rest, rest]
    Y[a, rest] = -A[a, rest] @ np.linalg.inv(Arr)
    red.apply(L=np.eye(k) + Y)
    A, B, C, D = blocks(red.M)
    for name, X in zip("ABCD", (A, B, C, D)):
        _require_zero(X[a, rest], f"{name} coupling block", tol)
        _require_zero(X[rest, a], f"{name} coupling block", tol)


def _kernel_congruence_U4(B3, W, lam, route):
    """U4 = K^T W K for a basis K of ker B3: the block left after the identity-paired
    rows and columns have been eliminated from [[0, B3], [B3^T, W]]."""
    r, m = B3.shape
    if route == "svd":
        # G1 B3 G2 = diag(I_lam, 0), then Schur eliminations clear U1 and U2
        U, s, Vt = np.linalg.svd(B3)
        G2 = Vt.T.copy()
        G2[:, :lam] /= s[:lam]
        Uf = G2.T @ W @ G2
        F = np.zeros((r, m))
        F[:lam, :lam] = np.eye(lam)
        big = np.block([[np.zeros((r, r)), F], [F.T, Uf]])
        low = np.eye(r + m)
        low[r:r + lam, :lam] = -Uf[:lam, :lam] / 2
        low[r + lam:, :lam] = -Uf[lam:, :lam]
        red = low @ big @ low.T
        target = big.copy()
        target[r:, r:] = 0
        target[r + lam:, r + lam:] = red[r + lam:, r + lam:]
        _require_zero(red - target, "cross term after elimination",
                      1e-8 * max(1.0, np.max(np.abs(Uf))))
        return _sym(red[r + lam:, r + lam:])
    K = null_space(B3, rcond=1e-10) if lam else np.eye(m)
    # an unrelated change of kernel basis, so the two routes share no frame
    T = np.eye(K.shape[1]) + 0.3 * np.tril(np.ones((K.shape[1], K.shape[1])), -1)
    K = K @ T
    return _sym(K.T @ W @ K)


def iv_data(M, r, tol=DEFAULT.rank_tol, check_m1=True):
    """Invariants of a reduced matrix with B = diag(I_r, 0) and zero A3 block."""
    k = half_dim(M)
    A, B, C, D = blocks(M)
    A1, A2 = A[:r, :r], D[:r, :r]
    scale = max(1.0, np.max(np.abs(M)))
    _require_zero(A1 - A1.T, "asymmetry of A1", 1e-8 * scale)
    _require_zero(A2 - A2.T, "asymmetry of A2", 1e-8 * scale)
    _require_zero(A1 @ A2 - np.eye(r), "A1 A2 - I", 1e-8 * scale ** 2)
    B1, D1 = A[:r, r:], A[r:, r:]
    B3, D3 = C[:r, r:], C[r:, r:]
    lam = numerical_rank(B3, tol, "B3")
    W = _sym(B1.T @ B3 + D1.T @ D3)
    qa = inertia(_kernel_congruence_U4(B3, W, lam, "svd"))
    qb = inertia(_kernel_congruence_U4(B3, W, lam, "kernel"))
    if qa != qb:
        raise IndeterminateError("elimination orders give different inertia of U4",
                                 svd=qa.as_tuple(), kernel=qb.as_tuple())
    p = inertia(_sym(A1)).m_plus
    ac = inertia(_sym(A.T @ C))
    m24 = (ac.m_plus == lam + qa.m_plus and ac.m_zero == r - lam + qa.m_zero
           and ac.m_minus == lam + qa.m_minus)
    out = {"r": r, "lam": lam, "p": p, "q_plus": qa.m_plus, "q_zero": qa.m_zero,
           "q_minus": qa.m_minus, "q_sum_ok": qa.m_plus + qa.m_zero + qa.m_minus == k - r - lam,
           "inertia_AC": ac.as_tuple(), "m2_m4": bool(m24), "m1": None}
    if check_m1:
        expected = iv_expected_product(r, p, lam, qa)
        T = n_transform(M)
        out["m1_nu"] = nu_omega(T, 1.0) == nu_omega(expected, 1.0)
        # Jordan blocks at 1 split by ~eps^(1/size) numerically; the limit route may abstain
        out["m1_splitting"] = approx_invariants(T).matches(approx_invariants(expected))
        out["m1"] = bool(out["m1_nu"] and out["m1_splitting"] is not False)
    return out


def iv_expected_product(r, p, lam, q):
    """N1(1,1)^{p+q-} <> N1(1,-1)^{r-p+q+} <> I_2^{q0} <> D(2)^{lam}."""
    parts = [diamond_power(basic_normal_form("N1", 1, 1), p + q.m_minus),
             diamond_power(basic_normal_form("N1", 1, -1), r - p + q.m_plus),
             diamond_power(np.eye(2), q.m_zero),
             diamond_power(basic_normal_form("D", 2), lam)]
    return diamond_all(parts)


def _classify_2x2(M):
    """Homotopy class of a lower-triangular 2 x 2 factor [[e, 0], [e w, e]]."""
    e, w = M[0, 0], M[1, 0] / M[0, 0]
    if abs(w) <= 1e-10:
        return "I2" if e > 0 else "-I2"
    sign = 1 if e > 0 else -1
    return f"N1({sign},{1 if w * sign < 0 else -1})"


def _b_zero(red, tol):
    """B = 0: A D^T = I and A^T C symmetric, reduce to 1 x 1 lower-triangular factors."""
    A, B, C, D = blocks(red.M)
    k = A.shape[0]
    W = _sym(A.T @ C)
    _, V = np.linalg.eigh(W)
    V = _positive(V)
    AV = A @ V
    E = np.eye(k)
    if np.linalg.det(AV) < 0:
        E[0, 0] = -1
    # R = diag(Q1, .) M diag(Q2, .) with Q1 = A V E and Q2 = V^T
    red.apply(L=np.linalg.inv(AV @ E), Rt=V)
    return [(red.M[np.ix_([i, k + i], [i, k + i])], "diag_complement") for i in range(k)]


def normal_form_L0L1(R, tol=DEFAULT.rank_tol, check_m1=True, roundtrip_tol=1e-9):
    R = require_symplectic(R, 1e-8)
    k = half_dim(R)
    A, B, C, D = blocks(R)
    ac = inertia(_sym(A.T @ C))
    bd = inertia(_sym(B.T @ D))
    r = numerical_rank(B, tol, "B")
    red = _Reducer(R)
    elim_tol = 1e-7 * max(1.0, np.max(np.abs(R))) ** 2
    iv = None
    rank_a3 = None
    if r == 0:
        case = "B=0"
        factors = _b_zero(red, tol)
        Mf = diamond(*[f for f, _ in factors], validate=False)
        _require_zero(red.M - Mf, "off-diagonal entry", elim_tol)
    elif r == k:
        case = "B invertible"
        U = B
        E = np.eye(k)
        if np.linalg.det(U) < 0:
            E[0, 0] = -1
        # det-positive transforms cannot change the sign of det B, so B -> E
        red.apply(L=np.linalg.inv(U @ E))
        factors = [(red.M.copy(), "rank_r_core")]
    else:
        _reduce_rank(red, r)
        A, B, C, D = blocks(red.M)
        # symplecticity forces these blocks to vanish in the reduced form
        _require_zero(A[r:, :r], "lower-left block of A", elim_tol)
        _require_zero(D[:r, r:], "upper-right block of D", elim_tol)
        A3 = C[:r, :r]
        rank_a3 = numerical_rank(A3, tol, "A3")
        if rank_a3 == 0:
            case = "iv"
            iv = iv_data(red.M, r, tol, check_m1)
            factors = [(red.M.copy(), "lemma38_iv_product")]
        else:
            if rank_a3 < r:
                S, lam = _split_zero_eigen(A3, tol)
                Sr = np.eye(k)
                Sr[:r, :r] = S
                # A3 -> S^{-1} A3 S keeps B = diag(I_r, 0)
                Ls = np.eye(k)
                Ls[:r, :r] = S.T
                red.apply(L=Ls, Rt=Sr)
                _require_zero(blocks(red.M)[2][:r, :r][:, lam:], "zero part of A3", elim_tol)
                case = "iii"
            else:
                lam = r
                case = "ii"
            _decouple(red, lam, elim_tol)
            core, rest = _split(red.M, lam)
            factors = [(core, "invertible_A3_core")]
            if case == "ii":
                factors.append((rest, "diag_complement"))
            else:
                iv = iv_data(rest, r - lam, tol, check_m1)
                factors.append((rest, "lemma38_iv_product"))
    P1, P2 = red.witnesses()
    rep = NormalFormReport(factors=factors, witness_transforms=(P1, P2), inertia_AC=ac,
                           inertia_BD=bd, case=case, rank_B=r, rank_A3=rank_a3, iv=iv,
                           tol={"rank_tol": tol, "roundtrip_tol": roundtrip_tol})
    if case == "B=0":
        rep.approx_classes = [_classify_2x2(M) for M, _ in factors]
    err = np.max(np.abs(rep.reassemble() - R))
    if err > roundtrip_tol * max(1.0, np.max(np.abs(R))):
        raise IndeterminateError("normal form does not reproduce the input", error=float(err))
    return rep


def _split(M, lam):
    k = half_dim(M)
    idx_a = np.r_[0:lam, k:k + lam]
    idx_b = np.r_[lam:k, k + lam:2 * k]
    return M[np.ix_(idx_a, idx_a)], M[np.ix_(idx_b, idx_b)]


# -- generators -----------------------------------------------------------------

def _well_conditioned(rng, k, spread=0.5):
    """Random Q with det Q > 0 and modest condition number."""
    Q, _ = np.linalg.qr(rng.standard_normal((k, k)))
    Q = _positive(Q)
    return Q @ np.diag(np.exp(rng.uniform(-spread, spread, k)))


def core_block(A1, A2):
    """[[A1, I], [A2 A1 - I, A2]] for symmetric A1, A2."""
    r = A1.shape[0]
    return from_blocks(A1, np.eye(r), A2 @ A1 - np.eye(r), A2)


def b_zero_block(A, S):
    """[[A, 0], [A^{-T} S, A^{-T}]] for invertible A and symmetric S."""
    Ait = np.linalg.inv(A).T
    return from_blocks(A, np.zeros_like(A), Ait @ S, Ait)


def iv_block(A1, E, S12, S22):
    """A3 = 0 instance: ([[A1, I], [0, A1^{-1}]] <> diag(E, E^{-T})) times [[I, 0], [S, I]]
    with S = [[0, S12], [S12^T, S22]]."""
    r = A1.shape[0]
    m = E.shape[0]
    X = diamond(from_blocks(A1, np.eye(r), np.zeros((r, r)), np.linalg.inv(A1)),
                block_diag_symplectic(E), validate=False)
    S = np.zeros((r + m, r + m))
    S[:r, r:] = S12
    S[r:, :r] = S12.T
    S[r:, r:] = S22
    k = r + m
    Lw = from_blocks(np.eye(k), np.zeros((k, k)), S, np.eye(k))
    return X @ Lw


def _sym_invertible(rng, m, margin=0.3):
    O, _ = np.linalg.qr(rng.standard_normal((m, m)))
    d = rng.choice([-1, 1], m) * rng.uniform(margin, 2.0, m)
    return O @ np.diag(d) @ O.T


def _rank_matrix(rng, rows, cols, rank):
    return rng.standard_normal((rows, rank)) @ rng.standard_normal((rank, cols)) if rank else np.zeros((rows, cols))


def random_degenerate(rng, k, case=None):
    """Random symplectic matrix with rank B < k, conjugated by random witnesses.

    case in {'B=0', 'ii', 'iii', 'iv', 'generic'}; 'generic' multiplies shears so that the
    branch is decided by the reduction itself."""
    if case is None:
        case = rng.choice(["B=0", "ii", "iii", "iv", "generic"] if k > 1 else ["B=0", "generic"])
    if case == "B=0":
        M = b_zero_block(_well_conditioned(rng, k), _sym(rng.standard_normal((k, k))))
    elif case == "generic":
        r = int(rng.integers(1, k)) if k > 1 else 0
        G = rng.standard_normal((k, r))
        T = G @ np.diag(rng.choice([-1.0, 1.0], r)) @ G.T
        S1, S2 = _sym(rng.standard_normal((k, k))), _sym(rng.standard_normal((k, k)))
        Z, I = np.zeros((k, k)), np.eye(k)
        M = from_blocks(I, Z, S1 / 2, I) @ from_blocks(I, T, Z, I) @ from_blocks(I, Z, S2 / 2, I)
    else:
        if k < 2:
            raise ValueError("cases ii-iv need k >= 2")
        r = int(rng.integers(1, k))
        m = k - r
        if case == "ii":
            core = core_block(_sym(rng.standard_normal((r, r))), _sym(rng.standard_normal((r, r))))
            while abs(np.linalg.det(blocks(core)[2])) < 0.1:
                core = core_block(_sym(rng.standard_normal((r, r))),
                                  _sym(rng.standard_normal((r, r))))
            rest = b_zero_block(_well_conditioned(rng, m), _sym(rng.standard_normal((m, m))))
            M = diamond(core, rest, validate=False)
        else:
            lam_core = 0
            if case == "iii":
                if r < 2:
                    r, m = (2, k - 2) if k > 2 else (1, k - 1)
                if r < 2:
                    return random_degenerate(rng, k, "iv")
                lam_core = int(rng.integers(1, r))
            rr = r - lam_core
            lam = int(rng.integers(0, min(rr, m) + 1))
            A1 = _sym_invertible(rng, rr)
            iv = iv_block(A1, _well_conditioned(rng, m), _rank_matrix(rng, rr, m, lam),
                          _sym(rng.standard_normal((m, m))))
            if lam_core:
                core = core_block(_sym(rng.standard_normal((lam_core, lam_core))),
                                  _sym(rng.standard_normal((lam_core, lam_core))))
                while abs(np.linalg.det(blocks(core)[2])) < 0.1:
                    core = core_block(_sym(rng.standard_normal((lam_core, lam_core))),
                                      _sym(rng.standard_normal((lam_core, lam_core))))
                M = diamond(core, iv, validate=False)
            else:
                M = iv
    P1 = block_diag_symplectic(_well_conditioned(rng, k))
    P2 = block_diag_symplectic(_well_conditioned(rng, k))
    return P1 @ M @ P2
