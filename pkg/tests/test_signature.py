import numpy as np
import pytest
from hypothesis import given, strategies as st

from brake_index.config import IndeterminateError
from brake_index.core import (block_diag_symplectic, diamond, random_symmetric, random_symplectic,
                              rotation)
from brake_index.normal_form import core_block
from brake_index.paths import rotation_path
from brake_index.signature import (charpoly_identity_defect, concavity, lemma33_bounds,
                                   lemma36_check, lemma37_bound, m_epsilon, signature_small_eps)
from brake_index.suites import convex_generator, convex_path, lemma36_instance

seeds = st.integers(0, 2 ** 32 - 1)
THETAS = [np.pi / 6, np.pi / 3, np.pi / 2, 2 * np.pi / 3, 5 * np.pi / 6, 7 * np.pi / 6]


@pytest.mark.parametrize("theta", THETAS)
def test_rotation_signature_vanishes(theta):
    assert signature_small_eps(rotation(theta), +1) == 0
    assert signature_small_eps(rotation(theta), -1) == 0


@pytest.mark.parametrize("a", [0.5, -0.5, 2.0, -2.0])
def test_hyperbolic_signature_vanishes(a):
    P = np.diag([a, 1 / a])
    assert signature_small_eps(P, +1) == 0 and signature_small_eps(P, -1) == 0


@pytest.mark.parametrize("b", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("sign", [1.0, -1.0])
def test_shear_signatures(b, sign):
    def sg(M):
        return signature_small_eps(sign * np.array(M, float), +1)
    assert sg([[1, b], [0, 1]]) == 0
    assert sg([[1, 0], [-b, 1]]) == 0
    assert sg([[1, -b], [0, 1]]) == 2
    assert sg([[1, 0], [b, 1]]) == -2


@given(seeds, st.integers(1, 2), st.integers(1, 2), st.sampled_from([0.3, -0.3, 0.0]))
def test_m_eps_additive_under_diamond(seed, k1, k2, eps):
    rng = np.random.default_rng(seed)
    P1, P2 = random_symplectic(rng, k1, 0.5), random_symplectic(rng, k2, 0.5)
    M = m_epsilon(diamond(P1, P2), eps).matrix
    a, b = m_epsilon(P1, eps).matrix, m_epsilon(P2, eps).matrix
    idx1 = np.r_[0:k1, k1 + k2:2 * k1 + k2]
    idx2 = np.r_[k1:k1 + k2, 2 * k1 + k2:2 * (k1 + k2)]
    assert np.allclose(M[np.ix_(idx1, idx1)], a) and np.allclose(M[np.ix_(idx2, idx2)], b)
    assert np.allclose(M[np.ix_(idx1, idx2)], 0)


def test_m0_of_identity_is_zero():
    assert np.allclose(m_epsilon(np.eye(6), 0.0).matrix, 0)


@given(seeds, st.integers(1, 3))
def test_m0_of_core_block(seed, k):
    rng = np.random.default_rng(seed)
    A1, A2 = random_symmetric(rng, k), random_symmetric(rng, k)
    R = core_block(A1, A2)
    A3 = A2 @ A1 - np.eye(k)
    want = -2 * np.block([[A1 @ A3, A3.T], [A3, A2]])
    assert np.allclose(m_epsilon(R, 0.0).matrix, want)


@given(seeds, st.integers(1, 3))
def test_signature_invariant_under_block_transforms(seed, k):
    rng = np.random.default_rng(seed)
    R = random_symplectic(rng, k, 0.5)
    Q1 = np.eye(k) + 0.3 * rng.standard_normal((k, k))
    Q2 = np.eye(k) + 0.3 * rng.standard_normal((k, k))
    for Q in (Q1, Q2):
        if np.linalg.det(Q) < 0:
            Q[0] *= -1
    T = block_diag_symplectic(Q1) @ R @ block_diag_symplectic(Q2)
    for side in (+1, -1):
        try:
            a, b = signature_small_eps(R, side), signature_small_eps(T, side)
        except IndeterminateError:
            continue
        assert a == b


@given(seeds, st.integers(1, 3))
def test_signature_bounds_hold(seed, k):
    R = random_symplectic(np.random.default_rng(seed), k, 0.7)
    try:
        res = lemma33_bounds(R)
    except IndeterminateError:
        return
    assert res["holds"]


@given(seeds, st.integers(1, 5))
def test_sign_sum_vanishes_for_negative_spectrum(seed, k):
    A1, A3, _ = lemma36_instance(np.random.default_rng(seed), k)
    assert lemma36_check(A1, A3)["holds"]


def test_sign_sum_small_cases():
    assert lemma36_check([[2.0]], [[-0.5]])["sum"] == 0
    assert lemma36_check(np.eye(3), -np.eye(3))["sum"] == 0
    with pytest.raises(ValueError):
        lemma36_check(np.eye(2), np.eye(2))
    with pytest.raises(ValueError):
        lemma36_check([[1.0, 2], [0, 1]], -np.eye(2))


@given(seeds, st.integers(1, 4))
def test_core_block_bound_and_charpoly(seed, k):
    rng = np.random.default_rng(seed)
    A1, A2 = random_symmetric(rng, k), random_symmetric(rng, k)
    if abs(np.linalg.det(A2 @ A1 - np.eye(k))) < 1e-2:
        return
    R = core_block(A1, A2)
    assert lemma37_bound(R)["holds"]
    assert charpoly_identity_defect(R) < 1e-8


def test_core_block_with_zero_a1():
    # A1 = 0 gives A3 = -I, so N R^-1 N R has spectrum {-1} only: m = k forces sgn 0
    k = 2
    R = core_block(np.zeros((k, k)), np.diag([1.0, -2.0]))
    res = lemma37_bound(R)
    assert res["holds"] and res["m"] == k
    assert res["half_sgn_by_side"] == {"pos": 0, "neg": 0, "zero": 0}
    with pytest.raises(ValueError):
        lemma37_bound(core_block(np.eye(2), np.eye(2)))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_concavity_of_rotation(n):
    c = concavity(rotation_path(n))
    assert c["concav"] == 0 and c["concav_star"] == 0


@given(seeds, st.integers(1, 3))
def test_concavity_routes_agree_on_convex_paths(seed, n):
    path = convex_path(convex_generator(np.random.default_rng(seed), n), n_steps=128)
    try:
        c = concavity(path)
    except IndeterminateError:
        return
    assert 2 * c["half_sgn_pos"] == 2 * c["concav"]
