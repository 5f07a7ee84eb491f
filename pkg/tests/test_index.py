import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from brake_index.config import IndeterminateError
from brake_index.core import basic_normal_form, diamond, n2_block, n_transform, rotation
from brake_index.index import (common_index_jump_search, index_lagrangian, index_omega,
                               index_omega_perturbed, iteration_monotonicity_check,
                               lagrangian_iterates, limit_splitting, mean_index_L0,
                               mixed_concavity, n2_is_trivial, omega_iterates, splitting_numbers)
from brake_index.paths import (brake_iterate, constant_path, fundamental_solution, rotation_path,
                               sampled_path, shifted_witness, witness_path)
from oracles import diag_generator, diagonal_indices

weights = st.floats(0.3, 2.5)


@given(st.lists(st.tuples(weights, weights), min_size=1, max_size=3), st.floats(0.2, 7.0))
def test_lagrangian_index_matches_closed_form(ab, tau):
    a, b = zip(*ab)
    path = constant_path(diag_generator(a, b), tau)
    want = diagonal_indices(a, b, tau)["L"]
    assert index_lagrangian(path, 0).as_tuple() == want
    assert index_lagrangian(path, 1).as_tuple() == want


@given(st.lists(st.tuples(weights, weights), min_size=1, max_size=3), st.floats(0.2, 7.0),
       st.sampled_from([0.0, math.pi, 0.9, 2.3, 4.0]))
def test_omega_index_matches_closed_form(ab, tau, phi):
    a, b = zip(*ab)
    path = constant_path(diag_generator(a, b), tau)
    want = diagonal_indices(a, b, tau, phi)["omega"]
    assert index_omega(path, np.exp(1j * phi)).as_tuple() == want


@pytest.mark.parametrize("theta", [math.pi, 2 * math.pi, 3 * math.pi, 4 * math.pi])
def test_degenerate_endpoints_match_closed_form(theta):
    path = rotation_path(2, tau=theta)
    want = diagonal_indices([1, 1], [1, 1], theta)
    assert index_lagrangian(path, 0).as_tuple() == want["L"]
    assert index_omega(path, 1.0).as_tuple() == want["omega"]
    assert index_omega(path, -1.0).as_tuple() == diagonal_indices([1, 1], [1, 1], theta, math.pi)["omega"]


def test_perturbation_route_agrees_at_degenerate_end():
    # i_1 of R(t) on [0, 2 pi] is 1, the eps-perturbed path gives the same
    p = rotation_path(1, tau=2 * math.pi)
    assert index_omega(p, 1.0).i == 1
    assert index_omega_perturbed(p, 1.0) == 1


def test_time_dependent_generator_matches_constant_route():
    B = diag_generator([1.3, 0.7], [0.9, 1.6])
    a = constant_path(B, 3.1)
    b = fundamental_solution(lambda t: B, 3.1, 256)
    assert index_lagrangian(a, 0).as_tuple() == index_lagrangian(b, 0).as_tuple()
    assert index_omega(a, 1.0).as_tuple() == index_omega(b, 1.0).as_tuple()


def test_sampled_path():
    p = rotation_path(1, tau=2.0)
    ts = np.linspace(0, 2.0, 21)
    s = sampled_path(ts, [p.at(t) for t in ts])
    assert index_omega(s, 1.0).as_tuple() == (1, 0)
    assert index_lagrangian(s, 0).as_tuple() == (0, 0)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_rotation_path_values(n):
    p = rotation_path(n)
    assert index_lagrangian(p, 0).as_tuple() == (0, n)
    assert index_lagrangian(p, 1).as_tuple() == (0, n)
    assert index_omega(p, 1.0).as_tuple() == (n, 0)


# -- splitting numbers -----------------------------------------------------------

SPLITTING_TABLE = [
    (("N1", 1, 1), 1.0, (1, 1)),
    (("N1", 1, 0), 1.0, (1, 1)),
    (("N1", 1, -1), 1.0, (0, 0)),
    (("N1", -1, -1), -1.0, (1, 1)),
    (("N1", -1, 0), -1.0, (1, 1)),
    (("N1", -1, 1), -1.0, (0, 0)),
    (("D", 2), 1.0, (0, 0)),
    (("D", -2), -1.0, (0, 0)),
    (("D", 2), np.exp(0.4j), (0, 0)),
]


@pytest.mark.parametrize("form,omega,want", SPLITTING_TABLE)
def test_splitting_table_by_limit(form, omega, want):
    M = basic_normal_form(*form)
    assert limit_splitting(M, omega) == want


@pytest.mark.parametrize("theta", [np.pi / 6, np.pi / 3, np.pi / 2, 2 * np.pi / 3, 5 * np.pi / 6,
                                   7 * np.pi / 6])
def test_splitting_rotation(theta):
    assert limit_splitting(rotation(theta), np.exp(1j * theta)) == (0, 1)
    assert splitting_numbers(rotation(theta), np.exp(1j * theta)).route == "table"


@pytest.mark.parametrize("theta", [np.pi / 3, 4 * np.pi / 3])
@pytest.mark.parametrize("S,trivial", [([[1, 0], [0, 1]], False), ([[-1, 0], [0, -1]], True),
                                       ([[1, 0.5], [0.5, 2]], False), ([[-2, 0.3], [0.3, -1]], True)])
def test_splitting_n2(theta, S, trivial):
    M = basic_normal_form("N2", theta, n2_block(theta, np.array(S, float)))
    assert n2_is_trivial(M) is trivial
    want = (0, 0) if trivial else (1, 1)
    assert limit_splitting(M, np.exp(1j * theta)) == want


def test_splitting_witness_independence():
    M = diamond(basic_normal_form("N1", 1, 1), rotation(2.0))
    for w in (1.0, np.exp(2.0j), np.exp(-2.0j)):
        a = limit_splitting(M, w, witness_path(M))
        b = limit_splitting(M, w, shifted_witness(M, 2))
        assert a == b


def test_splitting_regular_point():
    sp = splitting_numbers(rotation(1.0), np.exp(0.5j))
    assert (sp.s_plus, sp.s_minus, sp.route) == (0, 0, "regular")


def test_splitting_additivity_fixed_product():
    parts = [basic_normal_form("N1", 1, 1), rotation(1.1), basic_normal_form("D", -2)]
    M = diamond(*parts)
    for w in (1.0, -1.0, np.exp(1.1j), np.exp(-1.1j)):
        tot = [limit_splitting(P, w) for P in parts]
        assert limit_splitting(M, w) == (sum(t[0] for t in tot), sum(t[1] for t in tot))


# -- iteration ----------------------------------------------------------------------

def test_brake_iterates_of_rotation():
    # R(t) on [0, k pi]: interior L0 zeros at pi, ..., (k-1) pi
    assert lagrangian_iterates(rotation_path(1), 0, 6) == [(k - 1, 1) for k in range(1, 7)]
    assert lagrangian_iterates(rotation_path(2), 1, 3) == [(2 * (k - 1), 2) for k in range(1, 4)]
    w = omega_iterates(rotation_path(1), 4)
    assert w == [diagonal_indices([1], [1], k * math.pi)["omega"] for k in range(1, 5)]


def test_brake_iterate_matches_direct_path():
    p = constant_path(diag_generator([1.2], [0.8]), 1.7)
    it = brake_iterate(p, 3)
    direct = constant_path(diag_generator([1.2], [0.8]), 3 * 1.7)
    assert np.allclose(it.end, direct.end, atol=1e-10)


def test_bott_type_sums_on_constant_paths():
    rng = np.random.default_rng(3)
    for _ in range(5):
        n = int(rng.integers(1, 4))
        B = diag_generator(rng.uniform(0.4, 2, n), rng.uniform(0.4, 2, n))
        p = constant_path(B, float(rng.uniform(0.5, 4)))
        a, b = index_lagrangian(p, 0), index_lagrangian(p, 1)
        w = index_omega(brake_iterate(p, 2), 1.0)
        assert a.i + b.i == w.i - n and a.nu + b.nu == w.nu


def test_mixed_concavity_rotation():
    assert mixed_concavity(rotation_path(3)) == {"mu_01": -3, "mu_10": -3}


def test_sharp_example_sums():
    for n in range(1, 4):
        p = rotation_path(n)
        S = splitting_numbers(n_transform(p.end), 1.0, witness=brake_iterate(p, 2)).s_plus
        mc = mixed_concavity(p)
        assert S == n and mc["mu_01"] + S == 0 and mc["mu_10"] + S == 0


def test_mean_index_of_rotation():
    # i_L0(R^k) = n (k - 1), so the average tends to n
    r = mean_index_L0(rotation_path(2), 32)
    assert r["estimate"] == pytest.approx(2 * 31 / 32)
    assert not r["flagged"]
    with pytest.raises(ValueError):
        mean_index_L0(rotation_path(1), 8)


def test_common_index_jump_rotation_pair():
    paths = [rotation_path(1), rotation_path(1, speed=2.0)]
    found = common_index_jump_search(paths, 64)
    assert len(found) >= 3
    # recompute (i)-(iii) from closed forms: i_L0(gamma_s^k) = #{j: j pi < s k pi}, nu = 1
    for rec in found[:5]:
        R = rec["R"]
        for s, m in zip((1.0, 2.0), rec["m"]):
            lo = diagonal_indices([s], [s], (2 * m - 1) * math.pi)["L"]
            hi = diagonal_indices([s], [s], (2 * m + 1) * math.pi)["L"]
            base = diagonal_indices([s], [s], math.pi)["L"]
            iL1 = base[0]
            # S^+ of N R^-1 N R = I is 1 per dimension
            assert lo[1] == base[1] and hi[1] == base[1]
            assert lo[0] + lo[1] == R - (iL1 + 1 + 1 - base[1])
            assert hi[0] == R + base[0]


def test_common_index_jump_needs_positive_mean():
    hyper = constant_path(np.diag([1.0, -1.0]), 1.0)
    with pytest.raises(ValueError):
        common_index_jump_search([hyper], 4)


def test_monotonicity_rotation_and_guard():
    assert iteration_monotonicity_check(rotation_path(2), 8)["holds"]
    with pytest.raises(ValueError):
        iteration_monotonicity_check(constant_path(np.diag([1.0, -1.0]), 1.0), 4)


def test_omega_off_circle_rejected():
    with pytest.raises(ValueError):
        index_omega(rotation_path(1), 2.0)


def test_unstable_grid_reports_error():
    # a path that winds far too fast for the sampling grids cannot be certified
    p = constant_path(400.0 * np.eye(2), 1.0)
    with pytest.raises(IndeterminateError):
        index_omega(p, 1.0, grids=(4, 5))


def test_crossing_inside_last_grid_cell():
    # second plane crosses L0 about 2e-6 tau before the end
    a, b = [1.08900483, 1.33887771, 1.58054046], [1.93002761, 0.85472186, 1.43767553]
    tau = 2.936755988345544
    p = constant_path(diag_generator(a, b), tau)
    assert index_lagrangian(p, 0).as_tuple() == diagonal_indices(a, b, tau)["L"] == (3, 0)
