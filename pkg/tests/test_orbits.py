import numpy as np
import pytest

from brake_index.config import ConvergenceError
from brake_index.index import iteration_monotonicity_check, lagrangian_iterates, omega_iterates
from brake_index.orbits import (classify_symmetry, enumerate_brake_orbits, gauge_hamiltonian,
                                half_period_guess, hausdorff, linearized_path,
                                mechanical_hamiltonian, orbit_theorem_checks,
                                quadratic_hamiltonian, resonance_flag, shoot_brake_orbit)


def axis_periods(a):
    # H = |p|^2/2 + sum a_j^2 q_j^2: q_j'' = -2 a_j^2 q_j
    return sorted(2 * np.pi / (np.sqrt(2) * np.asarray(a)))


def _axis_orbit(Ham, j):
    q0 = np.eye(Ham.n)[j]
    return shoot_brake_orbit(Ham, q0, 2 * half_period_guess(Ham, q0))


@pytest.mark.parametrize("a,density", [([1.0, np.sqrt(2)], 64), ([1.0, np.sqrt(2), np.sqrt(3)], 12)])
def test_ellipsoid_count_and_periods(a, density):
    Ham = quadratic_hamiltonian(weights=a)
    en = enumerate_brake_orbits(Ham, grid_density=density)
    assert en.count == len(a) and not en.resonant
    assert np.allclose(sorted(c.period for c in en.classes), axis_periods(a), rtol=0, atol=1e-8)
    assert all(classify_symmetry(c) == "symmetric" for c in en.classes)
    assert sum(en.multiplicity) + len(en.unconverged) > len(a)


def test_axis_orbit_is_a_libration():
    Ham = quadratic_hamiltonian(weights=[1.0, 1.7])
    orb = _axis_orbit(Ham, 1)
    assert abs(orb.period - axis_periods([1.7])[0]) < 1e-8
    # the q1 component stays zero and q2(t) = q2(0) cos(w t)
    w = np.sqrt(2) * 1.7
    assert np.max(np.abs(orb.states[:, 2])) < 1e-9
    assert np.allclose(orb.states[:, 3], orb.states[0, 3] * np.cos(w * orb.times), atol=1e-8)
    assert orb.meta["valid"]


def test_sphere_is_resonant():
    Ham = quadratic_hamiltonian(weights=[1.0, 1.0])
    assert resonance_flag(Ham) is True
    en = enumerate_brake_orbits(Ham, grid_density=8)
    assert en.resonant and en.note
    assert all(abs(c.period - np.pi * np.sqrt(2)) < 1e-8 for c in en.classes)


@pytest.mark.parametrize("alpha", [1.5, 3.0])
def test_gauge_power_orbit(alpha):
    a = np.array([1.0, 1.4])
    Q = np.diag(np.r_[0.5, 0.5, a ** 2])
    Ham = gauge_hamiltonian({"ellipsoid": Q}, alpha)
    assert Ham.form is None
    orb = _axis_orbit(Ham, 0)
    # on {j = 1} the field of j^alpha is alpha/2 times that of j^2
    assert abs(orb.period - axis_periods([a[0]])[0] * 2 / alpha) < 1e-7
    ref = _axis_orbit(quadratic_hamiltonian(weights=a), 0)
    assert hausdorff(orb, ref) < 1e-6


def test_non_even_hamiltonian_rejected():
    Ham = mechanical_hamiltonian(lambda q: float(q @ q + 0.5 * q[0] ** 3),
                                 lambda q: 2 * q + np.r_[1.5 * q[0] ** 2],
                                 lambda q: np.diag(2 + np.r_[3.0 * q[0]]), 1, energy=0.1)
    with pytest.raises(ValueError, match="not even"):
        Ham.validate()
    Ham.validate(require_even=False)


def test_shooting_failure_raises():
    Ham = quadratic_hamiltonian(weights=[1.0, 1.3])
    with pytest.raises(ConvergenceError):
        shoot_brake_orbit(Ham, [0.6, 0.8], 0.05, max_iter=2)


@pytest.mark.parametrize("a", [[1.0, np.sqrt(2)], [1.0, np.sqrt(2), np.sqrt(3)], [0.7, 1.9]])
def test_inequalities_on_ellipsoid_orbits(a):
    Ham = quadratic_hamiltonian(weights=a)
    for j in range(len(a)):
        chk = orbit_theorem_checks(_axis_orbit(Ham, j), Ham)
        assert chk["thm41_L1"] >= 0 and chk["thm41_L0"] >= 0
        assert chk["bott"]


# frequency ratios must be irrational here: a rational ratio makes some iterate degenerate
@pytest.mark.parametrize("a", [[1.0, np.sqrt(2)], [0.75, np.sqrt(3)]])
def test_iterates_of_ellipsoid_orbits(a):
    Ham = quadratic_hamiltonian(weights=a)
    n = len(a)
    for j in range(n):
        g = linearized_path(_axis_orbit(Ham, j), Ham)
        assert iteration_monotonicity_check(g, 8)["holds"]
        L0, L1 = lagrangian_iterates(g, 0, 8), lagrangian_iterates(g, 1, 8)
        W = omega_iterates(g, 16)
        for m in range(1, 9):
            assert L0[m - 1][0] + L1[m - 1][0] == W[2 * m - 1][0] - n
            assert L0[m - 1][1] + L1[m - 1][1] == W[2 * m - 1][1]
