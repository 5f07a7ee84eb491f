"""Acceptance criteria 1-10, one PASS/FAIL line each.

Run under pytest (lines are printed even without -s) or directly:
    python3 tests/test_acceptance.py
"""

import functools
import math
import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from brake_index.core import basic_normal_form, n2_block, n_transform, rotation  # noqa: E402
from brake_index.index import (common_index_jump_search, index_lagrangian, index_omega,  # noqa: E402
                               iteration_monotonicity_check, lagrangian_iterates,
                               limit_splitting, mixed_concavity, omega_iterates,
                               splitting_numbers)
from brake_index.orbits import (classify_symmetry, enumerate_brake_orbits,  # noqa: E402
                                linearized_path, orbit_theorem_checks, quadratic_hamiltonian)
from brake_index.paths import brake_iterate, rotation_path  # noqa: E402
from brake_index.signature import signature_small_eps  # noqa: E402
from brake_index.suites import SuiteConfig, run_suite  # noqa: E402
from oracles import diagonal_indices  # noqa: E402

ELLIPSOIDS = {2: [1.0, math.sqrt(2)], 3: [1.0, math.sqrt(2), math.sqrt(3)]}
SEED = 20261018


@functools.lru_cache(maxsize=None)
def ellipsoid(n):
    Ham = quadratic_hamiltonian(weights=ELLIPSOIDS[n])
    t0 = time.perf_counter()
    en = enumerate_brake_orbits(Ham, grid_density=64)
    return Ham, en, time.perf_counter() - t0


def suite(name):
    rep, _ = run_suite(SuiteConfig(name, seed=SEED))
    return rep


def _counts(rep):
    c = rep["counts"]
    return f"{c['pass']}/{sum(c.values())} pass"


def c1_ellipsoid_count():
    msgs, ok, total = [], True, 0.0
    for n, a in ELLIPSOIDS.items():
        Ham, en, dt = ellipsoid(n)
        total += dt
        want = sorted(2 * np.pi / (np.sqrt(2) * np.asarray(a)))
        got = sorted(c.period for c in en.classes)
        err = max(abs(x - y) for x, y in zip(got, want)) if len(got) == len(want) else np.inf
        sym = all(classify_symmetry(c) == "symmetric" for c in en.classes)
        ok &= en.count == n and err < 1e-8 and sym
        msgs.append(f"n={n}: {en.count} classes, period err {err:.1e}, symmetric={sym}")
    ok &= total < 60
    return ok, "; ".join(msgs) + f"; {total:.1f} s"


def c2_sharp_rotation():
    t0 = time.perf_counter()
    ok = True
    for n in range(1, 6):
        p = rotation_path(n)
        a, b, w = index_lagrangian(p, 0), index_lagrangian(p, 1), index_omega(p, 1.0)
        S = splitting_numbers(n_transform(p.end), 1.0, witness=brake_iterate(p, 2)).s_plus
        mc = mixed_concavity(p)
        ok &= (a.as_tuple() == b.as_tuple() == (0, n) and w.i == n and S == n
               and mc["mu_01"] + S == 0 and mc["mu_10"] + S == 0)
    dt = time.perf_counter() - t0
    return ok and dt < 10, f"n = 1..5 exact; {dt:.1f} s"


def c3_signature_table():
    thetas = [np.pi / 6, np.pi / 3, np.pi / 2, 2 * np.pi / 3, 5 * np.pi / 6, 7 * np.pi / 6]
    cases = 0
    ok = True
    for th in thetas:
        for side in (1, -1):
            ok &= signature_small_eps(rotation(th), side) == 0
            cases += 1
    for a in (0.5, -0.5, 2.0, -2.0):
        for side in (1, -1):
            ok &= signature_small_eps(np.diag([a, 1 / a]), side) == 0
            cases += 1
    for b in (0.5, 1.0, 2.0):
        for s in (1.0, -1.0):
            for M, want in (([[1, b], [0, 1]], 0), ([[1, 0], [-b, 1]], 0),
                            ([[1, -b], [0, 1]], 2), ([[1, 0], [b, 1]], -2)):
                ok &= signature_small_eps(s * np.array(M, float), 1) == want
                cases += 1
    return ok, f"{cases} cases"


SPLITTING_TABLE = [
    (basic_normal_form("N1", 1, 1), 1.0, (1, 1)),
    (basic_normal_form("N1", 1, 0), 1.0, (1, 1)),
    (basic_normal_form("N1", 1, -1), 1.0, (0, 0)),
    (basic_normal_form("N1", -1, -1), -1.0, (1, 1)),
    (basic_normal_form("N1", -1, 0), -1.0, (1, 1)),
    (basic_normal_form("N1", -1, 1), -1.0, (0, 0)),
    (rotation(1.0), np.exp(1j), (0, 1)),
    (rotation(4.0), np.exp(4j), (0, 1)),
    (basic_normal_form("N2", np.pi / 3, n2_block(np.pi / 3, -np.eye(2))), np.exp(1j * np.pi / 3), (0, 0)),
    (basic_normal_form("N2", np.pi / 3, n2_block(np.pi / 3, np.eye(2))), np.exp(1j * np.pi / 3), (1, 1)),
    (basic_normal_form("D", 2), 1.0, (0, 0)),
    (basic_normal_form("D", -2), -1.0, (0, 0)),
]


def c4_splitting_table():
    ok = all(limit_splitting(M, w) == want for M, w, want in SPLITTING_TABLE)
    rep = suite("splitting")
    ok &= rep["all_pass"] and rep["counts"]["pass"] >= 100
    return ok, f"{len(SPLITTING_TABLE)} table entries; additivity {_counts(rep)}"


def c5_prop41():
    t0 = time.perf_counter()
    rep = suite("prop41")
    dt = time.perf_counter() - t0
    return rep["all_pass"] and rep["counts"]["pass"] >= 200 and dt < 300, f"{_counts(rep)}; {dt:.1f} s"


def c6_thm41():
    rep = suite("thm41")
    ok = rep["all_pass"] and rep["counts"]["pass"] >= 200
    n_orb = 0
    for n in ELLIPSOIDS:
        Ham, en, _ = ellipsoid(n)
        for c in en.classes:
            chk = orbit_theorem_checks(c, Ham)
            ok &= chk["thm41_L1"] >= 0 and chk["thm41_L0"] >= 0
            n_orb += 1
    return ok, f"corpus {_counts(rep)}; {n_orb} ellipsoid orbits, 0 violations" if ok else \
        f"corpus {_counts(rep)}; ellipsoid orbit violation"


def c7_sign_lemmas():
    a, b = suite("lemma36"), suite("lemma37")
    ok = (a["all_pass"] and a["counts"]["pass"] >= 500 and b["all_pass"]
          and b["counts"]["pass"] >= 200)
    return ok, f"sign sum {_counts(a)}; core bound + charpoly {_counts(b)}"


def c8_normal_form():
    rep = suite("lemma38")
    n_iv = sum(1 for r in rep["records"] if r.get("result", {}).get("iv"))
    return rep["all_pass"] and rep["counts"]["pass"] >= 200, f"{_counts(rep)}; {n_iv} with zero A3 block"


def c9_bott_and_iteration():
    rep = suite("bott")
    ok = rep["all_pass"] and rep["counts"]["pass"] >= 200
    n_orb = 0
    for n in ELLIPSOIDS:
        Ham, en, _ = ellipsoid(n)
        for c in en.classes:
            g = linearized_path(c, Ham)
            L0, L1 = lagrangian_iterates(g, 0, 8), lagrangian_iterates(g, 1, 8)
            W = omega_iterates(g, 16)
            for m in range(1, 9):
                ok &= L0[m - 1][0] + L1[m - 1][0] == W[2 * m - 1][0] - n
                ok &= L0[m - 1][1] + L1[m - 1][1] == W[2 * m - 1][1]
            ok &= iteration_monotonicity_check(g, 8)["holds"]
            n_orb += 1
    return ok, f"corpus {_counts(rep)}; {n_orb} ellipsoid orbits, iterates m <= 8"


def c10_common_index_jump():
    paths = [rotation_path(1), rotation_path(1, speed=2.0)]
    found = common_index_jump_search(paths, 64)
    ok = len(found) >= 3
    base = diagonal_indices([1.0], [1.0], math.pi)["L"]
    for rec in found:
        R = rec["R"]
        for s, m in zip((1.0, 2.0), rec["m"]):
            b = diagonal_indices([s], [s], math.pi)["L"]
            lo = diagonal_indices([s], [s], (2 * m - 1) * math.pi)["L"]
            hi = diagonal_indices([s], [s], (2 * m + 1) * math.pi)["L"]
            # S^+ of N R(s pi)^-1 N R(s pi) = I is 1
            ok &= lo[1] == b[1] == hi[1] == base[1]
            ok &= lo[0] + lo[1] == R - (b[0] + 1 + 1 - b[1])
            ok &= hi[0] == R + b[0]
    return ok, f"{len(found)} tuples with m <= 64, all recomputed"


CRITERIA = [
    (1, "ellipsoid brake orbit count", c1_ellipsoid_count),
    (2, "sharp rotation example", c2_sharp_rotation),
    (3, "signature table", c3_signature_table),
    (4, "splitting table and additivity", c4_splitting_table),
    (5, "mixed concavity identities", c5_prop41),
    (6, "index plus splitting inequalities", c6_thm41),
    (7, "sign sum and core bound", c7_sign_lemmas),
    (8, "normal form round trip", c8_normal_form),
    (9, "Bott-type sums and iteration", c9_bott_and_iteration),
    (10, "common index jump", c10_common_index_jump),
]


def evaluate(fn):
    try:
        return fn()
    except Exception as e:  # a crash is a FAIL line, not a missing one
        return False, f"{type(e).__name__}: {e}"


def line(num, title, ok, detail):
    return f"criterion {num:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail}"


@pytest.mark.parametrize("num,title,fn", CRITERIA, ids=[f"c{n}" for n, _, _ in CRITERIA])
def test_criterion(num, title, fn, capsys):
    ok, detail = evaluate(fn)
    with capsys.disabled():
        print("\n" + line(num, title, ok, detail))
    assert ok, detail


if __name__ == "__main__":
    results = []
    for num, title, fn in CRITERIA:
        ok, detail = evaluate(fn)
        results.append(ok)
        print(line(num, title, ok, detail), flush=True)
    sys.exit(0 if all(results) else 1)
