"""brake-index command line: index, signature, orbits, verify.

Exit codes: 0 success, 1 input error, 2 numerically indeterminate, 3 solver
non-convergence, 4 a property suite recorded a violated trial."""

import os
import subprocess
import sys

import click

from .config import ENV_PREFIX, ConvergenceError, IndeterminateError

EXIT_OK, EXIT_INPUT, EXIT_INDETERMINATE, EXIT_NO_CONVERGENCE, EXIT_VIOLATION = 0, 1, 2, 3, 4
_HEAVY = ("brake_index.core", "brake_index.index", "brake_index.signature", "brake_index.orbits")


def _emit(ctx, report):
    from .io import dumps
    text = dumps(report) + "\n"
    out = ctx.obj.get("out")
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


def _settings(ctx):
    from .config import DEFAULT
    from dataclasses import asdict
    return {"seed": ctx.obj["seed"], "tol_scale": ctx.obj["tol_scale"],
            "tolerances": asdict(DEFAULT)}


@click.group()
@click.option("--seed", type=int, default=0, show_default=True, help="Master seed.")
@click.option("--tol-scale", type=float, default=1.0, show_default=True,
              help="Multiply every tolerance (also via " + ENV_PREFIX + "TOL_SCALE).")
@click.option("--jobs", type=int, default=1, show_default=True, help="Worker processes for suites.")
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Write the JSON report here instead of stdout.")
@click.pass_context
def cli(ctx, seed, tol_scale, jobs, out):
    """Index theory for symplectic paths with Lagrangian boundary conditions."""
    if tol_scale <= 0:
        raise click.BadParameter("must be positive", param_hint="--tol-scale")
    if jobs < 1:
        raise click.BadParameter("must be positive", param_hint="--jobs")
    ctx.obj = {"seed": seed, "tol_scale": tol_scale, "jobs": jobs, "out": out}


@cli.command()
@click.argument("path_file", type=click.Path())
@click.option("--omega", "omega", default=None, help="Unit complex number: 1, -1, angle:t, exp(i*t).")
@click.option("--lagrangian", type=click.Choice(["0", "1"]), default=None, help="L0 or L1 index.")
@click.option("--iterate", type=int, default=1, show_default=True, help="Brake iterate k.")
@click.pass_context
def index(ctx, path_file, omega, lagrangian, iterate):
    """Omega- or L_j-index of a path file (all three when no flag is given)."""
    from .io import load_path, parse_omega
    from .index import index_lagrangian, index_omega
    from .paths import brake_iterate
    if iterate < 1:
        raise click.BadParameter("must be positive", param_hint="--iterate")
    path = load_path(path_file)
    w = parse_omega(omega) if omega is not None else None
    g = brake_iterate(path, iterate)
    results = []
    if w is not None or lagrangian is None:
        w = 1.0 + 0j if w is None else w
        r = index_omega(g, w)
        results.append({"kind": "omega", "omega": [w.real, w.imag], "i": r.i, "nu": r.nu,
                        "meta": r.meta})
    js = [int(lagrangian)] if lagrangian is not None else ([0, 1] if omega is None else [])
    for j in js:
        r = index_lagrangian(g, j)
        results.append({"kind": f"L{j}", "i": r.i, "nu": r.nu, "meta": r.meta})
    _emit(ctx, {"command": "index", "file": str(path_file), "n": path.n, "tau": path.tau,
                "iterate": iterate, "status": "stable", "results": results, **_settings(ctx)})
    return EXIT_OK


@cli.command()
@click.argument("matrix_file", type=click.Path(), required=False)
@click.option("--eps", type=float, default=None, help="Inertia of M_eps at this eps.")
@click.option("--normal-form", is_flag=True, help="(L0,L1) normal form report.")
@click.option("--concavity-of", "concavity_of", type=click.Path(), default=None,
              help="Path file whose concavities are computed by both routes.")
@click.pass_context
def signature(ctx, matrix_file, eps, normal_form, concavity_of):
    """Signatures of M_eps for a matrix file, its normal form, or path concavities."""
    from .io import load_matrix, load_path
    from .signature import m_epsilon, signature_small_eps, concavity, normal_form_L0L1
    report = {"command": "signature", **_settings(ctx)}
    if matrix_file is None and concavity_of is None:
        raise click.UsageError("give MATRIX_FILE or --concavity-of")
    if matrix_file is not None:
        from .core import require_symplectic
        P = load_matrix(matrix_file)
        try:
            require_symplectic(P, 1e-8)
        except ValueError as e:
            from .io import InputError
            raise InputError(str(e), str(matrix_file)) from None
        report["file"] = str(matrix_file)
        if eps is not None:
            m = m_epsilon(P, eps)
            report["eps"] = {"eps": eps, "inertia": m.inertia.as_tuple(), "sgn": m.sgn}
        else:
            report["small_eps"] = {"sgn_pos": signature_small_eps(P, +1),
                                   "sgn_neg": signature_small_eps(P, -1)}
        if normal_form:
            report["normal_form"] = _normal_form_json(normal_form_L0L1(P))
    elif eps is not None or normal_form:
        raise click.UsageError("--eps and --normal-form need MATRIX_FILE")
    if concavity_of is not None:
        report["concavity"] = concavity(load_path(concavity_of))
    _emit(ctx, report)
    return EXIT_OK


def _normal_form_json(rep):
    P1, P2 = rep.witness_transforms
    return {"case": rep.case, "rank_B": rep.rank_B, "rank_A3": rep.rank_A3,
            "factors": [{"tag": tag, "rows": M.tolist()} for M, tag in rep.factors],
            "P1": P1.tolist(), "P2": P2.tolist(),
            "inertia_AC": rep.inertia_AC.as_tuple(), "inertia_BD": rep.inertia_BD.as_tuple(),
            "factor_inertia_AC": rep.factor_inertia_AC().as_tuple(),
            "factor_inertia_BD": rep.factor_inertia_BD().as_tuple(),
            "iv": rep.iv, "approx_classes": rep.approx_classes, "tol": rep.tol}


@cli.command()
@click.argument("hamiltonian_file", type=click.Path())
@click.option("--grid", type=int, default=None, help="Directions per axis (default 64).")
@click.option("--indices", "m_max", type=int, default=0, help="Indices of iterates m = 1..m_max.")
@click.option("--csv", "csv_out", type=click.Path(dir_okay=False), default=None,
              help="Also write the class table as CSV.")
@click.pass_context
def orbits(ctx, hamiltonian_file, grid, m_max, csv_out):
    """Enumerate brake orbits on the energy surface of a Hamiltonian config."""
    from .config import DEFAULT
    from .io import load_hamiltonian, write_csv
    from .orbits import (classify_symmetry, enumerate_brake_orbits, linearized_path,
                         orbit_indices)
    from .index import iteration_monotonicity_check
    Ham = load_hamiltonian(hamiltonian_file)
    solver = Ham.params.get("solver", {})
    density = grid if grid is not None else int(solver.get("grid", 64))
    if density < 2:
        raise click.BadParameter("must be at least 2", param_hint="--grid")
    dedup = float(solver.get("dedup_tol", DEFAULT.dedup_tol))
    en = enumerate_brake_orbits(Ham, grid_density=density, dedup_tol=dedup)
    if en.count == 0:
        raise ConvergenceError("no brake orbit converged on the direction grid",
                               unconverged=len(en.unconverged))
    classes, rows = [], []
    for c, (orb, mult) in enumerate(zip(en.classes, en.multiplicity)):
        rec = {"id": c, "period": orb.period, "symmetry": classify_symmetry(orb),
               "symmetry_defect": orb.meta["symmetry_defect"], "multiplicity": mult,
               "q0": orb.q0.tolist(), "residuals": orb.residuals}
        if m_max > 0:
            path = linearized_path(orb, Ham)
            rec["iterates"] = [orbit_indices(orb, Ham, m, path) for m in range(1, m_max + 1)]
            if m_max > 1:
                mono = iteration_monotonicity_check(path, m_max)
                rec["monotone"] = mono["holds"]
                rec["monotonicity_violations"] = mono["violations"]
            for it in rec["iterates"]:
                rows.append([c, it["m"], orb.period, rec["symmetry"], *it["L0"], *it["L1"]])
        else:
            rows.append([c, 1, orb.period, rec["symmetry"], "", "", "", ""])
        classes.append(rec)
    if csv_out:
        write_csv(csv_out, ["class", "m", "period", "symmetry", "i_L0", "nu_L0", "i_L1", "nu_L1"],
                  rows)
    _emit(ctx, {"command": "orbits", "file": str(hamiltonian_file), "n": Ham.n, "grid": density,
                "count": en.count, "classes": classes, "resonant": bool(en.resonant),
                "note": en.note, "unconverged": len(en.unconverged), **_settings(ctx)})
    return EXIT_OK


@cli.command()
@click.argument("suite")
@click.option("--trials", type=int, default=None, help="Number of trials (suite default otherwise).")
@click.option("--dims", default=None, help="Comma-separated dimensions n, cycled over trials.")
@click.pass_context
def verify(ctx, suite, trials, dims):
    """Run a seeded property suite: prop41 thm41 lemma36 lemma37 lemma38 splitting bott claim41."""
    from .suites import SUITES, SuiteConfig, run_suite
    if suite not in SUITES:
        raise click.BadParameter(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}",
                                 param_hint="SUITE")
    try:
        dl = [int(d) for d in dims.split(",")] if dims else None
        cfg = SuiteConfig(suite, trials, ctx.obj["seed"], dl)
    except ValueError as e:
        raise click.BadParameter(str(e), param_hint="--dims/--trials") from None
    report, _ = run_suite(cfg, jobs=ctx.obj["jobs"])
    report["tol_scale"] = ctx.obj["tol_scale"]
    _emit(ctx, report)
    c = report["counts"]
    if c["fail"]:
        return EXIT_VIOLATION
    if c["indeterminate"]:
        return EXIT_INDETERMINATE
    if c["no_convergence"]:
        return EXIT_NO_CONVERGENCE
    return EXIT_OK


def _scan_tol_scale(argv):
    for i, a in enumerate(argv):
        if a == "--tol-scale" and i + 1 < len(argv):
            return argv[i + 1]
        if a.startswith("--tol-scale="):
            return a.split("=", 1)[1]
    return None


def _error_report(kind, exc):
    from .io import dumps
    detail = getattr(exc, "detail", {})
    click.echo(dumps({"status": kind, "error": str(exc), "detail": detail}), err=True)


def main(argv=None):
    """Entry point; returns the process exit code."""
    argv = list(sys.argv[1:] if argv is None else argv)
    scale = _scan_tol_scale(argv)
    if scale is not None:
        try:
            float(scale)
        except ValueError:
            click.echo(f"Error: --tol-scale {scale!r} is not a number", err=True)
            return EXIT_INPUT
        from . import config
        loaded = any(m in sys.modules for m in _HEAVY)
        if loaded and config.DEFAULT != config.Tolerances.from_env(scale=float(scale)):
            # tolerance defaults are bound at import time: run in a fresh interpreter
            env = dict(os.environ, **{ENV_PREFIX + "TOL_SCALE": scale})
            return subprocess.run([sys.executable, "-m", "brake_index.cli", *argv], env=env).returncode
        os.environ[ENV_PREFIX + "TOL_SCALE"] = scale
        config.DEFAULT = config.Tolerances.from_env(scale=float(scale))
        import brake_index
        brake_index.DEFAULT = config.DEFAULT
    from .io import InputError
    try:
        rv = cli.main(args=argv, prog_name="brake-index", standalone_mode=False)
    except click.exceptions.Exit as e:
        return e.exit_code
    except click.ClickException as e:
        e.show()
        return EXIT_INPUT
    except click.exceptions.Abort:
        return EXIT_INPUT
    except InputError as e:
        click.echo(f"Error: {e}", err=True)
        return EXIT_INPUT
    except IndeterminateError as e:
        _error_report("unstable", e)
        return EXIT_INDETERMINATE
    except ConvergenceError as e:
        _error_report("no_convergence", e)
        return EXIT_NO_CONVERGENCE
    except ValueError as e:
        # violated preconditions of a computation are input errors
        click.echo(f"Error: {e}", err=True)
        return EXIT_INPUT
    return rv if isinstance(rv, int) else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
