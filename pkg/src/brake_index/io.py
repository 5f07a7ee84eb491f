"""File formats: matrices, paths, Hamiltonian configs, reports."""

import csv
import json
from fractions import Fraction

import numpy as np
import yaml

from .core import half_dim


class InputError(ValueError):
    """Malformed input file; ``location`` says where."""

    def __init__(self, message, location=""):
        super().__init__(f"{location}: {message}" if location else message)
        self.location = location


def _entry(v, loc):
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return float(v)
    if isinstance(v, str):
        try:
            return float(Fraction(v.strip()))
        except (ValueError, ZeroDivisionError) as e:
            raise InputError(f"bad entry {v!r} ({e})", loc) from None
    raise InputError(f"bad entry {v!r}", loc)


def parse_matrix(obj, loc="matrix"):
    """{"dim_half": k, "rows": [[...], ...]}; entries are numbers, decimal strings or "p/q"."""
    if isinstance(obj, list):
        obj = {"rows": obj}
    if not isinstance(obj, dict) or "rows" not in obj:
        raise InputError("expected an object with 'rows'", loc)
    rows = obj["rows"]
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise InputError("'rows' must be a non-empty list of lists", loc)
    M = np.array([[_entry(v, f"{loc}.rows[{i}][{j}]") for j, v in enumerate(r)]
                  for i, r in enumerate(rows)]) if len({len(r) for r in rows}) == 1 else None
    if M is None or M.shape[0] != M.shape[1] or M.shape[0] % 2:
        raise InputError("matrix must be square of even size", loc)
    if "dim_half" in obj and int(obj["dim_half"]) != half_dim(M):
        raise InputError(f"dim_half {obj['dim_half']} does not match the rows", loc)
    return M


def matrix_to_json(M):
    M = np.asarray(M, dtype=float)
    return {"dim_half": M.shape[0] // 2, "rows": M.tolist()}


def load_document(path):
    """JSON or YAML file as a Python object."""
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as e:
        raise InputError(str(e), str(path)) from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as je:
        try:
            doc = yaml.safe_load(text)
        except yaml.YAMLError:
            raise InputError(f"invalid JSON at line {je.lineno} column {je.colno}: {je.msg}",
                             str(path)) from None
        if not isinstance(doc, (dict, list)):
            raise InputError(f"invalid JSON at line {je.lineno} column {je.colno}: {je.msg}",
                             str(path))
        return doc


def load_matrix(path):
    return parse_matrix(load_document(path), str(path))


def parse_path(obj, loc="path"):
    """{"tau": t, "generator": {"kind": ..., ...}, "n_steps": N}.

    kinds: constant {"B"}; sampled {"times", "matrices"}; quadratic_orbit (the linearized
    path of a brake orbit) {"hamiltonian": config, "q0"} or {"hamiltonian", "axis"}."""
    from .paths import constant_path, fundamental_solution, sampled_path
    if not isinstance(obj, dict) or "generator" not in obj:
        raise InputError("expected an object with 'generator'", loc)
    gen = obj["generator"]
    kind = gen.get("kind") if isinstance(gen, dict) else None
    n_steps = int(obj.get("n_steps", 256))
    if kind == "constant":
        B = parse_matrix(gen.get("B"), f"{loc}.generator.B")
        if np.max(np.abs(B - B.T)) > 1e-12:
            raise InputError("B must be symmetric", f"{loc}.generator.B")
        tau = _tau(obj, loc)
        if gen.get("integrate"):
            return fundamental_solution(lambda t: B, tau, n_steps)
        return constant_path(B, tau)
    if kind == "sampled":
        times = np.asarray(gen.get("times"), dtype=float)
        mats = np.array([parse_matrix(m, f"{loc}.generator.matrices[{i}]")
                         for i, m in enumerate(gen.get("matrices", []))])
        if times.ndim != 1 or len(times) != len(mats) or len(times) < 2:
            raise InputError("times and matrices must have equal length >= 2", loc)
        return sampled_path(times, mats)
    if kind == "quadratic_orbit":
        from .orbits import half_period_guess, linearized_path, shoot_brake_orbit
        Ham = parse_hamiltonian(gen.get("hamiltonian"), f"{loc}.generator.hamiltonian")
        if "q0" in gen:
            q0 = np.asarray(gen["q0"], dtype=float)
        else:
            q0 = np.eye(Ham.n)[int(gen.get("axis", 0))]
        g = half_period_guess(Ham, q0)
        if g is None:
            raise InputError("no half-period guess for this start", loc)
        orbit = shoot_brake_orbit(Ham, q0, 2 * g)
        return linearized_path(orbit, Ham, n_steps=n_steps)
    raise InputError(f"unknown generator kind {kind!r}", f"{loc}.generator.kind")


def _tau(obj, loc):
    try:
        tau = float(Fraction(str(obj["tau"]))) if isinstance(obj["tau"], str) and "/" in obj["tau"] \
            else _tau_expr(obj["tau"])
    except (KeyError, ValueError, TypeError):
        raise InputError("missing or bad 'tau'", loc) from None
    if tau <= 0:
        raise InputError("tau must be positive", loc)
    return tau


def _tau_expr(v):
    """Numbers, or strings like 'pi', '2pi', 'pi/2'."""
    if isinstance(v, (int, float)):
        return float(v)
    s = str(v).replace(" ", "").replace("*", "")
    if "pi" in s:
        num, _, den = s.partition("/")
        coef = num.replace("pi", "") or "1"
        return float(Fraction(coef)) * np.pi / (float(den) if den else 1.0)
    return float(s)


def load_path(path):
    return parse_path(load_document(path), str(path))


def parse_hamiltonian(obj, loc="hamiltonian"):
    """{"kind": "quadratic", "weights" | "form", "energy"} or
    {"kind": "gauge_power", "ellipsoid": matrix, "alpha"}; optional "solver" overrides."""
    from .orbits import gauge_hamiltonian, quadratic_hamiltonian
    if not isinstance(obj, dict):
        raise InputError("expected an object", loc)
    kind = obj.get("kind")
    try:
        if kind == "quadratic":
            if "weights" in obj:
                w = [_entry(v, f"{loc}.weights") if not isinstance(v, str) or "sqrt" not in v
                     else np.sqrt(_entry(v[v.index("(") + 1:v.rindex(")")], f"{loc}.weights"))
                     for v in obj["weights"]]
                Ham = quadratic_hamiltonian(weights=w, energy=float(obj.get("energy", 1.0)))
            else:
                Q = parse_matrix(obj.get("form"), f"{loc}.form")
                Ham = quadratic_hamiltonian(form=Q, energy=float(obj.get("energy", 1.0)))
        elif kind == "gauge_power":
            Q = parse_matrix(obj.get("ellipsoid"), f"{loc}.ellipsoid")
            Ham = gauge_hamiltonian({"ellipsoid": Q}, float(obj.get("alpha", 2.0)))
        else:
            raise InputError(f"unknown kind {kind!r}", f"{loc}.kind")
    except InputError:
        raise
    except ValueError as e:
        raise InputError(str(e), loc) from None
    Ham.params["solver"] = dict(obj.get("solver", {}))
    return Ham


def load_hamiltonian(path):
    return parse_hamiltonian(load_document(path), str(path))


def _plain(o):
    if isinstance(o, dict):
        return {str(k): _plain(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_plain(v) for v in o]
    if isinstance(o, np.ndarray):
        return _plain(o.tolist())
    if isinstance(o, (np.bool_,)):
        return bool(o)
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, complex):
        return {"re": o.real, "im": o.imag}
    return o


def dumps(obj):
    """Deterministic JSON: sorted keys, fixed separators, numpy types converted."""
    return json.dumps(_plain(obj), sort_keys=True, indent=2)


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def parse_omega(text):
    """A unit complex number from '1', '-1', 'exp(i*0.5)', 'angle:0.5' or a Python
    complex literal such as '0.5+0.866j'."""
    s = str(text).strip().replace(" ", "")
    try:
        if s.startswith("angle:"):
            w = np.exp(1j * float(s[6:]))
        elif s.startswith("exp(i*") and s.endswith(")"):
            w = np.exp(1j * float(s[6:-1]))
        else:
            w = complex(s)
    except ValueError:
        raise InputError(f"cannot parse omega {text!r}", "--omega") from None
    if abs(abs(w) - 1) > 1e-9:
        raise InputError(f"omega {text!r} is not on the unit circle", "--omega")
    return complex(w)
