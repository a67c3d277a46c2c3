"""Command-line front end.

Exit codes: 0 success, 1 a check failed, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from . import fedorov
from .errors import SnwitError
from .operator_basis import gell_mann_basis, pauli_basis
from .positive_maps import WitnessMap, kpos_min_eigenvalue, trace_square_samples
from .rotations import identity_rotation_family, random_rotation_family
from .states import BASELINE_VISIBILITY, BipartiteState, isotropic_state, threshold_v
from .symmetric_measurement import (
    SymmetricPovm,
    build_nm_povm,
    matrix_from_json,
    mub_basis,
    validate_povm,
    x_range,
)
from .tolerance import default_tol
from .witness import build_witness, expectation

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
PSD_TOL = 1e-9


class ConfigError(SnwitError):
    pass


@dataclass
class RunConfig:
    d: int = None
    N: int = None
    M: int = None
    k: int = None
    x: float = None
    x_min: float = None
    x_max: float = None
    steps: int = None
    v: float = None
    rotation: str = "identity"
    seed: int = None
    out: str = None
    format: str = "csv"
    state: str = "isotropic"
    sigma_plus: float = None
    sigma_minus: float = None
    grid_n: int = 512
    tol: float = None
    trials: int = 100
    basis: str = "gell-mann"
    input: str = None

    def __post_init__(self):
        if self.tol is None:
            self.tol = default_tol()

    def problems(self, need):
        """Every reason this config cannot run, for the fields in ``need``."""
        out = [f"--{name.replace('_', '-')} is required" for name in need if getattr(self, name) is None]
        if self.rotation not in ("identity", "random"):
            out.append(f"--rotation must be identity or random, got {self.rotation!r}")
        if self.rotation == "random" and self.seed is None and {"N", "M"} <= set(need):
            out.append("--rotation random requires an explicit --seed")
        if self.basis not in ("gell-mann", "mub", "pauli"):
            out.append(f"--basis must be gell-mann, mub or pauli, got {self.basis!r}")
        if self.format not in ("csv", "json"):
            out.append(f"--format must be csv or json, got {self.format!r}")
        if None not in (self.d, self.N, self.M) and self.M >= 2 and self.N * (self.M - 1) != self.d**2 - 1:
            out.append(f"N(M-1) = {self.N * (self.M - 1)} must equal d^2-1 = {self.d**2 - 1}")
        if None not in (self.d, self.M) and self.M >= 2:
            lo, hi = x_range(self.d, self.M)
            for name in ("x", "x_min", "x_max"):
                val = getattr(self, name)
                if name in need and val is not None and not lo < val <= hi:
                    out.append(f"--{name.replace('_', '-')} = {val} outside ({lo:g}, {hi:g}]")
        if "k" in need and None not in (self.k, self.d) and not 1 <= self.k <= self.d:
            out.append(f"--k = {self.k} must lie in [1, {self.d}]")
        if "steps" in need and self.steps is not None and self.steps < 1:
            out.append("--steps must be >= 1")
        if "trials" in need and self.trials is not None and self.trials < 1:
            out.append("--trials must be >= 1")
        if "v" in need and self.v is not None and not 0 <= self.v <= 1:
            out.append(f"--v = {self.v} outside [0, 1]")
        return out

    def require(self, *need):
        probs = self.problems(need)
        if probs:
            raise ConfigError("invalid configuration:\n  " + "\n  ".join(probs))


def _basis(cfg):
    if cfg.basis == "mub":
        return mub_basis(cfg.d)
    if cfg.basis == "pauli":
        return pauli_basis(cfg.d)
    return gell_mann_basis(cfg.d)


def _povm(cfg, require_positive=False):
    return build_nm_povm(cfg.d, cfg.N, cfg.M, cfg.x, _basis(cfg), require_positive=require_positive)


def _rotations(cfg):
    if cfg.rotation == "random":
        return random_rotation_family(cfg.N, cfg.M, cfg.seed)
    return identity_rotation_family(cfg.N, cfg.M)


def _state(cfg):
    if cfg.state == "isotropic":
        if cfg.v is None:
            raise ConfigError("--state isotropic needs --v")
        return isotropic_state(cfg.d, cfg.v)
    if cfg.state.startswith("file:"):
        path = Path(cfg.state[5:])
        try:
            obj = json.loads(path.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read state file {path}: {exc}") from exc
        raw = obj["matrix"] if isinstance(obj, dict) else obj
        try:
            rho = matrix_from_json(raw)
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"malformed state matrix in {path}: {exc}") from exc
        return BipartiteState(rho, cfg.d, cfg.d)
    raise ConfigError(f"--state must be isotropic or file:<path>, got {cfg.state!r}")


def _emit(text, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _positivity_note(povm, tol):
    if not povm.is_positive(tol):
        return (
            f"note: elements are not positive semidefinite (min eigenvalue {povm.min_eigenvalue():.3e}); "
            "trace conditions still hold, so the witness stays valid"
        )
    return None


def cmd_povm(cfg, action):
    if action == "validate" and cfg.input:
        povm = SymmetricPovm.from_json(Path(cfg.input).read_text())
    else:
        cfg.require("d", "N", "M", "x")
        povm = _povm(cfg)
        if action == "build" and cfg.out:
            Path(cfg.out).write_text(povm.to_json())
    report = validate_povm(povm, cfg.tol)
    print(f"(N,M)-POVM d={povm.d} N={povm.N} M={povm.M} x={povm.x!r} t={povm.t!r} basis={povm.basis_name}")
    for line in report.lines():
        print(line)
    print("validation:", "pass" if report.passed else "FAIL")
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_witness(cfg):
    cfg.require("d", "N", "M", "k", "x")
    povm = _povm(cfg)
    W = build_witness(povm, _rotations(cfg), cfg.k)
    val = expectation(W, _state(cfg))
    detected = val < -cfg.tol
    if cfg.format == "json":
        print(json.dumps({"value": val, "detected": detected, "k": cfg.k}))
    else:
        note = _positivity_note(povm, cfg.tol)
        if note:
            print(note)
        print(f"Tr(W_k rho) = {val:.12g}")
        print(f"SN >= {cfg.k + 1}: {'yes' if detected else 'no'}")
    return EXIT_OK


def sweep_rows(cfg):
    xs = np.linspace(cfg.x_min, cfg.x_max, cfg.steps) if cfg.steps > 1 else np.array([cfg.x_min])
    return [
        {"x": float(x), "v_threshold": threshold_v(cfg.d, cfg.k, cfg.M, cfg.N, float(x)), "v_baseline": BASELINE_VISIBILITY}
        for x in xs
    ]


def cmd_sweep(cfg):
    cfg.require("d", "N", "M", "k", "x_min", "x_max", "steps")
    if cfg.x_max < cfg.x_min:
        raise ConfigError("--x-max must not be below --x-min")
    rows = sweep_rows(cfg)
    if cfg.format == "json":
        text = json.dumps(rows, indent=1) + "\n"
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "v_threshold", "v_baseline"])
        for r in rows:
            w.writerow([repr(r["x"]), repr(r["v_threshold"]), repr(r["v_baseline"])])
        text = buf.getvalue()
    _emit(text, cfg.out)
    return EXIT_OK


def cmd_kpos(cfg):
    cfg.require("d", "N", "M", "k", "x", "seed", "trials")
    povm = _povm(cfg)
    wmap = WitnessMap(povm, _rotations(cfg), cfg.k)
    T = trace_square_samples(wmap, cfg.trials, cfg.seed)
    bound = 1 / (cfg.k * cfg.d - 1)
    predicted = wmap.predicted_trace_square()
    dev_bound = float(np.abs(T - bound).max())
    dev_pred = float(np.abs(T - predicted).max())
    lam = kpos_min_eigenvalue(wmap, cfg.trials, cfg.seed)
    lam_adj = kpos_min_eigenvalue(wmap, cfg.trials, cfg.seed, adjoint=True)
    ok = dev_pred < cfg.tol and T.max() <= bound + cfg.tol and min(lam, lam_adj) >= -PSD_TOL
    summary = {
        "trials": cfg.trials,
        "bound": bound,
        "predicted": predicted,
        "max_dev_from_bound": dev_bound,
        "max_dev_from_predicted": dev_pred,
        "min_eigenvalue": lam,
        "min_eigenvalue_adjoint": lam_adj,
        "pass": ok,
    }
    if cfg.format == "json":
        print(json.dumps(summary))
    else:
        print(f"trace square bound 1/(kd-1) = {bound:.12g}, predicted {predicted:.12g}")
        print(f"max |T - 1/(kd-1)| = {dev_bound:.3e}")
        print(f"max |T - predicted| = {dev_pred:.3e}")
        print(f"min eigenvalue (I x L)(psi_k) = {lam:.3e}, adjoint {lam_adj:.3e}")
        print("k-positivity check:", "pass" if ok else "FAIL")
    return EXIT_OK if ok else EXIT_FAIL


def _gaussian(cfg):
    cfg.require("sigma_plus", "sigma_minus")
    return fedorov.GaussianBiphoton(cfg.sigma_plus, cfg.sigma_minus)


def cmd_fedorov(cfg):
    g = _gaussian(cfg)
    grid = fedorov.sample_grid(g, cfg.grid_n)
    summary = {
        "schmidt_number": fedorov.schmidt_number_gaussian(g),
        "fedorov_ratio": fedorov.fedorov_ratio(g),
        "fedorov_ratio_grid": fedorov.fedorov_ratio_grid(grid),
        "participation_ratio_svd": fedorov.participation_ratio_svd(grid),
    }
    if cfg.format == "json":
        print(json.dumps(summary))
    else:
        for key, val in summary.items():
            print(f"{key:<24} {val:.12g}")
    return EXIT_OK


def dual_verdict(witness_value, R, k, tol):
    """Combine a witness value with a Fedorov ratio."""
    if witness_value >= -tol:
        return "witness inconclusive"
    if R >= k + 1 - tol:
        return "consistent"
    return "inconsistent - review"


def cmd_dual(cfg):
    cfg.require("d", "N", "M", "k", "x")
    g = _gaussian(cfg)
    W = build_witness(_povm(cfg), _rotations(cfg), cfg.k)
    val = expectation(W, _state(cfg))
    R = fedorov.fedorov_ratio(g)
    verdict = dual_verdict(val, R, cfg.k, cfg.tol)
    if cfg.format == "json":
        print(json.dumps({"witness_value": val, "fedorov_ratio": R, "verdict": verdict}))
    else:
        print(f"Tr(W_k rho) = {val:.12g}")
        print(f"Fedorov ratio R = {R:.12g}")
        print(f"verdict: {verdict}")
    return EXIT_FAIL if verdict.startswith("inconsistent") else EXIT_OK


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    add = common.add_argument
    add("--config", help="JSON file with default values for any flag")
    add("--d", type=int)
    add("--N", type=int)
    add("--M", type=int)
    add("--k", type=int)
    add("--x", type=float)
    add("--x-min", type=float)
    add("--x-max", type=float)
    add("--steps", type=int)
    add("--v", type=float)
    add("--rotation")
    add("--seed", type=int)
    add("--out")
    add("--format")
    add("--state")
    add("--sigma-plus", type=float)
    add("--sigma-minus", type=float)
    add("--grid-n", type=int)
    add("--tol", type=float)
    add("--trials", type=int)
    add("--basis")

    parser = argparse.ArgumentParser(prog="snwit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    povm = sub.add_parser("povm", parents=[common], help="build or validate an (N,M)-POVM")
    povm.add_argument("action", choices=["build", "validate"])
    povm.add_argument("--in", dest="input", help="POVM JSON to validate")
    wit = sub.add_parser("witness", parents=[common], help="evaluate the witness on a state")
    wit.add_argument("action", choices=["eval"])
    sub.add_parser("sweep", parents=[common], help="threshold visibility over an x grid")
    sub.add_parser("kpos-check", parents=[common], help="sampled k-positivity checks")
    sub.add_parser("fedorov", parents=[common], help="Fedorov ratio vs Schmidt number")
    sub.add_parser("dual-validate", parents=[common], help="witness value plus Fedorov ratio")
    return parser


def config_from_args(ns):
    base = {}
    if ns.config:
        try:
            base = json.loads(Path(ns.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {ns.config}: {exc}") from exc
        base = {key.replace("-", "_"): val for key, val in base.items()}
    names = {f.name for f in fields(RunConfig)}
    unknown = set(base) - names
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    for name in names:
        val = getattr(ns, name, None)
        if val is not None:
            base[name] = val
    return RunConfig(**base)


def main(argv=None):
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = config_from_args(ns)
        if ns.command == "povm":
            return cmd_povm(cfg, ns.action)
        if ns.command == "witness":
            return cmd_witness(cfg)
        if ns.command == "sweep":
            return cmd_sweep(cfg)
        if ns.command == "kpos-check":
            return cmd_kpos(cfg)
        if ns.command == "fedorov":
            return cmd_fedorov(cfg)
        return cmd_dual(cfg)
    except SnwitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

