"""JSON problem files and the ``maxent-orbits`` command line.

A problem file looks like::

    {"group": {"family": "SU", "n": 2}, "F": [1, -1], "A": [0, 0]}

Optional fields are ``Y``, ``eta``, ``epsilon`` (default ``1e-6``),
``seed`` (default ``0``) and ``mc_samples`` (default ``100000``).
Every output carries the SHA-256 of the canonical input and the library
version.  Exit status: 0 success, 2 parse error, 3 infeasible (including
a ``membership`` query answered ``outside``, whose report is still
written), 4 numeric overflow, 5 internal error.
"""

import argparse
import hashlib
import json
import math
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import __version__
from .errors import OrbitError, ParseError
from .geometry import kostant_project, membership
from .groups import check_cartan, make_group_spec
from .montecarlo import haar_batch, mc_log_integral, mc_orbit_mean, orbit_points, rng_stream
from .oracle import log_integral
from .solver import density_report, make_instance, solve

__all__ = ["ProblemFile", "parse_problem", "serialize_problem", "run_command", "main", "COMMANDS"]

COMMANDS = ("solve", "integrate", "gradient", "membership", "validate", "sample-orbit")

_FIELDS = {"group", "F", "A", "Y", "eta", "epsilon", "seed", "mc_samples"}


@dataclass
class ProblemFile:
    family: str
    n: int
    F: list
    A: Optional[list] = None
    Y: Optional[list] = None
    eta: Optional[float] = None
    epsilon: float = 1e-6
    seed: int = 0
    mc_samples: int = 100_000

    @property
    def spec(self):
        return make_group_spec(self.family, self.n)

    def to_dict(self):
        out = {"group": {"family": self.family, "n": self.n}, "F": self.F}
        for key in ("A", "Y", "eta"):
            if getattr(self, key) is not None:
                out[key] = getattr(self, key)
        out.update(epsilon=self.epsilon, seed=self.seed, mc_samples=self.mc_samples)
        return out


def _number(value, name):
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ParseError(f"{name} must be a finite number", code="INVALID_VALUE")
    return float(value)


def _integer(value, name):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError(f"{name} must be an integer", code="INVALID_VALUE")
    return value


def _vector(spec, value, name):
    if not isinstance(value, list):
        raise ParseError(f"{name} must be an array of numbers", code="INVALID_VALUE")
    vals = [_number(v, f"{name}[{i}]") for i, v in enumerate(value)]
    check_cartan(spec, vals, name)
    return vals


def _from_dict(data):
    if not isinstance(data, dict):
        raise ParseError("problem must be a JSON object", code="INVALID_VALUE")
    unknown = set(data) - _FIELDS
    if unknown:
        raise ParseError(f"unknown fields: {sorted(unknown)}", code="UNKNOWN_FIELD")
    for key in ("group", "F"):
        if key not in data:
            raise ParseError(f"missing field {key!r}", code="MISSING_FIELD")
    group = data["group"]
    if not isinstance(group, dict) or set(group) != {"family", "n"}:
        raise ParseError('group must be {"family": ..., "n": ...}', code="INVALID_VALUE")
    if not isinstance(group["family"], str):
        raise ParseError("group.family must be a string", code="UNKNOWN_FAMILY")
    spec = make_group_spec(group["family"], _integer(group["n"], "group.n"))

    p = ProblemFile(spec.family.value, spec.n, _vector(spec, data["F"], "F"))
    for key in ("A", "Y"):
        if data.get(key) is not None:
            setattr(p, key, _vector(spec, data[key], key))
    if data.get("eta") is not None:
        p.eta = _number(data["eta"], "eta")
        if p.eta <= 0:
            raise ParseError("eta must be positive", code="INVALID_VALUE")
    if "epsilon" in data:
        p.epsilon = _number(data["epsilon"], "epsilon")
        if p.epsilon <= 0:
            raise ParseError("epsilon must be positive", code="INVALID_VALUE")
    if "seed" in data:
        p.seed = _integer(data["seed"], "seed")
        if not 0 <= p.seed < 2 ** 64:
            raise ParseError("seed must fit in 64 unsigned bits", code="INVALID_VALUE")
    if "mc_samples" in data:
        p.mc_samples = _integer(data["mc_samples"], "mc_samples")
        if p.mc_samples <= 0:
            raise ParseError("mc_samples must be positive", code="INVALID_VALUE")
    return p


def parse_problem(text):
    """Parse and validate a JSON problem description.

    Raises :class:`ParseError` (or :class:`SpecError`) carrying a
    machine-readable ``code``.
    """
    try:
        data = json.loads(text)
    except (json.JSONDecodeError, TypeError) as exc:
        raise ParseError(f"malformed JSON: {exc}", code="MALFORMED_JSON") from None
    return _from_dict(data)


def serialize_problem(p):
    return json.dumps(p.to_dict(), sort_keys=True)


def input_hash(p):
    return hashlib.sha256(serialize_problem(p).encode()).hexdigest()


def _floats(x):
    if isinstance(x, np.ndarray):
        return [float(v) for v in x.ravel()] if x.ndim == 1 else [_floats(r) for r in x]
    return float(x)


def _require(p, key, command):
    if getattr(p, key) is None:
        raise ParseError(f"command {command!r} needs field {key!r}", code="MISSING_FIELD")
    return np.array(getattr(p, key))


def _oracle_json(r):
    return {
        "log_value": float(r.log_value),
        "gradient": _floats(r.gradient),
        "confluent": bool(r.confluent),
        "condition_estimate": float(r.condition_estimate),
    }


def _passes(analytic, mean, stderr):
    # 1e-12 absorbs roundoff when the estimate is deterministic (stderr 0)
    return bool(abs(analytic - mean) <= 3.0 * stderr + 1e-12)


def run_command(command, p):
    """Execute one command on a parsed problem and return the output dict."""
    if command not in COMMANDS:
        raise ParseError(f"unknown command {command!r}", code="UNKNOWN_COMMAND")
    spec = p.spec
    F = np.array(p.F)

    if command == "solve":
        inst = make_instance(spec, F, _require(p, "A", command), p.epsilon, p.eta)
        sol = solve(inst)
        dens = density_report(inst, sol)
        result = {
            "Y_opt": _floats(sol.Y_opt),
            "f_value": float(sol.f_value),
            "grad_norm": float(sol.grad_norm),
            "iterations": int(sol.iterations),
            "iteration_bound": int(sol.iteration_bound),
            "exit_reason": sol.exit_reason,
            "R_used": float(sol.R_used),
            "eta": float(inst.eta),
            "eta_estimated": bool(inst.eta_estimated),
            "density": {
                "Y": _floats(dens.Y),
                "log_partition": dens.log_partition,
                "mean": _floats(dens.mean),
                "deviation": dens.deviation,
            },
        }
    elif command in ("integrate", "gradient"):
        result = _oracle_json(log_integral(spec, F, _require(p, "Y", command)))
    elif command == "membership":
        rep = membership(spec, F, _require(p, "A", command))
        result = {
            "status": rep.status,
            "margin": float(rep.margin),
            "certificate": _floats(rep.certificate),
            "vertices": _floats(rep.vertices),
        }
    elif command == "validate":
        Y = _require(p, "Y", command)
        r = log_integral(spec, F, Y)
        mc = mc_log_integral(spec, F, Y, p.mc_samples, p.seed)
        om = mc_orbit_mean(spec, F, Y, p.mc_samples, p.seed)
        mean = -r.gradient
        checks = [_passes(r.log_value, mc.mean, mc.stderr)]
        checks += [_passes(a, m, s) for a, m, s in zip(mean, om.mean, om.stderr)]
        result = {
            "analytic": {"log_value": float(r.log_value), "orbit_mean": _floats(mean)},
            "monte_carlo": {
                "log_value": float(mc.mean),
                "log_value_stderr": float(mc.stderr),
                "orbit_mean": _floats(om.mean),
                "orbit_mean_stderr": _floats(om.stderr),
                "effective_sample_size": float(om.ess),
                "n_samples": int(p.mc_samples),
                "seed": int(p.seed),
            },
            "pass": all(checks),
        }
    else:
        g = np.concatenate([
            haar_batch(spec, min(8192, p.mc_samples - k), rng_stream(p.seed, i))
            for i, k in enumerate(range(0, p.mc_samples, 8192))
        ])
        X = orbit_points(spec, F, g)
        result = {"points": [_floats(kostant_project(spec, x)) for x in X]}

    return {
        "command": command,
        "version": __version__,
        "input_hash": input_hash(p),
        "group": {"family": p.family, "n": p.n},
        "result": result,
    }


def build_parser():
    ap = argparse.ArgumentParser(
        prog="maxent-orbits",
        description="Maximum-entropy distributions on adjoint orbits of compact groups.",
    )
    ap.add_argument("--input", default="-", help="problem JSON file, '-' for stdin")
    ap.add_argument("--command", required=True, choices=COMMANDS)
    ap.add_argument("--epsilon", type=float)
    ap.add_argument("--eta", type=float)
    ap.add_argument("--seed", type=int)
    ap.add_argument("--mc-samples", type=int, dest="mc_samples")
    ap.add_argument("--output", default="-", help="output file, '-' for stdout")
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        text = sys.stdin.read() if args.input == "-" else open(args.input, encoding="utf-8").read()
        p = parse_problem(text)
        data = p.to_dict()
        for key in ("epsilon", "eta", "seed", "mc_samples"):
            if getattr(args, key) is not None:
                data[key] = getattr(args, key)
        p = _from_dict(data)
        result = run_command(args.command, p)
        out = json.dumps(result, indent=2, sort_keys=True) + "\n"
        if args.output == "-":
            sys.stdout.write(out)
        else:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(out)
        if args.command == "membership" and result["result"]["status"] == "outside":
            sys.stderr.write(json.dumps({"error": "OUTSIDE", "message": "A is outside the orbit polytope"}) + "\n")
            return 3
    except OrbitError as exc:
        sys.stderr.write(json.dumps({"error": exc.code, "message": str(exc)}) + "\n")
        return exc.exit_status
    except OSError as exc:
        sys.stderr.write(json.dumps({"error": "IO_ERROR", "message": str(exc)}) + "\n")
        return 2
    except Exception as exc:  # noqa: BLE001 - reported as internal error
        sys.stderr.write(json.dumps({"error": "INTERNAL", "message": repr(exc)}) + "\n")
        return 5
    return 0
