"""Command-line front end.

Subcommands: kernel, picknorm, search, interp, sarason, shifts, embed,
experiment.  Each reads a JSON config (--config), with --seed / --out /
--format / --quiet overrides.  Exit codes: 0 success, 1 numerical contract
violation (diagnostic JSON on stdout), 2 usage or malformed config.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

import numpy as np

from . import embeddings, interpolation, kernels, picknorm, shifts
from .experiments import ExperimentConfig, ExperimentError, run_experiment
from .kernels import KernelSpec
from .poly import Poly

__all__ = ["main", "cli_dispatch"]


class ConfigError(Exception):
    pass


def _complex_from(obj):
    if isinstance(obj, (int, float)):
        return complex(obj)
    if isinstance(obj, (list, tuple)) and len(obj) == 2:
        return complex(obj[0], obj[1])
    raise ConfigError(f"expected number or [re, im], got {obj!r}")


def _point_from(obj, d):
    if isinstance(obj, (int, float)):
        return np.array([complex(obj)])
    arr = [
        _complex_from(c) for c in (obj if isinstance(obj[0], (list, tuple)) else [obj])
    ]
    if len(arr) == d:
        return np.array(arr)
    if d == 1 and len(obj) == 2 and all(isinstance(x, (int, float)) for x in obj):
        return np.array([complex(obj[0], obj[1])])
    raise ConfigError(f"point {obj!r} does not match dimension {d}")


def poly_from_json(obj) -> Poly:
    """{"d": 1, "terms": [[[k, ...], [re, im]], ...]} or {"coeffs": [...]} for d=1."""
    if "coeffs" in obj:
        return Poly.one_var([_complex_from(c) for c in obj["coeffs"]])
    d = int(obj.get("d", 1))
    table = {}
    for alpha, c in obj["terms"]:
        table[tuple(int(a) for a in alpha)] = _complex_from(c)
    return Poly(d, table)


def _matrix_from(obj):
    return np.array([[_complex_from(c) for c in row] for row in obj])


def _emit(text, out_path):
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json_line(obj):
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def _cmd_kernel(config, fmt, out):
    spec = KernelSpec.from_json_dict(config["kernel"])
    op = config.get("op", "eval")
    if op == "eval":
        z = _point_from(config["z"], spec.d)
        w = _point_from(config["w"], spec.d)
        val = kernels.kernel_eval(spec, z, w)
        result = {"op": op, "value": [val.real, val.imag]}
    elif op == "gram":
        pts = [_point_from(p, spec.d) for p in config["points"]]
        G = kernels.gram(spec, pts)
        result = {"op": op, "value": [[[c.real, c.imag] for c in row] for row in G]}
    elif op == "delta":
        z = _point_from(config["z"], spec.d)
        w = _point_from(config["w"], spec.d)
        result = {"op": op, "value": kernels.delta_metric(spec, z, w)}
    elif op == "reciprocal":
        b = kernels.reciprocal_coeffs(spec, int(config["N"]))
        result = {"op": op, "value": list(map(float, b))}
    elif op == "domination":
        result = {"op": op, "value": kernels.domination_radius(spec, int(config["N"]))}
    else:
        raise ConfigError(f"unknown kernel op {op!r}")
    _emit(_json_line(result), out)
    return 0


def _cmd_picknorm(config, fmt, out):
    data = picknorm.PickData.from_json_dict(config)
    norm = picknorm.n_point_norm_at(data)
    if fmt == "json":
        _emit(_json_line({"norm": norm}), out)
    else:
        _emit(repr(norm) + "\n", out)
    return 0


def _cmd_search(config, fmt, out, seed):
    spec = KernelSpec.from_json_dict(config["kernel"])
    phi = poly_from_json(config["poly"])
    sc = picknorm.SearchConfig(
        n=int(config["n"]),
        restarts=int(config.get("restarts", 32)),
        max_iters=int(config.get("max_iters", 60)),
        seed=seed if seed is not None else int(config.get("seed", 0xC0FFEE)),
        rho=float(config.get("rho", 0.999)),
    )
    result = picknorm.search_n_point_norm(spec, phi, sc)
    _emit(_json_line(result.to_json_dict()), out)
    return 0


def _cmd_interp(config, fmt, out):
    points = [_complex_from(z) for z in config["points"]]
    targets = [_complex_from(w) for w in config["targets"]]
    sol = interpolation.pick_solve(points, targets)
    payload = sol.to_json_dict()
    payload["residual"] = sol.residual(points, targets)
    _emit(_json_line(payload), out)
    return 0


def _cmd_sarason(config, fmt, out):
    A = _matrix_from(config["A"])
    f = poly_from_json(config["f"])
    problem = interpolation.ModelSpaceProblem(
        A, f, spectral_margin=float(config.get("spectral_margin", 1e-6))
    )
    sol = interpolation.sarason_solve(problem)
    fA = interpolation.eval_on_matrix(f, A)
    bA = interpolation.eval_on_matrix(sol.blaschke, A)
    payload = sol.to_json_dict()
    payload["frobenius_residual"] = float(np.linalg.norm(fA - bA))
    _emit(_json_line(payload), out)
    return 0


def _cmd_shifts(config, fmt, out):
    report = shifts.weight_inequality_scan(
        int(config["d"]),
        Fraction(str(config.get("s", 0))),
        int(config.get("k_max", 60)),
        int(config.get("alpha_max", 60)),
        inject_violation=bool(config.get("inject_violation", False)),
    )
    _emit(_json_line(report.to_json_dict()), out)
    return 0 if report.ok else 1


def _cmd_embed(config, fmt, out):
    op = config.get("op", "asymptotics")
    if op == "asymptotics":
        report = embeddings.coefficient_asymptotics_report(
            int(config["d"]), int(config.get("nmax", 10000))
        )
        if fmt == "csv":
            lines = ["n,a_n,ratio"]
            for n, a_n, ratio in report.to_csv_rows():
                lines.append("%d,%.17g,%.17g" % (n, a_n, ratio))
            _emit("\n".join(lines) + "\n", out)
        else:
            _emit(_json_line(report.to_json_dict()), out)
        return 0 if report.ok else 1
    if op == "partition":
        bset = embeddings.boundary_decomposition(
            int(config["d"]), int(config.get("cap", 10))
        )
        _emit(
            _json_line(
                {"d": bset.d, "cap": bset.degree_cap, "count": len(bset.indices)}
            ),
            out,
        )
        return 0
    if op == "blaschke-powers":
        zero = _complex_from(config.get("zero", 0.5))
        norms = embeddings.blaschke_power_norms(
            zero=zero,
            n_max=int(config.get("n_max", 64)),
            trunc=int(config.get("trunc", 4096)),
        )
        payload = {str(a): vals for a, vals in norms.items()}
        _emit(_json_line(payload), out)
        return 0
    raise ConfigError(f"unknown embed op {op!r}")


def _cmd_experiment(config, fmt, out, seed):
    cfg = ExperimentConfig.from_json_dict(config)
    if seed is not None:
        cfg.seed = seed
    if fmt is not None:
        cfg.fmt = fmt
    if out is not None:
        cfg.out = out
    table, code = run_experiment(cfg)
    _emit(table.render(cfg.fmt), cfg.out)
    return code


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="multnorm",
        description="n-point multiplier norms, interpolation and shift scans",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in (
        "kernel",
        "picknorm",
        "search",
        "interp",
        "sarason",
        "shifts",
        "embed",
        "experiment",
    ):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="path to a JSON config")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", default=None)
        p.add_argument("--format", choices=("csv", "json"), default=None)
        p.add_argument("--quiet", action="store_true")
    return parser


_NUMERICAL_ERRORS = (
    ExperimentError,
    shifts.ScanViolation,
    shifts.RatioMonotonicityError,
    picknorm.SingularGramError,
    picknorm.CharacterizationError,
    interpolation.InterpolationError,
    kernels.KernelError,
)


def cli_dispatch(argv) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        with open(args.config) as fh:
            config = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return 2
    fmt = args.format or config.get("format", "csv" if args.command == "experiment" else "text")
    try:
        if args.command == "kernel":
            return _cmd_kernel(config, fmt, args.out)
        if args.command == "picknorm":
            return _cmd_picknorm(config, fmt, args.out)
        if args.command == "search":
            return _cmd_search(config, fmt, args.out, args.seed)
        if args.command == "interp":
            return _cmd_interp(config, fmt, args.out)
        if args.command == "sarason":
            return _cmd_sarason(config, fmt, args.out)
        if args.command == "shifts":
            return _cmd_shifts(config, fmt, args.out)
        if args.command == "embed":
            return _cmd_embed(config, fmt, args.out)
        if args.command == "experiment":
            return _cmd_experiment(
                config, args.format or config.get("format"), args.out, args.seed
            )
    except (ConfigError, KeyError, TypeError, ValueError) as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return 2
    except _NUMERICAL_ERRORS as exc:
        sys.stdout.write(
            _json_line({"error": type(exc).__name__, "detail": str(exc)})
        )
        return 1
    return 2


def main():
    sys.exit(cli_dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
