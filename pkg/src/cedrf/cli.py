"""Command-line front end.

Every command produces either a curve table (CSV, JSON or SVG) or a list of
simulation records (CSV or JSON). Options may also come from a JSON file
given with ``--config``; flags on the command line take precedence.

Exit codes: 0 success, 2 invalid input, 3 I/O failure, 4 internal error.
"""
from __future__ import annotations

import argparse
import io
import json
import math
import sys

import numpy as np

from . import binary, gaussian, simulator
from .errors import DomainError
from .rdmath import binary_entropy
from .svg import emit_svg

EXIT_OK, EXIT_VALIDATION, EXIT_IO, EXIT_INTERNAL = 0, 2, 3, 4

# options that never appear in the emitted "parameters" block
_META = {"config", "format", "output", "chunks", "command"}


class CliValidationError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliValidationError(message)


# ------------------------------------------------------------------ parsing helpers


def _floats(value, name):
    if value is None:
        return None
    if isinstance(value, (int, float)):
        return [float(value)]
    if isinstance(value, str):
        parts = [p for p in value.split(",") if p.strip()]
    else:
        parts = list(value)
    try:
        return [float(p) for p in parts]
    except (TypeError, ValueError):
        raise CliValidationError(f"--{name} expects comma-separated numbers, got {value!r}")


def _float(value, name):
    vals = _floats(value, name)
    if vals is None:
        return None
    if len(vals) != 1:
        raise CliValidationError(f"--{name} expects a single number, got {value!r}")
    return vals[0]


def _int(value, name):
    v = _float(value, name)
    if v is None:
        return None
    if v != int(v):
        raise CliValidationError(f"--{name} expects an integer, got {value!r}")
    return int(v)


def _require(args, name):
    v = getattr(args, name)
    if v is None:
        raise CliValidationError(f"--{name.replace('_', '-')} is required")
    return v


def _sweep(args, allowed, default=None):
    raw = args.sweep if args.sweep is not None else default
    if raw is None:
        return None
    if isinstance(raw, str):
        raw = raw.split()
    if len(raw) != 4:
        raise CliValidationError("--sweep expects VAR START STOP STEPS")
    var, start, stop, steps = raw
    var = str(var)
    if var not in allowed:
        raise CliValidationError(f"sweep variable must be one of {', '.join(allowed)}, got {var!r}")
    start, stop = _float(start, "sweep"), _float(stop, "sweep")
    steps = _int(steps, "sweep")
    if steps < 1:
        raise CliValidationError(f"sweep steps must be at least 1, got {steps}")
    pts = np.linspace(start, stop, steps + 1)
    if var == "L":
        if start < 1 or stop < 1:
            raise CliValidationError("sweep over L needs values >= 1")
        pts = np.unique(np.round(pts).astype(np.int64))
    return var, pts


def _common(p, seed=False):
    p.add_argument("--config", help="JSON file with option values")
    p.add_argument("--format", choices=("csv", "json", "svg"))
    p.add_argument("--output", "-o", help="output path (default: stdout)")
    if seed:
        p.add_argument("--seed")
        p.add_argument("--chunks", help="worker threads for the simulation")


def build_parser():
    parser = _Parser(prog="cedrf", description="Compress-and-estimate distortion-rate toolkit")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("gauss-centralized", help="joint-encoder CE curve vs indirect DRF")
    p.add_argument("--gammas")
    p.add_argument("--sweep", nargs=4, metavar=("VAR", "START", "STOP", "STEPS"))
    _common(p)

    p = sub.add_parser("gauss-distributed", help="one encoder per observation")
    p.add_argument("--gammas")
    p.add_argument("--rates")
    p.add_argument("--sweep", nargs=4, metavar=("VAR", "START", "STOP", "STEPS"))
    _common(p)

    p = sub.add_parser("gauss-region", help="two-encoder rate-region boundary")
    p.add_argument("--gammas")
    p.add_argument("--target")
    p.add_argument("--points")
    _common(p)

    p = sub.add_parser("gauss-asymptotic", help="equal SNR and rates, growing L")
    p.add_argument("--gamma")
    p.add_argument("--sum-rate", dest="sum_rate")
    p.add_argument("--L", dest="L")
    p.add_argument("--sweep", nargs=4, metavar=("VAR", "START", "STOP", "STEPS"))
    _common(p)

    p = sub.add_parser("binary-cedrf", help="binary CE distortion by enumeration")
    p.add_argument("--pi")
    p.add_argument("--alphas")
    p.add_argument("--rates")
    p.add_argument("--sweep", nargs=4, metavar=("VAR", "START", "STOP", "STEPS"))
    _common(p)

    p = sub.add_parser("binary-rd", help="single-observer CE curve with baselines")
    p.add_argument("--pi")
    p.add_argument("--alpha")
    p.add_argument("--sweep", nargs=4, metavar=("VAR", "START", "STOP", "STEPS"))
    _common(p)

    p = sub.add_parser("binary-asymptotic", help="uniform source, growing L")
    p.add_argument("--alpha")
    p.add_argument("--sum-rate", dest="sum_rate")
    p.add_argument("--L", dest="L")
    p.add_argument("--sweep", nargs=4, metavar=("VAR", "START", "STOP", "STEPS"))
    _common(p)

    p = sub.add_parser("simulate", help="Monte Carlo of the test channels")
    p.add_argument("--family", choices=("gaussian", "gaussian-centralized", "binary"))
    p.add_argument("--gammas")
    p.add_argument("--pi")
    p.add_argument("--alphas")
    p.add_argument("--rates")
    p.add_argument("--rate")
    p.add_argument("--n")
    _common(p, seed=True)

    p = sub.add_parser("codebook", help="finite-blocklength random-codebook experiment")
    p.add_argument("--pi")
    p.add_argument("--alpha")
    p.add_argument("--rate")
    p.add_argument("--n", help="comma-separated blocklengths")
    p.add_argument("--trials")
    _common(p, seed=True)
    return parser


def _apply_config(args):
    if not args.config:
        return
    with open(args.config, encoding="utf-8") as fh:
        try:
            cfg = json.load(fh)
        except json.JSONDecodeError as exc:
            raise CliValidationError(f"config file is not valid JSON: {exc.msg}")
    if not isinstance(cfg, dict):
        raise CliValidationError("config file must hold a JSON object")
    for key, value in cfg.items():
        dest = key.replace("-", "_")
        if dest in ("command", "config") or not hasattr(args, dest):
            raise CliValidationError(f"unknown config key {key!r} for {args.command}")
        if getattr(args, dest) is None:
            setattr(args, dest, value)


# ------------------------------------------------------------------ commands


class Table:
    def __init__(self, columns, rows, parameters):
        self.columns = list(columns)
        self.rows = [list(r) for r in rows]
        self.parameters = parameters


class Records:
    def __init__(self, results, parameters, seed=None, stderr=None):
        self.results = results
        self.parameters = parameters
        self.seed = seed
        self.stderr = stderr


def cmd_gauss_centralized(args):
    model = gaussian.GaussianObservationModel(tuple(_floats(_require(args, "gammas"), "gammas")))
    _, pts = _sweep(args, ("R",), ("R", 0, 4, 200))
    rows = [(r, gaussian.cedrf_centralized(model, r), gaussian.idrf(model, r),
             gaussian.mmse_full(model)) for r in pts]
    return Table(("R", "D_ce", "D_idrf", "mmse"), rows, {"gammas": list(model.gammas)})


def cmd_gauss_distributed(args):
    model = gaussian.GaussianObservationModel(tuple(_floats(_require(args, "gammas"), "gammas")))
    params = {"gammas": list(model.gammas)}
    if args.rates is not None:
        if args.sweep is not None:
            raise CliValidationError("give either --rates or --sweep, not both")
        rates = _floats(args.rates, "rates")
        d = gaussian.cedrf_distributed(model, rates)
        cols = [f"R_{l + 1}" for l in range(model.L)] + ["D_ce", "mmse"]
        params["rates"] = rates
        return Table(cols, [list(rates) + [d, gaussian.mmse_full(model)]], params)
    _, pts = _sweep(args, ("Rsum",), ("Rsum", 0, 6, 60))
    rows = [(r, gaussian.cedrf_distributed(model, [r / model.L] * model.L),
             gaussian.mmse_full(model)) for r in pts]
    return Table(("R_sum", "D_ce", "mmse"), rows, params)


def cmd_gauss_region(args):
    model = gaussian.GaussianObservationModel(tuple(_floats(_require(args, "gammas"), "gammas")))
    target = _float(_require(args, "target"), "target")
    points = _int(args.points, "points") if args.points is not None else 101
    contour = gaussian.region_contour(model, target, points)
    # traverse from the R1-axis intercept towards the R2 axis
    rows = [tuple(p) for p in contour.points[::-1]]
    return Table(("R1", "R2"), rows,
                 {"gammas": list(model.gammas), "target": target, "points": points})


def cmd_gauss_asymptotic(args):
    g = _float(_require(args, "gamma"), "gamma")
    var, pts = _sweep(args, ("L", "Rsum"), ("L", 1, 100, 99))
    params = {"gamma": g}
    if var == "L":
        r = _float(_require(args, "sum_rate"), "sum-rate")
        params["sum_rate"] = r
        lim = gaussian.cedrf_asymptotic_limit(g, r)
        rows = [(int(L), gaussian.cedrf_symmetric_sumrate(g, r, int(L)), lim) for L in pts]
        return Table(("L", "D_ce", "D_limit"), rows, params)
    L = _int(_require(args, "L"), "L")
    params["L"] = L
    rows = [(r, gaussian.cedrf_symmetric_sumrate(g, r, L), gaussian.cedrf_asymptotic_limit(g, r))
            for r in pts]
    return Table(("R_sum", "D_ce", "D_limit"), rows, params)


def cmd_binary_cedrf(args):
    pi = _float(_require(args, "pi"), "pi")
    alphas = _floats(_require(args, "alphas"), "alphas")
    model = binary.BinaryObservationModel(pi, tuple(alphas))
    params = {"pi": pi, "alphas": alphas}
    if args.rates is not None:
        if args.sweep is not None:
            raise CliValidationError("give either --rates or --sweep, not both")
        rates = _floats(args.rates, "rates")
        params["rates"] = rates
        cols = [f"R_{l + 1}" for l in range(model.L)] + ["D_ce"]
        return Table(cols, [list(rates) + [binary.cedrf_exact(model, rates)]], params)
    _, pts = _sweep(args, ("Rsum",), ("Rsum", 0, 2 * model.L, 40))
    rows = [(r, binary.cedrf_exact(model, [r / model.L] * model.L)) for r in pts]
    return Table(("R_sum", "D_ce"), rows, params)


def cmd_binary_rd(args):
    pi = _float(_require(args, "pi"), "pi")
    alpha = _float(_require(args, "alpha"), "alpha")
    model = binary.BinaryObservationModel(pi, (alpha,))
    hq = binary_entropy(model.observation_bias(0))
    _, pts = _sweep(args, ("R",), ("R", 0.0, hq, 200))
    rows = [(r, binary.cedrf_exact(model, [r]), binary.idrf_binary(pi, alpha, r),
             binary.drf_bernoulli(pi, r)) for r in pts]
    return Table(("R", "D_ce", "D_idrf", "D_drf"), rows, {"pi": pi, "alpha": alpha})


def cmd_binary_asymptotic(args):
    alpha = _float(_require(args, "alpha"), "alpha")
    var, pts = _sweep(args, ("L", "Rsum"), ("L", 1, 100, 99))
    params = {"alpha": alpha}
    if var == "L":
        rsums = _floats(_require(args, "sum_rate"), "sum-rate")
        params["sum_rate"] = rsums
        single = len(rsums) == 1
        cols = ["L"]
        for r in rsums:
            sfx = "" if single else f"@R={r:g}"
            cols += [f"D_ce{sfx}", f"D_limit{sfx}", f"D_bound{sfx}"]
        rows = []
        for L in pts:
            row = [int(L)]
            for r in rsums:
                row += [binary.cedrf_symmetric(alpha, r, int(L)),
                        binary.cedrf_asymptotic(alpha, r), binary.cedrf_asymptotic_bound(alpha, r)]
            rows.append(row)
        return Table(cols, rows, params)
    L = _int(_require(args, "L"), "L")
    params["L"] = L
    rows = [(r, binary.cedrf_symmetric(alpha, r, L), binary.cedrf_asymptotic(alpha, r),
             binary.cedrf_asymptotic_bound(alpha, r)) for r in pts]
    return Table(("R_sum", "D_ce", "D_limit", "D_bound"), rows, params)


def _seed(args):
    if args.seed is None:
        raise CliValidationError("--seed is required for randomized commands")
    seed = _int(args.seed, "seed")
    if not 0 <= seed < 2 ** 64:
        raise CliValidationError(f"--seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def cmd_simulate(args):
    family = _require(args, "family")
    seed = _seed(args)
    n = _int(args.n, "n") if args.n is not None else 100_000
    chunks = _int(args.chunks, "chunks") if args.chunks is not None else 1
    config = simulator.SimulationConfig(n, seed, chunks)
    params = {"family": family, "n": n}
    if family == "gaussian":
        model = gaussian.GaussianObservationModel(tuple(_floats(_require(args, "gammas"), "gammas")))
        rates = _floats(_require(args, "rates"), "rates")
        params.update(gammas=list(model.gammas), rates=rates)
        res = simulator.simulate_gaussian_distributed(model, rates, config)
        extra = {"closed_form": gaussian.cedrf_distributed(model, rates)}
    elif family == "gaussian-centralized":
        model = gaussian.GaussianObservationModel(tuple(_floats(_require(args, "gammas"), "gammas")))
        rate = _float(_require(args, "rate"), "rate")
        params.update(gammas=list(model.gammas), rate=rate)
        res = simulator.simulate_gaussian_centralized(model, rate, config)
        extra = {"closed_form": gaussian.cedrf_centralized(model, rate)}
    elif family == "binary":
        pi = _float(_require(args, "pi"), "pi")
        alphas = _floats(_require(args, "alphas"), "alphas")
        rates = _floats(_require(args, "rates"), "rates")
        model = binary.BinaryObservationModel(pi, tuple(alphas))
        params.update(pi=pi, alphas=alphas, rates=rates)
        res = simulator.simulate_binary(model, rates, config)
        extra = {}
        if model.L <= binary.MAX_EXACT_L:
            extra["closed_form"] = binary.cedrf_exact(model, rates)
        if model.L <= 16:
            extra["testchannel_exact"] = simulator.testchannel_error_exact(model, rates)
    else:
        raise CliValidationError(f"unknown family {family!r}")
    record = res.as_dict()
    record.update(extra)
    return Records([record], params, seed=seed, stderr=res.std_error)


def cmd_codebook(args):
    pi = _float(args.pi, "pi") if args.pi is not None else 0.5
    alpha = _float(_require(args, "alpha"), "alpha")
    rate = _float(_require(args, "rate"), "rate")
    seed = _seed(args)
    ns = [int(v) for v in _floats(_require(args, "n"), "n")]
    trials = _int(args.trials, "trials") if args.trials is not None else 200
    model = binary.BinaryObservationModel(pi, (alpha,))
    results = []
    for n in ns:
        cfg = simulator.CodebookExperimentConfig(n, rate, trials, seed)
        res = simulator.simulate_binary_codebook(model, cfg)
        results.append({
            "blocklength": n,
            "end_distortion": res.mean_distortion,
            "end_std_error": res.std_error,
            "local_distortion": res.local_distortions[0],
            "local_std_error": res.local_std_errors[0],
            "local_drf": binary.local_drf(model, 0, rate),
        })
    params = {"pi": pi, "alpha": alpha, "rate": rate, "n": ns, "trials": trials}
    return Records(results, params, seed=seed)


COMMANDS = {
    "gauss-centralized": cmd_gauss_centralized,
    "gauss-distributed": cmd_gauss_distributed,
    "gauss-region": cmd_gauss_region,
    "gauss-asymptotic": cmd_gauss_asymptotic,
    "binary-cedrf": cmd_binary_cedrf,
    "binary-rd": cmd_binary_rd,
    "binary-asymptotic": cmd_binary_asymptotic,
    "simulate": cmd_simulate,
    "codebook": cmd_codebook,
}


# ------------------------------------------------------------------ rendering


def format_number(v) -> str:
    """Locale-independent decimal with 12 significant digits."""
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return format(v, ".12g")


def render_csv(columns, rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(columns) + "\n")
    for r in rows:
        buf.write(",".join(format_number(v) for v in r) + "\n")
    return buf.getvalue()


def _json_value(v):
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else str(v)
    if isinstance(v, (list, tuple)):
        return [_json_value(x) for x in v]
    return v


def _flatten(record):
    cols, vals = [], []
    for k, v in record.items():
        if isinstance(v, (list, tuple)):
            for i, x in enumerate(v):
                cols.append(f"{k}_{i + 1}")
                vals.append(x)
        else:
            cols.append(k)
            vals.append(v)
    return cols, vals


def render(command, result, fmt) -> str:
    if isinstance(result, Table):
        if fmt == "csv":
            return render_csv(result.columns, result.rows)
        if fmt == "svg":
            return emit_svg(result.columns, result.rows, title=command)
        doc = {"command": command, "parameters": _json_value_dict(result.parameters),
               "results": [{c: _json_value(v) for c, v in zip(result.columns, r)}
                           for r in result.rows]}
        return json.dumps(doc, indent=2) + "\n"
    if fmt == "svg":
        raise CliValidationError(f"{command} produces records; use --format csv or json")
    if fmt == "csv":
        cols, _ = _flatten(result.results[0])
        return render_csv(cols, [_flatten(r)[1] for r in result.results])
    doc = {"command": command, "parameters": _json_value_dict(result.parameters),
           "results": [_json_value_dict(r) for r in result.results]}
    if result.seed is not None:
        doc["seed"] = result.seed
    if result.stderr is not None:
        doc["stderr"] = _json_value(result.stderr)
    return json.dumps(doc, indent=2) + "\n"


def _json_value_dict(d):
    return {k: _json_value(v) for k, v in d.items()}


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout if stdout is not None else sys.stdout
    stderr = stderr if stderr is not None else sys.stderr
    try:
        args = build_parser().parse_args(argv)
        if args.command is None:
            raise CliValidationError(f"a command is required: {', '.join(COMMANDS)}")
        _apply_config(args)
        default_fmt = "json" if args.command in ("simulate", "codebook") else "csv"
        fmt = args.format or default_fmt
        if fmt not in ("csv", "json", "svg"):
            raise CliValidationError(f"--format must be csv, json or svg, got {fmt!r}")
        text = render(args.command, COMMANDS[args.command](args), fmt)
    except (CliValidationError, DomainError, ValueError) as exc:
        print(f"cedrf: error: {exc}", file=stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"cedrf: I/O error: {exc}", file=stderr)
        return EXIT_IO
    except Exception as exc:  # noqa: BLE001
        print(f"cedrf: internal error: {type(exc).__name__}: {exc}", file=stderr)
        return EXIT_INTERNAL
    try:
        if args.output and args.output != "-":
            with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        else:
            stdout.write(text)
    except OSError as exc:
        print(f"cedrf: I/O error: {exc}", file=stderr)
        return EXIT_IO
    return EXIT_OK


def main(argv=None):
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
