"""
Command line front end.

Every subcommand writes one output file (``--out``, default stdout) holding a
header with the tool version, the echoed configuration, a timestamp and the
elapsed time, followed by data rows.  CSV headers are ``#`` comment lines;
JSON output is ``{"header": ..., "records": [...]}``.

Exit codes: 0 success, 2 usage error, 3 resource budget exceeded,
4 numerical failure.  Errors are reported on stderr as one JSON line.
"""

import argparse
import csv
import io
import json
import math
import re
import sys
import time
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from typing import List, Optional

import numpy as np

from . import __version__
from ._sweep import default_threads, parallel_map
from .dephasing import (
    TAU_RULES, X_MAX_N, Z_MAX_N, negativity_scan, robustness_scaling,
)
from .errors import ConfigError, NumericalError, ResourceError, TwoBecError
from .husimi import circle_diagram, qfunction_grid, reduced_state_1
from .pure import (
    MAP2D_MAX_GRID, MAP2D_MAX_N, RationalGateTime, default_steps, entanglement_entropy,
    evolve_xz, evolve_zz, initial_xx_state, map2d_entropy, rational_dip_entropy, scan_entropy,
)
from .witness import evaluate_witness, random_product_states, witness_scan

SUBCOMMANDS = ("scan", "map2d", "dips", "decohere", "robustness", "witness", "qfunc", "circles")

_PI_RE = re.compile(r"^\s*([+-]?[\d.]*)\s*\*?\s*pi\s*(?:/\s*(\d+))?\s*$")


def parse_angle(text):
    """Radians as a float, or a multiple of pi such as 'pi/8', '3pi/8', '0.5*pi'."""
    text = str(text).strip()
    m = _PI_RE.match(text)
    if m:
        coef = m.group(1)
        coef = 1.0 if coef in ("", "+") else -1.0 if coef == "-" else float(coef)
        denom = int(m.group(2)) if m.group(2) else 1
        return coef * math.pi / denom
    return float(text)


def parse_pi_fraction(text):
    """Fraction of pi, e.g. '1/8' -> tau = pi/8."""
    return Fraction(str(text).strip())


def fmt(x):
    """12 significant digits, rendered as the shortest float repr."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(float(f"{x:.12g}"))


def _json_value(x):
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, str):
        return x
    x = float(x)
    if not math.isfinite(x):
        return None
    return float(f"{x:.12g}")


@dataclass
class RunConfig:
    subcommand: str
    n: Optional[int] = None
    tau_min: float = 0.0
    tau_max: Optional[float] = None
    steps: Optional[int] = None
    taus: Optional[List[float]] = None
    tau_prime_min: float = 0.0
    tau_prime_max: float = math.pi / 2
    tau_prime_steps: Optional[int] = None
    axis: str = "z"
    gamma: float = 0.0
    tau_rule: str = "const"
    tau_const: Optional[float] = None
    n_values: Optional[List[int]] = None
    m: Optional[int] = None
    d: Optional[int] = None
    n_theta: int = 101
    n_phi: int = 200
    random_products: int = 0
    out: Optional[str] = None
    format: str = "csv"
    threads: int = field(default_factory=default_threads)
    seed: int = 0
    override_budget: bool = False

    def tau_grid(self):
        if self.taus is not None:
            return np.array(self.taus, dtype=float)
        return np.linspace(self.tau_min, self.tau_max, self.steps)

    def tau_prime_grid(self):
        return np.linspace(self.tau_prime_min, self.tau_prime_max, self.tau_prime_steps)


def _fill_defaults(cfg):
    sub = cfg.subcommand
    if cfg.tau_max is None:
        cfg.tau_max = {
            "decohere": math.pi / 4,
            "witness": 2.0 / cfg.n if cfg.n else 0.1,
        }.get(sub, math.pi / 2)
    if cfg.steps is None:
        if sub in ("scan", "map2d") and cfg.n and cfg.n >= 1:
            cfg.steps = default_steps(cfg.n, cfg.tau_min, cfg.tau_max)
        else:
            cfg.steps = 21 if sub == "witness" else 9
    if cfg.tau_prime_steps is None:
        cfg.tau_prime_steps = cfg.steps
    return cfg


def validate(cfg):
    """Collect every usage and budget violation; raise once with all of them."""
    usage, resource = [], []
    sub = cfg.subcommand
    if sub not in SUBCOMMANDS:
        usage.append(f"unknown subcommand {sub!r}")
    needs_n = sub not in ("dips", "robustness")
    if needs_n and (cfg.n is None or cfg.n < 1):
        usage.append(f"--n must be a positive integer (got {cfg.n})")
    if sub == "dips":
        if cfg.m is None or cfg.d is None:
            usage.append("dips needs --m and --d, or --tau-pi")
        elif cfg.m < 1 or cfg.d < 1:
            usage.append(f"--m and --d must be >= 1 (got m={cfg.m}, d={cfg.d})")
        if cfg.n is not None and cfg.n < 1:
            usage.append(f"--n must be a positive integer (got {cfg.n})")
    if cfg.steps is not None and cfg.steps < 1:
        usage.append(f"--steps must be >= 1 (got {cfg.steps})")
    if sub == "map2d" and cfg.tau_prime_steps is not None and cfg.tau_prime_steps < 1:
        usage.append(f"--tau-prime-steps must be >= 1 (got {cfg.tau_prime_steps})")
    if cfg.tau_max is not None and cfg.tau_min > cfg.tau_max:
        usage.append(f"--tau-min ({cfg.tau_min}) must be <= --tau-max ({cfg.tau_max})")
    if sub == "map2d" and cfg.tau_prime_min > cfg.tau_prime_max:
        usage.append(
            f"--tau-prime-min ({cfg.tau_prime_min}) must be <= --tau-prime-max ({cfg.tau_prime_max})")
    values = [cfg.tau_min, cfg.tau_prime_min, cfg.tau_prime_max, cfg.gamma]
    values += [cfg.tau_max] if cfg.tau_max is not None else []
    values += list(cfg.taus or [])
    if not all(math.isfinite(v) for v in values):
        usage.append("angles and rates must be finite")
    if cfg.threads < 1:
        usage.append(f"--threads must be >= 1 (got {cfg.threads})")
    if cfg.format not in ("csv", "json"):
        usage.append(f"--format must be csv or json (got {cfg.format!r})")
    if sub in ("decohere", "robustness"):
        if cfg.axis not in ("z", "x"):
            usage.append(f"--axis must be z or x (got {cfg.axis!r})")
        if not cfg.gamma >= 0:
            usage.append(f"--gamma must be >= 0 (got {cfg.gamma})")
        if sub == "decohere" and cfg.tau_min < 0:
            usage.append(f"--tau-min must be >= 0 for decohere (got {cfg.tau_min})")
        if sub == "decohere" and cfg.taus is not None and min(cfg.taus) < 0:
            usage.append("--tau values must be >= 0 for decohere")
    if sub == "robustness":
        if cfg.tau_rule not in TAU_RULES:
            usage.append(f"--tau-rule must be one of {', '.join(TAU_RULES)} (got {cfg.tau_rule!r})")
        if not cfg.n_values or len(cfg.n_values) < 2:
            usage.append("--n-values needs at least two values")
        elif min(cfg.n_values) < 1:
            usage.append("--n-values must all be >= 1")
    if sub in ("qfunc",) and (cfg.n_theta < 2 or cfg.n_phi < 2):
        usage.append(f"--n-theta and --n-phi must be >= 2 (got {cfg.n_theta}, {cfg.n_phi})")
    if cfg.random_products < 0:
        usage.append("--random-products must be >= 0")

    if not cfg.override_budget:
        if sub in ("decohere", "robustness") and cfg.axis in ("z", "x"):
            limit = Z_MAX_N if cfg.axis == "z" else X_MAX_N
            ns = [cfg.n] if sub == "decohere" else list(cfg.n_values or [])
            for n in ns:
                if n is not None and n > limit:
                    resource.append(
                        f"--n {n} exceeds the default {cfg.axis}-dephasing budget N <= {limit}; "
                        "pass --override-budget to run anyway")
        if sub == "map2d":
            if cfg.n is not None and cfg.n > MAP2D_MAX_N:
                resource.append(f"--n {cfg.n} exceeds the default map2d budget N <= {MAP2D_MAX_N}")
            if max(cfg.steps or 0, cfg.tau_prime_steps or 0) > MAP2D_MAX_GRID:
                resource.append(
                    f"--steps/--tau-prime-steps exceed the default map2d budget of {MAP2D_MAX_GRID}")
    if usage:
        raise ConfigError(usage + resource)
    if resource:
        raise ResourceError(resource)
    return cfg


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser():
    parser = _Parser(prog="twobec", description="Entanglement dynamics of two coupled condensates.")
    parser.add_argument("--version", action="version", version=f"twobec {__version__}")
    subs = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--out", help="output path (default: stdout)")
        p.add_argument("--format", default="csv", choices=("csv", "json"))
        p.add_argument("--threads", type=int, default=default_threads())
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--override-budget", action="store_true",
                       help="acknowledge and lift the default size budgets")

    def grid(p, n_required=True):
        p.add_argument("--n", type=int, required=n_required)
        p.add_argument("--tau-min", type=parse_angle, default=0.0)
        p.add_argument("--tau-max", type=parse_angle)
        p.add_argument("--steps", type=int)
        p.add_argument("--tau", type=parse_angle, action="append",
                       help="explicit gate time (repeatable); overrides the range")
        p.add_argument("--tau-pi", type=parse_pi_fraction, action="append",
                       help="gate time as a fraction of pi, e.g. 1/8 (repeatable)")

    p = subs.add_parser("scan", help="entropy versus S^zS^z gate time")
    grid(p)
    common(p)

    p = subs.add_parser("map2d", help="entropy over (tau, tau') for the concatenated gates")
    grid(p)
    p.add_argument("--tau-prime-min", type=parse_angle, default=0.0)
    p.add_argument("--tau-prime-max", type=parse_angle, default=math.pi / 2)
    p.add_argument("--tau-prime-steps", type=int)
    common(p)

    p = subs.add_parser("dips", help="large-N entropy at tau = m pi/(4d)")
    p.add_argument("--m", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--tau-pi", type=parse_pi_fraction, action="append")
    p.add_argument("--n", type=int, help="also report the exact entropy at this N")
    common(p)

    p = subs.add_parser("decohere", help="log-negativity under z or x dephasing")
    grid(p)
    p.add_argument("--axis", default="z")
    p.add_argument("--gamma", type=float, default=0.0)
    common(p)

    p = subs.add_parser("robustness", help="N-scaling of the noisy/noiseless negativity ratio")
    p.add_argument("--axis", default="z")
    p.add_argument("--gamma", type=float, default=0.0)
    p.add_argument("--tau-rule", default="const")
    p.add_argument("--tau-const", type=parse_angle)
    p.add_argument("--n-values", type=lambda s: [int(v) for v in s.split(",") if v.strip()],
                   required=True)
    common(p)

    p = subs.add_parser("witness", help="EPR-type separability witness")
    grid(p)
    p.add_argument("--random-products", type=int, default=0,
                   help="instead evaluate this many seeded random product states")
    common(p)

    p = subs.add_parser("qfunc", help="Q-function of condensate 1 after the S^zS^z gate")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--tau", type=parse_angle, default=0.0)
    p.add_argument("--tau-prime", type=parse_angle, default=0.0)
    p.add_argument("--n-theta", type=int, default=101)
    p.add_argument("--n-phi", type=int, default=200)
    common(p)

    p = subs.add_parser("circles", help="circle-diagram data")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--tau", type=parse_angle, default=0.0)
    common(p)
    return parser


def config_from_args(argv):
    ns = build_parser().parse_args(argv)
    args = vars(ns)
    taus = None
    if args.get("tau") is not None and args["subcommand"] not in ("qfunc", "circles"):
        taus = list(args["tau"])
    if args.get("tau_pi") is not None:
        if args["subcommand"] == "dips":
            if len(args["tau_pi"]) != 1:
                raise ConfigError("dips takes a single --tau-pi")
            rt = RationalGateTime.from_fraction_of_pi(args["tau_pi"][0])
            args["m"], args["d"] = rt.m, rt.d
        else:
            taus = (taus or []) + [float(f) * math.pi for f in args["tau_pi"]]
    cfg = RunConfig(subcommand=args["subcommand"])
    for name in ("n", "tau_min", "tau_max", "steps", "tau_prime_min", "tau_prime_max",
                 "tau_prime_steps", "axis", "gamma", "tau_rule", "tau_const", "n_values",
                 "m", "d", "n_theta", "n_phi", "random_products", "out", "format",
                 "threads", "seed", "override_budget"):
        if name in args and args[name] is not None:
            setattr(cfg, name, args[name])
    if cfg.subcommand in ("qfunc", "circles"):
        cfg.taus = [args["tau"]]
        if cfg.subcommand == "qfunc":
            cfg.tau_prime_min = cfg.tau_prime_max = args["tau_prime"]
    else:
        cfg.taus = taus
    return _fill_defaults(cfg)


# ---------------------------------------------------------------- runners
# each returns (columns, rows, extra) with rows as lists of raw values

def _run_scan(cfg):
    recs = scan_entropy(cfg.n, cfg.tau_grid(), threads=cfg.threads)
    cols = ["tau", "entropy_bits", "entropy_max_bits", "entropy_normalized"]
    return cols, [[r.tau, r.entropy_bits, r.entropy_max_bits, r.entropy_normalized] for r in recs], None


def _run_map2d(cfg):
    emap = map2d_entropy(cfg.n, cfg.tau_grid(), cfg.tau_prime_grid(),
                         threads=cfg.threads, override_budget=cfg.override_budget)
    rows = [[float(t), float(tp), float(emap.entropy[i, j])]
            for i, t in enumerate(emap.taus) for j, tp in enumerate(emap.tau_primes)]
    return ["tau", "tau_prime", "entropy_bits"], rows, None


def _run_dips(cfg):
    rt = RationalGateTime(cfg.m, cfg.d)
    row = [rt.m, rt.d, rt.tau, rational_dip_entropy(rt)]
    cols = ["m", "d", "tau", "dip_entropy_bits"]
    if cfg.n is not None:
        cols += ["n", "entropy_bits"]
        row += [cfg.n, entanglement_entropy(evolve_zz(initial_xx_state(cfg.n), rt.tau))]
    return cols, [row], None


def _run_decohere(cfg):
    recs = negativity_scan(cfg.axis, cfg.n, cfg.tau_grid(), cfg.gamma,
                           threads=cfg.threads, override_budget=cfg.override_budget)
    return (["tau", "gamma", "axis", "neg_bits", "ratio"],
            [[r.tau, r.gamma, r.axis, r.neg_bits, r.ratio] for r in recs], None)


def _run_robustness(cfg):
    fit = robustness_scaling(cfg.axis, cfg.tau_rule, cfg.gamma, cfg.n_values,
                             tau_const=cfg.tau_const, threads=cfg.threads,
                             override_budget=cfg.override_budget)
    rows = [[n, t, r] for n, t, r in zip(fit.n_values, fit.taus, fit.ratios)]
    extra = {
        "exponent_gamma": fit.exponent_gamma,
        "r_squared": fit.r_squared,
        "quadratic_r_squared": fit.quadratic_r_squared,
        "superpolynomial": fit.superpolynomial,
    }
    return ["n", "tau", "ratio"], rows, extra


def _run_witness(cfg):
    if cfg.random_products:
        samples = list(random_product_states(cfg.random_products, cfg.n, cfg.seed))
        results = parallel_map(lambda s: evaluate_witness(s[1]), samples, cfg.threads)
        rows = [[i, *angles, w.lhs, w.rhs, w.margin, w.entangled_flag]
                for i, ((angles, _), w) in enumerate(zip(samples, results))]
        return (["sample", "theta1", "phi1", "theta2", "phi2", "lhs", "rhs", "margin",
                 "entangled_flag"], rows, None)
    recs = witness_scan(cfg.n, cfg.tau_grid(), threads=cfg.threads)
    cols = ["tau", "lhs", "rhs", "margin", "cv_var_prediction", "entangled_flag",
            "var_a", "cv_margin", "cv_valid"]
    rows = [[r.tau, r.witness.lhs, r.witness.rhs, r.witness.margin, r.prediction.predicted_var,
             r.witness.entangled_flag, r.var_a, r.cv_margin, r.prediction.within_domain]
            for r in recs]
    return cols, rows, None


def _run_qfunc(cfg):
    tau = cfg.taus[0]
    state = evolve_zz(initial_xx_state(cfg.n), tau)
    if cfg.tau_prime_min:
        state = evolve_xz(state, cfg.tau_prime_min)
    grid = qfunction_grid(reduced_state_1(state), cfg.n, cfg.n_theta, cfg.n_phi)
    rows = [[float(th), float(ph), float(grid.values[i, j])]
            for i, th in enumerate(grid.thetas) for j, ph in enumerate(grid.phis)]
    return ["theta", "phi", "q"], rows, {"sphere_integral": grid.sphere_integral()}


def _run_circles(cfg):
    diagram = circle_diagram(cfg.n, cfg.taus[0])
    rows = [[e.k, e.angle, e.radius, e.opacity] for e in diagram.entries]
    return ["k", "angle", "radius", "opacity"], rows, None


RUNNERS = {
    "scan": _run_scan, "map2d": _run_map2d, "dips": _run_dips, "decohere": _run_decohere,
    "robustness": _run_robustness, "witness": _run_witness, "qfunc": _run_qfunc,
    "circles": _run_circles,
}


def render(header, columns, rows, extra, fmt_name):
    if fmt_name == "json":
        doc = {
            "header": header,
            "records": [{c: _json_value(v) for c, v in zip(columns, row)} for row in rows],
        }
        if extra is not None:
            doc["summary"] = {k: _json_value(v) for k, v in extra.items()}
        return json.dumps(doc, indent=1) + "\n"
    buf = io.StringIO()
    buf.write("# " + json.dumps(header, sort_keys=True) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    if extra is not None:
        buf.write("# summary " + json.dumps({k: _json_value(v) for k, v in extra.items()},
                                            sort_keys=True) + "\n")
    return buf.getvalue()


def data_rows(text, fmt_name="csv"):
    """Data rows of an output document, ignoring header lines (used for determinism checks)."""
    if fmt_name == "json":
        doc = json.loads(text)
        return [json.dumps(r, sort_keys=True) for r in doc["records"]]
    return [line for line in text.splitlines() if line and not line.startswith("#")]


def read_header(text, fmt_name="csv"):
    if fmt_name == "json":
        return json.loads(text)["header"]
    return json.loads(text.splitlines()[0][2:])


def run(cfg, argv=None, stdout=None):
    """Execute a validated config; returns the rendered document."""
    validate(cfg)
    stdout = stdout or sys.stdout
    start = time.perf_counter()
    columns, rows, extra = RUNNERS[cfg.subcommand](cfg)
    header = {
        "tool": "twobec",
        "version": __version__,
        "config": asdict(cfg),
        "argv": list(argv) if argv is not None else None,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "elapsed_seconds": round(time.perf_counter() - start, 6),
    }
    text = render(header, columns, rows, extra, cfg.format)
    if cfg.out:
        with open(cfg.out, "w", newline="") as fh:
            fh.write(text)
    if cfg.subcommand == "dips" and not cfg.out:
        stdout.write(fmt(rows[0][3]) + "\n")
    elif not cfg.out:
        stdout.write(text)
    return text


def _report(exc, stream):
    messages = getattr(exc, "messages", None) or [str(exc)]
    stream.write(json.dumps({"error": exc.kind, "exit": exc.exit_code,
                             "messages": messages}) + "\n")


def main(argv=None, stdout=None, stderr=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    stderr = stderr or sys.stderr
    try:
        cfg = config_from_args(argv)
        run(cfg, argv=argv, stdout=stdout)
    except TwoBecError as exc:
        _report(exc, stderr)
        return exc.exit_code
    except (np.linalg.LinAlgError, FloatingPointError) as exc:
        _report(NumericalError(str(exc)), stderr)
        return NumericalError.exit_code
    return 0


def main_entry():
    sys.exit(main())
