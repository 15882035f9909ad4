"""Command-line front end: ``akms eval | sweep | sample | validate | models``.

SNR values on the command line are linear except ``--snr-mean-db`` and the
``*_db`` sweep variables.  Output is CSV with ``#`` metadata lines, one
header line and shortest round-trip numbers so values parse back exactly.

Exit codes: 0 success, 1 validation failure, 2 usage or parameter error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import core, metrics, sampler, validation, zoo
from .errors import ConsistencyError, ConvergenceError, DomainError

EXIT_OK, EXIT_VALIDATION, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3

PARAM_FLAGS = ("alpha", "kappa", "mu", "m")
SWEEP_VARS = ("snr_db", "threshold_db", "alpha", "kappa", "mu", "m")
METRICS = ("pdf", "cdf", "outage", "outage-asymptotic", "capacity", "capacity-asymptotic")
CONFIG_KEYS = {
    "alpha", "kappa", "mu", "m", "snr-mean-db", "model", "at", "stat", "var", "start", "stop",
    "points", "log", "n", "seed", "method", "out", "suite", "tol-scale", "workers",
}


class UsageError(Exception):
    pass


def fmt(x) -> str:
    # shortest string that parses back to the same double
    return repr(float(x))


# -- parameter resolution ---------------------------------------------------------


def read_config(path: str) -> dict[str, str]:
    """Flat ``key = value`` file; ``#`` starts a comment."""
    out = {}
    try:
        lines = open(path, encoding="utf-8").read().splitlines()
    except OSError as exc:
        raise UsageError(f"--config: cannot read {path}: {exc.strerror}") from None
    for num, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"--config: line {num} is not 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("_", "-")
        if key not in CONFIG_KEYS:
            raise UsageError(f"--config: unknown key {key!r} on line {num}")
        out[key] = value
    return out


def _apply_config(ns, parser):
    if not getattr(ns, "config", None):
        return
    for key, value in read_config(ns.config).items():
        dest = key.replace("-", "_")
        if not hasattr(ns, dest) or getattr(ns, dest) not in (None, False):
            continue  # flags win
        action = next((a for a in parser._actions if a.dest == dest), None)
        if action is None:
            continue
        if isinstance(action, argparse._StoreTrueAction):
            setattr(ns, dest, value.lower() in ("1", "true", "yes", "on"))
            continue
        try:
            setattr(ns, dest, action.type(value) if action.type else value)
        except (TypeError, ValueError):
            raise UsageError(f"--config: bad value for {key}: {value!r}") from None


def parse_model_spec(text: str) -> zoo.NamedModel:
    """``"hoyt"`` or ``"hoyt,q=0.5"`` (listing defaults fill in missing parameters)."""
    parts = [s.strip() for s in text.split(",") if s.strip()]
    if not parts:
        raise UsageError("--model: empty model name")
    overrides = {}
    for item in parts[1:]:
        if "=" not in item:
            raise UsageError(f"--model: expected key=value, got {item!r}")
        k, v = item.split("=", 1)
        try:
            overrides[k.strip()] = float(v)
        except ValueError:
            raise UsageError(f"--model: {k.strip()} must be a number, got {v!r}") from None
    try:
        return zoo.NamedModel.with_defaults(parts[0], **overrides)
    except DomainError as exc:
        raise UsageError(f"--model: {exc}") from None


def _mean_snr(ns) -> float:
    db = getattr(ns, "snr_mean_db", None)
    return 1.0 if db is None else 10.0 ** (db / 10.0)


def resolve_params(ns, required: bool = True) -> core.AkmsParams | None:
    given = [f for f in PARAM_FLAGS if getattr(ns, f, None) is not None]
    mean = _mean_snr(ns)
    if not math.isfinite(mean) or mean <= 0:
        raise UsageError("--snr-mean-db: must give a finite positive mean SNR")
    if getattr(ns, "model", None):
        if given:
            raise UsageError(f"--model cannot be combined with --{given[0]}")
        try:
            return zoo.to_akms(parse_model_spec(ns.model), mean).params
        except DomainError as exc:
            raise UsageError(f"--model: {exc}") from None
    if not given and not required:
        return None
    missing = [f for f in PARAM_FLAGS if f not in given]
    if missing:
        raise UsageError(f"--{missing[0]} is required (or use --model)")
    for f in PARAM_FLAGS:
        try:
            core.AkmsParams(**{k: (getattr(ns, k) if k == f else 1.0) for k in PARAM_FLAGS})
        except DomainError as exc:
            raise UsageError(f"--{f}: {exc}") from None
    return core.AkmsParams(ns.alpha, ns.kappa, ns.mu, ns.m, mean)


def _float_list(text: str, flag: str) -> list[float]:
    try:
        vals = [float(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise UsageError(f"{flag}: expected comma-separated numbers, got {text!r}") from None
    if not vals:
        raise UsageError(f"{flag}: no values given")
    return vals


def _metadata(p: core.AkmsParams, command: str) -> list[str]:
    return [
        f"# akms {command}",
        f"# alpha={fmt(p.alpha)} kappa={fmt(p.kappa)} mu={fmt(p.mu)} m={fmt(p.m)} mean_snr={fmt(p.mean_snr)}",
    ]


def _write(lines: list[str], out: str | None):
    text = "\n".join(lines) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- eval -------------------------------------------------------------------------


def _parse_stat(stat: str) -> tuple[str, float | None]:
    if stat.startswith("moment:"):
        try:
            n = float(stat.split(":", 1)[1])
        except ValueError:
            raise UsageError(f"--stat: bad moment order in {stat!r}") from None
        if not math.isfinite(n) or n < 0:
            raise UsageError("--stat: moment order must be a finite number >= 0")
        return "moment", n
    if stat not in ("pdf", "cdf"):
        raise UsageError(f"--stat: expected pdf, cdf or moment:n, got {stat!r}")
    return stat, None


def cmd_eval(ns) -> int:
    p = resolve_params(ns)
    kind, order = _parse_stat(ns.stat)
    lines = _metadata(p, "eval") + [f"# stat={ns.stat}"]
    if kind == "moment":
        r = core.moment_with_error(p, order)
        lines += ["n,value,err_estimate", f"{fmt(order)},{fmt(r.value)},{fmt(r.abs_err_estimate)}"]
        _write(lines, ns.out)
        return EXIT_OK
    if ns.at is None:
        raise UsageError("--at is required for pdf and cdf")
    at = _float_list(ns.at, "--at")
    if any(g < 0 or not math.isfinite(g) for g in at):
        raise UsageError("--at: SNR values must be finite and >= 0")
    fn = core.pdf_with_error if kind == "pdf" else core.cdf_with_error
    lines.append("gamma,value,err_estimate")
    for g in at:
        r = fn(p, g)
        lines.append(f"{fmt(g)},{fmt(r.value)},{fmt(r.abs_err_estimate)}")
    _write(lines, ns.out)
    return EXIT_OK


# -- sweep ------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    start: float
    stop: float
    points: int
    log: bool = False

    def __post_init__(self):
        if self.variable not in SWEEP_VARS:
            raise UsageError(f"--var: expected one of {', '.join(SWEEP_VARS)}, got {self.variable!r}")
        if self.points < 2:
            raise UsageError("--points: need at least 2 points")
        if not (math.isfinite(self.start) and math.isfinite(self.stop)) or not self.start < self.stop:
            raise UsageError("--start/--stop: need finite start < stop")
        if self.log and self.start <= 0:
            raise UsageError("--log: needs start > 0")

    def grid(self) -> np.ndarray:
        if self.log:
            return np.geomspace(self.start, self.stop, self.points)
        return np.linspace(self.start, self.stop, self.points)


def _metric_columns(stats: list[str]) -> list[str]:
    cols = []
    for s in stats:
        if s not in METRICS and not s.startswith("moment:"):
            raise UsageError(f"--stat: unknown metric {s!r}; choose from {', '.join(METRICS)} or moment:n")
        if s.startswith("moment:"):
            _parse_stat(s)
        cols.append(s)
        if s == "capacity" and "awgn" not in cols:
            cols.append("awgn")
    return cols


def _row(base: core.AkmsParams, spec: SweepSpec, x: float, at: float, stats: list[str]) -> list[float]:
    p, point = base, at
    if spec.variable == "snr_db":
        p = base.with_mean(10.0 ** (x / 10.0))
    elif spec.variable == "threshold_db":
        point = 10.0 ** (x / 10.0)
    else:
        fields = {k: getattr(base, k) for k in (*PARAM_FLAGS, "mean_snr")}
        fields[spec.variable] = x
        p = core.AkmsParams(**fields)
    out = []
    for s in stats:
        if s == "pdf":
            out.append(core.pdf(p, point))
        elif s in ("cdf", "outage"):
            out.append(core.cdf(p, point))
        elif s == "outage-asymptotic":
            out.append(metrics.asymptotic_outage(metrics.OutageQuery(p, point)))
        elif s == "capacity":
            out.append(metrics.ergodic_capacity(p).bits_per_hz)
        elif s == "awgn":
            out.append(metrics.awgn_capacity(p.mean_snr))
        elif s == "capacity-asymptotic":
            out.append(metrics.asymptotic_capacity(p))
        else:
            out.append(core.moment(p, float(s.split(":", 1)[1])))
    return out


def cmd_sweep(ns) -> int:
    spec = SweepSpec(ns.var, ns.start, ns.stop, ns.points, ns.log)
    # the swept parameter need not be given as a flag
    if spec.variable in PARAM_FLAGS and getattr(ns, spec.variable) is None and not ns.model:
        setattr(ns, spec.variable, spec.start)
    base = resolve_params(ns)
    stats = _metric_columns([s.strip() for s in ns.stat.split(",") if s.strip()])
    at = 1.0 if ns.at is None else _float_list(ns.at, "--at")
    if isinstance(at, list):
        if len(at) != 1 or at[0] < 0:
            raise UsageError("--at: a sweep takes one non-negative evaluation point")
        at = at[0]
    grid = spec.grid()
    # validate every grid point before doing any work
    if spec.variable in PARAM_FLAGS:
        for x in grid:
            try:
                core.AkmsParams(**{**{k: getattr(base, k) for k in PARAM_FLAGS}, spec.variable: x})
            except DomainError as exc:
                raise UsageError(f"--start/--stop: {exc}") from None
    with ThreadPoolExecutor(max_workers=ns.workers) as pool:
        rows = list(pool.map(lambda x: _row(base, spec, float(x), at, stats), grid))
    lines = _metadata(base, "sweep") + [
        f"# var={spec.variable} start={fmt(spec.start)} stop={fmt(spec.stop)} points={spec.points} "
        f"scale={'log' if spec.log else 'linear'} at={fmt(at)}",
        ",".join([spec.variable] + stats),
    ]
    lines += [",".join([fmt(x)] + [fmt(v) for v in r]) for x, r in zip(grid, rows)]
    _write(lines, ns.out)
    return EXIT_OK


# -- sample -----------------------------------------------------------------------


def cmd_sample(ns) -> int:
    p = resolve_params(ns)
    if ns.n is None or ns.n < 1:
        raise UsageError("--n: sample size must be a positive integer")
    if ns.seed < 0 or ns.seed >= 2**64:
        raise UsageError("--seed: must be an unsigned 64-bit integer")
    if ns.method == "physical" and p.mu != int(p.mu):
        raise UsageError(f"--method physical needs an integer --mu, got {p.mu:g}")
    batch = sampler.sample(p, ns.n, ns.seed, ns.method, workers=ns.workers)
    lines = _metadata(p, "sample") + [
        f"# seed={batch.seed} method={batch.method.value} n={ns.n}",
        f"# normalization={fmt(batch.normalization)}",
        "snr",
    ]
    lines += [fmt(v) for v in batch.samples]
    _write(lines, ns.out)
    return EXIT_OK


def read_samples(path: str) -> tuple[np.ndarray, dict[str, float]]:
    """Samples and the ``key=value`` metadata of a file written by ``akms sample``."""
    meta = {}
    values = []
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"--ks: cannot read {path}: {exc.strerror}") from None
    with fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                for tok in line[1:].split():
                    if "=" in tok:
                        k, v = tok.split("=", 1)
                        try:
                            meta[k] = float(v)
                        except ValueError:
                            pass
                continue
            if line == "snr":
                continue
            try:
                values.append(float(line))
            except ValueError:
                raise UsageError(f"--ks: {path} has a non-numeric line {line!r}") from None
    if not values:
        raise UsageError(f"--ks: {path} holds no samples")
    return np.asarray(values), meta


# -- validate ---------------------------------------------------------------------


def _report(results, out):
    lines = ["check,status,measured,threshold,detail"]
    for r in results:
        detail = r.detail.replace('"', "'")
        lines.append(f'{r.name},{"PASS" if r.passed else "FAIL"},{r.measured:.3g},{r.threshold:.3g},"{detail}"')
    _write(lines, out)
    failed = [r.name for r in results if not r.passed]
    if failed:
        print(f"validation failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


def cmd_validate(ns) -> int:
    if not ns.tol_scale > 0:
        raise UsageError("--tol-scale: must be > 0")
    th = validation.Thresholds().scaled(ns.tol_scale)
    if ns.ks:
        samples, meta = read_samples(ns.ks)
        p = resolve_params(ns, required=False)
        if p is None:
            try:
                p = core.AkmsParams(*(meta[k] for k in ("alpha", "kappa", "mu", "m", "mean_snr")))
            except KeyError:
                raise UsageError("--ks: the file carries no parameters; pass --alpha ... or --model") from None
        stat, err = validation.ks_against_cdf(p, samples)
        limit = validation.numerics.dkw_threshold(samples.size, th.ks_factor)
        res = validation.CheckResult(
            "sampler-ks", stat + err < limit, stat + err, limit, f"n={samples.size}; interpolation error {err:.2g}"
        )
        return _report([res], ns.out)
    p = resolve_params(ns, required=False)
    results = validation.run_suite(ns.suite, None if p is None else [p], ns.tol_scale, ns.workers)
    return _report(results, ns.out)


# -- models -----------------------------------------------------------------------


def _group_model_args(tokens: list[str]) -> list[str]:
    """``["hoyt", "q=0.5", "rice"]`` -> ``["hoyt,q=0.5", "rice"]``."""
    specs: list[str] = []
    for tok in tokens:
        if "=" in tok.split(",", 1)[0]:
            if not specs:
                raise UsageError(f"models: {tok!r} given before any model name")
            specs[-1] += "," + tok
        else:
            specs.append(tok)
    return specs


def cmd_models(ns) -> int:
    if ns.specs:
        models = [parse_model_spec(s) for s in _group_model_args(ns.specs)]
    else:
        models = None
    lines = ["model,native_params,alpha,kappa,mu,m,limit_approximation"]
    for mdl, img in zoo.table_rows(models):
        native = ";".join(f"{k}={fmt(v)}" for k, v in mdl.native_params.items())
        q = img.params
        lines.append(
            f"{mdl.name.value},{native},{fmt(q.alpha)},{fmt(q.kappa)},{fmt(q.mu)},{fmt(q.m)},"
            f"{'yes' if img.limit_approximation else 'no'}"
        )
    _write(lines, None)
    return EXIT_OK


# -- parser -----------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    params = argparse.ArgumentParser(add_help=False)
    g = params.add_argument_group("distribution")
    for f in PARAM_FLAGS:
        g.add_argument(f"--{f}", type=float)
    g.add_argument("--snr-mean-db", type=float, help="mean SNR in dB (default 0 dB)")
    g.add_argument("--model", help='named model, e.g. "hoyt,q=0.5"')
    g.add_argument("--config", help="flat key = value file; flags take precedence")
    g.add_argument("--out", help="write CSV here instead of stdout")
    g.add_argument("--workers", type=int, default=None, help="thread count for parallel work")

    parser = _Parser(prog="akms", description="alpha-KMS fading statistics")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    e = sub.add_parser("eval", parents=[params], help="evaluate pdf, cdf or a moment")
    e.add_argument("--at", help="comma-separated SNR values (linear)")
    e.add_argument("--stat", default="pdf", help="pdf | cdf | moment:n")

    s = sub.add_parser("sweep", parents=[params], help="tabulate metrics over a parameter grid")
    s.add_argument("--var", choices=SWEEP_VARS)
    s.add_argument("--start", type=float)
    s.add_argument("--stop", type=float)
    s.add_argument("--points", type=int, default=50)
    s.add_argument("--log", action="store_true", help="geometric spacing")
    s.add_argument("--stat", default="cdf", help="comma-separated metrics: " + ", ".join(METRICS) + ", moment:n")
    s.add_argument("--at", help="evaluation SNR (linear) for pdf/cdf/outage; default 1")

    m = sub.add_parser("sample", parents=[params], help="Monte Carlo SNR samples")
    m.add_argument("--n", type=int)
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--method", choices=[x.value for x in sampler.Method], default="conditional")

    v = sub.add_parser("validate", parents=[params], help="run the self-check suite")
    v.add_argument("--suite", choices=sorted(validation.SUITES), default="quick")
    v.add_argument("--ks", metavar="FILE", help="KS test of a sample file against the distribution")
    v.add_argument("--tol-scale", type=float, default=1.0, help="multiply every tolerance (negative control)")

    ml = sub.add_parser("models", help="list the named models and their alpha-KMS images")
    ml.add_argument("specs", nargs="*", help='e.g. "hoyt q=0.5 rice K=3"')
    return parser


COMMANDS = {"eval": cmd_eval, "sweep": cmd_sweep, "sample": cmd_sample, "validate": cmd_validate, "models": cmd_models}


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        if ns.command != "models":
            _apply_config(ns, parser._subparsers._group_actions[0].choices[ns.command])
        if ns.command == "sweep":
            for flag in ("var", "start", "stop"):
                if getattr(ns, flag) is None:
                    raise UsageError(f"--{flag} is required")
        return COMMANDS[ns.command](ns)
    except UsageError as exc:
        print(f"akms: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"akms: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConvergenceError, ConsistencyError) as exc:
        print(f"akms: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
