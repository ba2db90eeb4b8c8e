"""Command-line front end.

Exit codes: 0 success, 2 usage or input-file error, 3 dynamics error
(blow-up, out-of-range current, failed trial), 4 more than half of the sweep
points invalid.
"""

from __future__ import annotations

import argparse
import csv
import re
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .bench import bench_speed
from .config import (
    SWEEP_DEFAULTS,
    SWEEP_OPTIONS,
    TRACE_OPTIONS,
    TRIAL_OPTIONS,
    ConfigError,
    Option,
    loads_config,
    resolve,
    write_manifest,
)
from .device import (
    CurrentOutOfRangeError,
    ModelError,
    dumps_model,
    load_model,
    params_for_current,
    synthetic_default,
)
from .dynamics import BlowUpError, InvalidParameterError, ThieleParams, steady_state, trace
from .experiment import TrialConfig, TrialError, run_trial, sweep
from .fitting import fit_logistic
from .reservoir import ReservoirConfig
from .signals import TaskConfig
from .svg import Band, Series, line_chart

EXIT_OK, EXIT_USAGE, EXIT_DYNAMICS, EXIT_DEGRADED = 0, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """Accepts negative numbers in exponent notation (``--beta -4e8``) as values."""

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self._negative_number_matcher = re.compile(r"^-(\d+\.?\d*|\.\d+)([eE][-+]?\d+)?$")


def _add_options(p: argparse.ArgumentParser, options: list[Option]) -> None:
    for o in options:
        if o.is_switch:
            p.add_argument(o.flag, dest=o.key, action="store_const", const="true", default=None, help=o.help)
        else:
            p.add_argument(o.flag, dest=o.key, default=None, metavar="V", help=o.help)
    p.add_argument("--config", type=Path, help="ddtea-config v1 file; flags override it")


def _resolve(args, options) -> dict:
    file_values = {}
    if args.config is not None:
        try:
            text = args.config.read_text(encoding="utf-8")
        except OSError as exc:
            raise UsageError(f"cannot read config: {exc}") from None
        file_values = loads_config(text, options, source=str(args.config))
    return resolve(options, file_values, {o.key: getattr(args, o.key) for o in options})


def _model(spec: str):
    return synthetic_default() if spec == "synthetic" else load_model(spec)


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def trial_config(v: dict) -> TrialConfig:
    try:
        return TrialConfig(
            task=TaskConfig(v["segments"], v["samples_per_period"], 0, v["class_balance"]),
            rc=ReservoirConfig(
                v["n_virtual"], v["theta"], v["zeta_bias"], v["zeta_span"], v["mask_seed"], v["s_init"]
            ),
            model=_model(v["model"]),
            snr_db=v["snr_db"],
            lam=v["lambda"],
            split=v["split"],
            washout=v["washout"],
            master_seed=v["seed"],
            resample_mask=v["resample_mask"],
        )
    except ModelError:
        raise
    except ValueError as exc:
        raise UsageError(str(exc)) from None


# ---------------------------------------------------------------------------
# subcommands


def cmd_trace(args) -> int:
    v = _resolve(args, TRACE_OPTIONS)
    if v["t_end"] is None:
        raise UsageError("--t-end is required")
    if v["points"] < 1 or v["t_end"] < 0:
        raise UsageError("--points must be >= 1 and --t-end >= 0")
    direct = [v[k] for k in ("alpha", "beta", "n")]
    if all(x is not None for x in direct):
        p = ThieleParams(*direct)
    elif v["zeta"] is not None and not any(x is not None for x in direct):
        p = params_for_current(_model(v["model"]), v["zeta"])
    else:
        raise UsageError("give either all of --alpha/--beta/--n or --zeta")
    t = np.linspace(0.0, v["t_end"], v["points"]) if v["points"] > 1 else np.zeros(1)
    s = trace(p, v["s0"], t)
    out = _out_dir(args)
    with open(out / "trace.csv", "w", encoding="utf-8", newline="\n") as fh:
        fh.write("t,s\n")
        for ti, si in zip(t, s):
            fh.write(f"{ti:.17g},{si:.17g}\n")
    if v["svg"]:
        chart = line_chart(
            [Series("s(t)", t * 1e9, s)], "Reduced orbit", "t (ns)", "s"
        )
        (out / "trace.svg").write_text(chart, encoding="utf-8")
    write_manifest(out, v, "trace")
    ss = steady_state(p)
    print(f"points={len(t)} s_end={s[-1]:.17g} steady_state={'none' if ss is None else format(ss, '.17g')}")
    return EXIT_OK


def cmd_trial(args) -> int:
    v = _resolve(args, TRIAL_OPTIONS)
    m = run_trial(trial_config(v), v["rep"])
    print(f"accuracy={m.accuracy:.17g}\nrmse={m.rmse:.17g}")
    if args.out is not None:
        out = _out_dir(args)
        (out / "trial.txt").write_text(
            f"accuracy={m.accuracy:.17g}\nrmse={m.rmse:.17g}\n", encoding="utf-8"
        )
        write_manifest(out, v, "trial")
    return EXIT_OK


def cmd_sweep(args) -> int:
    v = _resolve(args, SWEEP_OPTIONS)
    if v["axis"] is None:
        raise UsageError("--axis is required (current or snr)")
    lo, hi, n = SWEEP_DEFAULTS[v["axis"]]
    v["from"] = lo if v["from"] is None else v["from"]
    v["to"] = hi if v["to"] is None else v["to"]
    v["points"] = n if v["points"] is None else v["points"]
    if v["points"] < 1 or v["reps"] < 1:
        raise UsageError("--points and --reps must be >= 1")
    values = np.linspace(v["from"], v["to"], v["points"])
    result = sweep(trial_config(v), v["axis"], values, v["reps"], threads=args.threads)

    comments = [f"error point={p} axis={values[p]:.17g}: {msg}" for p, msg in sorted(result.errors.items())]
    fit = None
    if v["fit"]:
        ok = result.valid
        try:
            fit = fit_logistic(result.axis[ok], result.mean_accuracy[ok])
            comments += fit.as_comments()
        except ValueError as exc:
            comments.append(f"fit failed: {exc}")
    out = _out_dir(args)
    with open(out / "sweep.csv", "w", encoding="utf-8", newline="\n") as fh:
        fh.write(result.to_csv(comments))
    write_manifest(out, v, "sweep")
    if v["svg"]:
        series = [Series("mean accuracy", result.axis, result.mean_accuracy)]
        if fit is not None:
            xf = np.linspace(result.axis[0], result.axis[-1], 200)
            series.append(Series("generalised logistic fit", xf, fit(xf), "#e377c2"))
        band = Band(
            result.axis,
            result.mean_accuracy - result.std_accuracy,
            result.mean_accuracy + result.std_accuracy,
        )
        label = "drive current zeta_bias" if v["axis"] == "current" else "SNR (dB)"
        chart = line_chart(series, f"Accuracy vs {label}", label, "accuracy", [band])
        (out / "sweep.svg").write_text(chart, encoding="utf-8")
    n_bad = int(np.sum(~result.valid))
    print(f"points={len(values)} valid={len(values) - n_bad} reps={v['reps']}")
    if n_bad * 2 > len(values):
        print(f"error: {n_bad} of {len(values)} sweep points invalid", file=sys.stderr)
        return EXIT_DEGRADED
    return EXIT_OK


def _read_columns(path: Path, x_col: str, y_col: str):
    rows = [ln for ln in path.read_text(encoding="utf-8").splitlines() if ln and not ln.startswith("#")]
    reader = csv.DictReader(rows)
    if reader.fieldnames is None or x_col not in reader.fieldnames or y_col not in reader.fieldnames:
        raise UsageError(f"{path}: need columns {x_col!r} and {y_col!r}")
    x, y = [], []
    for row in reader:
        if row.get("valid", "1") == "0":
            continue
        x.append(float(row[x_col]))
        y.append(float(row[y_col]))
    return np.array(x), np.array(y)


def cmd_fit(args) -> int:
    x, y = _read_columns(args.csv, args.x_col, args.y_col)
    try:
        fit = fit_logistic(x, y)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    for key in ("A", "K", "B", "M", "nu", "r_squared", "sse"):
        print(f"{key}={getattr(fit, key):.17g}")
    print(f"degenerate={int(fit.degenerate)}")
    return EXIT_OK


def cmd_bench(args) -> int:
    if not (args.rk4_step > 0 and args.t_end > 0 and args.rk4_step <= args.t_end):
        raise UsageError("need 0 < --rk4-step <= --t-end")
    p = ThieleParams(args.alpha, args.beta, args.n)
    try:
        res = bench_speed(p, args.s0, args.t_end, args.rk4_step, args.closed_evals, args.rk4_traces)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    sys.stdout.write(res.report())
    return EXIT_OK


def cmd_model_check(args) -> int:
    m = _model(args.model)
    if args.dump:
        sys.stdout.write(dumps_model(m))
        return EXIT_OK
    print(f"kind={m.kind} zeta_range={m.zeta_min:.17g},{m.zeta_max:.17g}")
    print("zeta,alpha,beta,n,steady_state")
    for z in np.linspace(m.zeta_min, m.zeta_max, args.points):
        p = params_for_current(m, float(z))
        ss = steady_state(p)
        print(f"{z:.6g},{p.alpha:.6g},{p.beta:.6g},{p.n:.6g},{'none' if ss is None else format(ss, '.6g')}")
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ddtea", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"ddtea {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("trace", help="closed-form orbit over a time grid")
    _add_options(p, TRACE_OPTIONS)
    p.add_argument("--out", default=".", help="output directory")
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("trial", help="one classification trial")
    _add_options(p, TRIAL_OPTIONS)
    p.add_argument("--out", default=None, help="output directory for trial.txt and manifest")
    p.set_defaults(func=cmd_trial)

    p = sub.add_parser("sweep", help="repeated trials over drive current or SNR")
    _add_options(p, SWEEP_OPTIONS)
    p.add_argument("--threads", type=int, default=None, help="worker threads (0 = all cores)")
    p.add_argument("--out", default=".", help="output directory")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("fit", help="generalised logistic fit of a CSV column pair")
    p.add_argument("csv", type=Path)
    p.add_argument("--x-col", default="axis")
    p.add_argument("--y-col", default="mean_accuracy")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("bench", help="closed form vs RK4 timing")
    p.add_argument("--alpha", type=float, default=5e7)
    p.add_argument("--beta", type=float, default=-3e8)
    p.add_argument("--n", type=float, default=2.0)
    p.add_argument("--s0", type=float, default=0.01)
    p.add_argument("--t-end", type=float, default=1e-7)
    p.add_argument("--rk4-step", type=float, default=1e-12)
    p.add_argument("--closed-evals", type=int, default=100_000)
    p.add_argument("--rk4-traces", type=int, default=10)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("model-check", help="validate a device model file")
    p.add_argument("--model", default="synthetic")
    p.add_argument("--points", type=int, default=11)
    p.add_argument("--dump", action="store_true", help="print the model in file format")
    p.set_defaults(func=cmd_model_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ConfigError, InvalidParameterError) as exc:
        parser.print_usage(sys.stderr)
        print(f"ddtea {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BlowUpError as exc:
        print(f"ddtea {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_DYNAMICS
    except (CurrentOutOfRangeError, TrialError) as exc:
        print(f"ddtea {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_DYNAMICS
    except (ModelError, OSError) as exc:
        print(f"ddtea {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
