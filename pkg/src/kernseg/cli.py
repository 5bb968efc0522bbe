"""Command-line front end.

Subcommands: ``simulate``, ``detect``, ``refine``, ``infer``, ``evaluate`` and
``quantiles``.  Exit codes: 0 success, 1 usage, 2 data error, 3 numeric
failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
import time
from pathlib import Path

import numpy as np

from .detect import ChangePointSet, ConfigError, DetectionConfig, detect
from .gram import InputError
from .inference import (DEFAULT_ALPHAS, SCHEMA_VERSION, HalfwidthTooSmall, QuantileTable,
                        simulate_standard_quantiles)
from .kernels import KernelError
from .pipeline import InferenceSettings, run_inference
from .refine import DEFAULT_C_KAPPA, DEFAULT_H_TILDE
from .simlab import SCENARIOS, ScenarioSpec, generate_scenario, run_study

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3

log = logging.getLogger("kernseg")


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------- io helpers

def read_csv(path) -> np.ndarray:
    """Read a headed, comma-separated numeric panel; errors name the line."""
    path = Path(path)
    try:
        fh = path.open(newline="", encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror or exc}") from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        except (csv.Error, UnicodeDecodeError) as exc:
            raise DataError(f"{path}: line 1: {exc}") from exc
        p = len(header)
        if p == 0 or any(not h.strip() for h in header):
            raise DataError(f"{path}: line 1: header needs one non-empty name per column")
        rows = []
        try:
            for row in reader:
                line = reader.line_num
                if not row:
                    continue
                if len(row) != p:
                    raise DataError(f"{path}: line {line}: expected {p} fields, found {len(row)}")
                try:
                    vals = [float(c) for c in row]
                except ValueError:
                    bad = next(c for c in row if not _is_float(c))
                    raise DataError(f"{path}: line {line}: non-numeric cell {bad!r}") from None
                if not all(math.isfinite(v) for v in vals):
                    raise DataError(f"{path}: line {line}: missing or non-finite value")
                rows.append(vals)
        except (csv.Error, UnicodeDecodeError) as exc:
            raise DataError(f"{path}: line {reader.line_num}: {exc}") from exc
    if len(rows) < 4:
        raise DataError(f"{path}: need at least 4 data rows, found {len(rows)}")
    return np.array(rows, dtype=float)


def _is_float(cell) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def write_csv(path, X: np.ndarray) -> None:
    path = Path(path)
    try:
        with path.open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow([f"x{j + 1}" for j in range(X.shape[1])])
            for row in X:
                w.writerow([repr(float(v)) for v in row])
    except OSError as exc:
        raise DataError(f"cannot write {path}: {exc.strerror or exc}") from exc


def _emit(doc: dict, out) -> None:
    text = json.dumps(doc, indent=2, sort_keys=False) + "\n"
    if out is None or str(out) == "-":
        sys.stdout.write(text)
        return
    try:
        Path(out).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot write {out}: {exc.strerror or exc}") from exc


def _read_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: invalid JSON ({exc})") from exc


def _finite_or_none(x):
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else None


# ---------------------------------------------------------------- arguments

def _positive(kind):
    def conv(text):
        try:
            v = kind(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected a {kind.__name__}, got {text!r}") from None
        if not v > 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return v
    return conv


def _tau(text):
    if text in ("theory", "permutation"):
        return text
    try:
        return _positive(float)(text)
    except argparse.ArgumentTypeError:
        raise argparse.ArgumentTypeError(
            f"expected a positive number, 'theory' or 'permutation', got {text!r}") from None


def _alphas(text):
    try:
        vals = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"alphas must be comma-separated numbers, got {text!r}") from None
    if not vals or not all(0.0 < a < 1.0 for a in vals):
        raise argparse.ArgumentTypeError("every alpha must lie in (0, 1)")
    return tuple(vals)


def _add_common(sp):
    sp.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    sp.add_argument("--threads", type=_positive(int), default=1,
                    help="worker cap; computations run in a single process")
    sp.add_argument("-v", "--verbose", action="store_true")


def _add_detection(sp):
    g = sp.add_argument_group("detection")
    g.add_argument("--r", type=_positive(float), default=2.0, help="smoothness r (default 2)")
    g.add_argument("--h", type=_positive(float), default=None,
                   help="bandwidth (default c_h * T^(-1/(2r+p)))")
    g.add_argument("--c-h", type=_positive(float), default=2.0)
    g.add_argument("--tau", type=_tau, default="permutation",
                   help="threshold value, 'theory' or 'permutation' (default)")
    g.add_argument("--c-tau", type=_positive(float), default=1.0)
    g.add_argument("--n-permutations", type=int, default=100)
    g.add_argument("--C-frak", dest="C_frak", type=_positive(float), default=1.0,
                   help="seeded-interval depth constant")
    g.add_argument("--rho", type=float, default=None, help="override the trimming width")
    g.add_argument("--min-segment", type=int, default=2)
    g.add_argument("--kernel", default="gaussian",
                   choices=["gaussian", "uniform-product", "epanechnikov-product"])


def _add_refine(sp):
    g = sp.add_argument_group("refinement")
    g.add_argument("--c-kappa", type=_positive(float), default=DEFAULT_C_KAPPA)
    g.add_argument("--h-tilde", type=_positive(float), default=DEFAULT_H_TILDE)
    g.add_argument("--means", choices=["fixed", "candidate"], default="fixed")
    g.add_argument("--detect-json", default=None,
                   help="reuse estimates from a detect result instead of re-running detection")


def _add_quantiles(sp):
    g = sp.add_argument_group("limiting law")
    g.add_argument("--quantile-table", default=None, help="JSON table from the quantiles command")
    g.add_argument("--n-draws", type=int, default=10_000)
    g.add_argument("--grid-step", type=_positive(float), default=0.01)
    g.add_argument("--halfwidth", type=_positive(float), default=30.0)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="kernseg", description="Kernel-CUSUM change-point detection and inference.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("simulate", help="write a scenario to CSV with a sidecar of true change points")
    sp.add_argument("--scenario", choices=SCENARIOS, required=True)
    sp.add_argument("--T", type=int, default=150)
    sp.add_argument("--p", type=int, default=3)
    sp.add_argument("--out", default=None, help="CSV path (default <scenario>_T<T>_p<p>_seed<seed>.csv)")
    sp.add_argument("--sidecar", default=None, help="sidecar JSON path (default: CSV path with .json)")
    _add_common(sp)

    sp = sub.add_parser("detect", help="preliminary change points")
    sp.add_argument("input", help="CSV with a header row")
    sp.add_argument("--out", default=None, help="JSON output (default stdout)")
    _add_detection(sp)
    _add_common(sp)

    sp = sub.add_parser("refine", help="refined change points and jump sizes")
    sp.add_argument("input")
    sp.add_argument("--out", default=None)
    _add_detection(sp)
    _add_refine(sp)
    _add_common(sp)

    sp = sub.add_parser("infer", help="refined change points with confidence intervals")
    sp.add_argument("input")
    sp.add_argument("--out", default=None)
    sp.add_argument("--alphas", type=_alphas, default=(0.05,), help="comma-separated levels")
    _add_detection(sp)
    _add_refine(sp)
    _add_quantiles(sp)
    _add_common(sp)

    sp = sub.add_parser("evaluate", help="repeated simulation study")
    sp.add_argument("--scenario", choices=SCENARIOS, required=True)
    sp.add_argument("--T", type=int, default=150)
    sp.add_argument("--p", type=int, default=3)
    sp.add_argument("--reps", type=int, default=50)
    sp.add_argument("--alphas", type=_alphas, default=None,
                    help="coverage levels (default 0.01,0.05 for INFER, none otherwise)")
    sp.add_argument("--json-out", default=None, help="EvalReport JSON (default stdout after the table)")
    sp.add_argument("--table-out", default=None)
    _add_detection(sp)
    _add_refine(sp)
    _add_quantiles(sp)
    _add_common(sp)

    sp = sub.add_parser("quantiles", help="simulate the standard limiting-law quantile table")
    sp.add_argument("--out", default=None)
    sp.add_argument("--n-draws", type=int, default=10_000)
    sp.add_argument("--grid-step", type=_positive(float), default=0.01)
    sp.add_argument("--halfwidth", type=_positive(float), default=30.0)
    _add_common(sp)
    return ap


def _detection_config(args) -> DetectionConfig:
    try:
        return DetectionConfig(r=args.r, h=args.h, tau=args.tau, C_frak=args.C_frak,
                               rho_override=args.rho, min_segment=args.min_segment,
                               kernel=args.kernel, c_h=args.c_h, c_tau=args.c_tau,
                               n_permutations=args.n_permutations, seed=args.seed)
    except ConfigError as exc:
        raise UsageError(str(exc)) from exc


def _settings(args, alphas=(0.05,)) -> InferenceSettings:
    return InferenceSettings(alphas=tuple(alphas), c_kappa=args.c_kappa,
                             h_tilde=args.h_tilde, means=args.means)


def _table(args) -> QuantileTable:
    if args.quantile_table:
        try:
            return QuantileTable.from_json(Path(args.quantile_table).read_text(encoding="utf-8"))
        except OSError as exc:
            raise DataError(f"cannot read {args.quantile_table}: {exc.strerror or exc}") from exc
        except (ValueError, KeyError) as exc:
            raise DataError(f"{args.quantile_table}: {exc}") from exc
    try:
        return simulate_standard_quantiles(args.n_draws, args.grid_step, args.halfwidth, args.seed)
    except HalfwidthTooSmall:
        raise
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _prelim(args, X, cfg) -> ChangePointSet:
    if not args.detect_json:
        return detect(X, cfg)
    doc = _read_json(args.detect_json)
    try:
        return ChangePointSet(list(doc["estimates"]), X.shape[0], {})
    except (KeyError, TypeError) as exc:
        raise DataError(f"{args.detect_json}: not a detect result") from exc


def _header(command, args) -> dict:
    return {"schema_version": SCHEMA_VERSION, "command": command, "seed": args.seed}


# ---------------------------------------------------------------- commands

def cmd_simulate(args) -> int:
    try:
        spec = ScenarioSpec(args.scenario, args.T, args.p, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    series = generate_scenario(spec)
    out = Path(args.out or f"{spec.id}_T{spec.T}_p{spec.p}_seed{spec.seed}.csv")
    sidecar = Path(args.sidecar) if args.sidecar else out.with_suffix(".json")
    write_csv(out, series.obs)
    doc = {"schema_version": SCHEMA_VERSION, "true_cps": series.true_cps, "scenario": spec.id,
           "seed": spec.seed, "T": spec.T, "p": spec.p, "ar_coef": spec.ar_coef,
           "burn_in": spec.burn_in, "csv": out.name}
    _emit(doc, sidecar)
    log.info("wrote %s and %s", out, sidecar)
    return EXIT_OK


def _detect_doc(args, X, cfg, prelim, runtime_ms) -> dict:
    d = prelim.diagnostics
    doc = _header("detect", args)
    doc.update({"T": int(X.shape[0]), "p": int(X.shape[1]),
                "K_hat": prelim.K_hat, "estimates": prelim.estimates,
                "tau_used": _finite_or_none(d.get("tau")), "rho_used": _finite_or_none(d.get("rho")),
                "h_used": float(d["h"]), "runtime_ms": runtime_ms,
                "config": {"r": cfg.r, "c_h": cfg.c_h, "tau": cfg.tau, "c_tau": cfg.c_tau,
                           "n_permutations": cfg.n_permutations, "C_frak": cfg.C_frak,
                           "rho_override": cfg.rho_override, "min_segment": cfg.min_segment,
                           "kernel": cfg.kernel}})
    if "warning" in d:
        doc["warning"] = d["warning"]
    if "rho_capped_from" in d:
        doc["rho_capped_from"] = d["rho_capped_from"]
    return doc


def cmd_detect(args) -> int:
    X = read_csv(args.input)
    cfg = _detection_config(args)
    t0 = time.perf_counter()
    prelim = detect(X, cfg)
    ms = (time.perf_counter() - t0) * 1000.0
    _emit(_detect_doc(args, X, cfg, prelim, ms), args.out)
    return EXIT_OK


def _point_doc(pt) -> dict:
    return {"k": pt.k, "eta_hat": pt.eta_hat, "eta_tilde": pt.eta_tilde,
            "kappa_hat": pt.kappa_hat, "kappa_h1": pt.kappa_h1, "h1": pt.h1,
            "window": list(pt.window), "sigma2_inf": pt.sigma2_inf, "R": pt.R, "S": pt.S,
            "ci": {f"{a:g}": [ci.lo, ci.hi] for a, ci in pt.intervals.items()},
            "flag": pt.flag}


def cmd_refine(args) -> int:
    X = read_csv(args.input)
    cfg = _detection_config(args)
    t0 = time.perf_counter()
    prelim = _prelim(args, X, cfg)
    res = run_inference(X, cfg, None, _settings(args), prelim)
    doc = _header("refine", args)
    doc.update({"T": int(X.shape[0]), "p": int(X.shape[1]), "K_hat": prelim.K_hat,
                "estimates": prelim.estimates, "h_tilde": args.h_tilde, "c_kappa": args.c_kappa,
                "means": args.means, "runtime_ms": (time.perf_counter() - t0) * 1000.0,
                "refined": [{"k": r.k, "eta_hat": r.eta_hat, "eta_tilde": r.eta_tilde,
                             "kappa_hat": r.kappa_hat, "h1": r.h1, "window": list(r.window),
                             "flag": r.flag} for r in res.refined]})
    if prelim.K_hat == 0:
        doc["note"] = "no change points detected"
    _emit(doc, args.out)
    return EXIT_OK


def cmd_infer(args) -> int:
    X = read_csv(args.input)
    cfg = _detection_config(args)
    table = _table(args)
    t0 = time.perf_counter()
    prelim = _prelim(args, X, cfg)
    res = run_inference(X, cfg, table, _settings(args, args.alphas), prelim)
    doc = _header("infer", args)
    doc.update({"T": int(X.shape[0]), "p": int(X.shape[1]), "K_hat": prelim.K_hat,
                "estimates": prelim.estimates, "alphas": list(args.alphas),
                "r": cfg.r, "h_used": float(cfg.bandwidth(*X.shape)),
                "h_tilde": args.h_tilde, "c_kappa": args.c_kappa, "means": args.means,
                "quantile_table": {"n_draws": table.n_draws, "grid_step": table.grid_step,
                                   "grid_halfwidth": table.grid_halfwidth, "seed": table.seed},
                "runtime_ms": (time.perf_counter() - t0) * 1000.0,
                "change_points": [_point_doc(pt) for pt in res.points]})
    if prelim.K_hat == 0:
        doc["note"] = "no change points detected"
    _emit(doc, args.out)
    return EXIT_OK


def cmd_evaluate(args) -> int:
    if args.reps < 1:
        raise UsageError("--reps must be at least 1")
    try:
        spec = ScenarioSpec(args.scenario, args.T, args.p, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    cfg = _detection_config(args)
    alphas = args.alphas if args.alphas is not None else ((0.01, 0.05) if spec.id == "INFER" else ())
    table = _table(args) if alphas else None
    report = run_study(spec, args.reps, cfg, _settings(args, alphas), table)
    doc = {"schema_version": SCHEMA_VERSION, "command": "evaluate", **report.to_dict()}
    text = report.table() + "\n"
    if args.table_out:
        try:
            Path(args.table_out).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise DataError(f"cannot write {args.table_out}: {exc.strerror or exc}") from exc
    else:
        sys.stdout.write(text)
    _emit(doc, args.json_out)
    return EXIT_OK


def cmd_quantiles(args) -> int:
    try:
        table = simulate_standard_quantiles(args.n_draws, args.grid_step, args.halfwidth,
                                            args.seed, DEFAULT_ALPHAS)
    except HalfwidthTooSmall:
        raise
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    _emit(json.loads(table.to_json()), args.out)
    return EXIT_OK


COMMANDS = {"simulate": cmd_simulate, "detect": cmd_detect, "refine": cmd_refine,
            "infer": cmd_infer, "evaluate": cmd_evaluate, "quantiles": cmd_quantiles}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"kernseg {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, InputError) as exc:
        print(f"kernseg {args.command}: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (ConfigError, KernelError) as exc:
        print(f"kernseg {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (HalfwidthTooSmall, FloatingPointError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"kernseg {args.command}: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
