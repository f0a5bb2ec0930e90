"""Command-line front end: ``swdl {tfd,bounds,optimize,detect,experiment}``.

Runs are driven by an INI file. Every key can be overridden with
``--set section.key=value``; ``--out`` and ``--method`` override
``[run] out`` and ``[run] method``. Built-in defaults are the ``fig1``
preset (LFM chirp on [-5, 5], optimal A1 for (2, 2), LFM-matched A2).

Exit codes: 0 ok, 2 configuration error, 3 numeric precondition error,
4 tolerance or consistency failure.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import hashlib
import json
import os
import platform
import sys
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import __version__
from . import detect, moments, signals, tfd
from .errors import DecompositionMismatch, NotSymplectic, SignalClassMismatch, SWDLError
from .symplectic import (
    SymplecticMatrix,
    lfm_a2,
    optimal_a1,
    resolution_bound,
    superresolution_flags,
)

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_TOLERANCE = 0, 2, 3, 4

PRESETS = {
    "fig1": {
        "signal": {"kind": "lfm", "alpha": "1", "beta": "0.5", "window": "-5, 5"},
        "matrices": {"A1": "optimal:2,2", "A2": "lfm:0.5,0.5,1"},
        "grid": {"t": "-5, 5, 201", "u": "-5, 5, 201", "slopes": "0, 2, 101",
                 "intercepts": "auto"},
        "bounds": {"class": "complex", "tolerance": "1e-4", "violation": "1e-6"},
        "optimize": {"a1": "2", "b1": "2", "beta": "0.5", "b2": "0.5", "d2": "1"},
        "run": {"out": "out", "method": "definition", "equivalence_tol": "1e-4"},
    },
}

SIGNAL_KEYS = {
    "lfm": ("alpha", "beta"),
    "gaussian": ("t0_center", "zeta", "epsilon"),
    "gauss_exponential": ("t0_center", "zeta", "epsilon", "omega0", "varsigma"),
    "gauss_chirp": ("t0_center", "zeta", "epsilon", "omega0", "xi", "m", "varsigma"),
}


class ConfigError(Exception):
    def __init__(self, field, message):
        self.field = field
        super().__init__(f"[{field}] {message}" if field else message)


def _number(text, field) -> float:
    try:
        return float(Fraction(text.strip()))
    except (ValueError, ZeroDivisionError):
        raise ConfigError(field, f"not a number: {text!r}") from None


def _numbers(text, field, count=None) -> list[float]:
    parts = [p for p in text.split(",") if p.strip()]
    if count is not None and len(parts) != count:
        raise ConfigError(field, f"expected {count} comma-separated values, got {text!r}")
    return [_number(p, field) for p in parts]


def _axis(text, field) -> np.ndarray:
    lo, hi, n = _numbers(text, field, 3)
    if n != int(n) or n < 1:
        raise ConfigError(field, f"point count must be a positive integer, got {n}")
    if n > 1 and not hi > lo:
        raise ConfigError(field, "stop must exceed start")
    return np.linspace(lo, hi, int(n))


@dataclass
class RunConfig:
    raw: dict
    signal: signals.Signal
    signal_class: str
    A1: SymplecticMatrix
    A2: SymplecticMatrix
    t_grid: np.ndarray
    u_grid: np.ndarray
    slopes: np.ndarray
    intercepts: np.ndarray | None
    out: str
    method: str
    tolerance: float
    violation: float
    equivalence_tol: float

    def digest(self) -> str:
        text = json.dumps(self.raw, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode("utf-8")).hexdigest()


def load_raw(path=None, overrides=(), preset="fig1") -> dict:
    """Layered configuration: preset, then the INI file, then ``section.key=value`` overrides."""
    if preset not in PRESETS:
        raise ConfigError("preset", f"unknown preset {preset!r}")
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    cp.read_dict(PRESETS[preset])
    if path is not None:
        try:
            with open(path) as fh:
                cp.read_file(fh, source=str(path))
        except OSError as exc:
            raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from None
        except configparser.Error as exc:
            raise ConfigError("config", str(exc).replace("\n", " ")) from None
    for item in overrides:
        key, sep, value = item.partition("=")
        section, dot, name = key.strip().partition(".")
        if not sep or not dot or not name:
            raise ConfigError("set", f"expected section.key=value, got {item!r}")
        if not cp.has_section(section):
            cp.add_section(section)
        cp.set(section, name, value.strip())
    return {s: dict(cp.items(s)) for s in cp.sections()}


def _signal(sec: dict) -> signals.Signal:
    kind = sec.get("kind", "").strip()
    if kind == "csv":
        if "path" not in sec:
            raise ConfigError("signal.path", "csv signals need a path")
        try:
            return signals.SampledSignal.from_csv(sec["path"]).as_signal(os.path.basename(sec["path"]))
        except (OSError, KeyError, ValueError) as exc:
            raise ConfigError("signal.path", str(exc)) from None
    if kind not in SIGNAL_KEYS:
        raise ConfigError("signal.kind", f"unknown signal kind {kind!r}; choose from "
                          f"{sorted(SIGNAL_KEYS) + ['csv']}")
    kw = {k: _number(sec[k], f"signal.{k}") for k in SIGNAL_KEYS[kind] if k in sec}
    try:
        if kind == "lfm":
            lo, hi = _numbers(sec.get("window", "-5, 5"), "signal.window", 2)
            return signals.lfm(kw.get("alpha", 1.0), kw.get("beta", 0.5), (lo, hi))
        if kind == "gauss_chirp":
            if "m" in kw:
                kw["m"] = int(kw["m"])
            return signals.gauss_chirp(**kw)
        return getattr(signals, kind)(**kw)
    except (SWDLError, ValueError) as exc:
        raise ConfigError(f"signal.{kind}", str(exc)) from None


def _matrix(text: str, field: str, A1: SymplecticMatrix | None = None) -> SymplecticMatrix:
    text = text.strip()
    try:
        if text.startswith("optimal:"):
            a1, b1 = _numbers(text[8:], field, 2)
            return optimal_a1(a1, b1)
        if text.startswith("lfm:"):
            if A1 is None:
                raise ConfigError(field, "lfm selector is only valid for A2")
            beta, b2, d2 = _numbers(text[4:], field, 3)
            return lfm_a2(beta, b2, d2, A1.a, A1.b)
        return SymplecticMatrix(*_numbers(text, field, 4))
    except NotSymplectic as exc:
        raise ConfigError(field, f"not symplectic (|det - 1| = {exc.residual:.3g})") from None
    except SWDLError as exc:
        raise ConfigError(field, str(exc)) from None


def resolve(raw: dict) -> RunConfig:
    sec = lambda name: raw.get(name, {})
    mats, grid, bounds, run = sec("matrices"), sec("grid"), sec("bounds"), sec("run")
    A1 = _matrix(mats.get("A1", ""), "matrices.A1")
    A2 = _matrix(mats.get("A2", ""), "matrices.A2", A1)
    inter = grid.get("intercepts", "auto").strip()
    method = run.get("method", "definition").strip()
    if method not in ("definition", "equivalent", "both"):
        raise ConfigError("run.method", f"unknown method {method!r}")
    cls = bounds.get("class", "complex").strip()
    if cls not in moments.CLASSES:
        raise ConfigError("bounds.class", f"signal class must be one of {moments.CLASSES}")
    return RunConfig(
        raw=raw,
        signal=_signal(sec("signal")),
        signal_class=cls,
        A1=A1,
        A2=A2,
        t_grid=_axis(grid.get("t", ""), "grid.t"),
        u_grid=_axis(grid.get("u", ""), "grid.u"),
        slopes=_axis(grid.get("slopes", ""), "grid.slopes"),
        intercepts=None if inter == "auto" else _axis(inter, "grid.intercepts"),
        out=run.get("out", "out").strip(),
        method=method,
        tolerance=_number(bounds.get("tolerance", "1e-4"), "bounds.tolerance"),
        violation=_number(bounds.get("violation", "1e-6"), "bounds.violation"),
        equivalence_tol=_number(run.get("equivalence_tol", "1e-4"), "run.equivalence_tol"),
    )


# -- output -------------------------------------------------------------------

def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_rows(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])


def _manifest(cfg: RunConfig, command: str, files: list[str], extra: dict | None = None) -> str:
    payload = {
        "command": command,
        "config": cfg.raw,
        "config_sha256": cfg.digest(),
        "versions": {"swdl": __version__, "numpy": np.__version__,
                     "python": platform.python_version()},
        "files": {name: _sha256(os.path.join(cfg.out, name)) for name in sorted(files)},
    }
    if extra:
        payload.update(extra)
    path = os.path.join(cfg.out, "manifest.json")
    tfd.write_manifest(path, payload)
    return path


def _grid(cfg: RunConfig, method: str, A1=None, A2=None) -> tfd.TFGrid:
    return tfd.compute(cfg.signal, A1 or cfg.A1, A2 or cfg.A2, cfg.t_grid, cfg.u_grid, method)


# -- commands -------------------------------------------------------------------

def cmd_tfd(cfg: RunConfig) -> int:
    os.makedirs(cfg.out, exist_ok=True)
    methods = ["definition", "equivalent"] if cfg.method == "both" else [cfg.method]
    files, peaks, grids = [], {}, {}
    for m in methods:
        g = _grid(cfg, m)
        grids[m] = g
        stem = "tfd" if len(methods) == 1 else f"tfd_{m}"
        g.to_csv(os.path.join(cfg.out, stem + ".csv"))
        peaks[stem + ".pgm"] = repr(g.to_pgm(os.path.join(cfg.out, stem + ".pgm")))
        files += [stem + ".csv", stem + ".pgm"]
    extra = {"heatmap_normalization": "per-file peak", "heatmap_peaks": peaks,
             "grids": {m: g.describe() for m, g in grids.items()}}
    status = EXIT_OK
    if len(methods) == 2:
        a, b = grids["definition"], grids["equivalent"]
        dev = float(np.max(np.abs(a.values - b.values)))
        rel = tfd.relative_l2(a, b)
        _write_rows(os.path.join(cfg.out, "deviation.csv"), ["metric", "value"],
                    [("max_abs_deviation", dev), ("relative_l2", rel),
                     ("tolerance", cfg.equivalence_tol)])
        files.append("deviation.csv")
        print(f"definition vs equivalent: max |diff| = {dev!r}, relative L2 = {rel!r}")
        if not rel <= cfg.equivalence_tol:
            print(f"relative L2 {rel:.3e} exceeds tolerance {cfg.equivalence_tol:g}", file=sys.stderr)
            status = EXIT_TOLERANCE
    _manifest(cfg, "tfd", files, extra)
    print(f"wrote {len(files)} files to {cfg.out}")
    return status


def cmd_bounds(cfg: RunConfig) -> int:
    os.makedirs(cfg.out, exist_ok=True)
    method = "definition" if cfg.method == "both" else cfg.method
    report = moments.moment_report(cfg.signal, cfg.A1, cfg.A2, method=method)
    declared = cfg.signal_class
    bound = moments.lower_bound(declared, cfg.A1, cfg.A2, report, cfg.tolerance)
    decomposed = report.decomposed_product(cfg.A1)
    report.to_csv(os.path.join(cfg.out, "moments.csv"))
    rows = [(k, v) for k, v in vars(bound).items()] + [("looser_slack", bound.looser_slack),
                                                         ("decomposed_product", decomposed)]
    _write_rows(os.path.join(cfg.out, "bounds.csv"), ["key", "value"], rows)
    _manifest(cfg, "bounds", ["moments.csv", "bounds.csv"])
    print(bound.to_text(), end="")
    print(f"attained = {str(bound.attained).lower()}")
    rel = abs(report.product - decomposed) / max(abs(decomposed), 1e-300)
    if rel > moments.FAIL_REL:
        print(f"direct and decomposed products differ by {rel:.2e}", file=sys.stderr)
        if not cfg.signal.windowed:
            return EXIT_TOLERANCE
        # hard-windowed signals have truncation-dependent second moments
        print("windowed signal: spreads are window- and grid-relative, not checked", file=sys.stderr)
    if bound.slack < -cfg.violation * max(bound.lower_bound, 1e-300):
        print(f"bound violated: slack {bound.slack!r}", file=sys.stderr)
        return EXIT_TOLERANCE
    return EXIT_OK


def cmd_optimize(cfg: RunConfig) -> int:
    sec = cfg.raw.get("optimize", {})
    get = lambda k: _number(sec.get(k, ""), f"optimize.{k}")
    a1, b1 = get("a1"), get("b1")
    try:
        A1 = optimal_a1(a1, b1)
        A2 = lfm_a2(get("beta"), get("b2"), get("d2"), a1, b1)
    except SWDLError as exc:
        raise ConfigError("optimize", str(exc)) from None
    beats_swd, beats_wdl = superresolution_flags(A1, A2)
    print(f"A1 = {A1.to_record()}")
    print(f"A2 = {A2.to_record()}")
    print(f"c1^2 + d1^2 = {A1.c ** 2 + A1.d ** 2!r}")
    print(f"resolution_bound = {resolution_bound(A1, A2)!r}")
    print(f"beats_swd = {str(beats_swd).lower()}")
    print(f"beats_wdl = {str(beats_wdl).lower()}")
    return EXIT_OK


def cmd_detect(cfg: RunConfig) -> int:
    os.makedirs(cfg.out, exist_ok=True)
    method = "definition" if cfg.method == "both" else cfg.method
    g = _grid(cfg, method)
    inter = g.u if cfg.intercepts is None else cfg.intercepts
    rmap = detect.radon(g, cfg.slopes, inter)
    dist = detect.rate_distribution(rmap, cfg.A1, cfg.A2)
    slope, intercept = detect.ridge_fit(g)
    rmap.to_csv(os.path.join(cfg.out, "radon.csv"))
    dist.to_csv(os.path.join(cfg.out, "rates.csv"))
    _write_rows(os.path.join(cfg.out, "detect.csv"), ["key", "value"],
                [("peak_rate", dist.peak_rate), ("peak_to_mean", dist.peak_to_mean),
                 ("best_intercept", dist.best_intercept), ("ridge_slope", slope),
                 ("ridge_intercept", intercept)])
    _manifest(cfg, "detect", ["radon.csv", "rates.csv", "detect.csv"], {"grid": g.describe()})
    print(f"peak_rate = {dist.peak_rate!r}")
    print(f"peak_to_mean = {dist.peak_to_mean!r}")
    print(f"ridge: u = {slope!r} t + {intercept!r}")
    return EXIT_OK


def cmd_experiment(cfg: RunConfig) -> int:
    os.makedirs(cfg.out, exist_ok=True)
    method = "definition" if cfg.method == "both" else cfg.method
    cmp = detect.compare_methods(cfg.signal, cfg.A1, cfg.A2, cfg.t_grid, cfg.u_grid,
                                 cfg.slopes, cfg.intercepts, method)
    files, peaks = [], {}
    for m in cmp.methods:
        name = m.name.lower()
        peaks[f"{name}.pgm"] = repr(m.grid.to_pgm(os.path.join(cfg.out, f"{name}.pgm")))
        m.rates.to_csv(os.path.join(cfg.out, f"{name}_rates.csv"))
        files += [f"{name}.pgm", f"{name}_rates.csv"]
    cmp.to_csv(os.path.join(cfg.out, "summary.csv"))
    files.append("summary.csv")
    beats_swd, beats_wdl = superresolution_flags(cfg.A1, cfg.A2)
    swdl = cmp.by_name("SWDL").rates.peak_to_mean
    others = {m.name: m.rates.peak_to_mean for m in cmp.methods if m.name != "SWDL"}
    largest = all(swdl > v for v in others.values())
    extra = {"heatmap_normalization": "per-file peak", "heatmap_peaks": peaks,
             "superresolution": {"beats_swd": beats_swd, "beats_wdl": beats_wdl},
             "grids": {m.name: m.grid.describe() for m in cmp.methods}}
    _manifest(cfg, "experiment", files, extra)
    for name, rate, ptm, peak in cmp.summary_rows():
        print(f"{name:5s} peak_rate = {rate!r} peak_to_mean = {ptm!r} normalized_peak = {peak!r}")
    print(f"beats_swd = {str(beats_swd).lower()}")
    print(f"beats_wdl = {str(beats_wdl).lower()}")
    print(f"swdl_most_concentrated = {str(largest).lower()}")
    return EXIT_OK


COMMANDS = {
    "tfd": cmd_tfd,
    "bounds": cmd_bounds,
    "optimize": cmd_optimize,
    "detect": cmd_detect,
    "experiment": cmd_experiment,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="swdl", description=__doc__.split("\n\n")[0])
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", help="INI configuration file")
    p.add_argument("--out", help="output directory (overrides [run] out)")
    p.add_argument("--method", choices=["definition", "equivalent", "both"])
    p.add_argument("--preset", default="fig1", help="built-in defaults (only 'fig1')")
    p.add_argument("--set", dest="overrides", action="append", default=[],
                   metavar="SECTION.KEY=VALUE", help="override one configuration key")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = list(args.overrides)
    if args.out is not None:
        overrides.append(f"run.out={args.out}")
    if args.method is not None:
        overrides.append(f"run.method={args.method}")
    try:
        cfg = resolve(load_raw(args.config, overrides, args.preset))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            return COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SignalClassMismatch, DecompositionMismatch) as exc:
        print(f"{args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_TOLERANCE
    except (SWDLError, ValueError, ZeroDivisionError) as exc:
        print(f"{args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
