"""Radon-transform detection of linear ridges and chirp-rate estimation."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateMap, EmptyGrid
from .signals import Signal
from .symplectic import L1, WD_A1, SymplecticMatrix
from .tfd import TFGrid, compute

DEFAULT_SLOPES = np.linspace(0.0, 2.0, 101)


@dataclass(frozen=True)
class RadonMap:
    slopes: np.ndarray
    intercepts: np.ndarray
    accum: np.ndarray

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["slope", "intercept", "value"])
            for i, s in enumerate(self.slopes):
                for k, c in enumerate(self.intercepts):
                    w.writerow([repr(float(s)), repr(float(c)), repr(float(self.accum[i, k]))])


@dataclass(frozen=True)
class RateAmplitude:
    rates: np.ndarray
    amplitude: np.ndarray
    peak_rate: float
    peak_to_mean: float
    best_intercept: float = float("nan")

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["rate", "amplitude"])
            for r, a in zip(self.rates, self.amplitude):
                w.writerow([repr(float(r)), repr(float(a))])


def radon(grid: TFGrid, slopes, intercepts) -> RadonMap:
    """Line integrals of ``|W|`` along ``u = s t + c``, linear in u, scaled by dt."""
    slopes = np.asarray(slopes, dtype=float).ravel()
    intercepts = np.asarray(intercepts, dtype=float).ravel()
    if slopes.size == 0 or intercepts.size == 0 or grid.values.size == 0:
        raise EmptyGrid("radon needs non-empty slope, intercept and grid axes")
    mag = np.abs(grid.values)
    nt, nu = mag.shape
    t = grid.t
    rows = np.arange(nt)[:, None]
    accum = np.zeros((slopes.size, intercepts.size))
    for i, s in enumerate(slopes):
        x = (s * t[:, None] + intercepts[None, :] - grid.u0) / grid.du
        k = np.floor(x).astype(int)
        frac = x - k
        inside = (x >= 0) & (x <= nu - 1)
        k0 = np.clip(k, 0, nu - 1)
        k1 = np.clip(k + 1, 0, nu - 1)
        val = (1.0 - frac) * mag[rows, k0] + frac * mag[rows, k1]
        accum[i] = np.where(inside, val, 0.0).sum(axis=0) * grid.dt
    return RadonMap(slopes, intercepts, accum)


def slope_per_rate(A1: SymplecticMatrix, A2: SymplecticMatrix) -> float:
    """Ridge slope produced by unit chirp rate: ``2 (b1 d1 - a1 c1) b2``."""
    gain = A1.b * A1.d - A1.a * A1.c
    if abs(gain) < 1e-15 or A2.b == 0:
        raise DegenerateMap("b1 d1 - a1 c1 and b2 must be non-zero to map slopes to rates")
    return 2.0 * gain * A2.b


def ridge_intercept(A1: SymplecticMatrix, A2: SymplecticMatrix, alpha: float) -> float:
    """Ridge offset ``alpha (d1 - c1) b2`` for a chirp with initial frequency ``alpha``."""
    return alpha * (A1.d - A1.c) * A2.b


def rate_distribution(rmap: RadonMap, A1: SymplecticMatrix, A2: SymplecticMatrix) -> RateAmplitude:
    per = slope_per_rate(A1, A2)
    rates = rmap.slopes / per
    best = np.argmax(rmap.accum, axis=1)
    amplitude = rmap.accum[np.arange(rmap.slopes.size), best]
    order = np.argsort(rates)
    rates, amplitude, best = rates[order], amplitude[order], best[order]
    top = int(np.argmax(amplitude))
    mean = float(amplitude.mean())
    ratio = float(amplitude[top] / mean) if mean > 0 else 0.0
    return RateAmplitude(rates, amplitude, float(rates[top]), ratio, float(rmap.intercepts[best[top]]))


def ridge_fit(grid: TFGrid, level: float = 0.5) -> tuple[float, float]:
    """Least-squares line through per-row magnitude maxima.

    Rows whose maximum is below ``level`` times the global peak are ignored;
    maxima are refined with a three-point parabola.
    """
    mag = np.abs(grid.values)
    peak = mag.max()
    if peak == 0:
        raise EmptyGrid("grid is identically zero")
    keep = mag.max(axis=1) >= level * peak
    idx = np.argmax(mag, axis=1)
    pos = idx.astype(float)
    nu = mag.shape[1]
    for i in np.nonzero(keep)[0]:
        k = idx[i]
        if 0 < k < nu - 1:
            y0, y1, y2 = mag[i, k - 1], mag[i, k], mag[i, k + 1]
            den = y0 - 2.0 * y1 + y2
            if den < 0:
                pos[i] = k + 0.5 * (y0 - y2) / den
    t = grid.t[keep]
    u = grid.u0 + grid.du * pos[keep]
    slope, intercept = np.polyfit(t, u, 1)
    return float(slope), float(intercept)


@dataclass
class MethodResult:
    name: str
    A1: SymplecticMatrix
    A2: SymplecticMatrix
    grid: TFGrid
    rmap: RadonMap
    rates: RateAmplitude
    normalized_peak: float = 0.0


@dataclass
class Comparison:
    methods: list = field(default_factory=list)

    def by_name(self, name) -> MethodResult:
        for m in self.methods:
            if m.name == name:
                return m
        raise KeyError(name)

    def summary_rows(self):
        return [(m.name, m.rates.peak_rate, m.rates.peak_to_mean, m.normalized_peak) for m in self.methods]

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["method", "peak_rate", "peak_to_mean", "normalized_peak"])
            for name, rate, ptm, peak in self.summary_rows():
                w.writerow([name, repr(float(rate)), repr(float(ptm)), repr(float(peak))])


def compare_methods(f: Signal, A1: SymplecticMatrix, A2: SymplecticMatrix, t_grid, u_grid,
                    slopes=None, intercepts=None, method: str = "definition") -> Comparison:
    """SWDL, SWD, WDL and WD of ``f`` with their Radon rate-amplitude curves.

    Every method scans the same slope grid on identical (t, u) axes; the rate
    axis of each curve follows from that method's own slope-to-rate factor.
    """
    slopes = DEFAULT_SLOPES if slopes is None else np.asarray(slopes, dtype=float)
    setups = [("SWDL", A1, A2), ("SWD", A1, L1), ("WDL", WD_A1, A2), ("WD", WD_A1, L1)]
    out = Comparison()
    for name, B1, B2 in setups:
        grid = compute(f, B1, B2, t_grid, u_grid, method)
        c = grid.u if intercepts is None else np.asarray(intercepts, dtype=float)
        rmap = radon(grid, slopes, c)
        out.methods.append(MethodResult(name, B1, B2, grid, rmap, rate_distribution(rmap, B1, B2)))
    top = max(float(m.rates.amplitude.max()) for m in out.methods)
    for m in out.methods:
        m.normalized_peak = float(m.rates.amplitude.max()) / top if top > 0 else 0.0
    return out
