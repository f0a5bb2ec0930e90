"""Test signals: analytic closed forms plus sampled data with sinc interpolation.

Every signal carries a finite support interval. Analytic signals are exact
everywhere; quadratures only visit the support, so an LFM chirp is treated
as living on its observation window.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import InvalidWidth

ENVELOPE_FLOOR = 1e-12
KAISER_TAPS = 16
KAISER_BETA = 12.0


@dataclass(frozen=True)
class Signal:
    """Evaluable complex signal with a finite support interval.

    ``phase_rate`` is the closed-form derivative of the phase (rad/s) when
    known; ``windowed`` marks signals that are only square-integrable on
    their support (LFM chirps).
    """

    evaluator: Callable[[np.ndarray], np.ndarray]
    support: tuple[float, float]
    kind: str = "analytic"
    name: str = "signal"
    params: dict = field(default_factory=dict)
    phase_rate: Callable[[np.ndarray], np.ndarray] | None = None
    windowed: bool = False
    real: bool = False

    def __post_init__(self):
        lo, hi = self.support
        if not (math.isfinite(lo) and math.isfinite(hi)) or not lo < hi:
            raise ValueError(f"support must be a finite interval with lo < hi, got {self.support}")
        object.__setattr__(self, "support", (float(lo), float(hi)))

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return np.asarray(self.evaluator(t), dtype=complex)

    @property
    def width(self) -> float:
        return self.support[1] - self.support[0]


@dataclass(frozen=True)
class GaussianChirpParams:
    t0_center: float = 0.0
    zeta: float = 1.0
    epsilon: float = 0.0
    omega0: float = 0.0
    xi: float = 1.0
    m: int = 1
    varsigma: float = 0.0


def _gaussian_support(t0: float, zeta: float) -> tuple[float, float]:
    half = math.sqrt(2.0 * zeta * math.log(1.0 / ENVELOPE_FLOOR))
    return (t0 - half, t0 + half)


def _check_width(name, value):
    if not value > 0:
        raise InvalidWidth(f"{name} must be > 0, got {value}")


def lfm(alpha: float, beta: float, window: tuple[float, float] = (-5.0, 5.0)) -> Signal:
    """``exp(j(alpha t + beta t^2))`` observed on ``window``."""

    def ev(t):
        return np.exp(1j * (alpha * t + beta * t * t))

    def rate(t):
        return alpha + 2.0 * beta * np.asarray(t, dtype=float)

    return Signal(ev, window, name="lfm", params={"alpha": alpha, "beta": beta},
                  phase_rate=rate, windowed=True)


def gaussian(t0_center: float = 0.0, zeta: float = 1.0, epsilon: float = 0.0) -> Signal:
    """``exp(-(t - t0)^2 / (2 zeta) + epsilon)``."""
    _check_width("zeta", zeta)

    def ev(t):
        s = t - t0_center
        return np.exp(-s * s / (2.0 * zeta) + epsilon).astype(complex)

    return Signal(ev, _gaussian_support(t0_center, zeta), name="gaussian",
                  params={"t0_center": t0_center, "zeta": zeta, "epsilon": epsilon},
                  phase_rate=lambda t: np.zeros_like(np.asarray(t, dtype=float)), real=True)


def gauss_exponential(t0_center: float = 0.0, zeta: float = 1.0, epsilon: float = 0.0,
                      omega0: float = 0.0, varsigma: float = 0.0) -> Signal:
    """Gaussian envelope times ``exp(j(omega0 t + varsigma))``."""
    _check_width("zeta", zeta)

    def ev(t):
        s = t - t0_center
        return np.exp(-s * s / (2.0 * zeta) + epsilon) * np.exp(1j * (omega0 * t + varsigma))

    return Signal(ev, _gaussian_support(t0_center, zeta), name="gauss_exponential",
                  params={"t0_center": t0_center, "zeta": zeta, "epsilon": epsilon,
                          "omega0": omega0, "varsigma": varsigma},
                  phase_rate=lambda t: np.full_like(np.asarray(t, dtype=float), omega0),
                  real=(omega0 == 0 and varsigma == 0))


_ETA = {
    1: lambda s: np.ones_like(s),
    2: lambda s: -np.ones_like(s),
    3: lambda s: np.sign(s),
    4: lambda s: -np.sign(s),
}


def gauss_chirp(params: GaussianChirpParams | None = None, **kw) -> Signal:
    """Gaussian-enveloped chirp ``exp(j[eta_m(t) (t-t0)^2 / (2 xi) + omega0 t + varsigma])``.

    ``m`` selects ``eta``: 1 -> +1, 2 -> -1, 3 -> sgn(t - t0), 4 -> -sgn(t - t0).
    """
    p = params if params is not None else GaussianChirpParams(**kw)
    _check_width("zeta", p.zeta)
    _check_width("xi", p.xi)
    if p.m not in _ETA:
        raise ValueError(f"m must be one of 1..4, got {p.m}")
    eta = _ETA[p.m]

    def ev(t):
        s = t - p.t0_center
        phase = eta(s) * s * s / (2.0 * p.xi) + p.omega0 * t + p.varsigma
        return np.exp(-s * s / (2.0 * p.zeta) + p.epsilon) * np.exp(1j * phase)

    def rate(t):
        s = np.asarray(t, dtype=float) - p.t0_center
        return eta(s) * s / p.xi + p.omega0

    return Signal(ev, _gaussian_support(p.t0_center, p.zeta), name=f"gauss_chirp_m{p.m}",
                  params=dict(p.__dict__), phase_rate=rate)


def from_function(fn, support, name="custom", phase_rate=None, real=False, windowed=False) -> Signal:
    return Signal(fn, tuple(support), name=name, phase_rate=phase_rate, real=real, windowed=windowed)


def zero_signal(support=(-1.0, 1.0)) -> Signal:
    return Signal(lambda t: np.zeros(np.shape(t), dtype=complex), support, name="zero",
                  phase_rate=lambda t: np.zeros_like(np.asarray(t, dtype=float)), real=True)


# -- signal operators (used by the property suite) --------------------------

def conjugate(f: Signal) -> Signal:
    rate = None if f.phase_rate is None else (lambda t: -f.phase_rate(t))
    return Signal(lambda t: np.conj(f(t)), f.support, f.kind, f"conj({f.name})",
                  phase_rate=rate, windowed=f.windowed, real=f.real)


def time_reversed(f: Signal) -> Signal:
    lo, hi = f.support
    rate = None if f.phase_rate is None else (lambda t: -f.phase_rate(-np.asarray(t)))
    return Signal(lambda t: f(-t), (-hi, -lo), f.kind, f"rev({f.name})",
                  phase_rate=rate, windowed=f.windowed, real=f.real)


def scaled(f: Signal, sigma: float) -> Signal:
    """``sqrt(sigma) f(sigma t)`` for ``sigma > 0``."""
    _check_width("sigma", sigma)
    lo, hi = f.support
    amp = math.sqrt(sigma)
    rate = None if f.phase_rate is None else (lambda t: sigma * f.phase_rate(sigma * np.asarray(t)))
    return Signal(lambda t: amp * f(sigma * t), (lo / sigma, hi / sigma), f.kind,
                  f"scale({f.name},{sigma:g})", phase_rate=rate, windowed=f.windowed, real=f.real)


def shifted(f: Signal, theta: float) -> Signal:
    """``f(t - theta)``."""
    lo, hi = f.support
    rate = None if f.phase_rate is None else (lambda t: f.phase_rate(np.asarray(t) - theta))
    return Signal(lambda t: f(t - theta), (lo + theta, hi + theta), f.kind,
                  f"shift({f.name},{theta:g})", phase_rate=rate, windowed=f.windowed, real=f.real)


def modulated(f: Signal, xi: float) -> Signal:
    """``exp(j xi t) f(t)``."""
    rate = None if f.phase_rate is None else (lambda t: f.phase_rate(t) + xi)
    return Signal(lambda t: np.exp(1j * xi * t) * f(t), f.support, f.kind,
                  f"mod({f.name},{xi:g})", phase_rate=rate, windowed=f.windowed)


def add(*signals: Signal) -> Signal:
    lo = min(s.support[0] for s in signals)
    hi = max(s.support[1] for s in signals)

    def ev(t):
        out = np.zeros(np.shape(t), dtype=complex)
        for s in signals:
            inside = (t >= s.support[0]) & (t <= s.support[1])
            out = out + np.where(inside, s(t), 0.0)
        return out

    return Signal(ev, (lo, hi), name="+".join(s.name for s in signals),
                  windowed=any(s.windowed for s in signals), real=all(s.real for s in signals))


# -- sampled data -----------------------------------------------------------

@dataclass(frozen=True)
class SampledSignal:
    t0: float
    dt: float
    values: np.ndarray

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be > 0")
        vals = np.asarray(self.values, dtype=complex)
        if vals.ndim != 1 or vals.size == 0:
            raise ValueError("values must be a non-empty 1-D array")
        object.__setattr__(self, "values", vals)

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.n)

    @property
    def span(self) -> tuple[float, float]:
        return (self.t0, self.t0 + self.dt * (self.n - 1))

    def __call__(self, t):
        return evaluate(self, t)

    def as_signal(self, name="sampled") -> Signal:
        lo, hi = self.span
        if hi <= lo:
            hi = lo + self.dt
        return Signal(lambda t: evaluate(self, t), (lo, hi), kind="sampled", name=name)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["t", "re", "im"])
            for t, v in zip(self.times, self.values):
                w.writerow([repr(float(t)), repr(float(v.real)), repr(float(v.imag))])

    @classmethod
    def from_csv(cls, path) -> SampledSignal:
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        if len(rows) < 2:
            raise ValueError(f"{path}: need at least two samples")
        t = np.array([float(r["t"]) for r in rows])
        v = np.array([float(r["re"]) + 1j * float(r["im"]) for r in rows])
        steps = np.diff(t)
        dt = float(steps.mean())
        if np.max(np.abs(steps - dt)) > 1e-9 * max(abs(dt), 1.0):
            raise ValueError(f"{path}: samples are not uniformly spaced")
        return cls(float(t[0]), dt, v)


def sample(f: Signal, t0: float, dt: float, n: int) -> SampledSignal:
    if not dt > 0 or n < 1:
        raise ValueError("sample needs dt > 0 and n >= 1")
    t = t0 + dt * np.arange(n)
    return SampledSignal(t0, dt, f(t))


def sinc_interpolate(values: np.ndarray, x: np.ndarray, axis: int = 0) -> np.ndarray:
    """Kaiser-windowed sinc interpolation at fractional sample positions ``x``.

    ``values`` is sampled on integer positions along ``axis``; positions outside
    ``[0, n-1]`` give 0. On-lattice positions return the stored sample exactly.
    """
    values = np.moveaxis(np.asarray(values), axis, 0)
    n = values.shape[0]
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.zeros((x.size,) + values.shape[1:], dtype=np.result_type(values, complex))
    inside = (x >= -1e-9) & (x <= n - 1 + 1e-9)
    if not inside.any():
        return np.moveaxis(out, 0, axis)
    xi = x[inside]
    k0 = np.floor(xi).astype(int)
    taps = np.arange(-KAISER_TAPS + 1, KAISER_TAPS + 1)
    idx = k0[:, None] + taps[None, :]
    d = xi[:, None] - idx
    w = np.i0(KAISER_BETA * np.sqrt(np.clip(1.0 - (d / KAISER_TAPS) ** 2, 0.0, None))) / np.i0(KAISER_BETA)
    h = np.sinc(d) * w
    valid = (idx >= 0) & (idx < n)
    h = np.where(valid, h, 0.0)
    gathered = values[np.clip(idx, 0, n - 1)]
    res = np.einsum("ij,ij...->i...", h, gathered)
    exact = np.abs(xi - np.round(xi)) < 1e-12
    if exact.any():
        res[exact] = values[np.round(xi[exact]).astype(int)]
    out[inside] = res
    return np.moveaxis(out, 0, axis)


def evaluate(s: SampledSignal, t) -> np.ndarray:
    """Windowed-sinc value of a sampled signal at arbitrary times; 0 outside its span."""
    t = np.asarray(t, dtype=float)
    x = (t.ravel() - s.t0) / s.dt
    return sinc_interpolate(s.values, x).reshape(t.shape)


# -- helpers for quadrature sizing -----------------------------------------

def max_phase_rate(f: Signal, interval: tuple[float, float] | None = None, n: int = 4097) -> float:
    """Largest |phase derivative| of ``f`` over ``interval`` (default: its support)."""
    lo, hi = interval if interval is not None else f.support
    t = np.linspace(lo, hi, n)
    if f.phase_rate is not None:
        return float(np.max(np.abs(f.phase_rate(t))))
    v = f(t)
    mag = np.abs(v)
    if mag.max() == 0:
        return 0.0
    rate = np.gradient(np.unwrap(np.angle(v)), t)
    keep = mag > 1e-8 * mag.max()
    return float(np.max(np.abs(rate[keep]))) if keep.any() else 0.0


def phase_derivative(f: Signal, t: np.ndarray) -> np.ndarray:
    """Closed-form phase derivative when available, otherwise unwrapped central differences."""
    t = np.asarray(t, dtype=float)
    if f.phase_rate is not None:
        return np.asarray(f.phase_rate(t), dtype=float)
    return np.gradient(np.unwrap(np.angle(f(t))), t)


def spectral_extent(f: Signal, floor: float = 1e-10, max_points: int = 1 << 20) -> tuple[float, float]:
    """Angular-frequency interval holding the spectrum of ``f`` above ``floor`` times its peak.

    The support is sampled and FFT'd, doubling the sample count until the top
    eighth of the band is below the floor. Windowed signals (hard-edged chirps)
    never decay that far; for them the instantaneous-frequency range is
    returned, widened by 40 spectral resolution cells.
    """
    lo, hi = f.support
    width = hi - lo
    rate = max_phase_rate(f)
    if f.windowed:
        t = np.linspace(lo, hi, 4097)
        inst = phase_derivative(f, t)
        pad = 40.0 * 2.0 * math.pi / width
        return float(inst.min() - pad), float(inst.max() + pad)
    n = 1 << max(10, int(math.ceil(math.log2(4.0 * width * (rate + 1.0) / math.pi))))
    while True:
        dt = width / n
        t = lo + dt * np.arange(n)
        spec = np.abs(np.fft.fftshift(np.fft.fft(f(t))))
        omega = np.fft.fftshift(np.fft.fftfreq(n, dt)) * 2.0 * math.pi
        peak = spec.max()
        if peak == 0:
            return (0.0, 0.0)
        edge = np.concatenate([spec[: n // 16], spec[-n // 16:]])
        if edge.max() <= floor * peak or 2 * n > max_points:
            keep = np.nonzero(spec > floor * peak)[0]
            return float(omega[keep[0]]), float(omega[keep[-1]])
        n *= 2
