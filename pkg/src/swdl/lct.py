"""Linear canonical transform: kernel, quadrature reference path, chirp-FFT fast path."""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import AliasRisk, UnboundedSupport, ZeroB
from .signals import SampledSignal, Signal, max_phase_rate
from .symplectic import L1, SymplecticMatrix

GL_ORDER = 8
MIN_PANELS = 64
# phase advance per panel is kept below 2*pi / PANELS_PER_CYCLE
PANELS_PER_CYCLE = 8
CHUNK = 1 << 21
SQRT_J = np.sqrt(1j)


@lru_cache(maxsize=8)
def _gl_reference(order: int):
    return np.polynomial.legendre.leggauss(order)


def gauss_legendre_panels(lo: float, hi: float, panels: int, order: int = GL_ORDER):
    """Nodes and weights of a composite Gauss-Legendre rule on ``[lo, hi]``."""
    x, w = _gl_reference(order)
    edges = np.linspace(lo, hi, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def panel_count(length: float, rate: float) -> int:
    return max(MIN_PANELS, int(math.ceil(PANELS_PER_CYCLE * length * rate / (2.0 * math.pi))))


def kernel_constant(b: float) -> complex:
    """``1 / sqrt(j 2 pi b)`` on the principal branch."""
    if b == 0:
        raise ZeroB()
    return 1.0 / np.sqrt(1j * 2.0 * math.pi * b)


def kernel(A: SymplecticMatrix, u, t):
    """LCT kernel ``LK^A(u, t)``; broadcasts over ``u`` and ``t``."""
    c0 = kernel_constant(A.b)
    u = np.asarray(u, dtype=float)
    t = np.asarray(t, dtype=float)
    phase = (A.d * u * u - 2.0 * u * t + A.a * t * t) / (2.0 * A.b)
    return c0 * np.exp(1j * phase)


@dataclass(frozen=True)
class LctResult:
    u0: float
    du: float
    values: np.ndarray

    def __post_init__(self):
        if not self.du > 0:
            raise ValueError("du must be > 0")
        vals = np.asarray(self.values, dtype=complex)
        if not np.all(np.isfinite(vals)):
            raise ValueError("LCT values must be finite")
        object.__setattr__(self, "values", vals)

    @property
    def u(self) -> np.ndarray:
        return self.u0 + self.du * np.arange(self.values.size)

    def norm(self) -> float:
        return math.sqrt(float(np.sum(np.abs(self.values) ** 2)) * self.du)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["u", "re", "im"])
            for u, v in zip(self.u, self.values):
                w.writerow([repr(float(u)), repr(float(v.real)), repr(float(v.imag))])


def uniform_axis(grid) -> tuple[float, float, int]:
    """(start, step, count) of an evenly spaced 1-D grid; a single point gets step 1."""
    g = np.asarray(grid, dtype=float).ravel()
    if g.size == 0:
        raise ValueError("empty grid")
    if g.size == 1:
        return float(g[0]), 1.0, 1
    step = (g[-1] - g[0]) / (g.size - 1)
    if not step > 0 or np.max(np.abs(np.diff(g) - step)) > 1e-9 * max(abs(step), 1.0):
        raise ValueError("grid must be ascending and evenly spaced")
    return float(g[0]), float(step), int(g.size)


def _check_support(f: Signal):
    lo, hi = f.support
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise UnboundedSupport(f"support {f.support} is not finite")
    return lo, hi


def _chirp_sum(samples, nodes, weights, u, A: SymplecticMatrix):
    """``C e^{j d u^2/2b} sum_k s_k e^{j a t_k^2/2b} w_k e^{-j u t_k / b}``."""
    u = np.asarray(u, dtype=float)
    h = samples * np.exp(1j * A.a * nodes * nodes / (2.0 * A.b)) * weights
    out = np.empty(u.shape, dtype=complex)
    flat = u.ravel()
    res = out.reshape(-1)
    step = max(1, CHUNK // max(nodes.size, 1))
    for i in range(0, flat.size, step):
        uu = flat[i:i + step]
        res[i:i + step] = np.exp(-1j * np.outer(uu, nodes) / A.b) @ h
    return kernel_constant(A.b) * np.exp(1j * A.d * u * u / (2.0 * A.b)) * out


def lct_values(f: Signal, A: SymplecticMatrix, u, panels: int | None = None) -> np.ndarray:
    """``L^A f`` at arbitrary points ``u`` by composite Gauss-Legendre quadrature.

    The ``b = 0`` case is the closed form ``sqrt(d) e^{j c d u^2 / 2} f(d u)``.
    """
    u = np.asarray(u, dtype=float)
    if A.b == 0:
        amp = np.sqrt(complex(A.d))
        return amp * np.exp(1j * A.c * A.d * u * u / 2.0) * _inside(f, A.d * u)
    lo, hi = _check_support(f)
    if panels is None:
        umax = float(np.max(np.abs(u))) if u.size else 0.0
        rate = max_phase_rate(f) + (umax + abs(A.a) * max(abs(lo), abs(hi))) / abs(A.b)
        panels = panel_count(hi - lo, rate)
    nodes, weights = gauss_legendre_panels(lo, hi, panels)
    return _chirp_sum(f(nodes), nodes, weights, u, A)


def _inside(f: Signal, t):
    lo, hi = f.support
    return np.where((t >= lo) & (t <= hi), f(t), 0.0)


def lct_quadrature(f: Signal, A: SymplecticMatrix, u_grid, panels: int | None = None) -> LctResult:
    """Reference LCT on an evenly spaced ``u_grid``; ``b = 0`` is rejected (no integral form)."""
    if A.b == 0:
        raise ZeroB()
    u0, du, n = uniform_axis(u_grid)
    u = u0 + du * np.arange(n)
    return LctResult(u0, du, lct_values(f, A, u, panels))


def fourier(f: Signal, omega) -> np.ndarray:
    """Unitary Fourier transform ``(2 pi)^{-1/2} int f(t) e^{-j omega t} dt``."""
    return SQRT_J * lct_values(f, L1, omega)


def alias_margin(s: SampledSignal, A: SymplecticMatrix) -> float:
    """Largest phase increment per sample of the chirp-premultiplied data (radians)."""
    t = s.times
    v = s.values
    step = np.abs(np.angle(v[1:] * np.conj(v[:-1]))) if v.size > 1 else np.zeros(0)
    own = float(step.max()) if step.size else 0.0
    chirp = abs(A.a) * float(np.max(np.abs(t))) * s.dt / abs(A.b) if A.b != 0 else 0.0
    return own + chirp


def lct_fast(s: SampledSignal, A: SymplecticMatrix, oversample: int = 2) -> LctResult:
    """Chirp multiply, FFT, chirp multiply.

    The output lattice has step ``2 pi |b| / (N dt)`` with ``N`` the padded
    power-of-two length, centred on ``u = 0``. Emits AliasRisk when the
    premultiplied sequence advances by pi or more per sample.
    """
    if A.b == 0:
        raise ZeroB()
    if alias_margin(s, A) >= math.pi:
        warnings.warn(AliasRisk(f"phase increment per sample >= pi for b={A.b:g}"), stacklevel=2)
    m = s.n
    n = 1 << int(math.ceil(math.log2(max(oversample * m, 2))))
    t = s.times
    du = 2.0 * math.pi * abs(A.b) / (n * s.dt)
    u0 = -(n // 2) * du
    g = np.zeros(n, dtype=complex)
    g[:m] = s.values * np.exp(1j * A.a * t * t / (2.0 * A.b))
    # e^{-j u_m t_k / b} with u_m = u0 + m du, t_k = t0 + k dt
    g[:m] *= np.exp(-1j * u0 * (t - s.t0) / A.b)
    if A.b > 0:
        spec = np.fft.fft(g)
    else:
        spec = np.fft.ifft(g) * n
    u = u0 + du * np.arange(n)
    vals = spec * np.exp(-1j * u * s.t0 / A.b) * s.dt
    vals *= kernel_constant(A.b) * np.exp(1j * A.d * u * u / (2.0 * A.b))
    return LctResult(u0, du, vals)


def lct_inverse(g: LctResult, A: SymplecticMatrix, t_grid) -> LctResult:
    """``L^{A^-1} g`` on ``t_grid`` by the lattice sum over the stored u samples.

    Accurate when ``g`` has decayed at both ends of its lattice and the lattice
    resolves the kernel oscillation.
    """
    t0, dt, n = uniform_axis(t_grid)
    t = t0 + dt * np.arange(n)
    inv = A.inverse()
    u = g.u
    w = np.full(u.size, g.du)
    return LctResult(t0, dt, _chirp_sum(g.values, u, w, t, inv))
