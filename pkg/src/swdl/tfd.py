"""Symplectic Wigner distribution in the LCT domain and its special cases.

Two engines are provided. ``swdl_definition`` integrates the lag variable
directly; ``swdl_equivalent`` goes through the two auxiliary LCTs and a single
Fourier-type sum over their product. Both return a ``TFGrid`` indexed
``[t_index, u_index]``.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import lct as _lct
from .errors import AxisMismatch, ZeroAtOrigin, ZeroB, ZeroEntry, TruncationWarning
from .signals import SampledSignal, Signal, max_phase_rate, sinc_interpolate, spectral_extent
from .symplectic import (L1, WD_A1, SymplecticMatrix, derive_a3, derive_a4, derive_a5)

EDGE_FRACTION = 1e-6
# lattice step of the equivalent path is this fraction of the aliasing limit
LATTICE_SAFETY = 0.7


@dataclass(frozen=True)
class TFGrid:
    t0: float
    dt: float
    u0: float
    du: float
    values: np.ndarray
    A1: SymplecticMatrix
    A2: SymplecticMatrix
    method: str = "definition"

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if vals.ndim != 2:
            raise ValueError("TFGrid values must be a 2-D array")
        if not (self.dt > 0 and self.du > 0):
            raise ValueError("dt and du must be > 0")
        if not np.all(np.isfinite(vals)):
            raise ValueError("TFGrid values must be finite")
        object.__setattr__(self, "values", vals)

    @property
    def t(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.values.shape[0])

    @property
    def u(self) -> np.ndarray:
        return self.u0 + self.du * np.arange(self.values.shape[1])

    @property
    def shape(self):
        return self.values.shape

    def norm(self) -> float:
        """L2 norm of the grid by the lattice rule."""
        return math.sqrt(float(np.sum(np.abs(self.values) ** 2)) * self.dt * self.du)

    def same_axes(self, other: TFGrid, tol: float = 1e-12) -> bool:
        return (self.shape == other.shape
                and abs(self.t0 - other.t0) <= tol and abs(self.dt - other.dt) <= tol
                and abs(self.u0 - other.u0) <= tol and abs(self.du - other.du) <= tol)

    def with_values(self, values, method=None) -> TFGrid:
        return TFGrid(self.t0, self.dt, self.u0, self.du, values, self.A1, self.A2,
                      method or self.method)

    def to_csv(self, path):
        t = self.t
        u = self.u
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["t", "u", "re", "im", "abs"])
            for i, ti in enumerate(t):
                row = self.values[i]
                for k, uk in enumerate(u):
                    v = row[k]
                    w.writerow([repr(float(ti)), repr(float(uk)), repr(float(v.real)),
                                repr(float(v.imag)), repr(float(abs(v)))])

    def to_pgm(self, path) -> float:
        """8-bit binary PGM of ``|W|`` normalized to its peak; returns the peak."""
        mag = np.abs(self.values)
        peak = float(mag.max())
        scaled = np.zeros(mag.shape) if peak == 0 else mag / peak
        img = np.round(scaled * 255.0).astype(np.uint8)
        rows, cols = img.shape
        with open(path, "wb") as fh:
            fh.write(f"P5\n{cols} {rows}\n255\n".encode("ascii"))
            fh.write(img.tobytes())
        return peak

    def describe(self) -> dict:
        return {
            "A1": self.A1.to_record(),
            "A2": self.A2.to_record(),
            "method": self.method,
            "t": {"start": repr(float(self.t0)), "step": repr(float(self.dt)), "count": self.shape[0]},
            "u": {"start": repr(float(self.u0)), "step": repr(float(self.du)), "count": self.shape[1]},
            "sha256": hashlib.sha256(self.values.tobytes()).hexdigest(),
        }


def write_manifest(path, payload: dict):
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


# -- lag-domain engine -------------------------------------------------------

def _preimage(center: float, slope: float, lo: float, hi: float):
    """``{e : lo <= center + slope*e <= hi}`` as (start, end); None when empty, inf when free."""
    if slope == 0:
        return (-math.inf, math.inf) if lo <= center <= hi else None
    a = (lo - center) / slope
    b = (hi - center) / slope
    return (min(a, b), max(a, b))


def lag_interval(f: Signal, A1: SymplecticMatrix, t: float):
    """Lag range where both ``b1 t + d1 e`` and ``a1 t + c1 e`` fall in the support."""
    lo, hi = f.support
    first = _preimage(A1.b * t, A1.d, lo, hi)
    second = _preimage(A1.a * t, A1.c, lo, hi)
    if first is None or second is None:
        return None
    start = max(first[0], second[0])
    end = min(first[1], second[1])
    if not end > start:
        return None
    return start, end


def swdl_definition(f: Signal, A1: SymplecticMatrix, A2: SymplecticMatrix, t_grid, u_grid,
                    panels: int | None = None) -> TFGrid:
    """SWDL by direct lag integration, one composite Gauss-Legendre rule per time row."""
    if A2.b == 0:
        raise ZeroB("b2")
    t0, dt, nt = _lct.uniform_axis(t_grid)
    u0, du, nu = _lct.uniform_axis(u_grid)
    t = t0 + dt * np.arange(nt)
    u = u0 + du * np.arange(nu)
    umax = float(np.max(np.abs(u)))
    slope = (abs(A1.d) + abs(A1.c)) * max_phase_rate(f)
    out = np.zeros((nt, nu), dtype=complex)
    for i, ti in enumerate(t):
        span = lag_interval(f, A1, ti)
        if span is None:
            continue
        e_lo, e_hi = span
        emax = max(abs(e_lo), abs(e_hi))
        rate = slope + umax / abs(A2.b) + abs(A2.a) * emax / abs(A2.b)
        n = panels or _lct.panel_count(e_hi - e_lo, rate)
        eps, w = _lct.gauss_legendre_panels(e_lo, e_hi, n)
        prod = f(A1.b * ti + A1.d * eps) * np.conj(f(A1.a * ti + A1.c * eps))
        out[i] = _lct._chirp_sum(prod, eps, w, u, A2)
    return TFGrid(t0, dt, u0, du, out, A1, A2, "definition")


# -- LCT-domain engine -------------------------------------------------------

def chi(A1: SymplecticMatrix, A2: SymplecticMatrix, u, t):
    """Prefactor ``chi(u, t)`` with ``1/sqrt(j b2 c1 d1)`` on the principal branch."""
    a1, b1, c1, d1 = A1.a, A1.b, A1.c, A1.d
    k = A2.b * c1 * d1
    u = np.asarray(u, dtype=float)
    t = np.asarray(t, dtype=float)
    phase = (A2.d * u * u / (2.0 * A2.b) + a1 * u * t / (A2.b * c1)
             + A2.a * a1 * b1 * t * t / (2.0 * A2.b * c1 * d1))
    return np.exp(1j * phase) / np.sqrt(1j * k)


def branch_sign(A1: SymplecticMatrix, A2: SymplecticMatrix) -> float:
    """Sign relating the kernel-consistent constant to ``1/sqrt(j 2 pi b2 c1 d1)``.

    Composing principal-branch kernel constants gives
    ``conj(C3) C4 C2 2 pi |b2|``. It equals ``1/sqrt(j 2 pi b2 c1 d1)`` up to a
    factor of +1 or -1; the factor is -1 when ``c1 > 0`` and ``d1 < 0``.
    """
    A3, A4 = derive_a3(A1, A2), derive_a4(A1, A2)
    consistent = (np.conj(_lct.kernel_constant(A3.b)) * _lct.kernel_constant(A4.b)
                  * _lct.kernel_constant(A2.b) * 2.0 * math.pi * abs(A2.b))
    literal = 1.0 / np.sqrt(1j * 2.0 * math.pi * A2.b * A1.c * A1.d)
    ratio = consistent / literal
    return 1.0 if ratio.real > 0 else -1.0


def _box_range(A: SymplecticMatrix, t_span, w_span):
    """Range of ``a x + b w`` over the phase-space box."""
    corners = [A.a * x + A.b * w for x in t_span for w in w_span]
    return min(corners), max(corners)


def swdl_equivalent(f: Signal, A1: SymplecticMatrix, A2: SymplecticMatrix, t_grid, u_grid,
                    spectrum: tuple[float, float] | None = None) -> TFGrid:
    """SWDL through the two auxiliary LCTs.

    The lag-free form integrates ``L3(v) conj(L4(v - u))`` against
    ``exp(-j v t / (b2 c1 d1))`` on a v lattice whose step divides ``du``, so
    every ``v - u`` lands on one shared lattice for the second transform.
    After the chirp corrections both transforms are band-limited in v by
    ``max|x| / |b|``, which fixes the step.
    """
    if A2.b == 0:
        raise ZeroB("b2")
    for name, value in (("a1", A1.a), ("b1", A1.b), ("c1", A1.c), ("d1", A1.d)):
        if value == 0:
            raise ZeroEntry(name)
    A3, A4 = derive_a3(A1, A2), derive_a4(A1, A2)
    k = A2.b * A1.c * A1.d
    t0, dt, nt = _lct.uniform_axis(t_grid)
    u0, du, nu = _lct.uniform_axis(u_grid)
    t = t0 + dt * np.arange(nt)
    u = u0 + du * np.arange(nu)

    lo, hi = f.support
    xmax = max(abs(lo), abs(hi))
    w_span = spectrum if spectrum is not None else spectral_extent(f)
    v_lo, v_hi = _box_range(A3, (lo, hi), w_span)
    band = xmax / abs(A3.b) + xmax / abs(A4.b) + float(np.max(np.abs(t))) / abs(k)
    h_max = LATTICE_SAFETY * 2.0 * math.pi / band
    ratio = max(1, int(math.ceil(du / h_max))) if nu > 1 else 1
    h = du / ratio if nu > 1 else h_max
    nv = int(math.ceil((v_hi - v_lo) / h)) + 1
    v = v_lo + h * np.arange(nv)

    l3 = _lct.lct_values(f, A3, v) * np.exp(-1j * A2.d * v * v / (2.0 * A2.b * A1.a * A1.d))
    # shared lattice for v_k - u_m: index k - m*ratio + (nu-1)*ratio
    mu = (v_lo - u[-1]) + h * np.arange(nv + (nu - 1) * ratio)
    l4 = _lct.lct_values(f, A4, mu) * np.exp(-1j * A2.d * mu * mu / (2.0 * A2.b * A1.b * A1.c))
    idx = np.arange(nv)[:, None] - ratio * np.arange(nu)[None, :] + (nu - 1) * ratio
    prod = l3[:, None] * np.conj(l4[idx])
    fourier = np.exp(-1j * np.outer(t, v) / k) @ prod
    scale = branch_sign(A1, A2) * h / math.sqrt(2.0 * math.pi)
    values = chi(A1, A2, u[None, :], t[:, None]) * scale * fourier
    return TFGrid(t0, dt, u0, du, values, A1, A2, "equivalent")


def compute(f: Signal, A1, A2, t_grid, u_grid, method: str = "definition") -> TFGrid:
    if method == "definition":
        return swdl_definition(f, A1, A2, t_grid, u_grid)
    if method == "equivalent":
        return swdl_equivalent(f, A1, A2, t_grid, u_grid)
    raise ValueError(f"unknown method {method!r}")


def special_case(f: Signal, which: str, t_grid, u_grid, A1: SymplecticMatrix | None = None,
                 A2: SymplecticMatrix | None = None, method: str = "definition") -> TFGrid:
    """WD, SWD(A1) or WDL(A2) as matrix specializations of the SWDL."""
    which = which.upper()
    if which == "WD":
        pair = (WD_A1, L1)
    elif which == "SWD":
        if A1 is None:
            raise ValueError("SWD needs A1")
        pair = (A1, L1)
    elif which == "WDL":
        if A2 is None:
            raise ValueError("WDL needs A2")
        pair = (WD_A1, A2)
    elif which == "SWDL":
        if A1 is None or A2 is None:
            raise ValueError("SWDL needs A1 and A2")
        pair = (A1, A2)
    else:
        raise ValueError(f"unknown distribution {which!r}")
    return compute(f, pair[0], pair[1], t_grid, u_grid, method)


def relative_l2(a: TFGrid, b: TFGrid) -> float:
    if not a.same_axes(b):
        raise AxisMismatch("grids have different axes")
    den = np.linalg.norm(b.values)
    num = np.linalg.norm(a.values - b.values)
    return float(num / den) if den > 0 else float(num)


# -- marginals, energy, reconstruction, Moyal -------------------------------

def _warn_edges(mag: np.ndarray, axis: int, what: str):
    peak = mag.max()
    if peak == 0:
        return
    edge = max(np.take(mag, 0, axis=axis).max(), np.take(mag, -1, axis=axis).max())
    if edge > EDGE_FRACTION * peak:
        warnings.warn(TruncationWarning(f"|W| at the {what} edge is {edge / peak:.1e} of the peak"),
                      stacklevel=3)


def marginal_time(grid: TFGrid, A2: SymplecticMatrix | None = None) -> np.ndarray:
    """``int W(t, u) LK^{A2^-1}(0, u) du`` for every row; equals ``f(b1 t) conj f(a1 t)``."""
    A2 = A2 or grid.A2
    _warn_edges(np.abs(grid.values), 1, "u")
    weight = _lct.kernel(A2.inverse(), 0.0, grid.u)
    return grid.values @ weight * grid.du


def marginal_lcf(grid: TFGrid, A1: SymplecticMatrix | None = None,
                 A2: SymplecticMatrix | None = None) -> np.ndarray:
    """``int W(t, u) LK^{A5^-1}(t, 0) dt`` for every column."""
    A1 = A1 or grid.A1
    A2 = A2 or grid.A2
    A5 = derive_a5(A1, A2)
    _warn_edges(np.abs(grid.values), 0, "t")
    weight = _lct.kernel(A5.inverse(), grid.t, 0.0)
    return weight @ grid.values * grid.dt


def marginal_lcf_reference(f: Signal, A1: SymplecticMatrix, A2: SymplecticMatrix, u) -> np.ndarray:
    """Right-hand side ``L^{A3} f(a1 d1 u) conj(L^{A4} f(b1 c1 u))``.

    With principal-branch kernels the identity carries ``branch_sign``, so the
    product is negated when ``c1 > 0`` and ``d1 < 0``.
    """
    u = np.asarray(u, dtype=float)
    A3, A4 = derive_a3(A1, A2), derive_a4(A1, A2)
    return branch_sign(A1, A2) * (_lct.lct_values(f, A3, A1.a * A1.d * u)
            * np.conj(_lct.lct_values(f, A4, A1.b * A1.c * u)))


def energy_time(grid: TFGrid) -> complex:
    """``|b1| int int W LK^{A2^-1}(0, u)``; the signal energy when ``a1 = b1``."""
    return abs(grid.A1.b) * complex(np.sum(marginal_time(grid)) * grid.dt)


def lcf_energy_constant(A1: SymplecticMatrix, A2: SymplecticMatrix) -> complex:
    """Normalizer turning the double integral against ``LK^{A5^-1}(t, 0)`` into the energy.

    Valid for ``a1 = b1`` and ``a2 = d2 = 0``. Built from principal-branch kernel
    constants, so it equals ``|b1| conj(sqrt(c1)) sqrt(d1)`` when ``c1 > 0`` and
    its negative when ``c1 < 0``.
    """
    b2, c1, d1 = A2.b, A1.c, A1.d
    return abs(A1.a) * np.sqrt(1j * b2 * d1) * np.conj(np.sqrt(1j * b2 * c1)) / abs(b2)


def energy_lcf(grid: TFGrid) -> complex:
    return lcf_energy_constant(grid.A1, grid.A2) * complex(np.sum(marginal_lcf(grid)) * grid.du)


def energy_origin(grid: TFGrid) -> complex:
    """``|d1| sqrt(j 2 pi b2) W(0, 0)``; the energy when ``c1 = d1`` and ``a2 = 0``."""
    it = int(round(-grid.t0 / grid.dt))
    iu = int(round(-grid.u0 / grid.du))
    if not (0 <= it < grid.shape[0] and 0 <= iu < grid.shape[1]) \
            or abs(grid.t[it]) > 1e-9 * grid.dt or abs(grid.u[iu]) > 1e-9 * grid.du:
        raise AxisMismatch("grid does not contain the origin (t, u) = (0, 0)")
    return abs(grid.A1.d) * np.sqrt(1j * 2.0 * math.pi * grid.A2.b) * grid.values[it, iu]


def reconstruct(grid: TFGrid, f0: complex, t_grid, A1: SymplecticMatrix | None = None,
                A2: SymplecticMatrix | None = None) -> SampledSignal:
    """Recover ``f`` on ``t_grid`` from the grid.

    Rows are needed at ``-c1 t``; off-lattice rows come from windowed-sinc
    interpolation along the time axis.
    """
    A1 = A1 or grid.A1
    A2 = A2 or grid.A2
    if abs(f0) < 1e-12:
        raise ZeroAtOrigin("f(0) must be non-zero for reconstruction")
    t0, dt, n = _lct.uniform_axis(t_grid)
    t = t0 + dt * np.arange(n)
    _warn_edges(np.abs(grid.values), 1, "u")
    rows = sinc_interpolate(grid.values, (-A1.c * t - grid.t0) / grid.dt, axis=0)
    kern = _lct.kernel(A2.inverse(), A1.a * t[:, None], grid.u[None, :])
    vals = np.sum(rows * kern, axis=1) * grid.du / np.conj(f0)
    return SampledSignal(t0, dt, vals)


def moyal_inner(grid_f: TFGrid, grid_g: TFGrid) -> complex:
    """``<W f, W g>`` by the lattice rule."""
    if not grid_f.same_axes(grid_g):
        raise AxisMismatch("Moyal inner product needs identical axes")
    return complex(np.vdot(grid_g.values, grid_f.values) * grid_f.dt * grid_f.du)
