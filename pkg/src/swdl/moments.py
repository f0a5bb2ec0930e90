"""Moments, spreads and uncertainty bounds in the time, frequency, LCT and SWDL domains."""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import asdict, dataclass

import numpy as np

from . import lct as _lct
from .errors import DecompositionMismatch, SignalClassMismatch, ZeroB, ZeroEnergy
from .signals import Signal, max_phase_rate, phase_derivative, spectral_extent
from .symplectic import L1, SymplecticMatrix, derive_a3, derive_a4
from .tfd import TFGrid, compute

WARN_REL = 1e-3
FAIL_REL = 1e-2
CLASSES = ("arbitrary", "real", "complex")
# amplitude floor for the spectral range of moment lattices; the power beyond it
# is below 1e-14 of the peak, far under the 1e-3 moment tolerances
SPECTRAL_FLOOR = 1e-7


def _time_rule(f: Signal):
    lo, hi = f.support
    panels = _lct.panel_count(hi - lo, max_phase_rate(f))
    # even count: Gaussian supports are centred on t0, where the m = 3, 4 chirps kink
    panels += panels % 2
    return _lct.gauss_legendre_panels(lo, hi, panels)


def energy(f: Signal) -> float:
    t, w = _time_rule(f)
    return float(np.sum(np.abs(f(t)) ** 2 * w))


def _moments(x, density, weights, norm):
    m0 = float(np.sum(density * weights))
    if not m0 > 0:
        raise ZeroEnergy("signal has zero energy")
    norm = m0 if norm is None else norm
    mean = float(np.sum(x * density * weights)) / norm
    spread = float(np.sum((x - mean) ** 2 * density * weights)) / norm
    return mean, spread


def time_stats(f: Signal) -> tuple[float, float]:
    """(t0, spread) of ``|f|^2``."""
    t, w = _time_rule(f)
    return _moments(t, np.abs(f(t)) ** 2, w, None)


def _lattice(lo, hi, step):
    n = int(math.ceil((hi - lo) / step)) + 1
    return lo + step * np.arange(n), step


def frequency_stats(f: Signal) -> tuple[float, float]:
    """(omega0, spread) of ``|Ff|^2`` on a lattice fine enough for exact summation."""
    lo, hi = f.support
    w_lo, w_hi = spectral_extent(f, SPECTRAL_FLOOR)
    pad = 2.0 * math.pi / (hi - lo)
    omega, step = _lattice(w_lo - pad, w_hi + pad, math.pi / (hi - lo))
    spec = np.abs(_lct.lct_values(f, L1, omega)) ** 2
    return _moments(omega, spec, np.full(omega.size, step), energy(f))


def lct_stats(f: Signal, A: SymplecticMatrix) -> tuple[float, float]:
    """(u0, spread) of ``|L^A f|^2``, normalized by the signal energy."""
    if A.b == 0:
        raise ZeroB()
    lo, hi = f.support
    w_lo, w_hi = spectral_extent(f, SPECTRAL_FLOOR)
    corners = [A.a * x + A.b * w for x in (lo, hi) for w in (w_lo, w_hi)]
    pad = 2.0 * math.pi * abs(A.b) / (hi - lo)
    u, step = _lattice(min(corners) - pad, max(corners) + pad, math.pi * abs(A.b) / (hi - lo))
    dens = np.abs(_lct.lct_values(f, A, u)) ** 2
    return _moments(u, dens, np.full(u.size, step), energy(f))


def covariances(f: Signal, omega_ref: float | None = None) -> tuple[float, float]:
    """(Cov, COV): signed and absolute time-frequency covariance.

    The frequency reference defaults to the frequency moment, obtained here as
    the ``|f|^2``-weighted mean of the phase derivative (equal to the spectral
    mean). Pass ``omega_ref`` to centre on another value.
    """
    t, w = _time_rule(f)
    dens = np.abs(f(t)) ** 2
    e = float(np.sum(dens * w))
    if not e > 0:
        raise ZeroEnergy("signal has zero energy")
    rate = phase_derivative(f, t)
    t0 = float(np.sum(t * dens * w)) / e
    w0 = float(np.sum(rate * dens * w)) / e if omega_ref is None else float(omega_ref)
    dt = t - t0
    dw = rate - w0
    cov = float(np.sum(dt * dw * dens * w)) / e
    abscov = float(np.sum(np.abs(dt) * np.abs(dw) * dens * w)) / e
    return cov, abscov


def max_imag_part(f: Signal) -> float:
    t, _ = _time_rule(f)
    v = f(t)
    peak = float(np.max(np.abs(v)))
    return float(np.max(np.abs(v.imag))) / peak if peak > 0 else 0.0


# -- SWDL domain ---------------------------------------------------------------

def _base_stats(f, A1, A2):
    t0, dt2 = time_stats(f)
    u3, s3 = lct_stats(f, derive_a3(A1, A2))
    u4, s4 = lct_stats(f, derive_a4(A1, A2))
    return t0, dt2, u3, s3, u4, s4


def predicted_spreads(f: Signal, A1: SymplecticMatrix, A2: SymplecticMatrix, base=None):
    """Centres and spreads of ``|W|^2`` predicted from time and LCT moments.

    Used to size grids; the grid moments themselves are computed independently.
    """
    t0, dt2, u3, s3, u4, s4 = base if base is not None else _base_stats(f, A1, A2)
    return ((A1.d - A1.c) * t0, (A1.c ** 2 + A1.d ** 2) * dt2, u3 - u4, s3 + s4)


def covering_grid(f: Signal, A1: SymplecticMatrix, A2: SymplecticMatrix, width: float = 8.0,
                  per_sigma: int = 3, base=None):
    """(t_grid, u_grid) spanning ``width`` standard deviations of ``|W|^2`` each way.

    Steps are ``sigma / per_sigma``, which keeps the lattice rule for ``|W|^2``
    moments exact to well below 1e-6 for Gaussian-family signals.
    """
    tc, ts, uc, us = predicted_spreads(f, A1, A2, base)
    axes = []
    for centre, spread in ((tc, ts), (uc, us)):
        sigma = math.sqrt(spread)
        n = int(2 * width * per_sigma) + 1
        axes.append(centre + sigma * (np.arange(n) - (n - 1) / 2) / per_sigma)
    return axes[0], axes[1]


def swdl_grid_stats(grid: TFGrid, norm4: float | None = None):
    """(t0, dt2, u0, du2) of ``|W|^2`` on the grid, divided by ``norm4`` (default: grid norm)."""
    dens = np.abs(grid.values) ** 2
    cell = grid.dt * grid.du
    total = float(dens.sum()) * cell
    if not total > 0:
        raise ZeroEnergy("distribution is identically zero")
    norm = total if norm4 is None else norm4
    pt = dens.sum(axis=1) * cell
    pu = dens.sum(axis=0) * cell
    t, u = grid.t, grid.u
    tm = float(np.sum(t * pt)) / norm
    um = float(np.sum(u * pu)) / norm
    ts = float(np.sum((t - tm) ** 2 * pt)) / norm
    us = float(np.sum((u - um) ** 2 * pu)) / norm
    return tm, ts, um, us


def swdl_stats(f: Signal, A1: SymplecticMatrix, A2: SymplecticMatrix, grids=None,
               method: str = "definition", base=None):
    """SWDL-domain moments normalized by ``||f||^4``."""
    t_grid, u_grid = grids if grids is not None else covering_grid(f, A1, A2, base=base)
    grid = compute(f, A1, A2, t_grid, u_grid, method)
    return swdl_grid_stats(grid, energy(f) ** 2)


@dataclass(frozen=True)
class MomentReport:
    t_moment: float
    t_spread: float
    omega_moment: float
    omega_spread: float
    u_moment_A3: float
    u_spread_A3: float
    u_moment_A4: float
    u_spread_A4: float
    swdl_t_moment: float
    swdl_t_spread: float
    swdl_u_moment: float
    swdl_u_spread: float
    cov: float
    abscov: float
    energy: float
    max_imag_part: float = 0.0

    @property
    def product(self) -> float:
        return self.swdl_t_spread * self.swdl_u_spread

    def decomposed_product(self, A1: SymplecticMatrix) -> float:
        s = A1.c ** 2 + A1.d ** 2
        return s * (self.t_spread * self.u_spread_A3 + self.t_spread * self.u_spread_A4)

    def items(self):
        return list(asdict(self).items())

    def to_text(self) -> str:
        return "".join(f"{k} = {v!r}\n" for k, v in self.items())

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["key", "value"])
            for k, v in self.items():
                w.writerow([k, repr(float(v))])


def moment_report(f: Signal, A1: SymplecticMatrix, A2: SymplecticMatrix, grids=None,
                  method: str = "definition", omega_ref: float | None = None) -> MomentReport:
    base = _base_stats(f, A1, A2)
    t0, dt2, u3, s3, u4, s4 = base
    w0, dw2 = frequency_stats(f)
    tm, ts, um, us = swdl_stats(f, A1, A2, grids, method, base)
    cov, abscov = covariances(f, omega_ref)
    return MomentReport(t0, dt2, w0, dw2, u3, s3, u4, s4, tm, ts, um, us, cov, abscov,
                        energy(f), max_imag_part(f))


# -- bounds ------------------------------------------------------------------------

@dataclass(frozen=True)
class BoundReport:
    signal_class: str
    lower_bound: float
    product: float
    slack: float
    attained: bool
    looser_bound: float
    tolerance: float

    @property
    def looser_slack(self) -> float:
        return self.product - self.looser_bound

    def to_text(self) -> str:
        rows = list(asdict(self).items()) + [("looser_slack", self.looser_slack)]
        return "".join(f"{k} = {v!r}\n" for k, v in rows)


def bound_terms(signal_class: str, A1: SymplecticMatrix, A2: SymplecticMatrix,
                stats: MomentReport) -> tuple[float, float]:
    """(tighter, looser) lower bounds for the declared class."""
    s = A1.c ** 2 + A1.d ** 2
    base = A2.b ** 2 * s * s / 4.0
    if signal_class == "arbitrary":
        return base, base
    if signal_class == "real":
        v = base + A2.a ** 2 * (A1.a ** 2 + A1.b ** 2) * s * stats.t_spread ** 2
        return v, v
    if signal_class == "complex":
        cov, big = stats.cov, stats.abscov
        chirp = ((A2.a * A1.a * stats.t_spread + A2.b * A1.d * cov) ** 2
                 + (A2.a * A1.b * stats.t_spread + A2.b * A1.c * cov) ** 2) * s
        first = (0.25 + big ** 2 - cov ** 2) * A2.b ** 2 * s * s + chirp
        return first, base + chirp
    raise ValueError(f"signal class must be one of {CLASSES}, got {signal_class!r}")


def lower_bound(signal_class: str, A1: SymplecticMatrix, A2: SymplecticMatrix,
                stats: MomentReport, tolerance: float = 1e-4) -> BoundReport:
    """Bound report; ``attained`` compares slack to ``tolerance`` relative to the bound."""
    if signal_class == "real" and stats.max_imag_part > 1e-12:
        raise SignalClassMismatch(
            f"real-class bound requested for a signal with imaginary part {stats.max_imag_part:.2e}")
    tight, loose = bound_terms(signal_class, A1, A2, stats)
    product = stats.product
    slack = product - tight
    return BoundReport(signal_class, tight, product, slack, abs(slack) <= tolerance * tight,
                       loose, tolerance)


def uncertainty_products(f: Signal, A1: SymplecticMatrix, A2: SymplecticMatrix, grids=None,
                         method: str = "definition") -> tuple[float, float]:
    """(direct grid product, LCT decomposition) of the SWDL uncertainty product."""
    base = _base_stats(f, A1, A2)
    _, dt2, _, s3, _, s4 = base
    _, ts, _, us = swdl_stats(f, A1, A2, grids, method, base)
    decomposed = (A1.c ** 2 + A1.d ** 2) * (dt2 * s3 + dt2 * s4)
    return ts * us, decomposed


def uncertainty_product(f: Signal, A1: SymplecticMatrix, A2: SymplecticMatrix, grids=None,
                        method: str = "definition") -> float:
    """Direct grid product, cross-checked against the LCT decomposition.

    Warns above 1e-3 relative disagreement and raises DecompositionMismatch
    above 1e-2.
    """
    direct, decomposed = uncertainty_products(f, A1, A2, grids, method)
    rel = abs(direct - decomposed) / max(abs(decomposed), 1e-300)
    if rel > FAIL_REL:
        raise DecompositionMismatch(direct, decomposed)
    if rel > WARN_REL:
        warnings.warn(f"uncertainty product paths differ by {rel:.1e}", stacklevel=2)
    return direct
