import functools

import numpy as np
import pytest

from swdl import moments, signals, tfd
from swdl.symplectic import L1, WD_A1, SymplecticMatrix, lfm_a2, optimal_a1, random_symplectic

FIG_A1 = optimal_a1(2.0, 2.0)
FIG_A2 = lfm_a2(0.5, 0.5, 1.0, 2.0, 2.0)


def random_pairs(n=5, seed=7, scale=2.0):
    rng = np.random.default_rng(seed)
    return [(random_symplectic(rng, scale), random_symplectic(rng, scale)) for _ in range(n)]


def matrix_sweep():
    """(label, A1, A2): experiment pair, WD pair and five random pairs."""
    out = [("fig", FIG_A1, FIG_A2), ("wd", WD_A1, L1)]
    out += [(f"rand{i}", B1, B2) for i, (B1, B2) in enumerate(random_pairs())]
    return out


def sweep_signals():
    return [
        signals.gaussian(),
        signals.gauss_exponential(omega0=2.0),
        signals.gauss_chirp(m=1),
    ]


SWEEP = {label: (A1, A2) for label, A1, A2 in matrix_sweep()}
# five more random pairs so the spread identities see ten
EXTRA = {f"extra{i}": pair for i, pair in enumerate(random_pairs(seed=11))}
PAIRS = {**SWEEP, **EXTRA}


@functools.cache
def sweep_base(label, k):
    """Signal, matrices, base moments and covering grid axes for one sweep cell."""
    f = sweep_signals()[k]
    A1, A2 = PAIRS[label]
    base = moments._base_stats(f, A1, A2)
    t_grid, u_grid = moments.covering_grid(f, A1, A2, base=base)
    return f, A1, A2, base, (t_grid, u_grid)


@functools.cache
def sweep_grid(label, k, method="definition"):
    f, A1, A2, _, (t_grid, u_grid) = sweep_base(label, k)
    return tfd.compute(f, A1, A2, t_grid, u_grid, method)


SWEEP_CELLS = [(label, k) for label in SWEEP for k in range(3)]


@pytest.fixture
def fig_pair():
    return FIG_A1, FIG_A2


def rel_l2(a, b) -> float:
    a, b = np.asarray(a), np.asarray(b)
    return float(np.linalg.norm(a - b) / np.linalg.norm(b))


def assert_matrix(A: SymplecticMatrix, expected, tol=1e-12):
    np.testing.assert_allclose(A.as_array(), np.asarray(expected, dtype=float), atol=tol, rtol=0)


# one PASS/FAIL line per acceptance criterion, filled by test_acceptance.py
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
