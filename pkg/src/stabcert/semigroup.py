"""Semigroup evaluation, growth quantities, square-integrals, and
left-invertibility measurements.

The semigroup is always the matrix exponential family T(t) = exp(t A).
Grid-based estimates here (growth bound, decay envelopes) are the
workhorses behind certificate verification: they never overclaim, in the
sense that fitted envelopes hold at every sample by construction and the
growth-bound estimate always upper-bounds the true limit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .numkernel import (
    DEFAULT_EXPM_TOL,
    KernelPrecisionError,
    as_complex_matrix,
    expm,
    gauss_legendre_nodes,
    singular_extremes,
)
from .space import NormModel, op_norm, vec_norm, whiten_operator

__all__ = [
    "UnstableGeneratorError",
    "SpectralSummary",
    "EnvelopeFit",
    "evaluate",
    "spectral_bound",
    "default_time_grid",
    "growth_bound_estimate",
    "certified_decay",
    "datko_integral",
    "lower_envelope",
    "left_invertibility_witness",
    "envelope_witness_search",
]

_EPS = float(np.finfo(np.float64).eps)


class UnstableGeneratorError(RuntimeError):
    """Raised when an operation requires a negative spectral bound.

    Carries the refuting eigenpair when the caller computed one.
    """

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


@dataclass(frozen=True)
class SpectralSummary:
    """Spectral bound, grid growth-bound estimate, and the eigenvalues."""

    s: float
    omega0_hat: float
    eigenvalues: list

    def __post_init__(self):
        object.__setattr__(self, "eigenvalues", list(self.eigenvalues))


@dataclass(frozen=True)
class EnvelopeFit:
    """Exponential lower envelope c e^{-alpha t} of m(t) = sigma_min of the
    whitened semigroup, true at every grid sample by construction."""

    c: float
    alpha: float
    grid: list  # (t, m(t)) samples


def evaluate(a, t: float) -> np.ndarray:
    """T(t) = exp(t a) at the default kernel tolerance."""
    return expm(a, t, tol=DEFAULT_EXPM_TOL)


def spectral_bound(a) -> float:
    """Largest real part of the spectrum."""
    m = as_complex_matrix(a, "a")
    return float(np.max(np.linalg.eigvals(m).real))


def default_time_grid(a, points: int = 64, horizon: float | None = None) -> np.ndarray:
    """64 log-spaced samples on [0.01, 20/|s|], resolving both the transient
    and asymptotic regimes.  Non-decaying generators need an explicit
    horizon; for horizons under 0.01 the start shrinks along with them."""
    if horizon is None:
        s = spectral_bound(a)
        if s >= 0.0:
            raise ValueError("spectral bound is nonnegative; pass an explicit horizon")
        horizon = 20.0 / abs(s)
    if not horizon > 0.0:
        raise ValueError(f"horizon must be positive, got {horizon}")
    start = min(0.01, horizon / 1000.0)
    return np.logspace(math.log10(start), math.log10(horizon), points)


def _validated_grid(t_grid) -> np.ndarray:
    grid = np.asarray(t_grid, dtype=float).reshape(-1)
    if grid.size == 0:
        raise ValueError("time grid is empty")
    if grid[0] <= 0.0 or np.any(np.diff(grid) <= 0.0):
        raise ValueError("time grid must be strictly positive and increasing")
    return grid


def growth_bound_estimate(a, nm: NormModel, t_grid) -> SpectralSummary:
    """Estimate the growth bound as min over the grid of log|T(t)| / t.

    The estimate upper-bounds the true growth bound and converges to the
    spectral bound as the grid horizon grows.
    """
    m = as_complex_matrix(a, "a")
    grid = _validated_grid(t_grid)
    if grid.size < 8:
        raise ValueError(f"time grid needs >= 8 points, got {grid.size}")
    eigs = np.linalg.eigvals(m)
    order = sorted(range(len(eigs)), key=lambda i: (-eigs[i].real, -eigs[i].imag))
    rates = [math.log(op_norm(evaluate(m, t), nm)) / t for t in grid]
    return SpectralSummary(
        s=float(np.max(eigs.real)),
        omega0_hat=float(min(rates)),
        eigenvalues=[complex(eigs[i]) for i in order],
    )


def certified_decay(a, nm: NormModel, safety: float = 2.0) -> tuple[float, float]:
    """Decay model (s_hat, m_hat) with |T(t)| <= m_hat e^{s_hat t}.

    s_hat is the midpoint of the spectral bound and the grid growth-bound
    estimate (the spectral bound alone ignores transient growth of
    nonnormal generators); m_hat is the grid supremum of |T(t)| e^{-s_hat t}
    padded by a safety factor.  The grid horizon doubles until the
    estimate is well inside the decaying regime.
    """
    m = as_complex_matrix(a, "a")
    s = spectral_bound(m)
    if s >= 0.0:
        raise UnstableGeneratorError(f"spectral bound {s:.6e} is nonnegative")
    horizon = 20.0 / abs(s)
    summary = None
    for _ in range(8):
        grid = default_time_grid(m, horizon=horizon)
        summary = growth_bound_estimate(m, nm, grid)
        if summary.omega0_hat <= 0.5 * s:
            break
        horizon *= 2.0
    if summary is None or summary.omega0_hat >= 0.0:
        raise KernelPrecisionError(
            "could not certify a decaying growth-bound estimate; transient growth "
            "exceeds the searched horizons"
        )
    s_hat = 0.5 * (s + summary.omega0_hat)
    peaks = [1.0]
    for t in grid:
        peaks.append(op_norm(evaluate(m, t), nm) * math.exp(-s_hat * t))
    return s_hat, safety * max(peaks)


def datko_integral(a, nm: NormModel, x, tail_tol: float = 1e-9) -> float:
    """Integral over [0, inf) of |T(t) x|^2 in the weighted norm.

    Quadrature runs to a horizon T* chosen so the certified tail bound
    m_hat^2 |x|^2 e^{2 s_hat T*} / (2 |s_hat|) falls below ``tail_tol``;
    panel count tracks the stiffness 2 |A| so the composite rule resolves
    the fastest mode.
    """
    m = as_complex_matrix(a, "a")
    if not (0.0 < tail_tol <= 1e-4):
        raise ValueError(f"tail_tol must be in (0, 1e-4], got {tail_tol}")
    s = spectral_bound(m)
    if s >= 0.0:
        raise UnstableGeneratorError(
            f"integral diverges: spectral bound {s:.6e} is nonnegative"
        )
    xv = np.asarray(x, dtype=complex).reshape(-1)
    if xv.shape[0] != m.shape[0]:
        raise ValueError(f"vector has length {xv.shape[0]}, expected {m.shape[0]}")
    x2 = vec_norm(xv, nm) ** 2
    if x2 == 0.0:
        return 0.0

    s_hat, m_hat = certified_decay(m, nm)
    rate = 2.0 * abs(s_hat)
    t_star = math.log(m_hat ** 2 * x2 / (rate * tail_tol)) / rate
    t_star = max(t_star, 1.0 / abs(s_hat))

    stiffness = max(op_norm(m, nm), abs(s_hat))
    panels = max(64, int(math.ceil(t_star * 2.0 * stiffness / 3.0)))
    delta = t_star / panels
    nodes, weights = gauss_legendre_nodes(delta, 1)
    # one exponential per node offset plus one panel-step exponential;
    # the state vector is propagated panel by panel
    step = expm(m, delta)
    samplers = [nm.sqrt_w @ expm(m, float(t)) for t in nodes]

    y = xv.copy()
    total = 0.0
    for _ in range(panels):
        for w, sampler in zip(weights, samplers):
            v = sampler @ y
            total += w * float(np.real(np.vdot(v, v)))
        y = step @ y
    return total


def lower_envelope(a, nm: NormModel, t_grid=None) -> EnvelopeFit:
    """Fit the conservative exponential lower envelope of m(t).

    alpha is the steepest discrete decay rate between consecutive samples
    and c the smallest intercept m(t_i) e^{alpha t_i}, so the envelope
    inequality holds at every sample exactly.  Every sample is checked
    against the finite-dimensional floor m(t) >= e^{-t |A|}, and sampling
    stops once sigma_min drops under sqrt(eps) sigma_max: beyond that
    point the computed values lose relative accuracy, and fitting through
    such noise invents decay rates steeper than |A| and intercepts above
    m(0), i.e. the one thing a certificate must never do.
    """
    m = as_complex_matrix(a, "a")
    grid = _validated_grid(t_grid if t_grid is not None else default_time_grid(m))
    nrm_a = op_norm(m, nm)
    samples = []
    for t in grid:
        tw = whiten_operator(evaluate(m, t), nm)
        sigma_max, sigma_min = singular_extremes(tw)
        if sigma_min <= math.sqrt(_EPS) * sigma_max:
            break
        noise = 64.0 * _EPS * sigma_max
        floor = math.exp(-t * nrm_a) if t * nrm_a < 700.0 else 0.0
        if sigma_min + noise < floor * (1.0 - 1e-9):
            raise KernelPrecisionError(
                f"sigma_min {sigma_min:.3e} at t={t:.3e} violates the "
                f"finite-dimensional floor {floor:.3e}"
            )
        samples.append((float(t), float(sigma_min)))
    if len(samples) < 2:
        raise KernelPrecisionError(
            "fewer than two lower-bound samples above the round-off floor; "
            "shrink the grid horizon"
        )

    logs = np.log(np.clip([mv for _, mv in samples], 1e-300, None))
    ts = np.array([t for t, _ in samples])
    slopes = -(logs[1:] - logs[:-1]) / (ts[1:] - ts[:-1])
    alpha = max(0.0, float(np.max(slopes)))
    log_c = float(np.min(logs + alpha * ts))
    return EnvelopeFit(c=math.exp(log_c), alpha=alpha, grid=samples)


def left_invertibility_witness(a, nm: NormModel, t0: float) -> float:
    """Single-time lower-bound constant m0 = sigma_min of the whitened T(t0);
    the pair (t0, m0) certifies |T(t0) x| >= m0 |x| for every x."""
    if not t0 > 0.0:
        raise ValueError(f"t0 must be positive, got {t0}")
    tw = whiten_operator(evaluate(as_complex_matrix(a, "a"), t0), nm)
    return singular_extremes(tw)[1]


def envelope_witness_search(a, nm: NormModel, rate: float, t_grid, slack: float = 1e-6):
    """First grid time t0 with m(t0) >= e^{-rate t0} (1 - slack), or None.

    This is the grid replacement for the existence argument that turns a
    strongly positive certificate into a single-time left-invertibility
    witness.
    """
    m = as_complex_matrix(a, "a")
    for t in _validated_grid(t_grid):
        m0 = left_invertibility_witness(m, nm, float(t))
        if m0 >= math.exp(-rate * t) * (1.0 - slack):
            return float(t), float(m0)
    return None
