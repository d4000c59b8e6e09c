"""Robustness of cone membership under bounded generator perturbation.

A member Q for A survives any perturbation B with |B| <= 1/(2 alpha |Q|),
alpha > 1: the perturbed Lyapunov form stays below -((alpha-1)/alpha)|x|^2.
That relaxed constant is what the argument actually yields; literal
membership for A + B is restored by rescaling Q with alpha/(alpha-1).
Both facts are verified and reported, neither silently substituted for
the other.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .lyapunov import LyapunovCandidate, NotAMemberError, membership_margin
from .numkernel import as_complex_matrix, hermitian_eig, hermitian_part
from .space import NormModel, op_norm, whiten_form

__all__ = [
    "RadiusExceededError",
    "PerturbationReport",
    "MaxAlpha",
    "admissible_radius",
    "verify_perturbation",
    "max_alpha",
]


class RadiusExceededError(ValueError):
    """Perturbation norm exceeds the admissible radius."""

    def __init__(self, message: str, excess: float):
        super().__init__(message)
        self.excess = excess


class PerturbationReport(NamedTuple):
    radius: float
    b_norm: float
    margin_after: float  # whitened lambda_max of (A+B)*Q + Q(A+B) + ((a-1)/a) W
    rescaled_member: bool
    rescaled_margin: float


class MaxAlpha(NamedTuple):
    alpha: float
    decay: float  # the guaranteed constant (alpha - 1)/alpha


def admissible_radius(cand: LyapunovCandidate, alpha: float) -> float:
    """Largest perturbation norm covered by the guarantee: 1/(2 alpha |Q|)."""
    if not alpha > 1.0:
        raise ValueError(f"alpha must exceed 1, got {alpha}")
    if not cand.is_member:
        raise NotAMemberError(f"margin {cand.margin:.6e} exceeds {cand.tol:.1e}")
    return 1.0 / (2.0 * alpha * cand.q_norm)


def verify_perturbation(
    a, b, cand: LyapunovCandidate, alpha: float, nm: NormModel
) -> PerturbationReport:
    """Check the perturbed Lyapunov form and the rescaled literal membership.

    ``margin_after`` is the whitened largest eigenvalue of
    (A+B)* Q + Q (A+B) + ((alpha-1)/alpha) W; it is nonpositive whenever
    |B| stays within the admissible radius (measured in the same weighted
    operator norm the inequality itself uses).  The rescaled candidate
    (alpha/(alpha-1)) Q is additionally run through the ordinary
    membership test for A + B.
    """
    aa = as_complex_matrix(a, "a")
    bb = as_complex_matrix(b, "b")
    if aa.shape != bb.shape:
        raise ValueError(f"shape mismatch: a {aa.shape}, b {bb.shape}")
    radius = admissible_radius(cand, alpha)
    b_norm = op_norm(bb, nm)
    if b_norm > radius * (1.0 + 1e-12):
        raise RadiusExceededError(
            f"|B| = {b_norm:.9e} exceeds the admissible radius {radius:.9e}",
            excess=b_norm - radius,
        )
    perturbed = aa + bb
    shifted = hermitian_part(
        perturbed.conj().T @ cand.q + cand.q @ perturbed + ((alpha - 1.0) / alpha) * nm.w
    )
    lam, _ = hermitian_eig(whiten_form(shifted, nm))
    rescaled = membership_margin(
        (alpha / (alpha - 1.0)) * cand.q, perturbed, nm, tol=cand.tol
    )
    return PerturbationReport(
        radius=radius,
        b_norm=b_norm,
        margin_after=float(lam[-1]),
        rescaled_member=rescaled.is_member,
        rescaled_margin=rescaled.margin,
    )


def max_alpha(a, b, cand: LyapunovCandidate, nm: NormModel) -> MaxAlpha:
    """Strongest applicable guarantee for a given B: alpha* = 1/(2 |B| |Q|).

    Only meaningful when |B| < 1/(2 |Q|); at or beyond that norm no
    alpha > 1 exists and the corollary gives nothing.  B = 0 returns an
    infinite alpha with full decay constant 1.
    """
    bb = as_complex_matrix(b, "b")
    if not cand.is_member:
        raise NotAMemberError(f"margin {cand.margin:.6e} exceeds {cand.tol:.1e}")
    b_norm = op_norm(bb, nm)
    limit = 1.0 / (2.0 * cand.q_norm)
    if b_norm >= limit:
        raise RadiusExceededError(
            f"|B| = {b_norm:.9e} >= 1/(2|Q|) = {limit:.9e}: no admissible alpha > 1",
            excess=b_norm - limit,
        )
    if b_norm == 0.0:
        return MaxAlpha(alpha=float("inf"), decay=1.0)
    alpha = 1.0 / (2.0 * b_norm * cand.q_norm)
    return MaxAlpha(alpha=alpha, decay=(alpha - 1.0) / alpha)
