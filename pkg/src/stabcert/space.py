"""Weighted inner-product norm models.

A norm model is an SPD weight W defining ``|x|^2 = x* W x`` together with
its cached symmetric square root and inverse root.  Whitening by those
roots converts every question asked in this package (membership margins,
operator norms, positivity constants) into an ordinary Euclidean one.
Two whitenings appear: a similarity for operators on the state space and
a congruence for state-to-dual maps.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numkernel import (
    NonHermitianError,
    as_complex_matrix,
    hermitian_eig,
    hermitian_part,
    singular_extremes,
    spectral_norm,
)

__all__ = [
    "NormModel",
    "RieszMap",
    "vec_norm",
    "pairing",
    "op_norm",
    "dual_map_norm",
    "strong_positivity_theta",
    "whiten_operator",
    "whiten_form",
]


@dataclass(frozen=True)
class NormModel:
    """SPD norm weight with cached symmetric square root and inverse root."""

    w: np.ndarray
    sqrt_w: np.ndarray
    inv_sqrt_w: np.ndarray

    @property
    def n(self) -> int:
        return self.w.shape[0]

    @classmethod
    def from_weight(cls, w) -> "NormModel":
        ww = as_complex_matrix(w, "w")
        drift = np.linalg.norm(ww - ww.conj().T, "fro")
        if drift > 1e-12 * max(np.linalg.norm(ww, "fro"), 1e-300):
            raise NonHermitianError("norm weight must be Hermitian")
        ww = hermitian_part(ww)
        lam, v = np.linalg.eigh(ww)
        if lam[0] <= 0.0:
            raise ValueError(
                f"norm weight must be positive definite, min eigenvalue {lam[0]:.3e}"
            )
        sqrt_w = (v * np.sqrt(lam)) @ v.conj().T
        inv_sqrt_w = (v / np.sqrt(lam)) @ v.conj().T
        scale = spectral_norm(ww)
        if spectral_norm(sqrt_w @ sqrt_w - ww) > 1e-10 * scale:
            raise ValueError("square root of norm weight failed its residual check")
        if spectral_norm(inv_sqrt_w @ sqrt_w - np.eye(ww.shape[0])) > 1e-10:
            raise ValueError("inverse root of norm weight failed its residual check")
        return cls(w=ww, sqrt_w=sqrt_w, inv_sqrt_w=inv_sqrt_w)

    @classmethod
    def identity(cls, n: int) -> "NormModel":
        eye = np.eye(n, dtype=complex)
        return cls(w=eye, sqrt_w=eye.copy(), inv_sqrt_w=eye.copy())


@dataclass(frozen=True)
class RieszMap:
    """SPD map identifying the space with its dual, with its strong-positivity
    constant theta relative to a norm model: <Px, x> >= theta |x|^2."""

    p: np.ndarray
    theta: float

    @classmethod
    def from_matrix(cls, p, nm: NormModel) -> "RieszMap":
        pp = as_complex_matrix(p, "p")
        theta = strong_positivity_theta(pp, nm)
        if theta <= 0.0:
            raise ValueError(f"Riesz map must be strongly positive, theta={theta:.3e}")
        return cls(p=hermitian_part(pp), theta=theta)


def _as_vector(x, n: int):
    v = np.asarray(x, dtype=complex).reshape(-1)
    if v.shape[0] != n:
        raise ValueError(f"vector has length {v.shape[0]}, expected {n}")
    return v


def vec_norm(x, nm: NormModel) -> float:
    """Weighted norm sqrt(x* W x); zero exactly when x is zero."""
    v = _as_vector(x, nm.n)
    return float(np.linalg.norm(nm.sqrt_w @ v))


def pairing(q, x, y) -> complex:
    """Dual pairing <Qx, y> = y* (Q x): linear in x, conjugated in y.

    With this convention <Qx, x> is real for Hermitian Q, which is what
    every inequality downstream relies on.
    """
    qq = as_complex_matrix(q, "q")
    xv = _as_vector(x, qq.shape[0])
    yv = _as_vector(y, qq.shape[0])
    return complex(yv.conj() @ (qq @ xv))


def whiten_operator(t, nm: NormModel) -> np.ndarray:
    """Similarity whitening for operators on the state space."""
    return nm.sqrt_w @ as_complex_matrix(t, "t") @ nm.inv_sqrt_w


def whiten_form(q, nm: NormModel) -> np.ndarray:
    """Congruence whitening for state-to-dual maps (quadratic forms)."""
    return nm.inv_sqrt_w @ as_complex_matrix(q, "q") @ nm.inv_sqrt_w


def op_norm(t, nm: NormModel) -> float:
    """Operator norm of a state-space map in the weighted norm."""
    return singular_extremes(whiten_operator(t, nm))[0]


def dual_map_norm(q, nm: NormModel) -> float:
    """State-to-dual operator norm of a Hermitian map.

    This is the ``|Q|`` appearing in every resolvent and perturbation
    bound; it equals the largest singular value of the congruence-whitened
    matrix.
    """
    qq = as_complex_matrix(q, "q")
    drift = np.linalg.norm(qq - qq.conj().T, "fro")
    if drift > 1e-12 * max(np.linalg.norm(qq, "fro"), 1e-300):
        raise NonHermitianError("dual_map_norm requires a Hermitian matrix")
    return singular_extremes(whiten_form(hermitian_part(qq), nm))[0]


def strong_positivity_theta(q, nm: NormModel) -> float:
    """Largest theta with <Qx, x> >= theta |x|^2; positive iff Q is
    strongly positive.  Computed exactly as the smallest whitened
    eigenvalue."""
    qq = as_complex_matrix(q, "q")
    drift = np.linalg.norm(qq - qq.conj().T, "fro")
    if drift > 1e-12 * max(np.linalg.norm(qq, "fro"), 1e-300):
        raise NonHermitianError("strong_positivity_theta requires a Hermitian matrix")
    w, _ = hermitian_eig(whiten_form(hermitian_part(qq), nm))
    return float(w[0])
