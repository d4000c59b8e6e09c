"""Dense complex linear-algebra kernels shared by every other module.

Everything here is a pure function on square numpy arrays promoted to
complex128.  Inputs are never mutated and there is no module state, so
callers may evaluate independent operations concurrently.  Scope is
desk-scale dense work (n <= 256); sparse and iterative machinery is
deliberately out.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

__all__ = [
    "DEFAULT_EXPM_TOL",
    "SOLVER_RESIDUAL_TOL",
    "SingularMatrixError",
    "NonHermitianError",
    "KernelPrecisionError",
    "as_complex_matrix",
    "hermitian_part",
    "spectral_norm",
    "expm",
    "hermitian_eig",
    "singular_extremes",
    "solve_linear",
    "gauss_legendre_nodes",
    "quad_integral",
]

DEFAULT_EXPM_TOL = 1e-12
SOLVER_RESIDUAL_TOL = 1e-10

_EPS = float(np.finfo(np.float64).eps)


class SingularMatrixError(ValueError):
    """Coefficient matrix is singular to working precision."""


class NonHermitianError(ValueError):
    """Input exceeds the Hermitian symmetrization tolerance."""


class KernelPrecisionError(RuntimeError):
    """A kernel failed to meet its residual contract."""


def as_complex_matrix(a, name: str = "matrix") -> np.ndarray:
    """Validate and promote input to a finite, square complex128 array."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{name} must be square, got shape {m.shape}")
    if not np.all(np.isfinite(m.view(np.float64))):
        raise ValueError(f"{name} has non-finite entries")
    return m


def hermitian_part(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + a.conj().T)


def spectral_norm(a: np.ndarray) -> float:
    """Largest singular value (2-norm); 0.0 for empty input."""
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def expm(a, t: float, tol: float = DEFAULT_EXPM_TOL) -> np.ndarray:
    """Matrix exponential of ``t * a`` by scaling and squaring.

    The scaled block is brought to 1-norm <= 0.5, expanded in a truncated
    Taylor series until the next term falls below the (squaring-adjusted)
    tolerance, then repeatedly squared.  ``t = 0`` returns the identity
    exactly.  ``tol`` must lie in (0, 1e-3]; the kernel saturates at
    machine precision regardless of how small it is.
    """
    m = as_complex_matrix(a, "a")
    if not t >= 0.0:
        raise ValueError(f"t must be nonnegative, got {t}")
    if not (0.0 < tol <= 1e-3):
        raise ValueError(f"tol must be in (0, 1e-3], got {tol}")
    n = m.shape[0]
    if t == 0.0:
        return np.eye(n, dtype=complex)

    b = m * t
    scale = np.linalg.norm(b, 1)
    squarings = 0 if scale <= 0.5 else int(np.ceil(np.log2(scale / 0.5)))
    if squarings:
        b = b / (2.0 ** squarings)

    # each squaring roughly doubles the series error, so tighten up front
    floor = max(tol / (4.0 * 2.0 ** squarings), 2.0 * _EPS)
    result = np.eye(n, dtype=complex)
    term = np.eye(n, dtype=complex)
    for k in range(1, 40):
        term = term @ b / k
        result = result + term
        if np.linalg.norm(term, 1) <= floor * max(1.0, np.linalg.norm(result, 1)):
            break
    for _ in range(squarings):
        result = result @ result
    return result


def hermitian_eig(h) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a (nearly) Hermitian matrix.

    The input is symmetrized before the solve; anything beyond the
    1e-12 relative symmetrization tolerance is rejected since it signals
    a caller bug rather than round-off drift.  Returns eigenvalues in
    ascending order and the unitary matrix of eigenvectors.
    """
    m = as_complex_matrix(h, "h")
    scale = np.linalg.norm(m, "fro")
    drift = np.linalg.norm(m - m.conj().T, "fro")
    if drift > 1e-12 * max(scale, 1e-300):
        raise NonHermitianError(
            f"matrix is not Hermitian: asymmetry {drift:.3e} vs scale {scale:.3e}"
        )
    w, v = np.linalg.eigh(hermitian_part(m))
    return w, v


def singular_extremes(a) -> tuple[float, float]:
    """Largest and smallest singular values of a square matrix."""
    m = as_complex_matrix(a, "m")
    sv = np.linalg.svd(m, compute_uv=False)
    return float(sv[0]), float(sv[-1])


def solve_linear(m, b, check_singularity: bool = True) -> np.ndarray:
    """Solve ``m @ x = b`` by pivoted LU.

    With ``check_singularity`` the smallest singular value is gated first
    and a :class:`SingularMatrixError` is raised when the matrix is
    singular to working precision (the gate is how resolvent evaluations
    detect a shift sitting on the spectrum).  The backward-stable solve is
    post-checked against the residual contract
    ``||m x - b|| <= 1e-10 ||m|| ||x||``.
    """
    mm = as_complex_matrix(m, "m")
    bb = np.asarray(b, dtype=complex)
    if bb.shape[0] != mm.shape[0]:
        raise ValueError(f"shape mismatch: {mm.shape} vs {bb.shape}")
    if check_singularity:
        sv = np.linalg.svd(mm, compute_uv=False)
        if sv[-1] <= 16.0 * mm.shape[0] * _EPS * sv[0]:
            raise SingularMatrixError(
                f"matrix singular to working precision (sigma_min={sv[-1]:.3e}, "
                f"sigma_max={sv[0]:.3e})"
            )
    try:
        x = np.linalg.solve(mm, bb)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrixError(str(exc)) from exc
    residual = np.linalg.norm(mm @ x - bb)
    bound = SOLVER_RESIDUAL_TOL * spectral_norm(mm) * max(np.linalg.norm(x), 1e-300)
    if residual > max(bound, 16.0 * _EPS * np.linalg.norm(bb)):
        raise KernelPrecisionError(
            f"solve residual {residual:.3e} exceeds contract bound {bound:.3e}"
        )
    return x


def gauss_legendre_nodes(upper: float, panels: int, order: int = 5):
    """Composite Gauss-Legendre nodes and weights on [0, upper].

    Returns flat arrays of ``panels * order`` nodes (increasing) and the
    matching weights.  The 5-point rule is exact for polynomials of
    degree 9 on each panel.
    """
    if not upper > 0.0:
        raise ValueError(f"upper limit must be positive, got {upper}")
    if panels < 1:
        raise ValueError(f"panels must be >= 1, got {panels}")
    x, w = np.polynomial.legendre.leggauss(order)
    width = upper / panels
    starts = width * np.arange(panels)
    nodes = (starts[:, None] + 0.5 * width * (x[None, :] + 1.0)).ravel()
    weights = np.tile(0.5 * width * w, panels)
    return nodes, weights


def quad_integral(f: Callable[[float], float], upper: float, panels: int):
    """Integrate ``f`` over [0, upper] with composite 5-point Gauss-Legendre."""
    if panels < 4:
        raise ValueError(f"panels must be >= 4, got {panels}")
    nodes, weights = gauss_legendre_nodes(upper, panels)
    values = np.array([f(float(t)) for t in nodes])
    if not np.all(np.isfinite(values.view(np.float64) if np.iscomplexobj(values) else values)):
        raise ValueError("integrand produced non-finite samples")
    total = np.dot(weights, values)
    return complex(total) if np.iscomplexobj(values) else float(total)
