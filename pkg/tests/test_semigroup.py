import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stabcert.models import jordan_block, random_stable, random_vector, upwind_shift
from stabcert.numkernel import quad_integral, singular_extremes
from stabcert.semigroup import (
    UnstableGeneratorError,
    certified_decay,
    datko_integral,
    default_time_grid,
    envelope_witness_search,
    evaluate,
    growth_bound_estimate,
    left_invertibility_witness,
    lower_envelope,
    spectral_bound,
)
from stabcert.space import NormModel, op_norm, vec_norm

ROTATION = np.array([[0.0, 1.0], [-1.0, 0.0]], dtype=complex)


def kron_lyapunov_oracle(a: np.ndarray) -> np.ndarray:
    """Independent dense Kronecker solve of A* Q + Q A = -I."""
    n = a.shape[0]
    eye = np.eye(n, dtype=complex)
    k = np.kron(eye, a.conj().T) + np.kron(a.T, eye)
    vec_q = np.linalg.solve(k, -eye.reshape(-1, order="F"))
    q = vec_q.reshape((n, n), order="F")
    return 0.5 * (q + q.conj().T)


class TestEvaluate:
    def test_time_zero(self):
        a = np.array([[1.0, 2.0], [3.0, 4.0]])
        assert np.array_equal(evaluate(a, 0.0), np.eye(2, dtype=complex))

    def test_scalar_decay(self):
        t = 1.3
        assert np.allclose(evaluate(-np.eye(3), t), np.exp(-t) * np.eye(3), rtol=1e-12)

    def test_rotation(self):
        t = 0.7
        expected = np.array(
            [[np.cos(t), np.sin(t)], [-np.sin(t), np.cos(t)]], dtype=complex
        )
        assert np.allclose(evaluate(ROTATION, t), expected, atol=1e-13)


class TestGrowthBound:
    def test_scalar_exact_at_every_grid_point(self):
        nm = NormModel.identity(2)
        grid = np.linspace(0.5, 10.0, 12)
        summary = growth_bound_estimate(-np.eye(2), nm, grid)
        assert summary.s == pytest.approx(-1.0, abs=1e-12)
        for t in grid:
            rate = math.log(op_norm(evaluate(-np.eye(2), t), nm)) / t
            assert rate == pytest.approx(-1.0, abs=1e-10)
        assert summary.omega0_hat == pytest.approx(-1.0, abs=1e-10)

    def test_diagonal_converges_to_spectral_bound(self):
        nm = NormModel.identity(2)
        a = np.diag([-1.0, -2.0])
        summary = growth_bound_estimate(a, nm, np.linspace(1.0, 60.0, 16))
        assert summary.s == pytest.approx(-1.0, abs=1e-12)
        assert summary.omega0_hat == pytest.approx(-1.0, abs=1e-2)
        assert summary.omega0_hat >= summary.s - 1e-9

    def test_nilpotent_shift_against_closed_form(self):
        # |T(t)| for [[0,1],[0,0]] has the closed form below; the grid
        # estimate must match it point by point and decrease toward s = 0
        nm = NormModel.identity(2)
        a = np.array([[0.0, 1.0], [0.0, 0.0]])
        grid = np.linspace(1.0, 40.0, 10)
        summary = growth_bound_estimate(a, nm, grid)
        assert summary.s == pytest.approx(0.0, abs=1e-12)
        rates = []
        for t in grid:
            sigma = math.sqrt((t * t + 2.0 + t * math.sqrt(t * t + 4.0)) / 2.0)
            assert op_norm(evaluate(a, t), nm) == pytest.approx(sigma, rel=1e-10)
            rates.append(math.log(sigma) / t)
        assert summary.omega0_hat == pytest.approx(min(rates), rel=1e-10)
        assert all(x > y for x, y in zip(rates, rates[1:]))
        assert summary.omega0_hat > 0.0

    def test_grid_validation(self):
        nm = NormModel.identity(2)
        with pytest.raises(ValueError):
            growth_bound_estimate(-np.eye(2), nm, [])
        with pytest.raises(ValueError):
            growth_bound_estimate(-np.eye(2), nm, [1.0, 2.0, 3.0])
        with pytest.raises(ValueError):
            growth_bound_estimate(-np.eye(2), nm, [0.0, 1, 2, 3, 4, 5, 6, 7])

    @settings(max_examples=20, deadline=None)
    @given(seed=st.integers(0, 2**31), n=st.integers(2, 6))
    def test_estimate_upper_bounds_spectral_bound(self, seed, n):
        a = random_stable(n, 0.4, seed)
        nm = NormModel.identity(n)
        summary = growth_bound_estimate(a, nm, default_time_grid(a))
        assert summary.omega0_hat >= summary.s - 1e-9


class TestDatkoIntegral:
    def test_scalar(self):
        nm = NormModel.identity(2)
        x = np.array([3.0, 4.0])
        value = datko_integral(-np.eye(2), nm, x)
        assert value == pytest.approx(25.0 / 2.0, rel=1e-9)

    @pytest.mark.parametrize("a_coef", [0.5, 2.0])
    def test_scalar_rate(self, a_coef):
        nm = NormModel.identity(2)
        x = np.array([1.0, 1.0])
        value = datko_integral(-a_coef * np.eye(2), nm, x)
        assert value == pytest.approx(2.0 / (2.0 * a_coef), rel=1e-9)

    def test_upper_triangular_against_kronecker_oracle(self):
        a = np.array([[-1.0, 4.0], [0.0, -2.0]], dtype=complex)
        q = kron_lyapunov_oracle(a)
        nm = NormModel.identity(2)
        x = np.array([0.0, 1.0])
        expected = float(np.real(x.conj() @ q @ x))
        assert datko_integral(a, nm, x) == pytest.approx(expected, rel=1e-6)

    def test_divergence_error(self):
        nm = NormModel.identity(2)
        with pytest.raises(UnstableGeneratorError):
            datko_integral(np.diag([0.5, -1.0]), nm, np.array([1.0, 0.0]))

    def test_tail_tol_validation(self):
        nm = NormModel.identity(2)
        with pytest.raises(ValueError):
            datko_integral(-np.eye(2), nm, np.ones(2), tail_tol=1e-3)

    @settings(max_examples=10, deadline=None)
    @given(seed=st.integers(0, 2**31), s=st.floats(0.1, 2.0))
    def test_additivity_split(self, seed, s):
        """int_0^inf = int_0^s + int over the propagated tail state."""
        a = random_stable(4, 0.6, seed)
        nm = NormModel.identity(4)
        x = random_vector(4, seed + 1)
        whole = datko_integral(a, nm, x)
        head = quad_integral(
            lambda t: vec_norm(evaluate(a, t) @ x, nm) ** 2, s, 64
        )
        tail = datko_integral(a, nm, evaluate(a, s) @ x)
        assert whole == pytest.approx(head + tail, rel=1e-6, abs=1e-10)


class TestLowerEnvelope:
    def test_scalar_family(self):
        nm = NormModel.identity(2)
        fit = lower_envelope(-2.0 * np.eye(2), nm)
        assert fit.c == pytest.approx(1.0, rel=1e-10)
        assert fit.alpha == pytest.approx(2.0, rel=1e-10)

    def test_unitary_group(self):
        nm = NormModel.identity(2)
        fit = lower_envelope(ROTATION, nm, t_grid=np.linspace(0.5, 20.0, 16))
        assert fit.c == pytest.approx(1.0, abs=1e-12)
        assert fit.alpha == pytest.approx(0.0, abs=1e-12)

    def test_upwind_brute_force_oracle(self):
        a = upwind_shift(8, 1.0, 1.0)
        nm = NormModel.identity(8)
        fit = lower_envelope(a, nm)
        for t, m in fit.grid:
            assert m == pytest.approx(singular_extremes(evaluate(a, t))[1], rel=1e-9)
            assert m >= fit.c * math.exp(-fit.alpha * t) * (1.0 - 1e-12)
        ms = [m for _, m in fit.grid]
        assert all(x > y for x, y in zip(ms, ms[1:]))

    def test_finite_dimensional_floor(self):
        a = jordan_block(5, -1.0)
        nm = NormModel.identity(5)
        nrm = op_norm(a, nm)
        fit = lower_envelope(a, nm)
        for t, m in fit.grid:
            assert m >= math.exp(-t * nrm) * (1.0 - 1e-9) - 1e-13

    def test_envelope_invariant_by_construction(self):
        for seed in range(5):
            a = random_stable(5, 0.5, seed)
            nm = NormModel.identity(5)
            fit = lower_envelope(a, nm)
            for t, m in fit.grid:
                assert m >= fit.c * math.exp(-fit.alpha * t) * (1.0 - 1e-12)


class TestLeftInvertibilityWitness:
    def test_scalar(self):
        nm = NormModel.identity(2)
        assert left_invertibility_witness(-np.eye(2), nm, 1.0) == pytest.approx(
            math.exp(-1.0), rel=1e-12
        )

    def test_rotation_is_isometric(self):
        nm = NormModel.identity(2)
        assert left_invertibility_witness(ROTATION, nm, 7.0) == pytest.approx(
            1.0, rel=1e-12
        )

    def test_jordan_against_polynomial_oracle(self):
        # T(2) for a 4x4 Jordan block at -1 in explicit polynomial form
        t0 = 2.0
        nilpotent_part = np.array(
            [
                [1.0, t0, t0**2 / 2.0, t0**3 / 6.0],
                [0.0, 1.0, t0, t0**2 / 2.0],
                [0.0, 0.0, 1.0, t0],
                [0.0, 0.0, 0.0, 1.0],
            ]
        )
        explicit = math.exp(-t0) * nilpotent_part
        expected = singular_extremes(explicit)[1]
        nm = NormModel.identity(4)
        m0 = left_invertibility_witness(jordan_block(4, -1.0), nm, t0)
        assert m0 == pytest.approx(expected, rel=1e-10)
        assert 0.0 < m0 < math.exp(-t0)

    def test_rejects_nonpositive_time(self):
        with pytest.raises(ValueError):
            left_invertibility_witness(-np.eye(2), NormModel.identity(2), 0.0)


class TestRefinementBehavior:
    def test_sigma_min_pointwise_decreasing_in_n(self):
        # the sound refinement statement: at any fixed time the
        # lower-bound function strictly degrades as cells are added
        for t in (0.5, 1.0, 3.0):
            values = [
                singular_extremes(evaluate(upwind_shift(n, 1.0, 1.0), t))[1]
                for n in (4, 8, 16)
            ]
            assert values[0] > values[1] > values[2]

    def test_fixed_rate_intercepts_decrease_in_n(self):
        # comparing envelope intercepts at one shared rate shows the
        # degradation that the per-model fits hide
        nm = {n: NormModel.identity(n) for n in (4, 8, 16)}
        grid = np.linspace(1.0, 10.0, 32)
        fits = {n: lower_envelope(upwind_shift(n, 1.0, 1.0), nm[n], grid) for n in nm}
        shared_rate = max(fit.alpha for fit in fits.values())
        intercepts = {}
        for n, fit in fits.items():
            intercepts[n] = min(
                m * math.exp(shared_rate * t) for t, m in fit.grid
            )
        assert intercepts[4] > intercepts[8] > intercepts[16]

    @pytest.mark.xfail(
        strict=True,
        reason="with the specified per-model fit the intercept c increases "
        "toward 1 as n grows (the h-fixed family converges to an "
        "isometry-like semigroup), so the claimed monotonicity fails; "
        "see the decisions ledger",
    )
    def test_fitted_c_nonincreasing_in_n_as_specified(self):
        cs = []
        grid = np.logspace(math.log10(0.01), math.log10(20.0), 64)
        for n in (4, 8, 16):
            fit = lower_envelope(upwind_shift(n, 1.0, 1.0), NormModel.identity(n), grid)
            cs.append(fit.c)
        assert cs[0] >= cs[1] >= cs[2]


class TestEnvelopeWitnessSearch:
    def test_scalar_equality_case(self):
        nm = NormModel.identity(2)
        grid = default_time_grid(-np.eye(2))
        hit = envelope_witness_search(-np.eye(2), nm, 1.0, grid)
        assert hit is not None
        t0, m0 = hit
        assert t0 == pytest.approx(grid[0])
        assert m0 == pytest.approx(math.exp(-t0), rel=1e-10)

    def test_unreachable_rate_returns_none(self):
        nm = NormModel.identity(2)
        grid = np.linspace(1.0, 5.0, 8)
        assert envelope_witness_search(-np.eye(2), nm, 0.25, grid) is None


def test_certified_decay_model_bounds_the_norms():
    for seed in range(3):
        a = random_stable(5, 0.4, seed)
        nm = NormModel.identity(5)
        s_hat, m_hat = certified_decay(a, nm)
        assert spectral_bound(a) < s_hat < 0.0
        for t in np.linspace(0.1, 30.0, 25):
            assert op_norm(evaluate(a, t), nm) <= m_hat * math.exp(s_hat * t) * (1 + 1e-9)
