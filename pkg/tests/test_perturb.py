import math

import numpy as np
import pytest

from stabcert.lyapunov import certificate, membership_margin, solve_algebraic
from stabcert.models import SplitMix64, heat_dirichlet, random_hermitian, random_matrix
from stabcert.numkernel import hermitian_eig
from stabcert.perturb import (
    RadiusExceededError,
    admissible_radius,
    max_alpha,
    verify_perturbation,
)
from stabcert.space import NormModel, op_norm


def member_for(a, nm):
    return membership_margin(solve_algebraic(a, nm.w), a, nm)


class TestAdmissibleRadius:
    def test_examples(self):
        nm = NormModel.identity(2)
        cand = membership_margin(np.eye(2) / 2.0, -np.eye(2), nm)
        assert admissible_radius(cand, 2.0) == pytest.approx(0.5)
        assert admissible_radius(cand, 10.0) == pytest.approx(0.1)

    def test_quarter_norm_member(self):
        nm = NormModel.identity(2)
        cand = membership_margin(np.eye(2) / 4.0, -2.0 * np.eye(2), nm)
        assert cand.is_member
        assert admissible_radius(cand, 2.0) == pytest.approx(1.0)

    def test_rejects_alpha_at_most_one(self):
        nm = NormModel.identity(2)
        cand = membership_margin(np.eye(2) / 2.0, -np.eye(2), nm)
        with pytest.raises(ValueError):
            admissible_radius(cand, 1.0)


class TestVerifyPerturbation:
    def test_zero_perturbation(self):
        nm = NormModel.identity(2)
        cand = membership_margin(np.eye(2) / 2.0, -np.eye(2), nm)
        rep = verify_perturbation(-np.eye(2), np.zeros((2, 2)), cand, 2.0, nm)
        # the form keeps the full -|x|^2 and only (alpha-1)/alpha is added back
        assert rep.margin_after == pytest.approx(-0.5, abs=1e-12)
        assert rep.rescaled_member

    def test_nilpotent_perturbation_at_the_radius(self):
        a = -np.eye(2)
        nm = NormModel.identity(2)
        cand = membership_margin(np.eye(2) / 2.0, a, nm)
        b = np.array([[0.0, 0.5], [0.0, 0.0]])
        rep = verify_perturbation(a, b, cand, 2.0, nm)
        assert rep.b_norm == pytest.approx(0.5, rel=1e-14)
        assert rep.radius == pytest.approx(0.5)
        # eigenvalue oracle: (A+B)* Q + Q (A+B) = -I + [[0, 1/4], [1/4, 0]]
        lam, _ = hermitian_eig(-np.eye(2) + np.array([[0.0, 0.25], [0.25, 0.0]]))
        assert lam[-1] == pytest.approx(-0.75, abs=1e-14)
        assert rep.margin_after == pytest.approx(lam[-1] + 0.5, abs=1e-12)
        assert rep.rescaled_member

    def test_beyond_radius_rejected(self):
        a = -np.eye(2)
        nm = NormModel.identity(2)
        cand = membership_margin(np.eye(2) / 2.0, a, nm)
        with pytest.raises(RadiusExceededError) as excinfo:
            verify_perturbation(a, np.eye(2), cand, 2.0, nm)
        assert excinfo.value.excess == pytest.approx(0.5, rel=1e-12)

    def test_margin_shift_identity_in_alpha(self):
        """For fixed admissible B the alpha dependence is an exact shift:
        margin_after(a2) - margin_after(a1) = 1/a1 - 1/a2, so the margin
        grows with alpha yet stays nonpositive at every admissible alpha."""
        a = heat_dirichlet(6, 1.0)
        nm = NormModel.identity(6)
        cand = member_for(a, nm)
        b = random_hermitian(6, 5)
        b = b * (admissible_radius(cand, 10.0) / op_norm(b, nm))
        alphas = (1.5, 2.0, 4.0, 10.0)
        margins = [
            verify_perturbation(a, b, cand, alpha, nm).margin_after
            for alpha in alphas
        ]
        for (a1, m1), (a2, m2) in zip(zip(alphas, margins), zip(alphas[1:], margins[1:])):
            assert m2 - m1 == pytest.approx(1.0 / a1 - 1.0 / a2, abs=1e-12)
        assert all(m <= 1e-9 for m in margins)

    def test_randomized_suite_at_the_radius(self):
        a = heat_dirichlet(8, 1.0)
        nm = NormModel.identity(8)
        cand = member_for(a, nm)
        rng = SplitMix64(2024)
        for alpha in (1.5, 2.0):
            radius = admissible_radius(cand, alpha)
            for trial in range(15):
                raw = random_hermitian(8, rng) if trial % 2 else random_matrix(8, rng)
                b = raw * (radius / op_norm(raw, nm))
                rep = verify_perturbation(a, b, cand, alpha, nm)
                assert rep.margin_after <= 1e-9
                assert rep.rescaled_member


class TestMaxAlpha:
    def test_closed_form(self):
        nm = NormModel.identity(2)
        cand = membership_margin(np.eye(2) / 2.0, -np.eye(2), nm)
        b = np.diag([0.25, 0.25])
        best = max_alpha(-np.eye(2), b, cand, nm)
        assert best.alpha == pytest.approx(4.0, rel=1e-12)
        assert best.decay == pytest.approx(0.75, rel=1e-12)

    def test_at_the_limit_no_alpha_exists(self):
        nm = NormModel.identity(2)
        cand = membership_margin(np.eye(2) / 2.0, -np.eye(2), nm)
        with pytest.raises(RadiusExceededError):
            max_alpha(-np.eye(2), np.eye(2), cand, nm)

    def test_symmetric_flip_alpha_ten(self):
        nm = NormModel.identity(2)
        a = -np.eye(2)
        cand = membership_margin(np.eye(2) / 2.0, a, nm)
        b = 0.1 * np.array([[0.0, 1.0], [1.0, 0.0]])
        best = max_alpha(a, b, cand, nm)
        assert best.alpha == pytest.approx(10.0, rel=1e-12)
        rep = verify_perturbation(a, b, cand, best.alpha - 1e-9, nm)
        assert rep.margin_after <= 1e-9

    def test_zero_perturbation_gives_unbounded_alpha(self):
        nm = NormModel.identity(2)
        cand = membership_margin(np.eye(2) / 2.0, -np.eye(2), nm)
        best = max_alpha(-np.eye(2), np.zeros((2, 2)), cand, nm)
        assert math.isinf(best.alpha)
        assert best.decay == 1.0


class TestCertificateConsistency:
    def test_rescaled_chain_after_perturbation(self):
        """After a passing check, the rescaled member certifies A + B with
        the decay rate the rescaling predicts."""
        a = heat_dirichlet(6, 1.0)
        nm = NormModel.identity(6)
        cand = member_for(a, nm)
        rng = SplitMix64(77)
        for alpha in (2.0, 4.0):
            radius = admissible_radius(cand, alpha)
            raw = random_matrix(6, rng)
            b = raw * (radius / op_norm(raw, nm))
            rep = verify_perturbation(a, b, cand, alpha, nm)
            assert rep.margin_after <= 1e-9 and rep.rescaled_member
            rescaled = membership_margin(
                (alpha / (alpha - 1.0)) * cand.q, a + b, nm
            )
            cert = certificate(rescaled, a + b, nm)
            assert cert.grid_pass
            predicted = (alpha - 1.0) / (2.0 * alpha * cand.q_norm * (alpha / (alpha - 1.0)))
            assert cert.epsilon >= predicted * (1.0 - 1e-6)
