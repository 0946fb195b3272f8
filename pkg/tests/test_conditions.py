"""Tests for the growth taxonomy, Condition-1 checker, and certificates."""

import math

import numpy as np
import pytest

from asymlab.algebra import LieAlgebra, QuadraticHamiltonian, rigid_body
from asymlab.conditions import (
    Condition1Params,
    certify_hamiltonian,
    check_condition_1,
    classical_null_condition,
    classify_growth,
)
from asymlab.system import (
    WaveSystemSpec,
    asymptotic_system,
    catalogue,
    from_hamiltonian,
)

JOHN = asymptotic_system(catalogue("john"))
CHAIN = asymptotic_system(catalogue("weak_null_chain"))
SUPER = asymptotic_system(catalogue("super_exponential"))
RIGID = asymptotic_system(catalogue("rigid_body", 1.0, 2.0, 3.0))
NULL = asymptotic_system(catalogue("null_form"))


class TestClassicalNullCondition:
    def test_null_form_satisfies(self):
        assert classical_null_condition(catalogue("null_form"))

    @pytest.mark.parametrize(
        "name,params",
        [("john", ()), ("weak_null_chain", ()), ("super_exponential", ()),
         ("rigid_body", (1.0, 2.0, 3.0))],
    )
    def test_bad_systems_fail(self, name, params):
        assert not classical_null_condition(catalogue(name, *params))

    def test_mixed_system(self):
        F = np.zeros((2, 2, 2))
        G = np.zeros((2, 2, 2))
        G[0, 1, 1] = 1.0
        assert classical_null_condition(WaveSystemSpec(2, bad_coeffs=F, nullform_coeffs=G))
        F[1, 0, 0] = 1e-30  # any nonzero bad coefficient breaks it
        assert not classical_null_condition(WaveSystemSpec(2, bad_coeffs=F, nullform_coeffs=G))


class TestGrowthTaxonomy:
    def test_trivial_system_is_bounded_with_exact_ratio(self):
        rep = classify_growth(NULL, 0.2, 50.0, trials=3, seed=0)
        assert rep.verdict == "bounded_stable"
        assert rep.passed
        # data sit exactly on the eps max-sphere and nothing moves
        assert rep.c_tilde == 1.0

    def test_chain_linear_growth_rate(self):
        rep = classify_growth(CHAIN, 0.1, 200.0, trials=4, seed=0)
        assert rep.verdict == "linear_growth"
        assert rep.passed
        # corner data freeze field 0 at eps, so the envelope slope is eps^2/4
        assert rep.rate == pytest.approx(0.1**2 / 4.0, rel=0.1)
        assert rep.fit.model == "linear"

    def test_super_exponential_chain(self):
        rep = classify_growth(SUPER, 0.3, 60.0, trials=6, seed=0)
        assert rep.verdict == "super_exponential"
        assert not rep.passed
        assert rep.fit.model == "super_exponential"
        assert rep.fit.r_squared >= 0.99

    def test_rigid_body_bounded(self):
        rep = classify_growth(RIGID, 0.05, 60.0, trials=4, seed=0)
        assert rep.verdict == "bounded_stable"
        assert rep.passed
        assert rep.c_tilde is not None and rep.c_tilde <= 2.0

    def test_john_blowup_with_pole_location(self):
        rep = classify_growth(JOHN, 0.1, 100.0, trials=4, seed=0)
        assert rep.verdict == "blowup"
        assert not rep.passed
        # the corner datum phi0 = +eps hits the Riccati pole at 4/eps
        assert rep.s_star == pytest.approx(40.0, rel=0.01)

    def test_worst_trial_indexed(self):
        rep = classify_growth(JOHN, 0.1, 100.0, trials=4, seed=0)
        assert rep.worst_trial is not None
        worst = rep.trials[rep.worst_trial]
        assert worst.verdict == "blowup"

    def test_trial_zero_is_the_corner(self):
        rep = classify_growth(RIGID, 0.05, 40.0, trials=3, seed=0)
        np.testing.assert_array_equal(rep.trials[0].phi0, [0.05, 0.05, 0.05])

    def test_all_data_on_max_sphere(self):
        rep = classify_growth(RIGID, 0.03, 40.0, trials=6, seed=2)
        for t in rep.trials:
            assert np.max(np.abs(t.phi0)) == pytest.approx(0.03, abs=0.0)

    def test_determinism(self):
        a = classify_growth(RIGID, 0.05, 50.0, trials=5, seed=7)
        b = classify_growth(RIGID, 0.05, 50.0, trials=5, seed=7)
        assert a.to_dict() == b.to_dict()

    def test_eps_validation(self):
        with pytest.raises(ValueError):
            classify_growth(JOHN, 0.6, 10.0)
        with pytest.raises(ValueError):
            classify_growth(JOHN, 0.0, 10.0)

    def test_report_serializes(self):
        rep = classify_growth(CHAIN, 0.1, 100.0, trials=2, seed=0)
        d = rep.to_dict()
        assert d["verdict"] == "linear_growth"
        assert len(d["trials"]) == 2
        assert d["trials"][0]["fit"]["model"] in ("linear", "const")


class TestCondition1:
    def test_rigid_body_passes_with_certificate(self):
        p = Condition1Params(eps=0.01, delta=0.5, C=1.0, trials=10, s_max=60.0, seed=0)
        rep = check_condition_1(RIGID, p)
        assert rep.verdict == "bounded_stable"
        assert rep.passed
        assert rep.certificate is not None
        assert rep.certificate.label == "certified bounded-stable"
        # both forcing kinds per datum
        assert len(rep.trials) == 20
        kinds = {t.forcing for t in rep.trials}
        assert kinds == {"random_piecewise", "adversarial_aligned"}

    def test_every_trial_dominated_by_certificate(self):
        tol = 1e-10
        p = Condition1Params(eps=0.01, delta=0.5, C=1.0, trials=16, s_max=60.0, seed=3)
        rep = check_condition_1(RIGID, p, tol=tol)
        for t in rep.trials:
            assert t.certificate_ok
            assert t.sup_h_norm <= t.h_norm_bound + 10.0 * tol

    def test_c_tilde_below_certified_value(self):
        p = Condition1Params(eps=0.01, delta=0.5, C=1.0, trials=12, s_max=60.0, seed=1)
        rep = check_condition_1(RIGID, p)
        assert rep.c_tilde <= rep.certificate.c_tilde_certified

    def test_john_fails_by_blowup(self):
        p = Condition1Params(eps=0.1, delta=0.5, C=1.0, trials=4, s_max=60.0, seed=0)
        rep = check_condition_1(JOHN, p)
        assert rep.verdict == "blowup"
        assert not rep.passed
        # forcing only accelerates the unforced pole at s = 40
        assert rep.s_star is not None and 0.0 < rep.s_star <= 40.0

    def test_zero_system_attains_forced_bound(self):
        zero = asymptotic_system(WaveSystemSpec(n_fields=2))
        p = Condition1Params(eps=0.01, delta=1.0, C=1.0, trials=6, s_max=30.0, seed=1)
        rep = check_condition_1(zero, p)
        assert rep.passed
        # |y| <= |y0| + C eps/delta gives c_tilde <= 1 + C/delta = 2
        assert rep.c_tilde <= 2.0 + 1e-9

    def test_determinism_and_worker_independence(self):
        p = Condition1Params(eps=0.01, delta=0.5, C=1.0, trials=8, s_max=40.0, seed=5)
        a = check_condition_1(RIGID, p, n_workers=1)
        b = check_condition_1(RIGID, p, n_workers=4)
        assert a.to_dict() == b.to_dict()

    def test_trial_prefix_stable_under_more_trials(self):
        pa = Condition1Params(eps=0.01, delta=0.5, C=1.0, trials=6, s_max=40.0, seed=2)
        pb = Condition1Params(eps=0.01, delta=0.5, C=1.0, trials=12, s_max=40.0, seed=2)
        a = check_condition_1(RIGID, pa)
        b = check_condition_1(RIGID, pb)
        for ta, tb in zip(a.trials, b.trials):
            assert ta.to_dict() == tb.to_dict()

    def test_short_horizon_warns(self):
        with pytest.warns(UserWarning):
            Condition1Params(eps=0.01, delta=0.5, C=1.0, trials=2, s_max=10.0)

    def test_param_validation(self):
        with pytest.raises(ValueError):
            Condition1Params(eps=-0.01, delta=0.5, C=1.0, trials=2, s_max=60.0)
        with pytest.raises(ValueError):
            Condition1Params(eps=0.01, delta=0.0, C=1.0, trials=2, s_max=60.0)
        with pytest.raises(ValueError):
            Condition1Params(eps=0.01, delta=0.5, C=1.0, trials=0, s_max=60.0)


class TestCertificate:
    def test_rigid_body_arithmetic(self):
        alg, ham = rigid_body(1.0, 2.0, 3.0)
        cert = certify_hamiltonian(alg, ham, eps=0.01, delta=0.5, C=1.0)
        lam_min, lam_max = 1.0 / 6.0, 1.0 / 2.0  # eigenvalues of diag(1/2,1/4,1/6)
        assert cert.lambda_min == pytest.approx(lam_min, rel=1e-12)
        assert cert.lambda_max == pytest.approx(lam_max, rel=1e-12)
        assert cert.increment == pytest.approx(0.01 / 0.5, rel=1e-14)
        initial = math.sqrt(3 * lam_max) * 0.01
        assert cert.initial_h_norm_max == pytest.approx(initial, rel=1e-12)
        bound = (initial + 0.02) / math.sqrt(lam_min)
        assert cert.max_norm_bound == pytest.approx(bound, rel=1e-12)
        assert cert.c_tilde_certified == pytest.approx(bound / 0.01, rel=1e-12)

    def test_h_norm_bound_uses_initial_datum(self):
        alg, ham = rigid_body(1.0, 2.0, 3.0)
        cert = certify_hamiltonian(alg, ham, eps=0.01, delta=0.5, C=1.0)
        y0 = np.array([0.01, -0.005, 0.002])
        h0 = math.sqrt(float(y0 @ ham.matrix @ y0))
        assert cert.h_norm_bound(y0, ham) == pytest.approx(h0 + cert.increment, rel=1e-14)

    def test_indefinite_hamiltonian_unconstructible(self):
        # the certificate's positivity premise is enforced at construction
        with pytest.raises(ValueError):
            QuadraticHamiltonian(dim=3, matrix=np.diag([1.0, -1.0, 1.0]))

    def test_rejects_dimension_mismatch(self):
        alg, _ = rigid_body(1.0, 2.0, 3.0)
        ham2 = QuadraticHamiltonian(dim=2, matrix=np.eye(2))
        with pytest.raises(ValueError):
            certify_hamiltonian(alg, ham2, eps=0.01, delta=0.5, C=1.0)

    def test_certificate_serializes(self):
        alg, ham = rigid_body(1.0, 2.0, 3.0)
        d = certify_hamiltonian(alg, ham, eps=0.01, delta=0.5, C=1.0).to_dict()
        assert d["label"] == "certified bounded-stable"
        assert d["c_tilde_certified"] > 1.0
