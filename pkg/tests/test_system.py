"""Tests for asymlab.system: spec validation, the F/4 reduction, catalogue."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from asymlab.algebra import LieAlgebra, QuadraticHamiltonian, euler_rhs, rigid_body
from asymlab.system import (
    AsymptoticSystem,
    WaveSystemSpec,
    asymptotic_system,
    catalogue,
    catalogue_describe,
    catalogue_names,
    from_hamiltonian,
    hamiltonian_provenance,
)


def brute_rhs(coeffs, phi):
    n = len(phi)
    out = np.zeros(n)
    for a in range(n):
        for b in range(n):
            for c in range(n):
                out[a] += coeffs[a, b, c] * phi[b] * phi[c]
    return out


class TestWaveSystemSpec:
    def test_defaults_are_zero_arrays(self):
        spec = WaveSystemSpec(n_fields=2)
        assert spec.bad_coeffs.shape == (2, 2, 2)
        assert np.all(spec.bad_coeffs == 0.0)
        assert np.all(spec.nullform_coeffs == 0.0)

    def test_rejects_nonpositive_n_fields(self):
        with pytest.raises(ValueError):
            WaveSystemSpec(n_fields=0)

    def test_rejects_wrong_shape(self):
        with pytest.raises(ValueError):
            WaveSystemSpec(n_fields=2, bad_coeffs=np.zeros((3, 3, 3)))

    def test_rejects_asymmetric_trailing_pair(self):
        F = np.zeros((2, 2, 2))
        F[0, 0, 1] = 1.0  # F[0,1,0] left at 0
        with pytest.raises(ValueError):
            WaveSystemSpec(n_fields=2, bad_coeffs=F)

    def test_rejects_nonfinite(self):
        F = np.zeros((1, 1, 1))
        F[0, 0, 0] = np.inf
        with pytest.raises(ValueError):
            WaveSystemSpec(n_fields=1, bad_coeffs=F)

    def test_coeffs_frozen(self):
        spec = catalogue("john")
        with pytest.raises(ValueError):
            spec.bad_coeffs[0, 0, 0] = 2.0

    def test_round_trip_serde(self):
        spec = catalogue("super_exponential")
        back = WaveSystemSpec.from_dict(spec.to_dict())
        np.testing.assert_array_equal(back.bad_coeffs, spec.bad_coeffs)
        np.testing.assert_array_equal(back.nullform_coeffs, spec.nullform_coeffs)
        assert back.label == spec.label
        assert back.n_fields == spec.n_fields


class TestAsymptoticSystem:
    def test_coeffs_are_quarter_of_bad(self):
        spec = catalogue("john")
        asys = asymptotic_system(spec)
        assert asys.coeffs[0, 0, 0] == 0.25

    def test_nullform_part_dropped(self):
        asys = asymptotic_system(catalogue("null_form"))
        assert asys.is_trivial()

    def test_rhs_matches_brute_force(self):
        rng = np.random.default_rng(5)
        for _ in range(25):
            n = int(rng.integers(1, 5))
            F = rng.standard_normal((n, n, n))
            F = 0.5 * (F + F.transpose(0, 2, 1))
            asys = asymptotic_system(WaveSystemSpec(n_fields=n, bad_coeffs=F))
            phi = rng.standard_normal(n)
            np.testing.assert_allclose(
                asys.rhs(phi), brute_rhs(asys.coeffs, phi), rtol=1e-13, atol=1e-13
            )

    def test_rhs_quadratic_scaling(self):
        asys = asymptotic_system(catalogue("super_exponential"))
        phi = np.array([0.3, -0.2, 0.1])
        for lam in (0.5, 2.0):
            np.testing.assert_allclose(
                asys.rhs(lam * phi), lam**2 * asys.rhs(phi), rtol=1e-14
            )

    def test_sign_equivariance_of_odd_chain(self):
        # flipping the sign of all fields flips the sign of quadratic terms
        asys = asymptotic_system(catalogue("weak_null_chain"))
        phi = np.array([0.4, 0.7])
        np.testing.assert_array_equal(asys.rhs(-phi), asys.rhs(phi))


class TestFromHamiltonian:
    def test_reduction_reproduces_euler_rhs(self):
        rng = np.random.default_rng(99)
        for _ in range(40):
            n = int(rng.integers(2, 5))
            C = rng.standard_normal((n, n, n))
            C = C - C.transpose(0, 2, 1)
            A = rng.standard_normal((n, n))
            H = A @ A.T + n * np.eye(n)
            alg = LieAlgebra(dim=n, structure=C)
            ham = QuadraticHamiltonian(dim=n, matrix=H)
            asys = asymptotic_system(from_hamiltonian(alg, ham))
            for _ in range(25):
                y = rng.standard_normal(n)
                np.testing.assert_allclose(
                    asys.rhs(y), euler_rhs(alg, ham, y), rtol=1e-13, atol=1e-13
                )

    def test_bad_coeffs_trailing_symmetric(self):
        alg, ham = rigid_body(1.0, 2.0, 3.0)
        F = from_hamiltonian(alg, ham).bad_coeffs
        np.testing.assert_array_equal(F, F.transpose(0, 2, 1))

    def test_provenance_preserved_through_reduction(self):
        alg, ham = rigid_body(1.0, 2.0, 3.0)
        spec = from_hamiltonian(alg, ham)
        asys = asymptotic_system(spec)
        pair = hamiltonian_provenance(asys)
        assert pair is not None
        assert pair[0] is alg and pair[1] is ham

    def test_no_provenance_for_plain_specs(self):
        assert hamiltonian_provenance(asymptotic_system(catalogue("john"))) is None

    def test_dimension_mismatch(self):
        alg, _ = rigid_body(1.0, 2.0, 3.0)
        with pytest.raises(ValueError):
            from_hamiltonian(alg, QuadraticHamiltonian(dim=2, matrix=np.eye(2)))

    @settings(max_examples=100, deadline=None)
    @given(
        inertias=st.lists(st.floats(0.2, 5.0), min_size=3, max_size=3),
        y=st.lists(st.floats(-2, 2), min_size=3, max_size=3),
    )
    def test_rigid_body_reduction_property(self, inertias, y):
        alg, ham = rigid_body(*inertias)
        asys = asymptotic_system(from_hamiltonian(alg, ham))
        yv = np.array(y)
        np.testing.assert_allclose(
            asys.rhs(yv), euler_rhs(alg, ham, yv), rtol=1e-12, atol=1e-12
        )


class TestCatalogue:
    def test_names_and_descriptions(self):
        names = catalogue_names()
        assert names == [
            "null_form",
            "john",
            "weak_null_chain",
            "super_exponential",
            "rigid_body",
        ]
        for name in names:
            assert catalogue_describe(name)

    def test_john_exact_array(self):
        spec = catalogue("john")
        F = np.zeros((1, 1, 1))
        F[0, 0, 0] = 1.0
        np.testing.assert_array_equal(spec.bad_coeffs, F)
        assert np.all(spec.nullform_coeffs == 0.0)

    def test_null_form_exact_array(self):
        spec = catalogue("null_form")
        assert np.all(spec.bad_coeffs == 0.0)
        assert spec.nullform_coeffs[0, 0, 0] == -1.0

    def test_chain_drives_second_field_only(self):
        asys = asymptotic_system(catalogue("weak_null_chain"))
        d = asys.rhs(np.array([0.1, 7.0]))
        assert d[0] == 0.0
        assert d[1] == pytest.approx(0.1**2 / 4.0, rel=1e-15)

    def test_super_exponential_chain_structure(self):
        asys = asymptotic_system(catalogue("super_exponential"))
        d = asys.rhs(np.array([1.0, 2.0, 3.0]))
        # field 0 is free, each next field is driven by the previous one
        np.testing.assert_allclose(d, [0.0, 1.0 * 2.0 / 4.0, 2.0 * 3.0 / 4.0], rtol=1e-15)

    def test_rigid_body_catalogue_equals_direct_reduction(self):
        spec = catalogue("rigid_body", 1.0, 2.0, 3.0)
        alg, ham = rigid_body(1.0, 2.0, 3.0)
        np.testing.assert_array_equal(spec.bad_coeffs, from_hamiltonian(alg, ham).bad_coeffs)
        assert hamiltonian_provenance(spec) is not None

    def test_rigid_body_requires_three_params(self):
        with pytest.raises(ValueError):
            catalogue("rigid_body")
        with pytest.raises(ValueError):
            catalogue("rigid_body", 1.0, 2.0)

    def test_parameterless_systems_reject_params(self):
        with pytest.raises(ValueError):
            catalogue("john", 1.0)

    def test_unknown_name(self):
        with pytest.raises(ValueError):
            catalogue("does_not_exist")
