"""Characteristic-solver tests: exactness, convergence, traces, blow-up."""

import numpy as np
import pytest

from asymlab.algebra import rigid_body
from asymlab.system import WaveSystemSpec, asymptotic_system, catalogue
from asymlab.wave1d import (
    CharacteristicData,
    bump_data,
    compare_to_asymptotic,
    evolve,
    grid_to_csv,
    hamiltonian_drift,
    radiation_trace,
    save_grid,
    save_trace,
    trace_to_csv,
)

FREE = WaveSystemSpec(n_fields=1)  # F = G = 0


def free_wave_data(u_range, v_range, f, g):
    """ψ(u, v) = f(u) + g(v), the general solution of ∂_u∂_vψ = 0."""

    def on_v0(u):
        return (f(u) + g(v_range[0]))[None, :]

    def on_u0(v):
        return (f(u_range[0]) + g(v))[None, :]

    return CharacteristicData(
        n_fields=1, u_range=u_range, v_range=v_range, on_u0=on_u0, on_v0=on_v0
    )


class TestDAlembert:
    def test_zero_source_reproduces_superposition(self):
        f = lambda u: np.sin(3.0 * u) + 0.2 * u
        g = lambda v: np.exp(-0.1 * v) * np.cos(v)
        data = free_wave_data((0.0, 2.0), (5.0, 9.0), f, g)
        grid = evolve(FREE, data, 0.01)
        assert grid.status == "completed"
        exact = f(grid.u)[:, None] + g(grid.v)[None, :]
        assert np.max(np.abs(grid.psi[0] - exact)) <= 1e-12

    def test_exactness_is_resolution_independent(self):
        # the diamond update is algebraically exact on ψ = f(u) + g(v)
        f = lambda u: u**2
        g = lambda v: 1.0 / v
        for h in (0.2, 0.05):
            data = free_wave_data((0.0, 2.0), (5.0, 9.0), f, g)
            grid = evolve(FREE, data, h)
            exact = f(grid.u)[:, None] + g(grid.v)[None, :]
            assert np.max(np.abs(grid.psi[0] - exact)) <= 1e-12


class TestManufacturedConvergence:
    def test_richardson_ratio_near_four(self):
        # force the john system to admit ψ* = sin(u) e^{-v/10}
        spec = catalogue("john")
        psi = lambda u, v: np.sin(u) * np.exp(-v / 10.0)
        psi_u = lambda u, v: np.cos(u) * np.exp(-v / 10.0)
        psi_v = lambda u, v: -0.1 * np.sin(u) * np.exp(-v / 10.0)
        psi_uv = lambda u, v: -0.1 * np.cos(u) * np.exp(-v / 10.0)

        def source(u, v):
            r = (v - u) / 2.0
            pt = (psi_u(u, v) + psi_v(u, v)) / r
            return (psi_uv(u, v) + (r / 4.0) * pt**2)[None, :]

        u_range, v_range = (0.0, 2.0), (5.0, 13.0)

        def data():
            return CharacteristicData(
                n_fields=1,
                u_range=u_range,
                v_range=v_range,
                on_u0=lambda v: psi(u_range[0], v)[None, :],
                on_v0=lambda u: psi(u, v_range[0])[None, :],
            )

        errs = {}
        for h in (0.04, 0.02):
            grid = evolve(spec, data(), h, extra_source=source)
            assert grid.status == "completed"
            exact = psi(grid.u[:, None], grid.v[None, :])
            errs[h] = np.max(np.abs(grid.psi[0] - exact))
        ratio = errs[0.04] / errs[0.02]
        assert 3.5 <= ratio <= 4.5


class TestEvolveValidation:
    def test_corner_mismatch_rejected(self):
        data = CharacteristicData(
            n_fields=1,
            u_range=(0.0, 1.0),
            v_range=(3.0, 5.0),
            on_u0=lambda v: np.ones((1, v.size)),
            on_v0=lambda u: np.zeros((1, u.size)),
        )
        with pytest.raises(ValueError, match="corner"):
            evolve(FREE, data, 0.1)

    def test_h_must_divide_both_ranges(self):
        data = bump_data(1, (0.0, 1.0), (3.0, 5.0), [0.1])
        with pytest.raises(ValueError):
            evolve(FREE, data, 0.3)

    def test_field_count_mismatch(self):
        data = bump_data(2, (0.0, 1.0), (3.0, 5.0), [0.1, 0.1])
        with pytest.raises(ValueError):
            evolve(FREE, data, 0.1)

    def test_data_validation(self):
        with pytest.raises(ValueError):
            # r would vanish: v0 <= u1
            CharacteristicData(
                n_fields=1, u_range=(0.0, 4.0), v_range=(3.0, 5.0),
                on_u0=lambda v: np.zeros((1, v.size)),
                on_v0=lambda u: np.zeros((1, u.size)),
            )

    def test_domain_of_dependence(self):
        # changing ingoing data at u > u_cut cannot touch rows with u <= u_cut
        u_range, v_range, h = (0.0, 2.0), (5.0, 8.0), 0.05
        base = bump_data(1, u_range, v_range, [0.5], center=0.6, width=0.5)
        u_cut = 1.0

        def perturbed_on_v0(u):
            vals = base.on_v0(u).copy()
            vals[:, u > u_cut] += 0.3
            return vals

        data2 = CharacteristicData(
            n_fields=1, u_range=u_range, v_range=v_range,
            on_u0=base.on_u0, on_v0=perturbed_on_v0,
        )
        spec = catalogue("john")
        g1 = evolve(spec, bump_data(1, u_range, v_range, [0.5], center=0.6, width=0.5), h)
        g2 = evolve(spec, data2, h)
        k = int(round(u_cut / h))
        assert g1.psi[:, : k + 1, :].tobytes() == g2.psi[:, : k + 1, :].tobytes()
        assert not np.array_equal(g1.psi[:, k + 1 :, :], g2.psi[:, k + 1 :, :])


class TestBlowup:
    def test_john_blows_up_and_small_data_does_not(self):
        u_range, v_range, h = (0.0, 4.0), (10.0, 40.0), 0.05
        spec = catalogue("john")
        big = evolve(spec, bump_data(1, u_range, v_range, [2.0]), h)
        assert big.status == "blowup"
        assert big.blowup_point is not None
        small = evolve(spec, bump_data(1, u_range, v_range, [0.5]), h)
        assert small.status == "completed"

    def test_blowup_moves_inward_with_amplitude(self):
        u_range, v_range, h = (0.0, 4.0), (10.0, 80.0), 0.05
        spec = catalogue("john")
        v_stars = []
        for a in (2.0, 3.0, 4.0):
            grid = evolve(spec, bump_data(1, u_range, v_range, [a]), h)
            assert grid.status == "blowup"
            v_stars.append(grid.blowup_point[1])
        assert v_stars[0] > v_stars[1] > v_stars[2]

    def test_wavefront_frozen_beyond_blowup(self):
        grid = evolve(
            catalogue("john"), bump_data(1, (0.0, 4.0), (10.0, 40.0), [3.0]), 0.05
        )
        assert grid.status == "blowup"
        assert grid.wavefront_stop is not None
        i = grid.nu - 1
        assert grid.valid_v_count(i) <= grid.wavefront_stop
        # everything beyond the frozen wavefront is zero-filled
        assert np.all(grid.psi[:, i, grid.valid_v_count(i) :] == 0.0)


class TestRadiationTrace:
    def test_free_wave_closed_form(self):
        # ψ = f(u): Φ(s) = -2 f'(u*) - f(u*) e^{-s}; quadratic f keeps the
        # one-sided and centered stencils exact, so only roundoff remains
        f = lambda u: 0.3 - 0.2 * u + 0.05 * u**2
        fp = lambda u: -0.2 + 0.1 * u
        data = CharacteristicData(
            n_fields=1,
            u_range=(0.0, 1.0),
            v_range=(3.0, 60.0),
            on_u0=lambda v: np.full((1, v.size), f(0.0)),
            on_v0=lambda u: f(u)[None, :],
        )
        grid = evolve(FREE, data, 0.1)
        u_star = 0.5
        trace = radiation_trace(grid, u_star)
        expected = -2.0 * fp(u_star) - f(u_star) * np.exp(-trace.s)
        np.testing.assert_allclose(trace.phi[:, 0], expected, rtol=0, atol=1e-13)
        # s really is log r
        r = (grid.v - u_star) / 2.0
        np.testing.assert_allclose(trace.s, np.log(r[r > 0][-trace.s.size :]), atol=1e-12)

    def test_trace_off_grid_rejected(self):
        grid = evolve(FREE, bump_data(1, (0.0, 1.0), (3.0, 7.0), [0.2]), 0.1)
        with pytest.raises(ValueError):
            radiation_trace(grid, 0.55)

    def test_trace_needs_three_rows_for_the_stencil(self):
        grid = evolve(FREE, bump_data(1, (0.0, 0.2), (3.0, 7.0), [0.2]), 0.1)
        assert grid.nu == 3
        radiation_trace(grid, 0.1)  # fine: centered stencil has both rows
        narrow = evolve(FREE, bump_data(1, (0.0, 0.1), (3.0, 7.0), [0.2]), 0.1)
        with pytest.raises(ValueError):
            radiation_trace(narrow, 0.0)

    def test_trace_starved_by_blowup_rejected(self):
        # blow-up so early that the far rows keep fewer than 4 valid samples
        grid = evolve(
            catalogue("john"), bump_data(1, (0.0, 4.0), (10.0, 40.0), [8.0]), 0.05
        )
        assert grid.status == "blowup"
        with pytest.raises(ValueError):
            radiation_trace(grid, 4.0)

    def test_trace_shortened_but_usable_after_late_blowup(self):
        grid = evolve(
            catalogue("john"), bump_data(1, (0.0, 4.0), (10.0, 40.0), [4.0]), 0.05
        )
        assert grid.status == "blowup"
        trace = radiation_trace(grid, 4.0)
        assert 4 <= trace.s.size < grid.nv
        assert np.all(np.isfinite(trace.phi))


class TestComparisonAndDrift:
    def test_rigid_trace_matches_limit_flow(self):
        spec = catalogue("rigid_body", 1.0, 2.0, 3.0)
        asys = asymptotic_system(spec)
        data = bump_data(
            3, (0.0, 3.0), (6.0, 202.0), [0.12, 0.096, 0.072], center=1.5, width=0.5
        )
        grid = evolve(spec, data, 0.1)
        assert grid.status == "completed"
        trace = radiation_trace(grid, 1.8)
        comp = compare_to_asymptotic(trace, asys, 2.2, eps=0.12)
        assert comp.deviation <= 0.1
        _, ham = rigid_body(1.0, 2.0, 3.0)
        drift = hamiltonian_drift(trace, ham)
        assert drift.relative_oscillation <= 0.05
        assert drift.tail_window[1] == pytest.approx(trace.s[-1])

    def test_comparison_needs_a_decade(self):
        grid = evolve(FREE, bump_data(1, (0.0, 1.0), (3.0, 7.0), [0.2]), 0.1)
        trace = radiation_trace(grid, 0.5)
        asys = asymptotic_system(FREE)
        with pytest.raises(ValueError, match="trace"):
            compare_to_asymptotic(trace, asys, float(np.log((3.0 - 0.5) / 2.0)))


class TestExports:
    def test_grid_csv_long_form(self, tmp_path):
        grid = evolve(FREE, bump_data(1, (0.0, 1.0), (3.0, 5.0), [0.3]), 0.5)
        path = tmp_path / "g.csv"
        grid_to_csv(grid, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "u,v,field,psi"
        assert len(lines) == 1 + grid.nu * grid.nv * 1
        u, v, field, psi = lines[1].split(",")
        assert float(u) == 0.0 and float(v) == 3.0 and field == "0"

    def test_grid_csv_stride(self, tmp_path):
        grid = evolve(FREE, bump_data(1, (0.0, 2.0), (5.0, 9.0), [0.3]), 0.1)
        path = tmp_path / "g.csv"
        grid_to_csv(grid, path, stride=4)
        lines = path.read_text().splitlines()
        n_u = len(range(0, grid.nu, 4))
        n_v = len(range(0, grid.nv, 4))
        assert len(lines) == 1 + n_u * n_v

    def test_save_round_trip_files(self, tmp_path):
        grid = evolve(FREE, bump_data(1, (0.0, 1.0), (3.0, 7.0), [0.2]), 0.1)
        csv_path, meta_path = save_grid(grid, tmp_path / "grid")
        assert csv_path.endswith("grid.csv") and meta_path.endswith("grid.json")
        trace = radiation_trace(grid, 0.5)
        csv_t, meta_t = save_trace(trace, tmp_path / "trace")
        lines = open(csv_t).read().splitlines()
        assert lines[0] == "s,phi_0"
        assert len(lines) == trace.s.size + 1

    def test_trace_csv_precision_round_trip(self, tmp_path):
        grid = evolve(FREE, bump_data(1, (0.0, 1.0), (3.0, 7.0), [0.2]), 0.1)
        trace = radiation_trace(grid, 0.5)
        path = tmp_path / "t.csv"
        trace_to_csv(trace, path)
        body = np.loadtxt(path, delimiter=",", skiprows=1)
        np.testing.assert_array_equal(body[:, 0], trace.s)
        np.testing.assert_array_equal(body[:, 1], trace.phi[:, 0])
