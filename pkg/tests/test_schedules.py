import numpy as np
import pytest
from numpy.testing import assert_allclose

from fluxsched.schedules import (
    DqaParams,
    GaussianProgressionParams,
    LzGadgetParams,
    PolynomialRfParams,
    ScheduleParameterError,
    dqa_schedule,
    gaussian_progression,
    lz_gadget,
    polynomial_rf,
)

S = np.linspace(0.0, 1.0, 201)


class TestGaussianProgression:
    def setup_method(self):
        self.params = GaussianProgressionParams(omega=0.25, steepness=30.0, mu=1.0 / 3.0)

    def test_angle_endpoints(self):
        p = self.params
        assert p.theta(0.0) == pytest.approx(0.0, abs=1e-9)
        assert p.theta(0.5) == pytest.approx(np.pi / 4, abs=1e-12)
        assert p.theta(1.0) == pytest.approx(np.pi / 2, abs=1e-9)

    def test_angle_monotone(self):
        theta = np.array([self.params.theta(s) for s in S])
        assert np.all(np.diff(theta) >= -1e-12)

    def test_constant_magnitude(self):
        sched = gaussian_progression(self.params, S)
        mag = np.hypot(sched.h_x[0], sched.h_z[0])
        assert_allclose(mag, 0.25, atol=1e-12)

    def test_characteristic_times(self):
        # oscillation spacing 1/(4 omega mu); sweep-rate time
        # steepness/(2 pi omega)
        assert self.params.t_osc == pytest.approx(3.0)
        assert self.params.t_ad == pytest.approx(30.0 / (2 * np.pi * 0.25))

    def test_transverse_dominates_early(self):
        sched = gaussian_progression(self.params, S)
        assert sched.h_x[0, 0] == pytest.approx(0.25, abs=1e-9)
        assert sched.h_z[0, 0] == pytest.approx(0.0, abs=1e-9)
        assert sched.h_x[0, -1] == pytest.approx(0.0, abs=1e-9)
        assert sched.h_z[0, -1] == pytest.approx(0.25, abs=1e-9)

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(omega=0.0, steepness=30.0, mu=0.3),
            dict(omega=0.25, steepness=-1.0, mu=0.3),
            dict(omega=0.25, steepness=30.0, mu=0.0),
            dict(omega=0.25, steepness=30.0, mu=0.5),
        ],
    )
    def test_parameter_domain(self, kwargs):
        with pytest.raises(ScheduleParameterError):
            GaussianProgressionParams(**kwargs)


class TestPolynomialRf:
    def setup_method(self):
        self.params = PolynomialRfParams(h=1.0 / 6.0, p=8)

    def test_endpoint_values(self):
        sched = polynomial_rf(self.params, S)
        h = 1.0 / 6.0
        assert sched.h_x[0, 0] == pytest.approx(0.0, abs=1e-15)
        assert sched.h_z[0, 0] == pytest.approx(h)
        assert sched.h_x[0, 100] == pytest.approx(h)
        assert sched.h_z[0, 100] == pytest.approx(0.0, abs=1e-15)
        assert sched.h_x[0, -1] == pytest.approx(0.0, abs=1e-15)
        assert sched.h_z[0, -1] == pytest.approx(h)

    def test_odd_power_flips_final_tilt(self):
        sched = polynomial_rf(PolynomialRfParams(h=0.2, p=3), S)
        assert sched.h_z[0, 0] == pytest.approx(0.2)
        assert sched.h_z[0, -1] == pytest.approx(-0.2)

    def test_characteristic_times(self):
        assert self.params.t_osc == pytest.approx(3.0)
        assert self.params.t_ad == pytest.approx(8 / (4 * (1.0 / 6.0)))

    def test_bell_variant_layout(self):
        sched = polynomial_rf(self.params, S, bell=True)
        assert sched.n_qubits == 2
        assert_allclose(sched.h_x[0], sched.h_x[1])
        # per-qubit transverse terms carry half the single-qubit drive
        single = polynomial_rf(self.params, S)
        assert_allclose(sched.h_x[0], single.h_x[0] / 2)
        assert_allclose(sched.h_z, np.zeros((2, len(S))))
        assert_allclose(sched.j[(0, 1)], single.h_z[0])

    def test_integer_power_required(self):
        with pytest.raises(ScheduleParameterError):
            PolynomialRfParams(h=0.2, p=0)
        with pytest.raises(ScheduleParameterError):
            PolynomialRfParams(h=-0.1, p=2)


class TestLzGadget:
    def setup_method(self):
        self.params = LzGadgetParams(h_z=0.8, lam=0.2)

    def test_transverse_scale(self):
        assert self.params.h_x == pytest.approx(0.16)

    def test_sweep_endpoints(self):
        for sweep in ("linear", "grover"):
            p = LzGadgetParams(h_z=0.8, lam=0.2, sweep=sweep)
            assert p.gamma(0.0) == pytest.approx(-1.0, abs=1e-12)
            assert p.gamma(1.0) == pytest.approx(1.0, abs=1e-12)
            assert p.gamma(0.5) == pytest.approx(0.0, abs=1e-12)

    def test_grover_sweep_slows_at_crossing(self):
        lin = LzGadgetParams(h_z=0.8, lam=0.2, sweep="linear")
        gro = LzGadgetParams(h_z=0.8, lam=0.2, sweep="grover")
        eps = 0.01
        assert abs(gro.gamma(0.5 + eps)) < abs(lin.gamma(0.5 + eps))

    def test_crossing_eigenvalues_against_matrix(self):
        # at the crossing the four levels are +-h_z and
        # +-sqrt(h_z^2 + 4 h_x^2); check against a direct 4x4 build
        sched, report = lz_gadget(self.params, S)
        hz, hx = 0.8, 0.16
        sx = np.array([[0, 1], [1, 0]], dtype=float)
        sz = np.diag([1.0, -1.0])
        i2 = np.eye(2)
        h_mid = hx * (np.kron(sx, i2) + np.kron(i2, sx)) - hz * np.kron(sz, sz)
        vals = np.linalg.eigvalsh(h_mid)
        assert_allclose(vals, report["crossing_eigenvalues"], atol=1e-12)
        exact = np.sqrt(hz**2 + 4 * hx**2) - hz
        assert report["gap_exact"] == pytest.approx(exact, abs=1e-15)
        assert report["gap_exact"] == pytest.approx(0.0616264, abs=1e-7)
        assert report["gap_approx"] == pytest.approx(2 * hz * 0.2**2)

    def test_gap_scaling_with_chain_length(self):
        # the minimum gap closes one power of lambda per added qubit
        def mid_gap(n, lam):
            sched, _ = lz_gadget(LzGadgetParams(h_z=0.8, lam=lam, n=n), S)
            from fluxsched.dynamics import ScheduleHamiltonian

            h = ScheduleHamiltonian(sched).matrix(0.5)
            vals = np.linalg.eigvalsh(h)
            return vals[1] - vals[0]

        for n in (2, 3):
            ratio = mid_gap(n, 0.1) / mid_gap(n, 0.2)
            assert ratio == pytest.approx(0.5**n, rel=0.05)

    def test_schedule_rows(self):
        sched, _ = lz_gadget(LzGadgetParams(h_z=0.8, lam=0.2, n=3), S)
        assert sched.n_qubits == 3
        assert_allclose(sched.h_x, np.full((3, len(S)), 0.16))
        # the sweep lives on the first qubit's tilt only
        assert_allclose(sched.h_z[1:], 0.0)
        assert set(sched.j) == {(0, 1), (1, 2)}
        assert_allclose(sched.j[(0, 1)], -0.8)

    def test_parameter_domain(self):
        with pytest.raises(ScheduleParameterError):
            LzGadgetParams(h_z=0.8, lam=0.2, sweep="cubic")
        with pytest.raises(ScheduleParameterError):
            LzGadgetParams(h_z=0.8, lam=0.0)
        with pytest.raises(ScheduleParameterError):
            LzGadgetParams(h_z=0.8, lam=0.2, n=1)


class TestDqa:
    def setup_method(self):
        self.params = DqaParams(
            s_1=0.1, delta_1=0.05, h_x1=0.5, h_x2=1.0, h_z1=0.5, h_z2=0.8, j=0.7
        )

    def test_sweep_boundary_values(self):
        p = self.params
        d1, d2, pz = p.sweeps(np.array([0.0, 0.1, 1.0]))
        assert_allclose(d1, [1.0, 0.05, 0.0], atol=1e-12)
        assert_allclose(d2, [1.0, 1.0, 0.0], atol=1e-12)
        assert_allclose(pz, [0.0, 0.0, 1.0], atol=1e-12)

    def test_sweeps_continuous_at_junction(self):
        p = self.params
        eps = 1e-9
        left = np.array([v[0] for v in p.sweeps(np.array([0.1 - eps]))])
        right = np.array([v[0] for v in p.sweeps(np.array([0.1 + eps]))])
        assert_allclose(left, right, atol=1e-6)

    def test_gap_proxy_root(self):
        _, report = dqa_schedule(self.params, np.linspace(0, 1, 1001))
        assert report["s_star"] == pytest.approx(0.658353, abs=1e-5)
        assert report["gap_2_approx"] == pytest.approx(0.018980, abs=1e-5)
        assert report["gamma_d1_at_s1"] == pytest.approx(0.05)

    def test_gap_proxy_negative_between_roots(self):
        p = self.params
        s_mid = np.array([0.3])
        assert p.delta_tilde(s_mid)[0] < 0.0
        s_late = np.array([0.9])
        assert p.delta_tilde(s_late)[0] > 0.0

    def test_schedule_layout(self):
        sched, _ = dqa_schedule(self.params, S)
        assert sched.n_qubits == 2
        assert sched.pairs == [(0, 1)]
        # probe qubit drive never exceeds the system drive
        assert np.all(sched.h_x[0] <= sched.h_x[1] + 1e-12)

    @pytest.mark.parametrize(
        "override",
        [
            dict(s_1=0.0),
            dict(s_1=1.0),
            dict(h_x1=1.5),
            dict(j=0.4),
            dict(j=0.9),
            dict(delta_1=1.5),
        ],
    )
    def test_parameter_domain(self, override):
        kwargs = dict(
            s_1=0.1, delta_1=0.05, h_x1=0.5, h_x2=1.0, h_z1=0.5, h_z2=0.8, j=0.7
        )
        kwargs.update(override)
        with pytest.raises(ScheduleParameterError):
            DqaParams(**kwargs)
