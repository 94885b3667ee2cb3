import math
import tempfile
from pathlib import Path

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st
from numpy.testing import assert_allclose

from test_pauli import crafted_qubit

from fluxsched import io as fio
from fluxsched.config import ConfigError, RunConfig
from fluxsched.dynamics import ScheduleHamiltonian
from fluxsched.elements import FluxBias
from fluxsched.inversion import FluxScheduleTable, asymmetry_correct, asymmetry_residual
from fluxsched.pauli import PauliSchedule, pauli_string_matrix, single_qubit_pauli
from fluxsched.schedules import (
    DqaParams,
    GaussianProgressionParams,
    LzGadgetParams,
    PolynomialRfParams,
    dqa_schedule,
    gaussian_progression,
    lz_gadget,
    polynomial_rf,
)

settings.register_profile("suite", deadline=None, max_examples=60)
settings.load_profile("suite")

finite = st.floats(allow_nan=False, allow_infinity=False)


@given(
    phi_x=st.floats(0.1, 2.0 * math.pi - 0.1),
    d=st.floats(-0.6, 0.6),
    phi_z=st.floats(-0.3, 0.3),
)
def test_asymmetry_correction_residual(phi_x, d, phi_z):
    assume(abs(math.cos(phi_x / 2.0)) > abs(d) + 0.05)
    fb = asymmetry_correct(FluxBias(phi_x=phi_x, phi_z=phi_z), d)
    assert abs(asymmetry_residual(phi_x, fb.phi_x, d)) < 1e-12
    assert 0.0 <= fb.phi_x <= 2.0 * math.pi


@given(
    n=st.integers(1, 3),
    n_points=st.integers(2, 5),
    data=st.data(),
)
def test_pauli_csv_round_trip(n, n_points, data):
    vals = st.floats(-10.0, 10.0)
    draw_row = lambda: np.array(
        data.draw(st.lists(vals, min_size=n_points, max_size=n_points))
    )
    sched = PauliSchedule(
        s=np.linspace(0.0, 1.0, n_points),
        h_x=np.stack([draw_row() for _ in range(n)]),
        h_z=np.stack([draw_row() for _ in range(n)]),
        j={(0, n - 1): draw_row()} if n > 1 else {},
    )
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "sched.csv"
        fio.write_pauli_schedule(path, sched)
        back = fio.read_pauli_schedule(path)
    assert np.array_equal(back.s, sched.s)
    assert np.array_equal(back.h_x, sched.h_x)
    assert np.array_equal(back.h_z, sched.h_z)
    assert back.pairs == sched.pairs
    for pair in sched.j:
        assert np.array_equal(back.j[pair], sched.j[pair])


@given(n=st.integers(1, 3), n_points=st.integers(2, 4), data=st.data())
def test_flux_csv_round_trip(n, n_points, data):
    vals = st.floats(-10.0, 10.0)
    draw = lambda: np.array(
        [
            data.draw(st.lists(vals, min_size=n_points, max_size=n_points))
            for _ in range(n)
        ]
    )
    table = FluxScheduleTable(
        s=np.linspace(0.0, 1.0, n_points), phi_x=draw(), phi_z=draw()
    )
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "fluxes.csv"
        fio.write_flux_table(path, table)
        back = fio.read_flux_table(path)
    assert_allclose(back.phi_x, table.phi_x, rtol=1e-14, atol=1e-16)
    assert_allclose(back.phi_z, table.phi_z, rtol=1e-14, atol=1e-16)


@given(
    omega=st.floats(0.01, 2.0),
    steepness=st.floats(5.0, 80.0),
    mu=st.floats(0.05, 0.45),
)
def test_gaussian_progression_invariants(omega, steepness, mu):
    params = GaussianProgressionParams(omega=omega, steepness=steepness, mu=mu)
    sched = gaussian_progression(params, np.linspace(0.0, 1.0, 101))
    theta = np.arctan2(sched.h_z[0], sched.h_x[0])
    assert np.all(theta >= -1e-12)
    assert np.all(theta <= math.pi / 2.0 + 1e-12)
    assert np.all(np.diff(theta) >= -1e-12)
    assert_allclose(np.hypot(sched.h_x[0], sched.h_z[0]), omega, rtol=1e-12)


@given(h=st.floats(0.01, 3.0), p=st.integers(1, 12))
def test_polynomial_rf_invariants(h, p):
    params = PolynomialRfParams(h=h, p=p)
    s = np.linspace(0.0, 1.0, 101)
    sched = polynomial_rf(params, s)
    sign = (-1.0) ** p
    assert sched.h_x[0, 0] == pytest.approx(h * (1.0 - sign), rel=1e-12, abs=1e-15)
    assert sched.h_x[0, -1] == pytest.approx(0.0, abs=1e-12 * h)
    assert sched.h_x[0, 50] == pytest.approx(h, rel=1e-12)
    assert sched.h_z[0, 0] == pytest.approx(h, rel=1e-12)
    assert sched.h_z[0, -1] == pytest.approx(sign * h, rel=1e-12)
    assert np.all(np.abs(sched.h_x) <= 2.0 * h + 1e-12)

    bell = polynomial_rf(params, s, bell=True)
    assert bell.n_qubits == 2
    for row in bell.h_x:
        assert_allclose(row, 0.5 * sched.h_x[0], atol=1e-15)
    assert_allclose(bell.h_z, 0.0, atol=0.0)
    assert_allclose(bell.j[(0, 1)], sched.h_z[0], atol=0.0)


@given(
    h_z=st.floats(0.1, 2.0),
    lam=st.floats(0.05, 0.45),
    n=st.integers(2, 4),
    sweep=st.sampled_from(["linear", "grover"]),
)
def test_lz_gadget_invariants(h_z, lam, n, sweep):
    params = LzGadgetParams(h_z=h_z, lam=lam, sweep=sweep, n=n)
    sched, report = lz_gadget(params, np.linspace(0.0, 1.0, 101))
    assert_allclose(sched.h_x, lam * h_z, rtol=1e-12)
    # the sweep drives only the first qubit, endpoints -1, 0, +1
    assert sched.h_z[0, 0] == pytest.approx(-h_z, rel=1e-12)
    assert sched.h_z[0, 50] == pytest.approx(0.0, abs=1e-12 * h_z)
    assert sched.h_z[0, -1] == pytest.approx(h_z, rel=1e-12)
    if n > 1:
        assert_allclose(sched.h_z[1:], 0.0, atol=0.0)
    for pair in sched.pairs:
        assert_allclose(sched.j[pair], -h_z, rtol=1e-12)
    assert report["gap_approx"] == pytest.approx(2.0 * h_z * lam**2, rel=1e-12)
    if n == 2:
        # the single avoided crossing has a closed-form gap
        want = math.sqrt(h_z**2 + 4.0 * (lam * h_z) ** 2) - h_z
        assert report["gap_exact"] == pytest.approx(want, rel=1e-12)
        vals = np.linalg.eigvalsh(ScheduleHamiltonian(sched).matrix(0.5))
        assert vals[1] - vals[0] == pytest.approx(want, rel=1e-9)


@given(s_1=st.floats(0.05, 0.2), delta_1=st.floats(0.02, 0.08))
def test_dqa_schedule_invariants(s_1, delta_1):
    params = DqaParams(
        s_1=s_1,
        delta_1=delta_1,
        h_x1=0.5,
        h_x2=1.0,
        h_z1=0.5,
        h_z2=0.8,
        j=0.7,
    )
    sched, report = dqa_schedule(params, np.linspace(0.0, 1.0, 2001))
    assert s_1 < report["s_star"] < 1.0
    assert report["gamma_d1_at_s1"] == pytest.approx(delta_1, rel=1e-9)
    assert report["gap_2_approx"] > 0.0
    # piecewise sweeps stay continuous across the junction
    for row in (sched.h_x[0], sched.h_x[1], sched.h_z[0], sched.j[(0, 1)]):
        assert np.max(np.abs(np.diff(row))) < 0.05


@given(
    h_x=st.floats(-1.0, 1.0),
    h_z=st.floats(-1.0, 1.0),
    eps=st.floats(-0.5, 0.5),
)
def test_single_qubit_extraction_recovers(h_x, h_z, eps):
    assume(abs(h_x) > 1e-8 or abs(h_z) > 1e-8)
    h, ip = crafted_qubit(h_x, h_z, eps=eps)
    ext = single_qubit_pauli(h, ip)
    assert ext.valid
    assert ext.h_x == pytest.approx(abs(h_x), abs=1e-10)
    assert ext.h_z == pytest.approx(h_z, abs=1e-10)
    assert ext.epsilon == pytest.approx(eps, abs=1e-10)


@given(
    data=st.data(),
    n=st.integers(1, 3),
)
def test_pauli_string_trace_orthogonality(data, n):
    letters = st.sampled_from("IXYZ")
    a = "".join(data.draw(letters) for _ in range(n))
    b = "".join(data.draw(letters) for _ in range(n))
    pa = pauli_string_matrix(a)
    pb = pauli_string_matrix(b)
    tr = np.trace(pa.conj().T @ pb)
    assert tr == pytest.approx((2**n) if a == b else 0.0, abs=1e-12)


_INJECTION_POINTS = ["", "topology", "basis", "flux", "task"]


@given(
    where=st.sampled_from(_INJECTION_POINTS),
    key=st.from_regex(r"[a-z][a-z_]{2,10}", fullmatch=True),
)
def test_config_rejects_unknown_keys(where, key):
    doc = {
        "topology": {"elements": [{"kind": "csfq"}]},
        "basis": {"qubit": {"n_max": 6, "q_max": 5}},
        "flux": {
            "s_points": 2,
            "units": "rad",
            "elements": [{"phi_x": 4.0, "phi_z": 0.0}],
        },
        "task": {"seed": 1},
    }
    allowed = {
        "": set(doc) | {"schedule"},
        "topology": {"elements", "mutuals"},
        "basis": {"qubit", "coupler", "truncations"},
        "flux": {"s_points", "units", "elements"},
        "task": None,  # wide section; checked against the schema below
    }[where]
    if allowed is not None:
        assume(key not in allowed)
    target = doc if where == "" else doc[where]
    target[key] = 1 if where else {}
    try:
        RunConfig(doc)
    except ConfigError:
        return
    # the draw happened to hit a real key with a valid value; that is
    # only plausible in the wide task section
    assert where == "task"


@given(n=st.integers(1, 2), n_points=st.integers(2, 4), data=st.data())
def test_schedule_hamiltonian_nodes(n, n_points, data):
    vals = st.floats(-2.0, 2.0)
    draw_rows = lambda: np.array(
        [
            data.draw(st.lists(vals, min_size=n_points, max_size=n_points))
            for _ in range(n)
        ]
    )
    sched = PauliSchedule(
        s=np.linspace(0.0, 1.0, n_points),
        h_x=draw_rows(),
        h_z=draw_rows(),
        j={(0, 1): draw_rows()[0]} if n == 2 else {},
    )
    ham = ScheduleHamiltonian(sched)
    for idx, s in enumerate(sched.s):
        c = ham.coefficients(float(s))
        want = np.concatenate(
            [sched.h_x[:, idx], sched.h_z[:, idx]]
            + ([[sched.j[(0, 1)][idx]]] if n == 2 else [])
        )
        assert_allclose(c, want, atol=1e-9)
        m = ham.matrix(float(s))
        assert_allclose(m, m.conj().T, atol=1e-12)
