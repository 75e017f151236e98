"""Traps with a scattering continuum (finite-range wells): phase
shifts, density of states, and the continuum-integrated channel sum."""

import math

import numpy as np
import pytest

import q1dscatter as q


def test_delta_well_phase_identity():
    # tan(theta_q) = V0 / (2 J sin q) for the single-defect well
    for v0 in (0.5, 1.0, 3.0):
        for qq in (0.3, math.pi / 4, 1.5, 2.8):
            st = q.scattering_state(q.DeltaWell(v0=v0), qq)
            assert math.tan(st.theta) == pytest.approx(
                v0 / (2.0 * math.sin(qq)), rel=1e-12)


def test_origin_weight_is_cos_squared_theta():
    for qq in (0.2, 0.9, 2.0):
        st = q.scattering_state(q.DeltaWell(v0=1.0), qq)
        assert st.phi0 ** 2 == pytest.approx(math.cos(st.theta) ** 2,
                                             rel=1e-12)


def test_phase_derivative_matches_finite_difference():
    spec = q.DeltaWell(v0=1.0)
    q0 = math.pi / 4
    h = 1e-6
    fd = (q.scattering_state(spec, q0 + h).theta
          - q.scattering_state(spec, q0 - h).theta) / (2.0 * h)
    st = q.scattering_state(spec, q0)
    assert st.dtheta_dq == pytest.approx(fd, abs=1e-8)


def test_density_of_states_excess():
    # g(q) - L/pi equals theta'(q)/pi
    spec = q.DeltaWell(v0=1.0)
    st = q.scattering_state(spec, math.pi / 4)
    box = 5000.0
    excess = q.density_of_states(st, box) - box / math.pi
    assert excess == pytest.approx(st.dtheta_dq / math.pi, rel=1e-12)


def test_quadrature_methods_agree():
    for v0 in (0.5, 1.0, 5.0):
        spec = q.DeltaWell(v0=v0)
        adaptive = q.continuum_sum(spec, method="adaptive")
        grid = q.continuum_sum(spec, method="grid", grid_points=10000)
        assert abs(adaptive.value - grid.value) < 1e-8
        assert adaptive.quadrature_error < 1e-8


def test_channel_sum_finite_and_negative_for_all_depths():
    for v0 in np.geomspace(0.1, 10.0, 12):
        s = q.continuum_sum(q.DeltaWell(v0=float(v0)))
        assert math.isfinite(s.value)
        assert s.value < 0.0
        cir = q.u_cir_with_continuum(q.DeltaWell(v0=float(v0)))
        assert math.isfinite(cir.u_cir)
        assert cir.u_cir < 0.0


def test_cir_decreases_with_well_depth():
    v0s = np.geomspace(0.1, 10.0, 12)
    cirs = [q.u_cir_with_continuum(q.DeltaWell(v0=float(v))).u_cir
            for v in v0s]
    assert all(b < a for a, b in zip(cirs, cirs[1:]))


def test_cir_frozen_value():
    cir = q.u_cir_with_continuum(q.DeltaWell(v0=1.0))
    assert cir.u_cir == pytest.approx(-5.45116707558226, rel=1e-10)


def test_tabulated_asymptote_reproduces_delta_well():
    # a single-site defect described as a tabulated potential with a
    # constant asymptote is the same physics as the closed-form well
    tab = q.Tabulated.from_mapping({0: 0.0}, 1.0)
    for qq in (0.4, 1.1, 2.3):
        st_t = q.scattering_state(tab, qq)
        st_d = q.scattering_state(q.DeltaWell(v0=1.0), qq)
        assert st_t.theta == pytest.approx(st_d.theta, abs=1e-10)
        assert st_t.phi0 == pytest.approx(st_d.phi0, abs=1e-10)
    s_t = q.continuum_sum(tab)
    s_d = q.continuum_sum(q.DeltaWell(v0=1.0))
    assert s_t.value == pytest.approx(s_d.value, rel=1e-8)
