"""Constitutive laws against frozen high-precision references.

The reference numbers below were computed once with a 50-digit
arbitrary-precision evaluation of the same closed forms and are frozen
here; the library must reproduce them to double-precision accuracy.
"""
import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hygroscale.thermo import (
    DEFAULT_CONSTANTS,
    PhysicalConstants,
    ThermoState,
    capillary_pressure,
    coefficients,
    latent_heat,
    liquid_permeability,
    liquid_transport,
    load_constants,
    relative_humidity,
    saturation_pressure,
    sorption,
    sorption_slope,
    vapor_permeability,
)

EVAL = ThermoState(293.15, 1166.9)

PSAT_REF = {
    278.15: 871.44988432506,
    293.15: 2333.83429054384,
    303.15: 4240.14724101229,
    308.15: 5627.83694962447,
}

# eight-coefficient sets at the evaluation state, per material name
COEFF_REF = {
    "Wood Fiber 1": dict(cm=0.00685833061195488, cq=326396.308479436,
                         cmq=0.494724547007956, km=6.03753869468452e-11,
                         kq=0.04, kqm=6.03752404787561e-11,
                         kmq=-1.09695817457115e-14, r12=2453800.0),
    "Concrete": dict(cm=0.0432906793059662, cq=1910545.49745932,
                     cmq=3.12276600838964, km=6.39787941500367e-12,
                     kq=1.70234628882694, kqm=2.62155649447231e-12,
                     kmq=-2.82823946429983e-10, r12=2453800.0),
    "Solid Brick": dict(cm=0.000240975489297902, cq=1731433.1827299,
                        cmq=0.0173827271574101, km=1.31414618205021e-12,
                        kq=0.832219987605195, kqm=1.25307102880437e-12,
                        kmq=-4.57416281216021e-12, r12=2453800.0),
    "Extruded Brick": dict(cm=0.00399679392975973, cq=1420891.71355859,
                           cmq=0.288308070616754, km=2.41735764974984e-11,
                           kq=0.6, kqm=2.09724519557785e-11,
                           kmq=-2.39745036363498e-10, r12=2453800.0),
}


def test_saturation_pressure_reference_values():
    for T, want in PSAT_REF.items():
        assert saturation_pressure(T) == pytest.approx(want, rel=1e-12)
    # the fit passes through its scale value where (T - Ta)/Tb = 1
    assert saturation_pressure(280.1) == pytest.approx(997.3, rel=1e-12)


def test_saturation_pressure_is_increasing():
    T = np.linspace(263.15, 323.15, 200)
    assert np.all(np.diff(saturation_pressure(T)) > 0)


def test_saturation_pressure_rejects_low_temperature():
    with pytest.raises(ValueError, match="159.5"):
        saturation_pressure(150.0)
    with pytest.raises(ValueError):
        saturation_pressure(np.array([293.15, 100.0]))


def test_latent_heat_values_and_slope():
    assert latent_heat(273.15) == 2.5e6
    assert latent_heat(293.15) == pytest.approx(2453800.0, rel=1e-13)
    assert latent_heat(303.15) == pytest.approx(2430700.0, rel=1e-13)
    # linear with slope c1 - c2 = -2310 J/(kg K)
    assert latent_heat(300.0) - latent_heat(299.0) == pytest.approx(-2310.0)


def test_capillary_pressure():
    assert capillary_pressure(293.15, 0.5) == pytest.approx(
        -93856276.7336922, rel=1e-12)
    assert capillary_pressure(293.15, 1.0) == 0.0
    assert capillary_pressure(283.15, 0.3) < 0.0
    with pytest.raises(ValueError):
        capillary_pressure(293.15, 0.0)
    with pytest.raises(ValueError):
        capillary_pressure(293.15, 1.2)


def test_relative_humidity_at_evaluation_state():
    assert relative_humidity(EVAL) == pytest.approx(0.499992653603562,
                                                    rel=1e-12)


def test_vapor_permeability(by_name):
    air = by_name("Concrete")
    # mu enters as a plain divisor
    unit_mu = vapor_permeability(293.15, air) * air.mu
    assert unit_mu == pytest.approx(1.99238293579895e-10, rel=1e-12)
    wf1 = by_name("Wood Fiber 1")
    assert vapor_permeability(293.15, wf1) == pytest.approx(
        6.03752404787561e-11, rel=1e-12)


def test_liquid_transport(by_name):
    concrete = by_name("Concrete")
    assert liquid_transport(66.47, concrete) == pytest.approx(
        6.94496889725964e-10, rel=1e-12)
    at_free = liquid_transport(concrete.omegaf, concrete)
    assert at_free == pytest.approx(2.86337770061728e-8, rel=1e-12)
    assert at_free == pytest.approx(3.8 * (concrete.A / concrete.omegaf) ** 2,
                                    rel=1e-12)
    wf1 = by_name("Wood Fiber 1")
    assert liquid_transport(9.76, wf1) == pytest.approx(
        1.70022104429009e-13, rel=1e-12)
    # one decade gained per omegaf/3 of moisture content
    ratio = liquid_transport(50.0 + concrete.omegaf / 3.0, concrete) \
        / liquid_transport(50.0, concrete)
    assert ratio == pytest.approx(10.0, rel=1e-12)
    with pytest.raises(ValueError):
        liquid_transport(-1.0, concrete)


def test_liquid_permeability_at_evaluation_state(by_name):
    assert liquid_permeability(EVAL, by_name("Wood Fiber 1")) == pytest.approx(
        1.26223086171632e-21, rel=1e-12)
    assert liquid_permeability(EVAL, by_name("Concrete")) == pytest.approx(
        3.25435483222403e-17, rel=1e-12)


def test_sorption_curve_and_slope(db, by_name):
    concrete = by_name("Concrete")
    assert sorption(0.3, concrete) == pytest.approx(48.1719803317676,
                                                    rel=1e-12)
    assert sorption_slope(0.3, concrete) == pytest.approx(87.1683453622461,
                                                          rel=1e-12)
    for mat in db:
        # omega(0.5) = omega1 and slope(0.5) = 4 alpha1 omega1 exactly
        assert sorption(0.5, mat) == pytest.approx(mat.omega1, rel=1e-13)
        assert sorption_slope(0.5, mat) == pytest.approx(
            4.0 * mat.alpha1 * mat.omega1, rel=1e-13)


@pytest.mark.parametrize("value", [0.0, 1.0, -0.1, 1.5])
def test_sorption_domain_is_open(value, by_name):
    mat = by_name("Concrete")
    with pytest.raises(ValueError):
        sorption(value, mat)
    with pytest.raises(ValueError):
        sorption_slope(value, mat)


@settings(max_examples=120, deadline=None)
@given(phi=st.floats(0.03, 0.96),
       mat_id=st.sampled_from([1, 14, 20, 27, 36, 47]))
def test_sorption_slope_matches_finite_difference(phi, mat_id, db):
    mat = next(m for m in db if m.id == mat_id)
    h = 1e-6 * phi * (1.0 - phi)
    fd = (sorption(phi + h, mat) - sorption(phi - h, mat)) / (2.0 * h)
    assert sorption_slope(phi, mat) == pytest.approx(fd, rel=1e-6)


def test_coefficient_sets_at_evaluation_state(by_name):
    for name, want in COEFF_REF.items():
        got = coefficients(EVAL, by_name(name))
        for field, value in want.items():
            assert getattr(got, field) == pytest.approx(value, rel=5e-13), \
                f"{name}.{field}"


def test_coefficient_identities(by_name):
    c = DEFAULT_CONSTANTS
    for name in ("Concrete", "Wood Wool", "Granite"):
        mat = by_name(name)
        for state in (EVAL, ThermoState(283.15, 700.0)):
            ps = saturation_pressure(state.T)
            phi = state.P1 / ps
            w = sorption(phi, mat)
            co = coefficients(state, mat)
            assert co.kqm == pytest.approx(vapor_permeability(state.T, mat),
                                           rel=1e-13)
            assert co.kq == pytest.approx(mat.kq0 + mat.beta * w, rel=1e-13)
            assert co.cq == pytest.approx(mat.rho0 * mat.c0 + c.c2 * w,
                                          rel=1e-13)
            assert co.cm == pytest.approx(sorption_slope(phi, mat) / ps,
                                          rel=1e-13)
            assert co.cmq == pytest.approx(
                co.cm * state.P1 * co.r12 / (c.R1 * state.T ** 2), rel=1e-13)
            assert co.km >= co.kqm  # liquid path only adds conduction
            assert co.kmq < 0.0     # signed below saturation


def test_coefficients_accept_arrays(by_name):
    mat = by_name("Solid Brick")
    T = np.array([283.15, 293.15, 303.15])
    P1 = np.array([700.0, 1166.9, 2000.0])
    vec = coefficients(ThermoState(T, P1), mat)
    for i in range(T.size):
        one = coefficients(ThermoState(float(T[i]), float(P1[i])), mat)
        for field in ("cm", "cq", "cmq", "km", "kq", "kmq", "kqm", "r12"):
            assert getattr(vec, field)[i] == pytest.approx(
                getattr(one, field), rel=1e-14)


def test_coefficients_reject_out_of_domain(by_name):
    mat = by_name("Concrete")
    with pytest.raises(ValueError):
        coefficients(ThermoState(293.15, 2400.0), mat)  # phi > 1
    with pytest.raises(ValueError):
        coefficients(ThermoState(293.15, 0.0), mat)


def test_load_constants_overrides_and_validates(tmp_path):
    path = tmp_path / "constants.txt"
    path.write_text("# tweaked water constants\nR1 = 462.0\nrho2=998\n")
    c = load_constants(str(path))
    assert c.R1 == 462.0
    assert c.rho2 == 998.0
    assert c.Psat0 == DEFAULT_CONSTANTS.Psat0
    with pytest.raises(ValueError, match="unknown"):
        load_constants(io.StringIO("gravity = 9.81\n"))
    with pytest.raises(ValueError, match="not a number"):
        load_constants(io.StringIO("R1 = fast\n"))
    with pytest.raises(ValueError, match="name = value"):
        load_constants(io.StringIO("R1 461.9\n"))
    with pytest.raises(ValueError, match="positive"):
        load_constants(io.StringIO("R1 = -1\n"))


def test_constants_are_frozen_defaults():
    c = PhysicalConstants()
    assert (c.Psat0, c.Ta, c.Tb, c.alpha) == (997.3, 159.5, 120.6, 8.275)
    assert (c.r12_0, c.c1, c.c2, c.Tc) == (2.5e6, 1870.0, 4180.0, 273.15)
    assert (c.P3, c.rho2, c.R1) == (1e5, 1000.0, 461.9)
    c.validate()
    with pytest.raises(AttributeError):
        c.Psat0 = 1000.0  # frozen dataclass


def test_constants_flow_through(by_name):
    # doubling R1 must halve the Kelvin term, visible in capillary pressure
    c = PhysicalConstants(R1=2 * 461.9)
    assert capillary_pressure(293.15, 0.5, c) == pytest.approx(
        2 * capillary_pressure(293.15, 0.5), rel=1e-13)
