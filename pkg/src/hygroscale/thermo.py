"""Constitutive laws and coefficient maps of the coupled transfer model.

The model solves for temperature T and vapor pressure P1.  Every function
here is a pure map of a state (T, P1) and a material; all accept numpy
arrays in place of scalars and broadcast elementwise.

Note
----
The saturation pressure follows the Antoine-type power law
Psat = Psat0 * ((T - Ta)/Tb)**alpha, valid for T >= Ta.  Liquid water is
handled through the Kelvin equation and a capillary-transport coefficient
of exponential form, so the full liquid permeability stays smooth in
relative humidity on (0, 1).
"""
from dataclasses import dataclass, fields

import numpy as np


@dataclass(frozen=True)
class PhysicalConstants:
    """Physical constants of the transfer model.

    The defaults are the working values of the model; rho2 and R1 are the
    usual liquid water density and water vapor gas constant and may be
    overridden (see load_constants).
    """

    Psat0: float = 997.3    # Pa
    Ta: float = 159.5       # K
    Tb: float = 120.6       # K
    alpha: float = 8.275    # saturation pressure exponent
    r12_0: float = 2.5e6    # latent heat of vaporization at Tc, J kg^{-1}
    c1: float = 1870.0      # specific heat of water vapor, J kg^{-1} K^{-1}
    c2: float = 4180.0      # specific heat of liquid water, J kg^{-1} K^{-1}
    Tc: float = 273.15      # K
    P3: float = 1e5         # total pore air pressure, Pa
    rho2: float = 1000.0    # liquid water density, kg m^{-3}
    R1: float = 461.9       # water vapor gas constant, J kg^{-1} K^{-1}

    def validate(self):
        for f in fields(self):
            if not getattr(self, f.name) > 0:
                raise ValueError(f"constant {f.name} must be strictly positive")


DEFAULT_CONSTANTS = PhysicalConstants()


def load_constants(source) -> PhysicalConstants:
    """Read PhysicalConstants overrides from a ``name = value`` text file.

    Lines that are blank or start with ``#`` are ignored.  Unknown names
    raise ValueError.
    """
    known = {f.name for f in fields(PhysicalConstants)}
    overrides = {}
    own = not hasattr(source, "read")
    fh = open(source, encoding="utf-8") if own else source
    try:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"constants file line {lineno}: expected name = value")
            name, _, value = line.partition("=")
            name = name.strip()
            if name not in known:
                raise ValueError(f"constants file line {lineno}: unknown constant {name!r}")
            try:
                overrides[name] = float(value.strip())
            except ValueError:
                raise ValueError(
                    f"constants file line {lineno}: {value.strip()!r} is not a number"
                ) from None
    finally:
        if own:
            fh.close()
    constants = PhysicalConstants(**overrides)
    constants.validate()
    return constants


@dataclass(frozen=True)
class ThermoState:
    """An evaluation state: temperature T (K) and vapor pressure P1 (Pa)."""

    T: float
    P1: float


@dataclass(frozen=True)
class CoefficientSet:
    """The seven transfer/storage coefficients plus latent heat at a state.

    Attributes
    ----------
    cm : float
        Moisture storage, kg m^{-3} Pa^{-1}.
    cq : float
        Heat storage, J m^{-3} K^{-1}.
    cmq : float
        Temperature-rate coupling in the mass balance, kg m^{-3} K^{-1}.
    km : float
        Moisture conduction against the vapor pressure gradient, s.
    kq : float
        Thermal conductivity, W m^{-1} K^{-1}.
    kmq : float
        Moisture conduction against the temperature gradient,
        kg m^{-1} s^{-1} K^{-1}.  Negative below saturation; it is kept
        signed here, consumers report its magnitude where appropriate.
    kqm : float
        Latent conduction pairing, s (equals the vapor permeability).
    r12 : float
        Latent heat of vaporization, J kg^{-1}.
    """

    cm: float
    cq: float
    cmq: float
    km: float
    kq: float
    kmq: float
    kqm: float
    r12: float


def saturation_pressure(T, constants=DEFAULT_CONSTANTS):
    """Saturation vapor pressure, Pa.

    Strictly increasing in T; defined for T >= Ta.
    """
    T = np.asarray(T, dtype=float)
    if np.any(T < constants.Ta):
        raise ValueError(f"temperature below {constants.Ta} K, outside the "
                         "saturation pressure fit domain")
    out = constants.Psat0 * ((T - constants.Ta) / constants.Tb) ** constants.alpha
    return out if out.ndim else float(out)


def latent_heat(T, constants=DEFAULT_CONSTANTS):
    """Latent heat of vaporization, J kg^{-1}; decreasing in T since c1 < c2."""
    T = np.asarray(T, dtype=float)
    out = constants.r12_0 + (constants.c1 - constants.c2) * (T - constants.Tc)
    return out if out.ndim else float(out)


def capillary_pressure(T, phi, constants=DEFAULT_CONSTANTS):
    """Capillary pressure from the Kelvin equation, Pa.

    Nonpositive on phi in (0, 1]; zero exactly at saturation.
    """
    T = np.asarray(T, dtype=float)
    phi = np.asarray(phi, dtype=float)
    if np.any(phi <= 0.0):
        raise ValueError("relative humidity must be positive")
    if np.any(phi > 1.0):
        raise ValueError("relative humidity must not exceed 1")
    out = constants.rho2 * constants.R1 * T * np.log(phi)
    return out if out.ndim else float(out)


def relative_humidity(state: ThermoState, constants=DEFAULT_CONSTANTS):
    """phi = P1 / Psat(T)."""
    ps = saturation_pressure(state.T, constants)
    out = np.asarray(state.P1, dtype=float) / ps
    return out if np.ndim(out) else float(out)


def _check_phi_open(phi):
    if np.any(phi <= 0.0) or np.any(phi >= 1.0):
        raise ValueError("relative humidity must lie strictly inside (0, 1)")


def sorption(phi, mat):
    """Equilibrium moisture content omega(phi), kg m^{-3}.

    omega = omega1 * (phi/(1-phi))**alpha1, so omega(0.5) = omega1.
    """
    phi = np.asarray(phi, dtype=float)
    _check_phi_open(phi)
    out = mat.omega1 * (phi / (1.0 - phi)) ** mat.alpha1
    return out if out.ndim else float(out)


def sorption_slope(phi, mat):
    """d(omega)/d(phi) of the sorption curve, kg m^{-3}; positive on (0, 1)."""
    phi = np.asarray(phi, dtype=float)
    _check_phi_open(phi)
    out = mat.alpha1 * sorption(phi, mat) / ((1.0 - phi) * phi)
    return out if np.ndim(out) else float(out)


def vapor_permeability(T, mat, constants=DEFAULT_CONSTANTS):
    """Vapor permeability k1, s.

    k1 = 2e-7 * T**0.81 / (mu * P3): the permeability of still air at
    total pressure P3, reduced by the material's vapor resistance factor.
    """
    T = np.asarray(T, dtype=float)
    out = 2e-7 * T ** 0.81 / (mat.mu * constants.P3)
    return out if out.ndim else float(out)


def liquid_transport(omega, mat):
    """Liquid transport coefficient D2, m^2 s^{-1}.

    Exponential in the moisture content:
    D2 = 3.8 * (A/omegaf)**2 * 10**(3*(omega - omegaf)/omegaf),
    so D2 gains one decade for each omegaf/3 of moisture content and
    D2(omegaf) = 3.8 * (A/omegaf)**2.
    """
    omega = np.asarray(omega, dtype=float)
    if np.any(omega < 0.0):
        raise ValueError("moisture content must be >= 0")
    scale = 3.8 * (mat.A / mat.omegaf) ** 2
    out = scale * np.exp((3.0 / mat.omegaf) * np.log(10.0) * (omega - mat.omegaf))
    return out if out.ndim else float(out)


def liquid_permeability(state: ThermoState, mat, constants=DEFAULT_CONSTANTS):
    """Liquid permeability k2, s.

    Chains the Kelvin equation with the sorption curve:
    k2 = D2(omega(phi)) * phi / (rho2 R1 Psat(T)) * d(omega)/d(phi).
    """
    ps = saturation_pressure(state.T, constants)
    phi = np.asarray(state.P1, dtype=float) / ps
    _check_phi_open(phi)
    w = sorption(phi, mat)
    out = (liquid_transport(w, mat) * phi / (constants.rho2 * constants.R1 * ps)
           * sorption_slope(phi, mat))
    return out if np.ndim(out) else float(out)


def coefficients(state: ThermoState, mat, constants=DEFAULT_CONSTANTS) -> CoefficientSet:
    """Evaluate all seven coefficient maps of the governing equations.

    Parameters
    ----------
    state : ThermoState
        Temperature and vapor pressure; phi = P1/Psat(T) must lie in (0, 1).
    mat : MaterialProperties

    Returns
    -------
    CoefficientSet
        cq = rho0 c0 + c2 omega, cm = (d omega/d phi)/Psat,
        cmq = cm P1 r12 / (R1 T^2), km = k1 + k2 rho2 R1 T / P1,
        kq = kq0 + beta omega, kqm = k1,
        kmq = k2 (rho2 R1 ln phi - rho2 r12 / T).

    Note
    ----
    kmq combines the Kelvin-equation temperature sensitivity with the
    latent term; both parts are negative below saturation, so kmq < 0
    there.  The sign is preserved.
    """
    T = np.asarray(state.T, dtype=float)
    P1 = np.asarray(state.P1, dtype=float)
    ps = saturation_pressure(T, constants)
    phi = P1 / ps
    _check_phi_open(phi)
    w = sorption(phi, mat)
    slope = sorption_slope(phi, mat)
    r12 = latent_heat(T, constants)
    k1 = vapor_permeability(T, mat, constants)
    k2 = liquid_transport(w, mat) * phi / (constants.rho2 * constants.R1 * ps) * slope

    cm = slope / ps
    cq = mat.rho0 * mat.c0 + constants.c2 * w
    cmq = cm * P1 * r12 / (constants.R1 * T * T)
    km = k1 + k2 * constants.rho2 * constants.R1 * T / P1
    kq = mat.kq0 + mat.beta * w
    kmq = k2 * (constants.rho2 * constants.R1 * np.log(phi)
                - constants.rho2 * r12 / T)

    if np.ndim(cm) == 0:
        return CoefficientSet(cm=float(cm), cq=float(cq), cmq=float(cmq),
                              km=float(km), kq=float(kq), kmq=float(kmq),
                              kqm=float(k1), r12=float(r12))
    return CoefficientSet(cm=cm, cq=cq, cmq=cmq, km=km, kq=kq, kmq=kmq,
                          kqm=k1, r12=r12)
