"""Reference frames, dimensionless numbers and nonlinear distortion fields.

The admitted state domain is scaled to (u, v) in [0, 1]^2 through affine
maps anchored at the frame's reference values; the eight dimensionless
numbers condense a material + frame into transfer ratios, and distortion
fields expose how far the state-dependent coefficients stray from their
reference values over the domain.
"""
from dataclasses import dataclass, replace
from typing import Dict, Optional, Sequence, Union

import numpy as np

from hygroscale.thermo import (
    DEFAULT_CONSTANTS,
    CoefficientSet,
    ThermoState,
    coefficients,
    saturation_pressure,
)


@dataclass(frozen=True)
class SurfaceCoefficients:
    hq: float  # surface heat exchange, W m^{-2} K^{-1}
    hm: float  # surface moisture exchange, s m^{-1}


# standard exchange coefficients for the two sides of an envelope
OUTSIDE_SURFACE = SurfaceCoefficients(hq=15.0, hm=1e-7)
INSIDE_SURFACE = SurfaceCoefficients(hq=5.0, hm=5e-9)


@dataclass(frozen=True)
class ReferenceFrame:
    """All reference scales of the dimensionless representation.

    Temperature and vapor pressure map to v = (T - Tref)/dT and
    u = (P1 - P1ref)/dP.  The default window spans 278.15 K to 308.15 K
    and relative humidity 0.05 (cold end) to 0.90 (warm end), which puts
    both u and v in [0, 1].  The evaluation state (eval_T, eval_P1) is
    where reference coefficients are taken; its relative humidity is 0.5.
    """

    Lref: float              # m
    tref: float              # s
    hq: float                # W m^{-2} K^{-1}
    hm: float                # s m^{-1}
    Tref: float = 278.15     # K
    dT: float = 30.0         # K
    P1ref: float = 43.572    # Pa
    dP: float = 5021.5       # Pa
    eval_T: float = 293.15   # K
    eval_P1: float = 1166.9  # Pa

    def validate(self):
        for name in ("Lref", "tref", "hq", "hm", "dT", "dP"):
            if not getattr(self, name) > 0:
                raise ValueError(f"frame field {name} must be strictly positive")

    @property
    def eval_state(self) -> ThermoState:
        return ThermoState(self.eval_T, self.eval_P1)


def default_frame(Lref: float, tref: float, side: str = "outside",
                  **overrides) -> ReferenceFrame:
    """Build a frame with the standard window and a named surface set."""
    try:
        surface = {"outside": OUTSIDE_SURFACE, "inside": INSIDE_SURFACE}[side]
    except KeyError:
        raise ValueError(f"side must be 'outside' or 'inside', got {side!r}") from None
    params = {"hq": surface.hq, "hm": surface.hm}
    params.update(overrides)
    frame = ReferenceFrame(Lref=Lref, tref=tref, **params)
    frame.validate()
    return frame


def scale_fields(T, P1, frame: ReferenceFrame):
    """Map dimensional (T, P1) to dimensionless (u, v)."""
    u = (np.asarray(P1, dtype=float) - frame.P1ref) / frame.dP
    v = (np.asarray(T, dtype=float) - frame.Tref) / frame.dT
    if np.ndim(u) == 0:
        return float(u), float(v)
    return u, v


def unscale_fields(u, v, frame: ReferenceFrame):
    """Map dimensionless (u, v) back to dimensional (T, P1)."""
    P1 = frame.P1ref + np.asarray(u, dtype=float) * frame.dP
    T = frame.Tref + np.asarray(v, dtype=float) * frame.dT
    if np.ndim(T) == 0:
        return float(T), float(P1)
    return T, P1


@dataclass(frozen=True)
class DimensionlessNumbers:
    """The eight numbers of one material + frame.

    fo_m, fo_q are the mass and heat Fourier numbers; delta, gamma, eta
    the coupling numbers (delta signed, negative below saturation); bi_q,
    bi_m, bi_qm the Biot numbers of the surface exchange.
    """

    fo_m: float
    fo_q: float
    delta: float
    gamma: float
    eta: float
    bi_q: float
    bi_m: float
    bi_qm: float

    @property
    def abs_delta(self) -> float:
        return abs(self.delta)

    @property
    def delta_sign(self) -> int:
        return -1 if self.delta < 0 else 1

    def as_dict(self) -> Dict[str, float]:
        return {"fo_m": self.fo_m, "fo_q": self.fo_q, "delta": self.delta,
                "gamma": self.gamma, "eta": self.eta, "bi_q": self.bi_q,
                "bi_m": self.bi_m, "bi_qm": self.bi_qm}


def reference_coefficients(mat, frame: ReferenceFrame,
                           constants=DEFAULT_CONSTANTS) -> CoefficientSet:
    """Coefficients at the frame's evaluation state.

    The latent heat entry is pinned to r12_0 rather than r12(eval_T): the
    reference latent heat is the constant that also enters gamma, so the
    distortion field r12* equals r12(T)/r12_0.
    """
    c = coefficients(frame.eval_state, mat, constants)
    return replace(c, r12=constants.r12_0)


def numbers(mat, frame: ReferenceFrame,
            constants=DEFAULT_CONSTANTS) -> DimensionlessNumbers:
    """Compute the eight dimensionless numbers with reference coefficients."""
    frame.validate()
    c = reference_coefficients(mat, frame, constants)
    L2 = frame.Lref * frame.Lref
    return DimensionlessNumbers(
        fo_m=c.km * frame.tref / (c.cm * L2),
        fo_q=c.kq * frame.tref / (c.cq * L2),
        delta=c.kmq * frame.dT / (c.km * frame.dP),
        gamma=c.kqm * frame.dP * c.r12 / (c.kq * frame.dT),
        eta=c.cmq * frame.dT / (c.cm * frame.dP),
        bi_q=frame.hq * frame.Lref / c.kq,
        bi_m=frame.hm * frame.Lref / c.km,
        bi_qm=frame.hm * frame.Lref / c.kqm,
    )


# fields exported per distortion node; kqm and r12 always appear as a product
# in the heat equation so they are exported as one
DISTORTION_FIELDS = ("cm", "cq", "cmq", "km", "kq", "kmq", "kqm_r12")


@dataclass
class DistortionField:
    """Starred (state-normalized) coefficients over a (u, v) grid.

    fields[name] has shape (len(v), len(u)); nodes whose state leaves the
    sorption domain (phi >= 1) are masked out with in_domain False and NaN
    values, not treated as errors.
    """

    u: np.ndarray
    v: np.ndarray
    fields: Dict[str, np.ndarray]
    in_domain: np.ndarray

    @property
    def n_out_of_domain(self) -> int:
        return int((~self.in_domain).sum())


GridSpec = Union[int, Sequence[np.ndarray]]


def distortion(mat, frame: ReferenceFrame, grid: GridSpec = 101,
               constants=DEFAULT_CONSTANTS) -> DistortionField:
    """Evaluate starred coefficients over the (u, v) unit square.

    Parameters
    ----------
    grid : int or (u_nodes, v_nodes)
        Number of nodes per axis over [0, 1], or explicit node vectors.

    Returns
    -------
    DistortionField
        By construction every field equals 1 at a node mapping exactly to
        the frame's evaluation state.
    """
    if isinstance(grid, int):
        if grid < 2:
            raise ValueError("grid resolution must be >= 2 per axis")
        u_nodes = np.linspace(0.0, 1.0, grid)
        v_nodes = np.linspace(0.0, 1.0, grid)
    else:
        u_nodes = np.asarray(grid[0], dtype=float)
        v_nodes = np.asarray(grid[1], dtype=float)

    ref = reference_coefficients(mat, frame, constants)
    uu, vv = np.meshgrid(u_nodes, v_nodes)
    T, P1 = unscale_fields(uu, vv, frame)
    phi = P1 / saturation_pressure(T, constants)
    in_domain = (phi > 0.0) & (phi < 1.0)

    fields = {name: np.full(uu.shape, np.nan) for name in DISTORTION_FIELDS}
    if in_domain.any():
        c = coefficients(ThermoState(T[in_domain], P1[in_domain]), mat, constants)
        fields["cm"][in_domain] = c.cm / ref.cm
        fields["cq"][in_domain] = c.cq / ref.cq
        fields["cmq"][in_domain] = c.cmq / ref.cmq
        fields["km"][in_domain] = c.km / ref.km
        fields["kq"][in_domain] = c.kq / ref.kq
        fields["kmq"][in_domain] = c.kmq / ref.kmq
        fields["kqm_r12"][in_domain] = (c.kqm * c.r12) / (ref.kqm * ref.r12)
    return DistortionField(u=u_nodes, v=v_nodes, fields=fields, in_domain=in_domain)
