"""Kinetic, geometric and dynamic similarity between material designs.

Two designs are similar in one transfer kind when the corresponding
dimensionless group matches.  Matching a single group leaves a one
parameter family of designs; the routines here solve for the length or
the time that closes the match, or rescale a whole design so that every
group is preserved at once.
"""
from dataclasses import dataclass, replace
from typing import Dict, Optional

from scipy.optimize import bisect

from hygroscale.dimensionless import (
    DimensionlessNumbers,
    ReferenceFrame,
    numbers,
    reference_coefficients,
)
from hygroscale.thermo import DEFAULT_CONSTANTS

# matchable transfer kinds and the dimensionless group each one preserves
KINDS = ("fo_m", "fo_q", "delta_fo_m", "gamma_fo_q")


def _rate_factor(mat, frame: ReferenceFrame, kind: str,
                 constants=DEFAULT_CONSTANTS) -> float:
    """Diffusivity-like factor of one group: group = factor * tref / Lref^2."""
    c = reference_coefficients(mat, frame, constants)
    a_m = c.km / c.cm
    a_q = c.kq / c.cq
    if kind == "fo_m":
        return a_m
    if kind == "fo_q":
        return a_q
    if kind == "delta_fo_m":
        # |delta| weighting; the sign is a property of the state, not the pace
        return abs(c.kmq * frame.dT / (c.km * frame.dP)) * a_m
    if kind == "gamma_fo_q":
        return (c.kqm * frame.dP * c.r12 / (c.kq * frame.dT)) * a_q
    raise ValueError(f"unknown similarity kind {kind!r}, expected one of {KINDS}")


def _group(num: DimensionlessNumbers, kind: str) -> float:
    if kind == "fo_m":
        return num.fo_m
    if kind == "fo_q":
        return num.fo_q
    if kind == "delta_fo_m":
        return num.abs_delta * num.fo_m
    if kind == "gamma_fo_q":
        return num.gamma * num.fo_q
    raise ValueError(f"unknown similarity kind {kind!r}, expected one of {KINDS}")


def equivalent_length(reference_mat, target_mat, frame: ReferenceFrame,
                      kind: str = "fo_m", constants=DEFAULT_CONSTANTS,
                      method: str = "direct") -> float:
    """Target thickness reproducing the reference design's group.

    The group scales as 1/Lref^2 at fixed time, so the direct solution is
    L_t = L_r * sqrt(f_t / f_r) with f the rate factor of the kind.  The
    "bisect" method instead brackets the root of group(L) - group_ref,
    kept as an independent cross-check of the closed form.
    """
    f_ref = _rate_factor(reference_mat, frame, kind, constants)
    f_tgt = _rate_factor(target_mat, frame, kind, constants)
    if f_ref <= 0 or f_tgt <= 0:
        raise ValueError(
            f"kind {kind!r} has a vanishing rate factor for this pair; "
            "no equivalent length exists")
    L_direct = frame.Lref * (f_tgt / f_ref) ** 0.5
    if method == "direct":
        return L_direct

    if method != "bisect":
        raise ValueError(f"method must be 'direct' or 'bisect', got {method!r}")
    target_group = _group(numbers(reference_mat, frame, constants), kind)

    def residual(L: float) -> float:
        num = numbers(target_mat, replace(frame, Lref=L), constants)
        return _group(num, kind) - target_group

    lo, hi = L_direct / 16.0, L_direct * 16.0
    return float(bisect(residual, lo, hi, xtol=1e-14 * L_direct))


def equivalent_time(reference_mat, target_mat, frame: ReferenceFrame,
                    kind: str = "fo_m", constants=DEFAULT_CONSTANTS) -> float:
    """Target duration reproducing the reference design's group.

    Groups are linear in time at fixed length: t_t = t_r * f_r / f_t.
    """
    f_ref = _rate_factor(reference_mat, frame, kind, constants)
    f_tgt = _rate_factor(target_mat, frame, kind, constants)
    if f_ref <= 0 or f_tgt <= 0:
        raise ValueError(
            f"kind {kind!r} has a vanishing rate factor for this pair; "
            "no equivalent time exists")
    return frame.tref * f_ref / f_tgt


@dataclass(frozen=True)
class Design:
    """A material in a frame, optionally carrying a forcing period."""

    material: "MaterialProperties"
    frame: ReferenceFrame
    period: Optional[float] = None  # s

    def numbers(self, constants=DEFAULT_CONSTANTS) -> DimensionlessNumbers:
        return numbers(self.material, self.frame, constants)


@dataclass(frozen=True)
class ScaledDesign:
    design: Design
    pi: float


def dynamic_scale(design: Design, pi: float) -> ScaledDesign:
    """Shrink (pi < 1) or grow a design preserving every dimensionless number.

    Same material, same state window: lengths scale by pi, every time
    (reference time and forcing period alike) by pi^2, and both surface
    exchange coefficients by 1/pi so the Biot numbers survive.
    """
    if not pi > 0:
        raise ValueError("scale factor pi must be strictly positive")
    f = design.frame
    scaled_frame = replace(f, Lref=f.Lref * pi, tref=f.tref * pi * pi,
                           hq=f.hq / pi, hm=f.hm / pi)
    period = None if design.period is None else design.period * pi * pi
    return ScaledDesign(
        design=Design(material=design.material, frame=scaled_frame, period=period),
        pi=pi)


def check_similitude(a: Design, b: Design, tol: float = 1e-9,
                     constants=DEFAULT_CONSTANTS) -> Dict[str, object]:
    """Compare all eight numbers of two designs.

    Returns a report with per-number relative differences and a boolean
    verdict at the given tolerance.
    """
    na = a.numbers(constants).as_dict()
    nb = b.numbers(constants).as_dict()
    diffs = {}
    for name, va in na.items():
        vb = nb[name]
        scale = max(abs(va), abs(vb), 1e-300)
        diffs[name] = abs(va - vb) / scale
    worst = max(diffs, key=diffs.get)
    return {
        "numbers_a": na,
        "numbers_b": nb,
        "relative_differences": diffs,
        "worst": worst,
        "worst_difference": diffs[worst],
        "similar": diffs[worst] <= tol,
        "tolerance": tol,
    }
