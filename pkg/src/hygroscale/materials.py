"""Material property database: loading, validation and property fitting.

The shipped dataset covers 49 porous building materials grouped in seven
categories.  Each row carries the nine properties required by the transfer
model plus a default reference thickness for the dimensionless analyses.
The dataset is immutable after load and safe to share between workers.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, List, NamedTuple, Sequence, Tuple, Union

import numpy as np

CATEGORIES = ("cement", "finishing", "insulation", "masonry", "mortar", "stone", "wood")

CSV_FIELDS = ("id", "name", "category", "rho0", "c0", "kq0", "beta", "mu",
              "alpha1", "omega1", "A", "omegaf", "Lref_default")


class DatabaseError(ValueError):
    """Malformed or physically invalid database content."""


class FitError(ValueError):
    """Insufficient or degenerate data for a property fit."""


@dataclass(frozen=True)
class MaterialProperties:
    """One material of the database.

    Attributes
    ----------
    rho0 : float
        Dry density, kg m^{-3}.
    c0 : float
        Dry specific heat, J kg^{-1} K^{-1}.
    kq0 : float
        Dry thermal conductivity, W m^{-1} K^{-1}.
    beta : float
        Slope of thermal conductivity with moisture content,
        W m^2 kg^{-1} K^{-1} (zero for many materials).
    mu : float
        Vapor resistance factor, dimensionless, >= 1.
    alpha1 : float
        Sorption curve exponent, dimensionless.
    omega1 : float
        Sorption curve scale, kg m^{-3}; equals the moisture content at
        relative humidity 0.5.
    A : float
        Water adsorption coefficient, kg m^{-2} s^{-1/2}.
    omegaf : float
        Free water content, kg m^{-3}.
    Lref_default : float
        Default reference thickness, m.
    """

    id: int
    name: str
    category: str
    rho0: float
    c0: float
    kq0: float
    beta: float
    mu: float
    alpha1: float
    omega1: float
    A: float
    omegaf: float
    Lref_default: float

    def validate(self) -> None:
        if self.category not in CATEGORIES:
            raise DatabaseError(
                f"material {self.id}: unknown category {self.category!r}")
        positive = ("rho0", "c0", "kq0", "mu", "alpha1", "omega1", "omegaf",
                    "Lref_default")
        for field in positive:
            if not getattr(self, field) > 0:
                raise DatabaseError(
                    f"material {self.id}: {field} must be strictly positive")
        if self.beta < 0:
            raise DatabaseError(f"material {self.id}: beta must be >= 0")
        if self.A < 0:
            raise DatabaseError(f"material {self.id}: A must be >= 0")
        if self.mu < 1:
            raise DatabaseError(f"material {self.id}: mu must be >= 1")


class SorptionPoint(NamedTuple):
    phi: float    # relative humidity, in (0, 1)
    omega: float  # moisture content, kg m^{-3}


class ConductivityPoint(NamedTuple):
    omega: float  # moisture content, kg m^{-3}
    kq: float     # thermal conductivity, W m^{-1} K^{-1}


Source = Union[str, Path, io.TextIOBase, None]


def _builtin_path() -> Path:
    return Path(str(resources.files("hygroscale") / "data" / "materials.csv"))


def load_database(source: Source = None) -> List[MaterialProperties]:
    """Load a material database from a CSV file.

    Parameters
    ----------
    source : path or open text file, optional
        Defaults to the packaged 49-material dataset.

    Returns
    -------
    list of MaterialProperties, in file order, all validated.
    """
    if source is None:
        source = _builtin_path()
    if hasattr(source, "read"):
        return _parse(source)
    with open(source, newline="", encoding="utf-8") as fh:
        return _parse(fh)


def _parse(fh) -> List[MaterialProperties]:
    reader = csv.DictReader(fh)
    if reader.fieldnames is not None and tuple(reader.fieldnames) != CSV_FIELDS:
        raise DatabaseError(
            f"unexpected header {reader.fieldnames}; want {list(CSV_FIELDS)}")
    materials = []
    for lineno, row in enumerate(reader, start=2):
        if any(row.get(k) is None for k in CSV_FIELDS):
            raise DatabaseError(f"row {lineno}: wrong number of columns")
        try:
            mid = int(row["id"])
        except ValueError:
            raise DatabaseError(f"row {lineno}, column 'id': not an integer") from None
        values = {}
        for col in CSV_FIELDS[3:]:
            try:
                values[col] = float(row[col])
            except ValueError:
                raise DatabaseError(
                    f"row {lineno}, column {col!r}: not a number") from None
        mat = MaterialProperties(id=mid, name=row["name"],
                                 category=row["category"], **values)
        mat.validate()
        materials.append(mat)
    return materials


def _fmt(x: float) -> str:
    # dataset values print exactly as tabulated: integers bare, no exponent
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def write_database(materials: Iterable[MaterialProperties], dest) -> None:
    """Write materials as CSV, the exact inverse of load_database."""
    own = not hasattr(dest, "write")
    fh = open(dest, "w", newline="", encoding="utf-8") if own else dest
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_FIELDS)
        for m in materials:
            writer.writerow([str(m.id), m.name, m.category] +
                            [_fmt(getattr(m, f)) for f in CSV_FIELDS[3:]])
    finally:
        if own:
            fh.close()


def find(materials: Sequence[MaterialProperties],
         key: Union[int, str]) -> MaterialProperties:
    """Resolve a material by id or by case-insensitive name."""
    if isinstance(key, str) and key.strip().isdigit():
        key = int(key)
    if isinstance(key, int):
        for m in materials:
            if m.id == key:
                return m
        raise LookupError(f"no material with id {key}")
    wanted = key.strip().lower()
    for m in materials:
        if m.name.lower() == wanted:
            return m
    raise LookupError(f"no material named {key!r}")


def fit_sorption(points: Sequence[Tuple[float, float]]) -> Tuple[float, float, float]:
    """Fit the sorption model omega = omega1 * (phi/(1-phi))**alpha1.

    The fit is ordinary least squares in the log-transformed form
    ln(omega) = ln(omega1) + alpha1 * ln(phi/(1-phi)), which linearizes the
    model and avoids an arbitrary weighting choice.

    Parameters
    ----------
    points : sequence of (phi, omega)
        At least two points with distinct phi in (0, 1) and omega > 0.

    Returns
    -------
    (alpha1, omega1, residual) with residual the root mean square misfit
    in ln(omega).
    """
    pts = [SorptionPoint(*p) for p in points]
    for p in pts:
        if not 0.0 < p.phi < 1.0:
            raise FitError(f"phi={p.phi} outside (0, 1)")
        if not p.omega > 0.0:
            raise FitError(f"omega={p.omega} must be positive")
    if len({p.phi for p in pts}) < 2:
        raise FitError("need at least 2 points with distinct phi")
    x = np.array([math.log(p.phi / (1.0 - p.phi)) for p in pts])
    y = np.array([math.log(p.omega) for p in pts])
    alpha1, intercept = np.polyfit(x, y, 1)
    if alpha1 <= 0.0:
        raise FitError("fitted exponent is not positive; data is not sorption-like")
    omega1 = math.exp(intercept)
    residual = math.sqrt(np.mean((y - (intercept + alpha1 * x)) ** 2))
    return float(alpha1), float(omega1), float(residual)


def fit_conductivity(points: Sequence[Tuple[float, float]]) -> Tuple[float, float, float]:
    """Fit the moisture-dependent conductivity line kq = kq0 + beta * omega.

    The slope is clipped at zero when the unconstrained least squares slope
    is negative (dry conductivity tables legitimately contain beta = 0).

    Returns
    -------
    (kq0, beta, residual) with residual the root mean square misfit in kq.
    """
    pts = [ConductivityPoint(*p) for p in points]
    for p in pts:
        if not p.kq > 0.0:
            raise FitError(f"kq={p.kq} must be positive")
    if len({p.omega for p in pts}) < 2:
        raise FitError("need at least 2 points with distinct omega")
    x = np.array([p.omega for p in pts])
    y = np.array([p.kq for p in pts])
    beta, kq0 = np.polyfit(x, y, 1)
    if beta < 0.0:
        beta = 0.0
        kq0 = float(np.mean(y))
    if kq0 <= 0.0:
        raise FitError("fitted dry conductivity is not positive")
    residual = math.sqrt(np.mean((y - (kq0 + beta * x)) ** 2))
    return float(kq0), float(beta), float(residual)
