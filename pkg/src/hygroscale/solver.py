"""1D coupled heat and moisture solver in dimensionless form.

Solves, on chi in [0, 1] with tau the dimensionless time,

    cm* du/dtau - eta cmq* dv/dtau
        = Fo_m d/dchi (km* du/dchi + delta kmq* dv/dchi)
    cq* dv/dtau
        = Fo_q d/dchi (kq* dv/dchi) + Fo_q gamma r12* d/dchi (kqm* du/dchi)

with Robin exchange against periodic far-field (u_inf, v_inf) at chi = 0
and zero flux at chi = 1.  Starred coefficients are the state-dependent
distortions, evaluated at each node and refreshed by Picard iteration
inside an implicit Euler step.  Space is a vertex-centered finite-volume
grid (half cells at the faces, harmonic-mean face conduction), so the
scheme is conservative in the discrete sense.
"""
import math
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, TextIO, Tuple, Union

import numpy as np
from scipy.linalg import solve_banded

from hygroscale.dimensionless import (
    DimensionlessNumbers,
    ReferenceFrame,
    default_frame,
    numbers as design_numbers,
    reference_coefficients,
    unscale_fields,
)
from hygroscale.materials import MaterialProperties, find, load_database
from hygroscale.similarity import Design, dynamic_scale
from hygroscale.thermo import (
    DEFAULT_CONSTANTS,
    ThermoState,
    coefficients,
    saturation_pressure,
    sorption,
)

# relative-humidity window enforced at coefficient evaluation; states
# pushed outside by the iteration are pulled back and counted
PHI_FLOOR = 1e-6
PHI_CEIL = 1.0 - 1e-6


class SolverError(RuntimeError):
    """Time integration failure carrying the dimensionless time reached."""

    def __init__(self, message: str, tau_reached: float = 0.0, step: int = 0):
        super().__init__(f"{message} (tau = {tau_reached:.6g}, step {step})")
        self.tau_reached = tau_reached
        self.step = step


def parse_duration(text: str) -> float:
    """Duration literal to seconds; bare numbers are seconds.

    Accepted suffixes: s (seconds), h (hours), d (days).
    """
    text = text.strip()
    factor = 1.0
    if text and text[-1].isalpha():
        try:
            factor = {"s": 1.0, "h": 3600.0, "d": 86400.0}[text[-1]]
        except KeyError:
            raise ValueError(
                f"unknown duration suffix {text[-1]!r} in {text!r}; "
                "use s, h or d") from None
        text = text[:-1]
    try:
        value = float(text)
    except ValueError:
        raise ValueError(f"bad duration literal {text!r}") from None
    return value * factor


@dataclass(frozen=True)
class Forcing:
    """Sinusoidal far-field component: mean + amplitude*sin(2 pi tau/Gamma)."""

    mean: float
    amplitude: float = 0.0


@dataclass(frozen=True)
class SimulationConfig:
    design: Design
    n_points: int = 101
    tau_end: Optional[float] = None       # wins over periods when both given
    periods: Optional[float] = 10.0       # forcing periods to integrate
    u_far: Forcing = Forcing(0.22, 0.05)
    v_far: Forcing = Forcing(0.5, 0.35)
    u_init: Union[float, np.ndarray, None] = None  # default: u_far.mean
    v_init: Union[float, np.ndarray, None] = None
    dt_init: float = 1e-4
    dt_max: Optional[float] = None        # default period/48, or tau_end/100
    fixed_dt: Optional[float] = None      # disables growth and the defaults
    growth_factor: float = 1.2
    picard_tol: float = 1e-8
    picard_max_iter: int = 50
    picard_damping: float = 1.0
    max_halvings: int = 20
    numbers_override: Optional[DimensionlessNumbers] = None
    freeze_coefficients: bool = False
    probes: Tuple[float, ...] = (0.1, 0.5)
    store_every: int = 1

    def validate(self):
        if self.n_points < 3:
            raise ValueError("n_points must be at least 3")
        if self.design.period is not None and not self.design.period > 0:
            raise ValueError("forcing period must be strictly positive")
        for name in ("dt_init", "picard_tol", "growth_factor", "picard_damping"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")
        if self.picard_max_iter < 1 or self.max_halvings < 0:
            raise ValueError("iteration limits out of range")
        if self.store_every < 1:
            raise ValueError("store_every must be at least 1")
        periodic = self.u_far.amplitude != 0.0 or self.v_far.amplitude != 0.0
        if periodic and self.design.period is None:
            raise ValueError("periodic forcing needs a design period")
        if self.tau_end is None:
            if self.periods is None or self.design.period is None:
                raise ValueError("either tau_end or periods + period is required")
        elif not self.tau_end > 0:
            raise ValueError("tau_end must be strictly positive")

    @property
    def gamma_period(self) -> Optional[float]:
        """Forcing period over the reference time, None when aperiodic."""
        if self.design.period is None:
            return None
        return self.design.period / self.design.frame.tref

    def resolved_tau_end(self) -> float:
        if self.tau_end is not None:
            return self.tau_end
        return self.periods * self.gamma_period

    def resolved_dt_max(self) -> float:
        if self.fixed_dt is not None:
            return self.fixed_dt
        if self.dt_max is not None:
            return self.dt_max
        if self.gamma_period is not None:
            return self.gamma_period / 48.0
        return self.resolved_tau_end() / 100.0


@dataclass
class FieldSolution:
    """Stored time series of one run; arrays are (n_stored, n_points)."""

    chi: np.ndarray
    tau: np.ndarray
    u: np.ndarray
    v: np.ndarray
    T: np.ndarray
    P1: np.ndarray
    phi: np.ndarray       # clamped into the admitted window
    omega: np.ndarray
    energy: np.ndarray    # spatial mean volumetric internal energy, J m^-3
    moisture: np.ndarray  # spatial mean moisture content, kg m^-3
    mass_balance: np.ndarray  # per accepted step, storage minus boundary flux
    clamp_events: int
    steps: int
    picard_iters_total: int
    halvings_total: int
    numbers: DimensionlessNumbers
    config: SimulationConfig


def _forcing_values(cfg: SimulationConfig, tau: float) -> Tuple[float, float]:
    gp = cfg.gamma_period
    if gp is None:
        return cfg.u_far.mean, cfg.v_far.mean
    s = math.sin(2.0 * math.pi * tau / gp)
    return cfg.u_far.mean + cfg.u_far.amplitude * s, \
        cfg.v_far.mean + cfg.v_far.amplitude * s


def _initial_profile(value, default: float, n: int, name: str) -> np.ndarray:
    if value is None:
        return np.full(n, default)
    arr = np.asarray(value, dtype=float)
    if arr.ndim == 0:
        return np.full(n, float(arr))
    if arr.shape != (n,):
        raise ValueError(f"{name} must be scalar or length n_points ({n})")
    return arr.copy()


def _harmonic(left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """Face value between adjacent nodes; falls back to the arithmetic
    mean when the signs disagree (harmonic mean is undefined there)."""
    s = left + right
    p = left * right
    safe = (p > 0.0) & (np.abs(s) > 0.0)
    out = 0.5 * s
    np.divide(2.0 * p, s, out=out, where=safe)
    return out


class _Stepper:
    """Owns grid, reference coefficients and the per-step banded solve."""

    def __init__(self, cfg: SimulationConfig, constants=DEFAULT_CONSTANTS):
        cfg.validate()
        self.cfg = cfg
        self.constants = constants
        self.mat = cfg.design.material
        self.frame = cfg.design.frame
        n = cfg.n_points
        self.n = n
        self.h = 1.0 / (n - 1)
        self.chi = np.linspace(0.0, 1.0, n)
        self.nums = cfg.numbers_override if cfg.numbers_override is not None \
            else design_numbers(self.mat, self.frame, constants)
        self.ref = reference_coefficients(self.mat, self.frame, constants)
        # cell widths in units of h; the face cells are half cells
        self.weights = np.ones(n)
        self.weights[0] = self.weights[-1] = 0.5
        self.clamp_events = 0
        self.tau = 0.0
        self.step = 0

    def starred(self, u: np.ndarray, v: np.ndarray, count_clamps: bool = False
                ) -> Dict[str, np.ndarray]:
        n = self.n
        if self.cfg.freeze_coefficients:
            one = np.ones(n)
            return {"cm": one, "cq": one, "cmq": one, "km": one, "kq": one,
                    "kmq": one, "kqm": one, "r12": one}
        T, P1 = unscale_fields(u, v, self.frame)
        if not np.all(T > self.constants.Ta):
            raise SolverError("temperature left the saturation-law domain",
                              self.tau, self.step)
        psat = saturation_pressure(T, self.constants)
        phi = P1 / psat
        clipped = np.clip(phi, PHI_FLOOR, PHI_CEIL)
        if count_clamps:
            self.clamp_events += int(np.count_nonzero(clipped != phi))
        c = coefficients(ThermoState(T, clipped * psat), self.mat, self.constants)
        r = self.ref
        return {"cm": c.cm / r.cm, "cq": c.cq / r.cq, "cmq": c.cmq / r.cmq,
                "km": c.km / r.km, "kq": c.kq / r.kq, "kmq": c.kmq / r.kmq,
                "kqm": c.kqm / r.kqm, "r12": c.r12 / r.r12}

    def assemble(self, co: Dict[str, np.ndarray], u_n: np.ndarray,
                 v_n: np.ndarray, dt: float, u_inf: float, v_inf: float):
        n, h = self.n, self.h
        nums = self.nums
        r_m = nums.fo_m * dt / (h * h)
        r_q = nums.fo_q * dt / (h * h)
        s_m = nums.fo_m * dt / h
        s_q = nums.fo_q * dt / h
        delta, eta, gamma = nums.delta, nums.eta, nums.gamma

        a = _harmonic(co["km"][:-1], co["km"][1:])
        b = _harmonic(co["kmq"][:-1], co["kmq"][1:])
        cq_face = _harmonic(co["kq"][:-1], co["kq"][1:])
        d = _harmonic(co["kqm"][:-1], co["kqm"][1:])
        g = gamma * co["r12"]  # nodal latent factor outside the divergence

        m = 2 * n
        ab = np.zeros((7, m))
        rhs = np.empty(m)

        i = np.arange(1, n - 1)
        aL, aR = a[i - 1], a[i]
        bL, bR = b[i - 1], b[i]
        cL, cR = cq_face[i - 1], cq_face[i]
        dL, dR = d[i - 1], d[i]
        gi = g[i]
        cm_i, cq_i, cmq_i = co["cm"][i], co["cq"][i], co["cmq"][i]

        # moisture rows (even), ab[3 + row - col, col]
        ab[5, 2 * i - 2] = -r_m * aL
        ab[4, 2 * i - 1] = -r_m * delta * bL
        ab[3, 2 * i] = cm_i + r_m * (aR + aL)
        ab[2, 2 * i + 1] = -eta * cmq_i + r_m * delta * (bR + bL)
        ab[1, 2 * i + 2] = -r_m * aR
        ab[0, 2 * i + 3] = -r_m * delta * bR
        rhs[2 * i] = cm_i * u_n[i] - eta * cmq_i * v_n[i]

        # heat rows (odd)
        ab[6, 2 * i - 2] = -r_q * gi * dL
        ab[5, 2 * i - 1] = -r_q * cL
        ab[4, 2 * i] = r_q * gi * (dR + dL)
        ab[3, 2 * i + 1] = cq_i + r_q * (cR + cL)
        ab[2, 2 * i + 2] = -r_q * gi * dR
        ab[1, 2 * i + 3] = -r_q * cR
        rhs[2 * i + 1] = cq_i * v_n[i]

        # exposed face, half cell with Robin exchange folded into the balance
        g0 = g[0]
        ab[3, 0] = 0.5 * co["cm"][0] + r_m * a[0] + s_m * nums.bi_m
        ab[2, 1] = -0.5 * eta * co["cmq"][0] + r_m * delta * b[0]
        ab[1, 2] = -r_m * a[0]
        ab[0, 3] = -r_m * delta * b[0]
        rhs[0] = 0.5 * co["cm"][0] * u_n[0] - 0.5 * eta * co["cmq"][0] * v_n[0] \
            + s_m * nums.bi_m * u_inf
        ab[4, 0] = r_q * g0 * d[0] + s_q * g0 * nums.bi_qm
        ab[3, 1] = 0.5 * co["cq"][0] + r_q * cq_face[0] + s_q * nums.bi_q
        ab[2, 2] = -r_q * g0 * d[0]
        ab[1, 3] = -r_q * cq_face[0]
        rhs[1] = 0.5 * co["cq"][0] * v_n[0] + s_q * nums.bi_q * v_inf \
            + s_q * g0 * nums.bi_qm * u_inf

        # sealed face, half cell with zero flux
        last = n - 1
        gl = g[last]
        ab[5, m - 4] = -r_m * a[last - 1]
        ab[4, m - 3] = -r_m * delta * b[last - 1]
        ab[3, m - 2] = 0.5 * co["cm"][last] + r_m * a[last - 1]
        ab[2, m - 1] = -0.5 * eta * co["cmq"][last] + r_m * delta * b[last - 1]
        rhs[m - 2] = 0.5 * co["cm"][last] * u_n[last] \
            - 0.5 * eta * co["cmq"][last] * v_n[last]
        ab[6, m - 4] = -r_q * gl * d[last - 1]
        ab[5, m - 3] = -r_q * cq_face[last - 1]
        ab[4, m - 2] = r_q * gl * d[last - 1]
        ab[3, m - 1] = 0.5 * co["cq"][last] + r_q * cq_face[last - 1]
        rhs[m - 1] = 0.5 * co["cq"][last] * v_n[last]
        return ab, rhs

    def try_step(self, u_n: np.ndarray, v_n: np.ndarray, dt: float,
                 tau_new: float):
        """One implicit step with Picard refresh of the coefficients.

        Returns (u, v, iterations, final coefficient set) or None when the
        iteration does not reach tolerance.
        """
        cfg = self.cfg
        u_inf, v_inf = _forcing_values(cfg, tau_new)
        u, v = u_n.copy(), v_n.copy()
        lam = cfg.picard_damping
        for it in range(1, cfg.picard_max_iter + 1):
            co = self.starred(u, v)
            ab, rhs = self.assemble(co, u_n, v_n, dt, u_inf, v_inf)
            x = solve_banded((3, 3), ab, rhs)
            if not np.all(np.isfinite(x)):
                raise SolverError("non-finite state in the linear solve",
                                  self.tau, self.step)
            u_new = lam * x[0::2] + (1.0 - lam) * u
            v_new = lam * x[1::2] + (1.0 - lam) * v
            err = max(np.max(np.abs(u_new - u)), np.max(np.abs(v_new - v)))
            u, v = u_new, v_new
            if not math.isfinite(err):
                return None
            if err < cfg.picard_tol:
                return u, v, it, co, u_inf
        return None

    def mass_residual(self, co, u_n, v_n, u, v, dt: float, u_inf: float) -> float:
        """Discrete moisture balance of the accepted step.

        Weighted storage increment plus the exposed-face exchange; zero to
        solver roundoff by construction of the flux-form scheme.
        """
        nums = self.nums
        storage = np.sum(self.weights * (co["cm"] * (u - u_n)
                                         - nums.eta * co["cmq"] * (v - v_n)))
        surface = nums.fo_m * dt / self.h * nums.bi_m * (u[0] - u_inf)
        return float(storage + surface)

    def run(self) -> FieldSolution:
        cfg = self.cfg
        tau_end = cfg.resolved_tau_end()
        dt_max = cfg.resolved_dt_max()
        dt = cfg.fixed_dt if cfg.fixed_dt is not None else min(cfg.dt_init, dt_max)

        u = _initial_profile(cfg.u_init, cfg.u_far.mean, self.n, "u_init")
        v = _initial_profile(cfg.v_init, cfg.v_far.mean, self.n, "v_init")
        self.tau = 0.0
        self.step = 0

        taus = [0.0]
        us = [u.copy()]
        vs = [v.copy()]
        residuals: List[float] = []
        iters_total = 0
        halvings_total = 0

        while self.tau < tau_end * (1.0 - 1e-12):
            dt_step = min(dt, dt_max, tau_end - self.tau)
            halvings = 0
            while True:
                result = self.try_step(u, v, dt_step, self.tau + dt_step)
                if result is not None:
                    break
                halvings += 1
                halvings_total += 1
                if halvings > cfg.max_halvings:
                    raise SolverError(
                        "Picard iteration failed to converge after "
                        f"{cfg.max_halvings} step halvings", self.tau, self.step)
                dt_step *= 0.5
            u_new, v_new, iters, co, u_inf = result
            # clamp census on the accepted state, once per step
            if not cfg.freeze_coefficients:
                self.starred(u_new, v_new, count_clamps=True)
            residuals.append(self.mass_residual(co, u, v, u_new, v_new,
                                                dt_step, u_inf))
            u, v = u_new, v_new
            self.tau += dt_step
            self.step += 1
            iters_total += iters
            if cfg.fixed_dt is None:
                dt = min(dt_step * cfg.growth_factor, dt_max)
            if self.step % cfg.store_every == 0 or \
                    self.tau >= tau_end * (1.0 - 1e-12):
                taus.append(self.tau)
                us.append(u.copy())
                vs.append(v.copy())

        return self._package(np.array(taus), np.array(us), np.array(vs),
                             np.array(residuals), iters_total, halvings_total)

    def _package(self, tau, u, v, residuals, iters_total, halvings_total
                 ) -> FieldSolution:
        T, P1 = unscale_fields(u, v, self.frame)
        psat = saturation_pressure(T, self.constants)
        phi = np.clip(P1 / psat, PHI_FLOOR, PHI_CEIL)
        omega = sorption(phi, self.mat)
        c = self.constants
        energy_field = (self.mat.rho0 * self.mat.c0 + c.c2 * omega) * (T - c.Tc)
        wsum = self.weights.sum()
        energy = (energy_field * self.weights).sum(axis=1) / wsum
        moisture = (omega * self.weights).sum(axis=1) / wsum
        return FieldSolution(
            chi=self.chi, tau=tau, u=u, v=v, T=T, P1=P1, phi=phi, omega=omega,
            energy=energy, moisture=moisture, mass_balance=residuals,
            clamp_events=self.clamp_events, steps=self.step,
            picard_iters_total=iters_total, halvings_total=halvings_total,
            numbers=self.nums, config=self.cfg)


def simulate(cfg: SimulationConfig, constants=DEFAULT_CONSTANTS) -> FieldSolution:
    """Run one transient simulation; see the module docstring for the model."""
    return _Stepper(cfg, constants).run()


def derived_outputs(sol: FieldSolution, mat: Optional[MaterialProperties] = None,
                    frame: Optional[ReferenceFrame] = None,
                    constants=DEFAULT_CONSTANTS):
    """Recompute (energy, moisture) series from the stored fields.

    Provided so the thermodynamic series can be rebuilt for a different
    material/frame interpretation of the same dimensionless fields; with
    the defaults it reproduces sol.energy and sol.moisture.
    """
    if mat is None:
        mat = sol.config.design.material
    if frame is None:
        frame = sol.config.design.frame
    T, P1 = unscale_fields(sol.u, sol.v, frame)
    phi = np.clip(P1 / saturation_pressure(T, constants), PHI_FLOOR, PHI_CEIL)
    omega = sorption(phi, mat)
    weights = np.ones(sol.chi.size)
    weights[0] = weights[-1] = 0.5
    wsum = weights.sum()
    energy_field = (mat.rho0 * mat.c0 + constants.c2 * omega) * (T - constants.Tc)
    return (energy_field * weights).sum(axis=1) / wsum, \
        (omega * weights).sum(axis=1) / wsum


@dataclass(frozen=True)
class DiscreteProblem:
    """Everything that determines the dimensionless discrete system.

    Two configs with equivalent DiscreteProblems produce the same discrete
    solution up to floating-point roundoff; dynamic scaling preserves this
    object exactly, which is the structural statement of similitude.
    """

    n_points: int
    tau_end: float
    gamma_period: Optional[float]
    u_far: Forcing
    v_far: Forcing
    u_init: Tuple[float, ...]
    v_init: Tuple[float, ...]
    numbers: DimensionlessNumbers
    dt_init: float
    dt_max: float
    fixed_dt: Optional[float]
    growth_factor: float
    picard_tol: float
    picard_max_iter: int
    picard_damping: float
    max_halvings: int
    freeze_coefficients: bool
    material_id: int
    state_window: Tuple[float, ...]  # Tref, dT, P1ref, dP, eval_T, eval_P1

    def equivalent(self, other: "DiscreteProblem", tol: float = 1e-12) -> bool:
        def close(x, y):
            if x is None or y is None:
                return x is None and y is None
            return abs(x - y) <= tol * max(abs(x), abs(y), 1.0)

        if (self.n_points, self.picard_max_iter, self.max_halvings,
                self.freeze_coefficients, self.material_id) != \
                (other.n_points, other.picard_max_iter, other.max_halvings,
                 other.freeze_coefficients, other.material_id):
            return False
        scalars = ["tau_end", "gamma_period", "dt_init", "dt_max", "fixed_dt",
                   "growth_factor", "picard_tol", "picard_damping"]
        if not all(close(getattr(self, s), getattr(other, s)) for s in scalars):
            return False
        if not (close(self.u_far.mean, other.u_far.mean)
                and close(self.u_far.amplitude, other.u_far.amplitude)
                and close(self.v_far.mean, other.v_far.mean)
                and close(self.v_far.amplitude, other.v_far.amplitude)):
            return False
        for mine, theirs in ((self.u_init, other.u_init),
                             (self.v_init, other.v_init),
                             (self.state_window, other.state_window)):
            if len(mine) != len(theirs) or \
                    not all(close(x, y) for x, y in zip(mine, theirs)):
                return False
        mine = self.numbers.as_dict()
        theirs = other.numbers.as_dict()
        return all(close(mine[k], theirs[k]) for k in mine)


def dimensionless_problem(cfg: SimulationConfig,
                          constants=DEFAULT_CONSTANTS) -> DiscreteProblem:
    """Reduce a config to the dimensionless discrete problem it defines."""
    cfg.validate()
    n = cfg.n_points
    nums = cfg.numbers_override if cfg.numbers_override is not None \
        else design_numbers(cfg.design.material, cfg.design.frame, constants)
    f = cfg.design.frame
    return DiscreteProblem(
        n_points=n,
        tau_end=cfg.resolved_tau_end(),
        gamma_period=cfg.gamma_period,
        u_far=cfg.u_far, v_far=cfg.v_far,
        u_init=tuple(_initial_profile(cfg.u_init, cfg.u_far.mean, n, "u_init")),
        v_init=tuple(_initial_profile(cfg.v_init, cfg.v_far.mean, n, "v_init")),
        numbers=nums,
        dt_init=cfg.dt_init, dt_max=cfg.resolved_dt_max(),
        fixed_dt=cfg.fixed_dt, growth_factor=cfg.growth_factor,
        picard_tol=cfg.picard_tol, picard_max_iter=cfg.picard_max_iter,
        picard_damping=cfg.picard_damping, max_halvings=cfg.max_halvings,
        freeze_coefficients=cfg.freeze_coefficients,
        material_id=cfg.design.material.id,
        state_window=(f.Tref, f.dT, f.P1ref, f.dP, f.eval_T, f.eval_P1))


def _probe_values(sol: FieldSolution, chi: float, tau: float,
                  frame: ReferenceFrame) -> Tuple[float, float, float]:
    """Dimensional (T, P1) at the grid node nearest chi, linear in tau."""
    j = int(np.argmin(np.abs(sol.chi - chi)))
    u = float(np.interp(tau, sol.tau, sol.u[:, j]))
    v = float(np.interp(tau, sol.tau, sol.v[:, j]))
    T, P1 = unscale_fields(u, v, frame)
    return T, P1, float(sol.chi[j])


def verify_dynamic_similarity(design: Design, pi: float,
                              template: Optional[SimulationConfig] = None,
                              constants=DEFAULT_CONSTANTS,
                              probe_chis: Sequence[float] = (0.1, 0.5),
                              probe_fractions: Sequence[float] = (0.75, 0.9),
                              ) -> Dict[str, object]:
    """Run a design and its pi-scaled counterpart and compare.

    Three layers of evidence go into the report: the two dimensionless
    discrete problems are structurally equivalent; the paired solver runs
    (identical fixed step sequence) agree in max-norm; and an independent
    half-step run of the scaled design, unscaled back to dimensional
    values, matches the original at corresponding observation points.
    """
    if not pi > 0:
        raise ValueError("scale factor pi must be strictly positive")
    if template is None:
        template = SimulationConfig(design=design)
    scaled = dynamic_scale(design, pi).design

    if template.fixed_dt is not None:
        dt = template.fixed_dt
    else:
        base = replace(template, design=design)
        base.validate()
        gp = base.gamma_period
        dt = gp / 256.0 if gp is not None else base.resolved_tau_end() / 512.0
    tol = min(template.picard_tol, 1e-12)
    cfg_a = replace(template, design=design, fixed_dt=dt, picard_tol=tol,
                    store_every=1)
    cfg_b = replace(template, design=scaled, fixed_dt=dt, picard_tol=tol,
                    store_every=1)

    prob_a = dimensionless_problem(cfg_a, constants)
    prob_b = dimensionless_problem(cfg_b, constants)
    structural = prob_a.equivalent(prob_b)

    sol_a = simulate(cfg_a, constants)
    sol_b = simulate(cfg_b, constants)
    if sol_a.u.shape != sol_b.u.shape:
        raise SolverError("paired runs diverged in step count", sol_a.tau[-1],
                          sol_a.steps)
    max_diff_u = float(np.max(np.abs(sol_a.u - sol_b.u)))
    max_diff_v = float(np.max(np.abs(sol_a.v - sol_b.v)))

    # independent dimensional cross-check: half the step, unscale, compare
    sol_b_half = simulate(replace(cfg_b, fixed_dt=dt / 2.0), constants)
    tau_end = cfg_a.resolved_tau_end()
    probes = []
    for chi in probe_chis:
        for frac in probe_fractions:
            tau = frac * tau_end
            T_a, P1_a, chi_node = _probe_values(sol_a, chi, tau, design.frame)
            T_b, P1_b, _ = _probe_values(sol_b_half, chi, tau, scaled.frame)
            probes.append({
                "chi": chi_node, "tau": tau,
                "x_m": chi_node * design.frame.Lref,
                "t_s": tau * design.frame.tref,
                "x_scaled_m": chi_node * scaled.frame.Lref,
                "t_scaled_s": tau * scaled.frame.tref,
                "T": T_a, "T_scaled": T_b,
                "P1": P1_a, "P1_scaled": P1_b,
                "rel_T": abs(T_a - T_b) / abs(T_a),
                "rel_P1": abs(P1_a - P1_b) / abs(P1_a),
            })
    max_rel = max(max(p["rel_T"], p["rel_P1"]) for p in probes)
    return {
        "pi": pi,
        "dt": dt,
        "structural_identical": structural,
        "max_diff_u": max_diff_u,
        "max_diff_v": max_diff_v,
        "dimensionless_tolerance": 1e-10,
        "dimensionless_ok": max_diff_u < 1e-10 and max_diff_v < 1e-10,
        "probes": probes,
        "max_probe_relative_difference": max_rel,
        "dimensional_tolerance": 0.01,
        "dimensional_ok": max_rel < 0.01,
        "solution_original": sol_a,
        "solution_scaled": sol_b,
    }


_DURATION_KEYS = {"time", "period"}
_FLOAT_KEYS = {"length", "tau_end", "periods", "u_mean", "u_amplitude",
               "v_mean", "v_amplitude", "u_init", "v_init", "dt_init",
               "dt_max", "fixed_dt", "growth_factor", "picard_tol",
               "picard_damping", "hq", "hm"}
_INT_KEYS = {"n_points", "picard_max_iter", "max_halvings", "store_every"}


def load_simulation_config(source: Union[str, TextIO],
                           materials: Optional[Sequence[MaterialProperties]] = None,
                           constants=DEFAULT_CONSTANTS) -> SimulationConfig:
    """Read a simulation description from 'key = value' lines.

    Recognized keys: material (required), length, time, side, hq, hm,
    period, periods, tau_end, n_points, u_mean/u_amplitude, v_mean/
    v_amplitude, u_init, v_init, dt_init, dt_max, fixed_dt, growth_factor,
    picard_tol, picard_max_iter, picard_damping, max_halvings,
    store_every, probes, freeze_coefficients.  Durations take s/h/d
    suffixes; lengths are meters.  '#' starts a comment.
    """
    if hasattr(source, "read"):
        text = source.read()
    else:
        with open(source, "r", encoding="utf-8") as fh:
            text = fh.read()
    raw: Dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"simulation config line {lineno}: "
                             "expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        raw[key] = value

    if "material" not in raw:
        raise ValueError("simulation config needs a material")
    if materials is None:
        materials = load_database()
    mat = find(materials, raw.pop("material"))

    parsed: Dict[str, object] = {}
    for key, value in raw.items():
        if key in _DURATION_KEYS:
            parsed[key] = parse_duration(value)
        elif key in _FLOAT_KEYS:
            parsed[key] = float(value)
        elif key in _INT_KEYS:
            parsed[key] = int(value)
        elif key == "side":
            parsed[key] = value
        elif key == "freeze_coefficients":
            parsed[key] = value.lower() in ("1", "true", "yes", "on")
        elif key == "probes":
            parsed[key] = tuple(float(p) for p in value.split(","))
        else:
            raise ValueError(f"unknown simulation config key {key!r}")

    length = parsed.pop("length", mat.Lref_default)
    tref = parsed.pop("time", 365.0 * 86400.0)
    side = parsed.pop("side", "outside")
    overrides = {}
    if "hq" in parsed:
        overrides["hq"] = parsed.pop("hq")
    if "hm" in parsed:
        overrides["hm"] = parsed.pop("hm")
    frame = default_frame(length, tref, side, **overrides)
    period = parsed.pop("period", 86400.0)
    design = Design(material=mat, frame=frame, period=period)

    kwargs: Dict[str, object] = {}
    for cfg_key in ("tau_end", "periods", "n_points", "u_init", "v_init",
                    "dt_init", "dt_max", "fixed_dt", "growth_factor",
                    "picard_tol", "picard_max_iter", "picard_damping",
                    "max_halvings", "store_every", "probes",
                    "freeze_coefficients"):
        if cfg_key in parsed:
            kwargs[cfg_key] = parsed.pop(cfg_key)
    u_far = Forcing(parsed.pop("u_mean", 0.22), parsed.pop("u_amplitude", 0.05))
    v_far = Forcing(parsed.pop("v_mean", 0.5), parsed.pop("v_amplitude", 0.35))
    if parsed:
        raise ValueError(f"unhandled simulation config keys: {sorted(parsed)}")
    cfg = SimulationConfig(design=design, u_far=u_far, v_far=v_far, **kwargs)
    cfg.validate()
    return cfg
