"""Lyapunov feedback stabilization of the L-C-JJ qubit on the Bloch sphere.

The Bloch components of the driven circuit obey bilinear equations

    dx/dt = -cV V z
    dy/dt = (cphi phi + cI I) z
    dz/dt =  cV V x - (cphi phi + cI I) y

with cV = n_zpf E_c C_g / (2 e hbar), cI = phi_zpf / e and
cphi = 2 E_L phi_zpf / hbar. Choosing V = (alpha/cV)(x zf - xf z) and
I = (beta/cI)(yf z - y zf) with the flux channel pinned to zero makes the
squared error gamma = |r - rf|^2 / 2 non-increasing: dgamma/dt =
-alpha w^2 - beta u^2. The physical coefficients cancel exactly, so the
closed loop depends only on the gains.
"""

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .constants import E_CHARGE, HBAR
from .errors import DomainError, IntegrationError
from .evolution import BlochTrajectory, TimeGrid
from .hamiltonians import QubitParams, default_params

#: per-sample bound on unit-norm drift for the substepped integrator
SUBSTEP_DRIFT_TOL = 1e-8


@dataclass(frozen=True)
class BilinearParams:
    """Physical coefficients of the bilinear Bloch equations."""

    E_c: float
    E_L: float
    C_g: float
    n_zpf: float
    phi_zpf: float

    def __post_init__(self):
        for name in ("E_c", "C_g", "n_zpf", "phi_zpf"):
            if getattr(self, name) <= 0:
                raise DomainError(f"{name} must be positive")
        if self.E_L < 0:
            raise DomainError("E_L must be non-negative")

    @property
    def c_V(self) -> float:
        return self.n_zpf * self.E_c * self.C_g / (2 * E_CHARGE * HBAR)

    @property
    def c_I(self) -> float:
        return self.phi_zpf / E_CHARGE

    @property
    def c_phi(self) -> float:
        return 2 * self.E_L * self.phi_zpf / HBAR

    @classmethod
    def from_qubit(cls, p: QubitParams) -> "BilinearParams":
        n_zpf, phi_zpf = p.zpf()
        return cls(E_c=p.E_c, E_L=p.E_L, C_g=p.C_g, n_zpf=n_zpf, phi_zpf=phi_zpf)


def default_bilinear_params() -> BilinearParams:
    """Charge-circuit reference values; inductive branch open (E_L = 0)."""
    return BilinearParams.from_qubit(default_params("lcjj"))


@dataclass(frozen=True)
class Gains:
    """Feedback gains; both strictly positive."""

    alpha: float
    beta: float

    def __post_init__(self):
        if self.alpha <= 0 or self.beta <= 0:
            raise DomainError("feedback gains must be positive")


@dataclass
class LyapunovRun:
    """Closed-loop trajectory with its control signals and Lyapunov series."""

    trajectory: BlochTrajectory
    V_series: np.ndarray
    I_series: np.ndarray
    gamma_series: np.ndarray
    converged: bool
    final_error: float


def bilinear_rhs(r, V: float, I: float, phi: float, p: BilinearParams) -> np.ndarray:
    """Bloch velocity of the driven circuit; exactly tangent to the sphere."""
    x, y, z = r
    gv = p.c_V * V
    gi = p.c_phi * phi + p.c_I * I
    return np.array([-gv * z, gi * z, gv * x - gi * y])


def feedback_controls(r, rf, g: Gains, p: BilinearParams) -> Tuple[float, float]:
    """Stabilizing voltage and current: V = (alpha/cV)(x zf - xf z), I = (beta/cI)(yf z - y zf)."""
    w = r[0] * rf[2] - rf[0] * r[2]
    u = rf[1] * r[2] - r[1] * rf[2]
    return g.alpha / p.c_V * w, g.beta / p.c_I * u


def lyapunov_value(r, rf) -> float:
    """Squared error gamma = |r - rf|^2 / 2."""
    e = np.asarray(r, float) - np.asarray(rf, float)
    return float(0.5 * np.dot(e, e))


def _scalar_rhs(r, rf, g: Gains, p: BilinearParams):
    """Closed-loop Bloch velocity through the physical control route (plain floats)."""
    x, y, z = r
    w = x * rf[2] - rf[0] * z
    u = rf[1] * z - y * rf[2]
    gv = p.c_V * (g.alpha / p.c_V * w)
    gi = p.c_I * (g.beta / p.c_I * u)
    return (-gv * z, gi * z, gv * x - gi * y)


def _rk4_step(r, h, rf, g, p):
    k1 = _scalar_rhs(r, rf, g, p)
    r2 = (r[0] + 0.5 * h * k1[0], r[1] + 0.5 * h * k1[1], r[2] + 0.5 * h * k1[2])
    k2 = _scalar_rhs(r2, rf, g, p)
    r3 = (r[0] + 0.5 * h * k2[0], r[1] + 0.5 * h * k2[1], r[2] + 0.5 * h * k2[2])
    k3 = _scalar_rhs(r3, rf, g, p)
    r4 = (r[0] + h * k3[0], r[1] + h * k3[1], r[2] + h * k3[2])
    k4 = _scalar_rhs(r4, rf, g, p)
    s = h / 6.0
    return (r[0] + s * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]),
            r[1] + s * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]),
            r[2] + s * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2]))


def _feedback_speed(r, rf, g: Gains) -> float:
    """Upper bound on |dr/dt| under the feedback law (unit sphere)."""
    w = r[0] * rf[2] - rf[0] * r[2]
    u = rf[1] * r[2] - r[1] * rf[2]
    return 2.0 * (g.alpha * abs(w) + g.beta * abs(u))


#: displacement below which the rest of a sample interval is not resolvable
FREEZE_DISPLACEMENT = 1e-18


def _advance_substepped(r, dt, rf, g, p, state):
    """Integrate one sample interval with step-doubling error control.

    The step h halves until one full step and two half steps agree within an
    allowance proportional to h/dt, which caps the accumulated per-sample
    norm drift at about SUBSTEP_DRIFT_TOL. Two guards keep the stiff case
    (1/gain far below dt) tractable: h never exceeds the RK4 stability bound
    2.5/max(alpha, beta), and once the feedback speed cannot move the state
    by more than FREEZE_DISPLACEMENT over the rest of the interval the state
    is held (the flow only contracts toward the w = u = 0 set, so the bound
    stays valid). h persists across samples through ``state``.
    """
    cap = 2.5 / max(g.alpha, g.beta)
    h = min(state["h"], dt, cap)
    remaining = dt
    h_floor = dt * 2.0 ** -48
    while remaining > 0.0:
        if _feedback_speed(r, rf, g) * remaining < FREEZE_DISPLACEMENT:
            break
        h = min(h, remaining)
        while True:
            try:
                coarse = _rk4_step(r, h, rf, g, p)
                mid = _rk4_step(r, 0.5 * h, rf, g, p)
                fine = _rk4_step(mid, 0.5 * h, rf, g, p)
                err = math.hypot(fine[0] - coarse[0], fine[1] - coarse[1],
                                 fine[2] - coarse[2])
            except OverflowError:
                err = math.inf
            allowance = SUBSTEP_DRIFT_TOL * (h / dt)
            if math.isfinite(err) and err <= allowance:
                break
            if h <= h_floor:
                raise IntegrationError(
                    "substepped integrator hit the minimum step without meeting "
                    f"the local tolerance (err = {err:.3e})"
                )
            h *= 0.5
        r = fine
        remaining -= h
        if err < allowance / 64.0:
            h = min(h * 2.0, dt, cap)
    state["h"] = h
    return r


def simulate_closed_loop(r0, rf, g: Gains, p: BilinearParams, grid: TimeGrid,
                         integrator: str = "fixed_rk4") -> LyapunovRun:
    """Run the Lyapunov feedback loop from r0 toward rf over the sampling grid.

    ``integrator`` is "fixed_rk4" (one RK4 step per sample; reproducible
    bit-for-bit) or "substepped" (adaptive internal halving, needed when
    1/gain is far below the sample interval). Raises IntegrationError when
    the Bloch norm drifts by more than 1e-4.
    """
    r0 = np.asarray(r0, dtype=float)
    rf = np.asarray(rf, dtype=float)
    for name, r in (("r0", r0), ("rf", rf)):
        if abs(np.linalg.norm(r) - 1.0) > 1e-6:
            raise DomainError(f"{name} must be a unit Bloch vector")
    if integrator not in ("fixed_rk4", "substepped"):
        raise DomainError(f"unknown integrator {integrator!r}")

    n = grid.steps + 1
    bloch = np.empty((n, 3))
    bloch[0] = r0
    r = (float(r0[0]), float(r0[1]), float(r0[2]))
    rf_t = (float(rf[0]), float(rf[1]), float(rf[2]))
    state = {"h": grid.dt}
    for k in range(grid.steps):
        try:
            if integrator == "fixed_rk4":
                r = _rk4_step(r, grid.dt, rf_t, g, p)
            else:
                r = _advance_substepped(r, grid.dt, rf_t, g, p, state)
            drift = abs(math.hypot(*r) - 1.0)
        except OverflowError:
            drift = math.inf
        if drift > 1e-4:
            raise IntegrationError(
                f"Bloch norm drifted by {drift:.3e} at sample {k + 1}; "
                "use integrator='substepped' or shrink dt"
            )
        bloch[k + 1] = r

    controls = np.array([feedback_controls(b, rf, g, p) for b in bloch])
    gamma = np.array([lyapunov_value(b, rf) for b in bloch])
    final_error = float(np.linalg.norm(bloch[-1] - rf))
    monotone = bool(np.all(np.diff(gamma) <= 1e-9))
    traj = BlochTrajectory(grid.times, bloch,
                           expectations={"sx": bloch[:, 0], "sy": bloch[:, 1],
                                         "sz": bloch[:, 2]})
    return LyapunovRun(traj, controls[:, 0], controls[:, 1], gamma,
                       converged=(final_error < 1e-3 and monotone),
                       final_error=final_error)
