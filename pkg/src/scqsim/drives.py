"""Microwave drive synthesis for Bloch-sphere state transfers.

A target transfer (r0 -> rf in time t_f) is realized as a pi rotation about
the bisector axis of the two Bloch vectors. Inverting the rotating-frame
control propagator for that rotation yields the drive parameters: carrier
phase lambda, ac amplitude, dc offset and carrier frequency. The same plan
can then be replayed against the exact lab-frame circuit model, which rotates
about a different axis and misses the target.

Per-kind inversion identities (Q = sin lambda, I = cos lambda, k the drive
coupling in J per drive unit):

    charge:      wq nx =  k amp Q / (4 hbar)
                 wq ny = -k amp I / (2 hbar)
                 wq nz =  k amp Q / (4 hbar) + 2 k dc / hbar
    phase/flux:  wq nx =  k amp Q / (8 hbar)
                 wq ny = -k amp I / (2 hbar)
                 wq nz = -k amp Q / (2 hbar) + 2 k dc / hbar
"""

import json
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .constants import E_CHARGE, HBAR
from .core import (
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    bloch_from_state,
    matrix_exponential,
    rotate_bloch,
)
from .errors import (
    DegenerateBisectorError,
    DomainError,
    InvalidStateError,
    UnreachableAxisError,
)
from .evolution import BlochTrajectory, TimeGrid, evolve_time_dependent
from .hamiltonians import DRIVE_SLOTS, HamiltonianOperator, QubitParams, driven_hamiltonian

# lambda ratio, amplitude factor, nz/nx slope of the dc equation
_INVERSION = {
    "charge": dict(tan_ratio=2.0, amp_factor=4.0, nz_slope=-1.0, ax=1 / 8, ay=1 / 4, az_amp=1 / 8),
    "phase": dict(tan_ratio=4.0, amp_factor=8.0, nz_slope=4.0, ax=1 / 16, ay=1 / 4, az_amp=-1 / 4),
    "flux": dict(tan_ratio=4.0, amp_factor=8.0, nz_slope=4.0, ax=1 / 16, ay=1 / 4, az_amp=-1 / 4),
}


@dataclass(frozen=True)
class RotationTarget:
    """A state transfer expressed as a single axis-angle rotation."""

    r0: np.ndarray
    rf: np.ndarray
    n_hat: np.ndarray
    alpha: float
    t_f: float
    omega_q: float

    def __post_init__(self):
        if abs(np.linalg.norm(self.n_hat) - 1.0) > 1e-9:
            raise UnreachableAxisError("rotation axis must be a unit vector")
        if not math.isclose(self.omega_q, self.alpha / self.t_f, rel_tol=1e-12):
            raise DomainError("omega_q must equal alpha / t_f")


@dataclass(frozen=True)
class DrivePlan:
    """Synthesized control-signal parameters for one qubit kind.

    ``amplitude`` and ``dc_offset`` are volts (charge), amperes (phase) or
    radians of external flux (flux). ``envelope`` is the dimensionless pulse
    shape s(t), None meaning constant 1.
    """

    qubit_kind: str
    lam: float              # carrier phase, rad
    amplitude: float
    dc_offset: float
    omega_c: float          # carrier frequency, rad/s
    k: float                # drive coupling, J per drive unit
    n_hat: np.ndarray
    omega_q: float
    t_f: Optional[float] = None
    envelope: Optional[Callable[[float], float]] = None

    def __post_init__(self):
        if self.omega_c < 0:
            raise DomainError("carrier frequency must be non-negative")
        values = [self.lam, self.amplitude, self.dc_offset, self.omega_c, self.k]
        if not all(map(math.isfinite, values)):
            raise DomainError("drive plan has non-finite entries")


def bisector_rotation(r0, rf) -> tuple[np.ndarray, float]:
    """Rotation axis and angle sending r0 to rf: the bisector (r0+rf)/|r0+rf| with angle +pi."""
    r0 = np.asarray(r0, dtype=float)
    rf = np.asarray(rf, dtype=float)
    for name, r in (("r0", r0), ("rf", rf)):
        if abs(np.linalg.norm(r) - 1.0) > 1e-6:
            raise InvalidStateError(f"{name} must be a unit Bloch vector")
    total = r0 + rf
    norm = np.linalg.norm(total)
    if norm < 1e-9:
        raise DegenerateBisectorError(
            "antipodal states leave the bisector undefined; pick an axis explicitly"
        )
    return total / norm, math.pi


def rotation_target(r0, rf, t_f: float) -> RotationTarget:
    """Bundle a transfer r0 -> rf over t_f seconds as a bisector pi rotation."""
    n_hat, alpha = bisector_rotation(r0, rf)
    return RotationTarget(np.asarray(r0, float), np.asarray(rf, float),
                          n_hat, alpha, t_f, alpha / t_f)


def carrier_frequency(kind: str, params: QubitParams) -> float:
    """Resonant carrier |omega_z - omega_x| with omega_z = E_c/hbar, omega_x = E_J/hbar."""
    if kind not in _INVERSION:
        raise DomainError(f"no microwave drive inversion for kind {kind!r}")
    omega_z = params.E_c / HBAR
    omega_x = params.E_J / HBAR
    if math.isclose(omega_z, omega_x, rel_tol=1e-12):
        raise DomainError("degenerate spectrum: carrier |omega_z - omega_x| vanishes")
    return abs(omega_z - omega_x)


def drive_coupling(kind: str, params: QubitParams) -> float:
    """Coupling k between drive signal and the controlled Pauli channel, J per drive unit."""
    if kind == "charge":
        return -params.C_g * params.E_c / (2 * E_CHARGE)
    _, phi_zpf = params.zpf()
    if kind == "phase":
        return -(HBAR / (2 * E_CHARGE)) * phi_zpf
    if kind == "flux":
        return -params.E_L * phi_zpf
    raise DomainError(f"no microwave drive inversion for kind {kind!r}")


def design_drive(kind: str, n_hat, omega_q: float, params: QubitParams,
                 t_f: Optional[float] = None) -> DrivePlan:
    """Invert the control propagator for a rotation (n_hat, omega_q) into signal parameters.

    charge:      lam = atan(-2 nx / ny), amp = 4 hbar wq nx / (k Q), dc = hbar wq (nz - nx) / (2k)
    phase/flux:  lam = atan(-4 nx / ny), amp = 8 hbar wq nx / (k Q), dc = hbar wq (nz + 4 nx) / (2k)

    The degenerate nx = 0 axis keeps lam = 0 and takes the amplitude from the
    ny identity (zero when ny = 0 too: a dc-only z rotation).
    """
    n = np.asarray(n_hat, dtype=float).ravel()
    if n.size != 3 or abs(np.linalg.norm(n) - 1.0) > 1e-9:
        raise UnreachableAxisError("rotation axis must be a unit 3-vector")
    spec = _INVERSION[kind] if kind in _INVERSION else None
    if spec is None:
        raise DomainError(f"no microwave drive inversion for kind {kind!r}")
    k = drive_coupling(kind, params)
    omega_c = carrier_frequency(kind, params)
    nx, ny, nz = (float(v) for v in n)  # plain floats: overflow -> inf, no warning
    if nx == 0.0:
        lam = 0.0
        amplitude = -2 * HBAR * omega_q * ny / k  # ny identity at I = 1
    elif ny == 0.0:
        raise UnreachableAxisError(
            "nx != 0 with ny = 0 puts the carrier phase on the sin-lambda pole"
        )
    else:
        try:
            ratio = -spec["tan_ratio"] * nx / ny
        except OverflowError:
            ratio = math.inf if (nx / ny) < 0 else -math.inf
        lam = math.atan(ratio)
        # amplitude = amp_factor * hbar wq nx / (k sin(lam)), written through
        # nx / sin(atan(ratio)) so neither factor under- or overflows
        if abs(ratio) <= 1.0:
            nx_over_q = -ny * math.sqrt(1.0 + ratio * ratio) / spec["tan_ratio"]
        else:
            nx_over_q = nx * math.sqrt(1.0 + ratio**-2) * math.copysign(1.0, ratio)
        amplitude = spec["amp_factor"] * HBAR * omega_q * nx_over_q / k
    dc = HBAR * omega_q * (nz + spec["nz_slope"] * nx) / (2 * k)
    return DrivePlan(kind, lam, amplitude, dc, omega_c, k,
                     n_hat=n.copy(), omega_q=omega_q, t_f=t_f)


def design_transfer(psi0, psif, t_f: float, params: QubitParams) -> tuple[RotationTarget, DrivePlan]:
    """Plan the full transfer |psi0> -> |psif>: bisector rotation plus drive inversion."""
    target = rotation_target(bloch_from_state(psi0), bloch_from_state(psif), t_f)
    plan = design_drive(params.qubit_kind, target.n_hat, target.omega_q, params, t_f=t_f)
    return target, plan


def reconstruct_rotation(plan: DrivePlan) -> np.ndarray:
    """omega_q * n_hat implied by a plan through the inversion identities (round trip)."""
    spec = _INVERSION[plan.qubit_kind]
    Q = math.sin(plan.lam)
    I = math.cos(plan.lam)
    wx = 2 * spec["ax"] * plan.k * plan.amplitude * Q / HBAR
    wy = -2 * spec["ay"] * plan.k * plan.amplitude * I / HBAR
    wz = 2 * spec["az_amp"] * plan.k * plan.amplitude * Q / HBAR + 2 * plan.k * plan.dc_offset / HBAR
    return np.array([wx, wy, wz])


def _envelope_value(plan: DrivePlan, t: float) -> float:
    return 1.0 if plan.envelope is None else plan.envelope(t)


def _envelope_integral(plan: DrivePlan, t: float) -> float:
    """gamma(t) = integral of s over [0, t]; Simpson quadrature for custom envelopes."""
    if plan.envelope is None:
        return t
    panels = 512
    ts = np.linspace(0.0, t, 2 * panels + 1)
    values = np.array([plan.envelope(u) for u in ts])
    h = t / (2 * panels) if t != 0 else 0.0
    return float(h / 3 * (values[0] + values[-1]
                          + 4 * values[1:-1:2].sum() + 2 * values[2:-2:2].sum()))


def rwa_hamiltonian(plan: DrivePlan, delta_omega: float, t: float) -> HamiltonianOperator:
    """Rotating-frame drive Hamiltonian after dropping the fast terms.

    charge:      (k amp s(t) / 8)  (sin(p) sx - 2 cos(p) sy + sin(p) sz)
    phase/flux:  (k amp s(t) / 16) (sin(p) sx - 4 cos(p) sy - 4 sin(p) sz)

    with p = delta_omega * t + lambda. At resonance (delta_omega = 0) this is
    time independent: the IQ-mixer form with Q = sin(lambda), I = cos(lambda).
    """
    phase = delta_omega * t + plan.lam
    s = _envelope_value(plan, t)
    scale = plan.k * plan.amplitude * s
    if plan.qubit_kind == "charge":
        matrix = scale / 8 * (math.sin(phase) * SIGMA_X - 2 * math.cos(phase) * SIGMA_Y
                              + math.sin(phase) * SIGMA_Z)
    else:
        matrix = scale / 16 * (math.sin(phase) * SIGMA_X - 4 * math.cos(phase) * SIGMA_Y
                               - 4 * math.sin(phase) * SIGMA_Z)
    return HamiltonianOperator(matrix, "approximate")


def effective_rotating_hamiltonian(plan: DrivePlan) -> HamiltonianOperator:
    """Resonant rotating-frame generator including the dc sigma_z term.

    Equals (hbar omega_q / 2) n.sigma for a plan produced by design_drive.
    """
    rwa = rwa_hamiltonian(plan, 0.0, 0.0)
    matrix = rwa.matrix + plan.k * plan.dc_offset * SIGMA_Z
    return HamiltonianOperator(matrix, "approximate")


def control_propagator(plan: DrivePlan, t: float) -> np.ndarray:
    """Rotating-frame control propagator U_c(t) of the plan.

    charge:      exponent (-i k / hbar) [ (amp/8) g Q sx - (amp/4) g I sy + ((amp/8) g Q + dc t) sz ]
    phase/flux:  exponent (-i k / hbar) [ (amp/16) g Q sx - (amp/4) g I sy + (-(amp/4) g Q + dc t) sz ]

    with g = gamma(t) the envelope integral (g = t for s = 1).
    """
    spec = _INVERSION[plan.qubit_kind]
    gamma = _envelope_integral(plan, t)
    Q = math.sin(plan.lam)
    I = math.cos(plan.lam)
    ax = spec["ax"] * plan.amplitude * gamma * Q
    ay = -spec["ay"] * plan.amplitude * gamma * I
    az = spec["az_amp"] * plan.amplitude * gamma * Q + plan.dc_offset * t
    exponent = (-1j * plan.k / HBAR) * (ax * SIGMA_X + ay * SIGMA_Y + az * SIGMA_Z)
    return matrix_exponential(exponent)


def drive_signal(plan: DrivePlan) -> Callable[[float], float]:
    """Physical control signal amp * s(t) * sin(omega_c t + lambda) + dc."""

    def signal(t: float) -> float:
        return (plan.amplitude * _envelope_value(plan, t)
                * math.sin(plan.omega_c * t + plan.lam) + plan.dc_offset)

    return signal


def bloch_fidelity(r, rf) -> float:
    """Overlap (1 + r . rf) / 2; equals |<psi_f|psi>|^2 for pure states."""
    return float((1.0 + np.dot(r, rf)) / 2.0)


@dataclass
class TransferResult:
    trajectory: BlochTrajectory
    fidelity: float
    r_final: np.ndarray
    r_target: np.ndarray


def closed_loop_experiment(plan: DrivePlan, psi0, model: str, grid: TimeGrid,
                           params: QubitParams, r_target=None,
                           substeps: int = 1) -> TransferResult:
    """Apply a designed plan to a chosen system model and score the transfer.

    ``model`` is "approximate_rotating" (the constant resonant rotating-frame
    generator the plan was designed for) or "exact_lab" (the exact two-level
    circuit driven by the physical signal in the kind's drive slot). The
    fidelity target defaults to the plan's own rotation applied to psi0.
    """
    psi0 = np.asarray(psi0, dtype=complex)
    if r_target is None:
        alpha = plan.omega_q * (plan.t_f if plan.t_f is not None else grid.dt * grid.steps)
        r_target = rotate_bloch(plan.n_hat, alpha, bloch_from_state(psi0))
    if model == "approximate_rotating":
        h_of_t = effective_rotating_hamiltonian(plan)
    elif model == "exact_lab":
        slot = DRIVE_SLOTS[plan.qubit_kind]
        h_of_t = driven_hamiltonian(params, "exact_two_level", {slot: drive_signal(plan)})
    else:
        raise DomainError(f"unknown experiment model {model!r}")
    traj = evolve_time_dependent(h_of_t, psi0, grid, substeps=substeps)
    r_final = traj.final_bloch
    return TransferResult(traj, bloch_fidelity(r_final, r_target), r_final,
                          np.asarray(r_target, float))


# ---------------------------------------------------------------------------
# serialization

_PLAN_FIELDS = ("kind", "lambda_rad", "amplitude", "dc_offset", "omega_c_rad_s",
                "t_f_s", "n_hat", "omega_q_rad_s")


def plan_to_dict(plan: DrivePlan) -> dict:
    """Flat JSON form of a plan; field names are part of the file contract."""
    if plan.t_f is None:
        raise DomainError("plan needs t_f before serialization")
    return {
        "kind": plan.qubit_kind,
        "lambda_rad": plan.lam,
        "amplitude": plan.amplitude,
        "dc_offset": plan.dc_offset,
        "omega_c_rad_s": plan.omega_c,
        "t_f_s": plan.t_f,
        "n_hat": [float(c) for c in plan.n_hat],
        "omega_q_rad_s": plan.omega_q,
    }


def plan_from_dict(data: dict, params: QubitParams) -> DrivePlan:
    missing = [f for f in _PLAN_FIELDS if f not in data]
    if missing:
        raise DomainError(f"drive plan JSON lacks fields {missing}")
    return DrivePlan(
        qubit_kind=data["kind"],
        lam=float(data["lambda_rad"]),
        amplitude=float(data["amplitude"]),
        dc_offset=float(data["dc_offset"]),
        omega_c=float(data["omega_c_rad_s"]),
        k=drive_coupling(data["kind"], params),
        n_hat=np.asarray(data["n_hat"], dtype=float),
        omega_q=float(data["omega_q_rad_s"]),
        t_f=float(data["t_f_s"]),
    )


def plan_to_json(plan: DrivePlan) -> str:
    return json.dumps(plan_to_dict(plan), indent=2, sort_keys=True) + "\n"
