"""Two-level and truncated-Fock Hamiltonians for charge, phase, flux and L-C-JJ qubits.

Everything is in SI units: energies in joules, voltages in volts, currents in
amperes, external flux as a phase in radians. The charge, phase and flux
circuits each come in two flavors:

* ``approximate`` -- the textbook two-level form with sigma_z / sigma_x
  coefficients.
* ``exact_two_level`` -- the full circuit Hamiltonian with the operator
  substitution n -> n_zpf sigma_y, phi -> phi_zpf sigma_x (so cos(phi)
  collapses to cos(phi_zpf) I).

``fock`` builds the same circuit Hamiltonians on an N-level oscillator ladder
with n = i n_zpf (a - a^dag) and phi = phi_zpf (a + a^dag).
"""

import warnings
from dataclasses import dataclass, field, replace
from typing import Callable, Mapping, Optional

import numpy as np

from .constants import E_CHARGE, HBAR
from .core import IDENTITY_2, SIGMA_X, SIGMA_Y, SIGMA_Z, matrix_exponential
from .errors import DomainError, TruncationError

QUBIT_KINDS = ("charge", "phase", "flux", "lcjj")

#: drive slot used by each qubit kind ("lcjj" takes all three)
DRIVE_SLOTS = {"charge": "V", "phase": "I", "flux": "phi_e"}


def induced_charge(C_g: float, V: float) -> float:
    """Gate charge n_g = C_g V / (2e) in Cooper-pair units."""
    return C_g * V / (2 * E_CHARGE)


def zero_point_fluctuations(E_c: float, E_LJ0: float) -> tuple[float, float]:
    """Number and phase zero-point fluctuations of the linearized circuit.

    n_zpf = (E_LJ0 / 32 E_c)^(1/4), phi_zpf = (2 E_c / E_LJ0)^(1/4); their
    product is exactly 1/2.
    """
    if E_c <= 0 or E_LJ0 <= 0:
        raise DomainError("zero-point fluctuations need strictly positive energies")
    n_zpf = (E_LJ0 / (32.0 * E_c)) ** 0.25
    phi_zpf = (2.0 * E_c / E_LJ0) ** 0.25
    return n_zpf, phi_zpf


@dataclass(frozen=True)
class QubitParams:
    """Physical parameters of one superconducting circuit.

    ``n_zpf`` / ``phi_zpf`` may be supplied directly; if only one is given the
    other is completed through n_zpf * phi_zpf = 1/2, and if neither is given
    both are derived from ``E_LJ0``.
    """

    qubit_kind: str
    E_c: float          # charging energy of one Cooper pair, J
    E_J: float          # Josephson energy, J
    E_L: float = 0.0    # inductive energy, J (flux / lcjj only)
    C_g: float = 0.0    # gate capacitance, F
    n_g: float = 0.0    # induced gate charge, dimensionless
    I_g: float = 0.0    # bias current, A
    phi_e: float = 0.0  # external flux phase, rad
    E_LJ0: Optional[float] = None   # linearization energy for zpf derivation, J
    n_zpf: Optional[float] = None
    phi_zpf: Optional[float] = None

    def __post_init__(self):
        if self.qubit_kind not in QUBIT_KINDS:
            raise DomainError(f"unknown qubit kind {self.qubit_kind!r}")
        for name in ("E_c", "E_J", "E_L"):
            if getattr(self, name) < 0:
                raise DomainError(f"{name} must be non-negative")
        for name in ("n_zpf", "phi_zpf"):
            value = getattr(self, name)
            if value is not None and value <= 0:
                raise DomainError(f"{name} must be positive when supplied")

    def zpf(self) -> tuple[float, float]:
        """Resolved (n_zpf, phi_zpf) pair."""
        if self.n_zpf is not None and self.phi_zpf is not None:
            return self.n_zpf, self.phi_zpf
        if self.phi_zpf is not None:
            return 0.5 / self.phi_zpf, self.phi_zpf
        if self.n_zpf is not None:
            return self.n_zpf, 0.5 / self.n_zpf
        if self.E_LJ0 is None:
            raise DomainError("supply n_zpf/phi_zpf or E_LJ0 to fix the operator scales")
        return zero_point_fluctuations(self.E_c, self.E_LJ0)


@dataclass(frozen=True)
class HamiltonianOperator:
    """A Hermitian qubit Hamiltonian with its drive sensitivities.

    ``matrix`` is the full operator including the identity offset
    ``identity_offset`` (which only contributes a global phase to closed
    dynamics). ``drive_dependence`` maps a drive name ("V", "I", "phi_e") to
    the constant, identity-free matrix dH/d(drive).
    """

    matrix: np.ndarray
    model: str  # "approximate" | "exact_two_level" | "fock"
    identity_offset: float = 0.0
    drive_dependence: Mapping[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        scale = max(1.0, np.abs(m).max())
        if np.abs(m - m.conj().T).max() > 1e-12 * scale:
            raise DomainError("Hamiltonian matrix must be Hermitian")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def traceless(self) -> np.ndarray:
        """Matrix with the identity offset removed."""
        return self.matrix - self.identity_offset * np.eye(self.dim)


def _charge_validity_warning(p: QubitParams):
    if p.qubit_kind == "charge" and p.E_c < 10.0 * p.E_J:
        warnings.warn(
            "charge-qubit two-level reduction assumes E_c >> E_J "
            f"(got E_c/E_J = {p.E_c / p.E_J:.3g}); building anyway",
            stacklevel=3,
        )


def build_approximate(p: QubitParams) -> HamiltonianOperator:
    """Approximate (driven two-level) Hamiltonian of a charge, phase or flux qubit.

    charge: E_c (1/2 - n_g) sigma_z + (E_J / 2) sigma_x
    phase:  -(E_c / 2) sigma_z + (E_J / 2 - (hbar/2e) phi_zpf I_g) sigma_x
    flux:   -(E_c / 2) sigma_z + (E_J / 2 - E_L phi_zpf phi_e) sigma_x
    """
    if p.qubit_kind == "lcjj":
        raise DomainError("use build_general for the combined L-C-JJ circuit")
    _charge_validity_warning(p)
    if p.qubit_kind == "charge":
        hz = p.E_c * (0.5 - p.n_g)
        hx = 0.5 * p.E_J
        dep = {"V": -p.E_c * p.C_g / (2 * E_CHARGE) * SIGMA_Z}
    else:
        _, phi_zpf = p.zpf()
        hz = -0.5 * p.E_c
        if p.qubit_kind == "phase":
            coupling = HBAR / (2 * E_CHARGE) * phi_zpf
            hx = 0.5 * p.E_J - coupling * p.I_g
            dep = {"I": -coupling * SIGMA_X}
        else:
            coupling = p.E_L * phi_zpf
            hx = 0.5 * p.E_J - coupling * p.phi_e
            dep = {"phi_e": -coupling * SIGMA_X}
    matrix = hz * SIGMA_Z + hx * SIGMA_X
    return HamiltonianOperator(matrix, "approximate", 0.0, dep)


def _exact_two_level_parts(p: QubitParams) -> tuple[float, float, float, dict]:
    """(sigma_x coeff, sigma_y coeff, identity offset, drive dependence)."""
    n_zpf, phi_zpf = p.zpf()
    hx = 0.0
    hy = 0.0
    offset = -p.E_J * np.cos(phi_zpf)
    dep = {}
    if p.qubit_kind in ("charge", "lcjj"):
        # E_c (n_zpf sigma_y - n_g)^2 = E_c (n_zpf^2 + n_g^2) I - 2 E_c n_g n_zpf sigma_y
        hy -= 2 * p.E_c * p.n_g * n_zpf
        offset += p.E_c * (n_zpf**2 + p.n_g**2)
        dep["V"] = -2 * p.E_c * n_zpf * p.C_g / (2 * E_CHARGE) * SIGMA_Y
    else:
        offset += p.E_c * n_zpf**2
    if p.qubit_kind in ("phase", "lcjj"):
        coupling = HBAR / (2 * E_CHARGE) * phi_zpf
        hx -= coupling * p.I_g
        dep["I"] = -coupling * SIGMA_X
    if p.qubit_kind in ("flux", "lcjj"):
        # (E_L/2)(phi_zpf sigma_x - phi_e)^2
        hx -= p.E_L * phi_zpf * p.phi_e
        offset += 0.5 * p.E_L * (phi_zpf**2 + p.phi_e**2)
        dep["phi_e"] = -p.E_L * phi_zpf * SIGMA_X
    return hx, hy, offset, dep


def build_exact_two_level(p: QubitParams) -> HamiltonianOperator:
    """Circuit Hamiltonian under the substitution n -> n_zpf sigma_y, phi -> phi_zpf sigma_x.

    Since sigma_k^2 = I the cosine collapses: cos(phi_zpf sigma_x) =
    cos(phi_zpf) I. The resulting traceless part couples only through the
    drive terms; with all drives at zero the operator is a pure identity
    offset and the state is frozen.
    """
    hx, hy, offset, dep = _exact_two_level_parts(p)
    matrix = hx * SIGMA_X + hy * SIGMA_Y + offset * IDENTITY_2
    return HamiltonianOperator(matrix, "exact_two_level", offset, dep)


# ---------------------------------------------------------------------------
# truncated-Fock representation


def annihilation_operator(n_levels: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, n_levels, dtype=float)), 1).astype(complex)


def number_phase_operators(p: QubitParams, n_levels: int) -> tuple[np.ndarray, np.ndarray]:
    """Charge and phase operators i n_zpf (a - a^dag), phi_zpf (a + a^dag)."""
    n_zpf, phi_zpf = p.zpf()
    a = annihilation_operator(n_levels)
    ad = a.conj().T
    return 1j * n_zpf * (a - ad), phi_zpf * (a + ad)


def cosine_of(phi_op: np.ndarray) -> np.ndarray:
    """cos(phi) = (exp(i phi) + exp(-i phi)) / 2 for a Hermitian phi."""
    plus = matrix_exponential(1j * phi_op)
    return 0.5 * (plus + plus.conj().T)


def build_fock(p: QubitParams, n_levels: int) -> HamiltonianOperator:
    """Circuit Hamiltonian on an ``n_levels``-dimensional oscillator ladder."""
    if n_levels < 4:
        raise TruncationError("Fock truncation needs at least 4 levels")
    n_op, phi_op = number_phase_operators(p, n_levels)
    eye = np.eye(n_levels, dtype=complex)
    H = -p.E_J * cosine_of(phi_op)
    dep = {}
    if p.qubit_kind in ("charge", "lcjj"):
        shifted = n_op - p.n_g * eye
        H = H + p.E_c * (shifted @ shifted)
        dep["V"] = -2 * p.E_c * p.C_g / (2 * E_CHARGE) * n_op
    else:
        H = H + p.E_c * (n_op @ n_op)
    if p.qubit_kind in ("phase", "lcjj"):
        coupling = HBAR / (2 * E_CHARGE)
        H = H - coupling * p.I_g * phi_op
        dep["I"] = -coupling * phi_op
    if p.qubit_kind in ("flux", "lcjj"):
        shifted = phi_op - p.phi_e * eye
        H = H + 0.5 * p.E_L * (shifted @ shifted)
        dep["phi_e"] = -p.E_L * phi_op
    offset = float(np.trace(H).real / n_levels)
    return HamiltonianOperator(H, "fock", offset, dep)


def build_general(p: QubitParams, V: float, I: float, phi_e: float,
                  n_levels: Optional[int] = None) -> HamiltonianOperator:
    """Fully driven L-C-JJ Hamiltonian E_c(n - n_g)^2 - E_J cos(phi) + (E_L/2)(phi - phi_e)^2 - (hbar/2e) I phi.

    The gate voltage enters through n_g = C_g V / (2e). Returns the two-level
    sigma-substituted operator by default, or the ``n_levels`` Fock form.
    Its traceless part is linear in each of (V, I, phi_e): the
    ``drive_dependence`` matrices are constant.
    """
    if p.qubit_kind != "lcjj":
        raise DomainError("build_general models the combined L-C-JJ circuit only")
    driven = replace(p, n_g=induced_charge(p.C_g, V), I_g=I, phi_e=phi_e)
    if n_levels is None:
        return build_exact_two_level(driven)
    return build_fock(driven, n_levels)


def fock_convergence(p: QubitParams, n_levels: int, factor: int = 2) -> float:
    """Relative shift of the two lowest eigenvalues when the truncation grows.

    Compares ``n_levels`` against ``factor * n_levels`` and returns
    max_i |E_i(N) - E_i(fN)| / max_i |E_i(fN)| for i in {0, 1}.
    """
    small = np.linalg.eigvalsh(build_fock(p, n_levels).matrix)[:2]
    large = np.linalg.eigvalsh(build_fock(p, factor * n_levels).matrix)[:2]
    scale = max(np.abs(large).max(), 1e-300)
    return float(np.abs(small - large).max() / scale)


# ---------------------------------------------------------------------------
# time-dependent drives

_DRIVE_ZERO_FIELD = {"V": "n_g", "I": "I_g", "phi_e": "phi_e"}


def driven_hamiltonian(p: QubitParams, model: str,
                       signals: Mapping[str, Callable[[float], float]],
                       n_levels: Optional[int] = None) -> Callable[[float], np.ndarray]:
    """Callable t -> H(t) for drive signals injected into a circuit model.

    Each signal gives the absolute drive value at time t; the corresponding
    static drive in ``p`` is zeroed so nothing is double counted. The
    returned matrices are traceless (time-dependent identity offsets act as
    a global phase only).
    """
    zeroed = {_DRIVE_ZERO_FIELD[name]: 0.0 for name in signals}
    base_params = replace(p, **zeroed)
    if model == "approximate":
        base = build_approximate(base_params)
    elif model == "exact_two_level":
        base = build_exact_two_level(base_params)
    elif model == "fock":
        base = build_fock(base_params, n_levels if n_levels is not None else 8)
    else:
        raise DomainError(f"unknown model {model!r}")
    missing = [name for name in signals if name not in base.drive_dependence]
    if missing:
        raise DomainError(f"{p.qubit_kind} qubit has no drive slot for {missing}")
    static = base.traceless()
    couplings = [(base.drive_dependence[name], sig) for name, sig in signals.items()]

    def h_of_t(t: float) -> np.ndarray:
        H = static.copy()
        for op, sig in couplings:
            H += op * sig(t)
        return H

    return h_of_t


# ---------------------------------------------------------------------------
# reference parameter sets (used by the CLI and the shipped run configs)


def default_params(kind: str) -> QubitParams:
    """Built-in reference parameter set for each circuit.

    Quantities the reference sets leave open (E_LJ0 for the charge and flux
    circuits, E_L for the flux circuit) default to E_J. The lcjj set reuses
    the charge circuit with the inductive branch open (E_L = 0).
    """
    if kind == "charge":
        E_c = 7.55e-23
        E_J = 0.018 * E_c
        C_g = 0.68e-15
        return QubitParams("charge", E_c=E_c, E_J=E_J, C_g=C_g,
                           n_g=induced_charge(C_g, 1e-3), E_LJ0=E_J)
    if kind == "phase":
        E_J = 3.266e-23
        return QubitParams("phase", E_c=1e-4 * E_J, E_J=E_J, I_g=1e-3,
                           phi_zpf=0.0398)
    if kind == "flux":
        E_J = 6.017e-23
        return QubitParams("flux", E_c=1.711e-23, E_J=E_J, E_L=E_J,
                           phi_e=0.5, E_LJ0=E_J)
    if kind == "lcjj":
        E_c = 7.55e-23
        E_J = 0.018 * E_c
        return QubitParams("lcjj", E_c=E_c, E_J=E_J, E_L=0.0, C_g=0.68e-15,
                           E_LJ0=E_J)
    raise DomainError(f"unknown qubit kind {kind!r}")
