"""Evolution of a right state and its conjugate field.

The right state follows ``i*hbar d|psi>/dt = h|psi>`` while the conjugate
field follows the adjoint dynamics ``-i*hbar d<phibar|/dt = <phibar| h``.
The pair makes the overlap ``<phibar|psi>`` a constant of motion for any
``h``, Hermitian or not; the familiar norm conservation is recovered when
``h`` is Hermitian and ``phibar = psi^H``.

Two propagators are provided: exact eigenbasis propagation through a
:class:`~biham.spectral.BiorthogonalSystem`, and a fixed-step classical RK4
integrator for cross-validation (global error O(dt^4), no adaptive stepping).
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import NonFinite, StepTooLarge, ZeroModalCoefficient
from .spectral import BiorthogonalSystem, as_square_matrix

DEFAULT_HBAR = 1.0

# dt * ||h|| / hbar above this rejects the step outright
MAX_STEP_FRACTION = 0.5

# |<b_j|psi>| below this treats mode j as absent
ABSENT_MODE_CUTOFF = 1e-12


def _state_vector(v, n=None) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    if v.ndim != 1:
        raise ValueError(f"expected a 1-D state vector, got shape {v.shape}")
    if n is not None and v.shape[0] != n:
        raise ValueError(f"expected length {n}, got {v.shape[0]}")
    if not np.all(np.isfinite(v)):
        raise ValueError("state components must be finite")
    return v


@dataclass
class StatePair:
    """Right state ``psi`` and conjugate row ``phibar`` at time ``t``.

    The components carry the full canonical phase-space content: the
    coordinates are ``i*hbar*psi_k`` and the momenta ``phibar_k``, so the
    phase-space dimension is ``2n``.  Arrays are stored read-only; evolution
    returns new instances.
    """

    psi: np.ndarray
    phibar: np.ndarray
    t: float = 0.0
    hbar: float = DEFAULT_HBAR

    def __post_init__(self):
        psi = _state_vector(self.psi)
        phibar = _state_vector(self.phibar, psi.shape[0])
        for a in (psi, phibar):
            a.setflags(write=False)
        self.psi = psi
        self.phibar = phibar
        if self.hbar <= 0:
            raise ValueError("hbar must be positive")

    @property
    def n(self) -> int:
        return self.psi.shape[0]


@dataclass
class ModalCoordinates:
    """Modal coefficients ``c_j``, ``cbar_j`` and modal constants ``|C_j|^2``.

    Along exact evolution each product ``cbar_j * c_j`` is a constant of
    motion equal to ``csq_j``.
    """

    c: np.ndarray
    cbar: np.ndarray
    csq: np.ndarray = field(default=None)

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=complex)
        self.cbar = np.asarray(self.cbar, dtype=complex)
        if self.csq is None:
            self.csq = np.real(self.cbar * self.c)
        self.csq = np.asarray(self.csq, dtype=float)

    @classmethod
    def from_state(cls, system: BiorthogonalSystem, state: StatePair) -> "ModalCoordinates":
        c = expand_state(system, state.psi)
        cbar = state.phibar @ system.right
        return cls(c=c, cbar=cbar)


def schrodinger_rhs(h, psi, phibar, hbar: float = DEFAULT_HBAR):
    """Right-hand sides ``dpsi/dt = -(i/hbar) h psi`` and ``dphibar/dt = +(i/hbar) phibar h``."""
    return (-1j / hbar) * (h @ psi), (1j / hbar) * (phibar @ h)


def expand_state(system: BiorthogonalSystem, psi) -> np.ndarray:
    """Modal coefficients ``c_j = <b_j|psi>`` of a state in the right eigenbasis."""
    psi = _state_vector(psi, system.n)
    return system.left.conj().T @ psi


def default_modal_constants(system: BiorthogonalSystem, psi,
                            cutoff: float = ABSENT_MODE_CUTOFF) -> np.ndarray:
    """Modal constants ``|c_j|^2`` of ``psi``, zeroing modes below ``cutoff``.

    This matches the convenient real-spectrum initialization
    ``|cbar_j(0)| = |c_j(0)|``.
    """
    c = expand_state(system, psi)
    csq = np.abs(c) ** 2
    csq[np.abs(c) <= cutoff] = 0.0
    return csq


def conjugate_field(system: BiorthogonalSystem, psi, csq) -> np.ndarray:
    """Conjugate field ``phibar = sum_j (csq_j / <b_j|psi>) b_j^H`` as a row.

    Modes with ``csq_j = 0`` are simply absent from the sum.

    Raises
    ------
    ZeroModalCoefficient
        If ``csq_j > 0`` for a mode with ``|<b_j|psi>|`` at or below the
        absent-mode cutoff.
    """
    psi = _state_vector(psi, system.n)
    csq = np.asarray(csq, dtype=float)
    if csq.shape != (system.eigenvalues.shape[0],):
        raise ValueError("one modal constant per mode required")
    if np.any(csq < 0):
        raise ValueError("modal constants must be nonnegative")
    c = expand_state(system, psi)
    occupied = csq > 0
    missing = occupied & (np.abs(c) <= ABSENT_MODE_CUTOFF)
    if np.any(missing):
        j = int(np.flatnonzero(missing)[0])
        raise ZeroModalCoefficient(
            f"mode {j} has csq={csq[j]:.3g} but |<b_{j}|psi>|={abs(c[j]):.3e}; "
            f"the requested mode is absent from psi"
        )
    cbar = np.zeros_like(c)
    cbar[occupied] = csq[occupied] / c[occupied]
    return system.left.conj() @ cbar


def evolve_exact(system: BiorthogonalSystem, state0: StatePair, t: float) -> StatePair:
    """Propagate a state pair by duration ``t`` through the eigenbasis.

    ``c_j(t) = c_j(0) exp(-i E_j t / hbar)`` and
    ``cbar_j(t) = cbar_j(0) exp(+i E_j t / hbar)``; the overlap is preserved
    up to roundoff for arbitrary (also complex) spectra.
    """
    hbar = state0.hbar
    phase = np.exp(-1j * system.eigenvalues * t / hbar)
    c = expand_state(system, state0.psi) * phase
    cbar = (state0.phibar @ system.right) / phase
    psi = system.right @ c
    phibar = system.left.conj() @ cbar
    return StatePair(psi=psi, phibar=phibar, t=state0.t + t, hbar=hbar)


def rk4_step_pair(h_at, t: float, psi: np.ndarray, phibar: np.ndarray,
                  dt: float, hbar: float):
    """One classical RK4 step of the coupled (psi, phibar) system.

    ``h_at(t)`` returns the (possibly time-dependent) generator at time ``t``.
    """
    def f(tt, ps, pb):
        h = h_at(tt)
        return (-1j / hbar) * (h @ ps), (1j / hbar) * (pb @ h)

    k1p, k1b = f(t, psi, phibar)
    k2p, k2b = f(t + 0.5 * dt, psi + 0.5 * dt * k1p, phibar + 0.5 * dt * k1b)
    k3p, k3b = f(t + 0.5 * dt, psi + 0.5 * dt * k2p, phibar + 0.5 * dt * k2b)
    k4p, k4b = f(t + dt, psi + dt * k3p, phibar + dt * k3b)
    psi_next = psi + (dt / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
    phibar_next = phibar + (dt / 6.0) * (k1b + 2.0 * k2b + 2.0 * k3b + k4b)
    return psi_next, phibar_next


def _check_step(h, dt: float, hbar: float) -> None:
    if dt <= 0:
        raise ValueError("dt must be positive")
    hnorm = np.linalg.norm(h, 2)
    if dt * hnorm / hbar > MAX_STEP_FRACTION:
        raise StepTooLarge(
            f"dt*||h||/hbar = {dt * hnorm / hbar:.3g} exceeds {MAX_STEP_FRACTION}"
        )


def rk4_trajectory(h, state0: StatePair, dt: float, steps: int,
                   record_every: int = 1) -> list:
    """Fixed-step RK4 trajectory of the coupled system under constant ``h``.

    Returns the recorded :class:`StatePair` snapshots (always including the
    initial and final states).

    Raises
    ------
    StepTooLarge
        If ``dt * ||h|| / hbar`` exceeds the stability guard.
    NonFinite
        If any component overflows, as growing modes of a complex spectrum
        eventually do; no rescaling is attempted.
    """
    h = as_square_matrix(h)
    if steps < 1:
        raise ValueError("steps must be positive")
    if record_every < 1:
        raise ValueError("record_every must be positive")
    hbar = state0.hbar
    _check_step(h, dt, hbar)

    def h_at(_t):
        return h

    psi, phibar = state0.psi, state0.phibar
    out = [state0]
    # overflow is a detected condition here, not a warning
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(steps):
            psi, phibar = rk4_step_pair(h_at, state0.t + k * dt, psi, phibar, dt, hbar)
            if not (np.all(np.isfinite(psi)) and np.all(np.isfinite(phibar))):
                raise NonFinite(
                    f"state overflowed at step {k + 1} (t={state0.t + (k + 1) * dt:.6g})"
                )
            if (k + 1) % record_every == 0 or k + 1 == steps:
                out.append(StatePair(psi=psi, phibar=phibar,
                                     t=state0.t + (k + 1) * dt, hbar=hbar))
    return out


def evolve_rk4(h, state0: StatePair, dt: float, steps: int) -> StatePair:
    """Final state of :func:`rk4_trajectory` after ``steps`` fixed RK4 steps."""
    return rk4_trajectory(h, state0, dt, steps, record_every=steps)[-1]


def overlap(state: StatePair) -> complex:
    """Conserved overlap ``<phibar|psi> = sum_k phibar_k psi_k`` (no conjugation)."""
    return complex(np.sum(state.phibar * state.psi))


def right_norm(state: StatePair) -> float:
    """Norm ``<psi|psi>`` of the right state; not conserved for non-Hermitian ``h``."""
    return float(np.real(np.vdot(state.psi, state.psi)))
