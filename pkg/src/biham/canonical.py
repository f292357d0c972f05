"""Hamiltonian and Lagrangian of the coupled dynamics, and consistency checks.

The bilinear ``H = <phibar|h|psi>`` generates the non-Hermitian equations of
motion through Hamilton's canonical equations for the pairs
``(q_k, p_k) = (i*hbar*psi_k, phibar_k)``:

    d(i*hbar*psi_k)/dt = dH/dphibar_k,    dphibar_k/dt = -dH/d(i*hbar*psi_k).

Because ``H`` is bilinear, its partials are exact; ``phibar_k`` and ``psi_k``
are treated as independent coordinates throughout.  The same value can be
computed in modal form as ``sum_j E_j cbar_j c_j``, which is manifestly
conserved for time-independent generators.
"""

from dataclasses import dataclass

import numpy as np

from .dynamics import ModalCoordinates, StatePair, schrodinger_rhs
from .spectral import BiorthogonalSystem, as_square_matrix, biorthogonal_decompose

FD_STEP = 1e-6


@dataclass
class CanonicalReport:
    """Consistency summary for one (generator, state) instance.

    ``rhs_mismatch`` compares the canonical equations against the direct
    Schrodinger/adjoint right-hand sides; ``grad_mismatch`` compares the
    analytic partials of the Hamiltonian against central finite differences.
    """

    hamiltonian_value: complex
    modal_value: complex
    rhs_mismatch: float
    grad_mismatch: float


def hamiltonian_value(h, state: StatePair) -> complex:
    """Hamiltonian ``<phibar|h|psi>`` of a state pair."""
    h = as_square_matrix(h)
    return complex(state.phibar @ h @ state.psi)


def modal_hamiltonian(system: BiorthogonalSystem, modal: ModalCoordinates) -> complex:
    """Hamiltonian ``sum_j E_j cbar_j c_j`` in canonical modal coordinates."""
    return complex(np.sum(system.eigenvalues * modal.cbar * modal.c))


def hamiltonian_gradients(h, state: StatePair):
    """Analytic partials ``dH/dphibar_k = (h psi)_k`` and ``dH/dpsi_k = (phibar h)_k``."""
    h = as_square_matrix(h)
    return h @ state.psi, state.phibar @ h


def canonical_rhs(h, state: StatePair):
    """Time derivatives of (psi, phibar) obtained from Hamilton's equations.

    Returns ``(dpsi_dt, dphibar_dt)``.  These must coincide with the direct
    non-Hermitian right-hand sides ``-(i/hbar) h psi`` and ``+(i/hbar) phibar h``.
    """
    d_phibar, d_psi = hamiltonian_gradients(h, state)
    ih = 1j * state.hbar
    dpsi_dt = d_phibar / ih
    dphibar_dt = -d_psi / ih
    return dpsi_dt, dphibar_dt


def rhs_mismatch(h, state: StatePair) -> float:
    """Max componentwise gap between canonical equations and the direct dynamics."""
    can_psi, can_phibar = canonical_rhs(h, state)
    dir_psi, dir_phibar = schrodinger_rhs(h, state.psi, state.phibar, state.hbar)
    return float(max(np.max(np.abs(can_psi - dir_psi)),
                     np.max(np.abs(can_phibar - dir_phibar))))


def lagrangian_value(h, state: StatePair, psidot) -> complex:
    """Lagrangian ``i*hbar <phibar|psidot> - <phibar|h|psi>``.

    Vanishes on-shell, i.e. when ``psidot = -(i/hbar) h psi``.
    """
    h = as_square_matrix(h)
    psidot = np.asarray(psidot, dtype=complex)
    return complex(1j * state.hbar * (state.phibar @ psidot) - state.phibar @ h @ state.psi)


def gradient_fd_mismatch(h, state: StatePair, step: float = FD_STEP) -> float:
    """Worst relative gap between analytic partials of H and central differences.

    Real and imaginary parts of every ``phibar_k`` and ``psi_k`` are perturbed
    separately; since H is holomorphic in each variable, the two probes must
    both reproduce the same complex partial.  The gap is measured relative to
    the largest gradient component.
    """
    h = as_square_matrix(h)
    psi = np.array(state.psi)
    phibar = np.array(state.phibar)
    d_phibar, d_psi = hamiltonian_gradients(h, state)
    scale = max(float(np.max(np.abs(d_phibar))), float(np.max(np.abs(d_psi))), 1.0)

    def value(pb, ps):
        return pb @ h @ ps

    worst = 0.0
    n = psi.shape[0]
    for k in range(n):
        e = np.zeros(n, dtype=complex)
        e[k] = 1.0
        for probe in (1.0, 1j):
            # central difference along the Re (probe=1) or Im (probe=i) axis
            num = (value(phibar + step * probe * e, psi)
                   - value(phibar - step * probe * e, psi)) / (2 * step)
            worst = max(worst, abs(num - probe * d_phibar[k]))
            num = (value(phibar, psi + step * probe * e)
                   - value(phibar, psi - step * probe * e)) / (2 * step)
            worst = max(worst, abs(num - probe * d_psi[k]))
    return worst / scale


def canonical_report(h, state: StatePair, system: BiorthogonalSystem = None,
                     fd_step: float = FD_STEP) -> CanonicalReport:
    """Build the full consistency report for one (generator, state) pair."""
    h = as_square_matrix(h)
    if system is None:
        system = biorthogonal_decompose(h)
    modal = ModalCoordinates.from_state(system, state)
    return CanonicalReport(
        hamiltonian_value=hamiltonian_value(h, state),
        modal_value=modal_hamiltonian(system, modal),
        rhs_mismatch=rhs_mismatch(h, state),
        grad_mismatch=gradient_fd_mismatch(h, state, step=fd_step),
    )
