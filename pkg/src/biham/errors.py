"""Exception types shared across the toolkit.

Every error carries a short machine-readable ``code`` so runner frontends can
map failures to stable identifiers without parsing messages.
"""


class ComputeError(Exception):
    """A numerical or physical precondition failed during a computation."""

    code = "compute_error"


class NotDiagonalizable(ComputeError):
    """The matrix is (numerically) defective: no biorthogonal eigenbasis."""

    code = "not_diagonalizable"


class ZeroModalCoefficient(ComputeError):
    """A mode with nonzero modal constant is absent from the supplied state."""

    code = "zero_modal_coefficient"


class StepTooLarge(ComputeError):
    """The integrator step violates the stability guard dt*||h||/hbar <= 0.5."""

    code = "step_too_large"


class NonFinite(ComputeError):
    """A trajectory overflowed to inf/nan (growing modes of a complex spectrum)."""

    code = "non_finite"


class OutsideRealRegime(ComputeError):
    """Two-level parameters left the real-spectrum region z**2 > x**2 + y**2."""

    code = "outside_real_regime"


class InsufficientSnapshots(ComputeError):
    """Fewer snapshots than the central time difference requires."""

    code = "insufficient_snapshots"


class ConfigError(Exception):
    """A scenario configuration failed schema or physics validation."""

    code = "config_error"


class IoError(Exception):
    """Reading an input or writing an artifact failed."""

    code = "io_error"
