"""Exception and warning types shared across the package."""


class DegenerateParametersError(ValueError):
    """g = 0 and delta = 0 together make every Rabi frequency vanish."""


class TruncationTailError(ValueError):
    """Requested photon-number cutoff leaves too much coherent-state weight outside."""


class StepSizeError(ValueError):
    """Integrator step exceeds the stability/accuracy bound."""


class IntegrationDivergedError(RuntimeError):
    """Integrator lost unitarity beyond the accepted norm drift."""


class EmptyManifoldError(ValueError):
    """Requested excitation manifold carries (numerically) zero population."""


class VacuumFieldError(ValueError):
    """Statistic undefined for a field with vanishing mean photon number."""


class ZeroDenominatorError(ValueError):
    """Single-manifold statistic hit a vanishing normalization term."""


class WignerConvergenceError(RuntimeError):
    """Displaced-number series failed its tail criterion within the term budget."""


class PhaseSpaceTruncationError(ValueError):
    """Phase-space point too far out for the retained number basis."""


class WignerBoundError(RuntimeError):
    """A computed quasiprobability exceeded the universal 2/pi bound."""


class TruncationWarning(UserWarning):
    """Noticeable population at the edge of the truncated number basis."""
