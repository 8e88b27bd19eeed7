"""Closed-form dynamics of one driven two-level atom coupled to a single cavity mode.

Conventions used throughout the package:

* The atom starts in its upper level with the cavity in a coherent state
  ``|alpha>``; this is the only initial condition the model supports.
* Excitation manifold ``n`` couples the pair ``|upper, n>`` and
  ``|lower, n+1>``.  ``ca[n]`` is the amplitude on ``|upper, n>`` and
  ``cb[n]`` the amplitude on ``|lower, n+1>``, for ``n = 0 .. n_max``.
* Time is measured so that ``g * t`` is dimensionless; ``g`` defaults to 1
  in the command-line layer and ``t`` carries the duration.
* The effective pair frequency is ``Omega_n = sqrt(delta**2 + 4 g**2 (n+1))``
  (positive root).  Amplitudes evolve as

      ca[n](t) = c_n(0) * (cos(Omega_n t / 2) - i (delta/Omega_n) sin(Omega_n t / 2)) * exp(+i delta t / 2)
      cb[n](t) = -c_n(0) * (2 i g sqrt(n+1) / Omega_n) * sin(Omega_n t / 2) * exp(-i delta t / 2)

  which solves  d/dt ca[n] = -i g sqrt(n+1) exp(+i delta t) cb[n]  together
  with  d/dt cb[n] = -i g sqrt(n+1) exp(-i delta t) ca[n];
  ``oracle.integrate_schrodinger`` checks exactly that.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammainc, gammaln

from .errors import DegenerateParametersError, TruncationTailError

# Coherent-state weight allowed to fall outside the retained number basis.
TAIL_BUDGET = 1e-12


def default_n_max(alpha: complex) -> int:
    """Automatic photon-number cutoff for a coherent field of amplitude alpha."""
    a = abs(alpha)
    return max(16, math.ceil(a * a + 10.0 * a + 20.0))


def truncation_tail(alpha: complex, n_max: int) -> float:
    """Poisson weight sum_{n > n_max - 1} |c_n(0)|^2 left above the cutoff."""
    # regularized lower incomplete gamma == upper tail of a Poisson pmf
    return float(gammainc(n_max, abs(alpha) ** 2))


@dataclass(frozen=True)
class SystemParams:
    """Physical and numerical parameters of one run.

    ``epsilon`` is the classical-drive coupling; the strong-driving model is
    valid for ``epsilon`` much larger than both ``g`` and ``delta``.  It is
    recorded for reporting only and never enters the dynamics.
    """

    g: float = 1.0
    delta: float = 0.0
    alpha: complex = 0.0 + 0.0j
    t: float = 0.0
    n_max: int | None = None
    epsilon: float = 0.0

    def __post_init__(self) -> None:
        for name in ("g", "delta", "t", "epsilon"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v!r}")
        a = complex(self.alpha)
        if not (math.isfinite(a.real) and math.isfinite(a.imag)):
            raise ValueError(f"alpha must be finite, got {a!r}")
        object.__setattr__(self, "alpha", a)
        if self.g < 0:
            raise ValueError(f"g must be >= 0, got {self.g}")
        if self.t < 0:
            raise ValueError(f"t must be >= 0, got {self.t}")
        if self.epsilon < 0:
            raise ValueError(f"epsilon must be >= 0, got {self.epsilon}")
        if self.g == 0.0 and self.delta == 0.0:
            # every Omega_n vanishes and later expressions divide by it
            raise DegenerateParametersError("g = 0 and delta = 0 leave no pair frequency")
        if self.n_max is None:
            object.__setattr__(self, "n_max", default_n_max(a))
        else:
            if self.n_max < 1:
                raise ValueError(f"n_max must be >= 1, got {self.n_max}")
            tail = truncation_tail(a, self.n_max)
            if not tail < TAIL_BUDGET:
                raise TruncationTailError(
                    f"n_max = {self.n_max} leaves coherent tail {tail:.3e} >= {TAIL_BUDGET:.0e}"
                    f" for |alpha| = {abs(a):.4g}; need roughly n_max >= {default_n_max(a)}"
                )

    @property
    def dim(self) -> int:
        """Field-space dimension: number states |0> .. |n_max + 1>."""
        return self.n_max + 2


def rabi_frequency(n: int, g: float, delta: float) -> float:
    """Pair frequency Omega_n = +sqrt(delta^2 + 4 g^2 (n+1)) of manifold n."""
    if n < 0:
        raise ValueError(f"manifold index must be >= 0, got {n}")
    omega = math.sqrt(delta * delta + 4.0 * g * g * (n + 1))
    if omega == 0.0:
        raise DegenerateParametersError("g = 0 and delta = 0 leave no pair frequency")
    return omega


def coherent_amplitude(n: int, alpha: complex) -> complex:
    """Initial manifold amplitude c_n(0) = exp(-|alpha|^2 / 2) alpha^n / sqrt(n!).

    Magnitude is assembled in log space so large n cannot overflow the
    factorial; the phase factor (alpha/|alpha|)^n is applied separately.
    """
    if n < 0:
        raise ValueError(f"manifold index must be >= 0, got {n}")
    a = abs(alpha)
    if a == 0.0:
        return 1.0 + 0.0j if n == 0 else 0.0 + 0.0j
    log_mag = -0.5 * a * a + n * math.log(a) - 0.5 * gammaln(n + 1)
    phase = (alpha / a) ** n
    return math.exp(log_mag) * phase


def coherent_state_vector(n_max: int, alpha: complex) -> np.ndarray:
    """Amplitudes c_n(0) for n = 0 .. n_max as one complex array."""
    n = np.arange(n_max + 1)
    a = abs(alpha)
    if a == 0.0:
        out = np.zeros(n_max + 1, dtype=np.complex128)
        out[0] = 1.0
        return out
    log_mag = -0.5 * a * a + n * math.log(a) - 0.5 * gammaln(n + 1)
    return np.exp(log_mag) * (alpha / a) ** n


@dataclass(frozen=True)
class JointState:
    """Amplitudes of the joint atom-field state at one instant.

    ``ca[n]`` multiplies ``|upper, n>`` and ``cb[n]`` multiplies
    ``|lower, n+1>``.  Arrays are frozen; build a new state instead of
    mutating one.
    """

    params: SystemParams
    ca: np.ndarray = field(repr=False)
    cb: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        n = self.params.n_max + 1
        if self.ca.shape != (n,) or self.cb.shape != (n,):
            raise ValueError(
                f"amplitude arrays must have shape ({n},), got {self.ca.shape} and {self.cb.shape}"
            )
        self.ca.flags.writeable = False
        self.cb.flags.writeable = False

    def norm(self) -> float:
        """Total probability, 1 up to roundoff for unitary evolution."""
        return float(np.sum(np.abs(self.ca) ** 2) + np.sum(np.abs(self.cb) ** 2))


def evolve_closed_form(params: SystemParams) -> JointState:
    """Evolve the fixed initial condition for time params.t, manifold by manifold."""
    n = np.arange(params.n_max + 1)
    c0 = coherent_state_vector(params.n_max, params.alpha)
    omega = np.sqrt(params.delta**2 + 4.0 * params.g**2 * (n + 1.0))
    half = 0.5 * omega * params.t
    cos_h = np.cos(half)
    sin_h = np.sin(half)
    ca = c0 * (cos_h - 1j * (params.delta / omega) * sin_h) * np.exp(0.5j * params.delta * params.t)
    cb = (
        -c0
        * (2j * params.g * np.sqrt(n + 1.0) / omega)
        * sin_h
        * np.exp(-0.5j * params.delta * params.t)
    )
    return JointState(params=params, ca=ca, cb=cb)


def manifold_probability(state: JointState, n: int) -> float:
    """Population |ca[n]|^2 + |cb[n]|^2 of manifold n; conserved in time."""
    if not 0 <= n <= state.params.n_max:
        raise ValueError(f"manifold index must lie in [0, {state.params.n_max}], got {n}")
    return float(abs(state.ca[n]) ** 2 + abs(state.cb[n]) ** 2)
