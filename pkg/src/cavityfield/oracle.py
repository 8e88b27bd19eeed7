"""Independent integrator and reduced-field density matrices.

The fixed-step Runge-Kutta integrator advances the same pairwise equations of
motion the closed form solves, without using that solution anywhere.  Its only
job is to certify ``model.evolve_closed_form`` to tight tolerance, so it takes
no shortcuts: the oscillating phases stay inside the right-hand side and every
manifold is stepped with the same global dt.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .errors import EmptyManifoldError, IntegrationDivergedError, StepSizeError
from .model import JointState, SystemParams, coherent_state_vector, rabi_frequency

# provenance tags carried by every density matrix
EXACT_TRACE = "exact-trace"
PAPER_EQ5 = "paper-eq5"
SINGLE_MANIFOLD = "single-manifold"

_PROVENANCES = (EXACT_TRACE, PAPER_EQ5, SINGLE_MANIFOLD)

NORM_DRIFT_LIMIT = 1e-6
# raise only when the weight is too close to denormal range to renormalize;
# callers wanting full relative accuracy should stay above ~1e-30
_EMPTY_MANIFOLD_FLOOR = 1e-300


@dataclass(frozen=True)
class DensityMatrix:
    """Field density matrix on number states |0> .. |n_max + 1> with provenance.

    ``provenance`` records which constructor produced the matrix:
    ``exact-trace`` (partial trace over the atom), ``paper-eq5`` (literal
    four-term expansion that keeps only the nearest-neighbor cross terms), or
    ``single-manifold`` (renormalized two-level diagonal, with ``manifold``
    giving the n it came from).
    """

    elements: np.ndarray = field(repr=False)
    provenance: str
    manifold: int | None = None

    def __post_init__(self) -> None:
        m = self.elements
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 2:
            raise ValueError(f"elements must be a square matrix of dim >= 2, got {m.shape}")
        if self.provenance not in _PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")
        if (self.provenance == SINGLE_MANIFOLD) != (self.manifold is not None):
            raise ValueError("manifold index is set exactly for single-manifold matrices")
        self.elements.flags.writeable = False

    @property
    def dim(self) -> int:
        return self.elements.shape[0]

    @property
    def n_max(self) -> int:
        return self.dim - 2


@dataclass(frozen=True)
class DensityDiagnostics:
    """Cheap validity record: |trace - 1|, max |rho - rho^H|, min diagonal."""

    trace_error: float
    hermiticity_error: float
    min_diagonal: float


@njit(cache=True)
def _rk4_pairs(ca, cb, coupling, delta, t, n_steps):
    # classical RK4; blocks are independent but share the global step
    h = t / n_steps
    for s in range(n_steps):
        tau = s * h
        p1 = np.exp(1j * delta * tau)
        p2 = np.exp(1j * delta * (tau + 0.5 * h))
        p3 = np.exp(1j * delta * (tau + h))
        for j in range(ca.shape[0]):
            c = -1j * coupling[j]
            a0 = ca[j]
            b0 = cb[j]
            ka1 = c * p1 * b0
            kb1 = c * np.conj(p1) * a0
            ka2 = c * p2 * (b0 + 0.5 * h * kb1)
            kb2 = c * np.conj(p2) * (a0 + 0.5 * h * ka1)
            ka3 = c * p2 * (b0 + 0.5 * h * kb2)
            kb3 = c * np.conj(p2) * (a0 + 0.5 * h * ka2)
            ka4 = c * p3 * (b0 + h * kb3)
            kb4 = c * np.conj(p3) * (a0 + h * ka3)
            ca[j] = a0 + (h / 6.0) * (ka1 + 2.0 * ka2 + 2.0 * ka3 + ka4)
            cb[j] = b0 + (h / 6.0) * (kb1 + 2.0 * kb2 + 2.0 * kb3 + kb4)
    return ca, cb


def integrate_schrodinger(params: SystemParams, dt: float | None = None) -> JointState:
    """Integrate d/dt ca[n] = -i g sqrt(n+1) e^{+i delta t} cb[n] (and partner) by RK4.

    The partner equation is d/dt cb[n] = -i g sqrt(n+1) e^{-i delta t} ca[n]:
    the phase orientation under which the closed-form amplitudes are the
    solution.  dt defaults to 1e-3 / max(1, Omega_{n_max}); anything above
    min(0.01 / Omega_{n_max}, 0.01) is refused rather than silently inaccurate.
    """
    omega_top = rabi_frequency(params.n_max, params.g, params.delta)
    if dt is None:
        dt = 1e-3 / max(1.0, omega_top)
    if dt <= 0:
        raise StepSizeError(f"dt must be > 0, got {dt}")
    limit = min(0.01 / omega_top, 0.01)
    if dt > limit:
        raise StepSizeError(f"dt = {dt:.3e} exceeds accuracy bound {limit:.3e}")

    ca = coherent_state_vector(params.n_max, params.alpha)
    cb = np.zeros_like(ca)
    if params.t > 0.0:
        n_steps = max(1, math.ceil(params.t / dt))
        coupling = params.g * np.sqrt(np.arange(1.0, params.n_max + 2.0))
        ca, cb = _rk4_pairs(ca, cb, coupling, params.delta, params.t, n_steps)

    state = JointState(params=params, ca=ca, cb=cb)
    drift = abs(state.norm() - 1.0)
    if drift > NORM_DRIFT_LIMIT:
        raise IntegrationDivergedError(f"norm drifted by {drift:.3e} > {NORM_DRIFT_LIMIT:.0e}")
    return state


def _field_chains(state: JointState) -> tuple[np.ndarray, np.ndarray]:
    # field amplitudes sorted by atomic level, padded to dim = n_max + 2
    dim = state.params.dim
    upper = np.zeros(dim, dtype=np.complex128)
    lower = np.zeros(dim, dtype=np.complex128)
    upper[: dim - 1] = state.ca
    lower[1:] = state.cb
    return upper, lower


def reduced_density_matrix(state: JointState) -> DensityMatrix:
    """Exact partial trace over the atom: rho = |psi_up><psi_up| + |psi_low><psi_low|."""
    upper, lower = _field_chains(state)
    rho = np.outer(upper, upper.conj()) + np.outer(lower, lower.conj())
    return DensityMatrix(elements=rho, provenance=EXACT_TRACE)


def paper_density_matrix(state: JointState) -> DensityMatrix:
    """Literal four-term expansion, keeping only the |n><n+1| cross terms.

    Equivalent to dephasing the exact state across manifolds: the result is a
    mixture of the per-manifold pure field states, so it stays a valid state
    while differing from the exact partial trace in its off-diagonals.
    """
    dim = state.params.dim
    rho = np.zeros((dim, dim), dtype=np.complex128)
    ca, cb = state.ca, state.cb
    idx = np.arange(dim - 1)
    rho[idx, idx] += np.abs(ca) ** 2
    rho[idx + 1, idx + 1] += np.abs(cb) ** 2
    rho[idx, idx + 1] += ca * cb.conj()
    rho[idx + 1, idx] += ca.conj() * cb
    return DensityMatrix(elements=rho, provenance=PAPER_EQ5)


def manifold_density_matrix(state: JointState, n: int) -> DensityMatrix:
    """Renormalized diagonal state of manifold n on |n> and |n+1>."""
    if not 0 <= n <= state.params.n_max:
        raise ValueError(f"manifold index must lie in [0, {state.params.n_max}], got {n}")
    w_a = abs(state.ca[n]) ** 2
    w_b = abs(state.cb[n]) ** 2
    weight = w_a + w_b
    if weight <= _EMPTY_MANIFOLD_FLOOR:
        raise EmptyManifoldError(f"manifold {n} carries weight {weight:.3e}")
    dim = state.params.dim
    rho = np.zeros((dim, dim), dtype=np.complex128)
    rho[n, n] = w_a / weight
    rho[n + 1, n + 1] = w_b / weight
    return DensityMatrix(elements=rho, provenance=SINGLE_MANIFOLD, manifold=n)


def validate_density(rho: DensityMatrix) -> DensityDiagnostics:
    m = rho.elements
    trace_error = abs(float(np.trace(m).real) - 1.0) + abs(float(np.trace(m).imag))
    hermiticity_error = float(np.max(np.abs(m - m.conj().T)))
    min_diagonal = float(np.min(np.diagonal(m).real))
    return DensityDiagnostics(
        trace_error=trace_error,
        hermiticity_error=hermiticity_error,
        min_diagonal=min_diagonal,
    )
