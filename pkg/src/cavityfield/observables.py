"""Photon statistics of the cavity field: number distribution, Mandel Q, squeezing.

Two routes exist for Q and the quadrature variances.  The exact route takes
any density matrix and evaluates ladder-operator moments on the truncated
number basis.  The single-manifold route evaluates the printed closed-form
expressions for one excitation manifold, keeping their unnormalized weights
exactly as stated; the two are compared, never blended.

Sign convention: Q < 0 means sub-Poissonian, s_x or s_p < 0 would mean
squeezing of that quadrature (see NOTES.md for the convention caveat).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import TruncationWarning, VacuumFieldError, ZeroDenominatorError
from .model import JointState, SystemParams
from .oracle import DensityMatrix

EDGE_POPULATION_LIMIT = 1e-8
_VACUUM_FLOOR = 1e-15

PAPER = "paper"
EXACT = "exact"

# invariant floors shared by both modes
_Q_FLOOR = -1.0 - 1e-12
_S_FLOOR = -1.0 - 1e-12


@dataclass(frozen=True)
class FieldMoments:
    """Ladder-operator moments <a>, <a^dag>, <a^dag a>, <a^2>, <a^dag^2 a^2>."""

    a_mean: complex
    adag_mean: complex
    n_mean: float
    a2_mean: complex
    n2_moment: float


def photon_number_distribution(rho: DensityMatrix, n: int) -> float:
    """p(n) = Re rho[n][n] for any retained number state."""
    if not 0 <= n < rho.dim:
        raise ValueError(f"n must lie in [0, {rho.dim - 1}], got {n}")
    return float(rho.elements[n, n].real)


def _warn_if_edge_populated(rho: DensityMatrix) -> None:
    edge = float(rho.elements[-1, -1].real)
    if edge > EDGE_POPULATION_LIMIT:
        warnings.warn(
            f"population {edge:.3e} at the basis edge; high moments are unreliable",
            TruncationWarning,
            stacklevel=3,
        )


def field_moments(rho: DensityMatrix) -> FieldMoments:
    """Moments from explicit ladder-operator matrix elements on the truncated basis."""
    _warn_if_edge_populated(rho)
    m = rho.elements
    diag = np.diagonal(m).real
    n = np.arange(rho.dim)
    n_mean = float(np.sum(n * diag))
    n2_moment = float(np.sum(n * (n - 1) * diag))
    # Tr(rho a) = sum_m sqrt(m) rho[m, m-1]; Tr(rho a a) analogous two steps down
    sub1 = np.diagonal(m, offset=-1)
    a_mean = complex(np.sum(np.sqrt(n[1:]) * sub1))
    sub2 = np.diagonal(m, offset=-2)
    a2_mean = complex(np.sum(np.sqrt(n[2:] * (n[2:] - 1.0)) * sub2))
    return FieldMoments(
        a_mean=a_mean,
        adag_mean=a_mean.conjugate(),
        n_mean=n_mean,
        a2_mean=a2_mean,
        n2_moment=n2_moment,
    )


def mandel_q(rho: DensityMatrix) -> float:
    """Q = (<a^dag^2 a^2> - <a^dag a>^2) / <a^dag a>; zero for a coherent field."""
    mom = field_moments(rho)
    if mom.n_mean <= _VACUUM_FLOOR:
        raise VacuumFieldError(f"mean photon number {mom.n_mean:.3e} leaves Q undefined")
    return (mom.n2_moment - mom.n_mean**2) / mom.n_mean


def mandel_q_paper(state: JointState, n: int) -> float:
    """Single-manifold Q with the unnormalized manifold weights kept as printed.

    Q = [n(n-1) A + (n+1) n B] / [n A + (n+1) B] - [n A + (n+1) B]
    with A = |ca[n]|^2 and B = |cb[n]|^2.
    """
    if not 0 <= n <= state.params.n_max:
        raise ValueError(f"manifold index must lie in [0, {state.params.n_max}], got {n}")
    a = abs(state.ca[n]) ** 2
    b = abs(state.cb[n]) ** 2
    mean = n * a + (n + 1) * b
    if mean <= _VACUUM_FLOOR:
        raise ZeroDenominatorError(f"manifold {n} mean photon number {mean:.3e} is zero")
    second = n * (n - 1) * a + (n + 1) * n * b
    return second / mean - mean


def squeezing_parameters(rho: DensityMatrix) -> tuple[float, float]:
    """Normally ordered quadrature parameters (s_x, s_p); 0 for a coherent field.

    s_x = 2<a^dag a> + <a^2> + <a^dag^2> - <a>^2 - <a^dag>^2 - 2<a><a^dag>
    s_p flips the signs of the four interference terms.
    """
    mom = field_moments(rho)
    fluct = 2.0 * (mom.a2_mean.real - (mom.a_mean**2).real)
    offset = 2.0 * mom.n_mean - 2.0 * abs(mom.a_mean) ** 2
    return (offset + fluct, offset - fluct)


def squeezing_paper(state: JointState, n: int) -> tuple[float, float]:
    """Single-manifold (s_x, s_p) from the printed expectations.

    Uses <a^2> = <a^dag^2> = 0, <a^dag a> = n A + (n+1) B and
    <a> = sqrt(n+1) conj(ca[n]) cb[n], all with unnormalized weights.
    """
    if not 0 <= n <= state.params.n_max:
        raise ValueError(f"manifold index must lie in [0, {state.params.n_max}], got {n}")
    a = abs(state.ca[n]) ** 2
    b = abs(state.cb[n]) ** 2
    mean = n * a + (n + 1) * b
    a_mean = np.sqrt(n + 1.0) * np.conj(state.ca[n]) * state.cb[n]
    fluct = -2.0 * (a_mean**2).real
    offset = 2.0 * mean - 2.0 * abs(a_mean) ** 2
    return (float(offset + fluct), float(offset - fluct))


@dataclass(frozen=True)
class ObservableReport:
    """Named observable values for one (mode, parameter set) pair.

    Recognized keys: ``p(n)``, ``mean_n``, ``n2_moment``, ``a_mean``,
    ``a2_mean``, ``Q``, ``s_x``, ``s_p``.  Bounds that hold for any physical
    field state are enforced at construction.
    """

    mode: str
    values: dict[str, float | complex]
    params: SystemParams

    def __post_init__(self) -> None:
        if self.mode not in (PAPER, EXACT):
            raise ValueError(f"mode must be 'paper' or 'exact', got {self.mode!r}")
        v = self.values
        for key, value in v.items():
            if key.startswith("p("):
                if not -1e-12 <= float(np.real(value)) <= 1.0 + 1e-12:
                    raise ValueError(f"{key} = {value} outside [0, 1]")
        if "mean_n" in v and float(np.real(v["mean_n"])) < -1e-12:
            raise ValueError(f"mean_n = {v['mean_n']} is negative")
        if "Q" in v and float(np.real(v["Q"])) < _Q_FLOOR:
            raise ValueError(f"Q = {v['Q']} below -1")
        for key in ("s_x", "s_p"):
            if key in v and float(np.real(v[key])) < _S_FLOOR:
                raise ValueError(f"{key} = {v[key]} below -1")


def exact_report(rho: DensityMatrix, params: SystemParams, n: int | None = None) -> ObservableReport:
    """Full-matrix observables; p(n) included when a number state is named."""
    mom = field_moments(rho)
    s_x, s_p = squeezing_parameters(rho)
    values: dict[str, float | complex] = {
        "mean_n": mom.n_mean,
        "n2_moment": mom.n2_moment,
        "a_mean": mom.a_mean,
        "a2_mean": mom.a2_mean,
        "s_x": s_x,
        "s_p": s_p,
    }
    if mom.n_mean > _VACUUM_FLOOR:
        values["Q"] = mandel_q(rho)
    if n is not None:
        values[f"p({n})"] = photon_number_distribution(rho, n)
    return ObservableReport(mode=EXACT, values=values, params=params)


def paper_report(state: JointState, n: int) -> ObservableReport:
    """Single-manifold observables from the printed closed-form expressions."""
    a = abs(state.ca[n]) ** 2
    b = abs(state.cb[n]) ** 2
    s_x, s_p = squeezing_paper(state, n)
    values: dict[str, float | complex] = {
        "mean_n": n * a + (n + 1) * b,
        "s_x": s_x,
        "s_p": s_p,
    }
    try:
        values["Q"] = mandel_q_paper(state, n)
    except ZeroDenominatorError:
        pass
    return ObservableReport(mode=PAPER, values=values, params=state.params)
