"""Wigner quasiprobability over phase space, by two unrelated routes.

The production route expands W(beta) = (2/pi) sum_k (-1)^k <beta,k| rho |beta,k>
in displaced number states, with the displaced-state overlaps written through
associated Laguerre polynomials evaluated by their three-term recurrence (the
alternating factorial sum cancels catastrophically already near degree 20).

The oracle route never sees a Laguerre polynomial: it builds the displacement
matrix by exponentiating beta a^dag - conj(beta) a on the truncated basis and
takes the displaced-parity trace (2/pi) Tr[D(-beta) rho D(beta) P].  Agreement
of the two routes is part of the acceptance gate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm
from scipy.special import gammaln

from .errors import (
    PhaseSpaceTruncationError,
    WignerBoundError,
    WignerConvergenceError,
)
from .oracle import DensityMatrix

TWO_OVER_PI = 2.0 / math.pi

# series tail: stop after this many consecutive terms below the floor
TERM_FLOOR = 1e-14
STAGNANT_TERMS = 3
IMAG_RESIDUE_LIMIT = 1e-10
BOUND_SLACK = 1e-9

_CHUNK = 2048


def _laguerre_degrees(max_degree: int, order: int, x: np.ndarray) -> np.ndarray:
    """L_d^{(order)}(x) for all degrees d = 0 .. max_degree, stacked on axis 0.

    Upward three-term recurrence in the degree:
    (d+1) L_{d+1} = (2d + 1 + order - x) L_d - (d + order) L_{d-1}.
    """
    out = np.empty((max_degree + 1,) + x.shape, dtype=np.float64)
    out[0] = 1.0
    if max_degree >= 1:
        out[1] = 1.0 + order - x
    for d in range(1, max_degree):
        out[d + 1] = ((2.0 * d + 1.0 + order - x) * out[d] - (d + order) * out[d - 1]) / (d + 1.0)
    return out


def laguerre_assoc(m: int, k: int, x):
    """Associated Laguerre L_m^{(k)}(x) for x >= 0; k may reach down to -m.

    Negative orders use the identity
    L_m^{(-j)}(x) = (-x)^j ((m-j)! / m!) L_{m-j}^{(j)}(x),  valid for m >= j.
    Accepts scalar or array x.
    """
    if m < 0:
        raise ValueError(f"degree must be >= 0, got {m}")
    if k < -m:
        raise ValueError(f"order {k} below -degree = {-m}")
    arr = np.asarray(x, dtype=np.float64)
    if np.any(arr < 0):
        raise ValueError("x must be >= 0")
    if k < 0:
        j = -k
        ratio = math.exp(gammaln(m - j + 1) - gammaln(m + 1))
        value = (-arr) ** j * ratio * _laguerre_degrees(m - j, j, arr)[m - j]
    else:
        value = _laguerre_degrees(m, k, arr)[m]
    if np.isscalar(x) or arr.ndim == 0:
        return float(value)
    return value


def displaced_fock_overlap(beta: complex, k: int, n: int) -> complex:
    """<beta, k | n> where |beta, k> = D(beta)|k>.

    For n >= k this is exp(-|beta|^2/2) sqrt(k!/n!) conj(beta)^(n-k)
    L_k^{(n-k)}(|beta|^2); the n < k half comes from the negative-order
    Laguerre identity and lands on the mirrored expression with (-beta).
    """
    if k < 0 or n < 0:
        raise ValueError(f"state labels must be >= 0, got k={k}, n={n}")
    beta = complex(beta)
    r = abs(beta)
    if r == 0.0:
        return 1.0 + 0.0j if k == n else 0.0 + 0.0j
    x = r * r
    d, q = (k, n - k) if n >= k else (n, k - n)
    mag = math.exp(-0.5 * x + 0.5 * (gammaln(d + 1) - gammaln(d + q + 1)) + q * math.log(r))
    unit = beta.conjugate() / r if n >= k else -beta / r
    return mag * unit**q * laguerre_assoc(d, q, x)


def _auto_k_max(dim: int, x_max: float) -> int:
    # enough unconditional terms that the displaced humps cannot hide a revival
    return max(dim, math.ceil(0.3 * x_max + 3.0 * math.sqrt(x_max) + 6.0))


def _series_values(rho: np.ndarray, beta: np.ndarray, k_max: int) -> np.ndarray:
    """Series Wigner values for a flat array of phase-space points."""
    dim = rho.shape[0]
    k_hard = 4 * k_max
    lg = gammaln(np.arange(1.0, k_hard + dim + 3.0))  # lg[i] = ln(i!)
    rho_t = np.ascontiguousarray(rho.T)
    out = np.empty(beta.shape[0], dtype=np.float64)

    for start in range(0, beta.shape[0], _CHUNK):
        b = beta[start : start + _CHUNK]
        r = np.abs(b)
        x = r * r
        e_half = np.exp(-0.5 * x)
        safe_r = np.where(r > 0.0, r, 1.0)
        unit_conj = np.conj(b) / safe_r
        unit_neg = -b / safe_r

        # power and Laguerre tables grow lazily with k; orders never exceed k_hard
        r_pow = [np.ones_like(r)]
        pow_conj = [np.ones_like(b)]
        pow_neg = [np.ones_like(b)]
        lag_by_order: list[np.ndarray] = []

        def order_tables(q: int) -> None:
            while len(r_pow) <= q:
                r_pow.append(r_pow[-1] * r)
                pow_conj.append(pow_conj[-1] * unit_conj)
                pow_neg.append(pow_neg[-1] * unit_neg)
            while len(lag_by_order) <= q:
                lag_by_order.append(_laguerre_degrees(dim - 1, len(lag_by_order), x))

        acc = np.zeros(b.shape[0], dtype=np.float64)
        max_imag = 0.0
        stagnant = 0
        overlaps = np.empty((dim, b.shape[0]), dtype=np.complex128)
        converged = False
        for k in range(k_hard + 1):
            order_tables(max(k, dim - 1))
            for n in range(dim):
                d, q = (k, n - k) if n >= k else (n, k - n)
                pref = math.exp(0.5 * (lg[d] - lg[d + q])) if q else 1.0
                real_part = pref * e_half * r_pow[q] * lag_by_order[q][d]
                overlaps[n] = real_part * (pow_conj[q] if n >= k else pow_neg[q])
            weighted = rho_t @ overlaps
            term = np.einsum("ng,ng->g", weighted, overlaps.conj())
            max_imag = max(max_imag, float(np.max(np.abs(term.imag))))
            acc += (1.0 - 2.0 * (k & 1)) * term.real
            if k >= k_max:
                if float(np.max(np.abs(term))) < TERM_FLOOR:
                    stagnant += 1
                    if stagnant >= STAGNANT_TERMS:
                        converged = True
                        break
                else:
                    stagnant = 0
        if not converged:
            worst = int(np.argmax(np.abs(term)))
            bad = b[worst]
            raise WignerConvergenceError(
                f"series tail above {TERM_FLOOR:.0e} after {k_hard} terms at "
                f"beta = {bad.real:.6g}{bad.imag:+.6g}j; raise k_max or n_max"
            )
        if max_imag > IMAG_RESIDUE_LIMIT:
            raise WignerBoundError(
                f"imaginary residue {max_imag:.3e} exceeds {IMAG_RESIDUE_LIMIT:.0e}; "
                "input matrix is not Hermitian enough"
            )
        out[start : start + _CHUNK] = TWO_OVER_PI * acc
    return out


def wigner_series(rho: DensityMatrix, beta: complex, k_max: int | None = None) -> float:
    """W(beta) from the displaced-number series."""
    if k_max is None:
        k_max = _auto_k_max(rho.dim, abs(beta) ** 2)
    elif k_max < rho.n_max + 1:
        raise ValueError(f"k_max must be >= n_max + 1 = {rho.n_max + 1}, got {k_max}")
    value = _series_values(rho.elements, np.array([complex(beta)]), k_max)
    return float(value[0])


def wigner_parity_oracle(rho: DensityMatrix, beta: complex) -> float:
    """W(beta) = (2/pi) Tr[D(-beta) rho D(beta) P] on the truncated basis.

    D(beta) comes from scipy's scaling-and-squaring matrix exponential of
    beta a^dag - conj(beta) a; no Laguerre machinery is involved.
    """
    beta = complex(beta)
    if abs(beta) ** 2 > rho.n_max / 4.0:
        raise PhaseSpaceTruncationError(
            f"|beta|^2 = {abs(beta) ** 2:.3g} > n_max/4 = {rho.n_max / 4.0:.3g}; "
            "displaced state would spill past the basis edge"
        )
    dim = rho.dim
    ladder = np.diag(np.sqrt(np.arange(1.0, dim)), k=1)  # annihilation operator
    generator = beta * ladder.conj().T - np.conj(beta) * ladder
    disp = expm(generator)
    parity = (1.0 - 2.0 * (np.arange(dim) & 1)).astype(np.float64)
    # D(-beta) = D(beta)^dagger: the generator is anti-Hermitian even truncated
    value = complex(np.trace(disp.conj().T @ rho.elements @ disp * parity[np.newaxis, :]))
    if abs(value.imag) > IMAG_RESIDUE_LIMIT:
        raise WignerBoundError(f"imaginary residue {abs(value.imag):.3e} in parity trace")
    return TWO_OVER_PI * value.real


@dataclass(frozen=True)
class GridWindow:
    """Rectangular phase-space window sampled on a square node lattice."""

    re_min: float = -3.5
    re_max: float = 3.5
    im_min: float = -3.5
    im_max: float = 3.5
    resolution: int = 141

    def __post_init__(self) -> None:
        if not (self.re_min < self.re_max and self.im_min < self.im_max):
            raise ValueError("window must have re_min < re_max and im_min < im_max")
        if self.resolution < 16:
            raise ValueError(f"resolution must be >= 16, got {self.resolution}")


@dataclass(frozen=True)
class WignerGrid:
    """W sampled on a window; values[i, j] belongs to re_axis[i] + 1j * im_axis[j]."""

    re_min: float
    re_max: float
    im_min: float
    im_max: float
    resolution: int
    values: np.ndarray = field(repr=False)
    rho_provenance: str
    manifold: int | None = None

    def __post_init__(self) -> None:
        expected = (self.resolution, self.resolution)
        if self.values.shape != expected:
            raise ValueError(f"values must have shape {expected}, got {self.values.shape}")
        self.values.flags.writeable = False

    def re_axis(self) -> np.ndarray:
        return np.linspace(self.re_min, self.re_max, self.resolution)

    def im_axis(self) -> np.ndarray:
        return np.linspace(self.im_min, self.im_max, self.resolution)

    def riemann_sum(self) -> float:
        dre = (self.re_max - self.re_min) / (self.resolution - 1)
        dim_ = (self.im_max - self.im_min) / (self.resolution - 1)
        return float(np.sum(self.values) * dre * dim_)


def wigner_grid(rho: DensityMatrix, window: GridWindow | None = None) -> WignerGrid:
    """Evaluate the series on every node; raises if any value breaks the 2/pi bound."""
    if window is None:
        window = GridWindow()
    re = np.linspace(window.re_min, window.re_max, window.resolution)
    im = np.linspace(window.im_min, window.im_max, window.resolution)
    beta = (re[:, np.newaxis] + 1j * im[np.newaxis, :]).ravel()
    x_max = float(np.max(np.abs(beta)) ** 2)
    values = _series_values(rho.elements, beta, _auto_k_max(rho.dim, x_max))
    worst = float(np.max(np.abs(values)))
    if worst > TWO_OVER_PI + BOUND_SLACK:
        raise WignerBoundError(f"|W| reached {worst:.12g} > 2/pi + {BOUND_SLACK:.0e}")
    return WignerGrid(
        re_min=window.re_min,
        re_max=window.re_max,
        im_min=window.im_min,
        im_max=window.im_max,
        resolution=window.resolution,
        values=values.reshape(window.resolution, window.resolution),
        rho_provenance=rho.provenance,
        manifold=rho.manifold,
    )


@dataclass(frozen=True)
class WignerMinimum:
    beta_at_min: complex
    w_min: float


def min_wigner(grid: WignerGrid) -> WignerMinimum:
    """Deepest node; exact ties resolve to the lexicographically first (re, im)."""
    flat = int(np.argmin(grid.values))  # C order scans im fastest within each re
    i, j = divmod(flat, grid.resolution)
    beta = complex(grid.re_axis()[i], grid.im_axis()[j])
    return WignerMinimum(beta_at_min=beta, w_min=float(grid.values[i, j]))
