"""Integrator cross-check and the three density-matrix constructors."""

import math

import numpy as np
import pytest

from cavityfield import (
    DensityMatrix,
    EmptyManifoldError,
    JointState,
    StepSizeError,
    SystemParams,
    coherent_state_vector,
    evolve_closed_form,
    integrate_schrodinger,
    manifold_density_matrix,
    paper_density_matrix,
    reduced_density_matrix,
    validate_density,
)
from cavityfield.oracle import EXACT_TRACE, PAPER_EQ5, SINGLE_MANIFOLD


def max_amplitude_gap(a: JointState, b: JointState) -> float:
    return max(float(np.max(np.abs(a.ca - b.ca))), float(np.max(np.abs(a.cb - b.cb))))


class TestIntegrateSchrodinger:
    def test_matches_closed_form_on_detuned_case(self):
        # the integrator exists to certify the closed form; this is its own contract
        p = SystemParams(g=1.0, delta=2.0, alpha=1.0, t=1.7)
        assert max_amplitude_gap(integrate_schrodinger(p), evolve_closed_form(p)) < 1e-8

    def test_vacuum_transfer_half_period(self):
        p = SystemParams(g=1.0, delta=0.0, alpha=0.0, t=math.pi / 2)
        st = integrate_schrodinger(p, dt=1e-3)
        assert abs(st.cb[0]) == pytest.approx(1.0, abs=1e-8)

    def test_t_zero_returns_initial_condition(self):
        p = SystemParams(g=1.3, delta=-0.4, alpha=0.6 + 0.1j, t=0.0)
        st = integrate_schrodinger(p)
        np.testing.assert_array_equal(st.ca, coherent_state_vector(p.n_max, p.alpha))
        np.testing.assert_array_equal(st.cb, np.zeros(p.n_max + 1))

    def test_oversized_step_refused(self):
        p = SystemParams(g=1.0, delta=0.0, alpha=0.5, t=1.0)
        with pytest.raises(StepSizeError):
            integrate_schrodinger(p, dt=0.5)

    def test_non_positive_step_refused(self):
        p = SystemParams(g=1.0, delta=0.0, alpha=0.5, t=1.0)
        with pytest.raises(StepSizeError):
            integrate_schrodinger(p, dt=0.0)

    def test_random_parameter_agreement(self):
        rng = np.random.default_rng(37)
        worst = 0.0
        for _ in range(10):
            p = SystemParams(
                g=float(rng.uniform(0.05, 2.0)),
                delta=float(rng.uniform(-2.0, 2.0)),
                alpha=complex(rng.uniform(-1.2, 1.2), rng.uniform(-1.2, 1.2)),
                t=float(rng.uniform(0.0, 5.0)),
            )
            worst = max(worst, max_amplitude_gap(integrate_schrodinger(p), evolve_closed_form(p)))
        assert worst < 1e-8

    def test_norm_preserved(self):
        p = SystemParams(g=0.9, delta=1.4, alpha=1.0, t=4.0)
        assert integrate_schrodinger(p).norm() == pytest.approx(1.0, abs=1e-7)


class TestReducedDensityMatrix:
    def test_t_zero_equals_coherent_projector(self):
        p = SystemParams(alpha=0.5, t=0.0)
        rho = reduced_density_matrix(evolve_closed_form(p))
        c = np.zeros(p.dim, dtype=np.complex128)
        c[: p.n_max + 1] = coherent_state_vector(p.n_max, 0.5)
        np.testing.assert_allclose(rho.elements, np.outer(c, c.conj()), atol=1e-14)
        assert rho.provenance == EXACT_TRACE

    def test_full_transfer_gives_one_photon_state(self):
        p = SystemParams(g=1.0, delta=0.0, alpha=0.0, t=math.pi / 2)
        rho = reduced_density_matrix(evolve_closed_form(p))
        want = np.zeros((p.dim, p.dim), dtype=np.complex128)
        want[1, 1] = 1.0
        np.testing.assert_allclose(rho.elements, want, atol=1e-10)

    def test_diagonal_identity(self):
        # diag[k] = |ca[k]|^2 + |cb[k-1]|^2 (cb index is shifted by one photon)
        st = evolve_closed_form(SystemParams(g=1.1, delta=0.7, alpha=1.3, t=2.0))
        rho = reduced_density_matrix(st)
        dim = st.params.dim
        for k in range(dim):
            expect = (abs(st.ca[k]) ** 2 if k < dim - 1 else 0.0) + (
                abs(st.cb[k - 1]) ** 2 if k > 0 else 0.0
            )
            assert rho.elements[k, k].real == pytest.approx(expect, abs=1e-12)

    def test_trace_scales_with_squared_norm(self):
        p = SystemParams(g=1.0, delta=0.0, alpha=0.7, t=1.0)
        st = evolve_closed_form(p)
        scaled = JointState(params=p, ca=0.5 * st.ca, cb=0.5 * st.cb)
        tr = float(np.trace(reduced_density_matrix(scaled).elements).real)
        assert tr == pytest.approx(0.25, abs=1e-12)

    def test_valid_over_random_parameters(self):
        rng = np.random.default_rng(101)
        for _ in range(10):
            p = SystemParams(
                g=float(rng.uniform(0.1, 2.0)),
                delta=float(rng.uniform(-2.0, 2.0)),
                alpha=complex(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)),
                t=float(rng.uniform(0.0, 6.0)),
            )
            diag = validate_density(reduced_density_matrix(evolve_closed_form(p)))
            assert diag.trace_error < 1e-10
            assert diag.hermiticity_error < 1e-12
            assert diag.min_diagonal > -1e-12


class TestPaperDensityMatrix:
    def test_vacuum_t_zero(self):
        p = SystemParams(alpha=0.0, t=0.0, n_max=4)
        rho = paper_density_matrix(evolve_closed_form(p))
        want = np.zeros((p.dim, p.dim), dtype=np.complex128)
        want[0, 0] = 1.0
        np.testing.assert_array_equal(rho.elements, want)
        assert rho.provenance == PAPER_EQ5

    def test_t_zero_differs_from_exact_off_diagonal(self):
        p = SystemParams(alpha=0.5, t=0.0)
        st = evolve_closed_form(p)
        paper = paper_density_matrix(st).elements
        exact = reduced_density_matrix(st).elements
        np.testing.assert_allclose(np.diagonal(paper), np.diagonal(exact), atol=1e-14)
        # nearest-neighbor coherences: zero here (cb=0), nonzero for the exact trace
        assert np.max(np.abs(np.diagonal(paper, offset=1))) == 0.0
        assert np.max(np.abs(np.diagonal(exact, offset=1))) > 0.05

    def test_quarter_period_hand_case(self):
        # ca0 = cos(pi/4), cb0 = -i sin(pi/4): coherence +i/2 on |0><1|
        p = SystemParams(g=1.0, delta=0.0, alpha=0.0, t=math.pi / 4, n_max=8)
        rho = paper_density_matrix(evolve_closed_form(p)).elements
        assert rho[0, 0] == pytest.approx(0.5, abs=1e-12)
        assert rho[1, 1] == pytest.approx(0.5, abs=1e-12)
        assert rho[0, 1] == pytest.approx(0.5j, abs=1e-12)
        assert rho[1, 0] == pytest.approx(-0.5j, abs=1e-12)

    def test_remains_valid_state(self):
        diag = validate_density(
            paper_density_matrix(
                evolve_closed_form(SystemParams(g=1.0, delta=-0.8, alpha=1.1, t=2.7))
            )
        )
        assert diag.trace_error < 1e-10
        assert diag.hermiticity_error < 1e-12
        assert diag.min_diagonal > -1e-12


class TestManifoldDensityMatrix:
    def test_t_zero_is_number_state(self):
        st = evolve_closed_form(SystemParams(alpha=0.9, t=0.0))
        rho = manifold_density_matrix(st, 2)
        assert rho.elements[2, 2] == pytest.approx(1.0, abs=1e-14)
        assert float(np.sum(np.abs(rho.elements))) == pytest.approx(1.0, abs=1e-13)
        assert rho.provenance == SINGLE_MANIFOLD
        assert rho.manifold == 2

    def test_full_transfer(self):
        st = evolve_closed_form(SystemParams(g=1.0, delta=0.0, alpha=0.0, t=math.pi / 2))
        rho = manifold_density_matrix(st, 0)
        assert rho.elements[1, 1] == pytest.approx(1.0, abs=1e-12)

    def test_quarter_period_half_half(self):
        st = evolve_closed_form(SystemParams(g=1.0, delta=0.0, alpha=0.0, t=math.pi / 4))
        rho = manifold_density_matrix(st, 0)
        assert rho.elements[0, 0] == pytest.approx(0.5, abs=1e-12)
        assert rho.elements[1, 1] == pytest.approx(0.5, abs=1e-12)

    def test_empty_manifold_rejected(self):
        # vacuum input never populates manifold 3
        st = evolve_closed_form(SystemParams(g=1.0, delta=0.0, alpha=0.0, t=1.0))
        with pytest.raises(EmptyManifoldError):
            manifold_density_matrix(st, 3)

    def test_tiny_but_nonzero_weight_still_normalizes(self):
        # weight ~1e-41 is fine; only true underflow is refused
        st = evolve_closed_form(SystemParams(g=1.0, delta=0.0, alpha=0.02, t=1.0))
        rho = manifold_density_matrix(st, 10)
        total = rho.elements[10, 10].real + rho.elements[11, 11].real
        assert total == pytest.approx(1.0, abs=1e-12)

    def test_index_out_of_range(self):
        st = evolve_closed_form(SystemParams(alpha=0.5, t=1.0))
        with pytest.raises(ValueError):
            manifold_density_matrix(st, st.params.n_max + 1)


class TestValidateDensity:
    def test_two_level_maximally_mixed(self):
        rho = DensityMatrix(
            elements=0.5 * np.eye(2, dtype=np.complex128), provenance=EXACT_TRACE
        )
        diag = validate_density(rho)
        assert (diag.trace_error, diag.hermiticity_error, diag.min_diagonal) == (0.0, 0.0, 0.5)

    def test_detects_hermiticity_violation(self):
        m = 0.5 * np.eye(2, dtype=np.complex128)
        m[0, 1] += 1.0
        rho = DensityMatrix(elements=m, provenance=EXACT_TRACE)
        assert validate_density(rho).hermiticity_error == pytest.approx(1.0, abs=1e-15)


class TestDensityMatrixType:
    def test_unknown_provenance_rejected(self):
        with pytest.raises(ValueError):
            DensityMatrix(elements=np.eye(3, dtype=np.complex128), provenance="guesswork")

    def test_manifold_tag_only_for_single_manifold(self):
        with pytest.raises(ValueError):
            DensityMatrix(elements=np.eye(3, dtype=np.complex128), provenance=EXACT_TRACE, manifold=1)
        with pytest.raises(ValueError):
            DensityMatrix(elements=np.eye(3, dtype=np.complex128), provenance=SINGLE_MANIFOLD)

    def test_non_square_rejected(self):
        with pytest.raises(ValueError):
            DensityMatrix(elements=np.zeros((2, 3), dtype=np.complex128), provenance=EXACT_TRACE)

    def test_dim_and_n_max(self):
        rho = DensityMatrix(elements=np.eye(6, dtype=np.complex128) / 6, provenance=EXACT_TRACE)
        assert rho.dim == 6
        assert rho.n_max == 4

    def test_elements_frozen(self):
        rho = DensityMatrix(elements=np.eye(2, dtype=np.complex128), provenance=EXACT_TRACE)
        with pytest.raises(ValueError):
            rho.elements[0, 0] = 5.0
