"""Photon statistics: distribution, moments, Mandel Q, squeezing, both routes."""

import math

import numpy as np
import pytest

from cavityfield import (
    DensityMatrix,
    ObservableReport,
    SystemParams,
    TruncationWarning,
    VacuumFieldError,
    ZeroDenominatorError,
    evolve_closed_form,
    exact_report,
    field_moments,
    mandel_q,
    mandel_q_paper,
    manifold_density_matrix,
    paper_density_matrix,
    paper_report,
    photon_number_distribution,
    reduced_density_matrix,
    squeezing_parameters,
    squeezing_paper,
)
from cavityfield.oracle import EXACT_TRACE

EXP_M025 = 0.7788007830714049  # e^(-0.25)
EXP_M1 = 0.36787944117144233  # e^(-1)


def fock_state(k: int, dim: int) -> DensityMatrix:
    m = np.zeros((dim, dim), dtype=np.complex128)
    m[k, k] = 1.0
    return DensityMatrix(elements=m, provenance=EXACT_TRACE)


def diagonal_state(weights, dim: int) -> DensityMatrix:
    m = np.zeros((dim, dim), dtype=np.complex128)
    for k, w in enumerate(weights):
        m[k, k] = w
    return DensityMatrix(elements=m, provenance=EXACT_TRACE)


def coherent_rho(alpha: complex) -> DensityMatrix:
    return reduced_density_matrix(evolve_closed_form(SystemParams(alpha=alpha, t=0.0)))


class TestPhotonNumberDistribution:
    def test_vacuum(self):
        assert photon_number_distribution(fock_state(0, 4), 0) == 1.0

    def test_coherent_ground_weight(self):
        rho = coherent_rho(0.5)
        assert photon_number_distribution(rho, 0) == pytest.approx(EXP_M025, abs=1e-12)

    def test_normalization_for_every_constructor(self):
        st = evolve_closed_form(SystemParams(g=1.0, delta=0.3, alpha=0.8, t=1.0))
        for rho in (
            reduced_density_matrix(st),
            paper_density_matrix(st),
            manifold_density_matrix(st, 1),
        ):
            total = math.fsum(
                photon_number_distribution(rho, n) for n in range(rho.dim)
            )
            assert total == pytest.approx(1.0, abs=1e-10)

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            photon_number_distribution(fock_state(0, 4), 4)


class TestFieldMoments:
    def test_coherent_first_moments(self):
        mom = field_moments(coherent_rho(0.5))
        assert mom.a_mean == pytest.approx(0.5, abs=1e-12)
        assert mom.adag_mean == pytest.approx(0.5, abs=1e-12)
        assert mom.n_mean == pytest.approx(0.25, abs=1e-12)
        assert mom.a2_mean == pytest.approx(0.25, abs=1e-12)

    def test_one_photon_state(self):
        mom = field_moments(fock_state(1, 5))
        assert mom.n_mean == 1.0
        assert mom.n2_moment == 0.0
        assert mom.a_mean == 0.0

    def test_half_half_manifold(self):
        mom = field_moments(diagonal_state([0.5, 0.5], 4))
        assert mom.n_mean == pytest.approx(0.5, abs=1e-15)
        assert mom.a_mean == 0.0
        assert mom.n2_moment == 0.0

    def test_edge_population_warns(self):
        with pytest.warns(TruncationWarning):
            field_moments(fock_state(3, 4))


class TestMandelQ:
    def test_coherent_is_poissonian(self):
        assert mandel_q(coherent_rho(1.0)) == pytest.approx(0.0, abs=1e-10)

    def test_fock_state_floor(self):
        assert mandel_q(fock_state(2, 6)) == -1.0

    def test_half_half_against_two_point_oracle(self):
        # brute force on the 2-point distribution {0: 1/2, 1: 1/2}
        weights = [0.5, 0.5]
        mean = sum(k * w for k, w in enumerate(weights))
        second = sum(k * k * w for k, w in enumerate(weights))
        want = (second - mean * mean - mean) / mean
        assert want == -0.5
        assert mandel_q(diagonal_state(weights, 4)) == pytest.approx(want, abs=1e-12)

    def test_vacuum_rejected(self):
        with pytest.raises(VacuumFieldError):
            mandel_q(fock_state(0, 4))

    def test_never_below_fock_floor(self):
        rng = np.random.default_rng(5)
        for _ in range(25):
            w = rng.random(6)
            w /= w.sum()
            assert mandel_q(diagonal_state(w, 8)) >= -1.0 - 1e-12


class TestMandelQPaper:
    def test_t_zero_frozen_value(self):
        # printed formula at t=0, n=1 collapses to -|c_1(0)|^2 = -e^(-1) at alpha=1
        st = evolve_closed_form(SystemParams(alpha=1.0, t=0.0))
        assert mandel_q_paper(st, 1) == pytest.approx(-EXP_M1, abs=1e-12)

    def test_degenerate_manifold_zero(self):
        st = evolve_closed_form(SystemParams(alpha=1.0, t=0.0))
        with pytest.raises(ZeroDenominatorError):
            mandel_q_paper(st, 0)

    def test_matches_hand_expression(self):
        st = evolve_closed_form(SystemParams(g=1.0, delta=0.5, alpha=1.2, t=0.9))
        n = 2
        a = abs(st.ca[n]) ** 2
        b = abs(st.cb[n]) ** 2
        mean = n * a + (n + 1) * b
        want = (n * (n - 1) * a + (n + 1) * n * b) / mean - mean
        assert mandel_q_paper(st, n) == pytest.approx(want, rel=1e-13)

    def test_index_out_of_range(self):
        st = evolve_closed_form(SystemParams(alpha=0.5, t=1.0))
        with pytest.raises(ValueError):
            mandel_q_paper(st, -1)


class TestSqueezing:
    def test_vacuum(self):
        assert squeezing_parameters(fock_state(0, 4)) == (0.0, 0.0)

    def test_coherent_baseline(self):
        s_x, s_p = squeezing_parameters(coherent_rho(0.5))
        assert s_x == pytest.approx(0.0, abs=1e-10)
        assert s_p == pytest.approx(0.0, abs=1e-10)

    def test_one_photon_state(self):
        assert squeezing_parameters(fock_state(1, 5)) == (2.0, 2.0)

    def test_paper_route_t_zero(self):
        # cb = 0 kills <a>; s_x = s_p = 2 n |c_n(0)|^2, frozen at 2/e for n=1, alpha=1
        st = evolve_closed_form(SystemParams(alpha=1.0, t=0.0))
        s_x, s_p = squeezing_paper(st, 1)
        assert s_x == pytest.approx(2 * EXP_M1, abs=1e-12)
        assert s_p == pytest.approx(2 * EXP_M1, abs=1e-12)

    def test_paper_route_vacuum_manifold(self):
        st = evolve_closed_form(SystemParams(alpha=0.7, t=0.0))
        assert squeezing_paper(st, 0) == (0.0, 0.0)

    def test_paper_route_never_negative_on_resonance(self):
        rng = np.random.default_rng(17)
        for _ in range(30):
            st = evolve_closed_form(
                SystemParams(g=1.0, delta=0.0, alpha=float(rng.uniform(0.05, 2.5)), t=float(rng.uniform(0, 5)))
            )
            for n in (1, 2):
                s_x, s_p = squeezing_paper(st, n)
                assert s_x >= -1e-12
                assert s_p >= -1e-12


class TestPhaseInvariance:
    def test_global_phase_leaves_scalars_alone(self):
        # p(n), Q, and s_x + s_p ignore the phase of alpha; only <a>-type moments move
        base = SystemParams(g=1.0, delta=0.4, alpha=1.1, t=1.3)
        spun = SystemParams(g=1.0, delta=0.4, alpha=1.1 * np.exp(0.9j), t=1.3)
        r1 = reduced_density_matrix(evolve_closed_form(base))
        r2 = reduced_density_matrix(evolve_closed_form(spun))
        for n in range(6):
            assert photon_number_distribution(r1, n) == pytest.approx(
                photon_number_distribution(r2, n), abs=1e-12
            )
        assert mandel_q(r1) == pytest.approx(mandel_q(r2), abs=1e-11)
        s1 = squeezing_parameters(r1)
        s2 = squeezing_parameters(r2)
        assert s1[0] + s1[1] == pytest.approx(s2[0] + s2[1], abs=1e-11)


class TestReports:
    def test_exact_report_keys(self):
        p = SystemParams(g=1.0, delta=0.0, alpha=0.8, t=1.0)
        rho = reduced_density_matrix(evolve_closed_form(p))
        rep = exact_report(rho, p, n=0)
        assert rep.mode == "exact"
        assert set(rep.values) == {"mean_n", "n2_moment", "a_mean", "a2_mean", "s_x", "s_p", "Q", "p(0)"}

    def test_paper_report_keys(self):
        st = evolve_closed_form(SystemParams(g=1.0, delta=0.0, alpha=0.8, t=1.0))
        rep = paper_report(st, 1)
        assert rep.mode == "paper"
        assert {"mean_n", "s_x", "s_p", "Q"} <= set(rep.values)

    def test_paper_report_omits_undefined_q(self):
        st = evolve_closed_form(SystemParams(alpha=0.8, t=0.0))
        rep = paper_report(st, 0)
        assert "Q" not in rep.values

    def test_bounds_enforced(self):
        p = SystemParams(alpha=0.5)
        with pytest.raises(ValueError):
            ObservableReport(mode="exact", values={"Q": -1.5}, params=p)
        with pytest.raises(ValueError):
            ObservableReport(mode="exact", values={"p(0)": 1.5}, params=p)
        with pytest.raises(ValueError):
            ObservableReport(mode="exact", values={"mean_n": -0.2}, params=p)
        with pytest.raises(ValueError):
            ObservableReport(mode="paper", values={"s_x": -1.2}, params=p)

    def test_unknown_mode_rejected(self):
        with pytest.raises(ValueError):
            ObservableReport(mode="mixed", values={}, params=SystemParams(alpha=0.5))
