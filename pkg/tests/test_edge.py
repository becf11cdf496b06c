import math

import numpy as np
import pytest
from scipy.optimize import brentq

from twedge import (
    DomainError,
    classify_spikes,
    compute_mu,
    compute_sigma,
    diagnose_class_G,
    edge_moment,
    from_atoms,
    from_eigenvalues,
    solve_c,
    solve_edge,
    stationarity_check,
)
from twedge.edge import CRITICAL, SUBCRITICAL, SUPERCRITICAL, EdgeParams

from conftest import random_measure

ID = from_eigenvalues([1.0])


def id_closed_forms(n, p):
    """(c, mu, sigma) for the identity covariance, from the closed forms."""
    gamma = math.sqrt(n / p)
    c = gamma / (1.0 + gamma)
    mu = (1.0 + 1.0 / gamma) ** 2
    sigma = ((1.0 + gamma) ** 4 / gamma**3) ** (1.0 / 3.0)
    return c, mu, sigma


class TestSolveC:
    def test_identity_square(self):
        assert solve_c(ID, 10, 10) == pytest.approx(0.5, abs=1e-14)

    def test_identity_aspect_four(self):
        c = solve_c(ID, 40, 10)
        assert c == pytest.approx(2.0 / 3.0, abs=1e-14)
        # oracle: substitute back into the moment equation
        assert edge_moment(ID, c, 2) == pytest.approx(4.0, rel=1e-13)

    def test_residual_contract(self, toeplitz_measure_50):
        for n in (100, 400):
            c = solve_c(toeplitz_measure_50, n, 50)
            r = n / 50
            assert abs(edge_moment(toeplitz_measure_50, c, 2) - r) <= 1e-12 * r

    def test_unique_root_from_random_brackets(self):
        rng = np.random.default_rng(17)
        H = random_measure(rng)
        n, p = 300, 100
        c_star = solve_c(H, n, p)
        pole = 1.0 / H.lambda_max
        for _ in range(100):
            lo = float(rng.uniform(0.0, c_star * 0.999))
            hi = float(rng.uniform(c_star * 1.001, pole * 0.9999))
            if edge_moment(H, hi, 2) < n / p:  # bracket must straddle the root
                continue
            c = solve_c(H, n, p, bracket=(lo, hi))
            assert c == pytest.approx(c_star, rel=1e-12)

    def test_bad_bracket_rejected(self):
        with pytest.raises(DomainError):
            solve_c(ID, 10, 10, bracket=(0.6, 0.9))
        with pytest.raises(DomainError):
            solve_c(ID, 10, 10, bracket=(0.4, 0.2))

    def test_bad_shapes_rejected(self):
        with pytest.raises(DomainError):
            solve_c(ID, 0, 10)


class TestClosedForms:
    def test_identity_random_shapes(self):
        rng = np.random.default_rng(23)
        for _ in range(20):
            p = int(rng.integers(2, 400))
            n = int(rng.integers(p, 4000))
            params = solve_edge(ID, n, p)
            c, mu, sigma = id_closed_forms(n, p)
            assert params.c == pytest.approx(c, rel=1e-10)
            assert params.mu == pytest.approx(mu, rel=1e-10)
            assert params.sigma == pytest.approx(sigma, rel=1e-10)

    def test_identity_square_values(self):
        params = solve_edge(ID, 25, 25)
        assert params.mu == pytest.approx(4.0, rel=1e-12)
        assert params.sigma == pytest.approx(2.0 ** (4.0 / 3.0), rel=1e-12)

    def test_mu_sigma_reference_toeplitz(self, toeplitz_measure_50):
        mu100 = compute_mu(toeplitz_measure_50, 100, 50, solve_c(toeplitz_measure_50, 100, 50))
        assert mu100 == pytest.approx(3.7297, abs=1e-4)
        sig400 = compute_sigma(toeplitz_measure_50, 400, 50, solve_c(toeplitz_measure_50, 400, 50))
        assert sig400 == pytest.approx(4.4288, abs=1e-4)

    def test_mu_sigma_reference_atoms(self, atoms_measure_100):
        params100 = solve_edge(atoms_measure_100, 100, 100)
        assert params100.mu == pytest.approx(24.703, abs=1e-3)
        assert params100.sigma == pytest.approx(21.871, abs=1e-3)
        params400 = solve_edge(atoms_measure_100, 400, 100)
        assert params400.mu == pytest.approx(16.417, abs=1e-3)
        assert params400.sigma == pytest.approx(21.257, abs=1e-3)


class TestStationarity:
    def test_identity_by_construction(self):
        params = EdgeParams(
            n=10, p=10, c=0.5, mu=4.0, sigma=2.0 ** (4.0 / 3.0), alpha1=0.5, gamma_sq=1.0
        )
        res = stationarity_check(ID, 10, 10, params)
        assert max(res) <= 1e-12

    def test_reference_models(self, toeplitz_measure_50, atoms_measure_100):
        for H, n, p in [
            (toeplitz_measure_50, 100, 50),
            (toeplitz_measure_50, 400, 50),
            (atoms_measure_100, 100, 100),
            (atoms_measure_100, 400, 100),
        ]:
            res = stationarity_check(H, n, p, solve_edge(H, n, p))
            assert max(res) <= 1e-9

    def test_random_measures(self):
        rng = np.random.default_rng(29)
        for _ in range(25):
            H = random_measure(rng)
            p = 100
            n = int(rng.uniform(1.0, 10.0) * p)
            res = stationarity_check(H, n, p, solve_edge(H, n, p))
            assert max(res) <= 1e-9


class TestOrderingBounds:
    def test_mu_above_inverse_c_above_lambda1(self):
        rng = np.random.default_rng(31)
        for _ in range(30):
            H = random_measure(rng)
            p = int(rng.integers(10, 200))
            n = int(rng.integers(p, 8 * p))
            params = solve_edge(H, n, p)
            assert params.mu > 1.0 / params.c > H.lambda_max

    def test_half_inverse_lambda1_lower_bound(self):
        rng = np.random.default_rng(37)
        for _ in range(30):
            H = random_measure(rng)
            p = int(rng.integers(10, 200))
            n = int(rng.integers(p, 8 * p))
            params = solve_edge(H, n, p)
            assert params.c >= 0.5 / H.lambda_max - 1e-14

    def test_centering_decreases_in_aspect_ratio(self, atoms_measure_100):
        p = 100
        mus = [solve_edge(atoms_measure_100, int(r * p), p).mu for r in (1, 1.5, 2, 4, 8, 16)]
        gaps = [mu - atoms_measure_100.lambda_max for mu in mus]
        assert all(b < a for a, b in zip(gaps, gaps[1:]))


class TestDiagnose:
    def test_identity_square_all_pass(self):
        report = diagnose_class_G(ID, 50, 50)
        assert report.passed
        assert report.alpha1_margin == pytest.approx(0.5, rel=1e-12)
        assert dict((c.name, c.passed) for c in report.checks) == {
            "aspect_ratio": True,
            "lambda1_bounded": True,
            "lambdap_above": True,
            "edge_margin": True,
            "atom_mass_bound": True,
        }

    def test_atom_bound_reference_model(self, atoms_measure_100):
        report = diagnose_class_G(atoms_measure_100, 100, 100)
        # arithmetic oracle for the analytic bound at nu=0.3, gamma=1
        assert report.atom_bound == pytest.approx(1.0 / (1.0 + math.sqrt(0.3)), rel=1e-12)
        assert report.alpha1 <= report.atom_bound + 1e-10
        assert report.passed

    def test_small_mass_spike_sits_at_atom_bound(self):
        # 49 unit eigenvalues plus one at 100: the top atom carries mass 0.02
        H = from_atoms([(100.0, 0.02), (1.0, 0.98)], 50)
        report = diagnose_class_G(H, 50, 50)
        # semi-analytic oracle: solve the moment equation directly in terms of
        # beta = 100 c / (1 - 100 c) with the unit-atom term included
        def equation(c):
            return (
                0.02 * (100 * c / (1 - 100 * c)) ** 2
                + 0.98 * (c / (1 - c)) ** 2
                - 1.0
            )
        c_oracle = brentq(equation, 1e-6, 0.01 - 1e-9, xtol=1e-15)
        assert report.alpha1 == pytest.approx(100.0 * c_oracle, rel=1e-10)
        # the edge margin itself is comfortable, the atom bound is the sharp one
        assert report.alpha1_margin == pytest.approx(0.124, abs=2e-3)
        assert report.atom_bound_slack < 1e-3
        assert report.passed

    def test_threshold_failures_reported_not_raised(self):
        report = diagnose_class_G(ID, 5, 10)
        assert not report.passed
        failed = {c.name for c in report.checks if not c.passed}
        assert "aspect_ratio" in failed

    def test_user_thresholds(self):
        H = from_atoms([(10.0, 0.5), (1.0, 0.5)], 10)
        report = diagnose_class_G(H, 20, 10, lambda1_max=5.0, lambdap_min=2.0)
        failed = {c.name for c in report.checks if not c.passed}
        assert {"lambda1_bounded", "lambdap_above"} <= failed


class TestSpikes:
    def test_identity_base_reference_threshold(self):
        report = classify_spikes(ID, 100, 50, [1.2, 1.0 + 1.0 / math.sqrt(2.0), 3.0])
        assert report.threshold == pytest.approx(1.0 + 1.0 / math.sqrt(2.0), rel=1e-12)
        regimes = [s.regime for s in report.spikes]
        assert regimes == [SUBCRITICAL, CRITICAL, SUPERCRITICAL]
        assert report.k_critical == 1
        assert report.has_supercritical

    def test_six_digit_threshold_input_is_critical(self):
        report = classify_spikes(ID, 100, 50, [1.70711])
        assert report.spikes[0].regime == CRITICAL

    def test_contraction_of_enlarged_critical_point(self):
        report = classify_spikes(ID, 100, 50, [1.2])
        assert report.c_tilde is not None
        assert report.c_tilde < report.c_base

    def test_contraction_random_instances(self):
        rng = np.random.default_rng(41)
        for _ in range(30):
            H = random_measure(rng)
            p = int(rng.integers(10, 120))
            n = int(rng.integers(p, 6 * p))
            k = int(rng.integers(1, 4))
            spikes = (H.lambda_max * rng.uniform(1.0, 4.0, size=k)).tolist()
            report = classify_spikes(H, n, p, spikes)
            assert report.c_tilde < report.c_base

    def test_spike_below_base_rejected(self):
        with pytest.raises(DomainError, match="index 0"):
            classify_spikes(ID, 100, 50, [0.5])

    def test_chi_tol_validation(self):
        with pytest.raises(DomainError):
            classify_spikes(ID, 100, 50, [1.2], chi_tol=0.0)

    def test_empty_spike_list(self):
        report = classify_spikes(ID, 100, 50, [])
        assert report.k == 0
        assert report.c_tilde is None
        assert report.spikes == ()
