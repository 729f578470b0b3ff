import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from homodyne_uncertainty.exceptions import (
    AngleNotCoveredError,
    GridError,
    InsufficientSamplesError,
    NegativeDensityError,
    NonNormalizedError,
)
from homodyne_uncertainty.state_models import coherent, fock, tomogram_density, vacuum
from homodyne_uncertainty.tomogram_model import (
    OpticalTomogramGrid,
    QuadratureSampleSet,
    SymplecticPoint,
    check_uniform_axis,
    histogram_tomogram,
    integrate_rows,
    moment_from_grid,
    moment_from_samples,
    symplectic_density,
    symplectic_moment,
    validate,
)

SQRT_PI = math.sqrt(math.pi)


@pytest.fixture
def vacuum_grid():
    """Exact vacuum tomogram on 13 phases over [0, pi] and X in [-6, 6]"""
    return OpticalTomogramGrid.from_state(vacuum(), np.linspace(0, math.pi, 13), np.linspace(-6, 6, 241))


@pytest.fixture
def dense_vacuum_grid():
    return OpticalTomogramGrid.from_state(vacuum(), np.arange(48) * math.pi / 48, np.linspace(-7, 7, 281))


@pytest.fixture
def coherent_grid():
    return OpticalTomogramGrid.from_state(coherent(1 + 0.5j), np.arange(24) * math.pi / 24, np.linspace(-8, 8, 321))


def vacuum_samples(count, theta=0.0, seed=1, min_samples_per_phase=1000):
    rng = np.random.default_rng(seed)
    xs = math.sqrt(0.5) * rng.standard_normal(count)
    return QuadratureSampleSet(np.full(count, theta), xs, {"source": "test"}, min_samples_per_phase)


class TestGridConstruction:
    def test_arrays_are_read_only(self, vacuum_grid):
        with pytest.raises(ValueError):
            vacuum_grid.w[0, 0] = 1.0

    @pytest.mark.parametrize("thetas", [[0.0, 0.0, 1.0], [1.0, 0.5, 2.0], [-0.1, 0.5, 1.0], [0.0, 1.0, 2 * math.pi]])
    def test_bad_thetas(self, thetas):
        xs = np.linspace(-5, 5, 11)
        with pytest.raises(GridError):
            OpticalTomogramGrid(thetas, xs, np.zeros((3, 11)))

    def test_non_uniform_xs(self):
        xs = np.array([0.0, 1.0, 2.0, 3.5])
        with pytest.raises(GridError, match="uniformly"):
            OpticalTomogramGrid([0.0], xs, np.zeros((1, 4)))

    def test_shape_mismatch(self):
        with pytest.raises(GridError, match="shape"):
            OpticalTomogramGrid([0.0, 1.0], np.linspace(0, 1, 5), np.zeros((2, 4)))

    def test_non_finite_density(self):
        w = np.zeros((1, 5))
        w[0, 2] = np.nan
        with pytest.raises(GridError, match="non-finite"):
            OpticalTomogramGrid([0.0], np.linspace(0, 1, 5), w)

    def test_uniform_axis_step(self):
        assert check_uniform_axis(np.linspace(-7, 7, 281), "xs") == pytest.approx(0.05)

    def test_unknown_quadrature_rule(self, vacuum_grid):
        with pytest.raises(ValueError):
            integrate_rows(vacuum_grid.w, vacuum_grid.xs, "midpoint")

    def test_from_moments_needs_positive_definite(self):
        with pytest.raises(GridError):
            OpticalTomogramGrid.from_moments([0.0], np.linspace(-5, 5, 11), 0, 0, 1.0, 1.0, 1.5)


class TestValidate:
    def test_exact_vacuum_passes(self, vacuum_grid):
        report = validate(vacuum_grid, eps_norm=1e-6)
        assert report.passed
        assert report.max_defect < 1e-6
        report.raise_if_failed()

    def test_negative_density(self, vacuum_grid):
        w = vacuum_grid.w.copy()
        w[3, 100] = -0.01
        grid = OpticalTomogramGrid(vacuum_grid.thetas, vacuum_grid.xs, w)
        report = validate(grid)
        assert not report.passed
        error = report.errors[0]
        assert isinstance(error, NegativeDensityError)
        assert error.theta == pytest.approx(vacuum_grid.thetas[3])
        assert error.x == pytest.approx(vacuum_grid.xs[100])
        assert error.value == -0.01
        with pytest.raises(NegativeDensityError):
            report.raise_if_failed()

    def test_doubled_densities(self, vacuum_grid):
        grid = OpticalTomogramGrid(vacuum_grid.thetas, vacuum_grid.xs, 2 * vacuum_grid.w)
        report = validate(grid)
        assert len(report.errors) == vacuum_grid.thetas.size
        assert all(isinstance(error, NonNormalizedError) for error in report.errors)
        assert report.errors[0].defect == pytest.approx(1.0, abs=1e-6)
        with pytest.raises(NonNormalizedError):
            report.raise_if_failed()

    def test_simpson_rule(self, vacuum_grid):
        assert validate(vacuum_grid, eps_norm=1e-6, rule="simpson").passed


class TestSymplecticDensity:
    def test_unit_point(self, vacuum_grid):
        assert symplectic_density(vacuum_grid, SymplecticPoint(1.0, 0.0), 0.0) == pytest.approx(1 / SQRT_PI, rel=1e-9)

    def test_scaled_point(self, vacuum_grid):
        assert symplectic_density(vacuum_grid, SymplecticPoint(2.0, 0.0), 0.0) == pytest.approx(
            1 / (2 * SQRT_PI), rel=1e-9
        )

    def test_diagonal_point(self, vacuum_grid):
        point = SymplecticPoint(math.sqrt(2) / 2, math.sqrt(2) / 2)
        assert point.angle == pytest.approx(math.pi / 4)
        assert symplectic_density(vacuum_grid, point, 0.0) == pytest.approx(1 / SQRT_PI, rel=1e-9)

    def test_negative_mu_uses_reflection(self, coherent_grid):
        """(-1, 0) resolves to theta = pi, reached by mirroring the theta = 0 row"""
        xs = np.linspace(-3, 3, 13)
        values = symplectic_density(coherent_grid, SymplecticPoint(-1.0, 0.0), xs)
        assert_allclose(values, tomogram_density(coherent(1 + 0.5j), math.pi, xs), atol=1e-12)

    def test_lower_half_plane(self, coherent_grid):
        xs = np.linspace(-3, 3, 13)
        values = symplectic_density(coherent_grid, SymplecticPoint(0.0, -1.0), xs)
        assert_allclose(values, tomogram_density(coherent(1 + 0.5j), 3 * math.pi / 2, xs), atol=1e-12)

    def test_origin_is_rejected(self):
        with pytest.raises(ValueError):
            SymplecticPoint(0.0, 0.0)

    def test_homogeneity(self, dense_vacuum_grid):
        """W(X, s mu, s nu) = W(X / s, mu, nu) / s over random cases"""
        rng = np.random.default_rng(2024)
        for _ in range(1000):
            mu, nu = rng.normal(size=2)
            if math.hypot(mu, nu) < 1e-3:
                continue
            s = rng.uniform(0.2, 5.0)
            x = rng.uniform(-3.0, 3.0)
            scaled = symplectic_density(dense_vacuum_grid, SymplecticPoint(s * mu, s * nu), x)
            reference = symplectic_density(dense_vacuum_grid, SymplecticPoint(mu, nu), x / s) / s
            assert scaled == pytest.approx(reference, abs=1e-4)


class TestAngleCoverage:
    def test_uncovered_angle(self):
        grid = OpticalTomogramGrid.from_state(vacuum(), [0.0, 0.1, 0.2], np.linspace(-6, 6, 121))
        with pytest.raises(AngleNotCoveredError) as info:
            grid.row_at(1.0)
        assert info.value.theta == 1.0

    def test_interpolation_between_rows(self):
        """Rows of a phase-independent tomogram interpolate exactly"""
        xs = np.linspace(-7, 7, 281)
        grid = OpticalTomogramGrid.from_state(fock(1), np.arange(24) * math.pi / 24, xs)
        assert_allclose(grid.row_at(math.pi / 48), tomogram_density(fock(1), 0.0, xs), atol=1e-12)

    def test_wrap_around_interpolation(self):
        xs = np.linspace(-7, 7, 281)
        grid = OpticalTomogramGrid.from_state(fock(1), np.arange(48) * math.pi / 48, xs)
        theta = 2 * math.pi - math.pi / 96
        assert_allclose(grid.row_at(theta), tomogram_density(fock(1), theta, xs), atol=1e-12)

    def test_full_circle_grid_uses_real_rows(self, coherent_grid):
        xs = coherent_grid.xs
        thetas = np.arange(48) * math.pi / 24
        grid = OpticalTomogramGrid.from_state(coherent(1 + 0.5j), thetas, xs)
        assert_allclose(grid.row_at(thetas[30]), grid.w[30])

    def test_density_outside_x_grid_is_zero(self, vacuum_grid):
        assert vacuum_grid.density_at(0.0, 100.0) == 0.0


class TestMoments:
    def test_vacuum_second_moment(self, vacuum_grid):
        assert moment_from_grid(vacuum_grid, 0.0, 2) == pytest.approx(0.5, abs=1e-6)

    def test_vacuum_first_moment(self, vacuum_grid):
        assert moment_from_grid(vacuum_grid, 0.0, 1) == pytest.approx(0.0, abs=1e-9)

    def test_fock_second_moment(self):
        grid = OpticalTomogramGrid.from_state(fock(1), np.arange(12) * math.pi / 12, np.linspace(-7, 7, 281))
        for theta in (0.0, math.pi / 3, 13 * math.pi / 12):
            assert moment_from_grid(grid, theta, 2) == pytest.approx(1.5, abs=1e-6)

    def test_order_must_be_positive(self, vacuum_grid):
        with pytest.raises(ValueError):
            moment_from_grid(vacuum_grid, 0.0, 0)

    def test_variance_is_non_negative(self, coherent_grid):
        for theta in coherent_grid.thetas:
            first = moment_from_grid(coherent_grid, theta, 1)
            second = moment_from_grid(coherent_grid, theta, 2)
            assert second >= first ** 2

    def test_coherent_mean(self, coherent_grid):
        theta = coherent_grid.thetas[5]
        expected = math.sqrt(2) * (math.cos(theta) + 0.5 * math.sin(theta))
        assert moment_from_grid(coherent_grid, theta, 1) == pytest.approx(expected, abs=1e-9)

    def test_reflection_reduction(self, coherent_grid):
        for theta in coherent_grid.thetas[::5]:
            for n in (1, 2, 3, 4):
                direct = moment_from_grid(coherent_grid, theta, n)
                reflected = moment_from_grid(coherent_grid, theta + math.pi, n)
                expected = -direct if n % 2 else direct
                assert reflected == pytest.approx(expected, rel=1e-12, abs=1e-12)

    def test_symplectic_moment_scales(self, coherent_grid):
        point = SymplecticPoint(0.0, 2.0)
        assert symplectic_moment(coherent_grid, point, 2) == pytest.approx(
            4 * moment_from_grid(coherent_grid, math.pi / 2, 2), rel=1e-12
        )


class TestSampleSet:
    def test_records(self):
        samples = QuadratureSampleSet([0.0, 1.0], [0.5, -0.5])
        assert len(samples) == 2
        assert samples.records.tolist() == [[0.0, 0.5], [1.0, -0.5]]

    def test_length_mismatch(self):
        with pytest.raises(GridError):
            QuadratureSampleSet([0.0, 1.0], [0.5])

    def test_opposite_phase_is_folded(self):
        samples = QuadratureSampleSet([0.0, math.pi, math.pi, 2.0], [1.0, 2.0, 3.0, 4.0])
        assert sorted(samples.at_phase(0.0).tolist()) == [-3.0, -2.0, 1.0]

    def test_distinct_phases(self):
        samples = QuadratureSampleSet([0.1, 0.1 + 1e-9, 2 * math.pi + 0.5, 0.5], [0.0] * 4)
        assert_allclose(samples.distinct_phases(), [0.1, 0.5])

    def test_moment_from_samples(self):
        samples = vacuum_samples(100000)
        second, second_se = moment_from_samples(samples, 0.0, 2)
        assert second_se == pytest.approx(math.sqrt(0.5 / 100000), rel=0.05)
        assert abs(second - 0.5) <= 3 * second_se
        first, first_se = moment_from_samples(samples, 0.0, 1)
        assert abs(first) <= 3 * first_se

    def test_too_few_samples(self):
        samples = vacuum_samples(10)
        with pytest.raises(InsufficientSamplesError) as info:
            moment_from_samples(samples, 0.0, 2)
        assert info.value.count == 10
        assert info.value.required == 1000


class TestHistogramTomogram:
    def test_matches_analytic_row(self):
        samples = vacuum_samples(2_000_000, seed=11)
        grid = histogram_tomogram(samples, theta_bins=12, x_bins=200, x_range=(-6.0, 6.0))
        assert grid.thetas.tolist() == [0.0]
        error = np.max(np.abs(grid.w[0] - np.exp(-grid.xs ** 2) / SQRT_PI))
        assert error < 0.02

    def test_rows_per_phase(self):
        rng = np.random.default_rng(5)
        phases = np.arange(12) * math.pi / 12
        thetas = np.repeat(phases, 2000)
        samples = QuadratureSampleSet(thetas, math.sqrt(0.5) * rng.standard_normal(thetas.size))
        grid = histogram_tomogram(samples, 12, 40, (-5.0, 5.0))
        assert_allclose(grid.thetas, phases, atol=1e-12)
        assert grid.metadata["counts"] == [2000] * 12
        assert validate(grid, eps_norm=1e-9).passed

    def test_upper_half_folds_back(self):
        rng = np.random.default_rng(6)
        xs = 1.0 + 0.1 * rng.standard_normal(2000)
        samples = QuadratureSampleSet(np.full(2000, math.pi + 0.2), xs)
        grid = histogram_tomogram(samples, 4, 50, (-5.0, 5.0))
        assert grid.thetas[0] == pytest.approx(0.2)
        assert moment_from_grid(grid, 0.2, 1) == pytest.approx(-np.mean(xs), abs=0.05)

    def test_last_bin_wraps_to_zero(self):
        samples = QuadratureSampleSet(np.full(2000, 3.1), np.linspace(0.5, 1.5, 2000))
        grid = histogram_tomogram(samples, 12, 20, (-2.0, 2.0))
        assert grid.thetas[0] == pytest.approx(3.1 + math.pi)
        assert moment_from_grid(grid, 3.1, 1) == pytest.approx(1.0, abs=0.05)

    def test_single_phase_single_bin(self):
        samples = vacuum_samples(5000, theta=0.3)
        grid = histogram_tomogram(samples, 1, 30, (-5.0, 5.0))
        assert grid.w.shape == (1, 30)
        assert validate(grid, eps_norm=1e-9).passed

    def test_sparse_bins_are_dropped(self):
        thetas = np.concatenate((np.zeros(2000), np.full(10, math.pi / 2)))
        samples = QuadratureSampleSet(thetas, np.zeros(thetas.size))
        grid = histogram_tomogram(samples, 4, 10, (-1.0, 1.0))
        assert grid.thetas.tolist() == [0.0]

    def test_clipped_samples_are_counted(self):
        samples = QuadratureSampleSet(np.zeros(2000), np.concatenate((np.zeros(1990), np.full(10, 50.0))))
        grid = histogram_tomogram(samples, 1, 10, (-1.0, 1.0))
        assert grid.metadata["clipped"] == 10

    def test_empty_sample_set(self):
        with pytest.raises(InsufficientSamplesError):
            histogram_tomogram(QuadratureSampleSet([], []), 4, 10, (-1.0, 1.0))

    def test_moment_converges_with_bin_width(self):
        samples = vacuum_samples(200000, seed=9)
        exact, _ = moment_from_samples(samples, 0.0, 2)
        errors = []
        for bins in (20, 40):
            grid = histogram_tomogram(samples, 1, bins, (-6.0, 6.0))
            errors.append(abs(moment_from_grid(grid, 0.0, 2) - exact))
        coarse, fine = errors
        assert coarse > 0
        assert fine < 0.6 * coarse
