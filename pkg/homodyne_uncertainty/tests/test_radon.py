import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from homodyne_uncertainty.exceptions import (
    AngleNotCoveredError,
    InsufficientAnglesError,
    NonNormalizedError,
    SupportTruncatedError,
)
from homodyne_uncertainty.radon import NORMALIZATION, WignerGrid, forward_radon, inverse_radon, ramp_filter
from homodyne_uncertainty.state_models import coherent, exact_wigner, fock, tomogram_density, vacuum
from homodyne_uncertainty.tomogram_model import OpticalTomogramGrid, validate

PHASE_AXIS = np.linspace(-6, 6, 241)
XS = np.linspace(-7, 7, 281)
THETAS = np.arange(48) * math.pi / 48
CORE = np.linspace(-3, 3, 61)


def tomogram(state, thetas=THETAS, xs=XS):
    return OpticalTomogramGrid.from_state(state, thetas, xs)


@pytest.fixture(scope="module")
def vacuum_wigner():
    return inverse_radon(tomogram(vacuum()))


@pytest.fixture(scope="module")
def fock_wigner():
    return inverse_radon(tomogram(fock(1)))


class TestForwardRadon:
    @pytest.mark.parametrize("state, tolerance", [(vacuum(), 1e-5), (fock(1), 1e-4), (coherent(0.5 - 0.5j), 1e-4)])
    def test_matches_exact_tomogram(self, state, tolerance):
        wigner = WignerGrid.from_state(state, PHASE_AXIS, PHASE_AXIS)
        thetas = [0.0, 0.7, math.pi / 2, 2.0, 4.0]
        xs = np.linspace(-5, 5, 201)
        grid = forward_radon(wigner, thetas, xs)
        expected = tomogram_density(state, np.asarray(thetas)[:, None], xs[None, :])
        assert_allclose(grid.w, expected, atol=tolerance)

    def test_records_normalization_defects(self):
        grid = forward_radon(WignerGrid.from_state(vacuum(), PHASE_AXIS, PHASE_AXIS), [0.0, 1.0], XS)
        assert grid.metadata["source"] == "forward_radon"
        assert len(grid.metadata["normalization_defects"]) == 2
        assert max(grid.metadata["normalization_defects"]) < 1e-5

    def test_zero_wigner_fails_validation(self):
        zeros = WignerGrid(PHASE_AXIS, PHASE_AXIS, np.zeros((241, 241)))
        grid = forward_radon(zeros, [0.0, 1.0], XS)
        assert grid.metadata["normalization_defects"] == [1.0, 1.0]
        with pytest.raises(NonNormalizedError):
            validate(grid).raise_if_failed()

    def test_truncated_support(self):
        box = np.linspace(-2, 2, 81)
        with pytest.raises(SupportTruncatedError):
            forward_radon(WignerGrid.from_state(vacuum(), box, box), [0.0], XS)

    def test_truncation_tolerance_is_configurable(self):
        box = np.linspace(-4, 4, 161)
        wigner = WignerGrid.from_state(coherent(1.0), box, box)
        with pytest.raises(SupportTruncatedError):
            forward_radon(wigner, [0.0], XS, tail_tolerance=1e-6)
        assert forward_radon(wigner, [0.0], XS, tail_tolerance=1e-2).w.shape == (1, 281)


class TestInverseRadon:
    def test_vacuum_origin(self, vacuum_wigner):
        assert vacuum_wigner.value_at(0.0, 0.0) == pytest.approx(2.0, abs=0.02)

    def test_fock_origin_is_negative(self, fock_wigner):
        assert fock_wigner.value_at(0.0, 0.0) == pytest.approx(-2.0, abs=0.05)

    def test_vacuum_integral(self):
        axis = np.linspace(-4.5, 4.5, 181)
        wigner = inverse_radon(tomogram(vacuum()), axis, axis)
        assert wigner.integral() == pytest.approx(2 * math.pi, rel=0.01)

    def test_matches_exact_wigner(self, vacuum_wigner, fock_wigner):
        for state, reconstructed in ((vacuum(), vacuum_wigner), (fock(1), fock_wigner)):
            core = PHASE_AXIS[60:181]
            expected = exact_wigner(state, core[:, None], core[None, :])
            assert_allclose(reconstructed.w[60:181, 60:181], expected, atol=0.05)

    def test_coherent_peak(self):
        wigner = inverse_radon(tomogram(coherent(1.0)))
        assert wigner.value_at(math.sqrt(2), 0.0) == pytest.approx(2.0, abs=0.02)

    def test_forward_then_inverse(self):
        state = coherent(1.0)
        projected = forward_radon(WignerGrid.from_state(state, PHASE_AXIS, PHASE_AXIS), THETAS, XS)
        reconstructed = inverse_radon(projected, CORE, CORE)
        assert np.max(np.abs(reconstructed.w - exact_wigner(state, CORE[:, None], CORE[None, :]))) < 1e-2

    def test_inverse_then_forward(self):
        grid = tomogram(coherent(1.0))
        reprojected = forward_radon(inverse_radon(grid), grid.thetas, grid.xs)
        assert reprojected.w.shape == grid.w.shape
        assert np.max(np.abs(reprojected.w - grid.w)) < 1e-2

    def test_rotated_labels_rotate_the_state(self):
        """Shifting every phase label by delta reconstructs the state rotated by delta"""
        delta = math.pi / 4
        grid = tomogram(coherent(1.0))
        shifted = OpticalTomogramGrid(grid.thetas + delta, grid.xs, grid.w)
        reconstructed = inverse_radon(shifted, CORE, CORE)
        expected = exact_wigner(coherent(complex(math.cos(delta), math.sin(delta))), CORE[:, None], CORE[None, :])
        assert np.max(np.abs(reconstructed.w - expected)) < 1e-2

    def test_upper_half_rows_are_folded(self):
        full = np.arange(96) * math.pi / 48
        folded = inverse_radon(tomogram(coherent(0.5j), thetas=full), CORE, CORE)
        half = inverse_radon(tomogram(coherent(0.5j)), CORE, CORE)
        assert folded.metadata["angles"] == 48
        assert_allclose(folded.w, half.w, atol=1e-9)

    def test_linearity(self):
        a, b = tomogram(vacuum()), tomogram(fock(1))
        mixed = OpticalTomogramGrid(THETAS, XS, 0.3 * a.w + 0.7 * b.w)
        combined = 0.3 * inverse_radon(a, CORE, CORE).w + 0.7 * inverse_radon(b, CORE, CORE).w
        assert_allclose(inverse_radon(mixed, CORE, CORE).w, combined, atol=1e-10)

    def test_metadata(self, vacuum_wigner):
        metadata = vacuum_wigner.metadata
        assert metadata["normalization"] == NORMALIZATION
        assert metadata["angles"] == 48
        assert metadata["max_angle_gap"] == pytest.approx(math.pi / 48)
        assert metadata["filter_cutoff"] == 0.9
        assert metadata["cutoff_frequency"] == pytest.approx(0.9 * math.pi / 0.05)
        assert metadata["window"] == "ramp"
        assert vacuum_wigner.w.shape == (241, 241)

    def test_cosine_window(self):
        wigner = inverse_radon(tomogram(vacuum()), CORE, CORE, window="cosine")
        assert wigner.value_at(0.0, 0.0) == pytest.approx(2.0, abs=0.05)
        assert wigner.metadata["window"] == "cosine"


class TestReconstructionErrors:
    def test_too_few_angles(self):
        with pytest.raises(InsufficientAnglesError) as info:
            inverse_radon(tomogram(vacuum(), thetas=[0.0, 1.0, 2.0]))
        assert info.value.count == 3
        assert info.value.required == 8

    def test_reflected_duplicates_count_once(self):
        thetas = np.concatenate((np.arange(4) * math.pi / 4, np.arange(4) * math.pi / 4 + math.pi))
        with pytest.raises(InsufficientAnglesError):
            inverse_radon(tomogram(vacuum(), thetas=thetas))

    def test_clustered_angles(self):
        with pytest.raises(AngleNotCoveredError):
            inverse_radon(tomogram(vacuum(), thetas=np.linspace(0, 0.5, 10)))

    @pytest.mark.parametrize("kwargs", [{"filter_cutoff": 0.0}, {"filter_cutoff": 1.5}, {"window": "hann"}])
    def test_invalid_filter(self, kwargs):
        with pytest.raises(ValueError):
            inverse_radon(tomogram(vacuum()), CORE, CORE, **kwargs)


class TestRampFilter:
    def test_response_is_even_and_nonnegative(self):
        response = ramp_filter(256, 0.05)
        assert_allclose(response[1:], response[1:][::-1], atol=1e-9)
        assert np.all(response >= -1e-9)

    def test_tracks_absolute_frequency(self):
        """Below the cutoff the response approximates |k| in radians per unit X"""
        response = ramp_filter(1024, 0.05, cutoff=1.0)
        k = 2 * math.pi * np.fft.fftfreq(1024, d=0.05)
        middle = (np.abs(k) > 5) & (np.abs(k) < 30)
        assert_allclose(response[middle], np.abs(k[middle]), rtol=0.02)

    def test_cutoff_removes_high_frequencies(self):
        response = ramp_filter(256, 0.05, cutoff=0.5)
        frequencies = np.fft.fftfreq(256, d=0.05)
        assert np.all(response[np.abs(frequencies) > 5.0] == 0.0)


class TestAgainstDirectInversion:
    """Compare filtered back-projection with a direct Fourier-slice inversion on a coarse patch"""

    @staticmethod
    def direct_inversion(state, points):
        # W(q, p) = (1/K) sum_theta sum_r r dr Re[F_theta(r) exp(-i r s)], F_theta(r) = int W(Y, theta) e^{i r Y} dY
        thetas = np.arange(128) * 2 * math.pi / 128
        ys = np.linspace(-8, 8, 641)
        weights = np.full(ys.size, ys[1] - ys[0])
        weights[[0, -1]] /= 2
        dr = 0.05
        rs = (np.arange(240) + 0.5) * dr
        rows = tomogram_density(state, thetas[:, None], ys[None, :])
        spectra = rows @ (weights[:, None] * np.exp(1j * ys[:, None] * rs[None, :]))
        values = []
        for q, p in points:
            s = q * np.cos(thetas)[:, None] + p * np.sin(thetas)[:, None]
            kernel = rs[None, :] * dr * np.exp(-1j * rs[None, :] * s)
            values.append(float(np.sum((spectra * kernel).real)) / thetas.size)
        return np.asarray(values)

    @pytest.mark.parametrize("state", [vacuum(), fock(1)], ids=["vacuum", "fock1"])
    def test_patch(self, state):
        axis = np.linspace(-1.2, 1.2, 9)
        reconstructed = inverse_radon(tomogram(state), axis, axis)
        points = [(q, p) for q in axis for p in axis]
        direct = self.direct_inversion(state, points).reshape(9, 9)
        significant = np.abs(direct) > 0.05
        assert np.count_nonzero(significant) > 40
        assert_allclose(reconstructed.w[significant], direct[significant], rtol=0.05, atol=0.005)
