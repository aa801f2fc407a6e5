import numpy as np
import pytest
from scipy import fft

from digishear._system import ShearletSystemBase, hermitian_expand
from digishear.errors import DomainError, SingularFrameError, UnsupportedSizeError
from digishear.filters import PROFILES, FanFilter, ScaleProfile, default_qmf
from digishear.system2d import (
    HORIZONTAL,
    LOWPASS,
    VERTICAL,
    FilterIndex2D,
    build_isotropic_system_2d,
    build_shearlet_filter,
    build_system_2d,
    build_wavelet_tensor,
    directional_component,
    lowpass_taps,
    redundancy_2d,
    shearlet_taps_2d,
)


@pytest.mark.parametrize(
    "name, full, count", [("SL2D_1", False, 25), ("SL2D_2", False, 49), ("SL2D_1", True, 33), ("SL2D_2", True, 1 + 2 * (5 + 5 + 9 + 9))]
)
def test_redundancy_2d(name, full, count):
    assert redundancy_2d(PROFILES[name], full) == count


def test_built_counts_agree_with_redundancy(sl2d1_64, sl2d2_64):
    assert len(sl2d1_64) == 25
    assert len(sl2d2_64) == 49
    full = build_system_2d((32, 32), PROFILES["SL2D_1"], full_system=True)
    assert len(full) == redundancy_2d(PROFILES["SL2D_1"], True)


def test_index_order(sl2d1_64):
    idx = sl2d1_64.indices
    assert idx[0] == FilterIndex2D(LOWPASS)
    assert idx[1:4] == [FilterIndex2D(HORIZONTAL, 0, k) for k in (-1, 0, 1)]
    assert idx[4] == FilterIndex2D(VERTICAL, 0, 0)
    last_scale = [ix for ix in idx if ix.scale == 3]
    assert [ix.shear for ix in last_scale if ix.kind == HORIZONTAL] == [-2, -1, 0, 1, 2]
    assert [ix.shear for ix in last_scale if ix.kind == VERTICAL] == [-1, 0, 1]


def test_vertical_filters_are_transposes(sl2d1_64):
    s = sl2d1_64
    for i, ix in enumerate(s.indices):
        if ix.kind == VERTICAL:
            j = s.indices.index(FilterIndex2D(HORIZONTAL, ix.scale, ix.shear))
            np.testing.assert_allclose(s.spatial_filter(i), s.spatial_filter(j).T, atol=1e-15)


def test_filter_spectrum_is_hermitian(sl2d2_64):
    for i in (0, 5, 30, 48):
        full = sl2d2_64.filter_spectrum(i)
        flipped = np.conj(np.roll(full[::-1, ::-1], 1, axis=(0, 1)))
        np.testing.assert_allclose(full, flipped, atol=1e-14)
        np.testing.assert_allclose(full, fft.fft2(sl2d2_64.spatial_filter(i)), atol=1e-12)


def test_hermitian_expand_matches_fft(rng):
    for shape in [(6, 8), (7, 9), (4, 5, 6)]:
        x = rng.standard_normal(shape)
        np.testing.assert_allclose(hermitian_expand(fft.rfftn(x), shape), fft.fftn(x), atol=1e-12)


def test_build_shearlet_filter_matches_system(sl2d2_64):
    s = sl2d2_64
    for ix in (FilterIndex2D(HORIZONTAL, 2, -3), FilterIndex2D(VERTICAL, 1, 1)):
        i = s.indices.index(ix)
        spec = build_shearlet_filter(ix.scale, ix.shear, ix.kind, PROFILES["SL2D_2"], shape=(64, 64))
        np.testing.assert_allclose(spec, s.filter_spectrum(i), atol=1e-13)


def test_frame_weight_and_bounds(sl2d1_64):
    w = sl2d1_64.frame_weight
    A, B = sl2d1_64.frame_bounds()
    assert w.min() == pytest.approx(A)
    assert w.max() == pytest.approx(B)
    assert 0 < A < B
    assert B == pytest.approx(1.0, abs=1e-3)


def test_filter_norms_match_spatial_norms(sl2d2_64):
    s = sl2d2_64
    for i in (0, 3, 20, 48):
        assert s.filter_norms[i] == pytest.approx(np.linalg.norm(s.spatial_filter(i)), rel=1e-12)


def test_filter_taps_periodize_to_spectra(sl2d1_64):
    s = sl2d1_64
    for i in (0, 2, 24):
        np.testing.assert_allclose(fft.rfft2(s.filter_taps(i).periodize(s.shape)), s.spectra[i], atol=1e-13)


def test_lowpass_is_tensor_cascade():
    h4 = lowpass_taps(4)
    from digishear.filters import cascade

    h = cascade(default_qmf(), 4).lowpass
    assert h4.shape == (121, 121)
    np.testing.assert_allclose(h4.coeffs, np.outer(h.coeffs, h.coeffs), atol=0)


def test_wavelet_tensor_axes():
    w = build_wavelet_tensor(1, 0, 4)
    # highpass along axis 0, lowpass along axis 1
    assert abs(w.response(0.0, 0.0)) < 1e-12
    assert abs(w.response(0.125, 0.0)) > 0.5
    with pytest.raises(DomainError):
        build_wavelet_tensor(4, 0, 4)


def test_directional_component_normalized():
    from digishear.filters import default_fan_filter

    p = directional_component(default_fan_filter(), 0, 1, 4)
    assert np.abs(p.coeffs).sum() == pytest.approx(1.0)
    assert p.shape == (17, 65)
    lit = directional_component(default_fan_filter(), 0, 1, 4, literal_fan_dilation=True)
    assert lit.shape == (16 * 8 + 1, 16 * 32 + 1)


def test_horizontal_filter_lives_in_horizontal_cone(sl2d1_64):
    s = sl2d1_64
    i = s.indices.index(FilterIndex2D(HORIZONTAL, 3, 0))
    e = np.abs(s.filter_spectrum(i)) ** 2
    f0 = np.abs(np.fft.fftfreq(64))[:, None]
    f1 = np.abs(np.fft.fftfreq(64))[None, :]
    assert e[f0 > f1].sum() > 0.95 * e.sum()


def test_shear_moves_spectral_mass(sl2d2_64):
    # positive and negative shears tilt the spectrum in opposite directions
    s = sl2d2_64
    f0 = np.fft.fftfreq(64)[:, None]
    f1 = np.fft.fftfreq(64)[None, :]
    tilt = []
    for k in (-2, 2):
        e = np.abs(s.filter_spectrum(s.indices.index(FilterIndex2D(HORIZONTAL, 2, k)))) ** 2
        tilt.append((e * f0 * f1).sum() / e.sum())
    assert tilt[0] * tilt[1] < 0


def test_shearlet_taps_argument_checks():
    with pytest.raises(DomainError):
        shearlet_taps_2d(0, 2, HORIZONTAL, PROFILES["SL2D_1"])
    with pytest.raises(DomainError):
        shearlet_taps_2d(7, 0, HORIZONTAL, PROFILES["SL2D_1"])
    with pytest.raises(DomainError):
        shearlet_taps_2d(0, 0, "diagonal", PROFILES["SL2D_1"])


def test_small_grid_rejected():
    with pytest.raises(UnsupportedSizeError):
        build_system_2d((4, 64), PROFILES["SL2D_1"])


def test_singular_frame_rejected():
    with pytest.raises(SingularFrameError):
        ShearletSystemBase((8, 8), [FilterIndex2D(LOWPASS)], np.zeros((1, 8, 5), complex), None)


def test_isotropic_system(iso_64):
    assert len(iso_64) == 1 + 4 * 4
    assert iso_64.fan == FanFilter.impulse()
    A, B = iso_64.frame_bounds()
    # the integer shears k = +-1 duplicate energy along the diagonals
    assert A > 0.05
    assert B == pytest.approx(2.0, abs=1e-3)


def test_j0_offset_relabels_scales():
    a = build_system_2d((32, 32), ScaleProfile((0, 1)))
    b = build_system_2d((32, 32), ScaleProfile((0, 1), 2))
    np.testing.assert_array_equal(a.spectra, b.spectra)
    assert [ix.scale for ix in b.indices[1:]] == [ix.scale + 2 for ix in a.indices[1:]]


def test_workers_do_not_change_result():
    a = build_system_2d((32, 32), PROFILES["SL2D_2"], workers=1)
    b = build_system_2d((32, 32), PROFILES["SL2D_2"], workers=4)
    np.testing.assert_array_equal(a.spectra, b.spectra)


def test_custom_qmf_builds():
    from digishear.filters import QmfPair, Taps

    haar = QmfPair.from_lowpass(Taps([0.5, 0.5], (0,)))
    s = build_system_2d((32, 32), (0, 1), qmf=haar)
    assert s.frame_bounds()[0] > 0
