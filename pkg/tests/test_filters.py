import numpy as np
import pytest

import make_fan_filter
from digishear import filters
from digishear.errors import AssetError, DomainError, InvalidFilterError
from digishear.filters import (
    PROFILES,
    FanFilter,
    QmfPair,
    ScaleProfile,
    Taps,
    alpha_to_shear_levels,
    cascade,
    default_fan_filter,
    default_lowpass,
    default_qmf,
    load_fan_filter,
    mirror_highpass,
    orthonormality_defect,
    upsample_filter_2d,
)

# 16-digit taps of the reference maximally flat 9-tap filter
REFERENCE_TAPS = np.array(
    [
        0.0104933261758410,
        -0.0263483047033631,
        -0.0517766952966370,
        0.2763483047033631,
        0.5825667382483118,
    ]
)


def test_default_lowpass_taps():
    h = default_lowpass()
    assert h.shape == (9,)
    assert h.origin == (4,)
    np.testing.assert_allclose(h.coeffs[:5], REFERENCE_TAPS, atol=1e-15)
    np.testing.assert_allclose(h.coeffs, h.coeffs[::-1], atol=0)
    assert h.sum() == pytest.approx(1.0, abs=1e-15)


def test_default_lowpass_printed_values():
    printed = [0.0104933261758410, -0.0263483047033631, -0.0517766952966370,
               0.2763483047033631, 0.5825667382483118]
    np.testing.assert_allclose(default_lowpass().coeffs[:5], printed, atol=1e-4)


def test_default_lowpass_transfer_function():
    xi = np.linspace(-0.5, 0.5, 101)
    x = np.sin(np.pi * xi) ** 2
    s2 = np.sqrt(2)
    expected = 1 + (8 * s2 - 15) * x**3 + (14 - 8 * s2) * x**4
    np.testing.assert_allclose(default_lowpass().response(xi), expected, atol=1e-14)
    assert abs(default_lowpass().response(0.25)) == pytest.approx(1 / s2, abs=1e-14)


def test_orthonormality_defect_value():
    assert orthonormality_defect(default_lowpass()) == pytest.approx(0.0018177720, abs=1e-9)


def test_orthonormality_defect_haar_is_zero():
    assert orthonormality_defect(Taps([0.5, 0.5])) == pytest.approx(0.0, abs=1e-16)


def test_mirror_highpass():
    h = default_lowpass()
    g = mirror_highpass(h)
    n = h.indices()
    np.testing.assert_array_equal(g.coeffs, (-1.0) ** n * h.coeffs)
    assert g.sum() == pytest.approx(0.0, abs=1e-15)
    # g_hat(xi) = h_hat(xi + 1/2)
    xi = np.linspace(-0.5, 0.5, 33)
    np.testing.assert_allclose(g.response(xi), h.response(xi + 0.5), atol=1e-14)


def test_qmf_pair_rejects_unnormalized_lowpass():
    with pytest.raises(InvalidFilterError):
        QmfPair.from_lowpass(Taps([1.0, 1.0]))


def test_cascade_level_zero_and_one():
    qmf = default_qmf()
    c0 = cascade(qmf, 0)
    assert c0.highpass is None
    np.testing.assert_array_equal(c0.lowpass.coeffs, [1.0])
    c1 = cascade(qmf, 1)
    assert c1.lowpass == qmf.lowpass
    assert c1.highpass == qmf.highpass


@pytest.mark.parametrize("level", [2, 3, 4])
def test_cascade_transfer_functions(level):
    qmf = default_qmf()
    c = cascade(qmf, level)
    xi = np.linspace(-0.5, 0.5, 65)
    h, g = qmf.lowpass.response, qmf.highpass.response
    lo = np.prod([h(2**k * xi) for k in range(level)], axis=0)
    hi = g(2 ** (level - 1) * xi) * np.prod([h(2**k * xi) for k in range(level - 1)], axis=0)
    np.testing.assert_allclose(c.lowpass.response(xi), lo, atol=1e-13)
    np.testing.assert_allclose(c.highpass.response(xi), hi, atol=1e-13)
    assert len(c.lowpass) == (2**level - 1) * 8 + 1


def test_cascade_rejects_negative_level():
    with pytest.raises(DomainError):
        cascade(default_qmf(), -1)


def test_taps_convolve_matches_response_product(rng):
    a = Taps(rng.standard_normal((3, 4)), (1, 2))
    b = Taps(rng.standard_normal((5, 2)), (0, 1))
    xi = rng.uniform(-0.5, 0.5, (2, 20))
    np.testing.assert_allclose(
        a.convolve(b).response(*xi), a.response(*xi) * b.response(*xi), atol=1e-12
    )


def test_upsample_filter_2d_response(rng):
    t = Taps(rng.standard_normal((3, 5)), (1, 2))
    u = upsample_filter_2d(t, 2, 4)
    xi = rng.uniform(-0.5, 0.5, (2, 20))
    np.testing.assert_allclose(u.response(*xi), t.response(2 * xi[0], 4 * xi[1]), atol=1e-12)
    with pytest.raises(DomainError):
        upsample_filter_2d(t, 3, 1)


def test_periodize_wraps_taps():
    t = Taps([1.0, 2.0, 3.0], (1,))
    np.testing.assert_array_equal(t.periodize((4,)), [2.0, 3.0, 0.0, 1.0])
    np.testing.assert_array_equal(t.periodize((2,)), [2.0, 4.0])


def test_default_fan_filter_properties():
    fan = default_fan_filter()
    assert fan.taps.shape == (17, 17)
    assert fan.provenance == "dmaxflat4"
    assert fan.checksum() == filters.FAN_ASSET_SHA256
    assert fan.taps.sum() == pytest.approx(1 / np.sqrt(2), abs=1e-12)
    # passband is the horizontal cone |xi_1| < |xi_0|
    assert abs(fan.taps.response(0.375, 0.0)) == pytest.approx(1.0, abs=1e-3)
    assert abs(fan.taps.response(0.0, 0.375)) < 1e-3
    c = fan.taps.coeffs
    np.testing.assert_allclose(c, c[::-1, :], atol=1e-17)
    np.testing.assert_allclose(c, c[:, ::-1], atol=1e-17)


def test_fan_asset_regenerates_bit_for_bit():
    from importlib import resources

    shipped = resources.files("digishear").joinpath("data", filters.FAN_ASSET_NAME).read_text()
    assert make_fan_filter.render(make_fan_filter.fan_filter()) == shipped


def test_load_fan_filter_rejects_malformed_text():
    with pytest.raises(AssetError):
        load_fan_filter("3 3 1 1\n1 2 3\n")
    with pytest.raises(AssetError):
        load_fan_filter("not a header\n")


def test_fan_filter_format_round_trip():
    fan = default_fan_filter()
    again = load_fan_filter(filters.format_fan_filter(fan.taps))
    assert again.taps == fan.taps


def test_fan_filter_requires_odd_2d_grid():
    with pytest.raises(InvalidFilterError):
        FanFilter(Taps(np.ones((2, 3))))


def test_profiles():
    assert PROFILES["SL2D_1"].shear_levels == (0, 0, 1, 1)
    assert PROFILES["SL2D_2"].shear_levels == (1, 1, 2, 2)
    assert PROFILES["SL3D_1"].shear_levels == (0, 0, 1)
    assert PROFILES["SL3D_2"].shear_levels == (1, 1, 2)
    assert ScaleProfile.parabolic(4) == PROFILES["SL2D_2"]
    p = ScaleProfile((0, 1), 2)
    assert p.scales() == [(2, 0), (3, 1)]
    assert p.finest == 4
    with pytest.raises(DomainError):
        ScaleProfile((-1,))


def test_alpha_to_shear_levels():
    assert alpha_to_shear_levels([1.0] * 4, [1, 2, 3, 4]) == (1, 1, 2, 2)
    assert alpha_to_shear_levels(1.5, [4]) == (1,)
    assert alpha_to_shear_levels(0.5, [0, 1, 2]) == (0, 1, 2)
    with pytest.raises(DomainError):
        alpha_to_shear_levels([2.0], [1])
