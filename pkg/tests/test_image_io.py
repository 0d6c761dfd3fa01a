import numpy as np
import pytest

from cchs.exceptions import FormatError, ParameterError
from cchs.image_io import (
    ColorImage,
    color_to_nu,
    load,
    load_gray,
    normalize_lab,
    read_flo,
    save,
    save_gray,
    srgb_to_lab,
    to_lab,
    write_flo,
)


def test_color_image_validation():
    with pytest.raises(ParameterError):
        ColorImage(np.zeros((4, 4, 3)))  # below 8x8 minimum
    with pytest.raises(ParameterError):
        ColorImage(np.zeros((16, 16)))
    with pytest.raises(ParameterError):
        ColorImage(np.full((16, 16, 3), np.nan))
    with pytest.raises(ParameterError):
        ColorImage(np.zeros((16, 16, 3)), colorspace="hsv")


def test_png_16bit_roundtrip(tmp_path, rng):
    img = ColorImage(rng.random((24, 32, 3)))
    path = tmp_path / "x.png"
    save(img, path, bitdepth=16)
    back = load(path)
    assert back.channels.shape == img.channels.shape
    assert np.abs(back.channels - img.channels).max() <= 0.5 / 65535 + 1e-12


def test_png_8bit_roundtrip(tmp_path, rng):
    img = ColorImage(rng.random((16, 16, 3)))
    path = tmp_path / "x8.png"
    save(img, path, bitdepth=8)
    back = load(path)
    assert np.abs(back.channels - img.channels).max() <= 0.5 / 255 + 1e-12


def test_ppm_roundtrip(tmp_path, rng):
    img = ColorImage(rng.random((16, 20, 3)))
    for depth in (8, 16):
        path = tmp_path / f"x{depth}.ppm"
        save(img, path, bitdepth=depth)
        back = load(path)
        maxerr = 0.5 / (255 if depth == 8 else 65535)
        assert np.abs(back.channels - img.channels).max() <= maxerr + 1e-12


def test_corrupt_magic_rejected(tmp_path):
    bad = tmp_path / "bad.png"
    bad.write_bytes(b"not a png at all")
    with pytest.raises(FormatError):
        load(bad)
    badppm = tmp_path / "bad.ppm"
    badppm.write_bytes(b"P3\n2 2\n255\n")
    with pytest.raises(FormatError):
        load(badppm)


def test_too_small_image_rejected(tmp_path):
    import cv2
    tiny = (np.ones((1, 1, 3)) * 255).astype(np.uint8)
    path = tmp_path / "tiny.png"
    cv2.imwrite(str(path), tiny)
    with pytest.raises(ParameterError):
        load(path)


def test_gray_roundtrip(tmp_path, rng):
    plane = rng.random((16, 16))
    path = tmp_path / "g.png"
    save_gray(plane, path, bitdepth=16)
    back = load_gray(path)
    assert np.abs(back - plane).max() <= 0.5 / 65535 + 1e-12


def test_lab_white_black_gray():
    white = srgb_to_lab(np.array([[[1.0, 1.0, 1.0]]]))[0, 0]
    assert white[0] == pytest.approx(100.0, abs=0.01)
    assert abs(white[1]) < 0.01 and abs(white[2]) < 0.01
    black = srgb_to_lab(np.array([[[0.0, 0.0, 0.0]]]))[0, 0]
    assert black[0] == pytest.approx(0.0, abs=1e-9)
    mid = srgb_to_lab(np.array([[[0.5, 0.5, 0.5]]]))[0, 0]
    assert mid[0] == pytest.approx(53.39, abs=0.01)

    norm_white = normalize_lab(white[None, None, :])[0, 0]
    assert norm_white == pytest.approx([1.0, 0.5, 0.5], abs=1e-3)


def test_lab_matches_skimage(rng):
    skimage_color = pytest.importorskip("skimage.color")
    rgb = rng.random((8, 8, 3))
    ours = srgb_to_lab(rgb)
    theirs = skimage_color.rgb2lab(rgb)
    assert np.abs(ours - theirs).max() < 1e-2  # both use D65 2-degree


def test_to_lab_normalized_range():
    img = ColorImage(np.random.default_rng(0).random((16, 16, 3)))
    lab = to_lab(img)
    assert lab.colorspace == "lab"
    assert lab.channels.min() >= 0.0 and lab.channels.max() <= 1.0
    assert to_lab(lab) is lab


def test_color_to_nu():
    nu = color_to_nu((1, 0, 0), "srgb")
    assert (nu.a, nu.b, nu.c) == (1.0, 0.0, 0.0)
    with pytest.raises(ParameterError):
        color_to_nu((0, 0, 0), "srgb")
    gray = color_to_nu((0.5, 0.5, 0.5), "lab")
    assert gray.b == pytest.approx(0.5, abs=1e-3)
    assert gray.c == pytest.approx(0.5, abs=1e-3)
    # black in lab space is still non-degenerate: (0, 0.5, 0.5)
    black = color_to_nu((0, 0, 0), "lab")
    assert black.a == pytest.approx(0.0, abs=1e-9)
    assert black.b == pytest.approx(0.5, abs=1e-3)


def test_flo_roundtrip(tmp_path, rng):
    u = rng.normal(size=(12, 17))
    v = rng.normal(size=(12, 17))
    valid = rng.random((12, 17)) > 0.3
    path = tmp_path / "f.flo"
    write_flo(u, v, path, valid=valid)
    with open(path, "rb") as fh:
        assert fh.read(4) == b"PIEH"
    ru, rv, rvalid = read_flo(path)
    assert np.array_equal(rvalid, valid)
    assert np.abs(ru[valid] - u[valid]).max() < 1e-6
    assert np.abs(rv[valid] - v[valid]).max() < 1e-6
    assert not ru[~valid].any()


def test_flo_bad_magic(tmp_path):
    path = tmp_path / "bad.flo"
    path.write_bytes(b"XXXX" + b"\0" * 16)
    with pytest.raises(FormatError):
        read_flo(path)
