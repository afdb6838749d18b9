import math

import numpy as np
import pytest

from wptbeam.arrays import ArrayConfig, beam_power_gain, steering_vector
from wptbeam.codebook import build_codebook


def test_single_code_sits_at_center():
    cfg = ArrayConfig(elements=4)
    book = build_codebook(1, math.pi / 2, 0.8, cfg)
    assert book.angles[0] == pytest.approx(0.8, abs=1e-12)


def test_midpoint_grid_hand_values():
    # N=4, span pi/2, center pi/4: midpoints at (2i+1) pi/16
    cfg = ArrayConfig(elements=4)
    book = build_codebook(4, math.pi / 2, math.pi / 4, cfg)
    for i, angle in enumerate(book.angles):
        assert angle == pytest.approx((2 * i + 1) * math.pi / 16, abs=1e-12)


def test_uniform_spacing_and_monotone():
    cfg = ArrayConfig(elements=4)
    book = build_codebook(9, 1.1, 2.0, cfg)
    diffs = np.diff(book.angles)
    assert np.all(diffs > 0)
    assert np.allclose(diffs, 1.1 / 9, atol=1e-12)


def test_codes_match_steering_vectors_exactly():
    cfg = ArrayConfig(elements=8)
    book = build_codebook(6, math.pi / 3, 1.0, cfg)
    for i, angle in enumerate(book.angles):
        assert np.array_equal(book.code(i), steering_vector(angle, cfg))


def test_rebuild_is_bit_identical():
    cfg = ArrayConfig(elements=16)
    a = build_codebook(8, math.pi / 2, math.pi / 4, cfg)
    b = build_codebook(8, math.pi / 2, math.pi / 4, cfg)
    assert a.angles == b.angles
    assert np.array_equal(a.codes, b.codes)


def test_code_indexing():
    cfg = ArrayConfig(elements=4)
    book = build_codebook(3, 0.5, 0.0, cfg)
    assert np.array_equal(book.code(0), book.codes[0])
    with pytest.raises(IndexError):
        book.code(3)
    with pytest.raises(IndexError):
        book.code(-1)


def test_build_validation():
    cfg = ArrayConfig(elements=4)
    with pytest.raises(ValueError):
        build_codebook(0, 1.0, 0.0, cfg)
    with pytest.raises(ValueError):
        build_codebook(4, 0.0, 0.0, cfg)
    with pytest.raises(ValueError):
        build_codebook(4, 7.0, 0.0, cfg)


def test_codes_are_read_only():
    cfg = ArrayConfig(elements=4)
    book = build_codebook(2, 0.5, 0.0, cfg)
    with pytest.raises(ValueError):
        book.code(0)[0] = 0.0


@pytest.mark.parametrize("elements,n_codes", [(2, 8), (4, 16), (8, 16), (16, 32)])
def test_argmax_gain_is_nearest_in_cos(elements, n_codes):
    # Holds whenever the codebook's cos-space spacing resolves the beam's main
    # lobe (roughly 2/M for half-wavelength phasing); these sizes all qualify.
    rng = np.random.default_rng(17)
    cfg = ArrayConfig(elements=elements)
    center, span = math.pi / 4, math.pi / 2
    book = build_codebook(n_codes, span, center, cfg)
    for _ in range(100):
        phi = center + (rng.random() - 0.5) * span
        link = np.conj(steering_vector(phi, cfg))
        gains = [beam_power_gain(link, book.code(i)) for i in range(n_codes)]
        assert int(np.argmax(gains)) == book.nearest_in_cos(phi)


def test_nearest_helpers_tie_break_low_index():
    cfg = ArrayConfig(elements=4)
    # span 1 around 0 puts codes at exactly -0.25 and +0.25: a true float tie
    book = build_codebook(2, 1.0, 0.0, cfg)
    assert book.angles == (-0.25, 0.25)
    assert book.nearest_to_angle(0.0) == 0
