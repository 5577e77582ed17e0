"""Bessel evaluation against an independent high-precision series oracle."""

import mpmath as mp
import numpy as np
import pytest

from helmtrefftz.bessel import hankel1_0, j0_y0, j1_y1

mp.mp.dps = 50
EULER = mp.euler


def oracle_j0(x):
    x = mp.mpf(x)
    q = x * x / 4
    total, term = mp.mpf(1), mp.mpf(1)
    for k in range(1, 200):
        term *= -q / (k * k)
        total += term
        if abs(term) < mp.mpf(10) ** (-45) * (1 + abs(total)):
            break
    return total


def oracle_j1(x):
    x = mp.mpf(x)
    q = x * x / 4
    total, term = mp.mpf(1), mp.mpf(1)
    for k in range(1, 200):
        term *= -q / (k * (k + 1))
        total += term
        if abs(term) < mp.mpf(10) ** (-45) * (1 + abs(total)):
            break
    return x / 2 * total


def oracle_y0(x):
    x = mp.mpf(x)
    q = x * x / 4
    total, term, harmonic = mp.mpf(0), mp.mpf(1), mp.mpf(0)
    for k in range(1, 200):
        term *= -q / (k * k)
        harmonic += mp.mpf(1) / k
        total -= term * harmonic
        if abs(term) < mp.mpf(10) ** (-45):
            break
    return 2 / mp.pi * ((mp.log(x / 2) + EULER) * oracle_j0(x) + total)


def oracle_y1(x):
    x = mp.mpf(x)
    q = x * x / 4
    total, term, harmonic = mp.mpf(1), mp.mpf(1), mp.mpf(0)
    for k in range(1, 200):
        term *= -q / (k * (k + 1))
        harmonic += mp.mpf(1) / k
        total += term * (2 * harmonic + mp.mpf(1) / (k + 1))
        if abs(term) < mp.mpf(10) ** (-45):
            break
    return (
        2 / mp.pi * (mp.log(x / 2) + EULER) * oracle_j1(x)
        - 2 / (mp.pi * x)
        - x / (2 * mp.pi) * total
    )


SAMPLE = np.concatenate(
    [
        np.linspace(1e-3, 30.0, 173),
        np.array([0.5, 1.0, 2.5, 15.9, 15.999, 16.0, 16.001, 16.2, 29.7]),
    ]
)


def test_j0_y0_against_series_oracle():
    j, y = j0_y0(SAMPLE)
    for i, x in enumerate(SAMPLE):
        assert abs(j[i] - float(oracle_j0(x))) <= 1e-12
        assert abs(y[i] - float(oracle_y0(x))) <= 1e-12


def test_j1_y1_against_series_oracle():
    j, y = j1_y1(SAMPLE)
    for i, x in enumerate(SAMPLE):
        assert abs(j[i] - float(oracle_j1(x))) <= 1e-12
        assert abs(y[i] - float(oracle_y1(x))) <= 1e-12


def test_reference_values_at_one():
    j0v, y0v = j0_y0(1.0)
    assert j0v == pytest.approx(0.765197686558, abs=1e-12)
    assert y0v == pytest.approx(0.088256964215, abs=1e-12)


def test_wronskian_identity():
    # J1 Y0 - J0 Y1 = 2 / (pi x)
    rng = np.random.default_rng(7)
    xs = 10 ** rng.uniform(np.log10(0.05), np.log10(2000.0), 100)
    j0v, y0v = j0_y0(xs)
    j1v, y1v = j1_y1(xs)
    dev = j1v * y0v - j0v * y1v - 2.0 / (np.pi * xs)
    assert np.abs(dev).max() <= 1e-10


def test_leading_asymptotic_form():
    x = 100.0
    j, _ = j0_y0(x)
    assert abs(j - np.sqrt(2.0 / (np.pi * x)) * np.cos(x - np.pi / 4)) <= 1e-3


def test_rejects_nonpositive():
    with pytest.raises(ValueError):
        j0_y0(0.0)
    with pytest.raises(ValueError):
        j1_y1(-2.0)


def test_hankel_combination():
    x = np.array([0.7, 3.0, 25.0])
    h = hankel1_0(x)
    j, y = j0_y0(x)
    assert np.allclose(h, j + 1j * y, rtol=0, atol=0)
