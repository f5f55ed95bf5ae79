"""Grids, target densities, encodings and distances."""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from propload.gridpdf import Grid, TargetPdf, amplitude_encode, distance, parse_pdf, pdf_eval
from propload.state import QState


def test_symmetric_grid_points():
    g = Grid(3, 2.0)
    np.testing.assert_allclose(g.x, -2 + (1 + 2 * np.arange(8)) * 2 / 8)
    assert g.delta == pytest.approx(0.5)
    assert np.all(np.diff(g.x) > 0)


def test_positive_grid_points():
    g = Grid(3, 2.0, "positive")
    np.testing.assert_allclose(g.x, (1 + 2 * np.arange(8)) * 2 / 8)
    assert g.left == 0 and g.right == 4


@settings(max_examples=30, deadline=None)
@given(N=st.integers(1, 12), L=st.floats(0.1, 50.0), support=st.sampled_from(["symmetric", "positive"]))
def test_grid_never_contains_zero(N, L, support):
    g = Grid(N, L, support)
    assert np.all(g.x != 0)
    np.testing.assert_allclose(np.diff(g.x), g.delta, rtol=1e-9)


def test_laplace_peak():
    assert pdf_eval(TargetPdf("laplace", (0.0, 0.25)), 0.0) == pytest.approx(2.0)


def test_chi_vanishes_at_origin():
    assert pdf_eval(TargetPdf("chi", (3,)), 0.0) == 0.0


def test_normal_integrates_to_one():
    val = integrate.quad(lambda x: pdf_eval(TargetPdf("normal"), x), -8, 8, epsabs=1e-13)[0]
    assert abs(val - 1) < 1e-9


@pytest.mark.parametrize("tag", ["normal", "lognormal", "chi:2", "chi:5", "maxwell", "laplace", "uniform"])
def test_all_targets_normalized(tag):
    t = parse_pdf(tag)
    lo = 0 if tag in ("lognormal", "maxwell") or tag.startswith("chi") else -40
    pts = [-1, 0, 1] if tag in ("laplace", "uniform") else None
    if tag == "lognormal":
        # heavy tail: integrate to infinity
        val = integrate.quad(lambda x: pdf_eval(t, x), 0, np.inf, limit=200)[0]
    else:
        val = integrate.quad(lambda x: pdf_eval(t, x), lo, 40, points=pts, limit=200)[0]
    assert abs(val - 1) < 1e-6


def test_maxwell_is_chi3():
    x = np.linspace(0.1, 4, 9)
    np.testing.assert_allclose(pdf_eval(TargetPdf("maxwell"), x), pdf_eval(TargetPdf("chi", (3,)), x))


def test_invalid_parameters():
    with pytest.raises(ValueError):
        TargetPdf("normal", (0.0, -1.0))
    with pytest.raises(ValueError):
        TargetPdf("chi", (0,))
    with pytest.raises(ValueError):
        parse_pdf("cauchy")


def test_uniform_density_encoding():
    g = Grid(5, 1.0)
    enc = amplitude_encode(TargetPdf("uniform", (-1.0, 1.0)), g, "density")
    np.testing.assert_allclose(enc.state.amps, 2 ** -2.5, atol=1e-15)


def test_sampler_encoding_is_root_density():
    g = Grid(6, 5.0)
    enc = amplitude_encode(TargetPdf("normal"), g, "sampler")
    ref = np.sqrt(np.exp(-g.x**2 / 2))
    np.testing.assert_allclose(enc.state.amps, ref / np.linalg.norm(ref), atol=1e-14)


def test_laplace_sampler_matches_delta_bound_state():
    from propload.analytic import delta_bound_state

    g = Grid(6, 5.0)
    for b in (1.0, 2.0):
        enc = amplitude_encode(TargetPdf("laplace", (0.0, b)), g, "sampler")
        psi = np.abs(delta_bound_state(1 / (2 * b), g.x, t=0.7))
        np.testing.assert_allclose(enc.state.amps, psi / np.linalg.norm(psi), atol=1e-14)


def test_zero_density_rejected():
    with pytest.raises(ValueError):
        amplitude_encode(TargetPdf("uniform", (10.0, 11.0)), Grid(4, 1.0))


def test_distance_basics():
    s = QState.from_amplitudes(np.ones(4))
    d = distance(s, s)
    assert d.l2 == d.sup == d.tv == 0
    assert distance(np.array([0.5, 0.5]), np.array([1.0, 0.0])).tv == pytest.approx(0.5)
    with pytest.raises(ValueError):
        distance(np.ones(2) / 2, np.ones(4) / 4)


def test_encoding_distance_idempotent():
    g = Grid(6, 5.0)
    enc = amplitude_encode(TargetPdf("normal"), g, "sampler")
    d = distance(enc.state, enc)
    assert d.l2 == 0 and d.sup == 0


def test_sampler_probabilities_converge_second_order():
    # a Gaussian would be spectrally accurate; the Laplace kink shows the O(delta^2) rate
    errs = []
    target = TargetPdf("laplace", (0.0, 1.0))
    for N in (6, 7, 8):
        g = Grid(N, 20.0)
        p = amplitude_encode(target, g, "sampler").probabilities
        errs.append(np.max(np.abs(p / g.delta - pdf_eval(target, g.x))))
    assert errs[0] / errs[1] > 3 and errs[1] / errs[2] > 3


def test_plateau_sup_distance():
    g = Grid(9, 6.0)
    plateau = np.where(np.abs(g.x) < 1, 1.0, 0.0)
    s = QState.from_amplitudes(plateau)
    ref = amplitude_encode(TargetPdf("normal"), g, "sampler")
    d = distance(s, ref)
    expected = np.max(np.abs(plateau / plateau.sum() / g.delta - ref.probabilities / g.delta))
    assert d.sup == pytest.approx(expected, rel=1e-12)
    # worst point is the plateau edge, where the density 1/2 meets f(1)
    assert d.sup == pytest.approx(0.5 - math.exp(-0.5) / math.sqrt(2 * math.pi), abs=1e-2)
