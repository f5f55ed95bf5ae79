"""Bessel integrals and radial propagators against quadrature."""
import cmath
import math

import pytest

from propload.pathint import (
    VFunctionArgs, WeberParams, appendix_report, coupling_w, khat_compose_check, radial_khat, radial_lambda,
    upsilon2_closed, upsilon_oracle, upsilon_series, v_compose_check, v_delta_check, v_function, weber_closed,
    weber_oracle,
)
from propload.specfun import SpecfunError
from propload.analytic import Kernel


def test_weber_closed_vs_quadrature():
    wp = WeberParams(0.9, 1.4, 1.1 * cmath.exp(0.2j), 0.7)
    val, bound = weber_oracle(wp)
    assert abs(weber_closed(wp) - val) <= 1e-9 * abs(val) + bound


def test_parameter_validation():
    with pytest.raises(ValueError):
        WeberParams(1.0, 1.0, cmath.exp(0.9j), 0.5)
    with pytest.raises(ValueError):
        WeberParams(1.0, -1.0, 1.0, 0.5)
    with pytest.raises(ValueError):
        VFunctionArgs(0.5, 1.0, 1.0, math.pi)
    with pytest.raises(ValueError):
        radial_khat(2, 0, 0.0, 1.0, 1.0, 0.3)


def test_coupling_is_one_for_h1():
    assert coupling_w(3, 2, 0.5, 1) == pytest.approx(1)
    assert coupling_w(1, 0, 0.0, 2) == pytest.approx(math.gamma(3) / math.gamma(2))


def test_upsilon_h1_reduces_to_weber():
    a, b, p, v = 0.8, 1.1, 2.0, 0.5
    assert upsilon_series(1, a, b, p, v) == pytest.approx(weber_closed(WeberParams(a, b, math.sqrt(p), v)), rel=1e-10)


def test_upsilon_h2_closed_and_series():
    a, b, p, v = 0.5, 0.7, 1.5, 1.0
    q, bound = upsilon_oracle(2, a, b, p, v)
    assert upsilon2_closed(a, b, p, v) == pytest.approx(q, rel=1e-8)
    assert upsilon_series(2, a, b, p, v) == pytest.approx(q, rel=1e-8)


def test_upsilon_series_reports_divergence():
    with pytest.raises(SpecfunError):
        upsilon_series(3, 2.0, 2.5, 0.3, 0.5)


def test_v_function_symmetry_and_composition():
    assert v_function(0.5, 0.7, 1.2, 0.4) == pytest.approx(v_function(0.5, 1.2, 0.7, 0.4))
    assert v_compose_check(0.5, 0.8, 1.1, 0.4, 0.3) < 1e-7


def test_v_function_tends_to_delta():
    est, exact = v_delta_check(0.5, 1.0)
    assert est == pytest.approx(exact, rel=1e-3)


def test_radial_lambda():
    assert radial_lambda(3, 1, 0.0) == pytest.approx(1.5)
    assert radial_lambda(1, 0, 0.0) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        radial_lambda(1, 0, -1.0)


def test_khat_zero_frequency_limit_is_halfline():
    r2, r1, t = 0.8, 1.3, 0.5
    k = radial_khat(1, 0, 0.0, r2, r1, t, omega=1e-5)
    assert k == pytest.approx(Kernel("halfline")(r2, r1, t), rel=1e-7)


def test_khat_composition():
    assert khat_compose_check(3, 0, 0.0, 0.8, 1.1, 0.3, 0.5) < 1e-6


def test_appendix_report_all_pass():
    rows = appendix_report()
    assert len(rows) >= 15
    bad = [r.to_dict() for r in rows if not r.passed]
    assert not bad
