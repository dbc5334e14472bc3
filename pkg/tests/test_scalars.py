import math

import mpmath as mp
import numpy as np
import pytest
from numpy.testing import assert_allclose

from liegroup_maps.core import ChartDomainError
from liegroup_maps.scalars import (
    DEXPINV_DOMAIN_LIMIT,
    SERIES_WINDOW,
    SMALL_ANGLE_THRESHOLD,
    _adform_quad,
    _adform_quart,
    _cot_half_scaled,
    _dexp_lin_rate,
    _dexp_lin_rate2,
    _dexp_quad,
    _dexp_quad_rate,
    _dexp_quad_rate2,
    _dexpinv_quad,
    _dexpinv_quad_rate,
    _dexpinv_quad_rate2,
    _inv_sinc,
    _inv_sinc_sq_half,
    _sinc,
    _sinc_sq_half,
    ensure_dexp_inv_domain,
    force_branch,
    trig_coeff_derivs,
    trig_coeffs,
)

RNG = np.random.default_rng(42)

mp.mp.dps = 50

TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# 50-digit reference implementations (closed trig forms are harmless in
# extended precision; cancellation only matters in doubles)
# ---------------------------------------------------------------------------


def _ref_alpha(x):
    return mp.sin(x) / x


def _ref_beta(x):
    h = x / 2
    return (mp.sin(h) / h) ** 2


def _ref_gamma(x):
    h = x / 2
    return h * mp.cos(h) / mp.sin(h)


def _ref_inv_beta(x):
    return 1 / _ref_beta(x)


def _ref_delta(x):
    return (1 - _ref_alpha(x)) / x**2


def _ref_dexp_lin_rate(x):
    return (_ref_alpha(x) - _ref_beta(x)) / x**2


def _ref_dexp_quad_rate(x):
    return (_ref_beta(x) / 2 - 3 * _ref_delta(x)) / x**2


def _ref_dexpinv_quad(x):
    return (1 - _ref_gamma(x)) / x**2


def _ref_dexpinv_quad_rate(x):
    return (_ref_inv_beta(x) + _ref_gamma(x) - 2) / x**4


def _ref_dexp_lin_rate2(x):
    return (x**2 * mp.cos(x) - 5 * x * mp.sin(x) + 16 * mp.sin(x / 2) ** 2) / x**6


def _ref_dexp_quad_rate2(x):
    return (x**2 * mp.sin(x) + 7 * x * mp.cos(x) - 15 * mp.sin(x) + 8 * x) / x**7


def _ref_dexpinv_quad_rate2(x):
    g = _ref_gamma(x)
    return ((g * _ref_dexpinv_quad(x) - mp.mpf(1) / 4
             - 2 * _ref_dexp_lin_rate(x) / _ref_beta(x) ** 2) / x**4
            - 4 * _ref_dexpinv_quad_rate(x) / x**2)


def _ref_adform_quad(x):
    return (2 - (1 + 3 * _ref_alpha(x)) / (2 * _ref_beta(x))) / x**2


def _ref_adform_quart(x):
    return (1 - (1 + _ref_alpha(x)) / (2 * _ref_beta(x))) / x**4


def _ref_inv_sinc(x):
    return x / mp.sin(x)


KERNELS = [
    (_sinc, _ref_alpha, TWO_PI - 1e-6),
    (_sinc_sq_half, _ref_beta, TWO_PI - 1e-6),
    (_cot_half_scaled, _ref_gamma, TWO_PI - 1e-6),
    (_inv_sinc_sq_half, _ref_inv_beta, TWO_PI - 1e-6),
    (_dexp_quad, _ref_delta, TWO_PI - 1e-6),
    (_dexp_lin_rate, _ref_dexp_lin_rate, TWO_PI - 1e-6),
    (_dexp_quad_rate, _ref_dexp_quad_rate, TWO_PI - 1e-6),
    (_dexpinv_quad, _ref_dexpinv_quad, TWO_PI - 1e-6),
    (_dexpinv_quad_rate, _ref_dexpinv_quad_rate, TWO_PI - 1e-6),
    (_dexp_lin_rate2, _ref_dexp_lin_rate2, TWO_PI - 1e-6),
    (_dexp_quad_rate2, _ref_dexp_quad_rate2, TWO_PI - 1e-6),
    (_dexpinv_quad_rate2, _ref_dexpinv_quad_rate2, TWO_PI - 1e-6),
    (_adform_quad, _ref_adform_quad, TWO_PI - 1e-6),
    (_adform_quart, _ref_adform_quart, TWO_PI - 1e-6),
    # phi/sin(phi) has a pole at pi; its callers never use it above pi - 1e-3
    (_inv_sinc, _ref_inv_sinc, math.pi - 1e-3),
]


def sweep_angles(upper):
    pts = np.concatenate([
        np.logspace(-4, np.log10(0.99 * min(upper, SERIES_WINDOW)), 40),
        np.linspace(min(upper, SERIES_WINDOW), upper, 40),
        # branch-boundary neighborhoods
        np.array([
            SMALL_ANGLE_THRESHOLD - 1e-9, SMALL_ANGLE_THRESHOLD + 1e-9,
            0.5 - 1e-9, 0.5 + 1e-9,
            SERIES_WINDOW - 1e-9, min(SERIES_WINDOW + 1e-9, upper),
        ]),
        np.array([0.25 * upper, 0.5 * upper, math.pi / 2, upper]),
    ])
    return np.unique(pts[pts <= upper])


def test_kernels_match_extended_precision_sweep():
    for impl, ref, upper in KERNELS:
        for phi in sweep_angles(upper):
            got = impl(float(phi))
            want = ref(mp.mpf(float(phi)))
            err = abs(mp.mpf(got) - want)
            tol = 2e-13 * abs(want) + 5e-15
            assert err < tol, (
                f"{impl.__name__}({phi!r}): got {got!r}, want {mp.nstr(want, 20)},"
                f" err {mp.nstr(err, 3)}"
            )


def test_kernel_values_at_zero_are_exact_limits():
    assert _sinc(0.0) == 1.0
    assert _sinc_sq_half(0.0) == 1.0
    assert _cot_half_scaled(0.0) == 1.0
    assert _inv_sinc_sq_half(0.0) == 1.0
    assert _dexp_quad(0.0) == 1.0 / 6.0
    assert _dexp_lin_rate(0.0) == -1.0 / 12.0
    assert _dexp_quad_rate(0.0) == pytest.approx(-1.0 / 60.0, rel=1e-16)
    assert _dexpinv_quad(0.0) == 1.0 / 12.0
    assert _dexpinv_quad_rate(0.0) == pytest.approx(1.0 / 360.0, rel=1e-16)
    assert _dexp_lin_rate2(0.0) == pytest.approx(1.0 / 90.0, rel=1e-16)
    assert _dexp_quad_rate2(0.0) == pytest.approx(1.0 / 630.0, rel=1e-16)
    assert _dexpinv_quad_rate2(0.0) == pytest.approx(1.0 / 3780.0, rel=1e-16)
    assert _adform_quad(0.0) == 1.0 / 12.0
    assert _adform_quart(0.0) == pytest.approx(-1.0 / 720.0, rel=1e-16)
    assert _inv_sinc(0.0) == 1.0


def test_bundle_values_at_pi():
    c = trig_coeffs(math.pi)
    assert abs(c.alpha) < 1e-15
    assert_allclose(c.beta, 4.0 / math.pi**2, rtol=1e-15)
    assert abs(c.gamma) < 1e-15
    assert_allclose(c.delta, 1.0 / math.pi**2, rtol=1e-14)
    assert_allclose(c.inv_beta, math.pi**2 / 4.0, rtol=1e-15)


def test_bundle_internal_identities():
    # gamma * beta == alpha and delta * phi**2 == 1 - alpha on both branches;
    # stay strictly inside the pole-free domain so gamma is defined
    for phi in sweep_angles(TWO_PI - 1e-5):
        c = trig_coeffs(float(phi))
        assert_allclose(c.gamma * c.beta, c.alpha, rtol=1e-13, atol=1e-15)
        assert_allclose(c.delta * phi * phi, 1.0 - c.alpha, rtol=0, atol=1e-13)
        assert_allclose(c.inv_beta * c.beta, 1.0, rtol=1e-14)


def test_bundle_is_even():
    a = trig_coeffs(-1.3)
    b = trig_coeffs(1.3)
    assert a == b


def test_gamma_domain_error():
    c = trig_coeffs(TWO_PI - 1e-7)
    with pytest.raises(ChartDomainError, match="dexp-inverse domain exceeded"):
        c.gamma
    with pytest.raises(ChartDomainError, match="dexp-inverse domain exceeded"):
        c.inv_beta


def test_alpha_beta_delta_available_beyond_domain():
    # the sub-bundle without poles stays usable at and past 2*pi
    for phi in (TWO_PI - 1e-7, TWO_PI, 7.5, 12.0):
        c = trig_coeffs(phi)
        assert_allclose(c.alpha, math.sin(phi) / phi, rtol=1e-13, atol=1e-16)
        assert np.isfinite(c.beta)
        assert np.isfinite(c.delta)


def test_ensure_domain_boundary():
    ensure_dexp_inv_domain(DEXPINV_DOMAIN_LIMIT - 1e-12)
    with pytest.raises(ChartDomainError):
        ensure_dexp_inv_domain(DEXPINV_DOMAIN_LIMIT)
    with pytest.raises(ChartDomainError):
        ensure_dexp_inv_domain(10.0)


def test_natural_seam_is_continuous():
    lo = trig_coeffs(SMALL_ANGLE_THRESHOLD * (1.0 - 1e-9))
    hi = trig_coeffs(SMALL_ANGLE_THRESHOLD * (1.0 + 1e-9))
    for field in ("alpha", "beta", "gamma", "delta", "inv_beta"):
        a, b = getattr(lo, field), getattr(hi, field)
        assert_allclose(a, b, rtol=1e-12)


def test_forced_branches_agree_at_seam():
    for phi in (SMALL_ANGLE_THRESHOLD - 1e-9, SMALL_ANGLE_THRESHOLD + 1e-9):
        for kernel in (_sinc, _sinc_sq_half, _cot_half_scaled, _inv_sinc_sq_half):
            with force_branch("series"):
                a = kernel(phi)
            with force_branch("closed"):
                b = kernel(phi)
            assert_allclose(a, b, rtol=1e-13)


def test_force_branch_takes_effect():
    # far from the seam the two branches of sinc differ measurably at the
    # last few digits only if forcing actually switches the evaluation path
    phi = 2.0
    with force_branch("series"):
        a = _sinc(phi)
    with force_branch("closed"):
        b = _sinc(phi)
    assert_allclose(a, b, rtol=1e-14)
    assert a == _sinc(phi) or b == _sinc(phi)


def test_force_branch_closed_at_zero_returns_limit():
    with force_branch("closed"):
        assert _sinc(0.0) == 1.0
        assert _cot_half_scaled(0.0) == 1.0


def test_force_branch_validation_and_restore():
    with pytest.raises(ValueError):
        with force_branch("fast"):
            pass
    try:
        with force_branch("series"):
            raise RuntimeError("boom")
    except RuntimeError:
        pass
    # state restored: natural branch at large angle is the closed form
    assert _sinc(2.0) == math.sin(2.0) / 2.0


def test_trig_coeff_derivs_match_finite_differences():
    h = 1e-6
    for _ in range(50):
        x = RNG.uniform(-1.0, 1.0, 3) * RNG.uniform(0.05, 1.8)
        u = RNG.standard_normal(3)
        d = trig_coeff_derivs(x, u)
        for name, field in (("alpha", "d_alpha"), ("beta", "d_beta"),
                            ("delta", "d_delta"), ("gamma", "d_gamma")):
            fp = getattr(trig_coeffs(np.linalg.norm(x + h * u)), name)
            fm = getattr(trig_coeffs(np.linalg.norm(x - h * u)), name)
            fd = (fp - fm) / (2.0 * h)
            assert_allclose(getattr(d, field), fd, atol=2e-9,
                            err_msg=f"d_{name} at x={x}, u={u}")


def test_trig_coeff_derivs_at_zero():
    d = trig_coeff_derivs(np.zeros(3), np.array([1.0, 2.0, 3.0]))
    assert d.d_alpha == 0.0
    assert d.d_beta == 0.0
    assert d.d_delta == 0.0
    assert d.d_gamma == 0.0


def test_trig_coeff_derivs_domain():
    x = np.array([0.0, 0.0, TWO_PI])
    with pytest.raises(ChartDomainError):
        trig_coeff_derivs(x, np.ones(3))
