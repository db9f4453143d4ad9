"""Core special functions: frozen reference values and invariants.

Reference values were computed with mpmath at 50+ significant digits from
the defining formulas (deformed gamma/beta as rescaled classical ones, the
kernel by direct term-by-term summation of its definition at high
precision, cross-checked against hypergeometric closed forms where they
exist).
"""

import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kbeta.errors import (
    ConvergenceError,
    DomainError,
    LogOverflowError,
    PoleError,
    SeriesGuardError,
)
from kbeta.kcore import (
    GammaMode,
    MLParams,
    SeriesConfig,
    k_beta,
    k_gamma,
    k_gamma_extended,
    k_pochhammer,
    log_k_beta,
    log_k_gamma,
    mittag_leffler_k,
)
from kbeta import _mlseries

WIDE = SeriesConfig(max_abs_argument=130.0, max_terms=2500)


def brute_kernel(x, k, p, q, r, mode, dps=60, terms=2500):
    """Direct summation of the defining series, independent of the package
    implementation (per-term deformed Pochhammer and gamma via mpmath)."""
    with mp.workdps(dps):
        kk, pp, qq, rr, xx = (mp.mpf(v) for v in (k, p, q, r, x))
        total = mp.mpf(0)
        poch = mp.mpf(1)
        fact = mp.mpf(1)
        for j in range(terms):
            arg = pp * j + qq
            if mode is GammaMode.CLASSICAL:
                den = mp.gamma(arg)
            else:
                den = kk ** (arg / kk - 1) * mp.gamma(arg / kk)
            term = poch * xx**j / (den * fact)
            total += term
            if j > 20 and abs(term) < mp.mpf(10) ** (-dps) * max(1, abs(total)):
                break
            poch *= rr + j * kk
            fact *= j + 1
        return float(total)


class TestKGamma:
    def test_frozen_values(self):
        assert k_gamma(1.0, 2.0) == pytest.approx(1.2533141373155002512, rel=1e-14)
        assert k_gamma(2.5, 0.5) == pytest.approx(1.5, rel=1e-14)
        # k_gamma(k, k) == 1 exactly by the functional equation
        for k in (0.3, 1.0, 2.0, 7.5):
            assert k_gamma(k, k) == pytest.approx(1.0, rel=1e-14)

    def test_reduces_to_gamma_at_k_1(self):
        for eta in (0.1, 0.9, 1.0, 4.7, 20.0):
            assert k_gamma(eta, 1.0) == pytest.approx(math.gamma(eta), rel=1e-14)

    @settings(max_examples=80, deadline=None)
    @given(
        eta=st.floats(0.1, 40.0),
        k=st.floats(0.2, 5.0),
    )
    def test_functional_equation(self, eta, k):
        lhs = k_gamma(eta + k, k)
        rhs = eta * k_gamma(eta, k)
        assert lhs == pytest.approx(rhs, rel=5e-13)

    def test_log_consistency(self):
        for eta, k in ((0.3, 2.0), (5.0, 0.7), (44.0, 1.3)):
            assert log_k_gamma(eta, k) == pytest.approx(
                math.log(k_gamma(eta, k)), abs=1e-12
            )

    def test_overflow_carries_log(self):
        with pytest.raises(LogOverflowError) as exc:
            k_gamma(5000.0, 1.0)
        assert exc.value.log_value == pytest.approx(math.lgamma(5000.0), rel=1e-13)

    def test_domain(self):
        with pytest.raises(DomainError):
            k_gamma(-1.0, 1.0)
        with pytest.raises(DomainError):
            k_gamma(1.0, 0.0)
        with pytest.raises(DomainError):
            k_gamma(math.nan, 1.0)


class TestKPochhammer:
    def test_frozen_values(self):
        assert k_pochhammer(2.0, 0.5, 4) == pytest.approx(52.5, rel=1e-14)
        assert k_pochhammer(1.0, 1.0, 5) == pytest.approx(120.0, rel=1e-14)
        assert k_pochhammer(3.7, 2.2, 0) == 1.0

    @settings(max_examples=60, deadline=None)
    @given(
        r=st.floats(0.05, 20.0),
        k=st.floats(0.2, 4.0),
        j=st.integers(0, 25),
    )
    def test_recurrence(self, r, k, j):
        assert k_pochhammer(r, k, j + 1) == pytest.approx(
            k_pochhammer(r, k, j) * (r + j * k), rel=1e-12
        )

    @settings(max_examples=60, deadline=None)
    @given(
        r=st.floats(0.1, 10.0),
        k=st.floats(0.3, 3.0),
        j=st.integers(0, 20),
    )
    def test_gamma_ratio_form(self, r, k, j):
        # (r)_{k,j} = k**j * Gamma(r/k + j) / Gamma(r/k)
        expect = math.exp(
            j * math.log(k) + math.lgamma(r / k + j) - math.lgamma(r / k)
        )
        assert k_pochhammer(r, k, j) == pytest.approx(expect, rel=1e-11)

    def test_domain_and_overflow(self):
        with pytest.raises(DomainError):
            k_pochhammer(1.0, 1.0, -1)
        with pytest.raises(DomainError):
            k_pochhammer(1.0, -2.0, 3)
        with pytest.raises(LogOverflowError):
            k_pochhammer(50.0, 50.0, 250)


class TestKGammaExtended:
    def test_matches_k_gamma_on_positive_axis(self):
        for eta, k in ((0.4, 1.0), (3.0, 2.0), (1.1, 0.5)):
            assert k_gamma_extended(eta, k) == k_gamma(eta, k)

    def test_classical_negative_half(self):
        # Gamma(-0.5) = -2 sqrt(pi)
        assert k_gamma_extended(-0.5, 1.0) == pytest.approx(
            -2.0 * math.sqrt(math.pi), rel=1e-13
        )
        # Gamma(-1.5) = 4 sqrt(pi) / 3
        assert k_gamma_extended(-1.5, 1.0) == pytest.approx(
            4.0 * math.sqrt(math.pi) / 3.0, rel=1e-13
        )

    def test_recurrence_across_zero(self):
        eta, k = -0.7, 1.7
        assert eta * k_gamma_extended(eta, k) == pytest.approx(
            k_gamma_extended(eta + k, k), rel=1e-12
        )

    def test_poles(self):
        for eta, k in ((0.0, 1.0), (-1.0, 1.0), (-3.0, 1.5), (-2e-13, 1.0)):
            with pytest.raises(PoleError):
                k_gamma_extended(eta, k)


class TestKBeta:
    def test_frozen_values(self):
        # B_2(1,1) = (1/2) B(1/2, 1/2) = pi/2
        assert k_beta(1.0, 1.0, 2.0) == pytest.approx(math.pi / 2.0, rel=1e-13)
        assert k_beta(2.0, 3.0, 1.0) == pytest.approx(1.0 / 12.0, rel=1e-13)

    @settings(max_examples=60, deadline=None)
    @given(
        s=st.floats(0.1, 30.0),
        t=st.floats(0.1, 30.0),
        k=st.floats(0.25, 4.0),
    )
    def test_symmetry_and_gamma_form(self, s, t, k):
        assert k_beta(s, t, k) == pytest.approx(k_beta(t, s, k), rel=1e-13)
        via_gamma = math.exp(
            log_k_gamma(s, k) + log_k_gamma(t, k) - log_k_gamma(s + t, k)
        )
        assert k_beta(s, t, k) == pytest.approx(via_gamma, rel=1e-12)

    def test_contiguous_relation(self):
        # B_k(s, t) = B_k(s + k, t) + B_k(s, t + k)
        for s, t, k in ((1.0, 2.0, 1.0), (0.6, 0.9, 2.0), (3.0, 0.5, 0.7)):
            assert k_beta(s, t, k) == pytest.approx(
                k_beta(s + k, t, k) + k_beta(s, t + k, k), rel=1e-12
            )

    def test_log_consistency(self):
        assert log_k_beta(1.5, 2.5, 2.0) == pytest.approx(
            math.log(k_beta(1.5, 2.5, 2.0)), abs=1e-13
        )


class TestMittagLeffler:
    def test_frozen_values(self):
        cases = [
            # (x, k, p, q, r, mode, value)
            (-0.25, 2, 1, 1, 1, GammaMode.K_DEFORMED, 0.6068973352250569677062),
            (-0.25, 2, 1, 1, 1, GammaMode.CLASSICAL, 0.7910171621397193638862),
            (-2.0, 1, 1, 1, 1.5, GammaMode.CLASSICAL, -0.04993877689422353876319),
            (-30.0, 1, 1, 1, 1.5, GammaMode.CLASSICAL, -0.001861160660859262747583),
            (-40.0, 1, 1, 1, 1.5, GammaMode.CLASSICAL, -0.001183276176668227988639),
            (-75.0, 1, 1, 1, 1.5, GammaMode.CLASSICAL, -0.0004479173663691554856376),
            (-80.0, 1, 1, 1, 1.5, GammaMode.CLASSICAL, -0.0004057841882262309191358),
            (-0.7, 2, 1, 1, 1, GammaMode.CLASSICAL, 0.5593055265070683343431),
        ]
        for x, k, p, q, r, mode, want in cases:
            params = MLParams(k=k, p=p, q=q, r=r, denominator_gamma=mode)
            res = mittag_leffler_k(x, params, WIDE)
            assert res.value == pytest.approx(want, rel=5e-13), (x, k, mode)
            assert abs(res.value - want) <= max(res.error_estimate, 5e-16 * abs(want))

    def test_exponential_identity(self):
        # k = p = q = r = 1 collapses to exp(x)
        params = MLParams(k=1, p=1, q=1, r=1)
        for m in np.linspace(0.0, 20.0, 81):
            res = mittag_leffler_k(-float(m), params)
            assert abs(res.value - math.exp(-m)) <= 1e-12

    def test_exp_type_half_k(self):
        # classical mode, k=1/2, p=q=r=1: E(x) = exp(x/2)(1 + x/2)
        params = MLParams(k=0.5, p=1, q=1, r=1)
        for x in (-3.0, -0.4, 1.2, -17.0):
            res = mittag_leffler_k(x, params)
            want = math.exp(x / 2.0) * (1.0 + x / 2.0)
            assert res.value == pytest.approx(want, abs=2e-13, rel=1e-11)

    def test_value_at_zero(self):
        # E(0) = 1 / D(q)
        params = MLParams(k=2, p=1.3, q=1.7, r=0.9)
        res = mittag_leffler_k(0.0, params)
        assert res.value == pytest.approx(1.0 / math.gamma(1.7), rel=1e-14)
        params_d = MLParams(
            k=2, p=1.3, q=1.7, r=0.9, denominator_gamma=GammaMode.K_DEFORMED
        )
        res_d = mittag_leffler_k(0.0, params_d)
        assert res_d.value == pytest.approx(1.0 / k_gamma(1.7, 2.0), rel=1e-14)

    @pytest.mark.parametrize(
        "k,p,q,r,mode",
        [
            (1.0, 1.0, 1.0, 1.0, GammaMode.CLASSICAL),
            (2.0, 1.0, 1.0, 1.0, GammaMode.K_DEFORMED),
            (0.5, 0.75, 1.0, 1.0, GammaMode.K_DEFORMED),
            (2.0, 1.5, 0.75, 1.2, GammaMode.CLASSICAL),
            (1.5, 0.8, 1.1, 1.2, GammaMode.K_DEFORMED),
        ],
    )
    def test_matches_brute_definition(self, k, p, q, r, mode):
        params = MLParams(k=k, p=p, q=q, r=r, denominator_gamma=mode)
        for x in (-2.5, -0.3, 0.0, 1.1):
            res = mittag_leffler_k(x, params)
            want = brute_kernel(x, k, p, q, r, mode)
            assert res.value == pytest.approx(want, rel=1e-11, abs=1e-13)

    def test_error_estimate_honest_against_brute(self):
        params = MLParams(k=1, p=0.75, q=1, r=1)
        for x in (-3.0, -8.0, -20.0, -60.0):
            res = mittag_leffler_k(x, params, WIDE)
            want = brute_kernel(x, 1, 0.75, 1, 1, GammaMode.CLASSICAL, dps=120)
            assert abs(res.value - want) <= res.error_estimate + 1e-15 * abs(want)

    def test_batch_matches_scalar(self):
        params = MLParams(k=1, p=1, q=1, r=1.5)
        ev = _mlseries.get_evaluator(params)
        xs = -np.concatenate(
            [np.linspace(0.0, 3.9, 25), np.linspace(4.0, 120.0, 40)]
        )
        vals, bound = ev.batch_nonpos(xs, WIDE)
        for x, v in zip(xs, vals):
            ref = mittag_leffler_k(float(x), params, WIDE)
            assert abs(v - ref.value) <= bound + ref.error_estimate

    def test_series_guard(self):
        params = MLParams(k=1, p=1, q=1, r=1)
        with pytest.raises(SeriesGuardError):
            mittag_leffler_k(-51.0, params)
        with pytest.raises(SeriesGuardError):
            mittag_leffler_k(-3.0, params, SeriesConfig(max_abs_argument=2.0))

    def test_max_terms_refusal(self):
        # small reduced exponent needs term counts far beyond any sane cap
        params = MLParams(
            k=2, p=0.75, q=1, r=1.5, denominator_gamma=GammaMode.K_DEFORMED
        )
        with pytest.raises(ConvergenceError):
            mittag_leffler_k(-45.0, params, SeriesConfig(max_terms=400))

    def test_param_validation(self):
        with pytest.raises(DomainError):
            mittag_leffler_k(-1.0, MLParams(k=0.0, p=1, q=1, r=1))
        with pytest.raises(DomainError):
            mittag_leffler_k(-1.0, MLParams(k=1, p=-1, q=1, r=1))
        with pytest.raises(DomainError):
            mittag_leffler_k(math.inf, MLParams(k=1, p=1, q=1, r=1))

    def test_classification(self):
        exp_cases = [
            MLParams(k=1, p=1, q=1, r=1),
            MLParams(k=1, p=1, q=1, r=3),
            MLParams(k=0.5, p=1, q=1, r=1),
            MLParams(k=1, p=1, q=1, r=1, denominator_gamma=GammaMode.K_DEFORMED),
        ]
        for p in exp_cases:
            assert _mlseries.get_evaluator(p).exp_type()
        alg_cases = [
            MLParams(k=1, p=1, q=1, r=1.5),
            MLParams(k=1, p=0.75, q=1, r=1),
            MLParams(k=2, p=1, q=1, r=1, denominator_gamma=GammaMode.K_DEFORMED),
        ]
        for p in alg_cases:
            ev = _mlseries.get_evaluator(p)
            assert not ev.exp_type()
            assert ev.algebraic_decay_exponent() == pytest.approx(p.r / p.k)
        osc = MLParams(k=0.5, p=1, q=1, r=1, denominator_gamma=GammaMode.K_DEFORMED)
        assert _mlseries.get_evaluator(osc).oscillatory()

    def test_accuracy_on_both_sides_of_path_switch(self):
        # the double/extended dispatch boundary sits near |x| = 4 here;
        # both regimes must track the defining series
        params = MLParams(k=1, p=1, q=1, r=1.5)
        for x in (-3.9, -4.1):
            res = mittag_leffler_k(x, params, WIDE)
            want = brute_kernel(x, 1, 1, 1, 1.5, GammaMode.CLASSICAL, dps=80)
            assert res.value == pytest.approx(want, rel=1e-12)
