"""Test-function algebra: evaluation, Mellin transforms, transposes,
derivation, and multiplicative convolution."""

import math

import mpmath as mp
import numpy as np
import pytest
from scipy.integrate import quad

from eflab.errors import AdmissibilityError, DomainError, ParseError
from eflab.testfn import (BumpCombination, StepFunction, autocorrelate, bump,
                          derivation_D, mconvolve, parse_test_function)

from conftest import G0


def mellin_quad_oracle(g, s, lo, hi):
    """Independent adaptive quadrature of int F(x) e^{sx} dx on the log axis."""
    re = quad(lambda x: (g.profile(np.array([x]))[0] * np.exp(s * x)).real,
              lo, hi, limit=400, epsabs=1e-13)[0]
    im = quad(lambda x: (g.profile(np.array([x]))[0] * np.exp(s * x)).imag,
              lo, hi, limit=400, epsabs=1e-13)[0]
    return complex(re, im)


class TestEvaluate:
    def test_step_interior(self):
        assert StepFunction(4.0).evaluate(2.0) == 1.0

    def test_step_midpoints(self):
        st = StepFunction(4.0)
        assert st.evaluate(4.0) == 0.5
        assert st.evaluate(1.0) == 0.5

    def test_bump_center(self):
        # B(0) = e^-1 at the center of a single bump
        assert abs(bump(0.0, 1.0).evaluate(1.0) - math.exp(-1.0)) < 1e-15

    def test_nonpositive_rejected(self):
        with pytest.raises(DomainError):
            G0.evaluate(0.0)
        with pytest.raises(DomainError):
            StepFunction(4.0).evaluate(-2.0)


class TestMellin:
    def test_step_at_one(self):
        assert abs(StepFunction(4.0).mellin(1.0) - 3.0) < 1e-14

    def test_step_closed_form(self):
        st = StepFunction(7.5)
        for s in (0.3 + 2j, -1.1 + 0.4j, 2.0):
            assert abs(st.mellin(s) - (7.5 ** complex(s) - 1.0) / s) < 1e-12, s
        # removable point: the limit log X, approached smoothly
        assert abs(st.mellin(0.0) - math.log(7.5)) < 1e-14
        assert abs(st.mellin(1e-12) - math.log(7.5)) < 1e-11

    def test_bump_at_zero_against_quadrature(self):
        # ghat(0) = int g du/u by an independent adaptive quadrature
        a, b = G0.support_log()
        ref = mellin_quad_oracle(G0, 0.0, a, b)
        assert abs(G0.mellin(0.0) - ref) < 1e-12

    def test_high_frequency_accuracy(self):
        # |Im s| up to 1e3 must stay within 1e-12 absolute (mpmath oracle)
        def F(x):
            xi = (x - mp.mpf("0.7")) / mp.mpf("0.6")
            return mp.e ** (-1 / (1 - xi ** 2)) if abs(xi) < 1 else mp.mpf(0)
        for s in (0.5 + 100j, 0.3 + 553j, 0.5 + 1000j):
            ref = complex(mp.quad(lambda x: F(x) * mp.e ** (mp.mpc(s) * x),
                                  [mp.mpf("0.1"), mp.mpf("0.7"), mp.mpf("1.3")],
                                  maxdegree=12))
            assert abs(G0.mellin(s) - ref) < 1e-12, s

    def test_mellin_decay_envelope(self):
        # |ghat(c+it)| (1+|t|)^6 stays bounded: the far window cannot beat
        # the near window on any of the three reference lines.
        ts = np.linspace(-200.0, 200.0, 401)
        far_ts = np.linspace(600.0, 800.0, 81)
        for c in (0.0, 0.5, 1.0):
            env = np.abs(G0.mellin(c + 1j * ts)) * (1.0 + np.abs(ts)) ** 6
            assert np.isfinite(env).all()
            far = np.abs(G0.mellin(c + 1j * far_ts)) * (1.0 + far_ts) ** 6
            assert far.max() <= env.max(), (c, far.max(), env.max())


class TestTranspose:
    def test_involution_pointwise(self):
        u = np.array([0.4, 1.0, 2.5, 3.1])
        gtt = G0.transpose().transpose()
        assert np.max(np.abs(gtt.evaluate(u) - G0.evaluate(u))) == 0.0

    def test_mellin_functional_equation_quadrature_both_sides(self):
        s = 0.3 + 2j
        gt = G0.transpose()
        a, b = gt.support_log()
        lhs = mellin_quad_oracle(gt, s, a, b)
        a0, b0 = G0.support_log()
        rhs = mellin_quad_oracle(G0, 1.0 - s, a0, b0)
        assert abs(lhs - rhs) < 1e-11
        assert abs(gt.mellin(s) - G0.mellin(1.0 - s)) < 1e-12

    def test_functional_equation_random_strip_points(self):
        rng = np.random.default_rng(5)
        gt = G0.transpose()
        for _ in range(20):
            s = complex(rng.uniform(0.05, 0.95), rng.uniform(-20, 20))
            assert abs(gt.mellin(s) - G0.mellin(1.0 - s)) <= 1e-10

    def test_step_transpose_support(self):
        st = StepFunction(4.0).transpose()
        a, b = st.support_log()
        assert abs(a + math.log(4.0)) < 1e-15 and b == 0.0
        # (1/u) g(1/u) carries the 1/u weight
        assert abs(st.evaluate(0.5) - 2.0) < 1e-15


class TestConjReflect:
    def test_real_valued_reduces_to_transpose(self):
        u = np.array([0.31, 0.8, 1.7])
        gc = G0.conj_reflect()
        gt = G0.transpose()
        assert np.max(np.abs(gc.evaluate(u) - gt.evaluate(u))) == 0.0

    def test_on_line_pairing(self):
        s = 0.5 + 3j
        gc = G0.conj_reflect()
        assert abs(gc.mellin(s) - np.conj(G0.mellin(s))) < 1e-12

    def test_mellin_identity_complex_amplitudes(self):
        g = bump(0.2, 0.5, amp=1 + 2j) + bump(-0.3, 0.3, amp=0.5 - 1j)
        gc = g.conj_reflect()
        for s in (0.4 + 3j, 0.7 - 11j):
            assert abs(gc.mellin(s) - np.conj(g.mellin(1.0 - np.conj(s)))) < 1e-12

    def test_involution(self):
        g = bump(0.1, 0.4, amp=2 - 1j)
        u = np.array([0.7, 1.1, 1.3])
        back = g.conj_reflect().conj_reflect()
        assert np.max(np.abs(back.evaluate(u) - g.evaluate(u))) == 0.0


class TestDerivation:
    def test_mellin_at_zero_and_one(self):
        Dg = derivation_D(G0)
        assert abs(Dg.mellin(0.0)) < 1e-12
        assert abs(Dg.mellin(1.0) - G0.mellin(1.0)) < 1e-12

    def test_pointwise_against_finite_differences(self):
        Dg = derivation_D(G0)
        x = np.linspace(0.15, 1.25, 9)
        h = 1e-6
        fd = -(G0.profile(x + h) - G0.profile(x - h)) / (2.0 * h)
        assert np.max(np.abs(fd - Dg.profile(x))) <= 1e-8

    def test_symbol_identity_random_strip_points(self):
        Dg = derivation_D(G0)
        rng = np.random.default_rng(17)
        for _ in range(20):
            s = complex(rng.uniform(0.0, 1.0), rng.uniform(-30, 30))
            assert abs(Dg.mellin(s) - s * G0.mellin(s)) <= 1e-10

    def test_step_rejected(self):
        with pytest.raises(AdmissibilityError):
            derivation_D(StepFunction(4.0))


class TestConvolution:
    def test_mellin_multiplicativity(self):
        f, k = bump(0.3, 0.4), bump(-0.5, 0.3, amp=2.0)
        c = mconvolve(f, k)
        for s in (0.5, 0.5 + 50j, 0.2 + 17j):
            assert abs(c.mellin(s) - f.mellin(s) * k.mellin(s)) <= 1e-9, s

    def test_support_minkowski_sum(self):
        f, k = bump(0.3, 0.4), bump(-0.5, 0.3)
        c = mconvolve(f, k)
        a, b = c.support_log()
        pad = 2.5 * c.h  # grid snapping adds at most two samples per side
        assert a >= (0.3 - 0.4) + (-0.5 - 0.3) - pad
        assert b <= (0.3 + 0.4) + (-0.5 + 0.3) + pad

    def test_commutativity_on_grid(self):
        f, k = bump(0.3, 0.4), bump(-0.5, 0.3, amp=2.0)
        c1, c2 = mconvolve(f, k), mconvolve(k, f)
        assert c1.x0 == c2.x0
        assert np.max(np.abs(c1.values - c2.values)) < 1e-12

    def test_associativity_three_bumps(self):
        a, b, c = bump(0.2, 0.3), bump(-0.1, 0.25), bump(0.5, 0.35)
        left = mconvolve(mconvolve(a, b), c)
        right = mconvolve(a, mconvolve(b, c))
        xs = np.linspace(-0.4, 1.4, 41)
        assert np.max(np.abs(left.profile(xs) - right.profile(xs))) <= 1e-8

    def test_step_rejected(self):
        with pytest.raises(AdmissibilityError):
            mconvolve(StepFunction(2.0), G0)


class TestAutocorrelate:
    def test_on_line_modulus(self):
        h = autocorrelate(G0)
        assert abs(h.mellin(0.5) - abs(G0.mellin(0.5)) ** 2) < 1e-9

    def test_on_line_nonnegative(self):
        h = autocorrelate(G0)
        v = h.mellin(0.5 + 5j)
        assert abs(v.imag) < 1e-10 and v.real >= 0.0

    def test_off_line_factorization(self):
        g = bump(0.2, 0.5, amp=1 + 1j)
        h = autocorrelate(g)
        s = 0.4 + 1j
        expected = g.mellin(s) * np.conj(g.mellin(1.0 - np.conj(s)))
        assert abs(h.mellin(s) - expected) <= 1e-9


class TestParse:
    def test_single_bump(self):
        g = parse_test_function("bump:mu=0.7,sigma=0.6")
        assert isinstance(g, BumpCombination)
        assert g.terms == G0.terms

    def test_multi_term_with_amp(self):
        g = parse_test_function("bump:mu=0.1,sigma=0.2,amp=2+mu=-0.3,sigma=0.4")
        assert len(g.terms) == 2
        assert g.terms[0].amp == 2.0 and g.terms[1].mu == -0.3

    def test_step(self):
        st = parse_test_function("step:X=4")
        assert isinstance(st, StepFunction) and st.X == 4.0

    @pytest.mark.parametrize("text", [
        "bump:mu=0.7", "bump:sigma=0.5", "bump:mu=a,sigma=0.5",
        "step:X=0.5", "step:Y=4", "blob:mu=0,sigma=1",
        "bump:mu=0,sigma=-1", "bump:mu=0,sigma=0.5,amp=1,amp=2", "",
    ])
    def test_malformed_rejected(self, text):
        with pytest.raises(ParseError):
            parse_test_function(text)
