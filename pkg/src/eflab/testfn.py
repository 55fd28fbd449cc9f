"""Test functions on the positive half-line and their multiplicative calculus.

Two constructible kinds:

  * smooth compactly supported combinations of log-axis bumps,
    u -> sum_i a_i * B((log u - mu_i)/sigma_i) with B(x) = exp(-1/(1-x^2));
  * the step function 1_(1,X) with midpoint values 1/2 at u = 1 and u = X.

plus derived kinds produced by the operations themselves (transposes,
log-derivations, sampled multiplicative convolutions on a uniform log grid).

The Mellin transform here is ghat(s) = int_0^inf g(u) u^s du/u, computed on
the log axis as int F(x) e^{sx} dx with composite Gauss-Legendre panels whose
node density tracks |Im s|; step functions use the closed form (X^s - 1)/s.

Conventions fixed by the calculus:

  transpose      g^tau(u)   = (1/u) g(1/u),       Mellin s -> 1-s
  conj_reflect   g-check(u) = (1/u) conj(g(1/u)), Mellin s -> conj on 1-conj(s)
  derivation     (Dg)(u)    = -u g'(u),           Mellin multiplies by s
  mconvolve      (f*k)(u)   = int f(u/v) k(v) dv/v
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import AdmissibilityError, DomainError, ParseError
from .quadrature import panel_nodes

#: Default log-grid spacing for sampled convolutions.
CONV_SPACING = 1.0 / 512.0

_MELLIN_CHUNK = 512


def _bump_kernel(xi: np.ndarray, order: int = 0) -> np.ndarray:
    """B(xi) = exp(-1/(1-xi^2)) inside (-1,1), zero outside; derivative orders <= 3."""
    xi = np.asarray(xi, dtype=float)
    out = np.zeros(xi.shape, dtype=float)
    m = xi * xi < 1.0 - 1e-10
    if not m.any():
        return out
    x = xi[m]
    one = 1.0 - x * x
    B = np.exp(-1.0 / one)
    if order == 0:
        val = B
    else:
        h1 = -2.0 * x / one**2
        if order == 1:
            val = B * h1
        elif order == 2:
            h1p = (-2.0 - 6.0 * x * x) / one**3
            val = B * (h1 * h1 + h1p)
        elif order == 3:
            h1p = (-2.0 - 6.0 * x * x) / one**3
            h1pp = -24.0 * x * (1.0 + x * x) / one**4
            val = B * (h1**3 + 3.0 * h1 * h1p + h1pp)
        else:
            raise NotImplementedError(f"bump kernel derivative order {order}")
    out[m] = val
    return out


class BumpTerm(NamedTuple):
    amp: complex
    mu: float
    sigma: float


class TestFunction:
    """Common protocol: log-axis profile F(x) = g(e^x) plus the algebra ops."""

    is_smooth: bool = True

    # -- representation hooks -------------------------------------------------
    def support_log(self) -> tuple[float, float]:
        raise NotImplementedError

    def profile(self, x):
        raise NotImplementedError

    def profile_deriv(self, x, order: int = 1):
        raise NotImplementedError

    def _breakpoints(self) -> tuple[float, ...]:
        return self.support_log()

    @property
    def is_zero(self) -> bool:
        return False

    # -- pointwise evaluation --------------------------------------------------
    def evaluate(self, u):
        """g(u) for u > 0 (scalar or array), midpoint convention at step jumps."""
        uu = np.asarray(u, dtype=float)
        if np.any(uu <= 0.0):
            raise DomainError("test functions live on (0, inf); got non-positive u")
        scalar = uu.ndim == 0
        vals = self.profile(np.log(np.atleast_1d(uu)))
        return complex(vals[0]) if scalar else vals

    # -- Mellin transform --------------------------------------------------------
    def mellin(self, s):
        """ghat(s) = int g(u) u^s du/u; complex scalar or array argument."""
        sz = np.asarray(s, dtype=complex)
        scalar = sz.ndim == 0
        out = self._mellin_many(np.atleast_1d(sz))
        return complex(out[0]) if scalar else out.reshape(sz.shape)

    def _mellin_many(self, s: np.ndarray) -> np.ndarray:
        if self.is_zero:
            return np.zeros(s.shape, dtype=complex)
        osc = float(np.max(np.abs(s.imag))) if s.size else 0.0
        x, w = panel_nodes(self._breakpoints(), density=64.0, osc=osc)
        F = w * np.asarray(self.profile(x), dtype=complex)
        out = np.empty(s.shape, dtype=complex)
        for lo in range(0, s.size, _MELLIN_CHUNK):
            blk = s[lo:lo + _MELLIN_CHUNK]
            out[lo:lo + _MELLIN_CHUNK] = F @ np.exp(np.multiply.outer(x, blk))
        return out

    # -- algebra -------------------------------------------------------------
    def transpose(self) -> "TestFunction":
        """g^tau(u) = (1/u) g(1/u)."""
        return TransposedFunction(self)

    def conjugate(self) -> "TestFunction":
        raise NotImplementedError

    def conj_reflect(self) -> "TestFunction":
        """g-check(u) = (1/u) conj(g(1/u)); involution, trivial for real g."""
        return self.conjugate().transpose()

    def scale(self, a: complex) -> "TestFunction":
        raise NotImplementedError


@dataclass(frozen=True)
class BumpCombination(TestFunction):
    """Finite sum of compact log-axis bumps; smooth, compactly supported."""

    terms: tuple[BumpTerm, ...]

    def __post_init__(self):
        for t in self.terms:
            if not (math.isfinite(t.mu) and t.sigma > 0.0):
                raise DomainError(f"bad bump term {t}")

    @property
    def is_zero(self) -> bool:
        return not self.terms or all(t.amp == 0 for t in self.terms)

    def support_log(self):
        if not self.terms:
            return (0.0, 0.0)
        return (min(t.mu - t.sigma for t in self.terms),
                max(t.mu + t.sigma for t in self.terms))

    def _breakpoints(self):
        pts = set()
        for t in self.terms:
            pts.add(t.mu - t.sigma)
            pts.add(t.mu + t.sigma)
        return tuple(sorted(pts)) if pts else (0.0, 0.0)

    def profile(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=complex)
        for t in self.terms:
            out += t.amp * _bump_kernel((x - t.mu) / t.sigma, 0)
        return out

    def profile_deriv(self, x, order: int = 1):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=complex)
        for t in self.terms:
            out += (t.amp / t.sigma**order) * _bump_kernel((x - t.mu) / t.sigma, order)
        return out

    def conjugate(self):
        return BumpCombination(tuple(BumpTerm(complex(t.amp).conjugate(), t.mu, t.sigma)
                                     for t in self.terms))

    def scale(self, a):
        return BumpCombination(tuple(BumpTerm(a * t.amp, t.mu, t.sigma) for t in self.terms))

    def __add__(self, other):
        if not isinstance(other, BumpCombination):
            return NotImplemented
        return BumpCombination(self.terms + other.terms)


def bump(mu: float, sigma: float, amp: complex = 1.0) -> BumpCombination:
    """Single bump u -> amp * B((log u - mu)/sigma)."""
    return BumpCombination((BumpTerm(complex(amp), float(mu), float(sigma)),))


@dataclass(frozen=True)
class StepFunction(TestFunction):
    """Indicator of (1, X) with value 1/2 at u = 1 and u = X; X > 1.

    The transposed variant (1/u) 1_(1,X)(1/u) is kept in closed form as well,
    so evaluation and Mellin transforms never touch the jumps numerically.
    """

    X: float
    transposed: bool = False

    is_smooth = False

    def __post_init__(self):
        if not (self.X > 1.0 and math.isfinite(self.X)):
            raise DomainError(f"step function needs X > 1, got {self.X}")

    def support_log(self):
        lx = math.log(self.X)
        return (-lx, 0.0) if self.transposed else (0.0, lx)

    def evaluate(self, u):
        uu = np.asarray(u, dtype=float)
        if np.any(uu <= 0.0):
            raise DomainError("test functions live on (0, inf); got non-positive u")
        scalar = uu.ndim == 0
        uu = np.atleast_1d(uu).astype(float)
        if self.transposed:
            base = StepFunction(self.X)
            vals = base.evaluate(1.0 / uu) / uu
        else:
            vals = np.where((uu == 1.0) | (uu == self.X), 0.5,
                            np.where((uu > 1.0) & (uu < self.X), 1.0, 0.0))
            vals = vals.astype(complex)
        return complex(vals[0]) if scalar else vals

    def profile(self, x):
        return self.evaluate(np.exp(np.asarray(x, dtype=float)))

    def _mellin_many(self, s):
        # (X^s - 1)/s with the removable value log X at s = 0; the transpose
        # evaluates the same closed form at 1 - s.
        z = (1.0 - s) if self.transposed else s
        lx = math.log(self.X)
        out = np.empty(z.shape, dtype=complex)
        small = np.abs(z) < 1e-8
        zl = z[small] * lx
        out[small] = lx * (1.0 + zl / 2.0 + zl * zl / 6.0)
        zb = z[~small]
        out[~small] = np.expm1(zb * lx) / zb
        return out

    def transpose(self):
        return StepFunction(self.X, not self.transposed)

    def conjugate(self):
        return self


@dataclass(frozen=True)
class TransposedFunction(TestFunction):
    """g^tau for kinds without a native closed-form transpose."""

    inner: TestFunction

    @property
    def is_smooth(self):
        return self.inner.is_smooth

    @property
    def is_zero(self):
        return self.inner.is_zero

    def support_log(self):
        a, b = self.inner.support_log()
        return (-b, -a)

    def _breakpoints(self):
        return tuple(sorted(-x for x in self.inner._breakpoints()))

    def profile(self, x):
        x = np.asarray(x, dtype=float)
        return np.exp(-x) * self.inner.profile(-x)

    def profile_deriv(self, x, order: int = 1):
        # d^k/dx^k [e^{-x} P(-x)] = (-1)^k e^{-x} sum_j C(k,j) P^(j)(-x)
        x = np.asarray(x, dtype=float)
        total = np.zeros(x.shape, dtype=complex)
        for j in range(order + 1):
            pj = self.inner.profile(-x) if j == 0 else self.inner.profile_deriv(-x, j)
            total += math.comb(order, j) * pj
        return (-1.0) ** order * np.exp(-x) * total

    def transpose(self):
        return self.inner

    def conjugate(self):
        return TransposedFunction(self.inner.conjugate())

    def scale(self, a):
        return TransposedFunction(self.inner.scale(a))


@dataclass(frozen=True)
class DerivedFunction(TestFunction):
    """(Dg)(u) = -u g'(u); on the log axis this is -dF/dx."""

    inner: TestFunction

    def __post_init__(self):
        if not self.inner.is_smooth:
            raise AdmissibilityError("derivation_D needs a smooth test function")

    @property
    def is_zero(self):
        return self.inner.is_zero

    def support_log(self):
        return self.inner.support_log()

    def _breakpoints(self):
        return self.inner._breakpoints()

    def profile(self, x):
        return -self.inner.profile_deriv(x, 1)

    def profile_deriv(self, x, order: int = 1):
        return -self.inner.profile_deriv(x, order + 1)

    def conjugate(self):
        return DerivedFunction(self.inner.conjugate())

    def scale(self, a):
        return DerivedFunction(self.inner.scale(a))


def derivation_D(g: TestFunction) -> TestFunction:
    """Dg with mellin(Dg, s) = s * mellin(g, s); rejects step functions."""
    return DerivedFunction(g)


@dataclass(frozen=True)
class LogGridFunction(TestFunction):
    """Samples on a uniform log grid with cubic-spline evaluation.

    Produced by mconvolve; the grid values are the convolution's trapezoid
    sums, spectrally accurate because the integrand is smooth and compactly
    supported, and the Mellin transform is taken directly on the grid.
    """

    x0: float
    h: float
    values: np.ndarray

    def __post_init__(self):
        v = np.ascontiguousarray(np.asarray(self.values, dtype=complex))
        v.flags.writeable = False
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "_spline", None)

    @property
    def xs(self) -> np.ndarray:
        return self.x0 + self.h * np.arange(self.values.size)

    @property
    def is_zero(self):
        return self.values.size == 0 or not np.any(self.values)

    def support_log(self):
        if self.values.size == 0:
            return (0.0, 0.0)
        return (self.x0, self.x0 + self.h * (self.values.size - 1))

    def _get_spline(self):
        sp = object.__getattribute__(self, "_spline")
        if sp is None:
            sp = CubicSpline(self.xs, self.values, bc_type="natural")
            object.__setattr__(self, "_spline", sp)
        return sp

    def profile(self, x):
        x = np.asarray(x, dtype=float)
        a, b = self.support_log()
        out = np.zeros(x.shape, dtype=complex)
        m = (x >= a) & (x <= b)
        if m.any():
            out[m] = self._get_spline()(x[m])
        return out

    def profile_deriv(self, x, order: int = 1):
        if order > 2:
            raise NotImplementedError("log-grid functions carry derivatives up to order 2")
        x = np.asarray(x, dtype=float)
        a, b = self.support_log()
        out = np.zeros(x.shape, dtype=complex)
        m = (x >= a) & (x <= b)
        if m.any():
            out[m] = self._get_spline().derivative(order)(x[m])
        return out

    def _mellin_many(self, s):
        # Values vanish (to all orders) at the grid ends, so the plain
        # h-weighted sum is the trapezoid rule at spectral accuracy.
        if self.is_zero:
            return np.zeros(s.shape, dtype=complex)
        x = self.xs
        F = self.h * self.values
        out = np.empty(s.shape, dtype=complex)
        for lo in range(0, s.size, _MELLIN_CHUNK):
            blk = s[lo:lo + _MELLIN_CHUNK]
            out[lo:lo + _MELLIN_CHUNK] = F @ np.exp(np.multiply.outer(x, blk))
        return out

    def transpose(self):
        if self.values.size == 0:
            return self
        xs = self.xs
        vals = np.exp(xs) * self.values  # e^{-x'} v(-x') on the mirrored grid
        return LogGridFunction(-float(xs[-1]), self.h, vals[::-1].copy())

    def conjugate(self):
        return LogGridFunction(self.x0, self.h, np.conjugate(self.values))

    def scale(self, a):
        return LogGridFunction(self.x0, self.h, a * self.values)


def mconvolve(f: TestFunction, k: TestFunction,
              spacing: float = CONV_SPACING) -> TestFunction:
    """Multiplicative convolution (f*k)(u) = int f(u/v) k(v) dv/v.

    Both operands must be smooth; the result is sampled on a uniform log grid
    fine enough that mellin(f*k) = mellin(f)*mellin(k) holds to ~1e-9 for
    |Im s| <= 50 at the default spacing.
    """
    if not (f.is_smooth and k.is_smooth):
        raise AdmissibilityError("mconvolve needs smooth operands; step functions are excluded")
    if f.is_zero or k.is_zero:
        return BumpCombination(())
    h = float(spacing)

    def grid_samples(g):
        a, b = g.support_log()
        i0 = math.floor(a / h) - 1
        i1 = math.ceil(b / h) + 1
        xs = (np.arange(i0, i1 + 1)) * h
        return i0, np.asarray(g.profile(xs), dtype=complex)

    i0f, Fv = grid_samples(f)
    i0k, Kv = grid_samples(k)
    conv = np.convolve(Fv, Kv) * h
    nz = np.nonzero(np.abs(conv) > 0.0)[0]
    if nz.size == 0:
        return BumpCombination(())
    lo = max(0, int(nz[0]) - 1)
    hi = min(conv.size, int(nz[-1]) + 2)
    return LogGridFunction((i0f + i0k + lo) * h, h, conv[lo:hi])


def autocorrelate(g: TestFunction, spacing: float = CONV_SPACING) -> TestFunction:
    """h = g * g-check, so that hhat(1/2+it) = |ghat(1/2+it)|^2 >= 0 on the line."""
    return mconvolve(g, g.conj_reflect(), spacing=spacing)


_STEP_RE = re.compile(r"^step:X=([^,+]+)$")
_FIELD_RE = re.compile(r"^(mu|sigma|amp)=([^=,+]+)$")


def _parse_float(text: str, what: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ParseError(f"bad float {text!r} for {what} "
                         "(note: write exponents without '+', e.g. 1e-3)") from None


def parse_test_function(text: str) -> TestFunction:
    """Parse a test-function literal.

    Grammar:
        "step:X=<float>"
        "bump:mu=<f>,sigma=<f>[,amp=<f>]" with further terms appended by '+',
        each either a full "bump:..." literal or a bare "mu=...,..." field list.
    """
    text = text.strip()
    if text.startswith("step:"):
        m = _STEP_RE.match(text)
        if not m:
            raise ParseError(f"malformed step literal {text!r}")
        X = _parse_float(m.group(1), "X")
        if not X > 1.0:
            raise ParseError(f"step literal needs X > 1, got {X}")
        return StepFunction(X)
    if not text.startswith("bump:"):
        raise ParseError(f"unknown test-function literal {text!r}")
    terms = []
    for piece in text.split("+"):
        piece = piece.strip()
        if piece.startswith("bump:"):
            piece = piece[len("bump:"):]
        if not piece:
            raise ParseError("empty bump term in literal")
        fields = {}
        for fld in piece.split(","):
            m = _FIELD_RE.match(fld.strip())
            if not m:
                raise ParseError(f"malformed bump field {fld!r}")
            key, val = m.group(1), m.group(2)
            if key in fields:
                raise ParseError(f"duplicate field {key!r} in bump term")
            fields[key] = _parse_float(val, key)
        if "mu" not in fields or "sigma" not in fields:
            raise ParseError("bump term needs both mu and sigma")
        if not fields["sigma"] > 0.0:
            raise ParseError(f"bump sigma must be positive, got {fields['sigma']}")
        terms.append(BumpTerm(complex(fields.get("amp", 1.0)), fields["mu"], fields["sigma"]))
    return BumpCombination(tuple(terms))
