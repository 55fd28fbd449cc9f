"""The prime side of the explicit formula and the balance against the zeros.

The identity under test is

    ghat(0) + ghat(1) - sum_rho ghat(rho) = sum_nu W_nu(g)

with the local terms computed by every equivalent route:

  prime place p
    direct       log p sum_k g(p^k) + log p sum_k p^-k g(p^-k)
    contour      (1/2 pi i) int_{Re s = c} Lambda_p(s) ghat(s) ds
    convolution  additive-convolution shell sums (G * g_p)(1), exact

  real place
    finite       V_r(g) + V_r(g^tau), V_r(g) = (log pi + gamma)/2 g(1)
                 + int_1^inf g dt/t + int_1^inf (g(t)-g(1))/(t^2-1) dt/t
    series       (log pi + gamma) g(1) + int_1^inf (g+g^tau) du/u
                 + sum_{j>=1} int_1^inf (g - g(1)) u^-2j du/u  (+ transpose),
                 partial sums to J plus the exact geometric remainder
    pf           (log 2 pi + gamma) g(1) + finite-part integrals over the
                 multiplicative group, rewritten exactly via y = 1/x
    contour      Lambda_r version of the vertical-line integral
    convolution  (G_r * g_r)(1) by regularized quadrature

plus the step-function closed form
    W_r(step X) = (log pi + gamma)/2 + log X + (1/2) log(1 - X^-2),
the only route admissible for the discontinuous kind.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .contour import VerticalLineIntegrator
from .errors import AdmissibilityError, CertificationError, DomainError
from .padic import haran_term, w_field_prime, w_field_real
from .quadrature import panel_nodes
from .special import EULER_GAMMA, LOG_2PI, LOG_PI, Place, lambda_factor
from .testfn import StepFunction, TestFunction, autocorrelate
from .zeta import ZeroTable, psi_sum

W_R_FORMS = ("finite", "series", "pf", "contour", "convolution")
PRIME_METHODS = ("direct", "contour", "convolution")

_SERIES_TERMS = 64


def _require_prime(p: int) -> Place:
    return Place.prime(p)


def v_p_sum(g: TestFunction, p: int) -> complex:
    """V_p(g) = log p * sum_{k>=1} g(p^k); a finite sum on compact support."""
    _require_prime(p)
    _, b = g.support_log()
    logp = math.log(p)
    k_hi = math.floor(b / logp + 1e-12)
    total = 0.0 + 0.0j
    for k in range(1, k_hi + 1):
        total += complex(g.evaluate(float(p) ** k))
    return logp * total


def w_p(g: TestFunction, p: int) -> complex:
    """W_p(g) = V_p(g) + V_p(g^tau), the full prime-place term."""
    return v_p_sum(g, p) + v_p_sum(g.transpose(), p)


def w_p_contour(g: TestFunction, p: int, c: float = 0.5) -> complex:
    """Prime-place term as a truncated vertical-line integral at Re s = c."""
    if not g.is_smooth:
        raise AdmissibilityError("w_p_contour needs a smooth test function")
    if not 0.0 < c < 1.0:
        raise DomainError("contour line must satisfy 0 < c < 1")
    place = _require_prime(p)
    integ = VerticalLineIntegrator(g, c=c, weight_osc=math.log(p))
    return integ.integrate(lambda s: lambda_factor(place, s))


# ----------------------------------------------------------------------------
# the real-place term, five ways

def _profile_at_zero(g: TestFunction):
    z = np.array([0.0])
    f0 = complex(np.atleast_1d(g.profile(z))[0])
    f1 = complex(np.atleast_1d(g.profile_deriv(z, 1))[0])
    f2 = complex(np.atleast_1d(g.profile_deriv(z, 2))[0])
    return f0, f1, f2


def _v_r_finite(g: TestFunction) -> complex:
    """V_r(g) on the log axis; the (t^2-1) singularity is removable and the
    divided difference is replaced by its Taylor value below |x| = 1e-4."""
    a, b = g.support_log()
    f0, f1, f2 = _profile_at_zero(g)
    total = 0.5 * (LOG_PI + EULER_GAMMA) * f0
    if b <= 0.0:
        return total  # g vanishes on [1, inf) and g(1) = 0
    inner = [x for x in g._breakpoints() if 0.0 < x < b]
    lo = max(a, 0.0) if f0 == 0 else 0.0
    x, w = panel_nodes([lo] + [x for x in inner if x > lo] + [b], density=96.0)
    total += complex(np.sum(w * g.profile(x)))

    x, w = panel_nodes([0.0] + inner + [b], density=96.0)
    F = np.asarray(g.profile(x), dtype=complex)
    ratio = np.where(np.abs(x) < 1e-4, f1 + 0.5 * x * f2, (F - f0) / x)
    total += complex(np.sum(w * ratio * (x / np.expm1(2.0 * x))))
    if f0 != 0:
        total += -f0 * (-0.5) * math.log1p(-math.exp(-2.0 * b))  # exact tail of -g(1)/(t^2-1)
    return total


def _w_r_series(g: TestFunction, terms: int = _SERIES_TERMS) -> complex:
    """Series route: J explicit j-terms plus the exact geometric remainder."""
    gt = g.transpose()
    f0 = complex(g.evaluate(1.0))
    bg = g.support_log()[1]
    bt = gt.support_log()[1]
    B = max(bg, bt, 0.0)
    total = (LOG_PI + EULER_GAMMA) * f0
    if B <= 0.0:
        return total

    def phi(x):
        return np.asarray(g.profile(x), dtype=complex) + gt.profile(x) - 2.0 * f0

    breaks = sorted({0.0, B}
                    | {x for x in g._breakpoints() if 0.0 < x < B}
                    | {x for x in gt._breakpoints() if 0.0 < x < B})
    x0, w0 = panel_nodes(breaks, density=96.0)
    total += complex(np.sum(w0 * (np.asarray(g.profile(x0), dtype=complex) + gt.profile(x0))))

    ebB = math.exp(-2.0 * B)
    for j in range(1, terms + 1):
        cut = min(B, 4.0 / j)
        bj = sorted(set(breaks) | ({cut} if 0.0 < cut < B else set()))
        x, w = panel_nodes(bj, density=96.0)
        total += complex(np.sum(w * phi(x) * np.exp(-2.0 * j * x)))
        if f0 != 0:
            total += -f0 * ebB**j / j  # exact beyond-support piece of the j-term

    # remainder sum_{j>J}: geometric closed form of the exponential tail
    _, d1g, _ = _profile_at_zero(g)
    _, d1t, _ = _profile_at_zero(gt)
    phi1 = d1g + d1t  # phi(0) = 0 by construction, phi'(0) drives the limit
    x, w = panel_nodes(breaks, density=96.0)
    px = phi(x)
    ratio = np.where(np.abs(x) < 1e-6, 0.5 * phi1,
                     px / np.where(x == 0.0, 1.0, -np.expm1(-2.0 * x)))
    total += complex(np.sum(w * ratio * np.exp(-2.0 * (terms + 1) * x)))
    if f0 != 0:
        tail_all = -math.log1p(-ebB)
        tail_head = sum(ebB**j / j for j in range(1, terms + 1))
        total += -f0 * (tail_all - tail_head)
    return total


def _w_r_pf(g: TestFunction) -> complex:
    """Finite-part route, rewritten exactly by the measure-invariant y = 1/x:

        (log 2 pi + gamma) g(1) + (1/2) int_0^2 (g(y)-g(1))/|1-y| dy
        + (1/2) int_2^inf g(y)/(y-1) dy + (1/2) int_0^inf g(t)/(t+1) dt.
    """
    g1 = complex(g.evaluate(1.0))
    a, b = g.support_log()
    u1, u2 = math.exp(a), math.exp(b)
    total = (LOG_2PI + EULER_GAMMA) * g1

    def geval(y):
        return np.asarray(g.evaluate(y), dtype=complex)

    lo = 0.0 if g1 != 0 else min(u1, 2.0)
    if lo < 2.0:
        pts = {lo, 2.0, 1.0}
        pts.update(u for u in (u1, u2) if lo < u < 2.0)
        x, w = panel_nodes(sorted(pts), density=96.0)
        total += complex(np.sum(w * (geval(x) - g1) / (2.0 * np.abs(1.0 - x))))
    if u2 > 2.0:
        x, w = panel_nodes((max(2.0, u1), u2), density=96.0)
        total += complex(np.sum(w * geval(x) / (2.0 * (x - 1.0))))
    x, w = panel_nodes((u1, u2), density=96.0)
    total += complex(np.sum(w * geval(x) / (2.0 * (x + 1.0))))
    return total


def _w_r_contour(g: TestFunction) -> complex:
    place = Place.real()
    integ = VerticalLineIntegrator(g, c=0.5, weight_osc=1.0)
    return integ.integrate(lambda s: lambda_factor(place, s))


def w_r(g: TestFunction, form: str = "finite") -> complex:
    """The real-place term W_r(g) by the requested route.

    Step functions admit only the closed-form finite route; smooth kinds
    admit all five, agreeing within 1e-7 on the reference corpus.
    """
    if form not in W_R_FORMS:
        raise DomainError(f"unknown w_r form {form!r}; expected one of {W_R_FORMS}")
    if isinstance(g, StepFunction):
        if form != "finite":
            raise AdmissibilityError(
                f"step functions admit only the finite closed form, not {form!r}")
        X = g.X
        return complex(0.5 * (LOG_PI + EULER_GAMMA) + math.log(X)
                       + 0.5 * math.log1p(-X ** -2))
    if not g.is_smooth:
        raise AdmissibilityError(f"w_r form {form!r} needs a smooth test function")
    if form == "finite":
        return _v_r_finite(g) + _v_r_finite(g.transpose())
    if form == "series":
        return _w_r_series(g)
    if form == "pf":
        return _w_r_pf(g)
    if form == "contour":
        return _w_r_contour(g)
    return haran_term(g, Place.real())  # convolution


def w_field(g: TestFunction, place: Place, y) -> complex:
    """Pointwise local term W_nu(g; y) = -log|y| g_nu(y) + (G_nu * g_nu)(y).

    Real place: y is a nonzero real.  Prime place: y is given by its
    valuation (an integer v with |y|_p = p^-v); the value depends on |y| only.
    At |y| = 1 the term reduces to W_nu(g).
    """
    if place.is_real:
        return w_field_real(g, float(y))
    return w_field_prime(g, place.p, int(y))


# ----------------------------------------------------------------------------
# place enumeration and reports

def _primes_up_to(n: int) -> list[int]:
    if n < 2:
        return []
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, int(math.isqrt(n)) + 1):
        if sieve[p]:
            sieve[p * p::p] = False
    return [int(p) for p in np.nonzero(sieve)[0]]


def prime_places(g: TestFunction) -> list[int]:
    """Primes with some power p^k or p^-k (k >= 1) inside support(g)."""
    if g.is_zero:
        return []
    a, b = g.support_log()
    U = math.exp(max(b, -a, 0.0))
    out = []
    for p in _primes_up_to(math.floor(U + 1e-9)):
        logp = math.log(p)
        hit = False
        for lo, hi in ((a, b), (-b, -a)):
            k0 = max(1, math.ceil(lo / logp - 1e-12))
            if k0 * logp <= hi + 1e-12:
                hit = True
        if hit:
            out.append(p)
    return out


@dataclass(frozen=True)
class PlaceTermReport:
    """Per-place local term by every admissible method, with the spread."""

    place_label: str
    values: tuple[tuple[str, complex], ...]
    inadmissible: tuple[str, ...]
    spread: float


def place_term_report(g: TestFunction, place: Place) -> PlaceTermReport:
    """All admissible methods at one place; no admissible method is omitted."""
    values: list[tuple[str, complex]] = []
    inadmissible: list[str] = []
    if place.is_real:
        for form in W_R_FORMS:
            try:
                values.append((form, w_r(g, form)))
            except AdmissibilityError:
                inadmissible.append(form)
    else:
        p = place.p
        values.append(("direct", w_p(g, p)))
        if g.is_smooth:
            values.append(("contour", w_p_contour(g, p)))
        else:
            inadmissible.append("contour")
        values.append(("convolution", haran_term(g, place)))
    vs = [v for _, v in values]
    spread = max((abs(x - y) for x in vs for y in vs), default=0.0)
    return PlaceTermReport(place.label, tuple(values), tuple(inadmissible), spread)


# ----------------------------------------------------------------------------
# zero side and the balance

def _require_certified(zeros: ZeroTable):
    if not isinstance(zeros, ZeroTable) or not zeros.certified:
        raise CertificationError("explicit-formula drivers need a certified ZeroTable")


def zero_side_sum(g: TestFunction, zeros: ZeroTable) -> complex:
    """ghat(0) + ghat(1) - sum over paired zeros ghat(1/2 +- i gamma)."""
    _require_certified(zeros)
    gam = zeros.ordinates
    boundary = g.mellin(np.array([0.0 + 0.0j, 1.0 + 0.0j]))
    if gam.size == 0:
        return complex(boundary[0] + boundary[1])
    s = np.concatenate([0.5 + 1j * gam, 0.5 - 1j * gam])
    vals = g.mellin(s)
    paired = vals[:gam.size] + vals[gam.size:]
    return complex(boundary[0] + boundary[1] - np.sum(paired))


def zero_sum_tail_estimate(g: TestFunction, t_max: float) -> float:
    """Bound on the dropped |Im rho| > t_max part: the sampled Mellin-decay
    envelope max |ghat(1/2+it)|(1+t)^3 times the zero density log(t/2pi)/2pi,
    integrated from t_max."""
    if g.is_zero:
        return 0.0
    ts = np.linspace(t_max, 4.0 * t_max, 61)
    env = np.abs(g.mellin(0.5 + 1j * ts)) * (1.0 + ts) ** 3
    M = float(np.max(env))
    x, w = panel_nodes((t_max, 50.0 * t_max), density=0.02)
    dens = np.log(np.maximum(x / (2.0 * math.pi), 1.001)) / (2.0 * math.pi)
    integral = float(np.sum(w * dens / (1.0 + x) ** 3))
    return 2.0 * M * integral


@dataclass(frozen=True)
class EFReport:
    """Both sides of the balance, their residual, and the truncation estimate."""

    zero_side: complex
    prime_side: complex
    residual: complex
    t_max: float
    tail_estimate: float
    place_terms: tuple[tuple[str, complex], ...]


def explicit_formula_check(g: TestFunction, zeros: ZeroTable,
                           w_r_form: str = "finite") -> EFReport:
    """residual = zero side - sum_nu W_nu(g) over the support-determined places."""
    if not g.is_smooth:
        raise AdmissibilityError(
            "explicit_formula_check needs a smooth kind; steps go through vonmangoldt_check")
    _require_certified(zeros)
    terms: list[tuple[str, complex]] = [("r", w_r(g, w_r_form))]
    for p in prime_places(g):
        terms.append((str(p), w_p(g, p)))
    prime_side = complex(sum(v for _, v in terms))
    zside = zero_side_sum(g, zeros)
    return EFReport(zside, prime_side, zside - prime_side, zeros.t_max,
                    zero_sum_tail_estimate(g, zeros.t_max), tuple(terms))


def vonmangoldt_check(X: float, zeros: ZeroTable) -> EFReport:
    """Prime-power sum versus the truncated zero expansion:

        sum_{1<n<X} Lambda(n) + Lambda(X)/2
            = X - sum_rho X^rho/rho - log(2 pi) - (1/2) log(1 - X^-2)

    with the zero sum paired and truncated at t_max.  The reported truncation
    estimate is the crude classical envelope sqrt(X) log(X t_max)^2 / (pi t_max).
    """
    X = float(X)
    if not X > 1.0:
        raise DomainError("vonmangoldt_check needs X > 1")
    _require_certified(zeros)
    left = psi_sum(X)
    gam = zeros.ordinates
    rho = 0.5 + 1j * gam
    zsum = float(np.sum(2.0 * np.real(np.exp(rho * math.log(X)) / rho)))
    right = X - zsum - LOG_2PI - 0.5 * math.log1p(-X ** -2)
    est = math.sqrt(X) * math.log(X * max(zeros.t_max, 2.0)) ** 2 / (math.pi * max(zeros.t_max, 1.0))
    return EFReport(complex(right), complex(left), complex(right - left),
                    zeros.t_max, est, (("psi", complex(left)),))


def reciprocal_zero_sum(zeros: ZeroTable, with_tail: bool = True) -> float:
    """Partial sum of sum_rho 1/(rho(1-rho)) = 2 sum_gamma 1/(1/4+gamma^2),
    plus the integral tail (log(t/2pi)+1)/(pi t) at t = t_max when asked."""
    _require_certified(zeros)
    gam = zeros.ordinates
    partial = float(np.sum(2.0 / (0.25 + gam * gam)))
    if not with_tail:
        return partial
    T = zeros.t_max
    return partial + (math.log(T / (2.0 * math.pi)) + 1.0) / (math.pi * T)


def reciprocal_zero_sum_modulus(zeros: ZeroTable) -> float:
    """sum over table zeros rho = 1/2 +- i gamma of 1/|rho|^2; equals the
    reciprocal partial sum exactly because the table zeros are on the line."""
    _require_certified(zeros)
    vals = [1.0 / abs(complex(0.5, sgn * g)) ** 2
            for g in zeros.ordinates for sgn in (1.0, -1.0)]
    return float(sum(vals))


def positivity_q(g: TestFunction, zeros: ZeroTable) -> tuple[float, float]:
    """Both sides of the positivity functional for h = g * g-check:

    prime_side_q = Re[ hhat(0) + hhat(1) - sum_nu W_nu(h) ]
    zero_side_q  = sum_{gamma <= t_max} (|ghat(1/2+i gamma)|^2 + |ghat(1/2-i gamma)|^2)
    """
    if not g.is_smooth:
        raise AdmissibilityError("positivity_q needs a smooth test function")
    _require_certified(zeros)
    if g.is_zero:
        return 0.0, 0.0
    h = autocorrelate(g)
    rep = explicit_formula_check(h, zeros)
    boundary = h.mellin(np.array([0.0 + 0.0j, 1.0 + 0.0j]))
    prime_side_q = float(np.real(boundary[0] + boundary[1] - rep.prime_side))
    gam = zeros.ordinates
    if gam.size:
        vals = g.mellin(np.concatenate([0.5 + 1j * gam, 0.5 - 1j * gam]))
        zero_side_q = float(np.sum(np.abs(vals) ** 2))
    else:
        zero_side_q = 0.0
    return prime_side_q, zero_side_q


# ----------------------------------------------------------------------------
# the rational-shift symmetry

def _as_fraction(q) -> Fraction:
    if isinstance(q, tuple):
        q = Fraction(q[0], q[1])
    else:
        q = Fraction(q)
    if q == 0:
        raise DomainError("the shift parameter must be a nonzero rational")
    return q


def log_abs_places(q) -> list[tuple[str, float]]:
    """Nonzero local logs log|q|_nu, primes ascending then the real place."""
    q = _as_fraction(q)
    merged: dict[int, float] = {}
    for n, sign in ((abs(q.numerator), -1), (q.denominator, 1)):
        m = n
        f = 2
        while f * f <= m:
            e = 0
            while m % f == 0:
                m //= f
                e += 1
            if e:
                merged[f] = merged.get(f, 0.0) + sign * e * math.log(f)
            f += 1
        if m > 1:
            merged[m] = merged.get(m, 0.0) + sign * math.log(m)
    rows = [(str(p), v) for p, v in sorted(merged.items()) if v != 0.0]
    rows.append(("r", math.log(abs(float(q)))))
    return rows


def symmetry_shift(g: TestFunction, q, zeros: ZeroTable | None = None,
                   residual_atol: float = 1e-10) -> complex:
    """Total shift sum_nu log|q|_nu * g(1) over the places where it is nonzero.

    The product formula makes the total vanish; when a certified table is
    supplied, the explicit-formula check is rerun with the shifted local
    terms and the residual is asserted unchanged within residual_atol.
    """
    rows = log_abs_places(q)
    g1 = complex(g.evaluate(1.0))
    total = g1 * sum(v for _, v in rows)
    if zeros is not None:
        base = explicit_formula_check(g, zeros)
        shifted_prime = base.prime_side + g1 * sum(v for _, v in rows)
        shifted_residual = base.zero_side - shifted_prime
        if abs(shifted_residual - base.residual) > residual_atol:
            raise DomainError(
                f"shifted-term residual moved by {abs(shifted_residual - base.residual):.3e}"
                f" > {residual_atol}")
    return total


def shifted_residual_delta(g: TestFunction, q, zeros: ZeroTable) -> float:
    """|residual(shifted terms) - residual| for the rational shift q."""
    base = explicit_formula_check(g, zeros)
    g1 = complex(g.evaluate(1.0))
    shift = g1 * sum(v for _, v in log_abs_places(q))
    return abs((base.zero_side - (base.prime_side + shift)) - base.residual)


# ----------------------------------------------------------------------------
# CSV emission (columns fixed: quantity, method, value_re, value_im, tolerance, status)

CSV_HEADER = "quantity,method,value_re,value_im,tolerance,status"


def _fmt(x: float) -> str:
    return f"{float(x):.15g}"


def rows_to_csv(rows) -> str:
    lines = [CSV_HEADER]
    for quantity, method, vre, vim, tol, status in rows:
        lines.append(f"{quantity},{method},{_fmt(vre)},{_fmt(vim)},"
                     f"{'' if tol is None else _fmt(tol)},{status}")
    return "\n".join(lines) + "\n"


def ef_report_rows(rep: EFReport, tol: float | None = None):
    rows = []
    for label, val in rep.place_terms:
        rows.append((f"w_{label}", "direct", val.real, val.imag, None, ""))
    rows.append(("zero_side", "mellin", rep.zero_side.real, rep.zero_side.imag, None, ""))
    rows.append(("prime_side", "sum", rep.prime_side.real, rep.prime_side.imag, None, ""))
    status = ""
    if tol is not None:
        status = "ok" if abs(rep.residual) <= tol else "fail"
    rows.append(("residual", "difference", rep.residual.real, rep.residual.imag, tol, status))
    rows.append(("tail_estimate", "envelope", rep.tail_estimate, 0.0, None, ""))
    return rows


def place_report_rows(rep: PlaceTermReport, tol: float | None = None):
    rows = []
    for method, val in rep.values:
        rows.append((f"w_{rep.place_label}", method, val.real, val.imag, None, "ok"))
    for method in rep.inadmissible:
        rows.append((f"w_{rep.place_label}", method, 0.0, 0.0, None, "inadmissible"))
    status = ""
    if tol is not None:
        status = "ok" if rep.spread <= tol else "fail"
    rows.append((f"w_{rep.place_label}", "spread", rep.spread, 0.0, tol, status))
    return rows
