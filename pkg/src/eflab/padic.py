"""Finite p-adic harmonic analysis for the local side of the explicit formula.

The working objects are Schwartz-Bruhat functions at level (m, n): supported
in p^(-m) Z_p and constant on cosets of p^n Z_p, stored as p^(m+n) coset
coefficients.  With the standard additive character psi_p(x) = e^{2 pi i {x}_p}
the Fourier transform of a level-(m, n) function is a level-(n, m) function
computed by a single dense DFT, F(F(phi)) is the reflection x -> -x exactly,
and the indicator of Z_p is a fixed point.

On these finite arenas the module realizes:

  * G, the Fourier transform of -log|x|, as exact shell sums at a prime and
    as a regularized quadrature at the real place;
  * the local explicit-formula term as an additive convolution (G * g_nu)(1),
    with the shell decomposition of t -> |1 - t|_p as the single source of
    truth at finite places;
  * the conductor operator H(phi) = log|t| phi + F(log|xi| F^{-1}(phi)),
    restricted to the cuspidal space V(p, n) where its spectrum is a set of
    integer multiples of log p;
  * the inversion I(phi)(t) = (1/|t|) phi(1/t), exact on cosets;
  * the local functional-equation and Mellin-Fourier cross-checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .contour import VerticalLineIntegrator
from .errors import AdmissibilityError, ConvergenceError, DomainError
from .quadrature import panel_nodes
from .special import EULER_GAMMA, LOG_2PI, Place, gamma_factor, is_prime
from .testfn import TestFunction

LEVEL_SIZE_MAX = 2048
_INVERSION_SIZE_MAX = 4_000_000

#: Sentinel for the self-dual reference input exp(-pi x^2) at the real place.
GAUSSIAN = "gaussian"


def additive_character(p: int, x) -> complex:
    """psi_p(x) = e^{2 pi i {x}_p} for x rational with p-power denominator."""
    if not is_prime(p):
        raise DomainError(f"additive_character needs a prime, got {p}")
    if isinstance(x, tuple):
        x = Fraction(x[0], x[1])
    else:
        x = Fraction(x)
    den = x.denominator
    e = 0
    while den % p == 0:
        den //= p
        e += 1
    if den != 1:
        raise DomainError(f"{x} does not have a {p}-power denominator")
    if e == 0:
        return 1.0 + 0.0j
    pe = p ** e
    num = x.numerator % pe
    return complex(np.exp(2j * np.pi * (num / pe)))


@lru_cache(maxsize=64)
def _vp_table(p: int, size: int) -> np.ndarray:
    """v_p(j) for j = 0..size-1, with the 0 entry set to the total exponent."""
    v = np.zeros(size, dtype=np.int64)
    step = p
    while step < size:
        v[step::step] += 1
        step *= p
    total = 0
    s = 1
    while s < size:
        s *= p
        total += 1
    v[0] = total
    return v


@dataclass(frozen=True)
class LevelFunction:
    """Coefficients of a level-(m, n) Schwartz-Bruhat function on Q_p.

    Entry j is the value on the coset p^(-m) j + p^n Z_p, 0 <= j < p^(m+n).
    """

    p: int
    m: int
    n: int
    coeffs: np.ndarray

    def __post_init__(self):
        if not is_prime(self.p):
            raise DomainError(f"not a prime: {self.p}")
        if self.m < 0 or self.n < 0:
            raise DomainError("level exponents must be non-negative")
        c = np.ascontiguousarray(np.asarray(self.coeffs, dtype=complex))
        if c.size != self.p ** (self.m + self.n):
            raise DomainError(
                f"level ({self.m},{self.n}) needs {self.p ** (self.m + self.n)} "
                f"coefficients, got {c.size}")
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    @property
    def size(self) -> int:
        return int(self.coeffs.size)

    @property
    def vp(self) -> np.ndarray:
        return _vp_table(self.p, self.size)

    def integral(self) -> complex:
        return complex(self.coeffs.sum() * self.p ** (-self.n))

    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.coeffs) ** 2) * self.p ** (-self.n))

    def inner(self, other: "LevelFunction") -> complex:
        a, b = common_refinement(self, other)
        return complex(np.sum(a.coeffs * np.conjugate(b.coeffs)) * a.p ** (-a.n))

    def refine(self, m2: int, n2: int) -> "LevelFunction":
        """Re-express at a finer level (m2 >= m, n2 >= n); exact."""
        if m2 < self.m or n2 < self.n:
            raise DomainError("refine only goes to finer levels")
        if (m2, n2) == (self.m, self.n):
            return self
        p = self.p
        size2 = p ** (m2 + n2)
        j2 = np.arange(size2, dtype=np.int64)
        vp2 = _vp_table(p, size2)
        out = np.zeros(size2, dtype=complex)
        shift = m2 - self.m
        inside = vp2 >= shift
        inside[0] = True
        idx = (j2[inside] // p ** shift) % self.size
        out[inside] = self.coeffs[idx]
        return LevelFunction(p, m2, n2, out)


def common_refinement(a: LevelFunction, b: LevelFunction):
    if a.p != b.p:
        raise DomainError("level functions live over different primes")
    m, n = max(a.m, b.m), max(a.n, b.n)
    return a.refine(m, n), b.refine(m, n)


def level_distance(a: LevelFunction, b: LevelFunction) -> float:
    ra, rb = common_refinement(a, b)
    return math.sqrt(float(np.sum(np.abs(ra.coeffs - rb.coeffs) ** 2) * ra.p ** (-ra.n)))


def fourier_level(phi: LevelFunction) -> LevelFunction:
    """F(phi)(xi) = int phi(t) psi_p(xi t) dt; level (m, n) -> level (n, m)."""
    c = phi.coeffs
    out = (phi.p ** phi.m) * np.fft.ifft(c)
    return LevelFunction(phi.p, phi.n, phi.m, out)


def fourier_inverse_level(phi: LevelFunction) -> LevelFunction:
    """F^{-1}(phi)(xi) = int phi(t) psi_p(-xi t) dt; level (m, n) -> (n, m)."""
    c = phi.coeffs
    out = (phi.p ** (-phi.n)) * np.fft.fft(c)
    return LevelFunction(phi.p, phi.n, phi.m, out)


def reflect_level(phi: LevelFunction) -> LevelFunction:
    """phi(-x), i.e. coefficient j -> coefficient at -j mod p^(m+n)."""
    c = phi.coeffs
    out = np.empty_like(c)
    out[0] = c[0]
    out[1:] = c[:0:-1]
    return LevelFunction(phi.p, phi.m, phi.n, out)


def unit_action(phi: LevelFunction, u: int) -> LevelFunction:
    """phi(t) -> phi(u t) for a unit u (|u|_p = 1); an isometry permuting cosets."""
    if u % phi.p == 0:
        raise DomainError("unit_action needs u coprime to p")
    j = np.arange(phi.size, dtype=np.int64)
    out = phi.coeffs[(u * j) % phi.size]
    return LevelFunction(phi.p, phi.m, phi.n, out)


def cusp_project(phi: LevelFunction) -> LevelFunction:
    """Subtract the average over each multiplicative shell; zero the 0-coset.

    Idempotent; radial functions are annihilated.
    """
    c = phi.coeffs.copy()
    vp = phi.vp
    total = phi.m + phi.n
    for v in range(total):
        sel = np.nonzero(vp == v)[0]
        sel = sel[sel != 0]
        if sel.size:
            c[sel] -= c[sel].mean()
    c[0] = 0.0
    return LevelFunction(phi.p, phi.m, phi.n, c)


def _admissibility_scale(phi: LevelFunction) -> float:
    return max(1.0, float(np.max(np.abs(phi.coeffs), initial=0.0)))


def conductor_apply(phi: LevelFunction) -> LevelFunction:
    """H(phi) = log|t| phi + F(log|xi| F^{-1}(phi)); exact at the same level.

    Requires phi to vanish on the coset of 0 and to have total integral 0,
    which makes both log multipliers act on finitely supported data.
    """
    scale = _admissibility_scale(phi)
    if abs(phi.coeffs[0]) > 1e-12 * scale:
        raise AdmissibilityError("conductor_apply: phi must vanish on the coset of 0")
    if abs(phi.integral()) > 1e-12 * scale:
        raise AdmissibilityError("conductor_apply: phi must have total integral 0")
    p, m, n = phi.p, phi.m, phi.n
    logp = math.log(p)
    vp = phi.vp
    mult = (m - vp).astype(float) * logp
    A = mult * phi.coeffs
    A[0] = 0.0

    d = fourier_inverse_level(phi)  # level (n, m)
    if abs(d.coeffs[0]) > 1e-10 * scale:
        raise AdmissibilityError("conductor_apply: Fourier side does not vanish near 0")
    vpd = d.vp
    multd = (n - vpd).astype(float) * logp
    e = multd * d.coeffs
    e[0] = 0.0
    B = fourier_level(LevelFunction(p, n, m, e))  # back to level (m, n)
    return LevelFunction(p, m, n, A + B.coeffs)


def cusp_space_basis(p: int, n: int) -> list[LevelFunction]:
    """Orthonormal basis of V(p, n): level (0, n), supported in Z_p minus
    p^n Z_p, zero average on each shell.  Dimension p^n - 1 - n."""
    if not is_prime(p):
        raise DomainError(f"not a prime: {p}")
    if n < 1:
        raise DomainError("cusp space needs level n >= 1")
    if p ** n > LEVEL_SIZE_MAX:
        raise DomainError(f"p^n = {p ** n} exceeds the desk-scale cap {LEVEL_SIZE_MAX}")
    size = p ** n
    vp = _vp_table(p, size)
    norm = p ** (n / 2.0)  # makes the weighted L2 norm of each vector 1
    basis: list[LevelFunction] = []
    for v in range(n):
        sel = [j for j in range(1, size) if vp[j] == v]
        r = len(sel)
        for k in range(1, r):
            c = np.zeros(size, dtype=complex)
            scale = norm / math.sqrt(k * (k + 1))
            for i in range(k):
                c[sel[i]] = scale
            c[sel[k]] = -k * scale
            basis.append(LevelFunction(p, 0, n, c))
    expected = p ** n - 1 - n
    if len(basis) != expected:
        raise RuntimeError(f"cusp basis dimension {len(basis)} != {expected}")
    return basis


@dataclass(frozen=True)
class ConductorMatrix:
    """H compressed to the cuspidal space V(p, n) in an orthonormal basis."""

    p: int
    n: int
    matrix: np.ndarray
    basis: tuple[LevelFunction, ...]

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[0])


def conductor_matrix(p: int, n: int) -> ConductorMatrix:
    basis = cusp_space_basis(p, n)
    dim = len(basis)
    images = [conductor_apply(e) for e in basis]
    M = np.empty((dim, dim), dtype=complex)
    scale = p ** (-n)
    for b, img in enumerate(images):
        for a, e in enumerate(basis):
            M[a, b] = np.sum(img.coeffs * np.conjugate(e.coeffs)) * scale
    defect = float(np.max(np.abs(M - M.conj().T), initial=0.0))
    if defect > 1e-12:
        raise RuntimeError(f"conductor matrix Hermiticity defect {defect:.2e} > 1e-12")
    return ConductorMatrix(p, n, 0.5 * (M + M.conj().T), tuple(basis))


def cuspidal_spectrum(p: int, n: int) -> np.ndarray:
    """Ascending eigenvalues of H on V(p, n); multiples of log p by the theory."""
    cm = conductor_matrix(p, n)
    if cm.dim == 0:
        return np.empty(0)
    return np.linalg.eigvalsh(cm.matrix)


def inversion(phi: LevelFunction) -> LevelFunction:
    """I(phi)(t) = (1/|t|) phi(1/t), exact on cosets.

    The output lives at the analytically sufficient level: a shell of
    valuation k (constant mod p^n on the input side) maps to valuation -k
    with constancy modulus n - 2k; the output level takes the finest modulus
    over the occupied shells.  Exactness is re-verified at construction by a
    second coset representative per output coset.
    """
    p, m, n = phi.p, phi.m, phi.n
    scale = _admissibility_scale(phi)
    if abs(phi.coeffs[0]) > 1e-12 * scale:
        raise AdmissibilityError("inversion: support must avoid the coset of 0")
    vp = phi.vp
    occupied = sorted({int(vp[j]) - m for j in range(1, phi.size)
                       if phi.coeffs[j] != 0})
    if not occupied:
        return LevelFunction(p, 0, 1, np.zeros(p, dtype=complex))
    k_min, k_max = occupied[0], occupied[-1]
    m_out = max(0, k_max)
    n_out = max(max(n - 2 * k for k in occupied), -k_min + 1, 1)
    size_out = p ** (m_out + n_out)
    if size_out > _INVERSION_SIZE_MAX:
        raise DomainError(f"inversion output size {size_out} beyond desk scale")
    size_in = phi.size
    vpo = _vp_table(p, size_out)
    occ = set(occupied)
    out = np.zeros(size_out, dtype=complex)
    for jp in range(1, size_out):
        k = m_out - int(vpo[jp])  # output valuation is -k
        if k not in occ:
            continue
        u = jp // p ** int(vpo[jp])
        uinv = pow(u, -1, size_in)
        j_in = (pow(p, m + k, size_in) * uinv) % size_in
        # second representative of the same output coset must land in the
        # same input coset (per-shell constancy modulus rule)
        u2 = (jp + size_out) // p ** int(vpo[jp])
        j_in2 = (pow(p, m + k, size_in) * pow(u2, -1, size_in)) % size_in
        if j_in2 != j_in:
            raise RuntimeError("inversion output level too coarse; constancy rule violated")
        out[jp] = float(p) ** (-k) * phi.coeffs[j_in]
    return LevelFunction(p, m_out, n_out, out)


def commutation_check(p: int, n: int) -> float:
    """max over the cusp basis of ||H(I phi) - I(H phi)|| / ||phi||."""
    worst = 0.0
    for e in cusp_space_basis(p, n):
        lhs = conductor_apply(inversion(e))
        rhs = inversion(conductor_apply(e))
        worst = max(worst, level_distance(lhs, rhs) / math.sqrt(e.norm_sq()))
    return worst


# ----------------------------------------------------------------------------
# shell functions (radial lifts) and the G distribution

@dataclass(frozen=True)
class ShellFunction:
    """Radial function on Q_p: one value per shell |x|_p = p^(-v), v in a
    finite window, with the values below the window equal to value_at_zero
    (local constancy near 0) and the values above it equal to 0."""

    p: int
    v_min: int
    v_max: int
    values: tuple[complex, ...]
    value_at_zero: complex = 0.0

    def __post_init__(self):
        if not is_prime(self.p):
            raise DomainError(f"not a prime: {self.p}")
        if len(self.values) != self.v_max - self.v_min + 1:
            raise DomainError("shell window and value count disagree")

    def shell_value(self, v: int) -> complex:
        if v > self.v_max:
            return complex(self.value_at_zero)
        if v < self.v_min:
            return 0.0 + 0.0j
        return complex(self.values[v - self.v_min])


def lift_radial(g: TestFunction, p: int) -> ShellFunction:
    """g_p(x) = g(|x|_p): the value g(p^(-v)) on each shell, zero at 0."""
    if not is_prime(p):
        raise DomainError(f"not a prime: {p}")
    a, b = g.support_log()
    logp = math.log(p)
    v_lo = math.ceil(-b / logp - 1e-12)
    v_hi = math.floor(-a / logp + 1e-12)
    if v_hi < v_lo:
        return ShellFunction(p, 0, 0, (0.0,), 0.0)
    vals = tuple(complex(g.evaluate(float(p) ** (-v))) for v in range(v_lo, v_hi + 1))
    return ShellFunction(p, v_lo, v_hi, vals, 0.0)


@dataclass(frozen=True)
class RealTestInput:
    """Piecewise-smooth input for the real-place G distribution.

    fn must be vectorized over a float array; breakpoints list the kinks so
    the quadrature panels can split there; the function must vanish outside
    [support_lo, support_hi].
    """

    fn: object
    value_at_zero: complex
    breakpoints: tuple[float, ...]
    support_lo: float
    support_hi: float


def _g_real_apply(phi: RealTestInput) -> complex:
    """G(phi) = int_{|t|<=1} (phi - phi(0)) dt/(2|t|) + int_{|t|>1} phi dt/(2|t|)
    + (log 2 pi + gamma) phi(0)."""
    if not (math.isfinite(phi.support_lo) and math.isfinite(phi.support_hi)):
        raise ConvergenceError("real-place G needs a finite support window")
    phi0 = complex(phi.value_at_zero)
    inner = {-1.0, 0.0, 1.0}
    inner.update(b for b in phi.breakpoints if -1.0 < b < 1.0)
    x, w = panel_nodes(sorted(inner), density=96.0)
    fvals = np.asarray(phi.fn(x), dtype=complex)
    total = complex(np.sum(w * (fvals - phi0) / (2.0 * np.abs(x))))
    lo = min(phi.support_lo, -1.0)
    hi = max(phi.support_hi, 1.0)
    for a, b in ((1.0, hi), (lo, -1.0)):
        if b - a <= 1e-14:
            continue
        pts = {a, b}
        pts.update(bb for bb in phi.breakpoints if a < bb < b)
        x, w = panel_nodes(sorted(pts), density=96.0)
        fvals = np.asarray(phi.fn(x), dtype=complex)
        total += complex(np.sum(w * fvals / (2.0 * np.abs(x))))
    return total + (LOG_2PI + EULER_GAMMA) * phi0


def g_apply(place: Place, phi) -> complex:
    """Apply G_nu, the Fourier transform of -log|x|_nu, to a test input.

    Prime place (phi a ShellFunction), with shell weight dt/|t| = 1 - 1/p:
        log p/(1-1/p) * [ sum_{v>=0} (phi_v - phi(0)) (1-1/p)
                          + sum_{k>=1} phi(|t|=p^k) (1-1/p) + phi(0)/p ]
    Real place (phi a RealTestInput): regularized quadrature plus the
    (log 2 pi + gamma) phi(0) term.
    """
    if place.is_real:
        if not isinstance(phi, RealTestInput):
            raise DomainError("real-place g_apply needs a RealTestInput")
        return _g_real_apply(phi)
    if not isinstance(phi, ShellFunction) or phi.p != place.p:
        raise DomainError("prime-place g_apply needs a ShellFunction over the same prime")
    p = place.p
    phi0 = phi.shell_value(10**9)  # value at (and near) zero
    inner = 0.0 + 0.0j
    for v in range(0, max(phi.v_max, 0) + 1):
        inner += phi.shell_value(v) - phi0
    outer = 0.0 + 0.0j
    for v in range(min(phi.v_min, 0), 0):
        outer += phi.shell_value(v)
    logp = math.log(p)
    return logp * (inner + outer) + logp * phi0 / (p - 1)


# Shell decomposition of t -> |1 - t|_p (additive measure, vol(Z_p) = 1):
#   |t| = p^k, k >= 1   : |1-t| = p^k on the whole shell, measure p^k (1-1/p)
#   |t| <= 1/p          : |1-t| = 1, measure 1/p
#   |t| = 1             : |1-t| = p^-w has measure p^-w (1-1/p) for w >= 1,
#                         and |1-t| = 1 has measure (p-2)/p  (empty for p = 2)
# This table is the single source of truth for the prime-place Haran sums and
# is unit-tested against brute-force coset enumeration at level n = 4.

def _haran_prime(g: TestFunction, p: int) -> complex:
    """(G * g_p)(1) = G(t -> g(|1-t|_p)) via the shell table; exact finite sums."""
    logp = math.log(p)
    g1 = complex(g.evaluate(1.0))
    a, b = g.support_log()
    # unit shell: |1-t| = p^-w with weight p^-w (1-1/p); subtract phi(0) = g(1)
    w_hi = max(0, math.floor(-a / logp + 1e-12))
    inner = 0.0 + 0.0j
    for w in range(1, w_hi + 1):
        inner += float(p) ** (-w) * complex(g.evaluate(float(p) ** (-w)))
    inner -= g1 / (p - 1)  # exact tail of -g(1) * sum_{w>=1} p^-w
    # shells |t| = p^k, k >= 1: |1-t| = p^k, weight dt/|t| integrates to 1-1/p
    k_hi = max(0, math.floor(b / logp + 1e-12))
    outer = 0.0 + 0.0j
    for k in range(1, k_hi + 1):
        outer += complex(g.evaluate(float(p) ** k))
    # shells |t| <= 1/p contribute phi - phi(0) = g(1) - g(1) = 0
    return logp * (inner + outer) + logp * g1 / (p - 1)


def haran_term(g: TestFunction, place: Place) -> complex:
    """The local explicit-formula term as the additive convolution (G * g_nu)(1).

    Exact shell sums at a prime place (any test-function kind); regularized
    quadrature at the real place (smooth kinds only).
    """
    if place.is_real:
        if not g.is_smooth:
            raise AdmissibilityError(
                "real-place haran_term routes step functions to closed forms only")
        a, b = g.support_log()
        u1, u2 = math.exp(a), math.exp(b)
        kinks = sorted({0.0, 1.0, 1.0 - u2, 1.0 - u1, 1.0 + u1, 1.0 + u2})
        phi = RealTestInput(
            fn=lambda t: g.evaluate(np.abs(1.0 - np.asarray(t, dtype=float))),
            value_at_zero=complex(g.evaluate(1.0)),
            breakpoints=tuple(kinks),
            support_lo=1.0 - u2, support_hi=1.0 + u2)
        return _g_real_apply(phi)
    return _haran_prime(g, place.p)


def w_field_prime(g: TestFunction, p: int, y_valuation: int) -> complex:
    """W_p(g; y) = -log|y| g(|y|) + (G * g_p)(y) for |y|_p = p^(-y_valuation).

    The convolution is an exact shell sum built from the |y - t| analogue of
    the |1 - t| table: on shells |t| != |y| the distance is max(|t|, |y|);
    on |t| = |y| the unit-shell sub-decomposition applies, rescaled.
    """
    if not is_prime(p):
        raise DomainError(f"not a prime: {p}")
    logp = math.log(p)
    a = -int(y_valuation)  # |y| = p^a

    def ge(e: int) -> complex:
        return complex(g.evaluate(float(p) ** e))

    lo, hi = g.support_log()
    e_lo = math.ceil(lo / logp - 1e-12)
    e_hi = math.floor(hi / logp + 1e-12)
    psi0 = ge(a)  # psi(0) = g(|y - 0|) = g(|y|)

    # shell |t| = |y|: |y-t| = p^(a-w) with conditional weight p^-w (w >= 1),
    # |y-t| = p^a with weight (p-2)/(p-1)
    mixed = ((p - 2) / (p - 1)) * ge(a)
    for w in range(1, max(0, a - e_lo) + 1):
        mixed += float(p) ** (-w) * ge(a - w)

    # shells |t| <= 1 carry psi - psi(0); only shells with |t| >= |y| survive
    inner = 0.0 + 0.0j
    if a <= 0:
        inner += mixed - psi0
        for c in range(a + 1, 1):
            inner += ge(c) - psi0
    # shells |t| = p^k, k >= 1, carry psi itself
    outer = 0.0 + 0.0j
    if a >= 1:
        outer += mixed + (a - 1) * psi0
    for c in range(max(a + 1, 1), max(e_hi, 0) + 1):
        outer += ge(c)
    conv = logp * (inner + outer) + logp * psi0 / (p - 1)
    return -a * logp * psi0 + conv


def w_field_real(g: TestFunction, y: float) -> complex:
    """W_r(g; y) = -log|y| g(|y|) + (G * g_r)(y) for real y != 0."""
    if y == 0.0:
        raise DomainError("w_field needs y != 0")
    if not g.is_smooth:
        raise AdmissibilityError("real-place w_field needs a smooth test function")
    ay = abs(float(y))
    a, b = g.support_log()
    u1, u2 = math.exp(a), math.exp(b)
    kinks = sorted({0.0, float(y), y - u2, y - u1, y + u1, y + u2})
    phi = RealTestInput(
        fn=lambda t: g.evaluate(np.abs(float(y) - np.asarray(t, dtype=float))),
        value_at_zero=complex(g.evaluate(ay)),
        breakpoints=tuple(kinks),
        support_lo=y - u2, support_hi=y + u2)
    return -math.log(ay) * complex(g.evaluate(ay)) + _g_real_apply(phi)


# ----------------------------------------------------------------------------
# local functional equation and the Mellin-Fourier bridge

def _abs_integral_level(phi: LevelFunction, a: complex) -> complex:
    """int phi(x) |x|^a dx as an exact sum plus the geometric 0-coset tail."""
    p, m, n = phi.p, phi.m, phi.n
    vol = float(p) ** (-n)
    vp = phi.vp
    body = phi.coeffs[1:] * vol * np.exp((m - vp[1:]) * complex(a) * math.log(p))
    total = complex(np.sum(body))
    c0 = phi.coeffs[0]
    if c0 != 0:
        if (1 + complex(a)).real <= 0:
            raise DomainError("0-coset tail diverges for Re(1+a) <= 0")
        q = np.exp(-n * (1 + a) * math.log(p))  # p^(-n(1+a))
        total += complex(c0 * (1 - 1 / p) * q / (1 - np.exp(-(1 + a) * math.log(p))))
    return total


def _gaussian_abs_integral(a: complex) -> complex:
    """int_R e^{-pi x^2} |x|^a dx by log-radial quadrature (0 < Re(1+a))."""
    re1a = (1 + a).real
    if re1a <= 0:
        raise DomainError("integral diverges for Re(1+a) <= 0")
    w_lo = -45.0 / re1a
    x, w = panel_nodes((w_lo, -2.0, 0.0, 2.0), density=64.0,
                       osc=abs(complex(a).imag))
    r2 = np.exp(2.0 * x)
    vals = np.exp(-np.pi * r2) * np.exp((1 + a) * x)
    return complex(2.0 * np.sum(w * vals))


def gamma_identity_check(place: Place, s: complex, phi) -> complex:
    """Ratio of int phi-tilde |x|^{s-1} dx to int phi |y|^{-s} dy.

    Equals gamma_factor(place, s) for 0 < Re s < 1; the two integrals are
    computed independently of the gamma-factor formulas (exact shell/coset
    sums at a prime, quadrature for the self-dual Gaussian at the real place).
    """
    s = complex(s)
    if not 0.0 < s.real < 1.0:
        raise DomainError("gamma_identity_check needs 0 < Re s < 1")
    if place.is_real:
        if phi != GAUSSIAN:
            raise DomainError("the real-place reference input is GAUSSIAN")
        left = _gaussian_abs_integral(s - 1)   # Fourier transform = itself
        right = _gaussian_abs_integral(-s)
    else:
        if not isinstance(phi, LevelFunction) or phi.p != place.p:
            raise DomainError("prime-place check needs a LevelFunction over the place")
        left = _abs_integral_level(fourier_level(phi), s - 1)
        right = _abs_integral_level(phi, -s)
    if abs(right) < 1e-300:
        raise DomainError("vanishing denominator in gamma_identity_check")
    return left / right


def _fourier_radial_prime(g: TestFunction, p: int, x_valuation: int) -> complex:
    """F^{-1}(g_p)(x) for |x| = p^(-x_valuation) as an exact finite shell sum.

    Uses int_{|t| = p^-v} psi(x t) dt = p^-v (1 - 1/p) for |x| <= p^v,
    -p^(-v-1) for |x| = p^(v+1), 0 otherwise.
    """
    lifted = lift_radial(g, p)
    a = -int(x_valuation)  # |x| = p^a
    total = 0.0 + 0.0j
    for v in range(lifted.v_min, lifted.v_max + 1):
        gv = lifted.shell_value(v)
        if gv == 0:
            continue
        if a <= v:
            total += gv * float(p) ** (-v) * (1 - 1 / p)
        elif a == v + 1:
            total -= gv * float(p) ** (-a)
    return total


def mellin_fourier_check(g: TestFunction, place: Place, x, tol: float = 1e-6):
    """Both sides of F^{-1}(g_nu)(x) = (1/2 pi i) int ghat(s) |x|^{s-1}/Gamma_nu(s) ds.

    Returns (line_value, direct_value) computed independently (vertical-line
    quadrature at c = 1/2 versus exact shell sums / cosine transform) and
    raises if they disagree beyond tol.  At a prime place x is given by its
    valuation; at the real place x is a nonzero float.
    """
    if not g.is_smooth:
        raise AdmissibilityError("mellin_fourier_check needs a smooth test function")
    if place.is_real:
        ax = abs(float(x))
        if ax == 0.0:
            raise DomainError("x must be nonzero")
        direct = _fourier_radial_real(g, ax)
        logx = math.log(ax)
    else:
        v = int(x)
        direct = _fourier_radial_prime(g, place.p, v)
        logx = -v * math.log(place.p)
    weight_osc = abs(logx) + (math.log(place.p) if not place.is_real else 1.0)
    integ = VerticalLineIntegrator(g, c=0.5, weight_osc=weight_osc)

    def weight(svals):
        return np.exp((svals - 1.0) * logx) / gamma_factor(place, svals)

    line = integ.integrate(weight, tol=1e-10)
    if abs(line - direct) > tol:
        raise ConvergenceError(
            f"Mellin-Fourier bridge mismatch {abs(line - direct):.3e} > {tol}")
    return line, direct


def _fourier_radial_real(g: TestFunction, ax: float) -> complex:
    """F^{-1}(g_r)(x) = 2 int_0^inf g(t) cos(2 pi |x| t) dt."""
    a, b = g.support_log()
    u1, u2 = math.exp(a), math.exp(b)
    x, w = panel_nodes((u1, u2), density=48.0, osc=2.0 * math.pi * ax)
    vals = np.asarray(g.evaluate(x), dtype=complex)
    return complex(2.0 * np.sum(w * vals * np.cos(2.0 * np.pi * ax * x)))


def level_function_csv(phi: LevelFunction) -> str:
    """Debug dump: one row per coset, columns j, representative, re, im."""
    lines = ["j,representative,value_re,value_im"]
    pm = phi.p ** phi.m
    for j in range(phi.size):
        rep = f"{j}/{pm}" if phi.m else str(j)
        c = phi.coeffs[j]
        lines.append(f"{j},{rep},{c.real:.15g},{c.imag:.15g}")
    return "\n".join(lines) + "\n"
