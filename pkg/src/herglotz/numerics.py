"""Extended-precision arithmetic layer: working-precision management and the
classical special functions (digamma, dilogarithm, Rogers dilogarithm,
double-exponential quadrature, fundamental constants).

Precision contract
------------------
Every public function takes a working precision ``prec`` in decimal digits,
computes internally with GUARD = 10 extra digits, and returns a value whose
error is at most 10**(5 - prec) relative to the true value (usually far
better).  Arguments may be Python ints, Fractions, floats, strings, or mpmath
numbers; exact rational inputs are used for exact pole/branch detection.

All functions are pure; the only shared state consists of caches of constants
(Bernoulli numbers, zeta values, Euler's gamma) that are append-only and keyed
by precision.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction

import mpmath
from mpmath import mp

GUARD = 10          # internal guard digits
CONTRACT_GUARD = 5  # external error bound is 10**(CONTRACT_GUARD - prec)

_lock = threading.Lock()


def working_dps(prec):
    """Internal decimal working precision for a requested precision."""
    return int(prec) + GUARD


def contract_eps(prec):
    """The documented error bound 10**(5 - prec) as an mpf."""
    return mp.mpf(10) ** (CONTRACT_GUARD - int(prec))


class PoleError(ArithmeticError):
    """Evaluation at a pole of the requested function."""


class BranchCutError(ArithmeticError):
    """Evaluation on a branch cut where the principal value is ambiguous."""


class QuadratureError(ArithmeticError):
    """Double-exponential quadrature failed to converge."""


def to_mp(x):
    """Convert x to an mpf/mpc at the current working precision.

    Fractions are converted by exact division so no decimal rounding of the
    numerator/denominator occurs.
    """
    if isinstance(x, Fraction):
        return mp.mpf(x.numerator) / mp.mpf(x.denominator)
    if isinstance(x, complex):
        return mp.mpc(x.real, x.imag)
    if isinstance(x, (mpmath.mpf, mpmath.mpc, int, float, str)):
        return mp.mpf(x) if not isinstance(x, mpmath.mpc) else mp.mpc(x)
    if hasattr(x, "to_mp"):  # QuadSurd and friends
        return x.to_mp()
    raise TypeError(f"cannot convert {type(x)!r} to an mp number")


def is_exact_integer(x):
    """True when x is exactly an integer (int, integral Fraction, integral mpf)."""
    if isinstance(x, int):
        return True
    if isinstance(x, Fraction):
        return x.denominator == 1
    if isinstance(x, float):
        return x.is_integer()
    if isinstance(x, mpmath.mpf):
        return mpmath.isint(x)
    if isinstance(x, (complex, mpmath.mpc)):
        return x.imag == 0 and is_exact_integer(
            x.real if isinstance(x, complex) else mpmath.mpf(x.real))
    return False


def real_part_exact(x):
    """Real part of x as a comparable number (Fraction kept exact)."""
    if isinstance(x, (int, Fraction)):
        return x
    if isinstance(x, complex):
        return x.real
    if isinstance(x, mpmath.mpc):
        return x.real
    return x


# ----------------------------------------------------------------------------
# Bernoulli numbers and constants
# ----------------------------------------------------------------------------

_bern_cache = {0: Fraction(1), 1: Fraction(-1, 2)}


def bernoulli_fraction(n):
    """B_n as an exact Fraction (B_0 = 1, B_1 = -1/2, odd B_{2k+1} = 0)."""
    if n < 0:
        raise ValueError("Bernoulli index must be >= 0")
    if n not in _bern_cache:
        with _lock:
            if n % 2 == 1 and n > 1:
                _bern_cache[n] = Fraction(0)
            else:
                p, q = mpmath.bernfrac(n)
                _bern_cache[n] = Fraction(int(p), int(q))
    return _bern_cache[n]


def bernoulli_by_recurrence(nmax):
    """B_0..B_nmax via the classical recurrence; used as an independent check.

    B_m = -1/(m+1) * sum_{k<m} C(m+1, k) B_k.
    """
    out = [Fraction(1)]
    binom = [1]
    for m in range(1, nmax + 1):
        binom = [1] + [binom[i] + binom[i + 1] for i in range(len(binom) - 1)] + [1]
        # binom is now row m+1 of Pascal's triangle
        s = sum(Fraction(binom[k]) * out[k] for k in range(m))
        out.append(-s / Fraction(m + 1))
    return out


_euler_cache = {}


def euler_gamma_brent_mcmillan(prec):
    """Euler's constant via the Bessel-ratio (Brent-McMillan) scheme.

    gamma = S(n)/V(n) - log(n) with
    S(n) = sum (n^k/k!)^2 H_k,  V(n) = sum (n^k/k!)^2,  error O(e^{-4n}).
    """
    dps = working_dps(prec) + 5
    key = dps
    if key in _euler_cache:
        return +_euler_cache[key]
    with mp.workdps(dps):
        n = int(dps * 0.59) + 2  # e^{-4n} < 10^{-dps}
        term = mp.mpf(1)
        s = mp.mpf(0)
        v = mp.mpf(1)
        h = mp.mpf(0)
        k = 0
        n2 = mp.mpf(n) ** 2
        while True:
            k += 1
            term = term * n2 / (k * k)
            h += mp.mpf(1) / k
            s += term * h
            v += term
            if k > 4 * n and term * h < mp.mpf(10) ** (-dps - 5):
                break
        val = s / v - mp.log(n)
        _euler_cache[key] = val
    return +val


_zeta_int_cache = {}


def zeta_int(k, dps):
    """zeta(k) for integer k >= 2 at the given working dps (cached)."""
    key = (k, dps)
    if key not in _zeta_int_cache:
        with mp.workdps(dps):
            _zeta_int_cache[key] = +mp.zeta(k)
    return _zeta_int_cache[key]


@dataclass
class Constants:
    """Bundle of fundamental constants at a fixed precision."""
    prec: int
    pi: mpmath.mpf
    euler_gamma: mpmath.mpf

    def zeta(self, k):
        """zeta(k) for integer k >= 2."""
        if k < 2:
            raise ValueError("zeta cache covers integer k >= 2")
        return zeta_int(k, working_dps(self.prec))

    def bernoulli(self, n):
        """Exact Bernoulli number B_n as a Fraction."""
        return bernoulli_fraction(n)


def constants(prec=50):
    """Constants bundle; gamma is computed by the Bessel-ratio scheme."""
    if prec < 10:
        raise ValueError("prec must be >= 10")
    with mp.workdps(working_dps(prec)):
        pi = +mp.pi
    return Constants(prec=prec, pi=pi, euler_gamma=euler_gamma_brent_mcmillan(prec))


# ----------------------------------------------------------------------------
# Digamma
# ----------------------------------------------------------------------------

# Per-dps cache of mpf coefficients B_{2k}/(2k) for the asymptotic series.
_psi_coeff_cache = {}


def _psi_coeffs(dps, count):
    lst = _psi_coeff_cache.get(dps)
    if lst is None or len(lst) < count:
        with mp.workdps(dps):
            lst = [mp.mpf(bernoulli_fraction(2 * k).numerator)
                   / (bernoulli_fraction(2 * k).denominator * 2 * k)
                   for k in range(1, count + 1)]
        _psi_coeff_cache[dps] = lst
    return lst


def _asympt_threshold(dps):
    # e^{-2 pi z0} <= 10^{-dps-3}: smallest-term truncation can reach the target
    return 0.3665 * (dps + 6) + 2


def _psi_raw(z, dps):
    """psi(z) at the current working dps; z an mpf/mpc not at a pole.

    Upward recurrence psi(z+1) = psi(z) + 1/z into the asymptotic region,
    then the Bernoulli asymptotic series truncated at its smallest term.
    """
    z = mp.mpc(z) if isinstance(z, mpmath.mpc) else mp.mpf(z)
    neg_reflect = None
    re = z.real if isinstance(z, mpmath.mpc) else z
    if re < 0:
        # reflection keeps the recurrence short: psi(1-z) = psi(z) + pi*cot(pi*z)
        neg_reflect = z
        z = 1 - z
        re = z.real if isinstance(z, mpmath.mpc) else z
    z0 = _asympt_threshold(dps)
    im = z.imag if isinstance(z, mpmath.mpc) else mp.mpf(0)
    # |z + m| >= z0 with a secant-factor margin for complex arguments
    if abs(im) >= z0:
        shift = 0
    else:
        shift = int(mp.ceil(z0 - re)) if re < z0 else 0
        if shift < 0:
            shift = 0
    rec = mp.mpf(0)
    for j in range(shift):
        rec += 1 / (z + j)
    w = z + shift
    # asymptotic series at w
    w2 = 1 / (w * w)
    coeffs = _psi_coeffs(dps, int(3.3 * z0) + 8)
    total = mp.log(w) - 1 / (2 * w)
    powe = w2
    eps = mp.mpf(10) ** (-dps - 3)
    prev = mp.inf
    for c in coeffs:
        term = c * powe
        at = abs(term)
        total -= term
        if at < eps:
            break
        if at > prev:
            break  # smallest term passed; bounded by it
        prev = at
        powe *= w2
    val = total - rec
    if neg_reflect is not None:
        # psi(x) = psi(1-x) - pi*cot(pi*x)
        val = val - mp.pi * mp.cot(mp.pi * neg_reflect)
    return val


def digamma(z, prec=50):
    """psi(z) to the precision contract; poles at nonpositive integers."""
    if is_exact_integer(z) and real_part_exact(z) <= 0:
        raise PoleError(f"digamma pole at {z}")
    dps = working_dps(prec)
    with mp.workdps(dps):
        zz = to_mp(z)
        if isinstance(zz, mpmath.mpc) and zz.imag == 0:
            zz = zz.real
        if isinstance(zz, mpmath.mpf) and zz <= 0 and mpmath.isint(zz):
            raise PoleError(f"digamma pole at {z}")
        return _psi_raw(zz, dps)


def trigamma(x, prec=50):
    """psi'(x) for real/complex x off the poles (same scheme, derivative series)."""
    if is_exact_integer(x) and real_part_exact(x) <= 0:
        raise PoleError(f"trigamma pole at {x}")
    dps = working_dps(prec)
    with mp.workdps(dps):
        z = to_mp(x)
        z0 = _asympt_threshold(dps)
        re = z.real if isinstance(z, mpmath.mpc) else z
        shift = int(mp.ceil(z0 - re)) if re < z0 else 0
        rec = mp.mpf(0)
        for j in range(shift):
            rec += 1 / (z + j) ** 2
        w = z + shift
        # psi'(w) ~ 1/w + 1/(2w^2) + sum B_{2k} w^{-2k-1}
        w2 = 1 / (w * w)
        total = 1 / w + w2 / 2
        powe = w2 / w
        eps = mp.mpf(10) ** (-dps - 3)
        prev = mp.inf
        for k in range(1, int(3.3 * z0) + 8):
            b = bernoulli_fraction(2 * k)
            term = mp.mpf(b.numerator) / b.denominator * powe
            at = abs(term)
            total += term
            if at < eps or at > prev:
                break
            prev = at
            powe *= w2
        return total + rec


# ----------------------------------------------------------------------------
# Dilogarithm
# ----------------------------------------------------------------------------

def _li2_series(w, dps):
    """sum w^k / k^2 for |w| well inside the unit disk."""
    eps = mp.mpf(10) ** (-dps - 3)
    total = mp.mpf(0)
    powe = w
    k = 1
    aw = abs(w)
    while True:
        total += powe / (k * k)
        k += 1
        powe *= w
        if abs(powe) / (k * k) < eps:
            break
        if k > 100000:
            raise QuadratureError("dilog series did not converge")
    return total


def _clausen2(theta, dps):
    """Cl_2(theta) for 0 < theta < 2*pi via the log-sine power expansion.

    Cl_2(t) = t - t*log(t) + t^3 * sum_{n>=1} zeta(2n)/(n (2n+1) (2pi)^{2n}) t^{2n-2}
    reduced to |t| <= pi by Cl_2(2pi - t) = -Cl_2(t).
    """
    sign = 1
    t = theta
    if t > mp.pi:
        t = 2 * mp.pi - t
        sign = -1
    if t == 0:
        return mp.mpf(0)
    eps = mp.mpf(10) ** (-dps - 3)
    total = t - t * mp.log(t)
    ratio = (t / (2 * mp.pi)) ** 2
    powe = t * ratio
    n = 1
    while True:
        term = zeta_int(2 * n, dps) / (n * (2 * n + 1)) * powe
        total += term
        if abs(term) < eps:
            break
        powe *= ratio
        n += 1
    return sign * total


def dilog_unit_circle(theta, prec=50):
    """Li_2(e^{i*theta}) for real theta (closed real part + Clausen imaginary)."""
    dps = working_dps(prec)
    with mp.workdps(dps):
        t = to_mp(theta)
        t = t - 2 * mp.pi * mp.floor(t / (2 * mp.pi))
        re = mp.pi ** 2 / 6 - t * (2 * mp.pi - t) / 4
        im = _clausen2(t, dps)
        return mp.mpc(re, im)


def _dilog_raw(z, dps):
    """Principal-branch Li_2 at working dps; z may be mpf (<1) or mpc."""
    if z == 0:
        return mp.mpf(0)
    if z == 1:
        return mp.pi ** 2 / 6
    shift = mp.mpf(0)
    # inversion: pull |z| <= 1       Li2(z) = -Li2(1/z) - pi^2/6 - log(-z)^2/2
    if abs(z) > 1:
        shift += -mp.pi ** 2 / 6 - mp.log(-z) ** 2 / 2
        z = 1 / z
        sign = -1
    else:
        sign = 1
    # now |z| <= 1; choose among z, 1-z, z/(z-1) the smallest modulus
    cands = [(abs(z), 0)]
    cands.append((abs(1 - z), 1))
    if z != 1:
        cands.append((abs(z / (z - 1)), 2))
    cands.sort(key=lambda p: p[0])
    best_abs, which = cands[0]
    if best_abs > mp.mpf("0.85"):
        # hexagonal corner region: integrate -log(1-t)/t along [0, z]
        val = -mp.quad(lambda s: mp.log(1 - z * s) / s if s != 0 else -z, [0, 1])
        return sign * val + shift
    if which == 1:
        w = 1 - z
        val = mp.pi ** 2 / 6 - mp.log(z) * mp.log(w) - _li2_series(w, dps)
    elif which == 2:
        w = z / (z - 1)
        val = -_li2_series(w, dps) - mp.log(1 - z) ** 2 / 2
    else:
        val = _li2_series(z, dps)
    return sign * val + shift


def dilog(z, prec=50):
    """Principal-branch Li_2(z); branch cut [1, oo).

    Real z > 1 is rejected (use rogers_L for the real continuation).
    """
    re = real_part_exact(z)
    im_zero = not isinstance(z, (complex, mpmath.mpc)) or \
        (z.imag == 0 if isinstance(z, (complex, mpmath.mpc)) else True)
    if im_zero and isinstance(re, (int, float, Fraction)) and re > 1:
        raise BranchCutError(f"dilog on the cut [1, oo) at {z}")
    dps = working_dps(prec)
    with mp.workdps(dps):
        zz = to_mp(z)
        if isinstance(zz, mpmath.mpc) and zz.imag == 0:
            zz = zz.real
        if isinstance(zz, mpmath.mpf) and zz > 1:
            raise BranchCutError(f"dilog on the cut [1, oo) at {z}")
        return _dilog_raw(zz, dps)


def rogers_L(x, prec=50):
    """Rogers dilogarithm, total on the real line.

    L(x) = Li2(x) + log(x)log(1-x)/2 on [0,1], L(x) = pi^2/3 - L(1/x) for
    x > 1 and L(x) = -L(x/(x-1)) for x < 0; L(0) = 0, L(1) = pi^2/6.
    """
    dps = working_dps(prec)
    with mp.workdps(dps):
        t = to_mp(x)
        if isinstance(t, mpmath.mpc):
            if t.imag != 0:
                raise ValueError("rogers_L is defined on the real line")
            t = t.real
        if t == 0:
            return mp.mpf(0)
        if t == 1:
            return +(mp.pi ** 2 / 6)
        if t > 1:
            return mp.pi ** 2 / 3 - rogers_L_raw(1 / t, dps)
        if t < 0:
            return -rogers_L_raw(t / (t - 1), dps)
        return rogers_L_raw(t, dps)


def rogers_L_raw(t, dps):
    # 0 < t < 1
    return _dilog_raw(t, dps) + mp.log(t) * mp.log(1 - t) / 2


# ----------------------------------------------------------------------------
# Quadrature
# ----------------------------------------------------------------------------

def quadrature(f, a, b, prec=50, points=None):
    """Double-exponential (tanh-sinh / exp-sinh) quadrature of f over (a, b).

    Endpoints may be infinite.  `points` optionally inserts interior split
    points.  Raises QuadratureError when the level-to-level error estimate
    fails to contract below the contract bound.
    """
    dps = working_dps(prec)
    with mp.workdps(dps):
        interval = [to_mp(a)] + [to_mp(p) for p in (points or [])] + [to_mp(b)]
        val, err = mp.quad(f, interval, error=True)
        if err > mp.mpf(10) ** (CONTRACT_GUARD - prec) * (1 + abs(val)):
            # one retry at higher degree before giving up
            val, err = mp.quad(f, interval, error=True, maxdegree=10)
            if err > mp.mpf(10) ** (CONTRACT_GUARD - prec) * (1 + abs(val)):
                raise QuadratureError(
                    f"quadrature error estimate {mp.nstr(err, 5)} above contract")
        return val


# ----------------------------------------------------------------------------
# Tail sums sum_{n > N} n^{-s} (Hurwitz-zeta partial tails)
# ----------------------------------------------------------------------------

def zeta_tail(s, m, dps):
    """sum_{n >= m} n^{-s} for integer s >= 2, m >= 1, by Euler-Maclaurin.

    A short direct sum shifts the expansion point far enough that the
    Bernoulli corrections reach the target; each correction is updated
    incrementally and truncation stops at the smallest term.
    """
    with mp.workdps(dps):
        # direct part up to r-1, EM from r; the expansion point must sit far
        # enough out that the Bernoulli corrections reach the target before
        # their smallest term
        r = max(m, int(0.3665 * (dps + 6) + 0.52 * s) + 3)
        direct = mp.mpf(0)
        for n in range(m, r):
            direct += mp.mpf(n) ** (-s)
        rm = mp.mpf(r)
        inv = 1 / rm
        total = rm ** (1 - s) / (s - 1) + rm ** (-s) / 2
        # correction terms: B_{2j}/(2j)! * (s)_{2j-1} * r^{-s-2j+1}
        eps = mp.mpf(10) ** (-dps - 3) * abs(total)
        poch = mp.mpf(s)  # (s)_(2j-1) for j = 1
        rpow = rm ** (-s - 1)
        j = 1
        prev = mp.inf
        while True:
            b = bernoulli_fraction(2 * j)
            fact = mp.factorial(2 * j)
            term = mp.mpf(b.numerator) / b.denominator / fact * poch * rpow
            at = abs(term)
            total += term
            if at < eps or at > prev:
                break
            prev = at
            poch *= (s + 2 * j - 1) * (s + 2 * j)
            rpow *= inv * inv
            j += 1
            if j > 400:
                raise QuadratureError("zeta_tail failed to converge")
        return direct + total


_tail_vec_cache = {}


def psi_tail_zetas(m, kmax, dps):
    """[zeta(2, m), zeta(3, m), zeta(5, m), ..., zeta(2*kmax+1, m)] cached."""
    key = (m, dps)
    with _lock:
        vec = _tail_vec_cache.get(key)
        if vec is None or len(vec) < kmax + 1:
            vec = [zeta_tail(2, m, dps)]
            vec += [zeta_tail(2 * k + 1, m, dps) for k in range(1, kmax + 1)]
            _tail_vec_cache[key] = vec
    return vec
