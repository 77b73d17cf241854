"""Special functions used by the Poisson and heat kernels.

Everything here is self-contained (numpy only).  Scalar-parameter /
array-argument functions accept either a float or an ndarray for the
argument and return the same shape.
"""
from __future__ import annotations

import math

import numpy as np

__all__ = [
    "PoleError",
    "ConvergenceError",
    "gamma_fn",
    "log_gamma",
    "rgamma",
    "digamma",
    "pochhammer",
    "gauss_2f1",
    "legendre_q",
    "legendre_q_cut_plane",
    "bessel_j",
    "bessel_i",
    "BESSEL_SWITCH",
]


class PoleError(ValueError):
    """Argument sits on a pole of Gamma (or of a function built from it)."""


class ConvergenceError(ArithmeticError):
    """A series or iteration failed to converge within its cap."""


# Lanczos approximation, g = 7, n = 9.
_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_SQRT_2PI = math.sqrt(2.0 * math.pi)
_EPS = 1e-15
MAX_TERMS = 100_000


def _is_nonpositive_int(x: float) -> bool:
    return x <= 0 and x == math.floor(x)


def _lanczos_sum(x: float) -> float:
    acc = _LANCZOS[0]
    for k in range(1, len(_LANCZOS)):
        acc += _LANCZOS[k] / (x + k)
    return acc


def gamma_fn(x: float) -> float:
    """Euler Gamma function for real ``x``.

    Raises
    ------
    PoleError
        If ``x`` is zero or a negative integer.
    """
    x = float(x)
    if _is_nonpositive_int(x):
        raise PoleError(f"Gamma has a pole at {x}")
    if x < 0.5:
        return math.pi / (math.sin(math.pi * x) * gamma_fn(1.0 - x))
    if x == math.floor(x) and x <= 23:
        return float(math.prod(range(1, int(x))))
    z = x - 1.0
    t = z + _LANCZOS_G + 0.5
    return _SQRT_2PI * t ** (z + 0.5) * math.exp(-t) * _lanczos_sum(z)


def log_gamma(x: float) -> float:
    """log|Gamma(x)|, usable far beyond the overflow point of :func:`gamma_fn`."""
    x = float(x)
    if _is_nonpositive_int(x):
        raise PoleError(f"Gamma has a pole at {x}")
    if x < 0.5:
        return math.log(math.pi / abs(math.sin(math.pi * x))) - log_gamma(1.0 - x)
    z = x - 1.0
    t = z + _LANCZOS_G + 0.5
    return 0.5 * math.log(2 * math.pi) + (z + 0.5) * math.log(t) - t + math.log(_lanczos_sum(z))


def rgamma(x: float) -> float:
    """1/Gamma(x), which is entire: zero at the poles of Gamma."""
    if _is_nonpositive_int(float(x)):
        return 0.0
    return 1.0 / gamma_fn(x)


def digamma(x: float) -> float:
    """Logarithmic derivative of Gamma for real ``x``."""
    x = float(x)
    if _is_nonpositive_int(x):
        raise PoleError(f"digamma has a pole at {x}")
    if x < 0.5:
        # reflection
        return digamma(1.0 - x) - math.pi / math.tan(math.pi * x)
    acc = 0.0
    while x < 10.0:
        acc -= 1.0 / x
        x += 1.0
    x2 = 1.0 / (x * x)
    # Bernoulli-number asymptotic tail
    tail = x2 * (1.0 / 12 - x2 * (1.0 / 120 - x2 * (1.0 / 252 - x2 * (1.0 / 240 - x2 * (1.0 / 132)))))
    return acc + math.log(x) - 0.5 / x - tail


def pochhammer(a: float, n: int) -> float:
    """Rising factorial (a)_n as the direct product a(a+1)...(a+n-1)."""
    if n < 0 or int(n) != n:
        raise ValueError("n must be a non-negative integer")
    out = 1.0
    for k in range(int(n)):
        out *= a + k
    return out


# ---------------------------------------------------------------------------
# Gauss hypergeometric function


def _series_2f1(a, b, c, z):
    """Direct Maclaurin series; ``z`` is an ndarray (real or complex)."""
    term = np.ones_like(z)
    total = np.ones_like(z)
    if np.all(z == 0):
        return total
    for n in range(MAX_TERMS):
        term = term * ((a + n) * (b + n) / ((c + n) * (n + 1))) * z
        total = total + term
        if not np.any(term):
            return total
        if np.all(np.abs(term) <= _EPS * np.abs(total)) and n > 2:
            return total
    raise ConvergenceError(f"2F1({a}, {b}; {c}; z) series did not converge in {MAX_TERMS} terms")


def _log_series(coef0, ratio, w, log_part, extra):
    """Sum_n coef_n w^n (log_part + extra(n)) with coef_{n+1} = coef_n * ratio(n)."""
    coef = coef0
    wn = np.ones_like(w)
    total = np.zeros_like(w)
    for n in range(MAX_TERMS):
        term = coef * wn * (log_part + extra(n))
        total = total + term
        if n > 2 and np.all(np.abs(term) <= _EPS * np.maximum(np.abs(total), 1e-300)):
            return total
        coef = coef * ratio(n)
        wn = wn * w
        if coef == 0:
            return total
    raise ConvergenceError("logarithmic 2F1 connection series did not converge")


def _connection_2f1(a, b, c, w):
    """2F1 at z = 1 - w, 0 < w < 0.5, via the linear transformation to 1 - z."""
    s = c - a - b
    m = round(s)
    if abs(s - m) > 1e-12:
        g1 = gamma_fn(c) * gamma_fn(s) * rgamma(c - a) * rgamma(c - b)
        g2 = gamma_fn(c) * gamma_fn(-s) * rgamma(a) * rgamma(b)
        out = g1 * _series_2f1(a, b, 1.0 - s, w)
        if g2 != 0.0:
            out = out + g2 * w**s * _series_2f1(c - a, c - b, 1.0 + s, w)
        return out

    # c - a - b = m is an integer: logarithmic cases
    lw = np.log(w)
    if m == 0:
        pre = gamma_fn(a + b) * rgamma(a) * rgamma(b)
        return pre * _log_series(
            1.0,
            lambda n: (a + n) * (b + n) / ((n + 1) ** 2),
            w,
            -lw,
            lambda n: 2 * digamma(n + 1) - digamma(a + n) - digamma(b + n),
        )
    if m > 0:
        # c = a + b + m
        head = np.zeros_like(w)
        coef = 1.0
        wn = np.ones_like(w)
        for n in range(m):
            head = head + coef * wn
            coef *= (a + n) * (b + n) / ((n + 1) * (1 - m + n)) if n < m - 1 else 0.0
            wn = wn * w
        head = head * gamma_fn(m) * gamma_fn(a + b + m) * rgamma(a + m) * rgamma(b + m)
        pre = gamma_fn(a + b + m) * rgamma(a) * rgamma(b)
        if pre == 0.0:
            return head
        tail = _log_series(
            1.0 / math.factorial(m),
            lambda n: (a + m + n) * (b + m + n) / ((n + 1) * (n + m + 1)),
            w,
            lw,
            lambda n: -digamma(n + 1) - digamma(n + m + 1) + digamma(a + n + m) + digamma(b + n + m),
        )
        return head - (-w) ** m * pre * tail
    # c = a + b - k
    k = -m
    head = np.zeros_like(w)
    coef = 1.0
    wn = np.ones_like(w)
    for n in range(k):
        head = head + coef * wn
        coef *= (a - k + n) * (b - k + n) / ((n + 1) * (1 - k + n)) if n < k - 1 else 0.0
        wn = wn * w
    head = head * gamma_fn(k) * gamma_fn(a + b - k) * rgamma(a) * rgamma(b) * w ** (-k)
    pre = gamma_fn(a + b - k) * rgamma(a - k) * rgamma(b - k)
    if pre == 0.0:
        return head
    tail = _log_series(
        1.0 / math.factorial(k),
        lambda n: (a + n) * (b + n) / ((n + 1) * (n + k + 1)),
        w,
        lw,
        lambda n: -digamma(n + 1) - digamma(n + k + 1) + digamma(a + n) + digamma(b + n),
    )
    return head - (-1) ** k * pre * tail


def gauss_2f1(a: float, b: float, c: float, z, complement=None):
    """Gauss hypergeometric function 2F1(a, b; c; z) for real -1 < z < 1.

    The Maclaurin series is summed directly for ``|z| <= 0.5``.  For
    ``0.5 < z < 1`` the 1 - z connection formula is used (including the
    logarithmic cases where c - a - b is an integer), and for
    ``-1 < z < -0.5`` the Pfaff transformation maps into ``(1/3, 1/2)``.

    Parameters
    ----------
    a, b, c : float
        Parameters; ``c`` must not be zero or a negative integer.
    z : float or ndarray
        Argument(s), all inside the open unit interval.
    complement : float or ndarray, optional
        ``1 - z`` computed by the caller without cancellation; used by the
        connection formula when supplied.
    """
    if _is_nonpositive_int(float(c)):
        raise PoleError(f"2F1 undefined for c = {c}")
    scalar = np.ndim(z) == 0
    z = np.atleast_1d(np.asarray(z, dtype=float))
    inside = np.abs(z) < 1.0
    if complement is not None:
        # z may round to 1 while the exact complement is still positive
        inside |= (z > 0) & (np.broadcast_to(np.asarray(complement, dtype=float), z.shape) > 0)
    if not np.all(inside):
        raise ValueError("gauss_2f1 requires |z| < 1")
    out = np.empty_like(z)
    polynomial = _is_nonpositive_int(float(a)) or _is_nonpositive_int(float(b))

    direct = (np.abs(z) <= 0.5) | polynomial
    if np.any(direct):
        out[direct] = _series_2f1(a, b, c, z[direct])
    upper = ~direct & (z > 0)
    if np.any(upper):
        if complement is None:
            w = 1.0 - z[upper]
        else:
            w = np.broadcast_to(np.asarray(complement, dtype=float), z.shape)[upper]
        out[upper] = _connection_2f1(a, b, c, w)
    lower = ~direct & (z < 0)
    if np.any(lower):
        zl = z[lower]
        out[lower] = (1.0 - zl) ** (-a) * _series_2f1(a, c - b, c, zl / (zl - 1.0))
    return float(out[0]) if scalar else out


# ---------------------------------------------------------------------------
# Legendre functions of the second kind


def legendre_q(degree: float, order: int, z, z_minus_1=None):
    """Associated Legendre function of the second kind Q^mu_lambda(z), z > 1.

    Uses the representation in powers of 1/z^2,

        Q^mu_lam(z) = (-1)^mu sqrt(pi) Gamma(lam + mu + 1) / (2^(lam+1) Gamma(lam + 3/2))
                      * z^(-lam-mu-1) (z^2 - 1)^(mu/2)
                      * 2F1((lam+mu+1)/2, (lam+mu+2)/2; lam + 3/2; 1/z^2),

    which for integer mu is real.  ``order`` is restricted to {0, 1}; with
    this convention Q^1 = sqrt(z^2 - 1) dQ/dz.  Callers that know ``z - 1``
    more accurately than ``z`` itself (the coincidence limit) may pass it
    as ``z_minus_1``.
    """
    if order not in (0, 1):
        raise ValueError("order must be 0 or 1")
    if degree <= -1:
        raise ValueError("degree must exceed -1")
    scalar = np.ndim(z) == 0
    z = np.atleast_1d(np.asarray(z, dtype=float))
    if z_minus_1 is None:
        zm1 = z - 1.0
    else:
        zm1 = np.broadcast_to(np.asarray(z_minus_1, dtype=float), z.shape)
    if np.any(zm1 <= 0.0):
        raise ValueError("legendre_q is defined here only for z > 1")
    lam, mu = float(degree), order
    a = (lam + mu + 1) / 2
    b = (lam + mu + 2) / 2
    c = lam + 1.5
    pre = (-1) ** mu * math.sqrt(math.pi) * gamma_fn(lam + mu + 1) * rgamma(c) / 2 ** (lam + 1)
    zz1 = zm1 * (z + 1.0)
    try:
        f = gauss_2f1(a, b, c, 1.0 / (z * z), complement=zz1 / (z * z))
    except ConvergenceError as exc:
        raise ConvergenceError(f"Legendre Q stalled near z = 1: {exc}") from exc
    out = pre * z ** (-lam - mu - 1) * zz1 ** (mu / 2) * f
    return float(out[0]) if scalar else out


def legendre_q_cut_plane(degree: float, order: int, z=None, xi=None):
    """Q^mu_lam(z) continued to complex z off the cut (-inf, 1].

    Uses the expansion in zeta = exp(-xi), xi = arccosh z, |zeta| < 1 off the cut,

        Q_lam(z) = sqrt(pi) Gamma(lam+1)/Gamma(lam+3/2)
                   * sum_n (1/2)_n (lam+1)_n / ((lam+3/2)_n n!) zeta^(lam+1+2n),

    with Q^1 = dQ/dxi.  Agrees with :func:`legendre_q` on z > 1.  Passing
    ``xi`` directly (any branch with Re xi > 0) evaluates the continuation
    onto other sheets across (-inf, -1).
    """
    if order not in (0, 1):
        raise ValueError("order must be 0 or 1")
    lam = float(degree)
    if xi is None:
        xi = np.arccosh(np.asarray(z, dtype=complex))
    xi = np.asarray(xi, dtype=complex)
    if np.any(xi.real <= 0):
        raise ConvergenceError("cut-plane Legendre series needs Re arccosh(z) > 0")
    zeta2 = np.exp(-2.0 * xi)
    lead = np.exp(-(lam + 1.0) * xi)
    pre = math.sqrt(math.pi) * gamma_fn(lam + 1.0) * rgamma(lam + 1.5)
    coef = 1.0
    zn = np.ones_like(xi)
    total = np.zeros_like(xi)
    for n in range(MAX_TERMS):
        weight = coef if order == 0 else -coef * (lam + 1.0 + 2 * n)
        term = weight * zn
        total = total + term
        if n > 2 and np.all(np.abs(term) <= _EPS * np.abs(total)):
            return pre * lead * total
        coef *= (0.5 + n) * (lam + 1.0 + n) / ((lam + 1.5 + n) * (n + 1))
        zn = zn * zeta2
    raise ConvergenceError("cut-plane Legendre series did not converge (argument too close to the cut)")


# ---------------------------------------------------------------------------
# Bessel functions

BESSEL_SWITCH = 12.0


def _bessel_j_series(nu, x):
    half = 0.5 * x
    with np.errstate(divide="ignore"):
        term = half**nu * rgamma(nu + 1.0)
    total = term.copy()
    h2 = half * half
    for k in range(200):
        term = -term * h2 / ((k + 1) * (k + 1 + nu))
        total += term
        if np.all(np.abs(term) <= 1e-17 * np.maximum(np.abs(total), 1e-300)) and k > 4:
            break
    return total


def _bessel_j_asymptotic(nu, x):
    mu4 = 4.0 * nu * nu
    p = np.ones_like(x)
    q = np.zeros_like(x)
    term = np.ones_like(x)
    last = np.full_like(x, np.inf)
    active = np.ones(x.shape, dtype=bool)
    for k in range(1, 60):
        term = term * (mu4 - (2 * k - 1) ** 2) / (k * 8.0 * x)
        mag = np.abs(term)
        active &= mag < last
        if not np.any(active):
            break
        if k % 2:
            sign = -1.0 if (k // 2) % 2 else 1.0
            q = np.where(active, q + sign * term, q)
        else:
            sign = -1.0 if (k // 2) % 2 else 1.0
            p = np.where(active, p + sign * term, p)
        last = np.where(active, mag, last)
        active &= mag > 1e-17
    chi = x - (0.5 * nu + 0.25) * math.pi
    return np.sqrt(2.0 / (math.pi * x)) * (p * np.cos(chi) - q * np.sin(chi))


def bessel_j(order: float, x):
    """Bessel function of the first kind J_nu(x) for nu > -1, x >= 0.

    Power series for x <= ``BESSEL_SWITCH``, Hankel asymptotic expansion
    (summed to its smallest term) beyond.
    """
    nu = float(order)
    if nu <= -1:
        raise ValueError("order must exceed -1")
    scalar = np.ndim(x) == 0
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x < 0):
        raise ValueError("bessel_j requires x >= 0")
    out = np.empty_like(x)
    small = x <= BESSEL_SWITCH
    if np.any(small):
        out[small] = _bessel_j_series(nu, x[small])
    if np.any(~small):
        out[~small] = _bessel_j_asymptotic(nu, x[~small])
    return float(out[0]) if scalar else out


def bessel_i(order: float, x, scaled: bool = False):
    """Modified Bessel function I_nu(x) for nu > -1, x >= 0.

    Power series (positive terms, no cancellation) up to x = 700; with
    ``scaled=True`` the result is I_nu(x) * exp(-x), and beyond x = 700 the
    scaled value comes from the large-argument expansion.

    Raises
    ------
    OverflowError
        Unscaled evaluation for x > 700.
    """
    nu = float(order)
    if nu <= -1:
        raise ValueError("order must exceed -1")
    scalar = np.ndim(x) == 0
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x < 0):
        raise ValueError("bessel_i requires x >= 0")
    if not scaled and np.any(x > _I_SERIES_MAX):
        raise OverflowError(f"I_nu(x) overflows for x > {_I_SERIES_MAX}; use scaled=True")
    out = np.empty_like(x)
    small = x <= _I_SERIES_MAX
    if np.any(small):
        xs = x[small]
        vals = _bessel_i_series(nu, xs)
        out[small] = vals * np.exp(-xs) if scaled else vals
    if np.any(~small):
        out[~small] = _bessel_i_scaled_asymptotic(nu, x[~small])
    return float(out[0]) if scalar else out


_I_SERIES_MAX = 700.0


def _bessel_i_series(nu, x):
    half = 0.5 * x
    with np.errstate(divide="ignore"):
        term = half**nu * rgamma(nu + 1.0)
    total = term.copy()
    h2 = half * half
    kmax = int(np.max(x, initial=0.0) + 10.0 * np.sqrt(np.max(x, initial=0.0)) + 40)
    for k in range(kmax):
        term = term * h2 / ((k + 1) * (k + 1 + nu))
        total += term
        if np.all(term <= 1e-17 * total):
            break
    return total


def _bessel_i_scaled_asymptotic(nu, x):
    mu4 = 4.0 * nu * nu
    term = np.ones_like(x)
    total = np.ones_like(x)
    for k in range(1, 40):
        term = -term * (mu4 - (2 * k - 1) ** 2) / (k * 8.0 * x)
        total += term
        if np.all(np.abs(term) <= 1e-17 * np.abs(total)):
            break
    return total / np.sqrt(2.0 * math.pi * x)
