"""Complex gamma-family functions (Lanczos approximation).

Only what the hypergeometric connection formulas and the Gauss formula
need: ``loggamma``, ``gamma``, ``rgamma`` (entire reciprocal) and a real/complex
``digamma`` for the logarithmic connection case.
"""
import cmath
import math


# Lanczos g = 7, n = 9 (Godfrey's coefficients); ~15 significant digits.
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
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
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)

EULER_GAMMA = 0.57721566490153286061


def _is_pole(z):
    return z.imag == 0.0 and z.real <= 0.0 and z.real == math.floor(z.real)


def _loggamma_right(z):
    # valid for Re z >= 1/2
    z = z - 1.0
    x = _LANCZOS_COEF[0]
    for i in range(1, len(_LANCZOS_COEF)):
        x += _LANCZOS_COEF[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * cmath.log(t) - t + cmath.log(x)


def loggamma(z):
    """Log-gamma on the principal branch of the Lanczos sum.

    The imaginary part is not guaranteed to match the continuous branch
    used by e.g. ``scipy.special.loggamma``; ``exp(loggamma(z))`` is exact.
    """
    z = complex(z)
    if _is_pole(z):
        raise ZeroDivisionError(f"gamma has a pole at {z.real:g}")
    if z.real < 0.5:
        # reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z)
        return math.log(math.pi) - cmath.log(cmath.sin(math.pi * z)) - _loggamma_right(1.0 - z)
    return _loggamma_right(z)


def gamma(z):
    z = complex(z)
    return cmath.exp(loggamma(z))


def rgamma(z):
    """1/Gamma(z), returning 0 at the poles."""
    z = complex(z)
    if _is_pole(z):
        return 0j
    if z.real < 0.5:
        return cmath.sin(math.pi * z) * cmath.exp(_loggamma_right(1.0 - z)) / math.pi
    return cmath.exp(-_loggamma_right(z))


def digamma(x):
    """Digamma via upward recurrence and the asymptotic series."""
    x = complex(x)
    if _is_pole(x):
        raise ZeroDivisionError(f"digamma has a pole at {x.real:g}")
    acc = 0j
    if x.real < 0.5:
        # reflection: psi(1-x) - psi(x) = pi cot(pi x)
        return digamma(1.0 - x) - math.pi / cmath.tan(math.pi * x)
    while abs(x) < 10.0:
        acc -= 1.0 / x
        x += 1.0
    inv = 1.0 / x
    inv2 = inv * inv
    series = inv2 * (1.0 / 12 - inv2 * (1.0 / 120 - inv2 * (1.0 / 252 - inv2 * (1.0 / 240 - inv2 / 132))))
    return acc + cmath.log(x) - 0.5 * inv - series

