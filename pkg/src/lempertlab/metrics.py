"""Closed-form invariant distances at the origin, plus the Poincare distance.

All distances are on the Poincare scale, i.e. ``atanh`` of a Moebius-type
quantity.  The base-point formulas implemented here:

* tetrablock:  ``c(0, x) = atanh((|x2 - conj(x1) x3| + |x1 x2 - x3|) / (1 - |x1|^2))``
  after swapping the first two coordinates so that ``|x1| <= |x2|``;
* LHat_n:      ``c(0, z) = atanh(|z1|)`` when ``z' = 0`` and otherwise
  ``atanh( p(z') |1 - z1 conj(q') / (p(z')^2 - |q'|^2)| + |z1| p(z')^2 / (p(z')^2 - |q'|^2) )``
  with ``q' = sum z_j'^2``; an equivalent phase form (computed through the
  invariants ``a - b`` and the aligning phase) is evaluated alongside as an
  internal consistency check;
* Lie ball:    ``c(0, z) = atanh(p(z))`` (gauge of a convex balanced domain);
* Kobayashi infinitesimal metric at 0: ``|X1| + p(X')`` on LHat_n and
  ``max(|X1|, |X2|) + |X3|`` on the tetrablock.
"""

from __future__ import annotations

import numpy as np

from .domains import (
    DimensionError,
    DomainError,
    as_point,
    gauge_p,
    in_lhat,
    in_lie_ball,
    in_tetrablock,
    moduli,
    symmetric_square,
)

__all__ = [
    "FormulaInconsistencyError",
    "poincare",
    "carath_origin_tetra",
    "carath_origin_lhat",
    "carath_origin_lhat3",
    "carath_origin_lieball",
    "kobayashi_origin_tetra",
    "kobayashi_origin_lhat",
]

#: atanh arguments are clamped here to avoid spurious infinities
_ATANH_CLAMP = 1.0 - 1e-15
#: the two printed forms of the LHat formula must agree to this
_FORM_AGREE_TOL = 1e-8


class FormulaInconsistencyError(ArithmeticError):
    """The two printed forms of the base-point distance disagreed."""


def _atanh(t: float) -> float:
    return float(np.arctanh(min(max(t, 0.0), _ATANH_CLAMP)))


def poincare(a: complex, b: complex) -> float:
    """Poincare distance on the unit disc, ``atanh |(a - b) / (1 - conj(a) b)|``."""
    a, b = complex(a), complex(b)
    if abs(a) >= 1.0 or abs(b) >= 1.0:
        raise DomainError("Poincare distance needs points in the open unit disc")
    return _atanh(abs((a - b) / (1.0 - np.conj(a) * b)))


def carath_origin_tetra(x) -> float:
    """Caratheodory distance from 0 in the tetrablock."""
    x = as_point(x)
    if not in_tetrablock(x):
        raise DomainError("point lies outside the tetrablock")
    x1, x2, x3 = (complex(c) for c in x)
    if abs(x1) > abs(x2):
        x1, x2 = x2, x1  # the swap is an automorphism fixing 0
    val = (abs(x2 - np.conj(x1) * x3) + abs(x1 * x2 - x3)) / (1.0 - abs(x1) ** 2)
    return _atanh(val)


def _carath_lhat_corollary(z1: complex, zp: np.ndarray) -> float:
    p = gauge_p(zp)
    q = symmetric_square(zp)
    den = p * p - abs(q) ** 2
    return p * abs(1.0 - z1 * np.conj(q) / den) + abs(z1) * p * p / den


def _carath_lhat_eta_form(z1: complex, zp: np.ndarray) -> float:
    m = moduli(zp)
    p = m.a + m.b
    mm = m.a - m.b
    q = symmetric_square(zp)
    if abs(q) > 1e-14:
        eta = np.exp(-0.5j * np.angle(q))
    else:
        eta = 1.0 + 0.0j
    den = 1.0 - mm * mm
    return abs(np.conj(eta) * p - eta * z1 * mm / den) + abs(z1) / den


def carath_origin_lhat(z) -> float:
    """Caratheodory distance from 0 in LHat_n.

    Evaluates the direct closed form and the equivalent phase form and
    raises :class:`FormulaInconsistencyError` if they drift apart beyond
    1e-8 (they agree identically in exact arithmetic).
    """
    z = as_point(z)
    if z.size < 2:
        raise DimensionError("LHat points need length >= 2")
    if not in_lhat(z):
        raise DomainError("point lies outside LHat_n")
    z1 = complex(z[0])
    zp = z[1:]
    if float(np.max(np.abs(zp))) == 0.0:
        return _atanh(abs(z1))
    direct = _carath_lhat_corollary(z1, zp)
    eta_form = _carath_lhat_eta_form(z1, zp)
    if abs(direct - eta_form) > _FORM_AGREE_TOL:
        raise FormulaInconsistencyError(
            f"closed-form mismatch: direct {direct!r} vs phase form {eta_form!r}"
        )
    return _atanh(eta_form)


def carath_origin_lhat3(z) -> float:
    """Caratheodory distance from 0 in LHat_3 through the disc-pair chart.

    Uses ``atanh(|z2 - i z3 - z1 conj(z2 + i z3)/(1 - |z2 + i z3|^2)| +
    |z1|/(1 - |z2 + i z3|^2))`` after flipping the sign of ``z3`` (a linear
    automorphism) when ``|z2 + i z3| > |z2 - i z3|``.
    """
    z = as_point(z)
    if z.size != 3:
        raise DimensionError(f"expected length 3, got {z.size}")
    if not in_lhat(z):
        raise DomainError("point lies outside LHat_3")
    z1, z2, z3 = (complex(c) for c in z)
    if abs(z2 + 1j * z3) > abs(z2 - 1j * z3):
        z3 = -z3
    plus = z2 + 1j * z3
    minus = z2 - 1j * z3
    den = 1.0 - abs(plus) ** 2
    val = abs(minus - z1 * np.conj(plus) / den) + abs(z1) / den
    return _atanh(val)


def carath_origin_lieball(z) -> float:
    """Caratheodory (= Lempert) distance from 0 in the Lie ball:
    ``atanh`` of the gauge.  Serves as a cross-check oracle for the
    numerical estimators."""
    z = as_point(z)
    if not in_lie_ball(z):
        raise DomainError("point lies outside the Lie ball")
    return _atanh(gauge_p(z))


def kobayashi_origin_tetra(X) -> float:
    """Infinitesimal Kobayashi metric of the tetrablock at 0:
    ``max(|X1|, |X2|) + |X3|``."""
    X = as_point(X)
    if X.size != 3:
        raise DimensionError(f"expected length 3, got {X.size}")
    return float(max(abs(X[0]), abs(X[1])) + abs(X[2]))


def kobayashi_origin_lhat(X) -> float:
    """Infinitesimal Kobayashi metric of LHat_n at 0: ``|X1| + p(X')``."""
    X = as_point(X)
    if X.size < 2:
        raise DimensionError("need length >= 2")
    return float(abs(X[0]) + gauge_p(X[1:]))
