"""Bilinear geometry of C^n, the Lie-ball gauge, and domain memberships.

Three domains live here:

* ``L_n`` -- the Lie ball (Cartan domain of type four), the unit ball of the
  gauge ``p(z)^2 = |z|^2 + sqrt(|z|^4 - |<z, conj z>|^2)``;
* ``LHat_n`` -- the image of ``L_n`` under the squared-first-coordinate map
  ``(z1, z') -> (z1^2, z')``;
* the tetrablock ``E`` in C^3.

All predicates evaluate strict inequalities in plain floating point; the
``*_margin`` variant exists for optimizers that need robust interior
certification.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "DimensionError",
    "DomainError",
    "Moduli",
    "as_point",
    "hermitian_inner",
    "symmetric_square",
    "moduli",
    "gauge_p",
    "in_lie_ball",
    "lhat_gauge",
    "in_lhat",
    "in_lhat_margin",
    "tetra_gauge",
    "in_tetrablock",
    "lambda_map",
    "lambda_lift",
    "project_pi",
    "embed_q",
    "point_to_json",
    "point_from_json",
]

#: absolute tolerance for point comparisons throughout the package
POINT_ATOL = 1e-12


class DimensionError(ValueError):
    """Raised when point dimensions do not match an operation's contract."""


class DomainError(ValueError):
    """Raised when a point lies outside the domain an operation requires."""


def as_point(z) -> np.ndarray:
    """Coerce ``z`` to a 1-d complex array and validate it.

    Points must have length >= 1 and all coordinates finite.
    """
    arr = np.asarray(z, dtype=complex)
    if arr.ndim != 1 or arr.size < 1:
        raise DimensionError(f"point must be a nonempty 1-d sequence, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError("point has non-finite coordinates")
    return arr


@dataclass(frozen=True)
class Moduli:
    """The two rotation invariants a >= b >= 0 of a point.

    They satisfy ``a^2 + b^2 = |z|^2`` and ``a^2 - b^2 = |<z, conj z>|``;
    the gauge is ``p(z) = a + b``.
    """

    a: float
    b: float


def hermitian_inner(z, w) -> complex:
    """Hermitian inner product ``sum_j z_j * conj(w_j)``."""
    z = as_point(z)
    w = as_point(w)
    if z.size != w.size:
        raise DimensionError(f"length mismatch: {z.size} vs {w.size}")
    return complex(np.sum(z * np.conj(w)))


def symmetric_square(z) -> complex:
    """Bilinear square ``sum_j z_j^2`` (holomorphic in z)."""
    z = as_point(z)
    return complex(np.sum(z * z))


def moduli(z) -> Moduli:
    """Split ``z`` into its invariants ``a >= b >= 0``.

    ``a = sqrt((|z|^2 + |<z, conj z>|)/2)`` and ``b`` with ``+`` replaced
    by ``-``.  Round-off can push the radicands to tiny negatives, so they
    are clamped at zero; both numbers are real by construction.
    """
    z = as_point(z)
    n2 = float(np.sum(np.abs(z) ** 2))
    q = abs(symmetric_square(z))
    a = np.sqrt(max(0.0, (n2 + q) / 2.0))
    b = np.sqrt(max(0.0, (n2 - q) / 2.0))
    return Moduli(float(a), float(b))


def gauge_p(z) -> float:
    """The Lie-ball gauge ``p(z) = a(z) + b(z)``, a norm on C^n."""
    m = moduli(z)
    return m.a + m.b


def in_lie_ball(z) -> bool:
    """Membership in the Lie ball, ``p(z) < 1``."""
    return gauge_p(z) < 1.0


def lhat_gauge(w) -> float:
    """Gauge of the lift ``(sqrt(w1), w')``; < 1 iff ``w`` is in LHat_n.

    Well defined because ``p`` depends on the first coordinate only through
    ``|z1|^2`` and ``z1^2``, which agree for both square roots.
    """
    w = as_point(w)
    return gauge_p(lambda_lift(w, +1))


def in_lhat(w) -> bool:
    """Membership in LHat_n (the squared-first-coordinate image of L_n)."""
    return lhat_gauge(w) < 1.0


def in_lhat_margin(w, eps: float) -> bool:
    """Robust interior test: gauge of the lift stays below ``1 - eps``."""
    if not 0.0 <= eps < 1.0:
        raise ValueError(f"margin must be in [0, 1), got {eps}")
    return lhat_gauge(w) < 1.0 - eps


def tetra_gauge(x) -> float:
    """Sup over the tetrablock slice-function family at base 0.

    Equals ``max`` over both coordinate orderings of
    ``(|x2 - conj(x1) x3| + |x1 x2 - x3|) / (1 - |x1|^2)``; the point is in
    the tetrablock iff this value is < 1.  Returns ``inf`` when either of
    the first two coordinates has modulus >= 1.
    """
    x = as_point(x)
    if x.size != 3:
        raise DimensionError(f"tetrablock points have length 3, got {x.size}")
    x1, x2, x3 = (complex(v) for v in x)
    det_term = abs(x1 * x2 - x3)

    def one_sided(u, v):
        den = 1.0 - abs(u) ** 2
        if den <= 0.0:
            return np.inf
        return (abs(v - np.conj(u) * x3) + det_term) / den

    return float(max(one_sided(x1, x2), one_sided(x2, x1)))


def in_tetrablock(x) -> bool:
    """Tetrablock membership via the closed characterization.

    ``|x1|^2 + |x2|^2 + 2|x1 x2 - x3| < 1 + |x3|^2`` and ``|x3| < 1``.
    """
    x = as_point(x)
    if x.size != 3:
        raise DimensionError(f"tetrablock points have length 3, got {x.size}")
    x1, x2, x3 = (complex(v) for v in x)
    lhs = abs(x1) ** 2 + abs(x2) ** 2 + 2.0 * abs(x1 * x2 - x3)
    return lhs < 1.0 + abs(x3) ** 2 and abs(x3) < 1.0


def lambda_map(z) -> np.ndarray:
    """Square the first coordinate: ``(z1, z') -> (z1^2, z')``."""
    z = as_point(z)
    out = z.copy()
    out[0] = z[0] * z[0]
    return out


def lambda_lift(w, branch: int = +1) -> np.ndarray:
    """Right inverse of :func:`lambda_map`.

    Returns ``(s, w')`` with ``s = branch * principal_sqrt(w1)``.  The
    imaginary part of ``w1`` is canonicalized so that ``-0.0`` does not flip
    the branch cut.
    """
    w = as_point(w)
    if branch not in (+1, -1):
        raise ValueError(f"branch must be +1 or -1, got {branch}")
    w1 = complex(w[0])
    if w1.imag == 0.0:
        w1 = complex(w1.real, 0.0)
    out = w.copy()
    out[0] = branch * np.sqrt(w1)
    return out


def project_pi(z) -> np.ndarray:
    """Drop the last coordinate; maps LHat_n into LHat_{n-1}."""
    z = as_point(z)
    if z.size < 2:
        raise DimensionError("projection needs length >= 2")
    return z[:-1].copy()


def embed_q(z) -> np.ndarray:
    """Append a zero coordinate; maps LHat_{n-1} into LHat_n."""
    z = as_point(z)
    return np.concatenate([z, [0.0 + 0.0j]])


def point_to_json(z) -> list:
    """Serialize a point as a list of [re, im] pairs."""
    z = as_point(z)
    return [[float(v.real), float(v.imag)] for v in z]


def point_from_json(data) -> np.ndarray:
    """Parse a point from a list of [re, im] pairs."""
    if not isinstance(data, (list, tuple)) or len(data) == 0:
        raise DimensionError("point JSON must be a nonempty list of [re, im] pairs")
    coords = []
    for item in data:
        if not isinstance(item, (list, tuple)) or len(item) != 2:
            raise DimensionError(f"expected [re, im] pair, got {item!r}")
        coords.append(complex(float(item[0]), float(item[1])))
    return as_point(coords)
