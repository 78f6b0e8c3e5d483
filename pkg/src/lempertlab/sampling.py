"""Deterministic random point generators for the three domains.

Two strategies:

* literal rejection sampling from the unit polydisc (used for the
  verification experiments at moderate dimension, where acceptance rates
  are workable);
* a gauge-directional sampler that draws a direction in the polydisc,
  scales it to the gauge sphere and applies a radial factor -- exact,
  rejection free, and the only practical option for dimension > 6.
"""

from __future__ import annotations

import numpy as np

from .domains import as_point

__all__ = [
    "polydisc_points",
    "lieball_gauge_batch",
    "lhat_gauge_batch",
    "tetra_member_batch",
    "random_lieball_points",
    "random_lhat_points",
    "random_tetra_points",
    "random_lhat_points_rejection",
]

#: switch from rejection to directional sampling above this dimension
_REJECTION_MAX_N = 6


def polydisc_points(rng: np.random.Generator, n: int, count: int) -> np.ndarray:
    """Uniform samples from the unit polydisc, shape (count, n)."""
    r = np.sqrt(rng.uniform(0.0, 1.0, (count, n)))
    th = rng.uniform(0.0, 2.0 * np.pi, (count, n))
    return r * np.exp(1j * th)


def lieball_gauge_batch(Z: np.ndarray) -> np.ndarray:
    """Vectorized gauge over rows of ``Z``."""
    n2 = np.sum(np.abs(Z) ** 2, axis=1)
    q = np.abs(np.sum(Z * Z, axis=1))
    a = np.sqrt(np.maximum(0.0, 0.5 * (n2 + q)))
    b = np.sqrt(np.maximum(0.0, 0.5 * (n2 - q)))
    return a + b


def lhat_gauge_batch(W: np.ndarray) -> np.ndarray:
    """Vectorized lift gauge over rows of ``W``."""
    Z = W.copy()
    Z[:, 0] = np.sqrt(Z[:, 0])
    return lieball_gauge_batch(Z)


def tetra_member_batch(X: np.ndarray) -> np.ndarray:
    """Vectorized tetrablock membership over rows of ``X``."""
    lhs = (
        np.abs(X[:, 0]) ** 2
        + np.abs(X[:, 1]) ** 2
        + 2.0 * np.abs(X[:, 0] * X[:, 1] - X[:, 2])
    )
    return (lhs < 1.0 + np.abs(X[:, 2]) ** 2) & (np.abs(X[:, 2]) < 1.0)


def random_lieball_points(rng: np.random.Generator, n: int, count: int) -> np.ndarray:
    """Points of the open Lie ball via direction/radius splitting.

    Directions are polydisc draws scaled to gauge one; radii follow the
    ball-volume law ``U^(1/2n)`` so samples concentrate like a uniform
    ball's would.
    """
    Z = polydisc_points(rng, n, count)
    g = lieball_gauge_batch(Z)
    g = np.where(g > 0.0, g, 1.0)
    radii = rng.uniform(0.0, 1.0, count) ** (1.0 / (2.0 * n))
    return Z * (radii / g)[:, None]


def random_lhat_points(rng: np.random.Generator, n: int, count: int) -> np.ndarray:
    """Points of LHat_n: images of Lie-ball samples under ``z1 -> z1^2``."""
    Z = random_lieball_points(rng, n, count)
    Z[:, 0] = Z[:, 0] ** 2
    return Z


def random_tetra_points(rng: np.random.Generator, count: int) -> np.ndarray:
    """Tetrablock samples: transfer of LHat_3 samples through the
    coordinate biholomorphism."""
    Z = random_lhat_points(rng, 3, count)
    X = np.empty_like(Z)
    X[:, 0] = Z[:, 1] + 1j * Z[:, 2]
    X[:, 1] = Z[:, 1] - 1j * Z[:, 2]
    X[:, 2] = Z[:, 0] + Z[:, 1] ** 2 + Z[:, 2] ** 2
    return X


def random_lhat_points_rejection(
    rng: np.random.Generator, n: int, count: int, batch: int = 8192
) -> np.ndarray:
    """Literal rejection sampling from the unit polydisc with the LHat
    membership as predicate.

    Falls back to the directional sampler above dimension 6, where the
    acceptance rate makes rejection impractical.
    """
    if n > _REJECTION_MAX_N:
        return random_lhat_points(rng, n, count)
    out = []
    have = 0
    while have < count:
        Z = polydisc_points(rng, n, batch)
        keep = Z[lhat_gauge_batch(Z) < 1.0]
        if keep.size:
            out.append(keep)
            have += keep.shape[0]
    return np.vstack(out)[:count]


def as_rng(seed) -> np.random.Generator:
    """Accept a Generator or a seed."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def random_point(rng: np.random.Generator, kind: str, n: int) -> np.ndarray:
    """One sample of the given domain kind (``lieball``/``lhat``/``tetra``)."""
    if kind == "lieball":
        return as_point(random_lieball_points(rng, n, 1)[0])
    if kind == "lhat":
        return as_point(random_lhat_points(rng, n, 1)[0])
    if kind == "tetra":
        return as_point(random_tetra_points(rng, 1)[0])
    raise ValueError(f"unknown domain kind {kind!r}")
