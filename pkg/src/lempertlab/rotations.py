"""Rotation normal forms for the Lie ball.

Every ``z`` in C^n (n >= 2) can be carried by a unimodular phase ``eta`` and
a real special orthogonal matrix ``A`` to the normal form
``(a(z), i b(z), 0, ..., 0)``.  The construction: pick ``eta`` with
``eta^2 <z, conj z> = |<z, conj z>|``, split ``eta z = u + i v`` into real
vectors (then ``u`` and ``v`` are orthogonal with norms ``a`` and ``b``) and
rotate ``u -> a e1``, ``v -> b e2``.

For n = 2 with negatively oriented ``(u, v)`` no special-orthogonal matrix
can produce ``+i b`` in the second slot, so the frame lands on
``(a, -i b)`` instead; from dimension 3 on a sign flip on an unused axis
restores the exact form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .domains import DimensionError, as_point, moduli, symmetric_square

__all__ = ["Frame", "apply_frame", "normal_frame", "partial_normal_frame"]

#: seeds with Gram-Schmidt residual below this are discarded as dependent
_GS_SEED_TOL = 1e-8
#: |<z, conj z>| below this leaves eta unconstrained; we pick eta = 1
_DEGENERATE_Q_TOL = 1e-14


@dataclass(frozen=True)
class Frame:
    """A unimodular phase and a real special orthogonal matrix.

    Acts on points by ``z -> eta * (A @ z)``; the action preserves the
    gauge, the Hermitian norm and ``|sum z_j^2|``.
    """

    eta: complex
    A: np.ndarray

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float)
        A.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "eta", complex(self.eta))

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @staticmethod
    def identity(n: int) -> "Frame":
        return Frame(1.0 + 0.0j, np.eye(n))


def apply_frame(frame: Frame, z) -> np.ndarray:
    """Apply ``z -> eta * (A @ z)``."""
    z = as_point(z)
    if z.size != frame.n:
        raise DimensionError(f"frame is {frame.n}-dimensional, point has length {z.size}")
    return frame.eta * (frame.A @ z)


def _canonical_eta(q: complex) -> complex:
    """Phase with ``eta^2 q = |q|``, argument normalized into [0, pi)."""
    if abs(q) < _DEGENERATE_Q_TOL:
        return 1.0 + 0.0j
    eta = np.exp(-0.5j * np.angle(q))
    if not 0.0 <= np.angle(eta) < np.pi - 1e-15:
        eta = -eta
    # angle can land exactly at -pi/+pi boundaries; renormalize once more
    if np.angle(eta) < 0.0 or np.angle(eta) >= np.pi:
        eta = -eta
    return complex(eta)


def _complete_orthonormal(rows: list[np.ndarray], n: int) -> np.ndarray:
    """Extend ``rows`` (orthonormal) to an n x n orthogonal matrix.

    Standard basis vectors are used as seeds; near-dependent seeds are
    discarded.  A final sign flip on the last row fixes the determinant.
    """
    basis = [r.copy() for r in rows]
    for j in range(n):
        if len(basis) == n:
            break
        w = np.zeros(n)
        w[j] = 1.0
        for r in basis:
            w = w - (w @ r) * r
        norm = np.linalg.norm(w)
        if norm > _GS_SEED_TOL:
            # second orthogonalization pass for numerical cleanliness
            for r in basis:
                w = w - (w @ r) * r
            basis.append(w / np.linalg.norm(w))
    if len(basis) != n:
        raise RuntimeError("orthonormal completion failed to produce a full basis")
    A = np.array(basis)
    if np.linalg.det(A) < 0.0:
        A[-1, :] = -A[-1, :]
    return A


def normal_frame(z) -> Frame:
    """Frame carrying ``z`` to ``(a(z), i b(z), 0, ..., 0)``.

    For ``z = 0`` the identity frame is returned.  See the module note for
    the n = 2 orientation caveat.
    """
    z = as_point(z)
    n = z.size
    if n < 2:
        raise DimensionError("normal form needs dimension >= 2")
    m = moduli(z)
    if m.a < 1e-300:
        return Frame.identity(n)

    eta = _canonical_eta(symmetric_square(z))
    zz = eta * z
    u = zz.real.astype(float)
    v = zz.imag.astype(float)

    rows = [u / np.linalg.norm(u)]
    if np.linalg.norm(v) > _GS_SEED_TOL * np.linalg.norm(u):
        r1 = rows[0]
        v2 = v - (v @ r1) * r1
        rows.append(v2 / np.linalg.norm(v2))
    A = _complete_orthonormal(rows, n)
    return Frame(eta, A)


def partial_normal_frame(z, k: int) -> tuple[Frame, complex]:
    """Rotate only the tail ``z' = (z_{k+1}, ..., z_n)`` into normal form.

    Returns ``(frame, tail_phase)``: the frame has ``eta = 1`` and a
    block-diagonal matrix fixing the first ``k`` coordinates, and
    ``frame`` applied to ``z`` gives
    ``(z_1, ..., z_k, tail_phase * a(z'), tail_phase * b(z') * i, 0, ...)``.
    """
    z = as_point(z)
    n = z.size
    if n < 3:
        raise DimensionError("partial normal form needs dimension >= 3")
    if not 1 <= k <= n - 2:
        raise DimensionError(f"k must satisfy 1 <= k <= n - 2, got k={k}, n={n}")
    tail_frame = normal_frame(z[k:])
    A = np.eye(n)
    A[k:, k:] = tail_frame.A
    # A z' = conj(eta') * (a, ib, 0, ...) since the frame action is eta' A z'
    return Frame(1.0 + 0.0j, A), complex(np.conj(tail_frame.eta))
