"""Moebius automorphisms of the Lie ball and their descent to LHat_n.

The group ``G(n)`` consists of real ``(n+2) x (n+2)`` block matrices
``[[A, B], [C, D]]`` preserving the indefinite form ``diag(Id_n, -Id_2)``
with ``det D > 0``.  Such a matrix acts on the Lie ball by

    Psi_g(z) = (A z + B W(z)) / ((1, i) . (C z + D W(z))),

where ``W(z) = (  (q + 1)/2,  i (q - 1)/2 )`` and ``q = sum z_j^2``.  The
action is the projective-linear action on the quadric through the lift
``z -> (z, W(z))``, normalized back to the affine chart ``w1 + i w2 = 1``;
this makes the composition law ``Psi_g . Psi_h = Psi_{g h}`` automatic.

Automorphisms of ``LHat_n`` arise by descent: for ``g`` in ``G(n-1)`` the
lifted map ``Psi_{kappa(g)}`` commutes with the deck involution of the
squared-coordinate covering, so it induces a well-defined map downstairs.

The closed-form point normalization uses the two commuting SU(1,1) factors
inside the ``G(2)`` block acting on a chosen pair of coordinates: in the
variables ``xi_pm = s1 +- i s2``, ``om_pm = w1 +- i w2`` each factor acts as
a disc Moebius map, and the parameters killing both target coordinates
solve one complex quadratic.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .domains import (
    DimensionError,
    DomainError,
    as_point,
    gauge_p,
    in_lhat,
    in_tetrablock,
    lambda_lift,
    lambda_map,
    point_to_json,
    symmetric_square,
)
from .rotations import Frame, partial_normal_frame

__all__ = [
    "SingularityError",
    "NormalizationError",
    "GroupElement",
    "LhatAutomorphism",
    "TetraMobius",
    "w_vector",
    "apply_mobius",
    "kappa_lift",
    "kappa_end",
    "descend",
    "extend_lhat",
    "rotation_element",
    "phase_element",
    "factor_boosts_element",
    "lie_ball_to_origin",
    "tetra_from_lhat3",
    "tetra_to_lhat3",
    "tetra_mobius_apply",
    "tetra_mobius_inverse",
    "normalize_tetra_point",
    "normalize_point_lhat",
    "normalize_pair",
]

#: entrywise tolerance for the indefinite-isometry identity
GROUP_TOL = 1e-10
#: denominators below this signal an invalid element or an exterior point
SINGULARITY_TOL = 1e-13


class SingularityError(ArithmeticError):
    """A Moebius denominator vanished (invalid element or exterior point)."""


class NormalizationError(RuntimeError):
    """Point/pair normalization failed; carries the residual."""

    def __init__(self, message: str, residual: float = float("nan")):
        super().__init__(message)
        self.residual = residual


def _j_matrix(n: int) -> np.ndarray:
    j = np.eye(n + 2)
    j[n, n] = -1.0
    j[n + 1, n + 1] = -1.0
    return j


@dataclass(frozen=True)
class GroupElement:
    """Element of ``G(n)``: real (n+2)x(n+2) J-isometry with ``det D > 0``."""

    n: int
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.shape != (self.n + 2, self.n + 2):
            raise DimensionError(
                f"G({self.n}) matrices are {(self.n + 2, self.n + 2)}, got {m.shape}"
            )
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    # -- block views ---------------------------------------------------
    @property
    def A(self) -> np.ndarray:
        return self.matrix[: self.n, : self.n]

    @property
    def B(self) -> np.ndarray:
        return self.matrix[: self.n, self.n :]

    @property
    def C(self) -> np.ndarray:
        return self.matrix[self.n :, : self.n]

    @property
    def D(self) -> np.ndarray:
        return self.matrix[self.n :, self.n :]

    # -- group structure -------------------------------------------------
    @staticmethod
    def identity(n: int) -> "GroupElement":
        return GroupElement(n, np.eye(n + 2))

    @staticmethod
    def from_blocks(A, B, C, D) -> "GroupElement":
        A = np.atleast_2d(np.asarray(A, dtype=float))
        n = A.shape[0]
        top = np.hstack([A, np.reshape(B, (n, 2))])
        bot = np.hstack([np.reshape(C, (2, n)), np.reshape(D, (2, 2))])
        return GroupElement(n, np.vstack([top, bot]))

    def compose(self, other: "GroupElement") -> "GroupElement":
        """Matrix product; acts as ``Psi_self . Psi_other``."""
        if self.n != other.n:
            raise DimensionError("cannot compose elements of different G(n)")
        return GroupElement(self.n, self.matrix @ other.matrix)

    def inverse(self) -> "GroupElement":
        j = _j_matrix(self.n)
        return GroupElement(self.n, j @ self.matrix.T @ j)

    def isometry_defect(self) -> float:
        """Max entrywise deviation of ``g^T J g`` from ``J``."""
        j = _j_matrix(self.n)
        return float(np.max(np.abs(self.matrix.T @ j @ self.matrix - j)))

    def is_valid(self, tol: float = GROUP_TOL) -> bool:
        return (
            np.all(np.isfinite(self.matrix))
            and self.isometry_defect() <= tol
            and np.linalg.det(self.D) > 0.0
        )

    def validate(self, tol: float = GROUP_TOL) -> "GroupElement":
        if not self.is_valid(tol):
            raise ValueError(
                f"matrix is not a valid G({self.n}) element "
                f"(isometry defect {self.isometry_defect():.3e}, det D "
                f"{np.linalg.det(self.D):.3e})"
            )
        return self

    def to_json(self) -> dict:
        return {"kind": "group_element", "n": self.n, "matrix": self.matrix.tolist()}

    @staticmethod
    def from_json(data: dict) -> "GroupElement":
        return GroupElement(int(data["n"]), np.asarray(data["matrix"], dtype=float))


def w_vector(z) -> np.ndarray:
    """The quadric lift tail ``((q + 1)/2, i (q - 1)/2)`` with ``q = sum z_j^2``."""
    q = symmetric_square(z)
    return np.array([0.5 * (q + 1.0), 0.5j * (q - 1.0)], dtype=complex)


def apply_mobius(g: GroupElement, z) -> np.ndarray:
    """Evaluate ``Psi_g`` at a point of the closed Lie ball."""
    z = as_point(z)
    if z.size != g.n:
        raise DimensionError(f"element acts on C^{g.n}, point has length {z.size}")
    if gauge_p(z) > 1.0 + 1e-9:
        raise DomainError("point lies outside the closed Lie ball")
    w = w_vector(z)
    num = g.A @ z + g.B @ w
    den_pair = g.C @ z + g.D @ w
    s = complex(den_pair[0] + 1j * den_pair[1])
    if abs(s) < SINGULARITY_TOL:
        raise SingularityError(f"Moebius denominator vanished (|s| = {abs(s):.3e})")
    return num / s


def kappa_lift(g: GroupElement) -> GroupElement:
    """Prepend a passive coordinate: the homomorphism ``G(n) -> G(n+1)``."""
    n = g.n
    m = np.zeros((n + 3, n + 3))
    m[0, 0] = 1.0
    m[1:, 1:] = g.matrix
    return GroupElement(n + 1, m)


def kappa_end(g: GroupElement) -> GroupElement:
    """Append a passive coordinate instead; conjugate of :func:`kappa_lift`."""
    n = g.n
    m = np.zeros((n + 3, n + 3))
    m[:n, :n] = g.A
    m[n, n] = 1.0
    m[:n, n + 1 :] = g.B
    m[n + 1 :, :n] = g.C
    m[n + 1 :, n + 1 :] = g.D
    return GroupElement(n + 1, m)


def rotation_element(A) -> GroupElement:
    """Linear element ``Psi_g(z) = A z`` for real orthogonal ``A``."""
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    m = np.eye(n + 2)
    m[:n, :n] = A
    return GroupElement(n, m)


def phase_element(n: int, theta: float) -> GroupElement:
    """Element with ``Psi_g(z) = exp(-i theta) z`` (a rotation in the D block)."""
    m = np.eye(n + 2)
    c, s = np.cos(theta), np.sin(theta)
    m[n : n + 2, n : n + 2] = [[c, -s], [s, c]]
    return GroupElement(n, m)


def _factor_plus_matrix(alpha: complex, beta: complex) -> np.ndarray:
    """SU(1,1) action on the ``(xi_plus, om_plus)`` projective pair."""
    a1, a2 = alpha.real, alpha.imag
    b1, b2 = beta.real, beta.imag
    return np.array(
        [
            [a1, -a2, b1, -b2],
            [a2, a1, b2, b1],
            [b1, b2, a1, a2],
            [-b2, b1, -a2, a1],
        ]
    )


def _factor_minus_matrix(a: complex, b: complex) -> np.ndarray:
    """SU(1,1) action on the ``(xi_minus, om_plus)`` projective pair."""
    a1, a2 = a.real, a.imag
    b1, b2 = b.real, b.imag
    return np.array(
        [
            [a1, -a2, b1, b2],
            [a2, a1, b2, -b1],
            [b1, b2, a1, -a2],
            [b2, -b1, a2, a1],
        ]
    )


def factor_boosts_element(n: int, slots: tuple[int, int], u: complex, v: complex) -> GroupElement:
    """Element moving chart values ``xi_pm`` of the coordinate pair ``slots``.

    ``u`` and ``v`` are the disc-Moebius parameters of the two SU(1,1)
    factors (both of modulus < 1); the returned element acts as the
    composition "factor-minus after factor-plus" on the ``slots``
    coordinates and the two w slots, and fixes all other coordinates.
    """
    i, j = slots
    if not (0 <= i < j < n):
        raise DimensionError(f"invalid slot pair {slots} for dimension {n}")
    if abs(u) >= 1.0 or abs(v) >= 1.0:
        raise NormalizationError(
            f"boost parameters must lie in the open disc (|u|={abs(u):.6f}, |v|={abs(v):.6f})",
            residual=max(abs(u), abs(v)),
        )
    alpha = 1.0 / np.sqrt(1.0 - abs(u) ** 2)
    beta = u * alpha
    a = 1.0 / np.sqrt(1.0 - abs(v) ** 2)
    b = v * a
    t = _factor_minus_matrix(a, b) @ _factor_plus_matrix(alpha, beta)
    idx = [i, j, n, n + 1]
    m = np.eye(n + 2)
    m[np.ix_(idx, idx)] = t
    return GroupElement(n, m)


def _kill_parameters(xi_p: complex, xi_m: complex, om_m: complex) -> tuple[complex, complex]:
    """Boost parameters (u, v) sending chart data ``(xi_p, xi_m, 1, om_m)``
    to ``xi`` components zero.

    ``v`` solves ``kappa v^2 + B v + conj(kappa) = 0`` with
    ``kappa = xi_m - om_m conj(xi_p)`` and
    ``B = 1 + |xi_m|^2 - |xi_p|^2 - |om_m|^2``; interior data yields a real
    discriminant and exactly one root in the closed unit disc.
    """
    kap = xi_m - om_m * np.conj(xi_p)
    bb = 1.0 + abs(xi_m) ** 2 - abs(xi_p) ** 2 - abs(om_m) ** 2
    if bb <= 0.0:
        raise NormalizationError(
            f"normalization quadratic degenerate (B = {bb:.3e}); point not interior",
            residual=abs(bb),
        )
    disc = bb * bb - 4.0 * abs(kap) ** 2
    if disc < 0.0:
        if disc < -1e-12 * bb * bb:
            raise NormalizationError(
                f"normalization discriminant negative ({disc:.3e}); point not interior",
                residual=-disc,
            )
        disc = 0.0
    v = -2.0 * np.conj(kap) / (bb + np.sqrt(disc))
    u = -(xi_p + v * om_m) / (1.0 + v * xi_m)
    return complex(u), complex(v)


def lie_ball_to_origin(z) -> GroupElement:
    """Element ``g`` with ``Psi_g(z) = 0`` for ``z`` in the open Lie ball.

    Construction: a rotation frame carries ``z`` to ``(a, i b, 0, ..., 0)``;
    in the bidisc chart of the first two coordinates the point is
    ``(a - b, a + b)``, and the two factor boosts pull both chart values
    to zero.
    """
    z = as_point(z)
    n = z.size
    if n < 2:
        raise DimensionError("origin maps are implemented for dimension >= 2")
    if gauge_p(z) >= 1.0:
        raise DomainError("point lies outside the open Lie ball")
    from .rotations import normal_frame  # local import keeps module load light

    fr = normal_frame(z)
    g_rot = rotation_element(fr.A).compose(phase_element(n, -float(np.angle(fr.eta))))
    nf = fr.eta * (fr.A @ z)
    xi_p = complex(nf[0] + 1j * nf[1])
    xi_m = complex(nf[0] - 1j * nf[1])
    om_m = complex(symmetric_square(nf))
    u, v = _kill_parameters(xi_p, xi_m, om_m)
    g_boost = factor_boosts_element(n, (0, 1), u, v)
    return g_boost.compose(g_rot)


@dataclass(frozen=True)
class LhatAutomorphism:
    """Automorphism of ``LHat_n`` descended from ``g`` in ``G(n-1)``.

    Evaluation lifts a point through the principal square root, applies
    ``Psi_{kappa(g)}`` and squares the first coordinate again; the result
    does not depend on the branch.
    """

    g: GroupElement
    kappa_g: GroupElement = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "kappa_g", kappa_lift(self.g))

    @property
    def n(self) -> int:
        """Dimension of the LHat domain acted upon."""
        return self.g.n + 1

    def __call__(self, w, branch: int = +1) -> np.ndarray:
        w = as_point(w)
        if w.size != self.n:
            raise DimensionError(f"automorphism acts on LHat_{self.n}, point has length {w.size}")
        zeta = lambda_lift(w, branch)
        return lambda_map(apply_mobius(self.kappa_g, zeta))

    def inverse(self) -> "LhatAutomorphism":
        return LhatAutomorphism(self.g.inverse())

    def compose(self, other: "LhatAutomorphism") -> "LhatAutomorphism":
        return LhatAutomorphism(self.g.compose(other.g))

    @staticmethod
    def identity(n: int) -> "LhatAutomorphism":
        return LhatAutomorphism(GroupElement.identity(n - 1))

    def to_json(self) -> dict:
        return {"kind": "lhat_automorphism", "n": self.n, "g": self.g.matrix.tolist()}

    @staticmethod
    def from_json(data: dict) -> "LhatAutomorphism":
        mat = np.asarray(data["g"], dtype=float)
        return LhatAutomorphism(GroupElement(mat.shape[0] - 2, mat))


def descend(g: GroupElement) -> LhatAutomorphism:
    """Automorphism of ``LHat_{n+1}`` induced by ``g`` in ``G(n)``."""
    return LhatAutomorphism(g)


def extend_lhat(phi: LhatAutomorphism) -> LhatAutomorphism:
    """Extension to one dimension higher fixing the appended coordinate,
    ``phi_ext(z, 0) = (phi(z), 0)``."""
    return LhatAutomorphism(kappa_end(phi.g))


# ---------------------------------------------------------------------------
# tetrablock transfer and its Moebius family
# ---------------------------------------------------------------------------


def tetra_from_lhat3(z) -> np.ndarray:
    """Biholomorphism LHat_3 -> tetrablock:
    ``(z1, z2, z3) -> (z2 + i z3, z2 - i z3, z1 + z2^2 + z3^2)``."""
    z = as_point(z)
    if z.size != 3:
        raise DimensionError(f"expected length 3, got {z.size}")
    z1, z2, z3 = (complex(c) for c in z)
    return np.array([z2 + 1j * z3, z2 - 1j * z3, z1 + z2 * z2 + z3 * z3], dtype=complex)


def tetra_to_lhat3(x) -> np.ndarray:
    """Inverse of :func:`tetra_from_lhat3`."""
    x = as_point(x)
    if x.size != 3:
        raise DimensionError(f"expected length 3, got {x.size}")
    x1, x2, x3 = (complex(c) for c in x)
    return np.array(
        [x3 - x1 * x2, 0.5 * (x1 + x2), (x1 - x2) / 2j],
        dtype=complex,
    )


@dataclass(frozen=True)
class TetraMobius:
    """Tetrablock self-map: diagonal matrix Moebius, optional swap, scaling.

    Applies, in order: the map induced on coordinates by
    ``M -> (M - B)(Id - B* M)^per`` with ``B = diag(beta1, beta2)``, then the
    coordinate swap ``(x1, x2, x3) -> (x2, x1, x3)`` when ``flip`` is set,
    then the scaling ``(eta1 x1, eta2 x2, eta1 eta2 x3)``.
    """

    beta1: complex = 0.0 + 0.0j
    beta2: complex = 0.0 + 0.0j
    eta1: complex = 1.0 + 0.0j
    eta2: complex = 1.0 + 0.0j
    flip: bool = False

    def __post_init__(self):
        if max(abs(self.beta1), abs(self.beta2)) >= 1.0:
            raise ValueError("Moebius parameters must lie in the open unit disc")
        for eta in (self.eta1, self.eta2):
            if abs(abs(eta) - 1.0) > 1e-12:
                raise ValueError("scaling factors must be unimodular")

    def __call__(self, x) -> np.ndarray:
        return tetra_mobius_apply(self, x)

    def inverse(self) -> "TetraMobius":
        return tetra_mobius_inverse(self)

    def to_json(self) -> dict:
        return {
            "kind": "tetra_mobius",
            "beta": point_to_json([self.beta1, self.beta2]),
            "eta": point_to_json([self.eta1, self.eta2]),
            "flip": self.flip,
        }


def tetra_mobius_apply(m: TetraMobius, x) -> np.ndarray:
    """Evaluate a :class:`TetraMobius` at a point of the closed tetrablock."""
    x = as_point(x)
    if x.size != 3:
        raise DimensionError(f"expected length 3, got {x.size}")
    x1, x2, x3 = (complex(c) for c in x)
    b1, b2 = m.beta1, m.beta2
    det_term = x1 * x2 - x3
    delta = (1.0 - np.conj(b1) * x1) * (1.0 - np.conj(b2) * x2) - np.conj(b1) * np.conj(
        b2
    ) * det_term
    if abs(delta) < SINGULARITY_TOL:
        raise SingularityError(f"tetrablock Moebius denominator vanished (|delta| = {abs(delta):.3e})")
    y1 = ((x1 - b1) * (1.0 - np.conj(b2) * x2) + np.conj(b2) * det_term) / delta
    y2 = ((x2 - b2) * (1.0 - np.conj(b1) * x1) + np.conj(b1) * det_term) / delta
    y3 = ((x1 - b1) * (x2 - b2) - det_term) / delta
    if m.flip:
        y1, y2 = y2, y1
    return np.array([m.eta1 * y1, m.eta2 * y2, m.eta1 * m.eta2 * y3], dtype=complex)


def tetra_mobius_inverse(m: TetraMobius) -> TetraMobius:
    """Parameters of the inverse map, in the same canonical factor order."""
    if not m.flip:
        return TetraMobius(
            beta1=-m.eta1 * m.beta1,
            beta2=-m.eta2 * m.beta2,
            eta1=np.conj(m.eta1),
            eta2=np.conj(m.eta2),
            flip=False,
        )
    return TetraMobius(
        beta1=-m.eta1 * m.beta2,
        beta2=-m.eta2 * m.beta1,
        eta1=np.conj(m.eta2),
        eta2=np.conj(m.eta1),
        flip=True,
    )


def _tetra_kill_residual(beta: np.ndarray, x1, x2, det_term) -> np.ndarray:
    b1, b2 = beta
    e1 = (x1 - b1) * (1.0 - np.conj(b2) * x2) + np.conj(b2) * det_term
    e2 = (x2 - b2) * (1.0 - np.conj(b1) * x1) + np.conj(b1) * det_term
    return np.array([e1, e2], dtype=complex)


def _tetra_kill_newton(x1, x2, det_term, beta0, max_iter=100, tol=1e-12):
    """Damped Newton on the two complex kill equations (Wirtinger Jacobian)."""
    beta = np.asarray(beta0, dtype=complex).copy()
    res = _tetra_kill_residual(beta, x1, x2, det_term)
    for _ in range(max_iter):
        if np.max(np.abs(res)) < tol:
            return beta, float(np.max(np.abs(res)))
        b1, b2 = beta
        # holomorphic / antiholomorphic derivatives of (e1, e2) in (b1, b2)
        d_e1_b1 = -(1.0 - np.conj(b2) * x2)
        d_e1_cb2 = -(x1 - b1) * x2 + det_term
        d_e2_b2 = -(1.0 - np.conj(b1) * x1)
        d_e2_cb1 = -(x2 - b2) * x1 + det_term
        jac = np.zeros((4, 4))

        def fill(row, d_hol_1, d_anti_1, d_hol_2, d_anti_2):
            # rows: Re e, Im e; columns: Re b1, Im b1, Re b2, Im b2
            for col, (dh, da) in enumerate(((d_hol_1, d_anti_1), (d_hol_2, d_anti_2))):
                jac[row, 2 * col] = (dh + da).real
                jac[row, 2 * col + 1] = (1j * (dh - da)).real
                jac[row + 1, 2 * col] = (dh + da).imag
                jac[row + 1, 2 * col + 1] = (1j * (dh - da)).imag

        fill(0, d_e1_b1, 0.0, 0.0, d_e1_cb2)
        fill(2, 0.0, d_e2_cb1, d_e2_b2, 0.0)
        rhs = -np.array([res[0].real, res[0].imag, res[1].real, res[1].imag])
        try:
            step = np.linalg.solve(jac, rhs)
        except np.linalg.LinAlgError:
            break
        step_c = np.array([step[0] + 1j * step[1], step[2] + 1j * step[3]])
        lam = 1.0
        base = np.max(np.abs(res))
        for _ in range(30):
            cand = beta + lam * step_c
            if np.max(np.abs(cand)) < 1.0:
                cand_res = _tetra_kill_residual(cand, x1, x2, det_term)
                if np.max(np.abs(cand_res)) < base:
                    beta, res = cand, cand_res
                    break
            lam *= 0.5
        else:
            break
    return beta, float(np.max(np.abs(res)))


def normalize_tetra_point(x, seed: int = 0) -> tuple[TetraMobius, float]:
    """Tetrablock Moebius map carrying ``x`` to the normal form ``(0, 0, r)``.

    The Moebius parameters come from a closed-form quadratic (the two kill
    equations reduce to a fixed point of a disc Moebius map), polished by
    damped Newton; random reseeding inside the bidisc is the fallback.
    """
    x = as_point(x)
    if not in_tetrablock(x):
        raise DomainError("point lies outside the tetrablock")
    x1, x2, x3 = (complex(c) for c in x)
    det_term = x1 * x2 - x3

    kap = x2 - np.conj(x1) * x3
    bb = 1.0 + abs(x2) ** 2 - abs(x1) ** 2 - abs(x3) ** 2
    seeds = []
    if bb > 0.0:
        disc = max(0.0, bb * bb - 4.0 * abs(kap) ** 2)
        beta2 = 2.0 * kap / (bb + np.sqrt(disc))
        den = 1.0 - np.conj(beta2) * x2
        if abs(den) > SINGULARITY_TOL and abs(beta2) < 1.0:
            beta1 = (x1 - np.conj(beta2) * x3) / den
            if abs(beta1) < 1.0:
                seeds.append(np.array([beta1, beta2], dtype=complex))
    seeds.append(np.array([x1, x2], dtype=complex))
    rng = np.random.default_rng(seed)
    for _ in range(8):
        raw = rng.uniform(-1, 1, size=4)
        seeds.append(0.8 * np.array([raw[0] + 1j * raw[1], raw[2] + 1j * raw[3]]) / 2.0)

    best = None
    for s in seeds:
        if np.max(np.abs(s)) >= 1.0:
            continue
        beta, res = _tetra_kill_newton(x1, x2, det_term, s)
        if best is None or res < best[1]:
            best = (beta, res)
        if res < 1e-12:
            break
    if best is None or best[1] > 1e-9:
        residual = float("nan") if best is None else best[1]
        raise NormalizationError(
            f"tetrablock normalization failed to converge (residual {residual:.3e})",
            residual=residual,
        )
    beta = best[0]
    m0 = TetraMobius(beta1=complex(beta[0]), beta2=complex(beta[1]))
    image = tetra_mobius_apply(m0, x)
    r = float(abs(image[2]))
    if r > SINGULARITY_TOL:
        eta1 = complex(np.conj(image[2]) / r)
    else:
        eta1 = 1.0 + 0.0j
    m = TetraMobius(beta1=complex(beta[0]), beta2=complex(beta[1]), eta1=eta1, eta2=1.0 + 0.0j)
    return m, r


# ---------------------------------------------------------------------------
# point and pair normalization in LHat_n
# ---------------------------------------------------------------------------


def normalize_point_lhat(z) -> tuple[LhatAutomorphism, float]:
    """Automorphism of ``LHat_n`` carrying ``z`` to ``(rho, 0, ..., 0)``.

    A tail rotation reduces to three coordinates, the two factor boosts of
    the ``G(2)`` block kill the second and third coordinate of the lift,
    and a final phase makes the image coordinate real nonnegative.  Points
    with ``z1 = 0`` (the orbit of the origin) give ``rho = 0``.
    """
    z = as_point(z)
    n = z.size
    if n < 3:
        raise DimensionError("point normalization is implemented for dimension >= 3")
    if not in_lhat(z):
        raise DomainError("point lies outside LHat_n")

    frame, _ = partial_normal_frame(z, 1)
    g_rot = rotation_element(frame.A[1:, 1:])
    z_rot = frame.A @ z

    c, d = complex(z_rot[1]), complex(z_rot[2])
    xi_p = c + 1j * d
    xi_m = c - 1j * d
    om_m = complex(z_rot[0]) + c * c + d * d
    u, v = _kill_parameters(xi_p, xi_m, om_m)
    g_boost = factor_boosts_element(n - 1, (0, 1), u, v)
    g0 = g_boost.compose(g_rot)

    first = LhatAutomorphism(g0)(z)[0]
    rho = float(abs(first))
    theta = 0.5 * float(np.angle(first)) if rho > 1e-15 else 0.0
    g = phase_element(n - 1, theta).compose(g0)
    phi = LhatAutomorphism(g)

    image = phi(z)
    target = np.zeros(n, dtype=complex)
    target[0] = rho
    residual = float(np.max(np.abs(image - target)))
    if residual > 1e-8:
        raise NormalizationError(
            f"point normalization residual too large ({residual:.3e})", residual=residual
        )
    return phi, rho


def normalize_pair(z, w) -> tuple[LhatAutomorphism, np.ndarray, np.ndarray]:
    """One automorphism sending ``z`` to ``(rho, 0, ...)`` and ``w`` into
    the three-coordinate slice ``LHat_3 x {0}``."""
    z = as_point(z)
    w = as_point(w)
    n = z.size
    if w.size != n:
        raise DimensionError("pair points must share a dimension")
    if n < 3:
        raise DimensionError("pair normalization is implemented for dimension >= 3")
    if not in_lhat(w):
        raise DomainError("second point lies outside LHat_n")

    phi, _rho = normalize_point_lhat(z)
    w_mid = phi(w)
    frame, _ = partial_normal_frame(w_mid, 1)
    g_full = rotation_element(frame.A[1:, 1:]).compose(phi.g)
    phi_full = LhatAutomorphism(g_full)
    return phi_full, phi_full(z), phi_full(w)
