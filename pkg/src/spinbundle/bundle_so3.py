"""The spin fiber bundle over the two-sphere of spin directions.

Points (omega, pi) with |omega| = |pi| = 1 and omega.pi = 0 form a copy of
the rotation group; the spin map omega x pi projects them onto the sphere,
and rotations in the (omega, pi) plane move along the fiber.  Gauge freedom
of the auxiliary sector is tracked by a symmetric 2x2 matrix of multipliers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ChartDomainError, DomainError, SurfaceError

Array = np.ndarray


def spin_map(omega, pi) -> Array:
    """Bundle projection: the composed spin vector S = omega x pi."""
    omega = np.asarray(omega, dtype=float)
    pi = np.asarray(pi, dtype=float)
    if omega.shape != (3,) or pi.shape != (3,):
        raise ValueError("spin_map expects two 3-vectors")
    return np.cross(omega, pi)


def _skew(a: Array) -> Array:
    return np.array([
        [0.0, -a[2], a[1]],
        [a[2], 0.0, -a[0]],
        [-a[1], a[0], 0.0],
    ])


def map_jacobian(omega, pi, kind: str = "so3") -> Array:
    """Jacobian of the bundle projection.

    kind="so3": S = omega x pi as a map R^6 -> R^3 (3-vectors in, rows S_i).
    kind="so13": the antisymmetric tensor 2(omega^mu pi^nu - omega^nu pi^mu)
    as a map R^8 -> R^6 (four-vectors in, rows ordered k1 k2 k3 j1 j2 j3).
    """
    omega = np.asarray(omega, dtype=float)
    pi = np.asarray(pi, dtype=float)
    if kind == "so3":
        if omega.shape != (3,) or pi.shape != (3,):
            raise ValueError("so3 map expects 3-vectors")
        return np.hstack([-_skew(pi), _skew(omega)])
    if kind == "so13":
        if omega.shape != (4,) or pi.shape != (4,):
            raise ValueError("so13 map expects four-vectors")
        rows = ((0, 1), (0, 2), (0, 3), (2, 3), (3, 1), (1, 2))
        jac = np.zeros((6, 8))
        for r, (mu, nu) in enumerate(rows):
            jac[r, mu] += 2.0 * pi[nu]
            jac[r, nu] -= 2.0 * pi[mu]
            jac[r, 4 + nu] += 2.0 * omega[mu]
            jac[r, 4 + mu] -= 2.0 * omega[nu]
        return jac
    raise ValueError(f"unknown map kind {kind!r}")


def jacobian_singular_values(omega, pi, kind: str = "so3") -> Array:
    return np.linalg.svd(map_jacobian(omega, pi, kind), compute_uv=False)


def jacobian_rank(omega, pi, kind: str = "so3", threshold: float = 1e-8) -> int:
    """Numerical rank of the bundle projection's Jacobian.

    Singular values below threshold * (largest singular value) count as zero.
    """
    sv = jacobian_singular_values(omega, pi, kind)
    if sv[0] == 0.0:
        return 0
    return int(np.sum(sv > threshold * sv[0]))


def surface_residuals(omega, pi) -> Array:
    """Residuals (omega^2 - 1, pi^2 - 1, omega.pi) of the normalized surface."""
    omega = np.asarray(omega, dtype=float)
    pi = np.asarray(pi, dtype=float)
    return np.array([
        float(np.dot(omega, omega)) - 1.0,
        float(np.dot(pi, pi)) - 1.0,
        float(np.dot(omega, pi)),
    ])


def normalize_to_surface(omega, pi):
    """Rescale omega and Gram-Schmidt pi so the pair lies exactly on the
    normalized surface."""
    omega = np.asarray(omega, dtype=float)
    pi = np.asarray(pi, dtype=float)
    wn = np.linalg.norm(omega)
    if wn < 1e-12:
        raise DomainError("cannot normalize: omega is (nearly) zero")
    w = omega / wn
    perp = pi - np.dot(pi, w) * w
    pn = np.linalg.norm(perp)
    if pn < 1e-12:
        raise DomainError("cannot normalize: pi is (nearly) parallel to omega")
    return w, perp / pn


def rotation_matrix(omega, pi, tol: float = 1e-9) -> Array:
    """Rotation matrix with rows (omega, pi, omega x pi).

    Requires a point of the normalized surface; use normalize_to_surface
    first for raw input.
    """
    omega = np.asarray(omega, dtype=float)
    pi = np.asarray(pi, dtype=float)
    residuals = surface_residuals(omega, pi)
    if np.max(np.abs(residuals)) > tol:
        raise SurfaceError(residuals,
                           "rotation_matrix needs a normalized surface point")
    return np.vstack([omega, pi, np.cross(omega, pi)])


def so2_action(omega, pi, beta: float):
    """Structure-group rotation in the (omega, pi) plane by the angle beta."""
    omega = np.asarray(omega, dtype=float)
    pi = np.asarray(pi, dtype=float)
    c, s = np.cos(beta), np.sin(beta)
    return c * omega + s * pi, -s * omega + c * pi


def local_coords(omega, pi, surface_tol: float = 1e-9,
                 chart_tol: float = 1e-12):
    """Adapted bundle coordinates (S1, S2, omega3) on the chart omega3 != 0."""
    omega = np.asarray(omega, dtype=float)
    pi = np.asarray(pi, dtype=float)
    residuals = surface_residuals(omega, pi)
    if np.max(np.abs(residuals)) > surface_tol:
        raise SurfaceError(residuals,
                           "local_coords needs a normalized surface point")
    if abs(omega[2]) <= chart_tol:
        raise ChartDomainError(
            "point lies outside the chart omega3 != 0")
    spin = np.cross(omega, pi)
    return np.array([spin[0], spin[1], omega[2]])


@dataclass(frozen=True)
class GaugeMatrix:
    """Symmetric 2x2 matrix of auxiliary-sector multipliers.

    Entries are [[1/phi, lambda3/2], [lambda3/2, lambda1/2]].  The multiplier
    lambda2 rides along unchanged: its transformation involves a time
    derivative of phi and is exercised through the dynamics, not as a
    pointwise map.
    """

    matrix: Array
    lambda2: float = 0.0

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.shape != (2, 2):
            raise ValueError("gauge matrix must be 2x2")
        m = 0.5 * (m + m.T)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "lambda2", float(self.lambda2))

    @classmethod
    def from_multipliers(cls, phi: float, lambda1: float, lambda3: float = 0.0,
                         lambda2: float = 0.0) -> "GaugeMatrix":
        phi = float(phi)
        if phi == 0.0:
            raise DomainError("gauge matrix needs phi != 0")
        return cls(matrix=np.array([[1.0 / phi, 0.5 * lambda3],
                                    [0.5 * lambda3, 0.5 * lambda1]]),
                   lambda2=lambda2)

    @property
    def phi(self) -> float:
        g00 = self.matrix[0, 0]
        if g00 == 0.0:
            raise DomainError("gauge matrix has 1/phi = 0; phi is undefined")
        return 1.0 / g00

    @property
    def lambda1(self) -> float:
        return 2.0 * self.matrix[1, 1]

    @property
    def lambda3(self) -> float:
        return 2.0 * self.matrix[0, 1]


def gauge_matrix_transform(g: GaugeMatrix, beta: float,
                           beta_dot: float) -> GaugeMatrix:
    """Action of the structure group on the gauge matrix:
    g' = K g K^T + (beta_dot / 2) I with K the rotation by beta."""
    c, s = np.cos(beta), np.sin(beta)
    K = np.array([[c, s], [-s, c]])
    moved = K @ g.matrix @ K.T + 0.5 * float(beta_dot) * np.eye(2)
    return GaugeMatrix(matrix=moved, lambda2=g.lambda2)


def sample_surface_point(rng, a: float = 1.0, b: float = 1.0):
    """Draw (omega, pi) uniformly-in-direction on the surface
    omega^2 = a^2, pi^2 = b^2, omega.pi = 0."""
    a = float(a)
    b = float(b)
    if a <= 0 or b <= 0:
        raise ValueError("surface radii must be positive")
    w = _random_unit(rng)
    while True:
        raw = _random_unit(rng)
        perp = raw - np.dot(raw, w) * w
        norm = np.linalg.norm(perp)
        if norm > 1e-6:
            break
    return a * w, b * perp / norm


def _random_unit(rng) -> Array:
    while True:
        v = rng.normal(size=3)
        norm = np.linalg.norm(v)
        if norm > 1e-12:
            return v / norm
