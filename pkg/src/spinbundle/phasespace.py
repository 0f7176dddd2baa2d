"""Canonical phase space, scalar observables, and a numeric Poisson bracket.

The particle-plus-spin model lives on a 14-dimensional phase space with
canonical pairs (x_i, p_i), (omega_i, pi_i) and (phi, pi_phi).  The covariant
spin sector uses a separate 8-dimensional space of four-vector pairs
(omega^mu, pi^mu) whose canonical bracket carries the Minkowski metric
diag(-1, +1, +1, +1).

Observables are scalar functions of the flattened coordinate vector with an
optional analytic gradient; the bracket engine falls back to central finite
differences when no gradient is supplied.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from .errors import GradientError

Array = np.ndarray

# Flat layout of the particle + spin phase space.
X = slice(0, 3)
P = slice(3, 6)
OMEGA = slice(6, 9)
PI = slice(9, 12)
PHI = 12
PI_PHI = 13
DIM = 14

_PARTICLE_LABELS = (
    "x1", "x2", "x3",
    "p1", "p2", "p3",
    "omega1", "omega2", "omega3",
    "pi1", "pi2", "pi3",
    "phi", "pi_phi",
)

_MINKOWSKI_LABELS = (
    "omega0", "omega1", "omega2", "omega3",
    "pi0", "pi1", "pi2", "pi3",
)


@dataclass(frozen=True)
class PhasePoint:
    """A labelled point of the 14-dimensional particle + spin phase space."""

    x: Array
    p: Array
    omega: Array
    pi: Array
    phi: float = 1.0
    pi_phi: float = 0.0

    def __post_init__(self):
        for name in ("x", "p", "omega", "pi"):
            value = np.array(getattr(self, name), dtype=float)
            if value.shape != (3,):
                raise ValueError(f"{name} must be a 3-vector, got shape {value.shape}")
            value.setflags(write=False)
            object.__setattr__(self, name, value)
        object.__setattr__(self, "phi", float(self.phi))
        object.__setattr__(self, "pi_phi", float(self.pi_phi))
        if not np.isfinite(self.as_array()).all():
            raise ValueError("phase-space point has non-finite entries")

    @classmethod
    def from_array(cls, z) -> "PhasePoint":
        z = np.asarray(z, dtype=float)
        if z.shape != (DIM,):
            raise ValueError(f"expected a flat vector of length {DIM}, got shape {z.shape}")
        return cls(x=z[X], p=z[P], omega=z[OMEGA], pi=z[PI],
                   phi=z[PHI], pi_phi=z[PI_PHI])

    def as_array(self) -> Array:
        out = np.empty(DIM)
        out[X] = self.x
        out[P] = self.p
        out[OMEGA] = self.omega
        out[PI] = self.pi
        out[PHI] = self.phi
        out[PI_PHI] = self.pi_phi
        return out

    @property
    def spin(self) -> Array:
        """Composed spin vector S = omega x pi."""
        return np.cross(self.omega, self.pi)

    def replace(self, **changes) -> "PhasePoint":
        return dataclasses.replace(self, **changes)


def as_flat(z) -> Array:
    """Flatten a PhasePoint (or pass through a plain coordinate vector)."""
    if isinstance(z, PhasePoint):
        return z.as_array()
    return np.asarray(z, dtype=float)


@dataclass(frozen=True)
class CanonicalStructure:
    """Pairing of coordinates with conjugate momenta plus bracket weights.

    Each pair (q, p) contributes w * (df/dq dg/dp - df/dp dg/dq) to the
    bracket.  Weights are 1 for ordinary canonical pairs and carry the
    metric signature entries for the Minkowski spin sector.
    """

    labels: tuple
    pairs: tuple
    weights: tuple

    def __post_init__(self):
        labels = tuple(str(l) for l in self.labels)
        pairs = tuple((int(q), int(p)) for q, p in self.pairs)
        weights = tuple(float(w) for w in self.weights)
        if len(weights) != len(pairs):
            raise ValueError("one bracket weight is required per canonical pair")
        seen = [i for qp in pairs for i in qp]
        if sorted(seen) != list(range(len(labels))):
            raise ValueError("every coordinate must belong to exactly one canonical pair")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "pairs", pairs)
        object.__setattr__(self, "weights", weights)

    @property
    def dim(self) -> int:
        return len(self.labels)


CANONICAL_PARTICLE = CanonicalStructure(
    labels=_PARTICLE_LABELS,
    pairs=((0, 3), (1, 4), (2, 5), (6, 9), (7, 10), (8, 11), (12, 13)),
    weights=(1.0,) * 7,
)

MINKOWSKI_SPIN = CanonicalStructure(
    labels=_MINKOWSKI_LABELS,
    pairs=((0, 4), (1, 5), (2, 6), (3, 7)),
    weights=(-1.0, 1.0, 1.0, 1.0),
)


@dataclass(frozen=True)
class Observable:
    """Scalar function of the flat coordinate vector, optionally with an
    analytic gradient.  Without one, gradients come from central finite
    differences."""

    fn: Callable[[Array], float]
    grad: Optional[Callable[[Array], Array]] = None
    name: str = ""

    def __call__(self, z) -> float:
        return float(self.fn(as_flat(z)))

    def gradient(self, z, rel_step: float = 1e-6) -> Array:
        zf = as_flat(z)
        if self.grad is not None:
            return np.asarray(self.grad(zf), dtype=float)
        return gradient(self.fn, zf, rel_step)

    def _combine(self, other, fn, grad, name):
        return Observable(fn=fn, grad=grad, name=name)

    def __add__(self, other):
        if isinstance(other, Observable):
            g = None
            if self.grad is not None and other.grad is not None:
                g = lambda z: np.asarray(self.grad(z)) + np.asarray(other.grad(z))
            return Observable(lambda z: self.fn(z) + other.fn(z), g,
                              name=f"({self.name}+{other.name})")
        c = float(other)
        g = self.grad
        return Observable(lambda z: self.fn(z) + c, g, name=self.name)

    __radd__ = __add__

    def __neg__(self):
        g = None
        if self.grad is not None:
            g = lambda z: -np.asarray(self.grad(z))
        return Observable(lambda z: -self.fn(z), g, name=f"(-{self.name})")

    def __sub__(self, other):
        if isinstance(other, Observable):
            return self + (-other)
        return self + (-float(other))

    def __rsub__(self, other):
        return (-self) + float(other)

    def __mul__(self, other):
        if isinstance(other, Observable):
            g = None
            if self.grad is not None and other.grad is not None:
                g = lambda z: (np.asarray(self.grad(z)) * other.fn(z)
                               + self.fn(z) * np.asarray(other.grad(z)))
            return Observable(lambda z: self.fn(z) * other.fn(z), g,
                              name=f"({self.name}*{other.name})")
        c = float(other)
        g = None
        if self.grad is not None:
            g = lambda z: c * np.asarray(self.grad(z))
        return Observable(lambda z: c * self.fn(z), g, name=f"({other}*{self.name})")

    __rmul__ = __mul__


def gradient(f, z, rel_step: float = 1e-6, richardson: bool = False) -> Array:
    """Central finite-difference gradient with per-coordinate relative steps.

    The step for coordinate i is rel_step * max(1, |z_i|).  One level of
    Richardson extrapolation is available but off by default.
    """
    if rel_step <= 0:
        raise ValueError("rel_step must be positive")
    fn = f.fn if isinstance(f, Observable) else f
    z0 = np.array(as_flat(z), dtype=float)
    out = np.empty(z0.size)
    for i in range(z0.size):
        h = rel_step * max(1.0, abs(z0[i]))
        d = _central_difference(fn, z0, i, h)
        if richardson:
            d_half = _central_difference(fn, z0, i, 0.5 * h)
            d = (4.0 * d_half - d) / 3.0
        out[i] = d
    return out


def _central_difference(fn, z, i, h):
    zp = z.copy()
    zp[i] += h
    zm = z.copy()
    zm[i] -= h
    return (float(fn(zp)) - float(fn(zm))) / (2.0 * h)


def _checked_gradient(obs, zf, structure, rel_step):
    if isinstance(obs, Observable):
        grad = obs.gradient(zf, rel_step)
    else:
        grad = gradient(obs, zf, rel_step)
    grad = np.asarray(grad, dtype=float)
    if grad.shape != (structure.dim,):
        raise ValueError(
            f"gradient has shape {grad.shape}, expected ({structure.dim},)")
    bad = ~np.isfinite(grad)
    if bad.any():
        i = int(np.argmax(bad))
        raise GradientError(structure.labels[i], grad[i])
    return grad


def poisson_bracket(f, g, z, structure: CanonicalStructure = CANONICAL_PARTICLE,
                    rel_step: float = 1e-6) -> float:
    """Evaluate the canonical Poisson bracket {f, g} at the point z."""
    zf = as_flat(z)
    if zf.shape != (structure.dim,):
        raise ValueError(
            f"point has shape {zf.shape}, structure expects ({structure.dim},)")
    df = _checked_gradient(f, zf, structure, rel_step)
    dg = _checked_gradient(g, zf, structure, rel_step)
    total = 0.0
    for (q, p), w in zip(structure.pairs, structure.weights):
        total += w * (df[q] * dg[p] - df[p] * dg[q])
    return float(total)


# ---------------------------------------------------------------------------
# Observable builders
# ---------------------------------------------------------------------------

def coordinate(index: int, dim: int = DIM, label: str = "") -> Observable:
    """Observable returning a single coordinate of the flat vector."""
    index = int(index)
    if not 0 <= index < dim:
        raise ValueError(f"coordinate index {index} outside [0, {dim})")

    def fn(z):
        return float(z[index])

    def grad(z):
        out = np.zeros(dim)
        out[index] = 1.0
        return out

    return Observable(fn, grad, name=label or f"z[{index}]")


def constant(value: float) -> Observable:
    value = float(value)
    return Observable(lambda z: value, lambda z: np.zeros(np.asarray(z).size),
                      name=repr(value))


def spin_component(i: int) -> Observable:
    """Component i of the composed spin S = omega x pi on the 14-dim layout."""
    if i not in (0, 1, 2):
        raise ValueError("spin component index must be 0, 1 or 2")
    basis = np.zeros(3)
    basis[i] = 1.0

    def fn(z):
        return float(np.cross(z[OMEGA], z[PI])[i])

    def grad(z):
        out = np.zeros(DIM)
        out[OMEGA] = np.cross(z[PI], basis)
        out[PI] = np.cross(basis, z[OMEGA])
        return out

    return Observable(fn, grad, name=f"S{i + 1}")


def quadratic(A, b=None, c: float = 0.0, name: str = "quadratic") -> Observable:
    """Observable 0.5 z.A.z + b.z + c with its exact gradient."""
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("A must be a square matrix")
    A = 0.5 * (A + A.T)
    dim = A.shape[0]
    bvec = np.zeros(dim) if b is None else np.asarray(b, dtype=float)
    if bvec.shape != (dim,):
        raise ValueError("b must match the dimension of A")
    c = float(c)

    def fn(z):
        return float(0.5 * z @ A @ z + bvec @ z + c)

    def grad(z):
        return A @ z + bvec

    return Observable(fn, grad, name=name)
