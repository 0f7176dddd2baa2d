"""Time evolution of the charged spinning particle.

The equations of motion couple a charged-particle sector (x, p) minimally to
a magnetic field and the spin sector (omega, pi) to the field through the
composed moment S = omega x pi.  One Lagrange multiplier is fixed at every
right-hand-side evaluation by the consistency condition that omega.pi stays
zero under the flow; the auxiliary gauge coordinate phi follows a
user-supplied function of time and never influences gauge-invariant output.

Integration uses an embedded Dormand-Prince 5(4) pair with proportional step
control, cubic Hermite dense output, and optional Newton projection onto the
spin constraint surface after accepted steps.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np
from scipy import optimize

from . import constraints as con
from .errors import (
    DomainError,
    GaugeError,
    IntegrationError,
    OffSurfaceWarning,
)
from .phasespace import (
    DIM,
    OMEGA,
    P,
    PHI,
    PI,
    PI_PHI,
    X,
    Observable,
    PhasePoint,
    as_flat,
    poisson_bracket,
)

Array = np.ndarray


@dataclass(frozen=True)
class ModelParams:
    """Physical parameters in dimensionless units (hbar = c = 1 by default).

    The momentum-sphere radius b defaults to sqrt(3) hbar / (2 a), which
    normalizes the composed spin to |S|^2 = 3 hbar^2 / 4.
    """

    m: float = 1.0
    e: float = 1.0
    mu: float = 1.0
    c: float = 1.0
    a: float = 1.0
    b: Optional[float] = None
    hbar: float = 1.0

    def __post_init__(self):
        for name in ("m", "c", "a", "hbar"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.b is None:
            object.__setattr__(self, "b", con.default_pi_norm(self.a, self.hbar))
        elif self.b <= 0:
            raise ValueError("b must be positive")

    @property
    def moment_coupling(self) -> float:
        """mu e / (m c): spin precession rate per unit field."""
        return self.mu * self.e / (self.m * self.c)

    @property
    def spin_norm_sq(self) -> float:
        return (self.a * self.b) ** 2

    def surface(self) -> con.ConstraintSet:
        return con.spin_surface_set(self.a, self.b)


def _fd_jacobian3(f: Callable[[Array], Array], step: float = 1e-6):
    """Jacobian matrix G[i, j] = d f_j / d x_i by central differences."""

    def jac(x):
        x = np.asarray(x, dtype=float)
        out = np.empty((3, 3))
        for i in range(3):
            h = step * max(1.0, abs(x[i]))
            xp = x.copy()
            xp[i] += h
            xm = x.copy()
            xm[i] -= h
            out[i] = (np.asarray(f(xp)) - np.asarray(f(xm))) / (2.0 * h)
        return out

    return jac


@dataclass(frozen=True)
class FieldConfig:
    """Magnetic field data: B, a vector potential A with curl A = B, and
    their spatial derivative matrices G[i, j] = d_i (field_j)."""

    kind: str
    B: Callable[[Array], Array]
    A: Callable[[Array], Array]
    grad_B: Callable[[Array], Array]
    grad_A: Callable[[Array], Array]

    @classmethod
    def free(cls) -> "FieldConfig":
        zero3 = lambda x: np.zeros(3)
        zero33 = lambda x: np.zeros((3, 3))
        return cls(kind="free", B=zero3, A=zero3, grad_B=zero33, grad_A=zero33)

    @classmethod
    def uniform(cls, B0) -> "FieldConfig":
        """Uniform field with the symmetric-gauge potential A = B0 x x / 2."""
        B0 = np.asarray(B0, dtype=float)
        if B0.shape != (3,):
            raise ValueError("B0 must be a 3-vector")
        # dA[i, j] = d_i A_j for A = (B0 x x)/2
        dA = 0.5 * np.array([
            [0.0, B0[2], -B0[1]],
            [-B0[2], 0.0, B0[0]],
            [B0[1], -B0[0], 0.0],
        ])

        return cls(
            kind="uniform",
            B=lambda x: B0.copy(),
            A=lambda x: 0.5 * np.cross(B0, x),
            grad_B=lambda x: np.zeros((3, 3)),
            grad_A=lambda x: dA.copy(),
        )

    @classmethod
    def linear_gradient(cls, B0: float = 1.0, gradient: float = 0.1) -> "FieldConfig":
        """Divergence- and curl-free field B = (-g x, 0, B0 + g z) with the
        potential A = (0, x (B0 + g z), 0)."""
        B0 = float(B0)
        g = float(gradient)

        def field(x):
            return np.array([-g * x[0], 0.0, B0 + g * x[2]])

        def potential(x):
            return np.array([0.0, x[0] * (B0 + g * x[2]), 0.0])

        def grad_field(x):
            out = np.zeros((3, 3))
            out[0, 0] = -g
            out[2, 2] = g
            return out

        def grad_potential(x):
            out = np.zeros((3, 3))
            out[0, 1] = B0 + g * x[2]
            out[2, 1] = g * x[0]
            return out

        return cls(kind="linear_gradient", B=field, A=potential,
                   grad_B=grad_field, grad_A=grad_potential)

    @classmethod
    def custom(cls, B, A, grad_B=None, grad_A=None) -> "FieldConfig":
        """User-supplied callables; derivative matrices fall back to central
        finite differences."""
        return cls(
            kind="custom",
            B=B,
            A=A,
            grad_B=grad_B if grad_B is not None else _fd_jacobian3(B),
            grad_A=grad_A if grad_A is not None else _fd_jacobian3(A),
        )

    def check_consistency(self, points, tol: float = 1e-6) -> float:
        """Largest |curl A - B| over the sample points; raises DomainError
        beyond tol."""
        worst = 0.0
        for x in points:
            x = np.asarray(x, dtype=float)
            dA = np.asarray(self.grad_A(x), dtype=float)
            curl = np.array([
                dA[1, 2] - dA[2, 1],
                dA[2, 0] - dA[0, 2],
                dA[0, 1] - dA[1, 0],
            ])
            worst = max(worst, float(np.max(np.abs(curl - self.B(x)))))
        if worst > tol:
            raise DomainError(
                f"vector potential is inconsistent with B: max |curl A - B| = {worst:.3e}")
        return worst


@dataclass(frozen=True)
class GaugeFunction:
    """The auxiliary gauge coordinate phi as a function of time.

    phi must stay away from zero on the integration span; the derivative is
    taken analytically when supplied and by central differences otherwise.
    """

    phi: Callable[[float], float]
    phi_dot: Optional[Callable[[float], float]] = None
    label: str = ""

    @classmethod
    def constant(cls, value: float = 1.0) -> "GaugeFunction":
        value = float(value)
        if value == 0.0:
            raise GaugeError("constant gauge function must be nonzero")
        return cls(phi=lambda t: value, phi_dot=lambda t: 0.0, label=repr(value))

    def __call__(self, t: float) -> float:
        return float(self.phi(t))

    def derivative(self, t: float, step: float = 1e-6) -> float:
        if self.phi_dot is not None:
            return float(self.phi_dot(t))
        h = step * max(1.0, abs(t))
        return (float(self.phi(t + h)) - float(self.phi(t - h))) / (2.0 * h)

    def validate(self, t0: float, t1: float, samples: int = 1000,
                 min_abs: float = 1e-6) -> None:
        for t in np.linspace(t0, t1, samples):
            if abs(float(self.phi(t))) <= min_abs:
                raise GaugeError(
                    f"gauge function falls to |phi| <= {min_abs:g} near t = {t:.6g}")


# ---------------------------------------------------------------------------
# Right-hand side
# ---------------------------------------------------------------------------

_ORTH_OBS = con.omega_dot_pi()
_HALF_PI_SQ = 0.5 * con.pi_norm_sq()


def _spin_sector_hamiltonian(params: ModelParams,
                             fields: Optional[FieldConfig]) -> Observable:
    """The part of the Hamiltonian that drives the spin sector, with phi read
    from the state: (1/phi)(omega^2 - a^2) - (mu e/m c) B(x).S."""
    a_sq = params.a ** 2
    coupling = params.moment_coupling

    def fn(z):
        phi = z[PHI]
        value = (np.dot(z[OMEGA], z[OMEGA]) - a_sq) / phi
        if fields is not None:
            value -= coupling * np.dot(fields.B(z[X]), np.cross(z[OMEGA], z[PI]))
        return float(value)

    def grad(z):
        phi = z[PHI]
        out = np.zeros(DIM)
        out[OMEGA] = 2.0 * z[OMEGA] / phi
        out[PHI] = -(np.dot(z[OMEGA], z[OMEGA]) - a_sq) / phi ** 2
        if fields is not None:
            B = fields.B(z[X])
            out[OMEGA] -= coupling * np.cross(z[PI], B)
            out[PI] -= coupling * np.cross(B, z[OMEGA])
            out[X] -= coupling * (fields.grad_B(z[X]) @ np.cross(z[OMEGA], z[PI]))
        return out

    return Observable(fn, grad, name="H_spin_sector")


def solve_multiplier(z, params: ModelParams, phi_val: Optional[float] = None,
                     fields: Optional[FieldConfig] = None,
                     check_surface: bool = True) -> float:
    """Multiplier of the pi^2 constraint term, solved numerically from the
    consistency condition {omega.pi, H} = 0.

    The condition is linear in the multiplier; both bracket coefficients are
    evaluated with the Poisson engine rather than transcribed in closed form.
    """
    zf = np.array(as_flat(z), dtype=float)
    if phi_val is not None:
        zf[PHI] = float(phi_val)
    if abs(zf[PHI]) < 1e-9:
        raise GaugeError("multiplier solve needs phi != 0")
    if check_surface:
        res = con.evaluate(params.surface(), zf)
        scale = np.maximum(1.0, np.abs(params.surface().targets))
        if np.any(np.abs(res) > 1e-6 * scale):
            warnings.warn(
                f"solve_multiplier: point is off the spin surface (residuals {res})",
                OffSurfaceWarning, stacklevel=2)
    h0 = _spin_sector_hamiltonian(params, fields)
    numerator = poisson_bracket(_ORTH_OBS, h0, zf)
    denominator = poisson_bracket(_ORTH_OBS, _HALF_PI_SQ, zf)
    if abs(denominator) < 1e-12 * max(1.0, params.b ** 2):
        raise DomainError("multiplier is undefined where pi^2 ~ 0")
    return float(-numerator / denominator)


def eom(z, t: float, params: ModelParams, fields: FieldConfig,
        gauge: GaugeFunction) -> Array:
    """Flat time derivative of the state at time t."""
    zf = as_flat(z)
    phi = zf[PHI]
    if abs(phi) < 1e-9:
        raise GaugeError(f"equations of motion are singular at phi = {phi!r}")
    lam1 = solve_multiplier(zf, params, fields=fields, check_surface=False)

    x = zf[X]
    p = zf[P]
    w = zf[OMEGA]
    pp = zf[PI]
    e_over_c = params.e / params.c
    coupling = params.moment_coupling
    B = fields.B(x)
    A = fields.A(x)
    dA = fields.grad_A(x)
    dB = fields.grad_B(x)
    spin = np.cross(w, pp)

    velocity = (p - e_over_c * A) / params.m
    out = np.empty(DIM)
    out[X] = velocity
    out[P] = e_over_c * (dA @ velocity) + coupling * (dB @ spin)
    out[OMEGA] = lam1 * pp + coupling * np.cross(w, B)
    out[PI] = -(2.0 / phi) * w + coupling * np.cross(pp, B)
    out[PHI] = gauge.derivative(t)
    out[PI_PHI] = 0.0
    return out


def physical_hamiltonian(z, params: ModelParams, fields: FieldConfig) -> float:
    """Gauge-invariant energy (p - (e/c) A)^2 / 2m - (mu e/m c) B.S."""
    zf = as_flat(z)
    kinetic = zf[P] - (params.e / params.c) * fields.A(zf[X])
    spin = np.cross(zf[OMEGA], zf[PI])
    return float(np.dot(kinetic, kinetic) / (2.0 * params.m)
                 - params.moment_coupling * np.dot(fields.B(zf[X]), spin))


# ---------------------------------------------------------------------------
# Embedded Dormand-Prince 5(4) integration with constraint projection
# ---------------------------------------------------------------------------

_DP_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_DP_A = tuple(np.array(row) for row in (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
))
_DP_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
# Difference between the 5th- and embedded 4th-order weights.
_DP_ERR = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920,
                    -17253 / 339200, 22 / 525, -1 / 40])


@dataclass(frozen=True)
class IntegrationOptions:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    project_every: int = 0
    t_eval: Optional[Array] = None
    max_step: float = np.inf
    first_step: Optional[float] = None
    max_steps: int = 1_000_000
    projection_tol: float = 1e-13

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.project_every < 0:
            raise ValueError("project_every must be >= 0")
        if self.t_eval is not None:
            t_eval = np.asarray(self.t_eval, dtype=float)
            if t_eval.ndim != 1 or t_eval.size < 1:
                raise ValueError("t_eval must be a 1-d array of times")
            if np.any(np.diff(t_eval) <= 0):
                raise ValueError("t_eval must be strictly increasing")
            object.__setattr__(self, "t_eval", t_eval)


@dataclass(frozen=True)
class Trajectory:
    """Sampled solution with per-sample derived diagnostics.

    states holds flat 14-vectors; derivatives holds the exact right-hand
    side at each sample, which powers cubic Hermite interpolation.
    """

    times: Array
    states: Array
    derivatives: Array
    spin: Array
    h_phys: Array
    residuals: Array
    lambda1: Array

    def __len__(self) -> int:
        return len(self.times)

    def point(self, i: int) -> PhasePoint:
        return PhasePoint.from_array(self.states[i])

    def sample(self, ts) -> Array:
        """Cubic Hermite interpolation of the states at the requested times."""
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        if np.any(ts < self.times[0] - 1e-12) or np.any(ts > self.times[-1] + 1e-12):
            raise ValueError("sample times fall outside the trajectory span")
        idx = np.clip(np.searchsorted(self.times, ts, side="right") - 1,
                      0, len(self.times) - 2)
        t0 = self.times[idx]
        h = self.times[idx + 1] - t0
        s = ((ts - t0) / h)[:, None]
        y0 = self.states[idx]
        y1 = self.states[idx + 1]
        f0 = self.derivatives[idx]
        f1 = self.derivatives[idx + 1]
        h = h[:, None]
        h00 = (1 + 2 * s) * (1 - s) ** 2
        h10 = s * (1 - s) ** 2
        h01 = s ** 2 * (3 - 2 * s)
        h11 = s ** 2 * (s - 1)
        return h00 * y0 + h10 * h * f0 + h01 * y1 + h11 * h * f1

    def spin_at(self, ts) -> Array:
        states = self.sample(ts)
        return np.cross(states[:, OMEGA], states[:, PI])


def _error_norm(err, y0, y1, rel_tol, abs_tol):
    scale = abs_tol + rel_tol * np.maximum(np.abs(y0), np.abs(y1))
    return float(np.sqrt(np.mean((err / scale) ** 2)))


def _initial_step(rhs, t0, y0, f0, rel_tol, abs_tol, span):
    scale = abs_tol + rel_tol * np.abs(y0)
    d0 = np.linalg.norm(y0 / scale)
    d1 = np.linalg.norm(f0 / scale)
    if d0 < 1e-5 or d1 < 1e-5:
        h = 1e-6
    else:
        h = 0.01 * d0 / d1
    return min(h, 0.1 * span)


def integrate(z0, t_span, params: ModelParams, fields: FieldConfig,
              gauge: GaugeFunction,
              opts: Optional[IntegrationOptions] = None) -> Trajectory:
    """Integrate the equations of motion over t_span = (t0, t1).

    The initial phi is taken from the gauge function; a starting point with
    visible spin-surface residuals is projected first (with a warning).
    With project_every = k > 0 the state is projected back onto the surface
    after every k-th accepted step.  When t_eval is given, steps land on the
    requested times exactly and only those samples are recorded; otherwise
    every accepted step is recorded.
    """
    opts = opts or IntegrationOptions()
    t0, t1 = float(t_span[0]), float(t_span[1])
    if not t1 > t0:
        raise ValueError("t_span must satisfy t1 > t0")
    gauge.validate(t0, t1)

    surface = params.surface()
    y = np.array(as_flat(z0), dtype=float)
    y[PHI] = gauge(t0)
    res0 = con.evaluate(surface, y)
    if np.max(np.abs(res0)) > 1e-9 * max(1.0, params.a ** 2, params.b ** 2):
        warnings.warn(
            f"integrate: initial point is off the spin surface (residuals {res0}); "
            "projecting before integration", OffSurfaceWarning, stacklevel=2)
        y = con.project(y, surface, tol=opts.projection_tol)

    def rhs(t, state):
        return eom(state, t, params, fields, gauge)

    t_eval = opts.t_eval
    if t_eval is not None:
        if t_eval[0] < t0 - 1e-12 or t_eval[-1] > t1 + 1e-12:
            raise ValueError("t_eval must lie inside t_span")

    f = rhs(t0, y)
    h = opts.first_step or _initial_step(rhs, t0, y, f, opts.rel_tol,
                                         opts.abs_tol, t1 - t0)
    h = min(h, opts.max_step)

    times, states, derivs = [], [], []

    def record(t, state, deriv):
        times.append(t)
        states.append(state.copy())
        derivs.append(deriv.copy())

    next_eval = 0
    if t_eval is None:
        record(t0, y, f)
    elif abs(t_eval[0] - t0) <= 1e-12 * max(1.0, abs(t0)):
        record(t0, y, f)
        next_eval = 1

    t = t0
    accepted = 0
    attempts = 0
    k = np.empty((7, y.size))
    while t < t1 - 1e-14 * max(1.0, abs(t1)):
        if attempts > opts.max_steps:
            raise IntegrationError(f"step budget {opts.max_steps} exhausted")
        target = None
        h_try = min(h, t1 - t, opts.max_step)
        if t_eval is not None and next_eval < len(t_eval):
            gap = t_eval[next_eval] - t
            if gap <= h_try * (1 + 1e-12):
                h_try = gap
                target = t_eval[next_eval]
        if h_try < 1e-14 * max(1.0, abs(t)):
            raise IntegrationError(f"step size underflow at t = {t:.6g}")

        attempts += 1
        k[0] = f
        for i in range(1, 7):
            yi = y + h_try * (_DP_A[i] @ k[:i])
            k[i] = rhs(t + _DP_C[i] * h_try, yi)
        y_new = y + h_try * (_DP_B5 @ k)
        err = h_try * (_DP_ERR @ k)
        norm = _error_norm(err, y, y_new, opts.rel_tol, opts.abs_tol)

        if norm <= 1.0:
            accepted += 1
            t = target if target is not None else t + h_try
            y = y_new
            f = k[6]  # the last stage is the derivative at (t, y_new)
            if opts.project_every and accepted % opts.project_every == 0:
                y = con.project(y, surface, tol=opts.projection_tol)
                f = rhs(t, y)
            if t_eval is None:
                record(t, y, f)
            elif target is not None:
                record(t, y, f)
                next_eval += 1
            factor = 5.0 if norm == 0.0 else min(5.0, max(0.2, 0.9 * norm ** -0.2))
            h = h_try * factor
        else:
            h = h_try * min(1.0, max(0.2, 0.9 * norm ** -0.2))

    if t_eval is not None and next_eval < len(t_eval):
        raise IntegrationError("integration ended before exhausting t_eval")

    times = np.asarray(times)
    states = np.asarray(states)
    derivs = np.asarray(derivs)
    spin = np.cross(states[:, OMEGA], states[:, PI])
    h_phys = np.array([physical_hamiltonian(s, params, fields) for s in states])
    residuals = np.column_stack([
        np.einsum("ij,ij->i", states[:, OMEGA], states[:, OMEGA]) - params.a ** 2,
        np.einsum("ij,ij->i", states[:, PI], states[:, PI]) - params.b ** 2,
        np.einsum("ij,ij->i", states[:, OMEGA], states[:, PI]),
    ])
    lambda1 = np.array([
        solve_multiplier(s, params, fields=fields, check_surface=False)
        for s in states
    ])
    return Trajectory(times=times, states=states, derivatives=derivs,
                      spin=spin, h_phys=h_phys, residuals=residuals,
                      lambda1=lambda1)


# ---------------------------------------------------------------------------
# Derived checks on trajectories
# ---------------------------------------------------------------------------

def second_order_residual(traj: Trajectory, params: ModelParams,
                          fields: FieldConfig) -> Array:
    """Per-sample norm of m x'' - (e/c) x' x B - (mu e/m c) (grad B) S.

    The acceleration is assembled from the right-hand sides, not from finite
    differences of samples, so a nonzero residual flags inconsistent field
    data rather than integration error.
    """
    e_over_c = params.e / params.c
    coupling = params.moment_coupling
    out = np.empty(len(traj))
    for i, state in enumerate(traj.states):
        x = state[X]
        v = (state[P] - e_over_c * fields.A(x)) / params.m
        spin = np.cross(state[OMEGA], state[PI])
        dA = fields.grad_A(x)
        p_dot = e_over_c * (dA @ v) + coupling * (fields.grad_B(x) @ spin)
        acc = (p_dot - e_over_c * (dA.T @ v)) / params.m
        residual = (params.m * acc
                    - e_over_c * np.cross(v, fields.B(x))
                    - coupling * (fields.grad_B(x) @ spin))
        out[i] = np.linalg.norm(residual)
    return out


@dataclass(frozen=True)
class FrequencyFit:
    """Least-squares fit of a scalar signal to C cos(omega t + delta) + const."""

    omega: float
    amplitude: float
    phase: float
    rms_residual: float


def fit_rotation_frequency(times, values) -> FrequencyFit:
    """Fit a uniformly sampled oscillation and return its angular frequency.

    A discrete-spectrum peak seeds a variable-projection refinement, so the
    result does not depend on any externally supplied frequency estimate.
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if times.ndim != 1 or times.shape != values.shape or times.size < 8:
        raise ValueError("need matching 1-d arrays with at least 8 samples")
    dt = np.diff(times)
    if np.max(np.abs(dt - dt[0])) > 1e-9 * max(abs(dt[0]), 1e-30):
        raise ValueError("fit requires uniformly spaced samples")

    centered = values - np.mean(values)
    spectrum = np.abs(np.fft.rfft(centered))
    if spectrum.size < 3:
        raise ValueError("signal too short for a spectral seed")
    peak = 1 + int(np.argmax(spectrum[1:]))
    span = times[-1] - times[0]
    seed = 2.0 * np.pi * peak / (span + dt[0])
    bin_width = 2.0 * np.pi / (span + dt[0])

    def projected_residual(omega):
        design = np.column_stack([
            np.cos(omega * times), np.sin(omega * times), np.ones_like(times)])
        _, sse, *_ = np.linalg.lstsq(design, values, rcond=None)
        if sse.size:
            return float(sse[0])
        fitted = design @ np.linalg.lstsq(design, values, rcond=None)[0]
        return float(np.sum((values - fitted) ** 2))

    lo = max(seed - 1.5 * bin_width, 0.25 * bin_width)
    hi = seed + 1.5 * bin_width
    best = optimize.minimize_scalar(
        projected_residual, bounds=(lo, hi), method="bounded",
        options={"xatol": 1e-13 * max(1.0, seed)})
    omega = float(best.x)
    design = np.column_stack([
        np.cos(omega * times), np.sin(omega * times), np.ones_like(times)])
    coeffs, *_ = np.linalg.lstsq(design, values, rcond=None)
    amplitude = float(np.hypot(coeffs[0], coeffs[1]))
    phase = float(np.arctan2(-coeffs[1], coeffs[0]))
    rms = float(np.sqrt(np.mean((design @ coeffs - values) ** 2)))
    return FrequencyFit(omega=omega, amplitude=amplitude, phase=phase,
                        rms_residual=rms)
