"""Scenario runner: loads configurations, runs simulations and verification
suites, and writes machine-readable summaries plus plot-ready time series.

Configs are YAML (JSON works too, it is a YAML subset) validated against a
schema that rejects unknown keys. Exit codes: 0 ok, 1 bad config, 2 runtime
failure, 3 one or more declared checks failed.
"""

from __future__ import annotations

import argparse
import ast
import dataclasses
import json
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import yaml
from jsonschema import Draft202012Validator

from . import bundle_so3 as so3
from . import constraints as con
from . import lorentz as lor
from .dynamics import (
    FieldConfig,
    GaugeFunction,
    IntegrationOptions,
    ModelParams,
    Trajectory,
    fit_rotation_frequency,
    integrate,
    physical_hamiltonian,
    second_order_residual,
)
from .errors import SpinBundleError
from .phasespace import (
    OMEGA,
    PI,
    PhasePoint,
    coordinate,
    poisson_bracket,
    quadratic,
    spin_component,
)

__all__ = [
    "Check",
    "ConfigError",
    "load_config",
    "main",
    "parse_gauge_expression",
    "read_timeseries",
    "run_config",
    "write_timeseries",
    "SCENARIOS",
    "TIMESERIES_COLUMNS",
]


class ConfigError(SpinBundleError):
    """Configuration file rejected before any computation ran."""


# ---------------------------------------------------------------------------
# Config schema
# ---------------------------------------------------------------------------

_NUM = {"type": "number"}
_POS = {"type": "number", "exclusiveMinimum": 0}
_VEC3 = {"type": "array", "items": _NUM, "minItems": 3, "maxItems": 3}

SCENARIO_NAMES = (
    "free_spin",
    "larmor",
    "stern_gerlach",
    "gauge_compare",
    "verify_so3",
    "verify_lorentz",
    "verify_t4",
)

_GAUGE_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["expression"],
    "properties": {
        "expression": {"type": "string", "minLength": 1},
        "label": {"type": "string"},
    },
}

CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["scenario"],
    "properties": {
        "scenario": {"enum": list(SCENARIO_NAMES)},
        "seed": {"type": "integer", "minimum": 0},
        "params": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "m": _POS, "e": _NUM, "mu": _NUM, "c": _POS,
                "a": _POS, "b": _POS, "hbar": _POS,
            },
        },
        "field": {
            "type": "object",
            "additionalProperties": False,
            "required": ["kind"],
            "properties": {
                "kind": {"enum": ["free", "uniform", "linear_gradient"]},
                "B0": {"oneOf": [_NUM, _VEC3]},
                "gradient": _NUM,
            },
        },
        "gauge": _GAUGE_SCHEMA,
        "gauge_alt": _GAUGE_SCHEMA,
        "initial": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "x": _VEC3, "p": _VEC3, "omega": _VEC3, "pi": _VEC3,
                "pi_phi": _NUM,
            },
        },
        "t_span": {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2},
        "periods": _POS,
        "samples": {"type": "integer", "minimum": 8},
        "tolerances": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "rel_tol": _POS,
                "abs_tol": _POS,
                "project_every": {"type": "integer", "minimum": 0},
            },
        },
        "checks": {"type": "object", "additionalProperties": _POS},
        "boost": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "beta_max": {
                    "type": "number",
                    "exclusiveMinimum": 0,
                    "exclusiveMaximum": 1,
                },
            },
        },
        "n_points": {"type": "integer", "minimum": 1},
        "n_boosts": {"type": "integer", "minimum": 1},
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "dir": {"type": "string", "minLength": 1},
                "prefix": {"type": "string", "minLength": 1},
            },
        },
    },
}

_VALIDATOR = Draft202012Validator(CONFIG_SCHEMA)


def validate_config(cfg) -> dict:
    if not isinstance(cfg, dict):
        raise ConfigError("top level must be a mapping")
    errors = sorted(_VALIDATOR.iter_errors(cfg), key=lambda e: e.json_path)
    if errors:
        first = errors[0]
        raise ConfigError(f"{first.json_path}: {first.message}")
    return cfg


def load_config(path) -> dict:
    """Parse and schema-validate a YAML or JSON config file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    try:
        cfg = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" at line {mark.line + 1}" if mark is not None else ""
        raise ConfigError(f"{path}{where}: {exc}") from None
    return validate_config(cfg)


# ---------------------------------------------------------------------------
# Gauge expressions: t, numbers, + - * /, sin, cos, exp
# ---------------------------------------------------------------------------

_GAUGE_FUNCS = {"sin": math.sin, "cos": math.cos, "exp": math.exp}
_GAUGE_OPS = (ast.Add, ast.Sub, ast.Mult, ast.Div)


def _check_gauge_node(node: ast.AST) -> None:
    if isinstance(node, ast.Expression):
        _check_gauge_node(node.body)
    elif isinstance(node, ast.BinOp) and isinstance(node.op, _GAUGE_OPS):
        _check_gauge_node(node.left)
        _check_gauge_node(node.right)
    elif isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.UAdd, ast.USub)):
        _check_gauge_node(node.operand)
    elif isinstance(node, ast.Call):
        if (not isinstance(node.func, ast.Name)
                or node.func.id not in _GAUGE_FUNCS
                or node.keywords or len(node.args) != 1):
            raise ConfigError(
                "gauge expression may only call sin, cos, exp with one argument")
        _check_gauge_node(node.args[0])
    elif isinstance(node, ast.Name):
        if node.id != "t":
            raise ConfigError(f"unknown name {node.id!r} in gauge expression")
    elif isinstance(node, ast.Constant):
        if not isinstance(node.value, (int, float)) or isinstance(node.value, bool):
            raise ConfigError("gauge expression constants must be numbers")
    else:
        raise ConfigError(
            f"unsupported syntax in gauge expression: {type(node).__name__}")


def parse_gauge_expression(expression: str, label: str = "") -> GaugeFunction:
    """Compile a gauge expression over t from the fixed small grammar."""
    try:
        tree = ast.parse(expression, mode="eval")
    except SyntaxError as exc:
        raise ConfigError(f"gauge expression does not parse: {exc.msg}") from None
    _check_gauge_node(tree)
    code = compile(tree, "<gauge>", "eval")
    env = {"__builtins__": {}, **_GAUGE_FUNCS}

    def phi(t: float) -> float:
        return float(eval(code, env, {"t": t}))

    return GaugeFunction(phi=phi, label=label or expression)


# ---------------------------------------------------------------------------
# Checks and artifacts
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Check:
    """A named scalar compared against a threshold.

    comparison "max" passes when value < threshold, "min" when value >
    threshold (used for quantities that must stay large, like gauge-orbit
    separation).
    """

    name: str
    value: float
    threshold: float
    comparison: str = "max"

    def __post_init__(self):
        if self.comparison not in ("max", "min"):
            raise ValueError("comparison must be 'max' or 'min'")
        object.__setattr__(self, "value", float(self.value))
        object.__setattr__(self, "threshold", float(self.threshold))

    @property
    def passed(self) -> bool:
        if self.comparison == "max":
            return self.value < self.threshold
        return self.value > self.threshold

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "value": self.value,
            "threshold": self.threshold,
            "comparison": self.comparison,
            "passed": self.passed,
        }


TIMESERIES_COLUMNS = (
    "t",
    "x1", "x2", "x3",
    "p1", "p2", "p3",
    "omega1", "omega2", "omega3",
    "pi1", "pi2", "pi3",
    "phi",
    "S1", "S2", "S3",
    "H_phys",
    "res_omega_sq", "res_pi_sq", "res_omega_pi",
)


def write_timeseries(traj: Trajectory, path) -> Path:
    """Write one row per sample with shortest-round-trip float formatting."""
    path = Path(path)
    lines = [",".join(TIMESERIES_COLUMNS)]
    for i in range(len(traj)):
        row = np.concatenate((
            [traj.times[i]],
            traj.states[i, :13],
            traj.spin[i],
            [traj.h_phys[i]],
            traj.residuals[i],
        ))
        lines.append(",".join(repr(float(v)) for v in row))
    try:
        path.write_text("\n".join(lines) + "\n")
    except OSError as exc:
        raise SpinBundleError(f"cannot write time series to {path}: {exc}") from None
    return path


def read_timeseries(path) -> Tuple[Tuple[str, ...], np.ndarray]:
    """Inverse of write_timeseries: (column names, (N, 21) array)."""
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise SpinBundleError(f"cannot read time series from {path}: {exc}") from None
    if not lines:
        raise SpinBundleError(f"{path} is empty")
    names = tuple(lines[0].split(","))
    data = np.array([[float(v) for v in line.split(",")] for line in lines[1:]])
    return names, data


# ---------------------------------------------------------------------------
# Config -> model objects
# ---------------------------------------------------------------------------

def _build_params(cfg: dict) -> ModelParams:
    return ModelParams(**cfg.get("params", {}))


def _build_field(cfg: dict, default_kind: str = "free") -> FieldConfig:
    spec = cfg.get("field", {"kind": default_kind})
    kind = spec["kind"]
    if kind == "free":
        return FieldConfig.free()
    if kind == "uniform":
        B0 = spec.get("B0", [0.0, 0.0, 1.0])
        if np.isscalar(B0):
            B0 = [0.0, 0.0, float(B0)]
        return FieldConfig.uniform(B0)
    if kind == "linear_gradient":
        B0 = spec.get("B0", 1.0)
        if not np.isscalar(B0):
            raise ConfigError("$.field.B0: linear_gradient takes a scalar B0")
        return FieldConfig.linear_gradient(B0=float(B0),
                                           gradient=spec.get("gradient", 0.1))
    raise ConfigError(f"$.field.kind: unknown kind {kind!r}")


def _build_gauge(cfg: dict, key: str = "gauge", default: str = "1") -> GaugeFunction:
    spec = cfg.get(key, {"expression": default})
    return parse_gauge_expression(spec["expression"], spec.get("label", ""))


def _build_initial(cfg: dict, params: ModelParams) -> PhasePoint:
    spec = cfg.get("initial", {})
    omega = spec.get("omega", [params.a, 0.0, 0.0])
    pi = spec.get("pi", [0.0, 0.0, params.b])
    return PhasePoint(
        x=spec.get("x", [0.0, 0.0, 0.0]),
        p=spec.get("p", [1.0, 0.0, 0.0]),
        omega=omega,
        pi=pi,
        phi=1.0,
        pi_phi=spec.get("pi_phi", 0.0),
    )


def _integration_options(cfg: dict, t_span, samples: int,
                         rel_default: float = 1e-10,
                         abs_default: float = 1e-12) -> IntegrationOptions:
    tol = cfg.get("tolerances", {})
    return IntegrationOptions(
        rel_tol=tol.get("rel_tol", rel_default),
        abs_tol=tol.get("abs_tol", abs_default),
        project_every=tol.get("project_every", 0),
        t_eval=np.linspace(t_span[0], t_span[1], samples),
    )


def _threshold(cfg: dict, name: str, default: float,
               comparison: str = "max") -> float:
    checks = cfg.get("checks", {})
    if name in checks:
        return float(checks[name])
    if comparison == "max" and "all" in checks:
        return float(checks["all"])
    return default


def _drift(traj: Trajectory) -> float:
    return float(np.max(np.abs(traj.residuals)))


def _energy_drift(traj: Trajectory) -> float:
    return float(np.max(np.abs(traj.h_phys - traj.h_phys[0])))


# ---------------------------------------------------------------------------
# Dynamic scenarios
# ---------------------------------------------------------------------------

def run_free_spin(cfg: dict) -> Tuple[List[Check], dict, Dict[str, Trajectory]]:
    """No field: the composed spin must stay put while (omega, pi) gauge-rotate."""
    params = _build_params(cfg)
    fields = _build_field(cfg, default_kind="free")
    gauge = _build_gauge(cfg)
    z0 = _build_initial(cfg, params)
    t_span = tuple(cfg.get("t_span", (0.0, 10.0)))
    # the declared check is S(t) = S(0) to 1e-9, so integrate tight
    opts = _integration_options(cfg, t_span, cfg.get("samples", 500),
                                rel_default=1e-12, abs_default=1e-14)
    traj = integrate(z0, t_span, params, fields, gauge, opts)

    spin_dev = float(np.max(np.linalg.norm(traj.spin - traj.spin[0], axis=1)))
    checks = [
        Check("spin_deviation", spin_dev, _threshold(cfg, "spin_deviation", 1e-9)),
        Check("constraint_drift", _drift(traj),
              _threshold(cfg, "constraint_drift", 1e-9)),
        Check("energy_drift", _energy_drift(traj),
              _threshold(cfg, "energy_drift", 1e-9)),
    ]
    metrics = {"spin_deviation": spin_dev, "samples": float(len(traj))}
    return checks, metrics, {"timeseries": traj}


def _larmor_span(cfg: dict, params: ModelParams, b_mag: float):
    omega_spin = abs(params.moment_coupling) * b_mag
    period = 2.0 * np.pi / omega_spin
    periods = cfg.get("periods", 10.0)
    t_span = tuple(cfg.get("t_span", (0.0, periods * period)))
    return t_span, omega_spin


def run_larmor(cfg: dict) -> Tuple[List[Check], dict, Dict[str, Trajectory]]:
    """Uniform field: fit the spin precession and cyclotron frequencies."""
    params = _build_params(cfg)
    fields = _build_field(cfg, default_kind="uniform")
    if fields.kind != "uniform":
        raise ConfigError("$.field.kind: larmor needs a uniform field")
    gauge = _build_gauge(cfg)
    z0 = _build_initial(cfg, params)
    b_vec = fields.B(np.zeros(3))
    b_mag = float(np.linalg.norm(b_vec))
    if b_mag == 0.0:
        raise ConfigError("$.field.B0: larmor needs a nonzero field")
    t_span, omega_spin = _larmor_span(cfg, params, b_mag)
    opts = _integration_options(cfg, t_span, cfg.get("samples", 2000))
    traj = integrate(z0, t_span, params, fields, gauge, opts)

    spin_fit = fit_rotation_frequency(traj.times, traj.spin[:, 0])
    spin_err = abs(spin_fit.omega - omega_spin) / omega_spin
    omega_cyc = abs(params.e) * b_mag / (params.m * params.c)
    cyc_fit = fit_rotation_frequency(traj.times, traj.states[:, 0])
    cyc_err = abs(cyc_fit.omega - omega_cyc) / omega_cyc

    checks = [
        Check("spin_frequency", spin_err, _threshold(cfg, "spin_frequency", 1e-6)),
        Check("cyclotron_frequency", cyc_err,
              _threshold(cfg, "cyclotron_frequency", 1e-6)),
        Check("constraint_drift", _drift(traj),
              _threshold(cfg, "constraint_drift", 1e-6)),
        Check("energy_drift", _energy_drift(traj),
              _threshold(cfg, "energy_drift", 1e-6)),
    ]
    metrics = {
        "fitted_spin_frequency": spin_fit.omega,
        "expected_spin_frequency": omega_spin,
        "fitted_cyclotron_frequency": cyc_fit.omega,
        "expected_cyclotron_frequency": omega_cyc,
        "max_constraint_drift": _drift(traj),
        "max_energy_drift": _energy_drift(traj),
    }
    return checks, metrics, {"timeseries": traj}


def run_stern_gerlach(cfg: dict) -> Tuple[List[Check], dict, Dict[str, Trajectory]]:
    """Gradient field: the spin-gradient force must match the second-order
    equation of motion along the trajectory."""
    params = _build_params(cfg)
    field_spec = cfg.get("field", {"kind": "linear_gradient"})
    if field_spec.get("kind") != "linear_gradient":
        raise ConfigError("$.field.kind: stern_gerlach needs linear_gradient")
    fields = _build_field(cfg, default_kind="linear_gradient")
    gauge = _build_gauge(cfg)
    spec = dict(cfg.get("initial", {}))
    spec.setdefault("p", [0.3, 0.0, 0.0])
    spec.setdefault("omega", [params.a, 0.0, 0.0])
    spec.setdefault("pi", [0.0, params.b, 0.0])
    z0 = _build_initial({**cfg, "initial": spec}, params)
    t_span = tuple(cfg.get("t_span", (0.0, 20.0)))
    opts = _integration_options(cfg, t_span, cfg.get("samples", 2000))
    traj = integrate(z0, t_span, params, fields, gauge, opts)

    residual = float(np.max(second_order_residual(traj, params, fields)))
    deflection = float(traj.states[-1, 5] - traj.states[0, 5])
    checks = [
        Check("second_order_residual", residual,
              _threshold(cfg, "second_order_residual", 1e-6)),
        Check("constraint_drift", _drift(traj),
              _threshold(cfg, "constraint_drift", 1e-6)),
        Check("energy_drift", _energy_drift(traj),
              _threshold(cfg, "energy_drift", 1e-6)),
    ]
    metrics = {
        "max_second_order_residual": residual,
        "momentum_deflection_z": deflection,
    }
    return checks, metrics, {"timeseries": traj}


def run_gauge_compare(cfg: dict) -> Tuple[List[Check], dict, Dict[str, Trajectory]]:
    """Identical runs under two gauge functions: observables must agree while
    the raw (omega, pi) trajectories visibly differ."""
    params = _build_params(cfg)
    fields = _build_field(cfg, default_kind="uniform")
    gauge_a = _build_gauge(cfg, "gauge", default="1")
    gauge_b = _build_gauge(cfg, "gauge_alt", default="1 + 0.5*sin(2*t)")
    z0 = _build_initial(cfg, params)
    t_span = tuple(cfg.get("t_span", (0.0, 4.0 * np.pi)))
    opts = _integration_options(cfg, t_span, cfg.get("samples", 800))
    traj_a = integrate(z0, t_span, params, fields, gauge_a, opts)
    traj_b = integrate(z0, t_span, params, fields, gauge_b, opts)

    spin_gap = float(np.max(np.abs(traj_a.spin - traj_b.spin)))
    pos_gap = float(np.max(np.abs(traj_a.states[:, :3] - traj_b.states[:, :3])))
    omega_gap = float(np.max(np.abs(
        traj_a.states[:, OMEGA] - traj_b.states[:, OMEGA])))
    checks = [
        Check("spin_agreement", spin_gap, _threshold(cfg, "spin_agreement", 1e-6)),
        Check("position_agreement", pos_gap,
              _threshold(cfg, "position_agreement", 1e-6)),
        Check("omega_separation", omega_gap,
              _threshold(cfg, "omega_separation", 0.1, comparison="min"),
              comparison="min"),
    ]
    metrics = {
        "max_spin_gap": spin_gap,
        "max_position_gap": pos_gap,
        "max_omega_gap": omega_gap,
        "gauge_a": gauge_a.label,
        "gauge_b": gauge_b.label,
    }
    return checks, metrics, {"timeseries_a": traj_a, "timeseries_b": traj_b}


# ---------------------------------------------------------------------------
# Verification suites (random-point property checks)
# ---------------------------------------------------------------------------

def _random_quadratic(rng, dim: int = 14):
    A = rng.standard_normal((dim, dim))
    return quadratic(0.5 * (A + A.T), rng.standard_normal(dim),
                     float(rng.standard_normal()), name="random quadratic")


def verify_so3(cfg: dict) -> Tuple[List[Check], dict, dict]:
    """Euclidean-sector suite: spin bracket algebra, Dirac annihilation,
    bundle identification, Casimir normalization, rank, gauge group law."""
    rng = np.random.default_rng(cfg.get("seed", 0))
    params = _build_params(cfg)
    a, b = params.a, params.b
    pair = con.second_class_pair(a)
    S = [spin_component(i) for i in range(3)]

    def sample_state():
        w, p = so3.sample_surface_point(rng, a=a, b=b)
        z = np.zeros(14)
        z[:6] = rng.standard_normal(6)
        z[OMEGA], z[PI] = w, p
        z[12] = 1.0 + rng.uniform(0.0, 1.0)
        return z

    # spin algebra under both brackets
    n_alg = cfg.get("n_points", 100)
    alg_poisson = 0.0
    alg_dirac = 0.0
    omega_pi_err = 0.0
    for _ in range(n_alg):
        z = sample_state()
        for (i, j, k) in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
            want = float(np.cross(z[OMEGA], z[PI])[k])
            alg_poisson = max(alg_poisson, abs(
                poisson_bracket(S[i], S[j], z) - want))
            alg_dirac = max(alg_dirac, abs(
                con.dirac_bracket(S[i], S[j], pair, z) - want))
        w = z[OMEGA]
        for i in range(3):
            for j in range(3):
                want = (1.0 if i == j else 0.0) - w[i] * w[j] / (a * a)
                got = con.dirac_bracket(coordinate(6 + i), coordinate(9 + j),
                                        pair, z)
                omega_pi_err = max(omega_pi_err, abs(got - want))

    # Dirac bracket annihilates the second-class pair
    observables = [_random_quadratic(rng) for _ in range(20)]
    annihilation = 0.0
    for _ in range(50):
        z = sample_state()
        for obs in observables:
            for phi_c in pair.constraints:
                annihilation = max(annihilation, abs(
                    con.dirac_bracket(phi_c.func, obs, pair, z)))

    # bundle identification (normalized chart) and structure-group invariance
    rot_err = 0.0
    inv_err = 0.0
    for _ in range(cfg.get("n_boosts", 1000)):
        wn, pn = so3.sample_surface_point(rng, a=1.0, b=1.0)
        R = so3.rotation_matrix(wn, pn)
        rot_err = max(rot_err,
                      float(np.max(np.abs(R @ R.T - np.eye(3)))),
                      abs(np.linalg.det(R) - 1.0))
        w, p = so3.sample_surface_point(rng, a=a, b=b)
        beta = rng.uniform(0.0, 2.0 * np.pi)
        w2, p2 = so3.so2_action(w, p, beta)
        inv_err = max(inv_err, float(np.max(np.abs(
            so3.spin_map(w2, p2) - so3.spin_map(w, p)))))

    # Casimir identity at generic points; normalization on-surface
    casimir_err = 0.0
    for _ in range(n_alg):
        w = rng.standard_normal(3)
        p = rng.standard_normal(3)
        s2 = float(np.dot(np.cross(w, p), np.cross(w, p)))
        casimir_err = max(casimir_err, abs(
            s2 - (np.dot(w, w) * np.dot(p, p) - np.dot(w, p) ** 2)))
    norm_err = 0.0
    for _ in range(n_alg):
        w, p = so3.sample_surface_point(rng, a=a, b=b)
        norm_err = max(norm_err, abs(
            float(np.dot(np.cross(w, p), np.cross(w, p))) - params.spin_norm_sq))

    # rank of the bundle projection: worst ratio past the expected rank,
    # with the numerical floor standing in when the Jacobian has no further
    # singular values (a 3 x 6 map has exactly three)
    eps = float(np.finfo(float).eps)
    rank_ratio = 0.0
    for _ in range(n_alg):
        w, p = so3.sample_surface_point(rng, a=a, b=b)
        sv = so3.jacobian_singular_values(w, p, kind="so3")
        if so3.jacobian_rank(w, p, kind="so3") != 3:
            rank_ratio = max(rank_ratio, 1.0)
        rank_ratio = max(rank_ratio, eps * float(sv[0] / sv[2]))

    # gauge-matrix group law
    group_err = 0.0
    for _ in range(n_alg):
        g = so3.GaugeMatrix.from_multipliers(
            phi=1.0 + rng.uniform(0.0, 2.0),
            lambda1=rng.standard_normal(),
            lambda3=rng.standard_normal(),
        )
        b1, b2 = rng.uniform(0.0, 2.0 * np.pi, size=2)
        d1, d2 = rng.standard_normal(2)
        two_step = so3.gauge_matrix_transform(
            so3.gauge_matrix_transform(g, b1, d1), b2, d2)
        one_step = so3.gauge_matrix_transform(g, b1 + b2, d1 + d2)
        group_err = max(group_err, float(np.max(np.abs(
            two_step.matrix - one_step.matrix))))

    checks = [
        Check("spin_algebra_poisson", alg_poisson,
              _threshold(cfg, "spin_algebra_poisson", 1e-8)),
        Check("spin_algebra_dirac", alg_dirac,
              _threshold(cfg, "spin_algebra_dirac", 1e-8)),
        Check("dirac_omega_pi", omega_pi_err,
              _threshold(cfg, "dirac_omega_pi", 1e-8)),
        Check("dirac_annihilation", annihilation,
              _threshold(cfg, "dirac_annihilation", 1e-8)),
        Check("rotation_orthogonality", rot_err,
              _threshold(cfg, "rotation_orthogonality", 1e-10)),
        Check("so2_invariance", inv_err, _threshold(cfg, "so2_invariance", 1e-12)),
        Check("casimir_identity", casimir_err,
              _threshold(cfg, "casimir_identity", 1e-10)),
        Check("spin_normalization", norm_err,
              _threshold(cfg, "spin_normalization", 1e-10)),
        Check("so3_rank_ratio", rank_ratio,
              _threshold(cfg, "so3_rank_ratio", 1e-6)),
        Check("gauge_group_law", group_err,
              _threshold(cfg, "gauge_group_law", 1e-12)),
    ]
    return checks, {"points": float(n_alg)}, {}


def verify_lorentz(cfg: dict) -> Tuple[List[Check], dict, dict]:
    """Covariant suite: boost invariance of both surfaces, Casimir, Frenkel
    condition, base ellipsoid, tetrad pseudo-orthogonality, BMT round trip."""
    rng = np.random.default_rng(cfg.get("seed", 0))
    beta_max = cfg.get("boost", {}).get("beta_max", 0.99)
    a3 = a4 = lor.DEFAULT_SURFACE_SCALE

    t3_err = casimir_err = frenkel_err = ellipsoid_err = 0.0
    casimir_target = 8.0 * a3 * a4
    for _ in range(cfg.get("n_boosts", 1000)):
        w, p, P = lor.sample_t3_rest_point(rng, a3=a3, a4=a4,
                                           mass=rng.uniform(0.5, 2.0))
        L = lor.boost_matrix(lor.sample_beta(rng, beta_max))
        w, p, P = L @ w, L @ p, L @ P
        t3_err = max(t3_err, float(np.max(np.abs(
            lor.t3_constraints(w, p, P, a3=a3, a4=a4)))))
        J = lor.spin_tensor(w, p)
        casimir_err = max(casimir_err, abs(lor.casimir(J) - casimir_target))
        frenkel_err = max(frenkel_err, float(np.linalg.norm(
            lor.frenkel_residual(J, P))))
        _, j = lor.decompose_spin_tensor(J)
        ellipsoid_err = max(ellipsoid_err, abs(
            lor.base_ellipsoid_residual(j, P)))

    tetrad_err = 0.0
    for _ in range(cfg.get("n_points", 200)):
        w, p, P = lor.sample_t3_rest_point(rng, a3=a3, a4=a4,
                                           mass=rng.uniform(0.5, 2.0))
        L = lor.boost_matrix(lor.sample_beta(rng, beta_max))
        w, p, P = L @ w, L @ p, L @ P
        lam = lor.tetrad(P, w, p, a3=a3, a4=a4)
        tetrad_err = max(tetrad_err, float(np.max(np.abs(
            lam @ lor.METRIC @ lam.T - lor.METRIC))))

    bmt_err = orth_err = 0.0
    for _ in range(cfg.get("n_points", 200)):
        w, p, P = lor.sample_t3_rest_point(rng, a3=a3, a4=a4,
                                           mass=rng.uniform(0.5, 2.0))
        L = lor.boost_matrix(lor.sample_beta(rng, beta_max))
        w, p, P = L @ w, L @ p, L @ P
        _, j = lor.decompose_spin_tensor(lor.spin_tensor(w, p))
        S = lor.j_to_bmt(j, P)
        bmt_err = max(bmt_err, float(np.max(np.abs(lor.bmt_to_j(S, P) - j))))
        orth_err = max(orth_err, abs(lor.minkowski_dot(S, P)))

    rank_ratio = 0.0
    for _ in range(cfg.get("n_points", 200) // 2):
        w, p, P = lor.sample_t3_rest_point(rng, a3=a3, a4=a4)
        L = lor.boost_matrix(lor.sample_beta(rng, beta_max))
        sv = so3.jacobian_singular_values(L @ w, L @ p, kind="so13")
        if so3.jacobian_rank(L @ w, L @ p, kind="so13") != 5:
            rank_ratio = max(rank_ratio, 1.0)
        rank_ratio = max(rank_ratio, float(sv[5] / sv[4]))

    checks = [
        Check("t3_boost_residual", t3_err, _threshold(cfg, "t3_boost_residual", 1e-9)),
        Check("casimir_deviation", casimir_err,
              _threshold(cfg, "casimir_deviation", 1e-9)),
        Check("frenkel_residual", frenkel_err,
              _threshold(cfg, "frenkel_residual", 1e-9)),
        Check("ellipsoid_residual", ellipsoid_err,
              _threshold(cfg, "ellipsoid_residual", 1e-9)),
        Check("tetrad_identity", tetrad_err,
              _threshold(cfg, "tetrad_identity", 1e-9)),
        Check("bmt_round_trip", bmt_err, _threshold(cfg, "bmt_round_trip", 1e-10)),
        Check("bmt_orthogonality", orth_err,
              _threshold(cfg, "bmt_orthogonality", 1e-12)),
        Check("so13_rank_ratio", rank_ratio,
              _threshold(cfg, "so13_rank_ratio", 1e-6)),
    ]
    return checks, {"boosts": float(cfg.get("n_boosts", 1000))}, {}


def verify_t4(cfg: dict) -> Tuple[List[Check], dict, dict]:
    """Scale-free-surface suite: first-class pair, boost invariance, and the
    two-parameter structure-group action leaving the spin fixed."""
    rng = np.random.default_rng(cfg.get("seed", 0))
    beta_max = cfg.get("boost", {}).get("beta_max", 0.99)
    a = cfg.get("params", {}).get("a", 0.75)
    tset = con.t4_surface_set(a)

    n_pts = cfg.get("n_points", 100)
    bracket_err = 0.0
    first_class_ok = 0
    for _ in range(n_pts):
        radius = rng.uniform(0.7, 1.5)
        w, p = so3.sample_surface_point(rng, a=radius, b=np.sqrt(a) / radius)
        z = np.zeros(14)
        z[OMEGA], z[PI] = w, p
        z[12] = 1.0
        result = con.classify(tset, z)
        if len(result.first_class) == len(tset.constraints):
            first_class_ok += 1
        bracket_err = max(bracket_err, float(np.max(np.abs(
            result.bracket.delta))))
    misclassified = float(n_pts - first_class_ok)

    boost_err = 0.0
    for _ in range(cfg.get("n_boosts", 1000)):
        w4, p4, P = lor.sample_t4_rest_point(rng, a=a,
                                             mass=rng.uniform(0.5, 2.0))
        L = lor.boost_matrix(lor.sample_beta(rng, beta_max))
        boost_err = max(boost_err, float(np.max(np.abs(
            lor.t4_constraints(L @ w4, L @ p4, L @ P, a=a)))))

    action_spin_err = 0.0
    action_surface_err = 0.0
    for _ in range(cfg.get("n_boosts", 1000)):
        radius = rng.uniform(0.7, 1.5)
        w, p = so3.sample_surface_point(rng, a=radius, b=np.sqrt(a) / radius)
        k = np.exp(rng.uniform(-1.0, 1.0))
        beta = rng.uniform(0.0, 2.0 * np.pi)
        w2, p2 = lor.t4_structure_action(w, p, k, beta)
        action_spin_err = max(action_spin_err, float(np.max(np.abs(
            np.cross(w2, p2) - np.cross(w, p)))))
        action_surface_err = max(
            action_surface_err,
            abs(float(np.dot(w2, p2))),
            abs(float(np.dot(p2, p2) - a / np.dot(w2, w2))),
        )

    checks = [
        Check("first_class_misclassified", misclassified,
              _threshold(cfg, "first_class_misclassified", 0.5)),
        Check("constraint_bracket_residual", bracket_err,
              _threshold(cfg, "constraint_bracket_residual", 1e-8)),
        Check("t4_boost_residual", boost_err,
              _threshold(cfg, "t4_boost_residual", 1e-9)),
        Check("structure_action_spin", action_spin_err,
              _threshold(cfg, "structure_action_spin", 1e-12)),
        Check("structure_action_surface", action_surface_err,
              _threshold(cfg, "structure_action_surface", 1e-12)),
    ]
    return checks, {"points": float(n_pts)}, {}


SCENARIOS: Dict[str, Tuple[Callable, str]] = {
    "free_spin": (run_free_spin,
                  "field-free run; the composed spin must stay constant"),
    "larmor": (run_larmor,
               "uniform-field precession; fits spin and cyclotron frequencies"),
    "stern_gerlach": (run_stern_gerlach,
                      "gradient field; checks the spin-gradient force law"),
    "gauge_compare": (run_gauge_compare,
                      "two gauges, one physics; observables must agree"),
    "verify_so3": (verify_so3,
                   "bracket algebra, bundle identification, gauge group law"),
    "verify_lorentz": (verify_lorentz,
                       "boost invariance, tetrad, covariant spin round trips"),
    "verify_t4": (verify_t4,
                  "scale-free surface: first-class pair and structure group"),
}


# ---------------------------------------------------------------------------
# Orchestration
# ---------------------------------------------------------------------------

def _output_dir(cfg: dict) -> Path:
    override = os.environ.get("SPINBUNDLE_OUTPUT_DIR")
    if override:
        return Path(override)
    return Path(cfg.get("output", {}).get("dir", "out"))


def run_config(cfg: dict, out_dir: Optional[Path] = None) -> Tuple[int, dict]:
    """Execute a validated config; returns (exit code, summary dict)."""
    validate_config(cfg)
    scenario = cfg["scenario"]
    runner, _ = SCENARIOS[scenario]
    out_dir = Path(out_dir) if out_dir is not None else _output_dir(cfg)
    prefix = cfg.get("output", {}).get("prefix", scenario)

    checks, metrics, trajectories = runner(cfg)

    out_dir.mkdir(parents=True, exist_ok=True)
    artifacts = {}
    for tag, traj in trajectories.items():
        name = f"{prefix}_{tag}.csv"
        write_timeseries(traj, out_dir / name)
        artifacts[tag] = name

    summary = {
        "scenario": scenario,
        "seed": int(cfg.get("seed", 0)),
        "all_passed": all(c.passed for c in checks),
        "checks": [c.as_dict() for c in checks],
        "metrics": {k: (v if isinstance(v, str) else float(v))
                    for k, v in sorted(metrics.items())},
        "artifacts": artifacts,
    }
    summary_path = out_dir / f"{prefix}_summary.json"
    summary_path.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    summary["summary_path"] = str(summary_path)
    return (0 if summary["all_passed"] else 3), summary


def _print_report(summary: dict, stream=None) -> None:
    stream = stream or sys.stdout
    for entry in summary["checks"]:
        mark = "PASS" if entry["passed"] else "FAIL"
        op = "<" if entry["comparison"] == "max" else ">"
        print(f"{mark} {entry['name']}: {entry['value']:.3e} "
              f"{op} {entry['threshold']:.3e}", file=stream)
    print(f"summary written to {summary['summary_path']}", file=stream)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="spinbundle",
        description="Run spin-bundle scenarios and verification suites.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario from a config file")
    p_run.add_argument("config", help="path to a YAML or JSON config")

    p_verify = sub.add_parser("verify", help="run a built-in verification suite")
    p_verify.add_argument("suite", help="so3 | lorentz | t4 (verify_ prefix optional)")
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument("--tol", type=float, default=None,
                          help="override every upper-bound threshold")

    sub.add_parser("list-scenarios", help="list scenario names")

    args = parser.parse_args(argv)

    if args.command == "list-scenarios":
        for name in SCENARIO_NAMES:
            print(f"{name}: {SCENARIOS[name][1]}")
        return 0

    try:
        if args.command == "run":
            cfg = load_config(args.config)
        else:
            suite = args.suite if args.suite.startswith("verify_") \
                else f"verify_{args.suite}"
            if suite not in SCENARIOS or not suite.startswith("verify_"):
                raise ConfigError(f"unknown verification suite {args.suite!r}")
            cfg = {"scenario": suite, "seed": args.seed}
            if args.tol is not None:
                if args.tol <= 0:
                    raise ConfigError("--tol must be positive")
                cfg["checks"] = {"all": args.tol}
            validate_config(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1

    try:
        code, summary = run_config(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except SpinBundleError as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2

    _print_report(summary)
    return code


if __name__ == "__main__":
    sys.exit(main())
