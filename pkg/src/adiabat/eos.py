"""Simple-system state spaces declared by equation-of-state primitives.

A space is declared by closed-form per-unit expressions U(theta, v) and
P(theta, v) over a rectangular (theta, v) domain, where theta is the shared
empirical temperature scale and v the volume per unit of matter.  Extensive
states scale by algebra: a state of ``lam`` units holds (lam*u, lam*v).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from importlib import resources
from typing import Callable, Iterable

import numpy as np

from . import expressions as ex
from .errors import DomainError, OutOfRangeError
from .numerics import brent_root

ENERGY_INVERSION_RTOL = 1e-10


@dataclass
class EosSpec:
    """Declaration of one simple-system state space (per unit of matter)."""

    space_id: str
    u_expr: ex.Expr
    p_expr: ex.Expr
    constants: dict[str, float]
    theta_domain: tuple[float, float]
    v_domain: tuple[float, float]
    reference: tuple[float, float]
    reference_entropy: float = 0.0
    lipschitz_bound: float = 1e6

    def __post_init__(self) -> None:
        tlo, thi = self.theta_domain
        vlo, vhi = self.v_domain
        if not (tlo < thi and vlo < vhi):
            raise ValueError(f"{self.space_id}: empty domain rectangle")
        t0, v0 = self.reference
        if not (tlo < t0 < thi and vlo < v0 < vhi):
            raise ValueError(f"{self.space_id}: reference point not strictly interior")
        names = ex.free_names(self.u_expr) | ex.free_names(self.p_expr)
        missing = names - ex.VARIABLES - set(self.constants)
        if missing:
            raise ValueError(f"{self.space_id}: undeclared constants {sorted(missing)}")

    # compiled per-unit callables f(theta, v); safe to share once built
    @cached_property
    def u_fn(self) -> Callable[[float, float], float]:
        return ex.compile_fn(self.u_expr, self.constants)

    @cached_property
    def p_fn(self) -> Callable[[float, float], float]:
        return ex.compile_fn(self.p_expr, self.constants)

    @cached_property
    def cv_fn(self) -> Callable[[float, float], float]:
        """(dU/dtheta) at fixed v: the per-unit heat capacity."""
        return ex.compile_fn(ex.differentiate(self.u_expr, "theta"), self.constants)

    @cached_property
    def uv_fn(self) -> Callable[[float, float], float]:
        """(dU/dv) at fixed theta."""
        return ex.compile_fn(ex.differentiate(self.u_expr, "v"), self.constants)

    @cached_property
    def ptheta_fn(self) -> Callable[[float, float], float]:
        """(dP/dtheta) at fixed v."""
        return ex.compile_fn(ex.differentiate(self.p_expr, "theta"), self.constants)

    def in_domain(self, theta: float, v: float, margin: float = 0.0) -> bool:
        tlo, thi = self.theta_domain
        vlo, vhi = self.v_domain
        dt = margin * (thi - tlo)
        dv = margin * (vhi - vlo)
        return tlo + dt <= theta <= thi - dt and vlo + dv <= v <= vhi - dv

    def require_in_domain(self, theta: float, v: float) -> None:
        if not self.in_domain(theta, v):
            raise DomainError(
                f"{self.space_id}: (theta={theta!r}, v={v!r}) outside "
                f"theta {self.theta_domain} x v {self.v_domain}"
            )


@dataclass(frozen=True)
class SimpleState:
    """An extensive state: ``lam`` units of a space at total energy U, volume V."""

    space_id: str
    lam: float
    U: float
    V: float

    def __post_init__(self) -> None:
        if not self.lam > 0:
            raise ValueError(f"scale must be positive, got {self.lam!r}")

    @property
    def u(self) -> float:
        return self.U / self.lam

    @property
    def v(self) -> float:
        return self.V / self.lam

    def scaled(self, factor: float) -> "SimpleState":
        return SimpleState(self.space_id, self.lam * factor, self.U * factor, self.V * factor)


def state_from_theta(spec: EosSpec, lam: float, theta: float, v: float) -> SimpleState:
    """Build an extensive state from intensive (theta, v) coordinates."""
    spec.require_in_domain(theta, v)
    return SimpleState(spec.space_id, lam, lam * energy(spec, theta, v), lam * v)


def energy(spec: EosSpec, theta: float, v: float) -> float:
    """Per-unit energy U(theta, v); DomainError outside the declared rectangle."""
    spec.require_in_domain(theta, v)
    return ex.evaluate(spec.u_expr, {**spec.constants, "theta": theta, "v": v})


def pressure(spec: EosSpec, theta: float, v: float) -> float:
    """Pressure P(theta, v); DomainError outside the declared rectangle."""
    spec.require_in_domain(theta, v)
    return ex.evaluate(spec.p_expr, {**spec.constants, "theta": theta, "v": v})


def theta_from_energy(spec: EosSpec, u: float, v: float) -> float:
    """Invert U(theta, v) = u at fixed v by bracketed root-finding.

    Positive heat capacity makes the root unique; the residual is driven to
    |U(theta, v) - u| <= 1e-10 * max(1, |u|).
    """
    tlo, thi = spec.theta_domain
    u_fn = spec.u_fn
    u_lo, u_hi = u_fn(tlo, v), u_fn(thi, v)
    tol = ENERGY_INVERSION_RTOL * max(1.0, abs(u))
    if u < u_lo - tol or u > u_hi + tol:
        raise OutOfRangeError(
            f"{spec.space_id}: energy {u!r} outside [{u_lo!r}, {u_hi!r}] at v={v!r}"
        )
    if u <= u_lo:
        return tlo
    if u >= u_hi:
        return thi
    theta = brent_root(lambda t: u_fn(t, v) - u, tlo, thi)
    if abs(u_fn(theta, v) - u) > tol:
        raise OutOfRangeError(f"{spec.space_id}: energy inversion residual above tolerance")
    return theta


@dataclass(frozen=True)
class Violation:
    check: str
    message: str
    coords: tuple[float, float]


@dataclass
class ValidationReport:
    space_id: str
    violations: list[Violation] = field(default_factory=list)
    warnings: list[Violation] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def summary(self) -> str:
        lines = [f"{self.space_id}: {'PASS' if self.passed else 'FAIL'}"]
        for v in self.violations:
            lines.append(f"  violation [{v.check}] {v.message} at (theta,v)={v.coords}")
        for w in self.warnings:
            lines.append(f"  warning   [{w.check}] {w.message} at (theta,v)={w.coords}")
        return "\n".join(lines)


def validate_spec(
    spec: EosSpec,
    grid: int | tuple[int, int] = 24,
    lipschitz_bound: float | None = None,
) -> ValidationReport:
    """Grid-check every declared-space invariant; math errors become violations.

    Checks positive heat capacity, positive pressure, positive temperature
    denominator P + dU/dv, bounded difference quotients of P (the
    tangent-plane regularity), and midpoint membership of the induced (U, V)
    region (reported as warnings, since convexity is checked, not assumed).
    """
    n_t, n_v = (grid, grid) if isinstance(grid, int) else grid
    if n_t < 8 or n_v < 8:
        raise ValueError("validation grid must be at least 8x8")
    bound = spec.lipschitz_bound if lipschitz_bound is None else lipschitz_bound
    report = ValidationReport(spec.space_id)
    thetas = np.linspace(*spec.theta_domain, n_t)
    vols = np.linspace(*spec.v_domain, n_v)

    p_grid = np.full((n_t, n_v), np.nan)
    for i, t in enumerate(thetas):
        for j, vv in enumerate(vols):
            coords = (float(t), float(vv))
            try:
                cv = spec.cv_fn(t, vv)
                p = spec.p_fn(t, vv)
                uv = spec.uv_fn(t, vv)
            except Exception as err:  # captured, never raised
                report.violations.append(Violation("evaluation", str(err), coords))
                continue
            p_grid[i, j] = p
            if not cv > 0.0:
                report.violations.append(
                    Violation("heat-capacity", f"(dU/dtheta)_V = {cv!r} <= 0", coords)
                )
            if not p > 0.0:
                report.violations.append(Violation("pressure", f"P = {p!r} <= 0", coords))
            if not p + uv > 0.0:
                report.violations.append(
                    Violation("denominator", f"P + (dU/dv)_theta = {p + uv!r} <= 0", coords)
                )

    dt = thetas[1] - thetas[0]
    dv = vols[1] - vols[0]
    with np.errstate(invalid="ignore"):
        q_t = np.abs(np.diff(p_grid, axis=0)) / dt
        q_v = np.abs(np.diff(p_grid, axis=1)) / dv
    for q, axis in ((q_t, "theta"), (q_v, "v")):
        if np.any(q > bound):
            i, j = np.unravel_index(np.nanargmax(q), q.shape)
            report.violations.append(
                Violation(
                    "pressure-lipschitz",
                    f"|dP/d{axis}| quotient {q[i, j]:.6g} exceeds bound {bound:.6g}",
                    (float(thetas[i]), float(vols[j])),
                )
            )

    _convexity_spot_check(spec, report)
    return report


def _convexity_spot_check(spec: EosSpec, report: ValidationReport, samples: int = 200) -> None:
    """Midpoints of random in-domain (U, V) pairs must stay in the induced region."""
    rng = np.random.default_rng(0)
    tlo, thi = spec.theta_domain
    vlo, vhi = spec.v_domain
    try:
        for _ in range(samples):
            t1, t2 = rng.uniform(tlo, thi, 2)
            v1, v2 = rng.uniform(vlo, vhi, 2)
            u_mid = 0.5 * (spec.u_fn(t1, v1) + spec.u_fn(t2, v2))
            v_mid = 0.5 * (v1 + v2)
            if not spec.u_fn(tlo, v_mid) <= u_mid <= spec.u_fn(thi, v_mid):
                report.warnings.append(
                    Violation(
                        "induced-region-convexity",
                        f"(U,V) midpoint energy {u_mid!r} leaves the induced region",
                        (float(v_mid), float(u_mid)),
                    )
                )
                return
    except Exception as err:
        report.warnings.append(Violation("induced-region-convexity", str(err), (np.nan, np.nan)))


@dataclass
class SpaceRegistry:
    """Immutable-by-convention map of space_id -> EosSpec."""

    spaces: dict[str, EosSpec]

    def __getitem__(self, space_id: str) -> EosSpec:
        try:
            return self.spaces[space_id]
        except KeyError:
            raise KeyError(f"unknown space id {space_id!r}") from None

    def __contains__(self, space_id: str) -> bool:
        return space_id in self.spaces

    def ids(self) -> list[str]:
        return sorted(self.spaces)


def registry_from_dict(doc: dict) -> SpaceRegistry:
    """Build a registry from the JSON document schema.

    Schema: ``{"spaces": [{"id", "U", "P", "constants": {}, "domain":
    {"theta": [lo, hi], "v": [lo, hi]}, "reference": {"theta", "v",
    "entropy"}}]}``; an optional per-space "lipschitz_bound" tunes the
    tangent-plane regularity check for the declared unit system.
    """
    if not isinstance(doc, dict) or "spaces" not in doc:
        raise ValueError("registry document must be an object with a 'spaces' array")
    spaces: dict[str, EosSpec] = {}
    for entry in doc["spaces"]:
        try:
            space_id = entry["id"]
            spec = EosSpec(
                space_id=space_id,
                u_expr=ex.parse(entry["U"]),
                p_expr=ex.parse(entry["P"]),
                constants={k: float(x) for k, x in entry.get("constants", {}).items()},
                theta_domain=tuple(float(x) for x in entry["domain"]["theta"]),
                v_domain=tuple(float(x) for x in entry["domain"]["v"]),
                reference=(float(entry["reference"]["theta"]), float(entry["reference"]["v"])),
                reference_entropy=float(entry["reference"].get("entropy", 0.0)),
                lipschitz_bound=float(entry.get("lipschitz_bound", 1e6)),
            )
        except KeyError as err:
            raise ValueError(f"registry entry missing field {err}") from None
        if space_id in spaces:
            raise ValueError(f"duplicate space id {space_id!r}")
        spaces[space_id] = spec
    return SpaceRegistry(spaces)


def load_registry(path: str) -> SpaceRegistry:
    with open(path, encoding="utf-8") as fh:
        return registry_from_dict(json.load(fh))


def bundled_registry() -> SpaceRegistry:
    """The registry shipped with the package (SI and reduced-unit gases)."""
    text = resources.files("adiabat").joinpath("data/bundled_registry.json").read_text()
    return registry_from_dict(json.loads(text))


def iter_specs(registry: SpaceRegistry, ids: Iterable[str] | None = None) -> list[EosSpec]:
    return [registry[i] for i in (registry.ids() if ids is None else ids)]


def si_space_ids() -> list[str]:
    return ["ideal-gas-si", "vdw-gas-si"]


def reduced_space_ids() -> list[str]:
    return [
        "ideal-gas-reduced",
        "vdw-gas-reduced",
        "gas-a-reduced",
        "gas-b-reduced",
        "two-gas-mixture-reduced",
    ]


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ValueError(msg)


def state_matches_domain(spec: EosSpec, state: SimpleState) -> bool:
    """True when the state's intensive coordinates lie in the declared rectangle."""
    _require(state.space_id == spec.space_id, "state/space mismatch")
    if not spec.v_domain[0] <= state.v <= spec.v_domain[1]:
        return False
    try:
        theta_from_energy(spec, state.u, state.v)
    except OutOfRangeError:
        return False
    return True


def theta_of_state(spec: EosSpec, state: SimpleState) -> float:
    """Empirical temperature of an extensive state (by energy inversion)."""
    if math.isclose(state.lam, 1.0):
        return theta_from_energy(spec, state.U, state.V)
    return theta_from_energy(spec, state.u, state.v)
