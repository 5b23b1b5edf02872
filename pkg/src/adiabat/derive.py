"""Derived thermodynamics: absolute temperature, entropy, adiabats, joins.

Everything here is computed from the declared per-unit primitives U(theta, v)
and P(theta, v).  Absolute temperature comes from the empirical-to-absolute
quadrature T = T0 * exp(int (dP/dtheta) / (P + dU/dv) dtheta'); entropy from
the path integral of (1/T) dU + (P/T) dv along a fixed canonical path;
adiabats from the defining ODE dU + P dv = 0.  Derivation of a space is a
single-writer phase; the resulting maps are immutable and read-parallel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad, solve_ivp
from scipy.interpolate import PchipInterpolator

from .eos import EosSpec, SimpleState, theta_from_energy
from .errors import (
    AdiabatError,
    LeftDomainError,
    OutOfRangeError,
    QuadratureFailureError,
    SingularIntegrandError,
    StiffnessFailureError,
    UnreachableTemperatureError,
)
from .numerics import brent_root, expand_bracket

QUAD_TOL = 1e-12
ODE_RTOL = 1e-10
SLIDE_RTOL = 1e-11
EQUILIBRATE_RTOL = 1e-12
TMAP_INTERP_TARGET = 1e-9
ENTROPY_GRID_TARGET = 1e-6


def _planck_integrand(spec: EosSpec, v: float) -> Callable[[float], float]:
    p_fn, uv_fn, pt_fn = spec.p_fn, spec.uv_fn, spec.ptheta_fn

    def g(t: float) -> float:
        denom = p_fn(t, v) + uv_fn(t, v)
        if denom <= 0.0:
            raise SingularIntegrandError(
                f"{spec.space_id}: P + (dU/dv) = {denom!r} <= 0 at theta={t!r}, v={v!r}"
            )
        return pt_fn(t, v) / denom

    return g


def _graded_nodes(lo: float, hi: float, n: int) -> np.ndarray:
    """Geometric spacing on positive domains (gas entropies are ln-like there)."""
    if lo > 0.0:
        return np.geomspace(lo, hi, n)
    return np.linspace(lo, hi, n)


def _graded_mids(nodes: np.ndarray) -> np.ndarray:
    if nodes[0] > 0.0:
        return np.sqrt(nodes[:-1] * nodes[1:])
    return 0.5 * (nodes[:-1] + nodes[1:])


def _quad(g: Callable[[float], float], a: float, b: float) -> float:
    if a == b:
        return 0.0
    value, err = quad(g, a, b, epsabs=QUAD_TOL, epsrel=QUAD_TOL, limit=200)
    if not math.isfinite(value) or err > 1e-8 * max(1.0, abs(value)):
        raise QuadratureFailureError(f"quadrature error estimate {err!r} for value {value!r}")
    return value


def planck_temperature(
    spec: EosSpec,
    theta: float,
    v_probe: float | None = None,
    anchor: tuple[float, float] | None = None,
) -> float:
    """Absolute temperature at empirical temperature ``theta``.

    The integrand is evaluated at the fixed probe volume; the value is
    independent of that choice (checked by the property suite, not assumed).
    ``anchor`` pins (theta0, T0); it defaults to the declared reference
    theta with T0 = theta0, i.e. the empirical scale is calibrated there.
    """
    theta0, t0 = anchor if anchor is not None else (spec.reference[0], spec.reference[0])
    v = spec.reference[1] if v_probe is None else v_probe
    spec.require_in_domain(theta, v)
    spec.require_in_domain(theta0, v)
    if theta == theta0:
        return t0
    return t0 * math.exp(_quad(_planck_integrand(spec, v), theta0, theta))


@dataclass
class TemperatureMap:
    """Tabulated strictly-increasing T(theta) with monotone-cubic interpolation."""

    space_id: str
    anchor: tuple[float, float]
    thetas: np.ndarray
    temperatures: np.ndarray
    _log_interp: PchipInterpolator = field(repr=False)

    def __call__(self, theta: float | np.ndarray) -> float | np.ndarray:
        out = np.exp(self._log_interp(theta))
        return float(out) if np.isscalar(theta) or np.ndim(theta) == 0 else out

    def theta_at(self, temperature: float) -> float:
        """Invert the map (unique by strict monotonicity)."""
        lo, hi = self.temperatures[0], self.temperatures[-1]
        if not lo <= temperature <= hi:
            raise OutOfRangeError(
                f"{self.space_id}: T={temperature!r} outside [{lo!r}, {hi!r}]"
            )
        target = math.log(temperature)
        return brent_root(lambda t: self._log_interp(t) - target, self.thetas[0], self.thetas[-1])

    @property
    def t_range(self) -> tuple[float, float]:
        return float(self.temperatures[0]), float(self.temperatures[-1])


def build_temperature_map(
    spec: EosSpec,
    anchor: tuple[float, float] | None = None,
    v_probe: float | None = None,
    interp_target: float = TMAP_INTERP_TARGET,
) -> TemperatureMap:
    """Tabulate the temperature quadrature on an adaptively refined grid.

    The grid doubles until monotone-cubic interpolation reproduces direct
    midpoint quadrature within ``interp_target`` (relative, i.e. absolute in
    log T).
    """
    theta0, t0 = anchor if anchor is not None else (spec.reference[0], spec.reference[0])
    v = spec.reference[1] if v_probe is None else v_probe
    g = _planck_integrand(spec, v)
    tlo, thi = spec.theta_domain

    thetas = _graded_nodes(tlo, thi, 65)
    log_rel = _cumulative(g, thetas)  # log T relative to the first node
    for _ in range(12):
        mids = _graded_mids(thetas)
        direct = log_rel[:-1] + np.array([_quad(g, a, m) for a, m in zip(thetas[:-1], mids)])
        interp = PchipInterpolator(thetas, log_rel)(mids)
        if np.max(np.abs(interp - direct)) <= interp_target:
            break
        thetas = np.sort(np.concatenate([thetas, mids]))
        merged = np.empty_like(thetas)
        merged[0::2] = log_rel
        merged[1::2] = direct
        log_rel = merged
    else:
        raise QuadratureFailureError(f"{spec.space_id}: temperature grid failed to converge")

    log_interp = PchipInterpolator(thetas, log_rel)
    log_t = log_rel - float(log_interp(theta0)) + math.log(t0)
    temperatures = np.exp(log_t)
    if np.any(np.diff(temperatures) <= 0.0) or np.any(temperatures <= 0.0):
        raise AdiabatError(f"{spec.space_id}: derived T(theta) is not strictly increasing")
    return TemperatureMap(
        spec.space_id, (theta0, t0), thetas, temperatures, PchipInterpolator(thetas, log_t)
    )


def _cumulative(g: Callable[[float], float], nodes: np.ndarray) -> np.ndarray:
    out = np.zeros(len(nodes))
    for i in range(1, len(nodes)):
        out[i] = out[i - 1] + _quad(g, nodes[i - 1], nodes[i])
    return out


class EntropyFn:
    """Per-unit entropy of one space, anchored at the declared reference.

    `value` integrates (1/T) dU + (P/T) dv along the canonical path --
    reference isotherm to the target volume, then the isochore to the target
    theta -- with the temperature advanced alongside by its defining
    quadrature, so no interpolation error enters.  The tabulated grid (with
    monotone-cubic interpolation, refined to the declared target) backs CSV
    export and fast screening via `value_interp`.

    The multiplicative and per-unit additive constants default to (1, 0);
    calibrated copies are produced by `with_constants`.
    """

    def __init__(
        self,
        spec: EosSpec,
        tmap: TemperatureMap,
        grid_thetas: np.ndarray,
        grid_vols: np.ndarray,
        table: np.ndarray,
        a_gamma: float = 1.0,
        b_const: float = 0.0,
    ):
        self.spec = spec
        self.space_id = spec.space_id
        self.tmap = tmap
        self.grid_thetas = grid_thetas
        self.grid_vols = grid_vols
        self.table = table
        self.a_gamma = a_gamma
        self.b_const = b_const
        self._theta_interp = PchipInterpolator(grid_thetas, table, axis=0)
        self._cache: dict[tuple[float, float], float] = {}

    def with_constants(self, a_gamma: float, b_const: float) -> "EntropyFn":
        clone = EntropyFn.__new__(EntropyFn)
        clone.__dict__.update(self.__dict__)
        clone.a_gamma = a_gamma
        clone.b_const = b_const
        clone._cache = {}
        return clone

    def value(self, theta: float, v: float) -> float:
        """Per-unit entropy at intensive (theta, v), constants applied."""
        key = (theta, v)
        raw = self._cache.get(key)
        if raw is None:
            raw = _entropy_by_path(self.spec, self.tmap.anchor, theta, v)
            if len(self._cache) < 65536:
                self._cache[key] = raw
        return self.a_gamma * raw + self.b_const

    def value_uv(self, u: float, v: float) -> float:
        """Per-unit entropy in energy coordinates."""
        return self.value(theta_from_energy(self.spec, u, v), v)

    def of_state(self, state: SimpleState) -> float:
        """Extensive entropy: lam * s(per-unit coordinates)."""
        return state.lam * self.value(state.u, state.v)

    def value_interp(self, theta: float, v: float) -> float:
        """Grid-interpolated per-unit entropy (export/screening accuracy)."""
        row = self._theta_interp(theta)
        raw = float(PchipInterpolator(self.grid_vols, row)(v))
        return self.a_gamma * raw + self.b_const


def _entropy_by_path(spec: EosSpec, anchor: tuple[float, float], theta: float, v: float) -> float:
    """Canonical-path integral from the reference point to (theta, v)."""
    spec.require_in_domain(theta, v)
    theta0, t0 = anchor
    v0 = spec.reference[1]
    s = spec.reference_entropy
    if v != v0:
        uv_fn, p_fn = spec.uv_fn, spec.p_fn
        s += _quad(lambda x: (uv_fn(theta0, x) + p_fn(theta0, x)) / t0, v0, v)
    if theta != theta0:
        s += _isochore_entropy(spec, theta0, t0, theta, v)
    return s


def _isochore_entropy(spec: EosSpec, theta0: float, t0: float, theta: float, v: float) -> float:
    """Entropy change along the isochore, advancing log T by its quadrature."""
    g = _planck_integrand(spec, v)
    cv_fn = spec.cv_fn

    def rhs(t: float, y: np.ndarray) -> list[float]:
        return [g(t), cv_fn(t, v) * math.exp(-y[0])]

    sol = solve_ivp(
        rhs,
        (theta0, theta),
        [math.log(t0), 0.0],
        method="DOP853",
        rtol=1e-12,
        atol=1e-14,
    )
    if not sol.success:
        raise QuadratureFailureError(f"{spec.space_id}: isochore integration failed: {sol.message}")
    return float(sol.y[1, -1])


def build_entropy_fn(
    spec: EosSpec,
    tmap: TemperatureMap,
    grid_target: float = ENTROPY_GRID_TARGET,
    initial: tuple[int, int] = (17, 17),
) -> EntropyFn:
    """Derive the entropy function, tabulating on an adaptively refined grid."""
    n_t, n_v = initial
    rng = np.random.default_rng(1)
    for _ in range(5):
        thetas = _graded_nodes(*spec.theta_domain, n_t)
        vols = _graded_nodes(*spec.v_domain, n_v)
        table = _entropy_table(spec, tmap, thetas, vols)
        fn = EntropyFn(spec, tmap, thetas, vols, table)
        span = max(1.0, float(table.max() - table.min()))
        worst = 0.0
        for _ in range(48):
            t = rng.uniform(*spec.theta_domain)
            vv = rng.uniform(*spec.v_domain)
            worst = max(worst, abs(fn.value_interp(t, vv) - fn.value(t, vv)))
        if worst <= grid_target * span:
            return fn
        n_t, n_v = 2 * n_t - 1, 2 * n_v - 1
    raise QuadratureFailureError(f"{spec.space_id}: entropy grid failed to reach target")


def _entropy_table(
    spec: EosSpec, tmap: TemperatureMap, thetas: np.ndarray, vols: np.ndarray
) -> np.ndarray:
    theta0, t0 = tmap.anchor
    v0 = spec.reference[1]
    uv_fn, p_fn, cv_fn = spec.uv_fn, spec.p_fn, spec.cv_fn

    iso = lambda x: (uv_fn(theta0, x) + p_fn(theta0, x)) / t0  # noqa: E731
    # cumulative quadrature along the reference isotherm, outward from v0
    iso_vals = np.zeros(len(vols))
    below = [j for j in np.argsort(vols)[::-1] if vols[j] <= v0]
    above = [j for j in np.argsort(vols) if vols[j] > v0]
    for chain in (below, above):
        prev_v, prev_s = v0, 0.0
        for j in chain:
            prev_s += _quad(iso, prev_v, vols[j])
            iso_vals[j] = prev_s
            prev_v = vols[j]

    table = np.zeros((len(thetas), len(vols)))
    for j, vv in enumerate(vols):
        g = _planck_integrand(spec, vv)

        def rhs(t: float, y: np.ndarray, _g=g, _vv=vv) -> list[float]:
            return [_g(t), cv_fn(t, _vv) * math.exp(-y[0])]

        for upward in (True, False):
            sel = thetas >= theta0 if upward else thetas < theta0
            idx = np.flatnonzero(sel)
            if len(idx) == 0:
                continue
            t_eval = thetas[idx] if upward else thetas[idx][::-1]
            span = (theta0, t_eval[-1])
            if span[0] == span[1]:
                table[idx, j] = 0.0
                continue
            sol = solve_ivp(
                rhs,
                span,
                [math.log(t0), 0.0],
                method="DOP853",
                rtol=1e-11,
                atol=1e-13,
                t_eval=t_eval,
            )
            if not sol.success:
                raise QuadratureFailureError(f"{spec.space_id}: entropy table integration failed")
            table[idx if upward else idx[::-1], j] = sol.y[1]
        table[:, j] += spec.reference_entropy + iso_vals[j]
    return table


@dataclass(frozen=True)
class AdiabatCurve:
    """Sampled solution of dU + P dv = 0 through the start state (per unit)."""

    space_id: str
    start: tuple[float, float]  # (u, v)
    vols: np.ndarray
    energies: np.ndarray


@dataclass(frozen=True)
class JoinSpace:
    """Thermal join: shared energy coordinate over fixed per-component volumes.

    Components may come from different spaces; the join's empirical
    temperature range is the intersection of the components' domains.
    """

    components: tuple[tuple[EosSpec, float], ...]  # (spec, scale)

    @property
    def theta_range(self) -> tuple[float, float]:
        lo = max(spec.theta_domain[0] for spec, _ in self.components)
        hi = min(spec.theta_domain[1] for spec, _ in self.components)
        if not lo < hi:
            raise UnreachableTemperatureError("thermal join has empty temperature overlap")
        return lo, hi

    def total_energy(self, theta: float, vols: Sequence[float]) -> float:
        return sum(
            lam * spec.u_fn(theta, vol / lam)
            for (spec, lam), vol in zip(self.components, vols)
        )

    def pressures(self, theta: float, vols: Sequence[float]) -> list[float]:
        return [spec.p_fn(theta, vol / lam) for (spec, lam), vol in zip(self.components, vols)]


def equilibrate(
    components: Sequence[tuple[EosSpec, float, float]],
    u_total: float,
    guess: float | None = None,
) -> tuple[float, list[float]]:
    """Split a join's total energy: the unique theta* with sum of energies u_total.

    ``components`` are (spec, scale, extensive volume) triples.  Positive heat
    capacities make the energy sum strictly increasing in theta, so a
    bracketed root is unique; the residual is driven to 1e-12 relative.
    """
    join = JoinSpace(tuple((spec, lam) for spec, lam, _ in components))
    vols = [v for _, _, v in components]
    lo, hi = join.theta_range
    f = lambda t: join.total_energy(t, vols) - u_total  # noqa: E731
    f_lo, f_hi = f(lo), f(hi)
    tol = EQUILIBRATE_RTOL * max(1.0, abs(u_total))
    if f_lo > tol or f_hi < -tol:
        raise OutOfRangeError(
            f"total energy {u_total!r} outside join range [{u_total + f_lo!r}, {u_total + f_hi!r}]"
        )
    if f_lo >= -tol:
        theta = lo
    elif f_hi <= tol:
        theta = hi
    else:
        if guess is not None and lo < guess < hi:
            bracket = expand_bracket(f, guess, lo, hi, first_step=(hi - lo) * 1e-4)
            lo, hi = bracket if bracket is not None else (lo, hi)
        theta = brent_root(f, lo, hi)
    if abs(f(theta)) > tol:
        raise OutOfRangeError("equilibration residual above tolerance")
    splits = [lam * spec.u_fn(theta, vol / lam) for (spec, lam, vol) in components]
    return theta, splits


def _adiabat_theta_rhs(spec: EosSpec) -> Callable[[float, np.ndarray], list[float]]:
    p_fn, uv_fn, cv_fn = spec.p_fn, spec.uv_fn, spec.cv_fn

    def rhs(v: float, y: np.ndarray) -> list[float]:
        t = y[0]
        return [-(p_fn(t, v) + uv_fn(t, v)) / cv_fn(t, v)]

    return rhs


def _domain_events(spec: EosSpec) -> list:
    tlo, thi = spec.theta_domain

    def hit_lo(v, y):  # noqa: ANN001
        return y[0] - tlo

    def hit_hi(v, y):  # noqa: ANN001
        return y[0] - thi

    hit_lo.terminal = True
    hit_hi.terminal = True
    return [hit_lo, hit_hi]


def adiabat_integrate(
    space_or_join: EosSpec | JoinSpace,
    start,
    target_work_coords,
    rtol: float = ODE_RTOL,
    samples: int = 0,
) -> tuple[float, AdiabatCurve | None]:
    """Follow dU + sum P_j dV_j = 0 from the start state to the target volumes.

    For a simple space ``start`` is per-unit (u, v) (or a SimpleState, taken
    per unit) and the target a volume; the solution is advanced in
    theta-as-state form, the exact transform of dU/dv = -P under the
    positive-heat-capacity bijection, so no energy inversion is needed per
    step.  For a thermal join ``start`` is (U_total, volume tuple) and each
    right-hand-side evaluation re-solves the equilibrium split to read the
    component pressures.  Raises LeftDomainError with the exit coordinates
    when the curve leaves the declared rectangle.
    """
    if isinstance(space_or_join, JoinSpace):
        u_end = _adiabat_integrate_join(space_or_join, start[0], start[1], target_work_coords, rtol)
        return u_end, None
    spec = space_or_join
    if isinstance(start, SimpleState):
        start = (start.u, start.v)
    u0, v0 = start
    v1 = float(target_work_coords)
    theta0 = theta_from_energy(spec, u0, v0)
    spec.require_in_domain(theta0, v0)
    if not spec.v_domain[0] <= v1 <= spec.v_domain[1]:
        raise LeftDomainError(f"{spec.space_id}: target volume outside domain", (math.nan, v1))
    if v1 == v0:
        vols = np.linspace(v0, v1, max(samples, 2))
        return u0, AdiabatCurve(spec.space_id, (u0, v0), vols, np.full(len(vols), u0))
    t_eval = np.linspace(v0, v1, samples) if samples > 1 else None
    sol = solve_ivp(
        _adiabat_theta_rhs(spec),
        (v0, v1),
        [theta0],
        method="DOP853",
        rtol=rtol,
        atol=1e-13 * max(1.0, abs(theta0)),
        events=_domain_events(spec),
        t_eval=t_eval,
        dense_output=False,
    )
    if sol.status == 1:  # domain-exit event fired
        v_exit = float(np.concatenate([t for t in sol.t_events if len(t)])[0])
        raise LeftDomainError(f"{spec.space_id}: adiabat left the theta domain", (v_exit,))
    if not sol.success:
        raise StiffnessFailureError(f"{spec.space_id}: adiabat integration failed: {sol.message}")
    thetas = sol.y[0]
    vols = sol.t
    energies = np.array([spec.u_fn(t, vv) for t, vv in zip(thetas, vols)])
    return float(energies[-1]), AdiabatCurve(spec.space_id, (u0, v0), vols, energies)


def _adiabat_integrate_join(
    join: JoinSpace,
    u_start: float,
    v_start: Sequence[float],
    v_target: Sequence[float],
    rtol: float,
) -> float:
    v_start = np.asarray(v_start, dtype=float)
    v_target = np.asarray(v_target, dtype=float)
    for (spec, lam), a, b in zip(join.components, v_start, v_target):
        for vv in (a, b):
            if not spec.v_domain[0] <= vv / lam <= spec.v_domain[1]:
                raise LeftDomainError(
                    f"{spec.space_id}: join work coordinate outside domain", (vv / lam,)
                )
    if np.allclose(v_start, v_target, rtol=0.0, atol=0.0):
        return u_start
    dv = v_target - v_start
    comps = [(spec, lam) for spec, lam in join.components]
    warm = {"theta": None}

    def rhs(s: float, y: np.ndarray) -> list[float]:
        vols = v_start + s * dv
        theta, _ = equilibrate(
            [(spec, lam, vol) for (spec, lam), vol in zip(comps, vols)],
            float(y[0]),
            guess=warm["theta"],
        )
        warm["theta"] = theta
        pressures = join.pressures(theta, vols)
        return [-float(np.dot(pressures, dv))]

    scale = max(1.0, abs(u_start))
    sol = solve_ivp(rhs, (0.0, 1.0), [u_start], method="DOP853", rtol=rtol, atol=1e-13 * scale)
    if not sol.success:
        raise StiffnessFailureError(f"join adiabat integration failed: {sol.message}")
    return float(sol.y[0, -1])


def slide_to_theta(spec: EosSpec, state: SimpleState, theta_star: float) -> SimpleState:
    """Move a state along its own adiabat to the volume where theta = theta*.

    Reversible by construction (the path stays on the adiabat through the
    state).  Raises UnreachableTemperatureError when the adiabat exits the
    volume range first.
    """
    theta = theta_from_energy(spec, state.u, state.v)
    tlo, thi = spec.theta_domain
    if not tlo <= theta_star <= thi:
        raise UnreachableTemperatureError(
            f"{spec.space_id}: theta*={theta_star!r} outside domain [{tlo}, {thi}]"
        )
    if abs(theta_star - theta) <= 1e-14 * max(1.0, abs(theta)):
        return state

    cv_fn, p_fn, uv_fn = spec.cv_fn, spec.p_fn, spec.uv_fn

    def rhs(t: float, y: np.ndarray) -> list[float]:
        vv = y[0]
        return [-cv_fn(t, vv) / (p_fn(t, vv) + uv_fn(t, vv))]

    vlo, vhi = spec.v_domain

    def exit_lo(t, y):  # noqa: ANN001
        return y[0] - vlo

    def exit_hi(t, y):  # noqa: ANN001
        return y[0] - vhi

    exit_lo.terminal = True
    exit_hi.terminal = True

    sol = solve_ivp(
        rhs,
        (theta, theta_star),
        [state.v],
        method="DOP853",
        rtol=SLIDE_RTOL,
        atol=1e-14 * max(1.0, state.v),
        events=[exit_lo, exit_hi],
    )
    if sol.status == 1:
        raise UnreachableTemperatureError(
            f"{spec.space_id}: adiabat exits volume range before reaching theta*={theta_star!r}"
        )
    if not sol.success:
        raise StiffnessFailureError(f"{spec.space_id}: adiabat slide failed: {sol.message}")
    v_end = float(sol.y[0, -1])
    u_end = spec.u_fn(theta_star, v_end)
    return SimpleState(spec.space_id, state.lam, state.lam * u_end, state.lam * v_end)


def reachable_theta_range(spec: EosSpec, u: float, v: float) -> tuple[float, float]:
    """Empirical-temperature interval reachable along the adiabat through (u, v).

    Bounded by whichever comes first: the theta domain edge or the volume
    domain edge (temperature rises as volume shrinks and falls as it grows,
    because P + dU/dv > 0 and heat capacity > 0).
    """
    theta = theta_from_energy(spec, u, v)
    rhs = _adiabat_theta_rhs(spec)
    events = _domain_events(spec)
    bounds = []
    for v_edge in spec.v_domain:
        if v_edge == v:
            bounds.append(theta)
            continue
        sol = solve_ivp(
            rhs,
            (v, v_edge),
            [theta],
            method="DOP853",
            rtol=1e-9,
            atol=1e-12,
            events=events,
        )
        if not sol.success and sol.status != 1:
            raise StiffnessFailureError(f"{spec.space_id}: range probe failed: {sol.message}")
        bounds.append(float(sol.y[0, -1]))
    lo, hi = min(bounds), max(bounds)
    tlo, thi = spec.theta_domain
    return max(lo, tlo), min(hi, thi)


def isotherm_trace(
    derived: "DerivedSpace", theta: float, v_range: tuple[float, float], samples: int
) -> np.ndarray:
    """Tabulate (V, U, P, S, T) per unit along a fixed-theta line."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    spec = derived.spec
    vlo, vhi = v_range
    spec.require_in_domain(theta, vlo)
    spec.require_in_domain(theta, vhi)
    vols = np.linspace(vlo, vhi, samples) if samples > 1 else np.array([vlo])
    t_abs = derived.tmap(theta)
    rows = [
        (vv, spec.u_fn(theta, vv), spec.p_fn(theta, vv), derived.entropy.value(theta, vv), t_abs)
        for vv in vols
    ]
    return np.array(rows)


@dataclass
class DerivedSpace:
    """A space with its temperature map and entropy function attached."""

    spec: EosSpec
    tmap: TemperatureMap
    entropy: EntropyFn

    @property
    def space_id(self) -> str:
        return self.spec.space_id

    def theta_of(self, state: SimpleState) -> float:
        return theta_from_energy(self.spec, state.u, state.v)

    def temperature_of(self, state: SimpleState) -> float:
        return self.tmap(self.theta_of(state))

    def entropy_of(self, state: SimpleState) -> float:
        return self.entropy.of_state(state)


def derive_space(
    spec: EosSpec,
    anchor: tuple[float, float] | None = None,
    grid_target: float = ENTROPY_GRID_TARGET,
) -> DerivedSpace:
    """Single-writer derivation phase: build the immutable maps for one space."""
    tmap = build_temperature_map(spec, anchor)
    entropy = build_entropy_fn(spec, tmap, grid_target)
    return DerivedSpace(spec, tmap, entropy)
