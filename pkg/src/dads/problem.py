"""Primal problem data: per-agent objectives, shared constraint, box domain.

Objective and constraint functions come from a closed set of parametric
kinds so that runs are reproducible from config files alone and the local
solver can exploit structure.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .errors import InvalidInputError, PreconditionError
from .graph import CyclicGraph


def _vector(x, dim: int | None = None, name: str = "x") -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise InvalidInputError(f"{name} must be a vector, got shape {arr.shape}")
    if dim is not None and arr.shape[0] != dim:
        raise InvalidInputError(f"{name} must have dimension {dim}, got {arr.shape[0]}")
    return arr


@dataclass(frozen=True, eq=False)
class Quadratic:
    """Coordinate-separable quadratic ``sum_d coeffs[d] * (x[d] - center[d])**2 + offset``."""

    coeffs: np.ndarray
    center: np.ndarray
    offset: float = 0.0
    kind = "quadratic"

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _vector(self.coeffs, name="coeffs"))
        object.__setattr__(self, "center", _vector(self.center, name="center"))
        if self.coeffs.shape != self.center.shape:
            raise InvalidInputError("quadratic coeffs and center must have equal length")
        object.__setattr__(self, "offset", float(self.offset))

    @property
    def dim(self) -> int:
        return self.coeffs.shape[0]

    def __call__(self, x) -> float:
        x = _vector(x, self.dim)
        return float(np.dot(self.coeffs, (x - self.center) ** 2) + self.offset)

    def eval_grid(self, pts: np.ndarray) -> np.ndarray:
        return np.sum(self.coeffs * (pts - self.center) ** 2, axis=1) + self.offset

    def lipschitz_bound(self, lower: np.ndarray, upper: np.ndarray) -> float:
        reach = np.maximum(np.abs(lower - self.center), np.abs(upper - self.center))
        return float(np.linalg.norm(2.0 * np.abs(self.coeffs) * reach))

    def range_over_box(self, lower: np.ndarray, upper: np.ndarray) -> tuple[float, float]:
        lo_terms = np.empty(self.dim)
        hi_terms = np.empty(self.dim)
        for d in range(self.dim):
            ends = self.coeffs[d] * np.array([(lower[d] - self.center[d]) ** 2,
                                              (upper[d] - self.center[d]) ** 2])
            inside = lower[d] <= self.center[d] <= upper[d]
            vertex = 0.0 if inside else None
            candidates = list(ends) + ([self.coeffs[d] * 0.0] if vertex is not None else [])
            lo_terms[d] = min(candidates)
            hi_terms[d] = max(candidates)
        return float(lo_terms.sum() + self.offset), float(hi_terms.sum() + self.offset)


@dataclass(frozen=True, eq=False)
class Affine:
    """Affine map ``<weights, x> + offset``."""

    weights: np.ndarray
    offset: float = 0.0
    kind = "affine"

    def __post_init__(self):
        object.__setattr__(self, "weights", _vector(self.weights, name="weights"))
        object.__setattr__(self, "offset", float(self.offset))

    @property
    def dim(self) -> int:
        return self.weights.shape[0]

    def __call__(self, x) -> float:
        x = _vector(x, self.dim)
        return float(np.dot(self.weights, x) + self.offset)

    def eval_grid(self, pts: np.ndarray) -> np.ndarray:
        return pts @ self.weights + self.offset

    def lipschitz_bound(self, lower, upper) -> float:
        return float(np.linalg.norm(self.weights))

    def range_over_box(self, lower, upper) -> tuple[float, float]:
        lo = np.where(self.weights >= 0, lower, upper)
        hi = np.where(self.weights >= 0, upper, lower)
        return self(lo), self(hi)


@dataclass(frozen=True, eq=False)
class PiecewiseLinear:
    """1-d piecewise-linear interpolant, constant outside the breakpoint range."""

    breakpoints: np.ndarray
    values: np.ndarray
    kind = "piecewise_linear"

    def __post_init__(self):
        object.__setattr__(self, "breakpoints", _vector(self.breakpoints, name="breakpoints"))
        object.__setattr__(self, "values", _vector(self.values, name="values"))
        if self.breakpoints.shape != self.values.shape or self.breakpoints.shape[0] < 2:
            raise InvalidInputError("need at least two matching breakpoints and values")
        if np.any(np.diff(self.breakpoints) <= 0):
            raise InvalidInputError("breakpoints must be strictly increasing")

    @property
    def dim(self) -> int:
        return 1

    def __call__(self, x) -> float:
        x = _vector(x, 1)
        return float(np.interp(x[0], self.breakpoints, self.values))

    def eval_grid(self, pts: np.ndarray) -> np.ndarray:
        return np.interp(pts[:, 0], self.breakpoints, self.values)

    def slope_at(self, x: float) -> float:
        """Slope of the active linear piece (0 outside the breakpoint range)."""
        b, v = self.breakpoints, self.values
        if x <= b[0] or x >= b[-1]:
            return 0.0
        seg = int(np.searchsorted(b, x, side="right")) - 1
        seg = min(max(seg, 0), b.shape[0] - 2)
        return float((v[seg + 1] - v[seg]) / (b[seg + 1] - b[seg]))

    def lipschitz_bound(self, lower, upper) -> float:
        slopes = np.diff(self.values) / np.diff(self.breakpoints)
        return float(np.max(np.abs(slopes))) if slopes.size else 0.0

    def range_over_box(self, lower, upper) -> tuple[float, float]:
        xs = [float(lower[0]), float(upper[0])]
        xs += [float(b) for b in self.breakpoints if lower[0] < b < upper[0]]
        vals = [self([x]) for x in xs]
        return min(vals), max(vals)


@dataclass(frozen=True, eq=False)
class Polynomial:
    """1-d polynomial with ascending coefficients ``c0 + c1*x + c2*x**2 + ...``."""

    coefficients: np.ndarray
    kind = "polynomial"

    def __post_init__(self):
        object.__setattr__(self, "coefficients", _vector(self.coefficients, name="coefficients"))
        if self.coefficients.shape[0] < 1:
            raise InvalidInputError("polynomial needs at least one coefficient")

    @property
    def dim(self) -> int:
        return 1

    def __call__(self, x) -> float:
        x = _vector(x, 1)
        return float(np.polynomial.polynomial.polyval(x[0], self.coefficients))

    def eval_grid(self, pts: np.ndarray) -> np.ndarray:
        return np.polynomial.polynomial.polyval(pts[:, 0], self.coefficients)

    def lipschitz_bound(self, lower, upper) -> float:
        m = max(abs(float(lower[0])), abs(float(upper[0])))
        c = self.coefficients
        return float(sum(abs(c[k]) * k * m ** (k - 1) for k in range(1, c.shape[0])))

    def range_over_box(self, lower, upper) -> tuple[float, float]:
        # Extrema at box endpoints or real stationary points inside the box.
        xs = [float(lower[0]), float(upper[0])]
        deriv = np.polynomial.polynomial.polyder(self.coefficients)
        if deriv.shape[0] > 1 or (deriv.shape[0] == 1 and deriv[0] != 0):
            roots = np.polynomial.polynomial.polyroots(deriv)
            for r in roots:
                if abs(r.imag) < 1e-12 and lower[0] < r.real < upper[0]:
                    xs.append(float(r.real))
        vals = [self([x]) for x in xs]
        return min(vals), max(vals)


ScalarFunction = Union[Quadratic, Affine, PiecewiseLinear, Polynomial]

_FUNCTION_KINDS = {
    "quadratic": Quadratic,
    "affine": Affine,
    "piecewise_linear": PiecewiseLinear,
    "polynomial": Polynomial,
}


def function_from_config(cfg: dict) -> ScalarFunction:
    if not isinstance(cfg, dict) or "kind" not in cfg:
        raise InvalidInputError(f"function config must be a mapping with a 'kind': {cfg!r}")
    kind = cfg["kind"]
    if kind not in _FUNCTION_KINDS:
        raise InvalidInputError(f"unknown function kind {kind!r}")
    params = {k: v for k, v in cfg.items() if k != "kind"}
    try:
        return _FUNCTION_KINDS[kind](**params)
    except TypeError as exc:
        raise InvalidInputError(f"bad parameters for {kind}: {exc}") from exc


def function_to_config(fn: ScalarFunction) -> dict:
    if isinstance(fn, Quadratic):
        return {"kind": fn.kind, "coeffs": fn.coeffs.tolist(),
                "center": fn.center.tolist(), "offset": fn.offset}
    if isinstance(fn, Affine):
        return {"kind": fn.kind, "weights": fn.weights.tolist(), "offset": fn.offset}
    if isinstance(fn, PiecewiseLinear):
        return {"kind": fn.kind, "breakpoints": fn.breakpoints.tolist(),
                "values": fn.values.tolist()}
    if isinstance(fn, Polynomial):
        return {"kind": fn.kind, "coefficients": fn.coefficients.tolist()}
    raise InvalidInputError(f"unknown function type {type(fn)!r}")


@dataclass(frozen=True, eq=False)
class BoxSet:
    """Compact box ``{x : lower <= x <= upper}``."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "lower", _vector(self.lower, name="lower"))
        object.__setattr__(self, "upper", _vector(self.upper, name="upper"))
        if self.lower.shape != self.upper.shape:
            raise InvalidInputError("box bounds must have equal dimension")
        if np.any(self.lower > self.upper):
            raise InvalidInputError("box lower bound exceeds upper bound")

    @property
    def dim(self) -> int:
        return self.lower.shape[0]

    def contains(self, x, tol: float = 0.0) -> bool:
        x = _vector(x, self.dim)
        return bool(np.all(x >= self.lower - tol) and np.all(x <= self.upper + tol))

    def clip(self, x) -> np.ndarray:
        return np.clip(_vector(x, self.dim), self.lower, self.upper)

    def outside_violation(self, x) -> float:
        x = _vector(x, self.dim)
        below = np.maximum(self.lower - x, 0.0)
        above = np.maximum(x - self.upper, 0.0)
        return float(max(below.max(initial=0.0), above.max(initial=0.0)))

    def radius_bound(self) -> float:
        """Exact ``sup ||x||`` over the box."""
        return float(np.linalg.norm(np.maximum(np.abs(self.lower), np.abs(self.upper))))

    def axis_grids(self, points_per_dim: int) -> list[np.ndarray]:
        return [np.linspace(self.lower[d], self.upper[d], points_per_dim)
                for d in range(self.dim)]


@dataclass(eq=False)
class ProblemSpec:
    """The primal problem: N objectives, a shared m-dimensional constraint, a box."""

    n_agents: int
    dim: int
    objectives: tuple
    constraints: tuple
    domain: BoxSet
    delta: float
    epsilon: float
    theta: float
    slater_point: Optional[np.ndarray] = None
    gamma_override: Optional[float] = None

    def __post_init__(self):
        self.objectives = tuple(self.objectives)
        self.constraints = tuple(self.constraints)
        if self.n_agents < 1:
            raise InvalidInputError("need at least one agent")
        if len(self.objectives) != self.n_agents:
            raise InvalidInputError(
                f"expected {self.n_agents} objectives, got {len(self.objectives)}")
        if self.domain.dim != self.dim:
            raise InvalidInputError("box dimension does not match problem dimension")
        for fn in self.objectives + self.constraints:
            if fn.dim != self.dim:
                raise InvalidInputError(
                    f"{fn.kind} function has dimension {fn.dim}, expected {self.dim}")
        if not (self.delta > 0 and self.epsilon > 0 and self.theta > 0):
            raise InvalidInputError("delta, epsilon and theta must be positive")
        if self.slater_point is not None:
            self.slater_point = _vector(self.slater_point, self.dim, "slater_point")
        if self.gamma_override is not None:
            self.gamma_override = float(self.gamma_override)

    @property
    def m(self) -> int:
        return len(self.constraints)

    @property
    def delta_vec(self) -> np.ndarray:
        return np.full(self.dim, self.delta)


def eval_objective(spec: ProblemSpec, agent: int, x) -> float:
    """Objective value of one agent at x."""
    if not 0 <= agent < spec.n_agents:
        raise InvalidInputError(f"agent index {agent} out of range")
    return spec.objectives[agent](_vector(x, spec.dim))


def eval_constraint(spec: ProblemSpec, x) -> np.ndarray:
    """Shared constraint vector g(x); empty for unconstrained problems."""
    x = _vector(x, spec.dim)
    if spec.m == 0:
        return np.zeros(0)
    return np.array([g(x) for g in spec.constraints])


def check_slater(spec: ProblemSpec, point) -> np.ndarray:
    """Validate a strictly feasible interior point; returns it as a vector."""
    point = _vector(point, spec.dim, "slater_point")
    if not spec.domain.contains(point):
        raise PreconditionError("Slater point lies outside the box domain")
    g = eval_constraint(spec, point)
    if g.size and np.any(g >= 0.0):
        raise PreconditionError(
            f"Slater point is not strictly feasible: max g component {g.max():.6g} >= 0")
    return point


@dataclass(frozen=True, eq=False)
class DerivedBounds:
    """Constants derived from the problem data and its Slater point."""

    g_bound: float      # upper bound on ||g(x)|| over the box
    h_bound: float      # upper bound on ||x|| over the box
    beta: float         # min(min_l -g_l(slater), delta)
    gamma_i: np.ndarray
    gamma: float


def compute_bounds(spec: ProblemSpec, grid_points_per_dim: int = 1025) -> DerivedBounds:
    """Derive the dual-radius constants; requires a strictly feasible Slater point.

    ``g_bound`` and ``h_bound`` are computed analytically per function kind
    (exactly for affine/quadratic/piecewise-linear, stationary-point
    enumeration for polynomials); they feed diagnostics only, so modest
    over-estimation is acceptable.  Per-agent radius contributions use the
    unconstrained infimum of each objective over the box, computed by the
    local solver at zero multipliers.
    """
    if spec.slater_point is None:
        raise PreconditionError("compute_bounds needs spec.slater_point")
    z_bar = check_slater(spec, spec.slater_point)

    h_bound = spec.domain.radius_bound()
    if spec.m == 0:
        g_bound = 0.0
        beta = spec.delta
    else:
        sq = 0.0
        for g in spec.constraints:
            lo, hi = g.range_over_box(spec.domain.lower, spec.domain.upper)
            sq += max(abs(lo), abs(hi)) ** 2
        g_bound = float(np.sqrt(sq))
        g_at_slater = eval_constraint(spec, z_bar)
        beta = float(min(float(np.min(-g_at_slater)), spec.delta))
        if beta <= 0:
            raise PreconditionError("Slater point must give beta > 0")

    from .local_solver import DualBlock, solve_local
    from .graph import make_cycle

    cycle = make_cycle(max(spec.n_agents, 2))
    zero = DualBlock.zeros(spec.m, spec.dim, max(spec.n_agents, 2))
    gamma_i = np.empty(spec.n_agents)
    for i in range(spec.n_agents):
        q_hat = solve_local(spec, cycle, i, zero).value
        gamma_i[i] = (eval_objective(spec, i, z_bar) - q_hat + spec.epsilon) / beta

    gamma = (spec.gamma_override if spec.gamma_override is not None
             else spec.n_agents * float(gamma_i.max()))
    return DerivedBounds(g_bound=g_bound, h_bound=h_bound, beta=beta,
                         gamma_i=gamma_i, gamma=float(gamma))


@dataclass(frozen=True)
class BandConstraint:
    """One consensus-band inequality ``sign*(x[agent] - x[neighbor]) - delta <= 0`` per coordinate."""

    agent: int
    neighbor: int
    sign: int

    def residual(self, x_stack: np.ndarray, delta: float) -> np.ndarray:
        return self.sign * (x_stack[self.agent] - x_stack[self.neighbor]) - delta


def approximate_problem_constraints(spec: ProblemSpec, cycle: CyclicGraph) -> tuple[BandConstraint, ...]:
    """The 2N band constraints coupling each agent to its down-neighbor."""
    if cycle.n_agents != spec.n_agents:
        raise InvalidInputError("cycle size does not match the number of agents")
    out = []
    for i in range(spec.n_agents):
        j = cycle.down_neighbor(i)
        out.append(BandConstraint(agent=i, neighbor=j, sign=-1))
        out.append(BandConstraint(agent=i, neighbor=j, sign=+1))
    return tuple(out)
