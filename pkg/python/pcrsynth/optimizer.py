"""Powell conjugate direction search over (w_C12 GHz, w_C23 GHz, A1, A2, A3)."""
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

import numpy as np

from .circuit_model import DriveSpec
from .effective_hamiltonian import coefficients_for
from .exceptions import (
    ConfigurationError,
    HybridizationError,
    NumericError,
    OptimizationFailed,
    ResonanceError,
)
from .gate_logic import GateTarget
from .util import log_debug, log_info, log_trace, log_warning

PARAMETER_NAMES = ("w_C12_GHz", "w_C23_GHz", "A1", "A2", "A3")
CONSTRAINT_WEIGHT = 1e3
HYBRIDIZATION_COST = 1e6
MAX_DIRECTION_CONDITION = 1e8
GOLDEN = (3 - np.sqrt(5)) / 2  # 0.381966
Y_ELIMINATION_HZ = 1e3


@dataclass(frozen=True)
class ParameterBounds:
    lower: np.ndarray
    upper: np.ndarray
    names: tuple = PARAMETER_NAMES

    def __post_init__(self):
        lower = np.asarray(self.lower, dtype=float)
        upper = np.asarray(self.upper, dtype=float)
        if lower.shape != upper.shape or lower.ndim != 1:
            raise ConfigurationError("Bounds need matching 1d lower and upper vectors")
        if np.any(lower >= upper):
            bad = [n for n, lo, hi in zip(self.names, lower, upper) if lo >= hi]
            raise ConfigurationError(f"Lower bound not below upper bound for {bad}")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @classmethod
    def default(cls):
        return cls(
            np.array([4.9, 4.9, -1.5, -0.1, -1.5]),
            np.array([7.0, 7.0, 1.5, 0.1, 1.5]),
        )

    @classmethod
    def from_seed_table(cls, data):
        b = data["bounds"]
        return cls(
            np.array([b[n][0] for n in PARAMETER_NAMES]),
            np.array([b[n][1] for n in PARAMETER_NAMES]),
        )

    @property
    def width(self):
        return self.upper - self.lower

    def contains(self, x):
        x = np.asarray(x)
        return bool(np.all(x >= self.lower) and np.all(x <= self.upper))

    def clip(self, x):
        return np.clip(x, self.lower, self.upper)

    def excess(self, x):
        x = np.asarray(x, dtype=float)
        return np.maximum(self.lower - x, 0) + np.maximum(x - self.upper, 0)


@dataclass(frozen=True)
class CostBreakdown:
    wanted: float
    unwanted: float
    constraint: float
    terms: Dict[str, float] = field(default_factory=dict)
    total: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "total", self.wanted + self.unwanted + self.constraint)

    @classmethod
    def failed(cls, reason, hinge=0.0):
        return cls(0.0, 0.0, HYBRIDIZATION_COST + hinge, {"failed": HYBRIDIZATION_COST, "reason": reason})

    def as_dict(self):
        return {
            "L_wanted": self.wanted,
            "L_unwanted": self.unwanted,
            "L_constraint": self.constraint,
            "L_total": self.total,
        }


def constraint_penalty(params, bounds: Optional[ParameterBounds]):
    if bounds is None:
        return 0.0
    return float(CONSTRAINT_WEIGHT * np.sum(bounds.excess(params) ** 2))


def cost(target, coeffs, params, bounds: Optional[ParameterBounds] = None) -> CostBreakdown:
    """Normalized quadratic residuals of the target pattern plus a hinge penalty"""
    if not isinstance(target, GateTarget):
        raise ConfigurationError(f"cost needs a GateTarget, got {target!r}")
    hinge = constraint_penalty(params, bounds)
    if coeffs is None:
        return CostBreakdown.failed("no coefficients", hinge)
    scale = target.alpha_opt
    terms = {}
    a = coeffs.get
    terms["anchor:" + target.anchor] = ((a(target.anchor) - scale) / scale) ** 2
    for rel in target.relations:
        (pivot, s0), *rest = rel.members
        for word, sk in rest:
            terms[f"rel:{word}~{pivot}"] = ((sk * a(word) - s0 * a(pivot)) / scale) ** 2
    wanted = float(sum(terms.values()))
    unwanted_terms = {f"unwanted:{w}": (a(w) / scale) ** 2 for w in target.unwanted}
    unwanted = float(sum(unwanted_terms.values()))
    terms.update(unwanted_terms)
    return CostBreakdown(wanted, unwanted, hinge, terms)


@dataclass
class TraceRecord:
    iteration: int
    params: np.ndarray
    cost: float
    breakdown: Optional[CostBreakdown]
    normalized_loss: float
    direction_reset: bool
    wall_time: float

    def as_dict(self):
        result = {
            "iteration": self.iteration,
            "params": [float(x) for x in self.params],
            "L_total": self.cost,
            "normalized_loss": self.normalized_loss,
            "direction_reset": self.direction_reset,
            "wall_time": self.wall_time,
        }
        if self.breakdown is not None:
            result.update(self.breakdown.as_dict())
        return result


@dataclass
class OptimizationTrace:
    """Major iteration 0 is the seed"""

    records: List[TraceRecord] = field(default_factory=list)
    evaluations: int = 0
    converged: bool = False
    directions: Optional[np.ndarray] = None

    @property
    def seed_cost(self):
        return self.records[0].cost

    @property
    def final_cost(self):
        return self.records[-1].cost

    @property
    def iterations(self):
        return len(self.records) - 1

    def costs(self):
        return [r.cost for r in self.records]

    def is_monotone(self):
        c = self.costs()
        return all(b <= a for a, b in zip(c, c[1:]))


class _Evaluator:
    """Counts evaluations, remembers the last breakdown per point, forwards to a sink"""

    def __init__(self, objective, sink=None):
        self.objective = objective
        self.sink = sink
        self.count = 0
        self.last = {}

    def __call__(self, x):
        self.count += 1
        value = self.objective(x)
        breakdown = value if isinstance(value, CostBreakdown) else None
        total = float(value.total if breakdown is not None else value)
        if not np.isfinite(total):
            raise NumericError(f"Objective returned {total} at {x}")
        self.last[tuple(np.asarray(x, dtype=float))] = breakdown
        log_trace(f"evaluation {self.count}: {total:.6g} at {np.asarray(x).tolist()}")
        if self.sink is not None:
            record = {"evaluation": self.count, "params": [float(v) for v in x], "L_total": total}
            if breakdown is not None:
                record.update(breakdown.as_dict())
            self.sink(record)
        return total


def _step_limits(z, d, lo=0.0, hi=1.0):
    """Range of a for which z + a d stays inside [lo, hi]^n"""
    a_min, a_max = -np.inf, np.inf
    for zi, di in zip(z, d):
        if di > 0:
            a_min = max(a_min, (lo - zi) / di)
            a_max = min(a_max, (hi - zi) / di)
        elif di < 0:
            a_min = max(a_min, (hi - zi) / di)
            a_max = min(a_max, (lo - zi) / di)
    return a_min, a_max


def _parabola_vertex(a, b, c, fa, fb, fc):
    denom = (b - a) * (fb - fc) - (b - c) * (fb - fa)
    if denom == 0:
        return None
    return b - ((b - a) ** 2 * (fb - fc) - (b - c) ** 2 * (fb - fa)) / (2 * denom)


def line_minimize(phi, f0, step, a_min=-np.inf, a_max=np.inf, rtol=1e-4, max_expand=60):
    """Minimize phi(a) starting at a = 0 (phi(0) = f0): bracket by doubling, then golden section.

    Steps are clipped to [a_min, a_max]. Returns (a, phi(a)) of the best point
    seen; a = 0 unless it strictly improves on f0."""
    seen = {0.0: f0}

    def ev(a):
        a = float(min(max(a, a_min), a_max))
        if a not in seen:
            seen[a] = phi(a)
        return a, seen[a]

    # bracket
    a1, f1 = ev(step)
    if f1 < f0:
        sign = 1
    else:
        am, fm = ev(-step)
        if fm < f0:
            sign = -1
            a1, f1 = am, fm
        else:
            sign = 0
    if sign == 0:
        lo, hi = sorted((ev(-step)[0], ev(step)[0]))
    else:
        prev, cur, fcur = 0.0, a1, f1
        nxt = cur
        for _ in range(max_expand):
            nxt, fnxt = ev(2 * cur)
            # went uphill, or the step limit stopped the expansion
            if nxt == cur or fnxt >= fcur:
                break
            prev, cur, fcur = cur, nxt, fnxt
        lo, hi = sorted((prev, nxt))

    # golden section on [lo, hi]
    scale = abs(step)
    x1 = lo + GOLDEN * (hi - lo)
    x2 = hi - GOLDEN * (hi - lo)
    _, g1 = ev(x1)
    _, g2 = ev(x2)
    for _ in range(200):
        if hi - lo <= rtol * max(abs(lo), abs(hi)) or hi - lo <= rtol * rtol * scale:
            break
        if g1 < g2:
            hi, x2, g2 = x2, x1, g1
            x1 = lo + GOLDEN * (hi - lo)
            _, g1 = ev(x1)
        else:
            lo, x1, g1 = x1, x2, g2
            x2 = hi - GOLDEN * (hi - lo)
            _, g2 = ev(x2)

    # one parabolic refinement through the three best points
    best = sorted(seen.items(), key=lambda kv: (kv[1], abs(kv[0])))
    if len(best) >= 3:
        (pa, fa), (pb, fb), (pc, fc) = sorted(best[:3])
        vertex = _parabola_vertex(pa, pb, pc, fa, fb, fc)
        if vertex is not None and np.isfinite(vertex):
            ev(vertex)
    a_best, f_best = min(seen.items(), key=lambda kv: (kv[1], abs(kv[0])))
    if not f_best < f0:
        return 0.0, f0
    return a_best, f_best


def powell_minimize(
    objective: Callable,
    x0,
    bounds: Optional[ParameterBounds] = None,
    eps: float = 1e-6,
    max_iter: int = 50,
    line_rtol: float = 1e-4,
    initial_step: float = None,
    on_evaluation: Callable = None,
):
    """Powell's conjugate direction method.

    Each major iteration minimizes along every direction in turn starting
    from x0, then along the total displacement u, replaces the direction of
    longest step with u and stops once the iteration moved less than eps.
    With bounds, the search runs on coordinates normalized to [0, 1] and
    never leaves the box.

    Returns (x_best, OptimizationTrace)."""
    x0 = np.asarray(x0, dtype=float)
    n = len(x0)
    if bounds is not None:
        if not bounds.contains(x0):
            raise ConfigurationError(f"Start point {x0.tolist()} is outside the bounds")
        origin, width = bounds.lower, bounds.width
        box = (0.0, 1.0)
        step0 = 0.05 if initial_step is None else initial_step
    else:
        origin, width = np.zeros(n), np.ones(n)
        box = (-np.inf, np.inf)
        step0 = 0.1 if initial_step is None else initial_step

    def to_x(z):
        return origin + z * width

    evaluator = _Evaluator(lambda x: objective(x), on_evaluation)

    def f(z):
        return evaluator(to_x(z))

    def breakdown_of(z):
        return evaluator.last.get(tuple(np.asarray(to_x(z), dtype=float)))

    trace = OptimizationTrace()
    started = time.time()
    z0 = (x0 - origin) / width
    f_z0 = f(z0)
    seed_cost = f_z0

    def record(iteration, z, fz, reset):
        trace.records.append(
            TraceRecord(
                iteration,
                to_x(z),
                fz,
                breakdown_of(z),
                fz / seed_cost if seed_cost > 0 else 0.0,
                reset,
                time.time() - started,
            )
        )

    record(0, z0, f_z0, False)
    directions = np.eye(n)
    z_new, f_new = z0, f_z0
    for iteration in range(1, max_iter + 1):
        z, fz = z0.copy(), f_z0
        steps = np.zeros(n)
        for i in range(n):
            d = directions[i]
            a_min, a_max = _step_limits(z, d, *box)
            a, fa = line_minimize(lambda a: f(z + a * d), fz, step0, a_min, a_max, line_rtol)
            z = z + a * d
            fz = fa
            steps[i] = abs(a) * np.linalg.norm(d)
        u = z - z0
        if np.linalg.norm(u) > 0:
            a_min, a_max = _step_limits(z0, u, *box)
            a, fa = line_minimize(
                lambda a: f(z0 + a * u), f_z0, 1.0, a_min, a_max, line_rtol
            )
            if fa <= fz:
                z_new, f_new = z0 + a * u, fa
            else:  # pragma: no cover - the search along u always sees a = 1
                z_new, f_new = z, fz
            j = int(np.argmax(steps))
            directions[j] = u / np.linalg.norm(u)
        else:
            z_new, f_new = z0, f_z0
        reset = False
        if np.linalg.cond(directions) > MAX_DIRECTION_CONDITION:
            log_debug(f"Powell: direction set degenerate in iteration {iteration}, reset")
            directions = np.eye(n)
            reset = True
        record(iteration, z_new, f_new, reset)
        moved = np.linalg.norm(to_x(z_new) - to_x(z0))
        if moved < eps:
            trace.converged = True
            break
        z0, f_z0 = z_new, f_new
    trace.evaluations = evaluator.count
    trace.directions = directions
    if not trace.converged:
        log_warning(f"Powell stopped after {max_iter} major iterations without converging")
    return to_x(z_new), trace


def optimize_cell(
    spec,
    target,
    seed,
    bounds: Optional[ParameterBounds] = None,
    omega_hz: float = 60e6,
    phases=(0.0, 0.0, 0.0),
    eps: float = 1e-6,
    max_iter: int = 30,
    cutoff: int = 4,
    on_evaluation: Callable = None,
):
    """Powell over the cell's coupler frequencies and drive scale factors.

    Returns (params, PauliCoefficients, OptimizationTrace)."""
    if bounds is None:
        bounds = ParameterBounds.default()
    phase_check = DriveSpec((0.0, 0.0, 0.0), omega_hz, phases)
    if not phase_check.phase_calibrated():
        raise ConfigurationError(f"Drive phases must be calibrated to 0 or pi, got {phases}")

    def evaluate(x):
        drive = DriveSpec(tuple(x[2:5]), omega_hz, phases)
        return coefficients_for(spec.with_couplers((x[0] * 1e9, x[1] * 1e9)), drive, cutoff)

    def objective(x):
        try:
            coeffs = evaluate(x)
        except (HybridizationError, ResonanceError) as e:
            log_debug(f"{type(e).__name__} at {np.asarray(x).tolist()}: {e}")
            return CostBreakdown.failed(type(e).__name__, constraint_penalty(x, bounds))
        return cost(target, coeffs, x, bounds)

    seed = bounds.clip(np.asarray(seed, dtype=float))
    x_opt, trace = powell_minimize(
        objective, seed, bounds, eps=eps, max_iter=max_iter, on_evaluation=on_evaluation
    )
    try:
        coeffs = evaluate(x_opt)
    except (HybridizationError, ResonanceError) as e:
        raise OptimizationFailed(
            f"No valid effective Hamiltonian at the optimum: {e}", trace=trace
        )
    y = coeffs.max_abs_y()
    diagnostics = list(coeffs.diagnostics)
    if y > Y_ELIMINATION_HZ:
        msg = f"Y-type weight {y:.1f} Hz at the optimum despite calibrated phases"
        log_warning(msg)
        diagnostics.append(msg)
    log_info(
        f"{target.name.value}: L_total {trace.seed_cost:.4g} -> {trace.final_cost:.4g} in {trace.iterations} iterations ({trace.evaluations} evaluations)"
    )
    coeffs = type(coeffs)(coeffs.alpha, {**coeffs.metadata, "params": x_opt.tolist()}, tuple(diagnostics))
    return x_opt, coeffs, trace
