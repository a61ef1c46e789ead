"""Maximum-entropy solvers over the meet of condition regions.

Two routes:

* ``solve_dual``: Shannon/von Neumann entropy on classical/quantum models via
  the exponential-family dual. The solved state has the Gibbs form
  exp(-lambda0 * 1 - sum_i lambda_i R_i) with lambda0 = ln Z, and the
  multipliers minimize the convex dual D(lambda) = ln Z(lambda) + lambda . r
  by damped Newton steps. The quantum Hessian is the Kubo-Mori covariance,
  computed from the divided-difference derivative of the matrix exponential.
* ``solve_polytope``: any concave objective with a gradient on classical or
  polytope models via Frank-Wolfe over mixing weights, with the linear
  subproblem solved by a Phase-I-seeded simplex.

A brute-force grid oracle for small instances lives in ``oracle.py``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional, Sequence

import numpy as np

from .config import DEFAULT_SOLVER, SolverConfig
from .errors import (
    IncompatibleObjective,
    ModelMismatch,
    NumericalFailure,
    Unsupported,
    UnsupportedRepresentation,
)
from .hermitian import entropy_from_spectrum
from .models import (
    CLASSICAL,
    POLYTOPE,
    QUANTUM,
    ModelSpace,
    Observable,
    State,
    evaluate,
)
from .regions import ConvexRegion, LinearConstraint
from .simplex import OPTIMAL, phase_one, solve_lp


class SolveStatus(Enum):
    CONVERGED = "converged"
    BOUNDARY_ONLY = "boundary_only"
    INFEASIBLE = "infeasible"
    NON_CONVERGENCE = "non_convergence"


@dataclass(frozen=True)
class Shannon:
    """Classical -sum p ln p, in nats."""


@dataclass(frozen=True)
class VonNeumann:
    """Quantum -tr(rho ln rho), in nats."""


@dataclass(frozen=True)
class FiducialMeasurementEntropy:
    """Sum of outcome-distribution Shannon entropies over fixed measurements.

    Each term is the entropy of a linear image of the state, so the sum is
    concave; this is the generic objective for polytope models, where no
    canonical entropy exists.
    """

    measurements: tuple[Observable, ...]


@dataclass(frozen=True)
class CustomObjective:
    """A caller-supplied concave functional of the state coordinates."""

    value: Callable[[np.ndarray], float]
    gradient: Callable[[np.ndarray], np.ndarray]


Objective = Shannon | VonNeumann | FiducialMeasurementEntropy | CustomObjective


@dataclass(frozen=True)
class MaxEntProblem:
    model: ModelSpace
    region: ConvexRegion
    objective: Objective

    def __post_init__(self):
        if self.region.model != self.model:
            raise ModelMismatch("region belongs to a different model")
        kind = self.model.kind
        obj = self.objective
        if isinstance(obj, Shannon) and kind != CLASSICAL:
            raise IncompatibleObjective("Shannon entropy is the classical objective")
        if isinstance(obj, VonNeumann) and kind != QUANTUM:
            raise IncompatibleObjective("von Neumann entropy is the quantum objective")
        if isinstance(obj, (FiducialMeasurementEntropy, CustomObjective)) and kind != POLYTOPE:
            raise IncompatibleObjective("measurement/custom objectives are for polytope models")
        if isinstance(obj, FiducialMeasurementEntropy):
            for m in obj.measurements:
                if m.model != self.model:
                    raise ModelMismatch("fiducial measurement on a different model")


@dataclass
class SolveDiagnostics:
    """Per-iteration traces for tests and debugging."""

    dual_values: list[float] = field(default_factory=list)
    residual_norms: list[float] = field(default_factory=list)
    hessian_min_eigs: list[float] = field(default_factory=list)
    kept_indices: tuple[int, ...] = ()
    dropped_indices: tuple[int, ...] = ()
    gradient_fallbacks: int = 0
    fw_gap: Optional[float] = None


@dataclass(frozen=True)
class MaxEntSolution:
    """Solver output; state/entropy/lambda0 are None when no iterate exists."""

    state: Optional[State]
    multipliers: np.ndarray
    lambda0: Optional[float]
    entropy: Optional[float]
    iterations: int
    residuals: Optional[np.ndarray]
    status: SolveStatus
    diagnostics: SolveDiagnostics = field(default_factory=SolveDiagnostics, compare=False)


def entropy(objective: Objective, state: State) -> float:
    """Evaluate the entropy objective on a state."""
    if isinstance(objective, Shannon):
        return entropy_from_spectrum(state.coords)
    if isinstance(objective, VonNeumann):
        return entropy_from_spectrum(np.linalg.eigvalsh(state.density_matrix().entries))
    if isinstance(objective, FiducialMeasurementEntropy):
        total = 0.0
        for m in objective.measurements:
            probs = np.array([evaluate(out.effect, state) for out in m.outcomes])
            total += entropy_from_spectrum(probs)
        return total
    return float(objective.value(state.coords))


def default_objective(model: ModelSpace) -> Objective:
    if model.kind == CLASSICAL:
        return Shannon()
    if model.kind == QUANTUM:
        return VonNeumann()
    raise IncompatibleObjective("polytope models need an explicit objective")


# ---------------------------------------------------------------------------
# Exponential-family machinery
# ---------------------------------------------------------------------------


def _functional_matrix(constraints: Sequence[LinearConstraint]) -> np.ndarray:
    return np.stack([c.functional for c in constraints]) if constraints else np.zeros((0, 0))


class _DualEvaluation:
    """Everything the Newton step needs at one multiplier vector."""

    def __init__(self, lnz: float, state_coords: np.ndarray, means: np.ndarray,
                 spectrum: np.ndarray, hessian: Callable[[], np.ndarray]):
        self.lnz = lnz
        self.state_coords = state_coords
        self.means = means
        self.spectrum = spectrum  # classical probabilities or quantum eigenvalues
        self._hessian = hessian
        self._h = None

    def hessian(self) -> np.ndarray:
        if self._h is None:
            self._h = self._hessian()
        return self._h


def _evaluate_classical(model, funcs: np.ndarray, lambdas: np.ndarray) -> _DualEvaluation:
    d = model.dim
    energy = -(lambdas @ funcs) if funcs.size else np.zeros(d)
    shift = float(np.max(energy))
    weights = np.exp(energy - shift)
    z = float(np.sum(weights))
    lnz = shift + float(np.log(z))
    p = weights / z
    means = funcs @ p if funcs.size else np.zeros(0)

    def hessian():
        centered = funcs - means[:, None]
        return (centered * p) @ centered.T

    return _DualEvaluation(lnz, p, means, p, hessian)


def _evaluate_quantum(model, operators: list[np.ndarray], lambdas: np.ndarray) -> _DualEvaluation:
    d = model.dim
    a = np.zeros((d, d), dtype=complex)
    for lam, op in zip(lambdas, operators):
        a -= lam * op
    try:
        k, u = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"eigensolver did not converge: {exc}") from exc
    shift = float(k[-1]) if len(lambdas) else 0.0
    weights = np.exp(k - shift)
    z = float(np.sum(weights))
    lnz = shift + float(np.log(z))
    q = weights / z
    rho = (u * q) @ u.conj().T
    rho = (rho + rho.conj().T) / 2.0
    rotated = [u.conj().T @ op @ u for op in operators]
    means = np.array([float(np.sum((r * q[None, :]).diagonal().real)) for r in rotated])

    def hessian():
        # Kubo-Mori covariance: divided differences of exp on the shifted
        # spectrum, contracted with the rotated constraint operators.
        x = k - shift
        dx = x[:, None] - x[None, :]
        close = np.abs(dx) <= 1e-9 * np.maximum(1.0, np.maximum(np.abs(x[:, None]), np.abs(x[None, :])))
        phi = np.where(close, np.exp((x[:, None] + x[None, :]) / 2.0), np.exp(x[:, None]) - np.exp(x[None, :]))
        phi = np.where(close, phi, phi / np.where(close, 1.0, dx))
        if rotated:
            stack = np.stack(rotated)
            h = np.einsum("iab,jab,ab->ij", stack.conj(), stack, phi).real / z
            return h - np.outer(means, means)
        return np.zeros((0, 0))

    return _DualEvaluation(lnz, model.matrix_to_coords(rho), means, q, hessian)


def _evaluate(model, constraints, lambdas) -> _DualEvaluation:
    if model.kind == CLASSICAL:
        return _evaluate_classical(model, _functional_matrix(constraints), np.asarray(lambdas, dtype=float))
    if model.kind == QUANTUM:
        ops = [model.coords_to_matrix(c.functional).entries for c in constraints]
        return _evaluate_quantum(model, ops, np.asarray(lambdas, dtype=float))
    raise Unsupported("partition functions are defined for classical and quantum models")


def partition_function(model: ModelSpace, constraints: Sequence[LinearConstraint], lambdas) -> tuple[float, float]:
    """(Z, ln Z) for Z = tr exp(-sum_i lambda_i R_i), spectrum pre-shifted.

    Z itself may overflow to inf for extreme multipliers; ln Z never does.
    """
    lambdas = np.asarray(lambdas, dtype=float)
    if len(lambdas) != len(constraints):
        raise ValueError("one multiplier per constraint")
    lnz = _evaluate(model, constraints, lambdas).lnz
    with np.errstate(over="ignore"):
        return float(np.exp(lnz)), lnz


def dual_gradient(model: ModelSpace, constraints: Sequence[LinearConstraint], targets, lambdas) -> np.ndarray:
    """Gradient of D(lambda) = ln Z + lambda . r, i.e. r_i - <R_i> at rho(lambda)."""
    targets = np.asarray(targets, dtype=float)
    lambdas = np.asarray(lambdas, dtype=float)
    if len(targets) != len(constraints) or len(lambdas) != len(constraints):
        raise ValueError("constraints, targets, and multipliers must align")
    return targets - _evaluate(model, constraints, lambdas).means


def _select_independent(funcs: np.ndarray, targets: np.ndarray, config: SolverConfig):
    """Greedy rank filter; returns (kept indices, dropped, contradiction?)."""
    kept: list[int] = []
    dropped: list[int] = []
    basis: list[np.ndarray] = []
    for i, f in enumerate(funcs):
        res = f.astype(float).copy()
        for q in basis:
            res -= (res @ q) * q
        if np.linalg.norm(res) > config.rank_pivot_tol * max(1.0, np.linalg.norm(f)):
            basis.append(res / np.linalg.norm(res))
            kept.append(i)
            continue
        coeff, *_ = np.linalg.lstsq(funcs[kept].T, f, rcond=None)
        implied = float(coeff @ targets[kept])
        if abs(implied - targets[i]) > config.residual_tol * max(1.0, abs(targets[i])):
            return kept, dropped, True
        dropped.append(i)
        warnings.warn(f"dropping redundant constraint {i} (consistent with kept set)")
    return kept, dropped, False


def _solution_from_eval(problem, ev, lambdas, iterations, status, diag):
    state = State(problem.model, ev.state_coords)
    residuals = np.array([c.residual(state) for c in problem.region.h_rep])
    return MaxEntSolution(
        state=state,
        multipliers=np.asarray(lambdas, dtype=float),
        lambda0=ev.lnz,
        entropy=entropy(problem.objective, state),
        iterations=iterations,
        residuals=residuals,
        status=status,
        diagnostics=diag,
    )


def solve_dual(problem: MaxEntProblem, config: SolverConfig = DEFAULT_SOLVER) -> MaxEntSolution:
    """Minimize the exponential-family dual by damped Newton iteration.

    Statuses: CONVERGED when the dual gradient drops below tolerance and the
    solved state has full support; BOUNDARY_ONLY when the gradient converges
    onto a rank-deficient limiting state (the infimum is unattained inside
    the exponential family) or multipliers diverge with vanishing residuals;
    INFEASIBLE on contradictions, an empty classical LP, or diverging
    multipliers with stalled residuals; NON_CONVERGENCE at the iteration cap.
    """
    if not isinstance(problem.objective, (Shannon, VonNeumann)):
        raise IncompatibleObjective("solve_dual handles Shannon and von Neumann objectives")
    region = problem.region
    diag = SolveDiagnostics()
    if region.known_empty:
        return MaxEntSolution(None, np.zeros(0), None, None, 0, None, SolveStatus.INFEASIBLE, diag)
    if not region.h_rep and region.v_rep is not None:
        raise UnsupportedRepresentation("solve_dual needs an H-representation")

    constraints = region.h_rep
    funcs = _functional_matrix(constraints)
    targets = np.array([c.target for c in constraints])

    if constraints:
        kept, dropped, contradiction = _select_independent(funcs, targets, config)
        if contradiction:
            return MaxEntSolution(None, np.zeros(0), None, None, 0, None, SolveStatus.INFEASIBLE, diag)
    else:
        kept, dropped = [], []
    diag.kept_indices = tuple(kept)
    diag.dropped_indices = tuple(dropped)
    active = [constraints[i] for i in kept]
    r = targets[kept] if kept else np.zeros(0)

    if problem.model.kind == CLASSICAL and active:
        rows = np.vstack([np.ones(problem.model.dim), funcs[kept]])
        rhs = np.concatenate([[1.0], r])
        _, witness = phase_one(rows, rhs)
        if witness is None:
            return MaxEntSolution(None, np.zeros(0), None, None, 0, None, SolveStatus.INFEASIBLE, diag)

    lambdas = np.zeros(len(active))
    ev = _evaluate(problem.model, active, lambdas)
    status = None
    iterations = 0
    initial_res = None

    for iterations in range(config.max_iter + 1):
        g = r - ev.means
        res_norm = float(np.max(np.abs(g))) if len(g) else 0.0
        if initial_res is None:
            initial_res = res_norm
        diag.dual_values.append(ev.lnz + float(lambdas @ r))
        diag.residual_norms.append(res_norm)
        if res_norm <= config.grad_tol:
            boundary = float(np.min(ev.spectrum)) < config.boundary_rank_tol
            status = SolveStatus.BOUNDARY_ONLY if boundary else SolveStatus.CONVERGED
            break
        if iterations == config.max_iter:
            status = SolveStatus.NON_CONVERGENCE
            break

        h = ev.hessian()
        diag.hessian_min_eigs.append(float(np.min(np.linalg.eigvalsh(h))))
        try:
            direction = np.linalg.solve(h + config.hessian_ridge * np.eye(len(g)), g)
        except np.linalg.LinAlgError:
            direction = g
        slope = float(g @ direction)
        if slope <= 0.0:  # not a descent direction for D; fall back to steepest descent
            direction = g
            slope = float(g @ g)
            diag.gradient_fallbacks += 1
        # Descent direction for D is -direction: D'(t) = -g . direction at t=0.
        d0 = ev.lnz + float(lambdas @ r)
        if slope <= 1e-14 * (1.0 + abs(d0)) and float(np.max(np.abs(direction))) <= 1.0:
            # Predicted decrease is below the float resolution of D, so the
            # line search cannot see it; this is the quadratic regime, where
            # the pure Newton step is safe and contracts the gradient.
            lambdas = lambdas - direction
            ev = _evaluate(problem.model, active, lambdas)
            continue
        step = 1.0
        accepted = None
        for _ in range(config.max_backtracks):
            trial = lambdas - step * direction
            ev_trial = _evaluate(problem.model, active, trial)
            if ev_trial.lnz + float(trial @ r) <= d0 - config.armijo_c * step * slope:
                accepted = (trial, ev_trial)
                break
            step /= 2.0
        if accepted is None or np.array_equal(accepted[0], lambdas):
            status = SolveStatus.NON_CONVERGENCE
            break
        lambdas, ev = accepted
        if float(np.max(np.abs(lambdas))) > config.multiplier_bound:
            res_now = float(np.max(np.abs(r - ev.means)))
            shrinking = res_now <= config.boundary_residual_tol or (
                initial_res > 0 and res_now < 0.1 * initial_res
            )
            status = SolveStatus.BOUNDARY_ONLY if shrinking else SolveStatus.INFEASIBLE
            break

    if status is SolveStatus.INFEASIBLE:
        return MaxEntSolution(None, lambdas, None, None, iterations, None, status, diag)
    return _solution_from_eval(problem, ev, lambdas, iterations, status, diag)


# ---------------------------------------------------------------------------
# Frank-Wolfe over mixing weights
# ---------------------------------------------------------------------------


def _objective_callables(problem: MaxEntProblem):
    obj = problem.objective
    if isinstance(obj, Shannon):
        def value(x):
            return entropy_from_spectrum(x)

        def grad(x):
            return -(1.0 + np.log(np.maximum(x, 1e-300)))

        return value, grad
    if isinstance(obj, FiducialMeasurementEntropy):
        effect_rows = [
            np.stack([out.effect.functional for out in m.outcomes]) for m in obj.measurements
        ]

        def value(x):
            total = 0.0
            for rows in effect_rows:
                total += entropy_from_spectrum(np.clip(rows @ x, 0.0, 1.0))
            return total

        def grad(x):
            g = np.zeros_like(x)
            for rows in effect_rows:
                probs = np.maximum(rows @ x, 1e-300)
                g -= (1.0 + np.log(probs)) @ rows
            return g

        return value, grad
    if isinstance(obj, CustomObjective):
        return obj.value, obj.gradient
    raise IncompatibleObjective("solve_polytope needs a gradient-equipped objective")


def solve_polytope(problem: MaxEntProblem, config: SolverConfig = DEFAULT_SOLVER) -> MaxEntSolution:
    """Frank-Wolfe maximization of a concave objective over the feasible hull.

    The linear subproblem is an LP over mixing weights solved by the
    two-phase simplex; the iterate stays a convex combination of feasible
    vertices throughout. Stops when the Frank-Wolfe gap falls below the
    configured tolerance.
    """
    if problem.model.kind not in (CLASSICAL, POLYTOPE):
        raise IncompatibleObjective("solve_polytope handles classical and polytope models")
    if isinstance(problem.objective, VonNeumann):
        raise IncompatibleObjective("von Neumann entropy does not apply here")
    region = problem.region
    diag = SolveDiagnostics()
    if region.known_empty:
        return MaxEntSolution(None, np.zeros(0), None, None, 0, None, SolveStatus.INFEASIBLE, diag)
    if not region.h_rep and region.v_rep is not None:
        raise UnsupportedRepresentation("solve_polytope needs an H-representation")

    if problem.model.kind == CLASSICAL:
        v = np.eye(problem.model.dim)
    else:
        v = np.asarray(problem.model.vertices)
    n = v.shape[0]
    rows = [np.ones(n)]
    rhs = [1.0]
    for c in region.h_rep:
        rows.append(v @ c.functional)
        rhs.append(c.target)
    a = np.vstack(rows)
    b = np.array(rhs)

    residual, _ = phase_one(a, b, pivot_tol=config.rank_pivot_tol)
    if residual > 1e-8:
        return MaxEntSolution(None, np.zeros(0), None, None, 0, None, SolveStatus.INFEASIBLE, diag)

    # Interior-ish start: average the vertices that maximize each weight.
    starts = []
    for i in range(n):
        c_obj = np.zeros(n)
        c_obj[i] = 1.0
        result = solve_lp(c_obj, a, b, maximize=True)
        if result.status == OPTIMAL:
            starts.append(result.x)
    x = np.mean(starts, axis=0) @ v

    value, grad = _objective_callables(problem)
    status = SolveStatus.NON_CONVERGENCE
    iterations = 0
    for iterations in range(1, config.fw_max_iter + 1):
        g = grad(x)
        lp = solve_lp(v @ g, a, b, maximize=True)
        if lp.status != OPTIMAL:
            status = SolveStatus.NON_CONVERGENCE
            break
        s = lp.x @ v
        gap = float(g @ (s - x))
        diag.fw_gap = gap
        if gap <= config.fw_gap_tol:
            status = SolveStatus.CONVERGED
            break
        f0 = value(x)
        step = 1.0
        moved = False
        for _ in range(config.max_backtracks):
            trial = x + step * (s - x)
            if value(trial) >= f0 + config.armijo_c * step * gap:
                x = trial
                moved = True
                break
            step /= 2.0
        if not moved:
            status = SolveStatus.CONVERGED if gap <= 10 * config.fw_gap_tol else SolveStatus.NON_CONVERGENCE
            break

    state = State(problem.model, x)
    residuals = np.array([c.residual(state) for c in region.h_rep])
    return MaxEntSolution(
        state=state,
        multipliers=np.zeros(0),
        lambda0=None,
        entropy=entropy(problem.objective, state),
        iterations=iterations,
        residuals=residuals,
        status=status,
        diagnostics=diag,
    )


def solve(problem: MaxEntProblem, config: SolverConfig = DEFAULT_SOLVER) -> MaxEntSolution:
    """Route to the model-appropriate solver."""
    if isinstance(problem.objective, (Shannon, VonNeumann)):
        return solve_dual(problem, config)
    return solve_polytope(problem, config)
