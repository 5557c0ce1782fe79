"""Explicit Runge-Kutta integration with its exact discrete adjoint.

Serves as a real step engine behind the executor: whatever the
checkpointing policy, every forward step is re-executed from identical
inputs, so the gradient of the objective with respect to the initial
state is bitwise identical to the full-storage result.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .core import CheckpointRecord, DomainError, SchemeInfo
from .consultant import Policy, consultant_schedule, full_storage_schedule
from .executor import ExecutionMetrics, StepEngine, execute


@dataclass(frozen=True)
class ButcherTableau:
    """Coefficients of an explicit scheme: strictly lower triangular a."""

    name: str
    a: tuple
    b: tuple

    def __post_init__(self):
        n = len(self.b)
        if len(self.a) != n:
            raise DomainError("tableau a must have one row per stage")
        for i, row in enumerate(self.a):
            if len(row) != n:
                raise DomainError("tableau a must be square")
            if any(row[j] != 0.0 for j in range(i, n)):
                raise DomainError("explicit tableau needs strictly lower triangular a")

    @property
    def stages(self) -> int:
        return len(self.b)

    @property
    def c(self) -> tuple:
        return tuple(sum(row) for row in self.a)

    @property
    def stiffly_accurate(self) -> bool:
        """True when the last stage equals the step's solution."""
        n = self.stages
        last = self.a[n - 1]
        return self.b[n - 1] == 0.0 and all(self.b[j] == last[j] for j in range(n - 1))

    def scheme_info(self) -> SchemeInfo:
        return SchemeInfo(self.stages, self.stiffly_accurate)


RK4 = ButcherTableau(
    "rk4",
    a=((0.0, 0.0, 0.0, 0.0), (0.5, 0.0, 0.0, 0.0), (0.0, 0.5, 0.0, 0.0), (0.0, 0.0, 1.0, 0.0)),
    b=(1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0),
)

MIDPOINT = ButcherTableau("midpoint", a=((0.0, 0.0), (0.5, 0.0)), b=(0.0, 1.0))

# first-order scheme with a redundant final stage equal to the solution;
# gives a stiffly accurate explicit tableau for exercising that code path
EULER_SA2 = ButcherTableau("euler-sa2", a=((0.0, 0.0), (1.0, 0.0)), b=(1.0, 0.0))

TABLEAUS = {t.name: t for t in (RK4, MIDPOINT, EULER_SA2)}


@dataclass(frozen=True)
class OdeProblem:
    """Autonomous-or-not ODE with objective psi(u_N) and transposed-Jacobian
    products for the adjoint sweep."""

    dimension: int
    rhs: Callable[[float, np.ndarray], np.ndarray]
    rhs_jacobian_transpose_apply: Callable[[float, np.ndarray, np.ndarray], np.ndarray]
    initial_state: np.ndarray
    step_size: float
    steps: int
    objective: Callable[[np.ndarray], float]
    objective_gradient: Callable[[np.ndarray], np.ndarray]
    t0: float = 0.0


@dataclass(frozen=True)
class StageSet:
    """Stage states of one step (step_index - 1 -> step_index)."""

    step_index: int
    stages: tuple


def erk_step(problem: OdeProblem, tableau: ButcherTableau, u_n: np.ndarray, t_n: float):
    """One explicit step: returns (u_{n+1}, stage set of the step)."""
    h = problem.step_size
    n = tableau.stages
    stages = []
    f_vals = []
    for i in range(n):
        acc = u_n.copy()
        for j in range(i):
            a_ij = tableau.a[i][j]
            if a_ij != 0.0:
                acc += h * a_ij * f_vals[j]
        stages.append(acc)
        f_vals.append(problem.rhs(t_n + tableau.c[i] * h, acc))
    u_next = u_n.copy()
    for i in range(n):
        if tableau.b[i] != 0.0:
            u_next += h * tableau.b[i] * f_vals[i]
    if not np.all(np.isfinite(u_next)):
        raise FloatingPointError("time step produced a non-finite state")
    return u_next, stages


def erk_adjoint_step(
    problem: OdeProblem,
    tableau: ButcherTableau,
    stage_set: StageSet,
    t_n: float,
    lam_next: np.ndarray,
) -> np.ndarray:
    """Exact transpose of the step's linearization applied to lam_next:
      lam_stage_i = h f_u^T(U_i) (b_i lam_{n+1} + sum_{j>i} a_ji lam_stage_j)
      lam_n       = lam_{n+1} + sum_j lam_stage_j
    """
    h = problem.step_size
    n = tableau.stages
    stages = stage_set.stages
    if len(stages) != n:
        raise DomainError("stage set does not match the tableau")
    lam_stage = [None] * n
    for i in range(n - 1, -1, -1):
        w = tableau.b[i] * lam_next
        for j in range(i + 1, n):
            a_ji = tableau.a[j][i]
            if a_ji != 0.0:
                w = w + a_ji * lam_stage[j]
        t_i = t_n + tableau.c[i] * h
        lam_stage[i] = h * problem.rhs_jacobian_transpose_apply(t_i, stages[i], w)
    lam = lam_next.copy()
    for contrib in lam_stage:
        lam += contrib
    return lam


@dataclass
class AdjointEngine(StepEngine):
    """Step engine that integrates the ODE forward and accumulates the
    adjoint backward, storing checkpoint payloads per record kind."""

    problem: OdeProblem
    tableau: ButcherTableau
    u: np.ndarray = field(init=False)
    lam: Optional[np.ndarray] = field(init=False, default=None)
    trailing: Optional[StageSet] = field(init=False, default=None)
    storage: dict = field(init=False, default_factory=dict)

    def __post_init__(self):
        self.u = self.problem.initial_state.copy()

    def _time_of(self, index: int) -> float:
        return self.problem.t0 + index * self.problem.step_size

    def forward_step(self, index: int) -> None:
        u_next, stages = erk_step(self.problem, self.tableau, self.u, self._time_of(index - 1))
        self.u = u_next
        self.trailing = StageSet(index, tuple(stages))

    def reverse_step(self, index: int) -> None:
        if self.lam is None:
            self.lam = np.asarray(self.problem.objective_gradient(self.u), dtype=float)
        stage_set = self.trailing
        assert stage_set is not None and stage_set.step_index == index
        self.lam = erk_adjoint_step(
            self.problem, self.tableau, stage_set, self._time_of(index - 1), self.lam
        )

    def store(self, record: CheckpointRecord) -> None:
        payload = {}
        if record.kind.has_solution:
            payload["u"] = self.u.copy()
        if record.kind.has_stages:
            payload["stages"] = self.trailing
        self.storage[record] = payload

    def restore(self, record: CheckpointRecord) -> None:
        payload = self.storage[record]
        if record.kind.has_solution:
            self.u = payload["u"].copy()
            if "stages" not in payload:
                self.trailing = None
        if record.kind.has_stages:
            self.trailing = payload["stages"]
            if "u" not in payload:
                # last stage of a stiffly accurate scheme is the solution
                if self.tableau.stiffly_accurate:
                    self.u = payload["stages"].stages[-1].copy()

    def discard(self, record: CheckpointRecord) -> None:
        self.storage.pop(record, None)

    @property
    def gradient(self) -> np.ndarray:
        assert self.lam is not None, "no reverse sweep has run"
        return self.lam


def gradient_via_policy(
    problem: OdeProblem,
    tableau: ButcherTableau,
    policy: Policy,
    s_units: int = 0,
):
    """Gradient of psi(u_N) w.r.t. u_0 under the given checkpointing policy.

    Returns (gradient, metrics).  Full storage ignores s_units.
    """
    scheme = tableau.scheme_info()
    if policy is Policy.FULL_STORAGE:
        schedule = full_storage_schedule(problem.steps, scheme)
    else:
        schedule = consultant_schedule(problem.steps, s_units, scheme, policy)
    engine = AdjointEngine(problem, tableau)
    metrics = execute(schedule, engine)
    return engine.gradient, metrics


def finite_difference_gradient(
    problem: OdeProblem, tableau: ButcherTableau, eps: float = 1e-6
) -> np.ndarray:
    """Central-difference gradient of psi(u_N) w.r.t. u_0 (the oracle)."""

    def run(u0):
        u = u0.copy()
        for k in range(problem.steps):
            u, _ = erk_step(problem, tableau, u, problem.t0 + k * problem.step_size)
        return problem.objective(u)

    base = problem.initial_state
    grad = np.zeros_like(base)
    for i in range(base.size):
        up = base.copy()
        up[i] += eps
        down = base.copy()
        down[i] -= eps
        grad[i] = (run(up) - run(down)) / (2 * eps)
    return grad


def forward_solution(problem: OdeProblem, tableau: ButcherTableau) -> np.ndarray:
    u = problem.initial_state.copy()
    for k in range(problem.steps):
        u, _ = erk_step(problem, tableau, u, problem.t0 + k * problem.step_size)
    return u


def linear_scalar_problem(a: float = -0.7, steps: int = 30, h: float = 0.05) -> OdeProblem:
    """u' = a u with psi = u_N; gradient has the closed form R(ha)^N."""

    def rhs(t, u):
        return a * u

    def jac_t(t, u, v):
        return a * v

    return OdeProblem(
        dimension=1,
        rhs=rhs,
        rhs_jacobian_transpose_apply=jac_t,
        initial_state=np.array([1.0]),
        step_size=h,
        steps=steps,
        objective=lambda u: float(u[0]),
        objective_gradient=lambda u: np.array([1.0]),
    )


def reaction_1d_problem(cells: int = 16, steps: int = 30, h: float = 0.02) -> OdeProblem:
    """Two-species reaction-diffusion line (periodic), dimension 2*cells.

    u' = d1 lap(u) - u v^2 + gamma (1 - u)
    v' = d2 lap(v) + u v^2 - (gamma + kappa) v
    psi = 0.5 ||U - U_obs||^2 against a fixed synthetic observation.
    """
    d1, d2, gamma, kappa = 0.08, 0.04, 0.04, 0.06
    x = np.arange(cells) / cells
    diff_scale = 0.5 * cells  # keeps the explicit schemes comfortably stable

    def lap(w):
        return (np.roll(w, 1) + np.roll(w, -1) - 2 * w) * diff_scale

    def split(state):
        return state[:cells], state[cells:]

    def rhs(t, state):
        u, v = split(state)
        uv2 = u * v * v
        du = d1 * lap(u) - uv2 + gamma * (1 - u)
        dv = d2 * lap(v) + uv2 - (gamma + kappa) * v
        return np.concatenate([du, dv])

    def jac_t(t, state, w):
        u, v = split(state)
        wu, wv = split(w)
        # transpose of [[d1 L - v^2 - gamma, -2uv], [v^2, d2 L + 2uv - gamma - kappa]]
        out_u = d1 * lap(wu) - v * v * wu - gamma * wu + v * v * wv
        out_v = -2 * u * v * wu + d2 * lap(wv) + 2 * u * v * wv - (gamma + kappa) * wv
        return np.concatenate([out_u, out_v])

    v0 = 0.25 * np.sin(2 * np.pi * x) ** 2
    u0 = 1.0 - 2.0 * v0
    initial = np.concatenate([u0, v0])
    observed = np.concatenate([0.9 + 0.05 * np.cos(2 * np.pi * x), 0.1 + 0.03 * np.sin(4 * np.pi * x)])

    def objective(state):
        return 0.5 * float(np.sum((state - observed) ** 2))

    def objective_gradient(state):
        return state - observed

    return OdeProblem(
        dimension=2 * cells,
        rhs=rhs,
        rhs_jacobian_transpose_apply=jac_t,
        initial_state=initial,
        step_size=h,
        steps=steps,
        objective=objective,
        objective_gradient=objective_gradient,
    )


PROBLEMS = {
    "linear-scalar": linear_scalar_problem,
    "reaction-1d": reaction_1d_problem,
}
