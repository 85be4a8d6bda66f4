"""Trust-region drivers with monotone and non-monotone step acceptance,
plus steepest-descent and conjugate-gradient baselines.

The three trust-region variants share one loop and differ only in the
reference matrix the reduction ratio compares against:

* ``trm``  — the current values F(x_k),
* ``max``  — a componentwise maximum over a sliding window of accepted
  iterates, used while the selected index tuple has not changed,
* ``avg``  — an exponentially weighted running average, updated on every
  iteration (successful or not) while the tuple has never changed.

With window depth 0 (``max``) or weight 0 (``avg``) both reduce exactly,
bitwise, to the monotone driver.
"""

from __future__ import annotations

import logging
import time
from collections import deque
from dataclasses import dataclass, replace

import numpy as np

from .cone import Cone
from .partition import PartitionCapError, partition_iter, structure_from_values
from .problems import DerivativeTable, DomainError, SetValuedProblem
from .subproblem import (
    InnerSolveFailure,
    ModelSet,
    predicted_reduction,
    theta_and_step,
)

log = logging.getLogger(__name__)

VARIANTS = ("trm", "max", "avg", "sd", "cg")

OMEGA_UNDERFLOW = 1e-14


class SolverInternalError(RuntimeError):
    """A nonpositive predicted reduction reached the ratio computation."""


@dataclass(frozen=True)
class SolverConfig:
    """Algorithm parameters; defaults follow the benchmark setup."""

    variant: str = "trm"
    omega0: float = 1.0
    omega_max: float = 20.0
    eps: float = 1e-3
    eta1: float = 0.001
    eta2: float = 0.75
    gamma1: float = 0.4
    gamma2: float = 0.9
    n_memory: int = 10          # max-type window depth (4 is a fast preset)
    mu: float = 0.5             # avg-type weight, constant schedule
    mu_min: float = 0.0
    mu_max: float = 1.0
    it_max: int = 100
    rho_armijo: float = 1e-4    # sufficient-decrease slope for SD and CG
    nu: float = 0.5             # backtracking factor
    sigma: float = 0.1          # CG beta damping
    value_tol: float | None = None
    partition_cap: int = 4096

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}")
        if not (0.0 < self.eta1 < self.eta2 < 1.0):
            raise ValueError("need 0 < eta1 < eta2 < 1")
        if not (0.0 < self.gamma1 < self.gamma2 < 1.0):
            raise ValueError("need 0 < gamma1 < gamma2 < 1")
        if not (0.0 < self.omega0 <= self.omega_max):
            raise ValueError("need 0 < omega0 <= omega_max")
        if not (self.mu_min <= self.mu <= self.mu_max and 0.0 <= self.mu < 1.0):
            raise ValueError("need mu in [mu_min, mu_max] and 0 <= mu < 1")
        if self.n_memory < 0 or self.it_max < 1 or self.eps <= 0.0:
            raise ValueError("bad n_memory, it_max, or eps")


@dataclass
class IterationRecord:
    k: int
    x: np.ndarray
    omega: float
    t: float
    a: tuple
    rho: tuple
    accepted: bool
    step_norm: float
    reference: np.ndarray | None
    hessian_pd: bool | None = None
    step_bound_ratio: float | None = None


@dataclass
class RunResult:
    converged: bool
    iterations: int
    wall_time: float
    final_point: np.ndarray
    final_t: float
    trace: list
    algorithm: str
    final_omega: float | None = None
    mean_step_size: float = 0.0
    diagnostic: str | None = None

    def summary(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "converged": self.converged,
            "iterations": self.iterations,
            "wall_time": self.wall_time,
            "final_point": np.asarray(self.final_point).tolist(),
            "final_t": self.final_t,
            "final_omega": self.final_omega,
            "mean_step_size": self.mean_step_size,
            "diagnostic": self.diagnostic,
        }


class NonMonotoneMemory:
    """Reference bookkeeping for the two non-monotone acceptance rules.

    The max-type window holds the value matrices of the last accepted
    iterates (it advances only when x changes) and is used while the
    selected tuple matches the tuples of the last N_k iterations.  The
    avg-type average C and weight q advance on every iteration; a tuple
    change at any iteration resets them to the current values for good.
    """

    def __init__(self, variant: str, n_memory: int, mu: float):
        self.variant = variant
        self.mu = mu
        self.hist: deque = deque(maxlen=max(n_memory, 0))
        self.a_recent: deque = deque(maxlen=max(n_memory, 0))
        self.N = 0
        self.n_hat = n_memory
        self.C: np.ndarray | None = None
        self.q = 1.0
        self.streak_all = True
        self._last_a: tuple | None = None
        self._ref: np.ndarray | None = None
        self.k = 0

    def begin_iteration(self, F_x: np.ndarray, a: tuple) -> None:
        """Fix the full (p, m) reference matrix for this iteration."""
        if self.variant == "max":
            if all(t == a for t in self.a_recent):
                self._ref = np.maximum.reduce([F_x, *self.hist])
            else:
                self._ref = F_x
        elif self.variant == "avg":
            if self._last_a is not None and a != self._last_a:
                self.streak_all = False
            avg_reference_update(self, F_x)
            self._ref = self.C
        else:
            self._ref = F_x
        self._last_a = a

    def reference_row(self, i: int) -> np.ndarray:
        return self._ref[i - 1]

    def reference_rows(self, a: tuple) -> np.ndarray:
        return self._ref[[ai - 1 for ai in a]]

    def reference_full(self) -> np.ndarray:
        return np.array(self._ref, copy=True)

    def end_iteration(self, F_x: np.ndarray, a: tuple, accepted: bool) -> None:
        if self.variant == "max":
            if accepted:
                self.hist.append(F_x.copy())
            self.a_recent.append(a)
            self.N = min(self.N + 1, self.n_hat)
        self.k += 1


def avg_reference_update(memory: NonMonotoneMemory, F_current: np.ndarray,
                         accepted: bool | None = None) -> NonMonotoneMemory:
    """Advance the averaged reference; applied on every iteration.

    While the tuple streak holds, C' = (mu q / q') C + F_current / q' with
    q' = mu q + 1; otherwise C' = F_current and q' = 1.  The update does
    not depend on whether the step was accepted.
    """
    if memory.C is None or not memory.streak_all:
        memory.C = F_current.copy()
        memory.q = 1.0
        return memory
    q_new = memory.mu * memory.q + 1.0
    memory.C = (memory.mu * memory.q / q_new) * memory.C + (1.0 / q_new) * F_current
    memory.q = q_new
    return memory


def reduction_ratios(variant: str, memory: NonMonotoneMemory, F_new: np.ndarray,
                     a: tuple, s: np.ndarray, models: ModelSet, cone: Cone) -> np.ndarray:
    """Per-block ratios of scalarized actual to predicted reduction."""
    rho = np.empty(len(a))
    for j, ai in enumerate(a):
        pred = predicted_reduction(models, cone, j, s)
        if pred <= 0.0:
            raise SolverInternalError(
                f"nonpositive predicted reduction {pred:.3e} for block {j}"
            )
        actual = -cone.scalarize(F_new[ai - 1] - memory.reference_row(ai))
        rho[j] = actual / pred
    return rho


def accept_and_update(rho: np.ndarray, omega: float, config: SolverConfig):
    """Step acceptance and the deterministic radius update.

    All ratios >= eta2 doubles the radius (capped); acceptance with some
    ratio below eta2 keeps it; rejection shrinks to the midpoint of
    [gamma1 omega, gamma2 omega].
    """
    rho = np.asarray(rho, dtype=float)
    accepted = bool(np.all(rho >= config.eta1))
    if accepted and np.all(rho >= config.eta2):
        omega_next = min(2.0 * omega, config.omega_max)
    elif accepted:
        omega_next = omega
    else:
        omega_next = 0.5 * (config.gamma1 + config.gamma2) * omega
    return accepted, omega_next


def _step_bound_diagnostic(models: ModelSet, cone: Cone, s: np.ndarray, t: float):
    """Optional report: with positive-definite Hessians, compare ||s||^2
    against (4/T)|t| where T is built from a per-model curvature bound."""
    try:
        h = models.H.reshape(-1, models.H.shape[2], models.H.shape[3])
        eigs = np.linalg.eigvalsh(h)
    except np.linalg.LinAlgError:
        return None, None
    if eigs[:, 0].min() <= 0.0:
        return False, None
    lam_max = eigs[:, -1].reshape(models.omega, -1).max(axis=0)
    big_t = -cone.scalarize(-lam_max)
    if big_t <= 0.0 or t >= 0.0:
        return True, None
    return True, float(np.dot(s, s) * big_t / (4.0 * abs(t)))


def run(problem: SetValuedProblem, cone: Cone, x0, config: SolverConfig,
        observer=None) -> RunResult:
    """Trust-region loop: partition, trial step, ratios, radius update.

    Trial steps solve the box-constrained subproblem at the current
    radius, and the run stops when its value satisfies |t| < eps; the
    next iterate always stays inside the domain box.
    """
    if config.variant in ("sd", "cg"):
        return _run_linesearch(problem, cone, x0, config, observer)
    lo, hi = problem.domain_box
    x = np.asarray(x0, dtype=float).reshape(problem.n)
    if np.any(x < lo) or np.any(x > hi):
        raise ValueError("x0 lies outside the domain box")
    table = DerivativeTable(problem)
    memory = NonMonotoneMemory(config.variant, config.n_memory if config.variant == "max" else 0,
                               config.mu)
    omega = config.omega0
    trace: list[IterationRecord] = []
    converged = False
    diagnostic = None
    t_last = float("nan")
    iterations = config.it_max
    start = time.perf_counter()
    underflow_logged = False
    for k in range(config.it_max):
        try:
            F_x = problem.eval_all(x)
            structure = structure_from_values(F_x, cone, config.value_tol)
            sol = theta_and_step(problem, cone, x, structure, omega, box=(lo, hi),
                                 table=table, cap=config.partition_cap)
        except (DomainError, PartitionCapError, InnerSolveFailure) as exc:
            diagnostic = f"{type(exc).__name__}: {exc}"
            iterations = k
            break
        t_last = sol.t_star
        if not sol.feasible and diagnostic is None:
            diagnostic = "inner solver failed for every partition element"
        if abs(sol.t_star) < config.eps:
            converged = True
            iterations = k
            break
        memory.begin_iteration(F_x, sol.a_star)
        x_trial = np.clip(x + sol.s_star, lo, hi)
        try:
            F_new = problem.eval_all(x_trial)
            rho = reduction_ratios(config.variant, memory, F_new, sol.a_star,
                                   sol.s_star, sol.models, cone)
        except (DomainError, SolverInternalError) as exc:
            diagnostic = f"{type(exc).__name__}: {exc}"
            iterations = k
            break
        accepted, omega_next = accept_and_update(rho, omega, config)
        pd_flag, bound_ratio = _step_bound_diagnostic(sol.models, cone, sol.s_star, sol.t_star)
        record = IterationRecord(
            k=k, x=x.copy(), omega=omega, t=sol.t_star, a=sol.a_star,
            rho=tuple(float(r) for r in rho), accepted=accepted,
            step_norm=float(np.linalg.norm(x_trial - x)) if accepted else 0.0,
            reference=memory.reference_rows(sol.a_star),
            hessian_pd=pd_flag, step_bound_ratio=bound_ratio,
        )
        trace.append(record)
        if observer is not None:
            observer({
                "record": record, "F_x": F_x, "F_new": F_new,
                "reference_full": memory.reference_full(),
                "C": None if memory.C is None else memory.C.copy(),
                "structure": structure, "solution": sol,
            })
        memory.end_iteration(F_x, sol.a_star, accepted)
        if accepted:
            x = x_trial
        omega = omega_next
        if omega < OMEGA_UNDERFLOW and not underflow_logged:
            log.warning("trust radius underflow (%.3e) at iteration %d", omega, k)
            diagnostic = diagnostic or "omega_underflow"
            underflow_logged = True
    wall = time.perf_counter() - start
    steps = [r.step_norm for r in trace]
    return RunResult(
        converged=converged, iterations=iterations, wall_time=wall,
        final_point=x, final_t=t_last, trace=trace, algorithm=config.variant,
        final_omega=omega, mean_step_size=float(np.mean(steps)) if steps else 0.0,
        diagnostic=diagnostic,
    )


# ---------------------------------------------------------------------------
# first-order baselines

def _project_simplex(y: np.ndarray) -> np.ndarray:
    u = np.sort(y)[::-1]
    css = np.cumsum(u)
    idx = np.arange(1, y.size + 1)
    rho = np.nonzero(u * idx > css - 1.0)[0][-1]
    theta = (css[rho] - 1.0) / (rho + 1.0)
    return np.maximum(y - theta, 0.0)


def _prox_direction(rows: np.ndarray, n_iter: int = 400):
    """Solve min_s max(rows @ s) + ||s||^2 / 2 through its simplex dual."""
    q = rows @ rows.T
    lam = np.full(rows.shape[0], 1.0 / rows.shape[0])
    if rows.shape[0] > 1:
        lip = float(np.linalg.eigvalsh(q)[-1]) + 1e-12
        for _ in range(n_iter):
            lam = _project_simplex(lam - (q @ lam) / lip)
    v = -rows.T @ lam
    val = float(np.max(rows @ v) + 0.5 * v @ v)
    return v, val


def _scalarized_rows(cone: Cone, jac: np.ndarray, a: tuple) -> np.ndarray:
    blocks = jac[[ai - 1 for ai in a]]
    return np.einsum("lm,jmn->jln", cone.dual_normals, blocks).reshape(-1, jac.shape[2])


def _run_linesearch(problem: SetValuedProblem, cone: Cone, x0,
                    config: SolverConfig, observer=None) -> RunResult:
    """Shared loop for SD and CG with Armijo backtracking on the box."""
    lo, hi = problem.domain_box
    x = np.asarray(x0, dtype=float).reshape(problem.n)
    if np.any(x < lo) or np.any(x > hi):
        raise ValueError("x0 lies outside the domain box")
    table = DerivativeTable(problem)
    use_cg = config.variant == "cg"
    trace: list[IterationRecord] = []
    converged = False
    diagnostic = None
    v_norm = float("nan")
    iterations = config.it_max
    d_prev = None
    v_prev = None
    start = time.perf_counter()
    for k in range(config.it_max):
        try:
            F_x = problem.eval_all(x)
            structure = structure_from_values(F_x, cone, config.value_tol)
            jac = table.jacobians(x)
        except (DomainError, PartitionCapError) as exc:
            diagnostic = f"{type(exc).__name__}: {exc}"
            iterations = k
            break
        best = None
        try:
            for a in partition_iter(structure, cap=config.partition_cap):
                rows = _scalarized_rows(cone, jac, a)
                v, val = _prox_direction(rows)
                if best is None or val < best[0] - 1e-12:
                    best = (val, tuple(a), v)
        except PartitionCapError as exc:
            diagnostic = f"PartitionCapError: {exc}"
            iterations = k
            break
        _, a, v = best
        v_norm = float(np.linalg.norm(v))
        if v_norm < config.eps:
            converged = True
            iterations = k
            break
        blocks = jac[[ai - 1 for ai in a]]
        if use_cg:
            if d_prev is None:
                d = v
            else:
                denom = float(d_prev @ v_prev)
                beta_cd = float(v @ v) / denom if denom > 1e-300 else 0.0
                d = v + 0.99 * (1.0 - config.sigma) * beta_cd * d_prev
                if not all(cone.scalarize(blocks[j] @ d) < 0.0 for j in range(len(a))):
                    d = v  # restart when the combined direction loses descent
        else:
            d = v
        slopes = np.array([cone.scalarize(blocks[j] @ d) for j in range(len(a))])
        step = 1.0
        moved = False
        x_new = x
        while step > 1e-14:
            cand = np.clip(x + step * d, lo, hi)
            try:
                F_cand = problem.eval_all(cand)
            except DomainError:
                step *= config.nu
                continue
            decrease = np.array([
                cone.scalarize(F_cand[ai - 1] - F_x[ai - 1]) for ai in a
            ])
            if np.all(decrease <= config.rho_armijo * step * slopes):
                moved = True
                x_new = cand
                break
            step *= config.nu
        record = IterationRecord(
            k=k, x=x.copy(), omega=step if moved else 0.0, t=-v_norm, a=a,
            rho=(), accepted=moved,
            step_norm=float(np.linalg.norm(x_new - x)) if moved else 0.0,
            reference=None,
        )
        trace.append(record)
        if observer is not None:
            observer({"record": record, "F_x": F_x, "direction": v})
        if moved:
            x = x_new
            d_prev, v_prev = d, v
        else:
            d_prev = v_prev = None  # restart after a failed line search
    wall = time.perf_counter() - start
    steps = [r.step_norm for r in trace]
    return RunResult(
        converged=converged, iterations=iterations, wall_time=wall,
        final_point=x, final_t=-v_norm, trace=trace, algorithm=config.variant,
        final_omega=None, mean_step_size=float(np.mean(steps)) if steps else 0.0,
        diagnostic=diagnostic,
    )


def run_sd(problem, cone, x0, config: SolverConfig) -> RunResult:
    return _run_linesearch(problem, cone, x0, replace(config, variant="sd"))


def run_cg(problem, cone, x0, config: SolverConfig) -> RunResult:
    return _run_linesearch(problem, cone, x0, replace(config, variant="cg"))
