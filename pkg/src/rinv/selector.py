"""Barrier-driven subset selection.

The selector grows A = sum_{i in sigma} (L v_i)(L v_i)^T one rank-one
update at a time while sliding a barrier b downward by a fixed delta per
step. The potential tr(L^T (A - bI)^{-1} L) never increases; every nonzero
eigenvalue of A stays above the barrier, which at the end sits above
(1 - eps)^2 ||L||_F^2 / m.
"""

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from .decomposition import Decomposition, validate
from .errors import (
    InfeasibilityError,
    InvariantViolation,
    ParameterError,
    SingularShiftError,
    ZeroOperatorError,
)
from .matrix_core import (
    check_interlacing,
    frobenius_norm_sq,
    shifted_inverse,
    spectral_norm,
)
from .tolerances import Tolerances, default_tolerances

PIVOT_FIRST = "first"
PIVOT_GREEDY = "greedy"


@dataclass(frozen=True)
class Schedule:
    """Barrier walk parameters: start b0, per-step drop delta, step count."""

    epsilon: float
    b0: float
    delta: float
    steps_t: int
    m: int
    frob_sq: float
    spec_sq: float

    @property
    def guarantee_bound(self) -> float:
        """(1 - eps)^2 ||L||_F^2 / m, the promised lower bound on lambda_min."""
        return (1.0 - self.epsilon) ** 2 * self.frob_sq / self.m

    @property
    def vacuous(self) -> bool:
        return self.steps_t == 0


@dataclass
class SelectionState:
    """Running state: accumulated A, chosen indices, current barrier."""

    A: np.ndarray
    sigma: List[int]
    barrier_b: float
    step_k: int


@dataclass(frozen=True)
class FeasibilityRecord:
    quadform: float
    potential_after_add: float
    feasible: bool
    reason: str = ""


@dataclass(frozen=True)
class PreconditionDiagnostics:
    potential_ok: bool
    barrier_window_ok: bool
    kernel_mass_ok: bool
    averaging_ok: bool

    def all_ok(self) -> bool:
        return (
            self.potential_ok
            and self.barrier_window_ok
            and self.kernel_mass_ok
            and self.averaging_ok
        )


@dataclass(frozen=True)
class StepTrace:
    """Per-step diagnostics recorded by the selection loop."""

    step: int
    chosen_index: int
    barrier_before: float
    barrier_after: float
    phi_before: float
    phi_after: float
    phi_image: float
    phi_kernel: float
    kernel_frob_sq: float
    candidates_scanned: int
    quadform_margin: float
    potential_margin: float
    preconditions: PreconditionDiagnostics

    def to_dict(self) -> dict:
        return {
            "step": self.step,
            "chosen_index": self.chosen_index + 1,  # 1-based for output
            "barrier_before": self.barrier_before,
            "barrier_after": self.barrier_after,
            "phi_before": self.phi_before,
            "phi_after": self.phi_after,
            "phi_image": self.phi_image,
            "phi_kernel": self.phi_kernel,
            "kernel_frob_sq": self.kernel_frob_sq,
            "candidates_scanned": self.candidates_scanned,
            "quadform_margin": self.quadform_margin,
            "potential_margin": self.potential_margin,
            "preconditions": {
                "potential_ok": self.preconditions.potential_ok,
                "barrier_window_ok": self.preconditions.barrier_window_ok,
                "kernel_mass_ok": self.preconditions.kernel_mass_ok,
                "averaging_ok": self.preconditions.averaging_ok,
            },
        }


@dataclass(frozen=True)
class SelectionResult:
    sigma: List[int]
    schedule: Schedule
    traces: List[StepTrace] = field(default_factory=list)
    vacuous: bool = False


def compute_schedule(L, m: int, epsilon: float, tol: Tolerances | None = None) -> Schedule:
    """Barrier schedule for operator L and m candidate vectors.

    b0 = (1-eps) ||L||_F^2 / m, delta = (1-eps) ||L||_2^2 / (eps m), and
    t = floor(eps^2 ||L||_F^2 / ||L||_2^2). When eps^2 times the stable
    rank is below 1 the schedule is vacuous (t = 0).
    """
    if not (0.0 < epsilon < 1.0):
        raise ParameterError(f"epsilon must be in (0, 1), got {epsilon}")
    L = np.asarray(L, dtype=float)
    spec = spectral_norm(L)
    if spec == 0.0:
        raise ZeroOperatorError("cannot schedule the zero operator")
    frob_sq = frobenius_norm_sq(L)
    spec_sq = spec * spec
    srank = frob_sq / spec_sq
    t = int(math.floor(epsilon * epsilon * srank))
    if epsilon * epsilon * srank < 1.0:
        t = 0
    b0 = (1.0 - epsilon) * frob_sq / m
    delta = (1.0 - epsilon) * spec_sq / (epsilon * m)
    if t >= 1 and not t * delta < b0:
        raise InvariantViolation(
            f"schedule inconsistent: t*delta = {t * delta} >= b0 = {b0}"
        )
    return Schedule(
        epsilon=epsilon, b0=b0, delta=delta, steps_t=t, m=m,
        frob_sq=frob_sq, spec_sq=spec_sq,
    )


def potential(A, b: float, L, tol: Tolerances | None = None) -> float:
    """Barrier potential tr(L^T (A - bI)^{-1} L)."""
    M = shifted_inverse(A, b, tol)
    L = np.asarray(L, dtype=float)
    return float(np.sum(L * (M @ L)))


def potential_split(A, b_prime: float, L, tol: Tolerances | None = None):
    """Potential split across the image and kernel of A at barrier b_prime.

    Returns (phi_P, phi_Q, qL_frob_sq) where phi_Q = -qL_frob_sq / b_prime
    and qL_frob_sq is the squared Frobenius mass of L seen by the kernel
    projection of A.
    """
    tol = tol or default_tolerances()
    A = np.asarray(A, dtype=float)
    L = np.asarray(L, dtype=float)
    lam, U = np.linalg.eigh(A)
    thresh = tol.kernel_threshold * max(1.0, float(np.abs(lam).max(initial=0.0)))
    if np.abs(lam[lam > thresh] - b_prime).min(initial=np.inf) <= tol.shift_gap * max(
        1.0, float(np.abs(lam).max(initial=0.0))
    ):
        raise SingularShiftError(f"barrier {b_prime} sits on an eigenvalue of A")
    LtU = L.T @ U
    col_sq = np.sum(LtU * LtU, axis=0)
    kernel = lam <= thresh
    phi_P = float(np.sum(col_sq[~kernel] / (lam[~kernel] - b_prime)))
    qL_frob_sq = float(np.sum(col_sq[kernel]))
    phi_Q = -qL_frob_sq / b_prime
    return phi_P, phi_Q, qL_frob_sq


def candidate_feasible(
    A,
    A_shifted_inv,
    L,
    w,
    phi_before: float,
    phi_after_shift: float,
    slack: float = 0.0,
) -> FeasibilityRecord:
    """Evaluate the two per-candidate tests at the lowered barrier.

    Test one (rank growth): w^T (A - b'I)^{-1} w < -1.
    Test two (no potential increase): the rank-one inverse update gives
    phi_after_shift - num / (1 + quadform) <= phi_before, with
    num = || L^T (A - b'I)^{-1} w ||^2.

    `slack` is a relative acceptance slack applied to both comparisons
    (used only on the retry pass of a scan).
    """
    w = np.asarray(w, dtype=float)
    if float(w @ w) == 0.0:
        return FeasibilityRecord(0.0, math.nan, False, "zero-vector")
    M = np.asarray(A_shifted_inv, dtype=float)
    L = np.asarray(L, dtype=float)
    Mw = M @ w
    quadform = float(w @ Mw)
    y = L.T @ Mw
    numerator = float(y @ y)
    potential_after_add = phi_after_shift - numerator / (1.0 + quadform)
    rank_ok = quadform < -1.0 + slack
    potential_ok = potential_after_add <= phi_before + slack * abs(phi_before)
    feasible = rank_ok and potential_ok
    reason = "" if feasible else ("rank-test" if not rank_ok else "potential-test")
    return FeasibilityRecord(quadform, potential_after_add, feasible, reason)


def check_step_preconditions(
    state: SelectionState, schedule: Schedule, L, tol: Tolerances | None = None
) -> PreconditionDiagnostics:
    """Diagnostics guaranteeing a feasible candidate exists at this step.

    potential_ok:       Phi_b(A) <= -m - ||L||_2^2 / delta
    barrier_window_ok:  0 < delta < b
    kernel_mass_ok:     b <= delta ||QL||_F^2 / ||L||_2^2
    averaging_ok:       the summed feasibility inequality over all m
                        candidates holds at the lowered barrier.
    Failures surface as flags, never exceptions.
    """
    tol = tol or default_tolerances()
    L = np.asarray(L, dtype=float)
    b = state.barrier_b
    b_prime = b - schedule.delta
    slack = tol.precondition_slack

    phi_b = potential(state.A, b, L, tol)
    phi_bp = potential(state.A, b_prime, L, tol)
    target = -schedule.m - schedule.spec_sq / schedule.delta
    potential_ok = phi_b <= target + slack * abs(target)

    barrier_window_ok = 0.0 < schedule.delta < b

    _, _, qL = potential_split(state.A, b_prime, L, tol)
    rhs_kernel = schedule.delta * qL / schedule.spec_sq
    kernel_mass_ok = b <= rhs_kernel + slack * abs(rhs_kernel)

    M = shifted_inverse(state.A, b_prime, tol)
    T = L.T @ (M @ L)
    lhs = float(np.sum(T * T))
    rhs = (phi_b - phi_bp) * (-schedule.m - phi_bp)
    averaging_ok = lhs <= rhs + slack * abs(rhs)

    return PreconditionDiagnostics(potential_ok, barrier_window_ok, kernel_mass_ok, averaging_ok)


def _scan_candidates(order, taken, W, M, L, phi_before, phi_after_shift, pivot_rule, slack):
    """One pass over the candidates; returns (index, record, scanned) or None."""
    scanned = 0
    best = None  # greedy: (potential_after_add, position) minimization
    best_rec = None
    best_idx = None
    best_margins = (-math.inf, -math.inf)
    for pos, j in enumerate(order):
        if j in taken:
            continue
        scanned += 1
        rec = candidate_feasible(None, M, L, W[j], phi_before, phi_after_shift, slack)
        if rec.reason != "zero-vector":
            qm = -1.0 - rec.quadform
            pm = phi_before - rec.potential_after_add
            if min(qm, pm) > min(best_margins):
                best_margins = (qm, pm)
        if rec.feasible:
            if pivot_rule == PIVOT_FIRST:
                return j, rec, scanned, best_margins
            key = (rec.potential_after_add, pos)
            if best is None or key < best:
                best = key
                best_rec = rec
                best_idx = j
    if best_idx is not None:
        return best_idx, best_rec, scanned, best_margins
    return None, None, scanned, best_margins


def select_next(
    state: SelectionState,
    schedule: Schedule,
    dec: Decomposition,
    pivot_rule: str = PIVOT_FIRST,
    tol: Tolerances | None = None,
    scan_order: Optional[Sequence[int]] = None,
):
    """Choose the next index to add at the lowered barrier b - delta.

    FirstFeasible returns the earliest feasible index in scan order;
    GreedyMinPotential the feasible index with smallest updated potential,
    ties broken by scan order. Raises InfeasibilityError when nothing
    passes even with the retry slack.
    """
    tol = tol or default_tolerances()
    if pivot_rule not in (PIVOT_FIRST, PIVOT_GREEDY):
        raise ParameterError(f"unknown pivot rule {pivot_rule!r}")
    L = dec.L
    W = dec.mapped_vectors()
    b_prime = state.barrier_b - schedule.delta
    M = shifted_inverse(state.A, b_prime, tol)
    phi_before = potential(state.A, state.barrier_b, L, tol)
    phi_after_shift = float(np.sum(L * (M @ L)))
    order = range(dec.m) if scan_order is None else scan_order
    taken = set(state.sigma)

    chosen, rec, scanned, margins = _scan_candidates(
        order, taken, W, M, L, phi_before, phi_after_shift, pivot_rule, 0.0
    )
    if chosen is None:
        chosen, rec, scanned2, margins = _scan_candidates(
            order, taken, W, M, L, phi_before, phi_after_shift,
            pivot_rule, tol.feasibility_retry,
        )
        scanned += scanned2
    if chosen is None:
        raise InfeasibilityError(
            "no feasible candidate at step "
            f"{state.step_k} (best quadform margin {margins[0]:.3e}, "
            f"best potential margin {margins[1]:.3e})",
            best_quadform_margin=margins[0],
            best_potential_margin=margins[1],
        )
    return chosen, rec, scanned, phi_before, phi_after_shift, b_prime


def _check_post_step(A_new, k_next, b_prime, rec, phi_before, L, lam_old, tol):
    """Runtime invariant checks after a rank-one acceptance."""
    lam_new = np.linalg.eigvalsh(A_new)
    check_interlacing(lam_old[::-1], lam_new[::-1], tol.interlacing_slack)
    thresh = tol.kernel_threshold * max(1.0, float(lam_new.max(initial=0.0)))
    above = int(np.sum(lam_new > b_prime))
    below = int(np.sum(lam_new <= thresh))
    n = A_new.shape[0]
    if above != k_next or below != n - k_next:
        raise InvariantViolation(
            f"barrier invariant failed at step {k_next}: {above} eigenvalues above "
            f"b'={b_prime:.6g}, {below} in the kernel band (expected {k_next} and {n - k_next})"
        )
    if rec.potential_after_add > phi_before + tol.potential_slack * abs(phi_before):
        raise InvariantViolation(
            f"potential increased at step {k_next}: "
            f"{rec.potential_after_add} > {phi_before}"
        )
    phi_fresh = potential(A_new, b_prime, L, tol)
    denom = max(abs(phi_fresh), 1.0)
    if abs(phi_fresh - rec.potential_after_add) > tol.sm_consistency * denom:
        raise InvariantViolation(
            "rank-one potential update disagrees with fresh recomputation: "
            f"{rec.potential_after_add} vs {phi_fresh}"
        )


def run_selection(
    dec: Decomposition,
    epsilon: float,
    pivot_rule: str = PIVOT_FIRST,
    tol: Tolerances | None = None,
    check_invariants: bool = True,
    scan_order: Optional[Sequence[int]] = None,
) -> SelectionResult:
    """Run the full barrier walk and return the selected index list.

    Deterministic for fixed inputs, pivot rule, and scan order. With
    check_invariants the barrier count, eigenvalue interlacing, potential
    monotonicity, and the rank-one update identity are verified at every
    step; existence-precondition diagnostics are recorded in the traces
    either way.
    """
    tol = tol or default_tolerances()
    dec = validate(dec, tol)
    schedule = compute_schedule(dec.L, dec.m, epsilon, tol)
    if schedule.vacuous:
        return SelectionResult(sigma=[], schedule=schedule, traces=[], vacuous=True)

    L = dec.L
    W = dec.mapped_vectors()
    n = dec.n
    state = SelectionState(A=np.zeros((n, n)), sigma=[], barrier_b=schedule.b0, step_k=0)
    traces: List[StepTrace] = []

    for _ in range(schedule.steps_t):
        diag = check_step_preconditions(state, schedule, L, tol)
        lam_old = np.linalg.eigvalsh(state.A)
        chosen, rec, scanned, phi_before, _, b_prime = select_next(
            state, schedule, dec, pivot_rule, tol, scan_order
        )
        w = W[chosen]
        A_new = state.A + np.outer(w, w)
        if check_invariants:
            _check_post_step(
                A_new, state.step_k + 1, b_prime, rec, phi_before, L, lam_old, tol
            )
        phi_P, phi_Q, qL = potential_split(state.A, b_prime, L, tol)
        traces.append(
            StepTrace(
                step=state.step_k + 1,
                chosen_index=chosen,
                barrier_before=state.barrier_b,
                barrier_after=b_prime,
                phi_before=phi_before,
                phi_after=rec.potential_after_add,
                phi_image=phi_P,
                phi_kernel=phi_Q,
                kernel_frob_sq=qL,
                candidates_scanned=scanned,
                quadform_margin=-1.0 - rec.quadform,
                potential_margin=phi_before - rec.potential_after_add,
                preconditions=diag,
            )
        )
        state = SelectionState(
            A=A_new,
            sigma=state.sigma + [chosen],
            barrier_b=b_prime,
            step_k=state.step_k + 1,
        )

    if check_invariants:
        final_b = schedule.b0 - schedule.delta * schedule.steps_t
        if final_b < schedule.guarantee_bound - 1e-12 * abs(schedule.guarantee_bound):
            raise InvariantViolation(
                f"final barrier {final_b} fell below the promised bound "
                f"{schedule.guarantee_bound}"
            )
    return SelectionResult(sigma=state.sigma, schedule=schedule, traces=traces, vacuous=False)
