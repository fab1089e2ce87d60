"""Constrained l1 minimization engine.

The constrained problem (minimize ``||s||_1`` subject to
``||y - A s||_2 <= delta``) is solved as a lambda-parameterized
l1-regularized least-squares problem driven by an outer bisection on
lambda: the residual of the regularized solution is monotone in lambda,
so bisection over a bracket robustly lands the residual on delta.  The
inner solver is an accelerated proximal-gradient scheme with
soft-thresholding and function-value restarts, which accepts many
right-hand sides at once so table-level reconstructions amortize the
per-iteration cost.

A small dense two-phase simplex solves the noiseless problem exactly on
test-scale instances and serves as the independent optimality oracle.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import (DimensionMismatchError, InfeasibleToleranceError,
                     InvalidConfigError)
from .linalg import spectral_norm_sq
from .validation import as_float_matrix, as_float_vector


def sign_pos(x):
    """Sign with the deterministic tie-break sgn(0) = +1."""
    return np.where(np.asarray(x) >= 0.0, 1.0, -1.0)


@dataclass(frozen=True)
class SolverConfig:
    """Iteration caps, tolerances and the lambda bracket."""

    max_outer_iters: int = 100
    max_inner_iters: int = 4000
    constraint_tol: float = 1e-6
    l1_opt_tol: float = 1e-6
    lambda_min_factor: float = 1e-10

    def __post_init__(self):
        if min(self.constraint_tol, self.l1_opt_tol,
               self.lambda_min_factor) <= 0:
            raise InvalidConfigError("solver tolerances must be positive")
        if self.max_outer_iters < 1 or self.max_inner_iters < 1:
            raise InvalidConfigError("iteration caps must be >= 1")


@dataclass(frozen=True)
class BpdnProblem:
    """One constrained instance: operator, data and residual radius."""

    a_mat: np.ndarray
    y: np.ndarray
    delta: float

    def __post_init__(self):
        if self.delta < 0:
            raise InvalidConfigError(f"delta must be >= 0, got {self.delta}")
        if self.a_mat.shape[0] != self.y.shape[0]:
            raise DimensionMismatchError(
                f"operator has {self.a_mat.shape[0]} rows, data has "
                f"{self.y.shape[0]}")


@dataclass(frozen=True)
class SolverCertificate:
    """Solution plus the evidence needed to audit it."""

    solution: np.ndarray
    residual: float
    l1_norm: float
    lam: float
    kkt_violation: float
    converged: bool
    inner_iterations: int
    outer_iterations: int
    bracket_violation: float = 0.0
    note: str = ""

    @property
    def bracket_monotone(self) -> bool:
        return self.bracket_violation <= 1e-10


def soft_threshold(x, threshold):
    """Proximal operator of the scaled l1 norm."""
    return np.sign(x) * np.maximum(np.abs(x) - threshold, 0.0)


def _objectives(a_mat, x, y, lam):
    resid = a_mat @ x - y
    return (0.5 * np.sum(resid * resid, axis=0)
            + lam * np.sum(np.abs(x), axis=0))


def _lasso_batch(a_mat, y, lam, config, x0=None, min_residual=None,
                 lipschitz=None, move_tol=None):
    """Accelerated proximal gradient on columns of ``y``.

    Returns (solutions, residual norms, objectives, stopped-by-tolerance
    flags, iterations used).  Restarts on objective increase keep the
    objective non-increasing; a column stops once the relative objective
    change stays under ``l1_opt_tol`` (and, when ``min_residual`` /
    ``move_tol`` are set, the residual target is met and the iterate
    movement has fallen under the threshold) or the iteration cap is hit.
    """
    m, n = a_mat.shape
    k = y.shape[1]
    lam = np.broadcast_to(np.asarray(lam, dtype=float), (k,)).copy()
    if lipschitz is None:
        lipschitz = spectral_norm_sq(a_mat) * 1.02
    lipschitz = max(lipschitz, np.finfo(float).tiny)
    step = 1.0 / lipschitz

    x = np.zeros((n, k)) if x0 is None else np.array(x0, dtype=float)
    z = x.copy()
    t = np.ones(k)
    objective = _objectives(a_mat, x, y, lam)
    stall = np.zeros(k, dtype=int)
    active = np.ones(k, dtype=bool)
    iters_used = np.zeros(k, dtype=int)
    stopped = np.zeros(k, dtype=bool)

    for it in range(config.max_inner_iters):
        if not active.any():
            break
        idx = np.flatnonzero(active)
        za = z[:, idx]
        ya = y[:, idx]
        grad = a_mat.T @ (a_mat @ za - ya)
        xn = soft_threshold(za - step * grad, lam[idx] * step)
        rn = a_mat @ xn - ya
        fn = 0.5 * np.sum(rn * rn, axis=0) + lam[idx] * np.sum(np.abs(xn), axis=0)

        worse = fn > objective[idx] * (1.0 + 1e-15) + 1e-300
        if worse.any():
            # Momentum overshoot: restart those columns with a plain
            # proximal step from the current iterate (guaranteed descent).
            sub = np.flatnonzero(worse)
            cols = idx[sub]
            xa = x[:, cols]
            grad_r = a_mat.T @ (a_mat @ xa - y[:, cols])
            xr = soft_threshold(xa - step * grad_r, lam[cols] * step)
            rr = a_mat @ xr - y[:, cols]
            xn[:, sub] = xr
            rn[:, sub] = rr
            fn[sub] = (0.5 * np.sum(rr * rr, axis=0)
                       + lam[cols] * np.sum(np.abs(xr), axis=0))
            t[cols] = 1.0

        t_old = t[idx]
        t_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t_old * t_old))
        z[:, idx] = xn + ((t_old - 1.0) / t_new) * (xn - x[:, idx])
        t[idx] = t_new

        change = np.abs(objective[idx] - fn)
        small = change <= config.l1_opt_tol * np.maximum(1.0, np.abs(fn))
        stall[idx] = np.where(small, stall[idx] + 1, 0)
        movement = np.max(np.abs(xn - x[:, idx]), axis=0)
        x[:, idx] = xn
        objective[idx] = fn
        iters_used[idx] = it + 1

        done = stall[idx] >= 3
        if move_tol is not None:
            # Movement above a fraction of the shrinkage unit means
            # coordinates are still being pruned; keep iterating.
            done = done & (movement <= move_tol[idx])
        if min_residual is not None:
            resn = np.sqrt(np.sum(rn * rn, axis=0))
            done = done & (resn <= min_residual[idx])
        finished = idx[done]
        stopped[finished] = True
        active[finished] = False

    residual = np.linalg.norm(a_mat @ x - y, axis=0)
    return x, residual, objective, stopped, iters_used


def solve_lasso(a_mat, y, lam, config: SolverConfig | None = None,
                x0=None):
    """Approximate minimizer of ``0.5 ||y - A s||^2 + lam ||s||_1``.

    Returns ``(solution, converged)``; a hit iteration cap without the
    tolerance being met is reported, never silently absorbed.
    """
    if lam <= 0:
        raise InvalidConfigError(f"lam must be > 0, got {lam}")
    config = config or SolverConfig()
    a = as_float_matrix(a_mat, "A")
    vec = as_float_vector(y, "y")
    if a.shape[0] != vec.shape[0]:
        raise DimensionMismatchError(
            f"A has {a.shape[0]} rows, y has length {vec.shape[0]}")
    x0m = None if x0 is None else as_float_vector(x0, "x0")[:, None]
    sol, _, _, stopped, _ = _lasso_batch(a, vec[:, None], lam, config, x0=x0m)
    return sol[:, 0], bool(stopped[0])


def kkt_check(problem: BpdnProblem, solution, lam: float) -> float:
    """Stationarity and feasibility violation of a candidate solution.

    For the active-constraint case (lam > 0) the violation combines
    gradient stationarity on and off the support with the residual-radius
    mismatch, normalized by max(1, lam).  The slack case (zero solution
    strictly inside the constraint) is optimal by inspection and scores 0.
    """
    a = as_float_matrix(problem.a_mat, "A")
    y = as_float_vector(problem.y, "y")
    s = as_float_vector(solution, "solution")
    resid_vec = a @ s - y
    resid = float(np.linalg.norm(resid_vec))
    if lam == 0.0:
        if np.all(s == 0.0) and resid <= problem.delta * (1.0 + 1e-12):
            return 0.0
        raise InvalidConfigError(
            "lam == 0 is only admissible for the slack zero-solution case")
    grad = a.T @ resid_vec
    supp = s != 0.0
    on_supp = float(np.max(np.abs(grad[supp] + lam * np.sign(s[supp])))) \
        if supp.any() else 0.0
    off_supp = float(np.max(np.maximum(0.0, np.abs(grad[~supp]) - lam))) \
        if (~supp).any() else 0.0
    radius = abs(resid - problem.delta)
    return max(on_supp, off_supp, radius) / max(1.0, lam)


def _continuation_factors(start, stop):
    """Geometric lambda schedule with roughly halving steps.

    Staying close to the regularization path at every stage is what keeps
    null-space junk from creeping into the iterates at tiny lambda.
    """
    stages = max(4, int(np.ceil(np.log(stop / start) / np.log(0.5))) + 1)
    return np.geomspace(start, stop, stages)


def _dual_feasibility(a_mat, sub, signs, iters=300):
    """Search for an optimality certificate dual for a candidate support.

    Seeks ``nu`` with ``sub' nu = signs`` and ``|a_j' nu| <= 1`` for every
    column, by correcting the most-violated constraint inside the affine
    set (Motzkin relaxation).  Returns ``(nu, None)`` on success,
    ``(None, j)`` when column j's score is affinely forced past 1 (so no
    certificate exists for this support and j must be pivoted in), and
    ``(None, None)`` when undecided within the iteration budget.
    """
    gram = sub.T @ sub
    try:
        gram_inv = np.linalg.inv(gram)
    except np.linalg.LinAlgError:
        return None, None
    projector = sub @ gram_inv  # maps k-vector residuals back to nu space
    nu = projector @ signs
    col_sq = np.sum(a_mat * a_mat, axis=0)
    for _ in range(iters):
        scores = a_mat.T @ nu
        excess = np.abs(scores) - 1.0
        j = int(np.argmax(excess))
        if excess[j] <= 1e-9:
            return nu, None
        direction = a_mat[:, j] - projector @ (sub.T @ a_mat[:, j])
        denom = float(a_mat[:, j] @ direction)
        if denom <= 1e-18 * col_sq[j]:
            # Score is constant over the affine set yet violates the
            # bound: the support cannot be optimal.
            return None, j
        target = 1.0 if scores[j] > 0 else -1.0
        nu = nu - ((scores[j] - target) / denom) * direction
    return None, None


def _bp_vertex_polish(a_mat, y, s_approx, tau):
    """Try to land the exact minimum-l1 interpolant from an approximation.

    Starts from the large-magnitude support of the approximate solution
    and refines it with support-exchange pivots until the dual optimality
    certificate holds (``A_T' nu = sign(s_T)`` with ``|a_j' nu| <= 1``
    everywhere), which proves the result is a true constrained minimizer.
    Returns ``(solution, certified)``; the input is returned untouched
    when no certificate is reached within the pivot budget.
    """
    m, n = a_mat.shape
    if np.linalg.norm(y) <= tau:
        return np.zeros(n), True
    peak = float(np.max(np.abs(s_approx)))
    if peak == 0.0:
        return s_approx, False
    order = np.argsort(-np.abs(s_approx), kind="stable")
    # Seed only clearly-active coordinates; pruning leftovers from the
    # continuation would poison the dual's sign equations.  Genuinely
    # small components are re-added by the growth step below.
    k0 = int(np.sum(np.abs(s_approx) > 0.02 * peak))
    support = list(order[:min(m, max(1, k0))])

    for _ in range(10 * m + 50):
        sub = a_mat[:, support]
        coeff, _, rank, _ = np.linalg.lstsq(sub, y, rcond=None)
        if rank < len(support) or np.any(coeff == 0.0):
            support.pop(int(np.argmin(np.abs(coeff))))
            if not support:
                return s_approx, False
            continue
        resid = y - sub @ coeff
        if np.linalg.norm(resid) > tau:
            if len(support) >= m:
                return s_approx, False
            corr = np.abs(a_mat.T @ resid)
            corr[support] = -1.0
            support.append(int(np.argmax(corr)))
            continue
        signs = np.sign(coeff)
        dual, enter = _dual_feasibility(a_mat, sub, signs)
        if dual is not None:
            polished = np.zeros(n)
            polished[support] = coeff
            return polished, True
        if enter is None or enter in support:
            return s_approx, False
        sigma = 1.0 if float(a_mat[:, enter] @
                             np.linalg.lstsq(sub.T, signs, rcond=None)[0]) > 0 \
            else -1.0
        direction, _, drank, _ = np.linalg.lstsq(sub, -sigma * a_mat[:, enter],
                                                 rcond=None)
        if drank < len(support):
            return s_approx, False
        if np.linalg.norm(sub @ direction + sigma * a_mat[:, enter]) \
                > 1e-9 * np.linalg.norm(a_mat[:, enter]):
            # Entering column leaves the current span: grow the support.
            support.append(enter)
            continue
        blocking = [(-coeff[i] / direction[i], support[i], i)
                    for i in range(len(support))
                    if coeff[i] * direction[i] < 0.0]
        if not blocking:
            return s_approx, False
        _, _, leave = min(blocking)
        support[leave] = enter
    return s_approx, False


def solve_bpdn_batch(a_mat, y_cols, delta: float,
                     config: SolverConfig | None = None):
    """Constrained solve for every column of ``y_cols``.

    Returns ``(solutions, certificates)`` where ``solutions`` is (n, k)
    and ``certificates`` is a list of per-column
    :class:`SolverCertificate`.
    """
    config = config or SolverConfig()
    a = as_float_matrix(a_mat, "A")
    y = as_float_matrix(y_cols, "y")
    if a.shape[0] != y.shape[0]:
        raise DimensionMismatchError(
            f"A has {a.shape[0]} rows, data has {y.shape[0]}")
    if delta < 0:
        raise InvalidConfigError(f"delta must be >= 0, got {delta}")
    m, n = a.shape
    k = y.shape[1]
    lipschitz = spectral_norm_sq(a) * 1.02

    tau = config.constraint_tol * max(1.0, delta)
    ynorm = np.linalg.norm(y, axis=0)
    lam_max = np.maximum(np.max(np.abs(a.T @ y), axis=0), np.finfo(float).tiny)
    lam_min = config.lambda_min_factor * lam_max

    solutions = np.zeros((n, k))
    lam_star = np.zeros(k)
    converged = np.ones(k, dtype=bool)
    inner_total = np.zeros(k, dtype=int)
    outer_total = np.zeros(k, dtype=int)
    bracket_violation = np.zeros(k)
    notes = [""] * k

    trivial = ynorm <= delta
    for j in np.flatnonzero(trivial):
        notes[j] = "zero solution: delta covers the data norm"

    open_cols = np.flatnonzero(~trivial)
    # Radii below the constraint tolerance are indistinguishable from the
    # noiseless problem at the certified band width; route them through
    # the exact path rather than a degenerate bisection.
    noiseless = delta <= config.constraint_tol
    if open_cols.size and noiseless:
        # Noiseless case: the constrained solution is the small-lambda
        # limit.  A short warm-started continuation gets near the path,
        # the vertex-exchange polish then tries to certify the exact
        # minimizer; only columns still missing the residual target run
        # the continuation down to the bracket floor.
        k_open = open_cols.size
        y_open = y[:, open_cols]
        warm = np.zeros((n, k_open))
        iters = np.zeros(k_open, dtype=int)
        certified = np.zeros(k_open, dtype=bool)
        n_stages = 0

        def _run_stages(factors, mask, targeted):
            nonlocal warm, n_stages
            cols = np.flatnonzero(mask)
            if cols.size == 0:
                return
            block = warm[:, cols]
            for si, factor in enumerate(factors):
                lam = lam_max[open_cols[cols]] * factor
                last = targeted and si == len(factors) - 1
                target = np.full(cols.size, tau) if last else None
                block, _, _, _, used = _lasso_batch(
                    a, y_open[:, cols], lam, config, x0=block,
                    min_residual=target, lipschitz=lipschitz,
                    move_tol=0.05 * lam / lipschitz + 1e-15)
                iters[cols] += used
                n_stages += 1
            warm[:, cols] = block

        def _polish(mask):
            for pos in np.flatnonzero(mask):
                warm[:, pos], certified[pos] = _bp_vertex_polish(
                    a, y_open[:, pos], warm[:, pos], tau)

        def _guarded_debias(mask):
            # Least-squares refit on the identified support; accepted only
            # when it interpolates and does not grow the l1 objective.
            for pos in np.flatnonzero(mask):
                s = warm[:, pos]
                peak = float(np.max(np.abs(s)))
                if peak == 0.0:
                    continue
                supp = np.abs(s) > 1e-7 * peak
                if int(supp.sum()) > m:
                    continue
                coeff, _, rank, _ = np.linalg.lstsq(a[:, supp], y_open[:, pos],
                                                    rcond=None)
                if rank < int(supp.sum()):
                    continue
                cand = np.zeros(n)
                cand[supp] = coeff
                if (np.linalg.norm(a @ cand - y_open[:, pos]) <= tau
                        and np.sum(np.abs(cand))
                        <= np.sum(np.abs(s)) * (1.0 + 1e-10)):
                    warm[:, pos] = cand

        _run_stages(_continuation_factors(0.5, 1e-4),
                    np.ones(k_open, bool), targeted=False)
        _polish(np.ones(k_open, bool))
        if not certified.all():
            _guarded_debias(~certified)
            resid_now = np.linalg.norm(a @ warm - y_open, axis=0)
            unresolved = ~certified & (resid_now > tau)
            if unresolved.any():
                _run_stages(_continuation_factors(1e-4, config.lambda_min_factor),
                            unresolved, targeted=True)
                _polish(unresolved)
                _guarded_debias(unresolved & ~certified)

        solutions[:, open_cols] = warm
        lam_star[open_cols] = lam_min[open_cols]
        inner_total[open_cols] = iters
        outer_total[open_cols] = n_stages
        final_resid = np.linalg.norm(a @ warm - y_open, axis=0)
        for pos, j in enumerate(open_cols):
            if certified[pos]:
                converged[j] = True
                notes[j] = "certified vertex"
            elif final_resid[pos] <= tau:
                converged[j] = True
            else:
                converged[j] = False
                notes[j] = "not converged: iteration cap before residual target"
    elif open_cols.size:
        lo = lam_min[open_cols].copy()
        hi = lam_max[open_cols].copy()
        warm = np.zeros((n, open_cols.size))
        active = np.ones(open_cols.size, dtype=bool)
        trace = [[] for _ in range(open_cols.size)]  # (lam, residual) pairs
        best_gap = np.full(open_cols.size, np.inf)
        iters = np.zeros(open_cols.size, dtype=int)
        # Once a column's bracket narrows, its solves switch to a tight
        # movement threshold: the band test needs residuals evaluated well
        # below constraint_tol, which the coarse stall criterion cannot
        # guarantee.  A column only freezes after its stationarity passes
        # a direct check; otherwise the same lambda is re-solved tighter.
        tight = np.zeros(open_cols.size, dtype=bool)
        reset_used = np.zeros(open_cols.size, dtype=bool)
        retries = np.zeros(open_cols.size, dtype=int)
        tight_move = np.full(open_cols.size,
                             tau / (50.0 * np.sqrt(lipschitz * n)) + 1e-16)

        def _stationarity(col_sol, col_y, lam_val):
            grad = a.T @ (a @ col_sol - col_y)
            supp = col_sol != 0.0
            worst = 0.0
            if supp.any():
                worst = float(np.max(np.abs(grad[supp]
                                            + lam_val * np.sign(col_sol[supp]))))
            if (~supp).any():
                worst = max(worst, float(np.max(
                    np.maximum(0.0, np.abs(grad[~supp]) - lam_val))))
            return worst / max(1.0, lam_val)

        outer = 0
        for outer in range(1, config.max_outer_iters + 1):
            if not active.any():
                break
            act = np.flatnonzero(active)
            mid = np.sqrt(lo[act] * hi[act])
            move = np.where(tight[act], tight_move[act],
                            0.05 * mid / lipschitz + 1e-15)
            sols, resid, _, _, used = _lasso_batch(
                a, y[:, open_cols[act]], mid, config,
                x0=warm[:, act], lipschitz=lipschitz, move_tol=move)
            warm[:, act] = sols
            iters[act] += used
            for pos, aj in enumerate(act):
                trace[aj].append((float(mid[pos]), float(resid[pos]),
                                  bool(tight[aj])))
                gap = abs(resid[pos] - delta)
                if gap < best_gap[aj]:
                    best_gap[aj] = gap
                    solutions[:, open_cols[aj]] = sols[:, pos]
                    lam_star[open_cols[aj]] = mid[pos]
                if gap <= tau and tight[aj]:
                    stat = _stationarity(sols[:, pos], y[:, open_cols[aj]],
                                         float(mid[pos]))
                    if stat <= 1e-6 or retries[aj] >= 3:
                        solutions[:, open_cols[aj]] = sols[:, pos]
                        lam_star[open_cols[aj]] = mid[pos]
                        best_gap[aj] = gap
                        active[aj] = False
                    else:
                        retries[aj] += 1
                        tight_move[aj] *= 0.1
                    continue
                if gap <= 50.0 * tau or hi[aj] <= lo[aj] * 1.05:
                    tight[aj] = True
                if resid[pos] > delta:
                    hi[aj] = mid[pos]
                else:
                    lo[aj] = mid[pos]
                if hi[aj] <= lo[aj] * (1.0 + 1e-12):
                    if not reset_used[aj]:
                        # Coarse evaluations can misplace the bracket; widen
                        # it once and re-search with tight solves.
                        reset_used[aj] = True
                        tight[aj] = True
                        center = hi[aj]
                        lo[aj] = max(lam_min[open_cols[aj]], center / 16.0)
                        hi[aj] = min(lam_max[open_cols[aj]], center * 16.0)
                        continue
                    # Bracket collapsed without touching the band: the
                    # radius is unreachable at this tolerance.
                    raise InfeasibleToleranceError(
                        f"residual {resid[pos]:.3e} still above delta="
                        f"{delta:.3e} + tol at lambda floor "
                        f"{lo[aj]:.3e} (column {open_cols[aj]})")
        for pos, j in enumerate(open_cols):
            outer_total[j] = outer
            inner_total[j] = iters[pos]
            if active[pos]:
                converged[j] = False
                notes[j] = (f"not converged: bisection cap with residual gap "
                            f"{best_gap[pos]:.3e}")
            # Monotonicity is audited over the band-precision evaluations;
            # coarse bracketing scouts carry too much evaluation noise to
            # witness the exact-map property.
            pairs = sorted((lam, res) for lam, res, is_tight in trace[pos]
                           if is_tight)
            worst = 0.0
            for (_, r1), (_, r2) in zip(pairs, pairs[1:]):
                worst = max(worst, r1 - r2)
            bracket_violation[j] = worst

    certificates = []
    for j in range(k):
        sol = solutions[:, j]
        resid = float(np.linalg.norm(a @ sol - y[:, j]))
        problem = BpdnProblem(a_mat=a, y=y[:, j], delta=delta)
        lam_j = float(lam_star[j])
        violation = kkt_check(problem, sol, lam_j) if (lam_j > 0 or trivial[j]) \
            else float("nan")
        certificates.append(SolverCertificate(
            solution=sol,
            residual=resid,
            l1_norm=float(np.sum(np.abs(sol))),
            lam=lam_j,
            kkt_violation=violation,
            converged=bool(converged[j]),
            inner_iterations=int(inner_total[j]),
            outer_iterations=int(outer_total[j]),
            bracket_violation=float(bracket_violation[j]),
            note=notes[j],
        ))
    return solutions, certificates


def solve_bpdn(problem: BpdnProblem,
               config: SolverConfig | None = None) -> SolverCertificate:
    """Constrained solve of a single instance; see :func:`solve_bpdn_batch`."""
    _, certs = solve_bpdn_batch(problem.a_mat,
                                as_float_vector(problem.y, "y")[:, None],
                                problem.delta, config)
    return certs[0]


@dataclass(frozen=True)
class LpResult:
    """Outcome of the noiseless linear-programming oracle."""

    solution: np.ndarray
    status: str
    objective: float


def _pivot(tableau, basis, row, col):
    tableau[row] /= tableau[row, col]
    for i in range(tableau.shape[0]):
        if i != row and tableau[i, col] != 0.0:
            tableau[i] -= tableau[i, col] * tableau[row]
    basis[row] = col


def _run_simplex(tableau, basis, cost, tol, max_pivots):
    """Minimizing simplex sweep with Bland's anti-cycling rule."""
    m = tableau.shape[0]
    n_vars = tableau.shape[1] - 1
    for _ in range(max_pivots):
        reduced = cost[:n_vars] - cost[basis] @ tableau[:, :n_vars]
        enter = -1
        for j in range(n_vars):
            if reduced[j] < -tol:
                enter = j
                break
        if enter < 0:
            return "optimal"
        best = None
        for i in range(m):
            coef = tableau[i, enter]
            if coef > tol:
                ratio = tableau[i, -1] / coef
                key = (ratio, basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
        if best is None:
            return "unbounded"
        _pivot(tableau, basis, best[1], enter)
    return "cycling"


def oracle_bp_lp(a_mat, y, tol: float = 1e-9) -> LpResult:
    """Exact noiseless l1 minimizer on small instances via the split
    s = u - v with u, v >= 0, solved by a dense two-phase simplex.

    Limited to test-scale widths; exact up to the pivot tolerance.
    """
    a = as_float_matrix(a_mat, "A")
    vec = as_float_vector(y, "y")
    m, n = a.shape
    if n > 24:
        raise InvalidConfigError(
            f"the LP oracle is limited to n <= 24 (test scale), got n={n}")
    if m != vec.shape[0]:
        raise DimensionMismatchError(
            f"A has {m} rows, y has length {vec.shape[0]}")

    equality = np.hstack([a, -a])
    rhs = vec.copy()
    flip = rhs < 0
    equality[flip] *= -1.0
    rhs[flip] *= -1.0
    n_vars = 2 * n

    tableau = np.hstack([equality, np.eye(m), rhs[:, None]])
    basis = list(range(n_vars, n_vars + m))
    phase1_cost = np.concatenate([np.zeros(n_vars), np.ones(m)])
    status = _run_simplex(tableau, basis, phase1_cost, tol, max_pivots=20000)
    if status != "optimal":
        return LpResult(np.zeros(n), status, float("nan"))
    if phase1_cost[basis] @ tableau[:, -1] > 1e-7:
        return LpResult(np.zeros(n), "infeasible", float("nan"))

    keep = []
    for i in range(len(basis)):
        if basis[i] >= n_vars:
            pivot_col = -1
            for j in range(n_vars):
                if abs(tableau[i, j]) > tol:
                    pivot_col = j
                    break
            if pivot_col < 0:
                continue  # redundant constraint row
            _pivot(tableau, basis, i, pivot_col)
        keep.append(i)
    if len(keep) < len(basis):
        tableau = tableau[keep]
        basis = [basis[i] for i in keep]
    tableau = np.hstack([tableau[:, :n_vars], tableau[:, -1:]])

    phase2_cost = np.ones(n_vars)
    status = _run_simplex(tableau, basis, phase2_cost, tol, max_pivots=20000)
    if status != "optimal":
        return LpResult(np.zeros(n), status, float("nan"))
    split = np.zeros(n_vars)
    for i, var in enumerate(basis):
        split[var] = tableau[i, -1]
    solution = split[:n] - split[n:]
    return LpResult(solution, "optimal", float(np.sum(np.abs(solution))))
