import numpy as np
import pytest
import scipy.optimize

from privsense import sensing, solver
from privsense.errors import InvalidConfigError
from privsense.rng import RngStream


def test_lasso_identity_is_soft_threshold():
    y = np.array([3.0, -1.0, 0.5, 0.0, 2.0])
    config = solver.SolverConfig(l1_opt_tol=1e-12, max_inner_iters=20_000)
    sol, converged = solver.solve_lasso(np.eye(5), y, 1.0, config)
    assert converged
    assert np.max(np.abs(sol - solver.soft_threshold(y, 1.0))) < 1e-6


def test_lasso_large_lambda_gives_zero():
    gen = RngStream(1).generator()
    a = gen.standard_normal((6, 10))
    y = gen.standard_normal(6)
    lam = np.max(np.abs(a.T @ y)) * 1.001
    sol, _ = solver.solve_lasso(a, y, lam)
    assert np.allclose(sol, 0.0)


def test_lasso_matches_long_run_reference():
    gen = RngStream(2).generator()
    a = gen.standard_normal((8, 16))
    y = gen.standard_normal(8)
    lam = 0.1 * np.max(np.abs(a.T @ y))

    def objective(s):
        r = a @ s - y
        return 0.5 * r @ r + lam * np.sum(np.abs(s))

    fast, converged = solver.solve_lasso(
        a, y, lam, solver.SolverConfig(l1_opt_tol=1e-10))
    reference, _ = solver.solve_lasso(
        a, y, lam, solver.SolverConfig(l1_opt_tol=1e-14,
                                       max_inner_iters=400_000))
    assert converged
    rel = abs(objective(fast) - objective(reference)) \
        / max(1.0, objective(reference))
    assert rel < 1e-8


def test_lasso_rejects_bad_lambda():
    with pytest.raises(InvalidConfigError):
        solver.solve_lasso(np.eye(2), np.ones(2), 0.0)


def test_bpdn_zero_data():
    cert = solver.solve_bpdn(solver.BpdnProblem(np.eye(3), np.zeros(3), 0.5))
    assert np.allclose(cert.solution, 0.0)
    assert cert.converged


def test_bpdn_delta_covers_data_norm():
    y = np.array([0.3, -0.4])
    cert = solver.solve_bpdn(solver.BpdnProblem(np.eye(2), y, 1.0))
    assert np.allclose(cert.solution, 0.0)
    assert cert.kkt_violation == 0.0


def test_bpdn_noiseless_identity_interpolates():
    y = 5.0 * np.eye(3)[0]
    cert = solver.solve_bpdn(solver.BpdnProblem(np.eye(3), y, 0.0))
    assert np.max(np.abs(cert.solution - y)) < 1e-8


def test_bpdn_planted_small_recovery():
    hits = 0
    for trial in range(20):
        st = RngStream(4000 + trial)
        ens = sensing.build_ensemble(32, 0.5, st.child(1))
        gen = st.child(2).generator()
        s = np.zeros(32)
        s[gen.choice(32, 2, replace=False)] = gen.choice([-1.0, 1.0], 2)
        cert = solver.solve_bpdn(
            solver.BpdnProblem(ens.sensing, ens.sensing @ s, 0.0))
        if np.max(np.abs(cert.solution - s)) < 1e-5:
            hits += 1
    assert hits >= 19


def test_bpdn_certificates_have_monotone_brackets():
    st = RngStream(5)
    ens = sensing.build_ensemble(32, 0.5, st.child(1))
    gen = st.child(2).generator()
    y = np.column_stack([ens.sensing @ gen.standard_normal(32)
                         + 0.3 * gen.standard_normal(16) for _ in range(8)])
    _, certs = solver.solve_bpdn_batch(ens.sensing, y, 0.6)
    for cert in certs:
        assert cert.bracket_monotone


def test_kkt_closed_form_case():
    y = np.array([3.0, -1.0, 0.2])
    lam = 0.5
    s = solver.soft_threshold(y, lam)
    delta = float(np.linalg.norm(y - s))
    violation = solver.kkt_check(solver.BpdnProblem(np.eye(3), y, delta),
                                 s, lam)
    assert violation < 1e-9


def test_kkt_detects_perturbation():
    gen = RngStream(6).generator()
    a = gen.standard_normal((10, 20))
    s_true = np.zeros(20)
    s_true[[2, 11]] = [1.0, -2.0]
    y = a @ s_true
    cert = solver.solve_bpdn(solver.BpdnProblem(a, y, 0.0))
    base = solver.kkt_check(solver.BpdnProblem(a, y, 0.0),
                            cert.solution, cert.lam)
    bumped = cert.solution.copy()
    bumped[2] += 1e-2
    worse = solver.kkt_check(solver.BpdnProblem(a, y, 0.0), bumped, cert.lam)
    assert base < 1e-5
    assert worse > 1e-3


def test_kkt_solver_certificates_on_random_instances():
    worst = 0.0
    for trial in range(100):
        gen = RngStream(5000 + trial).generator()
        m = int(gen.integers(4, 14))
        n = int(gen.integers(m + 1, 25))
        a = gen.standard_normal((m, n))
        s = np.zeros(n)
        k = int(gen.integers(1, max(2, m // 2)))
        s[gen.choice(n, k, replace=False)] = gen.standard_normal(k) + 0.5
        noise = 0.05 * gen.standard_normal(m)
        delta = float(np.linalg.norm(noise)) * 1.1 if trial % 2 else 0.0
        y = a @ s + (noise if delta > 0 else 0.0)
        cert = solver.solve_bpdn(solver.BpdnProblem(a, y, delta))
        worst = max(worst, cert.kkt_violation)
    assert worst < 1e-5


def test_oracle_identity():
    y = np.array([1.0, -2.0, 0.0, 3.0])
    res = solver.oracle_bp_lp(np.eye(4), y)
    assert res.status == "optimal"
    assert np.allclose(res.solution, y, atol=1e-9)


def test_oracle_planted_spike_vs_enumeration():
    for trial in range(20):
        gen = RngStream(6000 + trial).generator()
        a = gen.standard_normal((3, 8))
        spike = int(gen.integers(0, 8))
        value = float(gen.standard_normal()) + 1.5
        y = a[:, spike] * value
        res = solver.oracle_bp_lp(a, y)
        assert res.status == "optimal"
        # enumerate all single-coordinate interpolants
        best = np.inf
        for j in range(8):
            col = a[:, j]
            coef = float(col @ y) / float(col @ col)
            if np.linalg.norm(y - coef * col) < 1e-9:
                best = min(best, abs(coef))
        assert res.objective <= best + 1e-9


def test_oracle_agrees_with_scipy_linprog():
    for trial in range(25):
        gen = RngStream(7000 + trial).generator()
        m = int(gen.integers(2, 10))
        n = int(gen.integers(m + 1, 25))
        a = gen.standard_normal((m, n))
        y = gen.standard_normal(m)
        res = solver.oracle_bp_lp(a, y)
        assert res.status == "optimal"
        eq = np.hstack([a, -a])
        ref = scipy.optimize.linprog(np.ones(2 * n), A_eq=eq, b_eq=y,
                                     bounds=(0, None), method="highs")
        assert ref.status == 0
        assert abs(res.objective - ref.fun) < 1e-7 * max(1.0, abs(ref.fun))


def test_oracle_objective_versus_bpdn():
    for trial in range(15):
        gen = RngStream(8000 + trial).generator()
        m = int(gen.integers(3, 10))
        n = int(gen.integers(m + 1, 20))
        a = gen.standard_normal((m, n))
        y = gen.standard_normal(m)
        res = solver.oracle_bp_lp(a, y)
        cert = solver.solve_bpdn(solver.BpdnProblem(a, y, 0.0))
        assert res.objective <= cert.l1_norm + 1e-6


def test_oracle_rejects_large_instances():
    with pytest.raises(InvalidConfigError):
        solver.oracle_bp_lp(np.ones((4, 25)), np.ones(4))


def test_recovery_surrogate_on_probe_passing_ensemble():
    # ensemble large enough that the empirical isometry estimate clears
    # the recovery threshold, then noiseless recovery must be near-certain
    st = RngStream(7)
    ens = sensing.build_ensemble(512, 0.5, st.child(1))
    sparsity = ens.m // 6
    est = sensing.rip_probe(ens, 2 * sparsity, 1000, st.child(2))
    assert est < sensing.RECOVERY_RIP_THRESHOLD
    gen = st.child(3).generator()
    cols = []
    truths = []
    for _ in range(20):
        s = np.zeros(512)
        s[gen.choice(512, sparsity, replace=False)] = gen.choice([-1.0, 1.0],
                                                                 sparsity)
        truths.append(s)
        cols.append(ens.sensing @ s)
    sols, certs = solver.solve_bpdn_batch(ens.sensing, np.column_stack(cols),
                                          0.0)
    hits = sum(np.linalg.norm(sols[:, j] - truths[j]) < 1e-5
               for j in range(20))
    assert hits >= 19


def test_noisy_stability_constant_reported():
    st = RngStream(8)
    ens = sensing.build_ensemble(64, 0.5, st.child(1))
    gen = st.child(2).generator()
    ratios = []
    for trial in range(10):
        s = np.zeros(64)
        s[gen.choice(64, 4, replace=False)] = gen.choice([-1.0, 1.0], 4)
        noise = gen.standard_normal(ens.m)
        noise *= 0.05 / np.linalg.norm(noise)
        delta = 0.05
        cert = solver.solve_bpdn(
            solver.BpdnProblem(ens.sensing, ens.sensing @ s + noise, delta))
        ratios.append(np.linalg.norm(cert.solution - s) / delta)
    fitted_c = max(ratios)
    print(f"empirical noisy-stability constant: {fitted_c:.2f}")
    assert np.isfinite(fitted_c) and fitted_c < 50.0


def test_not_converged_is_flagged_not_silent():
    gen = RngStream(9).generator()
    a = gen.standard_normal((12, 48))
    s = np.zeros(48)
    s[gen.choice(48, 4, replace=False)] = gen.choice([-1.0, 1.0], 4)
    noise = 0.2 * gen.standard_normal(12)
    y = a @ s + noise
    starved = solver.SolverConfig(max_inner_iters=4, max_outer_iters=3)
    cert = solver.solve_bpdn(
        solver.BpdnProblem(a, y, float(np.linalg.norm(noise))), starved)
    assert not cert.converged
    assert "not converged" in cert.note

    sol, stopped = solver.solve_lasso(
        a, y, 0.01 * np.max(np.abs(a.T @ y)),
        solver.SolverConfig(max_inner_iters=3))
    assert not stopped
    assert np.all(np.isfinite(sol))
