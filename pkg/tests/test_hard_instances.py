import numpy as np
import pytest

from ksb.hard_instances import (
    EtaTooLarge,
    MismatchReport,
    MuMatrix,
    QOutOfRange,
    build_hard_bnrm,
    hard_q_matrix,
    lemma1_closed_forms,
    lemma1_mu,
    lemma1_sp_means,
    verify_gap,
)
from ksb.lp import build_dlp, build_dlp_g, solve_packing
from ksb.envs import BnrmProblem


def test_modulo_rule_spot_check():
    # k = 2, d = 2: the minus-perturbed product index is 3 + 1 + 1 = 5
    d, K = 2, 3
    eta = 0.1
    mu = MuMatrix(np.array([[0.0, 0.0, 0.0], [eta, eta, eta]]))
    q = hard_q_matrix(d, K, mu)
    assert q[4, 1] == pytest.approx(0.5 - eta)   # product 5, action 2
    assert q[5, 1] == pytest.approx(0.5 + eta)   # offset k % (d+1) = 2
    # within-block default and out-of-block zero
    assert q[3, 1] == pytest.approx(0.5)
    assert q[0, 1] == 0.0


def test_structure_of_generated_instance():
    d, K, T = 3, 8, 1000
    mu = MuMatrix(np.zeros((2, K)))
    inst = build_hard_bnrm(T, d, K, mu)
    problem = inst.problem
    assert problem.n == K * (d + 1)
    assert np.all(problem.B == T / 2)
    # each block column pattern: priced product consumes nothing, product
    # base+1+i consumes exactly resource i
    assert int(problem.p.sum()) == K
    for k in range(K):
        base = k * (d + 1)
        assert problem.p[base, k] == 1.0
        assert np.all(problem.A[:, base] == 0.0)
        assert np.array_equal(problem.A[:, base + 1 : base + 1 + d], np.eye(d))
    # every consumption column has at most one nonzero
    assert np.all((problem.A > 0).sum(axis=0) <= 1)


def test_zero_mu_gives_half_probabilities_and_T_half_value():
    d, K, T = 2, 6, 600
    inst = build_hard_bnrm(T, d, K, MuMatrix(np.zeros((2, K))))
    q = inst.true_means()
    for k in range(K):
        assert q[k * (d + 1), k] == 0.5
    sol = solve_packing(build_dlp(inst.problem, q))
    assert sol.value == pytest.approx(T / 2, abs=1e-8 * T)


def test_theorem_regime_warning():
    with pytest.warns(UserWarning):
        build_hard_bnrm(300, 2, 3, MuMatrix(np.zeros((2, 3))))


def test_q_out_of_range():
    with pytest.raises(QOutOfRange):
        MuMatrix(np.full((2, 3), 0.7))


def test_lemma1_mu_values():
    eta, mu = lemma1_mu(10_000, 2, alpha=0.0, c0=0.1)
    assert eta == pytest.approx(0.1)
    assert mu.mu[0].tolist() == pytest.approx([0.1 / 3, 0.0, -0.1 / 3])
    assert np.all(mu.mu[1] == 0.1)

    eta256, _ = lemma1_mu(256, 3, alpha=0.25, c0=1.0)
    assert eta256 == pytest.approx(0.25)  # 256^(-1/4)

    with pytest.raises(EtaTooLarge):
        lemma1_mu(100, 2, alpha=0.0, c0=0.9)
    with pytest.raises(ValueError):
        lemma1_mu(100, 2, alpha=0.6, c0=0.1)


def test_closed_forms_known_values():
    forms = lemma1_closed_forms(300.0, 2, 0.1, 0.5)
    assert forms["J_full"] == 150.0
    assert forms["J0"][1] == pytest.approx(150.0 * (1 - 0.2 / 6))  # 145
    assert forms["Delta"] == pytest.approx(0.2 / 19.2)  # 0.0104166...
    # no-exclusion limit
    assert lemma1_closed_forms(300.0, 2, 0.1, 1.0)["Delta"] == 0.0
    # eta = 0 collapses every value to T/2
    forms0 = lemma1_closed_forms(300.0, 2, 0.0, 0.5)
    assert all(v == 150.0 for v in forms0["J0"].values())
    assert forms0["Delta"] == 0.0


def test_uniform_optimum_on_lemma1_instance():
    d, T = 2, 300
    eta, mu = lemma1_mu(T, d, 0.0, 0.1)
    with pytest.warns(UserWarning):
        inst = build_hard_bnrm(T, d, d + 1, mu)
    sol = solve_packing(build_dlp(inst.problem, inst.true_means()))
    assert np.allclose(sol.x, [100.0, 100.0, 100.0], atol=1e-6)
    assert sol.value == pytest.approx(150.0, abs=1e-8 * T)
    assert len(sol.support) == d + 1


def test_sp_equivalence_of_bnrm_construction():
    # the per-action reward/cost means induce the same program as the
    # generated price/consumption structure
    d, T = 3, 1200
    eta, mu = lemma1_mu(T, d, 0.0, 0.2)
    with pytest.warns(UserWarning):
        inst = build_hard_bnrm(T, d, d + 1, mu)
    q = inst.true_means()
    r, c = lemma1_sp_means(d, eta)
    prog_bnrm = build_dlp(inst.problem, q)
    problem = BnrmProblem(T=T, B=np.full(d, T / 2), p=np.zeros((1, d + 1)),
                          A=np.zeros((d, 1)))
    prog_sp = build_dlp_g(problem, r, c)
    assert np.allclose(prog_bnrm.objective, prog_sp.objective)
    for row_b, row_s in zip(prog_bnrm.rows, prog_sp.rows):
        assert np.allclose(row_b.coeffs, row_s.coeffs)
        assert row_b.rhs == row_s.rhs


@pytest.mark.parametrize("d", [1, 2, 3])
@pytest.mark.parametrize("eta", [0.05, 0.1, 0.2])
def test_verify_gap_grid(d, eta):
    for zeta in (0.25, 0.5):
        report = verify_gap(300.0, d, eta, zeta)
        assert report["all_match"]
        assert report["support_is_d_plus_1"]


def test_verify_gap_degenerate_d1():
    report = verify_gap(1200.0, 1, 0.1, 0.5)
    assert report["all_match"]
    # d = 1: only the first and last pinned cases exist
    assert set(report["checks"][1]["name"] for _ in [0]) <= {"J0[1]"}


def test_verify_gap_eta_zero():
    report = verify_gap(300.0, 2, 0.0, 0.5)
    assert report["all_match"]
    forms = lemma1_closed_forms(300.0, 2, 0.0, 0.5)
    assert forms["Delta"] == 0.0


def test_verify_gap_probe_reports_shortfall():
    report = verify_gap(300.0, 2, 0.2, 0.5, probe_trials=40, probe_seed=3)
    probe = report["probe"]
    assert probe["switches_used"] <= 1  # d - 1 switches
    assert probe["trials"] == 40
    # the d-action policy forgoes revenue relative to the full optimum
    assert probe["mean_shortfall"] > 0


def test_mismatch_report_on_corrupted_forms(monkeypatch):
    import ksb.hard_instances as hi

    good = hi.lemma1_closed_forms

    def corrupted(T, d, eta, zeta):
        forms = good(T, d, eta, zeta)
        forms["J0"][1] += 1.0
        return forms

    monkeypatch.setattr(hi, "lemma1_closed_forms", corrupted)
    with pytest.raises(MismatchReport):
        hi.verify_gap(300.0, 2, 0.1, 0.5)
