import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ksb.lp import (
    ROW_FLOOR,
    ROW_PIN,
    ROW_RESOURCE,
    ROW_TIME,
    DimensionMismatch,
    Infeasible,
    PackingProgram,
    Row,
    Unbounded,
    build_dlp,
    build_dlp_g,
    canonical_leq_form,
    solve_packing,
)

from .oracles import enumerate_lp_value


def lemma1_program(T=300.0, d=2, eta=0.1):
    """The worst-case packing LP with uniform optimum T/(d+1) per action."""
    K = d + 1
    obj = np.full(K, 0.5)
    obj[0] += eta / (d + 1)
    obj[-1] -= eta / (d + 1)
    rows = []
    for i in range(d):
        coeffs = np.full(K, 0.5)
        coeffs[i] += eta
        coeffs[i + 1] -= eta
        rows.append(Row(coeffs, T / 2, ROW_RESOURCE))
    rows.append(Row(np.ones(K), T, ROW_TIME))
    return PackingProgram(obj, rows)


class Problem:
    """Minimal problem stub with the fields the builders require."""

    def __init__(self, T, B, p, A):
        self.T = T
        self.B = np.asarray(B, dtype=float)
        self.p = np.asarray(p, dtype=float)
        self.A = np.asarray(A, dtype=float)
        self.d, self.n = self.A.shape
        self.K = self.p.shape[1]


def check_solution(prog, sol, rel=1e-9):
    """Feasibility, support bound, complementary slackness, strong duality."""
    c, a, b, pinned, row_index = canonical_leq_form(prog)
    scale = max(1.0, float(np.max(np.abs(b))) if b.size else 1.0)
    assert np.all(sol.x >= -rel * scale)
    assert np.all(a @ sol.x <= b + rel * scale)
    assert np.all(sol.x[pinned] == 0.0)
    assert len(sol.support) <= len(prog.rows)
    duals_int = sol.duals[list(row_index)]
    assert np.all(duals_int >= -1e-7)
    slack = b - a @ sol.x
    assert np.max(np.abs(duals_int * slack), initial=0.0) <= 1e-7 * scale * scale
    # strong duality: primal value equals dual value
    assert sol.value == pytest.approx(float(duals_int @ b), abs=1e-7 * scale)
    # reduced costs: nonnegative everywhere, zero on the support
    red = duals_int @ a - c
    assert np.all(red[~pinned] >= -1e-7 * scale)
    for k in sol.support:
        assert abs(red[k]) <= 1e-7 * scale


def test_zero_objective_gives_zero_vertex():
    prog = PackingProgram(
        np.zeros(3),
        [Row([1.0, 2.0, 1.0], 5.0, ROW_RESOURCE), Row(np.ones(3), 10.0, ROW_TIME)],
    )
    sol = solve_packing(prog)
    assert sol.value == 0.0
    assert np.all(sol.x == 0.0)
    check_solution(prog, sol)


def test_lemma1_program_uniform_optimum():
    prog = lemma1_program(T=300.0, d=2, eta=0.1)
    sol = solve_packing(prog)
    assert sol.value == pytest.approx(150.0, abs=1e-9 * 300)
    assert np.allclose(sol.x, [100.0, 100.0, 100.0], atol=1e-7)
    assert sol.support == (0, 1, 2)
    check_solution(prog, sol)


def test_section5_linear_small_matches_enumeration():
    # 2 products, 3 resources, 5 price vectors, linear demand, small inventory
    prices = np.array([[1, 1, 2, 4, 4], [1.5, 2, 3, 4, 6.5]], dtype=float)
    q = np.stack(
        [np.maximum(0.0, 0.8 - 0.15 * prices[0]), np.maximum(0.0, 0.9 - 0.3 * prices[1])]
    )
    A = np.array([[1, 1], [3, 1], [0, 5]], dtype=float)
    T = 1000.0
    problem = Problem(T, [0.3 * T, 0.5 * T, 0.7 * T], prices, A)
    prog = build_dlp(problem, q)
    sol = solve_packing(prog)
    assert sol.value == pytest.approx(enumerate_lp_value(prog), abs=1e-8 * T)
    check_solution(prog, sol)


def test_build_dlp_single_saturated_action():
    problem = Problem(50.0, [50.0], [[1.0]], [[1.0]])
    prog = build_dlp(problem, np.array([[1.0]]))
    sol = solve_packing(prog)
    assert sol.value == pytest.approx(50.0)
    assert sol.x[0] == pytest.approx(50.0)


def test_build_dlp_objective_coefficients_linear_model():
    # price vector (1, 1.5) under the linear demand model
    prices = np.array([[1.0], [1.5]])
    q = np.array([[0.8 - 0.15 * 1.0], [0.9 - 0.3 * 1.5]])
    problem = Problem(10.0, [10.0], prices, np.array([[1.0, 1.0]]))
    prog = build_dlp(problem, q)
    assert prog.objective[0] == pytest.approx(0.65 * 1 + 0.45 * 1.5)  # 1.325


def test_build_dlp_zero_demand():
    problem = Problem(10.0, [5.0], [[2.0, 3.0]], [[1.0]])
    prog = build_dlp(problem, np.zeros((1, 2)))
    sol = solve_packing(prog)
    assert sol.value == 0.0


def test_build_dlp_dimension_mismatch():
    problem = Problem(10.0, [5.0], [[2.0, 3.0]], [[1.0]])
    with pytest.raises(DimensionMismatch):
        build_dlp(problem, np.zeros((2, 2)))


def test_build_dlp_g_zero_reward():
    problem = Problem(10.0, [5.0, 5.0], [[1.0, 1.0]], [[1.0, 1.0], [1.0, 1.0]])
    prog = build_dlp_g(problem, np.zeros(2), 0.5 * np.ones((2, 2)))
    assert solve_packing(prog).value == 0.0


def test_build_dlp_g_two_vertex():
    problem = Problem(100.0, [50.0], [[1.0, 1.0]], [[1.0, 1.0]])
    prog = build_dlp_g(problem, np.array([1.0, 0.0]), np.array([[1.0, 1.0]]))
    sol = solve_packing(prog)
    assert sol.value == pytest.approx(50.0)
    assert np.allclose(sol.x, [50.0, 0.0])
    check_solution(prog, sol)


def test_build_dlp_g_reproduces_lemma1_program():
    # reward/cost means from the mu parameterization with eta = 0.1, d = 2
    d, eta, T = 2, 0.1, 300.0
    K = d + 1
    r = np.full(K, 0.5)
    r[0] += eta / (d + 1)
    r[-1] -= eta / (d + 1)
    c = np.full((d, K), 0.5)
    for i in range(d):
        c[i, i] += eta
        c[i, i + 1] -= eta
    problem = Problem(T, np.full(d, T / 2), np.zeros((1, K)), np.zeros((d, 1)))
    problem.n = 1
    prog = build_dlp_g(problem, r, c)
    ref = lemma1_program(T, d, eta)
    assert np.allclose(prog.objective, ref.objective)
    for row, row_ref in zip(prog.rows, ref.rows):
        assert np.allclose(row.coeffs, row_ref.coeffs)
        assert row.rhs == row_ref.rhs


def test_inf_sentinel_pins_variable():
    prog = PackingProgram(
        np.array([5.0, 1.0]),
        [Row([np.inf, 1.0], 4.0, ROW_RESOURCE), Row(np.ones(2), 10.0, ROW_TIME)],
    )
    sol = solve_packing(prog)
    assert sol.status == "forced-zero"
    assert sol.x[0] == 0.0
    assert sol.x[1] == pytest.approx(4.0)


def test_all_inf_costs_force_zero_solution():
    prog = PackingProgram(
        np.zeros(3),
        [Row(np.full(3, np.inf), 5.0, ROW_RESOURCE), Row(np.ones(3), 10.0, ROW_TIME)],
    )
    sol = solve_packing(prog)
    assert sol.value == 0.0
    assert sol.status == "forced-zero"


def test_floor_row_binds():
    # maximize x_1 subject to keeping total reward above a floor
    prog = PackingProgram(
        np.array([0.0, 1.0]),
        [
            Row([1.0, 0.1], 4.0, ROW_FLOOR),
            Row([1.0, 1.0], 10.0, ROW_TIME),
        ],
    )
    sol = solve_packing(prog)
    # best: x = (10/3, 20/3) solves x0 + .1 x1 = 4, x0 + x1 = 10
    assert sol.value == pytest.approx(20.0 / 3.0)
    check_solution(prog, sol)


def test_floor_row_infeasible():
    prog = PackingProgram(
        np.array([1.0, 0.0]),
        [
            Row([0.1, 0.1], 100.0, ROW_FLOOR),
            Row([1.0, 1.0], 10.0, ROW_TIME),
        ],
    )
    with pytest.raises(Infeasible):
        solve_packing(prog)


def test_floor_row_with_inf_coefficient_is_dropped():
    prog = PackingProgram(
        np.array([0.0, 1.0]),
        [
            Row([np.inf, 1.0], 3.0, ROW_FLOOR),
            Row([1.0, 1.0], 10.0, ROW_TIME),
        ],
    )
    with pytest.raises(ValueError):
        solve_packing(prog)  # inf outside a resource row is rejected


def test_pinned_variable_row():
    prog = PackingProgram(
        np.array([2.0, 1.0]),
        [Row(np.ones(2), 10.0, ROW_TIME)],
    ).with_pinned(0)
    sol = solve_packing(prog)
    assert sol.x[0] == 0.0
    assert sol.value == pytest.approx(10.0)


def test_unbounded_without_time_row():
    prog = PackingProgram(np.array([1.0]), [])
    with pytest.raises(Unbounded):
        solve_packing(prog)
    prog = PackingProgram(
        np.array([1.0, 1.0]), [Row([1.0, 0.0], 5.0, ROW_RESOURCE)]
    )
    with pytest.raises(Unbounded):
        solve_packing(prog)


def test_determinism_bitwise():
    prog = lemma1_program(T=1200.0, d=3, eta=0.2)
    a = solve_packing(prog)
    b = solve_packing(prog)
    assert a.x.tobytes() == b.x.tobytes()
    assert a.value == b.value
    assert a.basis == b.basis


@st.composite
def random_packing_programs(draw):
    K = draw(st.integers(1, 6))
    d = draw(st.integers(0, 3))
    rat = st.integers(0, 24).map(lambda v: v / 8.0)
    obj = np.array(draw(st.lists(rat, min_size=K, max_size=K)))
    rows = []
    for _ in range(d):
        coeffs = np.array(draw(st.lists(rat, min_size=K, max_size=K)))
        rhs = draw(st.integers(0, 40)) / 2.0
        rows.append(Row(coeffs, rhs, ROW_RESOURCE))
    rows.append(Row(np.ones(K), draw(st.integers(1, 60)) / 2.0, ROW_TIME))
    if draw(st.booleans()):
        coeffs = np.array(draw(st.lists(rat, min_size=K, max_size=K)))
        rows.append(Row(coeffs, draw(st.integers(0, 20)) / 4.0, ROW_FLOOR))
    return PackingProgram(obj, rows)


@settings(max_examples=200, deadline=None)
@given(random_packing_programs())
def test_solver_matches_enumeration_oracle(prog):
    try:
        sol = solve_packing(prog)
    except Infeasible:
        with pytest.raises(ValueError):
            enumerate_lp_value(prog)
        return
    assert sol.value == pytest.approx(enumerate_lp_value(prog), abs=1e-8 * 60)
    check_solution(prog, sol)


@settings(max_examples=60, deadline=None)
@given(random_packing_programs(), st.integers(1, 40))
def test_scale_equivariance(prog, lam2):
    lam = lam2 / 4.0
    try:
        base = solve_packing(prog).value
    except Infeasible:
        return
    scaled = PackingProgram(
        prog.objective, [Row(r.coeffs, r.rhs * lam, r.kind) for r in prog.rows]
    )
    assert solve_packing(scaled).value == pytest.approx(lam * base, abs=1e-7 * 60)
