from eadarp.simplex import INFEASIBLE, OPTIMAL, UNBOUNDED, solve_lp


def test_basic_optimum():
    # min -2x - 3y st x+y<=4, x+3y<=6 -> x=3, y=1, obj -9
    res = solve_lp([-2.0, -3.0], [[1, 1], [1, 3]], [4, 6])
    assert res.status == OPTIMAL
    assert abs(res.objective - (-9.0)) < 1e-9
    assert abs(res.x[0] - 3.0) < 1e-9 and abs(res.x[1] - 1.0) < 1e-9


def test_negative_rhs_uses_phase_one():
    # min x st x >= 2  (written as -x <= -2)
    res = solve_lp([1.0], [[-1.0]], [-2.0])
    assert res.status == OPTIMAL
    assert abs(res.x[0] - 2.0) < 1e-9


def test_infeasible():
    res = solve_lp([0.0], [[1.0], [-1.0]], [1.0, -2.0])  # x<=1 and x>=2
    assert res.status == INFEASIBLE


def test_unbounded():
    res = solve_lp([-1.0], [[-1.0]], [0.0])  # min -x, x >= 0 only
    assert res.status == UNBOUNDED


def test_equality_via_pair():
    # min x+y st x+y=3 (two inequalities), x<=1 -> y=2
    res = solve_lp([1.0, 1.0], [[1, 1], [-1, -1], [1, 0]], [3, -3, 1])
    assert res.status == OPTIMAL
    assert abs(res.objective - 3.0) < 1e-9


def test_degenerate_does_not_cycle():
    # several redundant constraints through the same vertex
    res = solve_lp([-1.0, -1.0],
                   [[1, 0], [0, 1], [1, 1], [2, 2], [1, 1]],
                   [1, 1, 2, 4, 2])
    assert res.status == OPTIMAL
    assert abs(res.objective - (-2.0)) < 1e-9


def test_zero_objective_feasibility_check():
    res = solve_lp([0.0, 0.0], [[1, 1], [-1, 0]], [5, -1])
    assert res.status == OPTIMAL
    assert abs(res.objective) < 1e-9
