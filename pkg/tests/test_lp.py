import itertools

import numpy as np
import pytest

from quantour.errors import InternalContractError
from quantour.lp import LinearProgram, lp_solve


def vertex_enumeration_optimum(prog):
    """Brute-force optimal value over all basic feasible solutions.

    Duplicate rows are removed first; otherwise every candidate basis
    matrix is singular even though the LP itself is perfectly solvable.
    """
    ab = np.unique(np.column_stack([prog.A, prog.b]), axis=0)
    A, b, c = ab[:, :-1], ab[:, -1], prog.c
    m, nc = A.shape
    best = np.inf
    for cols in itertools.combinations(range(nc), m):
        B = A[:, cols]
        if abs(np.linalg.det(B)) < 1e-10:
            continue
        x_b = np.linalg.solve(B, b)
        if (x_b < -1e-9).any():
            continue
        x = np.zeros(nc)
        x[list(cols)] = x_b
        best = min(best, float(c @ x))
    return best


def test_simple_example():
    sol = lp_solve(LinearProgram(c=[1.0, 1.0], A=[[1.0, -1.0]], b=[1.0]))
    assert np.allclose(sol.x, [1.0, 0.0])
    assert abs(sol.objective - 1.0) < 1e-12


def test_degenerate_duplicate_rows_terminate():
    # duplicated constraints make the system rank-deficient and the vertex
    # degenerate; phase 1 must drop the redundant row and phase 2 terminate
    A = [[1.0, 1.0, 1.0, 0.0],
         [1.0, 1.0, 1.0, 0.0],
         [1.0, 2.0, 0.0, 1.0]]
    b = [2.0, 2.0, 3.0]
    c = [-1.0, -2.0, 0.0, 0.0]
    prog = LinearProgram(c, A, b)
    sol = lp_solve(prog)
    want = vertex_enumeration_optimum(prog)
    assert abs(sol.objective - want) < 1e-9
    assert np.allclose(prog.A @ sol.x, prog.b, atol=1e-9)


def test_row_permutation_invariance():
    rng = np.random.default_rng(0)
    for _ in range(25):
        m, nc = 4, 9
        A = rng.standard_normal((m, nc))
        x0 = np.abs(rng.standard_normal(nc))  # feasible point
        b = A @ x0
        c = np.abs(rng.standard_normal(nc))   # bounded below on x >= 0... not
        # guaranteed; bound it by including the simplex constraint
        A = np.vstack([A, np.ones(nc)])
        b = np.append(b, x0.sum())
        prog = LinearProgram(c, A, b)
        sol = lp_solve(prog)
        perm = rng.permutation(A.shape[0])
        sol_p = lp_solve(LinearProgram(c, A[perm], b[perm]))
        assert np.allclose(sol.x, sol_p.x, atol=1e-8)
        assert abs(sol.objective - sol_p.objective) < 1e-9


def test_infeasible_raises_internal_contract():
    prog = LinearProgram(c=[1.0, 1.0], A=[[1.0, 0.0], [1.0, 0.0]], b=[1.0, 2.0])
    with pytest.raises(InternalContractError):
        lp_solve(prog)


def test_unbounded_raises_internal_contract():
    prog = LinearProgram(c=[-1.0, 0.0], A=[[0.0, 1.0]], b=[1.0])
    with pytest.raises(InternalContractError):
        lp_solve(prog)


def test_random_programs_match_vertex_enumeration():
    rng = np.random.default_rng(3)
    for _ in range(20):
        m = int(rng.integers(2, 4))
        nc = int(rng.integers(m + 1, 7))
        A = rng.standard_normal((m, nc))
        x0 = np.abs(rng.standard_normal(nc))
        b = A @ x0
        c = rng.standard_normal(nc)
        A = np.vstack([A, np.ones(nc)])
        b = np.append(b, x0.sum() + 1.0)
        prog = LinearProgram(c, A, b)
        want = vertex_enumeration_optimum(prog)
        if not np.isfinite(want):
            continue
        sol = lp_solve(prog)
        assert abs(sol.objective - want) < 1e-8 * (1 + abs(want))
        assert np.allclose(prog.A @ sol.x, prog.b, atol=1e-8)
        assert (sol.x >= -1e-9).all()
