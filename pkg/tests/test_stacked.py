import numpy as np

from qkrylov.problems import random_problem, stack, stack_columns, unstack
from qkrylov.qcore import (
    QMatrix,
    counterpart_column,
    fro_norm,
    qmat_mul,
    real_counterpart,
)
from qkrylov.qsolve import SolverConfig, gl_qgmres, krylov_solve


def vector_qgmres_history(A: QMatrix, b: QMatrix, steps: int) -> list[float]:
    """Minimal residuals over right-quaternion Krylov spaces, via real least squares.

    In first-column form the span of ``b q, A b q, ...`` is the block Krylov
    space of ``R(A)`` started from ``R(b)``.
    """
    RA = real_counterpart(A.dense())
    rb = counterpart_column(b)
    beta = np.linalg.norm(rb)
    Q0, _ = np.linalg.qr(real_counterpart(b.dense()))
    blocks = [Q0]
    history = [1.0]
    for step in range(steps):
        Q = np.hstack(blocks)
        AQ = RA @ Q
        y, *_ = np.linalg.lstsq(AQ, rb, rcond=None)
        history.append(float(np.linalg.norm(rb - AQ @ y)) / beta)
        if step + 1 < steps:
            W = RA @ blocks[-1]
            for _ in range(2):
                W = W - Q @ (Q.T @ W)
            Qn, _ = np.linalg.qr(W)
            blocks.append(Qn)
    return history


def test_m1_global_gmres_matches_vector_gmres():
    A, B = random_problem(12, 1, seed=8)
    system = stack_columns(A, B)
    _, report = krylov_solve(
        system.operator,
        system.rhs,
        None,
        SolverConfig(tol=1e-300, maxit=10),
        variant="gmres",
        method="qgmres-stacked",
    )
    expected = vector_qgmres_history(A, B, 10)
    assert report.iterations == 10
    assert np.allclose(report.rr_history, expected, rtol=0.0, atol=1e-10)


def test_stack_is_column_major():
    X = QMatrix.from_components(np.array([[1.0, 2.0], [3.0, 4.0]]))
    assert stack(X).w0.ravel().tolist() == [1.0, 3.0, 2.0, 4.0]
    assert fro_norm(unstack(stack(X), 2, 2) - X) == 0.0


def test_stacked_operator_applies_block_diagonal():
    A, B = random_problem(5, 3, seed=2)
    system = stack_columns(A, B)
    assert system.operator.shape == (15, 1)
    got = system.unstack(system.operator(system.rhs))
    assert fro_norm(got - qmat_mul(A, B)) <= 1e-13 * fro_norm(qmat_mul(A, B))


def test_stacked_solve_agrees_with_global_solve():
    A, B = random_problem(6, 2, seed=3)
    system = stack_columns(A, B)
    x, report = gl_qgmres(system.operator, system.rhs, None, SolverConfig(tol=1e-12))
    assert report.converged
    assert report.dimensions == [12, 1]
    X_global, _ = gl_qgmres(A, B, None, SolverConfig(tol=1e-12))
    assert fro_norm(system.unstack(x) - X_global) <= 1e-8 * fro_norm(X_global)
