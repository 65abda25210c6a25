"""Small dense linear programs: a two-phase simplex and a vertex-enumeration oracle.

Every DenseLP has the form

    min  c^T x
    s.t. G x >= h   (one row per geq constraint)
         sum(x) = 1
         x >= 0
"""
import itertools
import logging

import numpy as np

logger = logging.getLogger(__name__)

DEFAULT_MAX_VARIABLES = 4096
VERTEX_ENUMERATION_LIMIT = 6

FEASIBILITY_TOLERANCE = 1e-9
NEGATIVITY_TOLERANCE = 1e-12
PIVOT_TOLERANCE = 1e-12
REDUCED_COST_TOLERANCE = 1e-11


class LPStatus(object):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    NUMERICAL_FAILURE = "numerical_failure"


class LPTooLargeError(Exception):
    def __init__(self, n, limit):
        super(LPTooLargeError, self).__init__(
                "LP with {} variables exceeds the limit of {}".format(n, limit))


class DenseLP(object):
    def __init__(self, costs, geq_constraints):
        self.costs = np.asarray(costs, dtype=float)
        n = self.costs.shape[0]
        rows = [np.asarray(coefficients, dtype=float) for coefficients, _ in geq_constraints]
        self.geq_matrix = np.array(rows).reshape(len(rows), n)
        self.geq_rhs = np.array([float(rhs) for _, rhs in geq_constraints])
        if not np.all(np.isfinite(self.geq_rhs)):
            raise ValueError("constraint right-hand sides must be finite")

    @property
    def variable_count(self):
        return self.costs.shape[0]

    @property
    def geq_constraints(self):
        return list(zip(self.geq_matrix, self.geq_rhs))

    def __repr__(self):
        return "DenseLP(variables={}, geq={})".format(
                self.variable_count, len(self.geq_rhs))


class LPSolution(object):
    def __init__(self, x, objective, status):
        self.x = x
        self.objective = objective
        self.status = status

    @property
    def optimal(self):
        return self.status == LPStatus.OPTIMAL

    def __repr__(self):
        return "LPSolution(status={}, objective={})".format(self.status, self.objective)


def lp_objective(lp, x):
    return float(np.dot(lp.costs, x))


def lp_residuals(lp, x):
    """Largest violation of each constraint family: (geq, equality, nonnegativity)."""
    x = np.asarray(x, dtype=float)
    geq = np.max(lp.geq_rhs - lp.geq_matrix @ x, initial=0.0)
    return max(geq, 0.0), abs(np.sum(x) - 1.0), max(-np.min(x), 0.0)


def _finish(lp, x):
    if np.any(x < -NEGATIVITY_TOLERANCE):
        return LPSolution(x, lp_objective(lp, x), LPStatus.NUMERICAL_FAILURE)
    x = np.clip(x, 0.0, None)
    x = x / np.sum(x)
    if max(lp_residuals(lp, x)) > FEASIBILITY_TOLERANCE:
        return LPSolution(x, lp_objective(lp, x), LPStatus.NUMERICAL_FAILURE)
    return LPSolution(x, lp_objective(lp, x), LPStatus.OPTIMAL)


# Simplex

def _pivot(tableau, row, col):
    tableau[row, :] /= tableau[row, col]
    column = tableau[:, col].copy()
    column[row] = 0.0
    tableau -= np.outer(column, tableau[row, :])


def _entering(objective_row, allowed):
    # Bland: lowest index with a negative reduced cost.
    negative = np.flatnonzero(objective_row[:allowed] < -REDUCED_COST_TOLERANCE)
    return int(negative[0]) if negative.size else -1


def _leaving(tableau, col, basis):
    column = tableau[:-1, col]
    rows = np.flatnonzero(column > PIVOT_TOLERANCE)
    if not rows.size:
        return -1
    ratios = tableau[rows, -1] / column[rows]
    best = np.min(ratios)
    tied = rows[ratios <= best + PIVOT_TOLERANCE]
    # Bland: among tied rows, the lowest basic variable leaves.
    return int(min(tied, key=lambda r: basis[r]))


def _run_simplex(tableau, basis, allowed, budget):
    """Pivot until optimal. Returns (status, iterations used)."""
    iterations = 0
    while True:
        col = _entering(tableau[-1], allowed)
        if col < 0:
            return LPStatus.OPTIMAL, iterations
        if iterations >= budget:
            return LPStatus.NUMERICAL_FAILURE, iterations
        row = _leaving(tableau, col, basis)
        if row < 0:
            # Unbounded; impossible with sum(x) = 1 and x >= 0.
            return LPStatus.NUMERICAL_FAILURE, iterations
        _pivot(tableau, row, col)
        basis[row] = col
        # Round-off must not push a basic variable below zero.
        rhs = tableau[:-1, -1]
        np.maximum(rhs, 0.0, out=rhs)
        iterations += 1


def _standard_form(lp):
    """Equality rows [A | b] with b >= 0 over x and one surplus per kept geq row."""
    n = lp.variable_count
    # Rows with nonnegative coefficients and rhs <= 0 are implied by x >= 0.
    implied = np.all(lp.geq_matrix >= 0, axis=1) & (lp.geq_rhs <= 0)
    geq_matrix = lp.geq_matrix[~implied]
    geq_rhs = lp.geq_rhs[~implied]
    k = geq_rhs.shape[0]

    matrix = np.zeros((k + 1, n + k))
    matrix[:k, :n] = geq_matrix
    matrix[:k, n:] = -np.eye(k)
    matrix[k, :n] = 1.0
    rhs = np.append(geq_rhs, 1.0)

    negative = rhs < 0
    matrix[negative] *= -1
    rhs[negative] *= -1
    return matrix, rhs


def simplex_solve(lp, max_variables=DEFAULT_MAX_VARIABLES, max_iterations=None):
    n = lp.variable_count
    if n > max_variables:
        raise LPTooLargeError(n, max_variables)
    if max_iterations is None:
        max_iterations = 10 * (n + len(lp.geq_rhs) + 1)

    matrix, rhs = _standard_form(lp)
    rows, structural = matrix.shape

    # Phase one: an artificial per row, minimize their sum.
    tableau = np.zeros((rows + 1, structural + rows + 1))
    tableau[:rows, :structural] = matrix
    tableau[:rows, structural:structural + rows] = np.eye(rows)
    tableau[:rows, -1] = rhs
    tableau[-1, :structural] = -np.sum(matrix, axis=0)
    tableau[-1, -1] = -np.sum(rhs)
    basis = list(range(structural, structural + rows))

    status, used = _run_simplex(tableau, basis, structural, max_iterations)
    if status != LPStatus.OPTIMAL:
        return LPSolution(None, None, status)
    if -tableau[-1, -1] > FEASIBILITY_TOLERANCE:
        return LPSolution(None, None, LPStatus.INFEASIBLE)

    # Drive zero-level artificials out of the basis; rows that cannot be pivoted are redundant.
    keep = []
    for row in range(rows):
        if basis[row] >= structural:
            candidates = np.flatnonzero(np.abs(tableau[row, :structural]) > FEASIBILITY_TOLERANCE)
            if not candidates.size:
                continue
            _pivot(tableau, row, int(candidates[0]))
            basis[row] = int(candidates[0])
        keep.append(row)

    # Phase two on the structural columns.
    phase_two = np.zeros((len(keep) + 1, structural + 1))
    phase_two[:-1, :structural] = tableau[keep, :structural]
    phase_two[:-1, -1] = tableau[keep, -1]
    basis = [basis[row] for row in keep]
    costs = np.zeros(structural)
    costs[:n] = lp.costs
    phase_two[-1, :structural] = costs
    for row, basic in enumerate(basis):
        phase_two[-1, :] -= costs[basic] * phase_two[row, :]

    status, _ = _run_simplex(phase_two, basis, structural, max_iterations - used)
    if status != LPStatus.OPTIMAL:
        logger.debug("simplex stopped with %s after %d phase-one pivots", status, used)
        return LPSolution(None, None, status)

    x = np.zeros(structural)
    for row, basic in enumerate(basis):
        x[basic] = phase_two[row, -1]
    return _finish(lp, x[:n])


# Oracle

def vertex_enumerate_oracle(lp):
    """Best basic feasible solution by trying every set of n-1 active inequalities."""
    n = lp.variable_count
    if n > VERTEX_ENUMERATION_LIMIT:
        raise LPTooLargeError(n, VERTEX_ENUMERATION_LIMIT)

    inequalities = np.vstack([lp.geq_matrix, np.eye(n)])
    bounds = np.append(lp.geq_rhs, np.zeros(n))

    best = None
    for active in itertools.combinations(range(inequalities.shape[0]), n - 1):
        system = np.vstack([np.ones((1, n)), inequalities[list(active)]])
        target = np.append(1.0, bounds[list(active)])
        if np.linalg.matrix_rank(system) < n:
            continue
        x = np.linalg.solve(system, target)
        if np.any(inequalities @ x < bounds - FEASIBILITY_TOLERANCE):
            continue
        objective = lp_objective(lp, x)
        if best is None or objective < best[1] - 1e-12:
            best = (x, objective)

    if best is None:
        return LPSolution(None, None, LPStatus.INFEASIBLE)
    return _finish(lp, best[0])


# The sampling LP

def build_sampling_lp(g, gaps, p_tilde, a_hat, cover_greedy=False):
    """min sum_a p(a) gap(a) s.t. q(b) >= max over in-neighbors j of b of p_tilde(j).

    One constraint per action b != a_hat; with cover_greedy a_hat is constrained
    the same way.
    """
    gaps = np.asarray(gaps, dtype=float)
    p_tilde = np.asarray(p_tilde, dtype=float)
    constraints = []
    for b in range(g.n):
        if b == a_hat and not cover_greedy:
            continue
        observers = g.adj[:, b]
        constraints.append((observers.astype(float), float(np.max(p_tilde[observers]))))
    return DenseLP(gaps, constraints)


def solve_sampling_lp(lp, fallback):
    """Optimal p for the sampling LP, or the always-feasible fallback."""
    solution = simplex_solve(lp)
    if solution.optimal:
        return solution.x
    logger.warning("sampling LP ended with %s; falling back to baseline probabilities",
                   solution.status)
    return np.asarray(fallback, dtype=float)

