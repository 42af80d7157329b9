"""Dense packing-LP construction and solving.

Every linear program in this package is a small packing program: maximize a
linear objective over x >= 0 subject to a handful of <= rows (resources, a
time row, optional pinned-variable rows) and at most one >= revenue-floor row.
Programs are solved to a *vertex* (basic) optimal solution, so the support of
the returned point never exceeds the number of rows.  The solver is a dense
two-phase simplex with Bland's rule, which makes every solve deterministic:
identical input bits give identical output bits.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

ROW_RESOURCE = "resource"
ROW_TIME = "time"
ROW_FLOOR = "revenue-floor"
ROW_PIN = "pinned-variable"

_ROW_KINDS = (ROW_RESOURCE, ROW_TIME, ROW_FLOOR, ROW_PIN)

# Pivoting tolerances.  Packing data in this package is O(1)..O(T) sized, so
# absolute tolerances at these scales are safe.
_TOL_PIVOT = 1e-10
_TOL_FEAS = 1e-7
_MAX_ITER = 10_000


class LpError(Exception):
    """Base class for solver errors."""


class Unbounded(LpError):
    """The objective is unbounded above.

    Impossible when a time row ``sum(x) <= T`` is present; raised as a
    structural error if the caller omitted it.
    """


class Infeasible(LpError):
    """No feasible point exists (only possible with a revenue-floor row)."""


class CycleGuardTripped(LpError):
    """Anti-cycling iteration cap exceeded; signals a solver bug."""


class DimensionMismatch(LpError):
    """Input arrays have inconsistent shapes."""


@dataclass(frozen=True)
class Row:
    """One constraint row.

    ``resource``, ``time`` and ``pinned-variable`` rows read ``coeffs @ x <=
    rhs``; a ``revenue-floor`` row reads ``coeffs @ x >= rhs``.  Coefficients
    may be ``+inf`` only in resource rows: a variable carrying ``+inf`` in a
    resource row is forced to zero before pivoting.
    """

    coeffs: np.ndarray
    rhs: float
    kind: str = ROW_RESOURCE

    def __post_init__(self):
        object.__setattr__(self, "coeffs", np.asarray(self.coeffs, dtype=float))
        object.__setattr__(self, "rhs", float(self.rhs))


@dataclass
class PackingProgram:
    """A maximization LP over nonnegative variables.

    Attributes:
        objective: length-K objective coefficients.
        rows: constraint rows; see :class:`Row`.
    """

    objective: np.ndarray
    rows: list[Row] = field(default_factory=list)

    def __post_init__(self):
        self.objective = np.asarray(self.objective, dtype=float)

    @property
    def num_vars(self) -> int:
        return self.objective.shape[0]

    def validate(self) -> None:
        """Check structural invariants; raises on violation."""
        k = self.num_vars
        if self.objective.ndim != 1:
            raise DimensionMismatch("objective must be a vector")
        for row in self.rows:
            if row.kind not in _ROW_KINDS:
                raise ValueError(f"unknown row kind {row.kind!r}")
            if row.coeffs.shape != (k,):
                raise DimensionMismatch(
                    f"row has {row.coeffs.shape} coefficients, expected ({k},)"
                )
            if row.kind in (ROW_RESOURCE, ROW_TIME, ROW_PIN) and row.rhs < 0:
                raise ValueError(f"{row.kind} row must have rhs >= 0, got {row.rhs}")
            if np.any(np.isinf(row.coeffs)) and row.kind != ROW_RESOURCE:
                raise ValueError("+inf coefficients are allowed only in resource rows")
            if np.any(np.isneginf(row.coeffs)):
                raise ValueError("-inf coefficients are not allowed")

    def with_pinned(self, k: int, cap: float = 0.0) -> "PackingProgram":
        """Return a copy with the extra row ``x_k <= cap`` (cap 0 pins x_k)."""
        e = np.zeros(self.num_vars)
        e[k] = 1.0
        return PackingProgram(self.objective.copy(), [*self.rows, Row(e, cap, ROW_PIN)])


@dataclass(frozen=True)
class VertexSolution:
    """A basic optimal solution of a :class:`PackingProgram`.

    Attributes:
        x: optimal point, length K, all entries >= 0.
        value: objective value at ``x``.
        support: indices k with x_k above the feasibility tolerance.
        basis: variable indices of the optimal basis (k < K structural,
            K + i the slack of row i in solve order).
        status: "optimal", or "forced-zero" when the +inf sentinel pinned
            at least one variable before pivoting.
        duals: multiplier per input row, aligned with ``prog.rows`` (zero for
            rows dropped as vacuous).
    """

    x: np.ndarray
    value: float
    support: tuple[int, ...]
    basis: tuple[int, ...]
    status: str
    duals: np.ndarray


def solve_packing(prog: PackingProgram) -> VertexSolution:
    """Solve a packing program to a basic optimal solution.

    Raises:
        Unbounded: no time row bounds the objective.
        Infeasible: the revenue-floor row cannot be met.
        CycleGuardTripped: the pivot-count guard fired (solver bug).
    """
    n = prog.num_vars
    c_all, a_all, b, pinned, row_index = canonical_leq_form(prog)
    free = np.flatnonzero(~pinned)

    if len(free) == 0:
        x = np.zeros(n)
        return VertexSolution(
            x=x, value=0.0, support=(), basis=(), status="forced-zero",
            duals=np.zeros(len(prog.rows)),
        )

    c = c_all[free]
    a = a_all[:, free]

    x_free, basis, duals_int = _simplex_max(c, a, b)

    x = np.zeros(n)
    x[free] = x_free
    value = float(prog.objective @ x)

    scale = max(1.0, float(np.max(np.abs(b))) if b.size else 1.0)
    supp_tol = 1e-9 * scale
    support = tuple(int(k) for k in np.flatnonzero(x > supp_tol))

    duals = np.zeros(len(prog.rows))
    for pos, idx in enumerate(row_index):
        duals[idx] = duals_int[pos]

    status = "forced-zero" if pinned.any() else "optimal"
    # map the internal basis (free-variable indexing) back to program indexing
    basis_mapped = tuple(
        int(free[bi]) if bi < len(free) else int(n + (bi - len(free)))
        for bi in basis
    )
    return VertexSolution(
        x=x, value=value, support=support, basis=basis_mapped,
        status=status, duals=duals,
    )


def _simplex_max(c: np.ndarray, a: np.ndarray, b: np.ndarray):
    """Maximize ``c @ x`` s.t. ``a @ x <= b``, ``x >= 0`` (b may be negative).

    Returns ``(x, basis, duals)`` where ``duals`` are the multipliers of the
    <= rows as given.  Two-phase dense simplex, Bland's rule throughout.
    """
    m, n = a.shape
    if m == 0:
        if np.any(c > _TOL_PIVOT):
            raise Unbounded("positive objective with no constraint rows")
        return np.zeros(n), (), np.zeros(0)

    # Flip rows with negative rhs; their slack enters with coefficient -1 and
    # an artificial variable provides the starting basis.
    flip = b < 0
    sign = np.where(flip, -1.0, 1.0)
    a = a * sign[:, None]
    b = b * sign
    n_art = int(flip.sum())

    ncols = n + m + n_art + 1
    tab = np.zeros((m, ncols))
    tab[:, :n] = a
    tab[np.arange(m), n + np.arange(m)] = sign
    tab[:, -1] = b

    basis = np.empty(m, dtype=int)
    art_pos = n + m
    for i in range(m):
        if flip[i]:
            tab[i, art_pos] = 1.0
            basis[i] = art_pos
            art_pos += 1
        else:
            basis[i] = n + i

    if n_art:
        c_phase1 = np.zeros(ncols - 1)
        c_phase1[n + m:] = -1.0
        _pivot_until_optimal(tab, basis, c_phase1)
        phase1_val = sum(tab[i, -1] for i in range(m) if basis[i] >= n + m)
        if phase1_val > _TOL_FEAS * max(1.0, float(np.max(np.abs(b)))):
            raise Infeasible("revenue-floor row cannot be satisfied")
        _drive_out_artificials(tab, basis, n + m)
        tab = np.delete(tab, np.s_[n + m:ncols - 1], axis=1)

    c_full = np.zeros(n + m)
    c_full[:n] = c
    obj = _pivot_until_optimal(tab, basis, c_full)

    x = np.zeros(n)
    for i, bi in enumerate(basis):
        if bi < n:
            x[bi] = tab[i, -1]
    # The reduced cost of slack i equals the dual of row i as passed in
    # (row flipping scales both the row and its equality multiplier).
    duals = obj[n:n + m].copy()
    return x, tuple(int(bi) for bi in basis), duals


def _pivot_until_optimal(tab: np.ndarray, basis: np.ndarray, c_full: np.ndarray):
    """Pivot ``tab`` in place until no reduced cost improves the objective.

    The objective row is maintained as ``z - c`` (nonnegative at optimality
    for a maximization).  Returns the final objective row.
    """
    m = tab.shape[0]
    obj = -c_full.astype(float)
    for i in range(m):
        cb = c_full[basis[i]]
        if cb != 0.0:
            obj += cb * tab[i, :-1]

    for _ in range(_MAX_ITER):
        entering = -1
        for j in range(obj.shape[0]):  # Bland: lowest improving index
            if obj[j] < -_TOL_PIVOT:
                entering = j
                break
        if entering < 0:
            return obj
        col = tab[:, entering]
        best_ratio = np.inf
        leaving = -1
        for i in range(m):
            if col[i] > _TOL_PIVOT:
                ratio = tab[i, -1] / col[i]
                if ratio < best_ratio - _TOL_PIVOT or (
                    ratio < best_ratio + _TOL_PIVOT
                    and (leaving < 0 or basis[i] < basis[leaving])
                ):
                    best_ratio = ratio
                    leaving = i
        if leaving < 0:
            raise Unbounded(
                "objective unbounded: no time row caps the entering variable"
            )
        _pivot(tab, obj, basis, leaving, entering)
    raise CycleGuardTripped(f"no optimum after {_MAX_ITER} pivots")


def _pivot(tab, obj, basis, row, col):
    tab[row] /= tab[row, col]
    piv_row = tab[row]
    for i in range(tab.shape[0]):
        if i != row and abs(tab[i, col]) > 0.0:
            tab[i] -= tab[i, col] * piv_row
    if abs(obj[col]) > 0.0:
        obj -= obj[col] * piv_row[:-1]
    basis[row] = col


def _drive_out_artificials(tab, basis, first_art: int) -> None:
    """Replace basic artificials (value 0) by structural/slack columns."""
    m = tab.shape[0]
    for i in range(m):
        if basis[i] >= first_art:
            for j in range(first_art):
                if abs(tab[i, j]) > _TOL_PIVOT:
                    piv = tab[i, j]
                    tab[i] /= piv
                    for r in range(m):
                        if r != i and abs(tab[r, j]) > 0.0:
                            tab[r] -= tab[r, j] * tab[i]
                    basis[i] = j
                    break
            # A row whose artificial cannot leave is redundant (all zeros);
            # its artificial stays basic at value zero, which is harmless.


# ---------------------------------------------------------------------------
# Program builders
# ---------------------------------------------------------------------------

def build_dlp(problem, q: np.ndarray) -> PackingProgram:
    """Deterministic LP of a revenue-management problem under mean demand q.

    Objective coefficient of action k is the expected per-period revenue
    ``sum_j p[j,k] q[j,k]``; resource row i has coefficients ``A[i] @ q`` and
    rhs ``B[i]``; the time row caps ``sum(x) <= T``.

    Args:
        problem: learner-visible problem data with fields T, B, K, d, n,
            prices ``p`` (n x K) and consumption ``A`` (d x n).
        q: mean-demand matrix, shape (n, K), entries in [0, 1].
    """
    q = np.asarray(q, dtype=float)
    if q.shape != (problem.n, problem.K):
        raise DimensionMismatch(
            f"q has shape {q.shape}, expected ({problem.n}, {problem.K})"
        )
    objective = np.einsum("jk,jk->k", problem.p, q)
    rows = [
        Row(problem.A[i] @ q, problem.B[i], ROW_RESOURCE) for i in range(problem.d)
    ]
    rows.append(Row(np.ones(problem.K), problem.T, ROW_TIME))
    return PackingProgram(objective, rows)


def build_dlp_g(problem, r: np.ndarray, c: np.ndarray) -> PackingProgram:
    """Generalized deterministic LP from per-action reward/cost means.

    Args:
        problem: problem data with fields T, B, K, d.
        r: mean rewards, shape (K,).
        c: mean costs, shape (d, K); entries may be the +inf sentinel.
    """
    r = np.asarray(r, dtype=float)
    c = np.asarray(c, dtype=float)
    if r.shape != (problem.K,) or c.shape != (problem.d, problem.K):
        raise DimensionMismatch("reward/cost means do not match problem dims")
    rows = [Row(c[i], problem.B[i], ROW_RESOURCE) for i in range(problem.d)]
    rows.append(Row(np.ones(problem.K), problem.T, ROW_TIME))
    return PackingProgram(r, rows)


def canonical_leq_form(prog: PackingProgram):
    """Expand a program into plain ``a @ x <= b`` data over all K variables.

    A variable with a +inf coefficient in any resource row is forced to zero
    (any positive value would violate that row's finite rhs); this realizes
    the 0*inf = 0 convention the first learning epoch needs.  A revenue-floor
    row is negated into <= form and omitted as vacuous when trivially
    satisfied (nonpositive rhs, nonnegative coefficients).

    Returns ``(c, a, b, pinned, row_index)`` where ``pinned`` marks forced
    variables (their columns are zeroed in ``a``) and ``row_index`` maps each
    canonical row back to its position in ``prog.rows``.
    """
    prog.validate()
    n = prog.num_vars
    pinned = np.zeros(n, dtype=bool)
    for row in prog.rows:
        if row.kind == ROW_RESOURCE:
            pinned |= np.isinf(row.coeffs)
    a_rows, b_vals, row_index = [], [], []
    for idx, row in enumerate(prog.rows):
        if row.kind == ROW_FLOOR:
            if row.rhs <= _TOL_PIVOT and np.all(row.coeffs[~pinned] >= 0):
                continue
            coeffs = np.where(pinned, 0.0, row.coeffs)
            a_rows.append(-coeffs)
            b_vals.append(-row.rhs)
        else:
            a_rows.append(np.where(np.isinf(row.coeffs), 0.0, row.coeffs))
            b_vals.append(row.rhs)
        row_index.append(idx)
    a = np.array(a_rows) if a_rows else np.zeros((0, n))
    b = np.array(b_vals, dtype=float)
    return prog.objective.copy(), a, b, pinned, row_index
