"""Exact two-phase simplex with Bland's rule.

Rows are kept as sparse ``{column: coefficient}`` dicts because the LPs built
by the stability oracle are mostly zeros (item rows touch one column per
buyer, budget rows one column per item).  Arithmetic runs on ``gmpy2.mpq``
when available and falls back to ``fractions.Fraction``; results are always
handed back as Fractions.
"""
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Optional, Sequence

from ..errors import MalformedLP

try:  # pragma: no cover - exercised implicitly
    from gmpy2 import mpq as _Q

    def _to_q(v):
        v = Fraction(v)
        return _Q(v.numerator, v.denominator)

    def _from_q(v):
        return Fraction(int(v.numerator), int(v.denominator))

except ImportError:  # pragma: no cover
    _Q = Fraction
    _to_q = Fraction
    _from_q = Fraction

_ZERO = _Q(0)


class Relation(str, Enum):
    LE = "<="
    EQ = "="
    GE = ">="


class LpStatus(str, Enum):
    OPTIMAL = "OPTIMAL"
    INFEASIBLE = "INFEASIBLE"
    UNBOUNDED = "UNBOUNDED"


@dataclass(frozen=True)
class Constraint:
    coefficients: tuple
    relation: Relation
    bound: Fraction


@dataclass(frozen=True)
class LinearProgram:
    """``max`` (or ``min``) of ``objective . x`` subject to the constraints.

    ``lower_bounds[k]`` is the lower bound of variable k; ``None`` means the
    variable is free.  By default every variable is non-negative.
    """

    objective: tuple
    constraints: tuple = ()
    lower_bounds: Optional[tuple] = None
    maximize: bool = True

    @classmethod
    def build(cls, objective, constraints=(), lower_bounds=None, maximize=True):
        objective = tuple(Fraction(c) for c in objective)
        cons = []
        for c in constraints:
            if isinstance(c, Constraint):
                cons.append(c)
            else:
                coeffs, rel, bound = c
                cons.append(Constraint(tuple(Fraction(a) for a in coeffs), Relation(rel), Fraction(bound)))
        lbs = None
        if lower_bounds is not None:
            lbs = tuple(None if b is None else Fraction(b) for b in lower_bounds)
        return cls(objective, tuple(cons), lbs, maximize)

    @property
    def n_vars(self):
        return len(self.objective)


@dataclass(frozen=True)
class LpSolution:
    status: LpStatus
    values: tuple = ()
    objective_value: Optional[Fraction] = None


class Tableau:
    """Sparse simplex tableau over non-negative variables.

    Built from rows ``(coeffs: dict, relation, rhs)``.  ``phase_one`` finds a
    feasible basis once; ``optimize`` can then be called for several
    objectives, each starting from the current basis.
    """

    def __init__(self, n_vars, rows):
        self.n_vars = n_vars
        self.rows = []
        self.rhs = []
        self.basis = []
        self.artificial = set()
        col = n_vars
        for coeffs, rel, b in rows:
            row = {k: _to_q(v) for k, v in coeffs.items() if v != 0}
            b = _to_q(b)
            if b < 0:
                row = {k: -v for k, v in row.items()}
                b = -b
                rel = {Relation.LE: Relation.GE, Relation.GE: Relation.LE}.get(rel, rel)
            if rel == Relation.LE:
                row[col] = _Q(1)
                self.basis.append(col)
                col += 1
            else:
                if rel == Relation.GE:
                    row[col] = _Q(-1)
                    col += 1
                row[col] = _Q(1)
                self.artificial.add(col)
                self.basis.append(col)
                col += 1
            self.rows.append(row)
            self.rhs.append(b)
        self.n_cols = col
        self.banned = set()
        self.feasible = None
        self.pivots = 0

    # -- core pivoting -------------------------------------------------

    def _pivot(self, r, e, zrow):
        prow = self.rows[r]
        piv = prow[e]
        if piv != 1:
            inv = 1 / piv
            for k in prow:
                prow[k] *= inv
            self.rhs[r] *= inv
        prow[e] = _Q(1)
        prhs = self.rhs[r]
        for rr, row in enumerate(self.rows):
            if rr == r:
                continue
            f = row.get(e)
            if not f:
                continue
            for k, v in prow.items():
                nv = row.get(k, _ZERO) - f * v
                if nv:
                    row[k] = nv
                else:
                    row.pop(k, None)
            self.rhs[rr] -= f * prhs
        f = zrow[0].get(e)
        if f:
            z = zrow[0]
            for k, v in prow.items():
                nv = z.get(k, _ZERO) - f * v
                if nv:
                    z[k] = nv
                else:
                    z.pop(k, None)
            zrow[1] += f * prhs
        self.basis[r] = e
        self.pivots += 1

    def _reduced_costs(self, cost):
        z = {k: v for k, v in cost.items() if v}
        val = _ZERO
        for r, bcol in enumerate(self.basis):
            cb = cost.get(bcol)
            if not cb:
                continue
            for k, v in self.rows[r].items():
                nv = z.get(k, _ZERO) - cb * v
                if nv:
                    z[k] = nv
                else:
                    z.pop(k, None)
            val += cb * self.rhs[r]
        return [z, val]

    def _run(self, zrow):
        """Maximise; returns False when unbounded."""
        while True:
            entering = None
            for k in sorted(zrow[0]):
                if zrow[0][k] > 0 and k not in self.banned and k not in self.basis_set:
                    entering = k
                    break
            if entering is None:
                return True
            best = None
            for r, row in enumerate(self.rows):
                a = row.get(entering)
                if a is not None and a > 0:
                    ratio = self.rhs[r] / a
                    if best is None or ratio < best[0] or (ratio == best[0] and self.basis[r] < self.basis[best[1]]):
                        best = (ratio, r)
            if best is None:
                return False
            r = best[1]
            self.basis_set.discard(self.basis[r])
            self._pivot(r, entering, zrow)
            self.basis_set.add(entering)

    @property
    def basis_set(self):
        try:
            return self._basis_set
        except AttributeError:
            self._basis_set = set(self.basis)
            return self._basis_set

    # -- phases ----------------------------------------------------------

    def phase_one(self):
        if self.feasible is not None:
            return self.feasible
        if self.artificial:
            cost = {a: _Q(-1) for a in self.artificial}
            zrow = self._reduced_costs(cost)
            self._run(zrow)
            if zrow[1] != 0:
                self.feasible = False
                return False
            # drive zero-level artificials out of the basis, drop redundant rows
            r = 0
            while r < len(self.rows):
                if self.basis[r] in self.artificial:
                    row = self.rows[r]
                    cand = [k for k in sorted(row) if k not in self.artificial and row[k] != 0]
                    if cand:
                        self.basis_set.discard(self.basis[r])
                        self._pivot(r, cand[0], [dict(), _ZERO])
                        self.basis_set.add(cand[0])
                    else:
                        del self.rows[r]
                        del self.rhs[r]
                        self.basis_set.discard(self.basis[r])
                        del self.basis[r]
                        continue
                r += 1
            for row in self.rows:
                for a in self.artificial:
                    row.pop(a, None)
            self.banned |= self.artificial
        self.feasible = True
        return True

    def optimize(self, objective, maximize=True):
        """Optimise ``objective`` (dict over structural columns).

        Returns ``(status, values, value)`` with values as Fractions.
        """
        if not self.phase_one():
            return LpStatus.INFEASIBLE, None, None
        sign = 1 if maximize else -1
        cost = {k: _to_q(v) * sign for k, v in objective.items() if v != 0}
        zrow = self._reduced_costs(cost)
        if not self._run(zrow):
            return LpStatus.UNBOUNDED, None, None
        values = [Fraction(0)] * self.n_vars
        for r, bcol in enumerate(self.basis):
            if bcol < self.n_vars:
                values[bcol] = _from_q(self.rhs[r])
        return LpStatus.OPTIMAL, values, _from_q(zrow[1]) * sign


def lp_solve(lp: LinearProgram) -> LpSolution:
    """Solve ``lp`` exactly.

    The returned point is a basic (vertex) optimum; Bland's rule makes the
    result deterministic.
    """
    n = lp.n_vars
    for c in lp.constraints:
        if len(c.coefficients) != n:
            raise MalformedLP(f"constraint has {len(c.coefficients)} coefficients, expected {n}")
    lbs = lp.lower_bounds if lp.lower_bounds is not None else (Fraction(0),) * n
    if len(lbs) != n:
        raise MalformedLP(f"{len(lbs)} lower bounds for {n} variables")

    # x_k = lb_k + y_k, or y_k - w_k when free
    columns = []  # per original variable: list of (internal column, sign)
    shift = []
    col = 0
    for lb in lbs:
        if lb is None:
            columns.append(((col, 1), (col + 1, -1)))
            shift.append(Fraction(0))
            col += 2
        else:
            columns.append(((col, 1),))
            shift.append(lb)
            col += 1
    rows = []
    for c in lp.constraints:
        coeffs = {}
        b = c.bound
        for k, a in enumerate(c.coefficients):
            if a == 0:
                continue
            b -= a * shift[k]
            for icol, s in columns[k]:
                coeffs[icol] = coeffs.get(icol, 0) + s * a
        rows.append((coeffs, c.relation, b))
    tab = Tableau(col, rows)
    obj = {}
    for k, a in enumerate(lp.objective):
        for icol, s in columns[k]:
            obj[icol] = obj.get(icol, 0) + s * a
    status, values, value = tab.optimize(obj, lp.maximize)
    if status != LpStatus.OPTIMAL:
        return LpSolution(status)
    x = []
    for k in range(n):
        x.append(shift[k] + sum(s * values[icol] for icol, s in columns[k]))
    value = sum(a * xv for a, xv in zip(lp.objective, x))
    return LpSolution(LpStatus.OPTIMAL, tuple(x), Fraction(value))


def check_feasible(lp: LinearProgram, values: Sequence[Fraction]) -> bool:
    """Zero-tolerance feasibility check of a candidate point."""
    lbs = lp.lower_bounds if lp.lower_bounds is not None else (Fraction(0),) * lp.n_vars
    for v, lb in zip(values, lbs):
        if lb is not None and v < lb:
            return False
    for c in lp.constraints:
        lhs = sum(a * v for a, v in zip(c.coefficients, values))
        if c.relation == Relation.LE and lhs > c.bound:
            return False
        if c.relation == Relation.GE and lhs < c.bound:
            return False
        if c.relation == Relation.EQ and lhs != c.bound:
            return False
    return True
