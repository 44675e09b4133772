"""Self-contained simplex solvers over exact rationals.

``solve_lp`` maximizes ``c . x`` subject to ``A_ub x <= b_ub``,
``A_eq x = b_eq``, ``x >= 0`` and returns an exactly optimal primal/dual
pair.  Two engines share the tableau logic:

- a dense two-phase simplex over ``QQ`` with Bland's rule (the reference
  path, immune to cycling);
- a float mirror of the same tableau used as a warm start on larger
  problems: its solution is snapped to small-denominator rationals and
  accepted only when exact primal feasibility, exact dual feasibility and
  exact objective equality all hold, otherwise the exact engine runs from
  scratch.

Either way the result is certified: the returned dual is exactly feasible
with objective equal to the primal's, so optimality never rests on floating
point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import InternalInvariantError, PreconditionError
from .rational import QQ, ZERO, rat

try:
    import numpy as _np
except ImportError:  # pragma: no cover
    _np = None

_FLOAT_THRESHOLD = 160  # structural columns above which the warm start runs
_SNAP_DENOMS = (1, 2, 3, 4, 6, 8, 12, 24, 48, 60, 120, 360, 2520, 10 ** 4, 10 ** 6)


@dataclass
class LPResult:
    """Optimal primal ``x``, duals for the two row blocks, and the value."""

    x: list
    y_ub: list
    y_eq: list
    value: object
    engine: str


def solve_lp(c: Sequence, A_ub: Sequence[dict], b_ub: Sequence,
             A_eq: Sequence[dict] = (), b_eq: Sequence = ()) -> LPResult:
    """Maximize ``c . x`` over the given system; all data rational.

    Rows are sparse dicts ``{column: coefficient}``.  Requires ``b_ub >= 0``
    (all capacity-style uses satisfy this).  Raises ``PreconditionError`` on
    infeasible or unbounded input.
    """
    c = [rat(v) for v in c]
    b_ub = [rat(v) for v in b_ub]
    b_eq = [rat(v) for v in b_eq]
    if any(v < 0 for v in b_ub):
        raise PreconditionError("b_ub must be non-negative")
    n = len(c)

    if _np is not None and n > _FLOAT_THRESHOLD:
        got = _float_then_snap(c, A_ub, b_ub, A_eq, b_eq)
        if got is not None:
            return got
    x, y_ub, y_eq = _simplex_exact(c, A_ub, b_ub, A_eq, b_eq)
    value = sum((ci * xi for ci, xi in zip(c, x)), ZERO)
    return LPResult(x, y_ub, y_eq, value, engine="exact")


def check_certificate(c, A_ub, b_ub, A_eq, b_eq, x, y_ub, y_eq) -> bool:
    """Exact optimality check: primal/dual feasible with equal objectives."""
    n = len(c)
    if len(x) != n or any(v < 0 for v in x):
        return False
    for row, b in zip(A_ub, b_ub):
        if sum((coef * x[j] for j, coef in row.items()), ZERO) > b:
            return False
    for row, b in zip(A_eq, b_eq):
        if sum((coef * x[j] for j, coef in row.items()), ZERO) != b:
            return False
    if any(v < 0 for v in y_ub):
        return False
    # dual feasibility per column: A^T y >= c
    col_tot = [ZERO] * n
    for row, y in zip(A_ub, y_ub):
        if y:
            for j, coef in row.items():
                col_tot[j] += coef * y
    for row, y in zip(A_eq, y_eq):
        if y:
            for j, coef in row.items():
                col_tot[j] += coef * y
    if any(col_tot[j] < c[j] for j in range(n)):
        return False
    primal = sum((c[j] * x[j] for j in range(n)), ZERO)
    dual = sum((b * y for b, y in zip(b_ub, y_ub)), ZERO) + \
        sum((b * y for b, y in zip(b_eq, y_eq)), ZERO)
    return primal == dual


# ---------------------------------------------------------------------------
# exact dense tableau
# ---------------------------------------------------------------------------

def _build_tableau(c, A_ub, b_ub, A_eq, b_eq, numeric):
    """Rows: constraints; columns: structural | slacks | artificials | rhs."""
    n = len(c)
    m_ub, m_eq = len(A_ub), len(A_eq)
    m = m_ub + m_eq
    width = n + m_ub + m_eq + 1
    conv = (lambda v: float(v)) if numeric else rat
    zero = 0.0 if numeric else ZERO
    one = 1.0 if numeric else rat(1)
    rows = []
    basis = []
    for i, (row, b) in enumerate(zip(A_ub, b_ub)):
        r = [zero] * width
        for j, coef in row.items():
            r[j] = conv(coef)
        r[n + i] = one
        r[-1] = conv(b)
        rows.append(r)
        basis.append(n + i)
    for i, (row, b) in enumerate(zip(A_eq, b_eq)):
        r = [zero] * width
        sign = 1 if b >= 0 else -1
        for j, coef in row.items():
            r[j] = conv(coef * sign) if not numeric else float(coef) * sign
        r[n + m_ub + i] = one
        r[-1] = conv(b * sign) if not numeric else float(b) * sign
        rows.append(r)
        basis.append(n + m_ub + i)
    return rows, basis, n, m_ub, m_eq


def _simplex_exact(c, A_ub, b_ub, A_eq, b_eq):
    rows, basis, n, m_ub, m_eq = _build_tableau(c, A_ub, b_ub, A_eq, b_eq,
                                                numeric=False)
    m = len(rows)
    width = n + m_ub + m_eq + 1
    art_lo = n + m_ub
    art_set = set(range(art_lo, art_lo + m_eq))

    # phase-1 objective row: minimize sum of artificials == maximize -sum
    obj1 = [ZERO] * width
    for i in range(m):
        if basis[i] in art_set:
            for j in range(width):
                obj1[j] += rows[i][j]
    # obj1 holds sum over artificial rows; reduced costs of -sum(artificials)
    # are obj1 entries for non-artificial columns (artificials get 0).
    for j in art_set:
        obj1[j] = ZERO

    def pivot(rows_, obj_rows, pr, pc):
        prow = rows_[pr]
        inv = prow[pc]
        rows_[pr] = [v / inv for v in prow]
        prow = rows_[pr]
        for r in rows_ + obj_rows:
            if r is prow:
                continue
            coef = r[pc]
            if coef:
                for j in range(width):
                    if prow[j]:
                        r[j] -= coef * prow[j]
        return

    obj2 = [ZERO] * width
    for j in range(n):
        obj2[j] = c[j]

    def run(obj, allowed, obj_rows):
        guard = 0
        while True:
            guard += 1
            if guard > 200000:
                raise InternalInvariantError("simplex iteration guard tripped")
            enter = -1
            for j in range(width - 1):
                if j in art_set and not allowed:
                    continue
                if obj[j] > 0:
                    enter = j
                    break
            if enter < 0:
                return
            leave = -1
            best = None
            for i in range(m):
                a = rows[i][enter]
                if a > 0:
                    ratio = rows[i][-1] / a
                    if best is None or ratio < best or (
                            ratio == best and basis[i] < basis[leave]):
                        best, leave = ratio, i
                elif a < 0 and basis[i] in art_set and rows[i][-1] == 0:
                    # drive a zero-valued artificial out rather than let it
                    # grow positive
                    best, leave = ZERO, i
                    break
            if leave < 0:
                raise PreconditionError("LP is unbounded")
            pivot(rows, obj_rows, leave, enter)
            basis[leave] = enter

    if m_eq:
        run(obj1, allowed=False, obj_rows=[obj1, obj2])
        infeas = sum((rows[i][-1] for i in range(m) if basis[i] in art_set),
                     ZERO)
        if infeas != 0:
            raise PreconditionError("LP is infeasible")
    run(obj2, allowed=False, obj_rows=[obj2])

    x = [ZERO] * n
    for i in range(m):
        if basis[i] < n:
            x[basis[i]] = rows[i][-1]
    y_ub = [-obj2[n + i] for i in range(m_ub)]
    y_eq = []
    for i in range(m_eq):
        sign = 1 if b_eq[i] >= 0 else -1
        y_eq.append(-obj2[art_lo + i] * sign)
    return x, y_ub, y_eq


# ---------------------------------------------------------------------------
# float warm start
# ---------------------------------------------------------------------------

def _simplex_float(c, A_ub, b_ub, A_eq, b_eq):
    n = len(c)
    m_ub, m_eq = len(A_ub), len(A_eq)
    m = m_ub + m_eq
    width = n + m_ub + m_eq + 1
    art_lo = n + m_ub
    T = _np.zeros((m, width))
    basis = []
    for i, (row, b) in enumerate(zip(A_ub, b_ub)):
        for j, coef in row.items():
            T[i, j] = float(coef)
        T[i, n + i] = 1.0
        T[i, -1] = float(b)
        basis.append(n + i)
    for i, (row, b) in enumerate(zip(A_eq, b_eq)):
        sign = 1.0 if b >= 0 else -1.0
        for j, coef in row.items():
            T[m_ub + i, j] = float(coef) * sign
        T[m_ub + i, art_lo + i] = 1.0
        T[m_ub + i, -1] = float(b) * sign
        basis.append(art_lo + i)
    obj1 = T[m_ub:].sum(axis=0) if m_eq else _np.zeros(width)
    obj1[art_lo:art_lo + m_eq] = 0.0
    obj2 = _np.zeros(width)
    obj2[:n] = [float(v) for v in c]
    tol = 1e-9
    art_cols = _np.zeros(width, dtype=bool)
    art_cols[art_lo:art_lo + m_eq] = True
    basis = _np.array(basis)

    def run(obj, objs):
        for it in range(60000):
            red = obj[:-1].copy()
            red[art_cols[:-1]] = -1.0
            if it % 997 < 30:  # periodic Bland steps to break potential cycling
                cand = _np.nonzero(red > tol)[0]
                if cand.size == 0:
                    return True
                enter = int(cand[0])
            else:
                enter = int(_np.argmax(red))
                if red[enter] <= tol:
                    return True
            col = T[:, enter]
            pos = col > tol
            if not pos.any():
                return False  # unbounded direction; let exact engine decide
            ratios = _np.full(m, _np.inf)
            ratios[pos] = T[pos, -1] / col[pos]
            leave = int(_np.argmin(ratios))
            prow = T[leave] / T[leave, enter]
            T[leave] = prow
            coefs = T[:, enter].copy()
            coefs[leave] = 0.0
            T[:] -= _np.outer(coefs, prow)
            for o in objs:
                o -= o[enter] * prow
            basis[leave] = enter
        return False

    if m_eq:
        if not run(obj1, [obj1, obj2]):
            return None
        if sum(T[i, -1] for i in range(m) if basis[i] >= art_lo) > 1e-6:
            return None
    if not run(obj2, [obj2]):
        return None
    x = _np.zeros(n)
    for i in range(m):
        if basis[i] < n:
            x[basis[i]] = T[i, -1]
    y_ub = [-obj2[n + i] for i in range(m_ub)]
    y_eq = []
    for i in range(m_eq):
        sign = 1.0 if b_eq[i] >= 0 else -1.0
        y_eq.append(-obj2[art_lo + i] * sign)
    return list(x), y_ub, y_eq


def _snap(values, denom):
    out = []
    for v in values:
        f = Fraction(v).limit_denominator(denom)
        out.append(QQ(f))
    return out


def _float_then_snap(c, A_ub, b_ub, A_eq, b_eq):
    try:
        got = _simplex_float(c, A_ub, b_ub, A_eq, b_eq)
    except FloatingPointError:  # pragma: no cover
        return None
    if got is None:
        return None
    xf, yubf, yeqf = got
    for denom in _SNAP_DENOMS:
        x = _snap(xf, denom)
        y_ub = [max(v, ZERO) for v in _snap(yubf, denom)]
        y_eq = _snap(yeqf, denom)
        if check_certificate(c, A_ub, b_ub, A_eq, b_eq, x, y_ub, y_eq):
            value = sum((ci * xi for ci, xi in zip(c, x)), ZERO)
            return LPResult(x, y_ub, y_eq, value, engine="float+certify")
    return None
