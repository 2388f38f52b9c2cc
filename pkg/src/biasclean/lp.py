"""Exact rational simplex for covering linear programs.

The programs solved here have the shape

    minimise  c . x
    subject   sum_j a_ij x_j >= 1   for every row i   (a_ij >= 0 integers)
              x >= 0

with strictly positive costs c.  Upper bounds of 1 on the variables would be
redundant: truncating any feasible point at 1 keeps every covering row
satisfied and strictly lowers the cost, so all optima already live in the unit
box.  Callers relying on the box assert it on the returned point.

The implementation is a dense two-phase tableau simplex over ``Fraction``
entries using Bland's anticycling rule (lowest eligible index enters, ratio
ties leave by lowest basis index), which makes the run deterministic and
guarantees termination at a basic optimal solution, i.e. a vertex.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Sequence


class LinearProgramError(RuntimeError):
    pass


class Infeasible(LinearProgramError):
    pass


class Unbounded(LinearProgramError):
    pass


def minimize_covering(
    costs: Sequence[Fraction], rows: Sequence[Mapping[int, int]]
) -> tuple[Fraction, list[Fraction]]:
    """Solve the covering LP above; returns the optimum value and a basic
    optimal point."""
    n = len(costs)
    m = len(rows)
    zero = Fraction(0)
    if m == 0:
        return zero, [zero] * n

    # Columns: n structural | m surplus | m artificial, then the rhs.
    total = n + 2 * m
    tableau: list[list[Fraction]] = []
    for i, row in enumerate(rows):
        r = [zero] * (total + 1)
        for j, coef in row.items():
            if coef < 0:
                raise LinearProgramError("covering rows need non-negative coefficients")
            r[j] = Fraction(coef)
        r[n + i] = Fraction(-1)
        r[n + m + i] = Fraction(1)
        r[total] = Fraction(1)
        tableau.append(r)
    basis = [n + m + i for i in range(m)]

    phase_one = [zero] * (n + m) + [Fraction(1)] * m
    value = _run(tableau, basis, phase_one, blocked=frozenset())
    if value != 0:
        raise Infeasible("phase one did not reach zero")
    _expel_artificials(tableau, basis, first_artificial=n + m)

    phase_two = [Fraction(c) for c in costs] + [zero] * (len(tableau[0]) - 1 - n)
    blocked = frozenset(range(n + m, len(tableau[0]) - 1))
    value = _run(tableau, basis, phase_two, blocked)

    x = [zero] * n
    rhs = len(tableau[0]) - 1
    for i, b in enumerate(basis):
        if b < n:
            x[b] = tableau[i][rhs]
    return value, x


def _run(
    tableau: list[list[Fraction]],
    basis: list[int],
    costs: list[Fraction],
    blocked: frozenset[int],
) -> Fraction:
    """Bland-rule simplex iterations; returns the reached objective value."""
    width = len(tableau[0])
    rhs = width - 1
    obj = list(costs) + [Fraction(0)]
    for i, b in enumerate(basis):
        cb = obj[b]
        if cb:
            row = tableau[i]
            for j in range(width):
                if row[j]:
                    obj[j] -= cb * row[j]
    while True:
        enter = -1
        for j in range(rhs):
            if j not in blocked and obj[j] < 0:
                enter = j
                break
        if enter < 0:
            return -obj[rhs]
        leave = -1
        best: Fraction | None = None
        for i, row in enumerate(tableau):
            a = row[enter]
            if a > 0:
                ratio = row[rhs] / a
                if (
                    best is None
                    or ratio < best
                    or (ratio == best and basis[i] < basis[leave])
                ):
                    best = ratio
                    leave = i
        if leave < 0:
            raise Unbounded("no leaving row; objective unbounded below")
        _pivot(tableau, basis, obj, leave, enter)


def _pivot(
    tableau: list[list[Fraction]],
    basis: list[int],
    obj: list[Fraction] | None,
    leave: int,
    enter: int,
) -> None:
    row = tableau[leave]
    inv = 1 / row[enter]
    if inv != 1:
        tableau[leave] = row = [x * inv for x in row]
    for i, other in enumerate(tableau):
        if i != leave and other[enter]:
            factor = other[enter]
            tableau[i] = [x - factor * y for x, y in zip(other, row)]
    if obj is not None and obj[enter]:
        factor = obj[enter]
        obj[:] = [x - factor * y for x, y in zip(obj, row)]
    basis[leave] = enter


def _expel_artificials(
    tableau: list[list[Fraction]], basis: list[int], first_artificial: int
) -> None:
    """Pivot zero-valued artificials out of the basis, dropping redundant rows."""
    i = 0
    while i < len(tableau):
        if basis[i] < first_artificial:
            i += 1
            continue
        pivot_col = next(
            (j for j in range(first_artificial) if tableau[i][j] != 0), None
        )
        if pivot_col is None:
            del tableau[i]
            del basis[i]
            continue
        _pivot(tableau, basis, None, i, pivot_col)
        i += 1
