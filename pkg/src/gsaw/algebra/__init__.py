"""Exact algebra for transfer-matrix generating functions."""

from .poly import Poly, gens, rename, render_poly
from .ratfunc import RationalGF
from .series import Series, series_of, series_transfer
from .solve import BudgetExceeded, SingularSystemError, solve_transfer


def tour_generating_function(gf: RationalGF) -> RationalGF:
    """Greek key tours counted by columns, as a function of ``x``.

    ``gf`` is the solved Greek key automaton, which counts tours on grids of
    two or more columns by powers of ``y``.  The empty grid and the single
    column (one straight tour) are added here.
    """
    _, y, _ = gens()
    full = gf + 1 + RationalGF(y)
    return RationalGF(rename(full.num, "y", "x"), rename(full.den, "y", "x"))


__all__ = [
    "BudgetExceeded",
    "Poly",
    "RationalGF",
    "Series",
    "SingularSystemError",
    "gens",
    "render_poly",
    "series_of",
    "series_transfer",
    "solve_transfer",
    "tour_generating_function",
]
