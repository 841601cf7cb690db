"""
Comparison engine — pairwise deviations between method estimates.
"""
from __future__ import annotations

from itertools import combinations

from latsum.schemas import ComparisonReport, ComparisonRow, MethodValue, SumParams


def compare_values(
    values: list[MethodValue], params: SumParams, tol: float
) -> ComparisonReport:
    """Every unordered pair, in input order; passes when all deviations <= tol."""
    rows: list[ComparisonRow] = []
    for left, right in combinations(values, 2):
        deviation = abs(left.value - right.value)
        rows.append(
            ComparisonRow(
                left=left.method,
                right=right.method,
                left_value=left.value,
                right_value=right.value,
                deviation=deviation,
                within_tol=deviation <= tol,
            )
        )
    return ComparisonReport(
        params=params,
        tol=tol,
        values=values,
        rows=rows,
        passed=all(row.within_tol for row in rows),
    )
