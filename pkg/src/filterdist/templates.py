"""Filter redistribution templates and budget-preserving rounding.

Given a filter plan of depth D with total budget F, a template produces a
new real-valued count for every unit; the rounding step then converts those
to integers that sum to exactly F.  The two parabolic templates come from a
3x3 linear system:

quadratic (opens upward, minimum f_min at the middle of the stack)
    (D^3/3 + D^2/2 + D/6) a + (D^2/2 + D/2) b + D c = F        budget
    (D/2)^2 a + (D/2) b + c = f_min                            vertex value
    (D^2 - 1) a + (D - 1) b = 0                                f(1) = f(D)

negative quadratic (opens downward, both endpoints at f_min)
    (D^3/3 + D^2/2 + D/6) a + (D^2/2 + D/2) b + D c = F
    a + b + c = f_min
    D^2 a + D b + c = f_min

Both systems are solved by Gaussian elimination with partial pivoting; the
fixed 3x3 size needs no external solver.  D/2 is used as a real number even
for odd D (the constraints live on the continuous curve).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

from .archspec import (
    ArchitectureSpec,
    FilterDistError,
    apply_filter_plan,
    extract_filter_plan,
)


class SingularSystemError(FilterDistError):
    """The template's linear system has no unique solution (depth <= 2)."""


class TemplateInfeasibleError(FilterDistError):
    """No valid distribution exists for this budget/depth combination."""


class TemplateId(enum.Enum):
    BASE = "base"
    REVERSE = "reverse"
    UNIFORM = "uniform"
    QUADRATIC = "quadratic"
    NEGATIVE_QUADRATIC = "negative-quadratic"

    @property
    def token(self) -> str:
        return self.value

    @classmethod
    def from_token(cls, token: str) -> "TemplateId":
        for t in cls:
            if t.value == token:
                return t
        raise FilterDistError(
            f"unknown template {token!r}; expected one of "
            + ", ".join(t.value for t in cls)
        )


# canonical ordering used everywhere a template list is expanded
ALL_TEMPLATES = (
    TemplateId.BASE,
    TemplateId.REVERSE,
    TemplateId.UNIFORM,
    TemplateId.QUADRATIC,
    TemplateId.NEGATIVE_QUADRATIC,
)


@dataclass(frozen=True, slots=True)
class QuadraticCoefficients:
    a: float
    b: float
    c: float


def gauss_solve(matrix: Sequence[Sequence[float]], rhs: Sequence[float]) -> list[float]:
    """Solve a small dense system by Gaussian elimination with partial pivoting.

    A pivot smaller than 1e-12 times the largest entry of the matrix declares
    the system singular.
    """
    n = len(rhs)
    a = [list(map(float, row)) + [float(b)] for row, b in zip(matrix, rhs)]
    scale = max(abs(v) for row in a for v in row[:n])
    if scale == 0.0:
        raise SingularSystemError("system matrix is zero")
    tol = 1e-12 * scale
    for col in range(n):
        pivot_row = max(range(col, n), key=lambda r: abs(a[r][col]))
        if abs(a[pivot_row][col]) < tol:
            raise SingularSystemError("system matrix is singular")
        if pivot_row != col:
            a[col], a[pivot_row] = a[pivot_row], a[col]
        for r in range(col + 1, n):
            if a[r][col] != 0.0:
                factor = a[r][col] / a[col][col]
                for c in range(col, n + 1):
                    a[r][c] -= factor * a[col][c]
    x = [0.0] * n
    for r in range(n - 1, -1, -1):
        acc = a[r][n] - sum(a[r][c] * x[c] for c in range(r + 1, n))
        x[r] = acc / a[r][r]
    return x


def uniform_counts(total_filters: int, depth: int) -> list[float]:
    """Spread the budget evenly: depth copies of total/depth, unrounded."""
    if depth == 0:
        raise TemplateInfeasibleError("depth must be >= 1")
    if total_filters < depth:
        raise TemplateInfeasibleError(
            f"budget {total_filters} cannot give every one of {depth} units a filter"
        )
    return [total_filters / depth] * depth


def reverse_counts(counts: Sequence[int]) -> list[int]:
    """Flip the per-layer counts end to end."""
    if not counts:
        raise TemplateInfeasibleError("cannot reverse an empty plan")
    return list(counts)[::-1]


def _sum_constraint_row(depth: int) -> list[float]:
    d = float(depth)
    return [d**3 / 3 + d**2 / 2 + d / 6, d**2 / 2 + d / 2, d]


def solve_quadratic(depth: int, total_filters: int, f_min: int) -> QuadraticCoefficients:
    """Coefficients of the upward parabola template; requires depth >= 3."""
    if depth <= 2:
        raise SingularSystemError(
            f"quadratic template needs depth >= 3, got {depth}"
        )
    d = float(depth)
    half = d / 2.0
    a, b, c = gauss_solve(
        [
            _sum_constraint_row(depth),
            [half * half, half, 1.0],
            [d * d - 1.0, d - 1.0, 0.0],
        ],
        [float(total_filters), float(f_min), 0.0],
    )
    if a <= 0.0:
        raise TemplateInfeasibleError(
            "quadratic template infeasible for this budget (curvature not positive)"
        )
    return QuadraticCoefficients(a, b, c)


def solve_negative_quadratic(depth: int, total_filters: int, f_min: int) -> QuadraticCoefficients:
    """Coefficients of the downward parabola template; requires depth >= 3."""
    if depth <= 2:
        raise SingularSystemError(
            f"negative-quadratic template needs depth >= 3, got {depth}"
        )
    d = float(depth)
    a, b, c = gauss_solve(
        [
            _sum_constraint_row(depth),
            [1.0, 1.0, 1.0],
            [d * d, d, 1.0],
        ],
        [float(total_filters), float(f_min), float(f_min)],
    )
    if a >= 0.0:
        raise TemplateInfeasibleError(
            "negative-quadratic template infeasible for this budget (curvature not negative)"
        )
    return QuadraticCoefficients(a, b, c)


def eval_polynomial(coeffs: QuadraticCoefficients, layer_index: int | float) -> float:
    return coeffs.a * layer_index * layer_index + coeffs.b * layer_index + coeffs.c


def round_preserving_sum(reals: Sequence[float], total_filters: int) -> list[int]:
    """Largest-remainder integerization that lands exactly on the budget.

    Each value is clamped to >= 1 and floored; the missing units go one at a
    time to the largest fractional remainders, earlier entries winning ties
    (fractions are compared at 1e-9 resolution so mathematically tied values
    do not get ordered by floating-point noise).  When clamping overshoots
    the budget, the surplus is taken from the largest entries, later entries
    first on ties, never dropping any entry below 1.
    """
    n = len(reals)
    if n == 0:
        raise TemplateInfeasibleError("cannot round an empty plan")
    if any(not math.isfinite(r) for r in reals):
        raise ValueError("counts must be finite")
    if total_filters < n:
        raise TemplateInfeasibleError(
            f"budget {total_filters} cannot give every one of {n} units a filter"
        )
    clamped = [max(float(r), 1.0) for r in reals]
    out = [int(math.floor(v)) for v in clamped]
    fracs = [round(v - f, 9) for v, f in zip(clamped, out)]
    short = total_filters - sum(out)
    while short > 0:
        order = sorted(range(n), key=lambda i: (-fracs[i], i))
        for i in order:
            if short == 0:
                break
            out[i] += 1
            short -= 1
        fracs = [0.0] * n  # later passes spread evenly, earliest first
    while short < 0:
        i = max(range(n), key=lambda j: (out[j], j))
        if out[i] <= 1:
            raise TemplateInfeasibleError("cannot reduce any unit below 1 filter")
        out[i] -= 1
        short += 1
    return out


def template_counts(template: TemplateId, counts: Sequence[int]) -> list[int]:
    """New integer counts for a plan's unit list under one template."""
    depth = len(counts)
    total = sum(counts)
    if template is TemplateId.BASE:
        return list(counts)
    if template is TemplateId.REVERSE:
        reals = [float(c) for c in reverse_counts(counts)]
    elif template is TemplateId.UNIFORM:
        reals = uniform_counts(total, depth)
    else:
        f_min = min(counts)
        if template is TemplateId.QUADRATIC:
            coeffs = solve_quadratic(depth, total, f_min)
        else:
            coeffs = solve_negative_quadratic(depth, total, f_min)
        reals = [eval_polynomial(coeffs, l) for l in range(1, depth + 1)]
    return round_preserving_sum(reals, total)


def apply_template(arch: ArchitectureSpec, template: TemplateId) -> ArchitectureSpec:
    """Redistribute an architecture's filters; the total budget is conserved exactly."""
    if template is TemplateId.BASE:
        return arch
    plan = extract_filter_plan(arch)
    return apply_filter_plan(arch, template_counts(template, plan.counts))
