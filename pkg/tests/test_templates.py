import math
import random

import pytest

from filterdist import (
    SingularSystemError,
    TemplateId,
    TemplateInfeasibleError,
    apply_template,
    eval_polynomial,
    extract_filter_plan,
    reverse_counts,
    round_preserving_sum,
    solve_negative_quadratic,
    solve_quadratic,
    template_counts,
    uniform_counts,
)
from filterdist.templates import gauss_solve
from genarch import make_arch, random_arch

VGG_COUNTS = (64, 64, 128, 128, 256, 256, 256, 256, 512, 512, 512, 512, 512, 512, 512, 512)

# frozen from an independent sympy solve of both 3x3 systems (notes/oracle_solve.py)
QUAD_D16 = (40.0 / 3.0, -680.0 / 3.0, 1024.0)
NEGQUAD_D16 = (-8.0, 136.0, -64.0)


def relerr(x, ref):
    return abs(x - ref) / max(abs(ref), 1e-30)


def test_uniform_counts():
    assert uniform_counts(5504, 16) == [344.0] * 16
    assert uniform_counts(10, 1) == [10.0]
    assert uniform_counts(7, 2) == [3.5, 3.5]
    with pytest.raises(TemplateInfeasibleError):
        uniform_counts(10, 0)


def test_reverse_counts():
    assert reverse_counts([64, 128, 256]) == [256, 128, 64]
    assert reverse_counts([64, 128, 64]) == [64, 128, 64]
    assert reverse_counts(VGG_COUNTS) == [512] * 8 + [256] * 4 + [128, 128, 64, 64]
    with pytest.raises(TemplateInfeasibleError):
        reverse_counts([])


def test_gauss_solve_pivoting():
    # needs a row swap: zero leading pivot
    x = gauss_solve([[0.0, 2.0, 1.0], [1.0, 0.0, 0.0], [0.0, 0.0, 4.0]], [5.0, 3.0, 8.0])
    assert x == pytest.approx([3.0, 1.5, 2.0])
    with pytest.raises(SingularSystemError):
        gauss_solve([[1.0, 2.0, 3.0], [2.0, 4.0, 6.0], [1.0, 1.0, 1.0]], [1.0, 2.0, 3.0])


def test_quadratic_frozen_solution():
    q = solve_quadratic(16, 5504, 64)
    for got, want in zip((q.a, q.b, q.c), QUAD_D16):
        assert relerr(got, want) < 1e-9
    assert relerr(eval_polynomial(q, 1), 2432.0 / 3.0) < 1e-9
    assert relerr(eval_polynomial(q, 16), 2432.0 / 3.0) < 1e-9
    assert relerr(eval_polynomial(q, 8), 64.0) < 1e-9


def test_negative_quadratic_frozen_solution():
    q = solve_negative_quadratic(16, 5504, 64)
    for got, want in zip((q.a, q.b, q.c), NEGQUAD_D16):
        assert relerr(got, want) < 1e-9
    assert relerr(eval_polynomial(q, 1), 64.0) < 1e-9
    assert relerr(eval_polynomial(q, 16), 64.0) < 1e-9
    assert relerr(eval_polynomial(q, 8.5), 514.0) < 1e-9  # vertex
    assert relerr(sum(eval_polynomial(q, l) for l in range(1, 17)), 5504.0) < 1e-9


def test_eval_polynomial_constant():
    from filterdist import QuadraticCoefficients
    assert eval_polynomial(QuadraticCoefficients(0.0, 0.0, 5.0), 7) == 5.0


@pytest.mark.parametrize("solver", [solve_quadratic, solve_negative_quadratic])
def test_solvers_reject_degenerate_depth(solver):
    with pytest.raises(SingularSystemError):
        solver(2, 100, 3)


def test_solvers_reject_wrong_curvature():
    # budget below depth * f_min flips the curvature sign
    with pytest.raises(TemplateInfeasibleError, match="infeasible"):
        solve_quadratic(10, 50, 64)
    with pytest.raises(TemplateInfeasibleError, match="infeasible"):
        solve_negative_quadratic(10, 50, 64)


def test_curve_symmetry_about_midpoint():
    rng = random.Random(7)
    for _ in range(50):
        d = rng.randint(3, 40)
        m = rng.randint(1, 128)
        f = d * m + rng.randint(1, 20 * d)
        for solver in (solve_quadratic, solve_negative_quadratic):
            q = solver(d, f, m)
            for l in range(1, d + 1):
                a, b = eval_polynomial(q, l), eval_polynomial(q, d + 1 - l)
                assert relerr(a, b) < 1e-9


def test_round_tie_goes_to_earlier_layer():
    assert round_preserving_sum([3.5, 3.5], 7) == [4, 3]


def test_round_already_integral():
    assert round_preserving_sum([344.0] * 16, 5504) == [344] * 16


def test_round_quadratic_reals_hit_budget():
    q = solve_quadratic(16, 5504, 64)
    reals = [eval_polynomial(q, l) for l in range(1, 17)]
    ints = round_preserving_sum(reals, 5504)
    assert sum(ints) == 5504
    # six entries carry the same 2/3 remainder; the four extra units go to
    # the earliest of them
    assert ints == [811, 624, 464, 331, 224, 144, 91, 64, 64, 91, 144, 224, 330, 464, 624, 810]


def test_round_clamps_and_repays_from_largest():
    assert round_preserving_sum([-3.0, 0.2, 10.0], 8) == [1, 1, 6]
    assert round_preserving_sum([0.5, 3.3, 3.6], 5) == [1, 2, 2]


def test_round_budget_below_depth():
    with pytest.raises(TemplateInfeasibleError):
        round_preserving_sum([1.0, 1.0, 1.0], 2)


def test_round_rejects_non_finite():
    with pytest.raises(ValueError):
        round_preserving_sum([1.0, math.inf], 5)


def test_template_tokens():
    assert TemplateId.from_token("negative-quadratic") is TemplateId.NEGATIVE_QUADRATIC
    with pytest.raises(Exception, match="unknown template"):
        TemplateId.from_token("Quadratic")


def vgg_arch():
    descr = []
    for f in VGG_COUNTS:
        descr.append(("conv", f))
    descr.append(("classifier",))
    return make_arch(descr, size=32, classes=10)


def test_apply_base_is_identity():
    arch = vgg_arch()
    assert apply_template(arch, TemplateId.BASE) == arch


def test_apply_uniform_vgg():
    out = apply_template(vgg_arch(), TemplateId.UNIFORM)
    assert list(extract_filter_plan(out).counts) == [344] * 16
    assert out.layers[-1].filters == 10  # classifier untouched


def test_apply_reverse_is_involution():
    arch = vgg_arch()
    once = apply_template(arch, TemplateId.REVERSE)
    assert apply_template(once, TemplateId.REVERSE) == arch


def test_apply_uniform_idempotent_when_divisible():
    arch = vgg_arch()  # 5504 % 16 == 0
    once = apply_template(arch, TemplateId.UNIFORM)
    assert apply_template(once, TemplateId.UNIFORM) == once


def test_template_counts_conserve_budget_property():
    rng = random.Random(99)
    for _ in range(300):
        counts = [rng.randint(1, 30) for _ in range(rng.randint(3, 12))]
        if len(set(counts)) == 1:
            counts[0] += 1
        for template in TemplateId:
            out = template_counts(template, counts)
            assert sum(out) == sum(counts), (template, counts)
            assert all(c >= 1 for c in out)
