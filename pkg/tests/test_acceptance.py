"""Acceptance suite: every criterion runs at its stated tolerance and prints
one PASS/FAIL line.

Two template anchors cannot be met by any faithful implementation and are
expected to fail here; see README.md, "Known-red acceptance anchors":

* vgg19/quadratic ~= 15.8M: the quadratic curve pinned by the solver
  criterion (a=40/3, b=-680/3, c=1024) puts ~810 filters at both ends of
  the stack, which costs 19.4M parameters on a 16-conv chain.
* mobilenet/reverse ~= 2.2M: reversing a chain permutes but preserves the
  multiset of adjacent width products, so reverse always costs within ~10%
  of base (3.2M) for every chain-structured MobileNet reading.
"""

import random
import time

import pytest

from filterdist import (
    ALL_TEMPLATES,
    TemplateId,
    ZooModelId,
    apply_template,
    build_model,
    count_macs,
    count_parameters,
    eval_polynomial,
    extract_filter_plan,
    round_preserving_sum,
    solve_negative_quadratic,
    solve_quadratic,
)
from filterdist.cli import main as cli_main
from genarch import random_arch
from test_costmodel import enumerate_parameters


def criterion(name, ok, detail=""):
    print(f"ACCEPTANCE {name}: {'PASS' if ok else 'FAIL'} {detail}")
    assert ok, f"{name} {detail}"


# ---------------------------------------------------------------------------
# Table 2 parameter anchors
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("family,target,tol", [
    ("vgg19", 20.0e6, 0.05),
    ("mobilenet", 3.2e6, 0.10),
    ("resnet50", 23.5e6, 0.10),
    ("inception", 6.2e6, 0.15),
])
def test_base_parameter_anchors(family, target, tol):
    start = time.perf_counter()
    params = count_parameters(build_model(ZooModelId(family, "cifar10")))
    elapsed = time.perf_counter() - start
    ok = abs(params - target) <= tol * target and elapsed < 1.0
    criterion(f"base-anchor {family}", ok,
              f"({params/1e6:.3f}M vs {target/1e6:.1f}M +-{tol:.0%}, {elapsed:.3f}s)")


@pytest.mark.parametrize("family,template,target,tol", [
    ("vgg19", "uniform", 16.0e6, 0.10),
    ("vgg19", "quadratic", 15.8e6, 0.10),        # expected FAIL, see module docstring
    ("mobilenet", "reverse", 2.2e6, 0.10),       # expected FAIL, see module docstring
    ("mobilenet", "uniform", 2.2e6, 0.10),
    ("resnet50", "uniform", 12.9e6, 0.10),
    ("resnet50", "negative-quadratic", 33.0e6, 0.10),
])
def test_template_parameter_anchors(family, template, target, tol):
    arch = apply_template(build_model(ZooModelId(family, "cifar10")), TemplateId(template))
    params = count_parameters(arch)
    ok = abs(params - target) <= tol * target
    criterion(f"template-anchor {family}/{template}", ok,
              f"({params/1e6:.3f}M vs {target/1e6:.1f}M +-{tol:.0%})")


def test_resnet50_parameter_ordering():
    base = build_model(ZooModelId("resnet50", "cifar10"))
    uniform = count_parameters(apply_template(base, TemplateId.UNIFORM))
    negquad = count_parameters(apply_template(base, TemplateId.NEGATIVE_QUADRATIC))
    base_p = count_parameters(base)
    criterion("resnet50 ordering", uniform < base_p < negquad,
              f"(uniform {uniform} < base {base_p} < negative-quadratic {negquad})")


# ---------------------------------------------------------------------------
# quadratic solver correctness
# ---------------------------------------------------------------------------

def relerr(x, ref):
    return abs(x - ref) / max(abs(ref), 1e-30)


def quad_residuals(coeffs, depth, total, f_min):
    total_err = relerr(sum(eval_polynomial(coeffs, l) for l in range(1, depth + 1)), total)
    vertex_err = relerr(eval_polynomial(coeffs, depth / 2.0), f_min)
    endpoint = abs((depth * depth - 1) * coeffs.a + (depth - 1) * coeffs.b)
    return total_err, vertex_err, endpoint / total


def negquad_residuals(coeffs, depth, total, f_min):
    total_err = relerr(sum(eval_polynomial(coeffs, l) for l in range(1, depth + 1)), total)
    first = abs(coeffs.a + coeffs.b + coeffs.c - f_min) / f_min
    last = abs(coeffs.a * depth * depth + coeffs.b * depth + coeffs.c - f_min) / f_min
    return total_err, first, last


def test_quadratic_solver_frozen_case():
    # values re-derived independently with a separate symbolic 3x3 solve
    # before this implementation was written (notes/oracle_solve.py)
    q = solve_quadratic(16, 5504, 64)
    nq = solve_negative_quadratic(16, 5504, 64)
    ok = (
        relerr(q.a, 40.0 / 3.0) < 1e-9
        and relerr(q.b, -680.0 / 3.0) < 1e-9
        and relerr(q.c, 1024.0) < 1e-9
        and relerr(nq.a, -8.0) < 1e-9
        and relerr(nq.b, 136.0) < 1e-9
        and relerr(nq.c, -64.0) < 1e-9
    )
    criterion("solver frozen D=16 case", ok,
              f"(quad {q.a:.12g},{q.b:.12g},{q.c:.12g} negquad {nq.a:.12g},{nq.b:.12g},{nq.c:.12g})")


def test_quadratic_solver_random_residuals():
    rng = random.Random(1234)
    worst = 0.0
    for _ in range(1000):
        depth = rng.randint(3, 60)
        f_min = rng.randint(1, 256)
        total = depth * f_min + rng.randint(1, 20 * depth * max(f_min, 4))
        q = solve_quadratic(depth, total, f_min)
        worst = max(worst, *quad_residuals(q, depth, total, f_min))
        nq = solve_negative_quadratic(depth, total, f_min)
        worst = max(worst, *negquad_residuals(nq, depth, total, f_min))
    criterion("solver 1000 random residuals", worst < 1e-9, f"(worst {worst:.3e})")


# ---------------------------------------------------------------------------
# budget conservation property
# ---------------------------------------------------------------------------

def test_budget_conservation_property():
    rng = random.Random(4242)
    start = time.perf_counter()
    cases = 0
    for _ in range(2100):
        arch = random_arch(rng)
        plan = extract_filter_plan(arch)
        for template in ALL_TEMPLATES:
            out = apply_template(arch, template)
            new_plan = extract_filter_plan(out)
            assert new_plan.total_F == plan.total_F, (template, plan.counts)
            assert out.layers[-1].filters == arch.num_classes
            cases += 1
        reversed_once = apply_template(arch, TemplateId.REVERSE)
        assert apply_template(reversed_once, TemplateId.REVERSE) == arch
        assert apply_template(arch, TemplateId.BASE) == arch
    elapsed = time.perf_counter() - start
    criterion("budget conservation", cases >= 10000 and elapsed < 10.0,
              f"({cases} template applications in {elapsed:.2f}s)")


# ---------------------------------------------------------------------------
# rounding oracle
# ---------------------------------------------------------------------------

def optimal_apportionment(reals, total):
    """Independent oracle for reals >= 1 with 0 <= total - sum(floors) <= D.

    An exchange argument shows some minimiser of sum |x_l - real_l| assigns
    every entry its floor or floor+1, so enumerating every way to place the
    missing units is exhaustive.  Cost ties take the lexicographically
    largest vector, which is what awarding tied remainders to earlier layers
    produces."""
    import itertools
    import math

    n = len(reals)
    floors = [int(math.floor(r)) for r in reals]
    deficit = total - sum(floors)
    assert 0 <= deficit <= n, "instance outside the oracle's regime"
    best_cost, best_vec = None, None
    for chosen in itertools.combinations(range(n), deficit):
        vec = floors[:]
        for i in chosen:
            vec[i] += 1
        cost = sum(abs(v - r) for v, r in zip(vec, reals))
        if best_cost is None or cost < best_cost - 1e-12 or (
            abs(cost - best_cost) <= 1e-12 and vec > best_vec
        ):
            best_cost, best_vec = cost, vec
    return best_vec


def test_optimal_apportionment_against_tiny_brute_force():
    # validate the lattice oracle itself by full-space enumeration
    import itertools

    rng = random.Random(77)
    for _ in range(50):
        n = rng.randint(2, 4)
        reals = [rng.uniform(1.0, 4.0) for _ in range(n)]
        total = max(n, round(sum(reals)))
        best_cost, best_vec = None, None
        for vec in itertools.product(range(1, total + 1), repeat=n):
            if sum(vec) != total:
                continue
            cost = sum(abs(v - r) for v, r in zip(vec, reals))
            if best_cost is None or cost < best_cost - 1e-12 or (
                abs(cost - best_cost) <= 1e-12 and vec > tuple(best_vec)
            ):
                best_cost, best_vec = cost, list(vec)
        assert optimal_apportionment(reals, total) == best_vec


def test_rounding_matches_optimal_apportionment():
    rng = random.Random(31337)
    for case in range(500):
        n = rng.randint(2, 12)
        reals = [rng.uniform(1.0, 30.0) for _ in range(n)]
        total = max(n, round(sum(reals)))
        got = round_preserving_sum(reals, total)
        want = optimal_apportionment(reals, total)
        assert got == want, (case, reals, total, got, want)
    criterion("rounding oracle", True, "(500 instances, D <= 12)")


# ---------------------------------------------------------------------------
# cost model oracle
# ---------------------------------------------------------------------------

def test_costmodel_brute_force_oracle():
    rng = random.Random(2024)
    for _ in range(200):
        arch = random_arch(rng, min_units=2, max_units=5)
        assert count_parameters(arch) == enumerate_parameters(arch)
        assert count_macs(arch, 4) == 4 * count_macs(arch, 1)
    criterion("cost-model oracle", True, "(200 architectures, exact)")


# ---------------------------------------------------------------------------
# Fig. 1 distribution shapes
# ---------------------------------------------------------------------------

def test_distribution_curve_shapes(tmp_path):
    out = tmp_path / "dist.csv"
    assert cli_main(["distribution", "--model", "vgg19", "--dataset", "cifar10",
                     "--templates", "all", "--out", str(out)]) == 0
    curves = {}
    for line in out.read_text().strip().splitlines()[1:]:
        template, index, filters = line.split(",")
        curves.setdefault(template, []).append((int(index), int(filters)))
    shapes = {t: [f for _, f in sorted(v)] for t, v in curves.items()}
    assert set(shapes) == {"base", "reverse", "uniform", "quadratic", "negative-quadratic"}

    base, reverse = shapes["base"], shapes["reverse"]
    uniform, quad, negquad = shapes["uniform"], shapes["quadratic"], shapes["negative-quadratic"]
    ok = all(a <= b for a, b in zip(base, base[1:]))
    ok &= all(a >= b for a, b in zip(reverse, reverse[1:]))
    ok &= uniform == [344] * 16
    # integerization may move one unit between the equal endpoints
    ok &= abs(quad[0] - quad[-1]) <= 1
    ok &= min(quad[1:-1]) < quad[0] and min(quad[1:-1]) < quad[-1]
    f_min = min(base)
    ok &= negquad[0] == f_min and negquad[-1] == f_min
    ok &= max(negquad[1:-1]) > f_min
    criterion("fig1 distribution shapes", ok, f"(quad endpoints {quad[0]}/{quad[-1]})")
