import random

import pytest

from iosc.errors import BudgetExceeded, OracleDisagreement
from iosc.poly import IdealSpec, Poly, parse_poly
from iosc.ringcount import (
    Full,
    PrimitiveBlock,
    ReductionIn,
    Region,
    UnitModP,
    ZeroModP,
    bsing_dim,
    count_ff,
    count_points_raw,
    count_zpm,
    dim_estimate,
)


def P(text, n):
    return parse_poly(text, n)


def S(*texts, n):
    return IdealSpec.from_gens([P(t, n) for t in texts])


def brute_zpm(gens, nvars, p, m, member=None):
    q = p ** m
    count = 0
    point = [0] * nvars
    while True:
        if (member is None or member(point)) and all(
            g.eval_int(point) % q == 0 for g in gens
        ):
            count += 1
        i = nvars - 1
        while i >= 0 and point[i] == q - 1:
            point[i] = 0
            i -= 1
        if i < 0:
            return count
        point[i] += 1


# -- count_zpm ---------------------------------------------------------------


def test_count_linear():
    assert count_zpm(S("x1", n=1), 3, 2) == 1


def test_count_square_mod9():
    assert count_zpm(S("x1^2", n=1), 3, 2) == 3


def test_count_xy_mod5():
    assert count_zpm(S("x1*x2", n=2), 5, 1) == 9


@pytest.mark.parametrize("method", ["naive", "lift", "both"])
def test_methods_agree_simple(method):
    assert count_zpm(S("x1^2 + x2^2", n=2), 3, 2, method=method) == brute_zpm(
        [P("x1^2 + x2^2", 2)], 2, 3, 2
    )


def test_oracle_agreement_random_ideals():
    rng = random.Random(31337)
    for _ in range(25):
        n = rng.randint(1, 3)
        gens = []
        for _ in range(rng.randint(1, 2)):
            terms = {}
            for _ in range(rng.randint(1, 3)):
                expo = tuple(rng.randint(0, 2) for _ in range(n))
                terms[expo] = rng.randint(-4, 4)
            f = Poly(n, terms)
            if not f.is_zero() and not f.is_constant():
                gens.append(f)
        if not gens:
            continue
        p = rng.choice([2, 3, 5])
        m = rng.randint(1, 3)
        if p ** (m * n) > 2_000_000:
            continue
        spec = IdealSpec.from_gens(gens)
        a = count_zpm(spec, p, m, method="lift")
        b = count_zpm(spec, p, m, method="naive")
        assert a == b, (gens, p, m)


def test_budget_exceeded_is_error():
    with pytest.raises(BudgetExceeded):
        count_zpm(S("x1^2", n=1), 101, 5, method="naive", budget=1000)


def test_both_raises_on_fault(monkeypatch):
    import iosc.ringcount as rc

    real = rc._count_naive
    monkeypatch.setattr(
        rc, "_count_naive", lambda *a, **k: real(*a, **k) + 1
    )
    with pytest.raises(OracleDisagreement):
        count_zpm(S("x1^2", n=1), 3, 2, method="both")


# -- regions -------------------------------------------------------------------


def test_region_zero_partition():
    # count over Full = sum over the {zero, primitive} partition of the block
    spec = S("x1*x2 - x3", n=3)
    p, m = 3, 2
    full = count_zpm(spec, p, m, Region.full(3))
    zero = count_zpm(
        spec, p, m, Region(3, (((0, 3), ZeroModP()),))
    )
    prim = count_zpm(spec, p, m, Region(3, (((0, 3), PrimitiveBlock()),)))
    assert full == zero + prim


def test_region_unit_and_zero_per_coordinate():
    spec = S("x1 + x2", n=2)
    p, m = 5, 1
    full = count_zpm(spec, p, m)
    z = count_zpm(spec, p, m, Region(2, (((0, 1), ZeroModP()), ((1, 2), Full()))))
    u = count_zpm(spec, p, m, Region(2, (((0, 1), UnitModP()), ((1, 2), Full()))))
    assert full == z + u


def test_region_reduction_in():
    # x2 free mod 9 but reduction constrained to the parabola mod 3
    spec = S("x1 - x2^2", n=2)
    region = Region.reduction_in([P("x1 - x2^2", 2)])
    a = count_zpm(spec, 3, 2, region)
    b = count_zpm(spec, 3, 2)
    assert a == b  # solutions automatically satisfy their own reduction


def test_region_membership_counts():
    reg = Region(3, (((0, 2), PrimitiveBlock()), ((2, 3), Full())))
    # primitive pairs mod 3: 9 - 1 = 8, times 3 free values
    assert reg.count_mod_p(3) == 24


def test_product_rule():
    # block-diagonal ideal: count multiplies
    f = P("x1^2 + 1", 1)
    g = P("x1^3 - x1", 1)
    both = IdealSpec.from_gens(
        [P("x1^2 + 1", 2), P("x2^3 - x2", 2)]
    )
    for p, m in [(3, 1), (5, 2)]:
        left = count_zpm(both, p, m)
        a = count_points_raw([f], 1, p, m)
        b = count_points_raw([g], 1, p, m)
        assert left == a * b


def test_determinism_across_thread_counts():
    spec = S("x1^2*x2 - x3 + 1", n=3)
    ref = count_zpm(spec, 3, 2, method="naive", threads=1)
    for t in (4, 8):
        assert count_zpm(spec, 3, 2, method="naive", threads=t) == ref


# -- count_ff -------------------------------------------------------------------


def test_count_ff_quadric_q3():
    assert count_ff(S("x1*x2 - x3*x4", n=4), 3, 1) == 33


def test_count_ff_quadric_q4():
    assert count_ff(S("x1*x2 - x3*x4", n=4), 2, 2) == 76


def test_count_ff_empty_gens_full_space():
    # zero polynomial imposes nothing
    assert count_points_raw([Poly.zero(2)], 2, 2, 1) == 4


def test_count_ff_matches_prime_field_counts():
    spec = S("x1^2 + x2^2 + x3^2", n=3)
    assert count_ff(spec, 7, 1) == 49


def test_count_ff_extension_field_consistency():
    # q and q^2 counts of a line: q^(n-1) points
    spec = S("x1 + x2", n=2)
    assert count_ff(spec, 3, 1) == 3
    assert count_ff(spec, 3, 2) == 9


# -- dimension estimation ---------------------------------------------------------


def test_dim_estimate_quadric_surface():
    est = dim_estimate(S("x1*x2 - x3*x4", n=4), primes=[7, 11], maxk=1)
    assert est.dim == 3
    assert est.confident
    assert (11, 1441) in est.samples


def test_dim_estimate_cone():
    est = dim_estimate(S("x1^2 + x2^2 + x3^2", n=3), primes=[5, 7], maxk=1)
    assert est.dim == 2 and est.confident


def test_dim_estimate_unit_ideal_proxy():
    est = dim_estimate(S("x1^2 + 1", n=1), primes=[3, 7], maxk=1)
    assert est.dim == -1 and est.confident


def test_dim_estimate_point():
    est = dim_estimate(S("x1", n=1), primes=[5, 7], maxk=1)
    assert est.dim == 0 and est.confident


# -- bsing --------------------------------------------------------------------------


def test_bsing_quadric_cone():
    spec = S("x1^2 + x2^2 + x3^2", n=3)
    s = bsing_dim(spec, primes=[7, 11])
    assert s[2].dim == 0 and s[2].confident


def test_bsing_vinogradov():
    n = 4
    gens = []
    for i in range(1, 4):
        f = Poly.zero(n)
        for j in range(2):
            f = f + Poly.var(j, n) ** i - Poly.var(2 + j, n) ** i
        gens.append(f)
    spec = IdealSpec.from_gens(gens)
    s = bsing_dim(spec, primes=[7, 11])
    assert s[1].dim == -1
    assert s[2].dim == 0
    assert s[3].dim == 0


def test_bsing_dependent_forms():
    spec = IdealSpec(2, [(2, [P("x1^2", 2), P("2*x1^2", 2)])])
    s = bsing_dim(spec)
    assert s[2].dim == 2 and s[2].confident


def test_dim_products_add():
    # product of a line (dim 1 in A^2) and a point (dim 0 in A^1)
    spec = IdealSpec.from_gens([P("x1 + x2", 3), P("x3", 3)])
    est = dim_estimate(spec, primes=[7, 11], maxk=1)
    line = dim_estimate(S("x1 + x2", n=2), primes=[7, 11], maxk=1)
    pt = dim_estimate(S("x1", n=1), primes=[7, 11], maxk=1)
    assert est.dim == line.dim + pt.dim
