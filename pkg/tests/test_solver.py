import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from goa2.algebra import ContractError
from goa2.catalog import build_space, build_wallach
from goa2.norm import NormContext, PhiFunction, parse_phi
from goa2.solver import (
    TAU_FEAS,
    TAU_INFEAS,
    check_geodesic_vector,
    classify,
    condition_I_residual,
    geodesic_from_condition_I,
    geodesic_residual,
    min_norm_lstsq,
    solve_condition_I,
    solve_geodesic_vector,
    solve_theorem2_condition3,
)
from goa2.verify import generic_vector


@pytest.fixture(scope="module")
def t13():
    return build_space("T1.3")


@pytest.fixture(scope="module")
def w6():
    return build_wallach("W6")


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 8), st.integers(1, 8), st.integers(0, 8), st.integers(0, 2**31))
def test_min_norm_lstsq_matches_pseudoinverse(m, n, r, seed):
    rng = np.random.default_rng(seed)
    r = min(r, m, n)
    a = rng.normal(size=(m, r)) @ rng.normal(size=(r, n))
    b = rng.normal(size=m)
    x, rank = min_norm_lstsq(a, b)
    assert rank == r
    assert np.allclose(x, np.linalg.pinv(a, rcond=1e-10) @ b, atol=1e-8)


def test_classify_bands():
    assert classify(1e-12) == "feasible"
    assert classify(1e-6) == "indeterminate"
    assert classify(1e-2) == "infeasible"


def test_condition_I_feasible_on_triple(t13):
    rng = np.random.default_rng(5)
    v_f, v_b = t13.m1.random(rng), t13.m2.random(rng)
    rep = solve_condition_I(t13, v_f, v_b)
    assert rep.feasible and rep.residual < 1e-12
    assert np.allclose(t13.h.project(rep.u), rep.u)
    assert condition_I_residual(t13, v_f, v_b, rep.u) == pytest.approx(rep.residual, abs=1e-14)


def test_condition_I_zero_fiber_gives_zero_u(t13):
    rng = np.random.default_rng(0)
    rep = solve_condition_I(t13, np.zeros(t13.algebra.dim), t13.m2.random(rng))
    assert rep.feasible and not np.any(rep.u)


def test_condition_I_fails_for_standard_so7():
    space = build_space("T1.4-std")
    rng = np.random.default_rng(2)
    rep = solve_condition_I(space, space.m1.random(rng), space.m2.random(rng))
    assert rep.infeasible


def test_condition_I_fails_on_wallach_triple(w6):
    space = w6.derived_triple(1)
    rng = np.random.default_rng(4)
    rep = solve_condition_I(space, space.m1.random(rng), space.m2.random(rng))
    assert rep.infeasible and rep.residual > TAU_INFEAS


def test_condition_I_requires_triple(w6):
    split = w6.split(3)
    rng = np.random.default_rng(0)
    with pytest.raises(ContractError):
        solve_condition_I(split, split.m1.random(rng), split.m2.random(rng))


@pytest.mark.parametrize("text", ["1+s^2/4", "sqrt(1+s^2)", "1"])
def test_geodesic_solver_agrees_with_checker(t13, text):
    ctx = NormContext(t13, parse_phi(text))
    rng = np.random.default_rng(9)
    for _ in range(10):
        v = generic_vector(t13, rng)
        cand, rep = solve_geodesic_vector(ctx, v)
        assert rep.feasible
        assert check_geodesic_vector(ctx, cand) < 10 * TAU_FEAS
        assert geodesic_residual(ctx, v, cand.u) == pytest.approx(rep.residual, abs=1e-14)


def test_geodesic_infeasible_on_wallach_split(w6):
    space = w6.split(3)
    rng = np.random.default_rng(1)
    finsler = NormContext(space, parse_phi("1+s^2/4"))
    normal = NormContext(space, parse_phi("1"))
    v = generic_vector(space, rng)
    _, rep = solve_geodesic_vector(finsler, v)
    assert rep.infeasible
    cand, rep = solve_geodesic_vector(normal, v)
    assert rep.feasible and check_geodesic_vector(normal, cand) < TAU_FEAS


def test_boundary_branch_is_riemannian(t13):
    ctx = NormContext(t13, parse_phi("1+s^2/4"))
    v = t13.m1.coeff_basis[0]
    cand, rep = solve_geodesic_vector(ctx, v)
    assert rep.branch == "riemannian" and rep.feasible
    assert not np.any(cand.u)
    assert check_geodesic_vector(ctx, cand) < 1e-14


def test_condition_I_witness_rescales_to_geodesic(t13):
    ctx = NormContext(t13, parse_phi("1+s^2/4"))
    rng = np.random.default_rng(3)
    for _ in range(10):
        v = generic_vector(t13, rng)
        v_f, v_b = ctx.split(v)
        rep = solve_condition_I(t13, v_f, v_b)
        cand = geodesic_from_condition_I(ctx, v_f, v_b, rep.u)
        assert check_geodesic_vector(ctx, cand) < 1e-10


def test_theorem2_condition_feasible_on_triple_and_not_on_wallach(t13, w6):
    rng = np.random.default_rng(8)
    v1, v2 = t13.m1.random(rng), t13.m2.random(rng)
    assert solve_theorem2_condition3(t13, v1, v2, 0.3, 2.0).feasible
    s = w6.split(2)
    assert solve_theorem2_condition3(s, s.m1.random(rng), s.m2.random(rng), 0.3, 2.0).infeasible


def test_theorem2_equal_weights_with_commuting_parts():
    # in so(3) + so(3) with h = 0, vectors from different factors commute
    from goa2.algebra import DecomposedSpace, direct_sum, so

    alg = direct_sum("so(3)+so(3)", [so(3), so(3)])
    empty = alg.orthonormalize(np.zeros((0, alg.dim)))
    space = DecomposedSpace(alg, empty, alg.orthonormalize(np.eye(6)[:3]), alg.orthonormalize(np.eye(6)[3:]))
    v1, v2 = alg.unit(0), alg.unit(4)
    assert solve_theorem2_condition3(space, v1, v2, 1.5, 1.5).feasible
    ctx = NormContext(space, PhiFunction.riemannian(1.5, 1.5))
    assert solve_geodesic_vector(ctx, v1 + v2)[1].feasible


def test_theorem2_contracts(t13):
    rng = np.random.default_rng(0)
    v1, v2 = t13.m1.random(rng), t13.m2.random(rng)
    with pytest.raises(ContractError):
        solve_theorem2_condition3(t13, v1, v2, 0.0, 1.0)
    with pytest.raises(ContractError):
        solve_theorem2_condition3(t13, np.zeros_like(v1), v2, 1.0, 1.0)
    ctx = NormContext(t13, parse_phi("1"))
    with pytest.raises(ContractError):
        solve_geodesic_vector(ctx, np.zeros_like(v1))
