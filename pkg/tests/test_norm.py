import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from goa2.algebra import ContractError
from goa2.catalog import build_space
from goa2.expr import Dual, PhiSyntaxError, evaluate, parse
from goa2.norm import (
    BoundaryError,
    NormContext,
    PhiDomainError,
    PhiFunction,
    descent_vector,
    fundamental_tensor,
    norm_value,
    parse_phi,
)
from goa2.verify import generic_vector


@pytest.fixture(scope="module")
def space():
    return build_space("T1.5")


def test_parse_precedence():
    out = evaluate(parse("1+2*s^2/4-s/8"), Dual(0.5, 1.0))
    assert np.isclose(out.val, 1 + 0.125 - 0.0625)
    assert np.isclose(out.der, 0.5 - 0.125)
    assert evaluate(parse("-s/2+2"), Dual(0.5, 1.0)).val == pytest.approx(1.75)
    assert evaluate(parse("-(2)^2"), Dual(0.0, 1.0)).val == pytest.approx(-4.0)


@pytest.mark.parametrize("text,pos", [("(s", 2), ("2*s)", 3), ("1+", 2), ("foo(s)", 0), ("s^s", 2)])
def test_syntax_errors_report_position(text, pos):
    with pytest.raises(PhiSyntaxError) as err:
        parse(text)
    assert err.value.position == pos


@pytest.mark.parametrize("text,s", [("exp(2*s)", 0.5), ("-s+2", 0.001), ("0-1", 0.0)])
def test_regularity_rejections(text, s):
    with pytest.raises(PhiDomainError) as err:
        parse_phi(text)
    assert err.value.s == pytest.approx(s, abs=1e-12)


def test_constant_expression_is_constant_family():
    phi = parse_phi("2")
    assert phi.kind == "constant" and phi.is_constant()
    assert PhiFunction.riemannian(2.0, 2.0).is_constant()
    assert not parse_phi("1+s^2/4").is_constant()


@settings(max_examples=40, deadline=None)
@given(
    st.floats(0.0, 0.3),
    st.floats(0.05, 0.95),
    st.sampled_from(["1+{a}*s^2", "sqrt(1+{a}*s^2)", "exp({a}*s^2)", "cos({a}*s)+1"]),
)
def test_dual_derivative_matches_finite_difference(a, s, template):
    ast = parse(template.format(a=f"{a:.6f}"))
    der = evaluate(ast, Dual(s, 1.0)).der
    h = 1e-6
    fd = (evaluate(ast, Dual(s + h, 0.0)).val - evaluate(ast, Dual(s - h, 0.0)).val) / (2 * h)
    assert der == pytest.approx(fd, rel=1e-6, abs=1e-8)


def test_riemannian_profile_gives_weighted_norm(space):
    ctx = NormContext(space, PhiFunction.riemannian(2.0, 5.0))
    rng = np.random.default_rng(0)
    v = generic_vector(space, rng)
    v1, v2 = ctx.split(v)
    assert norm_value(ctx, v) ** 2 == pytest.approx(2 * v1 @ v1 + 5 * v2 @ v2)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.1, 10.0), st.integers(0, 10_000))
def test_norm_is_positively_homogeneous(lam, seed):
    sp = build_space("T1.5")
    ctx = NormContext(sp, parse_phi("sqrt(1+s^2)"))
    v = generic_vector(sp, np.random.default_rng(seed))
    assert norm_value(ctx, lam * v) == pytest.approx(lam * norm_value(ctx, v), rel=1e-12)


@pytest.mark.parametrize("text", ["sqrt(1+s^2)", "1+s^2/4", "1"])
def test_fundamental_tensor_matches_finite_difference(space, text):
    ctx = NormContext(space, parse_phi(text))
    rng = np.random.default_rng(11)
    h = 1e-5
    for _ in range(50):
        U = generic_vector(space, rng)
        V = space.m.random(rng)
        half = lambda x: 0.5 * norm_value(ctx, x) ** 2
        fd = (half(U + h * V) - half(U - h * V)) / (2 * h)
        g = fundamental_tensor(ctx, U, V)
        assert abs(g - fd) / max(1.0, abs(g)) < 1e-6


def test_fundamental_tensor_at_U_is_F_squared(space):
    ctx = NormContext(space, parse_phi("1+s^2/4"))
    U = generic_vector(space, np.random.default_rng(2))
    assert fundamental_tensor(ctx, U, U) == pytest.approx(norm_value(ctx, U) ** 2)


def test_contracts(space):
    ctx = NormContext(space, parse_phi("1+s^2/4"))
    with pytest.raises(ContractError):
        norm_value(ctx, np.zeros(space.algebra.dim))
    with pytest.raises(ContractError):
        norm_value(ctx, space.h.coeff_basis[0])
    with pytest.raises(BoundaryError):
        descent_vector(ctx, space.m1.coeff_basis[0])
