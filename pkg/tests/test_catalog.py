import numpy as np
import pytest

from goa2.algebra import TAU_ALG, ContractError
from goa2.catalog import (
    NotConstructedError,
    UnknownSpaceError,
    build_space,
    build_wallach,
    descriptor,
    expected_dims,
    list_catalog,
    table1_rows,
)
from goa2.solver import solve_condition_I

CONSTRUCTED = [d.key for d in table1_rows() if d.status == "constructed"]


def test_registry_layout():
    keys = [d.key for d in list_catalog()]
    assert len(keys) == 18
    assert len(table1_rows()) == 15 and len(CONSTRUCTED) == 14
    assert descriptor("T2.3").status == "not-constructed"
    assert descriptor("W24").status == "not-constructed"
    assert "T1.4-std" not in keys
    assert "T1.4-std" in [d.key for d in list_catalog(include_contrast=True)]


@pytest.mark.parametrize("key", CONSTRUCTED)
def test_row_builds_with_expected_dimensions(key):
    desc = descriptor(key)
    space = build_space(key)
    dg, dk, dh = expected_dims(desc)
    assert space.algebra.dim == dg
    assert space.h.dim + space.m1.dim == dk
    assert space.h.dim == dh
    assert space.is_triple
    assert max(space.residuals().values()) < TAU_ALG


@pytest.mark.parametrize("key,params", [("T1.1", {"n": 3}), ("T1.5", {"n": 3}), ("T1.9", {"n": 2})])
def test_larger_parameters(key, params):
    space = build_space(key, **params)
    assert space.algebra.dim == expected_dims(descriptor(key), params)[0]
    rng = np.random.default_rng(1)
    rep = solve_condition_I(space, space.m1.random(rng), space.m2.random(rng))
    assert rep.feasible


def test_parameter_contracts():
    with pytest.raises(ContractError):
        build_space("T1.1", n=1)
    with pytest.raises(ContractError):
        build_space("T1.3", n=2)
    with pytest.raises(NotConstructedError):
        build_space("T2.3")
    with pytest.raises(UnknownSpaceError):
        build_space("T9.9")


def test_standard_so7_contrast_is_a_valid_space():
    space = build_space("T1.4-std")
    assert space.h.dim == 21 and max(space.residuals().values()) < TAU_ALG


@pytest.mark.parametrize("key,dims", [("W6", (8, 2, 2)), ("W12", (21, 9, 4))])
def test_wallach_structure(key, dims):
    w = build_wallach(key)
    g, h, mi = dims
    assert w.algebra.dim == g and w.h.dim == h
    assert [p.dim for p in w.m_parts] == [mi] * 3
    res = w.certify()
    relations = [k for k in res if ":" not in k and k != "h_subalgebra"]
    assert len(relations) == 9
    for i in (1, 2, 3):
        assert w.derived_triple(i).is_triple
        assert not w.split(i).is_triple
        assert w.split(i).m2.dim == mi


def test_wallach_summands_do_not_commute():
    w = build_wallach("W6")
    assert w.m_parts[0].bracket_leak(w.m_parts[1], w.h) > 0.1
    with pytest.raises(NotConstructedError):
        build_wallach("W24")
    with pytest.raises(ContractError):
        w.split(4)
