"""Registry of coset spaces: the Condition-I triples and the Wallach spaces.

Each triple row ``h < k < g`` (keys ``T*``) is built at small parameters as matrix
subalgebras of a realified ``g``; the resulting :class:`DecomposedSpace`
has ``m1 = m_F`` (``k`` minus ``h``) and ``m2 = m_B`` (``g`` minus ``k``).

Embedding conventions:

* ``u(n) < so(2n)`` by realification ``A + iB -> [[A, -B], [B, A]]``.
* ``sp(n) < su(2n)`` as ``u(2n) ∩ sp(2n, C)``; standalone ``sp(n)`` uses
  quaternionic entries realified as 4x4 left-multiplication blocks.
* ``u(n) < su(n+1)`` as ``X -> diag(X, -tr X)``.
* T2.1: ``su(r) + su(r+n)`` block diagonal in ``su(2r+n)``; the R factor
  of ``k`` is the traceless diagonal ``i diag((r+n) 1_r, -r 1_{r+n})``.
* T1.6: the ``u(1)`` of ``h`` is the center of ``k = s(u(2n) + u(1))``.
* T1.8: the ``u(1)`` of ``h`` sits in the ``sp(1)`` factor of ``k``.
* ``spin(7) < so(8)`` via octonionic gammas (T1.4, T3.2, T3.3); key
  ``T1.4-std`` swaps in the standard block ``so(7)`` for contrast.
* ``g2 < so(7)`` as derivations of the octonions acting on ``Im O``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .algebra import (
    CertificationError,
    ContractError,
    DecomposedSpace,
    LieAlgebra,
    Subspace,
    TAU_ALG,
    realify_complex,
    realify_quaternionic,
    so_generators,
    sp_in_su_generators,
    sp_quaternionic_generators,
    su_complex_generators,
)
from .octonions import build_g2_in_so7, build_spin7_in_so8


class NotConstructedError(LookupError):
    """The registry entry exists but is deliberately not built."""


class UnknownSpaceError(KeyError):
    pass


@dataclass(frozen=True)
class SpaceDescriptor:
    key: str
    g_name: str
    k_name: str
    h_name: str
    construction: str
    status: str = "constructed"  # or "not-constructed"
    params: dict = field(default_factory=dict)  # defaults (smallest admissible)
    param_min: dict = field(default_factory=dict)
    kind: str = "triple"  # "triple" | "wallach"
    contrast: bool = False

    def resolve(self, **overrides) -> dict:
        params = dict(self.params)
        for name, val in overrides.items():
            if val is None:
                continue
            if name not in self.param_min:
                raise ContractError(f"{self.key} takes no parameter {name!r}")
            params[name] = int(val)
        for name, low in self.param_min.items():
            if params[name] < low:
                raise ContractError(f"{self.key}: parameter {name}={params[name]} < {low}")
        return params

    def params_label(self, params: dict | None = None) -> str:
        params = self.params if params is None else params
        return ",".join(f"{k}={v}" for k, v in params.items()) or "-"


def _d(key, g, k, h, construction, params=None, **kw):
    params = params or {}
    return SpaceDescriptor(
        key, g, k, h, construction, params=dict(params),
        param_min=kw.pop("param_min", dict(params)), **kw,
    )  # fmt: skip


_REGISTRY = [
    _d("T1.1", "so(2n+1)", "so(2n)", "u(n)", "so_u", {"n": 2}),
    _d("T1.2", "so(4n+1)", "so(4n)", "su(2n)", "so_su", {"n": 1}),
    _d("T1.3", "so(8)", "so(7)", "g2", "so8_g2"),
    _d("T1.4", "so(9)", "so(8)", "spin(7)", "so9_spin7"),
    _d("T1.5", "su(n+1)", "u(n)", "su(n)", "su_u_su", {"n": 2}),
    _d("T1.6", "su(2n+1)", "u(2n)", "u(1)+sp(n)", "su_u_usp", {"n": 2}),
    _d("T1.7", "su(2n+1)", "u(2n)", "sp(n)", "su_u_sp", {"n": 2}),
    _d("T1.8", "sp(n+1)", "sp(1)+sp(n)", "u(1)+sp(n)", "sp_usp", {"n": 1}),
    _d("T1.9", "sp(n+1)", "sp(1)+sp(n)", "sp(n)", "sp_sp", {"n": 1}),
    _d("T2.1", "su(2r+n)", "su(r)+su(r+n)+R", "su(r)+su(r+n)", "su_ss", {"r": 2, "n": 1},
       param_min={"r": 2, "n": 1}),
    _d("T2.2", "so(4r+2)", "u(2r+1)", "su(2r+1)", "so_u_su", {"r": 2}),
    _d("T2.3", "e6", "so(10)+R", "so(10)", "e6", status="not-constructed"),
    _d("T3.1", "so(9)", "so(7)+so(2)", "g2+so(2)", "so9_g2so2"),
    _d("T3.2", "so(10)", "so(8)+so(2)", "spin(7)+so(2)", "so10_spin7so2"),
    _d("T3.3", "so(11)", "so(8)+so(3)", "spin(7)+so(3)", "so11_spin7so3"),
    _d("W6", "su(3)", "-", "t2", "wallach_su3", kind="wallach"),
    _d("W12", "sp(3)", "-", "sp(1)+sp(1)+sp(1)", "wallach_sp3", kind="wallach"),
    _d("W24", "f4", "-", "spin(8)", "wallach_f4", kind="wallach", status="not-constructed"),
]  # fmt: skip

_CONTRAST = [
    _d("T1.4-std", "so(9)", "so(8)", "so(7) standard", "so9_so7std", contrast=True),
]


def list_catalog(include_contrast: bool = False) -> list[SpaceDescriptor]:
    """All registry entries in fixed order (triple rows, then Wallach spaces)."""
    return list(_REGISTRY) + (list(_CONTRAST) if include_contrast else [])


def table1_rows() -> list[SpaceDescriptor]:
    return [d for d in _REGISTRY if d.kind == "triple"]


def descriptor(key: str) -> SpaceDescriptor:
    for d in _REGISTRY + _CONTRAST:
        if d.key == key:
            return d
    raise UnknownSpaceError(key)


# -- matrix helpers ----------------------------------------------------------


def _embed(block: np.ndarray, size: int, offset: int) -> np.ndarray:
    out = np.zeros((size, size), dtype=block.dtype)
    k = block.shape[0]
    out[offset : offset + k, offset : offset + k] = block
    return out


def _so_block(size: int, offset: int, k: int) -> list[np.ndarray]:
    return [_embed(g, size, offset) for g in so_generators(k)]


def _lift_so7(sub: Subspace, size: int, offset: int) -> list[np.ndarray]:
    return [_embed(sub.algebra.to_matrix(v), size, offset) for v in sub.coeff_basis]


@lru_cache(maxsize=None)
def _g2() -> Subspace:
    return build_g2_in_so7()


@lru_cache(maxsize=None)
def _spin7() -> Subspace:
    return build_spin7_in_so8()


def _triple(label, g_gens, k_gens, h_gens) -> DecomposedSpace:
    g = LieAlgebra.from_matrices(label, g_gens)
    g.certify()
    k = g.subspace_from_matrices(k_gens)
    h = g.subspace_from_matrices(h_gens)
    m_f = h.complement(within=k)
    m_b = k.complement()
    leak = np.linalg.norm(h.coeff_basis - h.coeff_basis @ k.projector(), axis=1).max()
    if leak > TAU_ALG:
        raise CertificationError(f"{label}: h inside k", float(leak))
    space = DecomposedSpace(g, h, m_f, m_b, is_triple=True, label=label)
    k_leak = k.bracket_leak(k, k)
    if k_leak > TAU_ALG:
        raise CertificationError(f"{label}: k_subalgebra", k_leak)
    space.certify()
    return space


def _complex_triple(label, g_gens, k_gens, h_gens) -> DecomposedSpace:
    r = lambda gens: [realify_complex(x) for x in gens]  # noqa: E731
    return _triple(label, r(g_gens), r(k_gens), r(h_gens))


def _quat_triple(label, g_gens, k_gens, h_gens) -> DecomposedSpace:
    r = lambda gens: [realify_quaternionic(x) for x in gens]  # noqa: E731
    return _triple(label, r(g_gens), r(k_gens), r(h_gens))


def _s_u(n: int, size: int) -> list[np.ndarray]:
    """``u(n) -> diag(X, -tr X)`` in the top-left of ``su(size)`` (size = n + 1)."""
    out = []
    for x in su_complex_generators(n, include_center=True):
        m = _embed(x, size, 0)
        m[n, n] = -np.trace(x)
        out.append(m)
    return out


def _quat_embed(q: np.ndarray, size: int, offset: int) -> np.ndarray:
    out = np.zeros((size, size, 4))
    k = q.shape[0]
    out[offset : offset + k, offset : offset + k] = q
    return out


# -- builders ---------------------------------------------------------------


def _build_so_u(n):
    g = so_generators(2 * n + 1)
    k = _so_block(2 * n + 1, 0, 2 * n)
    h = [_embed(realify_complex(x), 2 * n + 1, 0) for x in su_complex_generators(n, True)]
    return _triple(f"so({2 * n + 1})", g, k, h)


def _build_so_su(n):
    size = 4 * n + 1
    g = so_generators(size)
    k = _so_block(size, 0, 4 * n)
    h = [_embed(realify_complex(x), size, 0) for x in su_complex_generators(2 * n)]
    return _triple(f"so({size})", g, k, h)


def _build_so8_g2():
    g = so_generators(8)
    k = _so_block(8, 1, 7)
    h = _lift_so7(_g2(), 8, 1)
    return _triple("so(8)", g, k, h)


def _spin7_mats(size: int) -> list[np.ndarray]:
    sub = _spin7()
    return [_embed(sub.algebra.to_matrix(v), size, 0) for v in sub.coeff_basis]


def _build_so9_spin7():
    return _triple("so(9)", so_generators(9), _so_block(9, 0, 8), _spin7_mats(9))


def _build_so9_so7std():
    return _triple("so(9)", so_generators(9), _so_block(9, 0, 8), _so_block(9, 1, 7))


def _build_su_u_su(n):
    g = su_complex_generators(n + 1)
    k = _s_u(n, n + 1)
    h = [_embed(x, n + 1, 0) for x in su_complex_generators(n)]
    return _complex_triple(f"su({n + 1})", g, k, h)


def _build_su_u_sp(n, with_center):
    size = 2 * n + 1
    g = su_complex_generators(size)
    k = _s_u(2 * n, size)
    h = [_embed(x, size, 0) for x in sp_in_su_generators(n)]
    if with_center:
        h.append(1j * np.diag([1.0] * (2 * n) + [-2.0 * n]))
    return _complex_triple(f"su({size})", g, k, h)


def _build_sp(n, with_u1):
    size = n + 1
    g = sp_quaternionic_generators(size)
    sp1 = [_quat_embed(q, size, 0) for q in sp_quaternionic_generators(1)]
    spn = [_quat_embed(q, size, 1) for q in sp_quaternionic_generators(n)]
    h = list(spn)
    if with_u1:
        h.append(sp1[0])  # the i-direction of sp(1)
    return _quat_triple(f"sp({size})", g, sp1 + spn, h)


def _build_su_ss(r, n):
    size = 2 * r + n
    g = su_complex_generators(size)
    h = [_embed(x, size, 0) for x in su_complex_generators(r)]
    h += [_embed(x, size, r) for x in su_complex_generators(r + n)]
    center = 1j * np.diag([float(r + n)] * r + [-float(r)] * (r + n))
    return _complex_triple(f"su({size})", g, h + [center], h)


def _build_so_u_su(r):
    size = 2 * r + 1
    g = so_generators(2 * size)
    k = [realify_complex(x) for x in su_complex_generators(size, True)]
    h = [realify_complex(x) for x in su_complex_generators(size)]
    return _triple(f"so({2 * size})", g, k, h)


def _build_so9_g2so2():
    k = _so_block(9, 0, 7) + _so_block(9, 7, 2)
    h = _lift_so7(_g2(), 9, 0) + _so_block(9, 7, 2)
    return _triple("so(9)", so_generators(9), k, h)


def _build_spin7_sum(size):
    k = _so_block(size, 0, 8) + _so_block(size, 8, size - 8)
    h = _spin7_mats(size) + _so_block(size, 8, size - 8)
    return _triple(f"so({size})", so_generators(size), k, h)


def _so(n):
    return n * (n - 1) // 2


def _su(n):
    return n * n - 1


def _sp(n):
    return n * (2 * n + 1)


# (dim g, dim k, dim h) by standard counts
_EXPECTED_DIMS = {
    "so_u": lambda p: (_so(2 * p["n"] + 1), _so(2 * p["n"]), p["n"] ** 2),
    "so_su": lambda p: (_so(4 * p["n"] + 1), _so(4 * p["n"]), _su(2 * p["n"])),
    "so8_g2": lambda p: (28, 21, 14),
    "so9_spin7": lambda p: (36, 28, 21),
    "so9_so7std": lambda p: (36, 28, 21),
    "su_u_su": lambda p: (_su(p["n"] + 1), p["n"] ** 2, _su(p["n"])),
    "su_u_usp": lambda p: (_su(2 * p["n"] + 1), 4 * p["n"] ** 2, 1 + _sp(p["n"])),
    "su_u_sp": lambda p: (_su(2 * p["n"] + 1), 4 * p["n"] ** 2, _sp(p["n"])),
    "sp_usp": lambda p: (_sp(p["n"] + 1), 3 + _sp(p["n"]), 1 + _sp(p["n"])),
    "sp_sp": lambda p: (_sp(p["n"] + 1), 3 + _sp(p["n"]), _sp(p["n"])),
    "su_ss": lambda p: (
        _su(2 * p["r"] + p["n"]),
        _su(p["r"]) + _su(p["r"] + p["n"]) + 1,
        _su(p["r"]) + _su(p["r"] + p["n"]),
    ),
    "so_u_su": lambda p: (_so(4 * p["r"] + 2), (2 * p["r"] + 1) ** 2, _su(2 * p["r"] + 1)),
    "so9_g2so2": lambda p: (36, 22, 15),
    "so10_spin7so2": lambda p: (45, 29, 22),
    "so11_spin7so3": lambda p: (55, 31, 24),
}


def expected_dims(desc: SpaceDescriptor, params: dict | None = None) -> tuple[int, int, int]:
    return _EXPECTED_DIMS[desc.construction](desc.params if params is None else params)


_BUILDERS = {
    "so_u": lambda p: _build_so_u(p["n"]),
    "so_su": lambda p: _build_so_su(p["n"]),
    "so8_g2": lambda p: _build_so8_g2(),
    "so9_spin7": lambda p: _build_so9_spin7(),
    "so9_so7std": lambda p: _build_so9_so7std(),
    "su_u_su": lambda p: _build_su_u_su(p["n"]),
    "su_u_usp": lambda p: _build_su_u_sp(p["n"], True),
    "su_u_sp": lambda p: _build_su_u_sp(p["n"], False),
    "sp_usp": lambda p: _build_sp(p["n"], True),
    "sp_sp": lambda p: _build_sp(p["n"], False),
    "su_ss": lambda p: _build_su_ss(p["r"], p["n"]),
    "so_u_su": lambda p: _build_so_u_su(p["r"]),
    "so9_g2so2": lambda p: _build_so9_g2so2(),
    "so10_spin7so2": lambda p: _build_spin7_sum(10),
    "so11_spin7so3": lambda p: _build_spin7_sum(11),
}


def _lookup(desc_or_key) -> SpaceDescriptor:
    if isinstance(desc_or_key, SpaceDescriptor):
        return desc_or_key
    return descriptor(desc_or_key)


def build_space(desc_or_key, **params) -> DecomposedSpace:
    """Build and certify the triple space of a ``T*`` row (``m1 = m_F``, ``m2 = m_B``)."""
    desc = _lookup(desc_or_key)
    if desc.status != "constructed":
        raise NotConstructedError(f"{desc.key} ({desc.g_name}) is not constructed")
    if desc.kind != "triple":
        raise ContractError(f"{desc.key} is a Wallach space; use build_wallach")
    resolved = desc.resolve(**params)
    return _cached_space(desc.key, tuple(sorted(resolved.items())))


@lru_cache(maxsize=None)
def _cached_space(key: str, params: tuple) -> DecomposedSpace:
    desc = descriptor(key)
    params = dict(params)
    space = _BUILDERS[desc.construction](params)
    dg, dk, dh = expected_dims(desc, params)
    got = (space.algebra.dim, space.h.dim + space.m1.dim, space.h.dim)
    if got != (dg, dk, dh):
        raise CertificationError(f"{key}: dimensions {got} != {(dg, dk, dh)}", float("nan"))
    return DecomposedSpace(space.algebra, space.h, space.m1, space.m2, True, key)


# -- Wallach spaces ----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class WallachSpace:
    """``g = h + m1 + m2 + m3`` with ``[mi, mi] in h`` and ``[mi, mj] in mk``."""

    key: str
    algebra: LieAlgebra
    h: Subspace
    m_parts: tuple[Subspace, Subspace, Subspace]

    def derived_triple(self, i: int) -> DecomposedSpace:
        """Triple with ``m_F = m_i`` and ``m_B`` the sum of the other two (``i`` in 1..3)."""
        fib, rest = self._parts(i)
        return DecomposedSpace(self.algebra, self.h, fib, rest, True, f"{self.key}/F{i}")

    def split(self, i: int = 3) -> DecomposedSpace:
        """Non-triple splitting ``m1 = m_j + m_k``, ``m2 = m_i``."""
        single, rest = self._parts(i)
        return DecomposedSpace(self.algebra, self.h, rest, single, False, f"{self.key}/S{i}")

    @property
    def derived_triples(self) -> tuple[DecomposedSpace, ...]:
        return tuple(self.derived_triple(i) for i in (1, 2, 3))

    def _parts(self, i: int) -> tuple[Subspace, Subspace]:
        if i not in (1, 2, 3):
            raise ContractError(f"Wallach summand index must be 1, 2 or 3, got {i}")
        others = [self.m_parts[j] for j in range(3) if j != i - 1]
        return self.m_parts[i - 1], others[0] + others[1]

    def residuals(self) -> dict[str, float]:
        out = {}
        m = self.m_parts
        for i in range(3):
            out[f"[m{i + 1},m{i + 1}] in h"] = m[i].bracket_leak(m[i], self.h)
            out[f"[h,m{i + 1}] in m{i + 1}"] = self.h.bracket_leak(m[i], m[i])
        for i, j, k in [(0, 1, 2), (0, 2, 1), (1, 2, 0)]:
            out[f"[m{i + 1},m{j + 1}] in m{k + 1}"] = m[i].bracket_leak(m[j], m[k])
        out["h_subalgebra"] = self.h.bracket_leak(self.h, self.h)
        for t in self.derived_triples:
            for name, val in t.residuals().items():
                out[f"{t.label}:{name}"] = val
        return out

    def certify(self, tol: float = TAU_ALG) -> dict[str, float]:
        res = self.residuals()
        for name, val in res.items():
            if val > tol:
                raise CertificationError(f"{self.key}: {name}", val)
        return res


def _offdiag_complex(size, p, q):
    a = np.zeros((size, size), dtype=complex)
    a[p, q], a[q, p] = 1.0, -1.0
    b = np.zeros((size, size), dtype=complex)
    b[p, q] = b[q, p] = 1j
    return [a, b]


def _offdiag_quat(size, p, q):
    out = []
    for unit in range(4):
        x = np.zeros((size, size, 4))
        x[p, q, unit] = 1.0
        x[q, p, unit] = -1.0 if unit == 0 else 1.0
        out.append(x)
    return out


@lru_cache(maxsize=None)
def build_wallach(key: str) -> WallachSpace:
    desc = descriptor(key)
    if desc.kind != "wallach":
        raise ContractError(f"{key} is not a Wallach space")
    if desc.status != "constructed":
        raise NotConstructedError(f"{key} ({desc.g_name}/{desc.h_name}) is not constructed")
    pairs = [(0, 1), (0, 2), (1, 2)]
    if key == "W6":
        g = LieAlgebra.from_matrices("su(3)", [realify_complex(x) for x in su_complex_generators(3)])
        h_gens = [realify_complex(x) for x in su_complex_generators(3)[-2:]]
        parts = [[realify_complex(x) for x in _offdiag_complex(3, p, q)] for p, q in pairs]
    else:
        g = LieAlgebra.from_matrices("sp(3)", [realify_quaternionic(x) for x in sp_quaternionic_generators(3)])
        h_gens = [realify_quaternionic(x) for x in sp_quaternionic_generators(3)[:9]]
        parts = [[realify_quaternionic(x) for x in _offdiag_quat(3, p, q)] for p, q in pairs]
    g.certify()
    space = WallachSpace(
        key,
        g,
        g.subspace_from_matrices(h_gens),
        tuple(g.subspace_from_matrices(p) for p in parts),
    )
    space.certify()
    return space
