"""Profiles phi(s) and the (alpha1, alpha2)-norm ``F(v) = |v| phi(|v2| / |v|)`` on m."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import expr
from .algebra import TAU_ALG, ContractError, DecomposedSpace

THETA_CUT = 1e-9
GRID_SIZE = 1001


class PhiDomainError(ValueError):
    def __init__(self, message: str, s: float):
        super().__init__(f"{message} at s = {s:.6g}")
        self.s = s


class BoundaryError(ContractError):
    """theta is (numerically) 0 or 1; use the Riemannian branch instead."""


@dataclass(frozen=True, eq=False)
class PhiFunction:
    """A profile ``phi`` on [0, 1] returning ``(phi(s), phi'(s))`` jointly.

    ``kind`` is ``"constant"`` (``params = (c,)``), ``"riemannian"``
    (``params = (a, b)``, ``phi = sqrt(a + (b - a) s^2)``) or ``"expression"``.
    """

    kind: str
    params: tuple = ()
    text: str = ""
    ast: tuple | None = None

    @classmethod
    def constant(cls, c: float = 1.0) -> "PhiFunction":
        return _checked(cls("constant", (float(c),), text=_fmt(c)))

    @classmethod
    def riemannian(cls, a: float, b: float) -> "PhiFunction":
        return _checked(cls("riemannian", (float(a), float(b))))

    @property
    def label(self) -> str:
        if self.kind == "riemannian":
            return f"riemannian({self.params[0]!r},{self.params[1]!r})"
        return self.text

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        if self.kind == "constant":
            return np.full_like(s, self.params[0]), np.zeros_like(s)
        if self.kind == "riemannian":
            a, b = self.params
            phi = np.sqrt(a + (b - a) * s**2)
            return phi, (b - a) * s / phi
        out = expr.evaluate(self.ast, expr.Dual(s, np.ones_like(s)))
        return np.broadcast_to(out.val, s.shape) * 1.0, np.broadcast_to(out.der, s.shape) * 1.0

    def regularity(self, n: int = GRID_SIZE) -> dict[str, float]:
        """Minima over the grid of ``phi``, ``phi - s phi'`` and ``phi - (s - 1/s) phi'``.

        The last two are sampled on the open interval only.
        """
        s = np.linspace(0.0, 1.0, n)
        with np.errstate(all="ignore"):
            phi, dphi = self(s)
            inner = s[1:-1]
            p, dp = phi[1:-1], dphi[1:-1]
            first = p - inner * dp
            second = p - (inner - 1.0 / inner) * dp
        return {
            "phi": _nanmin(phi, s),
            "phi - s phi'": _nanmin(first, inner),
            "phi - (s - 1/s) phi'": _nanmin(second, inner),
        }

    def is_constant(self) -> bool:
        return self.kind == "constant" or (
            self.kind == "riemannian" and self.params[0] == self.params[1]
        )


def _fmt(c: float) -> str:
    return repr(float(c)).removesuffix(".0")


def _nanmin(values: np.ndarray, s: np.ndarray) -> tuple[float, float]:
    """Minimum and where it sits; for violations, the first offending ``s`` instead."""
    bad = ~(values > 0)
    if bad.any():
        low = float(np.nanmin(values)) if np.isfinite(values).any() else float("nan")
        return low, float(s[np.argmax(bad)])
    i = int(np.argmin(values))
    return float(values[i]), float(s[i])


def _checked(phi: PhiFunction) -> PhiFunction:
    for name, (low, where) in phi.regularity().items():
        if not low > 0:
            raise PhiDomainError(f"{phi.label or phi.kind}: {name} <= 0", where)
    return phi


def parse_phi(text: str) -> PhiFunction:
    """Parse a profile expression and check regularity on the grid.

    Expressions without ``s`` become the constant family.
    """
    ast = expr.parse(text)
    if not expr.depends_on_s(ast):
        val = float(expr.evaluate(ast, expr.Dual(0.0, 0.0)).val)
        return _checked(PhiFunction("constant", (val,), text=text.strip()))
    return _checked(PhiFunction("expression", text=text.strip(), ast=ast))


@dataclass(frozen=True, eq=False)
class NormContext:
    space: DecomposedSpace
    phi: PhiFunction

    def split(self, v) -> tuple[np.ndarray, np.ndarray]:
        v = np.asarray(v, dtype=float)
        return self.space.m1.project(v), self.space.m2.project(v)

    def theta(self, v) -> float:
        v1, v2 = self.split(v)
        return float(np.linalg.norm(v2) / np.linalg.norm(v1 + v2))

    def is_interior(self, v) -> bool:
        v1, v2 = self.split(v)
        nv = np.linalg.norm(v1 + v2)
        return min(np.linalg.norm(v1), np.linalg.norm(v2)) / nv >= THETA_CUT


def _require_m(ctx: NormContext, v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    ctx.space.algebra._check(v)
    if not np.any(v):
        raise ContractError("zero vector")
    if not ctx.space.in_m(v):
        raise ContractError("vector has a component in h")
    return v


def norm_value(ctx: NormContext, v) -> float:
    v = _require_m(ctx, v)
    v2 = ctx.space.m2.project(v)
    nv = np.linalg.norm(v)
    phi, _ = ctx.phi(np.linalg.norm(v2) / nv)
    return float(nv * phi)


def descent_coefficients(phi: PhiFunction, theta: float) -> tuple[float, float, float]:
    """``(phi, phi - theta phi', phi - (theta - 1/theta) phi')`` at ``theta``."""
    p, dp = phi(theta)
    p, dp = float(p), float(dp)
    return p, p - theta * dp, p - (theta - 1.0 / theta) * dp


def descent_vector(ctx: NormContext, u) -> np.ndarray:
    """``w`` with ``g_U(U, V) = phi(theta) <w, V>``; ``theta`` must be interior."""
    u = _require_m(ctx, u)
    u1, u2 = ctx.split(u)
    if not ctx.is_interior(u):
        raise BoundaryError("theta at the boundary of (0, 1)")
    theta = float(np.linalg.norm(u2) / np.linalg.norm(u))
    _, c1, c2 = descent_coefficients(ctx.phi, theta)
    return c1 * u1 + c2 * u2


def fundamental_tensor(ctx: NormContext, u, v) -> float:
    """``g_U(U, V)`` for ``theta = |U2| / |U|`` strictly inside (0, 1)."""
    w = descent_vector(ctx, u)
    u1, u2 = ctx.split(u)
    theta = float(np.linalg.norm(u2) / np.linalg.norm(u1 + u2))
    p, _ = ctx.phi(theta)
    v = np.asarray(v, dtype=float)
    ctx.space.algebra._check(v)
    if np.linalg.norm(ctx.space.h.project(v)) > TAU_ALG * max(1.0, np.linalg.norm(v)):
        raise ContractError("V has a component in h")
    return float(p) * float(w @ v)
