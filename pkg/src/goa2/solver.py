"""Least-squares feasibility of the bracket-linear conditions over ``u in h``.

Every system is linear in ``u``: ``A t = rhs`` where ``t`` are the
coordinates of ``u`` in the orthonormal basis of ``h`` and both sides are
written in algebra coordinates.  Residuals are normalized to be scale-free
and classified as feasible (< ``tol_feas``), infeasible (> ``tol_infeas``)
or indeterminate in between.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .algebra import TAU_RANK, ContractError, DecomposedSpace
from .norm import NormContext, descent_vector, fundamental_tensor

TAU_FEAS = 1e-8
TAU_INFEAS = 1e-4
_EPS = 1e-300


@dataclass(frozen=True, eq=False)
class FeasibilityReport:
    status: str  # "feasible" | "infeasible" | "indeterminate"
    u: np.ndarray  # minimizer, algebra coordinates
    residual: float
    rank: int
    rhs_norm: float
    scale: float
    branch: str = ""

    @property
    def feasible(self) -> bool:
        return self.status == "feasible"

    @property
    def infeasible(self) -> bool:
        return self.status == "infeasible"


@dataclass(frozen=True, eq=False)
class GeodesicCandidate:
    v: np.ndarray
    u: np.ndarray
    ctx: NormContext

    @property
    def x(self) -> np.ndarray:
        return self.u + self.v


def classify(residual: float, tol_feas: float = TAU_FEAS, tol_infeas: float = TAU_INFEAS) -> str:
    if residual < tol_feas:
        return "feasible"
    if residual > tol_infeas:
        return "infeasible"
    return "indeterminate"


def min_norm_lstsq(a: np.ndarray, b: np.ndarray, tol: float = TAU_RANK) -> tuple[np.ndarray, int]:
    """Minimum-norm least-squares solution via a complete orthogonal decomposition.

    Column-pivoted QR reveals the rank (``|R_ii| > tol |R_00|``); a second QR
    of the leading rows removes the null-space component.
    """
    m, n = a.shape
    if n == 0 or m == 0:
        return np.zeros(n), 0
    q, r, piv = scipy.linalg.qr(a, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    if diag[0] <= _EPS:
        return np.zeros(n), 0
    rank = int((diag > tol * diag[0]).sum())
    c = q[:, :rank].T @ b
    z, t = scipy.linalg.qr(r[:rank].T, mode="economic")
    y = z @ scipy.linalg.solve_triangular(t, c, trans="T")
    x = np.zeros(n)
    x[piv] = y
    return x, rank


def bracket_with_h(space: DecomposedSpace, x) -> np.ndarray:
    """Matrix of ``t -> [u(t), x]`` from h-coordinates to algebra coordinates."""
    return -space.algebra.ad(x) @ space.h.coeff_basis.T


def _solve(space, a, rhs, scale, tol_feas, tol_infeas, branch="") -> FeasibilityReport:
    t, rank = min_norm_lstsq(a, rhs)
    residual = float(np.linalg.norm(a @ t - rhs)) / max(scale, _EPS)
    return FeasibilityReport(
        classify(residual, tol_feas, tol_infeas),
        space.h.embed(t),
        residual,
        rank,
        float(np.linalg.norm(rhs)),
        float(scale),
        branch,
    )


def condition_I_system(space: DecomposedSpace, v_f, v_b) -> tuple[np.ndarray, np.ndarray, float]:
    """``[u, v_F] = 0`` stacked on ``[u, v_B] = -[v_F, v_B]``."""
    alg = space.algebra
    a = np.vstack([bracket_with_h(space, v_f), bracket_with_h(space, v_b)])
    rhs = np.concatenate([np.zeros(alg.dim), -alg.bracket(v_f, v_b)])
    return a, rhs, float(np.linalg.norm(v_f) * np.linalg.norm(v_b))


def solve_condition_I(
    space: DecomposedSpace, v_f, v_b, tol_feas=TAU_FEAS, tol_infeas=TAU_INFEAS
) -> FeasibilityReport:
    if not space.is_triple:
        raise ContractError(f"{space.label}: Condition I needs a triple space")
    v_f, v_b = np.asarray(v_f, dtype=float), np.asarray(v_b, dtype=float)
    space.algebra._check(v_f, v_b)
    a, rhs, scale = condition_I_system(space, v_f, v_b)
    return _solve(space, a, rhs, scale, tol_feas, tol_infeas, "condition-I")


def condition_I_residual(space: DecomposedSpace, v_f, v_b, u) -> float:
    """Normalized residual of a given ``u`` (algebra coordinates) in the Condition-I system."""
    a, rhs, scale = condition_I_system(space, v_f, v_b)
    return float(np.linalg.norm(a @ space.h.coords(u) - rhs)) / max(scale, _EPS)


def theorem2_system(space, v1, v2, c1, c2):
    """``[u, c1 v1 + c2 v2] = -[v1, v2]_m``."""
    alg = space.algebra
    target = c1 * v1 + c2 * v2
    rhs = -space.m.project(alg.bracket(v1, v2))
    scale = float(np.linalg.norm(rhs) + np.linalg.norm(target))
    return bracket_with_h(space, target), rhs, scale


def solve_theorem2_condition3(
    space: DecomposedSpace, v1, v2, c1: float, c2: float, tol_feas=TAU_FEAS, tol_infeas=TAU_INFEAS
) -> FeasibilityReport:
    v1, v2 = np.asarray(v1, dtype=float), np.asarray(v2, dtype=float)
    space.algebra._check(v1, v2)
    if not (c1 > 0 and c2 > 0):
        raise ContractError("c1 and c2 must be positive")
    if not (np.any(v1) and np.any(v2)):
        raise ContractError("v1 and v2 must be nonzero")
    a, rhs, scale = theorem2_system(space, v1, v2, c1, c2)
    return _solve(space, a, rhs, scale, tol_feas, tol_infeas, "theorem2")


def geodesic_system(ctx: NormContext, v):
    """Bracket form ``[u + v, w]_m = 0`` of the geodesic condition, ``w = descent_vector(v)``."""
    space = ctx.space
    w = descent_vector(ctx, v)
    proj = space.m.projector()
    a = proj @ bracket_with_h(space, w)
    rhs = -proj @ space.algebra.bracket(v, w)
    return a, rhs, float(np.linalg.norm(w) * np.linalg.norm(v))


def solve_geodesic_vector(
    ctx: NormContext, v, tol_feas=TAU_FEAS, tol_infeas=TAU_INFEAS
) -> tuple[GeodesicCandidate, FeasibilityReport]:
    """Find ``u in h`` making ``u + v`` a geodesic vector of the (alpha1, alpha2)-metric."""
    space = ctx.space
    v = np.asarray(v, dtype=float)
    space.algebra._check(v)
    if not np.any(v):
        raise ContractError("zero vector")
    if not ctx.is_interior(v):
        # Riemannian branch: <[v, Z]_m, v> = -<Z, [v, v]> vanishes, so u = 0
        res = float(np.linalg.norm(space.m.project(space.algebra.bracket(v, v))))
        res /= max(float(v @ v), _EPS)
        u = np.zeros_like(v)
        report = FeasibilityReport(
            classify(res, tol_feas, tol_infeas), u, res, 0, 0.0, float(v @ v), "riemannian"
        )
        return GeodesicCandidate(v, u, ctx), report
    a, rhs, scale = geodesic_system(ctx, v)
    report = _solve(space, a, rhs, scale, tol_feas, tol_infeas, "finsler")
    return GeodesicCandidate(v, report.u, ctx), report


def geodesic_residual(ctx: NormContext, v, u) -> float:
    """Normalized residual of a given ``u`` in the bracket-form geodesic system."""
    a, rhs, scale = geodesic_system(ctx, v)
    return float(np.linalg.norm(a @ ctx.space.h.coords(u) - rhs)) / max(scale, _EPS)


def check_geodesic_vector(ctx: NormContext, candidate: GeodesicCandidate) -> float:
    """``max_Z |g_v(v, [X, Z]_m)|`` over an orthonormal basis of m, ``X = u + v``.

    Brackets are taken as matrix commutators and the pairing uses the
    fundamental tensor directly, so nothing is shared with the solver.
    """
    space = ctx.space
    alg = space.algebra
    v = np.asarray(candidate.v, dtype=float)
    x = alg.to_matrix(candidate.x)
    interior = ctx.is_interior(v)
    worst = 0.0
    for z in space.m.coeff_basis:
        zm = alg.to_matrix(z)
        comm = space.m.project(alg.coefficients(x @ zm - zm @ x))
        val = fundamental_tensor(ctx, v, comm) if interior else float(v @ comm)
        worst = max(worst, abs(val))
    return worst


def witness_scale(ctx: NormContext, theta: float) -> float:
    """Factor turning a Condition-I witness into a geodesic witness at ``theta = |v_B|/|v|``.

    From the ``m_B`` part of the geodesic condition,
    ``[beta u' + (phi'/theta) v_F, v_B] = 0`` with
    ``beta = phi - (theta - 1/theta) phi'``, so ``u' = phi' / (theta beta) u``.
    """
    p, dp = ctx.phi(theta)
    p, dp = float(p), float(dp)
    return dp / (theta * p - (theta**2 - 1.0) * dp)


def geodesic_from_condition_I(ctx: NormContext, v_f, v_b, u) -> GeodesicCandidate:
    """Rescale a Condition-I witness ``u`` for ``(v_F, v_B)`` into a geodesic candidate."""
    v_f, v_b = np.asarray(v_f, dtype=float), np.asarray(v_b, dtype=float)
    v = v_f + v_b
    theta = float(np.linalg.norm(v_b) / np.linalg.norm(v))
    return GeodesicCandidate(v, witness_scale(ctx, theta) * np.asarray(u, dtype=float), ctx)
