"""Compact real matrix Lie algebras with a bi-invariant inner product.

Every algebra is carried by real skew-symmetric matrices (complex and
quaternionic algebras are realified first).  The inner product is
``-tr XY``, which on skew matrices is the Frobenius product, optionally
reweighted entrywise so that direct sums can scale each block factor
separately.  Bases are orthonormal for it, so coefficient vectors are
compared with the plain Euclidean dot product.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from functools import cached_property

import numpy as np

TAU_ALG = 1e-10
TAU_RANK = 1e-8


class ContractError(ValueError):
    """Raised when an operation receives arguments violating its contract."""


class CertificationError(RuntimeError):
    """Raised when a constructed object fails one of its invariants."""

    def __init__(self, invariant: str, residual: float):
        super().__init__(f"invariant {invariant!r} failed: residual {residual:.3e}")
        self.invariant = invariant
        self.residual = residual


def commutator(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return x @ y - y @ x


def realify_complex(z: np.ndarray) -> np.ndarray:
    """Map a complex matrix ``A + iB`` to the real block matrix ``[[A, -B], [B, A]]``."""
    a, b = z.real, z.imag
    return np.block([[a, -b], [b, a]])


# left multiplication by 1, i, j, k on R^4 = span(1, i, j, k)
_QUAT_LEFT = np.array(
    [
        np.eye(4),
        [[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]],
        [[0, 0, -1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, -1, 0, 0]],
        [[0, 0, 0, -1], [0, 0, -1, 0], [0, 1, 0, 0], [1, 0, 0, 0]],
    ],
    dtype=float,
)


def realify_quaternionic(q: np.ndarray) -> np.ndarray:
    """Realify an ``(n, n, 4)`` array of quaternion entries into a ``4n x 4n`` matrix.

    Entry ``q[p, r] = (a, b, c, d)`` stands for ``a + bi + cj + dk`` and is
    replaced by the 4x4 matrix of left multiplication on ``H = R^4``.
    """
    n = q.shape[0]
    blocks = np.einsum("prk,kab->parb", q, _QUAT_LEFT)
    return blocks.reshape(4 * n, 4 * n)


@dataclass(frozen=True, eq=False)
class LieAlgebra:
    """A compact matrix Lie algebra with orthonormal basis and structure constants.

    ``structure[i, j, k]`` is the ``b_k`` coefficient of ``[b_i, b_j]``.
    """

    name: str
    basis: np.ndarray  # (dim, d, d)
    structure: np.ndarray  # (dim, dim, dim)
    weight: np.ndarray  # (d, d) entrywise weights of the Frobenius product

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def matrix_size(self) -> int:
        return self.basis.shape[1]

    @property
    def gram(self) -> np.ndarray:
        return np.einsum("aij,bij->ab", self.basis * self.weight, self.basis)

    @classmethod
    def from_matrices(
        cls, name: str, matrices, scale: float = 1.0, weight: np.ndarray | None = None
    ) -> "LieAlgebra":
        """Build an algebra spanned by ``matrices``.

        The generators may be linearly dependent; they are orthonormalized
        under ``scale * (-tr XY)`` (or the entrywise-``weight``ed Frobenius
        product) and dependent ones dropped.  The span is assumed to be
        closed under the commutator (checked by :meth:`certify`).
        """
        mats = np.asarray(matrices, dtype=float)
        if mats.ndim != 3 or mats.shape[1] != mats.shape[2]:
            raise ContractError("expected a stack of square matrices")
        skew = np.abs(mats + np.swapaxes(mats, 1, 2)).max(initial=0.0)
        if skew > TAU_ALG:
            raise CertificationError("skew-symmetry of generators", float(skew))
        d = mats.shape[1]
        w = scale * np.ones((d, d)) if weight is None else np.asarray(weight, dtype=float)
        root = np.sqrt(w)
        rows = _gram_schmidt((mats * root).reshape(len(mats), -1))
        if not rows:
            raise ContractError("generators span the zero algebra")
        basis = np.array(rows).reshape(-1, d, d) / root
        return cls(name, basis, _structure_constants(basis, w), w)

    # -- coefficient-vector operations ---------------------------------

    def _check(self, *vectors: np.ndarray) -> None:
        for v in vectors:
            if np.shape(v)[-1:] != (self.dim,):
                raise ContractError(
                    f"{self.name}: expected coefficient vectors of length {self.dim}, "
                    f"got shape {np.shape(v)}"
                )

    def bracket(self, x, y) -> np.ndarray:
        x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
        self._check(x, y)
        return np.einsum("i,j,ijk->k", x, y, self.structure)

    def ad(self, x) -> np.ndarray:
        """Matrix of ``z -> [x, z]`` in the algebra basis."""
        x = np.asarray(x, dtype=float)
        self._check(x)
        return np.einsum("i,ijk->kj", x, self.structure)

    def inner(self, x, y) -> float:
        x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
        self._check(x, y)
        return float(x @ y)

    def norm(self, x) -> float:
        return float(np.sqrt(self.inner(x, x)))

    def to_matrix(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        self._check(x)
        return np.tensordot(x, self.basis, axes=1)

    def coefficients(self, m: np.ndarray) -> np.ndarray:
        """Coefficients of a matrix in the basis (orthogonal projection onto the span)."""
        return np.einsum("aij,ij->a", self.basis * self.weight, m)

    def full(self) -> "Subspace":
        return Subspace(self, np.eye(self.dim))

    def unit(self, i: int) -> np.ndarray:
        e = np.zeros(self.dim)
        e[i] = 1.0
        return e

    def orthonormalize(self, vectors) -> "Subspace":
        vectors = np.asarray(vectors, dtype=float).reshape(-1, self.dim)
        rows = _gram_schmidt(vectors)
        return Subspace(self, np.array(rows).reshape(-1, self.dim))

    def subspace_from_matrices(self, matrices) -> "Subspace":
        coeffs = [self.coefficients(m) for m in matrices]
        return self.orthonormalize(coeffs)

    def fingerprint(self) -> str:
        rounded = np.round(self.basis, 12) + 0.0  # + 0.0 folds -0.0
        return hashlib.sha256(rounded.tobytes()).hexdigest()[:16]

    # -- certification --------------------------------------------------

    def residuals(self) -> dict[str, float]:
        c = self.structure
        n = self.dim
        out = {
            "antisymmetry": float(np.abs(c + np.swapaxes(c, 0, 1)).max()),
            "bi_invariance": float(np.abs(c + np.swapaxes(c, 1, 2)).max()),
        }
        # sum_m c[i,j,m] c[m,k,l] over cyclic (i,j,k), chunked over i
        jac = 0.0
        for i in range(n):
            t1 = np.einsum("jm,mkl->jkl", c[i], c)
            t2 = np.einsum("jkm,ml->jkl", c, c[:, i, :])
            t3 = np.einsum("km,mjl->jkl", -c[i], c)  # c[k,i,m] = -c[i,k,m]
            jac = max(jac, float(np.abs(t1 + t2 + t3).max()))
        out["jacobi"] = jac
        comm = np.einsum("aij,bjk->abik", self.basis, self.basis)
        comm = comm - np.swapaxes(comm, 0, 1)
        rebuilt = np.einsum("abk,kij->abij", c, self.basis)
        out["closure"] = float(np.abs(comm - rebuilt).max())
        out["orthonormality"] = float(np.abs(self.gram - np.eye(n)).max())
        return out

    def certify(self, tol: float = TAU_ALG) -> dict[str, float]:
        res = self.residuals()
        for key, val in res.items():
            if val > tol:
                raise CertificationError(f"{self.name}: {key}", val)
        return res


def _gram_schmidt(vectors: np.ndarray, drop: float = TAU_RANK) -> list[np.ndarray]:
    """Modified Gram-Schmidt with one re-orthogonalization pass."""
    out: list[np.ndarray] = []
    for v in np.asarray(vectors, dtype=float):
        w = v.copy()
        for _ in range(2):
            for q in out:
                w -= (q @ w) * q
        nrm = np.linalg.norm(w)
        if nrm >= drop * max(1.0, np.linalg.norm(v)):
            out.append(w / nrm)
    return out


def _structure_constants(basis: np.ndarray, weight: np.ndarray) -> np.ndarray:
    n = basis.shape[0]
    dual = basis * weight
    c = np.zeros((n, n, n))
    for i in range(n):
        for j in range(i + 1, n):
            m = commutator(basis[i], basis[j])
            c[i, j] = np.einsum("aij,ij->a", dual, m)
            c[j, i] = -c[i, j]
    return c


@dataclass(frozen=True, eq=False)
class Subspace:
    """Orthonormal coefficient basis (rows) of a subspace of ``algebra``."""

    algebra: LieAlgebra
    coeff_basis: np.ndarray  # (k, n)

    @property
    def dim(self) -> int:
        return self.coeff_basis.shape[0]

    def project(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        self.algebra._check(x)
        return (x @ self.coeff_basis.T) @ self.coeff_basis

    def coords(self, x) -> np.ndarray:
        """Coordinates of ``x`` in this subspace's basis."""
        return self.coeff_basis @ np.asarray(x, dtype=float)

    def embed(self, coords) -> np.ndarray:
        return np.asarray(coords, dtype=float) @ self.coeff_basis

    def projector(self) -> np.ndarray:
        return self.coeff_basis.T @ self.coeff_basis

    def __add__(self, other: "Subspace") -> "Subspace":
        if other.algebra is not self.algebra:
            raise ContractError("subspaces live in different algebras")
        return self.algebra.orthonormalize(np.vstack([self.coeff_basis, other.coeff_basis]))

    def complement(self, within: "Subspace | None" = None) -> "Subspace":
        """Orthogonal complement of ``self`` inside ``within`` (default: the whole algebra)."""
        ambient = within.coeff_basis if within is not None else np.eye(self.algebra.dim)
        residual = ambient - (ambient @ self.coeff_basis.T) @ self.coeff_basis
        return self.algebra.orthonormalize(residual)

    def orthonormal_defect(self) -> float:
        g = self.coeff_basis @ self.coeff_basis.T
        return float(np.abs(g - np.eye(self.dim)).max(initial=0.0))

    def bracket_leak(self, other: "Subspace", target: "Subspace") -> float:
        """Max norm of the part of ``[self, other]`` lying outside ``target`` (basis pairs)."""
        if self.dim == 0 or other.dim == 0:
            return 0.0
        c = self.algebra.structure
        br = np.einsum("ai,bj,ijk->abk", self.coeff_basis, other.coeff_basis, c)
        leak = br - br @ target.projector()
        return float(np.linalg.norm(leak, axis=-1).max())

    def random(self, rng: np.random.Generator) -> np.ndarray:
        """Gaussian vector in the subspace, normalized to unit length."""
        z = rng.standard_normal(self.dim)
        return self.embed(z / np.linalg.norm(z))


def ad_matrix(x, s_from: Subspace, s_to: Subspace) -> np.ndarray:
    """Matrix of ``z -> project([x, z], s_to)`` in the bases of ``s_from`` and ``s_to``."""
    alg = s_from.algebra
    if s_to.algebra is not alg:
        raise ContractError("subspaces live in different algebras")
    return s_to.coeff_basis @ alg.ad(x) @ s_from.coeff_basis.T


def direct_sum(name: str, algebras, scales=None) -> LieAlgebra:
    """Blockwise direct sum; factor ``i`` gets inner product ``scales[i] * (-tr XY)``."""
    algebras = list(algebras)
    scales = [1.0] * len(algebras) if scales is None else list(scales)
    d = sum(a.matrix_size for a in algebras)
    weight = np.ones((d, d))
    mats = []
    offset = 0
    for alg, s in zip(algebras, scales):
        size = alg.matrix_size
        weight[offset : offset + size, offset : offset + size] = s
        for b in alg.basis:
            m = np.zeros((d, d))
            m[offset : offset + size, offset : offset + size] = b
            mats.append(m)
        offset += size
    return LieAlgebra.from_matrices(name, mats, weight=weight)


# -- standard families ---------------------------------------------------


def so_generators(n: int) -> list[np.ndarray]:
    gens = []
    for i in range(n):
        for j in range(i + 1, n):
            m = np.zeros((n, n))
            m[i, j], m[j, i] = 1.0, -1.0
            gens.append(m)
    return gens


def su_complex_generators(n: int, include_center: bool = False) -> list[np.ndarray]:
    """Skew-Hermitian generators of su(n) (or u(n) with ``include_center``)."""
    gens = []
    for i in range(n):
        for j in range(i + 1, n):
            m = np.zeros((n, n), dtype=complex)
            m[i, j], m[j, i] = 1.0, -1.0
            gens.append(m)
            m = np.zeros((n, n), dtype=complex)
            m[i, j] = m[j, i] = 1j
            gens.append(m)
    for i in range(n - 1):
        m = np.zeros((n, n), dtype=complex)
        m[i, i], m[n - 1, n - 1] = 1j, -1j
        gens.append(m)
    if include_center:
        gens.append(1j * np.eye(n))
    return gens


def sp_quaternionic_generators(n: int) -> list[np.ndarray]:
    """Quaternionic skew-Hermitian generators of sp(n) as ``(n, n, 4)`` arrays."""
    gens = []
    for p in range(n):
        for unit in (1, 2, 3):
            q = np.zeros((n, n, 4))
            q[p, p, unit] = 1.0
            gens.append(q)
    for p in range(n):
        for r in range(p + 1, n):
            q = np.zeros((n, n, 4))
            q[p, r, 0], q[r, p, 0] = 1.0, -1.0
            gens.append(q)
            for unit in (1, 2, 3):
                q = np.zeros((n, n, 4))
                q[p, r, unit] = q[r, p, unit] = 1.0
                gens.append(q)
    return gens


def sp_in_su_generators(n: int) -> list[np.ndarray]:
    """Complex ``2n x 2n`` generators of sp(n) = u(2n) ∩ sp(2n, C)."""
    u = su_complex_generators(2 * n, include_center=True)
    j = np.block([[np.zeros((n, n)), np.eye(n)], [-np.eye(n), np.zeros((n, n))]])
    # real parametrization X = sum t_a u_a; impose X^T J + J X = 0
    cols = []
    for g in u:
        c = g.T @ j + j @ g
        cols.append(np.concatenate([c.real.ravel(), c.imag.ravel()]))
    a = np.array(cols).T
    _, sing, vt = np.linalg.svd(a)
    rank = int((sing > TAU_RANK * sing.max()).sum())
    null = vt[rank:]
    return [np.tensordot(t, np.array(u), axes=1) for t in null]


def so(n: int) -> LieAlgebra:
    return LieAlgebra.from_matrices(f"so({n})", so_generators(n))


def su(n: int) -> LieAlgebra:
    return LieAlgebra.from_matrices(
        f"su({n})", [realify_complex(g) for g in su_complex_generators(n)]
    )


def u(n: int) -> LieAlgebra:
    return LieAlgebra.from_matrices(
        f"u({n})", [realify_complex(g) for g in su_complex_generators(n, True)]
    )


def sp(n: int) -> LieAlgebra:
    return LieAlgebra.from_matrices(
        f"sp({n})", [realify_quaternionic(q) for q in sp_quaternionic_generators(n)]
    )


@dataclass(frozen=True, eq=False)
class DecomposedSpace:
    """A reductive, orthogonal splitting ``g = h + m1 + m2``.

    For spaces coming from a triple ``h < k < g``, ``m1`` is the fiber part
    ``m_F = k - h`` and ``m2`` the base part ``m_B = g - k``, and
    ``is_triple`` records the extra relation ``[m1, m2] in m2``.
    """

    algebra: LieAlgebra
    h: Subspace
    m1: Subspace
    m2: Subspace
    is_triple: bool = False
    label: str = ""

    @cached_property
    def m(self) -> Subspace:
        return Subspace(self.algebra, np.vstack([self.m1.coeff_basis, self.m2.coeff_basis]))

    def residuals(self) -> dict[str, float]:
        alg = self.algebra
        parts = np.vstack([self.h.coeff_basis, self.m1.coeff_basis, self.m2.coeff_basis])
        out = {
            "dimension_sum": float(abs(parts.shape[0] - alg.dim)),
            "orthogonality": float(np.abs(parts @ parts.T - np.eye(parts.shape[0])).max()),
            "h_subalgebra": self.h.bracket_leak(self.h, self.h),
            "reductive_m1": self.h.bracket_leak(self.m1, self.m1),
            "reductive_m2": self.h.bracket_leak(self.m2, self.m2),
        }
        if self.is_triple:
            out["triple_m1_m2"] = self.m1.bracket_leak(self.m2, self.m2)
        return out

    def certify(self, tol: float = TAU_ALG) -> dict[str, float]:
        res = self.residuals()
        for key, val in res.items():
            if val > tol:
                raise CertificationError(f"{self.label}: {key}", val)
        return res

    def in_m(self, v, tol: float = TAU_ALG) -> bool:
        v = np.asarray(v, dtype=float)
        return np.linalg.norm(self.h.project(v)) <= tol * max(1.0, np.linalg.norm(v))
