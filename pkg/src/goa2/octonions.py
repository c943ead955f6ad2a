"""Octonion multiplication, g2 = Der(O) and spin(7) acting on O = R^8.

The octonions are doubled from the quaternions,
``(a, b)(c, d) = (ac - conj(d) b, d a + b conj(c))``, with basis
``e0 = 1, e1..e3 = i, j, k`` and ``e4..e7 = (0, 1), (0, i), (0, j), (0, k)``.
"""

from __future__ import annotations

import numpy as np

from .algebra import TAU_RANK, CertificationError, LieAlgebra, Subspace, so

_QUAT = np.zeros((4, 4, 4))
for _a, _b, _c, _s in [
    (1, 2, 3, 1), (2, 3, 1, 1), (3, 1, 2, 1),
    (2, 1, 3, -1), (3, 2, 1, -1), (1, 3, 2, -1),
]:  # fmt: skip
    _QUAT[_a, _b, _c] = _s
for _a in range(4):
    _QUAT[0, _a, _a] = _QUAT[_a, 0, _a] = 1.0
for _a in (1, 2, 3):
    _QUAT[_a, _a, 0] = -1.0


def _qmul(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    return np.einsum("a,b,abc->c", p, q, _QUAT)


def _qconj(p: np.ndarray) -> np.ndarray:
    return p * np.array([1.0, -1.0, -1.0, -1.0])


def omul(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    a, b, c, d = x[:4], x[4:], y[:4], y[4:]
    return np.concatenate(
        [_qmul(a, c) - _qmul(_qconj(d), b), _qmul(d, a) + _qmul(b, _qconj(c))]
    )


def multiplication_table() -> np.ndarray:
    """``T[i, j, k]``: coefficient of ``e_k`` in ``e_i e_j``."""
    eye = np.eye(8)
    return np.array([[omul(eye[i], eye[j]) for j in range(8)] for i in range(8)])


def left_multiplication(i: int) -> np.ndarray:
    """Matrix of ``x -> e_i x`` on R^8."""
    return multiplication_table()[i].T


def derivation_constraints(table: np.ndarray, generators: np.ndarray) -> np.ndarray:
    """Constraint matrix of ``D(xy) = D(x) y + x D(y)`` on the imaginary units.

    ``generators`` are 8x8 matrices; column ``a`` holds the defect of the
    Leibniz rule for ``generators[a]`` over all pairs ``(e_i, e_j)``, i, j >= 1.
    """
    cols = []
    for d in generators:
        rows = []
        for i in range(1, 8):
            for j in range(1, 8):
                lhs = d @ table[i, j]
                rhs = table[:, j].T @ d[:, i] + table[i].T @ d[:, j]
                rows.append(lhs - rhs)
        cols.append(np.concatenate(rows))
    return np.array(cols).T


def null_space(a: np.ndarray, tol: float = TAU_RANK) -> np.ndarray:
    _, sing, vt = np.linalg.svd(a)
    rank = int((sing > tol * max(1.0, sing.max())).sum())
    return vt[rank:]


def build_g2_in_so7() -> Subspace:
    """The 14-dimensional derivation algebra of O, as a subspace of so(7) on e1..e7."""
    so7 = so(7)
    gens = []
    for b in so7.basis:
        d = np.zeros((8, 8))
        d[1:, 1:] = b
        gens.append(d)
    null = null_space(derivation_constraints(multiplication_table(), np.array(gens)))
    if null.shape[0] != 14:
        raise CertificationError("g2 null-space dimension == 14", float(null.shape[0]))
    g2 = so7.orthonormalize(null)
    leak = g2.bracket_leak(g2, g2)
    if leak > 1e-10:
        raise CertificationError("[g2, g2] in g2", leak)
    return g2


def gamma_matrices() -> list[np.ndarray]:
    """Left multiplications by e1..e7: skew, with ``g_i g_j + g_j g_i = -2 delta_ij``."""
    table = multiplication_table()
    return [table[i].T for i in range(1, 8)]


def build_spin7_in_so8(so8: LieAlgebra | None = None) -> Subspace:
    """spin(7) = span of products ``g_i g_j`` (i < j) of the octonionic gammas, inside so(8)."""
    so8 = so(8) if so8 is None else so8
    gam = gamma_matrices()
    prods = [gam[i] @ gam[j] for i in range(7) for j in range(i + 1, 7)]
    spin7 = so8.subspace_from_matrices(prods)
    if spin7.dim != 21:
        raise CertificationError("spin(7) dimension == 21", float(spin7.dim))
    leak = spin7.bracket_leak(spin7, spin7)
    if leak > 1e-10:
        raise CertificationError("[spin7, spin7] in spin7", leak)
    return spin7
