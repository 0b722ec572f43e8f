"""Symplectic linear algebra.

Canonical Poisson structure, ortho-symplectic bases and their symplectic
inverses, greedy basis generation from trajectory snapshots, the cotangent
lift, and plain POD for reference baselines.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np


class DegenerateVector(Exception):
    """Candidate vector lies numerically in the span of the current basis."""


class CanonicalForm:
    """Canonical Poisson matrix J of size 2n, applied implicitly.

    J maps (q, p) to (p, -q); the transpose maps (q, p) to (-p, q). Both are
    O(n) block swaps with a sign flip, so no matrix is formed unless
    :meth:`matrix` is called explicitly.
    """

    def __init__(self, n: int):
        if n < 1:
            raise ValueError(f"half dimension must be positive, got {n}")
        self.n = int(n)

    @property
    def dim(self) -> int:
        return 2 * self.n

    def _check(self, v):
        v = np.asarray(v, dtype=float)
        if v.shape[0] != self.dim:
            raise ValueError(
                f"expected leading dimension {self.dim}, got {v.shape[0]}"
            )
        return v

    def apply(self, v):
        """Return J v for a vector of length 2n (or matrix with 2n rows)."""
        v = self._check(v)
        return np.concatenate([v[self.n:], -v[: self.n]], axis=0)

    def apply_transpose(self, v):
        """Return J^T v; J^T = -J = J^{-1}."""
        v = self._check(v)
        return np.concatenate([-v[self.n:], v[: self.n]], axis=0)

    def matrix(self) -> np.ndarray:
        """Explicit 2n x 2n matrix, for serialization and tests."""
        n = self.n
        j = np.zeros((2 * n, 2 * n))
        j[:n, n:] = np.eye(n)
        j[n:, :n] = -np.eye(n)
        return j


def symplectic_inverse(a: np.ndarray) -> np.ndarray:
    """Symplectic (Moore-Penrose-like) inverse A^+ = J_{2k}^T A^T J_{2n}.

    Parameters
    ----------
    a : ndarray, shape (2n, 2k)
        Matrix with an even number of rows and columns.

    Returns
    -------
    ndarray, shape (2k, 2n)
        A^+, computed by block swaps and sign flips only (exact in floating
        point up to the entries of A themselves).
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] % 2 or a.shape[1] % 2:
        raise ValueError(f"matrix must have even dimensions, got {a.shape}")
    n, k = a.shape[0] // 2, a.shape[1] // 2
    at = a.T
    at_j = np.hstack([-at[:, n:], at[:, :n]])          # A^T J_2n
    return np.vstack([-at_j[k:, :], at_j[:k, :]])      # J_2k^T (A^T J_2n)


@dataclass
class SnapshotSet:
    """Trajectory samples: ``states[:, i]`` is the state at ``times[i]``.

    ``dx`` is the grid spacing of semi-discretized PDE states; L2 norms of
    such states carry a factor sqrt(dx). Plain ODE states use dx = 1.
    """

    times: np.ndarray
    states: np.ndarray
    dx: float = 1.0

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.states = np.asarray(self.states, dtype=float)
        if self.states.ndim != 2:
            raise ValueError("states must be a 2-d array (dim x count)")
        if self.states.shape[0] % 2:
            raise ValueError("state dimension must be even")
        if self.states.shape[1] != self.times.shape[0]:
            raise ValueError(
                f"{self.states.shape[1]} states vs {self.times.shape[0]} times"
            )

    @property
    def dim(self) -> int:
        return self.states.shape[0]

    @property
    def count(self) -> int:
        return self.states.shape[1]


class OrthoSymplecticBasis:
    """Ortho-symplectic basis A = [E | J^T E] of shape (2n, 2k).

    The column pairing (column k+i equals J^T applied to column i) is
    maintained structurally, which makes the symplectic inverse equal the
    transpose; :meth:`coefficients` and :meth:`project` rely on that.
    """

    def __init__(self, lead: np.ndarray):
        lead = np.asarray(lead, dtype=float)
        if lead.ndim != 2 or lead.shape[0] % 2:
            raise ValueError(f"leading block must be (2n, k), got {lead.shape}")
        if lead.shape[1] < 1:
            raise ValueError("basis needs at least one column pair")
        self.lead = lead
        self.J = CanonicalForm(lead.shape[0] // 2)
        self._matrix = None

    @property
    def n(self) -> int:
        return self.lead.shape[0] // 2

    @property
    def k(self) -> int:
        return self.lead.shape[1]

    @property
    def dim(self) -> int:
        return 2 * self.n

    @property
    def n_columns(self) -> int:
        return 2 * self.k

    @property
    def matrix(self) -> np.ndarray:
        if self._matrix is None:
            self._matrix = np.hstack([self.lead, self.J.apply_transpose(self.lead)])
        return self._matrix

    def coefficients(self, z):
        """Reduced coordinates A^+ z (equal to A^T z by column pairing)."""
        top = self.lead.T @ z
        bottom = self.lead.T @ self.J.apply(z)
        return np.concatenate([top, bottom], axis=0)

    def project(self, z):
        """Orthogonal (= symplectic, by pairing) projection A A^+ z."""
        c = self.coefficients(z)
        k = self.k
        return self.lead @ c[:k] + self.J.apply_transpose(self.lead @ c[k:])

    def lift(self, y):
        """Map reduced coordinates back: A y."""
        y = np.asarray(y, dtype=float)
        k = self.k
        return self.lead @ y[:k] + self.J.apply_transpose(self.lead @ y[k:])

    def symplectic_inverse(self) -> np.ndarray:
        return symplectic_inverse(self.matrix)

    def truncate(self, pairs: int) -> "OrthoSymplecticBasis":
        """Sub-basis of the first ``pairs`` column pairs (nested by design)."""
        if not 1 <= pairs <= self.k:
            raise ValueError(f"pairs must be in [1, {self.k}], got {pairs}")
        return OrthoSymplecticBasis(self.lead[:, :pairs])

    def validate(self, tol: float = 1e-10) -> None:
        """Check orthonormality, symplecticity and column pairing."""
        a = self.matrix
        gram = a.T @ a - np.eye(2 * self.k)
        if np.abs(gram).max() > tol:
            raise ValueError(
                f"basis not orthonormal: |A^T A - I|_max = {np.abs(gram).max():.3e}"
            )
        jk = CanonicalForm(self.k).matrix()
        sympl = a.T @ self.J.apply(a) - jk
        if np.abs(sympl).max() > tol:
            raise ValueError(
                f"basis not symplectic: |A^T J A - J_2k|_max = {np.abs(sympl).max():.3e}"
            )
        pair = a[:, self.k:] - self.J.apply_transpose(a[:, : self.k])
        if np.abs(pair).max() != 0.0:
            raise ValueError("column pairing broken: column k+i must be J^T column i")


def symplectic_gram_schmidt(v, basis: OrthoSymplecticBasis | None,
                            tol: float = 1e-12) -> np.ndarray:
    """Orthogonalize ``v`` against an ortho-symplectic basis and normalize.

    Subtracts the (symplectic = Euclidean, for paired bases) projection twice
    for numerical re-orthogonalization.

    Raises
    ------
    DegenerateVector
        If the residual norm falls below ``tol * ||v||``; the caller is
        expected to skip the candidate.
    """
    v = np.asarray(v, dtype=float)
    norm_v = np.linalg.norm(v)
    if norm_v == 0.0:
        raise DegenerateVector("candidate vector is zero")
    r = v.copy()
    if basis is not None:
        for _ in range(2):
            r = r - basis.project(r)
    norm_r = np.linalg.norm(r)
    if norm_r < tol * norm_v:
        raise DegenerateVector(
            f"residual {norm_r:.3e} below {tol:.1e} * ||v|| = {tol * norm_v:.3e}"
        )
    return r / norm_r


@dataclass
class GreedyResult:
    basis: OrthoSymplecticBasis
    worst_errors: np.ndarray   # max projection error before each enrichment
    selected: list = field(default_factory=list)


def _projection_errors(basis: OrthoSymplecticBasis, states: np.ndarray) -> np.ndarray:
    resid = states - basis.project(states)
    return np.linalg.norm(resid, axis=0)


def greedy_basis(snapshots: SnapshotSet, max_pairs: int,
                 tol: float = 0.0) -> GreedyResult:
    """Greedy ortho-symplectic basis from trajectory snapshots.

    Starts from the normalized initial state, then repeatedly adds the
    snapshot with the worst projection error (earliest instant on ties),
    orthogonalized by :func:`symplectic_gram_schmidt`, together with its
    J^T partner. Stops when the worst error drops below ``tol`` or
    ``max_pairs`` pairs are reached. Degenerate candidates are skipped in
    favor of the next-worst instant.

    Returns
    -------
    GreedyResult
        Basis, the non-increasing history of worst projection errors, and
        the selected snapshot indices.
    """
    if max_pairs < 1:
        raise ValueError("max_pairs must be at least 1")
    z0 = snapshots.states[:, 0]
    norm0 = np.linalg.norm(z0)
    if norm0 == 0.0:
        raise ValueError(
            "first snapshot is zero; greedy initialization normalizes the "
            "initial state (use the cotangent lift for runs started at rest)"
        )
    basis = OrthoSymplecticBasis((z0 / norm0)[:, None])
    selected = [0]
    history = []
    while basis.k < max_pairs:
        errs = _projection_errors(basis, snapshots.states)
        worst = float(errs.max())
        history.append(worst)
        if worst <= tol:
            break
        # stable sort on negated errors: earliest instant wins ties
        order = np.argsort(-errs, kind="stable")
        enriched = False
        for idx in order:
            if errs[idx] <= tol:
                break
            try:
                e_new = symplectic_gram_schmidt(snapshots.states[:, idx], basis)
            except DegenerateVector:
                continue
            basis = OrthoSymplecticBasis(np.hstack([basis.lead, e_new[:, None]]))
            selected.append(int(idx))
            enriched = True
            break
        if not enriched:
            warnings.warn(
                "greedy stopped early: all remaining snapshots are degenerate",
                stacklevel=2,
            )
            break
    else:
        history.append(float(_projection_errors(basis, snapshots.states).max()))
    return GreedyResult(basis=basis, worst_errors=np.asarray(history),
                        selected=selected)


def cotangent_lift(snapshots: SnapshotSet, pairs: int):
    """Cotangent-lift basis: shared SVD factor for the q and p blocks.

    Stacks the q- and p-parts of all snapshots side by side, takes the
    ``pairs`` leading left singular vectors Phi and returns the (exactly
    ortho-symplectic) basis blockdiag(Phi, Phi).

    Returns
    -------
    (OrthoSymplecticBasis, ndarray)
        The basis and the full singular value sequence of the stacked block.
    """
    n = snapshots.dim // 2
    stacked = np.hstack([snapshots.states[:n], snapshots.states[n:]])
    u, s, _ = np.linalg.svd(stacked, full_matrices=False)
    rank = int(np.sum(s > s[0] * 1e-14)) if s.size else 0
    if pairs > rank:
        warnings.warn(
            f"requested {pairs} pairs but stacked snapshots have rank {rank}; "
            f"truncating", stacklevel=2,
        )
        pairs = rank
    if pairs < 1:
        raise ValueError("snapshot set has rank zero")
    lead = np.vstack([u[:, :pairs], np.zeros((n, pairs))])
    return OrthoSymplecticBasis(lead), s


def pod_basis(snapshots: SnapshotSet, modes: int):
    """Plain POD basis: leading left singular vectors of the snapshot matrix.

    No symplectic structure; reference baseline only.
    """
    u, s, _ = np.linalg.svd(snapshots.states, full_matrices=False)
    rank = int(np.sum(s > s[0] * 1e-14)) if s.size else 0
    if modes > rank:
        warnings.warn(
            f"requested {modes} POD modes but snapshots have rank {rank}; "
            f"truncating", stacklevel=2,
        )
        modes = rank
    if modes < 1:
        raise ValueError("snapshot set has rank zero")
    return u[:, :modes], s


def singular_value_report(snapshots: SnapshotSet, mode: str = "pod") -> np.ndarray:
    """Singular values of the snapshot matrix ("pod") or of the stacked
    q/p block used by the cotangent lift ("cotangent")."""
    if mode == "pod":
        return np.linalg.svd(snapshots.states, compute_uv=False)
    if mode == "cotangent":
        n = snapshots.dim // 2
        stacked = np.hstack([snapshots.states[:n], snapshots.states[n:]])
        return np.linalg.svd(stacked, compute_uv=False)
    raise ValueError(f"unknown singular value mode {mode!r}")


def random_ortho_symplectic(n: int, pairs: int, rng=None) -> OrthoSymplecticBasis:
    """Random ortho-symplectic basis, built by repeated Gram-Schmidt steps.

    Test helper; deterministic under a seeded ``rng``.
    """
    rng = np.random.default_rng(rng)
    basis = None
    attempts = 0
    while basis is None or basis.k < pairs:
        if attempts > 50 * pairs:
            raise RuntimeError("failed to draw independent random vectors")
        attempts += 1
        try:
            e_new = symplectic_gram_schmidt(rng.standard_normal(2 * n), basis)
        except DegenerateVector:
            continue
        lead = e_new[:, None] if basis is None else np.hstack([basis.lead, e_new[:, None]])
        basis = OrthoSymplecticBasis(lead)
    return basis
