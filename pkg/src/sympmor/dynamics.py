"""Dissipative Hamiltonian dynamics in time-dispersive form.

The model class evolves

    dz/dt = J (K^T f + g(z) - z_bd) + u,
    f + chi * integral_0^t f ds = K z,

where the auxiliary co-state f carries the memory of hidden bath modes; the
susceptibility chi is symmetric positive semidefinite. A trapezoid rule
discretizes the memory integral, and a Stoermer-Verlet scheme staggers the
kick/drift updates. With the memory tail split between the step endpoints
(start-of-step tail for the first kick and the first drift gradient,
end-of-step tail for the rest) the composite map is time symmetric and the
scheme is second order; a single shared tail drops it to first order.

The module also provides the plain dissipative form dz/dt = J grad H - R z + u
with a symmetrized Verlet scheme, and a classical RK4 loop, both used by
reference baselines.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .symplectic import CanonicalForm, SnapshotSet


class NonFiniteError(RuntimeError):
    """State or co-state left the range of floating point numbers."""

    def __init__(self, step: int, what: str = "state"):
        self.step = step
        super().__init__(f"{what} became non-finite at step {step}")


def _sym_deviation(m: np.ndarray) -> float:
    return float(np.abs(m - m.T).max())


def cholesky_factor(m: np.ndarray, name: str = "matrix") -> np.ndarray:
    """Upper-triangular factor L with L^T L = M, for symmetric PSD M.

    Raises ``np.linalg.LinAlgError`` naming the first failing pivot when M is
    not positive definite, and ``ValueError`` when M is not symmetric to
    1e-12 relative.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{name} must be square, got {m.shape}")
    scale = max(1.0, float(np.abs(m).max()))
    if _sym_deviation(m) > 1e-12 * scale:
        raise ValueError(f"{name} is not symmetric to 1e-12 relative")
    msym = 0.5 * (m + m.T)
    try:
        lower = np.linalg.cholesky(msym)
    except np.linalg.LinAlgError:
        # locate the smallest failing leading principal block for the message
        lo, hi = 1, m.shape[0]
        while lo < hi:
            mid = (lo + hi) // 2
            try:
                np.linalg.cholesky(msym[:mid, :mid])
                lo = mid + 1
            except np.linalg.LinAlgError:
                hi = mid
        raise np.linalg.LinAlgError(
            f"{name} is not positive definite: pivot {lo - 1} fails"
        ) from None
    return lower.T


def symmetric_sqrt(chi: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Symmetric PSD square root of a symmetric PSD matrix.

    Diagonal matrices take a fast path. Eigenvalues in [-tol*scale, 0) are
    treated as roundoff and clamped to zero; anything below that raises.
    """
    chi = np.asarray(chi, dtype=float)
    scale = max(1.0, float(np.abs(chi).max()))
    offdiag = chi - np.diag(np.diag(chi))
    if not offdiag.any():
        d = np.diag(chi).copy()
        if d.min() < -tol * scale:
            raise ValueError(
                f"susceptibility has negative eigenvalue {d.min():.3e}"
            )
        return np.diag(np.sqrt(np.clip(d, 0.0, None)))
    vals, vecs = np.linalg.eigh(0.5 * (chi + chi.T))
    if vals.min() < -tol * scale:
        raise ValueError(
            f"susceptibility has negative eigenvalue {vals.min():.3e}"
        )
    root = (vecs * np.sqrt(np.clip(vals, 0.0, None))) @ vecs.T
    return 0.5 * (root + root.T)


class TddSystem:
    """Time-dispersive-dissipative model on a 2n-dimensional phase space.

    Parameters
    ----------
    K : ndarray, shape (2n, 2n)
        Full-rank stiffness factor; the quadratic energy is 0.5 ||K z||^2.
    chi : ndarray, shape (2n, 2n)
        Symmetric PSD susceptibility acting on the memory integral of f.
    z0 : ndarray, shape (2n,)
        Initial state.
    nonlinear_grad, potential : callable, optional
        Gradient and value of an additional potential term. The gradient must
        not depend on the momentum block (the kick stages evaluate it at the
        start-of-stage momentum).
    input_vector : ndarray, optional
        Constant input u added to dz/dt; the associated supply rate is
        (K u)^T f.
    boundary_vector : ndarray, optional
        Constant z_bd subtracted inside the energy gradient (inhomogeneous
        boundary terms).
    dx : float
        Grid weight for L2 norms and the kinetic energy of PDE states.
    """

    def __init__(self, K, chi, z0, *, nonlinear_grad=None, potential=None,
                 input_vector=None, boundary_vector=None, dx: float = 1.0,
                 name: str = "", validate: bool = True):
        self.K = np.asarray(K, dtype=float)
        self.chi = np.asarray(chi, dtype=float)
        self.z0 = np.asarray(z0, dtype=float)
        if self.K.ndim != 2 or self.K.shape[0] != self.K.shape[1]:
            raise ValueError(f"K must be square, got {self.K.shape}")
        if self.K.shape[0] % 2:
            raise ValueError("phase space dimension must be even")
        self.dim = self.K.shape[0]
        self.n = self.dim // 2
        if self.chi.shape != self.K.shape:
            raise ValueError("chi must match K in shape")
        if self.z0.shape != (self.dim,):
            raise ValueError(f"z0 must have shape ({self.dim},)")
        self.nonlinear_grad = nonlinear_grad
        self.potential = potential
        self.input_vector = None if input_vector is None else np.asarray(
            input_vector, dtype=float)
        self.boundary_vector = None if boundary_vector is None else np.asarray(
            boundary_vector, dtype=float)
        self.dx = float(dx)
        self.name = name
        self.J = CanonicalForm(self.n)
        self._chi_diag = None
        offdiag = self.chi - np.diag(np.diag(self.chi))
        if not offdiag.any():
            self._chi_diag = np.diag(self.chi).copy()
        if validate:
            self.validate()

    # -- validation -------------------------------------------------------

    def validate(self) -> None:
        scale = max(1.0, float(np.abs(self.chi).max()))
        if _sym_deviation(self.chi) > 1e-12 * scale:
            raise ValueError("susceptibility must be symmetric to 1e-12 relative")
        root = symmetric_sqrt(self.chi)   # raises on eigenvalues < -1e-12*scale
        if np.abs(root @ root - self.chi).max() > 1e-10 * scale:
            raise ValueError("susceptibility square root check failed at 1e-10")
        sv = np.linalg.svd(self.K, compute_uv=False)
        if sv[-1] <= 1e-12 * sv[0]:
            cond = sv[-1] / sv[0] if sv[0] > 0.0 else 0.0
            raise ValueError(
                f"K is numerically rank deficient: sigma_min/sigma_max = "
                f"{cond:.3e}"
            )

    # -- building blocks ---------------------------------------------------

    def chi_apply(self, v):
        if self._chi_diag is not None:
            return (self._chi_diag * v.T).T
        return self.chi @ v

    def grad_extra(self, z):
        """Non-quadratic gradient terms: g(z) - z_bd."""
        out = None
        if self.nonlinear_grad is not None:
            out = np.asarray(self.nonlinear_grad(z), dtype=float)
        if self.boundary_vector is not None:
            out = -self.boundary_vector if out is None else out - self.boundary_vector
        return out

    def hamiltonian(self, z) -> float:
        """Energy 0.5 ||K z||^2 + potential(z) - z_bd . z."""
        kz = self.K @ z
        h = 0.5 * float(kz @ kz)
        if self.potential is not None:
            h += float(self.potential(z))
        if self.boundary_vector is not None:
            h -= float(self.boundary_vector @ z)
        return h

    def state_derivative(self, z, f):
        """dz/dt given the co-state: J (K^T f + g(z) - z_bd) + u."""
        force = self.K.T @ f
        extra = self.grad_extra(z)
        if extra is not None:
            force = force + extra
        dz = self.J.apply(force)
        if self.input_vector is not None:
            dz = dz + self.input_vector
        return dz

    def velocity(self, z, f):
        """q-block of dz/dt: the physical velocity of the coordinates."""
        return self.state_derivative(z, f)[: self.n]

    def kinetic_energy(self, z, f) -> float:
        v = self.velocity(z, f)
        return 0.5 * self.dx * float(v @ v)

    def supply_rate(self, z, f) -> float:
        """Instantaneous work rate of the input: (K u)^T f + (g(z) - z_bd)^T u.

        The second term vanishes without nonlinear/boundary terms; it is what
        the input feeds into the non-quadratic part of the energy.
        """
        if self.input_vector is None:
            return 0.0
        s = float((self.K @ self.input_vector) @ f)
        extra = self.grad_extra(z)
        if extra is not None:
            s += float(extra @ self.input_vector)
        return s

    def dissipation_rate(self, f) -> float:
        """f^T chi f >= 0; energy leaves the visible variables at this rate."""
        return float(f @ self.chi_apply(f))


class StringAccumulator:
    """Trapezoid bookkeeping of the memory integral of the co-state f.

    Tracks the running integral F = int_0^t f ds, the dissipated string
    energy int_0^t f^T chi f ds, and the input-work coordinate e with
    de/dt = -supply. ``tail`` is the part of the quadrature at the current
    node that excludes the current node's own contribution, i.e.
    F_{n-1} + (dt/2) f_{n-1}; the constraint at node n reads
    (I + (dt/2) chi) f_n = K z_n - chi tail_n.
    """

    def __init__(self, dim: int, dt: float):
        if dt <= 0.0:
            raise ValueError("dt must be positive")
        self.dim = dim
        self.dt = float(dt)
        self.t = 0.0
        self.steps = 0
        self.integral = np.zeros(dim)
        self.tail = np.zeros(dim)
        self.string_energy = 0.0
        self.work_coordinate = 0.0
        self.f = None
        self._diss = 0.0
        self._supply = 0.0

    @property
    def head_weight(self) -> float:
        """Quadrature weight of the current node: dt/2."""
        return 0.5 * self.dt

    def prime(self, f0, dissipation0: float, supply0: float) -> None:
        """Install the initial co-state; the node-0 tail stays zero."""
        if self.f is not None or self.steps:
            raise RuntimeError("accumulator already primed")
        self.f = np.asarray(f0, dtype=float).copy()
        self._diss = float(dissipation0)
        self._supply = float(supply0)

    def tail_next(self):
        """Tail of the next node: F_n + (dt/2) f_n."""
        if self.f is None:
            raise RuntimeError("accumulator not primed")
        return self.integral + self.head_weight * self.f

    def commit(self, f_new, dissipation_new: float, supply_new: float) -> None:
        """Advance one step: trapezoid updates of all three integrals."""
        if self.f is None:
            raise RuntimeError("accumulator not primed")
        f_new = np.asarray(f_new, dtype=float)
        w = self.head_weight
        self.tail = self.integral + w * self.f
        self.integral = self.tail + w * f_new
        self.string_energy += w * (self._diss + float(dissipation_new))
        self.work_coordinate -= w * (self._supply + float(supply_new))
        self.f = f_new.copy()
        self._diss = float(dissipation_new)
        self._supply = float(supply_new)
        self.steps += 1
        self.t = self.steps * self.dt


@dataclass
class ExtendedState:
    """State, co-state and memory bookkeeping at one time node."""

    z: np.ndarray
    accumulator: StringAccumulator

    @property
    def f(self):
        return self.accumulator.f

    @property
    def t(self) -> float:
        return self.accumulator.t


def solve_auxiliary(system: TddSystem, z, accumulator: StringAccumulator,
                    dt: float | None = None):
    """Co-state at the accumulator's current node:
    (I + (dt/2) chi) f = K z - chi tail.

    With an empty history this reduces to (I + (dt/2) chi)^{-1} K z.
    """
    if dt is None:
        dt = accumulator.dt
    elif abs(dt - accumulator.dt) > 1e-15 * accumulator.dt:
        raise ValueError("dt disagrees with the accumulator's step size")
    w = 0.5 * dt
    rhs = system.K @ z - system.chi_apply(accumulator.tail)
    if system._chi_diag is not None:
        return rhs / (1.0 + w * system._chi_diag)
    return np.linalg.solve(np.eye(system.dim) + w * system.chi, rhs)


class _LinearSolver:
    """Solve (I + (dt/2) chi) x = rhs, with a diagonal fast path."""

    def __init__(self, chi, chi_diag, w: float):
        if chi_diag is not None:
            self.diag = 1.0 + w * chi_diag
            self._cho = None
        else:
            self.diag = None
            dim = chi.shape[0]
            self._cho = scipy.linalg.cho_factor(np.eye(dim) + w * chi)

    def solve(self, rhs):
        if self.diag is not None:
            return (rhs.T / self.diag).T
        return scipy.linalg.cho_solve(self._cho, rhs)


class VerletStepper:
    """One Stoermer-Verlet step of the time-dispersive model.

    Stage pattern per step (w = dt/2, tails h_n / h_{n+1} as in
    :class:`StringAccumulator`):

    1. kick   p_h  from grad_q at (q_n, p_h) under tail h_n,
    2. drift  q_1  from grad_p averaged over (q_n, p_h | h_n) and
              (q_1, p_h | h_{n+1}),
    3. kick   p_1  from grad_q at (q_1, p_h) under tail h_{n+1},

    then the committed co-state solves the node-(n+1) constraint at
    (q_1, p_1 | h_{n+1}). Eliminating f from each stage gradient yields the
    effective quadratic form M = K^T (I + w chi)^{-1} K plus a tail-dependent
    constant; stages 1 and 2 are implicit only through the qp / pq blocks of
    M and are solved directly (explicitly when those blocks are zero).
    """

    def __init__(self, system: TddSystem, dt: float):
        if dt <= 0.0:
            raise ValueError("dt must be positive")
        self.system = system
        self.dt = float(dt)
        w = 0.5 * self.dt
        n = system.n
        self._w_solver = _LinearSolver(system.chi, system._chi_diag, w)
        wi_k = self._w_solver.solve(system.K)
        m = system.K.T @ wi_k
        m = 0.5 * (m + m.T)
        self.kt_wi = wi_k.T                       # K^T (I + w chi)^{-1}
        self.m_qq = m[:n, :n]
        self.m_qp = m[:n, n:]
        self.m_pq = m[n:, :n]
        self.m_pp = m[n:, n:]
        cross = max(np.abs(self.m_qp).max(), np.abs(self.m_pq).max())
        self._explicit = cross == 0.0
        if not self._explicit:
            self._lu_kick = scipy.linalg.lu_factor(np.eye(n) + w * self.m_qp)
            self._lu_drift = scipy.linalg.lu_factor(np.eye(n) - w * self.m_pq)
        u = system.input_vector
        self.u_q = u[:n] if u is not None else None
        self.u_p = u[n:] if u is not None else None

    def _tail_const(self, tail):
        """Constant gradient contribution -K^T (I+w chi)^{-1} chi tail."""
        return -(self.kt_wi @ self.system.chi_apply(tail))

    def step(self, state: ExtendedState):
        """Advance one step; returns the new state and K z at the new node
        (reused by diagnostics, exact by construction of the commit)."""
        sys_, dt = self.system, self.dt
        w = 0.5 * dt
        n = sys_.n
        acc = state.accumulator
        z = state.z
        q, p = z[:n], z[n:]

        tail_start = acc.tail
        tail_end = acc.tail_next()
        chi_tail_end = sys_.chi_apply(tail_end)
        cs = self._tail_const(tail_start)
        ce = -(self.kt_wi @ chi_tail_end)
        extra = sys_.grad_extra(z)

        # kick under the start-of-step tail
        rhs = p - w * (self.m_qq @ q + cs[:n])
        if extra is not None:
            rhs = rhs - w * extra[:n]
        if self.u_p is not None:
            rhs = rhs + w * self.u_p
        if self._explicit:
            p_half = rhs
        else:
            p_half = scipy.linalg.lu_solve(self._lu_kick, rhs)

        # drift averaging the two tail flavors; the extra gradient is
        # momentum-independent by contract, so its p-block enters twice
        rhs = q + w * (2.0 * (self.m_pp @ p_half) + cs[n:] + ce[n:])
        if extra is not None:
            rhs = rhs + dt * extra[n:]
        if not self._explicit:
            rhs = rhs + w * (self.m_pq @ q)
        if self.u_q is not None:
            rhs = rhs + dt * self.u_q
        if self._explicit:
            q_new = rhs
        else:
            q_new = scipy.linalg.lu_solve(self._lu_drift, rhs)

        # second kick under the end-of-step tail
        extra2 = sys_.grad_extra(np.concatenate([q_new, p_half]))
        grad_q = self.m_qq @ q_new + ce[:n]
        if extra2 is not None:
            grad_q = grad_q + extra2[:n]
        if not self._explicit:
            grad_q = grad_q + self.m_qp @ p_half
        p_new = p_half - w * grad_q
        if self.u_p is not None:
            p_new = p_new + w * self.u_p

        z_new = np.concatenate([q_new, p_new])
        kz_new = sys_.K @ z_new
        f_new = self._w_solver.solve(kz_new - chi_tail_end)
        acc.commit(f_new, sys_.dissipation_rate(f_new),
                   sys_.supply_rate(z_new, f_new))
        return ExtendedState(z=z_new, accumulator=acc), kz_new


@dataclass
class RunReport:
    """Time series and snapshots from one integration run."""

    times: np.ndarray
    hamiltonian: np.ndarray
    string_energy: np.ndarray
    extended_energy: np.ndarray
    passivity_residual: np.ndarray
    snapshots: SnapshotSet
    derivatives: np.ndarray        # dz/dt columns, aligned with snapshots
    volterra_max: float
    kz_max: float
    dt: float
    n_steps: int
    wall_seconds: float
    kind: str = "tdd"
    costates: np.ndarray | None = None   # f columns, aligned with snapshots
    extra: dict = field(default_factory=dict)

    @property
    def snapshot_times(self):
        return self.snapshots.times

    def kinetic_series(self, dx: float | None = None):
        """0.5 dx ||dq/dt||^2 on the snapshot grid."""
        if dx is None:
            dx = self.snapshots.dx
        n = self.derivatives.shape[0] // 2
        v = self.derivatives[:n]
        return 0.5 * dx * np.sum(v * v, axis=0)


def initial_extended_state(system: TddSystem, dt: float) -> ExtendedState:
    """Initial state with the empty-history co-state installed."""
    acc = StringAccumulator(system.dim, dt)
    f0 = solve_auxiliary(system, system.z0, acc)
    acc.prime(f0, system.dissipation_rate(f0),
              system.supply_rate(system.z0, f0))
    return ExtendedState(z=system.z0.copy(), accumulator=acc)


def extended_hamiltonian(system: TddSystem, state: ExtendedState) -> float:
    """Total energy of the closed extension at the state's node.

    The system part enters through the co-state (0.5 ||f||^2 plus the
    non-quadratic terms), the strings through the accumulated dissipation
    integral, and input work through the autonomization coordinate. The
    value is conserved along the discrete flow and equals H(z0) at t=0
    whenever chi annihilates K z0 (strings at rest).
    """
    acc = state.accumulator
    nonquad = 0.0
    if system.potential is not None:
        nonquad += float(system.potential(state.z))
    if system.boundary_vector is not None:
        nonquad -= float(system.boundary_vector @ state.z)
    return (0.5 * float(acc.f @ acc.f) + nonquad
            + acc.string_energy + acc.work_coordinate)


def passivity_residual(system: TddSystem, state: ExtendedState,
                       dh_dt: float) -> float:
    """Stored-power balance dH/dt - supply at the state's node.

    ``dh_dt`` is the caller's estimate of the stored-energy derivative
    (finite differences of 0.5 ||f||^2, say). Nonpositive along a passive
    trajectory; the analytic value is -f^T chi f.
    """
    return float(dh_dt) - system.supply_rate(state.z, state.f)


def _resolve_steps(dt: float, n_steps: int | None, t_final: float | None) -> int:
    if (n_steps is None) == (t_final is None):
        raise ValueError("specify exactly one of n_steps and t_final")
    if n_steps is None:
        n_steps = int(round(t_final / dt))
    if n_steps < 0:
        raise ValueError("step count must be nonnegative")
    # n_steps == 0 yields a report holding the initial instant only
    return n_steps


def integrate(system: TddSystem, dt: float, n_steps: int | None = None,
              t_final: float | None = None, snapshot_stride: int = 1,
              check_finite_every: int = 1) -> RunReport:
    """Integrate the time-dispersive model and collect diagnostics.

    Records the visible energy H, the string energy, the conserved extended
    energy 0.5 ||f||^2 + potential(z) - z_bd . z + E_string + e, and the
    passivity residual dH_ext/dt - 0 = -f^T chi f <= 0 linking visible energy
    decay to the strings. Snapshots (state and dz/dt) are stored every
    ``snapshot_stride`` steps.

    Raises
    ------
    NonFiniteError
        When the state leaves floating point range; the exception names the
        offending step.
    """
    n_steps = _resolve_steps(dt, n_steps, t_final)
    if snapshot_stride < 1:
        raise ValueError("snapshot_stride must be at least 1")
    t0 = time.perf_counter()
    stepper = VerletStepper(system, dt)
    state = initial_extended_state(system, dt)
    acc = state.accumulator

    times = dt * np.arange(n_steps + 1)
    ham = np.empty(n_steps + 1)
    e_str = np.empty(n_steps + 1)
    h_ext = np.empty(n_steps + 1)
    passiv = np.empty(n_steps + 1)
    snap_idx = list(range(0, n_steps + 1, snapshot_stride))
    snaps = np.empty((system.dim, len(snap_idx)))
    derivs = np.empty((system.dim, len(snap_idx)))
    costates = np.empty((system.dim, len(snap_idx)))
    snap_cursor = 0
    volterra_max = 0.0
    kz_max = 0.0

    def record(i, kz):
        nonlocal snap_cursor, kz_max
        f = acc.f
        nonquad = 0.0
        if system.potential is not None:
            nonquad += float(system.potential(state.z))
        if system.boundary_vector is not None:
            nonquad -= float(system.boundary_vector @ state.z)
        ham[i] = 0.5 * float(kz @ kz) + nonquad
        e_str[i] = acc.string_energy
        h_ext[i] = (0.5 * float(f @ f) + nonquad
                    + acc.string_energy + acc.work_coordinate)
        passiv[i] = -system.dissipation_rate(f)
        kz_max = max(kz_max, float(np.abs(kz).max()))
        if snap_cursor < len(snap_idx) and snap_idx[snap_cursor] == i:
            snaps[:, snap_cursor] = state.z
            derivs[:, snap_cursor] = system.state_derivative(state.z, f)
            costates[:, snap_cursor] = f
            snap_cursor += 1

    kz = system.K @ state.z
    record(0, kz)
    resid0 = kz - (acc.f + 0.5 * dt * system.chi_apply(acc.f))
    volterra_max = float(np.abs(resid0).max())

    for i in range(1, n_steps + 1):
        state, kz = stepper.step(state)
        # discrete memory constraint at the new node: f + chi F = K z
        resid = kz - (acc.f + system.chi_apply(acc.tail + acc.head_weight * acc.f))
        volterra_max = max(volterra_max, float(np.abs(resid).max()))
        record(i, kz)
        if i % check_finite_every == 0 or i == n_steps:
            if not np.isfinite(state.z).all():
                raise NonFiniteError(i)

    return RunReport(
        times=times, hamiltonian=ham, string_energy=e_str, extended_energy=h_ext,
        passivity_residual=passiv,
        snapshots=SnapshotSet(times=times[snap_idx], states=snaps, dx=system.dx),
        derivatives=derivs, volterra_max=volterra_max, kz_max=kz_max,
        dt=dt, n_steps=n_steps, wall_seconds=time.perf_counter() - t0,
        kind="tdd", costates=costates,
    )


# -- plain dissipative form (reference baselines) ---------------------------


class DissipativeModel:
    """Plain dissipative form dz/dt = J grad H(z) - R z + u with
    H(z) = 0.5 z^T S z + potential(z) - z_bd . z."""

    def __init__(self, stiffness, drift=None, z0=None, *, nonlinear_grad=None,
                 potential=None, input_vector=None, boundary_vector=None,
                 dx: float = 1.0, name: str = ""):
        self.stiffness = np.asarray(stiffness, dtype=float)
        dim = self.stiffness.shape[0]
        if self.stiffness.shape != (dim, dim) or dim % 2:
            raise ValueError(f"stiffness must be square even-dim, got {self.stiffness.shape}")
        scale = max(1.0, float(np.abs(self.stiffness).max()))
        if _sym_deviation(self.stiffness) > 1e-10 * scale:
            raise ValueError("stiffness must be symmetric")
        self.stiffness = 0.5 * (self.stiffness + self.stiffness.T)
        self.drift = None if drift is None else np.asarray(drift, dtype=float)
        if self.drift is not None and self.drift.shape != (dim, dim):
            raise ValueError("drift must match stiffness in shape")
        self.z0 = np.zeros(dim) if z0 is None else np.asarray(z0, dtype=float)
        self.dim = dim
        self.n = dim // 2
        self.nonlinear_grad = nonlinear_grad
        self.potential = potential
        self.input_vector = None if input_vector is None else np.asarray(
            input_vector, dtype=float)
        self.boundary_vector = None if boundary_vector is None else np.asarray(
            boundary_vector, dtype=float)
        self.dx = float(dx)
        self.name = name
        self.J = CanonicalForm(self.n)

    def grad_extra(self, z):
        out = None
        if self.nonlinear_grad is not None:
            out = np.asarray(self.nonlinear_grad(z), dtype=float)
        if self.boundary_vector is not None:
            out = -self.boundary_vector if out is None else out - self.boundary_vector
        return out

    def hamiltonian(self, z) -> float:
        h = 0.5 * float(z @ (self.stiffness @ z))
        if self.potential is not None:
            h += float(self.potential(z))
        if self.boundary_vector is not None:
            h -= float(self.boundary_vector @ z)
        return h

    def state_derivative(self, z):
        grad = self.stiffness @ z
        extra = self.grad_extra(z)
        if extra is not None:
            grad = grad + extra
        dz = self.J.apply(grad)
        if self.drift is not None:
            dz = dz - self.drift @ z
        if self.input_vector is not None:
            dz = dz + self.input_vector
        return dz

    def linear_operator(self) -> np.ndarray:
        """Dense J S - R, the generator of the linear part of the flow."""
        op = self.J.matrix() @ self.stiffness
        if self.drift is not None:
            op = op - self.drift
        return op


class DissipativeVerletStepper:
    """Stoermer-Verlet for the plain dissipative form.

    The drift -R z is folded into the stages so that the step stays
    time-symmetric: the first kick is implicit in the new half-momentum,
    the final kick is its adjoint (fully explicit at the half-momentum),
    and the position update is trapezoidal. Symmetry keeps second order;
    the kick and drift solves are precomputed LU factorizations.
    """

    def __init__(self, model: DissipativeModel, dt: float):
        self.model = model
        self.dt = float(dt)
        w = 0.5 * self.dt
        n = model.n
        s = model.stiffness
        self.s_qq, self.s_qp = s[:n, :n], s[:n, n:]
        self.s_pq, self.s_pp = s[n:, :n], s[n:, n:]
        if model.drift is not None:
            d = model.drift
            self.d_qq, self.d_qp = d[:n, :n], d[:n, n:]
            self.d_pq, self.d_pp = d[n:, :n], d[n:, n:]
        else:
            zero = np.zeros((n, n))
            self.d_qq = self.d_qp = self.d_pq = self.d_pp = zero
        self.a_kick = self.s_qp + self.d_pp
        a_drift = self.s_pq - self.d_qq
        self._kick_explicit = not self.a_kick.any()
        self._drift_explicit = not a_drift.any()
        if not self._kick_explicit:
            self._lu_kick = scipy.linalg.lu_factor(np.eye(n) + w * self.a_kick)
        if not self._drift_explicit:
            self._lu_drift = scipy.linalg.lu_factor(np.eye(n) - w * a_drift)
        u = model.input_vector
        self.u_q = u[:n] if u is not None else None
        self.u_p = u[n:] if u is not None else None

    def step(self, z):
        m, dt = self.model, self.dt
        w = 0.5 * dt
        n = m.n
        q, p = z[:n], z[n:]
        extra = m.grad_extra(z)
        eq = extra[:n] if extra is not None else 0.0
        ep = extra[n:] if extra is not None else 0.0

        rhs = p - w * ((self.s_qq + self.d_pq) @ q + eq)
        if self.u_p is not None:
            rhs = rhs + w * self.u_p
        p_half = rhs if self._kick_explicit else scipy.linalg.lu_solve(self._lu_kick, rhs)

        rhs = q + w * ((self.s_pq - self.d_qq) @ q
                       + 2.0 * ((self.s_pp - self.d_qp) @ p_half) + 2.0 * ep)
        if self.u_q is not None:
            rhs = rhs + dt * self.u_q
        q_new = rhs if self._drift_explicit else scipy.linalg.lu_solve(self._lu_drift, rhs)

        z_mid = np.concatenate([q_new, p_half])
        extra2 = m.grad_extra(z_mid)
        eq2 = extra2[:n] if extra2 is not None else 0.0
        p_new = p_half - w * ((self.s_qq + self.d_pq) @ q_new
                              + self.a_kick @ p_half + eq2)
        if self.u_p is not None:
            p_new = p_new + w * self.u_p
        return np.concatenate([q_new, p_new])


def integrate_dissipative(model: DissipativeModel, dt: float,
                          n_steps: int | None = None,
                          t_final: float | None = None,
                          snapshot_stride: int = 1) -> RunReport:
    """Integrate the plain dissipative form with the symmetrized Verlet
    scheme. String and extended energies are not defined for this
    formulation and are reported as zero / equal to H."""
    n_steps = _resolve_steps(dt, n_steps, t_final)
    t0 = time.perf_counter()
    stepper = DissipativeVerletStepper(model, dt)
    z = model.z0.copy()
    times = dt * np.arange(n_steps + 1)
    ham = np.empty(n_steps + 1)
    snap_idx = list(range(0, n_steps + 1, snapshot_stride))
    snaps = np.empty((model.dim, len(snap_idx)))
    derivs = np.empty((model.dim, len(snap_idx)))
    cursor = 0
    for i in range(n_steps + 1):
        if i:
            z = stepper.step(z)
            if i % 10 == 0 and not np.isfinite(z).all():
                raise NonFiniteError(i)
        ham[i] = model.hamiltonian(z)
        if cursor < len(snap_idx) and snap_idx[cursor] == i:
            snaps[:, cursor] = z
            derivs[:, cursor] = model.state_derivative(z)
            cursor += 1
    if not np.isfinite(z).all():
        raise NonFiniteError(n_steps)
    zeros = np.zeros(n_steps + 1)
    return RunReport(
        times=times, hamiltonian=ham, string_energy=zeros,
        extended_energy=ham.copy(), passivity_residual=zeros,
        snapshots=SnapshotSet(times=times[snap_idx], states=snaps, dx=model.dx),
        derivatives=derivs, volterra_max=0.0, kz_max=0.0,
        dt=dt, n_steps=n_steps, wall_seconds=time.perf_counter() - t0,
        kind="dissipative",
    )


def integrate_rk4(rhs, z0, dt: float, n_steps: int | None = None,
                  t_final: float | None = None, snapshot_stride: int = 1,
                  dx: float = 1.0, hamiltonian=None) -> RunReport:
    """Classical fourth-order Runge-Kutta loop for an arbitrary autonomous
    right-hand side. Used by the unstructured POD baseline."""
    n_steps = _resolve_steps(dt, n_steps, t_final)
    t0 = time.perf_counter()
    z = np.asarray(z0, dtype=float).copy()
    dim = z.shape[0]
    times = dt * np.arange(n_steps + 1)
    ham = np.zeros(n_steps + 1)
    snap_idx = list(range(0, n_steps + 1, snapshot_stride))
    snaps = np.empty((dim, len(snap_idx)))
    derivs = np.empty((dim, len(snap_idx)))
    cursor = 0
    for i in range(n_steps + 1):
        if i:
            k1 = rhs(z)
            k2 = rhs(z + 0.5 * dt * k1)
            k3 = rhs(z + 0.5 * dt * k2)
            k4 = rhs(z + dt * k3)
            z = z + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            if not np.isfinite(z).all():
                raise NonFiniteError(i)
        if hamiltonian is not None:
            ham[i] = hamiltonian(z)
        if cursor < len(snap_idx) and snap_idx[cursor] == i:
            snaps[:, cursor] = z
            derivs[:, cursor] = rhs(z)
            cursor += 1
    zeros = np.zeros(n_steps + 1)
    return RunReport(
        times=times, hamiltonian=ham, string_energy=zeros,
        extended_energy=ham.copy(), passivity_residual=zeros,
        snapshots=SnapshotSet(times=times[snap_idx], states=snaps, dx=dx),
        derivatives=derivs, volterra_max=0.0, kz_max=0.0,
        dt=dt, n_steps=n_steps, wall_seconds=time.perf_counter() - t0,
        kind="rk4",
    )
