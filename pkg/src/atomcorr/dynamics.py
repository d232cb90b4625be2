"""Hamiltonian, Liouvillian and steady state of the driven atom chain.

Vectorization is column stacking, vec(A rho B) = (B^T kron A) vec(rho), so the
diagonal element rho_mm sits at index m * (D + 1).
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.integrate import solve_ivp

from .couplings import CouplingMatrices, couplings_for
from .quantum import Interaction, LevelScheme, SystemSpec, local_operator

log = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-10
UNIQUENESS_TOL = 1e-8
# superoperators with D^2 above this are assembled and solved sparse
DENSE_MAX = 1024


class SteadyStateError(RuntimeError):
    pass


class NonUniqueSteadyState(SteadyStateError):
    def __init__(self, null_space_dim: int, singular_values=None):
        super().__init__(f"steady state is not unique (null space dimension {null_space_dim})")
        self.null_space_dim = null_space_dim
        self.singular_values = singular_values


class Solver(enum.Enum):
    TRACE_ROW_REPLACEMENT = "TraceRowReplacement"
    NULL_SPACE_SVD = "NullSpaceSVD"
    TIME_INTEGRATION = "TimeIntegration"


@dataclass(frozen=True)
class Superoperator:
    matrix: object  # ndarray or scipy.sparse.csr_matrix
    dim: int  # Hilbert-space dimension D

    @property
    def sparse(self) -> bool:
        return sp.issparse(self.matrix)

    def apply(self, rho: np.ndarray) -> np.ndarray:
        out = self.matrix @ rho.reshape(-1, order="F")
        return np.asarray(out).reshape(self.dim, self.dim, order="F")

    def dense(self) -> np.ndarray:
        return self.matrix.toarray() if self.sparse else np.asarray(self.matrix)


@dataclass(frozen=True)
class SteadyStateReport:
    rho: np.ndarray
    residual: float
    null_space_dim: int
    solver: Solver
    uniqueness_gap: float | None = None


def _embedded(spec: SystemSpec, alpha: str, beta: str, sparse: bool):
    """List of A_{alpha beta}^{(i)} for i = 1..N."""
    d, n = spec.local_dim, spec.n_atoms
    op = local_operator(spec.scheme, alpha, beta)
    out = []
    for i in range(n):
        left, right = d**i, d ** (n - i - 1)
        if sparse:
            m = sp.kron(sp.kron(sp.identity(left, format="csr"), sp.csr_matrix(op)), sp.identity(right, format="csr"))
            out.append(sp.csr_matrix(m, dtype=complex))
        else:
            out.append(np.kron(np.kron(np.eye(left), op), np.eye(right)).astype(complex))
    return out


def _check_consistency(spec: SystemSpec, couplings: CouplingMatrices):
    n = spec.n_atoms
    if couplings.gamma.shape != (n, n):
        raise ValueError(f"coupling matrices are {couplings.gamma.shape}, spec has {n} atoms")
    off = ~np.eye(n, dtype=bool)
    if spec.scheme is LevelScheme.TWO_LEVEL and np.any(couplings.v[off] != 0):
        raise ValueError("Rydberg couplings given for a two-level scheme")
    ddi = np.any(couplings.omega[off] != 0) or np.any(couplings.gamma[off] != 0)
    if spec.interaction is Interaction.RRI and ddi:
        raise ValueError("dipole-dipole couplings given for a Rydberg-interacting spec")


def build_hamiltonian(spec: SystemSpec, couplings: CouplingMatrices | None = None, sparse: bool = False):
    """V / hbar in units of gamma_p (resonant drives, interaction picture)."""
    if couplings is None:
        couplings = couplings_for(spec)
    _check_consistency(spec, couplings)
    n = spec.n_atoms
    eg = _embedded(spec, "e", "g", sparse)
    ge = _embedded(spec, "g", "e", sparse)
    H = sp.csr_matrix((spec.dim, spec.dim), dtype=complex) if sparse else np.zeros((spec.dim, spec.dim), complex)
    for i in range(n):
        H = H + spec.omega_p * (eg[i] + ge[i])
    if spec.scheme is LevelScheme.THREE_LEVEL_LADDER:
        re = _embedded(spec, "r", "e", sparse)
        er = _embedded(spec, "e", "r", sparse)
        rr = _embedded(spec, "r", "r", sparse)
        for i in range(n):
            H = H + spec.omega_c * (re[i] + er[i])
        for i in range(n):
            for j in range(n):
                if i != j and couplings.v[i, j] != 0:
                    H = H + couplings.v[i, j] * (rr[i] @ rr[j])
    for i in range(n):
        for j in range(n):
            if i != j and couplings.omega[i, j] != 0:
                H = H - couplings.omega[i, j] * (eg[i] @ ge[j])
    return H


def build_liouvillian(spec: SystemSpec, couplings: CouplingMatrices | None = None, sparse: bool | None = None) -> Superoperator:
    if couplings is None:
        couplings = couplings_for(spec)
    D = spec.dim
    if sparse is None:
        sparse = D * D > DENSE_MAX
    H = build_hamiltonian(spec, couplings, sparse=sparse)
    eg = _embedded(spec, "e", "g", sparse)
    ge = _embedded(spec, "g", "e", sparse)
    if sparse:
        eye = sp.identity(D, dtype=complex, format="csr")
        kron = lambda a, b: sp.kron(a, b, format="csr")  # noqa: E731
    else:
        eye = np.eye(D, dtype=complex)
        kron = np.kron

    def sandwich(a, b):
        # a rho b
        return kron(b.T, a)

    L = -1j * (kron(eye, H) - kron(H.T, eye))
    n = spec.n_atoms
    K = 0 * eye
    for i in range(n):
        for j in range(n):
            g = couplings.gamma[i, j]
            if g == 0:
                continue
            K = K + g * (eg[i] @ ge[j])
            L = L + g * sandwich(ge[j], eg[i])
    L = L - 0.5 * (kron(eye, K) + kron(K.T, eye))
    if spec.scheme is LevelScheme.THREE_LEVEL_LADDER and spec.gamma_c > 0:
        er = _embedded(spec, "e", "r", sparse)
        re = _embedded(spec, "r", "e", sparse)
        rr = _embedded(spec, "r", "r", sparse)
        for i in range(n):
            L = L - 0.5 * spec.gamma_c * (kron(eye, rr[i]) + kron(rr[i].T, eye) - 2 * sandwich(er[i], re[i]))
    if sparse:
        L = sp.csr_matrix(L)
        L.eliminate_zeros()
    return Superoperator(L, D)


def lindblad_rhs(spec: SystemSpec, couplings: CouplingMatrices, rho: np.ndarray) -> np.ndarray:
    """d rho / dt evaluated term by term with matrix products (no vectorization)."""
    return _ProductRhs(spec, couplings)(0.0, rho.ravel()).reshape(rho.shape)


def _hermitize(rho: np.ndarray) -> np.ndarray:
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.trace(rho).real


def _residual(L: Superoperator, rho: np.ndarray) -> float:
    return float(np.linalg.norm(L.matrix @ rho.reshape(-1, order="F")))


def _trace_row_system(L: Superoperator):
    D = L.dim
    diag = np.arange(D) * (D + 1)
    if L.sparse:
        A = sp.lil_matrix(L.matrix)
        A[0, :] = 0
        A[0, diag] = 1.0
        A = sp.csc_matrix(A)
    else:
        A = np.array(L.matrix, dtype=complex)
        A[0, :] = 0
        A[0, diag] = 1.0
    b = np.zeros(D * D, dtype=complex)
    b[0] = 1.0
    return A, b


def _null_space_svd(L: Superoperator):
    M = L.dense()
    _, s, vh = scipy.linalg.svd(M)
    null_dim = int(np.sum(s < UNIQUENESS_TOL))
    return vh, s, null_dim


def _from_vector(x: np.ndarray, D: int) -> np.ndarray:
    return x.reshape(D, D, order="F")


def steady_state(L: Superoperator, check_uniqueness: bool = True) -> SteadyStateReport:
    """Unique trace-one kernel element of the Liouvillian.

    The trace functional replaces the rho_00 row of L; the result is unique
    iff the modified matrix is non-singular.  Dense systems additionally get
    a full SVD so the null-space dimension is reported exactly.
    """
    D = L.dim
    A, b = _trace_row_system(L)
    solver = Solver.TRACE_ROW_REPLACEMENT
    gap = None
    null_dim = 1
    if L.sparse:
        try:
            # AT+A minimum degree keeps the fill-in of the D=81 ladder chain ~2x below COLAMD
            lu = spla.splu(A, permc_spec="MMD_AT_PLUS_A")
            x = lu.solve(b)
        except RuntimeError as exc:  # "Factor is exactly singular"
            raise SteadyStateError(f"sparse LU of the Liouvillian failed: {exc}") from exc
        if check_uniqueness:
            inv = spla.LinearOperator(A.shape, matvec=lu.solve, rmatvec=lambda y: lu.solve(y, trans="H"), dtype=complex)
            gap = 1.0 / spla.onenormest(inv)
            if gap < UNIQUENESS_TOL:
                raise NonUniqueSteadyState(2)
    else:
        if check_uniqueness:
            vh, s, null_dim = _null_space_svd(L)
            gap = float(s[-2]) if len(s) > 1 else float("inf")
            if null_dim > 1:
                raise NonUniqueSteadyState(null_dim, s)
        try:
            x = np.linalg.solve(A, b)
        except np.linalg.LinAlgError:
            log.info("trace-row system singular, falling back to SVD null space")
            if not check_uniqueness:
                vh, s, null_dim = _null_space_svd(L)
                if null_dim > 1:
                    raise NonUniqueSteadyState(null_dim, s)
            x = vh[-1].conj()
            solver = Solver.NULL_SPACE_SVD
    rho = _from_vector(x, D)
    if not np.all(np.isfinite(rho)) or abs(np.trace(rho)) < 1e-300:
        raise SteadyStateError("linear solve produced a non-finite state")
    rho = _hermitize(rho)
    res = _residual(L, rho)
    if res > RESIDUAL_TOL:
        raise SteadyStateError(f"steady-state residual {res:.3e} exceeds {RESIDUAL_TOL:.0e}")
    return SteadyStateReport(rho, res, null_dim, solver, gap)


def integrate_to_steady_state(
    spec: SystemSpec,
    couplings: CouplingMatrices | None = None,
    tol: float = 1e-12,
    chunk: float = 50.0,
    max_time: float = 1e6,
    rtol: float = 1e-12,
    atol: float = 1e-14,
) -> SteadyStateReport:
    """Propagate the master equation from the ground state until ||d rho/dt|| < tol.

    Adaptive Runge-Kutta (DOP853) on the matrix-product right-hand side;
    intended as an independent check of :func:`steady_state`.
    """
    if couplings is None:
        couplings = couplings_for(spec)
    D = spec.dim
    rhs_fn = _ProductRhs(spec, couplings)
    rho = np.zeros((D, D), complex)
    rho[0, 0] = 1.0
    y = rho.ravel()
    t = 0.0
    while True:
        deriv = np.linalg.norm(rhs_fn(0.0, y))
        if deriv < tol:
            break
        if t >= max_time:
            raise SteadyStateError(f"time integration did not converge by t={t} (|drho/dt|={deriv:.2e})")
        sol = solve_ivp(rhs_fn, (t, t + chunk), y, method="DOP853", rtol=rtol, atol=atol)
        if not sol.success:
            raise SteadyStateError(f"time integration failed: {sol.message}")
        y = sol.y[:, -1]
        t += chunk
    rho = y.reshape(D, D)
    L = build_liouvillian(spec, couplings, sparse=False)
    return SteadyStateReport(rho, _residual(L, rho), 1, Solver.TIME_INTEGRATION)


class _ProductRhs:
    """Flattened matrix-product RHS with the operators built once."""

    def __init__(self, spec, couplings):
        self.D = spec.dim
        self.H = build_hamiltonian(spec, couplings)
        n = spec.n_atoms
        eg = _embedded(spec, "e", "g", False)
        ge = _embedded(spec, "g", "e", False)
        self.terms = [
            (0.5 * couplings.gamma[i, j], eg[i], ge[j])
            for i in range(n)
            for j in range(n)
            if couplings.gamma[i, j] != 0
        ]
        if spec.scheme is LevelScheme.THREE_LEVEL_LADDER and spec.gamma_c > 0:
            re = _embedded(spec, "r", "e", False)
            er = _embedded(spec, "e", "r", False)
            self.terms += [(0.5 * spec.gamma_c, re[i], er[i]) for i in range(n)]

    def __call__(self, t, y):
        rho = y.reshape(self.D, self.D)
        out = -1j * (self.H @ rho - rho @ self.H)
        for rate, a, b in self.terms:
            # rate * (2 b rho a - a b rho - rho a b); linear in rho, so valid for any matrix
            br = b @ rho
            out -= rate * (a @ br + (rho @ a) @ b - 2 * br @ a)
        return out.ravel()


def solve(spec: SystemSpec, couplings: CouplingMatrices | None = None) -> SteadyStateReport:
    """Couplings, Liouvillian and steady state for ``spec`` in one call."""
    if couplings is None:
        couplings = couplings_for(spec)
    return steady_state(build_liouvillian(spec, couplings))
