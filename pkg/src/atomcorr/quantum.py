"""Operator algebra on the tensor-product space of N atoms.

Basis convention: atom 1 is the most significant tensor factor and the local
levels are ordered (g, e, r).  All rates are in units of the lower-transition
decay rate gamma_p and all lengths in units of the probe wavelength lambda_p.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from functools import reduce

import numpy as np


class LevelScheme(enum.Enum):
    TWO_LEVEL = ("g", "e")
    THREE_LEVEL_LADDER = ("g", "e", "r")

    @property
    def levels(self) -> tuple[str, ...]:
        return self.value

    @property
    def local_dim(self) -> int:
        return len(self.value)

    def index(self, level: str) -> int:
        try:
            return self.value.index(level)
        except ValueError:
            raise ValueError(f"level {level!r} not in scheme {self.name} {self.value}") from None


class Interaction(enum.Enum):
    NONE = "none"
    DDI = "ddi"
    RRI = "rri"


@dataclass(frozen=True)
class RydbergCoupling:
    """How the van-der-Waals shift V_ij is fixed.

    ``v_nn`` (dimensionless mode) is the coupling at separation ``r_nn``, in
    units of gamma_p.  Physical mode instead takes C6 in GHz um^6 (the 2*pi is
    implied, i.e. C6 = 2*pi * c6 GHz um^6), the probe wavelength in um and the
    decay rate gamma_p in 1/s.
    """

    v_nn: float | None = None
    r_nn: float | None = None
    c6: float | None = None
    lambda_p_um: float | None = None
    gamma_p_per_s: float | None = None

    @property
    def physical(self) -> bool:
        return self.c6 is not None


@dataclass(frozen=True)
class SystemSpec:
    n_atoms: int
    scheme: LevelScheme
    positions: tuple
    omega_p: float
    omega_c: float = 0.0
    gamma_c: float = 0.0
    interaction: Interaction = Interaction.NONE
    rydberg: RydbergCoupling | None = None
    dipole: tuple[float, float, float] | None = None

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float)
        if pos.ndim == 1:
            pos = pos[:, None]
        if pos.ndim == 2 and pos.shape[1] < 3:
            pos = np.hstack([pos, np.zeros((len(pos), 3 - pos.shape[1]))])
        object.__setattr__(self, "positions", tuple(tuple(float(c) for c in row) for row in pos))
        if self.dipole is not None:
            object.__setattr__(self, "dipole", tuple(float(c) for c in self.dipole))
        self.validate()

    def validate(self):
        if int(self.n_atoms) != self.n_atoms or self.n_atoms < 1:
            raise ValueError(f"n_atoms must be a positive integer, got {self.n_atoms}")
        pos = self.coords
        if pos.shape != (self.n_atoms, 3):
            raise ValueError(f"positions must have shape ({self.n_atoms}, 3), got {pos.shape}")
        if not np.all(np.isfinite(pos)):
            raise ValueError("positions must be finite")
        for name in ("omega_p", "omega_c", "gamma_c"):
            value = getattr(self, name)
            if not np.isfinite(value) or value < 0:
                raise ValueError(f"{name} must be a finite non-negative number, got {value}")
        if self.scheme is LevelScheme.TWO_LEVEL and (self.omega_c != 0 or self.gamma_c != 0):
            raise ValueError("omega_c and gamma_c must be zero for a two-level scheme")
        if self.interaction is Interaction.DDI and self.scheme is not LevelScheme.TWO_LEVEL:
            raise ValueError("dipole-dipole interaction requires the two-level scheme")
        if self.interaction is Interaction.RRI:
            if self.scheme is not LevelScheme.THREE_LEVEL_LADDER:
                raise ValueError("Rydberg interaction requires the three-level ladder scheme")
            if self.rydberg is None:
                raise ValueError("Rydberg interaction requires a RydbergCoupling")
        d = self.separations()
        off = d[~np.eye(self.n_atoms, dtype=bool)]
        if off.size and off.min() <= 0:
            raise ValueError("atom positions must be pairwise distinct")

    @property
    def coords(self) -> np.ndarray:
        return np.array(self.positions, dtype=float).reshape(-1, 3)

    @property
    def local_dim(self) -> int:
        return self.scheme.local_dim

    @property
    def dim(self) -> int:
        return self.local_dim**self.n_atoms

    def separations(self) -> np.ndarray:
        """Pairwise distances r_ij (units of lambda_p)."""
        pos = self.coords
        diff = pos[:, None, :] - pos[None, :, :]
        return np.linalg.norm(diff, axis=-1)

    def evolve(self, **changes) -> "SystemSpec":
        return replace(self, **changes)


def chain_positions(spacings) -> np.ndarray:
    """Positions along x of a chain with the given nearest-neighbour gaps."""
    x = np.concatenate([[0.0], np.cumsum(np.asarray(spacings, dtype=float))])
    return np.column_stack([x, np.zeros_like(x), np.zeros_like(x)])


def local_operator(scheme: LevelScheme, alpha: str, beta: str) -> np.ndarray:
    d = scheme.local_dim
    op = np.zeros((d, d), dtype=complex)
    op[scheme.index(alpha), scheme.index(beta)] = 1.0
    return op


def embed_local(spec: SystemSpec, atom_index: int, op: np.ndarray) -> np.ndarray:
    """Place a single-atom matrix at 1-based ``atom_index`` in the chain."""
    if not 1 <= atom_index <= spec.n_atoms:
        raise IndexError(f"atom_index {atom_index} out of range 1..{spec.n_atoms}")
    d = spec.local_dim
    left = np.eye(d ** (atom_index - 1))
    right = np.eye(d ** (spec.n_atoms - atom_index))
    return np.kron(np.kron(left, op), right).astype(complex)


def embed_operator(spec: SystemSpec, atom_index: int, alpha: str, beta: str) -> np.ndarray:
    """A_{alpha beta} = |alpha><beta| acting on atom ``atom_index`` (1-based)."""
    return embed_local(spec, atom_index, local_operator(spec.scheme, alpha, beta))


def op_product(*ops: np.ndarray) -> np.ndarray:
    for a, b in zip(ops, ops[1:]):
        if a.shape != b.shape or a.shape[0] != a.shape[1]:
            raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return reduce(np.matmul, ops)


def expectation(rho: np.ndarray, op: np.ndarray) -> complex:
    """tr(rho op)."""
    if rho.shape != op.shape:
        raise ValueError(f"dimension mismatch: rho {rho.shape} vs op {op.shape}")
    # tr(AB) = sum_mn A_mn B_nm without forming the product
    return complex(np.einsum("mn,nm->", rho, op))


def product_state(spec: SystemSpec, level: str = "g") -> np.ndarray:
    i = spec.scheme.index(level)
    psi = np.zeros(spec.dim, dtype=complex)
    psi[sum(i * spec.local_dim**k for k in range(spec.n_atoms))] = 1.0
    return np.outer(psi, psi.conj())


def reduced_state(rho: np.ndarray, spec: SystemSpec, atom_index: int) -> np.ndarray:
    """Single-atom reduced density matrix of 1-based ``atom_index``."""
    d, n = spec.local_dim, spec.n_atoms
    if not 1 <= atom_index <= n:
        raise IndexError(f"atom_index {atom_index} out of range 1..{n}")
    a = atom_index - 1
    t = rho.reshape(d**a, d, d ** (n - a - 1), d**a, d, d ** (n - a - 1))
    return np.einsum("aibajb->ij", t)


def check_density_matrix(rho: np.ndarray, herm_tol=1e-10, trace_tol=1e-12, eig_tol=1e-10):
    """Raise ValueError if ``rho`` is not a valid density matrix."""
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density matrix must be square, got {rho.shape}")
    herm = np.max(np.abs(rho - rho.conj().T))
    if herm > herm_tol:
        raise ValueError(f"density matrix not Hermitian (max deviation {herm:.3e})")
    tr = np.trace(rho)
    if abs(tr - 1) > trace_tol:
        raise ValueError(f"density matrix trace {tr} differs from 1")
    lam = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min()
    if lam < -eig_tol:
        raise ValueError(f"density matrix has negative eigenvalue {lam:.3e}")
