"""Pairwise coupling constants: dipole-dipole (gamma_ij, Omega_ij) and Rydberg V_ij."""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np

from .quantum import Interaction, LevelScheme, SystemSpec

# below this eta the closed forms lose digits to 1/eta^3 cancellation
SERIES_ETA = 1.0
_SERIES_TERMS = 40


@dataclass(frozen=True)
class CouplingMatrices:
    """All in units of gamma_p.  ``gamma`` has unit diagonal, ``omega`` and ``v`` zero diagonal."""

    gamma: np.ndarray
    omega: np.ndarray
    v: np.ndarray

    @classmethod
    def uncoupled(cls, n: int) -> "CouplingMatrices":
        return cls(np.eye(n), np.zeros((n, n)), np.zeros((n, n)))

    @property
    def n_atoms(self) -> int:
        return self.gamma.shape[0]


def _radial_kernels(eta: float) -> tuple[complex, complex]:
    """Return (h, q) with h = (1/eta + i/eta^2 - 1/eta^3) e^{i eta}, q = (1/eta + 3i/eta^2 - 3/eta^3) e^{i eta}.

    For small eta the singular real parts are split off analytically and the
    rest is summed from the Taylor series of e^{z}(poly in z), z = i*eta.
    """
    if eta >= SERIES_ETA:
        phase = np.exp(1j * eta)
        h = (1 / eta + 1j / eta**2 - 1 / eta**3) * phase
        q = (1 / eta + 3j / eta**2 - 3 / eta**3) * phase
        return complex(h), complex(q)
    # e^z(-1 + z - z^2) = -sum (n-1)^2 z^n / n!,   e^z(-3 + 3z - z^2) = -sum (n-1)(n-3) z^n / n!
    h = -1 / eta**3 + 1 / (2 * eta)
    q = -3 / eta**3 - 1 / (2 * eta)
    for n in range(3, _SERIES_TERMS):
        zn = (1j) ** n * eta ** (n - 3) / factorial(n)
        h -= (n - 1) ** 2 * zn
        q -= (n - 1) * (n - 3) * zn
    return complex(h), complex(q)


def chi_tensor(r: np.ndarray, eta: float | None = None) -> np.ndarray:
    """Dipole-dipole tensor chi_pq(r) in units of k0^3 / (4 pi eps0).

    ``r`` is the separation vector in units of lambda_p; ``eta`` defaults to
    2 pi |r|.
    """
    r = np.asarray(r, dtype=float)
    dist = np.linalg.norm(r)
    if eta is None:
        eta = 2 * np.pi * dist
    if not eta > 0 or dist == 0:
        raise ValueError("chi_tensor is singular at zero separation")
    rhat = r / dist
    h, q = _radial_kernels(float(eta))
    return h * np.eye(3) - q * np.outer(rhat, rhat)


def _gamma_perp(eta: float) -> float:
    """sin(eta)/eta + cos(eta)/eta^2 - sin(eta)/eta^3 (perpendicular dipoles)."""
    if eta >= SERIES_ETA:
        s, c = np.sin(eta), np.cos(eta)
        return s / eta + c / eta**2 - s / eta**3
    # eta^{2m} coefficient from sin/eta, cos/eta^2 and -sin/eta^3 separately
    total = 0.0
    for m in range(_SERIES_TERMS // 2):
        sign = (-1) ** m
        total += eta ** (2 * m) * (sign / factorial(2 * m + 1) - sign / factorial(2 * m + 2) + sign / factorial(2 * m + 3))
    return total


def _omega_perp(eta: float) -> float:
    """cos(eta)/eta - sin(eta)/eta^2 - cos(eta)/eta^3 (perpendicular dipoles)."""
    s, c = np.sin(eta), np.cos(eta)
    return c / eta - s / eta**2 - c / eta**3


def gamma_perp(eta):
    """gamma_ij / gamma_p for dipoles perpendicular to the separation."""
    return 1.5 * np.vectorize(_gamma_perp, otypes=[float])(eta)


def omega_perp(eta):
    """Omega_ij / gamma_p for dipoles perpendicular to the separation."""
    return 1.5 * np.vectorize(_omega_perp, otypes=[float])(eta)


def chain_axis(spec: SystemSpec) -> np.ndarray | None:
    """Unit vector of the line through all atoms, or None if not collinear."""
    pos = spec.coords
    if spec.n_atoms == 1:
        return np.array([1.0, 0.0, 0.0])
    axis = pos[np.argmax(np.linalg.norm(pos - pos[0], axis=1))] - pos[0]
    axis = axis / np.linalg.norm(axis)
    rel = pos - pos[0]
    perp = rel - np.outer(rel @ axis, axis)
    scale = max(1.0, np.abs(rel).max())
    if np.abs(perp).max() > 1e-9 * scale:
        return None
    return axis


def ddi_couplings(spec: SystemSpec) -> CouplingMatrices:
    """Dipole-dipole couplings of a collinear chain with dipoles perpendicular to it."""
    if spec.scheme is not LevelScheme.TWO_LEVEL:
        raise ValueError("dipole-dipole couplings require the two-level scheme")
    axis = chain_axis(spec)
    if axis is None:
        raise ValueError(
            "ddi_couplings supports collinear chains only; use chi_tensor for general geometries"
        )
    if spec.dipole is not None:
        d = np.asarray(spec.dipole, dtype=float)
        d = d / np.linalg.norm(d)
        if abs(d @ axis) > 1e-9:
            raise ValueError("dipole orientation must be perpendicular to the chain axis")
    n = spec.n_atoms
    eta = 2 * np.pi * spec.separations()
    gamma = np.eye(n)
    omega = np.zeros((n, n))
    iu = np.triu_indices(n, 1)
    gamma[iu] = gamma_perp(eta[iu])
    omega[iu] = omega_perp(eta[iu])
    gamma = np.triu(gamma) + np.triu(gamma, 1).T
    omega = omega + omega.T
    return CouplingMatrices(gamma, omega, np.zeros((n, n)))


def rydberg_shift_nn(c6: float, r_nn: float, lambda_p_um: float, gamma_p_per_s: float) -> float:
    """V at separation ``r_nn`` (units lambda_p), in units of gamma_p, for C6 = 2 pi * c6 GHz um^6."""
    if lambda_p_um is None or gamma_p_per_s is None:
        raise ValueError("physical C6 mode needs lambda_p_um and gamma_p_per_s")
    if lambda_p_um <= 0 or gamma_p_per_s <= 0:
        raise ValueError("lambda_p_um and gamma_p_per_s must be positive")
    r_um = r_nn * lambda_p_um
    return 2 * np.pi * c6 * 1e9 / r_um**6 / gamma_p_per_s


def rri_couplings(spec: SystemSpec) -> CouplingMatrices:
    """V_ij = C6 / r_ij^6 in units of gamma_p; lower-transition DDI neglected."""
    if spec.scheme is not LevelScheme.THREE_LEVEL_LADDER:
        raise ValueError("Rydberg couplings require the three-level ladder scheme")
    ryd = spec.rydberg
    if ryd is None:
        raise ValueError("spec has no RydbergCoupling")
    n = spec.n_atoms
    r = spec.separations()
    off = ~np.eye(n, dtype=bool)
    if n > 1 and r[off].min() <= 0:
        raise ValueError("zero separation between atoms")
    r_ref = ryd.r_nn if ryd.r_nn is not None else (r[off].min() if n > 1 else 1.0)
    if ryd.physical:
        v_ref = rydberg_shift_nn(ryd.c6, r_ref, ryd.lambda_p_um, ryd.gamma_p_per_s)
    else:
        if ryd.v_nn is None:
            raise ValueError("dimensionless Rydberg mode needs v_nn")
        v_ref = ryd.v_nn
    v = np.zeros((n, n))
    v[off] = v_ref * (r_ref / r[off]) ** 6
    return CouplingMatrices(np.eye(n), np.zeros((n, n)), v)


def couplings_for(spec: SystemSpec) -> CouplingMatrices:
    if spec.interaction is Interaction.DDI:
        return ddi_couplings(spec)
    if spec.interaction is Interaction.RRI:
        return rri_couplings(spec)
    return CouplingMatrices.uncoupled(spec.n_atoms)
