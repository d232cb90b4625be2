"""Photon correlation functions of the light scattered by the chain.

Everything angle-independent lives in :class:`ExpectationTable`; the detector
angles only enter through unit-modulus phase factors, so a full angle scan is
a pair of small matrix products per grid row.

Conventions: the detector wave vector is k(alpha) = (2 pi / lambda_p)
(cos alpha, sin alpha, 0), so for a chain along x the phase between atoms i
and j is 2 pi r_ij cos(alpha).  G1 = sum_ij <A_eg^i A_ge^j> p_i p_j^*, and
G2 = sum_ijkl <A_eg^i A_eg^j A_ge^k A_ge^l> p_i(a1) p_l(a1)^* p_j(a2) p_k(a2)^*,
with p_j(alpha) = exp(i k(alpha) . r_j).  This is <B1^+ B2^+ B2 B1> with
B_n = sum_j p_j(alpha_n)^* A_ge^j, hence non-negative.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .quantum import SystemSpec, embed_operator, local_operator, reduced_state

PARTS = (2, 3, 4)
# g2 normalisation is masked where G1(a1) G1(a2) < DEN_GUARD * (N max I)^2
DEN_GUARD = 1e-12


@dataclass(frozen=True)
class ExpectationTable:
    positions: np.ndarray
    two_op: np.ndarray  # <A_eg^i A_ge^j>
    four_op: np.ndarray  # <A_eg^i A_eg^j A_ge^k A_ge^l>
    coherence: np.ndarray  # <A_eg^i>
    population: np.ndarray  # <A_ee^i>
    u_two_op: np.ndarray
    u_four_op: np.ndarray

    @property
    def n_atoms(self) -> int:
        return len(self.population)

    def with_coherences_zeroed(self) -> "ExpectationTable":
        """Table of the same populations with all single-atom coherences removed.

        Only the factorised quantities are rebuilt; used to expose the I*C and
        C^2 structure of the three- and four-atom terms.
        """
        n = self.n_atoms
        zero = np.zeros(n, complex)
        u2, u4 = _factorised_from_moments(zero, self.population, n)
        return ExpectationTable(self.positions, u2, u4, zero, self.population.copy(), u2, u4)


@dataclass(frozen=True)
class DetectorDirection:
    alpha: float
    phase_factors: np.ndarray

    @classmethod
    def at(cls, alpha: float, positions) -> "DetectorDirection":
        return cls(float(alpha), phase_factors(positions, alpha))


@dataclass
class CorrelationBreakdown:
    g2_full: float
    g2_part: dict = field(default_factory=dict)
    u2_full: float = 0.0
    u2_part: dict = field(default_factory=dict)
    c_n: dict = field(default_factory=dict)
    g1_d1: float = 0.0
    g1_d2: float = 0.0
    g2_normalized: float | None = None


def phase_factors(positions, alpha) -> np.ndarray:
    """exp(i k(alpha) . r_j); shape (len(alpha), N) for array ``alpha``, (N,) for scalar."""
    pos = np.asarray(positions, dtype=float).reshape(-1, 3)
    a = np.asarray(alpha, dtype=float)
    kx, ky = np.cos(a), np.sin(a)
    phase = 2 * np.pi * (kx[..., None] * pos[:, 0] + ky[..., None] * pos[:, 1])
    return np.exp(1j * phase)


def distinct_count(n: int) -> np.ndarray:
    """Number of distinct values in each index quadruple (i, j, k, l)."""
    idx = np.indices((n,) * 4).reshape(4, -1).T
    counts = np.array([len(set(q)) for q in idx])
    return counts.reshape((n,) * 4)


def _factorised_from_moments(coherence, population, n):
    """Factorised two- and four-operator tables for a two-level-type moment set.

    Same-atom products needed here only involve A_eg, A_ge and A_ee.
    """
    eg = coherence
    ge = coherence.conj()
    u2 = np.outer(eg, ge).astype(complex)
    u2[np.diag_indices(n)] = population
    u4 = np.zeros((n,) * 4, complex)
    for i, j, k, l in product(range(n), repeat=4):
        if i == j or k == l:
            continue
        # same-atom operator pairs in order: (eg_i, ge_k), (eg_i, ge_l), (eg_j, ge_k), (eg_j, ge_l)
        groups = {}
        for atom, op in ((i, "eg"), (j, "eg"), (k, "ge"), (l, "ge")):
            groups.setdefault(atom, []).append(op)
        val = 1.0 + 0j
        for atom, ops in groups.items():
            if ops == ["eg"]:
                val *= eg[atom]
            elif ops == ["ge"]:
                val *= ge[atom]
            else:  # ["eg", "ge"]: A_eg A_ge = A_ee
                val *= population[atom]
        u4[i, j, k, l] = val
    return u2, u4


def _factorised_tables(local_states, scheme, n):
    """<.>_U tables from single-atom reduced states by grouping operators per atom."""
    eg = local_operator(scheme, "e", "g")
    ge = local_operator(scheme, "g", "e")

    def local_value(atom, ops):
        m = ops[0]
        for o in ops[1:]:
            m = m @ o
        return np.trace(local_states[atom] @ m)

    u2 = np.empty((n, n), complex)
    for i, j in product(range(n), repeat=2):
        u2[i, j] = local_value(i, [eg, ge]) if i == j else local_value(i, [eg]) * local_value(j, [ge])
    u4 = np.zeros((n,) * 4, complex)
    for quad in product(range(n), repeat=4):
        groups: dict[int, list] = {}
        for atom, op in zip(quad, (eg, eg, ge, ge)):
            groups.setdefault(atom, []).append(op)
        val = 1.0 + 0j
        for atom, ops in groups.items():
            val *= local_value(atom, ops)
        u4[quad] = val
    return u2, u4


def build_expectation_table(rho: np.ndarray, spec: SystemSpec) -> ExpectationTable:
    n, D = spec.n_atoms, spec.dim
    if rho.shape != (D, D):
        raise ValueError(f"rho has shape {rho.shape}, spec needs ({D}, {D})")
    ge = np.array([embed_operator(spec, i + 1, "g", "e") for i in range(n)])
    # X[a, b] = A_ge^a A_ge^b ;  four[i,j,k,l] = tr(X[j,i]^+ X[k,l] rho)
    X = np.einsum("amn,bnp->abmp", ge, ge)
    Y = X @ rho
    four = np.einsum("jimn,klmn->ijkl", X.conj(), Y)
    two = np.einsum("imn,jmn->ij", ge.conj(), ge @ rho)
    local = [reduced_state(rho, spec, i + 1) for i in range(n)]
    s_eg = local_operator(spec.scheme, "e", "g")
    s_ee = local_operator(spec.scheme, "e", "e")
    coherence = np.array([np.trace(r @ s_eg) for r in local])
    population = np.array([np.trace(r @ s_ee).real for r in local])
    u2, u4 = _factorised_tables(local, spec.scheme, n)
    return ExpectationTable(spec.coords.copy(), two, four, coherence, population, u2, u4)


def _pair_matrix(t4: np.ndarray) -> np.ndarray:
    """Reshape T[i,j,k,l] to M[(i,l),(j,k)] so that G2 = P1 M P2^T."""
    n = t4.shape[0]
    return t4.transpose(0, 3, 1, 2).reshape(n * n, n * n)


def pair_phases(p: np.ndarray) -> np.ndarray:
    """Rows of p_i p_l^* flattened over (i, l); ``p`` has shape (..., N)."""
    n = p.shape[-1]
    return (p[..., :, None] * p[..., None, :].conj()).reshape(*p.shape[:-1], n * n)


class Correlator:
    """Angle-independent matrices for G1, G2, U2 and their n-atom parts."""

    def __init__(self, table: ExpectationTable):
        self.table = table
        n = table.n_atoms
        cls = distinct_count(n)
        self.class_of = cls
        self.m_full = _pair_matrix(table.four_op)
        self.m_part = {k: _pair_matrix(np.where(cls == k, table.four_op, 0)) for k in PARTS}
        self.u_full = _pair_matrix(table.u_four_op)
        self.u_part = {k: _pair_matrix(np.where(cls == k, table.u_four_op, 0)) for k in PARTS}
        self.den_guard = DEN_GUARD * (n * max(table.population.max(), 0.0)) ** 2

    def phases(self, alpha):
        return phase_factors(self.table.positions, alpha)

    def g1(self, p: np.ndarray, factorised: bool = False) -> np.ndarray:
        two = self.table.u_two_op if factorised else self.table.two_op
        val = np.einsum("...i,ij,...j->...", p, two, p.conj())
        return val.real

    def bilinear(self, m: np.ndarray, p1: np.ndarray, p2: np.ndarray) -> np.ndarray:
        """Real part of P(p1) m P(p2)^T for row-stacked phase arrays."""
        return ((pair_phases(p1) @ m) @ pair_phases(p2).T).real

    def breakdown(self, d1: DetectorDirection, d2: DetectorDirection) -> CorrelationBreakdown:
        p1, p2 = d1.phase_factors[None, :], d2.phase_factors[None, :]

        def ev(m):
            return float(self.bilinear(m, p1, p2)[0, 0])

        full = ev(self.m_full)
        gp = {k: ev(self.m_part[k]) for k in PARTS}
        up = {k: ev(self.u_part[k]) for k in PARTS}
        g1a = float(self.g1(d1.phase_factors))
        g1b = float(self.g1(d2.phase_factors))
        den = g1a * g1b
        return CorrelationBreakdown(
            g2_full=full,
            g2_part=gp,
            u2_full=ev(self.u_full),
            u2_part=up,
            c_n={k: full - gp[k] + up[k] for k in PARTS},
            g1_d1=g1a,
            g1_d2=g1b,
            g2_normalized=full / den if den >= self.den_guard and den > 0 else None,
        )


def g1(table: ExpectationTable, d: DetectorDirection) -> float:
    val = d.phase_factors @ table.two_op @ d.phase_factors.conj()
    if abs(val.imag) > 1e-12 * max(1.0, abs(val.real)):
        raise ArithmeticError(f"G1 has imaginary residue {val.imag:.3e}")
    return float(val.real)


def g2_breakdown(table: ExpectationTable, d1: DetectorDirection, d2: DetectorDirection) -> CorrelationBreakdown:
    return Correlator(table).breakdown(d1, d2)


def g1_uncorrelated(table: ExpectationTable, d: DetectorDirection, rtol: float = 1e-10) -> float:
    """Closed form I N + C sum_{i != j} exp(i k . r_ij) for identical, uncorrelated atoms."""
    pop, coh = table.population, np.abs(table.coherence) ** 2
    if np.ptp(pop) > rtol * max(abs(pop).max(), 1e-300) or np.ptp(coh) > rtol * max(coh.max(), 1e-300):
        raise ValueError("atoms are not in identical single-atom states")
    inten, coh_int = pop[0], coh[0]
    p = d.phase_factors
    n = len(p)
    cross = abs(p.sum()) ** 2 - n
    return float(inten * n + coh_int * cross)
