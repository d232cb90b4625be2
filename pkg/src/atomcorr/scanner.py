"""Detector-angle scans, level-set extraction and the two reference protocols."""

from __future__ import annotations

import enum
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import contours as ms
from .correlations import PARTS, Correlator, ExpectationTable, build_expectation_table
from .couplings import couplings_for
from .dynamics import SteadyStateReport, solve
from .quantum import Interaction, LevelScheme, SystemSpec, chain_positions

# grid rows are evaluated in blocks of this size regardless of worker count
ROW_BLOCK = 16
RATIO_GUARD = 1e-12

G2_FIELDS = ("G2", "G_2", "G_3", "G_4", "U2", "U_2", "U_3", "U_4")
DERIVED_FIELDS = ("C2", "C3", "C4", "C2_ratio", "C3_ratio", "C4_ratio", "g2norm", "intensity_product")
ALL_FIELDS = G2_FIELDS + DERIVED_FIELDS
DEFAULT_FIELDS = ("G2", "C2", "C3", "C4", "g2norm", "intensity_product")

# display caps for g2norm shading
G2NORM_CAP = {Interaction.DDI: 2.0, Interaction.RRI: 20.0}


@dataclass(frozen=True)
class AngleGrid:
    n_points: int = 201

    def __post_init__(self):
        if int(self.n_points) != self.n_points or self.n_points < 2:
            raise ValueError(f"grid needs at least 2 points per axis, got {self.n_points}")

    @property
    def alphas(self) -> np.ndarray:
        return np.linspace(0.0, np.pi, self.n_points)

    @property
    def spacing(self) -> float:
        return np.pi / (self.n_points - 1)


@dataclass
class ScalarField:
    name: str
    grid: AngleGrid
    values: np.ndarray  # values[i, j] at (alpha1_i, alpha2_j)
    mask: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def masked_fraction(self) -> float:
        return float(self.mask.mean())


class ContourKind(enum.Enum):
    LEVEL_SET = "level"
    RATIO_THRESHOLD = "ratio"


@dataclass
class ContourSet:
    field: str
    level: float
    kind: ContourKind
    polylines: list
    region_cells: int = 0  # for ratio thresholds: unmasked cells with ratio >= level

    @property
    def empty(self) -> bool:
        return not self.polylines


@dataclass
class ScanResult:
    spec: SystemSpec
    grid: AngleGrid
    fields: dict
    report: SteadyStateReport
    table: ExpectationTable
    timings: dict = field(default_factory=dict)


def _blocks(n):
    return [(a, min(a + ROW_BLOCK, n)) for a in range(0, n, ROW_BLOCK)]


def _evaluate(corr: Correlator, p1: np.ndarray, p2: np.ndarray, names, workers: int) -> dict:
    """Raw G2-type fields on the product grid p1 x p2 (rows of phase factors)."""
    mats = {"G2": corr.m_full, "U2": corr.u_full}
    for k in PARTS:
        mats[f"G_{k}"] = corr.m_part[k]
        mats[f"U_{k}"] = corr.u_part[k]
    mats = {k: v for k, v in mats.items() if k in names}
    out = {k: np.empty((len(p1), len(p2))) for k in mats}

    def run(block):
        a, b = block
        for k, m in mats.items():
            out[k][a:b] = corr.bilinear(m, p1[a:b], p2)

    blocks = _blocks(len(p1))
    if workers <= 1:
        for blk in blocks:
            run(blk)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run, blocks))
    return out


def _required(fields) -> set:
    need = set(fields)
    for f in fields:
        if f not in ALL_FIELDS:
            raise ValueError(f"unknown field {f!r}; available: {', '.join(ALL_FIELDS)}")
        if f.startswith("C"):
            n = f[1]
            need |= {"G2", f"C{n}", f"G_{n}", f"U_{n}"}
        if f == "g2norm":
            need.add("G2")
    return need


def fields_from_table(table: ExpectationTable, grid: AngleGrid, fields=DEFAULT_FIELDS, workers: int = 1, interaction=None) -> dict:
    corr = Correlator(table)
    alphas = grid.alphas
    p = corr.phases(alphas)
    need = _required(fields)
    raw = _evaluate(corr, p, p, need, workers)
    no_mask = np.zeros((grid.n_points,) * 2, bool)
    res = {}

    def put(name, values, mask=no_mask, **meta):
        res[name] = ScalarField(name, grid, values, mask, meta)

    for k, v in raw.items():
        put(k, v)
    for n in "234":
        if f"C{n}" in need:
            put(f"C{n}", raw["G2"] - raw[f"G_{n}"] + raw[f"U_{n}"])
    g2 = raw.get("G2")
    if g2 is not None:
        guard = RATIO_GUARD * np.abs(g2).max()
        small = np.abs(g2) <= guard
        for n in "234":
            name = f"C{n}_ratio"
            if name in need:
                with np.errstate(divide="ignore", invalid="ignore"):
                    ratio = np.where(small, np.nan, res[f"C{n}"].values / np.where(small, 1.0, g2))
                put(name, ratio, small.copy(), guard=guard)
    if "g2norm" in need or "intensity_product" in need:
        g1 = corr.g1(p)
        prod = np.outer(g1, g1)
        low = prod < corr.den_guard
        if "intensity_product" in need:
            put("intensity_product", prod, guard=corr.den_guard, below_guard=int(low.sum()))
        if "g2norm" in need:
            with np.errstate(divide="ignore", invalid="ignore"):
                g2n = np.where(low, np.nan, g2 / np.where(low, 1.0, prod))
            meta = {"guard": corr.den_guard}
            cap = G2NORM_CAP.get(interaction)
            if cap is not None:
                meta["display_cap"] = cap
                meta["cells_above_cap"] = int(np.sum(~low & (g2n > cap)))
            put("g2norm", g2n, low, **meta)
    return {k: res[k] for k in res if k in fields}


def scan(spec: SystemSpec, grid: AngleGrid = AngleGrid(), fields=DEFAULT_FIELDS, workers: int = 1) -> ScanResult:
    """Steady state, expectation table and the requested fields over ``grid``."""
    t0 = time.perf_counter()
    report = solve(spec, couplings_for(spec))
    t1 = time.perf_counter()
    table = build_expectation_table(report.rho, spec)
    t2 = time.perf_counter()
    out = fields_from_table(table, grid, fields, workers, spec.interaction)
    t3 = time.perf_counter()
    timings = {"steady_state": t1 - t0, "table": t2 - t1, "fields": t3 - t2}
    return ScanResult(spec, grid, out, report, table, timings)


def extract_contours(f: ScalarField, level: float = 0.0) -> ContourSet:
    a = f.grid.alphas
    lines = [] if f.mask.all() else ms.marching_squares(a, a, f.values, level, f.mask)
    return ContourSet(f.name, float(level), ContourKind.LEVEL_SET, lines)


def ratio_regions(c_field: ScalarField, g2_field: ScalarField, threshold: float) -> ContourSet:
    """Boundary of {C_n / G2 >= threshold}, masking cells with |G2| under the guard."""
    if c_field.grid != g2_field.grid:
        raise ValueError("fields live on different grids")
    g2 = g2_field.values
    guard = RATIO_GUARD * np.abs(g2).max() if g2.size else 0.0
    small = (np.abs(g2) <= guard) | g2_field.mask | c_field.mask
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(small, np.nan, c_field.values / np.where(small, 1.0, g2))
    name = f"{c_field.name}_ratio"
    if not np.isfinite(threshold) or small.all():
        return ContourSet(name, float(threshold), ContourKind.RATIO_THRESHOLD, [], 0)
    a = c_field.grid.alphas
    lines = ms.marching_squares(a, a, ratio, threshold, small)
    cells = int(np.sum(~small & (ratio >= threshold)))
    return ContourSet(name, float(threshold), ContourKind.RATIO_THRESHOLD, lines, cells)


def rescale_chain(spec: SystemSpec, spacing: float) -> SystemSpec:
    """Copy of ``spec`` with positions scaled so the first gap equals ``spacing``."""
    pos = spec.coords
    if spec.n_atoms < 2:
        return spec
    first = np.linalg.norm(pos[1] - pos[0])
    return spec.evolve(positions=pos[0] + (pos - pos[0]) * (spacing / first))


def _ratio_field(name, grid, num, den, **meta) -> ScalarField:
    guard = RATIO_GUARD * np.abs(den).max()
    small = np.abs(den) <= guard
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(small, np.nan, num / np.where(small, 1.0, den))
    return ScalarField(name, grid, r, small, dict(meta, guard=guard))


def _g2_at(table: ExpectationTable, alphas, workers) -> np.ndarray:
    corr = Correlator(table)
    p = corr.phases(alphas)
    return _evaluate(corr, p, p, {"G2"}, workers)["G2"]


def scaling_experiment(spec: SystemSpec, s1: float, s2: float, grid: AngleGrid = AngleGrid(), workers: int = 1) -> ScalarField:
    """G2 at spacing s1 over G2 at spacing s2 evaluated at the mapped angles.

    The mapped angle solves s1 cos(alpha) = s2 cos(alpha_bar); both sides are
    computed at their exact angles, no resampling.
    """
    if not 0 < s1 <= s2:
        raise ValueError("scaling protocol needs 0 < s1 <= s2")
    spec1, spec2 = rescale_chain(spec, s1), rescale_chain(spec, s2)
    t1 = build_expectation_table(solve(spec1).rho, spec1)
    t2 = build_expectation_table(solve(spec2).rho, spec2)
    a = grid.alphas
    a_bar = np.arccos((s1 / s2) * np.cos(a))
    num = _g2_at(t1, a, workers)
    den = _g2_at(t2, a_bar, workers)
    return _ratio_field("ratio", grid, num, den, s1=s1, s2=s2)


def rabi_ratio_experiment(spec: SystemSpec, omega_c_1: float, omega_c_2: float, grid: AngleGrid = AngleGrid(), workers: int = 1) -> ScalarField:
    """Cellwise G2(omega_c_1) / G2(omega_c_2) at identical detector angles."""
    if spec.scheme is not LevelScheme.THREE_LEVEL_LADDER:
        raise ValueError("the coupling-field ratio protocol needs the three-level ladder scheme")
    sa, sb = spec.evolve(omega_c=omega_c_1), spec.evolve(omega_c=omega_c_2)
    num = _g2_at(build_expectation_table(solve(sa).rho, sa), grid.alphas, workers)
    if omega_c_1 == omega_c_2:
        den = num
    else:
        den = _g2_at(build_expectation_table(solve(sb).rho, sb), grid.alphas, workers)
    return _ratio_field("ratio", grid, num, den, omega_c_1=omega_c_1, omega_c_2=omega_c_2)


def random_spacing_check(spec: SystemSpec, spacings, grid: AngleGrid = AngleGrid(), workers: int = 1) -> dict:
    """Scan an irregular chain and report whether C2=0 and C4=0 contours exist."""
    if spec.interaction is not Interaction.DDI:
        raise ValueError("random-spacing check is defined for dipole-dipole coupled chains")
    irregular = spec.evolve(positions=chain_positions(spacings), n_atoms=len(spacings) + 1)
    result = scan(irregular, grid, ("G2", "C2", "C3", "C4"), workers)
    c2 = extract_contours(result.fields["C2"], 0.0)
    c4 = extract_contours(result.fields["C4"], 0.0)
    return {
        "spacings": list(map(float, spacings)),
        "scan": result,
        "contours": {"C2": c2, "C4": c4},
        "nonempty": {"C2": not c2.empty, "C4": not c4.empty},
    }
