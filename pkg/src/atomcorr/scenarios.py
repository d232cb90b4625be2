"""Named parameter sets for the published scans."""

from __future__ import annotations

from dataclasses import dataclass, field

from .quantum import Interaction, LevelScheme, RydbergCoupling, SystemSpec, chain_positions

# V at r = 5 lambda_p for C6 = 2 pi x 50 GHz um^6 with 87Rb D2 numbers
# (lambda_p = 0.780241 um, gamma_p = 2 pi x 6.0666 MHz) evaluates to 2.338
RRI_V_NN = 2.34


@dataclass(frozen=True)
class ContourRequest:
    field: str  # C2, C3, C4
    kind: str  # "level" or "ratio"
    level: float

    def filename(self) -> str:
        if self.kind == "level":
            return f"{self.field}_contour.txt"
        return f"{self.field}_ratio{self.level:g}_contour.txt"

    def to_text(self) -> str:
        return f"{self.field}:{self.kind}:{self.level!r}"


@dataclass(frozen=True)
class Scenario:
    name: str
    description: str
    spec: SystemSpec
    contours: tuple = ()
    scaling: tuple | None = None  # (s1, s2)
    rabi: tuple | None = None  # (omega_c_1, omega_c_2)
    extras: dict = field(default_factory=dict)


def _ddi(spacings) -> SystemSpec:
    return SystemSpec(
        n_atoms=len(spacings) + 1,
        scheme=LevelScheme.TWO_LEVEL,
        positions=chain_positions(spacings),
        omega_p=0.01,
        interaction=Interaction.DDI,
    )


def _rri() -> SystemSpec:
    return SystemSpec(
        n_atoms=4,
        scheme=LevelScheme.THREE_LEVEL_LADDER,
        positions=chain_positions([5.0, 5.0, 5.0]),
        omega_p=0.01,
        omega_c=1.0,
        gamma_c=0.05,
        interaction=Interaction.RRI,
        rydberg=RydbergCoupling(v_nn=RRI_V_NN, r_nn=5.0),
    )


DDI_CONTOURS = (
    ContourRequest("C2", "level", 0.0),
    ContourRequest("C4", "level", 0.0),
    ContourRequest("C3", "ratio", 10.0),
    ContourRequest("C4", "ratio", 10.0),
)
RRI_CONTOURS = (
    ContourRequest("C2", "level", 0.0),
    ContourRequest("C4", "level", 0.0),
    ContourRequest("C3", "ratio", 5.0),
)

SCENARIOS = {
    s.name: s
    for s in (
        Scenario("ddi_fig2", "4 dipole-dipole coupled atoms, spacing lambda_p, Omega_p = 0.01", _ddi([1.0, 1.0, 1.0]), DDI_CONTOURS),
        Scenario(
            "rri_fig6",
            "4 Rydberg ladder atoms, spacing 5 lambda_p, Omega_c = 1, gamma_c = 0.05, V_nn = 2.34",
            _rri(),
            RRI_CONTOURS,
        ),
        Scenario("ddi_random", "dipole-dipole chain with spacings 1.3, 0.6, 0.4 lambda_p", _ddi([1.3, 0.6, 0.4]), DDI_CONTOURS),
        Scenario("scaling_fig8a", "lattice-spacing ratio G2(lambda_p) / G2(1.5 lambda_p, mapped angles)", _ddi([1.0, 1.0, 1.0]), DDI_CONTOURS, scaling=(1.0, 1.5)),
        Scenario("rri_ratio_fig8b", "coupling-field ratio G2(Omega_c = 0.01) / G2(Omega_c = 0.05)", _rri(), RRI_CONTOURS, rabi=(0.01, 0.05)),
    )
}


def get_scenario(name: str) -> Scenario:
    try:
        return SCENARIOS[name]
    except KeyError:
        raise KeyError(f"unknown scenario {name!r}; available: {', '.join(SCENARIOS)}") from None
