import hypothesis
import numpy as np
import pytest

from atomcorr.quantum import Interaction, LevelScheme, RydbergCoupling, SystemSpec, chain_positions
from atomcorr.scenarios import get_scenario

hypothesis.settings.register_profile("default", max_examples=40, deadline=None)
hypothesis.settings.load_profile("default")


def ddi_chain(spacings, omega_p=0.01, interaction=Interaction.DDI):
    return SystemSpec(len(spacings) + 1, LevelScheme.TWO_LEVEL, chain_positions(spacings), omega_p, interaction=interaction)


def ladder_chain(spacings, v_nn=2.34, omega_p=0.01, omega_c=1.0, gamma_c=0.05, interaction=Interaction.RRI):
    r_nn = min(spacings) if len(spacings) else 1.0
    return SystemSpec(
        len(spacings) + 1,
        LevelScheme.THREE_LEVEL_LADDER,
        chain_positions(spacings),
        omega_p,
        omega_c,
        gamma_c,
        interaction,
        RydbergCoupling(v_nn=v_nn, r_nn=r_nn),
    )


@pytest.fixture(scope="session")
def ddi_spec():
    return get_scenario("ddi_fig2").spec


@pytest.fixture(scope="session")
def ddi_scan(ddi_spec):
    from atomcorr.scanner import ALL_FIELDS, AngleGrid, scan

    return scan(ddi_spec, AngleGrid(201), ALL_FIELDS)


@pytest.fixture(scope="session")
def rri_scan():
    from atomcorr.scanner import ALL_FIELDS, AngleGrid, scan

    return scan(get_scenario("rri_fig6").spec, AngleGrid(201), ALL_FIELDS)


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)
