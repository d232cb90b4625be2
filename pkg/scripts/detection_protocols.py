"""Ratio maps that cancel the non-interacting background.

Two protocols: G2 at two lattice spacings with mapped detector angles, and G2
of the Rydberg chain at two coupling-field strengths.  Each is also run with
the interaction switched off as a control.

    python scripts/detection_protocols.py --grid 101
"""

import argparse

import numpy as np

from atomcorr.quantum import Interaction
from atomcorr.scanner import AngleGrid, rabi_ratio_experiment, scaling_experiment
from atomcorr.scenarios import get_scenario


def summary(label, field):
    v = field.values[~field.mask]
    print(f"{label:32s} min {v.min():.4f}  max {v.max():.4f}  max|R-1| {np.abs(v - 1).max():.3e}  masked {int(field.mask.sum())}")


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--grid", type=int, default=201)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--skip-rydberg", action="store_true", help="the ladder chain needs ~4 steady states of dimension 81")
    args = p.parse_args()
    grid = AngleGrid(args.grid)

    sc = get_scenario("scaling_fig8a")
    s1, s2 = sc.scaling
    summary("spacing ratio, interacting", scaling_experiment(sc.spec, s1, s2, grid, args.workers))
    summary("spacing ratio, control", scaling_experiment(sc.spec.evolve(interaction=Interaction.NONE), s1, s2, grid, args.workers))

    if not args.skip_rydberg:
        rb = get_scenario("rri_ratio_fig8b")
        oc1, oc2 = rb.rabi
        summary("coupling ratio, interacting", rabi_ratio_experiment(rb.spec, oc1, oc2, grid, args.workers))
        control = rb.spec.evolve(interaction=Interaction.NONE, rydberg=None)
        # not flat: intensity and coherence depend differently on the coupling field
        summary("coupling ratio, control", rabi_ratio_experiment(control, oc1, oc2, grid, args.workers))


if __name__ == "__main__":
    main()
