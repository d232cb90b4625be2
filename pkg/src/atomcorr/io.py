"""File formats.

Field CSV: header ``alpha1,alpha2,value,masked``, one row per grid cell with
alpha1 varying slowest; floats are written with 17 significant digits
(``%.17g``), masked cells carry ``nan`` and ``masked=1``.

Contour file: one ``alpha1,alpha2`` line per vertex (``%.17g``), polylines
separated by a single blank line; an empty contour set is an empty file.

Complex matrix dump: first line ``# rows cols``, then one line per matrix row
with space-separated ``re,im`` entries (``%.17g``).
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import scipy.sparse as sp

FMT = "%.17g"


def _f(x: float) -> str:
    return FMT % x


def write_field_csv(path, field) -> Path:
    path = Path(path)
    a = field.grid.alphas
    vals, mask = field.values, field.mask
    with open(path, "w", newline="\n") as fh:
        fh.write("alpha1,alpha2,value,masked\n")
        for i, a1 in enumerate(a):
            s1 = _f(a1)
            for j, a2 in enumerate(a):
                m = bool(mask[i, j])
                v = "nan" if m else _f(vals[i, j])
                fh.write(f"{s1},{_f(a2)},{v},{int(m)}\n")
    return path


def read_field_csv(path):
    """(alpha grid, values, mask) from a field CSV."""
    data = np.genfromtxt(path, delimiter=",", skip_header=1)
    a1 = np.unique(data[:, 0])
    n = len(a1)
    return a1, data[:, 2].reshape(n, n), data[:, 3].reshape(n, n).astype(bool)


def write_polylines(path, polylines) -> Path:
    path = Path(path)
    blocks = ["".join(f"{_f(x)},{_f(y)}\n" for x, y in line) for line in polylines]
    path.write_text("\n".join(blocks))
    return path


def read_polylines(path) -> list[np.ndarray]:
    text = Path(path).read_text()
    out = []
    for block in text.split("\n\n"):
        rows = [r for r in block.splitlines() if r.strip()]
        if rows:
            out.append(np.array([[float(v) for v in r.split(",")] for r in rows]))
    return out


def write_complex_matrix(path, m) -> Path:
    path = Path(path)
    rows, cols = m.shape
    with open(path, "w") as fh:
        fh.write(f"# {rows} {cols}\n")
        for r in range(rows):
            row = m.getrow(r).toarray().ravel() if sp.issparse(m) else np.asarray(m[r])
            fh.write(" ".join(f"{_f(z.real)},{_f(z.imag)}" for z in row) + "\n")
    return path


def read_complex_matrix(path) -> np.ndarray:
    lines = Path(path).read_text().splitlines()
    rows, cols = map(int, lines[0][1:].split())
    out = np.empty((rows, cols), complex)
    for r, line in enumerate(lines[1 : rows + 1]):
        for c, pair in enumerate(line.split()):
            re_, im_ = pair.split(",")
            out[r, c] = complex(float(re_), float(im_))
    return out


def write_heatmap(path, field, contours=()) -> Path:
    """PNG of ``field`` with optional contour overlays (fixed colormap, values above the display cap shaded grey)."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    a = field.grid.alphas
    vals = np.ma.masked_array(field.values, field.mask)
    cmap = plt.get_cmap("viridis").copy()
    cmap.set_over("lightgray")
    cmap.set_bad("white")
    vmax = field.meta.get("display_cap")
    fig, ax = plt.subplots(figsize=(5, 4.2))
    im = ax.pcolormesh(a, a, vals.T, cmap=cmap, vmin=0 if vmax else None, vmax=vmax, shading="nearest")
    fig.colorbar(im, ax=ax, extend="max" if vmax else "neither")
    styles = ["g:", "m--", "c-", "y-."]
    for k, cs in enumerate(contours):
        for line in cs.polylines:
            ax.plot(line[:, 0], line[:, 1], styles[k % len(styles)], lw=1)
    ax.set_xlabel(r"$\alpha_1$")
    ax.set_ylabel(r"$\alpha_2$")
    ax.set_title(field.name)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return Path(path)


def write_manifest(path, manifest: dict) -> Path:
    path = Path(path)
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True, default=_jsonable) + "\n")
    return path


def _jsonable(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, complex):
        return [o.real, o.imag]
    return str(o)
