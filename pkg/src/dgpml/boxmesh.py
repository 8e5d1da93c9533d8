"""Structured box-mesh fixture writer.

Writes axis-aligned boxes of tetrahedra (each grid cell split into six) as
Gmsh v2.2 ASCII files, with an inner region tagged ``interior``, the
surrounding shell tagged ``pml`` and the outer surface tagged with a boundary
kind. This exists to produce deterministic test and demo meshes; the solver
itself only ever ingests ``.msh`` files.
"""

import numpy as np

from .errors import ConfigError

# Six-tetrahedra split of the unit cell sharing the main diagonal 000-111;
# identical in every cell, which keeps neighbouring faces conforming.
_CELL_TETS = (
    ((0, 0, 0), (1, 0, 0), (1, 1, 0), (1, 1, 1)),
    ((0, 0, 0), (1, 1, 0), (0, 1, 0), (1, 1, 1)),
    ((0, 0, 0), (0, 1, 0), (0, 1, 1), (1, 1, 1)),
    ((0, 0, 0), (0, 1, 1), (0, 0, 1), (1, 1, 1)),
    ((0, 0, 0), (0, 0, 1), (1, 0, 1), (1, 1, 1)),
    ((0, 0, 0), (1, 0, 1), (1, 0, 0), (1, 1, 1)),
)

_PHYS_INTERIOR = 1
_PHYS_PML = 2
_PHYS_SURFACE = 10


def _axis_cells(extent, pml, h, name):
    n_in = int(round(extent / h))
    if n_in < 1 or abs(n_in * h - extent) > 1e-9 * max(extent, h):
        raise ConfigError(f"{name} extent {extent} is not a positive multiple of h={h}")
    n_pml = int(round(pml / h))
    if pml < 0 or abs(n_pml * h - pml) > 1e-9 * max(pml, h):
        raise ConfigError(f"{name} PML width {pml} is not a non-negative multiple of h={h}")
    return n_in, n_pml


def write_box_mesh(path, *, interior, pml_width=(0.0, 0.0, 0.0), h=0.1,
                   boundary="abc", center=(0.0, 0.0, 0.0)):
    """Write a tetrahedral box mesh in Gmsh v2.2 ASCII format.

    interior: (Lx, Ly, Lz) edge lengths of the inner region, centered at
    ``center``; pml_width: shell thickness per direction (0 disables that
    shell); h: grid spacing, which must divide all extents and widths;
    boundary: kind tagged on the whole outer surface, "abc" or "reflective".
    """
    if boundary not in ("abc", "reflective"):
        raise ConfigError(f"boundary must be 'abc' or 'reflective', got {boundary!r}")
    interior = tuple(float(v) for v in interior)
    pml_width = tuple(float(v) for v in pml_width)
    center = np.asarray(center, dtype=float)

    ncells = []
    coords = []
    for ax, name in enumerate("xyz"):
        n_in, n_pml = _axis_cells(interior[ax], pml_width[ax], h, name)
        n = n_in + 2 * n_pml
        ncells.append(n)
        lo = center[ax] - interior[ax] / 2.0 - pml_width[ax]
        coords.append(lo + h * np.arange(n + 1))
    nx, ny, nz = ncells

    def vid(i, j, k):
        return (i * (ny + 1) + j) * (nz + 1) + k

    xs, ys, zs = np.meshgrid(coords[0], coords[1], coords[2], indexing="ij")
    verts = np.column_stack([xs.ravel(), ys.ravel(), zs.ravel()])

    half = np.array(interior) / 2.0
    tets = []
    tet_phys = []
    any_pml = False
    for i in range(nx):
        for j in range(ny):
            for k in range(nz):
                cell_center = np.array(
                    [coords[0][i] + h / 2, coords[1][j] + h / 2, coords[2][k] + h / 2]
                )
                inside = np.all(np.abs(cell_center - center) < half)
                phys = _PHYS_INTERIOR if inside else _PHYS_PML
                any_pml = any_pml or not inside
                for tet in _CELL_TETS:
                    ids = [vid(i + d[0], j + d[1], k + d[2]) for d in tet]
                    tets.append(ids)
                    tet_phys.append(phys)

    tets = np.array(tets)
    # enforce positive orientation
    a = verts[tets[:, 1]] - verts[tets[:, 0]]
    b = verts[tets[:, 2]] - verts[tets[:, 0]]
    c = verts[tets[:, 3]] - verts[tets[:, 0]]
    vol6 = np.einsum("ij,ij->i", np.cross(a, b), c)
    flip = vol6 < 0
    tets[flip, 2], tets[flip, 3] = tets[flip, 3].copy(), tets[flip, 2].copy()

    # boundary triangles = tet faces that appear exactly once
    face_local = ((0, 1, 2), (0, 1, 3), (1, 2, 3), (0, 2, 3))
    seen = {}
    for kk in range(tets.shape[0]):
        for fl in face_local:
            key = tuple(sorted(tets[kk, list(fl)]))
            seen[key] = seen.get(key, 0) + 1
    boundary_tris = sorted(key for key, cnt in seen.items() if cnt == 1)

    lines = ["$MeshFormat", "2.2 0 8", "$EndMeshFormat"]
    names = [f'2 {_PHYS_SURFACE} "{boundary}_outer"', f'3 {_PHYS_INTERIOR} "interior"']
    if any_pml:
        names.append(f'3 {_PHYS_PML} "pml"')
    lines += ["$PhysicalNames", str(len(names)), *names, "$EndPhysicalNames"]

    lines.append("$Nodes")
    lines.append(str(len(verts)))
    lines += [f"{n + 1} {v[0]:.16g} {v[1]:.16g} {v[2]:.16g}" for n, v in enumerate(verts)]
    lines.append("$EndNodes")

    lines.append("$Elements")
    lines.append(str(len(boundary_tris) + len(tets)))
    eid = 1
    for tri in boundary_tris:
        lines.append(f"{eid} 2 2 {_PHYS_SURFACE} 1 {tri[0] + 1} {tri[1] + 1} {tri[2] + 1}")
        eid += 1
    for kk in range(tets.shape[0]):
        t = tets[kk] + 1
        lines.append(f"{eid} 4 2 {tet_phys[kk]} 1 {t[0]} {t[1]} {t[2]} {t[3]}")
        eid += 1
    lines.append("$EndElements")
    lines.append("")

    with open(path, "w") as f:
        f.write("\n".join(lines))
    return path
