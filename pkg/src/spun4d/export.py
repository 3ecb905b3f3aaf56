"""Sampling, projection to R^3, hyperplane slicing (motion pictures), meshing,
and file export (OBJ / PLY / CSV / JSON)."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import BadAxes
from .poly import Interval

__all__ = [
    "Grid4", "Grid3", "SliceCurveSet", "SurfaceMesh",
    "sample_surface", "project", "slice_surface", "to_mesh",
    "export_mesh", "export_grid_csv", "export_slices", "load_grid_csv",
]

AXIS_NAMES = "xyzw"
FLOAT_FMT = "%.9g"


@dataclass(frozen=True)
class Grid4:
    """Tensor sampling of a surface; points[i, j] is the image of (tvals[i], svals[j])."""

    tvals: np.ndarray
    svals: np.ndarray
    points: np.ndarray  # (n_t, n_s, 4)
    seam_duplicated: bool
    pole_low: bool
    pole_high: bool


@dataclass(frozen=True)
class Grid3:
    tvals: np.ndarray
    svals: np.ndarray
    points: np.ndarray  # (n_t, n_s, 3)
    seam_duplicated: bool
    pole_low: bool
    pole_high: bool


@dataclass(frozen=True)
class SliceCurveSet:
    """Cross-section of a surface by a coordinate hyperplane."""

    axis: str
    slice_value: float
    curves: tuple[np.ndarray, ...]  # each (m, 3), remaining coordinates
    closed: tuple[bool, ...]

    def to_json(self) -> dict:
        return {
            "type": "slice_curve_set",
            "axis": self.axis,
            "slice_value": self.slice_value,
            "curves": [
                {"closed": bool(c), "points": [[float(x) for x in p] for p in pts]}
                for pts, c in zip(self.curves, self.closed)
            ],
        }


@dataclass(frozen=True)
class SurfaceMesh:
    vertices: np.ndarray  # (V, 3)
    faces: np.ndarray     # (F, 3) int indices
    closed: bool = True

    @property
    def edge_count(self) -> int:
        return len(self._edge_multiplicity())

    def _edge_multiplicity(self) -> dict:
        mult: dict[tuple[int, int], int] = {}
        for a, b, c in self.faces:
            for e in ((a, b), (b, c), (c, a)):
                key = (min(e), max(e))
                mult[key] = mult.get(key, 0) + 1
        return mult

    def euler_characteristic(self) -> int:
        return len(self.vertices) - self.edge_count + len(self.faces)

    def is_watertight(self) -> bool:
        return all(m == 2 for m in self._edge_multiplicity().values())


def sample_surface(s, n_t: int, n_s: int) -> Grid4:
    """Uniform grid over the domain rectangle, including both theta endpoints
    (the seam row is duplicated and flagged)."""
    if n_t < 2 or n_s < 2:
        raise ValueError("grid sizes must be >= 2")
    tvals = s.t_dom.sample(n_t)
    svals = s.s_dom.sample(n_s)
    pts = s.eval_grid(tvals, svals)
    return Grid4(tvals, svals, pts, s.periodic_s, s.pole_low, s.pole_high)


def _axes_indices(spec: str) -> list[int]:
    if len(spec) != 3 or len(set(spec)) != 3 or any(c not in AXIS_NAMES for c in spec):
        raise BadAxes(f"axes spec must be 3 distinct letters from 'xyzw', got {spec!r}")
    return [AXIS_NAMES.index(c) for c in spec]


def project(grid: Grid4, spec) -> Grid3:
    """Coordinate-triple selection (e.g. "xzw") or a general 3x4 linear
    projection applied pointwise."""
    if isinstance(spec, str):
        idx = _axes_indices(spec)
        pts = grid.points[..., idx]
    else:
        M = np.asarray(spec, float)
        if M.shape != (3, 4):
            raise BadAxes(f"projection matrix must be 3x4, got {M.shape}")
        if np.linalg.matrix_rank(M) < 3:
            raise BadAxes("projection matrix rows must be independent")
        pts = grid.points @ M.T
    return Grid3(grid.tvals, grid.svals, pts, grid.seam_duplicated,
                 grid.pole_low, grid.pole_high)


# -- marching squares -------------------------------------------------------

def _cell_segments(field, tvals, svals, value, center_field):
    """Marching squares on the parameter grid.

    Returns segments as pairs of edge keys plus the interpolated parameter
    location of the crossing on each edge.  Edge keys: ('h', i, j) is the edge
    from node (i, j) to (i+1, j); ('v', i, j) from (i, j) to (i, j+1).
    Saddle cells are disambiguated by the sign of the true field at the cell
    center.
    """
    v = field - value
    tiny = np.finfo(float).tiny
    v = np.where(v == 0.0, tiny, v)  # nodes exactly on the level count as positive
    pos = v > 0.0
    nt, ns = v.shape
    crossings: dict[tuple, tuple[float, float]] = {}

    def edge_point(kind, i, j):
        key = (kind, i, j)
        if key not in crossings:
            if kind == "h":
                a, b = v[i, j], v[i + 1, j]
                frac = a / (a - b)
                crossings[key] = (tvals[i] + frac * (tvals[i + 1] - tvals[i]), svals[j])
            else:
                a, b = v[i, j], v[i, j + 1]
                frac = a / (a - b)
                crossings[key] = (tvals[i], svals[j] + frac * (svals[j + 1] - svals[j]))
        return key

    segments = []
    for i in range(nt - 1):
        for j in range(ns - 1):
            code = (pos[i, j] << 0) | (pos[i + 1, j] << 1) | (pos[i + 1, j + 1] << 2) | (pos[i, j + 1] << 3)
            if code in (0, 15):
                continue
            # edges of the cell: bottom (h,i,j), right (v,i+1,j), top (h,i,j+1), left (v,i,j)
            bottom = ("h", i, j)
            right = ("v", i + 1, j)
            top = ("h", i, j + 1)
            left = ("v", i, j)
            table = {
                1: [(bottom, left)], 2: [(bottom, right)], 3: [(right, left)],
                4: [(right, top)], 6: [(bottom, top)], 7: [(top, left)],
                8: [(top, left)], 9: [(bottom, top)], 11: [(right, top)],
                12: [(right, left)], 13: [(bottom, right)], 14: [(bottom, left)],
            }
            if code in (5, 10):
                center_pos = center_field[i, j] > value
                if (code == 5) == center_pos:
                    pairs = [(bottom, right), (top, left)]
                else:
                    pairs = [(bottom, left), (right, top)]
            else:
                pairs = table[code]
            for ka, kb in pairs:
                segments.append((edge_point(*ka), edge_point(*kb)))
    return segments, crossings


def _chain_segments(segments):
    """Join segments sharing edge keys into polylines; returns (key lists, closed flags)."""
    adj: dict[tuple, list[int]] = {}
    for idx, (a, b) in enumerate(segments):
        adj.setdefault(a, []).append(idx)
        adj.setdefault(b, []).append(idx)
    used = [False] * len(segments)
    chains = []

    def walk(start_key, seg_idx):
        chain = [start_key]
        key, idx = start_key, seg_idx
        while True:
            used[idx] = True
            a, b = segments[idx]
            key = b if key == a else a
            if key == chain[0]:
                return chain, True  # loop closed; start point not repeated
            chain.append(key)
            nxt = [k for k in adj.get(key, []) if not used[k]]
            if not nxt:
                return chain, False
            idx = nxt[0]

    for idx in range(len(segments)):
        if used[idx]:
            continue
        a, b = segments[idx]
        # start from a dangling end when there is one, so open chains come out whole
        start = a if len(adj[a]) == 1 else (b if len(adj[b]) == 1 else a)
        chains.append(walk(start, idx))
    return chains


def slice_surface(s, axis: str, value: float, n_t: int = 128, n_s: int = 128) -> SliceCurveSet:
    """Marching-squares cross-section of the surface by {coordinate == value}.

    The level set is traced on the parameter grid of the chosen coordinate,
    then mapped through the remaining three coordinates.
    """
    if n_t < 64 or n_s < 64:
        raise ValueError("slice grid must be at least 64x64")
    if axis not in AXIS_NAMES:
        raise BadAxes(f"axis must be one of 'xyzw', got {axis!r}")
    ci = AXIS_NAMES.index(axis)
    keep = [i for i in range(4) if i != ci]
    tvals = s.t_dom.sample(n_t)
    svals = s.s_dom.sample(n_s)
    pts = s.eval_grid(tvals, svals)
    field = pts[..., ci]
    # true field at cell centers resolves saddle-cell ambiguity
    tc = 0.5 * (tvals[:-1] + tvals[1:])
    sc = 0.5 * (svals[:-1] + svals[1:])
    Tc, Sc = np.meshgrid(tc, sc, indexing="ij")
    center = s.evaluate(Tc, Sc)[..., ci]

    segments, crossings = _cell_segments(field, tvals, svals, value, center)
    chains = _chain_segments(segments)
    curves, closed = [], []
    for chain, is_closed in chains:
        params = np.array([crossings[k] for k in chain])
        img = s.evaluate(params[:, 0], params[:, 1])[..., keep]
        curves.append(img)
        closed.append(is_closed)
    return SliceCurveSet(axis, float(value), tuple(curves), tuple(closed))


# -- meshing ----------------------------------------------------------------

def to_mesh(grid: Grid3, weld_seam: bool | None = None, collapse_poles: bool | None = None) -> SurfaceMesh:
    """Triangulate a sampled grid.  Seam rows are welded and pole rows
    collapsed to single vertices (by default, per the grid's own flags), which
    closes spun surfaces into genus-0 meshes."""
    nt, ns, _ = grid.points.shape
    weld = grid.seam_duplicated if weld_seam is None else weld_seam
    poles = (grid.pole_low or grid.pole_high) if collapse_poles is None else collapse_poles

    index = -np.ones((nt, ns), dtype=int)
    verts: list[np.ndarray] = []

    def add_vertex(p) -> int:
        verts.append(np.asarray(p, float))
        return len(verts) - 1

    ns_eff = ns - 1 if weld else ns
    for i in range(nt):
        if poles and grid.pole_low and i == 0:
            vid = add_vertex(grid.points[0].mean(axis=0))
            index[0, :] = vid
            continue
        if poles and grid.pole_high and i == nt - 1:
            vid = add_vertex(grid.points[-1].mean(axis=0))
            index[-1, :] = vid
            continue
        for j in range(ns_eff):
            index[i, j] = add_vertex(grid.points[i, j])
        if weld:
            index[i, ns - 1] = index[i, 0]

    faces = []
    for i in range(nt - 1):
        for j in range(ns - 1):
            a, b = index[i, j], index[i + 1, j]
            c, d = index[i + 1, j + 1], index[i, j + 1]
            for tri in ((a, b, c), (a, c, d)):
                if len(set(tri)) == 3:
                    faces.append(tri)
    mesh = SurfaceMesh(np.array(verts), np.array(faces, dtype=int))
    return mesh


# -- file export ------------------------------------------------------------

def export_mesh(mesh: SurfaceMesh, fmt: str, path) -> None:
    if fmt == "obj":
        with open(path, "w") as fh:
            for v in mesh.vertices:
                fh.write("v " + " ".join(FLOAT_FMT % x for x in v) + "\n")
            for f in mesh.faces:
                fh.write(f"f {f[0] + 1} {f[1] + 1} {f[2] + 1}\n")
    elif fmt == "ply":
        with open(path, "w") as fh:
            fh.write("ply\nformat ascii 1.0\n")
            fh.write(f"element vertex {len(mesh.vertices)}\n")
            fh.write("property float x\nproperty float y\nproperty float z\n")
            fh.write(f"element face {len(mesh.faces)}\n")
            fh.write("property list uchar int vertex_indices\nend_header\n")
            for v in mesh.vertices:
                fh.write(" ".join(FLOAT_FMT % x for x in v) + "\n")
            for f in mesh.faces:
                fh.write(f"3 {f[0]} {f[1]} {f[2]}\n")
    elif fmt == "json":
        with open(path, "w") as fh:
            json.dump({
                "type": "surface_mesh",
                "vertices": [[float(x) for x in v] for v in mesh.vertices],
                "faces": [[int(i) for i in f] for f in mesh.faces],
            }, fh)
    else:
        raise ValueError(f"unsupported mesh format {fmt!r}")


def export_grid_csv(grid, path) -> None:
    """One sample per row: t, theta, then the image coordinates."""
    nt, ns, dim = grid.points.shape
    with open(path, "w") as fh:
        fh.write("t,theta," + ",".join(AXIS_NAMES[:dim]) + "\n")
        for i in range(nt):
            for j in range(ns):
                row = [grid.tvals[i], grid.svals[j], *grid.points[i, j]]
                fh.write(",".join(FLOAT_FMT % x for x in row) + "\n")


def load_grid_csv(path) -> np.ndarray:
    """Rows of an exported grid CSV as a float array (t, theta, coords...)."""
    return np.loadtxt(path, delimiter=",", skiprows=1)


def export_slices(slices, fmt: str, path_pattern: str) -> list[str]:
    """Write one file per SliceCurveSet; pattern must contain '{}' for the index."""
    paths = []
    for i, sl in enumerate(slices):
        path = path_pattern.format(i)
        if fmt == "json":
            with open(path, "w") as fh:
                json.dump(sl.to_json(), fh)
        elif fmt == "csv":
            with open(path, "w") as fh:
                fh.write("curve,closed,c0,c1,c2\n")
                for ci, (pts, closed) in enumerate(zip(sl.curves, sl.closed)):
                    for p in pts:
                        fh.write(f"{ci},{int(closed)}," + ",".join(FLOAT_FMT % x for x in p) + "\n")
        else:
            raise ValueError(f"unsupported slice format {fmt!r}")
        paths.append(path)
    return paths
