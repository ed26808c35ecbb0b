"""Mesh construction helpers for reference domains and junction patches.

These build the grids consumed through `TriMesh`; scenario presets write them
to mesh files or pass them in memory. Two generators are provided: a
structured split-quad mesher for unions of axis-aligned rectangles (full 2D
reference domains) and a fan-plus-refine mesher for junction-shaped polygons
(local 2D patches).
"""

from __future__ import annotations

import numpy as np

from .geometry import (
    GeometryError,
    JunctionGeometry,
    MeshError,
    TriMesh,
    point_in_polygon,
)


def rect_union_mesh(rects, dx, tag_segments=None, polygons=()):
    """Triangulate a union of axis-aligned rectangles with split quads.

    rects: iterable of (x0, y0, x1, y1); all coordinates must sit on the dx
    grid. polygons: extra footprint regions (vertex arrays) rasterized by cell
    center. tag_segments: list of ((ax, ay), (bx, by), tag) assigning tags to
    boundary edges lying on those segments; anything else becomes a wall.
    """
    rects = [tuple(map(float, r)) for r in rects]
    if not rects:
        raise MeshError("no rectangles given")
    xs = [r[0] for r in rects] + [r[2] for r in rects]
    ys = [r[1] for r in rects] + [r[3] for r in rects]
    for p in polygons:
        xs += list(np.asarray(p)[:, 0])
        ys += list(np.asarray(p)[:, 1])
    x_min, y_min = min(xs), min(ys)
    # Rectangle corners must sit on the grid; a staircase boundary would
    # silently distort the footprint otherwise.
    for ref, vals in ((x_min, (r[0] for r in rects)), (x_min, (r[2] for r in rects)),
                      (y_min, (r[1] for r in rects)), (y_min, (r[3] for r in rects))):
        for v in vals:
            if abs(v - (ref + round((v - ref) / dx) * dx)) > 1e-9 * max(1.0, abs(v)):
                raise MeshError(f"coordinate {v} does not sit on the dx={dx} grid")
    nx = int(round((max(xs) - x_min) / dx))
    ny = int(round((max(ys) - y_min) / dx))

    cx = x_min + dx * (np.arange(nx) + 0.5)
    cy = y_min + dx * (np.arange(ny) + 0.5)
    CX, CY = np.meshgrid(cx, cy, indexing="ij")
    mask = np.zeros((nx, ny), dtype=bool)
    eps = 1e-9 * dx
    for x0, y0, x1, y1 in rects:
        mask |= (CX > x0 - eps) & (CX < x1 + eps) & (CY > y0 - eps) & (CY < y1 + eps)
    for poly in polygons:
        poly = np.asarray(poly, dtype=float)
        for i, j in np.argwhere(~mask):
            if point_in_polygon((CX[i, j], CY[i, j]), poly):
                mask[i, j] = True
    if not mask.any():
        raise MeshError("empty footprint")

    node_index: dict[tuple, int] = {}
    verts: list[tuple] = []

    def node(i, j):
        key = (i, j)
        if key not in node_index:
            node_index[key] = len(verts)
            verts.append((x_min + i * dx, y_min + j * dx))
        return node_index[key]

    tris = []
    for i in range(nx):
        for j in range(ny):
            if not mask[i, j]:
                continue
            v00, v10 = node(i, j), node(i + 1, j)
            v11, v01 = node(i + 1, j + 1), node(i, j + 1)
            tris.append((v00, v10, v11))
            tris.append((v00, v11, v01))

    segs = []
    for a, b, tag in tag_segments or ():
        a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
        L = np.linalg.norm(b - a)
        segs.append((a, (b - a) / L, L, tag))

    def classify(mid):
        for a, d, L, tag in segs:
            w = mid - a
            t = np.dot(w, d)
            if -eps <= t <= L + eps and abs(w[0] * d[1] - w[1] * d[0]) < 10 * eps:
                return tag
        return "wall"

    tags = {}

    def add_boundary(na, nb):
        mid = 0.5 * (np.asarray(verts[na]) + np.asarray(verts[nb]))
        tags[(min(na, nb), max(na, nb))] = classify(mid)

    inside = lambda i, j: 0 <= i < nx and 0 <= j < ny and mask[i, j]
    for i in range(nx):
        for j in range(ny):
            if not mask[i, j]:
                continue
            if not inside(i - 1, j):
                add_boundary(node(i, j), node(i, j + 1))
            if not inside(i + 1, j):
                add_boundary(node(i + 1, j), node(i + 1, j + 1))
            if not inside(i, j - 1):
                add_boundary(node(i, j), node(i + 1, j))
            if not inside(i, j + 1):
                add_boundary(node(i, j + 1), node(i + 1, j + 1))

    return TriMesh(np.array(verts), np.array(tris, dtype=int), tags)


def fan_refine_mesh(geometry: JunctionGeometry, refinements: int = 2) -> TriMesh:
    """Triangulate a junction polygon by fanning from the centroid and refining.

    Uniform refinement (each triangle into four) keeps symmetric polygons
    symmetric and subdivides coupling edges evenly. The polygon must be
    star-shaped with respect to its centroid.
    """
    center = geometry.centroid
    verts = [tuple(center)]
    index = {tuple(center): 0}

    def vid(p):
        key = (round(p[0], 12), round(p[1], 12))
        if key not in index:
            index[key] = len(verts)
            verts.append(key)
        return index[key]

    tris = []
    btags = {}
    for e in geometry.edges:
        ia, ib = vid(e.a), vid(e.b)
        a, b = np.asarray(verts[ia]), np.asarray(verts[ib])
        cross = (a[0] - center[0]) * (b[1] - center[1]) - (a[1] - center[1]) * (
            b[0] - center[0]
        )
        if cross <= 0.0:
            raise GeometryError("polygon is not star-shaped from its centroid")
        tris.append((0, ia, ib))
        tag = e.kind if e.kind == "wall" else f"coupling:{e.channel}:{e.channel_end}"
        btags[(min(ia, ib), max(ia, ib))] = tag

    for _ in range(refinements):
        new_tris = []
        new_btags = {}

        def midpoint(i, j):
            p = 0.5 * (np.asarray(verts[i]) + np.asarray(verts[j]))
            return vid(p)

        boundary = dict(btags)
        for i0, i1, i2 in tris:
            m01, m12, m20 = midpoint(i0, i1), midpoint(i1, i2), midpoint(i2, i0)
            new_tris += [
                (i0, m01, m20),
                (m01, i1, m12),
                (m20, m12, i2),
                (m01, m12, m20),
            ]
        for (ia, ib), tag in boundary.items():
            m = midpoint(ia, ib)
            new_btags[(min(ia, m), max(ia, m))] = tag
            new_btags[(min(m, ib), max(m, ib))] = tag
        tris, btags = new_tris, new_btags

    return TriMesh(np.array(verts, dtype=float), np.array(tris, dtype=int), btags)
