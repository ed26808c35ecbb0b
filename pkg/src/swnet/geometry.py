"""Network topology, junction-shaped polygons, and triangular meshes."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

_TOL = 1e-12


class GeometryError(ValueError):
    """Degenerate or inconsistent geometric configuration."""


class MeshError(ValueError):
    """Malformed triangular mesh or mesh file."""


def _rot90ccw(v):
    return np.array([-v[1], v[0]])


def _unit(v):
    n = np.hypot(v[0], v[1])
    if n < _TOL:
        raise GeometryError("zero-length direction vector")
    return np.asarray(v, dtype=float) / n


def polygon_area(vertices: np.ndarray) -> float:
    """Signed shoelace area; positive for counter-clockwise polygons."""
    x, y = vertices[:, 0], vertices[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def polygon_centroid(vertices: np.ndarray) -> np.ndarray:
    x, y = vertices[:, 0], vertices[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cross = x * yn - xn * y
    a = 0.5 * np.sum(cross)
    cx = np.sum((x + xn) * cross) / (6.0 * a)
    cy = np.sum((y + yn) * cross) / (6.0 * a)
    return np.array([cx, cy])


def point_in_polygon(p, vertices: np.ndarray) -> bool:
    """Ray-casting point-in-polygon test (boundary points unspecified)."""
    x, y = p
    inside = False
    n = len(vertices)
    for i in range(n):
        x1, y1 = vertices[i]
        x2, y2 = vertices[(i + 1) % n]
        if (y1 > y) != (y2 > y):
            xi = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            if xi > x:
                inside = not inside
    return inside


def _segments_intersect(p1, p2, q1, q2) -> bool:
    """Proper intersection test for open segments (shared endpoints excluded)."""

    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    d1, d2 = orient(q1, q2, p1), orient(q1, q2, p2)
    d3, d4 = orient(p1, p2, q1), orient(p1, p2, q2)
    return ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0))


@dataclass
class Channel:
    """Straight rectangular channel discretized into uniform 1D cells."""

    id: str
    width: float
    cells: int
    start: np.ndarray
    end: np.ndarray

    def __post_init__(self):
        self.start = np.asarray(self.start, dtype=float)
        self.end = np.asarray(self.end, dtype=float)
        if self.width <= 0.0:
            raise GeometryError(f"channel {self.id}: width must be positive")
        if self.cells < 2:
            raise GeometryError(f"channel {self.id}: need at least 2 cells")
        if self.length <= 0.0:
            raise GeometryError(f"channel {self.id}: zero length")

    @property
    def length(self) -> float:
        return float(np.hypot(*(self.end - self.start)))

    @property
    def axis(self) -> np.ndarray:
        """Unit vector along positive s (start -> end)."""
        return _unit(self.end - self.start)

    @property
    def axis_angle(self) -> float:
        a = self.axis
        return float(np.arctan2(a[1], a[0]))

    @property
    def ds(self) -> float:
        return self.length / self.cells

    def end_point(self, which: str) -> np.ndarray:
        return self.start if which == "start" else self.end

    def outward_dir(self, which: str) -> np.ndarray:
        """Unit vector pointing from the attached junction into the channel."""
        return self.axis if which == "start" else -self.axis

    def point_at(self, s: float) -> np.ndarray:
        return self.start + self.axis * s


@dataclass
class JunctionEdge:
    a: np.ndarray
    b: np.ndarray
    kind: str  # "coupling" or "wall"
    channel: str | None = None
    channel_end: str | None = None

    @property
    def length(self) -> float:
        return float(np.hypot(*(self.b - self.a)))

    @property
    def midpoint(self) -> np.ndarray:
        return 0.5 * (self.a + self.b)

    @property
    def theta(self) -> float:
        """Outward normal angle (edges are stored in CCW traversal order)."""
        t = _unit(self.b - self.a)
        return float(np.arctan2(-t[0], t[1]))


@dataclass
class JunctionGeometry:
    """Junction-shaped polygon with typed edges, built by `build_junction_polygon`."""

    vertices: np.ndarray
    edges: list[JunctionEdge]
    area: float = field(init=False)
    centroid: np.ndarray = field(init=False)

    def __post_init__(self):
        self.area = polygon_area(self.vertices)
        if self.area <= 0.0:
            raise GeometryError("junction polygon is not counter-clockwise or empty")
        self.centroid = polygon_centroid(self.vertices)
        self._validate()

    def _validate(self):
        n = len(self.vertices)
        for i in range(n):
            for j in range(i + 1, n):
                if j == i + 1 or (i == 0 and j == n - 1):
                    continue
                if _segments_intersect(
                    self.vertices[i],
                    self.vertices[(i + 1) % n],
                    self.vertices[j],
                    self.vertices[(j + 1) % n],
                ):
                    raise GeometryError("junction polygon self-intersects")
        for e in self.edges:
            nvec = np.array([np.cos(e.theta), np.sin(e.theta)])
            if np.dot(nvec, e.midpoint - self.centroid) <= 0.0:
                raise GeometryError("junction edge normal points inward")

    @property
    def perimeter(self) -> float:
        return sum(e.length for e in self.edges)

    @property
    def incircle_diameter(self) -> float:
        # Exact for triangles; used as the 2D CFL length scale.
        if not hasattr(self, "_rho"):
            self._rho = 4.0 * self.area / self.perimeter
        return self._rho

    def coupling_edges(self) -> list[JunctionEdge]:
        return [e for e in self.edges if e.kind == "coupling"]


@dataclass
class ConnectedEnd:
    """One channel end attached to a junction, as seen from the junction."""

    channel: str
    end: str  # "start" or "end"
    mouth: np.ndarray  # channel end cross-section center
    direction: np.ndarray  # unit vector from junction into the channel
    width: float


def build_junction_polygon(
    ends: list[ConnectedEnd], junction_point, protrusion: float = 0.1
) -> JunctionGeometry:
    """Construct the junction-shaped 2D element.

    Each channel contributes a coupling edge of length equal to its width,
    placed `protrusion * width` inside the channel mouth and perpendicular to
    the channel axis. Consecutive coupling edges (walking counter-clockwise)
    are joined by extending the facing channel side walls until they meet;
    collinear side walls join directly, and walls that diverge are closed
    through an auxiliary vertex at the nominal junction point.
    """
    if len(ends) < 2:
        raise GeometryError("a junction needs at least two channels")
    P = np.asarray(junction_point, dtype=float)
    scale = max(e.width for e in ends)

    entries = []
    for e in ends:
        d = _unit(e.direction)
        t = _rot90ccw(d)
        c = np.asarray(e.mouth, dtype=float) + protrusion * e.width * d
        entries.append(
            {
                "end": e,
                "d": d,
                "t": t,
                "A": c - 0.5 * e.width * t,
                "B": c + 0.5 * e.width * t,
                "angle": np.arctan2(d[1], d[0]) % (2.0 * np.pi),
                "offset": float(np.dot(np.asarray(e.mouth, dtype=float) - P, t)),
            }
        )
    entries.sort(key=lambda r: (r["angle"], r["offset"]))

    tol = 1e-9 * scale
    verts: list[np.ndarray] = []
    edges: list[JunctionEdge] = []

    def push_wall(a, b):
        if np.hypot(*(b - a)) > tol:
            edges.append(JunctionEdge(a=a.copy(), b=b.copy(), kind="wall"))
            verts.append(b.copy())

    for k, cur in enumerate(entries):
        if k == 0:
            verts.append(cur["A"].copy())
        edges.append(
            JunctionEdge(
                a=cur["A"].copy(),
                b=cur["B"].copy(),
                kind="coupling",
                channel=cur["end"].channel,
                channel_end=cur["end"].end,
            )
        )
        verts.append(cur["B"].copy())
        nxt = entries[(k + 1) % len(entries)]
        Bi, Aj = cur["B"], nxt["A"]
        di, dj = cur["d"], nxt["d"]
        gap = Aj - Bi
        if np.hypot(*gap) <= tol:
            pass  # edges share a vertex
        else:
            cross = di[0] * dj[1] - di[1] * dj[0]
            if abs(cross) < 1e-12:
                if abs(di[0] * gap[1] - di[1] * gap[0]) < tol:
                    push_wall(Bi, Aj)  # collinear side walls
                else:
                    raise GeometryError(
                        "adjacent side walls are parallel and non-intersecting "
                        f"(channels {cur['end'].channel} / {nxt['end'].channel})"
                    )
            else:
                # Bi - t1*di = Aj - t2*dj; both t >= 0 means the walls meet on
                # the junction side of the coupling edges.
                rhs = Bi - Aj
                t1 = (rhs[0] * dj[1] - rhs[1] * dj[0]) / cross
                t2 = (rhs[0] * di[1] - rhs[1] * di[0]) / cross
                if t1 >= -tol and t2 >= -tol:
                    X = Bi - t1 * di
                    push_wall(Bi, X)
                    push_wall(X, Aj)
                else:
                    push_wall(Bi, P)
                    push_wall(P, Aj)

    if np.hypot(*(verts[-1] - verts[0])) <= tol:
        verts.pop()
    return JunctionGeometry(vertices=np.array(verts), edges=edges)


# ---------------------------------------------------------------------------
# Triangular meshes
# ---------------------------------------------------------------------------

BOUNDARY_TAGS = ("wall", "transparent", "inflow", "prescribed")


class TriMesh:
    """Unstructured triangular mesh with edge adjacency and boundary tags.

    Boundary tags are strings: "wall", "transparent", "inflow", or
    "coupling:<channel_id>:<start|end>".
    """

    def __init__(self, vertices, triangles, boundary_tags: dict):
        self.vertices = np.asarray(vertices, dtype=float)
        self.triangles = np.asarray(triangles, dtype=int)
        if self.triangles.ndim != 2 or self.triangles.shape[1] != 3:
            raise MeshError("triangles must be (T, 3) vertex indices")
        self._build(boundary_tags)

    def _build(self, boundary_tags):
        V = self.vertices
        tri = self.triangles
        p0, p1, p2 = V[tri[:, 0]], V[tri[:, 1]], V[tri[:, 2]]
        cross = (p1[:, 0] - p0[:, 0]) * (p2[:, 1] - p0[:, 1]) - (
            p1[:, 1] - p0[:, 1]
        ) * (p2[:, 0] - p0[:, 0])
        if np.any(cross <= 0.0):
            bad = int(np.argmax(cross <= 0.0))
            raise MeshError(f"triangle {bad} is not counter-clockwise (or degenerate)")
        self.areas = 0.5 * cross
        self.centroids = (p0 + p1 + p2) / 3.0
        per = (
            np.linalg.norm(p1 - p0, axis=1)
            + np.linalg.norm(p2 - p1, axis=1)
            + np.linalg.norm(p0 - p2, axis=1)
        )
        self.incircle_diameters = 4.0 * self.areas / per

        half_edges: dict[tuple, list] = {}
        for t in range(len(tri)):
            for k in range(3):
                a, b = int(tri[t, k]), int(tri[t, (k + 1) % 3])
                half_edges.setdefault((min(a, b), max(a, b)), []).append((t, a, b))

        tagged = {}
        for (a, b), tag in boundary_tags.items():
            tagged[(min(a, b), max(a, b))] = tag

        left, right, va, vb, tags = [], [], [], [], []
        for key, uses in half_edges.items():
            if len(uses) > 2:
                raise MeshError(f"non-manifold edge {key}: shared by {len(uses)} triangles")
            if len(uses) == 2:
                (t1, a1, b1), (t2, a2, b2) = uses
                if (a1, b1) == (a2, b2):
                    raise MeshError(f"inconsistent triangle orientation at edge {key}")
                left.append(t1)
                right.append(t2)
                va.append(a1)
                vb.append(b1)
                tags.append(None)
            else:
                (t1, a1, b1) = uses[0]
                if key not in tagged:
                    raise MeshError(f"boundary edge {key} has no tag")
                left.append(t1)
                right.append(-1)
                va.append(a1)
                vb.append(b1)
                tags.append(tagged[key])
        extra = set(tagged) - {
            (min(a, b), max(a, b)) for a, b, r in zip(va, vb, right) if r == -1
        }
        if extra:
            raise MeshError(f"tags given for non-boundary edges: {sorted(extra)}")

        self.edge_left = np.array(left, dtype=int)
        self.edge_right = np.array(right, dtype=int)
        self.edge_va = np.array(va, dtype=int)
        self.edge_vb = np.array(vb, dtype=int)
        self.edge_tags = tags
        evec = V[self.edge_vb] - V[self.edge_va]
        self.edge_lengths = np.linalg.norm(evec, axis=1)
        if np.any(self.edge_lengths <= 0.0):
            raise MeshError("zero-length edge")
        tdir = evec / self.edge_lengths[:, None]
        # Half-edges are stored CCW for the left triangle, so the outward
        # normal (from left) is the tangent rotated -90 degrees.
        self.edge_thetas = np.arctan2(-tdir[:, 0], tdir[:, 1])
        self.edge_midpoints = 0.5 * (V[self.edge_va] + V[self.edge_vb])

        self.interior = np.flatnonzero(self.edge_right >= 0)
        self.boundary = np.flatnonzero(self.edge_right < 0)

        self.neighbors = [[] for _ in range(len(tri))]
        for e in self.interior:
            self.neighbors[self.edge_left[e]].append(self.edge_right[e])
            self.neighbors[self.edge_right[e]].append(self.edge_left[e])

    @property
    def n_cells(self) -> int:
        return len(self.triangles)

    def boundary_edges_by_tag(self, prefix: str) -> np.ndarray:
        return np.array(
            [e for e in self.boundary if self.edge_tags[e].split(":")[0] == prefix],
            dtype=int,
        )

    def total_area(self) -> float:
        return float(np.sum(self.areas))

    def cell_containing(self, p) -> int:
        """Index of the triangle containing point p (nearest centroid fallback)."""
        p = np.asarray(p, dtype=float)
        V, tri = self.vertices, self.triangles
        for t in np.argsort(np.linalg.norm(self.centroids - p, axis=1))[:32]:
            a, b, c = V[tri[t, 0]], V[tri[t, 1]], V[tri[t, 2]]
            d1 = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])
            d2 = (c[0] - b[0]) * (p[1] - b[1]) - (c[1] - b[1]) * (p[0] - b[0])
            d3 = (a[0] - c[0]) * (p[1] - c[1]) - (a[1] - c[1]) * (p[0] - c[0])
            if d1 >= -1e-12 and d2 >= -1e-12 and d3 >= -1e-12:
                return int(t)
        return int(np.argmin(np.linalg.norm(self.centroids - p, axis=1)))


def load_trimesh(path) -> TriMesh:
    """Read a mesh file: header "nv nt nb", vertex, triangle and boundary lines."""
    with open(path) as f:
        lines = [ln.strip() for ln in f if ln.strip() and not ln.startswith("#")]
    try:
        nv, nt, nb = (int(tok) for tok in lines[0].split())
    except (ValueError, IndexError) as exc:
        raise MeshError(f"{path}: bad header line: {lines[0]!r}") from exc
    if len(lines) != 1 + nv + nt + nb:
        raise MeshError(
            f"{path}: expected {1 + nv + nt + nb} lines, found {len(lines)}"
        )
    try:
        verts = np.array(
            [[float(tok) for tok in ln.split()] for ln in lines[1 : 1 + nv]]
        )
        tris = np.array(
            [[int(tok) for tok in ln.split()] for ln in lines[1 + nv : 1 + nv + nt]]
        )
    except ValueError as exc:
        raise MeshError(f"{path}: malformed vertex or triangle line") from exc
    tags = {}
    for ln in lines[1 + nv + nt :]:
        toks = ln.split()
        if len(toks) != 3:
            raise MeshError(f"{path}: malformed boundary line: {ln!r}")
        a, b, tag = int(toks[0]), int(toks[1]), toks[2]
        kind = tag.split(":")[0]
        if kind not in BOUNDARY_TAGS and kind != "coupling":
            raise MeshError(f"{path}: unknown boundary tag {tag!r}")
        tags[(min(a, b), max(a, b))] = tag
    return TriMesh(verts, tris, tags)


def save_trimesh(path, vertices, triangles, boundary_tags: dict):
    with open(path, "w") as f:
        f.write(f"{len(vertices)} {len(triangles)} {len(boundary_tags)}\n")
        for x, y in vertices:
            f.write(f"{float(x)!r} {float(y)!r}\n")
        for i, j, k in triangles:
            f.write(f"{int(i)} {int(j)} {int(k)}\n")
        for (a, b), tag in boundary_tags.items():
            f.write(f"{int(a)} {int(b)} {tag}\n")
