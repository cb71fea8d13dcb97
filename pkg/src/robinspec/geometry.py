"""Domain descriptions, mesh generation/refinement, and geometric functionals.

Supported domains are intervals, simple planar polygons (counterclockwise),
and disks approximated by inscribed polygons whose boundary nodes sit on the
circle.  A subset of the boundary (gamma) is selected at build time and
tracked through refinement via per-edge markers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from .errors import ArgumentError, GeometryError, UnsupportedDomainError

GAMMA = 1
NOT_GAMMA = 0

_MAX_BUILD_REFINES = 30


# ---------------------------------------------------------------------------
# Boundary-subset selectors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GammaSelect:
    """Which part of the boundary carries the gamma marker.

    kind is one of ``all``, ``none``, ``sides`` (polygon side / interval
    endpoint indices) or ``arcs`` (angular ranges on a disk, radians).
    """

    kind: str = "all"
    sides: frozenset = frozenset()
    arcs: tuple = ()


def gamma_all() -> GammaSelect:
    return GammaSelect("all")


def gamma_none() -> GammaSelect:
    return GammaSelect("none")


def gamma_sides(*indices: int) -> GammaSelect:
    return GammaSelect("sides", sides=frozenset(int(i) for i in indices))


def gamma_arcs(ranges: Sequence[Tuple[float, float]]) -> GammaSelect:
    return GammaSelect("arcs", arcs=tuple((float(a), float(b)) for a, b in ranges))


# ---------------------------------------------------------------------------
# Domains
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DomainSpec:
    """Description of an interval, polygon, or disk with a gamma selector."""

    kind: str
    a: float = 0.0
    b: float = 1.0
    vertices: tuple = ()
    center: tuple = (0.0, 0.0)
    radius: float = 1.0
    segments: int = 16
    gamma: GammaSelect = field(default_factory=gamma_all)

    @property
    def dim(self) -> int:
        return 1 if self.kind == "interval" else 2


def interval(a: float, b: float, gamma: Optional[GammaSelect] = None) -> DomainSpec:
    if not b > a:
        raise GeometryError(f"interval needs a < b, got ({a}, {b})")
    return DomainSpec("interval", a=float(a), b=float(b), gamma=gamma or gamma_all())


def polygon(vertices: Sequence[Sequence[float]], gamma: Optional[GammaSelect] = None) -> DomainSpec:
    verts = tuple((float(x), float(y)) for x, y in vertices)
    if len(verts) < 3:
        raise GeometryError("polygon needs at least 3 vertices")
    if _signed_area(verts) <= 0.0:
        raise GeometryError("polygon vertices must be counterclockwise")
    if not _is_simple(verts):
        raise GeometryError("polygon is self-intersecting")
    return DomainSpec("polygon", vertices=verts, gamma=gamma or gamma_all())


def disk(center: Sequence[float], radius: float, segments: int = 16,
         gamma: Optional[GammaSelect] = None) -> DomainSpec:
    if radius <= 0:
        raise GeometryError("disk radius must be positive")
    if segments < 8:
        raise GeometryError("disk needs at least 8 boundary segments")
    return DomainSpec("disk", center=(float(center[0]), float(center[1])),
                      radius=float(radius), segments=int(segments),
                      gamma=gamma or gamma_all())


def unit_square(gamma: Optional[GammaSelect] = None) -> DomainSpec:
    return polygon([(0, 0), (1, 0), (1, 1), (0, 1)], gamma=gamma)


def rectangle(width: float, height: float, gamma: Optional[GammaSelect] = None) -> DomainSpec:
    return polygon([(0, 0), (width, 0), (width, height), (0, height)], gamma=gamma)


def _signed_area(verts) -> float:
    s = 0.0
    n = len(verts)
    for i in range(n):
        x0, y0 = verts[i]
        x1, y1 = verts[(i + 1) % n]
        s += x0 * y1 - x1 * y0
    return 0.5 * s


def _segments_intersect(p, q, r, s) -> bool:
    """Proper intersection test for open segments pq and rs."""
    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    d1 = orient(r, s, p)
    d2 = orient(r, s, q)
    d3 = orient(p, q, r)
    d4 = orient(p, q, s)
    return ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0))


def _is_simple(verts) -> bool:
    n = len(verts)
    for i in range(n):
        for j in range(i + 1, n):
            if abs(i - j) in (0, 1) or (i == 0 and j == n - 1):
                continue
            if _segments_intersect(verts[i], verts[(i + 1) % n],
                                   verts[j], verts[(j + 1) % n]):
                return False
    return True


# ---------------------------------------------------------------------------
# Mesh
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Mesh:
    """Conforming simplex mesh with marked boundary.

    nodes: (Nv, dim) float coordinates.
    elements: (Ne, dim+1) int vertex indices, positively oriented in 2D.
    boundary: (Nb, dim) int — node pairs in 2D, singletons in 1D.
    boundary_markers: (Nb,) int, 1 on the gamma subset, 0 elsewhere.
    projection: optional circle (cx, cy, r) onto which boundary nodes are
        snapped after refinement (disk domains only).
    """

    dim: int
    nodes: np.ndarray
    elements: np.ndarray
    boundary: np.ndarray
    boundary_markers: np.ndarray
    level: int = 0
    projection: Optional[tuple] = None

    def __post_init__(self):
        for arr in (self.nodes, self.elements, self.boundary, self.boundary_markers):
            arr.setflags(write=False)

    @property
    def num_nodes(self) -> int:
        return self.nodes.shape[0]

    @property
    def num_elements(self) -> int:
        return self.elements.shape[0]

    def __repr__(self):
        return (f"Mesh(dim={self.dim}, nodes={self.num_nodes}, "
                f"elements={self.num_elements}, level={self.level})")


def _make_mesh(dim, nodes, elements, boundary, markers, level=0, projection=None) -> Mesh:
    return Mesh(dim,
                np.ascontiguousarray(nodes, dtype=float),
                np.ascontiguousarray(elements, dtype=np.int64),
                np.ascontiguousarray(boundary, dtype=np.int64),
                np.ascontiguousarray(markers, dtype=np.int64),
                level=level, projection=projection)


def build_mesh(domain: DomainSpec, target_h: float) -> Mesh:
    """Build a conforming mesh with max element diameter <= target_h.

    Disks are meshed as inscribed polygons with all boundary nodes on the
    circle; refining a disk mesh keeps projecting new boundary nodes.
    """
    if target_h <= 0:
        raise ArgumentError(f"target_h must be positive, got {target_h}")
    if domain.kind == "interval":
        return _build_interval(domain, target_h)
    if domain.kind == "polygon":
        mesh = _initial_polygon_mesh(domain)
    elif domain.kind == "disk":
        mesh = _initial_disk_mesh(domain)
    else:
        raise GeometryError(f"unknown domain kind {domain.kind!r}")
    for _ in range(_MAX_BUILD_REFINES):
        if max_element_diameter(mesh) <= target_h:
            break
        mesh = refine(mesh)
    else:
        raise GeometryError("target_h too small: refinement limit reached")
    return _make_mesh(mesh.dim, mesh.nodes, mesh.elements, mesh.boundary,
                      mesh.boundary_markers, level=0, projection=mesh.projection)


def _build_interval(domain: DomainSpec, target_h: float) -> Mesh:
    a, b = domain.a, domain.b
    n = max(1, int(math.ceil((b - a) / target_h - 1e-12)))
    nodes = np.linspace(a, b, n + 1).reshape(-1, 1)
    elements = np.column_stack([np.arange(n), np.arange(1, n + 1)])
    boundary = np.array([[0], [n]])
    sel = domain.gamma
    if sel.kind == "all":
        markers = np.array([GAMMA, GAMMA])
    elif sel.kind == "none":
        markers = np.array([NOT_GAMMA, NOT_GAMMA])
    elif sel.kind == "sides":
        markers = np.array([GAMMA if 0 in sel.sides else NOT_GAMMA,
                            GAMMA if 1 in sel.sides else NOT_GAMMA])
    else:
        raise ArgumentError("interval gamma selector must be all/none/sides")
    return _make_mesh(1, nodes, elements, boundary, markers)


def _side_markers(domain: DomainSpec, n_sides: int) -> np.ndarray:
    sel = domain.gamma
    if sel.kind == "all":
        return np.full(n_sides, GAMMA)
    if sel.kind == "none":
        return np.full(n_sides, NOT_GAMMA)
    if sel.kind == "sides":
        bad = [i for i in sel.sides if not 0 <= i < n_sides]
        if bad:
            raise ArgumentError(f"gamma side indices out of range: {bad}")
        return np.array([GAMMA if i in sel.sides else NOT_GAMMA for i in range(n_sides)])
    raise ArgumentError(f"selector kind {sel.kind!r} not valid for this domain")


def _arc_markers(domain: DomainSpec, thetas_mid: np.ndarray) -> np.ndarray:
    sel = domain.gamma
    if sel.kind == "all":
        return np.full(len(thetas_mid), GAMMA)
    if sel.kind == "none":
        return np.full(len(thetas_mid), NOT_GAMMA)
    if sel.kind != "arcs":
        raise ArgumentError("disk gamma selector must be all/none/arcs")
    two_pi = 2.0 * math.pi
    t = np.mod(thetas_mid, two_pi)
    markers = np.zeros(len(t), dtype=np.int64)
    for lo, hi in sel.arcs:
        lo, hi = lo % two_pi, hi % two_pi
        if lo <= hi:
            markers |= (t >= lo) & (t <= hi)
        else:  # wrap-around arc
            markers |= (t >= lo) | (t <= hi)
    return markers


def _initial_polygon_mesh(domain: DomainSpec) -> Mesh:
    verts = np.array(domain.vertices, dtype=float)
    n = len(verts)
    tris = _ear_clip(verts)
    boundary = np.array([[i, (i + 1) % n] for i in range(n)])
    markers = _side_markers(domain, n)
    return _make_mesh(2, verts, np.array(tris), boundary, markers)


def _initial_disk_mesh(domain: DomainSpec) -> Mesh:
    cx, cy = domain.center
    r, n = domain.radius, domain.segments
    theta = 2.0 * math.pi * np.arange(n) / n
    ring = np.column_stack([cx + r * np.cos(theta), cy + r * np.sin(theta)])
    nodes = np.vstack([[[cx, cy]], ring])
    elements = np.array([[0, 1 + i, 1 + (i + 1) % n] for i in range(n)])
    boundary = np.array([[1 + i, 1 + (i + 1) % n] for i in range(n)])
    theta_mid = theta + math.pi / n
    markers = _arc_markers(domain, theta_mid)
    return _make_mesh(2, nodes, elements, boundary, markers,
                      projection=(cx, cy, r))


def _point_in_triangle(p, a, b, c, eps) -> bool:
    def orient(u, v, w):
        return (v[0] - u[0]) * (w[1] - u[1]) - (v[1] - u[1]) * (w[0] - u[0])
    return (orient(a, b, p) > eps and orient(b, c, p) > eps and orient(c, a, p) > eps)


def _ear_clip(verts: np.ndarray):
    """Triangulate a simple ccw polygon by ear clipping."""
    n = len(verts)
    scale = float(np.max(np.abs(verts))) or 1.0
    eps = 1e-14 * scale * scale
    idx = list(range(n))
    tris = []
    while len(idx) > 3:
        clipped = False
        m = len(idx)
        for k in range(m):
            i0, i1, i2 = idx[(k - 1) % m], idx[k], idx[(k + 1) % m]
            a, b, c = verts[i0], verts[i1], verts[i2]
            cross = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
            if cross <= eps:  # reflex or collinear corner: not an ear
                continue
            others = (verts[j] for j in idx if j not in (i0, i1, i2))
            if any(_point_in_triangle(p, a, b, c, -eps) for p in others):
                continue
            tris.append((i0, i1, i2))
            idx.pop(k)
            clipped = True
            break
        if not clipped:
            raise GeometryError("ear clipping failed: polygon degenerate or not simple")
    tris.append(tuple(idx))
    return tris


def refine(mesh: Mesh) -> Mesh:
    """Uniform refinement: 1D bisection, 2D red refinement (4 children).

    Boundary markers are inherited by child edges; on disk meshes the new
    boundary midpoints are projected back onto the circle.
    """
    if mesh.dim == 1:
        return _refine_1d(mesh)
    return _refine_2d(mesh)


def _refine_1d(mesh: Mesh) -> Mesh:
    nodes = mesh.nodes[:, 0]
    elems = mesh.elements
    mids = 0.5 * (nodes[elems[:, 0]] + nodes[elems[:, 1]])
    mid_idx = mesh.num_nodes + np.arange(len(mids))
    new_nodes = np.concatenate([nodes, mids]).reshape(-1, 1)
    left = np.column_stack([elems[:, 0], mid_idx])
    right = np.column_stack([mid_idx, elems[:, 1]])
    new_elems = np.vstack([left, right])
    return _make_mesh(1, new_nodes, new_elems, mesh.boundary, mesh.boundary_markers,
                      level=mesh.level + 1, projection=mesh.projection)


def _refine_2d(mesh: Mesh) -> Mesh:
    elems = mesh.elements
    nv = mesh.num_nodes
    edges = {}

    def midpoint(i, j):
        key = (i, j) if i < j else (j, i)
        if key not in edges:
            edges[key] = nv + len(edges)
        return edges[key]

    children = np.empty((4 * len(elems), 3), dtype=np.int64)
    for t, (v0, v1, v2) in enumerate(elems):
        m01 = midpoint(v0, v1)
        m12 = midpoint(v1, v2)
        m20 = midpoint(v2, v0)
        children[4 * t + 0] = (v0, m01, m20)
        children[4 * t + 1] = (v1, m12, m01)
        children[4 * t + 2] = (v2, m20, m12)
        children[4 * t + 3] = (m01, m12, m20)

    new_coords = np.empty((len(edges), 2))
    for (i, j), idx in edges.items():
        new_coords[idx - nv] = 0.5 * (mesh.nodes[i] + mesh.nodes[j])
    nodes = np.vstack([mesh.nodes, new_coords])

    nb = len(mesh.boundary)
    new_bdry = np.empty((2 * nb, 2), dtype=np.int64)
    new_marks = np.empty(2 * nb, dtype=np.int64)
    for e, (v0, v1) in enumerate(mesh.boundary):
        m = midpoint(v0, v1)
        new_bdry[2 * e] = (v0, m)
        new_bdry[2 * e + 1] = (m, v1)
        new_marks[2 * e] = new_marks[2 * e + 1] = mesh.boundary_markers[e]

    if mesh.projection is not None:
        cx, cy, r = mesh.projection
        bnodes = np.unique(new_bdry)
        vec = nodes[bnodes] - (cx, cy)
        norm = np.hypot(vec[:, 0], vec[:, 1])
        nodes[bnodes] = (cx, cy) + vec * (r / norm)[:, None]

    return _make_mesh(2, nodes, children, new_bdry, new_marks,
                      level=mesh.level + 1, projection=mesh.projection)


# ---------------------------------------------------------------------------
# Geometric functionals
# ---------------------------------------------------------------------------

def element_measures(mesh: Mesh) -> np.ndarray:
    """Signed lengths (1D) or areas (2D) per element; all positive on a valid mesh."""
    if mesh.dim == 1:
        x = mesh.nodes[:, 0]
        return x[mesh.elements[:, 1]] - x[mesh.elements[:, 0]]
    p = mesh.nodes[mesh.elements]
    d1 = p[:, 1] - p[:, 0]
    d2 = p[:, 2] - p[:, 0]
    return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])


def max_element_diameter(mesh: Mesh) -> float:
    """Largest element diameter (longest edge in 2D, segment length in 1D)."""
    if mesh.dim == 1:
        return float(np.max(element_measures(mesh)))
    p = mesh.nodes[mesh.elements]
    lengths = [np.linalg.norm(p[:, i] - p[:, j], axis=1)
               for i, j in ((0, 1), (1, 2), (2, 0))]
    return float(np.max(lengths))


def area(mesh: Mesh) -> float:
    """Total volume |Omega|: interval length in 1D, polygon area in 2D."""
    return float(np.sum(element_measures(mesh)))


def boundary_edge_lengths(mesh: Mesh) -> np.ndarray:
    """Surface measure of each boundary facet (1.0 per endpoint in 1D)."""
    if mesh.dim == 1:
        return np.ones(len(mesh.boundary))
    p0 = mesh.nodes[mesh.boundary[:, 0]]
    p1 = mesh.nodes[mesh.boundary[:, 1]]
    return np.linalg.norm(p1 - p0, axis=1)


def boundary_length(mesh: Mesh, subset: str = "all") -> float:
    """Total surface measure of the boundary or of its gamma subset.

    In 1D the surface measure is the counting measure with unit weights.
    """
    lengths = boundary_edge_lengths(mesh)
    if subset == "all":
        return float(lengths.sum())
    if subset == "gamma":
        return float(lengths[mesh.boundary_markers == GAMMA].sum())
    raise ArgumentError(f"subset must be 'all' or 'gamma', got {subset!r}")


def gamma_nodes(mesh: Mesh) -> np.ndarray:
    """Sorted node indices incident to gamma-marked boundary facets."""
    marked = mesh.boundary[mesh.boundary_markers == GAMMA]
    return np.unique(marked)


def boundary_nodes(mesh: Mesh) -> np.ndarray:
    return np.unique(mesh.boundary)


# ---------------------------------------------------------------------------
# Inradius (Chebyshev center) for convex domains
# ---------------------------------------------------------------------------

def _is_convex(verts: np.ndarray) -> bool:
    n = len(verts)
    for i in range(n):
        a, b, c = verts[i], verts[(i + 1) % n], verts[(i + 2) % n]
        cross = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        if cross < -1e-12:
            return False
    return True


def _clip_halfplane(poly, normal, offset):
    """Keep the part of a convex polygon with normal.x <= offset."""
    out = []
    n = len(poly)
    for i in range(n):
        p, q = poly[i], poly[(i + 1) % n]
        fp = normal @ p - offset
        fq = normal @ q - offset
        if fp <= 0:
            out.append(p)
        if (fp <= 0) != (fq <= 0):
            t = fp / (fp - fq)
            out.append(p + t * (q - p))
    return out


def chebyshev_center(domain: DomainSpec) -> Tuple[np.ndarray, float]:
    """Center and radius of the largest inscribed ball of a convex domain.

    Computed by bisection on the radius with a half-plane feasibility test
    (clipping the polygon by inward-shifted edge half-planes), absolute
    tolerance 1e-12 on the radius.
    """
    if domain.kind == "interval":
        return np.array([0.5 * (domain.a + domain.b)]), 0.5 * (domain.b - domain.a)
    if domain.kind == "disk":
        return np.array(domain.center, dtype=float), domain.radius
    verts = np.array(domain.vertices, dtype=float)
    if not _is_convex(verts):
        raise UnsupportedDomainError("inradius requires a convex polygon")
    n = len(verts)
    normals = np.empty((n, 2))
    offsets = np.empty(n)
    for i in range(n):
        p, q = verts[i], verts[(i + 1) % n]
        t = q - p
        nv = np.array([t[1], -t[0]])  # outward for ccw polygons
        nv /= np.linalg.norm(nv)
        normals[i] = nv
        offsets[i] = nv @ p

    def feasible_region(r):
        poly = [v.copy() for v in verts]
        for i in range(n):
            poly = _clip_halfplane(poly, normals[i], offsets[i] - r)
            if not poly:
                return None
        return poly

    lo, hi = 0.0, 0.5 * float(np.max(np.linalg.norm(verts - verts.mean(axis=0), axis=1))) * 2.0
    region = feasible_region(lo)
    while hi - lo > 1e-12:
        mid = 0.5 * (lo + hi)
        reg = feasible_region(mid)
        if reg:
            lo, region = mid, reg
        else:
            hi = mid
    center = np.mean(np.array(region), axis=0)
    # exact distance of the found center to the edge lines
    radius = float(np.min(offsets - normals @ center))
    return center, radius


def inradius(domain: DomainSpec) -> float:
    """Inradius of an interval, disk, or convex polygon."""
    return chebyshev_center(domain)[1]


# ---------------------------------------------------------------------------
# Distance to the boundary
# ---------------------------------------------------------------------------

def distances_to_boundary(mesh: Mesh, points: np.ndarray) -> np.ndarray:
    """Exact distance from each point to the mesh's polygonal boundary.

    No inside test; callers feeding interior quadrature points use this
    directly.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if mesh.dim == 1:
        bx = mesh.nodes[mesh.boundary[:, 0], 0]
        return np.min(np.abs(pts[:, :1] - bx[None, :]), axis=1)
    p0 = mesh.nodes[mesh.boundary[:, 0]]  # (B, 2)
    seg = mesh.nodes[mesh.boundary[:, 1]] - p0
    seg_len2 = np.einsum("ij,ij->i", seg, seg)
    diff = pts[:, None, :] - p0[None, :, :]  # (P, B, 2)
    t = np.einsum("pbj,bj->pb", diff, seg) / seg_len2[None, :]
    t = np.clip(t, 0.0, 1.0)
    proj = p0[None, :, :] + t[:, :, None] * seg[None, :, :]
    d = np.linalg.norm(pts[:, None, :] - proj, axis=2)
    return np.min(d, axis=1)


def _point_inside(mesh: Mesh, point: np.ndarray) -> bool:
    if mesh.dim == 1:
        x = point[0]
        lo = float(mesh.nodes[:, 0].min())
        hi = float(mesh.nodes[:, 0].max())
        return lo - 1e-12 <= x <= hi + 1e-12
    p = mesh.nodes[mesh.elements]
    d1 = p[:, 1] - p[:, 0]
    d2 = p[:, 2] - p[:, 0]
    det = d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]
    rel = point[None, :] - p[:, 0]
    u = (rel[:, 0] * d2[:, 1] - rel[:, 1] * d2[:, 0]) / det
    v = (d1[:, 0] * rel[:, 1] - d1[:, 1] * rel[:, 0]) / det
    eps = 1e-12
    return bool(np.any((u >= -eps) & (v >= -eps) & (u + v <= 1 + eps)))


def dist_to_boundary(mesh: Mesh, point) -> float:
    """Distance from an interior point to the boundary; raises if outside."""
    pt = np.asarray(point, dtype=float).reshape(-1)
    if not _point_inside(mesh, pt):
        raise ArgumentError(f"point {pt.tolist()} lies outside the meshed domain")
    return float(distances_to_boundary(mesh, pt[None, :])[0])


# ---------------------------------------------------------------------------
# Boundary traversal (arc-length ordering of gamma nodes)
# ---------------------------------------------------------------------------

def gamma_arclength(mesh: Mesh):
    """Order gamma nodes along the boundary and return (nodes, arclength).

    Walks each connected chain of gamma edges; chains are concatenated in
    the order of their smallest node index, which makes the output
    deterministic for a given mesh.
    """
    if mesh.dim == 1:
        nodes = gamma_nodes(mesh)
        coords = mesh.nodes[nodes, 0]
        order = np.argsort(coords)
        nodes = nodes[order]
        s = coords[order] - (coords[order][0] if len(nodes) else 0.0)
        return nodes, s
    marked = mesh.boundary[mesh.boundary_markers == GAMMA]
    if len(marked) == 0:
        return np.array([], dtype=np.int64), np.array([])
    adj = {}
    for v0, v1 in marked:
        adj.setdefault(int(v0), []).append(int(v1))
        adj.setdefault(int(v1), []).append(int(v0))
    unvisited = {tuple(sorted(e)) for e in marked.tolist()}
    chains = []
    while unvisited:
        endpoints = sorted(v for v, nb in adj.items()
                           if sum(tuple(sorted((v, w))) in unvisited for w in nb) == 1)
        start = endpoints[0] if endpoints else min(v for e in unvisited for v in e)
        chain = [start]
        cur = start
        while True:
            nxt = None
            for w in adj[cur]:
                if tuple(sorted((cur, w))) in unvisited:
                    nxt = w
                    break
            if nxt is None:
                break
            unvisited.discard(tuple(sorted((cur, nxt))))
            chain.append(nxt)
            cur = nxt
        chains.append(chain)
    chains.sort(key=lambda c: min(c))
    ordered = []
    for c in chains:
        ordered.extend(v for v in c if v not in ordered)
    ordered = np.array(ordered, dtype=np.int64)
    pts = mesh.nodes[ordered]
    steps = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    s = np.concatenate([[0.0], np.cumsum(steps)])
    return ordered, s


# ---------------------------------------------------------------------------
# Mesh text format
# ---------------------------------------------------------------------------

def write_mesh(mesh: Mesh, path) -> None:
    """Write the mesh in the plain-text format (robinspec-mesh v1)."""
    lines = [f"robinspec-mesh v1 {mesh.dim}",
             f"{mesh.num_nodes} {mesh.num_elements} {len(mesh.boundary)}"]
    for p in mesh.nodes:
        lines.append(" ".join(f"{c:.17g}" for c in p))
    for e in mesh.elements:
        lines.append(" ".join(str(int(v)) for v in e))
    for b, m in zip(mesh.boundary, mesh.boundary_markers):
        lines.append(" ".join(str(int(v)) for v in b) + f" {int(m)}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_mesh(path) -> Mesh:
    with open(path) as fh:
        raw = [ln.strip() for ln in fh if ln.strip()]
    header = raw[0].split()
    if header[:2] != ["robinspec-mesh", "v1"]:
        raise ArgumentError(f"not a robinspec-mesh v1 file: {raw[0]!r}")
    dim = int(header[2])
    nv, ne, nb = (int(t) for t in raw[1].split())
    nodes = np.array([[float(t) for t in ln.split()] for ln in raw[2:2 + nv]])
    elements = np.array([[int(t) for t in ln.split()] for ln in raw[2 + nv:2 + nv + ne]])
    bdry_rows = [[int(t) for t in ln.split()] for ln in raw[2 + nv + ne:2 + nv + ne + nb]]
    boundary = np.array([r[:-1] for r in bdry_rows])
    markers = np.array([r[-1] for r in bdry_rows])
    return _make_mesh(dim, nodes, elements, boundary, markers)
