"""Point sets on the sphere: random samples, dyadic octahedral
triangulations, node measures, caps, distances and mesh norms.

Random points come from ``numpy.random.Generator(PCG64(seed))``.  Several
independent streams for one experiment are derived with
``numpy.random.SeedSequence(seed).spawn``; see :func:`spawn_seeds`.
"""
from dataclasses import dataclass, field
import logging

import numpy as np
from scipy.spatial import cKDTree

from .errors import InvalidParameterError, ResourceLimitError

log = logging.getLogger(__name__)

MAX_LEVEL = 9

KINDS = ("monte-carlo", "triangulated", "external")


@dataclass(frozen=True, eq=False)
class PointSet:
    """Nodes on S^q with a probability measure (one mass per node)."""

    points: np.ndarray
    measure: np.ndarray
    kind: str = "external"

    def __post_init__(self):
        pts = np.ascontiguousarray(self.points, dtype=float)
        if pts.ndim != 2:
            raise InvalidParameterError("points must be an (M, q+1) array")
        v = np.ascontiguousarray(self.measure, dtype=float)
        if v.shape != (pts.shape[0],):
            raise InvalidParameterError("measure must have one entry per point")
        if np.any(v <= 0):
            raise InvalidParameterError("node measure must be positive")
        if abs(v.sum() - 1.0) > 1e-10:
            raise InvalidParameterError(f"node measure must sum to 1, got {v.sum()!r}")
        if np.any(np.abs(np.linalg.norm(pts, axis=1) - 1.0) > 1e-12):
            raise InvalidParameterError("points must lie on the unit sphere")
        if self.kind not in KINDS:
            raise InvalidParameterError(f"unknown point-set kind {self.kind!r}")
        pts.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "measure", v)

    def __len__(self):
        return self.points.shape[0]

    @property
    def dim(self):
        """q, the dimension of the sphere S^q."""
        return self.points.shape[1] - 1

    @classmethod
    def uniform(cls, points, kind="external"):
        """Wrap ``points`` with equal masses 1/M."""
        points = np.asarray(points, dtype=float)
        m = points.shape[0]
        return cls(points, np.full(m, 1.0 / m), kind)


@dataclass(frozen=True)
class SphericalCap:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        c = np.asarray(self.center, dtype=float)
        c = c / np.linalg.norm(c)
        object.__setattr__(self, "center", c)
        if not 0 < self.radius <= np.pi:
            raise InvalidParameterError("cap radius must lie in (0, pi]")

    def contains(self, x):
        return geodesic_dist(x, self.center) <= self.radius

    def sample(self, count, rng):
        """``count`` points uniformly distributed (in area) on the cap."""
        c = self.center
        # orthonormal frame with c as third axis
        a = np.eye(3)[np.argmin(np.abs(c))]
        e1 = np.cross(c, a)
        e1 /= np.linalg.norm(e1)
        e2 = np.cross(c, e1)
        cos_r = np.cos(self.radius)
        t = rng.uniform(cos_r, 1.0, size=count)
        phi = rng.uniform(0.0, 2 * np.pi, size=count)
        s = np.sqrt(np.clip(1.0 - t * t, 0.0, None))
        pts = (t[:, None] * c + (s * np.cos(phi))[:, None] * e1
               + (s * np.sin(phi))[:, None] * e2)
        return pts / np.linalg.norm(pts, axis=1, keepdims=True)


def geodesic_dist(x, y):
    """Great-circle distance arccos(x . y), clamped into [0, pi]."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    d = np.clip(np.sum(x * y, axis=-1), -1.0, 1.0)
    out = np.arccos(d)
    return float(out) if np.ndim(out) == 0 else out


def spawn_seeds(seed, count):
    """``count`` independent child seeds derived from ``seed``."""
    children = np.random.SeedSequence(seed).spawn(count)
    return [int(c.generate_state(1, dtype=np.uint64)[0]) for c in children]


def uniform_sphere(rng, count, q=2):
    """``count`` points uniform on S^q from normalized Gaussian vectors."""
    g = rng.standard_normal((count, q + 1))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def random_points(seed, M, q=2):
    """M i.i.d. uniform points on S^q with the equal-mass measure 1/M."""
    if M < 1:
        raise InvalidParameterError(f"need at least one point, got M={M}")
    if q < 1:
        raise InvalidParameterError(f"need q >= 1, got {q}")
    rng = np.random.Generator(np.random.PCG64(seed))
    return PointSet(uniform_sphere(rng, M, q), np.full(M, 1.0 / M), "monte-carlo")


# ----------------------------------------------------------------------------
# dyadic triangulation

_OCTA_VERTS = np.array([[1, 0, 0], [0, 1, 0], [0, 0, 1],
                        [-1, 0, 0], [0, -1, 0], [0, 0, -1]], dtype=float)
# counter-clockwise seen from outside; face index = octant code
# 4*(x<0) + 2*(y<0) + (z<0)
_OCTA_FACES = np.array([
    [0, 1, 2], [0, 5, 1], [0, 2, 4], [0, 4, 5],
    [3, 2, 1], [3, 1, 5], [3, 4, 2], [3, 5, 4],
])


def _normalize(v):
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def _subdivide(tri):
    """Split (T, 3, 3) triangles into (4T, 3, 3); children of t are 4t..4t+3."""
    a, b, c = tri[:, 0], tri[:, 1], tri[:, 2]
    ab = _normalize(a + b)
    bc = _normalize(b + c)
    ca = _normalize(c + a)
    kids = np.stack([
        np.stack([a, ab, ca], axis=1),
        np.stack([ab, b, bc], axis=1),
        np.stack([ca, bc, c], axis=1),
        np.stack([ab, bc, ca], axis=1),
    ], axis=1)
    return kids.reshape(-1, 3, 3)


def spherical_triangle_area(tri):
    """Spherical excess of (T, 3, 3) triangles by L'Huilier's formula."""
    a = geodesic_dist(tri[:, 1], tri[:, 2])
    b = geodesic_dist(tri[:, 2], tri[:, 0])
    c = geodesic_dist(tri[:, 0], tri[:, 1])
    s = 0.5 * (a + b + c)
    prod = (np.tan(0.5 * s) * np.tan(0.5 * (s - a))
            * np.tan(0.5 * (s - b)) * np.tan(0.5 * (s - c)))
    return 4.0 * np.arctan(np.sqrt(np.clip(prod, 0.0, None)))


@dataclass(frozen=True, eq=False)
class Triangulation:
    """Level-``level`` dyadic refinement of the spherical octahedron.

    ``areas`` are normalized to sum to 1; ``raw_areas`` keep the spherical
    excess (summing to 4 pi).  Triangle t at level j has children
    4t..4t+3 at level j+1.
    """

    level: int
    triangles: np.ndarray
    centers: np.ndarray
    areas: np.ndarray
    raw_areas: np.ndarray = field(repr=False)

    def __len__(self):
        return self.triangles.shape[0]

    def point_set(self):
        """Triangle centers carrying the area measure."""
        return PointSet(self.centers, self.areas, "triangulated")

    def covering_radius(self):
        """Largest distance from a triangle center to its own vertices.

        Every point of the sphere lies in some triangle, so this bounds the
        mesh norm of the center set.
        """
        d = geodesic_dist(self.triangles, self.centers[:, None, :])
        return float(d.max())


def dyadic_triangulation(level):
    if level < 0:
        raise InvalidParameterError("level must be >= 0")
    if level > MAX_LEVEL:
        raise ResourceLimitError(f"level {level} exceeds the limit {MAX_LEVEL}")
    tri = _OCTA_VERTS[_OCTA_FACES]
    for _ in range(level):
        tri = _subdivide(tri)
    centers = _normalize(tri.sum(axis=1))
    raw = spherical_triangle_area(tri)
    areas = raw / raw.sum()
    for arr in (tri, centers, raw, areas):
        arr.setflags(write=False)
    return Triangulation(level, tri, centers, areas, raw)


def _orient(a, b, p):
    """Sign of det(a, b, p): which side of the great circle through a, b."""
    return np.einsum("ij,ij->i", np.cross(a, b), p)


def locate(points, level):
    """Index of the level-``level`` triangle containing each point.

    Descends the hierarchy from the octant with gnomonic sign tests.
    Points on a shared edge go to one of the adjacent triangles.
    """
    p = np.asarray(points, dtype=float).reshape(-1, 3)
    idx = (4 * (p[:, 0] < 0) + 2 * (p[:, 1] < 0) + (p[:, 2] < 0)).astype(np.int64)
    tri = _OCTA_VERTS[_OCTA_FACES][idx]
    for _ in range(level):
        a, b, c = tri[:, 0], tri[:, 1], tri[:, 2]
        ab = _normalize(a + b)
        bc = _normalize(b + c)
        ca = _normalize(c + a)
        in_a = _orient(ab, ca, p) >= 0
        in_b = ~in_a & (_orient(bc, ab, p) >= 0)
        in_c = ~in_a & ~in_b & (_orient(ca, bc, p) >= 0)
        child = np.full(p.shape[0], 3)
        child[in_a] = 0
        child[in_b] = 1
        child[in_c] = 2
        kids = np.stack([
            np.stack([a, ab, ca], axis=1),
            np.stack([ab, b, bc], axis=1),
            np.stack([ca, bc, c], axis=1),
            np.stack([ab, bc, ca], axis=1),
        ], axis=1)
        tri = kids[np.arange(p.shape[0]), child]
        idx = 4 * idx + child
    return idx


def in_triangle(tri, p, tol=0.0):
    """Whether points p (T, 3) lie in the closed triangles tri (T, 3, 3)."""
    a, b, c = tri[:, 0], tri[:, 1], tri[:, 2]
    return ((_orient(a, b, p) >= -tol) & (_orient(b, c, p) >= -tol)
            & (_orient(c, a, p) >= -tol))


@dataclass(frozen=True, eq=False)
class TriangulatedSelection:
    """Result of :func:`triangulated_measure`."""

    point_set: PointSet
    level: int
    kept: np.ndarray
    discarded: np.ndarray


def triangulated_measure(points, max_level=MAX_LEVEL):
    """Area measure for scattered points via the deepest fully occupied
    dyadic level.

    Finds the largest level at which every triangle holds at least one
    point, keeps in each triangle the point nearest its center and gives it
    the (normalized) triangle area.  Indices of discarded points are
    returned, not silently dropped.
    """
    p = np.asarray(points, dtype=float)
    best = None
    for level in range(0, max_level + 1):
        if 8 * 4 ** level > p.shape[0]:
            break
        idx = locate(p, level)
        if np.unique(idx).size < 8 * 4 ** level:
            break
        best = (level, idx)
    if best is None:
        raise InvalidParameterError("points do not occupy all octants")
    level, idx = best
    tr = dyadic_triangulation(level)
    dist = geodesic_dist(p, tr.centers[idx])
    order = np.lexsort((dist, idx))
    first = np.ones(order.size, dtype=bool)
    first[1:] = idx[order][1:] != idx[order][:-1]
    kept = np.sort(order[first])
    discarded = np.setdiff1d(np.arange(p.shape[0]), kept)
    if discarded.size:
        log.info("triangulated measure at level %d discards %d of %d points",
                 level, discarded.size, p.shape[0])
    ps = PointSet(p[kept], tr.areas[idx[kept]], "triangulated")
    return TriangulatedSelection(ps, level, kept, discarded)


def mesh_norm(C, resolution=6):
    """Certified upper bound on sup_x dist(x, C).

    Distances from the level-``resolution`` dyadic centers to the nearest
    node are maximized and the covering radius of the probe set is added.
    Returns ``(bound, probe_max, probe_radius)``.
    """
    pts = C.points if isinstance(C, PointSet) else np.asarray(C, dtype=float)
    probes = dyadic_triangulation(resolution)
    tree = cKDTree(pts.reshape(-1, 3))
    chord, _ = tree.query(probes.centers)
    probe_max = float(np.max(2.0 * np.arcsin(np.clip(chord / 2.0, 0.0, 1.0))))
    radius = probes.covering_radius()
    return probe_max + radius, probe_max, radius
