"""Built-in manifold catalog: deterministic small triangulations.

Every generator returns a validated :class:`OrientedTriangulation`.  The
associated known invariants (with their provenance) live in
:data:`KNOWN_VALUES` and are what the reports print next to computed bounds.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, permutations

from .simplicial import OrientedTriangulation, validate_triangulation


class UnknownName(ValueError):
    pass


class BadParams(ValueError):
    pass


def circle() -> OrientedTriangulation:
    return validate_triangulation([(0, 1), (1, 2), (2, 0)])


def sphere(n: int) -> OrientedTriangulation:
    """Boundary of the (n+1)-simplex: n+2 facets of dimension n."""
    if n < 1:
        raise BadParams("sphere dimension must be >= 1")
    verts = range(n + 2)
    return validate_triangulation([c for c in combinations(verts, n + 1)])


def torus2() -> OrientedTriangulation:
    """The 7-vertex, 14-triangle torus (quotient-grid difference pattern)."""
    facets = []
    for i in range(7):
        facets.append((i % 7, (i + 1) % 7, (i + 3) % 7))
        facets.append((i % 7, (i + 2) % 7, (i + 3) % 7))
    return validate_triangulation(facets)


def grid_torus(k: int = 3) -> OrientedTriangulation:
    """k x k grid square with opposite sides identified, each cell split in two."""
    if k < 3:
        raise BadParams("grid torus needs k >= 3 to stay simplicial")

    def v(i, j):
        return (i % k) * k + (j % k)

    facets = []
    for i in range(k):
        for j in range(k):
            facets.append((v(i, j), v(i + 1, j), v(i + 1, j + 1)))
            facets.append((v(i, j), v(i + 1, j + 1), v(i, j + 1)))
    return validate_triangulation(facets)


def torus3(k: int = 3) -> OrientedTriangulation:
    """3-torus: k^3 cubical grid with wraparound, six tetrahedra per cube."""
    if k < 3:
        raise BadParams("cubical 3-torus needs k >= 3 to stay simplicial")

    def v(x, y, z):
        return ((x % k) * k + (y % k)) * k + (z % k)

    basis = ((1, 0, 0), (0, 1, 0), (0, 0, 1))
    facets = []
    for x in range(k):
        for y in range(k):
            for z in range(k):
                for perm in sorted(permutations(range(3))):
                    p = [x, y, z]
                    path = [tuple(p)]
                    for axis in perm:
                        p = [p[i] + basis[axis][i] for i in range(3)]
                        path.append(tuple(p))
                    tet = tuple(v(*q) for q in path)
                    # even permutations keep the cube orientation
                    sign = 1 if perm in ((0, 1, 2), (1, 2, 0), (2, 0, 1)) else -1
                    if sign < 0:
                        tet = (tet[1], tet[0]) + tet[2:]
                    facets.append(tet)
    return validate_triangulation(facets)


def surface(genus: int) -> OrientedTriangulation:
    """Closed orientable genus-g surface from the 4g-gon identification.

    The polygon boundary follows the standard word a b a^-1 b^-1 ... ; each
    side is cut into three segments so the identification stays simplicial,
    and the interior is an annulus ring around a coned core.
    """
    if genus < 1:
        raise BadParams("genus must be >= 1")
    g = genus
    sides = 4 * g
    bnd = 3 * sides  # boundary vertices before identification

    # identification pairing of sides: side 4i <-> 4i+2 (a, a^-1), 4i+1 <-> 4i+3
    partner = {}
    for i in range(g):
        partner[4 * i] = 4 * i + 2
        partner[4 * i + 2] = 4 * i
        partner[4 * i + 1] = 4 * i + 3
        partner[4 * i + 3] = 4 * i + 1

    # boundary positions: side s occupies positions 3s, 3s+1, 3s+2, then the
    # corner of side s+1.  Corners all collapse to one class; the two interior
    # points of a side identify crosswise with its partner (reversed walk).
    parent = list(range(bnd))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    for s in range(sides):
        union(3 * s, 0)  # corners
    for s in range(sides):
        t = partner[s]
        if t < s:
            continue
        union(3 * s + 1, 3 * t + 2)
        union(3 * s + 2, 3 * t + 1)

    ring = [bnd + i for i in range(bnd)]  # interior ring, one vertex per position
    center = 2 * bnd

    facets = []
    for p in range(bnd):
        q = (p + 1) % bnd
        bp, bq = find(p), find(q)
        facets.append((bp, bq, ring[p]))
        facets.append((bq, ring[(p + 1) % bnd], ring[p]))
        facets.append((center, ring[p], ring[(p + 1) % bnd]))
    return validate_triangulation(facets)


@dataclass(frozen=True)
class KnownValue:
    quantity: str
    value: float
    provenance: str


#: Independently known invariants used as oracles next to computed bounds.
KNOWN_VALUES: dict[str, tuple[KnownValue, ...]] = {
    "surface(2)": (
        KnownValue("rank_gradient", 2.0, "2g-2 for genus g surfaces"),
        KnownValue("stable_integral_volume", 4.0, "4g-4 for genus g surfaces"),
    ),
    "surface(3)": (
        KnownValue("rank_gradient", 4.0, "2g-2 for genus g surfaces"),
        KnownValue("stable_integral_volume", 8.0, "4g-4 for genus g surfaces"),
    ),
    "torus(2)": (
        KnownValue("rank_gradient", 0.0, "infinite amenable fundamental group"),
        KnownValue("stable_integral_volume", 0.0, "amenable aspherical manifold"),
    ),
    "torus(3)": (
        KnownValue("rank_gradient", 0.0, "infinite amenable fundamental group"),
        KnownValue("stable_integral_volume", 0.0, "amenable aspherical manifold"),
    ),
}


CATALOG_NAMES = (
    "circle",
    "sphere(2)",
    "sphere(3)",
    "torus(2)",
    "torus(3)",
    "surface(2)",
    "surface(3)",
)


def generate_catalog_manifold(name: str, **params) -> OrientedTriangulation:
    """Build a catalog triangulation from a name like ``surface(2)``.

    Raises :class:`UnknownName` / :class:`BadParams` on malformed requests.
    """
    name = name.strip().lower().replace(" ", "")
    if name == "circle":
        return circle()
    if name.startswith("sphere(") and name.endswith(")"):
        return sphere(_int_arg(name))
    if name.startswith("torus(") and name.endswith(")"):
        d = _int_arg(name)
        if d == 2:
            return torus2()
        if d == 3:
            return torus3(int(params.get("k", 3)))
        raise BadParams("torus dimension must be 2 or 3")
    if name.startswith("surface(") and name.endswith(")"):
        return surface(_int_arg(name))
    raise UnknownName("unknown catalog manifold %r" % name)


def _int_arg(name: str) -> int:
    inner = name[name.index("(") + 1 : -1]
    try:
        return int(inner)
    except ValueError as exc:
        raise BadParams("bad parameter in %r" % name) from exc
