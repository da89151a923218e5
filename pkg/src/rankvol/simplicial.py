"""Exact simplicial chain machinery for closed oriented triangulations.

A triangulation is a facet list: ordered (n+1)-tuples of vertex ids.  The
validator certifies the closed-pseudo-manifold conditions and computes a
coherent orientation by sign propagation across shared codimension-one faces.
Simplices are identified with their sorted vertex tuples; an ordered
occurrence carries the sign of the sorting permutation.  All arithmetic is
arbitrary-precision integer.
"""

from __future__ import annotations

import hashlib
from collections import deque
from dataclasses import dataclass, field

from ._matrix import SnfResult, smith_normal_form, sparse_diagonal

__all__ = [
    "TriangulationError",
    "NotPseudoManifold",
    "NotConnected",
    "NotOrientable",
    "OrientedTriangulation",
    "IntegerChain",
    "FundamentalCycle",
    "HomologyGroup",
    "SnfResult",
    "validate_triangulation",
    "boundary_matrix",
    "smith_normal_form",
    "homology",
    "homology_of_boundaries",
    "fundamental_cycle",
    "euler_characteristic",
    "parse_triangulation",
    "format_triangulation",
]


class TriangulationError(ValueError):
    """Input is not a closed oriented connected triangulation."""


class NotPseudoManifold(TriangulationError):
    pass


class NotConnected(TriangulationError):
    pass


class NotOrientable(TriangulationError):
    pass


def permutation_sign(seq) -> int:
    """Sign of the permutation sorting ``seq`` (entries must be distinct)."""
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[j] < seq[i]:
                sign = -sign
    return sign


@dataclass(frozen=True)
class OrientedTriangulation:
    """Closed oriented connected pseudo-manifold, certified at construction.

    ``facets`` keep their input vertex order (after contiguous relabelling);
    ``orientation_signs`` make the signed facet sum a cycle.  ``vertex_labels``
    maps internal ids back to the input ids.
    """

    dimension: int
    facets: tuple[tuple[int, ...], ...]
    orientation_signs: tuple[int, ...]
    vertex_labels: tuple[int, ...]

    @property
    def vertex_count(self) -> int:
        return len(self.vertex_labels)

    @property
    def facet_count(self) -> int:
        return len(self.facets)

    def simplices(self, k: int) -> list[tuple[int, ...]]:
        """All k-simplices (sorted vertex tuples) in lexicographic order."""
        if k < 0 or k > self.dimension:
            return []
        if k == self.dimension:
            return sorted({tuple(sorted(f)) for f in self.facets})
        from itertools import combinations

        out = set()
        for f in self.facets:
            out.update(combinations(sorted(f), k + 1))
        return sorted(out)

    def edges(self) -> list[tuple[int, int]]:
        return self.simplices(1)

    def content_key(self) -> bytes:
        payload = "dim %d\n" % self.dimension
        payload += "\n".join(" ".join(map(str, f)) for f in self.facets)
        return payload.encode()

    def content_hash(self) -> str:
        return hashlib.sha256(self.content_key()).hexdigest()[:16]


def _face_incidence(facet: tuple[int, ...]):
    """Yield (canonical face, coefficient) pairs of an ordered facet."""
    for k in range(len(facet)):
        face = facet[:k] + facet[k + 1 :]
        sign = (-1) ** k * permutation_sign(face)
        yield tuple(sorted(face)), sign


def validate_triangulation(facets) -> OrientedTriangulation:
    """Validate facets and compute a coherent orientation.

    Signs start at +1 on facet 0 and propagate breadth-first across shared
    codimension-one faces; the signed facet sum is then re-checked to have
    zero boundary, which is the orientation certificate.
    """
    facets = [tuple(f) for f in facets]
    if not facets:
        raise TriangulationError("empty facet list")
    arity = len(facets[0])
    if arity < 2:
        raise TriangulationError("dimension 0 is not supported")
    n = arity - 1
    seen_sets = set()
    for f in facets:
        if len(f) != arity:
            raise TriangulationError("facets of mixed arity")
        if len(set(f)) != arity:
            raise TriangulationError("facet repeats a vertex: %r" % (f,))
        key = tuple(sorted(f))
        if key in seen_sets:
            raise NotPseudoManifold("duplicate facet %r" % (key,))
        seen_sets.add(key)
    labels = sorted({v for f in facets for v in f})
    index = {v: i for i, v in enumerate(labels)}
    facets = [tuple(index[v] for v in f) for f in facets]

    by_face: dict[tuple[int, ...], list[tuple[int, int]]] = {}
    for fi, f in enumerate(facets):
        for face, coeff in _face_incidence(f):
            by_face.setdefault(face, []).append((fi, coeff))
    for face, inc in by_face.items():
        if len(inc) != 2:
            raise NotPseudoManifold(
                "face %r lies in %d facets" % (face, len(inc))
            )

    adjacency: list[list[tuple[int, int, int]]] = [[] for _ in facets]
    for face, ((f1, c1), (f2, c2)) in sorted(by_face.items()):
        adjacency[f1].append((f2, c1, c2))
        adjacency[f2].append((f1, c2, c1))

    signs = [0] * len(facets)
    signs[0] = 1
    queue = deque([0])
    reached = 1
    while queue:
        fi = queue.popleft()
        for fj, ci, cj in adjacency[fi]:
            # coherent: the shared face must receive opposite coefficients
            needed = -signs[fi] * ci * cj
            if signs[fj] == 0:
                signs[fj] = needed
                reached += 1
                queue.append(fj)
            elif signs[fj] != needed:
                raise NotOrientable("orientation sign propagation contradicts")
    if reached != len(facets):
        raise NotConnected("facet adjacency graph is disconnected")

    total: dict[tuple[int, ...], int] = {}
    for fi, f in enumerate(facets):
        for face, coeff in _face_incidence(f):
            total[face] = total.get(face, 0) + signs[fi] * coeff
    if any(total.values()):
        raise NotOrientable("signed facet sum has nonzero boundary")

    return OrientedTriangulation(
        dimension=n,
        facets=tuple(facets),
        orientation_signs=tuple(signs),
        vertex_labels=tuple(labels),
    )


@dataclass(frozen=True)
class IntegerChain:
    """Sparse integer chain over canonical (sorted-tuple) simplices."""

    degree: int
    entries: tuple[tuple[tuple[int, ...], int], ...]

    @staticmethod
    def from_dict(degree: int, data: dict[tuple[int, ...], int]) -> "IntegerChain":
        items = tuple(sorted((s, c) for s, c in data.items() if c))
        for s, _ in items:
            if len(s) != degree + 1 or list(s) != sorted(set(s)):
                raise ValueError("bad simplex %r for degree %d" % (s, degree))
        return IntegerChain(degree, items)

    def as_dict(self) -> dict[tuple[int, ...], int]:
        return dict(self.entries)

    def coefficient(self, simplex: tuple[int, ...]) -> int:
        return self.as_dict().get(tuple(simplex), 0)

    @property
    def l1(self) -> int:
        return sum(abs(c) for _, c in self.entries)

    @property
    def support(self) -> tuple[tuple[int, ...], ...]:
        return tuple(s for s, _ in self.entries)

    def scale(self, factor: int) -> "IntegerChain":
        if factor == 0:
            return IntegerChain(self.degree, ())
        return IntegerChain(self.degree, tuple((s, c * factor) for s, c in self.entries))

    def add(self, other: "IntegerChain") -> "IntegerChain":
        if other.degree != self.degree:
            raise ValueError("degree mismatch")
        data = self.as_dict()
        for s, c in other.entries:
            data[s] = data.get(s, 0) + c
        return IntegerChain.from_dict(self.degree, data)

    def boundary(self) -> "IntegerChain":
        data: dict[tuple[int, ...], int] = {}
        for s, c in self.entries:
            for k in range(len(s)):
                face = s[:k] + s[k + 1 :]
                data[face] = data.get(face, 0) + c * (-1) ** k
        return IntegerChain.from_dict(self.degree - 1, data)

    def is_cycle(self) -> bool:
        return not self.boundary().entries


@dataclass(frozen=True)
class FundamentalCycle:
    chain: IntegerChain
    l1: int


def fundamental_cycle(t: OrientedTriangulation) -> FundamentalCycle:
    """Signed sum of all facets; zero boundary is re-certified."""
    data: dict[tuple[int, ...], int] = {}
    for f, sign in zip(t.facets, t.orientation_signs):
        data[tuple(sorted(f))] = sign * permutation_sign(f)
    chain = IntegerChain.from_dict(t.dimension, data)
    if not chain.is_cycle():
        raise AssertionError("certified orientation produced a non-cycle")
    if chain.l1 != t.facet_count:
        raise AssertionError("fundamental cycle does not cover all facets")
    return FundamentalCycle(chain=chain, l1=chain.l1)


def boundary_matrix(t: OrientedTriangulation, k: int) -> list[list[int]]:
    """Boundary operator C_k -> C_{k-1}: rows are (k-1)-simplices, columns k-simplices."""
    if k < 0 or k > t.dimension:
        raise ValueError("k out of range")
    cols = t.simplices(k)
    rows = t.simplices(k - 1)
    row_index = {s: i for i, s in enumerate(rows)}
    mat = [[0] * len(cols) for _ in rows]
    for j, s in enumerate(cols):
        for i in range(len(s)):
            face = s[:i] + s[i + 1 :]
            if face:
                mat[row_index[face]][j] += (-1) ** i
    return mat


def _sparse_boundary(t: OrientedTriangulation, k: int) -> tuple[dict, int, int]:
    cols = t.simplices(k)
    rows = t.simplices(k - 1)
    row_index = {s: i for i, s in enumerate(rows)}
    entries: dict[tuple[int, int], int] = {}
    for j, s in enumerate(cols):
        for i in range(len(s)):
            face = s[:i] + s[i + 1 :]
            if face:
                entries[(row_index[face], j)] = (-1) ** i
    return entries, len(rows), len(cols)


@dataclass(frozen=True)
class HomologyGroup:
    betti: int
    torsion: tuple[int, ...] = field(default_factory=tuple)

    def __post_init__(self):
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a:
                raise ValueError("torsion must form a divisibility chain")
        if any(d < 2 for d in self.torsion):
            raise ValueError("torsion entries must be >= 2")

    def minimal_generators(self) -> int:
        return self.betti + len(self.torsion)


def homology_of_boundaries(rank_k_domain: int, diag_k, diag_k1) -> HomologyGroup:
    """H_k from the Smith diagonals of the two adjacent boundary operators."""
    rank_k = len([d for d in diag_k if d])
    rank_k1 = len([d for d in diag_k1 if d])
    betti = rank_k_domain - rank_k - rank_k1
    torsion = tuple(sorted(d for d in diag_k1 if d > 1))
    return HomologyGroup(betti=betti, torsion=torsion)


def homology(t: OrientedTriangulation, k: int) -> HomologyGroup:
    """Integral homology in degree k via Smith reduction of the boundaries."""
    if k < 0 or k > t.dimension:
        raise ValueError("k out of range")
    n_k = len(t.simplices(k))
    diag_k: list[int] = []
    if k >= 1:
        entries, nr, nc = _sparse_boundary(t, k)
        diag_k = sparse_diagonal(entries, nr, nc)
    diag_k1: list[int] = []
    if k + 1 <= t.dimension:
        entries, nr, nc = _sparse_boundary(t, k + 1)
        diag_k1 = sparse_diagonal(entries, nr, nc)
    return homology_of_boundaries(n_k, diag_k, diag_k1)


def euler_characteristic(t: OrientedTriangulation) -> int:
    return sum((-1) ** k * len(t.simplices(k)) for k in range(t.dimension + 1))


def parse_triangulation(text: str) -> OrientedTriangulation:
    """Parse the triangulation text format.

    First non-comment line is ``dim n``; every following non-comment line is
    one facet as whitespace-separated nonnegative vertex ids.  Lines starting
    with ``#`` are comments.
    """
    dim = None
    facets = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if dim is None:
            parts = line.split()
            if len(parts) != 2 or parts[0] != "dim":
                raise TriangulationError("line %d: expected 'dim n'" % lineno)
            dim = int(parts[1])
            if dim < 1:
                raise TriangulationError("dimension must be positive")
            continue
        try:
            facet = tuple(int(p) for p in line.split())
        except ValueError as exc:
            raise TriangulationError("line %d: %s" % (lineno, exc)) from exc
        if any(v < 0 for v in facet):
            raise TriangulationError("line %d: negative vertex id" % lineno)
        if len(facet) != dim + 1:
            raise TriangulationError(
                "line %d: facet arity %d, expected %d" % (lineno, len(facet), dim + 1)
            )
        facets.append(facet)
    if dim is None:
        raise TriangulationError("missing 'dim n' header")
    return validate_triangulation(facets)


def format_triangulation(t: OrientedTriangulation, comment: str | None = None) -> str:
    lines = []
    if comment:
        for part in comment.splitlines():
            lines.append("# " + part)
    lines.append("dim %d" % t.dimension)
    for f in t.facets:
        lines.append(" ".join(str(t.vertex_labels[v]) for v in f))
    return "\n".join(lines) + "\n"
