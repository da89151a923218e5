"""Fundamental-group presentations read off 2-skeleta.

Works both for triangulations (edges are sorted vertex pairs) and for the
quotient cell complexes of the glued-model construction, where the 1-skeleton
may be a multigraph with loops.  Generators are the non-tree edges of a BFS
spanning tree; every 2-cell contributes one relator.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .groups import Presentation, Word, free_reduce, invert_word
from .simplicial import OrientedTriangulation


@dataclass(frozen=True)
class SkeletonPresentation:
    """Presentation of the fundamental group of a 2-skeleton.

    ``edge_letters[e]`` is the generator index of edge e (0 across the tree);
    ``tree_parent[v]`` is the signed edge id whose traversal enters v from its
    BFS parent (0 at the root).
    """

    presentation: Presentation
    nvertices: int
    edges: tuple[tuple[int, int], ...]
    base_vertex: int
    edge_letters: tuple[int, ...]
    tree_parent: tuple[int, ...]

    def word_of_edge(self, eid: int, forward: bool = True) -> Word:
        letter = self.edge_letters[eid]
        if letter == 0:
            return ()
        return (letter,) if forward else (-letter,)

    def tree_path_edges(self, v: int) -> tuple[int, ...]:
        """Signed edge ids of the tree path base -> v."""
        path: list[int] = []
        while v != self.base_vertex:
            signed = self.tree_parent[v]
            if signed == 0:
                raise AssertionError("vertex %d not reached by tree" % v)
            path.append(signed)
            eid = abs(signed) - 1
            u, w = self.edges[eid]
            v = u if signed > 0 else w
        path.reverse()
        return tuple(path)

    def word_of_edge_path(self, signed_edges) -> Word:
        out: list[int] = []
        for signed in signed_edges:
            eid = abs(signed) - 1
            out.extend(self.word_of_edge(eid, forward=signed > 0))
        return free_reduce(tuple(out))


def presentation_from_skeleton(
    nvertices: int,
    edges: list[tuple[int, int]],
    faces: list[tuple[int, int, int]],
    base_vertex: int = 0,
) -> SkeletonPresentation:
    """Presentation from an explicit 2-skeleton.

    ``edges[e]`` is a directed pair (u, v) (loops and parallel edges allowed);
    ``faces`` are triples of signed 1-based edge ids tracing each 2-cell
    boundary.  The spanning tree is BFS from ``base_vertex`` with
    smallest-neighbor-first tie-break.
    """
    adjacency: list[list[tuple[int, int, int]]] = [[] for _ in range(nvertices)]
    for eid, (u, v) in enumerate(edges):
        if u == v:
            continue  # loops cannot be tree edges
        adjacency[u].append((v, eid, +1))
        adjacency[v].append((u, eid, -1))
    for lst in adjacency:
        lst.sort()

    tree_parent = [0] * nvertices
    in_tree = [False] * len(edges)
    seen = [False] * nvertices
    seen[base_vertex] = True
    queue = deque([base_vertex])
    reached = 1
    while queue:
        u = queue.popleft()
        for v, eid, direction in adjacency[u]:
            if not seen[v]:
                seen[v] = True
                reached += 1
                in_tree[eid] = True
                # signed id of the traversal u -> v
                tree_parent[v] = (eid + 1) * direction
                queue.append(v)
    if reached != nvertices:
        raise ValueError("skeleton is not connected")

    edge_letters = [0] * len(edges)
    letter = 0
    for eid in range(len(edges)):
        if not in_tree[eid]:
            letter += 1
            edge_letters[eid] = letter

    relators: list[Word] = []
    for face in faces:
        word: list[int] = []
        for signed in face:
            eid = abs(signed) - 1
            gen = edge_letters[eid]
            if gen:
                word.append(gen if signed > 0 else -gen)
        reduced = free_reduce(tuple(word))
        if reduced:
            relators.append(reduced)

    generator_edges = tuple(
        edges[eid] for eid in range(len(edges)) if edge_letters[eid]
    )
    presentation = Presentation(
        generator_count=letter,
        relators=tuple(relators),
        generator_edges=generator_edges,
    )
    return SkeletonPresentation(
        presentation=presentation,
        nvertices=nvertices,
        edges=tuple(edges),
        base_vertex=base_vertex,
        edge_letters=tuple(edge_letters),
        tree_parent=tuple(tree_parent),
    )


@dataclass(frozen=True)
class ComplexPresentation:
    """Fundamental-group presentation of a triangulation's 2-skeleton."""

    triangulation: OrientedTriangulation
    skeleton: SkeletonPresentation

    @property
    def presentation(self) -> Presentation:
        return self.skeleton.presentation

    @property
    def base_vertex(self) -> int:
        return self.skeleton.base_vertex

    def edge_id(self, u: int, v: int) -> int:
        key = (u, v) if u < v else (v, u)
        return self._edge_index()[key]

    def _edge_index(self) -> dict[tuple[int, int], int]:
        cached = getattr(self, "_edge_index_cache", None)
        if cached is None:
            cached = {e: i for i, e in enumerate(self.skeleton.edges)}
            object.__setattr__(self, "_edge_index_cache", cached)
        return cached

    def edge_word(self, u: int, v: int) -> Word:
        """Presentation word of the directed edge u -> v."""
        eid = self.edge_id(u, v)
        return self.skeleton.word_of_edge(eid, forward=u < v)


def presentation_from_complex(
    t: OrientedTriangulation, base_vertex: int = 0
) -> ComplexPresentation:
    """Fundamental group from the 2-skeleton of a validated triangulation.

    Edges are oriented from smaller to larger vertex id; each 2-simplex
    (a < b < c) contributes the relator e_ab e_bc e_ac^-1 with tree edges
    mapping to the identity.
    """
    if not 0 <= base_vertex < t.vertex_count:
        raise ValueError("base vertex out of range")
    edges = t.simplices(1)
    edge_index = {e: i for i, e in enumerate(edges)}
    faces = []
    for a, b, c in t.simplices(2):
        faces.append(
            (
                edge_index[(a, b)] + 1,
                edge_index[(b, c)] + 1,
                -(edge_index[(a, c)] + 1),
            )
        )
    skeleton = presentation_from_skeleton(
        t.vertex_count, list(edges), faces, base_vertex=base_vertex
    )
    return ComplexPresentation(triangulation=t, skeleton=skeleton)
