"""Executable certificates tying generator rank to fundamental-cycle size.

Two constructions, each mechanically verified:

* the glued model complex: one n-cell per support simplex of a cycle, faces
  identified exactly when the underlying ordered base faces agree; carries a
  cycle of its own, a reference map to the base, and the rank target
  d <= n * m checked by budgeted elimination plus a surjectivity certificate
  (the image subgroup enumerates to index one);

* deck-generator extraction: for each support simplex the deck word carrying
  the chosen lift of its first vertex across its 0-1 edge; the extracted set
  S generates a subgroup whose cover receives a lift of the cycle, and the
  certificate checks the projected lift is a cycle of multiplicity one, which
  forces index one (so d <= |S| <= m <= l1 of the cycle).
"""

from __future__ import annotations

from dataclasses import dataclass

from .covers import CoverComplex, build_cover
from .groups import (
    CosetEnumerationOverflow,
    CosetTable,
    Word,
    free_reduce,
    invert_word,
    tietze_simplify,
    todd_coxeter,
)
from .simplicial import (
    FundamentalCycle,
    IntegerChain,
    OrientedTriangulation,
    permutation_sign,
)
from .skeleton import (
    ComplexPresentation,
    SkeletonPresentation,
    presentation_from_complex,
    presentation_from_skeleton,
)

__all__ = [
    "NotACycle",
    "IndexNotOne",
    "GluedComplex",
    "build_glued_complex",
    "GluedCertificate",
    "verify_glued_complex",
    "GeneratorExtraction",
    "extract_generators",
    "ExtractionCertificate",
    "verify_extraction",
]


class NotACycle(ValueError):
    """Input chain has nonzero boundary."""


class IndexNotOne(AssertionError):
    """A complete extraction enumerated to index > 1: an implementation bug."""


class _UnionFind:
    def __init__(self):
        self.parent: dict = {}

    def find(self, x):
        parent = self.parent
        if x not in parent:
            parent[x] = x
            return x
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(self, a, b) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


@dataclass(frozen=True)
class GluedComplex:
    """Quotient of m disjoint n-simplices by the face-agreement gluing."""

    base: OrientedTriangulation
    cells: tuple[tuple[int, ...], ...]
    coefficients: tuple[int, ...]
    skeleton: SkeletonPresentation
    edge_images: tuple[Word, ...]
    vertex_images: tuple[int, ...]
    extra_vertex_gluings: tuple[tuple[int, int], ...]
    boundary_class_count: int
    cell_boundary_classes: tuple[tuple[int, ...], ...]

    @property
    def cell_count(self) -> int:
        return len(self.cells)

    def glued_cycle_boundary(self) -> dict[int, int]:
        """Boundary of the glued cycle over codimension-one cell classes."""
        out: dict[int, int] = {}
        for j, coeff in enumerate(self.coefficients):
            for k, cls in enumerate(self.cell_boundary_classes[j]):
                out[cls] = out.get(cls, 0) + coeff * (-1) ** k
        return {cls: v for cls, v in out.items() if v}

    def pushforward_cycle(self) -> IntegerChain:
        data: dict[tuple[int, ...], int] = {}
        for simplex, coeff in zip(self.cells, self.coefficients):
            data[simplex] = data.get(simplex, 0) + coeff
        return IntegerChain.from_dict(self.base.dimension, data)


def build_glued_complex(t: OrientedTriangulation, chain: IntegerChain) -> GluedComplex:
    """Build the glued model complex of a degree-n cycle supported on t.

    Faces of two cells are identified pointwise exactly when the underlying
    base faces agree as ordered simplices; if the quotient is disconnected,
    vertices are glued (and recorded) to make it connected.  Raises
    :class:`NotACycle` when the input chain is not a cycle.
    """
    n = t.dimension
    if chain.degree != n:
        raise ValueError("chain degree %d does not match dimension %d" % (chain.degree, n))
    if not chain.is_cycle():
        raise NotACycle("input chain has nonzero boundary")
    if not chain.entries:
        raise NotACycle("empty chain has no glued model")
    cells = tuple(s for s, _ in chain.entries)
    coefficients = tuple(c for _, c in chain.entries)
    m = len(cells)

    uf = _UnionFind()
    positions = tuple(range(n + 1))

    def subsets(seq):
        out = [()]
        for x in seq:
            out += [s + (x,) for s in out]
        return [s for s in out if s]

    # group cell faces by their ordered base face
    by_face: dict[tuple[int, ...], list[tuple[int, tuple[int, ...]]]] = {}
    for j, simplex in enumerate(cells):
        for k in range(n + 1):
            face_positions = positions[:k] + positions[k + 1 :]
            image = tuple(simplex[p] for p in face_positions)
            by_face.setdefault(image, []).append((j, face_positions))
    for group in by_face.values():
        j0, pos0 = group[0]
        subs0 = subsets(pos0)
        for j1, pos1 in group[1:]:
            match = dict(zip(pos0, pos1))
            for sub in subs0:
                uf.union((j0, sub), (j1, tuple(match[p] for p in sub)))

    def class_ids(size: int) -> dict[tuple[int, tuple[int, ...]], int]:
        ids: dict = {}
        reps: dict = {}
        for j in range(m):
            for sub in _position_subsets(n, size):
                root = uf.find((j, sub))
                if root not in reps:
                    reps[root] = len(reps)
                ids[(j, sub)] = reps[root]
        return ids

    vertex_ids = class_ids(1)
    vertex_count = 1 + max(vertex_ids.values())

    # connectivity over vertex classes (cells connect all their vertices)
    comp = _UnionFind()
    for j in range(m):
        anchor = vertex_ids[(j, (0,))]
        for p in range(1, n + 1):
            comp.union(anchor, vertex_ids[(j, (p,))])
    components: dict[int, int] = {}
    for v in range(vertex_count):
        root = comp.find(v)
        if root not in components:
            components[root] = v
    extra: list[tuple[int, int]] = []
    reps = sorted(components.values())
    for other in reps[1:]:
        extra.append((reps[0], other))

    edge_ids = class_ids(2) if n >= 1 else {}
    edge_count = (1 + max(edge_ids.values())) if edge_ids else 0
    edges: list[tuple[int, int]] = [None] * edge_count  # type: ignore[list-item]
    edge_images: list[Word] = [None] * edge_count  # type: ignore[list-item]
    edge_reps: list[tuple[int, tuple[int, ...]]] = [None] * edge_count  # type: ignore[list-item]
    for j in range(m):
        for sub in _position_subsets(n, 2):
            eid = edge_ids[(j, sub)]
            endpoints = (vertex_ids[(j, sub[:1])], vertex_ids[(j, sub[1:])])
            if edges[eid] is None:
                edges[eid] = endpoints
                edge_reps[eid] = (j, sub)
            elif edges[eid] != endpoints:
                raise AssertionError("gluing produced inconsistent edge endpoints")

    faces: list[tuple[int, int, int]] = []
    if n >= 2:
        tri_ids = class_ids(3)
        seen_tri = set()
        for j in range(m):
            for sub in _position_subsets(n, 3):
                tid = tri_ids[(j, sub)]
                if tid in seen_tri:
                    continue
                seen_tri.add(tid)
                p, q, r = sub
                faces.append(
                    (
                        edge_ids[(j, (p, q))] + 1,
                        edge_ids[(j, (q, r))] + 1,
                        -(edge_ids[(j, (p, r))] + 1),
                    )
                )

    # virtual bridge edges realize the extra vertex gluings
    all_edges = list(edges)
    for a, b in extra:
        all_edges.append((a, b))

    skeleton = presentation_from_skeleton(vertex_count, all_edges, faces, base_vertex=0)

    cp_images: list[Word] = []
    for eid in range(edge_count):
        j, sub = edge_reps[eid]
        cp_images.append(_base_edge_word_placeholder(cells[j], sub))
    for _ in extra:
        cp_images.append(())

    vertex_images = [None] * vertex_count  # type: ignore[list-item]
    for j in range(m):
        for p in range(n + 1):
            vid = vertex_ids[(j, (p,))]
            image = cells[j][p]
            if vertex_images[vid] is None:
                vertex_images[vid] = image
            elif vertex_images[vid] != image:
                raise AssertionError("gluing identified vertices over distinct base points")

    boundary_ids = class_ids(n) if n >= 1 else {}
    boundary_count = (1 + max(boundary_ids.values())) if boundary_ids else 0
    cell_boundary = []
    for j in range(m):
        row = []
        for k in range(n + 1):
            sub = positions[:k] + positions[k + 1 :]
            row.append(boundary_ids[(j, sub)])
        cell_boundary.append(tuple(row))

    glued = GluedComplex(
        base=t,
        cells=cells,
        coefficients=coefficients,
        skeleton=skeleton,
        edge_images=tuple(cp_images),
        vertex_images=tuple(vertex_images),
        extra_vertex_gluings=tuple(extra),
        boundary_class_count=boundary_count,
        cell_boundary_classes=tuple(cell_boundary),
    )
    if glued.glued_cycle_boundary():
        raise AssertionError("glued cycle has nonzero boundary despite cycle input")
    if glued.pushforward_cycle().as_dict() != chain.as_dict():
        raise AssertionError("reference map does not push the glued cycle to the input")
    return glued


def _position_subsets(n: int, size: int):
    from itertools import combinations

    return combinations(range(n + 1), size)


def _base_edge_word_placeholder(simplex: tuple[int, ...], sub: tuple[int, int]):
    # stored as the directed base edge; resolved to a word against a
    # ComplexPresentation in _image_words (kept symbolic so the glued complex
    # does not depend on a particular presentation)
    return (simplex[sub[0]], simplex[sub[1]])


def _image_words(glued: GluedComplex, cp: ComplexPresentation) -> list[Word]:
    """Images in the base presentation of the glued complex's generators."""

    def edge_word(eid: int, forward: bool) -> Word:
        image = glued.edge_images[eid]
        if image == ():
            return ()
        u, v = image
        return cp.edge_word(u, v) if forward else cp.edge_word(v, u)

    def path_word(vertex: int) -> Word:
        out: list[int] = []
        for signed in glued.skeleton.tree_path_edges(vertex):
            eid = abs(signed) - 1
            out.extend(edge_word(eid, signed > 0))
        return free_reduce(tuple(out))

    words: list[Word] = []
    sk = glued.skeleton
    for eid in range(len(sk.edges)):
        if sk.edge_letters[eid] == 0:
            continue
        a, b = sk.edges[eid]
        word = free_reduce(path_word(a) + edge_word(eid, True) + invert_word(path_word(b)))
        words.append(word)
    return words


@dataclass(frozen=True)
class GluedCertificate:
    passed: bool
    cell_count: int
    rank_target: int
    achieved_rank: int
    image_index: int | None
    flags: tuple[str, ...]


def verify_glued_complex(
    glued: GluedComplex,
    cp: ComplexPresentation | None = None,
    tietze_budget: int = 500_000,
    max_cosets: int = 100_000,
) -> GluedCertificate:
    """Certify the glued complex: rank target and surjectivity onto the base.

    The achieved rank is the generator count after budgeted elimination; the
    bound d <= n * m is a flag (not a failure) when elimination stalls above
    it.  Surjectivity holds when the image subgroup enumerates to index one;
    enumeration overflow leaves the certificate unresolved.
    """
    if cp is None:
        cp = presentation_from_complex(glued.base)
    n = glued.base.dimension
    m = glued.cell_count
    flags: list[str] = []
    simplified = tietze_simplify(glued.skeleton.presentation, budget=tietze_budget)
    achieved = simplified.presentation.generator_count
    flags.extend(simplified.flags)
    if achieved > n * m:
        flags.append("rank_target_missed")
    image_index: int | None = None
    try:
        table = todd_coxeter(cp.presentation, _image_words(glued, cp), max_cosets=max_cosets)
        image_index = table.degree
    except CosetEnumerationOverflow:
        flags.append("surjectivity_unresolved")
    passed = image_index == 1 and "rank_target_missed" not in flags
    return GluedCertificate(
        passed=passed,
        cell_count=m,
        rank_target=n * m,
        achieved_rank=achieved,
        image_index=image_index,
        flags=tuple(flags),
    )


@dataclass(frozen=True)
class GeneratorExtraction:
    """Deck words extracted from a cycle, one per support simplex, deduplicated."""

    base_vertex: int
    cell_words: tuple[Word, ...]
    words: tuple[Word, ...]

    @property
    def size(self) -> int:
        return len(self.words)


def extract_generators(
    t: OrientedTriangulation,
    cycle: FundamentalCycle | IntegerChain,
    base_vertex: int = 0,
    labels: ComplexPresentation | None = None,
) -> GeneratorExtraction:
    """Deck generators carried by the 0-1 edges of a cycle's support.

    With the fundamental-domain section given by the spanning tree (the
    coset-0 lift of every base vertex), the deck word of support simplex
    sigma is the presentation word of its first edge: tree paths contribute
    the identity.  Identity words are dropped and duplicates merged, so the
    result has size <= support size <= l1.
    """
    chain = cycle.chain if isinstance(cycle, FundamentalCycle) else cycle
    if labels is None:
        labels = presentation_from_complex(t, base_vertex)
    cell_words = []
    for simplex, _ in chain.entries:
        cell_words.append(labels.edge_word(simplex[0], simplex[1]))
    unique = sorted({w for w in cell_words if w})
    return GeneratorExtraction(
        base_vertex=base_vertex,
        cell_words=tuple(cell_words),
        words=tuple(unique),
    )


@dataclass(frozen=True)
class ExtractionCertificate:
    passed: bool
    subgroup_size: int
    index: int | None
    cycle_projects: bool | None
    lift_multiplicity: int | None
    flags: tuple[str, ...]
    table: CosetTable | None


def verify_extraction(
    t: OrientedTriangulation,
    cycle: FundamentalCycle,
    extraction: GeneratorExtraction,
    labels: ComplexPresentation | None = None,
    max_cosets: int = 100_000,
    cache_dir=None,
) -> ExtractionCertificate:
    """Certify an extraction: enumerate <S>, lift the cycle, check multiplicity.

    Builds the cover for <S>, forms the anchored lift of the cycle (first
    vertex of every support simplex at coset 0), and checks that the lift is
    a cycle whose pushforward is the original cycle and which is an exact
    multiple of the cover's fundamental cycle.  Together these force index
    one; a complete enumeration at index > 1 with all chain checks passing
    raises :class:`IndexNotOne` since it contradicts the certified identity.
    Enumeration overflow refuses with an ``unresolved`` flag.
    """
    if labels is None:
        labels = presentation_from_complex(t, extraction.base_vertex)
    flags: list[str] = []
    try:
        table = todd_coxeter(labels.presentation, extraction.words, max_cosets=max_cosets)
    except CosetEnumerationOverflow:
        return ExtractionCertificate(
            passed=False,
            subgroup_size=extraction.size,
            index=None,
            cycle_projects=None,
            lift_multiplicity=None,
            flags=("unresolved",),
            table=None,
        )
    degree = table.degree
    cover = build_cover(t, table, labels=labels, cache_dir=cache_dir)

    data: dict[tuple[int, ...], int] = {}
    for simplex, coeff in cycle.chain.entries:
        v0 = simplex[0]
        lifted = [_lift_vertex_id(v0, 0, degree)]
        for v in simplex[1:]:
            coset = table.act_word(0, labels.edge_word(v0, v))
            lifted.append(_lift_vertex_id(v, coset, degree))
        key = tuple(sorted(lifted))
        data[key] = data.get(key, 0) + coeff * permutation_sign(tuple(lifted))
    lifted_chain = IntegerChain.from_dict(t.dimension, data)

    is_cycle = lifted_chain.is_cycle()
    if not is_cycle:
        flags.append("projected_lift_not_a_cycle")
    projects = cover.project_chain(lifted_chain).as_dict() == cycle.chain.as_dict()
    if not projects:
        flags.append("pushforward_mismatch")
    multiplicity: int | None = None
    if is_cycle:
        from .covers import _chain_multiple
        from .simplicial import fundamental_cycle as _fund

        multiplicity = _chain_multiple(lifted_chain, _fund(cover.total).chain)
        if multiplicity is None:
            flags.append("lift_not_fundamental_multiple")
    passed = (
        degree == 1 and is_cycle and projects and multiplicity is not None and abs(multiplicity) == 1
    )
    if degree != 1 and is_cycle and projects and multiplicity is not None:
        raise IndexNotOne(
            "complete extraction enumerated to index %d with consistent chains" % degree
        )
    return ExtractionCertificate(
        passed=passed,
        subgroup_size=extraction.size,
        index=degree,
        cycle_projects=is_cycle and projects,
        lift_multiplicity=multiplicity,
        flags=tuple(flags),
        table=table,
    )


def _lift_vertex_id(v: int, coset: int, degree: int) -> int:
    # must match the vertex numbering used by covers.build_cover
    return v * degree + coset
