"""Covering triangulations built from coset tables.

A coset table for the fundamental group of a base triangulation determines a
finite cover: vertices are (base vertex, coset) pairs and each base facet
lifts once per coset, with edge transitions following the coset action of the
edge words (spanning-tree edges act trivially).  The fundamental-domain
section is the coset-0 copy of each base vertex.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

from .groups import CosetTable
from .simplicial import (
    FundamentalCycle,
    IntegerChain,
    OrientedTriangulation,
    euler_characteristic,
    format_triangulation,
    fundamental_cycle,
    parse_triangulation,
    permutation_sign,
    validate_triangulation,
)
from .skeleton import ComplexPresentation, presentation_from_complex

__all__ = [
    "LabelMismatch",
    "CoverComplex",
    "CoveringCertificate",
    "build_cover",
    "lift_fundamental_cycle",
    "verify_covering",
]

CACHE_SCHEMA = "cover-cache/v1"


class LabelMismatch(ValueError):
    """Coset table does not match the presentation read off this base."""


@dataclass(frozen=True)
class CoverComplex:
    """Finite cover with deck labelling and projection data."""

    total: OrientedTriangulation
    base: OrientedTriangulation
    degree: int
    vertex_map: tuple[tuple[int, int], ...]
    facet_map: tuple[int, ...]

    def project_vertex(self, v: int) -> int:
        return self.vertex_map[v][0]

    def project_chain(self, chain: IntegerChain) -> IntegerChain:
        """Chain-level pushforward along the covering projection."""
        data: dict[tuple[int, ...], int] = {}
        for simplex, coeff in chain.entries:
            image = tuple(self.vertex_map[v][0] for v in simplex)
            if len(set(image)) != len(image):
                raise ValueError("projection degenerates a simplex")
            key = tuple(sorted(image))
            data[key] = data.get(key, 0) + coeff * permutation_sign(image)
        return IntegerChain.from_dict(chain.degree, data)


def build_cover(
    base: OrientedTriangulation,
    table: CosetTable,
    labels: ComplexPresentation | None = None,
    cache_dir: str | Path | None = None,
) -> CoverComplex:
    """Build the covering triangulation associated with a coset table.

    ``labels`` must be the presentation read off ``base`` (recomputed when
    omitted); a table that does not satisfy its relators raises
    :class:`LabelMismatch`.  When ``cache_dir`` is given, covers are stored on
    disk keyed by (base hash, table hash) and re-used across runs.
    """
    if labels is None:
        labels = presentation_from_complex(base)
    if labels.triangulation.facets != base.facets:
        raise LabelMismatch("labels were computed from a different base")
    if table.generator_count != labels.presentation.generator_count:
        raise LabelMismatch(
            "table has %d generators, presentation has %d"
            % (table.generator_count, labels.presentation.generator_count)
        )
    try:
        table.verify(labels.presentation)
    except AssertionError as exc:
        raise LabelMismatch(str(exc)) from exc

    if cache_dir is not None:
        cached = _cache_load(Path(cache_dir), base, table)
        if cached is not None:
            return cached

    degree = table.degree
    nv = base.vertex_count

    def vid(v: int, c: int) -> int:
        return v * degree + c

    facets: list[tuple[int, ...]] = []
    signs: list[int] = []
    facet_map: list[int] = []
    for fi, facet in enumerate(base.facets):
        v0 = facet[0]
        words = [labels.edge_word(v0, v) for v in facet[1:]]
        for c in range(degree):
            lifted = [vid(v0, c)]
            for v, word in zip(facet[1:], words):
                lifted.append(vid(v, table.act_word(c, word)))
            facets.append(tuple(lifted))
            signs.append(base.orientation_signs[fi])
            facet_map.append(fi)

    certified = validate_triangulation(facets)
    if certified.facets != tuple(facets):
        raise AssertionError("validation relabelled a contiguous cover")
    total = OrientedTriangulation(
        dimension=base.dimension,
        facets=tuple(facets),
        orientation_signs=tuple(signs),
        vertex_labels=certified.vertex_labels,
    )
    _check_lifted_orientation(total)
    vertex_map = tuple((v, c) for v in range(nv) for c in range(degree))
    cover = CoverComplex(
        total=total,
        base=base,
        degree=degree,
        vertex_map=vertex_map,
        facet_map=tuple(facet_map),
    )
    if cache_dir is not None:
        _cache_store(Path(cache_dir), cover, table)
    return cover


def _check_lifted_orientation(t: OrientedTriangulation) -> None:
    data: dict[tuple[int, ...], int] = {}
    for f, sign in zip(t.facets, t.orientation_signs):
        data[tuple(sorted(f))] = sign * permutation_sign(f)
    if not IntegerChain.from_dict(t.dimension, data).is_cycle():
        raise AssertionError("lifted orientation is not coherent")


def lift_fundamental_cycle(cover: CoverComplex, cycle: FundamentalCycle) -> FundamentalCycle:
    """Full preimage of a base fundamental cycle; l1 multiplies by the degree."""
    base_coeffs = cycle.chain.as_dict()
    data: dict[tuple[int, ...], int] = {}
    for i, facet in enumerate(cover.total.facets):
        base_facet = cover.base.facets[cover.facet_map[i]]
        coeff = base_coeffs.get(tuple(sorted(base_facet)), 0)
        if not coeff:
            continue
        order = sorted(range(len(facet)), key=lambda k: facet[k])
        projected = tuple(base_facet[k] for k in order)
        key = tuple(sorted(facet))
        data[key] = data.get(key, 0) + coeff * permutation_sign(projected)
    chain = IntegerChain.from_dict(cover.total.dimension, data)
    if not chain.is_cycle():
        raise AssertionError("lift of a cycle failed to be a cycle")
    return FundamentalCycle(chain=chain, l1=chain.l1)


@dataclass(frozen=True)
class CoveringCertificate:
    passed: bool
    degree: int
    pushforward_multiplicity: int | None
    failures: tuple[str, ...]


def verify_covering(cover: CoverComplex) -> CoveringCertificate:
    """Re-check all covering invariants; failures are reported, not raised."""
    failures: list[str] = []
    degree = cover.degree
    base, total = cover.base, cover.total
    if total.facet_count != degree * base.facet_count:
        failures.append("facet count is not degree * base facet count")
    for k in range(base.dimension + 1):
        if len(total.simplices(k)) != degree * len(base.simplices(k)):
            failures.append("%d-simplex count is not multiplied by degree" % k)
    if euler_characteristic(total) != degree * euler_characteristic(base):
        failures.append("Euler characteristic is not multiplied by degree")
    if len(cover.vertex_map) != total.vertex_count:
        failures.append("vertex map size mismatch")
    if len(set(cover.vertex_map)) != len(cover.vertex_map):
        failures.append("vertex map is not injective")
    for i, facet in enumerate(total.facets):
        fi = cover.facet_map[i] if i < len(cover.facet_map) else None
        if fi is None or not 0 <= fi < base.facet_count:
            failures.append("facet %d has no base facet" % i)
            continue
        image = tuple(cover.vertex_map[v][0] for v in facet)
        if image != base.facets[fi]:
            failures.append("facet bijection violation at facet %d" % i)
    try:
        validate_triangulation(total.facets)
        _check_lifted_orientation(total)
    except Exception as exc:  # noqa: BLE001 - report, do not raise
        failures.append("cover fails validation: %s" % exc)
    multiplicity: int | None = None
    if not failures:
        pushed = cover.project_chain(fundamental_cycle(total).chain)
        base_cycle = fundamental_cycle(base).chain
        multiplicity = _chain_multiple(pushed, base_cycle)
        if multiplicity is None or abs(multiplicity) != degree:
            failures.append("pushforward of the fundamental class is not degree * base")
    return CoveringCertificate(
        passed=not failures,
        degree=degree,
        pushforward_multiplicity=multiplicity,
        failures=tuple(failures),
    )


def _chain_multiple(chain: IntegerChain, unit: IntegerChain) -> int | None:
    """The integer lambda with chain == lambda * unit, or None."""
    if not unit.entries:
        return None
    first_simplex, first_coeff = unit.entries[0]
    lam, rem = divmod(chain.coefficient(first_simplex), first_coeff)
    if rem:
        return None
    return lam if chain.as_dict() == unit.scale(lam).as_dict() else None


def _cache_paths(cache_dir: Path, base_hash: str, table_hash: str) -> tuple[Path, Path]:
    d = cache_dir / base_hash
    return d / (table_hash + ".tri"), d / (table_hash + ".map.json")


def _cache_store(cache_dir: Path, cover: CoverComplex, table: CosetTable) -> None:
    tri_path, map_path = _cache_paths(
        cache_dir, cover.base.content_hash(), table.content_hash()
    )
    tri_path.parent.mkdir(parents=True, exist_ok=True)
    sidecar = {
        "schema": CACHE_SCHEMA,
        "degree": cover.degree,
        "base_hash": cover.base.content_hash(),
        "table_hash": table.content_hash(),
        "vertex_map": [list(p) for p in cover.vertex_map],
        "facet_map": list(cover.facet_map),
        "orientation_signs": list(cover.total.orientation_signs),
    }
    _atomic_write(tri_path, format_triangulation(cover.total, comment="cached cover"))
    _atomic_write(map_path, json.dumps(sidecar, sort_keys=True))


def _atomic_write(path: Path, payload: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _cache_load(
    cache_dir: Path, base: OrientedTriangulation, table: CosetTable
) -> CoverComplex | None:
    tri_path, map_path = _cache_paths(cache_dir, base.content_hash(), table.content_hash())
    if not (tri_path.exists() and map_path.exists()):
        return None
    try:
        sidecar = json.loads(map_path.read_text())
        if sidecar.get("schema") != CACHE_SCHEMA:
            return None
        if sidecar.get("base_hash") != base.content_hash():
            return None
        parsed = parse_triangulation(tri_path.read_text())
        total = OrientedTriangulation(
            dimension=parsed.dimension,
            facets=parsed.facets,
            orientation_signs=tuple(sidecar["orientation_signs"]),
            vertex_labels=parsed.vertex_labels,
        )
        _check_lifted_orientation(total)
        cover = CoverComplex(
            total=total,
            base=base,
            degree=int(sidecar["degree"]),
            vertex_map=tuple((int(a), int(b)) for a, b in sidecar["vertex_map"]),
            facet_map=tuple(int(x) for x in sidecar["facet_map"]),
        )
    except (ValueError, KeyError, OSError):
        return None
    return cover if verify_covering(cover).passed else None
