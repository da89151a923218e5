"""Orchestration: catalog -> presentation -> chain -> sequence -> report.

The gradient pipeline assembles, per chain level, the certified volume and
rank intervals plus a per-level extraction certificate on the cover, checks
the rowwise gradient inequality, and emits a self-contained report that
:func:`rankvol.report.validate_report` re-verifies before it is returned.
"""

from __future__ import annotations

import os
from fractions import Fraction
from pathlib import Path

from .catalog import CATALOG_NAMES, KNOWN_VALUES, generate_catalog_manifold
from .chains import ChainResult, ChainSpec, build_chain
from .constructions import (
    build_glued_complex,
    extract_generators,
    verify_extraction,
    verify_glued_complex,
)
from .covers import build_cover
from .groups import rank_bounds
from .report import REPORT_SCHEMA, dump_report, ratio_payload, validate_report
from .simplicial import (
    OrientedTriangulation,
    euler_characteristic,
    fundamental_cycle,
    homology,
    parse_triangulation,
)
from .skeleton import presentation_from_complex
from .volume import Budgets, SoundnessError, stable_sequence, volume_bounds

__all__ = [
    "resolve_manifold",
    "run_theorem_report",
    "run_certificates",
    "run_analysis",
    "default_cache_dir",
]

CACHE_ENV = "RANKVOL_CACHE"


def default_cache_dir() -> str | None:
    return os.environ.get(CACHE_ENV) or None


def resolve_manifold(name: str) -> tuple[OrientedTriangulation, str]:
    """Catalog name or triangulation file path -> validated triangulation."""
    path = Path(name)
    if path.suffix == ".tri" or path.exists():
        return parse_triangulation(path.read_text()), path.stem
    return generate_catalog_manifold(name), name.strip().lower().replace(" ", "")


def _manifold_payload(t: OrientedTriangulation, name: str) -> dict:
    return {
        "name": name,
        "dimension": t.dimension,
        "vertices": t.vertex_count,
        "facet_count": t.facet_count,
        "euler_characteristic": euler_characteristic(t),
        "facets": [list(f) for f in t.facets],
        "hash": t.content_hash(),
    }


def _known_payload(name: str) -> list[dict]:
    return [
        {"quantity": kv.quantity, "value": kv.value, "provenance": kv.provenance}
        for kv in KNOWN_VALUES.get(name, ())
    ]


def run_theorem_report(
    manifold: str,
    spec: ChainSpec,
    budgets: Budgets = Budgets(),
    seed: int = 0,
    cache_dir: str | None = None,
    with_extraction: bool = True,
) -> dict:
    """Full gradient run over a chain; returns the validated report dict.

    Raises :class:`SoundnessError` if any certified interval or the rowwise
    inequality (rank_lower - 1)/index <= volume_upper/index fails; partial
    results (chain truncation, unresolved enumerations) are flagged instead.
    """
    t, name = resolve_manifold(manifold)
    labels = presentation_from_complex(t)
    chain: ChainResult = build_chain(
        labels.presentation,
        spec,
        max_cosets=budgets.max_cosets,
        tietze_budget=budgets.tietze_steps,
    )
    sequence = stable_sequence(
        t,
        list(chain.tables),
        budgets=budgets,
        labels=labels,
        seed=seed,
        cache_dir=cache_dir,
    )
    levels = []
    for level, detail, running in zip(
        sequence.levels, sequence.details, sequence.running_min_volume
    ):
        payload = {
            "index": level.index,
            "volume_lower": level.volume_lower,
            "volume_upper": level.volume_upper,
            "rank_lower": level.rank_lower,
            "rank_upper": level.rank_upper,
            "volume_ratio": ratio_payload(level.volume_ratio),
            "rank_gradient_raw": ratio_payload(level.rank_gradient_raw),
            "rank_gradient": ratio_payload(max(level.rank_gradient_raw, Fraction(0))),
            "running_min_volume": ratio_payload(running),
            "cover_facet_count": detail.cover_facet_count,
            "volume_lower_witness": detail.lower_witness,
            "flags": list(level.flags),
            "certificates": {
                "table": [list(p) for p in detail.table.perms],
                "witness_facets": [list(f) for f in detail.witness.facets],
                "witness_hash": detail.witness.content_hash(),
                "subgroup_presentation": (
                    None
                    if detail.subgroup_presentation is None
                    else {
                        "generators": detail.subgroup_presentation.generator_count,
                        "relators": [list(r) for r in detail.subgroup_presentation.relators],
                    }
                ),
            },
        }
        if with_extraction:
            payload["extraction"] = _cover_extraction(t, detail.table, cache_dir)
        levels.append(payload)
    inequality_rows = all(
        Fraction(lv.rank_lower - 1, lv.index) <= lv.volume_ratio for lv in sequence.levels
    )
    if not inequality_rows:
        raise SoundnessError("gradient inequality failed in an emitted row")
    report = {
        "schema": REPORT_SCHEMA,
        "kind": "gradient",
        "manifold": _manifold_payload(t, name),
        "known_values": _known_payload(name),
        "seed": seed,
        "budgets": {
            "anneal_moves": budgets.anneal_moves,
            "anneal_restarts": budgets.anneal_restarts,
            "tietze_steps": budgets.tietze_steps,
            "max_cosets": budgets.max_cosets,
        },
        "chain": {
            "strategy": spec.strategy,
            "depth": spec.depth,
            "prime": spec.prime,
            "target_index": spec.target_index,
            "flags": list(chain.flags),
        },
        "levels": levels,
        "inequality_rows_hold": inequality_rows,
    }
    failures = validate_report(report)
    if failures:
        raise SoundnessError("emitted report failed revalidation: %s" % "; ".join(failures))
    return report


def _cover_extraction(t, table, cache_dir) -> dict:
    """Extraction certificate run on the cover itself (one per level)."""
    cover = build_cover(t, table, cache_dir=cache_dir)
    cover_labels = presentation_from_complex(cover.total)
    cycle = fundamental_cycle(cover.total)
    extraction = extract_generators(cover.total, cycle, labels=cover_labels)
    certificate = verify_extraction(
        cover.total, cycle, extraction, labels=cover_labels, cache_dir=None
    )
    return {
        "subgroup_size": certificate.subgroup_size,
        "cycle_l1": cycle.l1,
        "index": certificate.index,
        "multiplicity": certificate.lift_multiplicity,
        "passed": certificate.passed,
        "flags": list(certificate.flags),
        "words": [list(w) for w in extraction.words],
    }


def run_certificates(
    manifold: str, budgets: Budgets = Budgets(), cache_dir: str | None = None
) -> dict:
    """Both constructive certificates on a manifold's canonical cycle."""
    t, name = resolve_manifold(manifold)
    labels = presentation_from_complex(t)
    cycle = fundamental_cycle(t)
    glued = build_glued_complex(t, cycle.chain)
    glued_cert = verify_glued_complex(
        glued, labels, tietze_budget=budgets.tietze_steps, max_cosets=budgets.max_cosets
    )
    extraction = extract_generators(t, cycle, labels=labels)
    extraction_cert = verify_extraction(
        t, cycle, extraction, labels=labels, max_cosets=budgets.max_cosets, cache_dir=cache_dir
    )
    return {
        "schema": REPORT_SCHEMA,
        "kind": "certificates",
        "manifold": _manifold_payload(t, name),
        "cycle_l1": cycle.l1,
        "glued": {
            "cells": glued_cert.cell_count,
            "rank_target": glued_cert.rank_target,
            "achieved_rank": glued_cert.achieved_rank,
            "image_index": glued_cert.image_index,
            "extra_vertex_gluings": [list(p) for p in glued.extra_vertex_gluings],
            "passed": glued_cert.passed,
            "flags": list(glued_cert.flags),
        },
        "extraction": {
            "subgroup_size": extraction_cert.subgroup_size,
            "words": [list(w) for w in extraction.words],
            "index": extraction_cert.index,
            "multiplicity": extraction_cert.lift_multiplicity,
            "passed": extraction_cert.passed,
            "flags": list(extraction_cert.flags),
        },
    }


def run_analysis(
    manifold: str, budgets: Budgets = Budgets(), seed: int = 0
) -> dict:
    """Validation, homology, cycle size, rank and volume intervals."""
    t, name = resolve_manifold(manifold)
    labels = presentation_from_complex(t)
    cycle = fundamental_cycle(t)
    bounds, simplified = rank_bounds(labels.presentation, budget=budgets.tietze_steps)
    vb = volume_bounds(
        t,
        presentation=simplified.presentation,
        seed=seed,
        move_budget=budgets.anneal_moves,
        restarts=budgets.anneal_restarts,
    )
    return {
        "schema": REPORT_SCHEMA,
        "kind": "analyze",
        "manifold": _manifold_payload(t, name),
        "known_values": _known_payload(name),
        "homology": [
            {
                "degree": k,
                "betti": homology(t, k).betti,
                "torsion": list(homology(t, k).torsion),
            }
            for k in range(t.dimension + 1)
        ],
        "fundamental_cycle_l1": cycle.l1,
        "rank": {"lower": bounds.lower, "upper": bounds.upper, "flags": list(bounds.flags)},
        "volume": {
            "lower": vb.lower,
            "upper": vb.upper,
            "lower_witness": vb.lower_witness,
            "witness_facets": [list(f) for f in vb.upper_witness.facets],
            "flags": list(vb.flags),
        },
        "catalog": name in CATALOG_NAMES,
    }


def write_report_files(report: dict, out_dir: str | Path) -> dict[str, Path]:
    """Write report.json, report.csv and report.png into ``out_dir``."""
    from .plots import render_gradient_figure
    from .report import render_csv

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {"json": out / "report.json"}
    paths["json"].write_text(dump_report(report))
    if report.get("kind") == "gradient":
        paths["csv"] = out / "report.csv"
        paths["csv"].write_text(render_csv(report))
        paths["figure"] = out / "report.png"
        render_gradient_figure(report, paths["figure"])
    return paths
