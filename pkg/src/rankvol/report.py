"""Machine-readable reports: schema, flat tables, offline re-verification.

Reports carry full witnesses (triangulations, coset tables, presentations,
extraction words) so a third party can re-check every number without
re-running any search.  The validator does exactly that.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .groups import (
    CosetTable,
    Presentation,
    abelianization_min_generators,
    free_reduce,
)
from .simplicial import homology, validate_triangulation
from .skeleton import presentation_from_complex

REPORT_SCHEMA = "rank-volume-report/v1"
CONFIG_SCHEMA = "rankvol-config/v1"

CSV_COLUMNS = (
    "index",
    "volume_upper",
    "volume_upper_per_index",
    "rank_lower",
    "rank_upper",
    "rank_gradient",
    "rank_gradient_raw",
    "flags",
)


def ratio_payload(value: Fraction) -> dict:
    return {"fraction": "%d/%d" % (value.numerator, value.denominator), "value": float(value)}


def render_csv(report: dict) -> str:
    """Flat per-level table, one row per chain level."""
    lines = [",".join(CSV_COLUMNS)]
    for level in report["levels"]:
        raw = Fraction(level["rank_gradient_raw"]["fraction"])
        floored = max(raw, Fraction(0))
        row = (
            str(level["index"]),
            str(level["volume_upper"]),
            repr(float(Fraction(level["volume_ratio"]["fraction"]))),
            str(level["rank_lower"]),
            str(level["rank_upper"]),
            repr(float(floored)),
            repr(float(raw)),
            ";".join(level["flags"]),
        )
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def render_table(report: dict) -> str:
    """Human-oriented fixed-width view of the same rows."""
    header = "%8s %12s %14s %10s %10s %14s %s" % (
        "index",
        "vol_upper",
        "vol/idx",
        "rank_lo",
        "rank_hi",
        "(rank-1)/idx",
        "flags",
    )
    lines = [header, "-" * len(header)]
    for level in report["levels"]:
        raw = Fraction(level["rank_gradient_raw"]["fraction"])
        lines.append(
            "%8d %12d %14.6g %10d %10d %14.6g %s"
            % (
                level["index"],
                level["volume_upper"],
                float(Fraction(level["volume_ratio"]["fraction"])),
                level["rank_lower"],
                level["rank_upper"],
                float(max(raw, Fraction(0))),
                ";".join(level["flags"]) or "-",
            )
        )
    if report.get("known_values"):
        lines.append("")
        for kv in report["known_values"]:
            lines.append(
                "known %s = %g  (%s)" % (kv["quantity"], kv["value"], kv["provenance"])
            )
    return "\n".join(lines) + "\n"


def dump_report(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=1) + "\n"


def _decode_words(words) -> tuple:
    return tuple(free_reduce(tuple(w)) for w in words)


def _decode_presentation(payload) -> Presentation:
    return Presentation(
        generator_count=int(payload["generators"]),
        relators=_decode_words(payload["relators"]),
    )


def _decode_table(payload) -> CosetTable:
    return CosetTable.from_perms([tuple(p) for p in payload])


def validate_report(report: dict) -> list[str]:
    """Re-check every certificate in a report; returns failure strings."""
    failures: list[str] = []
    if report.get("schema") != REPORT_SCHEMA:
        return ["unknown schema %r" % report.get("schema")]
    base_payload = report.get("manifold", {})
    try:
        base = validate_triangulation([tuple(f) for f in base_payload["facets"]])
    except Exception as exc:  # noqa: BLE001
        return ["base triangulation invalid: %s" % exc]
    labels = presentation_from_complex(base)
    prev_ratio: Fraction | None = None
    prev_upper: tuple[int, int] | None = None
    for pos, level in enumerate(report.get("levels", ())):
        where = "level %d (index %s)" % (pos, level.get("index"))
        index = int(level["index"])
        cert = level.get("certificates", {})
        try:
            table = _decode_table(cert["table"])
            table.verify(labels.presentation)
            if table.degree != index:
                failures.append("%s: table degree %d != index" % (where, table.degree))
        except Exception as exc:  # noqa: BLE001
            failures.append("%s: coset table fails verification: %s" % (where, exc))
            continue
        try:
            witness = validate_triangulation([tuple(f) for f in cert["witness_facets"]])
            if witness.facet_count != int(level["volume_upper"]):
                failures.append("%s: witness facet count != volume_upper" % where)
        except Exception as exc:  # noqa: BLE001
            failures.append("%s: witness invalid: %s" % (where, exc))
            continue
        lower = 1
        for k in range(witness.dimension + 1):
            lower = max(lower, homology(witness, k).betti)
        if cert.get("subgroup_presentation") is not None:
            presentation = _decode_presentation(cert["subgroup_presentation"])
            ab, _ = abelianization_min_generators(presentation)
            if ab != int(level["rank_lower"]):
                failures.append("%s: rank_lower does not recompute" % where)
            if presentation.generator_count != int(level["rank_upper"]):
                failures.append("%s: rank_upper does not recompute" % where)
            lower = max(lower, ab)
        if lower != int(level["volume_lower"]):
            failures.append("%s: volume_lower does not recompute" % where)
        ratio = Fraction(int(level["volume_upper"]), index)
        if Fraction(level["volume_ratio"]["fraction"]) != ratio:
            failures.append("%s: volume ratio mismatch" % where)
        raw = Fraction(int(level["rank_lower"]) - 1, index)
        if Fraction(level["rank_gradient_raw"]["fraction"]) != raw:
            failures.append("%s: rank gradient mismatch" % where)
        if int(level["volume_lower"]) > int(level["volume_upper"]):
            failures.append("%s: volume interval inverted" % where)
        if int(level["rank_lower"]) > int(level["rank_upper"]):
            failures.append("%s: rank interval inverted" % where)
        if int(level["rank_lower"]) > int(level["volume_upper"]):
            failures.append("%s: rank lower exceeds volume upper" % where)
        if raw > ratio:
            failures.append("%s: gradient inequality violated" % where)
        if prev_ratio is not None and ratio > prev_ratio and level.get("running_min_volume"):
            pass  # running minimum handles non-monotone uppers
        if level.get("running_min_volume"):
            running = Fraction(level["running_min_volume"]["fraction"])
            expected = ratio if prev_ratio is None else min(prev_ratio, ratio)
            if running != expected:
                failures.append("%s: running minimum mismatch" % where)
            prev_ratio = running
        if prev_upper is not None:
            lo_scaled = Fraction(int(level["volume_lower"]), index)
            hi_scaled = Fraction(prev_upper[0], prev_upper[1])
            if lo_scaled > hi_scaled:
                failures.append("%s: certified intervals contradict monotonicity" % where)
        prev_upper = (int(level["volume_upper"]), index)
        extraction = level.get("extraction")
        if extraction is not None and extraction.get("passed"):
            if extraction.get("index") != 1:
                failures.append("%s: passing extraction with index != 1" % where)
    return failures


def load_config(path) -> dict:
    with open(path) as handle:
        config = json.load(handle)
    if config.get("schema") != CONFIG_SCHEMA:
        raise ValueError(
            "config schema must be %r, got %r" % (CONFIG_SCHEMA, config.get("schema"))
        )
    return config
