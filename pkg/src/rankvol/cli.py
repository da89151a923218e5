"""Command line interface.

Subcommands: analyze, gradient, verify-lemmas, simplify, report.  A JSON
config file (schema ``rankvol-config/v1``) supplies defaults; explicit flags
win.  The gradient path writes report.json, report.csv and report.png side
by side.  Exit codes: 0 success, 1 usage or input errors, 2 soundness
violation, 3 report validation failure, 4 certificate failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .chains import ChainSpec
from .pipeline import (
    CACHE_ENV,
    default_cache_dir,
    run_analysis,
    run_certificates,
    run_theorem_report,
    write_report_files,
)
from .report import dump_report, load_config, render_csv, render_table, validate_report
from .simplicial import TriangulationError, format_triangulation, parse_triangulation
from .volume import Budgets, SoundnessError, pachner_simplify


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON config file (rankvol-config/v1)")
    parser.add_argument("--seed", type=int, default=None, help="seed for all randomness")
    parser.add_argument("--cache-dir", default=None, help="cover cache (default $%s)" % CACHE_ENV)
    parser.add_argument("--anneal-moves", type=int, default=None)
    parser.add_argument("--anneal-restarts", type=int, default=None)
    parser.add_argument("--tietze-steps", type=int, default=None)
    parser.add_argument("--max-cosets", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rankvol",
        description="Certified rank and integral-volume bounds on triangulated manifolds",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="validate a manifold and bound its invariants")
    p.add_argument("manifold", help="catalog name like surface(2) or a .tri file")
    p.add_argument("--out", help="directory for analyze.json")
    p.add_argument("--format", choices=("table", "machine"), default="table")
    _add_common(p)

    p = sub.add_parser("gradient", help="run the chain pipeline and emit a report")
    p.add_argument("manifold")
    p.add_argument(
        "--chain",
        required=True,
        choices=("sublattice", "mod-p", "descent", "constant"),
        help="chain strategy",
    )
    p.add_argument("--depth", type=int, required=True, help="descent steps beyond index 1")
    p.add_argument("--prime", type=int, default=2)
    p.add_argument("--target-index", type=int, default=2)
    p.add_argument("--out", help="output directory (default reports/<name>-<strategy>)")
    p.add_argument("--format", choices=("table", "machine"), default="table")
    p.add_argument(
        "--skip-level-certificates",
        action="store_true",
        help="skip the per-level extraction certificates",
    )
    _add_common(p)

    p = sub.add_parser("verify-lemmas", help="run both constructive certificates")
    p.add_argument("manifold")
    p.add_argument("--out", help="directory for certificates.json")
    _add_common(p)

    p = sub.add_parser("simplify", help="bistellar simplification of a triangulation file")
    p.add_argument("file", help="triangulation in the text format")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, default=100_000, help="move proposals")
    p.add_argument("--restarts", type=int, default=3)
    p.add_argument("--out", help="output .tri path (default <file>.simplified.tri)")
    p.add_argument("--figure", help="optional progress figure path")
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--cache-dir", default=None)

    p = sub.add_parser("report", help="revalidate and render a stored report")
    p.add_argument("file", help="report.json produced by gradient")
    p.add_argument("--format", choices=("table", "machine"), default="table")
    return parser


def _budgets_from(args, config: dict) -> Budgets:
    base = Budgets()
    section = config.get("budgets", {})

    def pick(flag, key, default):
        if flag is not None:
            return flag
        return section.get(key, default)

    return Budgets(
        anneal_moves=pick(getattr(args, "anneal_moves", None), "anneal_moves", base.anneal_moves),
        anneal_restarts=pick(
            getattr(args, "anneal_restarts", None), "anneal_restarts", base.anneal_restarts
        ),
        tietze_steps=pick(getattr(args, "tietze_steps", None), "tietze_steps", base.tietze_steps),
        max_cosets=pick(getattr(args, "max_cosets", None), "max_cosets", base.max_cosets),
    )


def _seed_from(args, config: dict) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    return int(config.get("seed", 0))


def _cache_from(args, config: dict) -> str | None:
    return getattr(args, "cache_dir", None) or config.get("cache_dir") or default_cache_dir()


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    config = {}
    if getattr(args, "config", None):
        config = load_config(args.config)
    try:
        return _dispatch(args, config)
    except SoundnessError as exc:
        print("soundness violation: %s" % exc, file=sys.stderr)
        return 2
    except (TriangulationError, ValueError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1


def _dispatch(args, config: dict) -> int:
    if args.command == "analyze":
        payload = run_analysis(
            args.manifold, budgets=_budgets_from(args, config), seed=_seed_from(args, config)
        )
        if args.format == "machine":
            print(dump_report(payload), end="")
        else:
            _print_analysis(payload)
        if args.out:
            out = Path(args.out)
            out.mkdir(parents=True, exist_ok=True)
            (out / "analyze.json").write_text(dump_report(payload))
        return 0

    if args.command == "gradient":
        spec = ChainSpec(
            strategy=args.chain,
            depth=args.depth,
            prime=args.prime,
            target_index=args.target_index,
        )
        report = run_theorem_report(
            args.manifold,
            spec,
            budgets=_budgets_from(args, config),
            seed=_seed_from(args, config),
            cache_dir=_cache_from(args, config),
            with_extraction=not args.skip_level_certificates,
        )
        out_dir = args.out or config.get("out_dir")
        if out_dir is None:
            out_dir = Path("reports") / (
                "%s-%s-d%d" % (report["manifold"]["name"], args.chain, args.depth)
            )
        paths = write_report_files(report, out_dir)
        if args.format == "machine":
            print(dump_report(report), end="")
        else:
            print(render_table(report), end="")
            for flag in report["chain"]["flags"]:
                print("chain flag: %s" % flag)
        print("wrote %s" % ", ".join(str(p) for p in paths.values()))
        return 0

    if args.command == "verify-lemmas":
        payload = run_certificates(
            args.manifold,
            budgets=_budgets_from(args, config),
            cache_dir=_cache_from(args, config),
        )
        glued, extraction = payload["glued"], payload["extraction"]
        print(
            "glued-complex certificate: %s (cells=%d, achieved rank %d <= target %d, image index %s)"
            % (
                "PASS" if glued["passed"] else "FAIL",
                glued["cells"],
                glued["achieved_rank"],
                glued["rank_target"],
                glued["image_index"],
            )
        )
        print(
            "extraction certificate:    %s (|S|=%d <= l1=%d, index %s, multiplicity %s)"
            % (
                "PASS" if extraction["passed"] else "FAIL",
                extraction["subgroup_size"],
                payload["cycle_l1"],
                extraction["index"],
                extraction["multiplicity"],
            )
        )
        if args.out:
            out = Path(args.out)
            out.mkdir(parents=True, exist_ok=True)
            (out / "certificates.json").write_text(dump_report(payload))
        return 0 if glued["passed"] and extraction["passed"] else 4

    if args.command == "simplify":
        text = Path(args.file).read_text()
        t = parse_triangulation(text)
        result = pachner_simplify(
            t, seed=args.seed, move_budget=args.budget, restarts=args.restarts
        )
        out = Path(args.out) if args.out else Path(args.file).with_suffix(".simplified.tri")
        out.write_text(
            format_triangulation(
                result.triangulation,
                comment="simplified from %d facets (seed=%d, budget=%d)"
                % (result.initial_facets, args.seed, args.budget),
            )
        )
        print(
            "%d -> %d facets (%d proposals, %d accepted)%s"
            % (
                result.initial_facets,
                result.triangulation.facet_count,
                result.proposals_used,
                result.moves_accepted,
                " flags: " + ",".join(result.flags) if result.flags else "",
            )
        )
        print("wrote %s" % out)
        if args.figure:
            from .plots import render_simplify_figure

            render_simplify_figure(result.trace, result.initial_facets, args.figure)
            print("wrote %s" % args.figure)
        return 0

    if args.command == "report":
        report = json.loads(Path(args.file).read_text())
        failures = validate_report(report)
        if failures:
            for f in failures:
                print("invalid: %s" % f, file=sys.stderr)
            return 3
        if args.format == "machine":
            print(dump_report(report), end="")
        else:
            print(render_table(report), end="")
            print("report validates: all certificates re-checked")
        return 0

    raise AssertionError("unhandled command %r" % args.command)


def _print_analysis(payload: dict) -> None:
    m = payload["manifold"]
    print(
        "%s: dimension %d, %d vertices, %d facets, chi = %d"
        % (m["name"], m["dimension"], m["vertices"], m["facet_count"], m["euler_characteristic"])
    )
    for row in payload["homology"]:
        torsion = (
            " + " + " + ".join("Z/%d" % d for d in row["torsion"]) if row["torsion"] else ""
        )
        print("  H_%d = Z^%d%s" % (row["degree"], row["betti"], torsion))
    print("  fundamental cycle l1 = %d" % payload["fundamental_cycle_l1"])
    r, v = payload["rank"], payload["volume"]
    print("  rank interval   [%d, %d]%s" % (r["lower"], r["upper"], _flags(r)))
    print(
        "  volume interval [%d, %d] (lower from %s)%s"
        % (v["lower"], v["upper"], v["lower_witness"], _flags(v))
    )
    for kv in payload.get("known_values", ()):
        print("  known %s = %g (%s)" % (kv["quantity"], kv["value"], kv["provenance"]))


def _flags(section: dict) -> str:
    return " flags: " + ",".join(section["flags"]) if section["flags"] else ""


if __name__ == "__main__":
    sys.exit(main())
