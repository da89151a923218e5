"""Certified rank and integral-volume bounds on triangulated manifolds.

The library certifies both sides of the bound chain on closed oriented
triangulations: generator rank of the fundamental group (abelianization
below, presentation simplification above), integral volume of fundamental
cycles (Betti numbers below, bistellar search above), their behaviour along
descending chains of finite-index subgroups, and two constructive
certificates tying rank to cycle size.
"""

from .catalog import CATALOG_NAMES, generate_catalog_manifold
from .chains import ChainSpec, build_chain
from .constructions import (
    GeneratorExtraction,
    GluedComplex,
    build_glued_complex,
    extract_generators,
    verify_extraction,
    verify_glued_complex,
)
from .covers import CoverComplex, build_cover, lift_fundamental_cycle, verify_covering
from .groups import (
    CosetTable,
    Presentation,
    RankBounds,
    Word,
    abelianization_min_generators,
    low_index_subgroups,
    rank_bounds,
    reidemeister_schreier,
    tietze_simplify,
    todd_coxeter,
)
from .pipeline import run_analysis, run_certificates, run_theorem_report
from .simplicial import (
    FundamentalCycle,
    HomologyGroup,
    IntegerChain,
    OrientedTriangulation,
    SnfResult,
    boundary_matrix,
    euler_characteristic,
    fundamental_cycle,
    homology,
    parse_triangulation,
    smith_normal_form,
    validate_triangulation,
)
from .skeleton import ComplexPresentation, presentation_from_complex
from .volume import (
    Budgets,
    SoundnessError,
    StableSequence,
    VolumeBound,
    pachner_simplify,
    stable_sequence,
    volume_bounds,
)

__version__ = "0.1.0"

__all__ = [
    "CATALOG_NAMES",
    "generate_catalog_manifold",
    "ChainSpec",
    "build_chain",
    "GeneratorExtraction",
    "GluedComplex",
    "build_glued_complex",
    "extract_generators",
    "verify_extraction",
    "verify_glued_complex",
    "CoverComplex",
    "build_cover",
    "lift_fundamental_cycle",
    "verify_covering",
    "CosetTable",
    "Presentation",
    "RankBounds",
    "Word",
    "abelianization_min_generators",
    "low_index_subgroups",
    "rank_bounds",
    "reidemeister_schreier",
    "tietze_simplify",
    "todd_coxeter",
    "run_analysis",
    "run_certificates",
    "run_theorem_report",
    "FundamentalCycle",
    "HomologyGroup",
    "IntegerChain",
    "OrientedTriangulation",
    "SnfResult",
    "boundary_matrix",
    "euler_characteristic",
    "fundamental_cycle",
    "homology",
    "parse_triangulation",
    "smith_normal_form",
    "validate_triangulation",
    "ComplexPresentation",
    "presentation_from_complex",
    "Budgets",
    "SoundnessError",
    "StableSequence",
    "VolumeBound",
    "pachner_simplify",
    "stable_sequence",
    "volume_bounds",
    "__version__",
]
