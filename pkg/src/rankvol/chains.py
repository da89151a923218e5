"""Descending chains of finite-index subgroups, realized as coset tables.

Three strategies: explicit sublattice congruence chains (for tori and other
free-abelianization groups), iterated mod-p homology kernels, and low-index
descent picking the canonically first subgroup of a target index at each
level.  Every chain starts at the whole group (index 1) and each table is
verified to refine its predecessor.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from ._matrix import rank_mod_p, smith_normal_form
from .groups import (
    CosetTable,
    Presentation,
    SchreierSystem,
    compose_tables,
    low_index_subgroups,
    reidemeister_schreier,
    tietze_simplify,
)

__all__ = [
    "ChainSpec",
    "ChainResult",
    "EnumerationOverflow",
    "build_chain",
    "identity_table",
    "vector_action_table",
    "free_image_vectors",
    "modp_image_vectors",
]


class EnumerationOverflow(RuntimeError):
    """A chain level would exceed the coset budget; the chain is truncated."""


@dataclass(frozen=True)
class ChainSpec:
    """Declarative description of a subgroup chain.

    ``strategy`` is one of ``sublattice`` (congruence subgroups p^k on the
    free abelianization), ``mod-p`` (iterated kernels of H_1(.; Z/p)),
    ``descent`` (canonically first subgroup of index ``target_index`` at each
    level) or ``constant``.  ``depth`` counts descent steps beyond index 1.
    """

    strategy: str
    depth: int
    prime: int = 2
    target_index: int = 2

    def __post_init__(self):
        if self.strategy not in ("sublattice", "mod-p", "descent", "constant"):
            raise ValueError("unknown chain strategy %r" % self.strategy)
        if self.depth < 0:
            raise ValueError("depth must be >= 0")
        if self.prime < 2:
            raise ValueError("prime must be >= 2")
        if self.target_index < 2:
            raise ValueError("target index must be >= 2")


@dataclass(frozen=True)
class ChainResult:
    tables: tuple[CosetTable, ...]
    flags: tuple[str, ...]


def identity_table(p: Presentation) -> CosetTable:
    return CosetTable.from_perms([(0,)] * p.generator_count)


def vector_action_table(p: Presentation, vectors, modulus: int) -> CosetTable:
    """Coset table of the kernel of g_i -> vectors[i] into (Z/modulus)^t.

    Cosets are the reachable vectors, numbered by BFS first appearance from
    zero; the table is verified against the presentation before returning.
    """
    t = len(vectors[0]) if vectors else 0
    zero = (0,) * t
    order: dict[tuple[int, ...], int] = {zero: 0}
    sequence = [zero]
    queue = deque([zero])
    while queue:
        state = queue.popleft()
        for vec in vectors:
            nxt = tuple((a + b) % modulus for a, b in zip(state, vec))
            if nxt not in order:
                order[nxt] = len(sequence)
                sequence.append(nxt)
                queue.append(nxt)
    perms = []
    for vec in vectors:
        perm = []
        for state in sequence:
            nxt = tuple((a + b) % modulus for a, b in zip(state, vec))
            perm.append(order[nxt])
        perms.append(tuple(perm))
    table = CosetTable.from_perms(perms).standardize()
    table.verify(p)
    return table


def free_image_vectors(p: Presentation) -> tuple[int, list[tuple[int, ...]]]:
    """Images of the generators in the free part of the abelianization.

    Requires a torsion-free abelianization (the sublattice strategy's
    domain); the coordinates come from the Smith right transform.
    """
    mat = p.exponent_matrix()
    g = p.generator_count
    if not mat:
        return g, [tuple(1 if i == j else 0 for i in range(g)) for j in range(g)]
    snf = smith_normal_form(mat)
    diag = snf.nonzero_diagonal
    if any(d > 1 for d in diag):
        raise ValueError("abelianization has torsion; sublattice strategy needs Z^b")
    rank = len(diag)
    betti = g - rank
    v = snf.right
    vectors = [tuple(v[j][i] for i in range(rank, g)) for j in range(g)]
    return betti, vectors


def modp_image_vectors(p: Presentation, prime: int) -> tuple[int, list[tuple[int, ...]]]:
    """Images of the generators in H_1 tensor Z/prime, via mod-p echelon form."""
    g = p.generator_count
    rows = [[x % prime for x in row] for row in p.exponent_matrix()]
    echelon: list[list[int]] = []
    pivots: list[int] = []
    for row in rows:
        row = row[:]
        for erow, c in zip(echelon, pivots):
            if row[c]:
                f = row[c]
                row = [(a - f * b) % prime for a, b in zip(row, erow)]
        lead = next((i for i, x in enumerate(row) if x), None)
        if lead is None:
            continue
        inv = pow(row[lead], prime - 2, prime)
        row = [(x * inv) % prime for x in row]
        echelon.append(row)
        pivots.append(lead)
    free_cols = [c for c in range(g) if c not in pivots]

    def project(vec) -> tuple[int, ...]:
        vec = [x % prime for x in vec]
        for erow, c in zip(echelon, pivots):
            if vec[c]:
                f = vec[c]
                vec = [(a - f * b) % prime for a, b in zip(vec, erow)]
        return tuple(vec[c] for c in free_cols)

    vectors = [project([1 if i == j else 0 for i in range(g)]) for j in range(g)]
    return len(free_cols), vectors


def modp_rank(p: Presentation, prime: int) -> int:
    """dim of H_1 tensor Z/prime, cheap (used to predict kernel indices)."""
    mat = p.exponent_matrix()
    if not mat:
        return p.generator_count
    return p.generator_count - rank_mod_p(mat, prime)


def build_chain(
    p: Presentation, spec: ChainSpec, max_cosets: int = 100_000, tietze_budget: int = 500_000
) -> ChainResult:
    """Build the coset-table chain described by ``spec`` over presentation ``p``.

    Chains always begin with the index-1 table.  A level whose projected index
    exceeds ``max_cosets`` truncates the chain with a ``chain_truncated``
    flag rather than failing the run.
    """
    flags: list[str] = []
    tables = [identity_table(p)]
    if spec.strategy == "constant":
        tables.extend(identity_table(p) for _ in range(spec.depth))
        return ChainResult(tuple(tables), tuple(flags))

    if spec.strategy == "sublattice":
        betti, vectors = free_image_vectors(p)
        if betti == 0 and spec.depth > 0:
            flags.append("chain_truncated:abelianization_finite")
            return ChainResult(tuple(tables), tuple(flags))
        for k in range(1, spec.depth + 1):
            modulus = spec.prime**k
            if modulus**betti > max_cosets:
                flags.append("chain_truncated:level_%d_exceeds_budget" % k)
                break
            tables.append(vector_action_table(p, vectors, modulus))
        _verify_descending(tables)
        return ChainResult(tuple(tables), tuple(flags))

    # iterated strategies need a subgroup presentation at each level
    for k in range(1, spec.depth + 1):
        parent = tables[-1]
        system = reidemeister_schreier(p, parent)
        if spec.strategy == "mod-p":
            t_rank = modp_rank(system.presentation, spec.prime)
            projected = parent.degree * spec.prime**t_rank
            if t_rank == 0:
                flags.append("chain_truncated:level_%d_trivial_quotient" % k)
                break
            if projected > max_cosets:
                flags.append("chain_truncated:level_%d_exceeds_budget" % k)
                break
            _, vectors = modp_image_vectors(system.presentation, spec.prime)
            child = vector_action_table(system.presentation, vectors, spec.prime)
        else:  # descent
            if parent.degree * spec.target_index > max_cosets:
                flags.append("chain_truncated:level_%d_exceeds_budget" % k)
                break
            simplified = tietze_simplify(system.presentation, budget=tietze_budget)
            candidates = [
                tab
                for tab in low_index_subgroups(simplified.presentation, spec.target_index)
                if tab.degree == spec.target_index
            ]
            if not candidates:
                flags.append("chain_truncated:level_%d_no_subgroup" % k)
                break
            child_simplified = candidates[0]
            child = child_simplified.induced(
                simplified.rewrites, system.presentation.generator_count
            )
        composed = compose_tables(system, child).standardize()
        composed.verify(p)
        tables.append(composed)
    _verify_descending(tables)
    return ChainResult(tuple(tables), tuple(flags))


def _verify_descending(tables) -> None:
    for prev, cur in zip(tables, tables[1:]):
        if not cur.refines(prev):
            raise AssertionError("chain tables are not descending")
