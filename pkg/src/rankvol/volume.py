"""Certified volume bounds: bistellar simplification and stable sequences.

Upper bounds on integral volume are facet counts of triangulations found by
seeded simulated annealing over bistellar moves (the degree-n cycle space of a
fixed triangulation has rank one, so improvement only comes from changing the
triangulation).  Lower bounds come from Betti numbers and abelianization
rank.  Sequences over subgroup chains pair each cover's volume interval with
the subgroup's rank interval.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .covers import build_cover
from .groups import (
    CosetEnumerationOverflow,
    CosetTable,
    Presentation,
    RankBounds,
    rank_bounds,
    reidemeister_schreier,
)
from .simplicial import (
    OrientedTriangulation,
    homology,
    permutation_sign,
    validate_triangulation,
)
from .skeleton import ComplexPresentation, presentation_from_complex

__all__ = [
    "Budgets",
    "SoundnessError",
    "ChainNotDescending",
    "SimplifyResult",
    "pachner_simplify",
    "VolumeBound",
    "volume_bounds",
    "LevelReport",
    "LevelDetail",
    "StableSequence",
    "stable_sequence",
]


class SoundnessError(AssertionError):
    """A certified bound came out inconsistent; this is a build defect."""


class ChainNotDescending(ValueError):
    """Chain tables are not successively contained subgroups."""


@dataclass(frozen=True)
class Budgets:
    """All tunable work limits; every run records the budgets it used."""

    anneal_moves: int = 100_000
    anneal_restarts: int = 3
    tietze_steps: int = 500_000
    max_cosets: int = 100_000


@dataclass(frozen=True)
class SimplifyResult:
    triangulation: OrientedTriangulation
    flags: tuple[str, ...]
    proposals_used: int
    moves_accepted: int
    initial_facets: int
    trace: tuple[tuple[int, int], ...] = ()


class _IndexedSet:
    """Set with O(1) deterministic random choice (list + position map)."""

    __slots__ = ("items", "pos")

    def __init__(self):
        self.items: list = []
        self.pos: dict = {}

    def add(self, x) -> None:
        if x not in self.pos:
            self.pos[x] = len(self.items)
            self.items.append(x)

    def discard(self, x) -> None:
        i = self.pos.pop(x, None)
        if i is None:
            return
        last = self.items.pop()
        if i < len(self.items):
            self.items[i] = last
            self.pos[last] = i

    def __len__(self) -> int:
        return len(self.items)

    def __contains__(self, x) -> bool:
        return x in self.pos

    def choice(self, rng: random.Random):
        return self.items[rng.randrange(len(self.items))]


class _MoveState:
    """Mutable facet complex supporting bistellar moves in dimension <= 3.

    Facets are stored as ordered tuples normalized to orientation sign +1;
    a coherent orientation is maintained locally through every move.
    """

    def __init__(self, t: OrientedTriangulation):
        self.n = t.dimension
        self.facets: dict[tuple, tuple] = {}
        self.ridges: dict[tuple, list] = {}
        self.star: dict[int, set] = {}
        self.edge_count: dict[tuple, int] = {}
        self.reduce_candidates = _IndexedSet()
        self.ridge_list = _IndexedSet()
        self.facet_list = _IndexedSet()
        self.shrink_candidates = _IndexedSet()  # n=3: edges in exactly 3 facets
        self.next_vertex = t.vertex_count
        for facet, sign in zip(t.facets, t.orientation_signs):
            stored = facet if sign > 0 else (facet[1], facet[0]) + facet[2:]
            self._add_facet(stored)

    # -- structure maintenance -------------------------------------------

    def _add_facet(self, stored: tuple) -> None:
        key = tuple(sorted(stored))
        if key in self.facets:
            raise AssertionError("duplicate facet %r" % (key,))
        self.facets[key] = stored
        self.facet_list.add(key)
        for i in range(len(key)):
            ridge = key[:i] + key[i + 1 :]
            lst = self.ridges.setdefault(ridge, [])
            lst.append(key)
            if len(lst) > 2:
                raise AssertionError("ridge %r in %d facets" % (ridge, len(lst)))
            self.ridge_list.add(ridge)
        for v in key:
            self.star.setdefault(v, set()).add(key)
        if self.n == 3:
            for a in range(4):
                for b in range(a + 1, 4):
                    e = (key[a], key[b])
                    self.edge_count[e] = self.edge_count.get(e, 0) + 1
        self._refresh_candidates(key)

    def _remove_facet(self, key: tuple) -> None:
        del self.facets[key]
        self.facet_list.discard(key)
        for i in range(len(key)):
            ridge = key[:i] + key[i + 1 :]
            lst = self.ridges[ridge]
            lst.remove(key)
            if not lst:
                del self.ridges[ridge]
                self.ridge_list.discard(ridge)
        for v in key:
            stars = self.star[v]
            stars.discard(key)
            if not stars:
                del self.star[v]
                self.reduce_candidates.discard(v)
        if self.n == 3:
            for a in range(4):
                for b in range(a + 1, 4):
                    e = (key[a], key[b])
                    c = self.edge_count[e] - 1
                    if c:
                        self.edge_count[e] = c
                    else:
                        del self.edge_count[e]
                        self.shrink_candidates.discard(e)
        self._refresh_candidates(key)

    def _refresh_candidates(self, key: tuple) -> None:
        for v in key:
            if v in self.star and len(self.star[v]) == self.n + 1:
                self.reduce_candidates.add(v)
            else:
                self.reduce_candidates.discard(v)
        if self.n == 3:
            for a in range(4):
                for b in range(a + 1, 4):
                    e = (key[a], key[b])
                    if self.edge_count.get(e) == 3:
                        self.shrink_candidates.add(e)
                    else:
                        self.shrink_candidates.discard(e)

    @property
    def facet_count(self) -> int:
        return len(self.facets)

    def snapshot(self) -> list[tuple]:
        return sorted(self.facets.values())

    # -- move construction -----------------------------------------------

    def reduce_move(self, v: int):
        """(n+1) -> 1 move removing vertex v, or None if illegal."""
        star = self.star.get(v)
        if star is None or len(star) != self.n + 1:
            return None
        link: set[int] = set()
        for key in star:
            link.update(key)
        link.discard(v)
        if len(link) != self.n + 1:
            return None
        g = tuple(sorted(link))
        if g in self.facets:
            return None
        missing = set()
        for key in star:
            rest = [w for w in g if w not in key]
            if len(rest) != 1:
                return None
            missing.add(rest[0])
        if len(missing) != self.n + 1:
            return None
        return ((v,), g, sorted(star))

    def flip_move(self, ridge: tuple):
        """n=2: 2-2 edge flip; n=3: 2-3 move across a ridge.  None if illegal."""
        pair = self.ridges.get(ridge)
        if pair is None or len(pair) != 2:
            return None
        apexes = []
        for key in pair:
            rest = [w for w in key if w not in ridge]
            if len(rest) != 1:
                return None
            apexes.append(rest[0])
        if apexes[0] == apexes[1]:
            return None
        g = tuple(sorted(apexes))
        if self.n == 2:
            if g in self.ridges:
                return None
        else:
            if g in self.edge_count:
                return None
        return (ridge, g, sorted(pair))

    def shrink_move(self, edge: tuple):
        """n=3 only: 3-2 move around an edge in exactly three tetrahedra."""
        if self.edge_count.get(edge) != 3:
            return None
        a, b = edge
        star = sorted(k for k in self.star[a] if b in k)
        if len(star) != 3:
            return None
        link: set[int] = set()
        for key in star:
            link.update(w for w in key if w not in edge)
        if len(link) != 3:
            return None
        g = tuple(sorted(link))
        if g in self.ridges:
            return None
        for key in star:
            rest = [w for w in g if w not in key]
            if len(rest) != 1:
                return None
        return (edge, g, star)

    def grow_move(self, key: tuple):
        """1 -> (n+2) move subdividing a facet with a fresh vertex."""
        return (key, (self.next_vertex,), [key])

    # -- oriented application ---------------------------------------------

    def apply(self, move) -> None:
        f, g, old_keys = move
        lf = len(f)
        stored = [self.facets[k] for k in old_keys]
        # match each old facet to the g_j it omits
        by_missing = {}
        for tup in stored:
            vs = set(tup)
            omitted = [x for x in g if x not in vs]
            if len(omitted) != 1:
                raise AssertionError("move region mismatch")
            by_missing[omitted[0]] = tup
        base_sign = (-1) ** (lf + 1)
        s = None
        for j, gj in enumerate(g):
            tup = by_missing[gj]
            ordered = f + tuple(x for x in g if x != gj)
            rho = permutation_sign(tup) * permutation_sign(ordered)
            s_j = rho * base_sign * (-1) ** j
            if s is None:
                s = s_j
            elif s != s_j:
                raise AssertionError("incoherent orientation around move region")
        for k in old_keys:
            self._remove_facet(k)
        for kpos in range(lf):
            ordered = f[:kpos] + f[kpos + 1 :] + g
            if s * (-1) ** kpos < 0:
                ordered = (ordered[1], ordered[0]) + ordered[2:]
            self._add_facet(ordered)
        if len(g) == 1 and g[0] == self.next_vertex:
            self.next_vertex += 1


_MOVE_DELTAS = {"reduce": None, "shrink": -1, "flip": None, "grow": None}


def pachner_simplify(
    t: OrientedTriangulation,
    seed: int = 0,
    move_budget: int = 100_000,
    restarts: int = 3,
) -> SimplifyResult:
    """Search for a smaller homeomorphic triangulation by bistellar moves.

    Seeded simulated annealing: geometric temperature decay per restart
    segment with Glauber acceptance (equal-size moves pass with probability
    1/2 at any temperature), restarting from the best state seen.  Dimensions
    above three are returned unchanged and flagged.
    """
    if t.dimension > 3:
        return SimplifyResult(
            triangulation=t,
            flags=("unsupported_dimension",),
            proposals_used=0,
            moves_accepted=0,
            initial_facets=t.facet_count,
        )
    rng = random.Random(seed)
    state = _MoveState(t)
    n = t.dimension
    initial = state.facet_count
    best_facets = state.snapshot()
    best_count = state.facet_count
    accepted = 0
    proposals = 0
    trace: list[tuple[int, int]] = []
    segments = max(1, restarts + 1)
    seg_len = max(1, move_budget // segments)
    t_start, t_floor = 2.0, 0.08

    def propose():
        roll = rng.random()
        if roll < 0.55 and len(state.reduce_candidates):
            v = state.reduce_candidates.choice(rng)
            return "reduce", state.reduce_move(v)
        if n == 3 and roll < 0.75 and len(state.shrink_candidates):
            e = state.shrink_candidates.choice(rng)
            return "shrink", state.shrink_move(e)
        if n >= 2 and roll < 0.92 and len(state.ridge_list):
            r = state.ridge_list.choice(rng)
            return "flip", state.flip_move(r)
        key = state.facet_list.choice(rng)
        return "grow", state.grow_move(key)

    for _ in range(segments):
        if proposals >= move_budget:
            break
        if best_count < state.facet_count:
            state = _MoveState(
                validate_triangulation(best_facets)
            )
        decay = (t_floor / t_start) ** (1.0 / max(1, int(seg_len * 0.6)))
        temp = t_start
        for _ in range(seg_len):
            if proposals >= move_budget:
                break
            proposals += 1
            temp = max(t_floor, temp * decay)
            kind, move = propose()
            if move is None:
                continue
            f, g, old_keys = move
            delta = len(f) - len(g)  # change in facet count
            p = 1.0 / (1.0 + math.exp(min(50.0, delta / temp)))
            if rng.random() < p:
                state.apply(move)
                accepted += 1
                if state.facet_count < best_count:
                    best_count = state.facet_count
                    best_facets = state.snapshot()
                    trace.append((proposals, best_count))

    result = validate_triangulation(best_facets)
    flags = []
    if result.facet_count > initial:
        raise SoundnessError("simplification increased the facet count")
    return SimplifyResult(
        triangulation=result,
        flags=tuple(flags),
        proposals_used=proposals,
        moves_accepted=accepted,
        initial_facets=initial,
        trace=tuple(trace),
    )


@dataclass(frozen=True)
class VolumeBound:
    """Certified interval for integral volume with witnesses attached."""

    lower: int
    upper: int
    upper_witness: OrientedTriangulation
    lower_witness: str
    flags: tuple[str, ...] = ()

    def __post_init__(self):
        if self.lower > self.upper:
            raise SoundnessError(
                "volume lower bound %d exceeds upper bound %d" % (self.lower, self.upper)
            )
        if self.upper_witness.facet_count != self.upper:
            raise SoundnessError("upper witness facet count mismatch")


def volume_bounds(
    t: OrientedTriangulation,
    presentation: Presentation | None = None,
    seed: int = 0,
    move_budget: int = 100_000,
    restarts: int = 3,
) -> VolumeBound:
    """Volume interval: simplified facet count above, Betti/rank below.

    Betti numbers are computed on the simplified witness (moves preserve
    homology); the rank lower bound comes from the abelianization of the
    supplied fundamental-group presentation.
    """
    simplified = pachner_simplify(t, seed=seed, move_budget=move_budget, restarts=restarts)
    witness = simplified.triangulation
    lower, lower_witness = 1, "betti_0"
    for k in range(witness.dimension + 1):
        b = homology(witness, k).betti
        if b > lower:
            lower, lower_witness = b, "betti_%d" % k
    if presentation is not None:
        from .groups import abelianization_min_generators

        ab_rank, _ = abelianization_min_generators(presentation)
        if ab_rank > lower:
            lower, lower_witness = ab_rank, "rank_lower"
    return VolumeBound(
        lower=lower,
        upper=witness.facet_count,
        upper_witness=witness,
        lower_witness=lower_witness,
        flags=simplified.flags,
    )


@dataclass(frozen=True)
class LevelReport:
    """One chain level: subgroup index, volume and rank intervals, ratios."""

    index: int
    volume_lower: int
    volume_upper: int
    rank_lower: int
    rank_upper: int
    flags: tuple[str, ...]

    @property
    def volume_ratio(self) -> Fraction:
        return Fraction(self.volume_upper, self.index)

    @property
    def rank_gradient_raw(self) -> Fraction:
        return Fraction(self.rank_lower - 1, self.index)

    @property
    def rank_gradient_upper_raw(self) -> Fraction:
        return Fraction(self.rank_upper - 1, self.index)


@dataclass(frozen=True)
class LevelDetail:
    """Witness payload for one level, kept for report certificates."""

    table: CosetTable
    cover_facet_count: int
    witness: OrientedTriangulation
    subgroup_presentation: Presentation | None
    lower_witness: str


@dataclass(frozen=True)
class StableSequence:
    levels: tuple[LevelReport, ...]
    running_min_volume: tuple[Fraction, ...] = field(default_factory=tuple)
    details: tuple[LevelDetail, ...] = field(default_factory=tuple, repr=False)

    def check_soundness(self) -> None:
        for lv in self.levels:
            if lv.volume_lower > lv.volume_upper:
                raise SoundnessError("volume interval inverted at index %d" % lv.index)
            if lv.rank_lower > lv.rank_upper:
                raise SoundnessError("rank interval inverted at index %d" % lv.index)
            if lv.rank_lower > lv.volume_upper:
                raise SoundnessError(
                    "rank lower bound %d exceeds volume upper bound %d at index %d"
                    % (lv.rank_lower, lv.volume_upper, lv.index)
                )
            if lv.rank_gradient_raw > lv.volume_ratio:
                raise SoundnessError("gradient inequality violated at index %d" % lv.index)
        for prev, cur in zip(self.levels, self.levels[1:]):
            # certified intervals must not contradict the monotone exact values
            if Fraction(cur.volume_lower, cur.index) > Fraction(prev.volume_upper, prev.index):
                raise SoundnessError(
                    "volume interval at index %d contradicts monotonicity" % cur.index
                )


def stable_sequence(
    t: OrientedTriangulation,
    chain_tables: list[CosetTable],
    budgets: Budgets = Budgets(),
    labels: ComplexPresentation | None = None,
    seed: int = 0,
    cache_dir=None,
) -> StableSequence:
    """Per-level certified bounds along a descending chain of subgroups.

    Each level builds the cover, bounds its volume (annealed upper, Betti and
    abelianization lower) and the subgroup's rank; the soundness checks of
    :class:`StableSequence` are run before returning.
    """
    if labels is None:
        labels = presentation_from_complex(t)
    for prev, cur in zip(chain_tables, chain_tables[1:]):
        if not cur.refines(prev):
            raise ChainNotDescending(
                "table of degree %d is not below its predecessor" % cur.degree
            )
    levels = []
    details = []
    running: list[Fraction] = []
    for k, table in enumerate(chain_tables):
        flags: list[str] = []
        cover = build_cover(t, table, labels=labels, cache_dir=cache_dir)
        simplified = None
        try:
            system = reidemeister_schreier(labels.presentation, table)
            bounds, simplified = rank_bounds(
                system.presentation, budget=budgets.tietze_steps
            )
            flags.extend(bounds.flags)
        except CosetEnumerationOverflow:
            bounds = None
            flags.append("rank_unresolved")
        vb = volume_bounds(
            cover.total,
            presentation=simplified.presentation if simplified else None,
            seed=_level_seed(seed, k),
            move_budget=budgets.anneal_moves,
            restarts=budgets.anneal_restarts,
        )
        flags.extend(vb.flags)
        if bounds is None:
            rank_lower, rank_upper = 0, vb.upper
        else:
            rank_lower, rank_upper = bounds.lower, bounds.upper
        level = LevelReport(
            index=table.degree,
            volume_lower=vb.lower,
            volume_upper=vb.upper,
            rank_lower=rank_lower,
            rank_upper=rank_upper,
            flags=tuple(flags),
        )
        levels.append(level)
        details.append(
            LevelDetail(
                table=table,
                cover_facet_count=cover.total.facet_count,
                witness=vb.upper_witness,
                subgroup_presentation=simplified.presentation if simplified else None,
                lower_witness=vb.lower_witness,
            )
        )
        ratio = level.volume_ratio
        running.append(min(running[-1], ratio) if running else ratio)
    seq = StableSequence(
        levels=tuple(levels),
        running_min_volume=tuple(running),
        details=tuple(details),
    )
    seq.check_soundness()
    return seq


def _level_seed(seed: int, k: int) -> int:
    return (seed * 1_000_003 + k * 7919 + 1) % (2**31)
