"""Finitely presented groups: presentations, coset enumeration, subgroups.

Words are tuples of nonzero signed 1-based generator indices.  Coset tables
act on the right cosets of a subgroup, coset 0 being the subgroup itself.
Enumeration is HLT-style relator scanning with coincidence processing and
deterministic first-appearance coset numbering.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from ._matrix import rank_mod_p, smith_normal_form
from .simplicial import HomologyGroup

Word = tuple[int, ...]

__all__ = [
    "Word",
    "free_reduce",
    "invert_word",
    "cyclic_reduce",
    "Presentation",
    "RankBounds",
    "CosetTable",
    "CosetEnumerationOverflow",
    "todd_coxeter",
    "low_index_subgroups",
    "SchreierSystem",
    "reidemeister_schreier",
    "compose_tables",
    "SimplifiedPresentation",
    "tietze_simplify",
    "abelianization_min_generators",
    "rank_bounds",
    "parse_presentation",
    "format_presentation",
]


def free_reduce(word) -> Word:
    out: list[int] = []
    for letter in word:
        if letter == 0:
            raise ValueError("zero letter in word")
        if out and out[-1] == -letter:
            out.pop()
        else:
            out.append(letter)
    return tuple(out)


def invert_word(word) -> Word:
    return tuple(-letter for letter in reversed(word))


def cyclic_reduce(word) -> Word:
    w = list(free_reduce(word))
    while len(w) >= 2 and w[0] == -w[-1]:
        w = w[1:-1]
    return tuple(w)


@dataclass(frozen=True)
class Presentation:
    """Finitely presented group; relators stored freely reduced.

    ``generator_edges``, when present, labels generator i with the oriented
    edge of the complex the presentation was read off from.
    """

    generator_count: int
    relators: tuple[Word, ...]
    generator_edges: tuple[tuple[int, int], ...] | None = None

    def __post_init__(self):
        for r in self.relators:
            if r != free_reduce(r):
                raise ValueError("relator not freely reduced: %r" % (r,))
            for letter in r:
                if not 1 <= abs(letter) <= self.generator_count:
                    raise ValueError("letter %d out of range" % letter)
        if self.generator_edges is not None and len(self.generator_edges) != self.generator_count:
            raise ValueError("one edge label per generator required")

    def exponent_matrix(self) -> list[list[int]]:
        """Rows: relators; columns: generators; entries: exponent sums."""
        mat = []
        for r in self.relators:
            row = [0] * self.generator_count
            for letter in r:
                row[abs(letter) - 1] += 1 if letter > 0 else -1
            mat.append(row)
        return mat


def abelianization_min_generators(p: Presentation) -> tuple[int, HomologyGroup]:
    """Minimal generator count of the abelianized group, from Smith reduction."""
    mat = p.exponent_matrix()
    if not mat:
        group = HomologyGroup(betti=p.generator_count, torsion=())
        return group.minimal_generators(), group
    diag = smith_normal_form(mat).nonzero_diagonal
    betti = p.generator_count - len(diag)
    torsion = tuple(sorted(d for d in diag if d > 1))
    group = HomologyGroup(betti=betti, torsion=torsion)
    return group.minimal_generators(), group


def first_homology_mod_p_rank(p: Presentation, prime: int) -> int:
    """Rank of (abelianization tensor Z/p) over GF(p)."""
    mat = p.exponent_matrix()
    if not mat:
        return p.generator_count
    return p.generator_count - rank_mod_p(mat, prime)


@dataclass(frozen=True)
class RankBounds:
    """Certified interval for the minimal number of generators."""

    lower: int
    upper: int
    flags: tuple[str, ...] = ()

    def __post_init__(self):
        if not 0 <= self.lower <= self.upper:
            raise ValueError("rank bounds must satisfy 0 <= lower <= upper")


class CosetEnumerationOverflow(RuntimeError):
    """Enumeration exceeded max_cosets; the index is unresolved, not infinite."""

    def __init__(self, max_cosets: int):
        super().__init__("coset enumeration exceeded %d cosets" % max_cosets)
        self.max_cosets = max_cosets


@dataclass(frozen=True)
class CosetTable:
    """Right action of the generators on cosets 0..degree-1 (0 = subgroup)."""

    perms: tuple[tuple[int, ...], ...]
    inverse_perms: tuple[tuple[int, ...], ...] = field(repr=False, default=())

    @staticmethod
    def from_perms(perms) -> "CosetTable":
        perms = tuple(tuple(p) for p in perms)
        degree = len(perms[0]) if perms else 1
        inv = []
        for p in perms:
            if sorted(p) != list(range(degree)):
                raise ValueError("generator action is not a bijection")
            q = [0] * degree
            for i, img in enumerate(p):
                q[img] = i
            inv.append(tuple(q))
        return CosetTable(perms=perms, inverse_perms=tuple(inv))

    @property
    def degree(self) -> int:
        return len(self.perms[0]) if self.perms else 1

    @property
    def generator_count(self) -> int:
        return len(self.perms)

    def act(self, coset: int, letter: int) -> int:
        if letter > 0:
            return self.perms[letter - 1][coset]
        return self.inverse_perms[-letter - 1][coset]

    def act_word(self, coset: int, word) -> int:
        for letter in word:
            coset = self.act(coset, letter)
        return coset

    def is_transitive(self) -> bool:
        seen = {0}
        queue = deque([0])
        while queue:
            c = queue.popleft()
            for g in range(1, self.generator_count + 1):
                for letter in (g, -g):
                    d = self.act(c, letter)
                    if d not in seen:
                        seen.add(d)
                        queue.append(d)
        return len(seen) == self.degree

    def verify(self, p: Presentation, subgroup_words=()) -> None:
        """Raise if any coset-table invariant fails for the presentation."""
        if self.generator_count != p.generator_count:
            raise AssertionError("generator count mismatch")
        if not self.is_transitive():
            raise AssertionError("action is not transitive")
        for r in p.relators:
            for c in range(self.degree):
                if self.act_word(c, r) != c:
                    raise AssertionError("relator %r moves coset %d" % (r, c))
        for w in subgroup_words:
            if self.act_word(0, w) != 0:
                raise AssertionError("subgroup word %r moves coset 0" % (w,))

    def standardize(self, start: int = 0) -> "CosetTable":
        """Renumber cosets by BFS first appearance from ``start``."""
        order = {start: 0}
        queue = deque([start])
        while queue:
            c = queue.popleft()
            for g in range(1, self.generator_count + 1):
                for letter in (g, -g):
                    d = self.act(c, letter)
                    if d not in order:
                        order[d] = len(order)
                        queue.append(d)
        if len(order) != self.degree:
            raise AssertionError("table not transitive")
        perms = []
        for g in range(self.generator_count):
            p = [0] * self.degree
            for old, new in order.items():
                p[new] = order[self.perms[g][old]]
            perms.append(tuple(p))
        return CosetTable.from_perms(perms)

    def flatten(self) -> tuple[int, ...]:
        return tuple(v for p in self.perms for v in p)

    def canonical_conjugacy_key(self) -> tuple:
        """Lexicographically minimal flattening over all basepoint renumberings."""
        best = None
        for start in range(self.degree):
            key = self.standardize(start).flatten()
            if best is None or key < best:
                best = key
        return (self.degree, best)

    def refines(self, other: "CosetTable") -> bool:
        """True iff the subgroup of this table is contained in ``other``'s.

        Tries to build the equivariant map cosets(self) -> cosets(other)
        sending 0 to 0; containment holds exactly when the map is consistent.
        """
        if self.generator_count != other.generator_count:
            return False
        mapping = {0: 0}
        queue = deque([0])
        while queue:
            c = queue.popleft()
            for g in range(1, self.generator_count + 1):
                for letter in (g, -g):
                    d = self.act(c, letter)
                    image = other.act(mapping[c], letter)
                    if d in mapping:
                        if mapping[d] != image:
                            return False
                    else:
                        mapping[d] = image
                        queue.append(d)
        return True

    def induced(self, rewrites, generator_count: int) -> "CosetTable":
        """Table over ``generator_count`` generators whose images are given words.

        ``rewrites[i]`` is generator i+1 expressed as a word in this table's
        generators; the induced action is the word action.
        """
        if len(rewrites) != generator_count:
            raise ValueError("need one rewrite per generator")
        perms = []
        for w in rewrites:
            perms.append(tuple(self.act_word(c, w) for c in range(self.degree)))
        return CosetTable.from_perms(perms)

    def content_hash(self) -> str:
        import hashlib

        payload = "%d;%s" % (self.generator_count, ",".join(map(str, self.flatten())))
        return hashlib.sha256(payload.encode()).hexdigest()[:16]


def _col(letter: int) -> int:
    return 2 * (letter - 1) if letter > 0 else 2 * (-letter - 1) + 1


class _Enumeration:
    """Mutable HLT coset-table state (Todd-Coxeter workhorse)."""

    def __init__(self, ngens: int, max_cosets: int):
        self.ngens = ngens
        self.width = 2 * ngens
        self.max_cosets = max_cosets
        self.table: list[list[int | None]] = [[None] * self.width]
        self.parent = [0]
        self.live = 1

    def rep(self, k: int) -> int:
        parent = self.parent
        root = k
        while parent[root] != root:
            root = parent[root]
        while parent[k] != root:
            parent[k], k = root, parent[k]
        return root

    def define(self, alpha: int, col: int) -> int:
        if len(self.table) >= self.max_cosets:
            raise CosetEnumerationOverflow(self.max_cosets)
        beta = len(self.table)
        self.table.append([None] * self.width)
        self.parent.append(beta)
        self.table[alpha][col] = beta
        self.table[beta][col ^ 1] = alpha
        self.live += 1
        return beta

    def _merge(self, a: int, b: int, queue: deque) -> None:
        a, b = self.rep(a), self.rep(b)
        if a == b:
            return
        lo, hi = (a, b) if a < b else (b, a)
        self.parent[hi] = lo
        self.live -= 1
        queue.append(hi)

    def coincidence(self, a: int, b: int) -> None:
        queue: deque[int] = deque()
        self._merge(a, b, queue)
        table = self.table
        while queue:
            gamma = queue.popleft()
            row = table[gamma]
            for col in range(self.width):
                delta = row[col]
                if delta is None:
                    continue
                table[delta][col ^ 1] = None
                mu, nu = self.rep(gamma), self.rep(delta)
                if table[mu][col] is not None:
                    self._merge(nu, table[mu][col], queue)
                elif table[nu][col ^ 1] is not None:
                    self._merge(mu, table[nu][col ^ 1], queue)
                else:
                    table[mu][col] = nu
                    table[nu][col ^ 1] = mu

    def scan_and_fill(self, alpha: int, cols: list[int]) -> None:
        table = self.table
        i, j = 0, len(cols) - 1
        f = b = alpha
        while True:
            while i <= j and table[f][cols[i]] is not None:
                f = table[f][cols[i]]
                i += 1
            if i > j:
                if f != b:
                    self.coincidence(f, b)
                return
            while j >= i and table[b][cols[j] ^ 1] is not None:
                b = table[b][cols[j] ^ 1]
                j -= 1
            if j < i:
                self.coincidence(f, b)
                return
            if i == j:
                table[f][cols[i]] = b
                table[b][cols[i] ^ 1] = f
                return
            self.define(f, cols[i])


def todd_coxeter(p: Presentation, subgroup_words=(), max_cosets: int = 100_000) -> CosetTable:
    """Enumerate cosets of the subgroup generated by ``subgroup_words``.

    Returns the standardized complete coset table, or raises
    :class:`CosetEnumerationOverflow` once ``max_cosets`` cosets exist
    simultaneously (an unresolved outcome, not a certificate of infinite
    index).
    """
    subgroup_words = [free_reduce(w) for w in subgroup_words]
    for w in subgroup_words:
        for letter in w:
            if not 1 <= abs(letter) <= p.generator_count:
                raise ValueError("subgroup word letter out of range")
    enum = _Enumeration(p.generator_count, max_cosets)
    relator_cols = [[_col(letter) for letter in r] for r in p.relators if r]
    for w in subgroup_words:
        if w:
            enum.scan_and_fill(enum.rep(0), [_col(letter) for letter in w])
    alpha = 0
    while alpha < len(enum.table):
        if enum.rep(alpha) == alpha:
            for cols in relator_cols:
                enum.scan_and_fill(alpha, cols)
                if enum.rep(alpha) != alpha:
                    break
            if enum.rep(alpha) == alpha:
                for col in range(enum.width):
                    if enum.table[alpha][col] is None:
                        enum.define(alpha, col)
        alpha += 1

    live = [i for i in range(len(enum.table)) if enum.rep(i) == i]
    renumber = {old: new for new, old in enumerate(live)}
    degree = len(live)
    perms = []
    for g in range(p.generator_count):
        col = 2 * g
        perm = []
        for old in live:
            img = enum.table[old][col]
            if img is None:
                raise AssertionError("incomplete table after enumeration")
            perm.append(renumber[enum.rep(img)])
        perms.append(tuple(perm))
    table = CosetTable.from_perms(perms).standardize()
    table.verify(p, subgroup_words)
    return table


def low_index_subgroups(p: Presentation, max_index: int) -> list[CosetTable]:
    """All subgroups of index <= max_index, one table per conjugacy class.

    Backtracking over partial coset tables with relator-deduction propagation;
    results are deduplicated by the canonical conjugacy key and returned in
    deterministic (degree, key) order.
    """
    if max_index < 1:
        raise ValueError("max_index must be >= 1")
    ngens = p.generator_count
    width = 2 * ngens
    relator_cols = [[_col(letter) for letter in r] for r in p.relators if r]

    rows: list[list[int | None]] = [[None] * width]
    found: dict[tuple, CosetTable] = {}

    def scan(alpha: int, cols) -> tuple[bool, tuple | None]:
        """Scan a relator; report (consistent, forced deduction or None)."""
        i, j = 0, len(cols) - 1
        f = b = alpha
        while i <= j and rows[f][cols[i]] is not None:
            f = rows[f][cols[i]]
            i += 1
        if i > j:
            return f == b, None
        while j >= i and rows[b][cols[j] ^ 1] is not None:
            b = rows[b][cols[j] ^ 1]
            j -= 1
        if j < i:
            return f == b, None
        if i == j:
            return True, (f, cols[i], b)
        return True, None

    def propagate() -> tuple[bool, list[tuple[int, int]]]:
        """Apply forced deductions to closure; undo info on failure is returned."""
        touched: list[tuple[int, int]] = []
        changed = True
        while changed:
            changed = False
            for alpha in range(len(rows)):
                for cols in relator_cols:
                    ok, deduction = scan(alpha, cols)
                    if not ok:
                        return False, touched
                    if deduction is not None:
                        f, col, b = deduction
                        if rows[f][col] is None and rows[b][col ^ 1] is None:
                            rows[f][col] = b
                            rows[b][col ^ 1] = f
                            touched.append((f, col))
                            touched.append((b, col ^ 1))
                            changed = True
                        elif rows[f][col] != b or rows[b][col ^ 1] != f:
                            return False, touched
        return True, touched

    def undo(touched) -> None:
        for alpha, col in touched:
            rows[alpha][col] = None

    def first_gap() -> tuple[int, int] | None:
        for alpha in range(len(rows)):
            for col in range(width):
                if rows[alpha][col] is None:
                    return alpha, col
        return None

    def search() -> None:
        gap = first_gap()
        if gap is None:
            perms = []
            for g in range(ngens):
                perms.append(tuple(rows[c][2 * g] for c in range(len(rows))))
            table = CosetTable.from_perms(perms).standardize()
            key = table.canonical_conjugacy_key()
            if key not in found:
                found[key] = table
            return
        alpha, col = gap
        candidates = [c for c in range(len(rows)) if rows[c][col ^ 1] is None]
        may_extend = len(rows) < max_index
        for beta in candidates:
            rows[alpha][col] = beta
            rows[beta][col ^ 1] = alpha
            ok, touched = propagate()
            if ok:
                search()
            undo(touched)
            rows[alpha][col] = None
            rows[beta][col ^ 1] = None
        if may_extend:
            rows.append([None] * width)
            beta = len(rows) - 1
            rows[alpha][col] = beta
            rows[beta][col ^ 1] = alpha
            ok, touched = propagate()
            if ok:
                search()
            undo(touched)
            rows.pop()
            rows[alpha][col] = None

    search()
    tables = [found[k] for k in sorted(found)]
    for t in tables:
        t.verify(p)
    return tables


@dataclass(frozen=True)
class SchreierSystem:
    """Subgroup presentation on Schreier generators plus rewriting data.

    ``step_letter[coset][gen-1]`` is the signed Schreier letter picked up when
    moving from ``coset`` by that generator (0 across spanning-tree edges).
    ``generator_words`` express the Schreier generators as parent-group words.
    """

    presentation: Presentation
    table: CosetTable
    step_letter: tuple[tuple[int, ...], ...]
    generator_words: tuple[Word, ...]
    coset_words: tuple[Word, ...]

    def rewrite(self, word, start: int = 0) -> Word:
        """Rewrite a parent word (in the subgroup if start==end) in Schreier letters."""
        out: list[int] = []
        coset = start
        for letter in word:
            if letter > 0:
                s = self.step_letter[coset][letter - 1]
                coset = self.table.act(coset, letter)
            else:
                coset = self.table.act(coset, letter)
                s = -self.step_letter[coset][-letter - 1]
            if s:
                if out and out[-1] == -s:
                    out.pop()
                else:
                    out.append(s)
        return tuple(out)


def reidemeister_schreier(p: Presentation, table: CosetTable) -> SchreierSystem:
    """Presentation of the subgroup of a complete coset table.

    Spanning-tree coset representatives come from BFS first appearance; the
    Schreier generators of tree edges are trivial and dropped, the rest are
    numbered in (coset, generator) order.  Relators are the rewritten
    conjugates rep(c) r rep(c)^-1 of every relator at every coset.
    """
    table.verify(p)
    degree = table.degree
    ngens = p.generator_count
    tree_edge: set[tuple[int, int]] = set()
    coset_words: list[Word | None] = [None] * degree
    coset_words[0] = ()
    queue = deque([0])
    while queue:
        c = queue.popleft()
        for g in range(1, ngens + 1):
            for letter in (g, -g):
                d = table.act(c, letter)
                if coset_words[d] is None:
                    coset_words[d] = free_reduce(coset_words[c] + (letter,))
                    if letter > 0:
                        tree_edge.add((c, letter))
                    else:
                        tree_edge.add((d, -letter))
                    queue.append(d)
    step: list[list[int]] = [[0] * ngens for _ in range(degree)]
    generator_words: list[Word] = []
    for c in range(degree):
        for g in range(1, ngens + 1):
            if (c, g) in tree_edge:
                continue
            d = table.act(c, g)
            word = free_reduce(coset_words[c] + (g,) + invert_word(coset_words[d]))
            generator_words.append(word)
            step[c][g - 1] = len(generator_words)
    system_table = table
    sub_relators: list[Word] = []
    seen = set()
    dummy = SchreierSystem(
        presentation=Presentation(len(generator_words), ()),
        table=system_table,
        step_letter=tuple(tuple(r) for r in step),
        generator_words=tuple(generator_words),
        coset_words=tuple(w for w in coset_words),
    )
    for c in range(degree):
        for r in p.relators:
            w = dummy.rewrite(r, start=c)
            w = cyclic_reduce(w)
            if w and w not in seen:
                seen.add(w)
                sub_relators.append(w)
    presentation = Presentation(len(generator_words), tuple(sub_relators))
    return SchreierSystem(
        presentation=presentation,
        table=system_table,
        step_letter=dummy.step_letter,
        generator_words=dummy.generator_words,
        coset_words=dummy.coset_words,
    )


def compose_tables(system: SchreierSystem, child: CosetTable) -> CosetTable:
    """Coset table over the parent group of a subgroup given inside a subgroup.

    ``system`` describes H <= G with its Schreier generators; ``child`` is a
    coset table of K <= H over those Schreier generators.  The composed table
    describes K <= G and has degree [G:H] * [H:K].
    """
    parent = system.table
    ngens = parent.generator_count
    states: dict[tuple[int, int], int] = {(0, 0): 0}
    order: list[tuple[int, int]] = [(0, 0)]
    queue = deque([(0, 0)])
    transitions: dict[tuple[int, int], list[int]] = {}

    def step(state: tuple[int, int], letter: int) -> tuple[int, int]:
        alpha, beta = state
        if letter > 0:
            s = system.step_letter[alpha][letter - 1]
            alpha2 = parent.act(alpha, letter)
            beta2 = child.act(beta, s) if s else beta
        else:
            alpha2 = parent.act(alpha, letter)
            s = system.step_letter[alpha2][-letter - 1]
            beta2 = child.act(beta, -s) if s else beta
        return alpha2, beta2

    while queue:
        state = queue.popleft()
        images = []
        for g in range(1, ngens + 1):
            nxt = step(state, g)
            if nxt not in states:
                states[nxt] = len(order)
                order.append(nxt)
                queue.append(nxt)
            images.append(states[nxt])
        transitions[state] = images
    degree = len(order)
    perms = []
    for g in range(ngens):
        perms.append(tuple(transitions[state][g] for state in order))
    return CosetTable.from_perms(perms)


@dataclass(frozen=True)
class SimplifiedPresentation:
    """Tietze-simplified presentation plus the generator rewrites.

    ``rewrites[i]`` expresses original generator i+1 as a word over the
    simplified generators, so coset tables and homomorphisms written against
    the simplified presentation can be pulled back to the original one.
    """

    presentation: Presentation
    rewrites: tuple[Word, ...]
    kept_generators: tuple[int, ...]
    flags: tuple[str, ...]
    steps_used: int


def _canonical_cyclic(word: Word) -> Word:
    if not word:
        return word
    best = None
    for w in (word, invert_word(word)):
        for i in range(len(w)):
            rot = w[i:] + w[:i]
            if best is None or rot < best:
                best = rot
    return best


def tietze_simplify(p: Presentation, budget: int = 500_000) -> SimplifiedPresentation:
    """Shrink a presentation without changing the group.

    Repeatedly eliminates a generator that occurs exactly once in some relator
    (shortest defining relator first, lowest index on ties) and shortens
    relators against shorter ones, until a fixpoint or the step budget is hit.
    On exhaustion the best-so-far presentation is returned flagged.
    """
    relators: dict[int, list[int]] = {}
    for i, r in enumerate(p.relators):
        w = list(cyclic_reduce(r))
        if w:
            relators[i] = w
    next_rid = len(p.relators)
    live = set(range(1, p.generator_count + 1))
    defs: dict[int, Word] = {}
    elim_order: list[int] = []
    steps = 0
    flags: list[str] = []

    def occurrences(rel: list[int]) -> dict[int, int]:
        occ: dict[int, int] = {}
        for letter in rel:
            occ[abs(letter)] = occ.get(abs(letter), 0) + 1
        return occ

    def substitute(rel: list[int], gen: int, word: Word) -> list[int]:
        out: list[int] = []
        for letter in rel:
            if letter == gen:
                out.extend(word)
            elif letter == -gen:
                out.extend(invert_word(word))
            else:
                out.append(letter)
        return list(cyclic_reduce(out))

    def dedup() -> None:
        seen: dict[Word, int] = {}
        for rid in sorted(relators):
            key = _canonical_cyclic(tuple(relators[rid]))
            if not key:
                del relators[rid]
            elif key in seen:
                del relators[rid]
            else:
                seen[key] = rid

    def try_shorten() -> bool:
        """One pass of shortening long relators by shorter ones."""
        nonlocal steps
        changed = False
        short = sorted(
            (rid for rid in relators if len(relators[rid]) <= 24),
            key=lambda rid: (len(relators[rid]), rid),
        )
        for sid in short:
            s = tuple(relators.get(sid, ()))
            if not s or len(s) < 2:
                continue
            half = len(s) // 2 + 1
            variants = []
            for w in (s, invert_word(s)):
                for i in range(len(w)):
                    variants.append(w[i:] + w[:i])
            for rid in sorted(relators):
                if rid == sid:
                    continue
                r = relators[rid]
                if len(r) < half:
                    continue
                doubled = tuple(r) + tuple(r)
                for var in variants:
                    piece = var[:half]
                    for start in range(len(r)):
                        steps += 1
                        if doubled[start : start + half] == piece:
                            # replace matched piece by the inverse of the rest
                            rest = invert_word(var[half:])
                            new = rest + doubled[start + half : start + len(r)]
                            new = list(cyclic_reduce(new))
                            if len(new) < len(r):
                                relators[rid] = new
                                changed = True
                                r = new
                                doubled = tuple(r) + tuple(r)
                                break
                    else:
                        continue
                    break
        return changed

    exhausted = False
    while True:
        dedup()
        if steps > budget:
            exhausted = True
            break
        candidate = None
        for rid in sorted(relators, key=lambda rid: (len(relators[rid]), rid)):
            occ = occurrences(relators[rid])
            singles = sorted(g for g, k in occ.items() if k == 1)
            if singles:
                candidate = (rid, singles[0])
                break
        if candidate is None:
            if try_shorten():
                continue
            break
        rid, gen = candidate
        rel = relators.pop(rid)
        pos = next(i for i, letter in enumerate(rel) if abs(letter) == gen)
        rotated = rel[pos:] + rel[:pos]
        if rotated[0] == gen:
            word = invert_word(rotated[1:])
        else:
            word = tuple(rotated[1:])
        defs[gen] = word
        elim_order.append(gen)
        live.discard(gen)
        steps += len(rel)
        for other in sorted(relators):
            if any(abs(letter) == gen for letter in relators[other]):
                relators[other] = substitute(relators[other], gen, word)
                steps += len(relators[other]) + 1
                if not relators[other]:
                    del relators[other]

    if exhausted:
        flags.append("budget_exhausted")

    kept = tuple(sorted(live))
    renumber = {g: i + 1 for i, g in enumerate(kept)}

    def project(word) -> Word:
        return free_reduce(
            tuple(
                renumber[abs(letter)] * (1 if letter > 0 else -1) for letter in word
            )
        )

    final_relators = tuple(
        project(tuple(relators[rid])) for rid in sorted(relators)
    )
    presentation = Presentation(len(kept), tuple(r for r in final_relators if r))

    resolved: dict[int, Word] = {g: (renumber[g],) for g in kept}
    for gen in reversed(elim_order):
        out: list[int] = []
        for letter in defs[gen]:
            sub = resolved[abs(letter)]
            out.extend(sub if letter > 0 else invert_word(sub))
        resolved[gen] = free_reduce(tuple(out))
    rewrites = tuple(resolved[g] for g in range(1, p.generator_count + 1))
    return SimplifiedPresentation(
        presentation=presentation,
        rewrites=rewrites,
        kept_generators=kept,
        flags=tuple(flags),
        steps_used=steps,
    )


def rank_bounds(p: Presentation, budget: int = 500_000) -> tuple[RankBounds, SimplifiedPresentation]:
    """Certified generator-count interval: abelianization below, Tietze above."""
    simplified = tietze_simplify(p, budget=budget)
    lower, _ = abelianization_min_generators(simplified.presentation)
    upper = simplified.presentation.generator_count
    return RankBounds(lower=lower, upper=upper, flags=simplified.flags), simplified


_LETTERS = "abcdefghijklmnopqrstuvwxyz"


def parse_presentation(text: str) -> Presentation:
    """Parse the presentation text format.

    First non-comment line: ``gens k``.  Every following non-comment line is
    one relator, either as a letter word (``aBa`` with uppercase meaning the
    inverse, whitespace ignored) or as whitespace-separated signed indices
    (``1 -2 1``).  Letter words need k <= 26.
    """
    gens = None
    relators: list[Word] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if gens is None:
            parts = line.split()
            if len(parts) != 2 or parts[0] != "gens":
                raise ValueError("line %d: expected 'gens k'" % lineno)
            gens = int(parts[1])
            if gens < 0:
                raise ValueError("generator count must be >= 0")
            continue
        tokens = line.split()
        if all(tok.lstrip("-").isdigit() for tok in tokens):
            word = tuple(int(tok) for tok in tokens)
        else:
            letters = []
            for ch in line:
                if ch.isspace():
                    continue
                low = ch.lower()
                if low not in _LETTERS or _LETTERS.index(low) >= gens:
                    raise ValueError("line %d: bad letter %r" % (lineno, ch))
                idx = _LETTERS.index(low) + 1
                letters.append(idx if ch.islower() else -idx)
            word = tuple(letters)
        relators.append(free_reduce(word))
    if gens is None:
        raise ValueError("missing 'gens k' header")
    return Presentation(gens, tuple(relators))


def format_presentation(p: Presentation) -> str:
    lines = ["gens %d" % p.generator_count]
    for r in p.relators:
        if p.generator_count <= 26:
            lines.append(
                "".join(
                    _LETTERS[abs(x) - 1] if x > 0 else _LETTERS[abs(x) - 1].upper()
                    for x in r
                )
            )
        else:
            lines.append(" ".join(map(str, r)))
    return "\n".join(lines) + "\n"
