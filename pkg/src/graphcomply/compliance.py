"""Global compliance of an object graph with a class graph.

A compliance relation maps nodes to classes such that

* every related (node, class) pair is a relational member pair,
* for every class arc and every pair of related endpoints, some object arc
  between those two nodes is a full member of the class arc,
* every class is related to some node.

Partial compliance drops the class-coverage requirement; full compliance
adds that every node is related to some class.

The first two conditions are closed under taking subsets, so the search
works on a conflict graph over candidate pairs: a witness is a conflict-free
set of candidates that covers the required classes (and nodes).
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, NamedTuple

from graphcomply.membership import arc_full_member, make_context, node_relational_member
from graphcomply.model import ClassGraph, ObjectGraph

DEFAULT_BUDGET = 1_000_000
BUDGET_ENV = "GRAPHCOMPLY_BUDGET"
ORACLE_LIMIT = 20
NO_FULL_MEMBER = "no full-member arc"


class ComplianceMode(Enum):
    PARTIAL = "partial"
    NORMAL = "normal"
    FULL = "full"


class CandidatePair(NamedTuple):
    node: str
    class_id: str

    def __str__(self) -> str:
        return f"{self.node} -> {self.class_id}"


@dataclass(frozen=True)
class Conflict:
    class_arc: str
    src_pair: CandidatePair
    dst_pair: CandidatePair
    reason: str = NO_FULL_MEMBER

    def __str__(self) -> str:
        return (
            f"class arc {self.class_arc}: {self.reason} from {self.src_pair.node} "
            f"({self.src_pair.class_id}) to {self.dst_pair.node} ({self.dst_pair.class_id})"
        )


@dataclass(frozen=True)
class ComplianceReport:
    mode: ComplianceMode
    compliant: bool
    witness: tuple[CandidatePair, ...] = ()
    covered_classes: tuple[str, ...] = ()
    uncovered_classes: tuple[str, ...] = ()
    uncovered_nodes: tuple[str, ...] = ()
    conflicts: tuple[Conflict, ...] = ()
    # Verdict of the unrepaired definition (the empty relation always
    # passes in partial mode).
    raw_compliant: bool = False
    undecided: bool = False


@dataclass
class Verification:
    ok: bool
    not_relational: list[CandidatePair] = field(default_factory=list)
    conflicts: list[Conflict] = field(default_factory=list)
    uncovered_classes: list[str] = field(default_factory=list)
    uncovered_nodes: list[str] = field(default_factory=list)


class BudgetExceeded(RuntimeError):
    """Raised when a search or enumeration runs past its allowance."""


def default_budget() -> int:
    raw = os.environ.get(BUDGET_ENV)
    if raw is None:
        return DEFAULT_BUDGET
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"{BUDGET_ENV} must be an integer, got {raw!r}") from None
    if value <= 0:
        raise ValueError(f"{BUDGET_ENV} must be positive, got {value}")
    return value


def candidates(g: ObjectGraph, s: ClassGraph) -> list[CandidatePair]:
    """Every (node, class) pair that is a relational member pair, sorted."""
    ctx = make_context(g, s)
    return [
        CandidatePair(n.id, c.id)
        for n in g.nodes
        for c in s.classes
        if node_relational_member(n, c, g, s, ctx)
    ]


def _connected(g: ObjectGraph, s: ClassGraph, ctx, class_arc_id: str, src: str, dst: str) -> bool:
    ca = s.arc(class_arc_id)
    return any(a.dst == dst and arc_full_member(a, ca, ctx) for a in g.arcs_from(src))


def verify_relation(
    relation: Iterable[CandidatePair | tuple[str, str]],
    g: ObjectGraph,
    s: ClassGraph,
    mode: ComplianceMode,
) -> Verification:
    """Check a relation against the definitions directly, pair by pair."""
    rel = sorted({CandidatePair(*p) for p in relation})
    ctx = make_context(g, s)
    out = Verification(ok=True)
    for p in rel:
        if not (g.has_node(p.node) and s.has_class(p.class_id)):
            out.not_relational.append(p)
        elif not node_relational_member(g.node(p.node), s.class_(p.class_id), g, s, ctx):
            out.not_relational.append(p)
    for ca in s.class_arcs:
        for p in rel:
            if p.class_id != ca.src or not g.has_node(p.node):
                continue
            for q in rel:
                if q.class_id != ca.dst or not g.has_node(q.node):
                    continue
                if not _connected(g, s, ctx, ca.id, p.node, q.node):
                    out.conflicts.append(Conflict(ca.id, p, q))
    if mode in (ComplianceMode.NORMAL, ComplianceMode.FULL):
        covered = {p.class_id for p in rel}
        out.uncovered_classes = [c.id for c in s.classes if c.id not in covered]
    if mode is ComplianceMode.FULL:
        covered = {p.node for p in rel}
        out.uncovered_nodes = [n.id for n in g.nodes if n.id not in covered]
    out.ok = not (out.not_relational or out.conflicts or out.uncovered_classes or out.uncovered_nodes)
    return out


def _partial_accepts(relation: list[CandidatePair], s: ClassGraph) -> bool:
    # A partial witness must relate something, unless there is nothing to
    # relate to (then the empty relation is even a normal one).
    return bool(relation) or not s.classes


# -- search -----------------------------------------------------------------

class _Exhausted(Exception):
    pass


class _Problem:
    """Candidates with pairwise conflicts precomputed.

    Candidates that conflict with themselves (a loop class arc on their
    class without a full-member loop arc on their node) can never appear in
    any witness and are set aside as ``unusable``.
    """

    def __init__(self, g: ObjectGraph, s: ClassGraph, budget: int):
        self.g, self.s = g, s
        self.budget = budget
        self.expansions = 0
        ctx = make_context(g, s)
        cands = candidates(g, s)
        pair_conflicts: dict[tuple[CandidatePair, CandidatePair], list[Conflict]] = {}
        self_conflicts: list[Conflict] = []
        for ca in s.class_arcs:
            srcs = [p for p in cands if p.class_id == ca.src]
            dsts = [q for q in cands if q.class_id == ca.dst]
            for p in srcs:
                for q in dsts:
                    if _connected(g, s, ctx, ca.id, p.node, q.node):
                        continue
                    conflict = Conflict(ca.id, p, q)
                    if p == q:
                        self_conflicts.append(conflict)
                    else:
                        key = (min(p, q), max(p, q))
                        pair_conflicts.setdefault(key, []).append(conflict)
        dropped = {c.src_pair for c in self_conflicts}
        self.all_candidates = cands
        self.unusable = [p for p in cands if p in dropped]
        self.usable = [p for p in cands if p not in dropped]
        self.self_conflicts = self_conflicts
        index = {p: i for i, p in enumerate(self.usable)}
        self.clash: list[set[int]] = [set() for _ in self.usable]
        self.conflicts: list[Conflict] = list(self_conflicts)
        for (p, q), found in sorted(pair_conflicts.items()):
            self.conflicts.extend(found)
            if p in index and q in index:
                self.clash[index[p]].add(index[q])
                self.clash[index[q]].add(index[p])
        self.conflicts.sort(key=lambda c: (c.class_arc, c.src_pair, c.dst_pair))

    def tick(self) -> None:
        self.expansions += 1
        if self.expansions > self.budget:
            raise _Exhausted

    def search(
        self,
        size: int,
        classes: frozenset[str] = frozenset(),
        nodes: frozenset[str] = frozenset(),
        distinct: str | None = None,
        collect: bool = False,
    ) -> list[list[CandidatePair]]:
        """Conflict-free subsets of ``size`` usable candidates covering targets.

        Candidates are picked in increasing canonical order, so the first
        solution found is the lexicographically least sorted pair list.
        ``distinct`` ("class" or "node") forbids two picks sharing that
        field.  Returns the first solution, or every solution if ``collect``.
        """
        usable = self.usable
        total = len(usable)
        blocked = [0] * total
        used_classes: dict[str, int] = {}
        used_nodes: dict[str, int] = {}
        chosen: list[int] = []
        found: list[list[CandidatePair]] = []

        def compatible(i: int) -> bool:
            if blocked[i]:
                return False
            p = usable[i]
            if distinct == "class" and p.class_id in used_classes:
                return False
            if distinct == "node" and p.node in used_nodes:
                return False
            return True

        def feasible(start: int, slots: int) -> bool:
            open_classes = {c for c in classes if c not in used_classes}
            open_nodes = {n for n in nodes if n not in used_nodes}
            if len(open_classes) > slots or len(open_nodes) > slots:
                return False
            reachable = [i for i in range(start, total) if compatible(i)]
            if len(reachable) < slots:
                return False
            if distinct == "class" and len({usable[i].class_id for i in reachable}) < slots:
                return False
            if distinct == "node" and len({usable[i].node for i in reachable}) < slots:
                return False
            hit_classes = {usable[i].class_id for i in reachable}
            hit_nodes = {usable[i].node for i in reachable}
            return open_classes <= hit_classes and open_nodes <= hit_nodes

        def dfs(start: int, slots: int) -> bool:
            self.tick()
            if slots == 0:
                if all(c in used_classes for c in classes) and all(n in used_nodes for n in nodes):
                    found.append([usable[i] for i in chosen])
                    return not collect
                return False
            if not feasible(start, slots):
                return False
            for i in range(start, total - slots + 1):
                if not compatible(i):
                    continue
                p = usable[i]
                chosen.append(i)
                used_classes[p.class_id] = used_classes.get(p.class_id, 0) + 1
                used_nodes[p.node] = used_nodes.get(p.node, 0) + 1
                for j in self.clash[i]:
                    blocked[j] += 1
                done = dfs(i + 1, slots - 1)
                for j in self.clash[i]:
                    blocked[j] -= 1
                for table, k in ((used_classes, p.class_id), (used_nodes, p.node)):
                    table[k] -= 1
                    if not table[k]:
                        del table[k]
                chosen.pop()
                if done:
                    return True
            return False

        dfs(0, size)
        return found

    def minimal(self, mode: ComplianceMode, collect: bool = False) -> list[list[CandidatePair]]:
        """Minimal-cardinality witnesses for ``mode`` (first one, or all)."""
        class_ids = frozenset(c.id for c in self.s.classes)
        node_ids = frozenset(n.id for n in self.g.nodes)
        if mode is ComplianceMode.NORMAL:
            return self.search(len(class_ids), classes=class_ids, distinct="class", collect=collect)
        if mode is ComplianceMode.FULL:
            lower = max(len(class_ids), len(node_ids))
            for size in range(lower, len(self.usable) + 1):
                found = self.search(size, classes=class_ids, nodes=node_ids, collect=collect)
                if found:
                    return found
            return []
        if not class_ids:
            return [[]]
        return self.max_cover("class", collect=collect)

    def max_cover(self, field_name: str, collect: bool = False) -> list[list[CandidatePair]]:
        """Conflict-free sets covering as many classes (or nodes) as possible."""
        keys = {getattr(p, "class_id" if field_name == "class" else "node") for p in self.usable}
        for size in range(len(keys), 0, -1):
            found = self.search(size, distinct=field_name, collect=collect)
            if found:
                return found
        return []


def _explain(problem: _Problem, mode: ComplianceMode) -> tuple[tuple[str, ...], tuple[str, ...]]:
    """Classes (and, in full mode, nodes) that no conflict-free set reaches."""
    g, s = problem.g, problem.s
    try:
        best = problem.max_cover("class")
        covered = {p.class_id for p in best[0]} if best else set()
    except _Exhausted:
        covered = {p.class_id for p in problem.usable}
    uncovered_classes = tuple(c.id for c in s.classes if c.id not in covered)
    uncovered_nodes: tuple[str, ...] = ()
    if mode is ComplianceMode.FULL:
        problem.expansions = 0
        try:
            best = problem.max_cover("node")
            reached = {p.node for p in best[0]} if best else set()
        except _Exhausted:
            reached = {p.node for p in problem.usable}
        uncovered_nodes = tuple(n.id for n in g.nodes if n.id not in reached)
    return uncovered_classes, uncovered_nodes


def find_compliance(
    g: ObjectGraph,
    s: ClassGraph,
    mode: ComplianceMode = ComplianceMode.NORMAL,
    budget: int | None = None,
) -> ComplianceReport:
    """Search for a compliance relation of the given mode.

    On success the witness is the smallest relation that does the job,
    ties broken by the sorted (node, class) pair list.  In partial mode the
    witness covers as many classes as any conflict-free relation can.
    """
    problem = _Problem(g, s, budget if budget is not None else default_budget())
    try:
        found = problem.minimal(mode)
    except _Exhausted:
        return ComplianceReport(mode=mode, compliant=False, undecided=True,
                                raw_compliant=mode is ComplianceMode.PARTIAL)

    if found:
        witness = tuple(sorted(found[0]))
        check = verify_relation(witness, g, s, mode)
        if not check.ok or (mode is ComplianceMode.PARTIAL and not _partial_accepts(list(witness), s)):
            raise AssertionError(f"search produced an invalid witness: {check}")
        covered = tuple(sorted({p.class_id for p in witness}))
        return ComplianceReport(
            mode=mode,
            compliant=True,
            witness=witness,
            covered_classes=covered,
            uncovered_classes=tuple(c.id for c in s.classes if c.id not in covered),
            raw_compliant=True,
        )

    problem.expansions = 0
    uncovered_classes, uncovered_nodes = _explain(problem, mode)
    return ComplianceReport(
        mode=mode,
        compliant=False,
        uncovered_classes=uncovered_classes,
        uncovered_nodes=uncovered_nodes,
        conflicts=tuple(problem.conflicts),
        raw_compliant=mode is ComplianceMode.PARTIAL,
    )


def all_witnesses(
    g: ObjectGraph,
    s: ClassGraph,
    mode: ComplianceMode = ComplianceMode.NORMAL,
    budget: int | None = None,
) -> list[tuple[CandidatePair, ...]]:
    """Every minimal witness, in canonical order; raises BudgetExceeded."""
    problem = _Problem(g, s, budget if budget is not None else default_budget())
    try:
        found = problem.minimal(mode, collect=True)
    except _Exhausted:
        raise BudgetExceeded(f"search budget of {problem.budget} expansions exhausted") from None
    return [tuple(sorted(w)) for w in found if mode is not ComplianceMode.PARTIAL or _partial_accepts(w, s)]


# -- reference enumeration --------------------------------------------------

def _subsets(items: list) -> Iterator[tuple]:
    for r in range(len(items) + 1):
        yield from itertools.combinations(items, r)


def oracle_compliance(
    g: ObjectGraph,
    s: ClassGraph,
    mode: ComplianceMode,
    limit: int = ORACLE_LIMIT,
) -> bool:
    """Exhaustive reference: try every subset of the candidate pairs."""
    cands = candidates(g, s)
    if len(cands) > limit:
        raise BudgetExceeded(f"{len(cands)} candidates exceed the enumeration limit of {limit}")
    for subset in _subsets(cands):
        if mode is ComplianceMode.PARTIAL and not _partial_accepts(list(subset), s):
            continue
        if verify_relation(subset, g, s, mode).ok:
            return True
    return False
