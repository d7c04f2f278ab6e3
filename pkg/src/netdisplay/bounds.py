"""Reticulation budgets and the rewiring that enforces them.

Three pieces: a census (class_stats), size bounds that hold per network
class (verify_bounds), and two constructions: a branch-removal matching
that avoids dummy leaves on reticulation-visible networks, and the
rewiring that turns a nearly stable network into a reticulation-visible
one without touching the leaf set.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from .core import Branch, Network, NetworkEditor, classify, stability
from .errors import ClassPreconditionError, InternalConsistencyError
from .reductions import _suppress_in_place
from .tcp import Resolution


@dataclass(frozen=True)
class ClassStats:
    """Degree census plus the stable/unstable reticulation split.

    tree_vertices counts the root together with the internal outdegree-2
    vertices, which is what makes tree_vertices = n_leaves - 1 +
    m_reticulations hold on every binary network.
    """

    n_leaves: int
    m_reticulations: int
    s_ret: int
    u_ret: int
    tree_vertices: int
    branches: int

    def to_dict(self) -> dict:
        return {
            "n_leaves": self.n_leaves,
            "m_reticulations": self.m_reticulations,
            "s_ret": self.s_ret,
            "u_ret": self.u_ret,
            "tree_vertices": self.tree_vertices,
            "branches": self.branches,
        }


class BoundCheck(NamedTuple):
    name: str
    limit: int
    observed: int
    passed: bool


@dataclass(frozen=True)
class BoundReport:
    checks: tuple[BoundCheck, ...]

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_rows(self) -> list:
        return [
            {
                "name": c.name,
                "limit": c.limit,
                "observed": c.observed,
                "pass": c.passed,
            }
            for c in self.checks
        ]


def class_stats(net: Network) -> ClassStats:
    net.require_valid(require_binary=True)
    rep = stability(net)
    rets = net.reticulations
    s_ret = sum(1 for r in rets if rep.stable[r])
    tree_vertices = sum(
        1
        for v in net.vertices
        if net.out_degree(v) >= 1 and net.in_degree(v) <= 1
    )
    return ClassStats(
        n_leaves=net.n_leaves,
        m_reticulations=len(rets),
        s_ret=s_ret,
        u_ret=len(rets) - s_ret,
        tree_vertices=tree_vertices,
        branches=net.num_branches,
    )


def verify_bounds(net: Network) -> BoundReport:
    """Evaluate every size bound the network's class entitles it to.

    Reticulation-visible networks get the 4(n-1) reticulation cap; nearly
    stable ones get the 12/13/38(n-1) caps and the unstable-vs-stable
    reticulation inequality. Networks in neither class yield an empty
    report.
    """
    flags = classify(net)
    stats = class_stats(net)
    n1 = stats.n_leaves - 1
    checks = []
    if flags.reticulation_visible:
        checks.append(
            BoundCheck(
                "reticulations<=4(n-1)",
                4 * n1,
                stats.m_reticulations,
                stats.m_reticulations <= 4 * n1,
            )
        )
    if flags.nearly_stable:
        checks.append(
            BoundCheck(
                "reticulations<=12(n-1)",
                12 * n1,
                stats.m_reticulations,
                stats.m_reticulations <= 12 * n1,
            )
        )
        checks.append(
            BoundCheck(
                "tree_vertices<=13(n-1)",
                13 * n1,
                stats.tree_vertices,
                stats.tree_vertices <= 13 * n1,
            )
        )
        checks.append(
            BoundCheck(
                "branches<=38(n-1)",
                38 * n1,
                stats.branches,
                stats.branches <= 38 * n1,
            )
        )
        checks.append(
            BoundCheck(
                "unstable<=2*stable",
                2 * stats.s_ret,
                stats.u_ret,
                stats.u_ret <= 2 * stats.s_ret,
            )
        )
    return BoundReport(tuple(checks))


def _try_augment(net: Network, start: int, match_of_tail: dict) -> bool:
    """Grow the tail matching by one reticulation via alternating paths."""
    visited = set()
    stack = [[start, sorted(net.parents(start)), 0]]
    while stack:
        frame = stack[-1]
        _, tails, i = frame
        if i >= len(tails):
            stack.pop()
            if stack:
                stack[-1][2] += 1
            continue
        t = tails[i]
        if t in visited:
            frame[2] += 1
            continue
        visited.add(t)
        holder = match_of_tail.get(t)
        if holder is None:
            for f in reversed(stack):
                match_of_tail[f[1][f[2]]] = f[0]
            return True
        stack.append([holder, sorted(net.parents(holder)), 0])
    return False


def select_dummy_free_removal(net: Network) -> Resolution:
    """Pick which in-branch each reticulation keeps so that the removed
    branches never share a tail.

    With distinct removal tails no tree vertex loses both out-branches, so
    the resolved spanning tree carries no unlabeled dead ends even before
    suppression. The matching exists whenever every reticulation is
    stable; rets are matched in ascending id order and prefer their
    smaller-id parent, so the output is deterministic.
    """
    net.require_valid(require_binary=True)
    if not classify(net).reticulation_visible:
        raise ClassPreconditionError(
            "dummy-free removal requires every reticulation to be stable"
        )
    match_of_tail: dict = {}
    for r in net.reticulations:
        if not _try_augment(net, r, match_of_tail):
            raise InternalConsistencyError(
                f"no removal matching covers reticulation {r}"
            )
    removed_tail = {r: t for t, r in match_of_tail.items()}
    kept = []
    for r in net.reticulations:
        keepers = [p for p in net.parents(r) if p != removed_tail[r]]
        if len(keepers) != 1:
            raise InternalConsistencyError(
                f"reticulation {r} lacks a unique kept in-branch"
            )
        kept.append((r, Branch(keepers[0], r)))
    return Resolution(tuple(kept))


def ns_to_rv_transform(net: Network) -> tuple[Network, ClassStats, ClassStats]:
    """Rewire a nearly stable network until every reticulation is stable.

    Each round takes the topologically first unstable reticulation; its
    child is necessarily a stable reticulation and both its parents are
    stable tree vertices. Cutting the smaller-id parent's branch leaves
    two degree-two chains that contract away, dropping the reticulation
    count by one. The stable-reticulation count never decreases and never
    exceeds its old value plus the old unstable count.
    """
    net.require_valid(require_binary=True)
    if not classify(net).nearly_stable:
        raise ClassPreconditionError(
            "the rewiring requires a nearly stable network"
        )
    before = class_stats(net)
    cur = net
    while True:
        rep = stability(cur)
        rets = set(cur.reticulations)
        target = None
        for v in cur.topological_order():
            if v in rets and not rep.stable[v]:
                target = v
                break
        if target is None:
            break
        child = cur.children(target)[0]
        if not (cur.in_degree(child) >= 2 and cur.out_degree(child) == 1):
            raise InternalConsistencyError(
                f"unstable reticulation {target} lacks a reticulation child"
            )
        cut_parent = min(cur.parents(target))
        ed = NetworkEditor(cur)
        ed.remove_branch(cut_parent, target)
        _suppress_in_place(ed)
        cur = ed.freeze()
    after = class_stats(cur)
    if not classify(cur).reticulation_visible:
        raise InternalConsistencyError(
            "rewiring finished without reaching reticulation visibility"
        )
    if not (before.s_ret <= after.s_ret <= before.s_ret + before.u_ret):
        raise InternalConsistencyError(
            "stable reticulation count moved outside its promised range"
        )
    return cur, before, after
