"""Verdict-free rewriting steps shared by the containment algorithm.

Every public reduction returns the rewritten structure(s) plus a
ReductionStep describing what happened; traces replay deterministically
(see replay_trace). Vertex ids of surviving vertices are stable across a
reduction, which is what makes the recorded branches meaningful later.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field

from .core import Branch, Network, NetworkEditor, PhyloTree
from .errors import InternalConsistencyError, LeafSetMismatchError, PatternMismatchError

_FRESH_RE = re.compile(r"^__r(\d+)$")


@dataclass(frozen=True)
class ReductionStep:
    """One rewriting event.

    removed_branches lists only the rule-mandated removals; vertices that
    the follow-up suppression contracted are in `contracted` (each had
    degrees (1,1) or (0,1) at contraction time).
    """

    kind: str  # cherry | uncle_nephew | case_A..case_J | suppress
    removed_branches: tuple[Branch, ...] = ()
    contracted: tuple[int, ...] = ()
    introduced_leaf: tuple[int, str] | None = None

    def to_line(self) -> str:
        removed = ",".join(str(b) for b in self.removed_branches)
        contracted = ",".join(str(v) for v in self.contracted)
        line = f"{self.kind} removed={removed} contracted={contracted}"
        if self.introduced_leaf is not None:
            v, lab = self.introduced_leaf
            line += f" introduced={v}:{lab}"
        return line


@dataclass
class ReductionTrace:
    steps: list[ReductionStep] = field(default_factory=list)

    def append(self, step: ReductionStep) -> None:
        self.steps.append(step)

    def extend(self, other: "ReductionTrace") -> None:
        self.steps.extend(other.steps)

    def to_text(self) -> str:
        return "\n".join(s.to_line() for s in self.steps)

    def __len__(self) -> int:
        return len(self.steps)


def _suppress_in_place(ed: NetworkEditor) -> list[int]:
    """Drive the editor to the suppression fixpoint.

    Removes unlabeled outdegree-0 vertices (and the dead-end paths above
    them), contracts (indegree 1, outdegree 1) vertices, and contracts
    outdegree-1 root chains. Returns contracted vertex ids in order.
    """
    contracted: list[int] = []
    queue = deque(sorted(ed.out))
    queued = set(queue)

    def enqueue(v: int) -> None:
        if v in ed.out and v not in queued:
            queue.append(v)
            queued.add(v)

    while queue:
        v = queue.popleft()
        queued.discard(v)
        if v not in ed.out:
            continue
        ind, outd = len(ed.ins[v]), len(ed.out[v])
        if ind == 0:
            if v != ed.root:
                raise InternalConsistencyError(
                    f"vertex {v} lost all parents but is not the root"
                )
            if outd == 1:
                child = ed.out[v][0]
                if ed.ins[child] != [v]:
                    raise InternalConsistencyError(
                        f"root chain child {child} has extra parents"
                    )
                ed.delete_vertex(v)
                contracted.append(v)
                ed.root = child
                enqueue(child)
            elif outd == 0 and v not in ed.labels:
                raise InternalConsistencyError("network degenerated to nothing")
            continue
        if outd == 0:
            if v in ed.labels:
                continue
            parents = list(ed.ins[v])
            ed.delete_vertex(v)
            for p in parents:
                enqueue(p)
            continue
        if ind == 1 and outd == 1:
            p, c = ed.ins[v][0], ed.out[v][0]
            if c in ed.out[p]:
                # contracting would create a parallel pair p->c; both
                # copies carry the same resolutions, so merge them
                ed.remove_branch(v, c)
                enqueue(v)
                enqueue(c)
                continue
            ed.contract(v)
            contracted.append(v)
            enqueue(p)
            enqueue(c)
    return contracted


def suppress_degenerate(net: Network) -> tuple[Network, ReductionStep]:
    """Suppress to fixpoint: no suppressible vertex, no unlabeled
    outdegree-0 vertex, no outdegree-1 root chain. Idempotent."""
    ed = NetworkEditor(net)
    contracted = _suppress_in_place(ed)
    return ed.freeze(), ReductionStep("suppress", (), tuple(contracted))


def _fresh_label(net: Network) -> str:
    k = -1
    for lab in net.leaf_labels.values():
        m = _FRESH_RE.match(lab)
        if m:
            k = max(k, int(m.group(1)))
    return f"__r{k + 1}"


def _check_same_leaves(net: Network, tree: Network) -> None:
    if net.label_set() != tree.label_set():
        raise LeafSetMismatchError(
            f"leaf label sets differ: {sorted(net.label_set() ^ tree.label_set())}"
        )


def _find_common_cherry(net: Network, tree: PhyloTree):
    """Smallest net cherry whose two labels are also siblings in tree."""
    best = None
    for v in net.vertices:
        if net.in_degree(v) == 1 and net.out_degree(v) == 2:
            c1, c2 = net.children(v)
            if net.is_leaf(c1) and net.is_leaf(c2):
                l1, l2 = sorted((c1, c2))
                p1 = tree.parent_of_label(net.label(l1))
                p2 = tree.parent_of_label(net.label(l2))
                if p1 == p2:
                    cand = (l1, l2, v)
                    if best is None or cand < best:
                        best = cand
    return best


def net_cherry(net: Network):
    """Any two leaves sharing a strict tree-vertex parent, or None."""
    for v in net.vertices:
        if net.in_degree(v) == 1 and net.out_degree(v) == 2:
            c1, c2 = net.children(v)
            if net.is_leaf(c1) and net.is_leaf(c2):
                return (min(c1, c2), max(c1, c2), v)
    return None


def cherry_reduce(
    net: Network, tree: PhyloTree
) -> tuple[Network, PhyloTree, ReductionTrace]:
    """Collapse cherries common to net and tree until none remains.

    Each round replaces the cherry parent by a fresh reserved leaf
    (``__r<k>``) on both sides, keeping the leaf label sets equal. Cherries
    present only in one structure are left alone.
    """
    _check_same_leaves(net, tree)
    trace = ReductionTrace()
    while True:
        found = _find_common_cherry(net, tree)
        if found is None:
            return net, tree, trace
        l1, l2, p = found
        lab = _fresh_label(net)
        lab1, lab2 = net.label(l1), net.label(l2)

        ed = NetworkEditor(net)
        ed.delete_vertex(l1)
        ed.delete_vertex(l2)
        ed.set_label(p, lab)
        net = ed.freeze()

        t1 = tree.vertex_by_label(lab1)
        t2 = tree.vertex_by_label(lab2)
        q = tree.parent(t1)
        ted = NetworkEditor(tree)
        ted.delete_vertex(t1)
        ted.delete_vertex(t2)
        ted.set_label(q, lab)
        tree = PhyloTree.from_network(ted.freeze())

        trace.append(
            ReductionStep("cherry", (Branch(p, l1), Branch(p, l2)), (), (p, lab))
        )


def _uncle_nephew_site(net: Network, site: int):
    """Return (leaf, ret, ret_leaf) below the site or raise."""
    if site not in net:
        raise PatternMismatchError(f"unknown vertex {site}")
    if net.in_degree(site) < 1 or net.out_degree(site) != 2:
        raise PatternMismatchError(f"vertex {site} is not a binary tree vertex")
    c1, c2 = net.children(site)
    for leaf, ret in ((c1, c2), (c2, c1)):
        if (
            net.is_leaf(leaf)
            and net.in_degree(ret) == 2
            and net.out_degree(ret) == 1
            and net.is_leaf(net.children(ret)[0])
        ):
            return leaf, ret, net.children(ret)[0]
    raise PatternMismatchError(
        f"vertex {site} does not head an uncle-nephew pattern"
    )


def _uncle_nephew_branch(net: Network, tree: PhyloTree, site: int) -> Branch:
    """Pick the branch the uncle-nephew rule removes below `site`."""
    leaf, ret, ret_leaf = _uncle_nephew_site(net, site)
    sib = tree.parent_of_label(net.label(leaf)) == tree.parent_of_label(
        net.label(ret_leaf)
    )
    if not sib:
        return Branch(site, ret)
    others = [p for p in net.parents(ret) if p != site]
    if len(others) != 1:
        raise PatternMismatchError(
            f"reticulation {ret} lacks a unique outside parent"
        )
    return Branch(others[0], ret)


def uncle_nephew_reduce(
    net: Network, tree: PhyloTree, site: int
) -> tuple[Network, ReductionStep]:
    """Resolve the uncle-nephew pattern below `site`.

    The site has a leaf child and a reticulation child whose only child is a
    leaf. If the two leaves are siblings in the reference tree the
    reticulation's outside in-branch is removed (the pair is kept together),
    otherwise the branch from the site to the reticulation is removed.
    """
    _check_same_leaves(net, tree)
    branch = _uncle_nephew_branch(net, tree, site)
    ed = NetworkEditor(net)
    ed.remove_branch(*branch)
    contracted = _suppress_in_place(ed)
    return ed.freeze(), ReductionStep(
        "uncle_nephew", (branch,), tuple(contracted)
    )


def replay_trace(
    net: Network, tree: PhyloTree, trace: ReductionTrace
) -> list[tuple[Network, PhyloTree]]:
    """Re-apply a trace to the pair it was recorded from.

    Returns every intermediate state, starting with the inputs; the final
    pair reproduces the original run bit-for-bit under canonical
    serialization.
    """
    states = [(net, tree)]
    for step in trace.steps:
        if step.kind == "cherry":
            b1, b2 = step.removed_branches
            p, l1, l2 = b1.tail, b1.head, b2.head
            v, lab = step.introduced_leaf
            if v != p:
                raise InternalConsistencyError("cherry step names two parents")
            lab1, lab2 = net.label(l1), net.label(l2)
            ed = NetworkEditor(net)
            ed.delete_vertex(l1)
            ed.delete_vertex(l2)
            ed.set_label(p, lab)
            net = ed.freeze()
            t1 = tree.vertex_by_label(lab1)
            t2 = tree.vertex_by_label(lab2)
            q = tree.parent(t1)
            ted = NetworkEditor(tree)
            ted.delete_vertex(t1)
            ted.delete_vertex(t2)
            ted.set_label(q, lab)
            tree = PhyloTree.from_network(ted.freeze())
        elif step.kind == "suppress":
            net, _ = suppress_degenerate(net)
        else:
            ed = NetworkEditor(net)
            for b in step.removed_branches:
                ed.remove_branch(*b)
            _suppress_in_place(ed)
            net = ed.freeze()
        states.append((net, tree))
    return states
