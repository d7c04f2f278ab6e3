"""Rooted phylogenetic networks: data model, validation, stability, class flags.

A network is a rooted DAG whose outdegree-0 vertices (leaves) carry distinct
labels. Reticulations are vertices of indegree >= 2 and outdegree 1; tree
vertices have indegree 1 and outdegree >= 2. A vertex is *stable* if it lies
on every root-to-leaf path for at least one leaf, i.e. it dominates that leaf.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, NamedTuple

from .errors import InternalConsistencyError, InvalidNetworkError

# vertex kinds returned by vertex_kind()
ROOT = "root"
LEAF = "leaf"
TREE_VERTEX = "tree_vertex"
RETICULATION = "reticulation"


class Branch(NamedTuple):
    """Directed branch (tail, head)."""

    tail: int
    head: int

    def __str__(self) -> str:
        return f"{self.tail}->{self.head}"


@dataclass(frozen=True)
class Violation:
    """One structural defect found by validate(); data, not an exception."""

    message: str
    vertex: int | None = None
    branch: Branch | None = None

    def __str__(self) -> str:
        at = ""
        if self.vertex is not None:
            at = f" [vertex {self.vertex}]"
        if self.branch is not None:
            at += f" [branch {self.branch}]"
        return self.message + at


@dataclass(frozen=True)
class ValidationOutcome:
    ok: bool
    violations: tuple[Violation, ...]


@dataclass(frozen=True)
class StabilityReport:
    """Per-vertex stability flags with one witness leaf where stable."""

    stable: Mapping[int, bool]
    witness: Mapping[int, int | None]

    def stable_vertices(self) -> list[int]:
        return sorted(v for v, s in self.stable.items() if s)

    def unstable_vertices(self) -> list[int]:
        return sorted(v for v, s in self.stable.items() if not s)


@dataclass(frozen=True)
class ClassFlags:
    binary: bool
    tree_child: bool
    reticulation_visible: bool
    nearly_stable: bool
    subphylogeny_free: bool

    def to_dict(self) -> dict[str, bool]:
        return {
            "binary": self.binary,
            "tree_child": self.tree_child,
            "reticulation_visible": self.reticulation_visible,
            "nearly_stable": self.nearly_stable,
            "subphylogeny_free": self.subphylogeny_free,
        }

    def to_set(self) -> frozenset[str]:
        return frozenset(name for name, on in self.to_dict().items() if on)


class Network:
    """Immutable rooted DAG with labeled leaves.

    Construction is permissive: only adjacency-map consistency is required,
    so that validate() can report structural defects as data. Children keep
    construction order; algorithms must not depend on that order.

    Vertex ids are small ints and are never reused within a network's
    derivation history: editors allocate fresh ids above ``next_id``.
    """

    __slots__ = ("_out", "_in", "_labels", "_root", "_next_id", "_cache")

    def __init__(
        self,
        out_adj: Mapping[int, Iterable[int]],
        leaf_labels: Mapping[int, str],
        next_id: int | None = None,
    ):
        out = {v: tuple(cs) for v, cs in out_adj.items()}
        ins: dict[int, list[int]] = {v: [] for v in out}
        for v, cs in out.items():
            for c in cs:
                if c not in ins:
                    raise ValueError(f"adjacency references unknown vertex {c}")
                ins[c].append(v)
        for v in leaf_labels:
            if v not in out:
                raise ValueError(f"label references unknown vertex {v}")
        self._out = out
        self._in = {v: tuple(ps) for v, ps in ins.items()}
        self._labels = dict(leaf_labels)
        roots = [v for v, ps in self._in.items() if not ps]
        self._root = min(roots) if roots else None
        top = max(out) + 1 if out else 0
        self._next_id = top if next_id is None else max(next_id, top)
        self._cache: dict = {}

    # -- structure accessors ------------------------------------------------

    @property
    def root(self) -> int:
        if self._root is None:
            raise InvalidNetworkError("network has no root (no indegree-0 vertex)")
        return self._root

    @property
    def vertices(self) -> tuple[int, ...]:
        if "vertices" not in self._cache:
            self._cache["vertices"] = tuple(sorted(self._out))
        return self._cache["vertices"]

    @property
    def next_id(self) -> int:
        return self._next_id

    def __len__(self) -> int:
        return len(self._out)

    def __contains__(self, v: int) -> bool:
        return v in self._out

    def children(self, v: int) -> tuple[int, ...]:
        return self._out[v]

    def parents(self, v: int) -> tuple[int, ...]:
        return self._in[v]

    def out_degree(self, v: int) -> int:
        return len(self._out[v])

    def in_degree(self, v: int) -> int:
        return len(self._in[v])

    def is_leaf(self, v: int) -> bool:
        return not self._out[v]

    def label(self, v: int) -> str | None:
        return self._labels.get(v)

    @property
    def leaf_labels(self) -> dict[int, str]:
        return dict(self._labels)

    @property
    def leaves(self) -> tuple[int, ...]:
        if "leaves" not in self._cache:
            self._cache["leaves"] = tuple(v for v in self.vertices if not self._out[v])
        return self._cache["leaves"]

    @property
    def n_leaves(self) -> int:
        return len(self.leaves)

    def label_set(self) -> frozenset[str]:
        return frozenset(self._labels.values())

    def vertex_by_label(self, label: str) -> int:
        if "by_label" not in self._cache:
            self._cache["by_label"] = {lab: v for v, lab in self._labels.items()}
        return self._cache["by_label"][label]

    @property
    def reticulations(self) -> tuple[int, ...]:
        if "rets" not in self._cache:
            self._cache["rets"] = tuple(
                v for v in self.vertices if len(self._in[v]) >= 2 and self._out[v]
            )
        return self._cache["rets"]

    @property
    def num_reticulations(self) -> int:
        return len(self.reticulations)

    def branches(self) -> Iterator[Branch]:
        for v in self.vertices:
            for c in self._out[v]:
                yield Branch(v, c)

    @property
    def num_branches(self) -> int:
        return sum(len(cs) for cs in self._out.values())

    def in_branches(self, v: int) -> tuple[Branch, ...]:
        return tuple(Branch(p, v) for p in self._in[v])

    def has_branch(self, tail: int, head: int) -> bool:
        return head in self._out.get(tail, ())

    # -- derived structure ---------------------------------------------------

    def topological_order(self) -> tuple[int, ...]:
        """Vertices with every parent before its children; smallest-id-first
        among the ready set, so the order is deterministic."""
        if "topo" in self._cache:
            return self._cache["topo"]
        order = self._try_topological_order()
        if order is None:
            raise InvalidNetworkError("network contains a directed cycle")
        self._cache["topo"] = order
        return order

    def _try_topological_order(self) -> tuple[int, ...] | None:
        indeg = {v: len(self._in[v]) for v in self._out}
        ready = [v for v, d in indeg.items() if d == 0]
        heapq.heapify(ready)
        order = []
        while ready:
            v = heapq.heappop(ready)
            order.append(v)
            for c in self._out[v]:
                indeg[c] -= 1
                if indeg[c] == 0:
                    heapq.heappush(ready, c)
        if len(order) != len(self._out):
            return None
        return tuple(order)

    def reachable_from(self, start: int, skip: int | None = None) -> set[int]:
        """Vertices reachable from start, optionally ignoring one vertex."""
        if start == skip:
            return set()
        seen = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for c in self._out[v]:
                if c != skip and c not in seen:
                    seen.add(c)
                    stack.append(c)
        return seen

    def require_valid(self, require_binary: bool = False) -> None:
        outcome = validate(self, require_binary=require_binary)
        if not outcome.ok:
            detail = "; ".join(str(v) for v in outcome.violations[:5])
            raise InvalidNetworkError(
                f"invalid network: {detail}", outcome.violations
            )


class PhyloTree(Network):
    """A network with zero reticulations and binary internal vertices."""

    @classmethod
    def from_network(cls, net: Network) -> "PhyloTree":
        if net.num_reticulations:
            raise InvalidNetworkError("network has reticulations; not a tree")
        net.require_valid(require_binary=True)
        return cls(net._out, net._labels, next_id=net.next_id)

    def parent(self, v: int) -> int:
        ps = self.parents(v)
        if len(ps) != 1:
            raise InvalidNetworkError(f"tree vertex {v} has {len(ps)} parents")
        return ps[0]

    def parent_of_label(self, label: str) -> int:
        return self.parent(self.vertex_by_label(label))


class NetworkEditor:
    """Mutable scratch copy of a network for deriving a new one.

    Fresh vertex ids continue from the source network's counter, so ids of
    surviving vertices are stable across a derivation and new ids never
    collide with deleted ones.
    """

    def __init__(self, net: Network):
        self.out = {v: list(cs) for v, cs in net._out.items()}
        self.ins = {v: list(ps) for v, ps in net._in.items()}
        self.labels = dict(net._labels)
        self.root = net._root
        self._next = net.next_id

    def __contains__(self, v: int) -> bool:
        return v in self.out

    def new_vertex(self) -> int:
        v = self._next
        self._next += 1
        self.out[v] = []
        self.ins[v] = []
        return v

    def add_branch(self, tail: int, head: int) -> None:
        if head in self.out[tail]:
            raise InternalConsistencyError(
                f"adding branch {tail}->{head} would create a parallel branch"
            )
        self.out[tail].append(head)
        self.ins[head].append(tail)

    def remove_branch(self, tail: int, head: int) -> None:
        self.out[tail].remove(head)
        self.ins[head].remove(tail)

    def delete_vertex(self, v: int) -> None:
        for p in list(self.ins[v]):
            self.out[p].remove(v)
        for c in list(self.out[v]):
            self.ins[c].remove(v)
        del self.out[v]
        del self.ins[v]
        self.labels.pop(v, None)
        if self.root == v:
            self.root = None

    def contract(self, v: int) -> Branch:
        """Remove an (indeg 1, outdeg 1) vertex, joining parent to child."""
        (p,) = self.ins[v]
        (c,) = self.out[v]
        if c in self.out[p]:
            raise InternalConsistencyError(
                f"contracting {v} would duplicate branch {p}->{c}"
            )
        self.remove_branch(p, v)
        self.remove_branch(v, c)
        del self.out[v]
        del self.ins[v]
        self.labels.pop(v, None)
        self.add_branch(p, c)
        return Branch(p, c)

    def subdivide(self, tail: int, head: int) -> int:
        """Replace tail->head with tail->s->head; returns the new vertex s."""
        s = self.new_vertex()
        self.remove_branch(tail, head)
        self.add_branch(tail, s)
        self.add_branch(s, head)
        return s

    def set_label(self, v: int, label: str | None) -> None:
        if label is None:
            self.labels.pop(v, None)
        else:
            self.labels[v] = label

    def freeze(self) -> Network:
        return Network(self.out, self.labels, next_id=self._next)


# -- operations ---------------------------------------------------------------


def vertex_kind(net: Network, v: int) -> str:
    """Exact kind of a vertex by its degrees: root, leaf, tree_vertex,
    reticulation. Raises on ids unknown to the network or on degree
    combinations valid networks cannot contain."""
    if v not in net:
        raise ValueError(f"unknown vertex id {v}")
    ind, outd = net.in_degree(v), net.out_degree(v)
    if ind == 0:
        return ROOT
    if outd == 0:
        if ind == 1:
            return LEAF
        raise ValueError(f"vertex {v} has indegree {ind} and outdegree 0")
    if ind == 1:
        if outd == 1:
            raise ValueError(f"vertex {v} is suppressible (indegree 1, outdegree 1)")
        return TREE_VERTEX
    if outd == 1:
        return RETICULATION
    raise ValueError(f"vertex {v} has indegree {ind} and outdegree {outd}")


def validate(net: Network, require_binary: bool = False) -> ValidationOutcome:
    """Check the structural invariants; violations are data, not failures."""
    vs: list[Violation] = []
    verts = net.vertices
    single = len(verts) == 1

    roots = [v for v in verts if net.in_degree(v) == 0]
    if not roots:
        vs.append(Violation("no root: every vertex has a parent"))
    elif len(roots) > 1:
        for r in roots[1:]:
            vs.append(Violation("multiple indegree-0 vertices", vertex=r))

    order = net._try_topological_order()
    if order is None:
        vs.append(Violation("directed cycle present"))
    elif roots and len(roots) == 1:
        reached = net.reachable_from(roots[0])
        for v in verts:
            if v not in reached:
                vs.append(Violation("unreachable from root", vertex=v))

    seen_labels: dict[str, int] = {}
    for v in verts:
        ind, outd = net.in_degree(v), net.out_degree(v)
        lab = net.label(v)
        if outd == 0:
            if lab is None:
                vs.append(Violation("unlabeled leaf", vertex=v))
            if ind >= 2:
                vs.append(Violation("leaf with multiple parents", vertex=v))
        else:
            if lab is not None:
                vs.append(Violation("label on a non-leaf vertex", vertex=v))
        if ind == 1 and outd == 1:
            vs.append(Violation("suppressible vertex (indegree 1, outdegree 1)", vertex=v))
        if ind == 0 and outd == 1:
            vs.append(Violation("degenerate root (outdegree 1)", vertex=v))
        if ind >= 2 and outd >= 2:
            vs.append(Violation("vertex fits no kind (indegree >= 2, outdegree >= 2)", vertex=v))
        if lab is not None:
            if lab in seen_labels:
                vs.append(Violation(f"duplicate leaf label {lab!r}", vertex=v))
            seen_labels[lab] = v
        cs = net.children(v)
        if len(set(cs)) != len(cs):
            dup = next(c for c in cs if cs.count(c) > 1)
            vs.append(Violation("parallel branches", branch=Branch(v, dup)))

    if require_binary and not single:
        for v in verts:
            ind, outd = net.in_degree(v), net.out_degree(v)
            ok = (
                (ind == 0 and outd == 2)
                or (ind == 1 and outd == 0)
                or (ind == 1 and outd == 2)
                or (ind == 2 and outd == 1)
            )
            if not ok:
                vs.append(
                    Violation(
                        f"not binary: indegree {ind}, outdegree {outd}", vertex=v
                    )
                )

    return ValidationOutcome(not vs, tuple(vs))


def _dominator_stability(net: Network) -> StabilityReport:
    # Immediate dominators over a DAG need a single pass in topological
    # order: every parent is final before its child is processed.
    order = net.topological_order()
    root = net.root
    idom = {root: root}
    depth = {root: 0}

    def meet(a: int, b: int) -> int:
        while depth[a] > depth[b]:
            a = idom[a]
        while depth[b] > depth[a]:
            b = idom[b]
        while a != b:
            a = idom[a]
            b = idom[b]
        return a

    for v in order[1:]:
        ps = net.parents(v)
        d = ps[0]
        for p in ps[1:]:
            d = meet(d, p)
        idom[v] = d
        depth[v] = depth[d] + 1

    # smallest dominated leaf, folded bottom-up along the dominator tree
    witness: dict[int, int | None] = {
        v: (v if net.is_leaf(v) else None) for v in order
    }
    for v in sorted(order[1:], key=lambda u: -depth[u]):
        w = witness[v]
        if w is None:
            continue
        up = idom[v]
        if witness[up] is None or w < witness[up]:
            witness[up] = w
    stable = {v: witness[v] is not None for v in order}
    return StabilityReport(stable, witness)


def _deletion_stability(net: Network) -> StabilityReport:
    root = net.root
    leaves = net.leaves
    witness: dict[int, int | None] = {}
    for v in net.vertices:
        if v == root:
            witness[v] = min(leaves)
            continue
        reached = net.reachable_from(root, skip=v)
        lost = [l for l in leaves if l not in reached]
        witness[v] = min(lost) if lost else None
    stable = {v: witness[v] is not None for v in net.vertices}
    return StabilityReport(stable, witness)


def stability(net: Network, method: str = "auto") -> StabilityReport:
    """Stability flags and witness leaves for every vertex.

    method "dominator" (default via "auto") computes immediate dominators in
    one topological pass; "deletion" removes each vertex in turn and checks
    leaf reachability. Both return identical reports; the deletion method is
    the simple oracle the tests compare against.
    """
    key = ("stab", method)
    if key in net._cache:
        return net._cache[key]
    net.require_valid()
    if method in ("auto", "dominator"):
        rep = _dominator_stability(net)
    elif method == "deletion":
        rep = _deletion_stability(net)
    else:
        raise ValueError(f"unknown stability method {method!r}")
    net._cache[key] = rep
    return rep


def _is_binary(net: Network) -> bool:
    return validate(net, require_binary=True).ok


def _subphylogeny_free(net: Network) -> bool:
    # A vertex roots a subphylogeny when no reticulation occurs among its
    # descendants; such a descendant set is a pendant subtree, so leaf
    # counts add up child-wise without double counting.
    order = net.topological_order()
    has_ret: dict[int, bool] = {}
    nleaves: dict[int, int] = {}
    ok = True
    for v in reversed(order):
        cs = net.children(v)
        hr = (net.in_degree(v) >= 2 and bool(cs)) or any(has_ret[c] for c in cs)
        has_ret[v] = hr
        if hr:
            nleaves[v] = 0
            continue
        nleaves[v] = 1 if not cs else sum(nleaves[c] for c in cs)
        if cs and nleaves[v] >= 2:
            ok = False
    return ok


def classify(net: Network) -> ClassFlags:
    """Class membership flags: binary, tree-child, reticulation-visible,
    nearly stable, subphylogeny-free."""
    net.require_valid()
    rep = stability(net)
    all_stable = all(rep.stable[v] for v in net.vertices)
    rv = all(rep.stable[r] for r in net.reticulations)
    ns = all(
        rep.stable[v] or all(rep.stable[p] for p in net.parents(v))
        for v in net.vertices
    )
    return ClassFlags(
        binary=_is_binary(net),
        tree_child=all_stable,
        reticulation_visible=rv,
        nearly_stable=ns,
        subphylogeny_free=_subphylogeny_free(net),
    )
