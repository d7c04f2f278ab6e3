"""Tree containment deciders.

Two routes to the same verdict: an exhaustive oracle that enumerates every
resolution of the reticulations (exponential, capped), and the reduction
loop that repeatedly collapses common cherries and prunes one of ten local
patterns at the tail of a longest root-leaf path. The loop needs the
network to be nearly stable; the oracle only needs it to be binary.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .core import Branch, Network, NetworkEditor, PhyloTree, classify
from .errors import (
    ClassPreconditionError,
    InternalConsistencyError,
    OracleCapExceededError,
    PatternMismatchError,
)
from .reductions import (
    ReductionStep,
    ReductionTrace,
    _check_same_leaves,
    _suppress_in_place,
    _uncle_nephew_branch,
    _uncle_nephew_site,
    cherry_reduce,
    net_cherry,
)

DEFAULT_ORACLE_CAP = 20


@dataclass(frozen=True)
class Resolution:
    """One kept in-branch per reticulation of the subject network."""

    kept_in_branch: tuple[tuple[int, Branch], ...] = ()

    def as_dict(self) -> dict:
        return dict(self.kept_in_branch)


@dataclass(frozen=True)
class CaseMatch:
    case_id: str
    bindings: dict

    def __str__(self) -> str:
        pairs = ",".join(f"{k}={v}" for k, v in sorted(self.bindings.items()))
        return f"case {self.case_id} [{pairs}]"


@dataclass
class ContainmentVerdict:
    displayed: bool
    trace: ReductionTrace = field(default_factory=ReductionTrace)
    certificate: Resolution | None = None
    iterations: int = 0
    reticulations_initial: int = 0


def apply_resolution(net: Network, res: Resolution) -> PhyloTree:
    """Keep one in-branch per reticulation, drop the rest, suppress."""
    rets = net.reticulations
    kept = res.as_dict()
    if len(kept) != len(res.kept_in_branch) or set(kept) != set(rets):
        raise ValueError("resolution must cover each reticulation exactly once")
    ed = NetworkEditor(net)
    for r in rets:
        b = kept[r]
        if b.head != r or not net.has_branch(b.tail, b.head):
            raise ValueError(f"kept branch {b} is not an in-branch of {r}")
        for p in net.parents(r):
            if p != b.tail:
                ed.remove_branch(p, r)
    _suppress_in_place(ed)
    return PhyloTree.from_network(ed.freeze())


def _canon_resolved(net: Network, kept: dict) -> str:
    """Canonical form of the tree a resolution induces, without building it.

    `kept` maps every reticulation to its kept parent (empty for trees).
    Branches into a reticulation from any other parent are ignored; dead
    ends and degree-two chains vanish by construction, matching the
    suppress rules.
    """
    memo: dict = {}
    stack = [(net.root, False)]
    while stack:
        v, done = stack.pop()
        if done:
            if net.is_leaf(v):
                memo[v] = net.label(v)
                continue
            forms = []
            for c in net.children(v):
                if c in kept and kept[c] != v:
                    continue
                f = memo[c]
                if f is not None:
                    forms.append(f)
            if not forms:
                memo[v] = None
            elif len(forms) == 1:
                memo[v] = forms[0]
            else:
                memo[v] = "(" + ",".join(sorted(forms)) + ")"
            continue
        if v in memo:
            continue
        stack.append((v, True))
        for c in net.children(v):
            if c in kept and kept[c] != v:
                continue
            if c not in memo:
                stack.append((c, False))
    form = memo[net.root]
    if form is None:
        raise InternalConsistencyError("resolution stranded every leaf")
    return form


def trees_equal(t1: PhyloTree, t2: PhyloTree) -> bool:
    """Rooted isomorphism respecting leaf labels."""
    return _canon_resolved(t1, {}) == _canon_resolved(t2, {})


def oracle_displays(
    net: Network, tree: PhyloTree, cap: int = DEFAULT_ORACLE_CAP
) -> ContainmentVerdict:
    """Exhaustive containment check over all resolutions.

    Work grows with the product of reticulation in-degrees (2^m on binary
    networks), so the reticulation count is capped.
    """
    net.require_valid(require_binary=True)
    _check_same_leaves(net, tree)
    rets = net.reticulations
    if len(rets) > cap:
        raise OracleCapExceededError(
            f"{len(rets)} reticulations exceed the oracle cap of {cap}"
        )
    target = _canon_resolved(tree, {})
    parent_lists = [sorted(net.parents(r)) for r in rets]
    for choice in itertools.product(*parent_lists):
        kept = dict(zip(rets, choice))
        if _canon_resolved(net, kept) == target:
            cert = Resolution(
                tuple((r, Branch(p, r)) for r, p in zip(rets, choice))
            )
            return ContainmentVerdict(
                True, ReductionTrace(), cert, 0, len(rets)
            )
    return ContainmentVerdict(False, ReductionTrace(), None, 0, len(rets))


def find_longest_root_leaf_path(net: Network) -> list:
    """A maximum-vertex-count root-to-leaf path.

    Dynamic program over a topological order; all ties break toward the
    smallest vertex id so repeated runs trace identically.
    """
    dist: dict = {}
    pred: dict = {}
    for v in net.topological_order():
        best_d, best_p = -1, None
        for p in net.parents(v):
            if dist[p] > best_d or (dist[p] == best_d and p < best_p):
                best_d, best_p = dist[p], p
        dist[v] = best_d + 1
        pred[v] = best_p
    leaf = None
    for v in net.vertices:
        if net.is_leaf(v) and (
            leaf is None
            or dist[v] > dist[leaf]
            or (dist[v] == dist[leaf] and v < leaf)
        ):
            leaf = v
    path = []
    cur = leaf
    while cur is not None:
        path.append(cur)
        cur = pred[cur]
    path.reverse()
    return path


def _local_dump(net: Network, ids) -> str:
    rows = []
    for x in sorted(set(ids)):
        if x not in net:
            rows.append(f"  {x}: <absent>")
            continue
        lab = net.label(x)
        row = f"  {x}: in={list(net.parents(x))} out={list(net.children(x))}"
        if lab is not None:
            row += f" label={lab}"
        rows.append(row)
    return "\n".join(rows)


def _fail_match(net: Network, msg: str, ids) -> None:
    raise InternalConsistencyError(
        f"{msg}; local structure:\n{_local_dump(net, ids)}"
    )


def _is_ret(net: Network, x: int) -> bool:
    return net.in_degree(x) == 2 and net.out_degree(x) == 1


def _other_child(net: Network, parent: int, known: int) -> int:
    cs = [c for c in net.children(parent) if c != known]
    if len(cs) != 1:
        raise PatternMismatchError(
            f"vertex {parent} lacks a unique child besides {known}"
        )
    return cs[0]


def _other_parent(net: Network, v: int, known: int) -> int:
    ps = [p for p in net.parents(v) if p != known]
    if len(ps) != 1:
        raise PatternMismatchError(
            f"vertex {v} lacks a unique parent besides {known}"
        )
    return ps[0]


def match_case(net: Network, path: list) -> CaseMatch:
    """Identify which of the ten tail patterns the network exhibits.

    `path` must come from find_longest_root_leaf_path and hold at least
    four vertices; the last four are examined as w, u, v, leaf. Expects a
    binary nearly-stable network with no cherry (so no leaf-bearing
    reticulation-free subtree either). A failure to match signals a broken
    precondition, not a negative verdict.
    """
    if len(path) < 4:
        raise InternalConsistencyError(
            "case dispatch needs a root-leaf path of at least 4 vertices"
        )
    l, v, u, w = path[-1], path[-2], path[-3], path[-4]
    around = [l, v, u, w]
    if not net.is_leaf(l):
        _fail_match(net, f"path does not end in a leaf ({l})", around)
    if not _is_ret(net, v):
        _fail_match(
            net, f"parent {v} of the path leaf is not a reticulation", around
        )
    bindings = {"w": w, "u": u, "v": v, "l": l}

    if net.in_degree(u) >= 2:
        # reticulation chain u above v
        if not _is_ret(net, u) or net.children(u) != (v,):
            _fail_match(net, f"vertex {u} is not a reticulation onto {v}", around)
        if net.out_degree(w) != 2 or u not in net.children(w):
            _fail_match(net, f"vertex {w} is not a binary parent of {u}", around)
        x = _other_child(net, w, u)
        if net.is_leaf(x):
            bindings["lp"] = x
            return CaseMatch("A", bindings)
        try:
            g_leaf, g_ret, g_ret_leaf = _uncle_nephew_site(net, x)
        except PatternMismatchError as exc:
            _fail_match(net, str(exc), around + [x])
        bindings.update(g=x, lp=g_leaf, h=g_ret, lpp=g_ret_leaf)
        return CaseMatch("B", bindings)

    # u is a tree vertex over v
    if net.out_degree(u) != 2 or v not in net.children(u):
        _fail_match(net, f"vertex {u} is not a binary parent of {v}", around)
    e = _other_child(net, u, v)
    if net.is_leaf(e):
        bindings["e"] = e
        return CaseMatch("C", bindings)
    if not _is_ret(net, e) or not net.is_leaf(net.children(e)[0]):
        _fail_match(
            net,
            f"sibling {e} of {v} is neither a leaf nor a reticulation onto a leaf",
            around + [e],
        )
    bindings["e"] = e
    bindings["lp"] = net.children(e)[0]
    if net.out_degree(w) != 2 or u not in net.children(w):
        _fail_match(net, f"vertex {w} is not a binary parent of {u}", around)
    g = _other_child(net, w, u)
    if g == e or g == v:
        # w itself is the second parent: both in-branches of that
        # reticulation resolve to identical trees, so the removal rules
        # for a separate joint parent apply verbatim with g played by w
        bindings["g"] = w
        return CaseMatch("F" if g == e else "H", bindings)
    if net.is_leaf(g):
        bindings["g"] = g
        bindings["lpp"] = g
        return CaseMatch("D", bindings)
    if net.in_degree(g) != 1 or net.out_degree(g) != 2:
        _fail_match(
            net, f"vertex {g} is neither a leaf nor a tree vertex", around + [g]
        )
    bindings["g"] = g
    cg = set(net.children(g))
    over_e, over_v = e in cg, v in cg
    if over_e and over_v:
        return CaseMatch("E", bindings)
    if over_e or over_v:
        h = _other_child(net, g, e if over_e else v)
        bindings["h"] = h
        if net.is_leaf(h):
            return CaseMatch("G" if over_e else "I", bindings)
        if not _is_ret(net, h) or not net.is_leaf(net.children(h)[0]):
            _fail_match(
                net,
                f"vertex {h} is neither a leaf nor a reticulation onto a leaf",
                around + [g, h],
            )
        bindings["lpp"] = net.children(h)[0]
        return CaseMatch("F" if over_e else "H", bindings)
    try:
        g_leaf, g_ret, g_ret_leaf = _uncle_nephew_site(net, g)
    except PatternMismatchError as exc:
        _fail_match(net, str(exc), around + [g])
    bindings.update(h=g_ret, lpp=g_ret_leaf)
    return CaseMatch("J", bindings)


def _siblings(net: Network, tree: PhyloTree, x: int, y: int) -> bool:
    """Do two net leaves sit under one parent in the reference tree?"""
    return tree.parent_of_label(net.label(x)) == tree.parent_of_label(
        net.label(y)
    )


def simplify_at_case(
    net: Network, tree: PhyloTree, m: CaseMatch
) -> tuple[Network, ReductionStep]:
    """Apply the branch removal the matched case prescribes, then suppress.

    Always removes at least one reticulation in-branch, so the reticulation
    count strictly drops. The verdict is never decided here; the removals
    preserve whether the tree is displayed.
    """
    _check_same_leaves(net, tree)
    b = m.bindings
    case = m.case_id
    if case in ("B", "C", "G", "I", "J"):
        site = b["u"] if case == "C" else b["g"]
        removed = (_uncle_nephew_branch(net, tree, site),)
    elif case == "A":
        if _siblings(net, tree, b["l"], b["lp"]):
            removed = (
                Branch(_other_parent(net, b["u"], b["w"]), b["u"]),
                Branch(_other_parent(net, b["v"], b["u"]), b["v"]),
            )
        else:
            removed = (Branch(b["w"], b["u"]),)
    elif case == "D":
        keep_together = _siblings(net, tree, b["l"], b["lpp"])
        if not keep_together and _siblings(net, tree, b["l"], b["lp"]):
            pair_parent = tree.parent_of_label(net.label(b["l"]))
            lpp_parent = tree.parent_of_label(net.label(b["lpp"]))
            keep_together = (
                pair_parent != tree.root
                and tree.parent(pair_parent) == lpp_parent
            )
        if keep_together:
            removed = (Branch(_other_parent(net, b["v"], b["u"]), b["v"]),)
        else:
            removed = (Branch(b["u"], b["v"]),)
    elif case == "E":
        removed = (Branch(b["u"], b["e"]), Branch(b["g"], b["v"]))
    elif case in ("F", "H"):
        on_g, off_g = (b["e"], b["v"]) if case == "F" else (b["v"], b["e"])
        if _siblings(net, tree, b["l"], b["lp"]):
            removed = (
                Branch(b["g"], on_g),
                Branch(_other_parent(net, off_g, b["u"]), off_g),
            )
        else:
            removed = (Branch(b["u"], on_g),)
    else:
        raise PatternMismatchError(f"unknown case id {case!r}")
    ed = NetworkEditor(net)
    for br in removed:
        if not net.has_branch(*br):
            raise PatternMismatchError(f"bound branch {br} is absent")
        ed.remove_branch(*br)
    contracted = _suppress_in_place(ed)
    return ed.freeze(), ReductionStep(
        f"case_{case}", tuple(removed), tuple(contracted)
    )


def displays(net: Network, tree: PhyloTree) -> ContainmentVerdict:
    """Decide whether the network displays the tree, in quadratic time.

    Loop: collapse cherries common to both sides; a reticulation-free
    network decides by tree equality; a remaining one-sided cherry decides
    negatively (it survives every resolution); tiny leftovers go to the
    oracle; otherwise one case match prunes at least one reticulation.
    The trace replays to the same verdict at every step.
    """
    net.require_valid(require_binary=True)
    _check_same_leaves(net, tree)
    if not classify(net).nearly_stable:
        raise ClassPreconditionError(
            "containment reduction requires a nearly stable network"
        )
    m0 = net.num_reticulations
    limit = m0 + net.n_leaves + 2
    trace = ReductionTrace()
    iterations = 0
    oracle_cert = None
    while True:
        iterations += 1
        if iterations > limit:
            raise InternalConsistencyError(
                "reduction loop exceeded its iteration bound"
            )
        net, tree, cherry_steps = cherry_reduce(net, tree)
        trace.extend(cherry_steps)
        if net.num_reticulations == 0:
            displayed = _canon_resolved(net, {}) == _canon_resolved(tree, {})
            break
        if net_cherry(net) is not None:
            # a cherry no common-cherry round removed survives every
            # resolution, and the tree has no matching sibling pair
            displayed = False
            break
        path = find_longest_root_leaf_path(net)
        if len(path) < 4 or net.num_reticulations < 3:
            sub = oracle_displays(net, tree)
            displayed = sub.displayed
            if displayed and len(trace) == 0:
                oracle_cert = sub.certificate
            break
        matched = match_case(net, path)
        reduced, step = simplify_at_case(net, tree, matched)
        trace.append(step)
        if reduced.num_reticulations >= net.num_reticulations:
            raise InternalConsistencyError(
                f"case {matched.case_id} removed no reticulation"
            )
        net = reduced
    certificate = None
    if displayed:
        if oracle_cert is not None:
            certificate = oracle_cert
        elif m0 == 0:
            certificate = Resolution(())
    return ContainmentVerdict(displayed, trace, certificate, iterations, m0)
