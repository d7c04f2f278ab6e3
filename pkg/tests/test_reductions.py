"""Suppression, cherry and uncle-nephew rewriting, trace replay."""

import pytest

from netdisplay.core import Branch, Network, NetworkEditor, PhyloTree
from netdisplay.errors import PatternMismatchError
from netdisplay.newick_io import canonical_equal, parse_network, parse_tree, serialize
from netdisplay.reductions import (
    ReductionStep,
    cherry_reduce,
    net_cherry,
    replay_trace,
    suppress_degenerate,
    uncle_nephew_reduce,
)
from netdisplay.tcp import oracle_displays

from helpers import RUNNING


def _without_branch(text, tail, head):
    ed = NetworkEditor(parse_network(text))
    ed.remove_branch(tail, head)
    return ed.freeze()


# ids in the running example: root 0, 1 -> {a=2, H1=3 -> b=4}, 5 -> {H1, c=6}


def test_suppress_after_left_in_branch_removed():
    net, step = suppress_degenerate(_without_branch(RUNNING, 1, 3))
    assert serialize(net) == "(a,(b,c));"
    assert step.kind == "suppress"
    assert set(step.contracted) == {1, 3}


def test_suppress_after_right_in_branch_removed():
    net, _ = suppress_degenerate(_without_branch(RUNNING, 5, 3))
    assert serialize(net) == "((a,b),c);"


def test_suppress_idempotent():
    net, _ = suppress_degenerate(_without_branch(RUNNING, 1, 3))
    again, step = suppress_degenerate(net)
    assert step.contracted == ()
    assert canonical_equal(net, again)
    assert [again.label(v) for v in again.vertices] == [
        net.label(v) for v in net.vertices
    ]


def test_suppress_dummy_cascade():
    # unlabeled outdegree-0 vertex disappears and takes its chain with it
    net = Network({0: [1, 4], 1: [2], 2: [3], 3: [], 4: []}, {4: "a"})
    out, step = suppress_degenerate(net)
    assert out.n_leaves == 1
    assert len(out.vertices) == 1
    assert out.label(out.root) == "a"
    # the chain contracts upward; the dummy 3 is deleted, not contracted
    assert set(step.contracted) == {0, 1, 2}


def test_suppress_root_chain():
    net = Network({0: [1], 1: [2, 3], 2: [], 3: []}, {2: "a", 3: "b"})
    out, _ = suppress_degenerate(net)
    assert serialize(out) == "(a,b);"


def test_suppress_merges_parallel_pair():
    # contracting 1 would duplicate the branch 0->2; the copies carry the
    # same resolutions so one of them goes instead
    net = Network({0: [1, 2], 1: [2], 2: [3], 3: []}, {3: "a"})
    out, _ = suppress_degenerate(net)
    assert len(out.vertices) == 1
    assert out.label(out.root) == "a"


def test_net_cherry_detection():
    assert net_cherry(parse_network(RUNNING)) is None
    found = net_cherry(parse_network("((a,b),c);"))
    assert found is not None
    l1, l2, p = found
    assert l1 < l2
    assert {l1, l2} == {2, 3} and p == 1
    assert net_cherry(parse_network("(a,(b,c));")) is not None
    # a reticulation parent does not make a cherry
    assert net_cherry(parse_network(RUNNING)) is None


def test_cherry_reduce_no_common_cherry_is_noop():
    net = parse_network(RUNNING)
    tree = parse_tree("((a,b),c);")
    out_net, out_tree, trace = cherry_reduce(net, tree)
    assert len(trace) == 0
    assert canonical_equal(out_net, net)


def test_cherry_reduce_collapses_both_cherries():
    net = parse_network("((a,b),(c,d));")
    tree = parse_tree("((a,b),(c,d));")
    out_net, out_tree, trace = cherry_reduce(net, tree)
    # the root is not a strict tree vertex, so (__r0,__r1) stays put
    assert len(trace) == 2
    assert len(out_net.vertices) == 3
    assert out_net.label_set() == out_tree.label_set()
    labels = [s.introduced_leaf[1] for s in trace.steps]
    assert len(set(labels)) == 2
    assert all(lab.startswith("__r") for lab in labels)


def test_cherry_reduce_keeps_leaf_sets_aligned():
    net = parse_network("(((a,b),(c)#H1),(#H1,d));")
    tree = parse_tree("(((a,b),c),d);")
    out_net, out_tree, trace = cherry_reduce(net, tree)
    assert len(trace) == 1
    assert out_net.label_set() == out_tree.label_set()
    assert out_net.num_reticulations == 1
    # only the common cherry went; (c,d) is a net cherry of neither side
    assert trace.steps[0].kind == "cherry"


def test_cherry_reduce_ignores_one_sided_cherries():
    net = parse_network("((a,b),c);")
    tree = parse_tree("(a,(b,c));")
    _, _, trace = cherry_reduce(net, tree)
    assert len(trace) == 0


def test_uncle_nephew_nonsibling_removes_site_branch():
    net = parse_network(RUNNING)
    tree = parse_tree("((a,b),c);")
    # below 5: leaf c and reticulation 3 over leaf b; b,c not siblings
    out, step = uncle_nephew_reduce(net, tree, 5)
    assert step.removed_branches == (Branch(5, 3),)
    assert serialize(out) == "((a,b),c);"
    assert oracle_displays(out, tree).displayed


def test_uncle_nephew_sibling_removes_outside_branch():
    net = parse_network(RUNNING)
    tree = parse_tree("(a,(b,c));")
    out, step = uncle_nephew_reduce(net, tree, 5)
    assert step.removed_branches == (Branch(1, 3),)
    assert serialize(out) == "(a,(b,c));"
    assert oracle_displays(out, tree).displayed


def test_uncle_nephew_preserves_the_verdict_both_ways():
    net = parse_network(RUNNING)
    for text in ("((a,b),c);", "(a,(b,c));", "((a,c),b);"):
        tree = parse_tree(text)
        before = oracle_displays(net, tree).displayed
        out, _ = uncle_nephew_reduce(net, tree, 5)
        assert oracle_displays(out, tree).displayed == before


def test_uncle_nephew_rejects_bad_sites():
    net = parse_network(RUNNING)
    tree = parse_tree("((a,b),c);")
    with pytest.raises(PatternMismatchError):
        uncle_nephew_reduce(net, tree, 0)  # root heads no such pattern
    with pytest.raises(PatternMismatchError):
        uncle_nephew_reduce(net, tree, 2)  # a leaf
    with pytest.raises(PatternMismatchError):
        uncle_nephew_reduce(net, tree, 99)  # not a vertex


def test_reduction_step_line_format():
    step = ReductionStep(
        "cherry", (Branch(1, 2), Branch(1, 3)), (), (1, "__r0")
    )
    assert step.to_line() == "cherry removed=1->2,1->3 contracted= introduced=1:__r0"
    bare = ReductionStep("suppress", (), (4, 5))
    assert bare.to_line() == "suppress removed= contracted=4,5"


def test_trace_text_one_line_per_step():
    net = parse_network("((a,b),(c,d));")
    tree = parse_tree("((a,b),(c,d));")
    _, _, trace = cherry_reduce(net, tree)
    text = trace.to_text()
    assert len(text.splitlines()) == len(trace)
    assert all(line.startswith("cherry") for line in text.splitlines())


def test_replay_trace_reproduces_states():
    net = parse_network("((a,b),(c,d));")
    tree = parse_tree("((a,b),(c,d));")
    out_net, out_tree, trace = cherry_reduce(net, tree)
    states = replay_trace(
        parse_network("((a,b),(c,d));"), parse_tree("((a,b),(c,d));"), trace
    )
    assert len(states) == len(trace) + 1
    final_net, final_tree = states[-1]
    assert serialize(final_net) == serialize(out_net)
    assert serialize(final_tree) == serialize(out_tree)
    # leaf label sets stay equal at every intermediate state
    for s_net, s_tree in states:
        assert s_net.label_set() == s_tree.label_set()


def test_replay_trace_covers_uncle_nephew():
    net = parse_network(RUNNING)
    tree = parse_tree("(a,(b,c));")
    out, step = uncle_nephew_reduce(net, tree, 5)
    from netdisplay.reductions import ReductionTrace

    trace = ReductionTrace([step])
    states = replay_trace(parse_network(RUNNING), tree, trace)
    assert serialize(states[-1][0]) == serialize(out)
