"""Shared fixtures and small tree builders used across the test modules."""

from __future__ import annotations

import itertools

from netdisplay.core import Network, PhyloTree

# running example: one reticulation, three leaves, everything stable
RUNNING = "((a,(b)#H1),(#H1,c));"

# closed form of the unstable-over-stable reticulation configuration:
# reticulation #H1 is unstable, its child reticulation #H2 is stable
UNSTABLE_OVER_STABLE = "(((((lb)#H2)#H1,d),x1),(#H1,(#H2,x3)));"
UNSTABLE_OVER_STABLE_RV = "((d,x1),(((lb)#H1,x3),#H1));"

# a tree vertex with two escaping reticulation children is unstable and
# parents an unstable reticulation, so the network is not nearly stable
NOT_NEARLY_STABLE = "((((a)#H3)#H1,(b)#H2),(#H1,(#H2,(#H3,c))));"

# tail patterns for the ten case shapes; letter = expected match_case id.
# F_triangle / H_triangle: w itself is the second parent of e resp. v.
CASE_FIXTURES = {
    "A": "((((l)#H2)#H1,lp),(#H1,(#H2,z)));",
    "B": "(((((l)#H2)#H1,(y,(c)#H3)),(#H1,z1)),((#H2,z2),(#H3,z3)));",
    "C": "((((l)#H1,e),x),(#H1,z));",
    "D": "((((l)#H1,(lp)#H2),lpp),(#H1,(#H2,z)));",
    "E": "(((l)#H1,(lp)#H2),(#H1,#H2));",
    "F": "((((l)#H1,(lp)#H2),(#H2,(z1)#H3)),(#H1,(#H3,z2)));",
    "G": "((((l)#H1,(lp)#H2),(#H2,y)),(#H1,z));",
    "H": "((((l)#H1,(lp)#H2),(#H1,(z1)#H3)),(#H2,(#H3,z2)));",
    "I": "((((l)#H1,(lp)#H2),(#H1,y)),(#H2,z));",
    "J": "((((l)#H1,(lp)#H2),(y,(c)#H3)),((#H1,#H2),(#H3,z)));",
    "F_triangle": "((((l)#H1,(lp)#H2),#H2),(#H1,z));",
    "H_triangle": "((((l)#H1,(lp)#H2),#H1),(#H2,z));",
}


def all_tree_shapes(labels):
    """Yield every binary tree shape over the labels as nested tuples."""
    labels = tuple(sorted(labels))

    def build(items):
        if len(items) == 1:
            yield items[0]
            return
        first, rest = items[0], items[1:]
        for k in range(1, len(items)):
            for pick in itertools.combinations(range(len(rest)), k - 1):
                left = (first,) + tuple(rest[i] for i in pick)
                right = tuple(rest[i] for i in range(len(rest)) if i not in pick)
                for lt in build(left):
                    for rt in build(right):
                        yield (lt, rt)

    yield from build(labels)


def tree_from_shape(shape) -> PhyloTree:
    out: dict[int, list[int]] = {}
    labels: dict[int, str] = {}
    counter = itertools.count()

    def mk(s) -> int:
        vid = next(counter)
        out[vid] = []
        if isinstance(s, str):
            labels[vid] = s
            return vid
        for half in s:
            out[vid].append(mk(half))
        return vid

    mk(shape)
    return PhyloTree.from_network(Network(out, labels))


def all_trees(labels):
    return [tree_from_shape(s) for s in all_tree_shapes(labels)]


def sibling_tree(first: str, second: str, labels) -> PhyloTree:
    """Caterpillar whose deepest cherry is (first, second)."""
    rest = sorted(set(labels) - {first, second})
    shape = (first, second)
    for lab in rest:
        shape = (shape, lab)
    return tree_from_shape(shape)


def non_sibling_tree(first: str, second: str, labels) -> PhyloTree:
    """Caterpillar that separates first from second; needs a third label."""
    rest = sorted(set(labels) - {first, second})
    assert rest, "need a third label to separate the pair"
    shape = (first, rest[0])
    for lab in rest[1:]:
        shape = (shape, lab)
    return tree_from_shape((shape, second))


def gen_with_fallback(n, rets, constraint, seed):
    """Generate, stepping the reticulation target down when tangling
    saturates (small leaf counts cannot absorb every request)."""
    from netdisplay.errors import GenerationExhaustedError
    from netdisplay.generator import GenSpec, generate

    for m in range(rets, -1, -1):
        try:
            return generate(GenSpec(n, m, constraint, seed=seed, max_rejections=2500))
        except GenerationExhaustedError:
            continue
    raise AssertionError("unreachable: a plain tree always generates")
