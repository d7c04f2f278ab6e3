"""Extended Newick parsing, canonical serialization, DOT emission."""

import random

import pytest

from netdisplay.core import stability
from netdisplay.errors import NewickParseError
from netdisplay.generator import GenSpec, generate
from netdisplay.newick_io import (
    canonical_equal,
    parse_network,
    parse_networks,
    parse_tree,
    parse_trees,
    serialize,
    to_dot,
)

from helpers import CASE_FIXTURES, UNSTABLE_OVER_STABLE, RUNNING


def test_parse_running_example_shape():
    net = parse_network(RUNNING)
    assert len(net.vertices) == 7
    assert net.num_reticulations == 1
    assert net.label_set() == {"a", "b", "c"}


def test_parse_cherry():
    net = parse_network("(a,b);")
    assert net.num_reticulations == 0
    assert net.n_leaves == 2


def test_parse_unmatched_hybrid_tag():
    with pytest.raises(NewickParseError) as err:
        parse_network("((a,(b)#H1),(#H2,c));")
    assert "hybrid tag" in str(err.value)


def test_parse_hybrid_with_two_subtrees_rejected():
    with pytest.raises(NewickParseError):
        parse_network("(((a)#H1,b),((c)#H1,d));")


def test_parse_diagnostics_carry_offsets():
    with pytest.raises(NewickParseError) as err:
        parse_network("((a,b);")
    diags = err.value.diagnostics
    assert diags
    assert all(d.offset >= 0 for d in diags)


def test_parse_trailing_content_rejected():
    with pytest.raises(NewickParseError):
        parse_network("(a,b);(c,d);")


def test_parse_networks_multiple_statements():
    nets = parse_networks("(a,b);\n# a comment line\n((a,(b)#H1),(#H1,c));\n")
    assert len(nets) == 2
    assert nets[1].num_reticulations == 1


def test_parse_empty_input_rejected():
    with pytest.raises(NewickParseError):
        parse_network("")
    with pytest.raises(NewickParseError):
        parse_network("   \n# only a comment\n")


def test_parse_reserved_label_namespace_rejected():
    with pytest.raises(NewickParseError):
        parse_network("(__r0,b);")


def test_parse_tree_examples():
    tree = parse_tree("((a,b),c);")
    assert tree.n_leaves == 3
    with pytest.raises(NewickParseError):
        parse_tree("(a,b,c);")
    with pytest.raises(NewickParseError):
        parse_tree(RUNNING)


def test_parse_trees_stream():
    trees = parse_trees("((a,b),c);\n(a,b);\n")
    assert [t.n_leaves for t in trees] == [3, 2]


def test_duplicate_leaf_label_rejected():
    with pytest.raises(NewickParseError):
        parse_network("(a,a);")


def test_whitespace_between_tokens_allowed():
    net = parse_network("( ( a , ( b ) #H1 ) , ( #H1 , c ) ) ;")
    assert canonical_equal(net, parse_network(RUNNING))


def test_serialize_single_leaf_and_cherry():
    assert serialize(parse_network("a;")) == "a;"
    assert serialize(parse_network("(b,a);")) == "(a,b);"


def test_serialize_round_trip_running_example():
    net = parse_network(RUNNING)
    again = parse_network(serialize(net))
    assert canonical_equal(net, again)


def test_serialize_renumbers_hybrid_tags():
    net = parse_network("((a,(b)#H7),(#H7,c));")
    assert "#H1" in serialize(net)
    assert "#H7" not in serialize(net)


def test_serialize_is_canonical_under_child_order():
    a = parse_network("((a,(b)#H1),(#H1,c));")
    b = parse_network("((#H1,c),((b)#H1,a));")
    assert serialize(a) == serialize(b)
    assert canonical_equal(a, b)


def test_canonical_equal_distinguishes_topologies():
    assert not canonical_equal(parse_network("((a,b),c);"), parse_network("(a,(b,c));"))


def test_round_trip_generated_corpus():
    rng = random.Random(8)
    for i in range(1000):
        net = generate(GenSpec(rng.randint(2, 7), rng.randint(0, 5), "any", seed=i))
        text = serialize(net)
        again = parse_network(text)
        assert canonical_equal(net, again)
        # serialization is a fixpoint
        assert serialize(again) == text


def test_round_trip_case_fixtures():
    for text in CASE_FIXTURES.values():
        net = parse_network(text)
        assert canonical_equal(net, parse_network(serialize(net)))


def test_fuzz_lite_never_crashes():
    rng = random.Random(99)
    alphabet = "()#;,Hh123abz _\t-.'\"\\\x00\xff"
    for _ in range(3000):
        text = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 30)))
        try:
            parse_network(text)
        except NewickParseError:
            pass


def test_to_dot_mentions_reticulations():
    net = parse_network(RUNNING)
    dot = to_dot(net)
    assert dot.startswith("digraph")
    assert "->" in dot
    assert "\\n[" not in dot
    report = stability(net)
    annotated = to_dot(net, report)
    # every vertex carries its witness leaf, '-' when unstable
    assert "\\n[" in annotated
    assert annotated.count("shape=box") == 1


def test_to_dot_multi_reticulation_runs():
    assert "digraph" in to_dot(parse_network(UNSTABLE_OVER_STABLE))
